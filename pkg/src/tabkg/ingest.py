"""Table ingestion: text repair, per-cell tagging, CSV loading.

Every cell of an ingested table carries exactly one data-type tag, one
entity-type tag and an optional set of knowledge-graph classes derived
from a user-editable tag-to-class mapping.
"""

from __future__ import annotations

import csv
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError, EmptyTableError, TabkgError
from .langid import NgramLanguageDetector, default_detector

logger = logging.getLogger(__name__)

DATATYPE_TAGS = frozenset(
    {
        "number",
        "ordinal",
        "quantity",
        "temperature",
        "distance",
        "volume",
        "amount-of-money",
        "duration",
        "time",
        "email",
        "url",
        "phone-number",
        "credit-card-number",
        "text",
    }
)

NER_TAGS = frozenset(
    {
        "PERSON",
        "NORP",
        "FAC",
        "ORG",
        "GPE",
        "LOC",
        "PRODUCT",
        "EVENT",
        "WORK_OF_ART",
        "LAW",
        "LANGUAGE",
        "DATE",
        "TIME",
        "PERCENT",
        "MONEY",
        "QUANTITY",
        "ORDINAL",
        "CARDINAL",
    }
)

# Tags that denote named entities and may map to knowledge-graph classes.
MAPPABLE_TAGS = frozenset(
    {
        "PERSON",
        "NORP",
        "FAC",
        "ORG",
        "GPE",
        "LOC",
        "PRODUCT",
        "EVENT",
        "WORK_OF_ART",
        "LAW",
        "LANGUAGE",
    }
)


@dataclass(frozen=True)
class CellContext:
    """Decoded cell value plus its preprocessing tags."""

    value: str
    language: tuple[str, float]
    datatype: str
    entity_type: str
    mapped_classes: frozenset[str] = frozenset()


@dataclass
class Table:
    """Rectangular cell grid; row 0 is the header row."""

    table_id: str
    cells: list[list[str]]
    contexts: list[list[CellContext]] = field(default_factory=list)
    language: tuple[str, float] = ("en", 0.0)

    @property
    def n_rows(self) -> int:
        return len(self.cells)

    @property
    def n_cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    @property
    def header(self) -> list[str]:
        return self.cells[0]

    def data_rows(self) -> range:
        return range(1, self.n_rows)


# ---------------------------------------------------------------------------
# Text decoding


_MOJIBAKE_LEAD = re.compile("[Â-ô][-¿€‚ƒ„…"
                            "†‡ˆ‰Š‹ŒŽ‘’"
                            "“”•–—˜™š›œ"
                            "žŸ]")


def _repair_mojibake(text: str) -> str:
    # UTF-8 bytes read as cp1252/latin-1 show up as lead chars in C2-F4
    # followed by continuation-range chars; only then is a repair attempted.
    if not _MOJIBAKE_LEAD.search(text):
        return text
    for encoding in ("cp1252", "latin-1"):
        try:
            raw = text.encode(encoding)
        except UnicodeEncodeError:
            continue
        try:
            repaired = raw.decode("utf-8")
        except UnicodeDecodeError:
            continue
        if repaired != text:
            return repaired
        break
    return text


def _clean_pass(text: str) -> str:
    text = _repair_mojibake(text)
    text = unicodedata.normalize("NFC", text)
    text = "".join(" " if unicodedata.category(ch) in ("Cc", "Cf") else ch for ch in text)
    return " ".join(text.split())


def decode_text(raw: bytes | str) -> str:
    """Decode, repair and tidy one cell value.

    Bytes are decoded as UTF-8 (Latin-1 on failure). Mojibake from UTF-8
    read as Latin-1/cp1252 is re-decoded (repeatedly, so double-encoded
    text also heals), the result is NFC-normalized, control characters are
    stripped and whitespace is collapsed. The cleanup runs to a fixed
    point, so the function is idempotent on its own output.
    """
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            text = raw.decode("latin-1")
    else:
        text = raw
    for _ in range(16):
        cleaned = _clean_pass(text)
        if cleaned == text:
            break
        text = cleaned
    return text


# ---------------------------------------------------------------------------
# Data-type tagging (13 tags, fallback "text")


_NUMBER = re.compile(r"^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?([eE][+-]?\d+)?$")

_DATATYPE_RULES: list[tuple[str, re.Pattern]] = [
    ("email", re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")),
    ("url", re.compile(r"^(https?://\S+|www\.\S+\.\S+)$", re.IGNORECASE)),
    ("time", re.compile(
        r"^(\d{4}-\d{2}-\d{2}([ T]\d{2}:\d{2}(:\d{2})?)?"
        r"|\d{1,2}[/.]\d{1,2}[/.]\d{2,4}"
        r"|\d{1,2}:\d{2}(:\d{2})?( ?[ap]\.?m\.?)?"
        r"|(jan(uary)?|feb(ruary)?|mar(ch)?|apr(il)?|may|jun(e)?|jul(y)?|aug(ust)?|"
        r"sep(tember)?|oct(ober)?|nov(ember)?|dec(ember)?)\.? \d{1,2}(st|nd|rd|th)?(,? \d{4})?"
        r"|\d{1,2}(st|nd|rd|th)? (jan(uary)?|feb(ruary)?|mar(ch)?|apr(il)?|may|jun(e)?|"
        r"jul(y)?|aug(ust)?|sep(tember)?|oct(ober)?|nov(ember)?|dec(ember)?)\.?(,? \d{4})?)$",
        re.IGNORECASE)),
    ("amount-of-money", re.compile(
        r"^([$€£¥]\s?[+-]?[\d,]+(\.\d+)?|[+-]?[\d,]+(\.\d+)?\s?"
        r"(USD|EUR|GBP|JPY|CHF|dollars?|euros?|pounds? sterling|cents?))$",
        re.IGNORECASE)),
    ("temperature", re.compile(
        r"^[+-]?\d+(\.\d+)?\s?(°\s?[CF]|℃|℉|deg(rees)?( [CF])?|celsius|fahrenheit|kelvin)$",
        re.IGNORECASE)),
    ("distance", re.compile(
        r"^[+-]?[\d,]+(\.\d+)?\s?(km|cm|mm|m|mi|miles?|ft|feet|foot|yd|yards?|inch(es)?)$",
        re.IGNORECASE)),
    ("volume", re.compile(
        r"^[+-]?[\d,]+(\.\d+)?\s?(ml|cl|dl|l|litres?|liters?|gallons?|m3|m³)$",
        re.IGNORECASE)),
    ("duration", re.compile(
        r"^\d+(\.\d+)?\s?(seconds?|secs?|s|minutes?|mins?|hours?|hrs?|h|days?|weeks?|"
        r"months?|years?|yrs?)$",
        re.IGNORECASE)),
    ("quantity", re.compile(
        r"^[+-]?[\d,]+(\.\d+)?\s?(kg|mg|g|lbs?|oz|tons?|tonnes?|cups?|tbsp|tsp)$",
        re.IGNORECASE)),
    ("ordinal", re.compile(
        r"^(\d+(st|nd|rd|th)|first|second|third|fourth|fifth|sixth|seventh|eighth|"
        r"ninth|tenth)$",
        re.IGNORECASE)),
]

_PHONE = re.compile(r"^\+?[\d\s().-]+$")
_CARD_GROUPED = re.compile(r"^\d{4}([ -])\d{4}\1\d{4}\1\d{4}$")


def _luhn_valid(digits: str) -> bool:
    total = 0
    for pos, ch in enumerate(reversed(digits)):
        d = int(ch)
        if pos % 2 == 1:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return total % 10 == 0


def parse_number(value: str) -> float | None:
    """Parse a plain numeric literal; thousands separators allowed."""
    value = value.strip()
    if not _NUMBER.match(value):
        return None
    try:
        return float(value.replace(",", ""))
    except ValueError:
        return None


def predict_datatype(value: str) -> str:
    """Deterministic rule classifier over the 13 data-type tags."""
    value = value.strip()
    if not value:
        return "text"
    for tag, pattern in _DATATYPE_RULES:
        if pattern.match(value):
            return tag
    if _CARD_GROUPED.match(value):
        return "credit-card-number"
    digits = value.replace(" ", "").replace("-", "")
    if digits.isdigit() and 13 <= len(digits) <= 19 and _luhn_valid(digits):
        return "credit-card-number"
    if _PHONE.match(value):
        ndigits = sum(ch.isdigit() for ch in value)
        separs = sum(not ch.isdigit() for ch in value)
        if 7 <= ndigits <= 15 and (separs > 0):
            return "phone-number"
    if parse_number(value) is not None:
        return "number"
    return "text"


# ---------------------------------------------------------------------------
# Entity-type tagging (18 tags, fallback "text") and class mapping


_YEAR = re.compile(r"^[12]\d{3}$")
_PERCENT = re.compile(r"^[+-]?\d+(\.\d+)?\s?%$")
_CLOCK = re.compile(r"^\d{1,2}:\d{2}(:\d{2})?( ?[ap]\.?m\.?)?$", re.IGNORECASE)

_ORG_KEYWORDS = {
    "inc", "corp", "ltd", "llc", "co", "company", "corporation", "university",
    "institute", "bank", "group", "agency", "association", "ministry", "club",
}
_GPE_KEYWORDS = {
    "city", "republic", "kingdom", "states", "islands", "province", "county",
    "emirates", "federation",
}
_LOC_KEYWORDS = {
    "lake", "mount", "mountains", "river", "sea", "bay", "island", "valley",
    "desert", "ocean", "coast", "gulf",
}
_FAC_KEYWORDS = {
    "airport", "stadium", "bridge", "station", "tower", "castle", "palace",
    "dam", "harbor", "harbour",
}
_EVENT_KEYWORDS = {"war", "battle", "olympics", "festival", "cup", "revolution", "siege"}
_LAW_KEYWORDS = {"act", "law", "treaty", "constitution", "code", "directive"}
_LANGUAGES = {
    "english", "german", "french", "spanish", "italian", "japanese", "chinese",
    "russian", "arabic", "portuguese", "dutch", "korean", "hindi", "latin",
}
_NORP = {
    "american", "british", "german", "french", "japanese", "italian", "spanish",
    "chinese", "russian", "dutch", "canadian", "australian", "indian", "buddhist",
    "christian", "muslim", "jewish",
}
_HONORIFICS = {"mr", "mrs", "ms", "dr", "prof", "sir"}


class EntityTyper:
    """Heuristic named-entity tagger with a tag-to-class mapping.

    The mapping (and an optional gazetteer of known surface forms) is
    user-editable; see `load_class_mapping` / `load_gazetteer`. Any object
    with the same ``tag(value)`` method can stand in for it.
    """

    def __init__(
        self,
        class_mapping: dict[str, frozenset[str]] | None = None,
        gazetteer: dict[str, str] | None = None,
    ):
        self.class_mapping = class_mapping if class_mapping is not None else default_class_mapping()
        self.gazetteer = {k.casefold(): v for k, v in (gazetteer or {}).items()}

    def tag(self, value: str) -> tuple[str, frozenset[str]]:
        tag = self._tag_only(value.strip())
        return tag, self.class_mapping.get(tag, frozenset())

    def _tag_only(self, value: str) -> str:
        if not value:
            return "text"
        hit = self.gazetteer.get(value.casefold())
        if hit is not None:
            return hit
        if _YEAR.match(value):
            return "DATE"
        if _CLOCK.match(value):
            return "TIME"
        datatype = predict_datatype(value)
        if datatype == "time":
            return "DATE"
        if _PERCENT.match(value):
            return "PERCENT"
        if datatype == "amount-of-money":
            return "MONEY"
        if datatype == "ordinal":
            return "ORDINAL"
        if datatype in ("quantity", "distance", "volume", "temperature", "duration"):
            return "QUANTITY"
        if datatype == "number":
            return "CARDINAL"
        return self._capitalized_rules(value)

    def _capitalized_rules(self, value: str) -> str:
        tokens = value.split()
        if not tokens or not all(t[0].isupper() or t.lower() in ("of", "the", "and", "de", "la") for t in tokens):
            return "text"
        lowered = [t.lower().strip(".,") for t in tokens]
        if any(t in _ORG_KEYWORDS for t in lowered):
            return "ORG"
        if any(t in _GPE_KEYWORDS for t in lowered):
            return "GPE"
        if any(t in _LOC_KEYWORDS for t in lowered):
            return "LOC"
        if any(t in _FAC_KEYWORDS for t in lowered):
            return "FAC"
        if any(t in _EVENT_KEYWORDS for t in lowered):
            return "EVENT"
        if any(t in _LAW_KEYWORDS for t in lowered):
            return "LAW"
        if len(tokens) == 1:
            if lowered[0] in _LANGUAGES:
                return "LANGUAGE"
            if lowered[0] in _NORP:
                return "NORP"
            return "text"
        if lowered[0] in _HONORIFICS:
            return "PERSON"
        if 2 <= len(tokens) <= 4 and all(t.isalpha() for t in tokens):
            return "PERSON"
        return "text"


def load_class_mapping(path: str | Path) -> dict[str, frozenset[str]]:
    """Read a `ner_tag,class_iri` CSV into a tag-to-classes mapping."""
    mapping: dict[str, set[str]] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["ner_tag", "class_iri"]:
            raise ConfigError(f"{path}: expected header 'ner_tag,class_iri'")
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise ConfigError(f"{path}: malformed mapping row {row!r}")
            tag, iri = row[0].strip(), row[1].strip()
            if tag not in MAPPABLE_TAGS:
                raise ConfigError(f"{path}: tag {tag!r} is not a mappable entity tag")
            mapping.setdefault(tag, set()).add(iri)
    return {tag: frozenset(iris) for tag, iris in mapping.items()}


def load_gazetteer(path: str | Path) -> dict[str, str]:
    """Read a `value,ner_tag` CSV of known surface forms."""
    gazetteer: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["value", "ner_tag"]:
            raise ConfigError(f"{path}: expected header 'value,ner_tag'")
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2 or row[1].strip() not in NER_TAGS:
                raise ConfigError(f"{path}: malformed gazetteer row {row!r}")
            gazetteer[row[0].strip()] = row[1].strip()
    return gazetteer


_DEFAULT_MAPPING: dict[str, frozenset[str]] | None = None
_DEFAULT_TYPER: EntityTyper | None = None


def default_class_mapping() -> dict[str, frozenset[str]]:
    global _DEFAULT_MAPPING
    if _DEFAULT_MAPPING is None:
        source = resources.files("tabkg.data").joinpath("ner_classes.csv")
        with resources.as_file(source) as path:
            _DEFAULT_MAPPING = load_class_mapping(path)
    return _DEFAULT_MAPPING


def default_typer() -> EntityTyper:
    global _DEFAULT_TYPER
    if _DEFAULT_TYPER is None:
        _DEFAULT_TYPER = EntityTyper()
    return _DEFAULT_TYPER


def predict_entity_type(value: str) -> tuple[str, frozenset[str]]:
    """Tag `value` with the default heuristic tagger and class mapping."""
    return default_typer().tag(value)


# ---------------------------------------------------------------------------
# Table loading


def ingest_table(
    path: str | Path,
    typer: EntityTyper | None = None,
    detector: NgramLanguageDetector | None = None,
) -> Table:
    """Read a CSV file into a fully decoded and tagged Table.

    Ragged rows are padded with empty cells (with a warning). The table
    language is detected over the concatenation of all cell values.
    """
    path = Path(path)
    typer = typer or default_typer()
    detector = detector or default_detector()
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise TabkgError(f"cannot read table file {path}: {exc}") from exc
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError:
        text = blob.decode("latin-1")
    rows = [row for row in csv.reader(text.splitlines())]
    if not rows:
        raise EmptyTableError(f"{path}: table has no rows")
    width = max(len(row) for row in rows)
    cells: list[list[str]] = []
    padded = 0
    for row in rows:
        if len(row) < width:
            row = row + [""] * (width - len(row))
            padded += 1
        cells.append([decode_text(value) for value in row])
    if padded:
        logger.warning("%s: padded %d ragged row(s) to %d columns", path.name, padded, width)
    table_language = detector.detect(" ".join(v for row in cells for v in row if v))
    contexts = []
    for row in cells:
        context_row = []
        for value in row:
            tag, classes = typer.tag(value)
            context_row.append(
                CellContext(
                    value=value,
                    language=detector.detect(value),
                    datatype=predict_datatype(value),
                    entity_type=tag,
                    mapped_classes=classes,
                )
            )
        contexts.append(context_row)
    return Table(table_id=path.stem, cells=cells, contexts=contexts, language=table_language)
