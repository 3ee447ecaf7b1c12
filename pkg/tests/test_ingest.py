"""Ingestion tests: decoding, tagging, language detection, CSV loading."""

import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabkg.errors import ConfigError, EmptyTableError
from tabkg.ingest import (
    EntityTyper,
    decode_text,
    default_class_mapping,
    ingest_table,
    load_class_mapping,
    load_gazetteer,
    parse_number,
    predict_datatype,
    predict_entity_type,
)
from tabkg.langid import (
    built_in_profiles,
    predict_language,
    profile_distance,
    rank_profile,
)


# -- decode_text -------------------------------------------------------------


def test_decode_clean_text_unchanged():
    assert decode_text("Tokyo") == "Tokyo"


def test_decode_collapses_whitespace():
    assert decode_text("  a \t b ") == "a b"


def test_decode_repairs_mojibake_roundtrip():
    # encode the clean string as UTF-8, misread it as Latin-1, expect repair
    broken = "Café".encode("utf-8").decode("latin-1")
    assert broken != "Café"
    assert decode_text(broken) == "Café"


def test_decode_repairs_double_mojibake():
    twice = "Café".encode("utf-8").decode("latin-1").encode("utf-8").decode("latin-1")
    assert decode_text(twice) == "Café"


def test_decode_handles_bytes_input():
    assert decode_text("Café".encode("utf-8")) == "Café"
    assert decode_text(b"") == ""
    assert decode_text(b"\xff\xfeplain") != ""  # undecodable bytes still yield text


def test_decode_strips_control_characters():
    assert decode_text("a\x00b\x1fc") == "a b c"


def test_decode_preserves_legitimate_accents():
    assert decode_text("mañana") == "mañana"
    assert decode_text("Café") == "Café"


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=40))
def test_decode_idempotent(text):
    once = decode_text(text)
    assert decode_text(once) == once


# -- predict_datatype ---------------------------------------------------------


@pytest.mark.parametrize(
    "value,expected",
    [
        ("12.5", "number"),
        ("-3", "number"),
        ("1,234,567", "number"),
        ("13929286", "number"),
        ("a@b.com", "email"),
        ("https://example.org/x", "url"),
        ("www.example.org", "url"),
        ("2020-05-01", "time"),
        ("5 January 2020", "time"),
        ("January 5, 2020", "time"),
        ("14:30", "time"),
        ("12/31/1999", "time"),
        ("$100", "amount-of-money"),
        ("99 EUR", "amount-of-money"),
        ("21 °C", "temperature"),
        ("100 fahrenheit", "temperature"),
        ("5 km", "distance"),
        ("3 miles", "distance"),
        ("2 l", "volume"),
        ("500 ml", "volume"),
        ("45 minutes", "duration"),
        ("3 days", "duration"),
        ("10 kg", "quantity"),
        ("3rd", "ordinal"),
        ("first", "ordinal"),
        ("+1 (555) 123-4567", "phone-number"),
        ("555-123-4567", "phone-number"),
        ("4111 1111 1111 1111", "credit-card-number"),
        ("Tokyo", "text"),
        ("", "text"),
        ("hello world", "text"),
    ],
)
def test_predict_datatype(value, expected):
    assert predict_datatype(value) == expected


def test_datatype_bare_digit_runs_are_numbers_not_phones():
    # long plain digit strings (e.g. populations) must stay numeric
    assert predict_datatype("13929286") == "number"
    assert predict_datatype("123456789012345") == "number"  # fails Luhn


def test_parse_number():
    assert parse_number("12.5") == 12.5
    assert parse_number("1,234") == 1234.0
    assert parse_number("-7") == -7.0
    assert parse_number("abc") is None
    assert parse_number("12 km") is None


def test_datatype_deterministic():
    for value in ("12.5", "Tokyo", "a@b.com", "5 km"):
        assert predict_datatype(value) == predict_datatype(value)


# -- predict_entity_type -------------------------------------------------------


def test_year_is_unmapped_date():
    tag, classes = predict_entity_type("1984")
    assert tag == "DATE"
    assert classes == frozenset()


def test_cardinal_for_plain_numbers():
    tag, classes = predict_entity_type("12.5")
    assert tag == "CARDINAL"
    assert classes == frozenset()


def test_gazetteer_hit_maps_to_classes(tmp_path):
    gaz = tmp_path / "gaz.csv"
    gaz.write_text("value,ner_tag\nTokyo,GPE\n", encoding="utf-8")
    mapping_path = tmp_path / "map.csv"
    mapping_path.write_text(
        "ner_tag,class_iri\nGPE,http://ex.org/o/Place\n", encoding="utf-8"
    )
    typer = EntityTyper(load_class_mapping(mapping_path), load_gazetteer(gaz))
    tag, classes = typer.tag("Tokyo")
    assert tag == "GPE"
    assert classes == frozenset({"http://ex.org/o/Place"})


@pytest.mark.parametrize(
    "value,expected",
    [
        ("Acme Corp", "ORG"),
        ("Kingdom of Spain", "GPE"),
        ("Lake Garda", "LOC"),
        ("Heathrow Airport", "FAC"),
        ("World War", "EVENT"),
        ("Patriot Act", "LAW"),
        ("Canadian", "NORP"),
        ("French", "LANGUAGE"),
        ("Latin", "LANGUAGE"),
        ("Dr. John Smith", "PERSON"),
        ("Marie Curie", "PERSON"),
        ("50%", "PERCENT"),
        ("$12", "MONEY"),
        ("2nd", "ORDINAL"),
        ("5 km", "QUANTITY"),
        ("14:30", "TIME"),
        ("Tokyo", "text"),
        ("lowercase words", "text"),
    ],
)
def test_heuristic_tagger(value, expected):
    tag, _ = predict_entity_type(value)
    assert tag == expected


def test_default_mapping_covers_the_mappable_tags():
    mapping = default_class_mapping()
    assert set(mapping) == {
        "PERSON", "NORP", "FAC", "ORG", "GPE", "LOC",
        "PRODUCT", "EVENT", "WORK_OF_ART", "LAW", "LANGUAGE",
    }
    for classes in mapping.values():
        assert classes


def test_mapping_rejects_unmappable_tags(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("ner_tag,class_iri\nDATE,http://x/Y\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_class_mapping(bad)


def test_entity_type_deterministic():
    for value in ("1984", "Acme Corp", "Tokyo", "12.5"):
        assert predict_entity_type(value) == predict_entity_type(value)


# -- predict_language ----------------------------------------------------------


def language_oracle(text: str) -> tuple[str, float]:
    """Independent recomputation of the detector's decision rule."""
    query = rank_profile(text)
    if not query:
        return ("en", 0.0)
    scores = {
        code: 1.0 - profile_distance(query, profile)
        for code, profile in built_in_profiles().items()
    }
    best = max(sorted(scores), key=lambda code: scores[code])
    return best, max(0.0, scores[best])


def test_english_sentence():
    code, confidence = predict_language("the quick brown fox jumps")
    assert code == "en"
    assert confidence > 0.5
    assert (code, confidence) == language_oracle("the quick brown fox jumps")


def test_german_sentence():
    code, confidence = predict_language("der schnelle braune Fuchs")
    assert code == "de"
    assert confidence > 0.5


def test_empty_input_falls_back():
    assert predict_language("") == ("en", 0.0)
    assert predict_language("12345 !!!") == ("en", 0.0)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("le gouvernement du pays a annoncé un nouveau plan", "fr"),
        ("el gobierno del país anunció un nuevo plan", "es"),
        ("il governo del paese ha annunciato un nuovo piano", "it"),
    ],
)
def test_other_languages(text, expected):
    code, confidence = predict_language(text)
    assert code == expected
    assert confidence > 0.5


# -- ingest_table ----------------------------------------------------------------


def write_csv(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_ingest_simple_table(tmp_path):
    path = write_csv(tmp_path / "t1.csv", "City,Country\nTokyo,Japan\nParis,France\n")
    table = ingest_table(path)
    assert table.table_id == "t1"
    assert table.n_rows == 3
    assert table.n_cols == 2
    assert table.header == ["City", "Country"]
    assert table.cells[1] == ["Tokyo", "Japan"]
    for row in table.contexts:
        for context in row:
            assert context.datatype
            assert context.entity_type


def test_ingest_pads_ragged_rows(tmp_path, caplog):
    path = write_csv(tmp_path / "ragged.csv", "a,b,c\n1,2\nx,y,z\n")
    with caplog.at_level(logging.WARNING):
        table = ingest_table(path)
    assert table.cells[1] == ["1", "2", ""]
    assert any("ragged" in record.message for record in caplog.records)


def test_ingest_rejects_empty_file(tmp_path):
    path = write_csv(tmp_path / "empty.csv", "")
    with pytest.raises(EmptyTableError):
        ingest_table(path)


def test_ingest_detects_table_language(tmp_path):
    rows = ["Name,Kind"]
    for name in ("Springfield", "Easton", "Westbrook", "Northfield", "Riverton",
                 "Lakewood", "Fairview", "Greenfield", "Oakdale", "Stonebridge"):
        rows.append(f"{name},town")
    path = write_csv(tmp_path / "places.csv", "\n".join(rows) + "\n")
    table = ingest_table(path)
    joined = " ".join(v for row in table.cells for v in row if v)
    assert table.language == language_oracle(joined)
    assert table.language[0] == "en"
    assert table.language[1] > 0.5


def test_ingest_repairs_mojibake_cells(tmp_path):
    broken = "Café".encode("utf-8").decode("latin-1")
    path = tmp_path / "moji.csv"
    path.write_bytes(f"Name\n{broken}\n".encode("utf-8"))
    table = ingest_table(path)
    assert table.cells[1][0] == "Café"
