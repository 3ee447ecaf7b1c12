"""Target files and annotation serialization.

All files are plain CSV. Coordinates are zero-based with row 0 the header
row. CEA rows are `table,col,row[,entity]`, CTA rows `table,col[,classes]`
(classes space-separated, most specific first) and CPA rows
`table,head_col,tail_col[,relation]`. Answers are written only for
answered targets; missing answers are omitted, never blank-padded.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import TabkgError
from .voting import AnnotationSet

logger = logging.getLogger(__name__)


@dataclass
class TargetSet:
    cea: list[tuple[str, int, int]] = field(default_factory=list)  # (table, col, row)
    cta: list[tuple[str, int]] = field(default_factory=list)  # (table, col)
    cpa: list[tuple[str, int, int]] = field(default_factory=list)  # (table, head, tail)

    def table_ids(self) -> set[str]:
        ids = {t for t, _, _ in self.cea}
        ids |= {t for t, _ in self.cta}
        ids |= {t for t, _, _ in self.cpa}
        return ids

    def is_empty(self) -> bool:
        return not (self.cea or self.cta or self.cpa)


def _read_rows(path: str | Path, n_ints: int, label: str) -> list[tuple]:
    rows: list[tuple] = []
    seen: set[tuple] = set()
    duplicates = 0
    with open(path, newline="", encoding="utf-8") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) < 1 + n_ints:
                raise TabkgError(f"{path}:{line_no}: expected {1 + n_ints} columns")
            try:
                coords = tuple(int(value) for value in row[1 : 1 + n_ints])
            except ValueError as exc:
                raise TabkgError(f"{path}:{line_no}: non-integer coordinate") from exc
            if any(value < 0 for value in coords):
                raise TabkgError(f"{path}:{line_no}: negative coordinate")
            key = (row[0], *coords)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            rows.append(key)
    if duplicates:
        logger.warning("%s: dropped %d duplicate %s target(s)", path, duplicates, label)
    return rows


def read_targets(
    cea_path: str | Path | None = None,
    cta_path: str | Path | None = None,
    cpa_path: str | Path | None = None,
) -> TargetSet:
    """Read the three target files (each optional) into one TargetSet."""
    targets = TargetSet()
    if cea_path is not None:
        targets.cea = [(t, c, r) for t, c, r in _read_rows(cea_path, 2, "CEA")]
    if cta_path is not None:
        targets.cta = [(t, c) for t, c in _read_rows(cta_path, 1, "CTA")]
    if cpa_path is not None:
        targets.cpa = [(t, h, tl) for t, h, tl in _read_rows(cpa_path, 2, "CPA")]
    return targets


def write_annotations(
    annotations: dict[str, AnnotationSet],
    out_dir: str | Path,
    targets: TargetSet | None = None,
) -> dict[str, Path]:
    """Write cea.csv / cta.csv / cpa.csv under `out_dir`.

    With a TargetSet only targeted coordinates are written (in target
    order); otherwise everything annotated is written, sorted.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "cea": out_dir / "cea.csv",
        "cta": out_dir / "cta.csv",
        "cpa": out_dir / "cpa.csv",
    }

    def cea_rows():
        if targets is not None:
            for table_id, col, row in targets.cea:
                entity = _get(annotations, table_id, "cea", (row, col))
                if entity:
                    yield [table_id, col, row, entity]
        else:
            for table_id in sorted(annotations):
                for (row, col), entity in sorted(annotations[table_id].cea.items()):
                    if entity:
                        yield [table_id, col, row, entity]

    def cta_rows():
        if targets is not None:
            for table_id, col in targets.cta:
                classes = _get(annotations, table_id, "cta", col)
                if classes:
                    yield [table_id, col, " ".join(classes)]
        else:
            for table_id in sorted(annotations):
                for col, classes in sorted(annotations[table_id].cta.items()):
                    if classes:
                        yield [table_id, col, " ".join(classes)]

    def cpa_rows():
        if targets is not None:
            for table_id, head, tail in targets.cpa:
                relation = _get(annotations, table_id, "cpa", (head, tail))
                if relation:
                    yield [table_id, head, tail, relation]
        else:
            for table_id in sorted(annotations):
                for (head, tail), relation in sorted(annotations[table_id].cpa.items()):
                    if relation:
                        yield [table_id, head, tail, relation]

    for task, rows in (("cea", cea_rows()), ("cta", cta_rows()), ("cpa", cpa_rows())):
        with open(paths[task], "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            for row in rows:
                writer.writerow(row)
    return paths


def _get(annotations: dict[str, AnnotationSet], table_id: str, task: str, key):
    annotation = annotations.get(table_id)
    if annotation is None:
        return None
    return getattr(annotation, task).get(key)


def read_annotations(
    cea_path: str | Path | None = None,
    cta_path: str | Path | None = None,
    cpa_path: str | Path | None = None,
) -> dict[str, AnnotationSet]:
    """Read annotation files back into AnnotationSets (round-trip of write)."""
    out: dict[str, AnnotationSet] = {}

    def ensure(table_id: str) -> AnnotationSet:
        if table_id not in out:
            out[table_id] = AnnotationSet(table_id)
        return out[table_id]

    if cea_path is not None:
        for line_no, row in _answer_rows(cea_path, 4):
            table_id, col, row_id, entity = row[0], int(row[1]), int(row[2]), row[3]
            ensure(table_id).cea[(row_id, col)] = entity
    if cta_path is not None:
        for line_no, row in _answer_rows(cta_path, 3):
            table_id, col, classes = row[0], int(row[1]), row[2].split(" ")
            ensure(table_id).cta[col] = [c for c in classes if c]
    if cpa_path is not None:
        for line_no, row in _answer_rows(cpa_path, 4):
            table_id, head, tail, relation = row[0], int(row[1]), int(row[2]), row[3]
            ensure(table_id).cpa[(head, tail)] = relation
    return out


def _answer_rows(path: str | Path, width: int):
    with open(path, newline="", encoding="utf-8") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != width:
                raise TabkgError(f"{path}:{line_no}: expected {width} columns")
            try:
                int(row[1])
                if width == 4:
                    int(row[2])
            except ValueError as exc:
                raise TabkgError(f"{path}:{line_no}: non-integer coordinate") from exc
            yield line_no, row
