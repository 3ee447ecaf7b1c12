"""Evaluation metrics: precision/recall/F1 for CEA and CPA, AH for CTA.

The AH score follows the SemTab 2019 challenge definition: each submitted
class counts once per column, +1 for the exact gold class, +0.5 for a
strict ancestor of it, -1 otherwise, averaged over target columns. It can
exceed 1 when correct ancestors are submitted alongside the exact class.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EvaluationError
from .kg import KnowledgeGraph

logger = logging.getLogger(__name__)

TASKS = ("cea", "cta", "cpa")


@dataclass
class EvalReport:
    task: str
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    ah: float | None = None
    counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"task": self.task, "counts": dict(self.counts)}
        for name in ("precision", "recall", "f1", "ah"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; zero when both components are zero."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _strip_iri(value: str) -> str:
    value = value.strip()
    if value.startswith("<") and value.endswith(">"):
        value = value[1:-1]
    return value


def _read_keyed(path: str | Path, n_ints: int, what: str) -> dict[tuple, str]:
    """CSV rows keyed by (table, *coords) with the answer string as value."""
    out: dict[tuple, str] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2 + n_ints:
                raise EvaluationError(line_no, f"{what} row needs {2 + n_ints} columns, got {len(row)}")
            try:
                coords = tuple(int(v) for v in row[1 : 1 + n_ints])
            except ValueError:
                raise EvaluationError(line_no, f"non-integer coordinate in {what} row")
            key = (row[0], *coords)
            answer = row[1 + n_ints].strip()
            if key in out:
                logger.warning("%s:%d: duplicate %s row for %s, keeping first", path, line_no, what, key)
                continue
            out[key] = answer
    return out


def evaluate(
    task: str,
    gold_path: str | Path,
    pred_path: str | Path,
    kg: KnowledgeGraph | None = None,
) -> EvalReport:
    """Score a prediction file against a gold file.

    CTA needs the knowledge graph for ancestor judgments. Predictions for
    coordinates outside the gold target set are ignored with a warning.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    n_ints = 1 if task == "cta" else 2
    gold = _read_keyed(gold_path, n_ints, f"gold {task}")
    pred = _read_keyed(pred_path, n_ints, f"predicted {task}")

    ignored = [key for key in pred if key not in gold]
    if ignored:
        logger.warning("%d prediction(s) outside the target set were ignored", len(ignored))
    scored = {key: value for key, value in pred.items() if key in gold}

    if task == "cta":
        if kg is None:
            raise ValueError("CTA evaluation requires the knowledge graph")
        return _evaluate_cta(gold, scored, kg)

    correct = sum(
        1 for key, answer in scored.items() if _strip_iri(answer) == _strip_iri(gold[key])
    )
    submitted = len(scored)
    total = len(gold)
    precision = correct / submitted if submitted else 0.0
    recall = correct / total if total else 0.0
    return EvalReport(
        task=task,
        precision=precision,
        recall=recall,
        f1=f1_score(precision, recall),
        counts={
            "correct": correct,
            "submitted": submitted,
            "targets": total,
            "missing": total - submitted,
        },
    )


def _evaluate_cta(
    gold: dict[tuple, str],
    pred: dict[tuple, str],
    kg: KnowledgeGraph,
) -> EvalReport:
    perfect = okay = wrong = 0
    for key, gold_answer in gold.items():
        answer = pred.get(key)
        if answer is None:
            continue
        gold_class = _strip_iri(gold_answer)
        seen: set[str] = set()
        for submitted in answer.split(" "):
            submitted = _strip_iri(submitted)
            if not submitted or submitted in seen:
                continue
            seen.add(submitted)
            if submitted == gold_class:
                perfect += 1
            elif submitted in kg.ancestors(gold_class):
                okay += 1
            else:
                wrong += 1
    total = len(gold)
    ah = (perfect + 0.5 * okay - wrong) / total if total else 0.0
    return EvalReport(
        task="cta",
        ah=ah,
        counts={
            "perfect": perfect,
            "okay": okay,
            "wrong": wrong,
            "targets": total,
            "missing": total - len(pred),
        },
    )
