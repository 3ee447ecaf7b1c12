"""Harness tests: run config, target files, metrics, CLI surface."""

import json
import random

import pytest

from conftest import TINY_TRIPLES, e, o
from tabkg.cli import main as cli_main
from tabkg.config import RunConfig, ServiceSpec
from tabkg.errors import ConfigError, EvaluationError, TabkgError
from tabkg.evaluate import evaluate, f1_score
from tabkg.kg import KnowledgeGraph, save_index
from tabkg.targets import read_annotations, read_targets, write_annotations
from tabkg.voting import AnnotationSet


# -- RunConfig ------------------------------------------------------------------


def test_defaults_match_contract():
    config = RunConfig()
    assert config.alpha == 100
    assert config.beta == 0.5
    assert all(getattr(config, f"w{i}") == 1.0 for i in range(1, 11))
    assert config.aggregation == "sum"
    assert config.pair_aggregation == "max"
    assert config.s8_source == "lookup"
    assert config.vote_weighting == "uniform"


def test_toml_roundtrip(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(
        """
alpha = 25
beta = 0.4
aggregation = "product"
seed = 7
weights.w1 = 2.0
weights.w9 = 0.5

[[services]]
type = "lookup-api"
endpoint = "http://svc/lookup"
timeout = 3.0

[[services]]
type = "sparql"
endpoint = "http://svc/sparql"
enabled = false
""",
        encoding="utf-8",
    )
    config = RunConfig.from_file(path)
    assert config.alpha == 25
    assert config.beta == 0.4
    assert config.aggregation == "product"
    assert config.w1 == 2.0 and config.w9 == 0.5 and config.w2 == 1.0
    assert len(config.services) == 2
    assert config.services[0] == ServiceSpec("lookup-api", "http://svc/lookup", 3.0)
    assert config.services[1].enabled is False


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha": 0},
        {"beta": 1.5},
        {"w1": -1.0},
        {"w1": 0.0, "w2": 0.0, "w3": 0.0, "w4": 0.0},
        {"w5": 0.0, "w6": 0.0},
        {"aggregation": "median"},
        {"pair_aggregation": "mean"},
        {"s8_source": "other"},
        {"vote_weighting": "square"},
        {"workers": 0},
    ],
)
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("alhpa = 3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.from_file(path)


def test_service_validation():
    with pytest.raises(ConfigError):
        RunConfig(services=[ServiceSpec("teleport", "http://x")])
    with pytest.raises(ConfigError):
        RunConfig(services=[ServiceSpec("sparql", "")])


# -- targets and annotations -------------------------------------------------------


def test_target_roundtrip(tmp_path):
    cea = tmp_path / "cea.csv"
    cea.write_text("t1,2,3\nt1,0,1\n", encoding="utf-8")
    cta = tmp_path / "cta.csv"
    cta.write_text("t1,0\nt1,1\n", encoding="utf-8")
    cpa = tmp_path / "cpa.csv"
    cpa.write_text("t1,0,1\n", encoding="utf-8")
    targets = read_targets(cea, cta, cpa)
    assert targets.cea == [("t1", 2, 3), ("t1", 0, 1)]
    assert targets.cta == [("t1", 0), ("t1", 1)]
    assert targets.cpa == [("t1", 0, 1)]
    assert targets.table_ids() == {"t1"}


def test_duplicate_targets_deduplicated(tmp_path, caplog):
    cea = tmp_path / "cea.csv"
    cea.write_text("t1,0,1\nt1,0,1\n", encoding="utf-8")
    import logging

    with caplog.at_level(logging.WARNING):
        targets = read_targets(cea_path=cea)
    assert targets.cea == [("t1", 0, 1)]
    assert any("duplicate" in r.message for r in caplog.records)


def test_bad_target_rows(tmp_path):
    bad = tmp_path / "cea.csv"
    bad.write_text("t1,x,1\n", encoding="utf-8")
    with pytest.raises(TabkgError):
        read_targets(cea_path=bad)
    bad.write_text("t1,-1,1\n", encoding="utf-8")
    with pytest.raises(TabkgError):
        read_targets(cea_path=bad)


def test_annotation_roundtrip(tmp_path):
    annotation = AnnotationSet("t1")
    annotation.cea[(3, 2)] = "http://ex/e1"
    annotation.cta[0] = ["http://ex/City", "http://ex/Place"]
    annotation.cpa[(0, 1)] = "http://ex/country"
    paths = write_annotations({"t1": annotation}, tmp_path / "out")
    back = read_annotations(paths["cea"], paths["cta"], paths["cpa"])
    assert back["t1"].cea == annotation.cea
    assert back["t1"].cta == annotation.cta
    assert back["t1"].cpa == annotation.cpa
    # format check: CEA line is table,col,row,entity
    line = (tmp_path / "out" / "cea.csv").read_text().strip()
    assert line == "t1,2,3,http://ex/e1"
    # CTA classes joined by a single space
    line = (tmp_path / "out" / "cta.csv").read_text().strip()
    assert line == "t1,0,http://ex/City http://ex/Place"


def test_write_only_targets(tmp_path):
    from tabkg.targets import TargetSet

    annotation = AnnotationSet("t1")
    annotation.cea[(1, 0)] = "http://ex/e1"
    annotation.cea[(2, 0)] = "http://ex/e2"
    subset = TargetSet(cea=[("t1", 0, 1), ("t1", 0, 9)])
    paths = write_annotations({"t1": annotation}, tmp_path / "out", subset)
    lines = (tmp_path / "out" / "cea.csv").read_text().splitlines()
    assert lines == ["t1,0,1,http://ex/e1"]  # unanswered target omitted


# -- evaluate -------------------------------------------------------------------------


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_perfect_cea_score(tmp_path):
    gold = write(tmp_path / "gold.csv", "t1,0,1,http://x/e1\nt1,0,2,http://x/e2\n")
    pred = write(tmp_path / "pred.csv", "t1,0,1,http://x/e1\nt1,0,2,http://x/e2\n")
    report = evaluate("cea", gold, pred)
    assert report.precision == 1.0
    assert report.recall == 1.0
    assert report.f1 == 1.0


def test_partial_cea_score(tmp_path):
    gold = write(
        tmp_path / "gold.csv",
        "t1,0,1,http://x/e1\nt1,0,2,http://x/e2\nt1,0,3,http://x/e3\nt1,0,4,http://x/e4\n",
    )
    pred = write(tmp_path / "pred.csv", "t1,0,1,http://x/e1\nt1,0,2,http://x/WRONG\n")
    report = evaluate("cea", gold, pred)
    assert report.precision == pytest.approx(1 / 2)
    assert report.recall == pytest.approx(1 / 4)
    assert report.f1 == pytest.approx(f1_score(0.5, 0.25))
    assert report.counts == {"correct": 1, "submitted": 2, "targets": 4, "missing": 2}


def test_empty_predictions(tmp_path):
    gold = write(tmp_path / "gold.csv", "t1,0,1,http://x/e1\n")
    pred = write(tmp_path / "pred.csv", "")
    report = evaluate("cea", gold, pred)
    assert report.precision == 0.0
    assert report.recall == 0.0
    assert report.f1 == 0.0


def test_cta_ah_hand_example(tmp_path, tiny_kg):
    # one column, submitted [City, Place] with gold City: 1 + 0.5 = 1.5
    gold = write(tmp_path / "gold.csv", f"t1,0,{o('City')}\n")
    pred = write(tmp_path / "pred.csv", f"t1,0,{o('City')} {o('Place')}\n")
    report = evaluate("cta", gold, pred, tiny_kg)
    assert report.ah == pytest.approx(1.5)
    assert report.counts["perfect"] == 1
    assert report.counts["okay"] == 1
    assert report.counts["wrong"] == 0


def test_cta_exact_only_is_one(tmp_path, tiny_kg):
    gold = write(tmp_path / "gold.csv", f"t1,0,{o('City')}\nt1,1,{o('Country')}\n")
    pred = write(tmp_path / "pred.csv", f"t1,0,{o('City')}\nt1,1,{o('Country')}\n")
    assert evaluate("cta", gold, pred, tiny_kg).ah == pytest.approx(1.0)


def test_cta_wrong_class_penalized(tmp_path, tiny_kg):
    gold = write(tmp_path / "gold.csv", f"t1,0,{o('City')}\n")
    pred = write(tmp_path / "pred.csv", f"t1,0,{o('Country')}\n")
    report = evaluate("cta", gold, pred, tiny_kg)
    assert report.ah == pytest.approx(-1.0)
    assert report.counts["wrong"] == 1


def test_cta_requires_graph(tmp_path):
    gold = write(tmp_path / "gold.csv", "t1,0,c\n")
    with pytest.raises(ValueError):
        evaluate("cta", gold, gold, None)


def test_f1_harmonic_identity_on_random_counts(tmp_path):
    rng = random.Random(8)
    for trial in range(30):
        targets = rng.randint(1, 40)
        submitted = rng.randint(0, targets)
        correct = rng.randint(0, submitted)
        gold_lines = [f"t,0,{i},http://x/e{i}" for i in range(targets)]
        pred_lines = [f"t,0,{i},http://x/e{i}" for i in range(correct)]
        pred_lines += [f"t,0,{i},http://x/WRONG" for i in range(correct, submitted)]
        gold = write(tmp_path / f"g{trial}.csv", "\n".join(gold_lines) + "\n")
        pred = write(tmp_path / f"p{trial}.csv", "\n".join(pred_lines) + "\n" if pred_lines else "")
        report = evaluate("cea", gold, pred)
        precision = correct / submitted if submitted else 0.0
        recall = correct / targets
        assert report.precision == pytest.approx(precision)
        assert report.recall == pytest.approx(recall)
        if precision + recall:
            assert report.f1 == pytest.approx(
                2 * precision * recall / (precision + recall)
            )
        else:
            assert report.f1 == 0.0


def test_unparsable_row_reports_line(tmp_path):
    gold = write(tmp_path / "gold.csv", "t1,0,1,http://x/e1\nt1,zero,2,http://x/e2\n")
    pred = write(tmp_path / "pred.csv", "t1,0,1,http://x/e1\n")
    with pytest.raises(EvaluationError) as info:
        evaluate("cea", gold, pred)
    assert info.value.line_no == 2


def test_predictions_outside_targets_ignored(tmp_path, caplog):
    import logging

    gold = write(tmp_path / "gold.csv", "t1,0,1,http://x/e1\n")
    pred = write(tmp_path / "pred.csv", "t1,0,1,http://x/e1\nt9,0,1,http://x/e9\n")
    with caplog.at_level(logging.WARNING):
        report = evaluate("cea", gold, pred)
    assert report.precision == 1.0
    assert any("outside the target set" in r.message for r in caplog.records)


# -- CLI --------------------------------------------------------------------------------


@pytest.fixture()
def cli_workspace(tmp_path):
    triples = tmp_path / "kg.nt"
    triples.write_text(TINY_TRIPLES + "\n", encoding="utf-8")
    tables = tmp_path / "tables"
    tables.mkdir()
    (tables / "cities.csv").write_text(
        "City,Country,Population\n"
        "Tokyo,Japan,13929286\n"
        "Osaka,Japan,2691185\n"
        "Paris,France,2148327\n",
        encoding="utf-8",
    )
    return tmp_path


def test_cli_full_flow(cli_workspace, capsys):
    root = cli_workspace
    index = root / "index"
    assert cli_main(["build-kg", "--triples", str(root / "kg.nt"), "--out", str(index)]) == 0
    capsys.readouterr()

    assert cli_main(["lookup", "--kg", str(index), "--query", "Tokyo", "--limit", "3"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0] == e("Tokyo")

    targets = root / "targets_cea.csv"
    targets.write_text(
        "cities,0,1\ncities,0,2\ncities,0,3\ncities,1,1\ncities,1,2\ncities,1,3\n",
        encoding="utf-8",
    )
    out_dir = root / "out"
    code = cli_main(
        [
            "annotate",
            "--kg", str(index),
            "--tables", str(root / "tables"),
            "--targets-cea", str(targets),
            "--out", str(out_dir),
        ]
    )
    assert code == 0
    capsys.readouterr()
    cea_lines = (out_dir / "cea.csv").read_text().strip().splitlines()
    assert f"cities,0,1,{e('Tokyo')}" in cea_lines
    assert (out_dir / "run_report.json").exists()

    gold = root / "gold.csv"
    gold.write_text(
        f"cities,0,1,{e('Tokyo')}\ncities,0,2,{e('Osaka')}\ncities,0,3,{e('Paris')}\n"
        f"cities,1,1,{e('Japan')}\ncities,1,2,{e('Japan')}\ncities,1,3,{e('France')}\n",
        encoding="utf-8",
    )
    assert cli_main(
        ["evaluate", "--task", "cea", "--gold", str(gold), "--pred", str(out_dir / "cea.csv")]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["f1"] == 1.0


def test_cli_usage_error_is_exit_1(capsys):
    assert cli_main(["annotate", "--kg", "/nonexistent"]) == 1


def test_cli_data_error_is_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.nt"
    bad.write_text("this is not a triple\n", encoding="utf-8")
    code = cli_main(["build-kg", "--triples", str(bad), "--out", str(tmp_path / "i")])
    assert code == 2


def test_cli_evaluate_cta_requires_kg(tmp_path, capsys):
    gold = tmp_path / "g.csv"
    gold.write_text("t,0,c\n", encoding="utf-8")
    code = cli_main(["evaluate", "--task", "cta", "--gold", str(gold), "--pred", str(gold)])
    assert code == 1  # usage error
