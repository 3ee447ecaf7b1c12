"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error (unparsable input,
invalid config, broken index).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .config import RunConfig
from .errors import TabkgError
from .evaluate import evaluate as evaluate_files
from .kg import load_graph, load_index, save_index
from .numeric import DEFAULT_SEED, PROFILE_CAP, build_numeric_profiles
from .pipeline import run_pipeline
from .targets import read_targets, write_annotations


@click.group()
@click.version_option(version=__version__, prog_name="tabkg")
def cli() -> None:
    """Match tabular data to a knowledge graph (CEA / CTA / CPA)."""


@cli.command("build-kg")
@click.option("--triples", "triples_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="N-Triples input file.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Index directory to create.")
@click.option("--profile-cap", default=PROFILE_CAP, show_default=True,
              help="Max sampled values per numeric relation profile.")
@click.option("--seed", default=DEFAULT_SEED, show_default=True,
              help="Seed for profile reservoir sampling.")
def build_kg(triples_path: str, out_dir: str, profile_cap: int, seed: int) -> None:
    """Load triples, build all indexes and numeric profiles, save them."""
    graph = load_graph(triples_path)
    profiles = build_numeric_profiles(graph, cap=profile_cap, seed=seed)
    save_index(
        out_dir,
        graph,
        profiles,
        extra_manifest={
            "numeric_profiles": {
                "method": "ks",
                "relations": len(profiles),
                "cap": profile_cap,
                "seed": seed,
            }
        },
    )
    stats = graph.stats()
    click.echo(
        f"indexed {stats['entities']} entities, {stats['classes']} classes, "
        f"{stats['relations']} relations, {len(profiles)} numeric profiles -> {out_dir}"
    )


@cli.command()
@click.option("--kg", "kg_dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Index directory from build-kg.")
@click.option("--tables", "tables_dir", required=True,
              type=click.Path(exists=True, file_okay=False), help="Directory of CSV tables.")
@click.option("--targets-cea", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--targets-cta", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--targets-cpa", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory for cea.csv/cta.csv/cpa.csv and the run report.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="TOML run configuration.")
@click.option("--workers", type=int, default=None, help="Override worker count.")
def annotate(
    kg_dir: str,
    tables_dir: str,
    targets_cea: str | None,
    targets_cta: str | None,
    targets_cpa: str | None,
    out_dir: str,
    config_path: str | None,
    workers: int | None,
) -> None:
    """Run the full annotation pipeline over the targeted tables."""
    config = RunConfig.from_file(config_path) if config_path else RunConfig()
    if workers is not None:
        config.workers = workers
        config.validate()
    graph, profiles, _ = load_index(kg_dir)
    if targets_cea or targets_cta or targets_cpa:
        targets = read_targets(targets_cea, targets_cta, targets_cpa)
    else:
        targets = None
    annotations, report = run_pipeline(tables_dir, targets, graph, config, profiles)
    paths = write_annotations(annotations, out_dir, targets)
    report_path = Path(out_dir) / "run_report.json"
    with open(report_path, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2, sort_keys=True)
        handle.write("\n")
    total = {
        "cea": sum(len(a.cea) for a in annotations.values()),
        "cta": sum(len(a.cta) for a in annotations.values()),
        "cpa": sum(len(a.cpa) for a in annotations.values()),
    }
    click.echo(
        f"annotated {len(annotations)} table(s): "
        f"{total['cea']} CEA, {total['cta']} CTA, {total['cpa']} CPA "
        f"({len(report['errors'])} error(s)) -> {paths['cea'].parent}"
    )


@cli.command()
@click.option("--kg", "kg_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--query", required=True, help="Label text to search.")
@click.option("--limit", default=10, show_default=True)
@click.option("--language", default=None, help="Preferred label language code.")
def lookup(kg_dir: str, query: str, limit: int, language: str | None) -> None:
    """Search the local label index; prints one entity id per line."""
    graph, _, _ = load_index(kg_dir)
    for entity in graph.search_label(query, limit, language):
        click.echo(entity)


@cli.command()
@click.option("--task", required=True, type=click.Choice(["cea", "cta", "cpa"]))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kg", "kg_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Index directory (required for CTA).")
def evaluate(task: str, gold_path: str, pred_path: str, kg_dir: str | None) -> None:
    """Score predictions against gold annotations."""
    graph = None
    if task == "cta":
        if kg_dir is None:
            raise click.UsageError("--kg is required for CTA evaluation")
        graph, _, _ = load_index(kg_dir)
    report = evaluate_files(task, gold_path, pred_path, graph)
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))


def main(argv: list[str] | None = None) -> int:
    """Entry point mapping errors to the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except TabkgError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
