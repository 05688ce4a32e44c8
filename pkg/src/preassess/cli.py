"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 usage error. Machine mode
(--json) writes exactly one JSON document to stdout; human mode rounds
weights to at most 4 decimals.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import api as apimod, dtree, graph as graphmod, infotheory, report as reportmod
from . import store
from .errors import PreassessError
from .fmt import decimal4, recommendation_payload, weight_payload
from .probability import (
    PerformanceVector,
    Progress,
    Relearn,
    aggregate_scheme_posterior,
    fail_weight,
    recommend as recommend_for,
    weight_table_row,
)

__all__ = ["main"]


def echo_json(doc) -> None:
    click.echo(json.dumps(doc, indent=2))


def domain_errors(fn):
    """Map domain failures to exit code 1; click handles usage as 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PreassessError as exc:
            click.echo(f"error [{exc.code}]: {exc.message}", err=True)
            sys.exit(1)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def read_text(path: str) -> str:
    with open(path, encoding="utf-8") as handle:
        return handle.read()


@click.group()
def main() -> None:
    """Skills pre-assessment and recommendation toolkit."""


@main.command("validate-graph")
@click.argument("graph_file", type=click.Path(exists=True, dir_okay=False))
@domain_errors
def validate_graph(graph_file: str) -> None:
    """Parse and validate a knowledge-graph file."""
    g = graphmod.load_graph(read_text(graph_file))
    click.echo(f"ok: {len(g.parents)} parents, {len(g.leaves)} leaves")


@main.command("recommend")
@click.option("--graph", "graph_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--parent", required=True)
@click.option("--perf", required=True, help="P/F string aligned with the parent's leaves")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def recommend_cmd(graph_file: str, parent: str, perf: str, as_json: bool) -> None:
    """Recommendation for one parent's assessment outcomes."""
    g = graphmod.load_graph(read_text(graph_file))
    vector = PerformanceVector.from_string(perf, graphmod.leaves_under(g, parent))
    rec = recommend_for(g, parent, vector)
    if as_json:
        echo_json(recommendation_payload(rec))
        return
    if isinstance(rec, Progress):
        if rec.target is None:
            click.echo("progress: curriculum complete")
        else:
            click.echo(f"progress -> {rec.target}")
    else:
        assert isinstance(rec, Relearn)
        click.echo(f"relearn -> {', '.join(rec.leaves)} (weight {decimal4(rec.weight)})")


@main.command("fail-weight")
@click.option("--perf", required=True, help="P/F string, e.g. FPPP")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def fail_weight_cmd(perf: str, as_json: bool) -> None:
    """Fail weight of a performance string."""
    weight = fail_weight(PerformanceVector.from_string(perf))
    if as_json:
        echo_json({"performance": perf, "weight": weight_payload(weight)})
    else:
        click.echo(decimal4(weight))


@main.command("bayes")
@click.option("--counts", "counts_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--leaf", required=True)
@click.option("--scheme", type=click.Choice(["paper", "consistent"]), default="paper")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def bayes_cmd(counts_file: str, leaf: str, scheme: str, as_json: bool) -> None:
    """Posterior that a fail points at LEAF, from a counts CSV."""
    counts = store.parse_counts_csv(read_text(counts_file))
    posterior = aggregate_scheme_posterior(counts, leaf, scheme=scheme)
    if as_json:
        echo_json({"scheme": scheme, "leaf": leaf, "posterior": weight_payload(posterior)})
    else:
        click.echo(f"{leaf}: {decimal4(posterior)}")


@main.command("entropy-report")
@click.option("--episodes", "episodes_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def entropy_report_cmd(episodes_file: str, as_json: bool) -> None:
    """Entropy, info gain and gain ratio per attribute of an episodes CSV."""
    dataset = store.parse_episodes_csv(read_text(episodes_file))
    gains = infotheory.gain_report(dataset)
    if as_json:
        echo_json(gains.to_dict())
        return
    click.echo(f"dataset entropy {decimal4(gains.dataset_entropy)}")
    for attribute in dataset.attributes:
        gain = gains.per_attribute[attribute]
        click.echo(
            f"{attribute}: info gain {decimal4(gain.info_gain)}, "
            f"split info {decimal4(gain.split_info)}, "
            f"gain ratio {decimal4(gain.gain_ratio)}"
        )
        for feature, value in gain.per_feature.items():
            click.echo(f"  {feature} {decimal4(value)}")


def _load_split(episodes_file: str, split, seed):
    dataset = store.parse_episodes_csv(read_text(episodes_file))
    if split is None:
        return dataset, dataset
    if seed is None:
        raise click.UsageError("--split requires --seed")
    train, test = dtree.split_dataset(dataset, dtree.SplitSpec(split, seed))
    return train, test


@main.group("tree")
def tree_group() -> None:
    """Train and evaluate decision trees over episode records."""


@tree_group.command("train")
@click.option("--episodes", "episodes_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--criterion", type=click.Choice(["info_gain", "gain_ratio"]), default="gain_ratio")
@click.option("--min-leaf", type=int, default=2)
@click.option("--split", type=float, default=None, help="train fraction; rest is held out")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None)
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def tree_train(episodes_file, criterion, min_leaf, split, seed, out_file, as_json) -> None:
    """Induce a tree and print (or save) it."""
    train, _ = _load_split(episodes_file, split, seed)
    tree = dtree.build_tree(train, dtree.TrainConfig(criterion, min_leaf))
    if out_file:
        store.save_tree(out_file, tree)
    if as_json:
        echo_json(
            {
                "criterion": criterion,
                "min_leaf": min_leaf,
                "trained_on": len(train.records),
                "tree": dtree.tree_to_dict(tree),
            }
        )
    else:
        click.echo(dtree.render_tree(tree))


@tree_group.command("eval")
@click.option("--episodes", "episodes_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--criterion", type=click.Choice(["info_gain", "gain_ratio"]), default="gain_ratio")
@click.option("--min-leaf", type=int, default=2)
@click.option("--split", type=float, default=None, help="train fraction; evaluate on the rest")
@click.option("--seed", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def tree_eval(episodes_file, criterion, min_leaf, split, seed, as_json) -> None:
    """Induce a tree and report its confusion matrix."""
    train, test = _load_split(episodes_file, split, seed)
    tree = dtree.build_tree(train, dtree.TrainConfig(criterion, min_leaf))
    matrix = dtree.evaluate(tree, test)
    if as_json:
        echo_json(
            {
                "criterion": criterion,
                "min_leaf": min_leaf,
                "trained_on": len(train.records),
                "evaluated_on": len(test.records),
                "confusion": matrix.to_dict(),
            }
        )
        return
    click.echo(
        f"evaluated {matrix.total} record(s): {matrix.correct} correct, "
        f"{matrix.incorrect} misclassified (accuracy {decimal4(matrix.accuracy)})"
    )
    click.echo(f"  pass as pass {matrix.pass_as_pass}, pass as fail {matrix.pass_as_fail}")
    click.echo(f"  fail as pass {matrix.fail_as_pass}, fail as fail {matrix.fail_as_fail}")


@main.command("weight-table")
@click.option("--n", required=True, type=int)
@click.option("--csv", "as_csv", is_flag=True, help="emit plot-ready CSV")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def weight_table_cmd(n: int, as_csv: bool, as_json: bool) -> None:
    """Pass/fail weight pairs for an assessment of N leaves."""
    if as_csv and as_json:
        raise click.UsageError("--csv and --json are mutually exclusive")
    row = weight_table_row(n)
    if as_json:
        echo_json(
            {
                "n": row.n,
                "pairs": [
                    {"pass": weight_payload(p), "fail": weight_payload(f)}
                    for p, f in row.pairs
                ],
            }
        )
        return
    if as_csv:
        click.echo("fails,pass_weight,fail_weight")
        for fails, (p, f) in enumerate(row.pairs):
            click.echo(f"{fails},{decimal4(p)},{decimal4(f)}")
        return
    for fails, (p, f) in enumerate(row.pairs):
        click.echo(f"{fails} fails: pass {decimal4(p)}, fail {decimal4(f)}")


@main.command("serve")
@click.option("--graph", "graph_file", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_file", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--addr",
    envvar="PREASSESS_ADDR",
    default="127.0.0.1:8000",
    show_default=True,
    help="host:port; the flag beats the PREASSESS_ADDR variable",
)
@domain_errors
def serve_cmd(graph_file: str, log_file: str, addr: str) -> None:
    """Serve the HTTP API (and the web console, if bundled)."""
    try:
        apimod.serve(graph_file, log_file, addr)
    except OSError as exc:
        click.echo(f"error: cannot serve on {addr}: {exc}", err=True)
        sys.exit(1)


@main.command("reproduce-paper")
@click.option("--json", "as_json", is_flag=True)
@domain_errors
def reproduce_paper_cmd(as_json: bool) -> None:
    """Recompute the published reference values from the bundled fixtures."""
    checks = reportmod.run_report()
    all_passed = all(c.passed for c in checks)
    if as_json:
        echo_json(
            {
                "passed": all_passed,
                "checks": [
                    {
                        "name": c.name,
                        "published": c.published,
                        "computed": c.computed,
                        "verdict": c.verdict,
                        "note": c.note,
                    }
                    for c in checks
                ],
            }
        )
    else:
        click.echo(reportmod.render_report(checks))
    if not all_passed:
        sys.exit(1)


if __name__ == "__main__":
    main()
