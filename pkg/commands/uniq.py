import time

import click

from analysis.uniqueness.uniqueness import Problem, Space, decide, validate_witness
from commands.common import (
    EXIT_NEGATIVE,
    EXIT_OK,
    emit_json,
    emit_table,
    finish,
    handle_errors,
    parse_int_list,
    parse_points,
    witness_entries,
)
from core.custom_logging import logger
from core.hypercube import LevelSpec, Vertex, format_vertex, level_set, parse_vertex
from core.reports import UniqReport


@click.command("uniq")
@click.option("-k", "k", type=int, required=True, help="Dimension of the cube.")
@click.option("-q", "q", type=int, required=True, help="Maximal Walsh degree.")
@click.option("--levels", default=None, help="Comma-separated distances D; tests W_D.")
@click.option("--points", default=None, help="Comma-separated vertices such as '---,+++'.")
@click.option("--base", default=None, help="Base vertex of W_D (default all '-').")
@click.option("--space", type=click.Choice(["cone", "linear"]), default="cone", show_default=True)
@click.option("--formulation", type=click.Choice(["values", "coefficients"]), default="values", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@handle_errors
def uniq(k, q, levels, points, base, space, formulation, fmt):
    """Decide whether a vertex set is a set of uniqueness for B^k_q or its cone."""
    if (levels is None) == (points is None):
        raise click.UsageError("Pass exactly one of --levels and --points")
    if base is not None and levels is None:
        raise click.UsageError("--base only applies to --levels")
    D = None
    if levels is not None:
        D = parse_int_list(levels, "levels")
        base_vertex = parse_vertex(base) if base else Vertex(0, k)
        U = sorted(level_set(LevelSpec(k, frozenset(D), base_vertex)))
    else:
        U = sorted(set(parse_points(points, k)))

    problem = Problem(k, q, frozenset(U), Space(space))
    started = time.perf_counter()
    kwargs = {"formulation": formulation} if problem.space is Space.CONE else {}
    verdict = decide(problem, **kwargs)
    elapsed = time.perf_counter() - started
    logger.info(f"uniq k={k} q={q} |U|={len(U)}: {verdict.kind.value} via {verdict.method} in {elapsed:.3f}s")

    report = UniqReport(
        k=k,
        q=q,
        space=space,
        points=[format_vertex(x) for x in U],
        levels=sorted(D) if D is not None else None,
        base=base,
        verdict=verdict.kind.value,
        method=verdict.method,
        witness=witness_entries(verdict.witness),
        witness_valid=validate_witness(problem, verdict),
        elapsed_seconds=round(elapsed, 6),
    )
    if fmt == "json":
        emit_json(report)
    else:
        rows = [("verdict", report.verdict), ("method", report.method), ("points", len(U))]
        rows += [(f"w{entry.L}", f"{entry.num}/{entry.den}") for entry in report.witness or []]
        emit_table(f"uniq k={k} q={q} ({space})", ["field", "value"], rows)
    finish(EXIT_OK if verdict.is_unique else EXIT_NEGATIVE)
