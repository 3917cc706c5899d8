import time

import click

from analysis.extremal.extremal import (
    ExtremalResult,
    construction_upper,
    g_exact,
    graham_lower_chain,
    kleitman_spencer_g2,
    u_exact,
)
from commands.common import EXIT_BUDGET, EXIT_OK, emit_csv, emit_json, emit_table, finish, handle_errors, n_jobs
from core.custom_logging import logger
from core.hypercube import check_space, format_vertex
from core.reports import ExtremalReport

CSV_COLUMNS = ["k", "q", "quantity", "value", "method", "certificate"]


def _cross_check(result: ExtremalResult, budget) -> dict:
    k, q = result.k, result.q
    checks = {"construction_upper": construction_upper(k, q)[0]}
    if result.quantity == "g" and q >= 2:
        checks["chain_lower"] = graham_lower_chain(k, q, max_nodes=budget).value
        if q == 2 and k >= 2:
            checks["g2_formula"] = kleitman_spencer_g2(k)
    if result.value is not None:
        for name, bound in checks.items():
            if bound is None:
                continue
            disagrees = bound < result.value if name == "construction_upper" else (
                bound > result.value if name == "chain_lower" else bound != result.value
            )
            if disagrees:
                logger.warning(f"{result.quantity}({k},{q})={result.value} disagrees with {name}={bound}")
    return checks


@click.command("extremal")
@click.argument("quantity", type=click.Choice(["u", "g"]))
@click.option("-k", "k", type=int, required=True, help="Dimension of the cube.")
@click.option("-q", "q", type=int, required=True, help="Maximal Walsh degree.")
@click.option("--budget", type=int, default=None, help="Candidate sets (u) or search nodes (g); settings by default.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="json", show_default=True)
@handle_errors
def extremal(quantity, k, q, budget, fmt):
    """Compute u(k,q) or g(k,q) exactly, or bracket it when the budget runs out."""
    check_space(k, q)
    if budget is not None and budget < 1:
        raise click.BadParameter("must be positive", param_hint="--budget")
    started = time.perf_counter()
    if quantity == "u":
        result = u_exact(k, q, max_candidates=budget, n_jobs=n_jobs())
    else:
        result = g_exact(k, q, max_nodes=budget)
    elapsed = time.perf_counter() - started
    logger.info(f"{quantity}({k},{q}) = {result.value} [{result.status}] in {elapsed:.3f}s")

    certificate = sorted(format_vertex(x) for x in result.certificate or ())
    report = ExtremalReport(
        k=k,
        q=q,
        quantity=quantity,
        status=result.status,
        value=result.value,
        method=result.method,
        certificate=certificate,
        lower=result.lower,
        upper=result.upper,
        cross_check=_cross_check(result, budget),
        elapsed_seconds=round(elapsed, 6),
    )
    if fmt == "json":
        emit_json(report)
    elif fmt == "csv":
        emit_csv(
            [{"k": k, "q": q, "quantity": quantity, "value": result.value, "method": result.method,
              "certificate": " ".join(certificate)}],
            CSV_COLUMNS,
        )
    else:
        value = result.value if result.status == "exact" else f"[{result.lower}, {result.upper}]"
        emit_table(f"{quantity}({k},{q})", ["value", "method", "certificate"], [(value, result.method, " ".join(certificate))])
    finish(EXIT_OK if result.status == "exact" else EXIT_BUDGET)
