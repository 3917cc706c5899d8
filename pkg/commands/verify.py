from typing import Callable, Dict, List, Tuple

import click

from analysis.extremal.extremal import bounds_cases
from analysis.level_geometry.level_geometry import level_theorem_cases, polygon_cases, remark_cases
from commands.common import (
    EXIT_BUDGET,
    EXIT_NEGATIVE,
    EXIT_OK,
    emit_json,
    emit_table,
    finish,
    handle_errors,
    n_jobs,
    parse_k_range,
)
from core.custom_logging import logger
from core.reports import SuiteCase, VerifyReport

# suite -> (smallest k, cases for one k)
SUITES: Dict[str, Tuple[int, Callable[[int], List[SuiteCase]]]] = {
    "level-theorem": (2, lambda k: level_theorem_cases(k, n_jobs())),
    "polygon": (3, polygon_cases),
    "remarks": (2, remark_cases),
    "bounds": (1, lambda k: bounds_cases(k, n_jobs())),
}


@click.command("verify")
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@click.option("--k", "k_range", default="3..6", show_default=True, help="Inclusive range 'a..b' or a single k.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@handle_errors
def verify(suite, k_range, fmt):
    """Run a regression suite of checks over a range of dimensions."""
    low, high = parse_k_range(k_range)
    min_k, run = SUITES[suite]
    if low < min_k:
        raise click.BadParameter(f"suite '{suite}' needs k >= {min_k}", param_hint="--k")
    cases: List[SuiteCase] = []
    for k in range(low, high + 1):
        logger.info(f"Running suite '{suite}' for k={k}")
        cases.extend(run(k))
    failures = sum(case.status == "fail" for case in cases)
    skipped = sum(case.status == "skipped" for case in cases)
    report = VerifyReport(suite=suite, k_min=low, k_max=high, cases=cases, failures=failures, skipped=skipped)
    if fmt == "json":
        emit_json(report)
    else:
        emit_table(f"{suite} k={low}..{high}", ["k", "case", "status", "detail"],
                   [(c.k, c.name, c.status, c.detail) for c in cases])
    if failures:
        logger.warning(f"{failures} case(s) failed in suite '{suite}'")
        finish(EXIT_NEGATIVE)
    finish(EXIT_BUDGET if skipped else EXIT_OK)
