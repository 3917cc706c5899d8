import click

from analysis.ising.ising_mle import (
    FitResult,
    HomogeneousParams,
    fit_homogeneous,
    fit_mle,
    format_sample,
    prob_uniqueness_curve,
    read_sample,
    sample_from,
)
from commands.common import (
    EXIT_BUDGET,
    EXIT_NEGATIVE,
    EXIT_OK,
    emit_csv,
    emit_json,
    finish,
    handle_errors,
    n_jobs,
    parse_int_list,
    witness_entries,
)
from core.custom_logging import logger
from core.hypercube import check_dimension, check_space, format_vertex
from core.reports import CurveReport, CurveRow, FitReport, SampleReport

FIT_EXIT_CODES = {"Fitted": EXIT_OK, "NonExistent": EXIT_NEGATIVE, "Budget": EXIT_BUDGET}


def fit_report(result: FitResult, model: str, k: int, n: int) -> FitReport:
    report = FitReport(model=model, status=result.status, k=k, n=n, residual=result.residual,
                       iterations=result.iterations, witness=witness_entries(result.witness))
    if result.params is not None:
        p = result.params
        report.theta0 = float(p.theta0)
        report.field = [float(v) for v in p.theta_i]
        report.couplings = {f"{i + 1},{j + 1}": float(v) for (i, j), v in sorted(p.theta_ij.items())}
    if result.homogeneous is not None:
        report.B = result.homogeneous.B
        report.beta = result.homogeneous.beta
    return report


@click.group("ising")
def ising():
    """Maximum likelihood for the Ising model on the complete graph."""


@ising.command("fit")
@click.option("--sample", "sample_path", type=click.Path(exists=True, dir_okay=False), required=True,
              help="File of '<vertex> <count>' lines.")
@click.option("-k", "k", type=int, default=None, help="Expected dimension; inferred from the file when omitted.")
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--max-iter", type=int, default=100, show_default=True)
@click.option("--homogeneous", is_flag=True, help="Fit the two-parameter model (B, beta).")
@handle_errors
def fit(sample_path, k, tol, max_iter, homogeneous):
    """Fit the MLE, or report the cone witness proving it does not exist."""
    sample = read_sample(sample_path, k)
    logger.info(f"Read {sample.n} observations on {len(sample.counts)} distinct points from {sample_path}")
    if homogeneous:
        result = fit_homogeneous(sample, tol=tol, max_iter=max_iter)
    else:
        result = fit_mle(sample, tol=tol, max_iter=max_iter)
    emit_json(fit_report(result, "homogeneous" if homogeneous else "full", sample.k, sample.n))
    finish(FIT_EXIT_CODES[result.status])


@ising.command("simulate")
@click.option("-k", "k", type=int, required=True)
@click.option("--n", "n", type=int, required=True, help="Sample size.")
@click.option("--seed", type=int, required=True)
@click.option("--field", "B", type=float, default=0.0, show_default=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["sample", "json"]), default="sample", show_default=True)
@handle_errors
def simulate(k, n, seed, B, beta, fmt):
    """Draw an iid sample from the homogeneous model."""
    check_dimension(k)
    sample = sample_from(HomogeneousParams(B, beta).expand(k), n, seed)
    if fmt == "json":
        counts = {format_vertex(x): c for x, c in sorted(sample.counts.items())}
        emit_json(SampleReport(k=k, n=sample.n, seed=seed, counts=counts))
    else:
        click.echo(format_sample(sample), nl=False)


@ising.command("curve")
@click.option("-k", "k", type=int, required=True)
@click.option("-q", "q", type=int, default=2, show_default=True)
@click.option("--n", "n_values", required=True, help="Comma-separated sample sizes.")
@click.option("--reps", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--field", "B", type=float, default=0.0, show_default=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@handle_errors
def curve(k, q, n_values, reps, seed, B, beta, fmt):
    """Estimate P(the support of an n-sample is a set of uniqueness) for each n."""
    check_space(k, q)
    sizes = parse_int_list(n_values, "sample sizes")
    if not sizes or min(sizes) < 1:
        raise click.BadParameter("expected positive sample sizes", param_hint="--n")
    points = prob_uniqueness_curve(k, q, HomogeneousParams(B, beta).expand(k), sizes, reps, seed, n_jobs=n_jobs())
    rows = [CurveRow(n=p.n, estimate=p.estimate, ci_low=p.ci_low, ci_high=p.ci_high, half_width=p.half_width)
            for p in points]
    if fmt == "json":
        emit_json(CurveReport(k=k, q=q, reps=reps, seed=seed, rows=rows))
    else:
        emit_csv([row.model_dump() for row in rows], ["n", "estimate", "ci_low", "ci_high"])
