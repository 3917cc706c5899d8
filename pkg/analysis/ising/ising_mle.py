"""
The Ising family e(B^k_2) on the complete graph.

Densities are exp(H(x)) / Z with H(x) = theta0 + sum_i theta_i x_i +
sum_{i<j} theta_ij x_i x_j. Everything is computed by enumerating the 2^k
states, which is exact up to floating point. Whether a maximum likelihood
estimate exists is decided beforehand, exactly, by the uniqueness module.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.special import logsumexp
from scipy.stats import norm

from analysis.uniqueness.uniqueness import is_unique_cone, support_verdict
from core.custom_logging import logger
from core.errors import DimensionError, InputFormatError
from core.exact_math import LPProblem, lp_feasible
from core.hypercube import Vertex, check_dimension, format_vertex, parse_vertex
from core.walsh_basis import CoeffVector, WalshIndex

CHUNK = 1 << 16
DIVERGENCE_THRESHOLD = 50.0
CONDITION_LIMIT = 1e12


def pair_list(k: int) -> List[Tuple[int, int]]:
    """0-based pairs i<j in the order used by parameter vectors."""
    return sorted(combinations(range(k), 2), key=lambda ij: (1 << ij[0]) | (1 << ij[1]))


@dataclass
class IsingParams:
    k: int
    theta0: float = 0.0
    theta_i: np.ndarray = None
    theta_ij: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        check_dimension(self.k)
        self.theta_i = np.zeros(self.k) if self.theta_i is None else np.asarray(self.theta_i, dtype=float)
        if self.theta_i.shape != (self.k,):
            raise DimensionError(f"Expected {self.k} field parameters, got shape {self.theta_i.shape}")
        for (i, j), value in self.theta_ij.items():
            if not 0 <= i < j < self.k:
                raise DimensionError(f"Coupling index ({i},{j}) is not a pair i<j below k={self.k}")
        values = [self.theta0, *self.theta_i, *self.theta_ij.values()]
        if not np.all(np.isfinite(values)):
            raise ValueError("Ising parameters must be finite")

    def coupling_matrix(self) -> np.ndarray:
        J = np.zeros((self.k, self.k))
        for (i, j), value in self.theta_ij.items():
            J[i, j] = J[j, i] = value
        return J

    def to_vector(self) -> np.ndarray:
        """theta_i followed by theta_ij in pair_list order; theta0 is left out."""
        return np.concatenate([self.theta_i, [self.theta_ij.get(ij, 0.0) for ij in pair_list(self.k)]])

    @classmethod
    def from_vector(cls, k: int, vector: Sequence[float], theta0: float = 0.0) -> "IsingParams":
        vector = np.asarray(vector, dtype=float)
        pairs = pair_list(k)
        if vector.shape != (k + len(pairs),):
            raise DimensionError(f"Expected {k + len(pairs)} natural parameters, got {vector.shape}")
        return cls(k, theta0, vector[:k].copy(), {ij: float(v) for ij, v in zip(pairs, vector[k:])})


@dataclass
class HomogeneousParams:
    """Field B on every spin and inverse temperature beta on every pair."""

    B: float
    beta: float

    def expand(self, k: int) -> IsingParams:
        return IsingParams(k, 0.0, np.full(k, float(self.B)), {ij: float(self.beta) for ij in pair_list(k)})


@dataclass
class Sample:
    k: int
    counts: Dict[Vertex, int]

    def __post_init__(self):
        check_dimension(self.k)
        self.counts = {x: int(c) for x, c in self.counts.items() if c}
        for x, c in self.counts.items():
            if x.k != self.k:
                raise DimensionError(f"Sample point {x} does not have k={self.k}")
            if c < 0:
                raise ValueError(f"Negative count {c} for {x}")

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def scaled(self, factor: int) -> "Sample":
        return Sample(self.k, {x: c * factor for x, c in self.counts.items()})


@dataclass
class FitResult:
    status: str
    params: Optional[IsingParams] = None
    witness: Optional[CoeffVector] = None
    residual: Optional[float] = None
    iterations: int = 0
    homogeneous: Optional[HomogeneousParams] = None


def spins(k: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """Rows of +-1 spins for the vertices start..stop-1 (bit i is spin i)."""
    stop = (1 << k) if stop is None else stop
    bits = (np.arange(start, stop, dtype=np.int64)[:, None] >> np.arange(k)) & 1
    return 2.0 * bits - 1.0


def features(k: int) -> np.ndarray:
    """Walsh functions of degree 1 and 2 at every vertex, columns in parameter order."""
    X = spins(k)
    pairs = pair_list(k)
    if not pairs:
        return X
    return np.hstack([X, np.column_stack([X[:, i] * X[:, j] for i, j in pairs])])


def _energy(p: IsingParams, X: np.ndarray) -> np.ndarray:
    J = p.coupling_matrix()
    return p.theta0 + X @ p.theta_i + 0.5 * np.einsum("si,ij,sj->s", X, J, X)


def log_partition(p: IsingParams) -> float:
    """log sum_x exp(H(x)), streamed over chunks of states."""
    total = 1 << p.k
    parts = []
    for start in range(0, total, CHUNK):
        X = spins(p.k, start, min(total, start + CHUNK))
        parts.append(logsumexp(_energy(p, X)))
    return float(logsumexp(parts))


def probabilities(p: IsingParams) -> np.ndarray:
    H = _energy(p, spins(p.k))
    probs = np.exp(H - logsumexp(H))
    return probs / probs.sum()


def probability(p: IsingParams, x: Vertex) -> float:
    if x.k != p.k:
        raise DimensionError(f"Vertex {x} does not have k={p.k}")
    X = spins(p.k, x.bits, x.bits + 1)
    return float(np.exp(_energy(p, X)[0] - log_partition(p)))


def moments(p: IsingParams) -> Dict[WalshIndex, float]:
    """E_p[w_L] for every L with |L| <= 2, including E[w_0] = 1."""
    probs = probabilities(p)
    X = spins(p.k)
    first = probs @ X
    second = X.T @ (probs[:, None] * X)
    out = {WalshIndex(0, p.k): 1.0}
    for i in range(p.k):
        out[WalshIndex(1 << i, p.k)] = float(first[i])
    for i, j in pair_list(p.k):
        out[WalshIndex((1 << i) | (1 << j), p.k)] = float(second[i, j])
    return out


def sample_from(p: IsingParams, n: int, seed: int) -> Sample:
    """
    n iid draws from p, deterministic in the seed.

    Raises:
        ValueError: If n < 1.
    """
    if n < 1:
        raise ValueError(f"Sample size must be positive, got n={n}")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n, probabilities(p))
    return Sample(p.k, {Vertex(int(v), p.k): int(c) for v, c in enumerate(counts) if c})


def _count_vector(sample: Sample) -> np.ndarray:
    counts = np.zeros(1 << sample.k)
    for x, c in sample.counts.items():
        counts[x.bits] = c
    return counts


def log_likelihood(p: IsingParams, sample: Sample) -> float:
    """Average log-likelihood (1/n) sum log p(x_i)."""
    if sample.k != p.k:
        raise DimensionError(f"Sample has k={sample.k}, parameters have k={p.k}")
    H = _energy(p, spins(p.k))
    counts = _count_vector(sample)
    return float(counts @ (H - logsumexp(H)) / counts.sum())


class _Objective:
    """Average log-likelihood over a fixed feature matrix, without theta0."""

    def __init__(self, F: np.ndarray, weights: np.ndarray, counts: np.ndarray):
        self.F = F
        self.log_weights = np.log(weights)
        self.target = (counts @ F) / counts.sum()

    def value(self, theta: np.ndarray) -> float:
        return float(self.target @ theta - logsumexp(self.log_weights + self.F @ theta))

    def derivatives(self, theta: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
        eta = self.log_weights + self.F @ theta
        log_z = logsumexp(eta)
        probs = np.exp(eta - log_z)
        mean = probs @ self.F
        hessian = self.F.T @ (probs[:, None] * self.F) - np.outer(mean, mean)
        return float(self.target @ theta - log_z), self.target - mean, hessian


def _damped_newton(objective: _Objective, tol: float, max_iter: int) -> Tuple[np.ndarray, float, int, bool]:
    theta = np.zeros(objective.F.shape[1])
    for iteration in range(max_iter + 1):
        value, grad, hessian = objective.derivatives(theta)
        residual = float(np.max(np.abs(grad)))
        logger.debug(f"Newton iteration {iteration}: log-likelihood {value:.12g}, residual {residual:.3e}")
        if residual <= tol:
            return theta, residual, iteration, True
        if iteration == max_iter:
            break
        if np.linalg.cond(hessian) > CONDITION_LIMIT:
            logger.warning(f"Near-singular Hessian at iteration {iteration}; taking a gradient step")
            step = grad
        else:
            step = np.linalg.solve(hessian, grad)
        t = 1.0
        while objective.value(theta + t * step) < value - 1e-12 and t > 1e-12:
            t /= 2
        theta = theta + t * step
    return theta, residual, max_iter, False


def _check_spins(sample: Sample) -> None:
    if sample.k < 2:
        raise DimensionError(f"The Ising model needs at least two spins to carry a coupling, got k={sample.k}")


def fit_mle(sample: Sample, tol: float = 1e-10, max_iter: int = 100) -> FitResult:
    """
    Maximum likelihood fit of the full Ising family.

    The support is first tested for cone uniqueness in B^k_2; without it the
    supremum is not attained and the cone witness is returned instead of
    parameters. Otherwise damped Newton runs until every moment matches the
    sample within `tol`.

    Args:
        sample (Sample): Observed counts.
        tol (float): Bound on max_L |E[w_L] - sample mean of w_L|.
        max_iter (int): Newton iterations allowed.

    Returns:
        FitResult: Fitted, NonExistent with a witness, or Budget with the last iterate.

    Raises:
        DimensionError: If the sample has fewer than two spins.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_spins(sample)
    if sample.n == 0:
        raise ValueError("The sample is empty")
    verdict = support_verdict(sample.k, 2, sample.counts)
    if not verdict.is_unique:
        logger.info(f"No MLE: the support of {len(sample.counts)} points is not a set of uniqueness")
        return FitResult("NonExistent", witness=verdict.witness)
    k = sample.k
    objective = _Objective(features(k), np.ones(1 << k), _count_vector(sample))
    theta, residual, iterations, converged = _damped_newton(objective, tol, max_iter)
    params = IsingParams.from_vector(k, theta)
    params.theta0 = -log_partition(params)
    if not converged:
        logger.warning(f"Newton stopped after {max_iter} iterations with residual {residual:.3e}")
    return FitResult("Fitted" if converged else "Budget", params, None, residual, iterations)


@dataclass
class AscentTrace:
    theta_norms: List[float]
    log_likelihoods: List[float]
    diverged: bool
    params: IsingParams


def ungated_ascent(sample: Sample, max_iter: int = 500, threshold: float = DIVERGENCE_THRESHOLD) -> AscentTrace:
    """
    Newton ascent without the existence check, for diagnosing non-attainment.

    Steps are accepted while the likelihood does not drop by more than 1e-12;
    the run stops once ||theta||_inf passes `threshold`.
    """
    k = sample.k
    objective = _Objective(features(k), np.ones(1 << k), _count_vector(sample))
    theta = np.zeros(objective.F.shape[1])
    norms, values = [0.0], [objective.value(theta)]
    for _ in range(max_iter):
        value, grad, hessian = objective.derivatives(theta)
        try:
            step = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hessian, grad, rcond=None)[0]
        t = 1.0
        while objective.value(theta + t * step) < value - 1e-12 and t > 1e-12:
            t /= 2
        theta = theta + t * step
        norms.append(float(np.max(np.abs(theta))))
        values.append(objective.value(theta))
        if norms[-1] > threshold:
            logger.info(f"Ascent passed ||theta|| = {threshold} after {len(norms) - 1} steps")
            return AscentTrace(norms, values, True, IsingParams.from_vector(k, theta))
    return AscentTrace(norms, values, False, IsingParams.from_vector(k, theta))


def _level_features(k: int) -> Tuple[np.ndarray, np.ndarray]:
    s = np.array([2 * j - k for j in range(k + 1)], dtype=float)
    weights = np.array([math.comb(k, j) for j in range(k + 1)], dtype=float)
    return np.column_stack([s, (s * s - k) / 2]), weights


def homogeneous_witness(sample: Sample) -> Optional[CoeffVector]:
    """
    Nonnegative a + b s + c s^2 (s = sum x_i) vanishing on the sample's levels, if any.

    Such a function lies in B^k_2: s^2 = k + 2 sum_{i<j} x_i x_j.
    """
    k = sample.k
    levels = sorted({x.level for x in sample.counts})
    rows = [[1, 2 * j - k, (2 * j - k) ** 2] for j in range(k + 1)]
    total = [sum(math.comb(k, j) * rows[j][c] for j in range(k + 1)) for c in range(3)]
    a_eq = [rows[j] for j in levels] + [total]
    b_eq = [0] * len(levels) + [1]
    result = lp_feasible(LPProblem(3, a_eq, b_eq, rows, [0] * (k + 1)))
    if not result.feasible:
        return None
    a, b, c = result.witness
    coeffs = {0: a + c * k}
    for i in range(k):
        coeffs[1 << i] = b
    for i, j in pair_list(k):
        coeffs[(1 << i) | (1 << j)] = 2 * c
    return CoeffVector(k, 2, {m: Fraction(v) for m, v in coeffs.items()})


def fit_homogeneous(sample: Sample, tol: float = 1e-10, max_iter: int = 100) -> FitResult:
    """Maximum likelihood (B, beta) for the model with one field and one coupling."""
    _check_spins(sample)
    if sample.n == 0:
        raise ValueError("The sample is empty")
    witness = homogeneous_witness(sample)
    if witness is not None:
        return FitResult("NonExistent", witness=witness)
    k = sample.k
    F, weights = _level_features(k)
    counts = np.zeros(k + 1)
    for x, c in sample.counts.items():
        counts[x.level] += c
    theta, residual, iterations, converged = _damped_newton(_Objective(F, weights, counts), tol, max_iter)
    homogeneous = HomogeneousParams(float(theta[0]), float(theta[1]))
    params = homogeneous.expand(k)
    params.theta0 = -log_partition(params)
    return FitResult("Fitted" if converged else "Budget", params, None, residual, iterations, homogeneous)


@dataclass
class CurvePoint:
    n: int
    estimate: float
    half_width: float
    ci_low: float
    ci_high: float


def wilson_interval(hits: int, trials: int, confidence: float = 0.95) -> Tuple[float, float, float]:
    """Wilson score interval for a binomial proportion: (low, high, half_width)."""
    z = norm.ppf(0.5 + confidence / 2)
    p_hat = hits / trials
    denominator = 1 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denominator
    half = z * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials)) / denominator
    return max(0.0, center - half), min(1.0, center + half), half


def _replicate_support(probs: np.ndarray, n: int, seed: int, rep: int) -> Tuple[int, ...]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, rep]))
    return tuple(int(v) for v in np.flatnonzero(rng.multinomial(n, probs)))


def _support_unique(k: int, q: int, support: Tuple[int, ...]) -> bool:
    return is_unique_cone(k, q, [Vertex(m, k) for m in support]).is_unique


def prob_uniqueness_curve(
    k: int,
    q: int,
    p: IsingParams,
    n_values: Iterable[int],
    reps: int,
    seed: int,
    n_jobs: int = 1,
) -> List[CurvePoint]:
    """
    Monte Carlo estimate of P(support of an n-sample is a set of uniqueness).

    Replicate r at sample size n draws from SeedSequence([seed, n, r]), so every
    number is reproducible and independent of the worker count. Verdicts are
    cached per distinct support.

    Raises:
        ValueError: If reps < 100.
    """
    if reps < 100:
        raise ValueError(f"At least 100 replicates are needed, got {reps}")
    if p.k != k:
        raise DimensionError(f"Parameters have k={p.k}, expected {k}")
    probs = probabilities(p)
    verdicts: Dict[Tuple[int, ...], bool] = {}
    curve = []
    for n in n_values:
        supports = [_replicate_support(probs, n, seed, rep) for rep in range(reps)]
        fresh = sorted(set(supports) - verdicts.keys())
        results = Parallel(n_jobs=n_jobs)(delayed(_support_unique)(k, q, s) for s in fresh)
        verdicts.update(zip(fresh, results))
        hits = sum(verdicts[s] for s in supports)
        low, high, half = wilson_interval(hits, reps)
        logger.info(f"n={n}: {hits}/{reps} supports unique ({len(fresh)} new verdicts)")
        curve.append(CurvePoint(n, hits / reps, half, low, high))
    return curve


def format_sample(sample: Sample) -> str:
    lines = [f"{format_vertex(x)} {c}" for x, c in sorted(sample.counts.items())]
    return "\n".join(lines) + "\n"


def parse_sample(text: str, k: Optional[int] = None) -> Sample:
    """
    Parses `<vertex> <count>` lines; blank lines and lines starting with # are skipped.

    Raises:
        InputFormatError: On a malformed line, mixed dimensions or a k mismatch.
    """
    counts: Dict[Vertex, int] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputFormatError(f"Line {number}: expected '<vertex> <count>', got '{line}'")
        try:
            x = parse_vertex(parts[0])
            count = int(parts[1])
        except ValueError as e:
            raise InputFormatError(f"Line {number}: {e}") from e
        if count < 1:
            raise InputFormatError(f"Line {number}: count must be positive")
        if k is None:
            k = x.k
        if x.k != k:
            raise InputFormatError(f"Line {number}: vertex '{parts[0]}' does not have k={k}")
        counts[x] = counts.get(x, 0) + count
    if not counts:
        raise InputFormatError("The sample file has no observations")
    return Sample(k, counts)


def read_sample(path: Union[str, Path], k: Optional[int] = None) -> Sample:
    return parse_sample(Path(path).read_text(encoding="utf-8"), k)
