"""
Set-of-uniqueness decisions for B^k_q and its nonnegative cone.

A set U is a set of uniqueness when the only function of the space (or of the
cone) vanishing on U is zero. For the cone this is also the test for existence
of the maximum likelihood estimator of e(B^k_q) on a sample with support U.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import FrozenSet, Iterable, List, Mapping, Optional, Union

from core.custom_logging import logger
from core.errors import DimensionError
from core.exact_math import LPProblem, kernel_basis, lp_feasible
from core.hypercube import Subcube, Vertex, check_space, submasks_ascending
from core.walsh_basis import (
    CoeffVector,
    basis_masks,
    eval_mask,
    restriction_matrix,
    subcube_indicator,
    walsh_sign,
)


class Space(str, Enum):
    LINEAR = "linear"
    CONE = "cone"


class VerdictKind(str, Enum):
    UNIQUE = "Unique"
    NOT_UNIQUE = "NotUnique"


@dataclass(frozen=True)
class UniquenessVerdict:
    """
    Outcome of a uniqueness test.

    `method` names the step that settled it: full-set, rank, transversal,
    lp-values, lp-coefficients or level-lp.
    """

    kind: VerdictKind
    witness: Optional[CoeffVector] = None
    method: str = ""

    def __post_init__(self):
        if (self.kind is VerdictKind.NOT_UNIQUE) != (self.witness is not None):
            raise ValueError("A witness is present exactly when the verdict is NotUnique")

    @property
    def is_unique(self) -> bool:
        return self.kind is VerdictKind.UNIQUE

    @classmethod
    def unique(cls, method: str) -> "UniquenessVerdict":
        return cls(VerdictKind.UNIQUE, None, method)

    @classmethod
    def not_unique(cls, witness: CoeffVector, method: str) -> "UniquenessVerdict":
        return cls(VerdictKind.NOT_UNIQUE, witness, method)


@dataclass(frozen=True)
class Problem:
    k: int
    q: int
    U: FrozenSet[Vertex]
    space: Space = Space.CONE

    def __post_init__(self):
        check_space(self.k, self.q)
        object.__setattr__(self, "U", frozenset(self.U))
        object.__setattr__(self, "space", Space(self.space))
        _masks(self.k, self.U)


def _masks(k: int, U: Iterable[Vertex]) -> List[int]:
    masks = set()
    for u in U:
        if u.k != k:
            raise DimensionError(f"Vertex {u} has k={u.k}, expected {k}")
        masks.add(u.bits)
    return sorted(masks)


def is_unique_linear(k: int, q: int, U: Iterable[Vertex]) -> UniquenessVerdict:
    """
    Uniqueness for the linear space B^k_q.

    U is unique exactly when the restriction matrix has full column rank; a
    kernel vector is the witness otherwise (it vanishes on U but may change sign).

    Args:
        k (int): Dimension of the cube.
        q (int): Maximal Walsh degree.
        U (Iterable[Vertex]): The candidate set.

    Returns:
        UniquenessVerdict: Unique, or NotUnique with a kernel witness.
    """
    check_space(k, q)
    masks = _masks(k, U)
    columns = basis_masks(k, q)
    if not masks:
        return UniquenessVerdict.not_unique(CoeffVector(k, q, {0: Fraction(1)}), "rank")
    M = restriction_matrix(k, q, [Vertex(m, k) for m in masks])
    kernel = kernel_basis(M)
    if not kernel:
        return UniquenessVerdict.unique("rank")
    witness = CoeffVector(k, q, dict(zip(columns, kernel[0])))
    return UniquenessVerdict.not_unique(witness, "rank")


def missed_subcube(k: int, q: int, U: Iterable[Vertex]) -> Optional[Subcube]:
    """
    First (k-q)-subcube, in enumeration order, that U does not meet.

    Returns:
        Optional[Subcube]: The subcube, or None when U is a transversal.
    """
    check_space(k, q)
    masks = _masks(k, U)
    for positions in sorted(combinations(range(k), q), key=lambda c: sum(1 << i for i in c)):
        fixed = sum(1 << i for i in positions)
        seen = {m & fixed for m in masks}
        if len(seen) == 1 << q:
            continue
        for sign in submasks_ascending(fixed):
            if sign not in seen:
                return Subcube(fixed, sign, k)
    return None


def is_transversal(k: int, q: int, U: Iterable[Vertex]) -> bool:
    """True when U meets every (k-q)-subcube."""
    return missed_subcube(k, q, U) is None


def _values_lp(k: int, q: int, masks: List[int]) -> UniquenessVerdict:
    # Unknowns are the values of phi off U; phi lies in B^k_q exactly when it is
    # orthogonal to every Walsh function of degree above q.
    inside = set(masks)
    free = [x for x in range(1 << k) if x not in inside]
    if not free:
        return UniquenessVerdict.unique("lp-values")
    low = set(basis_masks(k, q))
    high = [L for L in range(1 << k) if L not in low]
    a_eq = [[walsh_sign(L, x) for x in free] for L in high]
    b_eq = [0] * len(high)
    a_eq.append([1] * len(free))
    b_eq.append(1 << k)
    logger.debug(f"Value-space LP for k={k}, q={q}: {len(a_eq)} rows, {len(free)} variables")
    result = lp_feasible(LPProblem(len(free), a_eq, b_eq, nonnegative=True))
    if not result.feasible:
        return UniquenessVerdict.unique("lp-values")
    scale = Fraction(1, 1 << k)
    coeffs = {}
    for L in basis_masks(k, q):
        coeffs[L] = scale * sum((v * walsh_sign(L, x) for x, v in zip(free, result.witness) if v), Fraction(0))
    return UniquenessVerdict.not_unique(CoeffVector(k, q, coeffs), "lp-values")


def _coefficients_lp(k: int, q: int, masks: List[int]) -> UniquenessVerdict:
    columns = basis_masks(k, q)
    inside = set(masks)
    a_eq = [[walsh_sign(L, u) for L in columns] for u in masks]
    b_eq = [0] * len(masks)
    a_eq.append([1 if L == 0 else 0 for L in columns])
    b_eq.append(1)
    outside = [x for x in range(1 << k) if x not in inside]
    a_ge = [[walsh_sign(L, x) for L in columns] for x in outside]
    b_ge = [0] * len(outside)
    logger.debug(f"Coefficient LP for k={k}, q={q}: {len(a_eq) + len(a_ge)} rows, {len(columns)} variables")
    result = lp_feasible(LPProblem(len(columns), a_eq, b_eq, a_ge, b_ge))
    if not result.feasible:
        return UniquenessVerdict.unique("lp-coefficients")
    return UniquenessVerdict.not_unique(CoeffVector(k, q, dict(zip(columns, result.witness))), "lp-coefficients")


def is_unique_cone(
    k: int,
    q: int,
    U: Iterable[Vertex],
    formulation: str = "values",
    shortcuts: bool = True,
) -> UniquenessVerdict:
    """
    Uniqueness for the cone (B^k_q)_+ of nonnegative functions.

    A nonzero phi >= 0 has sum 2^k * coeff[w_0] > 0, so fixing coeff[w_0] = 1 loses
    nothing; the question becomes feasibility of an exact LP. The "values"
    formulation works with the values of phi off U, "coefficients" with the Walsh
    coefficients directly; both decide the same thing.

    Args:
        k (int): Dimension of the cube.
        q (int): Maximal Walsh degree.
        U (Iterable[Vertex]): The candidate set.
        formulation (str): "values" or "coefficients".
        shortcuts (bool): Settle full sets, missed subcubes and linear uniqueness
            before the LP.

    Returns:
        UniquenessVerdict: Unique, or NotUnique with a nonnegative witness vanishing on U.
    """
    check_space(k, q)
    if formulation not in ("values", "coefficients"):
        raise ValueError(f"Unknown cone formulation '{formulation}'")
    U = list(U)
    masks = _masks(k, U)
    if shortcuts:
        if len(masks) == 1 << k:
            return UniquenessVerdict.unique("full-set")
        missed = missed_subcube(k, q, U)
        if missed is not None:
            return UniquenessVerdict.not_unique(subcube_indicator(missed), "transversal")
        if len(masks) >= len(basis_masks(k, q)) and is_unique_linear(k, q, U).is_unique:
            return UniquenessVerdict.unique("rank")
    if formulation == "values":
        return _values_lp(k, q, masks)
    return _coefficients_lp(k, q, masks)


def decide(problem: Problem, **kwargs) -> UniquenessVerdict:
    if problem.space is Space.LINEAR:
        return is_unique_linear(problem.k, problem.q, problem.U)
    return is_unique_cone(problem.k, problem.q, problem.U, **kwargs)


def validate_witness(problem: Problem, verdict: UniquenessVerdict) -> bool:
    """
    Re-checks a verdict's witness by exact evaluation at every vertex.

    A Unique verdict carries nothing to check and passes.
    """
    if verdict.witness is None:
        return verdict.is_unique
    f = verdict.witness
    if (f.k, f.q) != (problem.k, problem.q) or f.is_zero():
        return False
    if any(eval_mask(f, u.bits) != 0 for u in problem.U):
        return False
    if problem.space is Space.CONE:
        values = [eval_mask(f, x) for x in range(1 << problem.k)]
        return all(v >= 0 for v in values) and any(v > 0 for v in values)
    return True


def is_minimal_cone(k: int, q: int, U: Iterable[Vertex]) -> bool:
    """True when U is cone-unique and no set U minus one point is."""
    U = frozenset(U)
    if not is_unique_cone(k, q, U).is_unique:
        return False
    for u in sorted(U):
        if is_unique_cone(k, q, U - {u}).is_unique:
            logger.info(f"Dropping {u} keeps uniqueness for k={k}, q={q}")
            return False
    return True


Sample = Union[Mapping[Vertex, int], Iterable[Vertex]]


def support(sample: Sample) -> FrozenSet[Vertex]:
    if isinstance(sample, Mapping):
        return frozenset(x for x, count in sample.items() if count > 0)
    return frozenset(sample)


def support_verdict(k: int, q: int, sample: Sample) -> UniquenessVerdict:
    """
    Cone verdict for the support of a sample; counts play no role.

    Raises:
        ValueError: If the sample is empty.
    """
    points = support(sample)
    if not points:
        raise ValueError("The sample is empty")
    return is_unique_cone(k, q, points)


def mle_exists(k: int, q: int, sample: Sample) -> bool:
    """The MLE for e(B^k_q) exists iff the sample support is a set of uniqueness for the cone."""
    return support_verdict(k, q, sample).is_unique
