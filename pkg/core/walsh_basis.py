"""
The spaces B^k_q spanned by Walsh functions of degree at most q.

w_L(x) is the product of the coordinates of x listed in L; a coordinate equals -1
where its bit is clear, so w_L(x) = -1 exactly when L & ~x has odd popcount.
"""
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Sequence

from core.errors import DimensionError, InputFormatError
from core.hypercube import (
    Subcube,
    Vertex,
    check_space,
    check_dimension,
    level_subcube_count,
    popcount,
    subcube_class,
    submasks_ascending,
)


@dataclass(frozen=True, order=True)
class WalshIndex:
    mask: int
    k: int

    def __post_init__(self):
        check_dimension(self.k)
        if not 0 <= self.mask < (1 << self.k):
            raise DimensionError(f"Walsh index {self.mask} does not fit in k={self.k}")

    @property
    def degree(self) -> int:
        return popcount(self.mask)

    def coordinates(self) -> List[int]:
        """Members of L, counted from 1."""
        return [i + 1 for i in range(self.k) if (self.mask >> i) & 1]


def walsh_sign(L: int, x: int) -> int:
    return -1 if popcount(L & ~x) & 1 else 1


def walsh_eval(L: WalshIndex, x: Vertex) -> int:
    if L.k != x.k:
        raise DimensionError(f"Walsh index has k={L.k}, vertex has k={x.k}")
    return walsh_sign(L.mask, x.bits)


def basis_masks(k: int, q: int) -> List[int]:
    check_space(k, q)
    masks = []
    for degree in range(q + 1):
        masks.extend(sorted(sum(1 << i for i in c) for c in combinations(range(k), degree)))
    return masks


def basis(k: int, q: int) -> List[WalshIndex]:
    """Walsh indices of degree <= q ordered by (degree, mask)."""
    return [WalshIndex(m, k) for m in basis_masks(k, q)]


def dimension(k: int, q: int) -> int:
    return len(basis_masks(k, q))


@dataclass
class CoeffVector:
    """
    Exact Walsh coefficients of a function in B^k_q.

    coeffs maps the bit mask of L to its coefficient; missing masks are zero.
    """

    k: int
    q: int
    coeffs: Dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        check_space(self.k, self.q)
        cleaned = {}
        for mask, value in self.coeffs.items():
            if popcount(mask) > self.q or not 0 <= mask < (1 << self.k):
                raise DimensionError(f"Index {mask} has degree above q={self.q} or does not fit k={self.k}")
            value = Fraction(value)
            if value:
                cleaned[mask] = value
        self.coeffs = cleaned

    def is_zero(self) -> bool:
        return not self.coeffs

    def scaled(self, factor: Fraction) -> "CoeffVector":
        return CoeffVector(self.k, self.q, {m: v * factor for m, v in self.coeffs.items()})


def eval_mask(f: CoeffVector, x: int) -> Fraction:
    return sum((value * walsh_sign(mask, x) for mask, value in f.coeffs.items()), Fraction(0))


def eval_function(f: CoeffVector, x: Vertex) -> Fraction:
    if f.k != x.k:
        raise DimensionError(f"Function lives on k={f.k}, vertex has k={x.k}")
    return eval_mask(f, x.bits)


def function_values(f: CoeffVector) -> List[Fraction]:
    """Values of f on every vertex, ascending bit order."""
    return [eval_mask(f, x) for x in range(1 << f.k)]


def restriction_matrix(k: int, q: int, U: Sequence[Vertex]) -> List[List[int]]:
    """
    Rows w_L(u) for u in U, columns in basis order.

    Raises:
        ValueError: If U is empty.
    """
    if not U:
        raise ValueError("restriction_matrix needs a non-empty vertex set")
    masks = basis_masks(k, q)
    rows = []
    for u in U:
        if u.k != k:
            raise DimensionError(f"Vertex {u} does not have k={k}")
        rows.append([walsh_sign(L, u.bits) for L in masks])
    return rows


def subcube_indicator(S: Subcube) -> CoeffVector:
    """
    1_S as the product of (1 + s_i r_i)/2 over the fixed coordinates i.

    Expanding the product gives coefficient 2^-q times the product of the signs
    s_i over L, for every L inside the fixed coordinates.
    """
    q = S.q
    scale = Fraction(1, 1 << q)
    coeffs = {}
    for L in submasks_ascending(S.fixed_mask):
        negatives = popcount(L & ~S.sign_mask)
        coeffs[L] = -scale if negatives & 1 else scale
    return CoeffVector(S.k, q, coeffs)


def _shared_space(subcubes: Iterable[Subcube]) -> tuple:
    spaces = {(S.k, S.q) for S in subcubes}
    if len(spaces) != 1:
        raise DimensionError(f"Subcubes come from different spaces: {sorted(spaces)}")
    return spaces.pop()


def subcube_combination(alpha: Mapping[Subcube, Fraction]) -> CoeffVector:
    """Sum of alpha_S times the indicator of S."""
    k, q = _shared_space(alpha)
    coeffs: Dict[int, Fraction] = defaultdict(Fraction)
    for S, weight in alpha.items():
        if not weight:
            continue
        for mask, value in subcube_indicator(S).coeffs.items():
            coeffs[mask] += value * weight
    return CoeffVector(k, q, dict(coeffs))


@dataclass(frozen=True)
class TVector:
    k: int
    q: int
    t: tuple

    def __post_init__(self):
        if len(self.t) != self.q + 1:
            raise ValueError(f"A T-vector for q={self.q} has {self.q + 1} entries, got {len(self.t)}")
        object.__setattr__(self, "t", tuple(Fraction(v) for v in self.t))


def t_vector(alpha: Mapping[Subcube, Fraction]) -> TVector:
    """Class-wise sums T_i of the subcube weights."""
    k, q = _shared_space(alpha)
    t = [Fraction(0)] * (q + 1)
    for S, weight in alpha.items():
        t[subcube_class(S)] += Fraction(weight)
    return TVector(k, q, tuple(t))


def level_sum_row(k: int, q: int, j: int) -> List[int]:
    """Coefficients C(k-q, j-i), i = 0..q, of the level sum over W_j in T-space."""
    check_space(k, q)
    if not 0 <= j <= k:
        raise DimensionError(f"Level j={j} outside 0..{k}")
    return [level_subcube_count(k, q, i, j) for i in range(q + 1)]


def coeff_vector_to_json(f: CoeffVector) -> List[dict]:
    return [
        {"L": WalshIndex(mask, f.k).coordinates(), "num": str(value.numerator), "den": str(value.denominator)}
        for mask, value in sorted(f.coeffs.items(), key=lambda item: (popcount(item[0]), item[0]))
    ]


def coeff_vector_from_json(k: int, q: int, entries: Iterable[dict]) -> CoeffVector:
    coeffs = {}
    try:
        for entry in entries:
            mask = sum(1 << (i - 1) for i in entry["L"])
            coeffs[mask] = Fraction(int(entry["num"]), int(entry["den"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InputFormatError(f"Malformed coefficient entry: {e}") from e
    return CoeffVector(k, q, coeffs)
