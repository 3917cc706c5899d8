"""
Level sets W_D of the cube: which of them are sets of uniqueness, the
polygon P_0..P_k whose convexity explains the answer for q = 2, and the named
constructions of small uniqueness sets.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import FrozenSet, Iterable, List, Optional, Tuple

from joblib import Parallel, delayed

from analysis.uniqueness.uniqueness import (
    UniquenessVerdict,
    is_minimal_cone,
    is_unique_cone,
)
from core.custom_logging import logger
from core.errors import DimensionError
from core.exact_math import LPProblem, lp_feasible
from core.hypercube import (
    LevelSpec,
    Vertex,
    check_dimension,
    check_space,
    enumerate_subcubes,
    level_masks,
    level_set,
    subcube_class,
)
from core.reports import LevelVerdictReport, SuiteCase
from core.walsh_basis import CoeffVector, TVector, eval_mask, level_sum_row, subcube_combination


def _levels(k: int, D: Iterable[int]) -> FrozenSet[int]:
    D = frozenset(D)
    bad = sorted(d for d in D if not 0 <= d <= k)
    if bad:
        raise DimensionError(f"Levels {bad} are outside 0..{k}")
    return D


def level_label(D: Iterable[int]) -> str:
    return "{" + ",".join(str(d) for d in sorted(D)) + "}"


def characterize_level_set(k: int, D: Iterable[int]) -> bool:
    """
    Closed-form test for q = 2: W_D is a set of uniqueness for the cone exactly
    when two of its levels differ by at least 2 and at most k-1.

    Raises:
        DimensionError: If k < 2 or a level is out of range.
    """
    check_dimension(k)
    if k < 2:
        raise DimensionError(f"The level-set characterization needs k >= 2, got k={k}")
    D = sorted(_levels(k, D))
    return any(2 <= j - i <= k - 1 for i, j in combinations(D, 2))


def level_t_vector(k: int, q: int, D: Iterable[int]) -> Optional[TVector]:
    """
    Solves the (q+1)-variable LP over class sums: row_j . T = 0 on D, >= 0 on
    every level, sum T = 1.

    Returns:
        Optional[TVector]: A feasible T, or None when the LP is infeasible.
    """
    check_space(k, q)
    D = _levels(k, D)
    rows = [level_sum_row(k, q, j) for j in range(k + 1)]
    a_eq = [rows[j] for j in sorted(D)] + [[1] * (q + 1)]
    b_eq = [0] * len(D) + [1]
    a_ge = [rows[j] for j in range(k + 1) if j not in D]
    b_ge = [0] * len(a_ge)
    result = lp_feasible(LPProblem(q + 1, a_eq, b_eq, a_ge, b_ge))
    if not result.feasible:
        return None
    return TVector(k, q, tuple(result.witness))


def lift_t_vector(t: TVector) -> CoeffVector:
    """
    Spreads each T_i uniformly over the subcubes of class i.

    The resulting function takes the value row_j . T / C(k, j) at every point of
    level j, so it is nonnegative and vanishes on the levels where row_j . T does.
    """
    count = comb(t.k, t.q)
    alpha = {}
    for S in enumerate_subcubes(t.k, t.q):
        i = subcube_class(S)
        alpha[S] = t.t[i] / (count * comb(t.q, i))
    return subcube_combination(alpha)


def level_cone_unique(k: int, q: int, D: Iterable[int]) -> UniquenessVerdict:
    """
    Cone uniqueness of W_D decided in T-space.

    Any nonnegative witness can be averaged over the coordinate permutations that
    fix W_D, which leaves only the class sums T; so the small LP decides the
    same question as the full one.
    """
    t = level_t_vector(k, q, D)
    if t is None:
        return UniquenessVerdict.unique("level-lp")
    f = lift_t_vector(t)
    f = f.scaled(1 / f.coeffs[0])
    return UniquenessVerdict.not_unique(f, "level-lp")


def psi_value(t: TVector, k: int, j: int) -> Fraction:
    """The functional z -> T . z evaluated at the normalized level row Q_j."""
    if t.k != k:
        raise DimensionError(f"T-vector has k={t.k}, expected {k}")
    row = level_sum_row(k, t.q, j)
    return sum((Fraction(a) * b for a, b in zip(row, t.t)), Fraction(0)) / sum(row)


@dataclass(frozen=True)
class PolygonPoint:
    j: int
    x: Fraction
    y: Fraction


def polygon_points(k: int) -> List[PolygonPoint]:
    """
    P_j: the first two coordinates of (C(k-2,j), C(k-2,j-1), C(k-2,j-2)) scaled to sum 1.

    Raises:
        DimensionError: If k < 2.
    """
    if not isinstance(k, int) or k < 2:
        raise DimensionError(f"The polygon needs k >= 2, got k={k}")
    points = []
    for j in range(k + 1):
        a, b, c = (comb(k - 2, j - i) if j >= i else 0 for i in range(3))
        total = a + b + c
        points.append(PolygonPoint(j, Fraction(a, total), Fraction(b, total)))
    return points


def polygon_rows(k: int) -> List[dict]:
    return [
        {
            "j": p.j,
            "x_num": p.x.numerator,
            "x_den": p.x.denominator,
            "y_num": p.y.numerator,
            "y_den": p.y.denominator,
            "x": float(p.x),
            "y": float(p.y),
        }
        for p in polygon_points(k)
    ]


def orient2d(a: PolygonPoint, b: PolygonPoint, c: PolygonPoint) -> Fraction:
    """Twice the signed area of (a, b, c): positive when c lies left of a -> b."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


class Intersection(str, Enum):
    PROPER = "proper"
    TOUCHING = "touching"
    DISJOINT = "disjoint"


def _on_segment(a: PolygonPoint, b: PolygonPoint, p: PolygonPoint) -> bool:
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def classify_intersection(a1: PolygonPoint, a2: PolygonPoint, b1: PolygonPoint, b2: PolygonPoint) -> Intersection:
    """
    Relation between the closed segments a1-a2 and b1-b2.

    Raises:
        ValueError: If either segment has zero length.
    """
    if (a1.x, a1.y) == (a2.x, a2.y) or (b1.x, b1.y) == (b2.x, b2.y):
        raise ValueError("Zero-length segment")
    d1 = orient2d(b1, b2, a1)
    d2 = orient2d(b1, b2, a2)
    d3 = orient2d(a1, a2, b1)
    d4 = orient2d(a1, a2, b2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return Intersection.PROPER
    touching = (
        (d1 == 0 and _on_segment(b1, b2, a1))
        or (d2 == 0 and _on_segment(b1, b2, a2))
        or (d3 == 0 and _on_segment(a1, a2, b1))
        or (d4 == 0 and _on_segment(a1, a2, b2))
    )
    return Intersection.TOUCHING if touching else Intersection.DISJOINT


def segments_intersect(a1: PolygonPoint, a2: PolygonPoint, b1: PolygonPoint, b2: PolygonPoint) -> bool:
    """Closed-segment test; shared endpoints count as intersecting."""
    return classify_intersection(a1, a2, b1, b2) is not Intersection.DISJOINT


def _slope(p: PolygonPoint) -> Fraction:
    return p.y / p.x


def verify_polygon_properties(k: int) -> LevelVerdictReport:
    """
    Exact checks of the polygon: y-symmetry, the slope formula j/(k-j-1) with
    increasing slopes, unimodality of y, and strict convex position of the
    closed chain P_0, ..., P_k, P_0.

    Raises:
        DimensionError: If k < 3.
    """
    if k < 3:
        raise DimensionError(f"Polygon properties are stated for k >= 3, got k={k}")
    P = polygon_points(k)
    report = LevelVerdictReport(k=k, q=2)

    report.properties["symmetry"] = all(P[j].y == P[k - j].y for j in range(k + 1))

    slopes = [_slope(P[j]) for j in range(k - 1)]
    formula = all(slopes[j] == Fraction(j, k - j - 1) for j in range(1, k - 1))
    increasing = all(slopes[j] < slopes[j + 1] for j in range(k - 2))
    report.properties["slope"] = formula and increasing and slopes[0] == 0

    rising = all(P[j].y > P[j - 1].y for j in range(1, k + 1) if 2 * j <= k)
    falling = all(P[j].y < P[j - 1].y for j in range(1, k + 1) if 2 * j >= k + 2)
    report.properties["unimodal"] = rising and falling

    chain = P + [P[0]]
    convex = True
    for e in range(k + 1):
        a, b = chain[e], chain[e + 1]
        for p in P:
            if p.j in (a.j, b.j):
                continue
            if orient2d(a, b, p) <= 0:
                report.disagreements.append(f"P_{p.j} is not strictly left of edge P_{a.j}P_{b.j}")
                convex = False
    report.properties["convex_position"] = convex
    for name, holds in report.properties.items():
        if not holds:
            logger.warning(f"Polygon property '{name}' fails for k={k}")
    return report


CONSTRUCTIONS = ("full", "alternating", "alternating_odd", "antipodal", "w1k", "w1k1", "blofeld")


def construction_levels(k: int, q: int, name: str) -> FrozenSet[int]:
    """
    Levels of a named construction.

    Raises:
        ValueError: If the name is unknown or does not make sense for (k, q).
    """
    check_space(k, q)
    if name == "full":
        return frozenset(range(k + 1))
    if name == "alternating":
        return frozenset(range(0, k + 1, 2))
    if name == "alternating_odd":
        return frozenset(range(1, k + 1, 2))
    if name == "antipodal":
        return frozenset({0, k})
    if name == "w1k":
        if k < 2:
            raise DimensionError("w1k needs k >= 2")
        return frozenset({1, k})
    if name == "w1k1":
        if k < 3:
            raise DimensionError("w1k1 needs k >= 3")
        return frozenset({1, k - 1})
    if name == "blofeld":
        h = q // 2
        return frozenset(range(h + 1)) | frozenset(range(k - h, k + 1))
    raise ValueError(f"Unknown construction '{name}', expected one of {', '.join(CONSTRUCTIONS)}")


def known_construction(k: int, q: int, name: str) -> FrozenSet[Vertex]:
    """
    Vertices of a named construction around the all -1 vertex.

    Sizes: full 2^k, alternating and alternating_odd 2^(k-1), antipodal 2,
    w1k k+1, w1k1 2k, blofeld 2 * sum_{i <= q/2} C(k, i) while its two halves
    stay apart.
    """
    return level_set(LevelSpec(k, construction_levels(k, q, name)))


def _level_case(k: int, mask: int) -> Tuple[str, bool, bool, bool]:
    D = [j for j in range(k + 1) if (mask >> j) & 1]
    closed_form = characterize_level_set(k, D)
    small = level_cone_unique(k, 2, D).is_unique
    full = is_unique_cone(k, 2, [Vertex(m, k) for m in level_masks(k, D)]).is_unique
    return level_label(D), closed_form, small, full


def verify_level_theorem(k: int, n_jobs: int = 1) -> LevelVerdictReport:
    """
    Compares the closed form, the T-space LP and the full LP on every subset D
    of {0, ..., k} for q = 2.

    Args:
        k (int): Dimension, at least 2.
        n_jobs (int): joblib workers; results are collected in submission order.

    Returns:
        LevelVerdictReport: Verdict per D and the list of disagreements.
    """
    check_dimension(k)
    logger.info(f"Checking all {1 << (k + 1)} level sets for k={k} with {n_jobs} worker(s)")
    cases = Parallel(n_jobs=n_jobs)(delayed(_level_case)(k, mask) for mask in range(1 << (k + 1)))
    report = LevelVerdictReport(k=k, q=2)
    for label, closed_form, small, full in cases:
        report.verdicts[label] = full
        if not closed_form == small == full:
            report.disagreements.append(f"D={label}: closed form {closed_form}, level LP {small}, full LP {full}")
    report.properties["oracle_equivalence"] = not report.disagreements
    return report


def check_edge_diagonal(k: int) -> bool:
    """Hull edges {j, j+1} and {0, k} are not unique for q = 2, every diagonal is."""
    for i, j in combinations(range(k + 1), 2):
        edge = j - i == 1 or (i, j) == (0, k)
        if level_cone_unique(k, 2, {i, j}).is_unique == edge:
            return False
    return True


def check_crossing_diagonals(k: int) -> bool:
    """For crossing segments P_j1P_j3 and P_j2P_j4 the two pairs share a verdict."""
    P = polygon_points(k)
    for j1, j2, j3, j4 in combinations(range(k + 1), 4):
        if not segments_intersect(P[j1], P[j3], P[j2], P[j4]):
            continue
        if level_cone_unique(k, 2, {j1, j3}).is_unique != level_cone_unique(k, 2, {j2, j4}).is_unique:
            return False
    return True


def check_psi_vanishing(k: int, q: int = 2) -> bool:
    """
    For every D whose T-space LP is feasible, the lifted witness sums to zero over
    W_j exactly when row_j . T = 0 (and so exactly when psi vanishes at Q_j).
    """
    for mask in range(1, 1 << (k + 1)):
        D = [j for j in range(k + 1) if (mask >> j) & 1]
        t = level_t_vector(k, q, D)
        if t is None:
            continue
        f = lift_t_vector(t)
        for j in range(k + 1):
            level_sum = sum((eval_mask(f, x) for x in level_masks(k, [j])), Fraction(0))
            if (level_sum == 0) != (psi_value(t, k, j) == 0):
                return False
    return True


def _case(name: str, k: int, passed: bool, detail: str = "") -> SuiteCase:
    return SuiteCase(name=name, k=k, status="pass" if passed else "fail", detail=detail)


def level_theorem_cases(k: int, n_jobs: int = 1) -> List[SuiteCase]:
    report = verify_level_theorem(k, n_jobs)
    detail = "; ".join(report.disagreements) or f"{len(report.verdicts)} level sets agree"
    return [
        _case("oracle_equivalence", k, report.consistent, detail),
        _case("edge_diagonal_dichotomy", k, check_edge_diagonal(k)),
        _case("crossing_diagonals", k, check_crossing_diagonals(k)),
        _case("psi_vanishing", k, check_psi_vanishing(k)),
    ]


def polygon_cases(k: int) -> List[SuiteCase]:
    report = verify_polygon_properties(k)
    return [_case(name, k, holds, "; ".join(report.disagreements)) for name, holds in report.properties.items()]


def remark_cases(k: int) -> List[SuiteCase]:
    """
    Small-set facts: X is the only uniqueness level set for q = k and no proper
    subset of X is unique; both parity classes are minimal for q = k-1; the
    antipodal pair works for q = 1; W_{1,k} is minimal for q = 2 and W_{1,k-1}
    is unique for q = 3.
    """
    cases = []
    full = frozenset(range(k + 1))
    only_full = all(
        level_cone_unique(k, k, [j for j in range(k + 1) if (mask >> j) & 1]).is_unique
        == (frozenset(j for j in range(k + 1) if (mask >> j) & 1) == full)
        for mask in range(1 << (k + 1))
    )
    X = known_construction(k, k, "full")
    no_proper_subset = all(not is_unique_cone(k, k, X - {x}).is_unique for x in sorted(X))
    cases.append(_case("only_full_cube_for_q_eq_k", k, only_full and no_proper_subset))
    for name in ("alternating", "alternating_odd"):
        U = known_construction(k, k - 1, name)
        cases.append(_case(f"{name}_minimal_q_k_minus_1", k, is_minimal_cone(k, k - 1, U)))
    cases.append(_case("antipodal_unique_q1", k, is_unique_cone(k, 1, known_construction(k, 1, "antipodal")).is_unique))
    if k >= 3:
        cases.append(_case("w1k_minimal_q2", k, is_minimal_cone(k, 2, known_construction(k, 2, "w1k"))))
    if k >= 4:
        cases.append(_case("w1k1_unique_q3", k, is_unique_cone(k, 3, known_construction(k, 3, "w1k1")).is_unique))
    return cases
