"""
Exact linear algebra over the rationals.

Everything here works on Python integers and fractions.Fraction; nothing is
rounded. Matrices are plain lists of rows.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple

from core.custom_logging import logger
from core.errors import BudgetExceeded, DimensionError
from core.settings import get_settings

Matrix = Sequence[Sequence[Fraction]]


def as_fraction_matrix(M: Matrix) -> List[List[Fraction]]:
    """
    Copies M into a list of Fraction rows.

    Raises:
        ValueError: If M is empty or ragged.
    """
    if not M or not M[0]:
        raise ValueError("Expected a non-empty matrix")
    width = len(M[0])
    rows = []
    for i, row in enumerate(M):
        if len(row) != width:
            raise ValueError(f"Ragged matrix: row {i} has {len(row)} entries, expected {width}")
        rows.append([Fraction(v) for v in row])
    return rows


def _integer_row(row: Sequence[Fraction]) -> List[int]:
    scale = lcm(*(v.denominator for v in row))
    return [int(v * scale) for v in row]


def _bareiss_echelon(rows: List[List[int]]) -> Tuple[List[List[int]], List[int]]:
    """
    Fraction-free row echelon form.

    After each pivot every entry below the pivot row is a minor of the input, so
    the division by the previous pivot is exact.

    Returns:
        Tuple[List[List[int]], List[int]]: The nonzero echelon rows and their pivot columns.
    """
    rows = [list(r) for r in rows]
    n_rows, n_cols = len(rows), len(rows[0])
    previous = 1
    pivot_row = 0
    pivots = []
    for c in range(n_cols):
        if pivot_row == n_rows:
            break
        found = next((i for i in range(pivot_row, n_rows) if rows[i][c] != 0), None)
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        p = rows[pivot_row][c]
        top = rows[pivot_row]
        for i in range(pivot_row + 1, n_rows):
            row = rows[i]
            factor = row[c]
            for j in range(c + 1, n_cols):
                row[j] = (p * row[j] - factor * top[j]) // previous
            row[c] = 0
        previous = p
        pivots.append(c)
        pivot_row += 1
    return rows[:pivot_row], pivots


def rank(M: Matrix) -> int:
    """
    Exact rank by fraction-free elimination.

    Args:
        M (Matrix): A non-empty rectangular matrix of rationals or integers.

    Returns:
        int: The rank.

    Raises:
        ValueError: If M is empty or ragged.
    """
    rows = [_integer_row(r) for r in as_fraction_matrix(M)]
    _, pivots = _bareiss_echelon(rows)
    return len(pivots)


def kernel_basis(M: Matrix) -> List[List[Fraction]]:
    """
    Basis of the right kernel {v : Mv = 0}, one vector per free column.

    Each vector has a 1 in its free column, 0 in the other free columns, and the
    pivot entries filled in by back substitution.
    """
    rows = [_integer_row(r) for r in as_fraction_matrix(M)]
    echelon, pivots = _bareiss_echelon(rows)
    n_cols = len(rows[0])
    pivot_set = set(pivots)
    basis = []
    for free in (c for c in range(n_cols) if c not in pivot_set):
        v = [Fraction(0)] * n_cols
        v[free] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            s = sum((echelon[r][j] * v[j] for j in range(c + 1, n_cols) if v[j]), Fraction(0))
            v[c] = -s / echelon[r][c]
        basis.append(v)
    return basis


def mat_vec(M: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in M]


@dataclass
class LPProblem:
    """
    Feasibility problem A_eq x = b_eq, A_ge x >= b_ge over n variables.

    Variables are free unless `nonnegative` is set, in which case x >= 0 is
    implied without extra rows.
    """

    n: int
    a_eq: List[List[Fraction]] = field(default_factory=list)
    b_eq: List[Fraction] = field(default_factory=list)
    a_ge: List[List[Fraction]] = field(default_factory=list)
    b_ge: List[Fraction] = field(default_factory=list)
    nonnegative: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"An LP needs at least one variable, got n={self.n}")
        for name, a, b in (("equality", self.a_eq, self.b_eq), ("inequality", self.a_ge, self.b_ge)):
            if len(a) != len(b):
                raise DimensionError(f"{len(a)} {name} rows but {len(b)} right-hand sides")
            for i, row in enumerate(a):
                if len(row) != self.n:
                    raise DimensionError(f"{name.capitalize()} row {i} has {len(row)} entries, expected {self.n}")
        self.a_eq = [[Fraction(v) for v in row] for row in self.a_eq]
        self.b_eq = [Fraction(v) for v in self.b_eq]
        self.a_ge = [[Fraction(v) for v in row] for row in self.a_ge]
        self.b_ge = [Fraction(v) for v in self.b_ge]

    def is_satisfied_by(self, x: Sequence[Fraction]) -> bool:
        """Exact substitution check of every row (and of x >= 0 when required)."""
        if len(x) != self.n:
            return False
        if self.nonnegative and any(v < 0 for v in x):
            return False
        if any(lhs != rhs for lhs, rhs in zip(mat_vec(self.a_eq, x), self.b_eq)):
            return False
        return all(lhs >= rhs for lhs, rhs in zip(mat_vec(self.a_ge, x), self.b_ge))


@dataclass
class LPResult:
    feasible: bool
    witness: Optional[List[Fraction]]
    pivots: int
    phase_one_value: Fraction


def _standard_form(p: LPProblem) -> Tuple[List[List[int]], int]:
    """
    Rows [A | b] of an equivalent system over nonnegative variables with b >= 0.

    Free variables are split as x+ - x-, each inequality row gets a surplus
    column, and every row is scaled to integers.

    Returns:
        Tuple[List[List[int]], int]: Integer rows (rhs last) and the structural column count.
    """
    split = 1 if p.nonnegative else 2
    n_rows = len(p.a_eq) + len(p.a_ge)
    n_struct = split * p.n + len(p.a_ge)
    rows = []
    all_rows = [(row, rhs, None) for row, rhs in zip(p.a_eq, p.b_eq)]
    all_rows += [(row, rhs, i) for i, (row, rhs) in enumerate(zip(p.a_ge, p.b_ge))]
    for row, rhs, surplus in all_rows:
        out = list(row)
        if split == 2:
            out += [-v for v in row]
        slack = [Fraction(0)] * len(p.a_ge)
        if surplus is not None:
            slack[surplus] = Fraction(-1)
        out += slack + [rhs]
        ints = _integer_row(out)
        if ints[-1] < 0:
            ints = [-v for v in ints]
        rows.append(ints)
    logger.debug(f"LP standard form: {n_rows} rows, {n_struct} structural columns")
    return rows, n_struct


def lp_feasible(p: LPProblem, max_pivots: Optional[int] = None) -> LPResult:
    """
    Decides feasibility with an exact phase-1 simplex.

    The tableau is kept integral: the true tableau is T / D where D is the last
    pivot element, and every update divides exactly by the previous D. Bland's
    rule (lowest index enters, lowest basic index leaves on ties) guarantees
    termination; artificial columns never re-enter once they leave.

    Args:
        p (LPProblem): The feasibility problem.
        max_pivots (Optional[int]): Pivot guard, settings.max_pivots when omitted.

    Returns:
        LPResult: feasible with a witness satisfying every row exactly, or infeasible
        with the positive phase-1 optimum.

    Raises:
        BudgetExceeded: If the pivot guard trips.
        RuntimeError: If the witness fails exact re-validation.
    """
    max_pivots = max_pivots or get_settings().max_pivots
    rows, n_struct = _standard_form(p)
    m = len(rows)
    if m == 0:
        witness = [Fraction(0)] * p.n
        return LPResult(True, witness, 0, Fraction(0))

    width = n_struct + m + 1
    rhs = width - 1
    tableau = []
    for i, row in enumerate(rows):
        artificial = [0] * m
        artificial[i] = 1
        tableau.append(row[:-1] + artificial + [row[-1]])
    objective = [0] * width
    for j in list(range(n_struct)) + [rhs]:
        objective[j] = -sum(tableau[i][j] for i in range(m))
    basis = [n_struct + i for i in range(m)]
    D = 1
    pivots = 0

    while True:
        entering = next((j for j in range(n_struct) if objective[j] < 0), None)
        if entering is None:
            break
        leaving = None
        for i in range(m):
            a = tableau[i][entering]
            if a <= 0:
                continue
            if leaving is None:
                leaving = i
                continue
            best = tableau[leaving]
            lhs = tableau[i][rhs] * best[entering]
            cur = best[rhs] * a
            if lhs < cur or (lhs == cur and basis[i] < basis[leaving]):
                leaving = i
        if leaving is None:
            raise RuntimeError("Phase-1 simplex reported an unbounded direction")
        pivots += 1
        if pivots > max_pivots:
            raise BudgetExceeded(f"Simplex exceeded {max_pivots} pivots")
        pivot_row = tableau[leaving]
        pe = pivot_row[entering]
        for row in tableau + [objective]:
            if row is pivot_row:
                continue
            factor = row[entering]
            if factor == 0:
                row[:] = [(pe * v) // D for v in row]
                continue
            row[:] = [(pe * v - factor * pr) // D for v, pr in zip(row, pivot_row)]
        D = pe
        basis[leaving] = entering

    phase_one_value = Fraction(-objective[rhs], D)
    logger.debug(f"Phase 1 finished after {pivots} pivots with value {phase_one_value}")
    if phase_one_value != 0:
        return LPResult(False, None, pivots, phase_one_value)

    values = [Fraction(0)] * n_struct
    for i, column in enumerate(basis):
        if column < n_struct:
            values[column] = Fraction(tableau[i][rhs], D)
    if p.nonnegative:
        witness = values[: p.n]
    else:
        witness = [values[j] - values[p.n + j] for j in range(p.n)]
    if not p.is_satisfied_by(witness):
        raise RuntimeError("LP witness failed exact re-validation")
    return LPResult(True, witness, pivots, phase_one_value)
