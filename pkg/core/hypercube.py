"""
Vertices, level sets and subcubes of the discrete cube {-1,+1}^k.

A vertex is a k-bit mask: bit i is set exactly when coordinate i+1 equals +1,
so the level (number of positive coordinates) is the popcount of the mask.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from core.errors import DimensionError, InputFormatError
from core.settings import get_settings


def popcount(mask: int) -> int:
    return mask.bit_count()


def check_dimension(k: int) -> None:
    """
    Validates a dimension against the configured cap.

    Args:
        k (int): The number of coordinates.

    Raises:
        DimensionError: If k is outside [1, max_dimension].
    """
    cap = get_settings().max_dimension
    if not isinstance(k, int) or k < 1 or k > cap:
        raise DimensionError(f"Dimension k={k} is outside the supported range 1..{cap}")


@dataclass(frozen=True, order=True)
class Vertex:
    bits: int
    k: int

    def __post_init__(self):
        check_dimension(self.k)
        if not 0 <= self.bits < (1 << self.k):
            raise DimensionError(f"Bit mask {self.bits} does not fit in k={self.k} coordinates")

    @property
    def level(self) -> int:
        return popcount(self.bits)

    def coordinate(self, i: int) -> int:
        """Value (+1 or -1) of coordinate i, counted from 1."""
        return 1 if (self.bits >> (i - 1)) & 1 else -1

    def __str__(self) -> str:
        return format_vertex(self)


def format_vertex(x: Vertex) -> str:
    return "".join("+" if (x.bits >> i) & 1 else "-" for i in range(x.k))


def parse_vertex(text: str) -> Vertex:
    """
    Parses the text form of a vertex, coordinate 1 leftmost ("+-+-").

    Raises:
        InputFormatError: If the text contains anything but '+' and '-'.
    """
    text = text.strip()
    if not text or set(text) - {"+", "-"}:
        raise InputFormatError(f"Malformed vertex '{text}': expected a non-empty string over '+' and '-'")
    bits = sum(1 << i for i, ch in enumerate(text) if ch == "+")
    return Vertex(bits, len(text))


def enumerate_vertices(k: int) -> List[Vertex]:
    """All 2^k vertices in ascending bit order."""
    check_dimension(k)
    return [Vertex(bits, k) for bits in range(1 << k)]


def antipode(x: Vertex) -> Vertex:
    return Vertex(x.bits ^ ((1 << x.k) - 1), x.k)


def _same_dimension(*vertices: Vertex) -> int:
    dims = {v.k for v in vertices}
    if len(dims) != 1:
        raise DimensionError(f"Vertices live in different dimensions: {sorted(dims)}")
    return dims.pop()


def hamming(x: Vertex, y: Vertex) -> int:
    _same_dimension(x, y)
    return popcount(x.bits ^ y.bits)


@dataclass(frozen=True)
class LevelSpec:
    k: int
    D: FrozenSet[int]
    base: Optional[Vertex] = None

    def __post_init__(self):
        check_dimension(self.k)
        object.__setattr__(self, "D", frozenset(self.D))
        if not self.D:
            raise ValueError("A level set needs at least one distance in D")
        bad = sorted(d for d in self.D if not 0 <= d <= self.k)
        if bad:
            raise DimensionError(f"Distances {bad} are outside 0..{self.k}")
        if self.base is None:
            object.__setattr__(self, "base", Vertex(0, self.k))
        elif self.base.k != self.k:
            raise DimensionError(f"Base point has k={self.base.k}, expected {self.k}")


def level_masks(k: int, D: Iterable[int], base: int = 0) -> List[int]:
    """Ascending bit masks of W_D around the base mask."""
    masks = []
    for d in set(D):
        for positions in combinations(range(k), d):
            masks.append(base ^ sum(1 << i for i in positions))
    return sorted(masks)


def level_set(spec: LevelSpec) -> FrozenSet[Vertex]:
    """W_D: every vertex whose Hamming distance to the base lies in D."""
    return frozenset(Vertex(m, spec.k) for m in level_masks(spec.k, spec.D, spec.base.bits))


def submasks_ascending(mask: int) -> Iterator[int]:
    sub = 0
    while True:
        yield sub
        sub = (sub - mask) & mask
        if sub == 0:
            return


@dataclass(frozen=True)
class Subcube:
    fixed_mask: int
    sign_mask: int
    k: int

    def __post_init__(self):
        check_dimension(self.k)
        if not 0 <= self.fixed_mask < (1 << self.k):
            raise DimensionError(f"Fixed mask {self.fixed_mask} does not fit in k={self.k}")
        if self.sign_mask & ~self.fixed_mask:
            raise ValueError("Sign mask must be a subset of the fixed coordinates")

    @property
    def q(self) -> int:
        return popcount(self.fixed_mask)

    def point_masks(self) -> List[int]:
        free = ((1 << self.k) - 1) & ~self.fixed_mask
        return [self.sign_mask | sub for sub in submasks_ascending(free)]

    def __str__(self) -> str:
        return format_subcube(self)


def format_subcube(S: Subcube) -> str:
    chars = []
    for i in range(S.k):
        if not (S.fixed_mask >> i) & 1:
            chars.append("*")
        else:
            chars.append("+" if (S.sign_mask >> i) & 1 else "-")
    return "".join(chars)


def parse_subcube(text: str) -> Subcube:
    text = text.strip()
    if not text or set(text) - {"+", "-", "*"}:
        raise InputFormatError(f"Malformed subcube '{text}': expected a string over '+', '-' and '*'")
    fixed = sum(1 << i for i, ch in enumerate(text) if ch != "*")
    sign = sum(1 << i for i, ch in enumerate(text) if ch == "+")
    return Subcube(fixed, sign, len(text))


def check_space(k: int, q: int) -> None:
    check_dimension(k)
    if not 0 <= q <= k:
        raise DimensionError(f"q={q} must lie in 0..{k}")


def enumerate_subcubes(k: int, q: int) -> List[Subcube]:
    """
    All (k-q)-subcubes, fixed_mask ascending and then sign_mask ascending.

    Returns:
        List[Subcube]: C(k,q) * 2^q subcubes.
    """
    check_space(k, q)
    fixed_masks = sorted(sum(1 << i for i in positions) for positions in combinations(range(k), q))
    return [Subcube(fixed, sign, k) for fixed in fixed_masks for sign in submasks_ascending(fixed)]


def subcube_class(S: Subcube) -> int:
    """Number of +1 values among the fixed coordinates."""
    return popcount(S.sign_mask)


def subcube_contains(S: Subcube, x: Vertex) -> bool:
    if S.k != x.k:
        raise DimensionError(f"Subcube has k={S.k} but vertex has k={x.k}")
    return (x.bits & S.fixed_mask) == S.sign_mask


def level_subcube_count(k: int, q: int, i: int, j: int) -> int:
    """
    |W_j ∩ S| for any subcube S of class i: C(k-q, j-i), zero outside range.

    Raises:
        DimensionError: If q, i or j are out of range.
    """
    check_space(k, q)
    if not 0 <= i <= q or not 0 <= j <= k:
        raise DimensionError(f"Class i={i} or level j={j} out of range for k={k}, q={q}")
    r = j - i
    if r < 0 or r > k - q:
        return 0
    return comb(k - q, r)


@dataclass(frozen=True)
class SignedPermutation:
    """Flip the coordinates in `flip`, then send coordinate i to perm[i]."""

    perm: Tuple[int, ...]
    flip: int
    k: int = field(default=0)

    def __post_init__(self):
        if self.k == 0:
            object.__setattr__(self, "k", len(self.perm))
        if sorted(self.perm) != list(range(self.k)):
            raise ValueError(f"{self.perm} is not a permutation of 0..{self.k - 1}")

    def apply_mask(self, mask: int) -> int:
        mask ^= self.flip
        out = 0
        for i, target in enumerate(self.perm):
            if (mask >> i) & 1:
                out |= 1 << target
        return out

    def apply(self, x: Vertex) -> Vertex:
        if x.k != self.k:
            raise DimensionError(f"Transform acts on k={self.k}, vertex has k={x.k}")
        return Vertex(self.apply_mask(x.bits), x.k)

    @classmethod
    def identity(cls, k: int) -> "SignedPermutation":
        return cls(tuple(range(k)), 0, k)


@lru_cache(maxsize=None)
def _permutation_tables(k: int) -> Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...]:
    tables = []
    for perm in permutations(range(k)):
        table = []
        for v in range(1 << k):
            out = 0
            for i in range(k):
                if (v >> i) & 1:
                    out |= 1 << perm[i]
            table.append(out)
        tables.append((perm, tuple(table)))
    return tuple(tables)


def canonical_key(k: int, masks: Sequence[int]) -> Tuple[Tuple[int, ...], SignedPermutation]:
    """
    Lexicographically least sorted image of a vertex set under signed permutations.

    The least image always contains the all -1 vertex, so only the flips that send
    some member of the set to 0 are tried.

    The scan visits k! permutations per flip, so k is capped by the
    canonical_max_k budget (UNIQCUBE_CANONICAL_MAX_K, default 6).

    Raises:
        DimensionError: If k exceeds canonical_max_k.
    """
    limit = get_settings().canonical_max_k
    if k > limit:
        raise DimensionError(f"Canonical forms are limited to k <= {limit} (k! permutations); raise UNIQCUBE_CANONICAL_MAX_K to go further")
    masks = sorted(set(masks))
    if not masks:
        return (), SignedPermutation.identity(k)
    best: Optional[Tuple[int, ...]] = None
    best_transform = (tuple(range(k)), 0)
    for flip in masks:
        flipped = [m ^ flip for m in masks]
        for perm, table in _permutation_tables(k):
            image = tuple(sorted(table[m] for m in flipped))
            if best is None or image < best:
                best = image
                best_transform = (perm, flip)
    return best, SignedPermutation(best_transform[0], best_transform[1], k)


@dataclass(frozen=True)
class CanonicalForm:
    vertices: Tuple[Vertex, ...]
    transform: SignedPermutation


def canonical_form(U: Iterable[Vertex]) -> CanonicalForm:
    """
    Orbit representative of U under coordinate permutations and sign flips.

    Args:
        U (Iterable[Vertex]): Vertices sharing one dimension.

    Returns:
        CanonicalForm: The least image (ascending vertices) and a transform reaching it.
    """
    U = list(U)
    if not U:
        raise ValueError("canonical_form needs at least one vertex to fix the dimension")
    k = _same_dimension(*U)
    key, transform = canonical_key(k, [x.bits for x in U])
    return CanonicalForm(tuple(Vertex(m, k) for m in key), transform)
