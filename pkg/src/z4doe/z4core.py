"""Z4 arithmetic, code expansion and Gray-map binary images.

A generator vector ``v`` over Z4 defines the quarter-fraction generator
matrix ``G = (v, I_n)``.  Its 4**n codewords, pushed through the Gray map,
give a 4**n x (2n + 2) two-level design.  Branching on one column of that
design gives a half fraction with 2**(2n - 1) runs and 2n + 1 factors.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateDesignError, Z4DomainError

# rows indexed by the Z4 symbol
GRAY = np.array([[1, 1], [1, -1], [-1, -1], [-1, 1]], dtype=np.int8)

# packing uses one bit per column in a uint64
MAX_PACKED_FACTORS = 63

# sort rank used by canonical_v: 1's first, then 2's, then 0's
_CANON_RANK = {1: 0, 2: 1, 0: 2}


class ColumnClass(enum.Enum):
    ASSOC_V = "AssocV"
    ASSOC_0 = "Assoc0"
    ASSOC_1 = "Assoc1"
    ASSOC_2 = "Assoc2"
    ASSOC_3 = "Assoc3"

    @classmethod
    def of_symbol(cls, z: int) -> ColumnClass:
        return (cls.ASSOC_0, cls.ASSOC_1, cls.ASSOC_2, cls.ASSOC_3)[z]


def as_z4_vector(v: Iterable[int] | str) -> tuple[int, ...]:
    """Validate ``v`` and return it as a tuple of ints in {0,1,2,3}.

    Strings of digits are accepted, so ``"112"`` means ``(1, 1, 2)``.
    """
    if isinstance(v, str):
        text = v.strip().strip("[]").replace(",", "").replace(" ", "")
        if not text or not text.isdigit():
            raise Z4DomainError(f"cannot parse {v!r} as Z4 digits")
        v = [int(ch) for ch in text]
    out = tuple(int(z) for z in v)
    if not out:
        raise Z4DomainError("generator vector must have length n >= 1")
    bad = [z for z in out if z not in (0, 1, 2, 3)]
    if bad:
        raise Z4DomainError(f"entries {bad} are not in Z4 = {{0,1,2,3}}")
    return out


def gray_map(z: int) -> tuple[int, int]:
    if z not in (0, 1, 2, 3):
        raise Z4DomainError(f"{z!r} is not an element of Z4")
    a, b = GRAY[z]
    return int(a), int(b)


def generator_matrix(v: Iterable[int] | str) -> np.ndarray:
    """Return the n x (n+1) matrix ``(v, I_n)`` over Z4."""
    v = as_z4_vector(v)
    n = len(v)
    G = np.zeros((n, n + 1), dtype=np.int64)
    G[:, 0] = v
    G[:, 1:] = np.eye(n, dtype=np.int64)
    return G


def expand_code(G: np.ndarray) -> np.ndarray:
    """All 4**n codewords ``u @ G mod 4`` of the code generated by the rows of G.

    Row ``r`` uses the coefficient vector ``u`` whose entries are the base-4
    digits of ``r``, least significant digit first, so ``u_1`` varies fastest.
    """
    G = np.asarray(G, dtype=np.int64)
    if G.ndim != 2 or G.shape[0] < 1:
        raise Z4DomainError(f"generator matrix must be 2-D with n >= 1 rows, got shape {G.shape}")
    if np.any((G < 0) | (G > 3)):
        raise Z4DomainError("generator matrix entries must lie in {0,1,2,3}")
    n = G.shape[0]
    r = np.arange(4**n, dtype=np.int64)
    U = (r[:, None] >> (2 * np.arange(n, dtype=np.int64))) & 3
    return (U @ G) % 4


def binary_image(C: np.ndarray) -> np.ndarray:
    """Apply the Gray map to every entry: Z4 column j -> binary columns 2j-1, 2j."""
    C = np.asarray(C)
    if np.any((C < 0) | (C > 3)):
        raise Z4DomainError("code entries must lie in {0,1,2,3}")
    N, k = C.shape
    return GRAY[C].reshape(N, 2 * k)


def frequency_profile(v: Iterable[int] | str) -> tuple[int, int, int, int]:
    """Counts (f0, f1, f2, f3) of each Z4 symbol in ``v``."""
    v = as_z4_vector(v)
    return tuple(v.count(z) for z in range(4))  # type: ignore[return-value]


def canonical_v(v: Iterable[int] | str) -> tuple[int, ...]:
    """Representative of the equivalence class of ``v``: 3 -> 1, then order 1 < 2 < 0."""
    v = as_z4_vector(v)
    return tuple(sorted((1 if z == 3 else z for z in v), key=_CANON_RANK.__getitem__))


def v_from_counts(ones: int, twos: int, zeros: int = 0) -> tuple[int, ...]:
    """Canonical vector with the given numbers of 1's, 2's and 0's."""
    return (1,) * ones + (2,) * twos + (0,) * zeros


def format_v(v: Sequence[int]) -> str:
    return "[" + "".join(str(z) for z in v) + "]"


def column_class(v: Iterable[int] | str, col: int) -> ColumnClass:
    """Association class of design column ``col`` (1-based) for generator vector ``v``."""
    v = as_z4_vector(v)
    m = 2 * len(v) + 2
    if not 1 <= col <= m:
        raise Z4DomainError(f"column {col} out of range 1..{m}")
    if col <= 2:
        return ColumnClass.ASSOC_V
    return ColumnClass.of_symbol(v[(col - 3) // 2])


@dataclass(frozen=True)
class Branching:
    column: int
    column_class: ColumnClass | None = None


@dataclass(frozen=True, eq=False)
class BinaryDesign:
    """An N x m two-level design with entries in {-1, +1}.

    ``v`` and ``branches`` record how the design was produced, if known.
    The matrix is stored read-only; ``packed`` gives each run as a bit mask
    with bit ``i`` set when column ``i + 1`` is at level -1.
    """

    matrix: np.ndarray
    v: tuple[int, ...] | None = None
    branches: tuple[Branching, ...] = field(default=())

    def __post_init__(self):
        M = np.array(self.matrix, dtype=np.int8, copy=True)
        if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
            raise Z4DomainError(f"design matrix must be 2-D and non-empty, got shape {M.shape}")
        if not np.all((M == 1) | (M == -1)):
            raise Z4DomainError("design entries must be -1 or +1")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def n_runs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_factors(self) -> int:
        return self.matrix.shape[1]

    @cached_property
    def packed(self) -> np.ndarray:
        m = self.n_factors
        if m > MAX_PACKED_FACTORS:
            raise Z4DomainError(f"cannot pack {m} factors (limit {MAX_PACKED_FACTORS})")
        bits = (self.matrix < 0).astype(np.uint64)
        weights = np.left_shift(np.uint64(1), np.arange(m, dtype=np.uint64))
        return bits @ weights

    def __eq__(self, other):
        if not isinstance(other, BinaryDesign):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.all(self.matrix == other.matrix))

    def __hash__(self):
        return hash((self.matrix.shape, self.matrix.tobytes()))

    def __repr__(self):
        src = f", v={format_v(self.v)}" if self.v is not None else ""
        br = f", branches={[b.column for b in self.branches]}" if self.branches else ""
        return f"BinaryDesign({self.n_runs}x{self.n_factors}{src}{br})"


def build_design(v: Iterable[int] | str) -> BinaryDesign:
    """The 2**(2n) x (2n+2) binary image of the code generated by ``(v, I_n)``."""
    v = as_z4_vector(v)
    return BinaryDesign(binary_image(expand_code(generator_matrix(v))), v=v)


def half_fraction(D: BinaryDesign, branch_col: int) -> BinaryDesign:
    """Keep the runs where ``branch_col`` (1-based) is +1 and drop that column.

    The two half fractions are equivalent, so the +1 half is always used.
    The branching column must be balanced; otherwise the result is not a
    half fraction (a constant column gives either every run or none).
    """
    m = D.n_factors
    if m < 2:
        raise DegenerateDesignError("need at least two columns to branch")
    if not 1 <= branch_col <= m:
        raise Z4DomainError(f"branch column {branch_col} out of range 1..{m}")
    col = D.matrix[:, branch_col - 1]
    keep = col == 1
    if 2 * int(keep.sum()) != D.n_runs:
        raise DegenerateDesignError(
            f"branch column {branch_col} is not balanced ({int(keep.sum())} of {D.n_runs} runs at +1)"
        )
    cls = column_class(D.v, branch_col) if D.v is not None and not D.branches else None
    M = np.delete(D.matrix[keep], branch_col - 1, axis=1)
    return BinaryDesign(M, v=D.v, branches=D.branches + (Branching(branch_col, cls),))
