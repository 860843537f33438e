"""Brute-force aliasing analysis of arbitrary two-level designs.

Everything here works from the design matrix alone: J-characteristics,
aliasing indexes, generalized resolution, generalized wordlength pattern,
projectivity and regularity.  Aliasing quantities are exact ``Fraction``s.

Column subsets are 1-based column tuples in the public API and bit masks
internally (bit ``i`` <-> column ``i + 1``).
"""

from __future__ import annotations

import itertools
import logging
import os
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ResourceLimitError, Z4DomainError
from .z4core import BinaryDesign

log = logging.getLogger(__name__)

SPECTRUM_CAP_ENV = "Z4DOE_SPECTRUM_CAP"
DEFAULT_SPECTRUM_CAP = 26

# elements per batch when checking projections through the spectrum
_BATCH_ELEMS = 1 << 22


def spectrum_cap() -> int:
    raw = os.environ.get(SPECTRUM_CAP_ENV)
    if raw is None:
        return DEFAULT_SPECTRUM_CAP
    try:
        return int(raw)
    except ValueError:
        raise ResourceLimitError(f"{SPECTRUM_CAP_ENV}={raw!r} is not an integer") from None


def fwht(a: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along ``axis`` (length a power of two).

    ``out[t] = sum_x a[x] * (-1)**popcount(x & t)``.  Integer inputs stay exact.
    """
    a = np.ascontiguousarray(np.moveaxis(np.array(a, copy=True), axis, -1))
    L = a.shape[-1]
    if L & (L - 1):
        raise ValueError(f"transform length {L} is not a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < L:
        b = a.reshape(*lead, L // (2 * h), 2, h)
        x = b[..., 0, :].copy()
        y = b[..., 1, :]
        b[..., 0, :] += y
        b[..., 1, :] = x - y
        h *= 2
    return np.moveaxis(a, -1, axis)


def subset_mask(cols: Iterable[int], m: int) -> int:
    mask = 0
    for c in cols:
        if not 1 <= c <= m:
            raise Z4DomainError(f"column {c} out of range 1..{m}")
        mask |= 1 << (c - 1)
    return mask


def mask_columns(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def _as_columns(s: Iterable[int] | int, m: int) -> tuple[int, ...]:
    cols = mask_columns(s) if isinstance(s, (int, np.integer)) else tuple(sorted(set(s)))
    if not cols:
        raise Z4DomainError("column subset must be nonempty")
    subset_mask(cols, m)
    return cols


def j_characteristic(D: BinaryDesign, s: Iterable[int] | int) -> int:
    """Sum over runs of the product of the columns in ``s``, computed directly."""
    cols = _as_columns(s, D.n_factors)
    prod = np.prod(D.matrix[:, [c - 1 for c in cols]].astype(np.int64), axis=1)
    return int(prod.sum())


def aliasing_index(D: BinaryDesign, s: Iterable[int] | int) -> Fraction:
    return Fraction(abs(j_characteristic(D, s)), D.n_runs)


def cell_frequencies(D: BinaryDesign) -> np.ndarray:
    """Number of runs at each of the 2**m level combinations (indexed by packed mask)."""
    m = D.n_factors
    _check_cap(m)
    return np.bincount(D.packed.astype(np.int64), minlength=1 << m).astype(np.int64)


def _check_cap(m: int) -> None:
    cap = spectrum_cap()
    if m > cap:
        raise ResourceLimitError(
            f"{m} factors exceeds the spectrum cap of {cap} (2**{m} cells); "
            f"raise {SPECTRUM_CAP_ENV} to override"
        )


@dataclass(frozen=True, eq=False)
class JSpectrum:
    """J-characteristics of every column subset, indexed by subset mask."""

    values: np.ndarray
    n_runs: int
    n_factors: int

    def __getitem__(self, s: Iterable[int] | int) -> int:
        if isinstance(s, (int, np.integer)):
            return int(self.values[s])
        return int(self.values[subset_mask(s, self.n_factors)])

    def nonzero_masks(self) -> np.ndarray:
        """Masks of nonempty subsets with j != 0, ordered by (size, mask)."""
        idx = np.flatnonzero(self.values)
        idx = idx[idx != 0]
        sizes = np.bitwise_count(idx.astype(np.uint64))
        return idx[np.lexsort((idx, sizes))]


def j_spectrum(D: BinaryDesign) -> JSpectrum:
    """All 2**m J-characteristics at once via the Walsh-Hadamard transform of cell counts."""
    freq = cell_frequencies(D)
    return JSpectrum(fwht(freq), D.n_runs, D.n_factors)


def parseval_holds(D: BinaryDesign, spec: JSpectrum | None = None) -> bool:
    freq = cell_frequencies(D)
    spec = spec if spec is not None else JSpectrum(fwht(freq), D.n_runs, D.n_factors)
    lhs = sum(int(x) * int(x) for x in spec.values[spec.values != 0])
    rhs = (1 << D.n_factors) * sum(int(x) * int(x) for x in freq[freq != 0])
    return lhs == rhs


@dataclass(frozen=True)
class Word:
    columns: tuple[int, ...]
    rho: Fraction

    @property
    def length(self) -> int:
        return len(self.columns)

    @property
    def complete(self) -> bool:
        return self.rho == 1


@dataclass(frozen=True)
class WordlengthPattern:
    """Exact (A_1, ..., A_m); ``wlp[k]`` is A_k with 1-based k."""

    values: tuple[Fraction, ...]

    @classmethod
    def from_sparse(cls, m: int, entries: dict[int, Fraction | int]) -> WordlengthPattern:
        vals = [Fraction(0)] * m
        for k, a in entries.items():
            if not 1 <= k <= m:
                raise ValueError(f"word length {k} out of range 1..{m}")
            vals[k - 1] += Fraction(a)
        return cls(tuple(vals))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Fraction:
        if not 1 <= k <= len(self.values):
            raise IndexError(k)
        return self.values[k - 1]

    def sparse(self) -> dict[int, Fraction]:
        return {k: a for k, a in enumerate(self.values, start=1) if a}

    def __str__(self) -> str:
        sp = self.sparse()
        if not sp:
            return "(no words)"
        return ", ".join(f"A{k} = {fraction_str(a)}" for k, a in sp.items())


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_str(x: Fraction, places: int = 3) -> str:
    """Exact decimal when it terminates within ``places`` digits, else rounded; at least one decimal."""
    for d in range(1, places + 1):
        scaled = x * 10**d
        if scaled.denominator == 1:
            return f"{float(x):.{d}f}"
    return f"{float(x):.{places}f}"


def _words_from_spectrum(spec: JSpectrum) -> list[Word]:
    N = spec.n_runs
    return [Word(mask_columns(int(s)), Fraction(abs(int(spec.values[s])), N)) for s in spec.nonzero_masks()]


def _resolution_from_words(words: Sequence[Word]) -> Fraction | None:
    if not words:
        return None
    r = min(w.length for w in words)
    return r + 1 - max(w.rho for w in words if w.length == r)


def _wlp_from_words(words: Sequence[Word], m: int) -> WordlengthPattern:
    acc: dict[int, Fraction] = {}
    for w in words:
        acc[w.length] = acc.get(w.length, Fraction(0)) + w.rho**2
    return WordlengthPattern.from_sparse(m, acc)


def _iter_direct_j(D: BinaryDesign, k: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """(columns, j) for every k-subset, evaluated from the packed runs."""
    packed = D.packed
    N = D.n_runs
    for cols in itertools.combinations(range(1, D.n_factors + 1), k):
        mask = np.uint64(subset_mask(cols, D.n_factors))
        odd = int((np.bitwise_count(packed & mask) & 1).sum())
        yield cols, N - 2 * odd


def enumerate_words(D: BinaryDesign) -> list[Word]:
    """All subsets with nonzero aliasing index, ordered by (length, mask)."""
    return _words_from_spectrum(j_spectrum(D))


def generalized_resolution(D: BinaryDesign) -> Fraction | None:
    """``r + 1 - max rho`` over the shortest words; ``None`` when the design has no words."""
    if D.n_factors <= spectrum_cap():
        return _resolution_from_words(enumerate_words(D))
    N = D.n_runs
    for k in range(1, D.n_factors + 1):
        best = max((abs(j) for _, j in _iter_direct_j(D, k)), default=0)
        if best:
            return k + 1 - Fraction(best, N)
    return None


def wordlength_pattern(D: BinaryDesign) -> WordlengthPattern:
    m = D.n_factors
    if m <= spectrum_cap():
        return _wlp_from_words(enumerate_words(D), m)
    log.info("m=%d above spectrum cap, enumerating subsets directly", m)
    N2 = D.n_runs**2
    return WordlengthPattern(
        tuple(Fraction(sum(j * j for _, j in _iter_direct_j(D, k)), N2) for k in range(1, m + 1))
    )


def is_regular_design(D: BinaryDesign) -> bool:
    """True when every aliasing index is 0 or 1."""
    spec = j_spectrum(D)
    a = np.abs(spec.values)
    return bool(np.all((a == 0) | (a == D.n_runs)))


def covers_full_factorial(D: BinaryDesign, cols: Iterable[int]) -> bool:
    """Whether the projection onto ``cols`` contains every level combination, by counting runs."""
    cols = _as_columns(cols, D.n_factors)
    p = len(cols)
    if (1 << p) > D.n_runs:
        return False
    sub = (D.matrix[:, [c - 1 for c in cols]] < 0).astype(np.int64)
    cells = sub @ (1 << np.arange(p, dtype=np.int64))
    return np.unique(cells).size == 1 << p


def _level_covered_direct(D: BinaryDesign, p: int) -> bool:
    for cols in itertools.combinations(range(1, D.n_factors + 1), p):
        if not covers_full_factorial(D, cols):
            log.debug("projection %s not covered", cols)
            return False
    return True


def _level_covered_spectrum(spec: JSpectrum, p: int) -> bool:
    # Cell counts of a projection onto s are the inverse transform of the
    # spectrum restricted to subsets of s: 2**p * count(x) = sum_{t<=s} j(t) chi_t(x).
    m = spec.n_factors
    k = np.arange(1 << p, dtype=np.int64)
    kbits = (k[:, None] >> np.arange(p, dtype=np.int64)) & 1  # (2**p, p)
    chunk = max(1, _BATCH_ELEMS >> p)
    combos = itertools.combinations(range(m), p)
    while True:
        pos = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64).reshape(-1, p)
        if pos.shape[0] == 0:
            return True
        idx = kbits @ (np.int64(1) << pos).T  # (2**p, batch): submask of each subset
        counts = fwht(spec.values[idx], axis=0)
        bad = np.flatnonzero(counts.min(axis=0) <= 0)
        if bad.size:
            log.debug("projection %s not covered", tuple(int(c) + 1 for c in pos[bad[0]]))
            return False


def projectivity(D: BinaryDesign, method: str = "auto") -> int:
    """Largest p such that every p-column projection contains a full 2**p factorial.

    Coverage at p implies coverage at p - 1, so sizes are checked upward and
    the search stops at the first failing size.  ``method`` is ``"spectrum"``
    (projections from the J-spectrum), ``"direct"`` (count runs per
    projection) or ``"auto"`` (spectrum when m is within the cap).
    """
    m = D.n_factors
    if method == "auto":
        method = "spectrum" if m <= spectrum_cap() else "direct"
    if method == "spectrum":
        spec = j_spectrum(D)
        check = lambda p: _level_covered_spectrum(spec, p)  # noqa: E731
    elif method == "direct":
        check = lambda p: _level_covered_direct(D, p)  # noqa: E731
    else:
        raise ValueError(f"unknown projectivity method {method!r}")
    for p in range(1, m + 1):
        if (1 << p) > D.n_runs or not check(p):
            return p - 1
    return m


@dataclass(frozen=True)
class AnalysisReport:
    n_runs: int
    n_factors: int
    resolution: Fraction | None
    wlp: WordlengthPattern
    projectivity: int | None
    regular: bool
    words: tuple[Word, ...] | None

    def to_dict(self) -> dict:
        res = None
        if self.resolution is not None:
            res = {"exact": fraction_str(self.resolution), "decimal": decimal_str(self.resolution)}
        return {
            "n_runs": self.n_runs,
            "n_factors": self.n_factors,
            "resolution": res,
            "wlp": {str(k): fraction_str(a) for k, a in self.wlp.sparse().items()},
            "projectivity": self.projectivity,
            "regular": self.regular,
            "words": None
            if self.words is None
            else [{"columns": list(w.columns), "rho": fraction_str(w.rho)} for w in self.words],
        }


def analyze(D: BinaryDesign, with_projectivity: bool = True, with_words: bool = True) -> AnalysisReport:
    """Full report from one spectrum computation."""
    spec = j_spectrum(D)
    words = _words_from_spectrum(spec)
    regular = all(w.rho == 1 for w in words)
    pr = None
    if with_projectivity:
        pr = next(
            (p - 1 for p in range(1, D.n_factors + 1) if (1 << p) > D.n_runs or not _level_covered_spectrum(spec, p)),
            D.n_factors,
        )
    return AnalysisReport(
        n_runs=D.n_runs,
        n_factors=D.n_factors,
        resolution=_resolution_from_words(words),
        wlp=_wlp_from_words(words, D.n_factors),
        projectivity=pr,
        regular=regular,
        words=tuple(words) if with_words else None,
    )
