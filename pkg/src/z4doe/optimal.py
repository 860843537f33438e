"""Optimal quarter-fraction designs under resolution, aberration and projectivity.

Closed-form constructions for full (2**(2n) runs) and half-fraction
(2**(2n-1) runs) designs, an exhaustive search over equivalence classes of
generator vectors that checks them, and the reference values for regular
minimum aberration 2**(m-2) designs.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

from .analysis import AnalysisReport, WordlengthPattern, analyze, decimal_str
from .errors import ResourceLimitError, VerificationMismatch
from .theory import (
    NOT_COVERED,
    BranchClass,
    FrequencyProfile,
    Prediction,
    feasible_branches,
    predict,
)
from .verify import compare
from .z4core import _CANON_RANK, BinaryDesign, build_design, canonical_v, format_v, half_fraction

log = logging.getLogger(__name__)

THEORY_MAX_N = 30
BRUTE_FORCE_MAX_N = 6


class Criterion(enum.Enum):
    MAX_RESOLUTION = "resolution"
    MIN_ABERRATION = "aberration"
    MAX_PROJECTIVITY = "projectivity"

    @property
    def letter(self) -> str:
        return {"resolution": "r", "aberration": "a", "projectivity": "p"}[self.value]


def compare_wlp(a: WordlengthPattern, b: WordlengthPattern) -> int:
    """-1 if ``a`` has less aberration than ``b``, 1 if more, 0 if equal."""
    if len(a) != len(b):
        raise ValueError(f"cannot compare patterns of lengths {len(a)} and {len(b)}")
    for x, y in zip(a.values, b.values):
        if x != y:
            return -1 if x < y else 1
    return 0


def _profile(ones: int, twos: int, n: int) -> FrequencyProfile:
    return FrequencyProfile(n - ones - twos, ones, twos, 0)


def _split(n: int) -> tuple[int, int]:
    """(k, r) with n = 3k + r - 1 and r in {0, 1, 2}; r=0 -> 3k-1, r=1 -> 3k, r=2 -> 3k+1."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    k, r = divmod(n + 1, 3)
    return k, r


def max_resolution_profile(n: int) -> FrequencyProfile:
    k, r = _split(n)
    return _profile((2 * k - 1, 2 * k, 2 * k + 1)[r], k, n)


def min_aberration_profile(n: int) -> FrequencyProfile:
    k, r = _split(n)
    return _profile(*((2 * k - 1, k), (2 * k, k), (2 * k, k + 1))[r], n)


def max_projectivity_profile(n: int, alternative: bool = False) -> FrequencyProfile:
    """(n-1) ones and one 2; ``alternative`` gives all ones, same projectivity, lower resolution."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return _profile(n, 0, n) if alternative else _profile(n - 1, 1, n)


def branch_column(v: tuple[int, ...], b: BranchClass) -> int:
    """The column used to realize branch class ``b`` for generator vector ``v``.

    A 1-or-3 branch uses the first column, which is equivalent to branching on
    a column associated with 1; a 2 branch uses the last 2-associated column
    (the last column of a canonical vector without zeros); a 0 branch uses the
    last 0-associated column.
    """
    if b in (BranchClass.ONE_OR_THREE, BranchClass.V):
        return 1
    sym = 2 if b is BranchClass.TWO else 0
    idx = max(i for i, z in enumerate(v) if z == sym)
    return 2 * idx + 4


def branch_marker(column: int, m: int, b: BranchClass) -> str:
    if column == 1:
        return "f"
    if column == m:
        return "l"
    return b.value


@lru_cache(maxsize=None)
def _brute_projectivity(profile: FrequencyProfile, branch: BranchClass | None) -> int:
    v = profile.representative()
    D = build_design(v)
    if branch is not None:
        D = half_fraction(D, branch_column(v, branch))
    return analyze(D, with_words=False).projectivity


@dataclass(frozen=True)
class DesignCandidate:
    v: tuple[int, ...]
    profile: FrequencyProfile
    branch: BranchClass | None
    column: int | None
    predicted: Prediction
    projectivity: int | None
    verified: AnalysisReport | None = None

    @property
    def resolution(self) -> Fraction:
        return self.predicted.resolution

    @property
    def wlp(self) -> WordlengthPattern:
        return self.predicted.wlp

    @property
    def n_factors(self) -> int:
        return self.predicted.n_factors

    @property
    def marker(self) -> str:
        return "" if self.column is None else branch_marker(self.column, self.profile.m, self.branch)

    def label(self) -> str:
        return f"{format_v(self.v)} {self.marker}".rstrip()

    def design(self) -> BinaryDesign:
        D = build_design(self.v)
        return D if self.column is None else half_fraction(D, self.column)

    def verify(self) -> DesignCandidate:
        """Brute-force the constructed design; raise VerificationMismatch on any disagreement."""
        report = analyze(self.design())
        bad = compare(self.predicted, report)
        if self.projectivity is not None and self.projectivity != report.projectivity:
            bad.append("projectivity")
        if bad:
            raise VerificationMismatch(f"{self.label()}: {', '.join(sorted(set(bad)))}")
        return replace(self, verified=report)

    def summary(self) -> dict:
        pr = self.projectivity
        return {
            "v": format_v(self.v),
            "branch": None if self.branch is None else self.branch.value,
            "marker": self.marker,
            "wlp": str(self.wlp),
            "resolution": decimal_str(self.resolution),
            "projectivity": pr,
            "verified": self.verified is not None,
        }


def make_candidate(profile: FrequencyProfile, branch: BranchClass | None = None,
                   brute_force: bool = True) -> DesignCandidate:
    v = canonical_v(profile.representative())
    pred = predict(profile, branch)
    pr = pred.projectivity
    if pr is NOT_COVERED:
        if brute_force and profile.n <= BRUTE_FORCE_MAX_N:
            pr = _brute_projectivity(profile, branch)
            log.info("projectivity of %s branch %s by brute force: %d", profile.as_tuple(),
                     None if branch is None else branch.value, pr)
        else:
            log.info("projectivity of %s branch %s not covered and outside brute-force budget; skipped",
                     profile.as_tuple(), None if branch is None else branch.value)
            pr = None
    column = None if branch is None else branch_column(v, branch)
    return DesignCandidate(v, profile, branch, column, pred, pr)


def optimal_full(n: int, c: Criterion) -> DesignCandidate:
    if c is Criterion.MAX_RESOLUTION:
        p = max_resolution_profile(n)
    elif c is Criterion.MIN_ABERRATION:
        p = min_aberration_profile(n)
    else:
        p = max_projectivity_profile(n)
    return make_candidate(p)


def optimal_half(n: int, c: Criterion) -> DesignCandidate:
    """Half fraction that is optimal under ``c`` among all half fractions of (v, I_n) designs."""
    if c is Criterion.MAX_PROJECTIVITY:
        return make_candidate(max_projectivity_profile(n), BranchClass.ONE_OR_THREE)
    k, r = _split(n)
    if r == 0:
        return make_candidate(min_aberration_profile(n), BranchClass.TWO)
    if r == 1:
        return make_candidate(min_aberration_profile(n), BranchClass.ONE_OR_THREE)
    return make_candidate(_profile(2 * k, k + 1, n), BranchClass.TWO)


def _v_key(v: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(_CANON_RANK[z] for z in v)


_BRANCH_ORDER = {b: i for i, b in enumerate(BranchClass)}


def _sort_key(c: DesignCandidate, criterion: Criterion):
    # ties on the primary criterion are broken by the other two, then canonically
    others = [x for x in Criterion if x is not criterion]
    secondary = tuple(_neg(_criterion_value(c, x)) for x in others)
    return secondary + (_v_key(c.v), -1 if c.branch is None else _BRANCH_ORDER[c.branch])


def _neg(value):
    if value is None:
        return 0
    return tuple(-x for x in value) if isinstance(value, tuple) else -value


def _criterion_value(c: DesignCandidate, criterion: Criterion):
    """Larger is better."""
    if criterion is Criterion.MAX_RESOLUTION:
        return c.resolution
    if criterion is Criterion.MAX_PROJECTIVITY:
        return c.projectivity
    return tuple(-a for a in c.wlp.values)


def criterion_value(c: DesignCandidate, criterion: Criterion):
    if criterion is Criterion.MIN_ABERRATION:
        return c.wlp
    return _criterion_value(c, criterion)


def candidates(n: int, half: bool, brute_force: bool = True) -> list[DesignCandidate]:
    """One candidate per (f1+f3, f2, f0) class, times each distinct branching column when ``half``."""
    out = []
    for ones in range(n + 1):
        for twos in range(n - ones + 1):
            p = _profile(ones, twos, n)
            if not half:
                out.append(make_candidate(p, brute_force=brute_force))
                continue
            seen = set()
            for b in feasible_branches(p):
                c = make_candidate(p, b, brute_force=brute_force)
                # a V branch lands on the same column as the 1-or-3 one
                if c.column not in seen:
                    seen.add(c.column)
                    out.append(c)
    return out


def exhaustive_search(n: int, c: Criterion, half: bool = False, verify: bool = False) -> list[DesignCandidate]:
    """All optimal candidates under ``c``, in canonical tie-break order."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > THEORY_MAX_N:
        raise ResourceLimitError(f"n={n} exceeds the search budget of {THEORY_MAX_N}")
    if verify and n > BRUTE_FORCE_MAX_N:
        raise ResourceLimitError(f"n={n} exceeds the brute-force verification budget of {BRUTE_FORCE_MAX_N}")
    pool = candidates(n, half)
    if c is Criterion.MAX_PROJECTIVITY:
        pool = [x for x in pool if x.projectivity is not None]
    best = max(_criterion_value(x, c) for x in pool)
    winners = sorted((x for x in pool if _criterion_value(x, c) == best), key=lambda x: _sort_key(x, c))
    if verify:
        winners = [x.verify() for x in winners]
    return winners


@dataclass(frozen=True)
class RegularReference:
    m: int
    resolution: int
    wlp: WordlengthPattern
    projectivity: int


def regular_reference(m: int) -> RegularReference:
    """Resolution, wordlength pattern and projectivity of a regular minimum aberration 2**(m-2) design."""
    if m < 4:
        raise ValueError(f"m must be >= 4, got {m}")
    R = 2 * m // 3
    wlp = WordlengthPattern.from_sparse(m, {R: 3 * R - 2 * m + 3, R + 1: 2 * m - 3 * R})
    return RegularReference(m, R, wlp, R - 1)


TABLE2_CELLS = ("wlp", "resolution", "projectivity")


@dataclass(frozen=True)
class Table2Row:
    m: int
    criteria: tuple[Criterion, ...]
    candidate: DesignCandidate
    regular: RegularReference
    first_in_group: bool
    report: AnalysisReport | None = None

    @property
    def design(self) -> str:
        return f"2^({self.m}-2)"

    @property
    def criteria_label(self) -> str:
        return ", ".join(c.letter for c in self.criteria)

    def cell_status(self) -> dict[str, bool] | None:
        """Per-cell agreement between the closed form and brute force (None if unverified)."""
        if self.report is None:
            return None
        c, r = self.candidate, self.report
        return {
            "wlp": c.wlp == r.wlp,
            "resolution": c.resolution == r.resolution,
            "projectivity": c.projectivity == r.projectivity,
        }

    def mismatches(self) -> list[str]:
        status = self.cell_status() or {}
        return [f"{self.design} {self.criteria_label} {name}" for name, ok in status.items() if not ok]


def optimal_for_m(m: int, c: Criterion) -> DesignCandidate:
    """Optimal 2**(m-2) design: a full design for even m, a half fraction for odd m."""
    if m % 2:
        return optimal_half((m - 1) // 2, c)
    return optimal_full((m - 2) // 2, c)


def table2(ms=range(6, 17), verify: bool = True) -> list[Table2Row]:
    """Optimal designs for each size 2**(m-2), one row per distinct design.

    Criteria that lead to the same design share a row.  With ``verify`` each
    row's design is constructed and brute-forced; see ``Table2Row.mismatches``.
    """
    rows = []
    for m in ms:
        groups: dict[tuple, list] = {}
        for c in Criterion:
            cand = optimal_for_m(m, c)
            key = (cand.v, cand.column)
            if key in groups:
                groups[key][0].append(c)
            else:
                groups[key] = [[c], cand]
        ref = regular_reference(m)
        for i, (crits, cand) in enumerate(groups.values()):
            report = analyze(cand.design(), with_words=False) if verify else None
            rows.append(Table2Row(m, tuple(crits), cand, ref, i == 0, report))
    return rows
