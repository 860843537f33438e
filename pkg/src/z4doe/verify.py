"""Theory-versus-brute-force comparison over whole families of designs."""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .analysis import AnalysisReport, Word, analyze
from .theory import (
    NOT_COVERED,
    BranchClass,
    FrequencyProfile,
    Prediction,
    WordSpec,
    feasible_branches,
    predict,
)
from .z4core import build_design, column_class, half_fraction

log = logging.getLogger(__name__)


def word_classes(words: Iterable[Word]) -> Counter:
    """Multiset of (length, rho) over an explicit word list."""
    return Counter((w.length, w.rho) for w in words)


def spec_classes(specs: Iterable[WordSpec]) -> Counter:
    c: Counter = Counter()
    for w in specs:
        c[(w.length, w.rho)] += w.count
    return c


def compare(pred: Prediction, report: AnalysisReport) -> list[str]:
    """Names of fields where the prediction and the brute-force report differ.

    Projectivity is skipped when the prediction is NOT_COVERED.
    """
    bad = []
    if (pred.n_runs, pred.n_factors) != (report.n_runs, report.n_factors):
        bad.append("shape")
    if report.words is not None and spec_classes(pred.words) != word_classes(report.words):
        bad.append("words")
    if pred.resolution != report.resolution:
        bad.append("resolution")
    if pred.wlp != report.wlp:
        bad.append("wlp")
    if pred.regular != report.regular:
        bad.append("regular")
    if pred.projectivity is not NOT_COVERED and report.projectivity is not None:
        if pred.projectivity != report.projectivity:
            bad.append("projectivity")
    return bad


def all_profiles(n: int) -> Iterator[FrequencyProfile]:
    """Every (f0, f1, f2, f3) summing to n."""
    for f0, f1, f2 in itertools.product(range(n + 1), repeat=3):
        f3 = n - f0 - f1 - f2
        if f3 >= 0:
            yield FrequencyProfile(f0, f1, f2, f3)


def branch_columns(v: tuple[int, ...], all_columns: bool = False) -> list[tuple[int, BranchClass]]:
    """Columns to branch on: all of them, or the first column of each branch class."""
    seen: set[BranchClass] = set()
    out = []
    for col in range(1, 2 * len(v) + 3):
        b = BranchClass.of_column(column_class(v, col))
        if all_columns or b not in seen:
            seen.add(b)
            out.append((col, b))
    return out


@dataclass
class SweepResult:
    checked: int = 0
    mismatches: list[str] = field(default_factory=list)
    not_covered: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _label(p: FrequencyProfile, col: int | None = None, b: BranchClass | None = None) -> str:
    s = f"profile={p.as_tuple()}"
    if col is not None:
        s += f" branch col {col} ({b.value})"
    return s


def sweep(max_n: int, all_columns: bool = False, min_n: int = 1) -> SweepResult:
    """Compare every closed-form prediction with analysis of the constructed design.

    Covers each profile with ``min_n <= n <= max_n``, the full design and one
    half fraction per feasible branch class (or every column when
    ``all_columns``).  NOT_COVERED projectivities are brute-forced and logged.
    """
    res = SweepResult()
    for n in range(min_n, max_n + 1):
        for p in all_profiles(n):
            v = p.representative()
            D = build_design(v)
            _check(res, predict(p), analyze(D), _label(p))
            feasible = feasible_branches(p)
            for col, b in branch_columns(v, all_columns):
                if b not in feasible:
                    # a V column when v is all zeros: constant, cannot branch
                    res.skipped.append(_label(p, col, b))
                    continue
                _check(res, predict(p, b), analyze(half_fraction(D, col)), _label(p, col, b))
    return res


def _check(res: SweepResult, pred: Prediction, report: AnalysisReport, label: str) -> None:
    res.checked += 1
    bad = compare(pred, report)
    if bad:
        res.mismatches.append(f"{label}: {', '.join(bad)}")
        log.error("mismatch %s: %s", label, bad)
    if pred.projectivity is NOT_COVERED:
        note = f"{label}: projectivity not covered by theory, brute force = {report.projectivity}"
        res.not_covered.append(note)
        log.info(note)
