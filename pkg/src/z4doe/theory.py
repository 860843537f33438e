"""Closed-form aliasing structure of quarter-fraction Z4-code designs.

Everything is a function of the frequency profile (f0, f1, f2, f3) of the
generator vector and, for half fractions, the association class of the
branching column.  f1 and f3 only ever enter through ``a = f1 + f3``.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .analysis import WordlengthPattern, decimal_str, fraction_str
from .errors import InfeasibleBranchError, Z4DomainError
from .z4core import ColumnClass, as_z4_vector, frequency_profile


class NotCoveredType(enum.Enum):
    NOT_COVERED = "NotCovered"

    def __repr__(self) -> str:
        return "NOT_COVERED"

    def __str__(self) -> str:
        return self.value


#: returned where no closed form is known; callers fall back to brute force
NOT_COVERED = NotCoveredType.NOT_COVERED


class BranchClass(enum.Enum):
    # declaration order is the search tie-break order
    ONE_OR_THREE = "1or3"
    TWO = "2"
    ZERO = "0"
    V = "V"

    @classmethod
    def of_column(cls, c: ColumnClass) -> BranchClass:
        return {
            ColumnClass.ASSOC_V: cls.V,
            ColumnClass.ASSOC_0: cls.ZERO,
            ColumnClass.ASSOC_1: cls.ONE_OR_THREE,
            ColumnClass.ASSOC_3: cls.ONE_OR_THREE,
            ColumnClass.ASSOC_2: cls.TWO,
        }[c]

    @classmethod
    def parse(cls, text: str) -> BranchClass:
        key = text.strip().lower()
        aliases = {"1": cls.ONE_OR_THREE, "3": cls.ONE_OR_THREE, "1or3": cls.ONE_OR_THREE,
                   "2": cls.TWO, "0": cls.ZERO, "v": cls.V}
        try:
            return aliases[key]
        except KeyError:
            raise InfeasibleBranchError(f"unknown branch class {text!r}") from None


@dataclass(frozen=True)
class FrequencyProfile:
    f0: int
    f1: int
    f2: int
    f3: int

    def __post_init__(self):
        if min(self.f0, self.f1, self.f2, self.f3) < 0:
            raise Z4DomainError(f"negative count in profile {self.as_tuple()}")
        if self.n < 1:
            raise Z4DomainError("profile must describe a vector of length n >= 1")

    @classmethod
    def of(cls, v: Iterable[int] | str) -> FrequencyProfile:
        return cls(*frequency_profile(v))

    @classmethod
    def parse(cls, text: str) -> FrequencyProfile:
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 4 or not all(p.isdigit() for p in parts):
            raise Z4DomainError(f"profile {text!r} must be four comma-separated counts f0,f1,f2,f3")
        return cls(*(int(p) for p in parts))

    @property
    def n(self) -> int:
        return self.f0 + self.f1 + self.f2 + self.f3

    @property
    def a(self) -> int:
        return self.f1 + self.f3

    @property
    def m(self) -> int:
        return 2 * self.n + 2

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.f0, self.f1, self.f2, self.f3)

    def representative(self) -> tuple[int, ...]:
        """A generator vector with exactly these counts (1's, 3's, 2's, then 0's)."""
        return (1,) * self.f1 + (3,) * self.f3 + (2,) * self.f2 + (0,) * self.f0

    def class_key(self) -> tuple[int, int, int]:
        return (self.a, self.f2, self.f0)


def _profile(p: FrequencyProfile | Iterable[int] | str) -> FrequencyProfile:
    if isinstance(p, FrequencyProfile):
        return p
    return FrequencyProfile.of(as_z4_vector(p))


@dataclass(frozen=True)
class TheoryParams:
    k1: int
    k2: int
    rho: Fraction


@dataclass(frozen=True)
class WordSpec:
    length: int
    rho: Fraction
    count: int


def theory_params(p: FrequencyProfile) -> TheoryParams:
    return TheoryParams(
        k1=p.f1 + 2 * p.f2 + p.f3 + 1,
        k2=2 * p.a + 2,
        rho=Fraction(1, 2 ** (p.a // 2)),
    )


def _inv_sq(rho: Fraction) -> int:
    x = 1 / rho**2
    assert x.denominator == 1
    return int(x)


def predict_words(p: FrequencyProfile) -> list[WordSpec]:
    t = theory_params(p)
    return [WordSpec(t.k2, Fraction(1), 1), WordSpec(t.k1, t.rho, 2 * _inv_sq(t.rho))]


def predict_regular(p: FrequencyProfile) -> bool:
    return p.a <= 1


def predict_resolution(p: FrequencyProfile) -> Fraction:
    t = theory_params(p)
    if t.k1 >= t.k2:
        return Fraction(t.k2)
    return t.k1 + 1 - t.rho


def predict_wlp(p: FrequencyProfile, m: int | None = None) -> WordlengthPattern:
    m = p.m if m is None else m
    if m != p.m:
        raise ValueError(f"full design for n={p.n} has m={p.m} factors, not {m}")
    t = theory_params(p)
    if t.k1 == t.k2:
        return WordlengthPattern.from_sparse(m, {t.k1: 3})
    return WordlengthPattern.from_sparse(m, {t.k1: 2, t.k2: 1})


def predict_projectivity(p: FrequencyProfile) -> int | NotCoveredType:
    if p.f2 > 0:
        return 2 * p.a + 1
    if p.a > 0:
        return 2 * p.a - 1
    return NOT_COVERED


def feasible_branches(p: FrequencyProfile) -> list[BranchClass]:
    out = []
    if p.a >= 1:
        out.append(BranchClass.ONE_OR_THREE)
    if p.f2 >= 1:
        out.append(BranchClass.TWO)
    if p.f0 >= 1:
        out.append(BranchClass.ZERO)
    if p.a >= 1 or p.f2 >= 1:
        out.append(BranchClass.V)
    return out


def resolve_branch(p: FrequencyProfile, b: BranchClass) -> BranchClass:
    """Check feasibility and map a V-column branch onto the equivalent number class.

    A V column always behaves like a 1-or-3 column for words, resolution and
    wordlength pattern, including when f1 + f3 = 0: the other V column then
    becomes constant, which is exactly the length k2 - 1 = 1 complete word.
    """
    if b not in feasible_branches(p):
        raise InfeasibleBranchError(f"branch class {b.value} is infeasible for profile {p.as_tuple()}")
    if b is BranchClass.V:
        return BranchClass.ONE_OR_THREE
    return b


def predict_half_words(p: FrequencyProfile, b: BranchClass) -> list[WordSpec]:
    b = resolve_branch(p, b)
    t = theory_params(p)
    q = _inv_sq(t.rho)
    if b is BranchClass.ONE_OR_THREE:
        return [WordSpec(t.k2 - 1, Fraction(1), 1), WordSpec(t.k1, t.rho, q), WordSpec(t.k1 - 1, t.rho, q)]
    if b is BranchClass.TWO:
        return [WordSpec(t.k2, Fraction(1), 1), WordSpec(t.k1 - 1, t.rho, 2 * q)]
    return predict_words(p)


def predict_half_resolution(p: FrequencyProfile, b: BranchClass) -> Fraction:
    b = resolve_branch(p, b)
    t = theory_params(p)
    if b is BranchClass.ONE_OR_THREE:
        return Fraction(t.k2 - 1) if t.k1 >= t.k2 else t.k1 - t.rho
    if b is BranchClass.TWO:
        return Fraction(t.k2) if t.k1 - 1 >= t.k2 else t.k1 - t.rho
    return predict_resolution(p)


def predict_half_wlp(p: FrequencyProfile, b: BranchClass, m: int | None = None) -> WordlengthPattern:
    m = p.m - 1 if m is None else m
    if m != p.m - 1:
        raise ValueError(f"half fraction for n={p.n} has m={p.m - 1} factors, not {m}")
    b = resolve_branch(p, b)
    t = theory_params(p)
    k1, k2 = t.k1, t.k2
    if b is BranchClass.ONE_OR_THREE:
        if k1 == k2:
            return WordlengthPattern.from_sparse(m, {k1 - 1: 2, k1: 1})
        if k1 == k2 - 1:
            return WordlengthPattern.from_sparse(m, {k1 - 1: 1, k1: 2})
        entries = {k1 - 1: 1, k2 - 1: 1, k1: 1}
        if len(entries) != 3:
            raise AssertionError(f"word lengths collide for profile {p.as_tuple()}: {k1=}, {k2=}")
        return WordlengthPattern.from_sparse(m, entries)
    if b is BranchClass.TWO:
        if k1 - 1 == k2:
            return WordlengthPattern.from_sparse(m, {k2: 3})
        return WordlengthPattern.from_sparse(m, {k1 - 1: 2, k2: 1})
    return WordlengthPattern.from_sparse(m, predict_wlp(p).sparse())


def predict_half_projectivity(p: FrequencyProfile, b: BranchClass) -> int | NotCoveredType:
    b = resolve_branch(p, b)
    a = p.a
    if b is BranchClass.ONE_OR_THREE and a > 0:
        return 2 * a if p.f2 > 0 else 2 * a - 2
    if b is BranchClass.TWO:
        if p.f2 > 1:
            return 2 * a + 1
        # f2 == 1 with a == 0 has projectivity 1, not 2a
        if a > 0:
            return 2 * a
    return NOT_COVERED


@dataclass(frozen=True)
class Prediction:
    """Theory-side counterpart of an analysis report."""

    profile: FrequencyProfile
    branch: BranchClass | None
    params: TheoryParams
    n_runs: int
    n_factors: int
    words: tuple[WordSpec, ...]
    resolution: Fraction
    wlp: WordlengthPattern
    projectivity: int | NotCoveredType
    regular: bool

    def to_dict(self) -> dict:
        return {
            "source": "theory",
            "profile": list(self.profile.as_tuple()),
            "branch": None if self.branch is None else self.branch.value,
            "k1": self.params.k1,
            "k2": self.params.k2,
            "rho": fraction_str(self.params.rho),
            "n_runs": self.n_runs,
            "n_factors": self.n_factors,
            "resolution": {"exact": fraction_str(self.resolution), "decimal": decimal_str(self.resolution)},
            "wlp": {str(k): fraction_str(a) for k, a in self.wlp.sparse().items()},
            "projectivity": str(self.projectivity) if self.projectivity is NOT_COVERED else self.projectivity,
            "regular": self.regular,
            "words": [
                {"length": w.length, "rho": fraction_str(w.rho), "count": w.count} for w in self.words
            ],
        }


def predict(p: FrequencyProfile | Iterable[int] | str, branch: BranchClass | None = None) -> Prediction:
    """All closed-form predictions for the full design, or its half fraction when ``branch`` is given."""
    p = _profile(p)
    if branch is None:
        words = predict_words(p)
        return Prediction(p, None, theory_params(p), 4**p.n, p.m, tuple(words),
                          predict_resolution(p), predict_wlp(p), predict_projectivity(p),
                          all(w.rho == 1 for w in words))
    words = predict_half_words(p, branch)
    return Prediction(p, branch, theory_params(p), 4**p.n // 2, p.m - 1, tuple(words),
                      predict_half_resolution(p, branch), predict_half_wlp(p, branch),
                      predict_half_projectivity(p, branch), all(w.rho == 1 for w in words))
