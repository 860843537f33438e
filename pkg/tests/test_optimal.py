from fractions import Fraction

import pytest

from z4doe.analysis import WordlengthPattern, analyze
from z4doe.errors import ResourceLimitError
from z4doe.optimal import (
    Criterion,
    compare_wlp,
    criterion_value,
    exhaustive_search,
    max_projectivity_profile,
    max_resolution_profile,
    min_aberration_profile,
    optimal_for_m,
    optimal_full,
    optimal_half,
    regular_reference,
    table2,
)
from z4doe.theory import BranchClass


def ab(p):
    return (p.a, p.f2)


@pytest.mark.parametrize("n,res,ma", [
    (2, (1, 1), (1, 1)),
    (3, (2, 1), (2, 1)),
    (4, (3, 1), (2, 2)),
    (5, (3, 2), (3, 2)),
    (6, (4, 2), (4, 2)),
    (7, (5, 2), (4, 3)),
])
def test_profiles(n, res, ma):
    assert ab(max_resolution_profile(n)) == res
    assert ab(min_aberration_profile(n)) == ma
    assert ab(max_projectivity_profile(n)) == (n - 1, 1)
    assert ab(max_projectivity_profile(n, alternative=True)) == (n, 0)


def test_compare_wlp():
    a = WordlengthPattern.from_sparse(8, {5: 2, 6: 1})
    b = WordlengthPattern.from_sparse(8, {5: 1, 6: 2})
    assert compare_wlp(b, a) == -1
    assert compare_wlp(a, b) == 1
    assert compare_wlp(a, a) == 0
    with pytest.raises(ValueError):
        compare_wlp(a, WordlengthPattern.from_sparse(7, {}))


@pytest.mark.parametrize("m", range(4, 17))
def test_regular_reference_closed_form(m):
    ref = regular_reference(m)
    assert ref.resolution == 2 * m // 3
    assert sum(ref.wlp.values) == 3
    assert ref.projectivity == ref.resolution - 1


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("half", [False, True], ids=["full", "half"])
@pytest.mark.parametrize("c", list(Criterion), ids=lambda c: c.value)
def test_search_agrees_with_construction(n, half, c):
    built = optimal_half(n, c) if half else optimal_full(n, c)
    winners = exhaustive_search(n, c, half=half)
    assert (built.v, built.column) in {(w.v, w.column) for w in winners}
    # the construction is also best on the tie-breaking criteria
    for x in Criterion:
        assert criterion_value(built, x) == criterion_value(winners[0], x), x


@pytest.mark.parametrize("n", range(2, 9))
def test_min_aberration_full_matches_regular_pattern(n):
    """The best quaternary design has the same pattern as the regular minimum aberration one."""
    m = 2 * n + 2
    assert optimal_full(n, Criterion.MIN_ABERRATION).wlp == regular_reference(m).wlp


@pytest.mark.parametrize("m", range(7, 17))
def test_projectivity_beats_regular(m):
    assert optimal_for_m(m, Criterion.MAX_PROJECTIVITY).projectivity > regular_reference(m).projectivity


@pytest.mark.parametrize("m", range(6, 17))
def test_resolution_at_least_regular(m):
    assert optimal_for_m(m, Criterion.MAX_RESOLUTION).resolution >= regular_reference(m).resolution


def test_search_deterministic():
    a = [x.label() for x in exhaustive_search(5, Criterion.MAX_PROJECTIVITY, half=True)]
    b = [x.label() for x in exhaustive_search(5, Criterion.MAX_PROJECTIVITY, half=True)]
    assert a == b


def test_search_verify_and_limits():
    winners = exhaustive_search(3, Criterion.MIN_ABERRATION, verify=True)
    assert all(w.verified is not None for w in winners)
    with pytest.raises(ResourceLimitError):
        exhaustive_search(7, Criterion.MIN_ABERRATION, verify=True)
    with pytest.raises(ResourceLimitError):
        exhaustive_search(31, Criterion.MIN_ABERRATION)
    with pytest.raises(ValueError):
        exhaustive_search(0, Criterion.MIN_ABERRATION)


def test_half_projectivity_branch_marker():
    c = optimal_half(4, Criterion.MAX_PROJECTIVITY)
    assert c.branch is BranchClass.ONE_OR_THREE and c.column == 1 and c.marker == "f"
    c = optimal_half(3, Criterion.MIN_ABERRATION)
    assert c.branch is BranchClass.ONE_OR_THREE and c.marker == "f"
    c = optimal_half(4, Criterion.MIN_ABERRATION)
    assert c.branch is BranchClass.TWO and c.marker == "l"


EXPECTED_ROWS = [
    (6, "r, a, p", "[12]", ""), (7, "r, a, p", "[112]", "f"), (8, "r, a, p", "[112]", ""),
    (9, "r, a", "[1122]", "l"), (9, "p", "[1112]", "f"),
    (10, "r, p", "[1112]", ""), (10, "a", "[1122]", ""),
    (11, "r, a", "[11122]", "l"), (11, "p", "[11112]", "f"),
    (12, "r, a", "[11122]", ""), (12, "p", "[11112]", ""),
    (13, "r, a", "[111122]", "f"), (13, "p", "[111112]", "f"),
    (14, "r, a", "[111122]", ""), (14, "p", "[111112]", ""),
    (15, "r, a", "[1111222]", "l"), (15, "p", "[1111112]", "f"),
    (16, "r", "[1111122]", ""), (16, "a", "[1111222]", ""), (16, "p", "[1111112]", ""),
]


def test_table2_layout_and_verification():
    rows = table2()
    got = [(r.m, r.criteria_label, "[" + "".join(map(str, r.candidate.v)) + "]", r.candidate.marker)
           for r in rows]
    assert got == EXPECTED_ROWS
    assert all(r.mismatches() == [] for r in rows)


def test_table2_half_projectivity_m9():
    # the 2^(9-2) projectivity design: k1 = 6, k2 = 8 after branching on a 1 column
    row = next(r for r in table2([9]) if r.criteria == (Criterion.MAX_PROJECTIVITY,))
    assert row.report.wlp.sparse() == {5: 1, 6: 1, 7: 1}
    assert row.report.resolution == Fraction(11, 2)
    assert row.report.projectivity == 6


def test_candidate_verify_matches_analysis():
    c = optimal_full(3, Criterion.MAX_RESOLUTION).verify()
    assert c.verified == analyze(c.design())
    assert c.summary()["verified"] is True
