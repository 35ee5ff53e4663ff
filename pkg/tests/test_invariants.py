import itertools
from collections import Counter

import pytest

from qcomplex.chain_model import Params
from qcomplex.invariants import (
    Multichain,
    TruncatedSeries,
    compare_series,
    cycle_type,
    elementary,
    face_multichain,
    flag_h_series,
    hilbert_from_partitioning,
    molien,
    molien_by_elements,
    orbit_count_series,
    permute_exponents,
    theta,
    transfer,
    transfer_sum,
    verify_basic_set_low_degree,
)
from qcomplex.lex_shelling import shelling_partitioning, verify_shelling
from qcomplex.partitioning import partition_facets

from conftest import cached_complex
from oracles import monomial_orbit_counts


def test_series_arithmetic():
    g = TruncatedSeries.geometric(1, 4)
    assert (g * g).to_list() == [1, 2, 3, 4, 5]
    assert (g + g).to_list() == [2] * 5
    assert (g * 3).to_list() == [3] * 5
    assert g.substitute_power(2, 4).to_list() == [1, 0, 1, 0, 1]
    assert TruncatedSeries.one(2).first_difference(g) == 1


def test_as_integers_rejects_fractions():
    from fractions import Fraction
    with pytest.raises(ArithmeticError):
        TruncatedSeries((Fraction(1, 2),)).as_integers()


def test_molien_symmetric_two_points():
    assert molien(Params(2, 1), 7).to_list() == [1, 1, 2, 2, 3, 3, 4, 4]


def test_molien_two_two_low_degree():
    c = molien(Params(2, 2), 2).to_list()
    assert c[1] == 1 and c[2] == 3


@pytest.mark.parametrize("l,m,sym", [(2, 2, True), (3, 2, True), (2, 3, True), (2, 2, False), (3, 2, False), (4, 2, True)])
def test_molien_matches_orbit_counts(l, m, sym):
    P = Params(l, m, sym)
    assert molien(P, 6).to_list() == monomial_orbit_counts(P, 6)


@pytest.mark.parametrize("l,m,sym", [(2, 2, True), (3, 2, True), (2, 3, True), (2, 4, True), (3, 2, False)])
def test_molien_plethysm_matches_elements(l, m, sym):
    P = Params(l, m, sym)
    assert molien(P, 10) == molien_by_elements(P, 10)


def test_orbit_count_series():
    P = Params(2, 2)
    assert orbit_count_series(P, 5).to_list() == monomial_orbit_counts(P, 5)


def test_cycle_type():
    assert cycle_type((2, 1, 3)) == (2, 1)
    assert cycle_type((2, 3, 1, 5, 4)) == (3, 2)


def test_molien_coefficients_nonnegative_and_c0():
    for P in [Params(3, 3), Params(2, 4)]:
        c = molien(P, 12).to_list()
        assert c[0] == 1 and all(x >= 0 for x in c)


def test_hilbert_simplex():
    assert hilbert_from_partitioning([()], 1, 5).to_list() == [1] * 6


@pytest.mark.parametrize("l,m", [(2, 2), (2, 3), (3, 2)])
def test_hilbert_equals_molien(l, m):
    P = Params(l, m)
    cmp = compare_series(partition_facets(P), P, 12)
    assert cmp.equal, cmp.report()
    assert cmp.report()["compare"] == "equal"


def test_hilbert_from_shelling_l2():
    P = Params(2, 3)
    c = cached_complex(2, 3)
    part = shelling_partitioning(c, verify_shelling(c))
    assert hilbert_from_partitioning(part, P.n, 12) == molien(P, 12)


def test_comparison_reports_first_difference():
    P = Params(2, 2)
    part = partition_facets(P)
    bad = hilbert_from_partitioning([g.support for g in part.minimal_faces] + [(1,)], P.n, 6)
    from qcomplex.invariants import SeriesComparison
    cmp = SeriesComparison(bad, molien(P, 6))
    assert cmp.first_diff == 1
    assert cmp.report()["compare"] == {"first_diff": 1}


@pytest.mark.parametrize("l,m", [(2, 2), (3, 2), (2, 3), (4, 2)])
def test_flag_h_series_identity(l, m):
    c = cached_complex(l, m)
    part = partition_facets(Params(l, m))
    num = Counter(sum(g.support) for g in part.minimal_faces)
    series = flag_h_series(c.flag_vectors().flag_h, 40)
    assert series.to_list() == [num.get(d, 0) for d in range(41)]


def test_transfer_examples():
    assert transfer(Multichain(2, [({1}, 1), ({1, 2}, 1)])) == (2, 1)
    assert transfer_sum(theta(2, 3)) == elementary(2, 3)
    assert transfer(Multichain(6, [({1, 4, 5}, 1), ({1, 2, 3, 4, 5}, 1)])) == (2, 1, 1, 2, 2, 0)


def test_transfer_of_located_face():
    P = Params(3, 2)
    mc = face_multichain((1, 2, 2, 1, 1, 2), (3, 5), P)
    e = transfer(mc)
    assert sum(e) == 8 == mc.degree
    assert sorted(e) == [0, 1, 1, 2, 2, 2]


def test_multichain_validation():
    with pytest.raises(ValueError):
        Multichain(3, [({1}, 1), ({2}, 1)])
    with pytest.raises(ValueError):
        Multichain(3, [({4}, 1)])
    with pytest.raises(ValueError):
        Multichain(3, [({1}, -1)])
    assert Multichain(3, [({1}, 1), ({1}, 2)]).items == ((frozenset({1}), 3),)


def _multichains(n, d):
    subsets = [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(range(1, n + 1), k)]
    out = []

    def rec(chain, start, deg):
        if deg == d:
            out.append(Multichain(n, chain))
            return
        for i in range(start, len(subsets)):
            s = subsets[i]
            if deg + len(s) > d:
                continue
            if all(a <= s or s <= a for a, _ in chain):
                rec(chain + [(s, 1)], i, deg + len(s))

    rec([], 0, 0)
    return out


@pytest.mark.parametrize("n", [2, 3, 4])
def test_transfer_injective(n):
    for d in range(0, 6 if n < 4 else 5):
        mcs = set(_multichains(n, d))
        images = {transfer(mc) for mc in mcs}
        assert len(images) == len(mcs)
        assert all(sum(e) == d for e in images)


def test_basic_set_two_two():
    reps = verify_basic_set_low_degree(partition_facets(Params(2, 2)), Params(2, 2), 8)
    assert reps[0].spans and reps[0].invariant_dim == 1
    assert all(r.spans for r in reps)


def test_basic_set_three_two_reports():
    P = Params(3, 2)
    for p in (None, 2, 3):
        reps = verify_basic_set_low_degree(partition_facets(P), P, 8, p)
        assert len(reps) == 9
        assert all(r.corank >= 0 for r in reps)


def test_basic_set_guards():
    P = Params(3, 3)
    with pytest.raises(ValueError):
        verify_basic_set_low_degree(partition_facets(P), P, 4)
    with pytest.raises(ValueError):
        verify_basic_set_low_degree(partition_facets(Params(2, 2)), Params(2, 2), 11)


def test_permute_exponents():
    assert permute_exponents((3, 0, 1), (2, 3, 1)) == [1, 3, 0]
