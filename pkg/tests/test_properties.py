"""Randomized checks of the structural invariants."""

import itertools

from hypothesis import given, settings, strategies as st

from qcomplex.chain_model import (
    Params,
    canonicalize,
    face_restrict,
    format_face,
    group_elements,
    parse_face,
    restrict,
    word_from_permutation,
)
from qcomplex.homology import smith_normal_form
from qcomplex.invariants import Multichain, transfer
from qcomplex.partitioning import descent_set, determinant, locate_face, normalize_word, sigma_evolution

from conftest import cached_complex
from oracles import chain_orbits

PARAMS = [Params(2, 2), Params(3, 2), Params(2, 3), Params(2, 2, False), Params(3, 2, False)]
ELEMENTS = {p: list(group_elements(p)) for p in PARAMS}


@st.composite
def chains(draw):
    p = draw(st.sampled_from(PARAMS))
    perm = draw(st.permutations(range(1, p.n + 1)))
    ranks = draw(st.sets(st.integers(1, p.n - 1)))
    return p, [frozenset(perm[:r]) for r in sorted(ranks)]


@settings(max_examples=200, deadline=None)
@given(chains(), st.data())
def test_canonicalize_invariant_under_group(pc, data):
    p, chain = pc
    g = data.draw(st.sampled_from(ELEMENTS[p]))
    moved = [frozenset(g[v - 1] for v in s) for s in chain]
    assert canonicalize(moved, p) == canonicalize(chain, p)


def test_canonicalize_complete():
    # distinct orbits get distinct canonical forms
    for p in [Params(2, 2), Params(3, 2), Params(2, 2, False)]:
        orbits = chain_orbits(p)
        forms = {canonicalize(o[0], p) for o in orbits}
        assert len(forms) == len(orbits)
        for o in orbits:
            assert {canonicalize(c, p) for c in o} == {canonicalize(o[0], p)}


@settings(max_examples=200, deadline=None)
@given(chains(), st.data())
def test_restrict_is_monotone(pc, data):
    p, chain = pc
    face = canonicalize(chain, p)
    sub = data.draw(st.sets(st.sampled_from(face.support)) if face.support else st.just(set()))
    small = face_restrict(face, sub, p.symmetrize)
    kept = [s for s in chain if len(s) in sub]
    assert small == canonicalize(kept, p)
    assert face_restrict(face, face.support, p.symmetrize) == face


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PARAMS), st.data())
def test_restrict_from_facet_matches_chain(p, data):
    perm = data.draw(st.permutations(range(1, p.n + 1)))
    ranks = data.draw(st.sets(st.integers(1, p.n - 1)))
    w = word_from_permutation(perm, p)
    assert restrict(w, ranks, p) == canonicalize([perm[:r] for r in sorted(ranks)], p)


@settings(max_examples=100, deadline=None)
@given(chains())
def test_face_string_round_trip(pc):
    p, chain = pc
    face = canonicalize(chain, p)
    assert parse_face(format_face(face), p) == face


matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)))


def _det_minors(a, k):
    from math import gcd
    g = 0
    for rows in itertools.combinations(range(len(a)), k):
        for cols in itertools.combinations(range(len(a[0])), k):
            g = gcd(g, determinant([[a[i][j] for j in cols] for i in rows]))
    return g


@settings(max_examples=150, deadline=None)
@given(matrices, st.randoms(use_true_random=False))
def test_snf_permutation_invariant(a, rnd):
    d = smith_normal_form(a)
    rows = list(range(len(a)))
    cols = list(range(len(a[0])))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    b = [[a[i][j] for j in cols] for i in rows]
    assert smith_normal_form(b) == d
    assert all(y % x == 0 for x, y in zip(d, d[1:]))
    # product of the first k factors is the gcd of the k-minors
    prod = 1
    for k, x in enumerate(d, 1):
        prod *= x
        assert _det_minors(a, k) == prod
    if len(d) < min(len(a), len(a[0])):
        assert _det_minors(a, len(d) + 1) == 0


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6), st.data())
def test_transfer_degree(n, data):
    perm = data.draw(st.permutations(range(1, n + 1)))
    ranks = sorted(data.draw(st.sets(st.integers(1, n))))
    exps = data.draw(st.lists(st.integers(0, 3), min_size=len(ranks), max_size=len(ranks)))
    mc = Multichain(n, [(perm[:r], e) for r, e in zip(ranks, exps)])
    assert sum(transfer(mc)) == mc.degree == sum(r * e for r, e in zip(ranks, exps))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([Params(3, 2), Params(2, 3), Params(3, 3)]), st.data())
def test_descents_depend_only_on_orbit(p, data):
    perm = data.draw(st.permutations(range(1, p.n + 1)))
    w = word_from_permutation(perm, p)
    # renaming the rows does not change the descents
    names = data.draw(st.permutations(range(1, p.m + 1)))
    renamed = tuple(names[x - 1] for x in w)
    assert descent_set(renamed, p.m) == descent_set(w, p.m)
    assert sigma_evolution(normalize_word(w, p.m), p.m).sigma_final == tuple(range(1, p.m + 1))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(3, 2), (2, 3), (2, 2)]), st.data())
def test_located_interval_contains_face(lm, data):
    p = Params(*lm)
    c = cached_complex(*lm)
    layer = data.draw(st.sampled_from([x for x in c.cells if x]))
    face = data.draw(st.sampled_from(layer))
    tr = locate_face(face, p)
    assert restrict(tr.facet, face.support, p) == face
    assert set(tr.minimal_face.support) <= set(face.support)
    assert tr.minimal_face == restrict(tr.facet, tr.descents, p)
