import random
from collections import Counter

import pytest

from qcomplex.chain_model import FaceOrbit, Params, empty_face, flag_face, parse_face, restrict
from qcomplex.partitioning import (
    SimilarityState,
    descent_set,
    determinant,
    flag_descents,
    incidence,
    increasing_extensions,
    locate_face,
    normalize_word,
    partition,
    partition_facets,
    partition_flag_link,
    rank_mod_p,
    raw_descents,
    sigma_evolution,
    verify_partition,
)

from conftest import cached_complex, cached_flag_link

LONG_WORD = tuple(int(c) for c in "112221132333321")


def test_sigma_evolution_example():
    seq = sigma_evolution(LONG_WORD, 3)
    assert seq.sigmas[0] == (1, 2, 3)
    assert seq.sigmas[5] == (2, 1, 3)
    assert seq.sigmas[6] == (2, 1, 3)
    assert seq.sigmas[7] == (1, 2, 3)
    assert seq.rhos[-1] == (1, 2, 3)


def test_sigma_identity_for_blocks():
    seq = sigma_evolution((1, 1, 2, 2, 3, 3), 3)
    assert all(s == (1, 2, 3) for s in seq.sigmas)


def test_sigma_final_identity():
    assert sigma_evolution((1, 2, 2, 1, 1, 2), 2).sigma_final == (1, 2)


def test_similarity_classes_refine():
    seq = sigma_evolution(LONG_WORD, 3)
    assert seq.classes[0] == [(1, 2, 3)]
    for a, b in zip(seq.classes, seq.classes[1:]):
        for cls in b:
            assert any(set(cls) <= set(c) for c in a)


def test_similarity_state_copy():
    st = SimilarityState.initial(3)
    st2 = st.copy()
    st2.insert(1)
    assert st.counts[1] == 0 and st2.counts[1] == 1


def test_labels_and_counts():
    seq = sigma_evolution((1, 2, 2, 1, 1, 2), 2)
    assert seq.labels == [(1, 1), (1, 2), (2, 2), (2, 1), (3, 1), (3, 2)]


def test_descent_examples():
    assert descent_set((1, 2, 2, 1, 1, 2), 2) == (3, 5)
    # count-first order: the block word is not the increasing one
    assert descent_set((1, 1, 2, 2, 3, 3), 3) == (2, 4)
    assert descent_set((1, 1, 1, 2, 2, 2), 2) == (3,)
    assert descent_set((1, 2, 3, 1, 2, 3), 3) == ()
    assert descent_set((1, 2, 1, 2, 1, 2), 2) == ()


def test_normalized_word_has_identity_final_order():
    for w in partition_facets(Params(3, 3)).facets:
        v = normalize_word(w, 3)
        assert sigma_evolution(v, 3).sigma_final == (1, 2, 3)


def test_raw_descents_increasing_word():
    assert raw_descents((1, 2, 1, 2), 2) == ()


@pytest.mark.parametrize("l,m", [(1, 1), (2, 2), (3, 2), (2, 3), (4, 2), (2, 4), (3, 3)])
def test_partition_valid(l, m):
    c = cached_complex(l, m)
    chk = verify_partition(c, partition(c))
    assert chk.ok, chk.certificate()


def test_partition_one_one():
    part = partition(cached_complex(1, 1))
    assert part.facets == [(1,)] and part.descents == [()]


def test_corrupted_partition_detected():
    c = cached_complex(3, 2)
    part = partition(c)
    j = next(j for j, d in enumerate(part.descents) if d)
    part.descents[j] = part.descents[j][1:]
    chk = verify_partition(c, part)
    assert not chk.ok
    assert chk.multiply_covered
    cert = chk.certificate()
    assert cert["ok"] is False and cert["multiply_covered"]


def test_corruption_uncovered():
    c = cached_complex(2, 3)
    part = partition(c)
    part.descents[0] = (1,)
    chk = verify_partition(c, part)
    assert not chk.ok and chk.uncovered


def _h_counts(c, part):
    fv = c.flag_vectors()
    got = Counter(tuple(d) for d in part.descents)
    return fv.flag_h, got


@pytest.mark.parametrize("l,m", [(2, 2), (3, 2), (2, 3), (4, 2)])
def test_flag_h_counts(l, m):
    c = cached_complex(l, m)
    h, got = _h_counts(c, partition(c))
    for s, v in h.items():
        assert got.get(s, 0) == v
    assert sum(1 for d in partition(c).descents if not d) == 1


def test_flag_h_matches_shelling_l2():
    from qcomplex.lex_shelling import verify_shelling
    for l, m in [(2, 2), (2, 3)]:
        c = cached_complex(l, m)
        a = Counter(tuple(d) for d in partition(c).descents)
        b = Counter(s.minimal_face for s in verify_shelling(c).steps)
        assert a == b


def test_locate_trace_example():
    P = Params(3, 2)
    f = parse_face("2,2;1,3", P)
    tr = locate_face(f, P)
    assert tr.facet == (1, 2, 2, 1, 1, 2)
    assert tr.descents == (3, 5)
    assert tr.minimal_face == f
    # the extension is the one with no descent inside any interval
    assert tr.extension == (1, 2, 1, 2, 2, 1)
    assert tr.relabeled == (2, 1, 2, 1, 1, 2)


def test_locate_empty_face():
    P = Params(2, 3)
    tr = locate_face(empty_face(P), P)
    assert tr.facet == (1, 2, 3, 1, 2, 3)
    assert tr.descents == ()


@pytest.mark.parametrize("l,m", [(2, 2), (3, 2), (2, 3), (4, 2)])
def test_locate_matches_scan(l, m):
    P = Params(l, m)
    c = cached_complex(l, m)
    part = partition(c)
    owner = {}
    for j in range(len(part.facets)):
        for f in part.interval(j):
            owner[f] = j
    for layer in c.cells:
        for f in layer:
            tr = locate_face(f, P)
            j = owner[f]
            assert tr.facet == part.facets[j]
            assert tr.minimal_face == part.minimal_faces[j]
            assert sigma_evolution(tr.relabeled, m).sigma_final == tuple(range(1, m + 1))


def test_increasing_extension_unique():
    P = Params(3, 2)
    for layer in cached_complex(3, 2).cells:
        for f in layer:
            assert len(increasing_extensions(list(f.profiles), f.support, P)) == 1


def test_flag_descents_rule():
    assert flag_descents(((1, 2), (1, 2), (1, 2)), 2) == ()
    assert flag_descents(((1, 2), (1, 2), (2, 1)), 2) == (1, 5)


FLAG_ASSIGNMENTS = {
    ((1, 2), (1, 2), (1, 2)): [],
    ((1, 2), (1, 2), (2, 1)): [(1, 0), (2, 3)],
    ((1, 2), (2, 1), (1, 2)): [(1, 2), (3, 2)],
    ((1, 2), (2, 1), (2, 1)): [(1, 0), (1, 2)],
}


def _chain_face(levels, P):
    """Face from a list of (count of row 1, count of row 2) per chain element."""
    support = tuple(a + b for a, b in levels)
    rows = [tuple(a for a, _ in levels), tuple(b for _, b in levels)]
    return FaceOrbit(support, tuple(sorted(rows, reverse=True)))


def test_flag_link_example_assignments():
    P = Params(3, 2)
    part = partition_flag_link(P)
    assert len(part.facets) == 4
    assert part.tuples[0] == ((1, 2), (1, 2), (1, 2))
    for j, tup in enumerate(part.tuples):
        assert part.minimal_face_in_link(j) == _chain_face(FLAG_ASSIGNMENTS[tup], P)


@pytest.mark.parametrize("l,m", [(3, 2), (4, 2), (3, 3), (2, 3), (2, 2)])
def test_flag_link_partition_valid(l, m):
    lk = cached_flag_link(l, m)
    part = partition_flag_link(Params(l, m))
    assert verify_partition(lk, part).ok
    fv = lk.flag_vectors()
    got = Counter(tuple(d) for d in part.descents)
    for s, v in fv.flag_h.items():
        assert got.get(s, 0) == v


@pytest.mark.parametrize("l,m,det", [(3, 2, 2), (4, 2, 8), (3, 3, 1944), (2, 2, 1), (2, 3, 1)])
def test_flag_link_determinants(l, m, det):
    M = incidence(partition_flag_link(Params(l, m)))
    assert all(M[i][i] == 1 for i in range(len(M)))
    assert abs(determinant(M)) == det


def test_determinant_basics():
    assert determinant([]) == 1
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0


def test_determinant_matches_fractions():
    from fractions import Fraction
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(1, 6)
        a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        b = [[Fraction(x) for x in r] for r in a]
        det = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if b[i][k]), None)
            if piv is None:
                det = Fraction(0)
                break
            if piv != k:
                b[k], b[piv] = b[piv], b[k]
                det = -det
            det *= b[k][k]
            for i in range(k + 1, n):
                f = b[i][k] / b[k][k]
                b[i] = [x - f * y for x, y in zip(b[i], b[k])]
        assert determinant(a) == det


def test_determinant_invariant_under_reordering():
    M = incidence(partition_flag_link(Params(3, 3)))
    rng = random.Random(5)
    order = list(range(len(M)))
    rng.shuffle(order)
    P = [[M[i][j] for j in order] for i in order]
    assert abs(determinant(P)) == abs(determinant(M)) == 1944


def test_rank_mod_p_of_incidence():
    M = incidence(partition_flag_link(Params(3, 2)))
    assert rank_mod_p(M, 3) == 4
    assert rank_mod_p(M, 2) == 3
    with pytest.raises(ValueError):
        rank_mod_p(M, 1)


def test_records():
    recs = partition_facets(Params(3, 2)).records()
    assert recs[0] == {"word": "111222", "descents": [3], "minimal_face": "3;0"}
    assert {"word": "121212", "descents": [], "minimal_face": ""} in recs
    assert {"word": "122112", "descents": [3, 5], "minimal_face": "2,2;1,3"} in recs


def test_non_wreath_rejected():
    with pytest.raises(ValueError):
        partition_facets(Params(2, 2, False))
