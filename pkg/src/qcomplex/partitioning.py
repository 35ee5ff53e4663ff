"""Descent-set partitioning of the wreath quotient complex.

Rows of a saturated chain are tracked as "similar" while they are being
filled in lockstep blocks.  Each insertion moves the inserted row in front
of the rows still similar to it (and equally filled), which gives a row
order sigma after every rank.  Descents of the labels (count, row) compared
in that order pick out one minimal face per facet; the resulting intervals
partition every face of the complex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .chain_model import (
    FaceOrbit,
    Params,
    Word,
    canonical_word,
    check_word,
    enumerate_facets,
    flag_face,
    restrict,
)
from .homology import check_prime, rank_mod_p

__all__ = [
    "SimilarityState",
    "LabelSequence",
    "Partitioning",
    "PartitionCheck",
    "LocateTrace",
    "sigma_evolution",
    "descent_set",
    "raw_descents",
    "normalize_word",
    "partition",
    "partition_facets",
    "verify_partition",
    "increasing_extensions",
    "locate_face",
    "partition_flag_link",
    "flag_descents",
    "incidence",
    "determinant",
    "rank_mod_p",
]


# -- similarity tracking ----------------------------------------------------

_IDLE = ("idle",)


@dataclass
class SimilarityState:
    """Row order plus similarity bookkeeping after some insertions.

    ``sigma`` lists rows front to back.  Every set of at least two rows is
    tracked as a candidate class; it stays alive while its rows keep being
    filled in complete blocks (a run of s copies of one row, then s copies
    of each of the others, each row once).  ``block_state`` maps each alive
    class to its automaton state.
    """

    m: int
    sigma: list[int] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    block_state: dict[frozenset, tuple] = field(default_factory=dict)

    @classmethod
    def initial(cls, m: int) -> "SimilarityState":
        rows = range(1, m + 1)
        colls = [frozenset(c) for k in range(2, m + 1) for c in itertools.combinations(rows, k)]
        return cls(m, list(rows), [0] * (m + 1), {c: _IDLE for c in colls})

    def copy(self) -> "SimilarityState":
        return SimilarityState(self.m, list(self.sigma), list(self.counts), dict(self.block_state))

    @property
    def classes(self) -> list[tuple[int, ...]]:
        """Current similarity classes: rows joined by some alive collection."""
        parent = list(range(self.m + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for c in self.block_state:
            rows = sorted(c)
            for y in rows[1:]:
                parent[find(y)] = find(rows[0])
        groups: dict[int, list[int]] = {}
        for r in range(1, self.m + 1):
            groups.setdefault(find(r), []).append(r)
        return sorted(tuple(g) for g in groups.values())

    def mates(self, x: int) -> set[int]:
        """Rows similar to x with the same number of insertions so far."""
        out = set()
        for c in self.block_state:
            if x in c:
                out.update(y for y in c if y != x and self.counts[y] == self.counts[x])
        return out

    def insert(self, x: int) -> None:
        mates = self.mates(x)
        if mates:
            front = min(self.sigma.index(y) for y in mates)
            if self.sigma.index(x) > front:
                self.sigma.remove(x)
                self.sigma.insert(front, x)
        dead = []
        for c, s in self.block_state.items():
            new = _advance(c, s, x)
            if new is None:
                dead.append(c)
            else:
                self.block_state[c] = new
        for c in dead:
            del self.block_state[c]
        self.counts[x] += 1


def _advance(c: frozenset, s: tuple, x: int):
    """Next block state of collection c after inserting x, or None if it dies."""
    if x not in c:
        return s if s[0] == "idle" else None
    if s[0] == "idle":
        return ("first", x, 1, frozenset([x]))
    if s[0] == "first":
        _, cur, run, used = s
        if x == cur:
            return ("first", cur, run + 1, used)
        if x in used:
            return None
        used = used | {x}
        if run == 1 and used == c:
            return _IDLE
        return ("seg", run, x, 1, used)
    _, width, cur, prog, used = s
    if prog < width:
        if x != cur:
            return None
        prog += 1
        if prog == width and used == c:
            return _IDLE
        return ("seg", width, cur, prog, used)
    if x in used:
        return None
    used = used | {x}
    if width == 1 and used == c:
        return _IDLE
    return ("seg", width, x, 1, used)


@dataclass
class LabelSequence:
    """Insertion data of a facet word, indexed by rank 1..n.

    ``sigmas[r]`` is the row order (front to back) after r insertions and
    ``rhos[r]`` is sigma_final^-1 composed with sigma_r, in one-line form.
    """

    word: Word
    rows: tuple[int, ...]
    counts: tuple[int, ...]
    sigmas: list[tuple[int, ...]]
    rhos: list[tuple[int, ...]]
    classes: list[list[tuple[int, ...]]]

    @property
    def sigma_final(self) -> tuple[int, ...]:
        return self.sigmas[-1]

    @property
    def labels(self) -> list[tuple[int, int]]:
        return list(zip(self.counts, self.rows))


def _inverse(perm: Sequence[int]) -> dict[int, int]:
    return {v: k + 1 for k, v in enumerate(perm)}


def sigma_evolution(word: Sequence[int], m: int | None = None) -> LabelSequence:
    word = tuple(word)
    if m is None:
        m = max(word) if word else 1
    if any(x < 1 or x > m for x in word):
        raise ValueError(f"letters of {word} must lie in 1..{m}")
    st = SimilarityState.initial(m)
    sigmas = [tuple(st.sigma)]
    classes = [st.classes]
    counts = []
    for x in word:
        st.insert(x)
        counts.append(st.counts[x])
        sigmas.append(tuple(st.sigma))
        classes.append(st.classes)
    final_inv = _inverse(sigmas[-1])
    rhos = [tuple(final_inv[s] for s in sig) for sig in sigmas]
    return LabelSequence(word, word, tuple(counts), sigmas, rhos, classes)


def _ascends(lab1, lab2, order) -> bool:
    (i1, j1), (i2, j2) = lab1, lab2
    if i1 != i2:
        return i1 < i2
    p1, p2 = order.index(j1), order.index(j2)
    if p1 == p2:
        raise AssertionError(f"equal labels {lab1} and {lab2}")
    return p1 < p2


def raw_descents(word: Sequence[int], m: int | None = None) -> tuple[int, ...]:
    """Descents of ``word`` as written, with sigma starting at the identity.

    The pair of insertions r, r+1 is compared in the row order sigma_{r-1},
    the order in force at the bottom of the lower covering relation.
    """
    seq = sigma_evolution(word, m)
    labs = seq.labels
    return tuple(
        r for r in range(1, len(labs))
        if not _ascends(labs[r - 1], labs[r], seq.sigmas[r - 1])
    )


def normalize_word(word: Sequence[int], m: int | None = None) -> Word:
    """Relabel rows so that the final row order becomes the identity."""
    seq = sigma_evolution(word, m)
    relabel = {row: k + 1 for k, row in enumerate(seq.sigma_final)}
    return tuple(relabel[x] for x in word)


def descent_set(word: Sequence[int], m: int | None = None) -> tuple[int, ...]:
    """Descent ranks of a facet, read in the presentation with sigma_final = id."""
    word = tuple(word)
    if m is None:
        m = max(word) if word else 1
    w = normalize_word(word, m)
    if sigma_evolution(w, m).sigma_final != tuple(range(1, m + 1)):
        raise AssertionError(f"normalized form of {word} does not end at the identity")
    return raw_descents(w, m)


# -- partitionings ---------------------------------------------------------

@dataclass
class Partitioning:
    """Facets with their descent sets and minimal faces.

    ``base`` is the face whose link is being partitioned (the empty face for
    the whole complex).  Descent ranks are absolute ranks outside the base
    support, and ``minimal_faces[j]`` is the restriction of facet j to
    base support plus descents.
    """

    params: Params
    base: FaceOrbit
    facets: list[Word]
    descents: list[tuple[int, ...]]
    minimal_faces: list[FaceOrbit]
    tuples: list[tuple[tuple[int, ...], ...]] | None = None

    @property
    def free_ranks(self) -> tuple[int, ...]:
        base = set(self.base.support)
        return tuple(r for r in self.params.ranks if r not in base)

    def minimal_face_in_link(self, j: int) -> FaceOrbit:
        """Minimal face j seen inside the link (base ranks dropped)."""
        return restrict(self.facets[j], self.descents[j], self.params)

    def interval(self, j: int):
        """All faces of the interval [G_j, F_j]."""
        w, d = self.facets[j], set(self.descents[j])
        rest = [r for r in self.free_ranks if r not in d]
        base = set(self.base.support) | d
        for k in range(len(rest) + 1):
            for extra in itertools.combinations(rest, k):
                yield restrict(w, base | set(extra), self.params)

    def records(self) -> list[dict]:
        from .chain_model import format_face, format_word

        return [
            {
                "word": format_word(w),
                "descents": list(d),
                "minimal_face": format_face(g),
            }
            for w, d, g in zip(self.facets, self.descents, self.minimal_faces)
        ]


def partition_facets(params: Params, allow_large: bool = False) -> Partitioning:
    if not params.symmetrize:
        raise ValueError("the descent partitioning is defined for the wreath quotient")
    facets = enumerate_facets(params, allow_large)
    descents = [descent_set(w, params.m) for w in facets]
    gs = [restrict(w, d, params) for w, d in zip(facets, descents)]
    base = FaceOrbit((), tuple(() for _ in range(params.m)))
    return Partitioning(params, base, facets, descents, gs)


def partition(complex_) -> Partitioning:
    """Descent-set partitioning of a built wreath quotient complex."""
    return partition_facets(complex_.params, allow_large=True)


@dataclass
class PartitionCheck:
    ok: bool
    uncovered: list[FaceOrbit]
    multiply_covered: list[tuple[FaceOrbit, list[int]]]
    stray: list[FaceOrbit]

    def certificate(self) -> dict:
        from .chain_model import format_face

        return {
            "ok": self.ok,
            "uncovered": [format_face(f) for f in self.uncovered[:10]],
            "multiply_covered": [
                {"face": format_face(f), "facets": js} for f, js in self.multiply_covered[:10]
            ],
            "stray": [format_face(f) for f in self.stray[:10]],
        }


def verify_partition(complex_, part: Partitioning) -> PartitionCheck:
    """Check that the intervals cover every cell of ``complex_`` exactly once."""
    owners: dict[FaceOrbit, list[int]] = {}
    for j in range(len(part.facets)):
        for f in part.interval(j):
            owners.setdefault(f, []).append(j)
    cells = {c for layer in complex_.cells for c in layer}
    uncovered = sorted(cells - owners.keys())
    stray = sorted(owners.keys() - cells)
    multi = sorted((f, js) for f, js in owners.items() if len(js) > 1)
    ok = not uncovered and not multi and not stray
    return PartitionCheck(ok, uncovered, multi, stray)


# -- locating the interval of a face ----------------------------------------

def _segments(rows: Sequence[Sequence[int]], support: Sequence[int], l: int) -> list[list[int]]:
    """Per-interval letter multiplicities of ordered row profiles."""
    m = len(rows)
    prev = [0] * m
    segs = []
    for t in range(len(support) + 1):
        cur = [rows[k][t] if t < len(support) else l for k in range(m)]
        segs.append([c - p for c, p in zip(cur, prev)])
        prev = cur
    return segs


def increasing_extensions(rows: Sequence[Sequence[int]], support: Sequence[int], params: Params) -> list[Word]:
    """Words extending the face with ordered row profiles ``rows`` that have
    no descent strictly inside any interval between support ranks.

    Descents are read as written, with sigma starting at the identity.
    """
    l, m = params.l, params.m
    segs = _segments(rows, support, l)
    cuts = set(support)
    out: list[Word] = []
    word: list[int] = []

    def rec(state: SimilarityState, si: int, rem: list[int]) -> None:
        while si < len(segs) and not any(rem):
            si += 1
            if si < len(segs):
                rem = list(segs[si])
        if si >= len(segs):
            out.append(tuple(word))
            return
        p = len(word)
        for x in range(1, m + 1):
            if not rem[x - 1]:
                continue
            if p >= 1 and p not in cuts:
                prev = word[-1]
                lab_prev = (state.counts[prev], prev)
                lab = (state.counts[x] + 1, x)
                if not _ascends(lab_prev, lab, prev_sigma[-1]):
                    continue
            nxt = state.copy()
            prev_sigma.append(tuple(state.sigma))
            nxt.insert(x)
            word.append(x)
            rem[x - 1] -= 1
            rec(nxt, si, list(rem))
            rem[x - 1] += 1
            word.pop()
            prev_sigma.pop()

    # prev_sigma[-1] is the row order before the latest insertion
    prev_sigma: list[tuple[int, ...]] = [tuple(range(1, m + 1))]
    rec(SimilarityState.initial(m), 0, list(segs[0]))
    return out


@dataclass
class LocateTrace:
    face: FaceOrbit
    extension: Word        # step 1: increasing extension with sigma from id
    relabeled: Word        # step 2: same chain, rows renamed by its final order
    facet: Word            # step 4: increasing extension of the renamed face
    descents: tuple[int, ...]
    minimal_face: FaceOrbit


def locate_face(face: FaceOrbit, params: Params) -> LocateTrace:
    """Find the interval [G_j, F_j] of the partitioning containing ``face``."""
    if not params.symmetrize:
        raise ValueError("locate_face needs the wreath quotient")
    rows = list(face.profiles)
    first = increasing_extensions(rows, face.support, params)
    if len(first) != 1:
        raise AssertionError(f"{len(first)} increasing extensions of {face}")
    fbar = first[0]
    final = sigma_evolution(fbar, params.m).sigma_final
    relabel = {row: k + 1 for k, row in enumerate(final)}
    relabeled = tuple(relabel[x] for x in fbar)
    new_rows = [None] * params.m
    for k in range(params.m):
        new_rows[relabel[k + 1] - 1] = rows[k]
    second = increasing_extensions(new_rows, face.support, params)
    if len(second) != 1:
        raise AssertionError(f"{len(second)} extensions of the relabelled {face}")
    fj = canonical_word(second[0])
    d = descent_set(fj, params.m)
    return LocateTrace(face, fbar, relabeled, fj, d, restrict(fj, d, params))


# -- the full-flag link ------------------------------------------------------

def flag_descents(perms: Sequence[Sequence[int]], m: int) -> tuple[int, ...]:
    """Ranks i*m + j where block i+1 inverts positions j, j+1 relative to block i.

    Block 0 is compared against the last block (wrap-around).
    """
    l = len(perms)
    out = []
    for i in range(l):
        prev = perms[i - 1] if i > 0 else perms[l - 1]
        pos = {v: k for k, v in enumerate(prev)}
        cur = perms[i]
        for j in range(1, m):
            if pos[cur[j - 1]] > pos[cur[j]]:
                out.append(i * m + j)
    return tuple(out)


def partition_flag_link(params: Params) -> Partitioning:
    """Partitioning of the link of the face with support {m, 2m, ..., (l-1)m}."""
    l, m = params.l, params.m
    ident = tuple(range(1, m + 1))
    entries = []
    for rest in itertools.product(itertools.permutations(ident), repeat=l - 1):
        tup = (ident,) + rest
        word = tuple(x for p in tup for x in p)
        entries.append((word, tup, flag_descents(tup, m)))
    entries.sort()
    base = flag_face(params)
    facets = [w for w, _, _ in entries]
    descents = [d for _, _, d in entries]
    gs = [restrict(w, set(base.support) | set(d), params) for w, d in zip(facets, descents)]
    return Partitioning(params, base, facets, descents, gs, [t for _, t, _ in entries])


# -- incidence matrices -----------------------------------------------------

def incidence(part: Partitioning) -> list[list[int]]:
    """Entry (i, j) is 1 when minimal face j lies in facet i."""
    return [
        [1 if restrict(w, g.support, part.params) == g else 0 for g in part.minimal_faces]
        for w in part.facets
    ]


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    a = [list(map(int, row)) for row in M]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
