"""Lexicographic order of facets, shellings, cone points and collapses.

Subfaces of a facet are encoded as bitmasks over the free ranks of the
complex (all ranks for the whole complex, the ranks outside the base support
for a link).  Since lower intervals are boolean, each mask is one subface.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .chain_model import (
    FaceOrbit,
    Params,
    Word,
    contains,
    enumerate_facets,
    group_elements,
    prefix_counts,
    restrict,
)


class BudgetExceeded(RuntimeError):
    """A search ran out of budget; the result is inconclusive."""


def lex_order(params: Params) -> list[Word]:
    return sorted(enumerate_facets(params))


def facet_words(complex_) -> list[Word]:
    """Words of the facets of ``complex_`` (a whole complex or a link), in lex order."""
    words = enumerate_facets(complex_.params, allow_large=True)
    if complex_.base.support:
        words = [w for w in words if contains(w, complex_.base, complex_.params)]
    return sorted(words)


def is_orbit_representative_l2(perm: Sequence[int]) -> bool:
    """For l = 2: odd values increase and 2i-1 precedes both 2i and 2i+1."""
    n = len(perm)
    pos = {v: k for k, v in enumerate(perm)}
    for v in range(1, n + 1, 2):
        for w in (v + 1, v + 2):
            if w <= n and pos[w] < pos[v]:
                return False
    return True


def lex_min_in_orbit(perm: Sequence[int], params: Params) -> tuple[int, ...]:
    """Lexicographically least relabelling of ``perm`` by the group (brute force)."""
    return min(tuple(g[v - 1] for v in perm) for g in group_elements(params))


class _SubfaceTable:
    """For each facet and each free-rank mask, the id of that subface."""

    def __init__(self, complex_, words: Sequence[Word]):
        self.params = complex_.params
        self.base = tuple(complex_.base.support)
        self.free = tuple(complex_.free_ranks)
        self.words = list(words)
        k = len(self.free)
        self.full = (1 << k) - 1
        ids: dict[FaceOrbit, int] = {}
        self.faces: list[FaceOrbit] = []
        self.table: list[list[int]] = []
        for w in self.words:
            row = []
            for mask in range(1 << k):
                f = restrict(w, self.ranks(mask), self.params)
                if f not in ids:
                    ids[f] = len(self.faces)
                    self.faces.append(f)
                row.append(ids[f])
            self.table.append(row)

    def ranks(self, mask: int) -> tuple[int, ...]:
        sel = [r for b, r in enumerate(self.free) if mask >> b & 1]
        return tuple(sorted(self.base + tuple(sel)))

    def rel_ranks(self, mask: int) -> tuple[int, ...]:
        return tuple(r for b, r in enumerate(self.free) if mask >> b & 1)

    def mask_of(self, rel: Sequence[int]) -> int:
        pos = {r: b for b, r in enumerate(self.free)}
        return sum(1 << pos[r] for r in rel)


def _new_masks(tab: _SubfaceTable, j: int, earlier: Sequence[int]) -> list[int]:
    seen = set()
    for i in earlier:
        seen.update(tab.table[i])
    return [mask for mask in range(tab.full + 1) if tab.table[j][mask] not in seen]


def _unique_minimum(masks: Sequence[int], full: int) -> int | None:
    """The mask G if ``masks`` is exactly the upper interval [G, full]."""
    if not masks:
        return None
    g = full
    for mk in masks:
        g &= mk
    if g not in set(masks):
        return None
    expected = 1 << bin(full & ~g).count("1")
    return g if len(masks) == expected else None


@dataclass
class ShellingStep:
    word: Word
    minimal_face: tuple[int, ...] | None
    new_minimal: list[tuple[int, ...]] = field(default_factory=list)


@dataclass
class ShellingReport:
    ok: bool
    order: list[Word]
    steps: list[ShellingStep]
    failure: int | None = None

    def minimal_faces(self) -> dict[Word, tuple[int, ...]]:
        return {s.word: s.minimal_face for s in self.steps if s.minimal_face is not None}


def verify_shelling(complex_, order: Sequence[Word] | None = None) -> ShellingReport:
    """Check that each facet meets the earlier ones in a pure codimension-one
    subcomplex, i.e. its new faces have a unique minimal element."""
    if order is None:
        order = facet_words(complex_)
    order = [tuple(w) for w in order]
    tab = _SubfaceTable(complex_, order)
    steps: list[ShellingStep] = []
    for j, w in enumerate(order):
        new = _new_masks(tab, j, range(j))
        g = _unique_minimum(new, tab.full)
        if g is None:
            new_set = set(new)
            mins = [mk for mk in new if not any((o & mk) == o and o != mk for o in new_set)]
            steps.append(ShellingStep(w, None, [tab.rel_ranks(mk) for mk in sorted(mins)]))
            return ShellingReport(False, order, steps, j)
        steps.append(ShellingStep(w, tab.rel_ranks(g), [tab.rel_ranks(g)]))
    return ShellingReport(True, order, steps)


def shelling_partitioning(complex_, report: ShellingReport):
    """The minimal new faces of a shelling, packaged as a Partitioning."""
    from .partitioning import Partitioning

    if not report.ok:
        raise ValueError("not a shelling")
    base = set(complex_.base.support)
    params = complex_.params
    gs = [restrict(s.word, base | set(s.minimal_face), params) for s in report.steps]
    return Partitioning(
        params, complex_.base, list(report.order), [s.minimal_face for s in report.steps], gs
    )


@dataclass
class ShellingSearch:
    found: bool
    order: list[Word] | None
    states: int
    exhaustive: bool


def search_shelling(complex_, budget: int = 1_000_000, max_facets: int = 12) -> ShellingSearch:
    """Depth-first search over facet orders, memoising dead prefix sets."""
    words = facet_words(complex_)
    if len(words) > max_facets:
        raise BudgetExceeded(f"{len(words)} facets exceeds max_facets={max_facets}")
    tab = _SubfaceTable(complex_, words)
    k = len(words)
    full_set = (1 << k) - 1
    # share[f][mask]: bitset of facets having the same subface as f at mask
    by_id: dict[int, int] = {}
    for f in range(k):
        for fid in tab.table[f]:
            by_id[fid] = by_id.get(fid, 0) | (1 << f)
    share = [[by_id[fid] & ~(1 << f) for fid in tab.table[f]] for f in range(k)]

    def fits(f: int, placed: int) -> bool:
        new = [mk for mk in range(tab.full + 1) if not share[f][mk] & placed]
        return _unique_minimum(new, tab.full) is not None

    dead: set[int] = set()
    states = 0
    path: list[int] = []

    def rec(placed: int) -> bool:
        nonlocal states
        if placed == full_set:
            return True
        if placed in dead:
            return False
        states += 1
        if states > budget:
            raise BudgetExceeded(f"explored {budget} states")
        for f in range(k):
            if placed >> f & 1:
                continue
            if placed and not fits(f, placed):
                continue
            path.append(f)
            if rec(placed | (1 << f)):
                return True
            path.pop()
        dead.add(placed)
        return False

    if rec(0):
        return ShellingSearch(True, [words[f] for f in path], states, True)
    return ShellingSearch(False, None, states, True)


# -- cone points -------------------------------------------------------------

def cone_point(word: Sequence[int]) -> int:
    """Rank just below the last insertion of the largest letter."""
    word = tuple(word)
    top = max(word)
    last = max(p for p, x in enumerate(word, 1) if x == top)
    return last - 1


def link_cone_rank(segment: Sequence[int], start_rank: int = 0) -> int:
    """Cone rank for a facet of a link omitting one interval.

    ``segment`` is the word read along the omitted interval, which begins at
    rank ``start_rank``.  Labels occurring only in the strictly decreasing
    run at the start of the segment are discarded; the answer is the rank
    just below the last occurrence of the largest remaining label.
    """
    segment = tuple(segment)
    if len(set(segment)) == len(segment):
        raise ValueError(f"no letter repeats in {segment}")
    run = 1
    while run < len(segment) and segment[run] < segment[run - 1]:
        run += 1
    later = set(segment[run:])
    keep = [x for x in set(segment) if x not in set(segment[:run]) or x in later]
    top = max(keep)
    last = max(p for p, x in enumerate(segment, 1) if x == top)
    return start_rank + last - 1


@dataclass
class ConeStep:
    word: Word
    cone_rank: int
    maximal_faces: list[tuple[int, ...]]
    ok: bool


@dataclass
class ConePointCertificate:
    ok: bool
    steps: list[ConeStep]

    def failures(self) -> list[ConeStep]:
        return [s for s in self.steps if not s.ok]


def verify_cone_points(complex_, cone: Callable[[Word], int], order: Sequence[Word] | None = None) -> ConePointCertificate:
    """Check that every maximal face of F_j meeting the earlier facets
    contains the rank ``cone(F_j)``, for each facet after the first."""
    if order is None:
        order = facet_words(complex_)
    order = [tuple(w) for w in order]
    tab = _SubfaceTable(complex_, order)
    steps = []
    seen: set[int] = set()
    for j, w in enumerate(order):
        if j:
            old = [mk for mk in range(tab.full + 1) if tab.table[j][mk] in seen]
            old_set = set(old)
            maximal = [
                mk for mk in old
                if not any((mk | (1 << b)) in old_set for b in range(len(tab.free)) if not mk >> b & 1)
            ]
            u = cone(w)
            if u in tab.free:
                bit = 1 << tab.free.index(u)
                ok = bool(maximal) and all(mk & bit for mk in maximal)
            else:
                ok = False
            steps.append(ConeStep(w, u, [tab.rel_ranks(mk) for mk in maximal], ok))
        seen.update(tab.table[j])
    return ConePointCertificate(all(s.ok for s in steps), steps)


def verify_collapsibility_lex(params: Params, complex_=None) -> ConePointCertificate:
    if not params.symmetrize:
        raise ValueError("needs the wreath quotient")
    if complex_ is None:
        from .complex import build

        complex_ = build(params)
    return verify_cone_points(complex_, cone_point)


def single_interval(face: FaceOrbit, params: Params) -> tuple[int, int] | None:
    """(a, b) if ``face`` omits exactly the ranks strictly between a and b."""
    pts = (0,) + tuple(face.support) + (params.n,)
    gaps = [(a, b) for a, b in zip(pts, pts[1:]) if b - a > 1]
    return gaps[0] if len(gaps) == 1 else None


def link_segment_words(complex_, face: FaceOrbit) -> list[tuple[Word, Word]]:
    """Facets of the link of ``face`` as (segment word, full word) pairs, sorted.

    Rows are named by the position of their profile in ``face`` and only the
    relabellings fixing the face are used to minimise the segment, so the
    segment letters need not appear in first-appearance order.
    """
    from .complex import link

    params = complex_.params
    gap = single_interval(face, params)
    if gap is None:
        raise ValueError("face must omit a single interval")
    a, b = gap
    profs = list(face.profiles)
    out = []
    for w in facet_words(link(complex_, face)):
        pc = prefix_counts(w, params.m)
        rows = [tuple(pc[s][r] for s in face.support) for r in range(params.m)]
        best = None
        for perm in itertools.permutations(range(1, params.m + 1)):
            if all(rows[r] == profs[perm[r] - 1] for r in range(params.m)):
                seg = tuple(perm[x - 1] for x in w[a:b])
                if best is None or seg < best:
                    best = seg
        out.append((best, w))
    out.sort()
    return out


def verify_link_collapsibility(complex_, face: FaceOrbit) -> ConePointCertificate:
    """Cone-point check on the link of a face omitting one interval (a, b)."""
    from .complex import link

    a, _ = single_interval(face, complex_.params) or (None, None)
    if a is None:
        raise ValueError("face must omit a single interval")
    pairs = link_segment_words(complex_, face)
    seg = {w: sw for sw, w in pairs}
    return verify_cone_points(
        link(complex_, face), lambda w: link_cone_rank(seg[w], a), [w for _, w in pairs]
    )


def has_repeated_letter(face: FaceOrbit, params: Params) -> bool:
    """Whether some row gains at least two elements across the omitted interval."""
    gap = single_interval(face, params)
    if gap is None:
        return False
    a, b = gap
    lo = [p[face.support.index(a)] if a in face.support else 0 for p in face.profiles]
    hi = [p[face.support.index(b)] if b in face.support else params.l for p in face.profiles]
    return any(h - x > 1 for h, x in zip(hi, lo))


# -- elementary collapses ----------------------------------------------------

@dataclass
class CollapseResult:
    ok: bool
    sequence: list[tuple[FaceOrbit, FaceOrbit]]
    states: int
    exhaustive: bool


def elementary_collapse_search(complex_, budget: int = 200_000) -> CollapseResult:
    """Look for free-face collapses down to a single vertex.

    Greedy first (always the lowest free pair); if that stalls, a memoised
    depth-first search over all collapse choices.  A failed exhaustive search
    means the complex is not collapsible; hitting the budget is inconclusive.
    """
    cells = [c for layer in complex_.cells[1:] for c in layer]
    idx = {c: i for i, c in enumerate(cells)}
    faces = [[idx[f] for f, _ in complex_.boundary(c) if f in idx] for c in cells]
    cof: list[list[int]] = [[] for _ in cells]
    for i, fs in enumerate(faces):
        for f in fs:
            cof[f].append(i)
    n_vertices = len(complex_.layer(0))

    def free_pairs(alive: frozenset[int]):
        for s in sorted(alive):
            up = [t for t in cof[s] if t in alive]
            if len(up) == 1 and not any(u in alive for u in cof[up[0]]):
                yield s, up[0]

    def done(alive) -> bool:
        return len(alive) == 1

    start = frozenset(range(len(cells)))
    if n_vertices == 0:
        return CollapseResult(False, [], 0, True)

    alive = set(start)
    seq = []
    while True:
        pair = next(free_pairs(frozenset(alive)), None)
        if pair is None:
            break
        alive.difference_update(pair)
        seq.append(pair)
    if done(alive):
        return CollapseResult(True, [(cells[s], cells[t]) for s, t in seq], len(seq), False)

    dead: set[frozenset[int]] = set()
    states = 0
    path: list[tuple[int, int]] = []

    def rec(alive: frozenset[int]) -> bool:
        nonlocal states
        if done(alive):
            return True
        if alive in dead:
            return False
        states += 1
        if states > budget:
            raise BudgetExceeded(f"explored {budget} states")
        for s, t in free_pairs(alive):
            path.append((s, t))
            if rec(alive - {s, t}):
                return True
            path.pop()
        dead.add(alive)
        return False

    try:
        ok = rec(start)
    except BudgetExceeded:
        return CollapseResult(False, [], states, False)
    return CollapseResult(ok, [(cells[s], cells[t]) for s, t in path] if ok else [], states, True)


__all__ = [
    "BudgetExceeded",
    "lex_order",
    "facet_words",
    "is_orbit_representative_l2",
    "lex_min_in_orbit",
    "ShellingReport",
    "verify_shelling",
    "shelling_partitioning",
    "search_shelling",
    "cone_point",
    "link_cone_rank",
    "ConePointCertificate",
    "verify_cone_points",
    "verify_collapsibility_lex",
    "verify_link_collapsibility",
    "link_segment_words",
    "has_repeated_letter",
    "single_interval",
    "elementary_collapse_search",
]
