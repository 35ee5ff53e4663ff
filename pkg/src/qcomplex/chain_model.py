"""Chains of the Boolean algebra B_lm modulo wreath and Young products.

The ground set {1..n}, n = l*m, is split into m rows of length l: row r holds
the values (r-1)*l+1 .. r*l.  A chain S_1 < ... < S_k is determined up to the
Young product S_l x ... x S_l by the per-row intersection sizes
|S_t & row r|, and up to the wreath product by the multiset of those
per-row sequences.  That is the canonical form used throughout.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

DEFAULT_MAX_N = 16

Word = tuple[int, ...]
Profile = tuple[int, ...]


class ResourceGuardError(RuntimeError):
    """Raised when an instance is larger than the configured bound."""


@dataclass(frozen=True)
class Params:
    l: int
    m: int
    symmetrize: bool = True

    def __post_init__(self):
        if not isinstance(self.l, int) or not isinstance(self.m, int):
            raise TypeError("l and m must be integers")
        if self.l < 1 or self.m < 1:
            raise ValueError(f"need l >= 1 and m >= 1, got l={self.l}, m={self.m}")

    @property
    def n(self) -> int:
        return self.l * self.m

    @property
    def ranks(self) -> tuple[int, ...]:
        """Ranks that carry vertices: 1..n-1."""
        return tuple(range(1, self.n))

    def row_of(self, value: int) -> int:
        return (value - 1) // self.l + 1


@dataclass(frozen=True, order=True)
class FaceOrbit:
    """An orbit of chains, stored as rank support plus per-row count profiles.

    ``profiles[r][t]`` is the number of elements of row r in the chain element
    of rank ``support[t]``.  For the wreath quotient the profiles are sorted
    in decreasing lexicographic order; for the Young quotient they are kept
    in row order.
    """

    support: tuple[int, ...]
    profiles: tuple[Profile, ...]

    @property
    def dim(self) -> int:
        return len(self.support) - 1

    def __str__(self):
        return format_face(self)


def check_size(params: Params, allow_large: bool = False) -> None:
    limit = int(os.environ.get("QC_MAX_N", DEFAULT_MAX_N))
    if params.n > limit and not allow_large:
        raise ResourceGuardError(
            f"l*m = {params.n} exceeds the bound {limit}; set QC_MAX_N to override"
        )


def _normalize(profiles: Iterable[Profile], symmetrize: bool) -> tuple[Profile, ...]:
    profiles = tuple(tuple(p) for p in profiles)
    if symmetrize:
        return tuple(sorted(profiles, reverse=True))
    return profiles


def make_face(support: Sequence[int], profiles: Iterable[Sequence[int]], params: Params) -> FaceOrbit:
    """Build a FaceOrbit, validating it against ``params``."""
    support = tuple(support)
    profiles = _normalize((tuple(p) for p in profiles), params.symmetrize)
    if len(profiles) != params.m:
        raise ValueError(f"expected {params.m} row profiles, got {len(profiles)}")
    if any(b <= a for a, b in zip(support, support[1:])):
        raise ValueError(f"support must be strictly increasing: {support}")
    if support and (support[0] < 1 or support[-1] > params.n - 1):
        raise ValueError(f"support {support} outside 1..{params.n - 1}")
    for p in profiles:
        if len(p) != len(support):
            raise ValueError("profile length does not match support")
        if any(b < a for a, b in zip(p, p[1:])) or any(c < 0 or c > params.l for c in p):
            raise ValueError(f"invalid row profile {p}")
    for t, r in enumerate(support):
        if sum(p[t] for p in profiles) != r:
            raise ValueError(f"profiles do not sum to rank {r} at level {t}")
    return FaceOrbit(support, profiles)


def empty_face(params: Params) -> FaceOrbit:
    return FaceOrbit((), tuple(() for _ in range(params.m)))


def canonicalize(raw_chain: Sequence[Iterable[int]], params: Params) -> FaceOrbit:
    """Canonical FaceOrbit of a chain of subsets of {1..n}.

    Empty sets and the full set are dropped, since they are the bottom and
    top of B_n and never vertices of the order complex.
    """
    n = params.n
    sets = [frozenset(s) for s in raw_chain]
    for s in sets:
        if any(not isinstance(v, int) or v < 1 or v > n for v in s):
            raise ValueError(f"element outside 1..{n} in {sorted(s)}")
    for a, b in zip(sets, sets[1:]):
        if not a < b:
            raise ValueError("not a strictly increasing chain")
    sets = [s for s in sets if 0 < len(s) < n]
    support = tuple(len(s) for s in sets)
    profiles = []
    for r in range(1, params.m + 1):
        row = set(range((r - 1) * params.l + 1, r * params.l + 1))
        profiles.append(tuple(len(s & row) for s in sets))
    return FaceOrbit(support, _normalize(profiles, params.symmetrize))


def canonical_word(word: Sequence[int]) -> Word:
    """Relabel letters so that first appearances occur in order 1, 2, ..."""
    relabel: dict[int, int] = {}
    out = []
    for x in word:
        if x not in relabel:
            relabel[x] = len(relabel) + 1
        out.append(relabel[x])
    return tuple(out)


def check_word(word: Sequence[int], params: Params) -> Word:
    word = tuple(word)
    if len(word) != params.n:
        raise ValueError(f"word length {len(word)} != {params.n}")
    for r in range(1, params.m + 1):
        if word.count(r) != params.l:
            raise ValueError(f"letter {r} must occur exactly {params.l} times in {word}")
    if params.symmetrize and canonical_word(word) != word:
        raise ValueError(f"word {word} is not in first-appearance form")
    return word


def word_from_permutation(perm: Sequence[int], params: Params) -> Word:
    """Row word of a saturated chain labelled by the permutation ``perm``."""
    perm = tuple(perm)
    if sorted(perm) != list(range(1, params.n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{params.n}")
    word = tuple(params.row_of(v) for v in perm)
    return canonical_word(word) if params.symmetrize else word


def permutation_from_word(word: Sequence[int], params: Params) -> tuple[int, ...]:
    """Lexicographically least permutation whose row word is ``word``."""
    word = check_word(word, params)
    used = [0] * (params.m + 1)
    perm = []
    for r in word:
        used[r] += 1
        perm.append((r - 1) * params.l + used[r])
    return tuple(perm)


def enumerate_facets(params: Params, allow_large: bool = False) -> list[Word]:
    """All facet orbits as words, in lexicographic order."""
    check_size(params, allow_large)
    l, m, n = params.l, params.m, params.n
    out: list[Word] = []
    counts = [0] * (m + 1)
    word: list[int] = []

    def rec(used: int) -> None:
        if len(word) == n:
            out.append(tuple(word))
            return
        top = min(used + 1, m) if params.symmetrize else m
        for r in range(1, top + 1):
            if counts[r] < l:
                counts[r] += 1
                word.append(r)
                rec(max(used, r))
                word.pop()
                counts[r] -= 1

    rec(0)
    return out


def _row_profiles(width: int, support: Sequence[int], l: int) -> list[Profile]:
    """Weakly increasing count sequences compatible with the support gaps."""
    gaps = [b - a for a, b in zip((0,) + tuple(support), support)]
    out: list[Profile] = []

    def rec(prefix: list[int], t: int) -> None:
        if t == width:
            out.append(tuple(prefix))
            return
        last = prefix[-1] if prefix else 0
        for c in range(last, min(l, last + gaps[t]) + 1):
            prefix.append(c)
            rec(prefix, t + 1)
            prefix.pop()

    rec([], 0)
    return out


def faces_with_support(params: Params, support: Sequence[int]) -> list[FaceOrbit]:
    support = tuple(support)
    k = len(support)
    l, m, n = params.l, params.m, params.n
    cands = _row_profiles(k, support, l)
    if params.symmetrize:
        cands.sort(reverse=True)
    out: list[FaceOrbit] = []
    remaining = list(support)
    chosen: list[Profile] = []

    def tail_ok(rows_left: int) -> bool:
        return all(0 <= r <= rows_left * l for r in remaining)

    def rec(start: int, rows_left: int) -> None:
        if rows_left == 0:
            if all(r == 0 for r in remaining):
                out.append(FaceOrbit(support, tuple(chosen)))
            return
        lo = start if params.symmetrize else 0
        for idx in range(lo, len(cands)):
            p = cands[idx]
            if any(p[t] > remaining[t] for t in range(k)):
                continue
            for t in range(k):
                remaining[t] -= p[t]
            chosen.append(p)
            if tail_ok(rows_left - 1):
                rec(idx, rows_left - 1)
            chosen.pop()
            for t in range(k):
                remaining[t] += p[t]

    rec(0, m)
    return out


def enumerate_faces(params: Params, allow_large: bool = False) -> list[list[FaceOrbit]]:
    """All face orbits, graded by number of vertices.

    ``result[k]`` lists the faces of dimension k-1, ordered by support and
    then by profiles; ``result[0]`` is the empty face alone.
    """
    check_size(params, allow_large)
    ranks = params.ranks
    graded: list[list[FaceOrbit]] = []
    for k in range(len(ranks) + 1):
        layer: list[FaceOrbit] = []
        for support in itertools.combinations(ranks, k):
            layer.extend(sorted(faces_with_support(params, support)))
        graded.append(layer)
    return graded


def prefix_counts(word: Sequence[int], m: int) -> list[tuple[int, ...]]:
    """``result[p][r-1]`` is the number of letters r among the first p letters."""
    counts = [0] * m
    out = [tuple(counts)]
    for x in word:
        counts[x - 1] += 1
        out.append(tuple(counts))
    return out


def restrict(facet: Sequence[int], ranks: Iterable[int], params: Params) -> FaceOrbit:
    """Face of ``facet`` obtained by keeping the chain elements at ``ranks``."""
    ranks = tuple(sorted(set(ranks)))
    if ranks and (ranks[0] < 1 or ranks[-1] > params.n - 1):
        raise ValueError(f"ranks {ranks} outside 1..{params.n - 1}")
    pc = prefix_counts(facet, params.m)
    profiles = [tuple(pc[r][row] for r in ranks) for row in range(params.m)]
    return FaceOrbit(ranks, _normalize(profiles, params.symmetrize))


def face_restrict(face: FaceOrbit, ranks: Iterable[int], symmetrize: bool) -> FaceOrbit:
    """Subface of ``face`` supported on ``ranks`` (a subset of its support)."""
    ranks = tuple(sorted(set(ranks)))
    pos = {r: t for t, r in enumerate(face.support)}
    try:
        idx = [pos[r] for r in ranks]
    except KeyError as exc:
        raise ValueError(f"rank {exc.args[0]} not in support {face.support}") from None
    profiles = [tuple(p[t] for t in idx) for p in face.profiles]
    return FaceOrbit(ranks, _normalize(profiles, symmetrize))


def contains(facet: Sequence[int], face: FaceOrbit, params: Params) -> bool:
    return restrict(facet, face.support, params) == face


def facet_face(word: Sequence[int], params: Params) -> FaceOrbit:
    return restrict(word, params.ranks, params)


def group_elements(params: Params) -> Iterator[tuple[int, ...]]:
    """Elements of the acting group as permutations of 1..n (value -> image).

    Only meant for small instances; used by brute-force oracles.
    """
    l, m = params.l, params.m
    inner = list(itertools.permutations(range(l)))
    outer = list(itertools.permutations(range(m))) if params.symmetrize else [tuple(range(m))]
    for rows in outer:
        for choice in itertools.product(inner, repeat=m):
            img = [0] * (params.n + 1)
            for r in range(m):
                for s in range(l):
                    img[r * l + s + 1] = rows[r] * l + choice[r][s] + 1
            yield tuple(img[1:])


def format_face(face: FaceOrbit) -> str:
    """Text form: rows separated by ';', counts by ','; empty face is ''."""
    if not face.support:
        return ""
    return ";".join(",".join(str(c) for c in p) for p in face.profiles)


def parse_face(text: str, params: Params) -> FaceOrbit:
    text = text.strip()
    if not text:
        return empty_face(params)
    rows = [r.strip() for r in text.split(";")]
    try:
        profiles = [tuple(int(c) for c in r.split(",")) for r in rows]
    except ValueError:
        raise ValueError(f"cannot parse face {text!r}") from None
    if len({len(p) for p in profiles}) != 1:
        raise ValueError(f"rows of unequal length in {text!r}")
    support = tuple(sum(col) for col in zip(*profiles))
    return make_face(support, profiles, params)


def format_word(word: Sequence[int]) -> str:
    if all(x < 10 for x in word):
        return "".join(str(x) for x in word)
    return ".".join(str(x) for x in word)


def parse_word(text: str) -> Word:
    text = text.strip()
    if "." in text:
        return tuple(int(x) for x in text.split("."))
    if not text.isdigit():
        raise ValueError(f"cannot parse word {text!r}")
    return tuple(int(x) for x in text)


def flag_face(params: Params) -> FaceOrbit:
    """The face with support {m, 2m, ..., (l-1)m} and profiles (1, ..., l-1)."""
    support = tuple(range(params.m, params.n, params.m))
    prof = tuple(range(1, params.l))
    return FaceOrbit(support, tuple(prof for _ in range(params.m)))
