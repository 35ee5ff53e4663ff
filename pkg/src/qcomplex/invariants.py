"""Molien and Hilbert series, the transfer map, and basic-set checks."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .chain_model import Params, check_size, group_elements, permutation_from_word
from .homology import check_prime


# -- truncated power series ---------------------------------------------------

@dataclass(frozen=True)
class TruncatedSeries:
    """Power series c_0 + c_1 t + ... + c_D t^D."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, D: int) -> "TruncatedSeries":
        return cls((1,) + (0,) * D)

    @classmethod
    def geometric(cls, k: int, D: int) -> "TruncatedSeries":
        """1 / (1 - t^k)."""
        return cls(tuple(1 if d % k == 0 else 0 for d in range(D + 1)))

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        D = min(self.degree, other.degree)
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coeffs[: D + 1], other.coeffs[: D + 1])))

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(tuple(c * other for c in self.coeffs))
        D = min(self.degree, other.degree)
        out = [0] * (D + 1)
        for i, a in enumerate(self.coeffs[: D + 1]):
            if a:
                for j in range(D + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return TruncatedSeries(tuple(out))

    __rmul__ = __mul__

    def substitute_power(self, k: int, D: int) -> "TruncatedSeries":
        """f(t^k), truncated at D (needs self known to degree D // k)."""
        out = [0] * (D + 1)
        for i, c in enumerate(self.coeffs):
            if i * k > D:
                break
            out[i * k] = c
        return TruncatedSeries(tuple(out))

    def as_integers(self) -> "TruncatedSeries":
        out = []
        for c in self.coeffs:
            c = Fraction(c)
            if c.denominator != 1:
                raise ArithmeticError(f"non-integer coefficient {c}")
            out.append(int(c))
        return TruncatedSeries(tuple(out))

    def first_difference(self, other: "TruncatedSeries") -> int | None:
        for d, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return d
        return None

    def to_list(self) -> list[int]:
        return [int(c) for c in self.coeffs]


def _partitions(n: int, max_part: int | None = None):
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _z(mu: Sequence[int]) -> int:
    """Size of the centraliser of a permutation of cycle type mu."""
    out = 1
    for k, mult in Counter(mu).items():
        out *= k ** mult * factorial(mult)
    return out


def _cycle_index_sum(m: int, term) -> Fraction | TruncatedSeries:
    """Sum over cycle types mu of S_m of prod term(part) / z_mu."""
    total = None
    for mu in _partitions(m):
        prod = None
        for k in mu:
            t = term(k)
            prod = t if prod is None else prod * t
        prod = prod * Fraction(1, _z(mu))
        total = prod if total is None else total + prod
    return total


def symmetric_molien(l: int, D: int) -> TruncatedSeries:
    """Molien series of S_l on l points: prod_{i<=l} 1/(1 - t^i)."""
    s = TruncatedSeries.one(D)
    for i in range(1, l + 1):
        s = s * TruncatedSeries.geometric(i, D)
    return s


def molien(params: Params, D: int) -> TruncatedSeries:
    """Molien series via the cycle index of the wreath (or Young) product."""
    base = symmetric_molien(params.l, D)
    if not params.symmetrize:
        s = TruncatedSeries.one(D)
        for _ in range(params.m):
            s = s * base
        return s
    s = _cycle_index_sum(params.m, lambda k: base.substitute_power(k, D))
    return s.as_integers()


def cycle_type(perm: Sequence[int]) -> tuple[int, ...]:
    """Cycle lengths of a permutation given as value -> image (1-based)."""
    n = len(perm)
    seen = [False] * (n + 1)
    out = []
    for v in range(1, n + 1):
        if not seen[v]:
            k = 0
            while not seen[v]:
                seen[v] = True
                v = perm[v - 1]
                k += 1
            out.append(k)
    return tuple(sorted(out, reverse=True))


def molien_by_elements(params: Params, D: int, max_order: int = 10 ** 4) -> TruncatedSeries:
    """Molien series by averaging over explicit group elements."""
    order = factorial(params.l) ** params.m * (factorial(params.m) if params.symmetrize else 1)
    if order > max_order:
        raise ValueError(f"group of order {order} too large for element enumeration")
    types = Counter(cycle_type(g) for g in group_elements(params))
    total = TruncatedSeries((Fraction(0),) * (D + 1))
    for mu, count in types.items():
        term = TruncatedSeries.one(D)
        for k in mu:
            term = term * TruncatedSeries.geometric(k, D)
        total = total + term * Fraction(count, order)
    return total.as_integers()


# -- monomial orbits ---------------------------------------------------------

def canonical_monomial(expvec: Sequence[int], params: Params) -> tuple[int, ...]:
    """Representative of the orbit of a monomial under the acting group."""
    l = params.l
    rows = [tuple(sorted(expvec[r * l:(r + 1) * l], reverse=True)) for r in range(params.m)]
    if params.symmetrize:
        rows.sort(reverse=True)
    return tuple(x for row in rows for x in row)


def monomials(n: int, d: int):
    """Exponent vectors of degree d in n variables."""
    if n == 0:
        if d == 0:
            yield ()
        return
    for a in range(d, -1, -1):
        for rest in monomials(n - 1, d - a):
            yield (a,) + rest


def monomial_orbits(params: Params, d: int) -> list[tuple[int, ...]]:
    return sorted({canonical_monomial(e, params) for e in monomials(params.n, d)})


def orbit_count_series(params: Params, D: int) -> TruncatedSeries:
    return TruncatedSeries(tuple(len(monomial_orbits(params, d)) for d in range(D + 1)))


# -- Hilbert series of a partitioning ---------------------------------------

def hilbert_from_partitioning(partitioning, n: int, D: int) -> TruncatedSeries:
    """(sum_j t^{sum of ranks of G_j}) / prod_{i=1..n} (1 - t^i)."""
    if hasattr(partitioning, "minimal_faces"):
        supports = [g.support for g in partitioning.minimal_faces]
    else:
        supports = [tuple(s) for s in partitioning]
    num = [0] * (D + 1)
    for s in supports:
        deg = sum(s)
        if deg <= D:
            num[deg] += 1
    series = TruncatedSeries(tuple(num))
    for i in range(1, n + 1):
        series = series * TruncatedSeries.geometric(i, D)
    return series


def flag_h_series(flag_h: dict, D: int) -> TruncatedSeries:
    num = [0] * (D + 1)
    for s, h in flag_h.items():
        if sum(s) <= D:
            num[sum(s)] += h
    return TruncatedSeries(tuple(num))


@dataclass
class SeriesComparison:
    left: TruncatedSeries
    right: TruncatedSeries

    @property
    def first_diff(self) -> int | None:
        return self.left.first_difference(self.right)

    @property
    def equal(self) -> bool:
        return self.first_diff is None

    def report(self) -> dict:
        return {
            "hilbert": self.left.to_list(),
            "molien": self.right.to_list(),
            "compare": "equal" if self.equal else {"first_diff": self.first_diff},
        }


def compare_series(partitioning, params: Params, D: int) -> SeriesComparison:
    return SeriesComparison(hilbert_from_partitioning(partitioning, params.n, D), molien(params, D))


# -- the transfer map ----------------------------------------------------------

@dataclass(frozen=True)
class Multichain:
    """A monomial prod y_S^e over pairwise comparable subsets S of {1..n}."""

    n: int
    items: tuple[tuple[frozenset, int], ...]

    def __init__(self, n: int, items: Iterable[tuple[Iterable[int], int]]):
        merged: dict[frozenset, int] = {}
        for s, e in items:
            s = frozenset(s)
            if e < 0:
                raise ValueError("negative exponent")
            if any(v < 1 or v > n for v in s):
                raise ValueError(f"subset {sorted(s)} not inside 1..{n}")
            if e:
                merged[s] = merged.get(s, 0) + e
        sets = sorted(merged, key=lambda s: (len(s), sorted(s)))
        for a, b in zip(sets, sets[1:]):
            if not a <= b:
                raise ValueError(f"{sorted(a)} and {sorted(b)} are incomparable")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "items", tuple((s, merged[s]) for s in sets))

    @property
    def degree(self) -> int:
        return sum(len(s) * e for s, e in self.items)


def transfer(mc: Multichain) -> tuple[int, ...]:
    """Exponent vector of prod over (S, e) of (prod_{i in S} x_i)^e."""
    out = [0] * mc.n
    for s, e in mc.items:
        for i in s:
            out[i - 1] += e
    return tuple(out)


def theta(i: int, n: int) -> list[Multichain]:
    """Terms of theta_i: y_S over all i-subsets S of {1..n}."""
    return [Multichain(n, [(s, 1)]) for s in itertools.combinations(range(1, n + 1), i)]


def transfer_sum(terms: Iterable[Multichain]) -> dict[tuple[int, ...], int]:
    out: dict[tuple[int, ...], int] = {}
    for t in terms:
        e = transfer(t)
        out[e] = out.get(e, 0) + 1
    return out


def elementary(i: int, n: int) -> dict[tuple[int, ...], int]:
    out = {}
    for s in itertools.combinations(range(n), i):
        e = [0] * n
        for k in s:
            e[k] = 1
        out[tuple(e)] = 1
    return out


def face_multichain(word: Sequence[int], ranks: Iterable[int], params: Params) -> Multichain:
    """Multichain of the face of a facet at ``ranks``, via the least permutation."""
    perm = permutation_from_word(word, params)
    return Multichain(params.n, [(perm[:r], 1) for r in sorted(set(ranks))])


# -- basic sets in low degree -------------------------------------------------

def _poly_mul(a: dict, b: dict, D: int, p: int | None) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if da + sum(eb) > D:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            v = out.get(e, 0) + ca * cb
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def _rank(rows: list[list], p: int | None) -> int:
    rows = [list(r) for r in rows]
    if p:
        rows = [[x % p for x in r] for r in rows]
    else:
        rows = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        inv = pow(int(pr[c]), -1, p) if p else 1 / pr[c]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [(x - f * y) % p if p else x - f * y for x, y in zip(rows[i], pr)]
        rank += 1
    return rank


@dataclass
class DegreeReport:
    degree: int
    invariant_dim: int
    products: int
    rank: int

    @property
    def spans(self) -> bool:
        return self.rank == self.invariant_dim

    @property
    def corank(self) -> int:
        return self.invariant_dim - self.rank


def verify_basic_set_low_degree(partitioning, params: Params, D: int, p: int | None = None) -> list[DegreeReport]:
    """For each degree d <= D, check whether the transferred minimal-face
    orbit sums times products of elementary symmetric functions span the
    degree-d invariants (over Q, or over Z/p when ``p`` is given)."""
    check_size(params)
    if params.n > 8 or D > 10:
        raise ValueError("basic-set check is limited to n <= 8 and D <= 10")
    if p is not None:
        check_prime(p)
    n = params.n
    etas = []
    for w, d in zip(partitioning.facets, partitioning.descents):
        mono = transfer(face_multichain(w, set(partitioning.base.support) | set(d), params))
        if sum(mono) <= D:
            orbit = {tuple(permute_exponents(mono, g)) for g in group_elements(params)}
            etas.append({e: 1 for e in orbit})
    # products of elementary symmetric functions, keyed by degree
    e_polys = [None] + [elementary(i, n) for i in range(1, n + 1)]
    e_products: dict[int, list[dict]] = {0: [{(0,) * n: 1}]}
    for a in _partitions_upto(D, n):
        if not a:
            continue
        poly = {(0,) * n: 1}
        for i in a:
            poly = _poly_mul(poly, e_polys[i], D, p)
        e_products.setdefault(sum(a), []).append(poly)
    reports = []
    for d in range(D + 1):
        reps = monomial_orbits(params, d)
        rows = []
        for eta in etas:
            rest = d - sum(next(iter(eta)))
            for ep in e_products.get(rest, []):
                prod = _poly_mul(eta, ep, D, p)
                rows.append([prod.get(r, 0) for r in reps])
        rank = _rank(rows, p) if rows else 0
        reports.append(DegreeReport(d, len(reps), len(rows), rank))
    return reports


def permute_exponents(expvec: Sequence[int], g: Sequence[int]) -> list[int]:
    """Exponent vector of the monomial after moving variable v to g(v)."""
    out = [0] * len(expvec)
    for v, e in enumerate(expvec, 1):
        out[g[v - 1] - 1] = e
    return out


def _partitions_upto(D: int, max_part: int):
    for total in range(D + 1):
        yield from _partitions(total, max_part)
