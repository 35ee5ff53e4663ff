"""Cellular homology of boolean cell complexes via Smith normal form."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence


def check_prime(p: int) -> int:
    if not isinstance(p, int) or p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not a prime")
    return p


@dataclass
class BoundaryMatrix:
    """Sparse integer matrix; ``entries[(i, j)]`` is row i, column j."""

    n_rows: int
    n_cols: int
    entries: dict[tuple[int, int], int] = field(default_factory=dict)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "BoundaryMatrix":
        n_cols = len(rows[0]) if rows else 0
        ent = {(i, j): int(v) for i, r in enumerate(rows) for j, v in enumerate(r) if v}
        return cls(len(rows), n_cols, ent)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.n_cols for _ in range(self.n_rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def triplets(self) -> list[tuple[int, int, int]]:
        return sorted((i, j, v) for (i, j), v in self.entries.items())

    def matmul(self, other: "BoundaryMatrix") -> "BoundaryMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError("shape mismatch")
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        out: dict[tuple[int, int], int] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + a * b
        return BoundaryMatrix(self.n_rows, other.n_cols, {k: v for k, v in out.items() if v})

    def is_zero(self) -> bool:
        return not any(self.entries.values())


def _unit_phase(mat: BoundaryMatrix) -> tuple[int, dict[int, dict[int, int]]]:
    """Eliminate unit pivots, lowest (row, col) first.

    Returns the number of unit pivots and the remaining rows.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    heap = []
    for (i, j), v in mat.entries.items():
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, set()).add(i)
            if abs(v) == 1:
                heap.append((i, j))
    heapq.heapify(heap)
    units = 0
    while heap:
        i, j = heapq.heappop(heap)
        u = rows.get(i, {}).get(j)
        if u is None or abs(u) != 1:
            continue
        prow = rows.pop(i)
        for c in prow:
            cols[c].discard(i)
        for k in sorted(cols.pop(j)):
            rk = rows[k]
            f = rk[j] * u
            for c, v in prow.items():
                if c == j:
                    continue
                nv = rk.get(c, 0) - f * v
                if nv:
                    if c not in rk:
                        cols[c].add(k)
                    rk[c] = nv
                    if abs(nv) == 1:
                        heapq.heappush(heap, (k, c))
                elif c in rk:
                    del rk[c]
                    cols[c].discard(k)
            rk.pop(j, None)
            if not rk:
                del rows[k]
        units += 1
    return units, rows


def _dense_snf(a: list[list[int]]) -> list[int]:
    """Diagonal of a Smith form by least-absolute-value pivoting."""
    diag = []
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    top = 0
    while top < min(n_rows, n_cols):
        best = None
        for i in range(top, n_rows):
            for j in range(top, n_cols):
                v = a[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        a[top], a[i] = a[i], a[top]
        for row in a:
            row[top], row[j] = row[j], row[top]
        while True:
            p = a[top][top]
            dirty = False
            for i in range(top + 1, n_rows):
                if a[i][top]:
                    q = a[i][top] // p
                    for j in range(top, n_cols):
                        a[i][j] -= q * a[top][j]
                    if a[i][top]:
                        dirty = True
            for j in range(top + 1, n_cols):
                if a[top][j]:
                    q = a[top][j] // p
                    for i in range(top, n_rows):
                        a[i][j] -= q * a[i][top]
                    if a[top][j]:
                        dirty = True
            if not dirty:
                bad = next(
                    (i for i in range(top + 1, n_rows)
                     if any(a[i][j] % p for j in range(top + 1, n_cols))),
                    None,
                )
                if bad is None:
                    break
                for j in range(top, n_cols):
                    a[top][j] += a[bad][j]
                continue
            # move the smallest entry of the pivot row/column to the corner
            best = (abs(p), top, top)
            for i in range(top + 1, n_rows):
                if a[i][top] and abs(a[i][top]) < best[0]:
                    best = (abs(a[i][top]), i, top)
            for j in range(top + 1, n_cols):
                if a[top][j] and abs(a[top][j]) < best[0]:
                    best = (abs(a[top][j]), top, j)
            _, i, j = best
            a[top], a[i] = a[i], a[top]
            for row in a:
                row[top], row[j] = row[j], row[top]
        diag.append(abs(a[top][top]))
        top += 1
    return diag


def _divisibility_chain(diag: Iterable[int]) -> list[int]:
    d = sorted(x for x in diag if x)
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        d.sort()
    return d


def smith_normal_form(mat) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of an integer matrix (nonzero ones)."""
    if not isinstance(mat, BoundaryMatrix):
        mat = BoundaryMatrix.from_dense(mat)
    units, rest = _unit_phase(mat)
    diag = [1] * units
    if rest:
        row_ids = sorted(rest)
        col_ids = sorted({c for r in rest.values() for c in r})
        cpos = {c: k for k, c in enumerate(col_ids)}
        dense = [[0] * len(col_ids) for _ in row_ids]
        for a, i in enumerate(row_ids):
            for c, v in rest[i].items():
                dense[a][cpos[c]] = v
        diag.extend(_dense_snf(dense))
    return _divisibility_chain(diag)


def rank_mod_p(mat, p: int) -> int:
    """Rank over Z/p by Gaussian elimination."""
    check_prime(p)
    if not isinstance(mat, BoundaryMatrix):
        mat = BoundaryMatrix.from_dense(mat)
    rows: dict[int, dict[int, int]] = {}
    for (i, j), v in mat.entries.items():
        v %= p
        if v:
            rows.setdefault(i, {})[j] = v
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for i in sorted(rows):
        r = dict(rows[i])
        while r:
            c = min(r)
            if c not in pivots:
                inv = pow(r[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in r.items()}
                rank += 1
                break
            f = r[c]
            for k, v in pivots[c].items():
                nv = (r.get(k, 0) - f * v) % p
                if nv:
                    r[k] = nv
                else:
                    r.pop(k, None)
    return rank


def boundary_matrix(complex_, d: int) -> BoundaryMatrix:
    """Matrix of the boundary from d-cells to (d-1)-cells (d = 0 is augmentation)."""
    lower = complex_.layer(d - 1)
    upper = complex_.layer(d)
    pos = {c: i for i, c in enumerate(lower)}
    ent = {}
    for j, c in enumerate(upper):
        for face, sign in complex_.boundary(c):
            ent[(pos[face], j)] = ent.get((pos[face], j), 0) + sign
    return BoundaryMatrix(len(lower), len(upper), {k: v for k, v in ent.items() if v})


def check_boundary_squared(complex_) -> bool:
    for d in range(1, complex_.dim + 1):
        if not boundary_matrix(complex_, d - 1).matmul(boundary_matrix(complex_, d)).is_zero():
            return False
    return True


def parse_coefficients(coeff) -> int:
    """0 for Z, -1 for Q, p for Z/p."""
    if isinstance(coeff, int):
        return coeff if coeff in (0, -1) else check_prime(coeff)
    c = str(coeff).strip().lower()
    if c == "z":
        return 0
    if c == "q":
        return -1
    if c.startswith("p:"):
        c = c[2:]
    try:
        return check_prime(int(c))
    except ValueError:
        raise ValueError(f"unknown coefficients {coeff!r}") from None


def coefficient_name(code: int) -> str:
    return {0: "Z", -1: "Q"}.get(code, f"Z/{code}")


@dataclass
class HomologySummary:
    """Reduced homology, keyed by dimension -1..top."""

    coefficients: str
    betti: dict[int, int]
    torsion: dict[int, list[int]]

    def nonzero_dims(self) -> list[int]:
        return [d for d in sorted(self.betti) if self.betti[d] or self.torsion.get(d)]

    def is_acyclic(self) -> bool:
        return not self.nonzero_dims()

    def report(self) -> dict:
        return {
            str(d): {"betti": self.betti[d], "torsion": list(self.torsion.get(d, []))}
            for d in sorted(self.betti)
        }


def homology(complex_, coefficients="z") -> HomologySummary:
    code = parse_coefficients(coefficients)
    top = complex_.dim
    sizes = {d: len(complex_.layer(d)) for d in range(-1, top + 1)}
    mats = {d: boundary_matrix(complex_, d) for d in range(0, top + 1)}
    rank: dict[int, int] = {}
    factors: dict[int, list[int]] = {}
    for d, mt in mats.items():
        if code > 0:
            rank[d] = rank_mod_p(mt, code)
        else:
            f = smith_normal_form(mt)
            factors[d] = f
            rank[d] = len(f)
    betti, torsion = {}, {}
    for d in range(-1, top + 1):
        betti[d] = sizes[d] - rank.get(d, 0) - rank.get(d + 1, 0)
        torsion[d] = [x for x in factors.get(d + 1, []) if x > 1] if code == 0 else []
    return HomologySummary(coefficient_name(code), betti, torsion)


@dataclass
class TorsionScanEntry:
    face: object
    link_dim: int
    dims: list[int]
    homology: HomologySummary


def torsion_scan(complex_, face_dimension_bound: int | None = None, coefficients="z",
                 threads: int = 1) -> list[TorsionScanEntry]:
    """Faces whose links carry reduced homology below their top dimension.

    Over Z any torsion is reported too, wherever it sits.
    """
    from concurrent.futures import ThreadPoolExecutor

    from .complex import link

    hi = complex_.dim if face_dimension_bound is None else face_dimension_bound
    faces = [f for d in range(-1, hi + 1) for f in complex_.layer(d)]

    def probe(face):
        lk = link(complex_, face)
        h = homology(lk, coefficients)
        bad = [k for k in h.nonzero_dims() if k < lk.dim or h.torsion.get(k)]
        return TorsionScanEntry(face, lk.dim, bad, h) if bad else None

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(probe, faces))
    else:
        results = [probe(f) for f in faces]
    return [r for r in results if r is not None]
