"""Quotient complexes as boolean cell complexes, and their links."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .chain_model import (
    FaceOrbit,
    Params,
    check_size,
    empty_face,
    enumerate_faces,
    enumerate_facets,
    face_restrict,
    restrict,
)


@dataclass
class FlagVectors:
    flag_f: dict[tuple[int, ...], int]
    flag_h: dict[tuple[int, ...], int]


@dataclass
class QuotientComplex:
    """Graded cells of a quotient complex, or of a link in one.

    ``base`` is the face whose link this is (the empty face for the whole
    complex).  Cells are FaceOrbits of the ambient complex lying above
    ``base``; a cell's dimension inside this complex is
    ``len(cell.support) - len(base.support) - 1``, so ``cells[0]`` holds the
    base itself in the role of the empty face.
    """

    params: Params
    cells: list[list[FaceOrbit]]
    base: FaceOrbit
    free_ranks: tuple[int, ...]
    index: dict[FaceOrbit, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {}
        for layer in self.cells:
            for i, c in enumerate(layer):
                self.index[c] = i

    @property
    def dim(self) -> int:
        return len(self.cells) - 2

    def cell_dim(self, cell: FaceOrbit) -> int:
        return len(cell.support) - len(self.base.support) - 1

    def layer(self, d: int) -> list[FaceOrbit]:
        """Cells of dimension d (d = -1 is the base/empty face)."""
        if d + 1 < 0 or d + 1 >= len(self.cells):
            return []
        return self.cells[d + 1]

    @property
    def facets(self) -> list[FaceOrbit]:
        return self.cells[-1]

    def rel_support(self, cell: FaceOrbit) -> tuple[int, ...]:
        base = set(self.base.support)
        return tuple(r for r in cell.support if r not in base)

    def face_of(self, cell: FaceOrbit, rel_ranks) -> FaceOrbit:
        """Face of ``cell`` whose relative support is ``rel_ranks``."""
        ranks = set(self.base.support) | set(rel_ranks)
        return face_restrict(cell, ranks, self.params.symmetrize)

    def boundary(self, cell: FaceOrbit) -> list[tuple[FaceOrbit, int]]:
        """Signed codimension-one faces: delete the i-th vertex with sign (-1)^i."""
        rel = self.rel_support(cell)
        out = []
        for i, r in enumerate(rel):
            face = self.face_of(cell, rel[:i] + rel[i + 1:])
            out.append((face, -1 if i % 2 else 1))
        return out

    def lower_interval(self, cell: FaceOrbit) -> list[FaceOrbit]:
        rel = self.rel_support(cell)
        return [
            self.face_of(cell, sub)
            for k in range(len(rel) + 1)
            for sub in itertools.combinations(rel, k)
        ]

    def coloring(self) -> dict[FaceOrbit, int]:
        """Rank colour of each vertex."""
        return {v: self.rel_support(v)[0] for v in self.layer(0)}

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.cells[1:])

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * f for d, f in enumerate(self.f_vector()))

    def flag_vectors(self) -> FlagVectors:
        flag_f: dict[tuple[int, ...], int] = {}
        for layer in self.cells:
            for c in layer:
                s = self.rel_support(c)
                flag_f[s] = flag_f.get(s, 0) + 1
        flag_h = {}
        for k in range(len(self.free_ranks) + 1):
            for s in itertools.combinations(self.free_ranks, k):
                h = 0
                for j in range(k + 1):
                    for t in itertools.combinations(s, j):
                        h += (-1) ** (k - j) * flag_f.get(t, 0)
                flag_h[s] = h
        return FlagVectors(flag_f, flag_h)

    @cached_property
    def cofaces(self) -> dict[FaceOrbit, list[FaceOrbit]]:
        """Codimension-one cofaces of every cell."""
        up: dict[FaceOrbit, list[FaceOrbit]] = {c: [] for layer in self.cells for c in layer}
        for layer in self.cells[1:]:
            for c in layer:
                for face, _ in self.boundary(c):
                    up[face].append(c)
        return up

    def is_cell(self, cell: FaceOrbit) -> bool:
        return cell in self.index


def build(params: Params, allow_large: bool = False) -> QuotientComplex:
    check_size(params, allow_large)
    cells = enumerate_faces(params, allow_large)
    return QuotientComplex(params, cells, empty_face(params), params.ranks)


def link(complex_: QuotientComplex, face: FaceOrbit) -> QuotientComplex:
    """Link of ``face``: the cells above it, re-graded.

    A cell above ``face`` keeps its full FaceOrbit, so two link cells that
    look alike on the link ranks stay distinct.
    """
    if not complex_.is_cell(face):
        raise ValueError(f"{face} is not a cell of the complex")
    sym = complex_.params.symmetrize
    base_support = set(face.support)
    free = tuple(r for r in complex_.free_ranks if r not in base_support)
    k0 = len(face.support) - len(complex_.base.support)
    cells: list[list[FaceOrbit]] = []
    for layer in complex_.cells[k0:]:
        keep = [
            c for c in layer
            if base_support <= set(c.support) and face_restrict(c, face.support, sym) == face
        ]
        cells.append(keep)
    while len(cells) > 1 and not cells[-1]:
        cells.pop()
    return QuotientComplex(complex_.params, cells, face, free)


def link_from_facets(params: Params, face: FaceOrbit, allow_large: bool = False) -> QuotientComplex:
    """Link of ``face`` built from the facets containing it, without the full complex."""
    check_size(params, allow_large)
    base = set(face.support)
    free = tuple(r for r in params.ranks if r not in base)
    layers: list[set[FaceOrbit]] = [set() for _ in range(len(free) + 1)]
    for w in enumerate_facets(params, allow_large):
        if restrict(w, face.support, params) != face:
            continue
        for k in range(len(free) + 1):
            for sub in itertools.combinations(free, k):
                layers[k].add(restrict(w, base | set(sub), params))
    cells = [sorted(layer) for layer in layers]
    while len(cells) > 1 and not cells[-1]:
        cells.pop()
    return QuotientComplex(params, cells, face, free)


def check_boolean_intervals(complex_: QuotientComplex) -> bool:
    """Every cell's lower interval has 2^(d+1) distinct members, all cells."""
    for layer in complex_.cells:
        for c in layer:
            below = complex_.lower_interval(c)
            if len(set(below)) != 2 ** (complex_.cell_dim(c) + 1):
                return False
            if any(not complex_.is_cell(b) for b in below):
                return False
    return True


def check_balanced(complex_: QuotientComplex) -> bool:
    for layer in complex_.cells:
        for c in layer:
            colors = [complex_.rel_support(complex_.face_of(c, (r,)))[0] for r in complex_.rel_support(c)]
            if len(set(colors)) != len(colors):
                return False
    return True
