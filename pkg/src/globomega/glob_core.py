"""Globes, finite truncated globular sets, tables of dimensions and globular sums.

Conventions
-----------
The coface maps of the globe category are ``sigma_n, tau_n : n-1 -> n`` with the
standard relations ``sigma_{n+1} sigma_n = tau_{n+1} sigma_n`` and
``sigma_{n+1} tau_n = tau_{n+1} tau_n``.  For a globular object ``A`` we write
``s = A(tau)`` and ``t = A(sigma)``.  Consequently, in a representable ``D(n)``
the face picked out by ``tau`` is the *source* face and the one picked out by
``sigma`` is the *target* face, and a globular sum ``Y(n1, n2, n3, ...)`` glues
the target ``n2``-face of one globe to the source ``n2``-face of the next.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Protocol, Sequence

from .errors import DimensionMismatch, MalformedTable, NotGlobular, NotParallel


# ---------------------------------------------------------------------------
# Tables of dimensions


@dataclass(frozen=True, order=True)
class TableOfDimensions:
    dims: tuple[int, ...]

    def __post_init__(self):
        _check_table(self.dims)

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def segments(self) -> tuple[int, ...]:
        """Dimensions of the glued globes (odd positions, 1-indexed)."""
        return self.dims[0::2]

    @property
    def junctions(self) -> tuple[int, ...]:
        return self.dims[1::2]

    @property
    def max_dim(self) -> int:
        return max(self.dims)

    def extend(self, junction: int, top: int) -> "TableOfDimensions":
        return TableOfDimensions(self.dims + (junction, top))

    def prefix(self, length: int) -> "TableOfDimensions":
        return TableOfDimensions(self.dims[:length])

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.dims)) + ")"

    def __repr__(self) -> str:
        return f"TableOfDimensions{self}"

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)


def _check_table(dims: tuple[int, ...]) -> None:
    if not dims:
        raise MalformedTable(dims, 0, "empty table")
    for idx, n in enumerate(dims, start=1):
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise MalformedTable(dims, idx, f"entry {n!r} is not a natural number")
    if len(dims) % 2 == 0:
        raise MalformedTable(dims, len(dims), "table length must be odd")
    for idx in range(1, len(dims), 2):
        # idx is the 0-based position of a junction n_{2i}
        if not dims[idx - 1] > dims[idx]:
            raise MalformedTable(dims, idx + 1, f"needs n{idx} > n{idx + 1}")
        if not dims[idx] < dims[idx + 1]:
            raise MalformedTable(dims, idx + 1, f"needs n{idx + 1} < n{idx + 2}")


def validate_table(dims: Sequence[int] | TableOfDimensions | str) -> TableOfDimensions:
    if isinstance(dims, TableOfDimensions):
        return dims
    if isinstance(dims, str):
        return parse_table(dims)
    return TableOfDimensions(tuple(dims))


_TABLE_RE = re.compile(r"^\(\s*\d+(\s*,\s*\d+)*\s*,?\s*\)$")


def parse_table(text: str) -> TableOfDimensions:
    """Parse the literal form ``"(n1,n2,...)"``."""
    text = text.strip()
    if not _TABLE_RE.match(text):
        raise MalformedTable((), 0, f"cannot parse table literal {text!r}")
    body = text[1:-1].strip().rstrip(",")
    return validate_table(int(part) for part in body.split(","))


def all_tables(max_len: int, max_dim: int) -> list[TableOfDimensions]:
    """Every valid table with length <= max_len and entries <= max_dim, in order."""
    out: list[TableOfDimensions] = []

    def grow(prefix: tuple[int, ...]):
        out.append(TableOfDimensions(prefix))
        if len(prefix) + 2 > max_len:
            return
        for junction in range(prefix[-1]):
            for top in range(junction + 1, max_dim + 1):
                grow(prefix + (junction, top))

    for n in range(max_dim + 1):
        grow((n,))
    return sorted(out, key=lambda t: (t.k, t.dims))


# ---------------------------------------------------------------------------
# Globular sets


@dataclass(frozen=True)
class GlobularSet:
    """A finite globular set truncated at dimension ``truncation``.

    ``cells[n]`` lists the labels of the n-cells; ``src[n-1][i]`` and
    ``tgt[n-1][i]`` are the indices of the source and target of the i-th
    n-cell among the (n-1)-cells.
    """

    cells: tuple[tuple[str, ...], ...]
    src: tuple[tuple[int, ...], ...]
    tgt: tuple[tuple[int, ...], ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        n_levels = len(self.cells)
        if n_levels == 0:
            raise NotGlobular("a globular set needs at least dimension 0")
        if len(self.src) != n_levels - 1 or len(self.tgt) != n_levels - 1:
            raise NotGlobular("src/tgt must be given for every dimension >= 1")
        for n in range(1, n_levels):
            below = len(self.cells[n - 1])
            if len(self.src[n - 1]) != len(self.cells[n]) or len(self.tgt[n - 1]) != len(self.cells[n]):
                raise NotGlobular(f"src/tgt of dimension {n} have the wrong length")
            for i in self.src[n - 1] + self.tgt[n - 1]:
                if not 0 <= i < below:
                    raise NotGlobular(f"boundary index {i} out of range in dimension {n}")
        for n in range(2, n_levels):
            s, t = self.src[n - 1], self.tgt[n - 1]
            s1, t1 = self.src[n - 2], self.tgt[n - 2]
            for i, label in enumerate(self.cells[n]):
                if s1[s[i]] != s1[t[i]] or t1[s[i]] != t1[t[i]]:
                    raise NotGlobular(f"globular identities fail at {n}-cell {label!r}")
        index = {}
        for n, labels in enumerate(self.cells):
            if len(set(labels)) != len(labels):
                raise NotGlobular(f"duplicate labels in dimension {n}")
            for i, label in enumerate(labels):
                index[(n, label)] = i
        object.__setattr__(self, "_index", index)

    @property
    def truncation(self) -> int:
        return len(self.cells) - 1

    def counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def index(self, dim: int, label: str) -> int:
        return self._index[(dim, label)]

    def label(self, dim: int, i: int) -> str:
        return self.cells[dim][i]

    def source(self, dim: int, i: int) -> int:
        return self.src[dim - 1][i]

    def target(self, dim: int, i: int) -> int:
        return self.tgt[dim - 1][i]

    # ambient protocol, see ParallelPair
    def level_of(self, f: "CellFamily") -> int:
        return f.dim

    def domain_of(self, f: "CellFamily") -> int:
        return len(f.cells)

    def compose_src(self, f: "CellFamily") -> "CellFamily":
        return CellFamily(f.dim - 1, tuple(self.src[f.dim - 1][c] for c in f.cells))

    def compose_tgt(self, f: "CellFamily") -> "CellFamily":
        return CellFamily(f.dim - 1, tuple(self.tgt[f.dim - 1][c] for c in f.cells))

    def first_difference(self, f: "CellFamily", g: "CellFamily"):
        for pos, (a, b) in enumerate(zip(f.cells, g.cells)):
            if a != b:
                return pos, self.label(f.dim, a), self.label(g.dim, b)
        return None

    def to_json(self) -> str:
        doc = {
            "truncation": self.truncation,
            "cells": [list(c) for c in self.cells],
            "src": [[self.cells[n][i] for i in s] for n, s in enumerate(self.src)],
            "tgt": [[self.cells[n][i] for i in t] for n, t in enumerate(self.tgt)],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "GlobularSet":
        doc = json.loads(text)
        cells = tuple(tuple(c) for c in doc["cells"])
        if doc["truncation"] != len(cells) - 1:
            raise NotGlobular("truncation does not match the number of cell levels")
        pos = [{label: i for i, label in enumerate(c)} for c in cells]
        src = tuple(tuple(pos[n][x] for x in s) for n, s in enumerate(doc["src"]))
        tgt = tuple(tuple(pos[n][x] for x in t) for n, t in enumerate(doc["tgt"]))
        return cls(cells, src, tgt)


@dataclass(frozen=True)
class CellFamily:
    """A family of cells of one dimension, indexed by ``range(len(cells))``.

    This is what a morphism ``X -> A(dim)`` from a finite discrete domain looks
    like inside a globular set.
    """

    dim: int
    cells: tuple[int, ...]

    @classmethod
    def of(cls, gset: GlobularSet, dim: int, *labels: str) -> "CellFamily":
        return cls(dim, tuple(gset.index(dim, x) for x in labels))


@dataclass(frozen=True)
class GlobularSetMap:
    source: GlobularSet
    target: GlobularSet
    components: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.source.truncation > self.target.truncation:
            raise NotGlobular("target truncation is below the source truncation")
        if len(self.components) != len(self.source.cells):
            raise NotGlobular("one component per source dimension is required")
        for n, comp in enumerate(self.components):
            if len(comp) != len(self.source.cells[n]):
                raise NotGlobular(f"component {n} has the wrong length")
            for j in comp:
                if not 0 <= j < len(self.target.cells[n]):
                    raise NotGlobular(f"component {n} leaves the target")
        for n in range(1, len(self.components)):
            up, down = self.components[n], self.components[n - 1]
            for i in range(len(up)):
                if self.target.source(n, up[i]) != down[self.source.source(n, i)]:
                    raise NotGlobular(f"map does not commute with src at {n}-cell {i}")
                if self.target.target(n, up[i]) != down[self.source.target(n, i)]:
                    raise NotGlobular(f"map does not commute with tgt at {n}-cell {i}")

    @classmethod
    def identity(cls, gset: GlobularSet) -> "GlobularSetMap":
        return cls(gset, gset, tuple(tuple(range(len(c))) for c in gset.cells))

    def then(self, other: "GlobularSetMap") -> "GlobularSetMap":
        if self.target != other.source:
            raise ValueError("maps are not composable")
        comps = tuple(
            tuple(other.components[n][j] for j in comp) for n, comp in enumerate(self.components)
        )
        return GlobularSetMap(self.source, other.target, comps)

    def image(self, dim: int, label: str) -> str:
        return self.target.label(dim, self.components[dim][self.source.index(dim, label)])

    def as_labels(self) -> list[list[str]]:
        return [[self.target.label(n, j) for j in comp] for n, comp in enumerate(self.components)]


# ---------------------------------------------------------------------------
# Representables and globular sums


def representable(n: int) -> GlobularSet:
    """The globe ``D(n)``: cells s^j, t^j for j < n and a single top cell."""
    cells = [(f"s{j}", f"t{j}") for j in range(n)] + [("top",)]
    src = tuple(tuple(0 for _ in cells[j]) for j in range(1, n + 1))
    tgt = tuple(tuple(1 for _ in cells[j]) for j in range(1, n + 1))
    return GlobularSet(tuple(cells), src, tgt)


def _cell_label(segment: int, tag: str, dim: int) -> str:
    return f"{segment}:top" if tag == "top" else f"{segment}:{tag}{dim}"


def glob_sum(table: TableOfDimensions | Sequence[int]) -> GlobularSet:
    """The globular sum ``Y(table)`` with leftmost-wins canonical labels."""
    table = validate_table(table)
    seg_dims = table.segments

    def resolve(seg, tag, dim):
        return _resolve(table, seg, tag, dim)

    top_dim = table.max_dim
    reps: list[list[tuple[int, str, int]]] = [[] for _ in range(top_dim + 1)]
    for seg, d in enumerate(seg_dims):
        for j in range(d):
            for tag in ("s", "t"):
                key = resolve(seg, tag, j)
                if key == (seg, tag, j):
                    reps[j].append(key)
        reps[d].append((seg, "top", d))
    position = [{key: i for i, key in enumerate(level)} for level in reps]
    cells = tuple(tuple(_cell_label(*k) for k in level) for level in reps)
    src, tgt = [], []
    for j in range(1, top_dim + 1):
        src.append(tuple(position[j - 1][resolve(seg, "s", j - 1)] for seg, _, _ in reps[j]))
        tgt.append(tuple(position[j - 1][resolve(seg, "t", j - 1)] for seg, _, _ in reps[j]))
    return GlobularSet(cells, tuple(src), tuple(tgt))


def segment_inclusion(table: TableOfDimensions, segment: int) -> GlobularSetMap:
    """The cocone leg ``D(n_{2i+1}) -> Y(table)`` of the given segment."""
    table = validate_table(table)
    d = table.segments[segment]
    rep = representable(d)
    total = glob_sum(table)
    comps = []
    for j in range(d + 1):
        comps.append(
            tuple(_segment_cell(total, table, segment, label, j) for label in rep.cells[j])
        )
    return GlobularSetMap(rep, total, tuple(comps))


def _resolve(table: TableOfDimensions, seg: int, tag: str, dim: int) -> tuple[int, str, int]:
    # walk left along the junction identifications; the leftmost segment wins
    while seg > 0 and tag != "top":
        m = table.junctions[seg - 1]
        if dim < m:
            seg -= 1
        elif dim == m and tag == "s":
            seg, tag = seg - 1, "t"
        else:
            break
    return seg, tag, dim


def _segment_cell(total: GlobularSet, table: TableOfDimensions, segment: int, label: str, dim: int) -> int:
    tag = "top" if label == "top" else label[0]
    return total.index(dim, _cell_label(*_resolve(table, segment, tag, dim)))


def segment_of(label: str) -> tuple[int, str]:
    """Split a glob_sum label into (segment index, face tag)."""
    seg, rest = label.split(":", 1)
    return int(seg), rest


# ---------------------------------------------------------------------------
# Parallel pairs and liftings


class GlobularAmbient(Protocol):
    """What parallel_pair/is_lifting need from the ambient globular object."""

    def level_of(self, f: Any) -> int: ...

    def domain_of(self, f: Any) -> Any: ...

    def compose_src(self, f: Any) -> Any: ...

    def compose_tgt(self, f: Any) -> Any: ...

    def first_difference(self, f: Any, g: Any) -> Any: ...


@dataclass(frozen=True)
class ParallelPair:
    ambient: Any
    dim: int
    f: Any
    g: Any


def parallel_pair(f, g, m: int, ambient: GlobularAmbient) -> ParallelPair:
    for h in (f, g):
        if ambient.level_of(h) != m:
            raise DimensionMismatch(f"expected a morphism into {m}-cells, got {ambient.level_of(h)}")
    if ambient.domain_of(f) != ambient.domain_of(g):
        raise DimensionMismatch("f and g do not share a domain")
    if m > 0:
        for side, boundary in (("source", ambient.compose_src), ("target", ambient.compose_tgt)):
            diff = ambient.first_difference(boundary(f), boundary(g))
            if diff is not None:
                raise NotParallel(f"{side}s disagree at {diff}", witness=diff)
    return ParallelPair(ambient, m, f, g)


def is_lifting(pair: ParallelPair, h) -> bool:
    ambient = pair.ambient
    if ambient.level_of(h) != pair.dim + 1:
        raise DimensionMismatch(
            f"a lifting of {pair.dim}-cells lands in {pair.dim + 1}-cells, got {ambient.level_of(h)}"
        )
    if ambient.domain_of(h) != ambient.domain_of(pair.f):
        raise DimensionMismatch("lifting does not share the pair's domain")
    return (
        ambient.first_difference(ambient.compose_src(h), pair.f) is None
        and ambient.first_difference(ambient.compose_tgt(h), pair.g) is None
    )


def iter_cells(gset: GlobularSet) -> Iterable[tuple[int, int]]:
    for n, labels in enumerate(gset.cells):
        for i in range(len(labels)):
            yield n, i
