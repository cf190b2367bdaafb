"""The category Theta_0 of tables of dimensions.

A morphism ``n -> m`` is a map of globular sets ``Y(n) -> Y(m)`` between the
globular sums.  Homs are enumerated exhaustively (the tables involved are
tiny), which keeps every downstream check an honest search.

In the globe category we use the coglobular generators ``sigma_n, tau_n:
n-1 -> n`` with ``s = A(tau)`` and ``t = A(sigma)`` on a globular object A.
Under the Yoneda embedding ``tau_n`` is therefore the inclusion of the source
face of the n-globe and ``sigma_n`` the inclusion of its target face.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

from .errors import BoundaryMismatch, TruncationExceeded
from .glob_core import (
    GlobularSet,
    GlobularSetMap,
    TableOfDimensions,
    glob_sum,
    segment_inclusion,
    validate_table,
)


@dataclass(frozen=True)
class Theta0Morphism:
    dom: TableOfDimensions
    cod: TableOfDimensions
    underlying: GlobularSetMap

    def image(self, dim: int, label: str) -> str:
        return self.underlying.image(dim, label)

    def to_json(self) -> dict:
        return {"dom": str(self.dom), "cod": str(self.cod), "cells": self.underlying.as_labels()}

    def __str__(self) -> str:
        tops = [self.image(d, f"{j}:top") for j, d in enumerate(self.dom.segments)]
        return f"{self.dom} -> {self.cod} [{', '.join(tops)}]"


@lru_cache(maxsize=None)
def _sum(table: TableOfDimensions) -> GlobularSet:
    return glob_sum(table)


def carrier(table) -> GlobularSet:
    """The (cached) globular sum of a table."""
    return _sum(validate_table(table))


def _check_bound(bound: int | None, *tables: TableOfDimensions) -> None:
    if bound is None:
        return
    for t in tables:
        if t.max_dim > bound:
            raise TruncationExceeded(f"table {t} exceeds the dimension bound {bound}")


def theta0_hom(n, m, bound: int | None = None) -> list[Theta0Morphism]:
    """Every globular-set map ``Y(n) -> Y(m)``, in lexicographic order of cell images."""
    n, m = validate_table(n), validate_table(m)
    _check_bound(bound, n, m)
    return list(_hom(n, m))


@lru_cache(maxsize=4096)
def _hom(n: TableOfDimensions, m: TableOfDimensions) -> tuple[Theta0Morphism, ...]:
    S, T = _sum(n), _sum(m)
    if S.truncation > T.truncation:
        return ()
    # target cells indexed by their boundary
    by_boundary: list[dict[tuple[int, int], list[int]]] = [{}]
    for d in range(1, T.truncation + 1):
        table: dict[tuple[int, int], list[int]] = {}
        for c in range(len(T.cells[d])):
            table.setdefault((T.source(d, c), T.target(d, c)), []).append(c)
        by_boundary.append(table)
    order = [(d, i) for d in range(S.truncation + 1) for i in range(len(S.cells[d]))]
    assign = [[0] * len(level) for level in S.cells]
    out: list[Theta0Morphism] = []

    def go(pos: int) -> None:
        if pos == len(order):
            comps = tuple(tuple(level) for level in assign)
            out.append(Theta0Morphism(n, m, GlobularSetMap(S, T, comps)))
            return
        d, i = order[pos]
        if d == 0:
            candidates: Iterable[int] = range(len(T.cells[0]))
        else:
            key = (assign[d - 1][S.source(d, i)], assign[d - 1][S.target(d, i)])
            candidates = by_boundary[d].get(key, ())
        for c in candidates:
            assign[d][i] = c
            go(pos + 1)

    go(0)
    return tuple(out)


def identity(table) -> Theta0Morphism:
    table = validate_table(table)
    return Theta0Morphism(table, table, GlobularSetMap.identity(_sum(table)))


def compose(f: Theta0Morphism, g: Theta0Morphism) -> Theta0Morphism:
    """``g . f`` (f first)."""
    if f.cod != g.dom:
        raise BoundaryMismatch(f"cannot compose {f.dom} -> {f.cod} with {g.dom} -> {g.cod}")
    return Theta0Morphism(f.dom, g.cod, f.underlying.then(g.underlying))


def from_cell_images(n, m, tops: Sequence[str]) -> Theta0Morphism:
    """The unique map sending the top cell of each segment of ``n`` to the given
    cell of ``Y(m)``; raises ``BoundaryMismatch`` when no such map exists."""
    n, m = validate_table(n), validate_table(m)
    for f in _hom(n, m):
        if all(f.image(d, f"{j}:top") == tops[j] for j, d in enumerate(n.segments)):
            return f
    raise BoundaryMismatch(f"no map {n} -> {m} with top cells {list(tops)}")


# ---------------------------------------------------------------------------
# The globe category and the functor D


@dataclass(frozen=True)
class GlobeMap:
    """A morphism ``dom -> cod`` of the globe category.

    For ``dom < cod`` there are exactly two, and by the coglobular relations a
    composite only remembers its first generator; ``kind`` is that generator
    ("sigma" or "tau").  Identities have ``kind == "id"``.
    """

    dom: int
    cod: int
    kind: str

    def __post_init__(self):
        if self.dom > self.cod:
            raise ValueError("the globe category has no maps down in dimension")
        if (self.dom == self.cod) != (self.kind == "id") or self.kind not in ("id", "sigma", "tau"):
            raise ValueError(f"invalid globe map {self}")

    def then(self, other: "GlobeMap") -> "GlobeMap":
        if self.cod != other.dom:
            raise BoundaryMismatch("globe maps are not composable")
        kind = self.kind if self.kind != "id" else other.kind
        return GlobeMap(self.dom, other.cod, kind)


def sigma(n: int) -> GlobeMap:
    return GlobeMap(n - 1, n, "sigma")


def tau(n: int) -> GlobeMap:
    return GlobeMap(n - 1, n, "tau")


def D_functor(n: int) -> TableOfDimensions:
    return TableOfDimensions((n,))


def D_on_maps(g: GlobeMap) -> Theta0Morphism:
    """The cogenerator image: ``tau`` picks the source face, ``sigma`` the target face."""
    if g.kind == "id":
        return identity((g.dom,))
    face = "s" if g.kind == "tau" else "t"
    return from_cell_images((g.dom,), (g.cod,), [f"0:{face}{g.dom}"])


def face_inclusion(m: int, n: int, face: str) -> Theta0Morphism:
    """``(m) -> (n)`` picking the source (``face='s'``) or target m-face."""
    return D_on_maps(GlobeMap(m, n, "tau" if face == "s" else "sigma"))


def cocone(table) -> list[Theta0Morphism]:
    """The segment inclusions ``(n_j) -> table`` (the limit cone in Theta_0^op)."""
    table = validate_table(table)
    out = []
    for j, d in enumerate(table.segments):
        seg = TableOfDimensions((d,))
        # Y((d)) lists its cells in the same order as the representable
        comps = segment_inclusion(table, j).components
        out.append(Theta0Morphism(seg, table, GlobularSetMap(_sum(seg), _sum(table), comps)))
    return out


# ---------------------------------------------------------------------------
# Theories and the globular-product check


@dataclass
class TheoryPresentation:
    """Generating morphisms on top of Theta_0^op plus relations between words.

    A generator ``name -> (dom, cod)`` is a morphism ``dom -> cod`` of the
    theory (so it points the opposite way to the Theta_0 maps it extends).
    A word is a list of names read right-to-left like function composition;
    Theta_0 maps may appear as ``Theta0Morphism`` values.
    """

    generators: dict[str, tuple[TableOfDimensions, TableOfDimensions]] = field(default_factory=dict)
    relations: list[tuple[list, list]] = field(default_factory=list)
    bound: int | None = None

    def ends(self, word: Sequence) -> tuple[TableOfDimensions, TableOfDimensions]:
        if not word:
            raise BoundaryMismatch("empty word")
        ends = []
        for letter in word:
            if isinstance(letter, Theta0Morphism):
                ends.append((letter.cod, letter.dom))
            else:
                d, c = self.generators[letter]
                ends.append((validate_table(d), validate_table(c)))
        for (d_left, _), (_, c_right) in zip(ends, ends[1:]):
            if d_left != c_right:
                raise BoundaryMismatch("word is not composable")
        return ends[-1][0], ends[0][1]

    def validate(self) -> None:
        for name, (d, c) in self.generators.items():
            _check_bound(self.bound, validate_table(d), validate_table(c))
        for lhs, rhs in self.relations:
            if self.ends(lhs) != self.ends(rhs):
                raise BoundaryMismatch(f"relation {lhs} = {rhs} relates words with different ends")


class GlobularTheoryModel(ABC):
    """A candidate functor out of Theta_0^op into some category.

    ``arrow(theta)`` for ``theta: n -> m`` in Theta_0 is a morphism
    ``obj(m) -> obj(n)``.
    """

    @abstractmethod
    def obj(self, table: TableOfDimensions) -> Any: ...

    @abstractmethod
    def arrow(self, theta: Theta0Morphism) -> Any: ...

    @abstractmethod
    def compose(self, g, f) -> Any:
        """``g . f`` in the target category."""

    @abstractmethod
    def mediators(self, apex, legs: Sequence, table: TableOfDimensions, projections: Sequence, limit: int) -> list:
        """Morphisms ``h: apex -> obj(table)`` with ``projections[j] . h == legs[j]``."""

    @abstractmethod
    def test_cones(self, table: TableOfDimensions) -> Iterable[tuple[str, Any, list]]: ...


@dataclass
class ProductCheck:
    table: str
    ok: bool
    cones_checked: int = 0
    mediators: list = field(default_factory=list)
    counterexample: str | None = None

    def to_dict(self) -> dict:
        return {
            "table": self.table,
            "ok": self.ok,
            "cones_checked": self.cones_checked,
            "counterexample": self.counterexample,
        }


def junction_faces(table: TableOfDimensions) -> list[tuple[Theta0Morphism, Theta0Morphism]]:
    """For each junction m between segments a and b: the target face (m) -> (a)
    and the source face (m) -> (b)."""
    out = []
    for j, m in enumerate(table.junctions):
        a, b = table.segments[j], table.segments[j + 1]
        out.append((face_inclusion(m, a, "t"), face_inclusion(m, b, "s")))
    return out


def is_cone(J: GlobularTheoryModel, table: TableOfDimensions, legs: Sequence) -> bool:
    for j, (left, right) in enumerate(junction_faces(table)):
        if J.compose(J.arrow(left), legs[j]) != J.compose(J.arrow(right), legs[j + 1]):
            return False
    return True


def check_product_preservation(J: GlobularTheoryModel, table) -> ProductCheck:
    """Check that J sends the cone of segment inclusions of ``table`` to a limit cone.

    Every test cone offered by ``J.test_cones`` must factor through the image
    cone by exactly one mediating morphism.
    """
    table = validate_table(table)
    result = ProductCheck(str(table), True)
    projections = [J.arrow(iota) for iota in cocone(table)]
    if not is_cone(J, table, projections):
        result.ok = False
        result.counterexample = "image of the globular cone does not commute"
        return result
    for name, apex, legs in J.test_cones(table):
        if not is_cone(J, table, legs):
            continue
        found = J.mediators(apex, legs, table, projections, 2)
        result.cones_checked += 1
        if len(found) != 1:
            result.ok = False
            result.counterexample = f"cone {name}: {len(found)} mediating maps"
            return result
        result.mediators.append(found[0])
    return result


class IdentityTheory(GlobularTheoryModel):
    """Theta_0^op itself; its globular products are the globular sums."""

    def __init__(self, max_len: int = 3, max_dim: int | None = None):
        self.max_len = max_len
        self.max_dim = max_dim

    def obj(self, table):
        return validate_table(table)

    def arrow(self, theta):
        return theta

    def compose(self, g, f):
        # morphisms are Theta_0 maps pointing the other way
        return compose(g, f)

    def mediators(self, apex, legs, table, projections, limit):
        out = []
        for h in _hom(table, apex):
            if all(compose(p, h) == leg for p, leg in zip(projections, legs)):
                out.append(h)
                if len(out) >= limit:
                    break
        return out

    def test_cones(self, table):
        from .glob_core import all_tables

        top = self.max_dim if self.max_dim is not None else table.max_dim + 1
        for apex in all_tables(max(self.max_len, table.k), top):
            for legs in itertools.product(*(_hom(TableOfDimensions((d,)), apex) for d in table.segments)):
                yield str(apex), apex, list(legs)


def yoneda_count(n: int, table) -> int:
    """Number of n-cells of ``Y(table)``: the expected size of ``hom((n), table)``."""
    counts = carrier(table).counts()
    return counts[n] if n < len(counts) else 0


__all__ = [
    "GlobeMap",
    "GlobularTheoryModel",
    "IdentityTheory",
    "ProductCheck",
    "Theta0Morphism",
    "TheoryPresentation",
    "D_functor",
    "D_on_maps",
    "carrier",
    "check_product_preservation",
    "cocone",
    "compose",
    "face_inclusion",
    "from_cell_images",
    "identity",
    "is_cone",
    "junction_faces",
    "sigma",
    "tau",
    "theta0_hom",
    "yoneda_count",
]
