"""Globular products under A(0), lifting of parallel pairs, and ω-groupoid operations.

Everything is computed in a path tower ``A = X(.)``.  A globular product
``A(n1, n2, ..., nk)`` is built left to right as iterated pullbacks of the
iterated target map of the last segment against the iterated source map of
the new one.  Each product carries the map ``i: A(0) -> A(n)`` assembled from
the degeneracies.  A parallel pair ``f, g: A(n) -> A(m)`` that commutes with
these maps lifts to ``h: A(n) -> A(m+1)`` by one diagonal filler of the
square formed by ``i`` and the boundary map of level m+1.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import (
    BackendLawFailure,
    DimensionMismatch,
    GlobomegaError,
    MissingPrerequisite,
    NotUnderA0,
    TruncationExceeded,
    UnknownOperation,
)
from .grpd import GroupoidFunctor, lift_arrow, terminal_groupoid
from .glob_core import (
    TableOfDimensions,
    all_tables,
    is_lifting,
    parallel_pair,
    segment_of,
    validate_table,
)
from .theta0 import GlobularTheoryModel, Theta0Morphism, theta0_hom
from .tower import PathTower
from .wfs import Pullback


# ---------------------------------------------------------------------------
# Cells of the tower as a globular object


@dataclass(frozen=True)
class CellMap:
    """A morphism into the m-cells ``X(m)`` of a tower."""

    dim: int
    map: Any


class TowerAmbient:
    """The underlying globular object of a tower, for parallel-pair checks."""

    def __init__(self, tower: PathTower):
        self.tower = tower

    def level_of(self, f: CellMap) -> int:
        return f.dim

    def domain_of(self, f: CellMap):
        return f.map.dom

    def compose_src(self, f: CellMap) -> CellMap:
        return CellMap(f.dim - 1, self.tower.backend.compose(self.tower.s(f.dim), f.map))

    def compose_tgt(self, f: CellMap) -> CellMap:
        return CellMap(f.dim - 1, self.tower.backend.compose(self.tower.t(f.dim), f.map))

    def first_difference(self, f: CellMap, g: CellMap):
        return self.tower.backend.first_difference(f.map, g.map)


# ---------------------------------------------------------------------------
# Globular products


@dataclass
class GlobularProduct:
    table: TableOfDimensions
    apex: Any
    proj: list  # one projection per node of the table, junctions included
    i_map: Any
    steps: list = field(default_factory=list)  # the pullback of each inductive step
    sections: list = field(default_factory=list)  # i' of each inductive step
    certificates: dict = field(default_factory=dict)

    def segment_proj(self, j: int):
        return self.proj[2 * j]


def glob_product_under(tower: PathTower, table, _memo: dict | None = None) -> GlobularProduct:
    """The globular product of ``table`` in the tower, with its map from A(0)."""
    table = validate_table(table)
    if table.max_dim > tower.N:
        raise TruncationExceeded(f"table {table} needs tower level {table.max_dim}, have {tower.N}")
    if _memo is not None and table in _memo:
        return _memo[table]
    B = tower.backend
    if table.k == 1:
        n = table.dims[0]
        gp = GlobularProduct(table, tower.obj(n), [B.identity(tower.obj(n))], tower.iterated_i(0, n))
        gp.certificates = {"i_is_L": B.is_L(gp.i_map), "last_projection_is_R": True, "compatible": True}
    else:
        prev = glob_product_under(tower, table.prefix(table.k - 2), _memo)
        gp = _extend_product(tower, prev, table)
    if _memo is not None:
        _memo[table] = gp
    return gp


def _extend_product(tower: PathTower, prev: GlobularProduct, table: TableOfDimensions) -> GlobularProduct:
    B = tower.backend
    last = prev.table.dims[-1]
    j, d = table.dims[-2], table.dims[-1]
    t_last = B.compose(tower.iterated_t(last, j), prev.proj[-1])
    s_new = tower.iterated_s(d, j)
    if not B.is_R(s_new):
        raise BackendLawFailure("iterated source map is not an R-map")
    pb: Pullback = B.pullback(t_last, s_new)
    proj = [B.compose(p, pb.p) for p in prev.proj]
    proj.append(B.compose(t_last, pb.p))
    proj.append(pb.q)
    i_map = B.pair(pb, prev.i_map, tower.iterated_i(0, d))

    # the section i' of the projection onto the previous product
    degenerate = B.compose(tower.iterated_i(j, d), t_last)
    section = B.pair(pb, B.identity(prev.apex), degenerate)
    checks = {
        "section": B.compose(pb.p, section) == B.identity(prev.apex),
        "section_left_square": B.compose(pb.q, section) == degenerate,
        "section_is_L": B.is_L(section),
        "i_factors_through_section": B.compose(section, prev.i_map) == i_map,
    }
    if not all(checks.values()):
        raise BackendLawFailure(f"section of {table} fails {[k for k, v in checks.items() if not v]}")
    compatible = all(
        B.compose(p, i_map) == tower.iterated_i(0, n) for p, n in zip(proj, table.dims)
    )
    gp = GlobularProduct(
        table, pb.apex, proj, i_map,
        steps=prev.steps + [pb],
        sections=prev.sections + [section],
    )
    gp.certificates = {
        "i_is_L": B.is_L(i_map),
        "last_projection_is_R": B.is_R(pb.q),
        "compatible": compatible,
        **checks,
    }
    if not all(gp.certificates.values()):
        failed = [k for k, v in gp.certificates.items() if not v]
        raise BackendLawFailure(f"globular product {table} fails {failed}")
    return gp


def section_iprime(tower: PathTower, table, _memo: dict | None = None):
    """The section i' built in the last inductive step of ``table``'s product."""
    gp = glob_product_under(tower, table, _memo)
    if not gp.sections:
        raise DimensionMismatch("a one-segment table has no inductive step")
    return gp.sections[-1]


def tuple_into(tower: PathTower, gp: GlobularProduct, legs: list):
    """The mediating map into ``gp.apex`` from one leg per segment."""
    B = tower.backend
    if len(legs) != len(gp.table.segments):
        raise DimensionMismatch("one leg per segment is required")
    h = legs[0]
    for pb, leg in zip(gp.steps, legs[1:]):
        h = B.pair(pb, h, leg)
    return h


# ---------------------------------------------------------------------------
# Lifting


@dataclass
class OpWitness:
    name: str
    table: TableOfDimensions
    dim: int
    h: Any
    f: Any
    g: Any
    source_ok: bool
    target_ok: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "table": str(self.table),
            "dim": self.dim,
            "source_equation": self.source_ok,
            "target_equation": self.target_ok,
            "morphism": self.h.to_json(),
        }


def lift_parallel(tower: PathTower, gp: GlobularProduct, f, g, m: int, name: str = "lift") -> OpWitness:
    """Lift the parallel pair ``f, g: A(table) -> A(m)`` to ``h`` with ``s h = f``, ``t h = g``."""
    B = tower.backend
    if m + 1 > tower.N:
        raise TruncationExceeded(f"lifting {m}-cells needs tower level {m + 1}, have {tower.N}")
    ambient = TowerAmbient(tower)
    pair = parallel_pair(CellMap(m, f), CellMap(m, g), m, ambient)  # raises NotParallel
    i_m = tower.iterated_i(0, m)
    for side, x in (("first", f), ("second", g)):
        if B.compose(x, gp.i_map) != i_m:
            raise NotUnderA0(f"{side} map of the pair does not commute with the maps from A(0)")
    boundary = tower.boundaries[m + 1]
    bottom = B.pair(boundary, f, g)
    h = B.lift(gp.i_map, tower.bd[m + 1], tower.iterated_i(0, m + 1), bottom)
    ok = is_lifting(pair, CellMap(m + 1, h))
    s_ok = B.compose(tower.s(m + 1), h) == f
    t_ok = B.compose(tower.t(m + 1), h) == g
    if not (ok and s_ok and t_ok):
        raise BackendLawFailure("filler does not satisfy the lifting triangle")
    return OpWitness(name, gp.table, m + 1, h, f, g, s_ok, t_ok)


def lifting_oracle(tower: PathTower, gp: GlobularProduct, f, g, m: int, limit: int = 1) -> list:
    """Exhaustive search for liftings under A(0), independent of the filler algorithm."""
    B = tower.backend
    bottom = B.pair(tower.boundaries[m + 1], f, g)
    return B.search_morphisms(
        gp.apex,
        tower.obj(m + 1),
        post=[(tower.bd[m + 1], bottom)],
        pre=[(gp.i_map, tower.iterated_i(0, m + 1))],
        limit=limit,
    )


# ---------------------------------------------------------------------------
# The endomorphism theory and the operation registry


@dataclass(frozen=True)
class OperationSpec:
    name: str
    table: str
    dim: int  # dimension m of the lifted pair; the witness lands in m+1
    prerequisites: tuple[str, ...]
    build: Callable[["EndTheoryHandle"], tuple[Any, Any]]
    summary: str


class EndTheoryHandle:
    """Memoized globular products and operation witnesses over one tower."""

    def __init__(self, tower: PathTower):
        self.tower = tower
        self.backend = tower.backend
        self.products: dict[TableOfDimensions, GlobularProduct] = {}
        self.witnesses: dict[str, OpWitness] = {}

    def product(self, table) -> GlobularProduct:
        return glob_product_under(self.tower, table, self.products)

    def witness(self, name: str) -> OpWitness:
        try:
            return self.witnesses[name]
        except KeyError:
            raise MissingPrerequisite(f"operation {name!r} has not been synthesized") from None

    def tuple(self, table, legs: list):
        return tuple_into(self.tower, self.product(table), legs)

    # shorthands used by the registry
    def P(self, table, j: int):
        return self.product(table).segment_proj(j)

    def c(self, *maps):
        return self.backend.compose_all(*maps)


def _comp_pair(H: EndTheoryHandle, left, right):
    """``m . (left, right)``"""
    return H.c(H.witness("m").h, H.tuple("(1,0,1)", [left, right]))


def _build_unit(H):
    ident = H.backend.identity(H.tower.obj(0))
    return ident, ident


def _build_m(H):
    T = H.tower
    return H.c(T.s(1), H.P("(1,0,1)", 0)), H.c(T.t(1), H.P("(1,0,1)", 1))


def _build_w(H):
    return H.tower.t(1), H.tower.s(1)


def _build_a(H):
    t5 = "(1,0,1,0,1)"
    P0, P1, P2 = (H.P(t5, j) for j in range(3))
    m = H.witness("m").h
    m_1 = H.tuple("(1,0,1)", [H.c(m, H.tuple("(1,0,1)", [P0, P1])), P2])
    one_m = H.tuple("(1,0,1)", [P0, H.c(m, H.tuple("(1,0,1)", [P1, P2]))])
    return H.c(m, m_1), H.c(m, one_m)


def _build_left_unit(H):
    T = H.tower
    ident = H.backend.identity(T.obj(1))
    return _comp_pair(H, H.c(T.i(0), T.s(1)), ident), ident


def _build_right_unit(H):
    T = H.tower
    ident = H.backend.identity(T.obj(1))
    return _comp_pair(H, ident, H.c(T.i(0), T.t(1))), ident


def _build_inv_left(H):
    T = H.tower
    ident = H.backend.identity(T.obj(1))
    return _comp_pair(H, H.witness("w").h, ident), H.c(T.i(0), T.t(1))


def _build_inv_right(H):
    T = H.tower
    ident = H.backend.identity(T.obj(1))
    return _comp_pair(H, ident, H.witness("w").h), H.c(T.i(0), T.s(1))


def _build_vcomp(H):
    T = H.tower
    return H.c(T.s(2), H.P("(2,1,2)", 0)), H.c(T.t(2), H.P("(2,1,2)", 1))


def _build_hcomp(H):
    T = H.tower
    P0, P1 = H.P("(2,0,2)", 0), H.P("(2,0,2)", 1)
    src = _comp_pair(H, H.c(T.s(2), P0), H.c(T.s(2), P1))
    tgt = _comp_pair(H, H.c(T.t(2), P0), H.c(T.t(2), P1))
    return src, tgt


REGISTRY: dict[str, OperationSpec] = {
    op.name: op
    for op in (
        OperationSpec("unit", "(0)", 0, (), _build_unit, "identity 1-cell on a point"),
        OperationSpec("m", "(1,0,1)", 0, (), _build_m, "binary composition of 1-cells"),
        OperationSpec("w", "(1)", 0, (), _build_w, "weak inverse: s w = t, t w = s"),
        OperationSpec("a", "(1,0,1,0,1)", 1, ("m",), _build_a, "associator m(m,1) => m(1,m)"),
        OperationSpec("left_unit", "(1)", 1, ("m",), _build_left_unit, "m(i s, 1) => 1"),
        OperationSpec("right_unit", "(1)", 1, ("m",), _build_right_unit, "m(1, i t) => 1"),
        OperationSpec("inv_left", "(1)", 1, ("m", "w"), _build_inv_left, "m(w, 1) => i t"),
        OperationSpec("inv_right", "(1)", 1, ("m", "w"), _build_inv_right, "m(1, w) => i s"),
        OperationSpec("vcomp", "(2,1,2)", 1, (), _build_vcomp, "vertical composition of 2-cells"),
        OperationSpec("hcomp", "(2,0,2)", 1, ("m",), _build_hcomp, "horizontal composition of 2-cells"),
    )
}


def synth_operation(handle: EndTheoryHandle, name: str, resolve: bool = False) -> OpWitness:
    """Synthesize a named operation.  With ``resolve`` missing prerequisites are
    synthesized first; otherwise they raise ``MissingPrerequisite``."""
    if name in handle.witnesses:
        return handle.witnesses[name]
    try:
        spec = REGISTRY[name]
    except KeyError:
        raise UnknownOperation(f"unknown operation {name!r}; known: {sorted(REGISTRY)}") from None
    for dep in spec.prerequisites:
        if dep not in handle.witnesses:
            if not resolve:
                raise MissingPrerequisite(f"operation {name!r} needs {dep!r} first")
            synth_operation(handle, dep, resolve=True)
    if spec.dim + 1 > handle.tower.N:
        raise TruncationExceeded(f"operation {name!r} needs tower level {spec.dim + 1}, have {handle.tower.N}")
    gp = handle.product(spec.table)
    f, g = spec.build(handle)
    w = lift_parallel(handle.tower, gp, f, g, spec.dim, name=name)
    handle.witnesses[name] = w
    return w


# ---------------------------------------------------------------------------
# The canonical algebra: Theta_0 maps act contravariantly on globular products


def eval_algebra(handle: EndTheoryHandle, theta: Theta0Morphism):
    """``A(cod) -> A(dom)`` induced by ``theta: dom -> cod``."""
    T = handle.tower
    if max(theta.dom.max_dim, theta.cod.max_dim) > T.N:
        raise TruncationExceeded(f"{theta.dom} -> {theta.cod} exceeds tower level {T.N}")
    target = handle.product(theta.cod)
    legs = []
    for j, d in enumerate(theta.dom.segments):
        seg, tag = segment_of(theta.image(d, f"{j}:top"))
        p = target.segment_proj(seg)
        n = theta.cod.segments[seg]
        if tag == "top":
            legs.append(p)
        elif tag[0] == "s":
            legs.append(handle.c(T.iterated_s(n, d), p))
        else:
            legs.append(handle.c(T.iterated_t(n, d), p))
    return handle.tuple(theta.dom, legs)


class EndomorphismTheory(GlobularTheoryModel):
    """The tower's globular products with the Theta_0 action, as a candidate
    globular theory for the product-preservation check."""

    def __init__(self, handle: EndTheoryHandle):
        self.handle = handle

    def obj(self, table):
        return self.handle.product(table).apex

    def arrow(self, theta):
        return eval_algebra(self.handle, theta)

    def compose(self, g, f):
        return self.handle.backend.compose(g, f)

    def mediators(self, apex, legs, table, projections, limit):
        return self.handle.backend.search_morphisms(
            apex, self.obj(table), post=list(zip(projections, legs)), limit=limit
        )

    def test_cones(self, table):
        H = self.handle
        T = H.tower
        gp = H.product(table)
        yield "product", gp.apex, [gp.segment_proj(j) for j in range(len(table.segments))]
        yield "A(0)", T.obj(0), [T.iterated_i(0, n) for n in table.segments]
        # degenerate cone out of the first segment
        first = table.segments[0]
        legs = [H.backend.identity(T.obj(first))]
        for j, (m, d) in enumerate(zip(table.junctions, table.segments[1:])):
            prev = table.segments[j]
            legs.append(H.c(T.iterated_i(m, d), T.iterated_t(prev, m), legs[-1]))
        yield "degenerate", T.obj(first), legs


# ---------------------------------------------------------------------------
# Contractibility certificate


@dataclass
class ContractibilityReport:
    pairs: int = 0
    lifted: int = 0
    oracle_checked: int = 0
    oracle_agreed: int = 0
    failures: list = field(default_factory=list)
    per_table: dict = field(default_factory=dict)

    @property
    def success_rate(self) -> float:
        return 1.0 if self.pairs == 0 else self.lifted / self.pairs

    def ok(self) -> bool:
        return not self.failures and self.lifted == self.pairs and self.oracle_agreed == self.oracle_checked

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "lifted": self.lifted,
            "success_rate": self.success_rate,
            "oracle_checked": self.oracle_checked,
            "oracle_agreed": self.oracle_agreed,
            "failures": self.failures[:20],
            "per_table": self.per_table,
        }


def cell_pool(handle: EndTheoryHandle, table, m: int) -> list:
    """Maps ``A(table) -> A(m)`` under A(0) generated from the operation registry:
    structural maps from Theta_0, degeneracies, and the available operations
    applied to them."""
    table = validate_table(table)
    B, T = handle.backend, handle.tower
    pool: list = []

    def add(x):
        if not any(x == y for y in pool):
            pool.append(x)

    structural = {
        n: [eval_algebra(handle, th) for th in theta0_hom((n,), table)] for n in range(m + 1)
    }
    for x in structural[m]:
        add(x)
    for n in range(m):
        for x in structural[n]:
            add(B.compose(T.iterated_i(n, m), x))
    if m >= 1:
        ops = {name: w for name, w in handle.witnesses.items() if w.dim == m}
        base = list(pool)
        for name, w in sorted(ops.items()):
            if w.table == TableOfDimensions((m - 1,)):
                for x in structural[m - 1]:
                    add(B.compose(w.h, x))
            elif w.table == TableOfDimensions((m,)):
                for x in base:
                    add(B.compose(w.h, x))
            elif w.table == TableOfDimensions((m, m - 1, m)):
                gp = handle.product(w.table)
                for x, y in itertools.product(base, repeat=2):
                    if B.compose(T.t(m), x) == B.compose(T.s(m), y):
                        add(B.compose(w.h, tuple_into(T, gp, [x, y])))
    return pool


def certify_contractible(
    handle: EndTheoryHandle,
    max_dim: int,
    max_len: int,
    budget: int | None = None,
    oracle: bool = False,
    seed: int = 0,
) -> ContractibilityReport:
    """Lift every parallel pair drawn from :func:`cell_pool` over all tables of
    length <= max_len and dimension <= max_dim, into target dimensions <= max_dim.

    ``budget`` caps the number of pairs per (table, m), sampled with ``seed``;
    ``oracle`` cross-checks each pair by exhaustive search.
    """
    report = ContractibilityReport()
    B, T = handle.backend, handle.tower
    rng = random.Random(seed)
    for name in ("unit", "m", "w"):
        if REGISTRY[name].dim + 1 <= T.N and name not in handle.witnesses:
            try:
                synth_operation(handle, name, resolve=True)
            except GlobomegaError as exc:
                report.failures.append(f"synthesis of {name}: {type(exc).__name__}: {exc}")
    for table in all_tables(max_len, max_dim):
        for m in range(max_dim + 1):
            if m + 1 > T.N:
                continue
            key = f"{table}->{m}"
            try:
                gp = handle.product(table)
                pool = cell_pool(handle, table, m)
            except GlobomegaError as exc:
                report.failures.append(f"{key}: {type(exc).__name__}: {exc}")
                continue
            pairs = [
                (f, g)
                for f, g in itertools.product(pool, repeat=2)
                if m == 0 or (
                    B.compose(T.s(m), f) == B.compose(T.s(m), g)
                    and B.compose(T.t(m), f) == B.compose(T.t(m), g)
                )
            ]
            if budget is not None and len(pairs) > budget:
                pairs = rng.sample(pairs, budget)
            lifted = 0
            for f, g in pairs:
                report.pairs += 1
                try:
                    lift_parallel(T, gp, f, g, m)
                    ok = True
                    lifted += 1
                    report.lifted += 1
                except GlobomegaError as exc:
                    ok = False
                    report.failures.append(f"{key}: {type(exc).__name__}: {exc}")
                if oracle:
                    report.oracle_checked += 1
                    found = bool(lifting_oracle(T, gp, f, g, m))
                    if found == ok:
                        report.oracle_agreed += 1
                    else:
                        report.failures.append(f"{key}: oracle found={found}, filler ok={ok}")
            report.per_table[key] = {"pairs": len(pairs), "lifted": lifted}
    return report


# ---------------------------------------------------------------------------
# Homotopy check for composition in the groupoid model


def point(X, x: int):
    """The functor from the terminal groupoid picking the object x."""
    return GroupoidFunctor(terminal_groupoid(), X, [x], [(0,)], [0])


def embed_arrow(tower: PathTower, arrow) -> Any:
    """The 1-cell of the tower corresponding to an arrow ``(a, b, g)`` of X.

    The arrow ``(id_a, f): (a, a) -> (a, b)`` of X x X is lifted along the
    boundary map of level 1, starting at the degenerate path ``i(a)``.
    """
    a, b, g = arrow
    B1 = tower.boundaries[1]
    start, end = B1.index[(a, a)], B1.index[(a, b)]
    label = B1.encode(start, end, 0, g)
    found = lift_arrow(tower.bd[1], tower.incl[0].obj[a], end, label)
    if found is None:
        raise BackendLawFailure("boundary map failed to lift an arrow")
    return point(tower.obj(1), found[0])


def composition_homotopy(handle: EndTheoryHandle, f, g) -> dict:
    """Search X(2) for a 2-cell from ``m(f, g)`` to the embedded composite ``g . f``."""
    T, B = handle.tower, handle.backend
    X = T.obj(0)
    ef, eg = embed_arrow(T, f), embed_arrow(T, g)
    m = handle.witness("m").h
    composite = B.compose(m, handle.tuple("(1,0,1)", [ef, eg]))
    true = embed_arrow(T, X.compose(g, f))
    boundary_ok = (
        B.compose(T.s(1), composite) == B.compose(T.s(1), ef)
        and B.compose(T.t(1), composite) == B.compose(T.t(1), eg)
    )
    cells = B.search_morphisms(
        composite.dom, T.obj(2), post=[(T.s(2), composite), (T.t(2), true)], limit=1
    )
    return {
        "f": list(f),
        "g": list(g),
        "boundary_ok": boundary_ok,
        "two_cell_found": bool(cells),
        "two_cell": cells[0].obj[0] if cells else None,
    }


__all__ = [
    "CellMap",
    "ContractibilityReport",
    "EndTheoryHandle",
    "EndomorphismTheory",
    "GlobularProduct",
    "OpWitness",
    "OperationSpec",
    "REGISTRY",
    "TowerAmbient",
    "cell_pool",
    "composition_homotopy",
    "embed_arrow",
    "certify_contractible",
    "eval_algebra",
    "glob_product_under",
    "lift_parallel",
    "lifting_oracle",
    "point",
    "section_iprime",
    "synth_operation",
    "tuple_into",
]
