"""Finite groupoids as an identity type category.

L-maps are the functors that are injective on objects and equivalences; R-maps
are the isofibrations.  Factorisations use the mapping path object, lifts are
computed by transport along the isofibration.

Representation
--------------
A finite groupoid is stored per connected component: the objects of the
component together with one finite group ``G``.  An arrow is a triple
``(x, y, g)`` with ``x, y`` in the same component and ``g`` an element of
``G``; composition is ``(y, z, h) . (x, y, g) = (x, z, h*g)``.  Every finite
groupoid is isomorphic to one of this form (choose a base object and an arrow
from it to every other object of its component), and the encoding keeps the
size of the data linear in the number of objects, so iterated path objects
stay tractable.

A functor is stored by its object map, a homomorphism ``rho`` of the vertex
group of each component (its value on loops at the base object), and a
``gauge`` per object (the label of the image of ``(base, x, 0)``).  These values
determine the functor on generators, so equality of functors is decidable by
comparing them.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, Sequence

from .errors import (
    BackendLawFailure,
    GroupoidFormatError,
    NotAnRMap,
    NotLMap,
    NotRMap,
    SquareDoesNotCommute,
)
from .groups import FiniteGroup
from .wfs import ITCategory, Pullback

Arrow = tuple[int, int, int]


class FiniteGroupoid:
    def __init__(
        self,
        comp: Sequence[int],
        groups: Sequence[FiniteGroup],
        labels: Sequence | None = None,
        arrow_names: dict[Arrow, str] | None = None,
        arrow_order: Sequence[Arrow] | None = None,
    ):
        comp = tuple(comp)
        groups = tuple(groups)
        seen = -1
        for c in comp:
            if c > seen + 1:
                raise ValueError("components must be numbered by first occurrence")
            seen = max(seen, c)
        if seen + 1 != len(groups):
            raise ValueError("one vertex group per component is required")
        self.comp = comp
        self.groups = groups
        self.labels = tuple(labels) if labels is not None else tuple(range(len(comp)))
        if len(self.labels) != len(comp):
            raise ValueError("one label per object is required")
        members: list[list[int]] = [[] for _ in groups]
        for x, c in enumerate(comp):
            members[c].append(x)
        self.members = tuple(tuple(m) for m in members)
        self.bases = tuple(m[0] for m in self.members)
        self.arrow_names = arrow_names
        self.arrow_order = tuple(arrow_order) if arrow_order is not None else None

    # -- basic structure
    @property
    def n_objects(self) -> int:
        return len(self.comp)

    @property
    def n_components(self) -> int:
        return len(self.groups)

    def group_of(self, x: int) -> FiniteGroup:
        return self.groups[self.comp[x]]

    def base_of(self, x: int) -> int:
        return self.bases[self.comp[x]]

    def arrow_count(self) -> int:
        return sum(len(m) ** 2 * g.order for m, g in zip(self.members, self.groups))

    def arrows(self) -> Iterator[Arrow]:
        if self.arrow_order is not None:
            yield from self.arrow_order
            return
        for c, mem in enumerate(self.members):
            n = self.groups[c].order
            for x in mem:
                for y in mem:
                    for g in range(n):
                        yield (x, y, g)

    def hom(self, x: int, y: int) -> list[Arrow]:
        if self.comp[x] != self.comp[y]:
            return []
        return [(x, y, g) for g in range(self.group_of(x).order)]

    def compose(self, second: Arrow, first: Arrow) -> Arrow:
        x, y, g = first
        y2, z, h = second
        if y != y2:
            raise ValueError("arrows are not composable")
        return (x, z, self.group_of(x).mul(h, g))

    def identity_arrow(self, x: int) -> Arrow:
        return (x, x, 0)

    def inverse(self, a: Arrow) -> Arrow:
        x, y, g = a
        return (y, x, self.group_of(x).inverse(g))

    @cached_property
    def _label_index(self) -> dict:
        return {label: i for i, label in enumerate(self.labels)}

    def index_of(self, label) -> int:
        return self._label_index[label]

    def object_name(self, x: int) -> str:
        label = self.labels[x]
        return label if isinstance(label, str) else f"o{x}"

    def arrow_name(self, a: Arrow) -> str:
        if self.arrow_names is not None:
            return self.arrow_names[a]
        x, y, g = a
        return f"{self.object_name(x)}>{self.object_name(y)}#{g}"

    def describe(self) -> dict:
        return {
            "objects": self.n_objects,
            "arrows": self.arrow_count(),
            "components": self.n_components,
            "vertex_group_orders": [g.order for g in self.groups],
        }

    # -- equality
    def _key(self):
        return (self.comp, self.groups, self.labels)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, FiniteGroupoid) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self.comp, self.labels))

    def __repr__(self) -> str:
        return f"FiniteGroupoid(objects={self.n_objects}, arrows={self.arrow_count()})"


# ---------------------------------------------------------------------------
# Functors


class GroupoidFunctor:
    def __init__(
        self,
        dom: FiniteGroupoid,
        cod: FiniteGroupoid,
        obj: Sequence[int],
        rho: Sequence[Sequence[int]],
        gauge: Sequence[int],
        check: bool = True,
    ):
        self.dom = dom
        self.cod = cod
        self.obj = tuple(obj)
        self.rho = tuple(tuple(r) for r in rho)
        self.gauge = tuple(gauge)
        if check:
            self._validate()

    def _validate(self) -> None:
        dom, cod = self.dom, self.cod
        if len(self.obj) != dom.n_objects or len(self.gauge) != dom.n_objects:
            raise ValueError("object map and gauge need one entry per object")
        if len(self.rho) != dom.n_components:
            raise ValueError("one vertex homomorphism per component is required")
        for y in self.obj:
            if not 0 <= y < cod.n_objects:
                raise ValueError("object map leaves the codomain")
        for c, mem in enumerate(dom.members):
            tc = cod.comp[self.obj[mem[0]]]
            target = cod.groups[tc]
            if any(cod.comp[self.obj[x]] != tc for x in mem):
                raise ValueError("a connected component must map into one component")
            if self.gauge[mem[0]] != 0:
                raise ValueError("gauge must vanish at base objects")
            if any(not 0 <= self.gauge[x] < target.order for x in mem):
                raise ValueError("gauge leaves the target vertex group")
            r = self.rho[c]
            if len(r) != dom.groups[c].order or any(not 0 <= v < target.order for v in r):
                raise ValueError("vertex map has the wrong shape")
            if not dom.groups[c].is_hom(r, target):
                raise ValueError("vertex map is not a homomorphism")

    @classmethod
    def from_arrow_fn(
        cls,
        dom: FiniteGroupoid,
        cod: FiniteGroupoid,
        obj: Sequence[int],
        fn: Callable[[int, int, int], int],
        check: bool = True,
    ) -> "GroupoidFunctor":
        """Build a functor from its action on arrows, ``fn(x, y, g) -> label``.

        ``fn`` is sampled on generators only; it must be functorial.
        """
        rho = []
        gauge = [0] * dom.n_objects
        for c, mem in enumerate(dom.members):
            b = mem[0]
            rho.append(tuple(fn(b, b, g) for g in range(dom.groups[c].order)))
            for x in mem[1:]:
                gauge[x] = fn(b, x, 0)
        return cls(dom, cod, obj, rho, gauge, check=check)

    @classmethod
    def identity(cls, X: FiniteGroupoid) -> "GroupoidFunctor":
        return cls(
            X,
            X,
            range(X.n_objects),
            [tuple(range(g.order)) for g in X.groups],
            [0] * X.n_objects,
            check=False,
        )

    def label(self, x: int, y: int, g: int) -> int:
        """Label of the image of the arrow ``(x, y, g)``."""
        G = self.cod.group_of(self.obj[x])
        c = self.dom.comp[x]
        return G.mul3(self.gauge[y], self.rho[c][g], G.inverse(self.gauge[x]))

    def __call__(self, a: Arrow) -> Arrow:
        x, y, g = a
        return (self.obj[x], self.obj[y], self.label(x, y, g))

    def then(self, other: "GroupoidFunctor") -> "GroupoidFunctor":
        if self.cod != other.dom:
            raise ValueError("functors are not composable")
        obj = tuple(other.obj[y] for y in self.obj)
        return GroupoidFunctor.from_arrow_fn(
            self.dom,
            other.cod,
            obj,
            lambda x, y, g: other.label(self.obj[x], self.obj[y], self.label(x, y, g)),
            check=False,
        )

    @cached_property
    def preimages(self) -> tuple[tuple[int, ...], ...]:
        pre: list[list[int]] = [[] for _ in range(self.cod.n_objects)]
        for x, y in enumerate(self.obj):
            pre[y].append(x)
        return tuple(tuple(p) for p in pre)

    @cached_property
    def rho_inverse(self) -> tuple[dict[int, int], ...]:
        out = []
        for r in self.rho:
            inv: dict[int, int] = {}
            for g, v in enumerate(r):
                inv.setdefault(v, g)
            out.append(inv)
        return tuple(out)

    def _key(self):
        return (self.obj, self.rho, self.gauge)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, GroupoidFunctor)
            and self._key() == other._key()
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return f"GroupoidFunctor({self.dom!r} -> {self.cod!r})"

    def is_identity(self) -> bool:
        return self == GroupoidFunctor.identity(self.dom)

    def to_json(self) -> dict:
        return {
            "dom": self.dom.describe(),
            "cod": self.cod.describe(),
            "objects": list(self.obj),
            "vertex_maps": [list(r) for r in self.rho],
            "gauge": list(self.gauge),
        }


def first_difference(F: GroupoidFunctor, G: GroupoidFunctor):
    if F.dom != G.dom or F.cod != G.cod:
        return "domain/codomain"
    for x, (a, b) in enumerate(zip(F.obj, G.obj)):
        if a != b:
            return f"object {F.dom.labels[x]!r}: {F.cod.labels[a]!r} != {G.cod.labels[b]!r}"
    for c, b in enumerate(F.dom.bases):
        for g in range(F.dom.groups[c].order):
            if F.rho[c][g] != G.rho[c][g]:
                return f"loop ({F.dom.labels[b]!r}, g={g}): {F.rho[c][g]} != {G.rho[c][g]}"
    for x, (a, b) in enumerate(zip(F.gauge, G.gauge)):
        if a != b:
            return f"arrow from base to {F.dom.labels[x]!r}: {a} != {b}"
    return None


# ---------------------------------------------------------------------------
# Classification of maps


def isofibration_failure(F: GroupoidFunctor):
    """None if F is an isofibration, otherwise an arrow of the codomain that
    does not lift, as ``(dom object, cod arrow)``."""
    dom, cod = F.dom, F.cod
    for c, mem in enumerate(dom.members):
        tc = cod.comp[F.obj[mem[0]]]
        G = cod.groups[tc]
        image = set(F.rho[c])
        reach: dict[int, set[int]] = defaultdict(set)
        for x in mem:
            reach[F.obj[x]].update(G.mul(F.gauge[x], h) for h in image)
        for y in cod.members[tc]:
            covered = reach.get(y, set())
            if len(covered) != G.order:
                missing = min(set(range(G.order)) - covered)
                # an arrow out of F(base) that has no lift starting at base
                a0 = mem[0]
                arrow = (F.obj[a0], y, G.mul(missing, G.inverse(F.gauge[a0])))
                return (a0, arrow)
    return None


def is_isofibration(F: GroupoidFunctor) -> bool:
    cached = F.__dict__.get("_is_R")
    if cached is None:
        cached = F.__dict__["_is_R"] = isofibration_failure(F) is None
    return cached


def is_injective_equivalence(F: GroupoidFunctor) -> bool:
    cached = F.__dict__.get("_is_L")
    if cached is None:
        cached = F.__dict__["_is_L"] = _injective_equivalence(F)
    return cached


def _injective_equivalence(F: GroupoidFunctor) -> bool:
    dom, cod = F.dom, F.cod
    if len(set(F.obj)) != dom.n_objects:
        return False
    comp_map = [cod.comp[F.obj[b]] for b in dom.bases]
    if sorted(comp_map) != list(range(cod.n_components)):
        return False
    for c, r in enumerate(F.rho):
        if dom.groups[c].order != cod.groups[comp_map[c]].order or len(set(r)) != len(r):
            return False
    return True


def is_groupoid_iso(F: GroupoidFunctor) -> bool:
    return is_injective_equivalence(F) and F.dom.n_objects == F.cod.n_objects


def lift_arrow(r: GroupoidFunctor, e: int, target: int, label: int) -> tuple[int, int] | None:
    """Least ``(e2, g)`` with ``r(e, e2, g) == (r(e), target, label)``."""
    E = r.dom
    for e2 in r.preimages[target]:
        if E.comp[e2] != E.comp[e]:
            continue
        for g in range(E.group_of(e).order):
            if r.label(e, e2, g) == label:
                return e2, g
    return None


# ---------------------------------------------------------------------------
# Constructions


def terminal_groupoid() -> FiniteGroupoid:
    return _TERMINAL


_TERMINAL = FiniteGroupoid((0,), (FiniteGroup.trivial(),), labels=("pt",))


def to_terminal(X: FiniteGroupoid) -> GroupoidFunctor:
    return GroupoidFunctor(
        X,
        _TERMINAL,
        [0] * X.n_objects,
        [tuple(0 for _ in range(g.order)) for g in X.groups],
        [0] * X.n_objects,
        check=False,
    )


def mapping_path_factorize(F: GroupoidFunctor) -> tuple[GroupoidFunctor, GroupoidFunctor]:
    """Factor ``F: A -> B`` as ``A -> P -> B`` through the mapping path object.

    Objects of P are pairs ``(a, beta: F a -> b)``; an arrow ``(a, beta) -> (a2, beta2)``
    is an arrow ``u: a -> a2`` of A (the B-component is then forced to be
    ``beta2 . F u . beta^-1``).
    """
    A, B = F.dom, F.cod
    labels, comp = [], []
    for a in range(A.n_objects):
        fa = F.obj[a]
        order = B.group_of(fa).order
        for b in B.members[B.comp[fa]]:
            for k in range(order):
                labels.append(("path", a, b, k))
                comp.append(A.comp[a])
    P = FiniteGroupoid(comp, A.groups, labels)
    index = P._label_index
    l_obj = [index[("path", a, F.obj[a], 0)] for a in range(A.n_objects)]
    l = GroupoidFunctor(
        A, P, l_obj, [tuple(range(g.order)) for g in A.groups], [0] * A.n_objects, check=False
    )
    r_obj = [lab[2] for lab in labels]

    def r_label(x, y, g):
        _, a, b, k = labels[x]
        _, a2, b2, k2 = labels[y]
        G = B.group_of(b)
        return G.mul3(k2, F.label(a, a2, g), G.inverse(k))

    r = GroupoidFunctor.from_arrow_fn(P, B, r_obj, r_label, check=False)
    return l, r


@dataclass(frozen=True, eq=False)
class GroupoidPullback(Pullback):
    index: dict = field(default_factory=dict)
    charts: tuple = ()
    kgroups: tuple = ()
    kelements: tuple = ()
    kindex: tuple = ()

    def encode(self, x: int, y: int, ga: int, hb: int) -> int:
        """Label of the pullback arrow ``x -> y`` with components ``ga`` in A and ``hb`` in B."""
        A, B = self.left.dom, self.right.dom
        (gx, hx), (gy, hy) = self.charts[x], self.charts[y]
        a = self.p.obj[x]
        b = self.q.obj[x]
        GA, GB = A.group_of(a), B.group_of(b)
        key = (GA.mul3(GA.inverse(gy), ga, gx), GB.mul3(GB.inverse(hy), hb, hx))
        c = self.apex.comp[x]
        try:
            return self.kindex[c][key]
        except KeyError:
            raise SquareDoesNotCommute("arrow pair does not lie in the pullback") from None


def strict_pullback(f: GroupoidFunctor, r: GroupoidFunctor) -> GroupoidPullback:
    A, B, C = f.dom, r.dom, f.cod
    if r.cod != C:
        raise NotAnRMap("cospan legs have different codomains")
    objs = [(a, b) for a in range(A.n_objects) for b in r.preimages[f.obj[a]]]
    index = {ab: i for i, ab in enumerate(objs)}
    classes: dict[tuple[int, int], list[int]] = defaultdict(list)
    for i, (a, b) in enumerate(objs):
        classes[(A.comp[a], B.comp[b])].append(i)
    rho_pre = r.rho_inverse

    comp = [-1] * len(objs)
    charts: list[tuple[int, int] | None] = [None] * len(objs)
    kgroups, kelements, kindex = [], [], []
    for i, (a0, b0) in enumerate(objs):
        if comp[i] >= 0:
            continue
        c = len(kgroups)
        GA, GB = A.group_of(a0), B.group_of(b0)
        elems = [
            (g, h)
            for g in range(GA.order)
            for h in range(GB.order)
            if f.label(a0, a0, g) == r.label(b0, b0, h)
        ]
        group, kidx = FiniteGroup.from_elements(
            elems, lambda u, v: (GA.mul(u[0], v[0]), GB.mul(u[1], v[1]))
        )
        kgroups.append(group)
        kelements.append(tuple(elems))
        kindex.append(kidx)
        comp[i] = c
        charts[i] = (0, 0)
        GC = C.group_of(f.obj[a0])
        bc = B.comp[b0]
        for j in classes[(A.comp[a0], B.comp[b0])]:
            if comp[j] >= 0:
                continue
            a, b = objs[j]
            for g in range(GA.order):
                want = f.label(a0, a, g)
                # r.label(b0, b, h) = gauge[b] rho(h) gauge[b0]^-1
                core = GC.mul3(GC.inverse(r.gauge[b]), want, r.gauge[b0])
                h = rho_pre[bc].get(core)
                if h is not None:
                    comp[j] = c
                    charts[j] = (g, h)
                    break
    apex = FiniteGroupoid(comp, kgroups, [("pair", a, b) for a, b in objs])

    def p_label(x, y, k):
        gx, gy = charts[x][0], charts[y][0]
        G = A.group_of(objs[x][0])
        return G.mul3(gy, kelements[comp[x]][k][0], G.inverse(gx))

    def q_label(x, y, k):
        hx, hy = charts[x][1], charts[y][1]
        G = B.group_of(objs[x][1])
        return G.mul3(hy, kelements[comp[x]][k][1], G.inverse(hx))

    p = GroupoidFunctor.from_arrow_fn(apex, A, [a for a, _ in objs], p_label, check=False)
    q = GroupoidFunctor.from_arrow_fn(apex, B, [b for _, b in objs], q_label, check=False)
    return GroupoidPullback(
        f, r, apex, p, q,
        index=index,
        charts=tuple(charts),
        kgroups=tuple(kgroups),
        kelements=tuple(kelements),
        kindex=tuple(kindex),
    )


def pullback_along_R(f: GroupoidFunctor, r: GroupoidFunctor) -> GroupoidPullback:
    if not is_isofibration(r):
        raise NotAnRMap("the designated leg is not an isofibration")
    return strict_pullback(f, r)


def pair_into(pb: GroupoidPullback, x: GroupoidFunctor, y: GroupoidFunctor) -> GroupoidFunctor:
    Z = x.dom
    try:
        obj = [pb.index[(x.obj[z], y.obj[z])] for z in range(Z.n_objects)]
    except KeyError:
        raise SquareDoesNotCommute("cone does not commute on objects") from None
    return GroupoidFunctor.from_arrow_fn(
        Z,
        pb.apex,
        obj,
        lambda z, w, g: pb.encode(obj[z], obj[w], x.label(z, w, g), y.label(z, w, g)),
        check=False,
    )


def lift_square(
    l: GroupoidFunctor, r: GroupoidFunctor, top: GroupoidFunctor, bottom: GroupoidFunctor
) -> GroupoidFunctor:
    """A diagonal ``d`` with ``d . l == top`` and ``r . d == bottom``.

    Objects outside the image of l are reached from the least image object
    in their component; the image of that connecting arrow under ``bottom`` is
    lifted along ``r`` (least target object, then least label).
    """
    if not is_injective_equivalence(l):
        raise NotLMap("left leg is not an injective equivalence")
    if not is_isofibration(r):
        raise NotRMap("right leg is not an isofibration")
    if top.then(r) != l.then(bottom):
        raise SquareDoesNotCommute("lifting square does not commute")
    A, B, E = l.dom, l.cod, r.dom
    preimage = {y: a for a, y in enumerate(l.obj)}
    least_in_comp: dict[int, int] = {}
    for a in range(A.n_objects):
        least_in_comp.setdefault(B.comp[l.obj[a]], a)

    anchor: list[tuple[int, int, int]] = []
    d_obj: list[int] = []
    for b in range(B.n_objects):
        if b in preimage:
            a = preimage[b]
            anchor.append((a, 0, 0))
            d_obj.append(top.obj[a])
            continue
        a = least_in_comp[B.comp[b]]
        lam = bottom.label(l.obj[a], b, 0)
        found = lift_arrow(r, top.obj[a], bottom.obj[b], lam)
        if found is None:
            raise BackendLawFailure("isofibration failed to lift an arrow")
        e2, g = found
        anchor.append((a, 0, g))
        d_obj.append(e2)

    def d_label(b1, b2, beta):
        a1, k1, e1 = anchor[b1]
        a2, k2, e2 = anchor[b2]
        GB = B.group_of(b1)
        alpha = GB.mul3(GB.inverse(k2), beta, k1)
        core = GB.mul3(GB.inverse(l.gauge[a2]), alpha, l.gauge[a1])
        g = l.rho_inverse[A.comp[a1]][core]
        GE = E.group_of(d_obj[b1])
        return GE.mul3(e2, top.label(a1, a2, g), GE.inverse(e1))

    d = GroupoidFunctor.from_arrow_fn(B, E, d_obj, d_label, check=False)
    if l.then(d) != top or d.then(r) != bottom:
        raise BackendLawFailure("constructed diagonal does not fill the square")
    return d


# ---------------------------------------------------------------------------
# Exhaustive search (oracle)


def search_functors(dom, cod, post=(), pre=(), limit=None) -> list[GroupoidFunctor]:
    """All functors ``h: dom -> cod`` with ``G . h == K`` for each ``(G, K)`` in
    ``post`` and ``h . l == T`` for each ``(l, T)`` in ``pre``.

    The search backtracks over object images and arrow labels; components are
    independent, so solutions are combined as a product.
    """
    forced: dict[int, int] = {}
    arrow_req: list[tuple[int, int, int, int]] = []  # (x, y, g, wanted label)
    for l, T in pre:
        W = l.dom
        for w in range(W.n_objects):
            if forced.setdefault(l.obj[w], T.obj[w]) != T.obj[w]:
                return []
        for c, mem in enumerate(W.members):
            w0 = mem[0]
            for g in range(W.groups[c].order):
                arrow_req.append((l.obj[w0], l.obj[w0], l.label(w0, w0, g), T.label(w0, w0, g)))
            for w in mem[1:]:
                arrow_req.append((l.obj[w0], l.obj[w], l.label(w0, w, 0), T.label(w0, w, 0)))

    per_comp = []
    cap = limit
    for c in range(dom.n_components):
        reqs = [rq for rq in arrow_req if dom.comp[rq[0]] == c]
        sols = list(itertools.islice(_search_component(dom, cod, c, post, forced, reqs), cap))
        if not sols:
            return []
        per_comp.append(sols)

    out = []
    for combo in itertools.product(*per_comp):
        obj = [0] * dom.n_objects
        gauge = [0] * dom.n_objects
        rho = []
        for c, (assign, r) in enumerate(combo):
            rho.append(r)
            for x, (y, gx) in assign.items():
                obj[x] = y
                gauge[x] = gx
        out.append(GroupoidFunctor(dom, cod, obj, rho, gauge, check=False))
        if limit is not None and len(out) >= limit:
            break
    return out


def _search_component(dom, cod, c, post, forced, reqs):
    mem = dom.members[c]
    b = mem[0]
    G = dom.groups[c]
    pos = {x: i for i, x in enumerate(mem)}
    # requirements become checkable once both endpoints are assigned
    due: dict[int, list] = defaultdict(list)
    for x, y, g, want in reqs:
        due[max(pos[x], pos[y])].append((x, y, g, want))

    forced_comps = {cod.comp[forced[x]] for x in mem if x in forced}
    if len(forced_comps) > 1:
        return
    comps = sorted(forced_comps) if forced_comps else range(cod.n_components)

    for tc in comps:
        T = cod.groups[tc]
        targets = cod.members[tc]

        def candidates(x):
            ys = [forced[x]] if x in forced else targets
            return [
                y for y in ys
                if cod.comp[y] == tc and all(Gp.obj[y] == Kp.obj[x] for Gp, Kp in post)
            ]

        cand = {x: candidates(x) for x in mem}
        if any(not cand[x] for x in mem):
            continue
        for hb in cand[b]:
            for r in G.homs_to(T):
                if not all(
                    Gp.label(hb, hb, r[g]) == Kp.label(b, b, g)
                    for Gp, Kp in post
                    for g in range(G.order)
                ):
                    continue
                assign = {b: (hb, 0)}
                if not _requirements_hold(due[0], assign, r, T):
                    continue
                yield from _extend_component(mem, 1, assign, r, T, b, cand, post, due)


def _requirements_hold(reqs, assign, r, T) -> bool:
    for x, y, g, want in reqs:
        gx, gy = assign[x][1], assign[y][1]
        if T.mul3(gy, r[g], T.inverse(gx)) != want:
            return False
    return True


def _extend_component(mem, i0, assign, r, T, b, cand, post, due):
    """Assign ``mem[i0:]`` in order; an explicit stack keeps large components
    clear of the recursion limit."""
    hb = assign[b][0]
    n = len(mem)
    if i0 == n:
        yield dict(assign), tuple(r)
        return

    def options(x):
        for y in cand[x]:
            for gx in range(T.order):
                if all(Gp.label(hb, y, gx) == Kp.label(b, x, 0) for Gp, Kp in post):
                    yield y, gx

    stack = [options(mem[i0])]
    while stack:
        i = i0 + len(stack) - 1
        x = mem[i]
        for choice in stack[-1]:
            assign[x] = choice
            if _requirements_hold(due[i], assign, r, T):
                break
        else:
            assign.pop(x, None)
            stack.pop()
            continue
        if i + 1 == n:
            yield dict(assign), tuple(r)
        else:
            stack.append(options(mem[i + 1]))


# ---------------------------------------------------------------------------
# Backend


class GroupoidBackend(ITCategory):
    name = "groupoid"

    def identity(self, X):
        return GroupoidFunctor.identity(X)

    def compose(self, g, f):
        return f.then(g)

    def terminal(self):
        return _TERMINAL

    def to_terminal(self, X):
        return to_terminal(X)

    def pullback(self, f, r):
        return pullback_along_R(f, r)

    def pair(self, pb, x, y):
        return pair_into(pb, x, y)

    def factorize(self, f):
        return mapping_path_factorize(f)

    def lift(self, l, r, top, bottom):
        return lift_square(l, r, top, bottom)

    def is_L(self, f):
        return is_injective_equivalence(f)

    def is_R(self, f):
        return is_isofibration(f)

    def is_iso(self, f):
        return is_groupoid_iso(f)

    def search_morphisms(self, dom, cod, post=(), pre=(), limit=None):
        return search_functors(dom, cod, post, pre, limit)

    def first_difference(self, f, g):
        return first_difference(f, g)

    def describe(self, X):
        return {"objects": X.n_objects, "arrows": X.arrow_count()}

    def sample_objects(self, rng, count):
        return [random_groupoid(rng) for _ in range(count)]

    def sample_morphisms(self, rng, count):
        out = []
        for _ in range(count):
            A, B = random_groupoid(rng), random_groupoid(rng, min_objects=1)
            out.append(random_functor(rng, A, B))
        return out


# ---------------------------------------------------------------------------
# Random samples and named groupoids


def random_groupoid(rng: random.Random, max_objects: int = 4, max_group: int = 3, min_objects: int = 0) -> FiniteGroupoid:
    n = rng.randint(min_objects, max_objects)
    comp: list[int] = []
    n_comps = 0
    for _ in range(n):
        c = rng.randint(0, n_comps)
        comp.append(c)
        n_comps = max(n_comps, c + 1)
    groups = [FiniteGroup.cyclic(rng.randint(1, max_group)) for _ in range(n_comps)]
    return FiniteGroupoid(comp, groups, [f"x{i}" for i in range(n)])


def random_functor(rng: random.Random, A: FiniteGroupoid, B: FiniteGroupoid) -> GroupoidFunctor:
    obj = [0] * A.n_objects
    gauge = [0] * A.n_objects
    rho = []
    for c, mem in enumerate(A.members):
        tc = rng.randrange(B.n_components)
        T = B.groups[tc]
        homs = list(A.groups[c].homs_to(T))
        rho.append(rng.choice(homs))
        for i, x in enumerate(mem):
            obj[x] = rng.choice(B.members[tc])
            gauge[x] = 0 if i == 0 else rng.randrange(T.order)
    return GroupoidFunctor(A, B, obj, rho, gauge)


def _doc_from_group(objects: Sequence[str], group: FiniteGroup, prefix: str = "g") -> dict:
    """JSON document of the groupoid with the given objects, contractible
    except for the vertex group ``group``."""
    arrows, names = [], {}
    for x in objects:
        for y in objects:
            for g in range(group.order):
                name = f"{prefix}{g}" if len(objects) == 1 else f"{x}{y}{g}"
                names[(x, y, g)] = name
                arrows.append({"name": name, "src": x, "tgt": y})
    compose = []
    for x in objects:
        for y in objects:
            for z in objects:
                for g in range(group.order):
                    for h in range(group.order):
                        compose.append([names[(y, z, h)], names[(x, y, g)], names[(x, z, group.mul(h, g))]])
    return {
        "objects": list(objects),
        "arrows": arrows,
        "compose": compose,
        "identities": {x: names[(x, x, 0)] for x in objects},
    }


def bz(n: int) -> FiniteGroupoid:
    """The one-object groupoid with vertex group Z/n."""
    return groupoid_from_doc(_doc_from_group(["*"], FiniteGroup.cyclic(n)))


def contractible(n: int) -> FiniteGroupoid:
    """The codiscrete groupoid on n objects (one arrow between any two)."""
    return groupoid_from_doc(_doc_from_group([f"x{i}" for i in range(n)], FiniteGroup.trivial(), "e"))


def discrete(n: int) -> FiniteGroupoid:
    objects = [f"x{i}" for i in range(n)]
    doc = {
        "objects": objects,
        "arrows": [{"name": f"id_{x}", "src": x, "tgt": x} for x in objects],
        "compose": [[f"id_{x}", f"id_{x}", f"id_{x}"] for x in objects],
        "identities": {x: f"id_{x}" for x in objects},
    }
    return groupoid_from_doc(doc)


# ---------------------------------------------------------------------------
# JSON format


def groupoid_from_json(text: str) -> FiniteGroupoid:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GroupoidFormatError(f"invalid JSON: {exc}") from None
    return groupoid_from_doc(doc)


def groupoid_from_doc(doc) -> FiniteGroupoid:
    if not isinstance(doc, dict):
        raise GroupoidFormatError("groupoid document must be a JSON object")
    for key in ("objects", "arrows", "compose", "identities"):
        if key not in doc:
            raise GroupoidFormatError(f"missing key {key!r}")
    objects = doc["objects"]
    if not isinstance(objects, list) or not all(isinstance(o, str) for o in objects):
        raise GroupoidFormatError("objects must be a list of names")
    if len(set(objects)) != len(objects):
        raise GroupoidFormatError("duplicate object names")
    opos = {o: i for i, o in enumerate(objects)}

    names, src, tgt = [], [], []
    for entry in doc["arrows"]:
        if not isinstance(entry, dict) or set(entry) != {"name", "src", "tgt"}:
            raise GroupoidFormatError(f"arrow entry {entry!r} must have exactly name, src, tgt")
        name = entry["name"]
        if not isinstance(name, str):
            raise GroupoidFormatError(f"arrow name {name!r} is not a string")
        if entry["src"] not in opos or entry["tgt"] not in opos:
            raise GroupoidFormatError(f"arrow {name!r} has an unknown endpoint")
        names.append(name)
        src.append(opos[entry["src"]])
        tgt.append(opos[entry["tgt"]])
    if len(set(names)) != len(names):
        raise GroupoidFormatError("duplicate arrow names")
    apos = {n: i for i, n in enumerate(names)}

    ident = doc["identities"]
    if not isinstance(ident, dict) or set(ident) != set(objects):
        raise GroupoidFormatError("identities must name one arrow per object")
    id_of = []
    for o in objects:
        a = ident[o]
        if a not in apos:
            raise GroupoidFormatError(f"identity of {o!r} is the unknown arrow {a!r}")
        if src[apos[a]] != opos[o] or tgt[apos[a]] != opos[o]:
            raise GroupoidFormatError(f"identity arrow {a!r} is not a loop at {o!r}")
        id_of.append(apos[a])

    table: dict[tuple[int, int], int] = {}
    for entry in doc["compose"]:
        if not (isinstance(entry, list) and len(entry) == 3 and all(e in apos for e in entry)):
            raise GroupoidFormatError(f"composition entry {entry!r} must be three known arrow names")
        left, right, res = (apos[e] for e in entry)
        if tgt[right] != src[left]:
            raise GroupoidFormatError(f"composition entry {entry!r}: {entry[0]} . {entry[1]} is not composable")
        if src[res] != src[right] or tgt[res] != tgt[left]:
            raise GroupoidFormatError(f"composition entry {entry!r}: result has the wrong endpoints")
        if table.setdefault((left, right), res) != res:
            raise GroupoidFormatError(f"composition entry {entry!r} conflicts with an earlier entry")

    n_arrows = len(names)
    out_of: list[list[int]] = [[] for _ in objects]
    for a in range(n_arrows):
        out_of[src[a]].append(a)
    for right in range(n_arrows):
        for left in out_of[tgt[right]]:
            if (left, right) not in table:
                raise GroupoidFormatError(f"missing composition {names[left]} . {names[right]}")
    for a in range(n_arrows):
        if table[(a, id_of[src[a]])] != a or table[(id_of[tgt[a]], a)] != a:
            raise GroupoidFormatError(f"identity law fails for arrow {names[a]!r}")
    for f in range(n_arrows):
        for g in out_of[tgt[f]]:
            gf = table[(g, f)]
            for h in out_of[tgt[g]]:
                if table[(h, gf)] != table[(table[(h, g)], f)]:
                    raise GroupoidFormatError(
                        f"associativity fails for {names[h]} . {names[g]} . {names[f]}"
                    )
    inverse = []
    for a in range(n_arrows):
        inv = next(
            (b for b in out_of[tgt[a]] if table[(b, a)] == id_of[src[a]] and table[(a, b)] == id_of[tgt[a]]),
            None,
        )
        if inv is None:
            raise GroupoidFormatError(f"arrow {names[a]!r} has no inverse")
        inverse.append(inv)

    # connected components, numbered by first object
    comp_of = [-1] * len(objects)
    n_comps = 0
    for o in range(len(objects)):
        if comp_of[o] >= 0:
            continue
        stack = [o]
        comp_of[o] = n_comps
        while stack:
            x = stack.pop()
            for a in out_of[x]:
                if comp_of[tgt[a]] < 0:
                    comp_of[tgt[a]] = n_comps
                    stack.append(tgt[a])
        n_comps += 1

    base = [-1] * n_comps
    for o in range(len(objects)):
        if base[comp_of[o]] < 0:
            base[comp_of[o]] = o
    groups, elem_index = [], []
    for c in range(n_comps):
        b = base[c]
        loops = [id_of[b]] + [a for a in out_of[b] if tgt[a] == b and a != id_of[b]]
        group, idx = FiniteGroup.from_elements(loops, lambda u, v: table[(u, v)])
        groups.append(group)
        elem_index.append(idx)
    chart = []
    for o in range(len(objects)):
        b = base[comp_of[o]]
        chart.append(id_of[o] if o == b else next(a for a in out_of[b] if tgt[a] == o))

    arrow_names: dict[Arrow, str] = {}
    arrow_order: list[Arrow] = []
    for a in range(n_arrows):
        x, y = src[a], tgt[a]
        loop = table[(inverse[chart[y]], table[(a, chart[x])])]
        key = (x, y, elem_index[comp_of[x]][loop])
        arrow_names[key] = names[a]
        arrow_order.append(key)
    return FiniteGroupoid(comp_of, groups, objects, arrow_names=arrow_names, arrow_order=arrow_order)


def groupoid_to_doc(G: FiniteGroupoid) -> dict:
    arrows = list(G.arrows())
    by_src: dict[int, list[Arrow]] = defaultdict(list)
    for a in arrows:
        by_src[a[0]].append(a)
    compose = []
    for right in arrows:
        for left in by_src[right[1]]:
            compose.append([G.arrow_name(left), G.arrow_name(right), G.arrow_name(G.compose(left, right))])
    return {
        "objects": [G.object_name(x) for x in range(G.n_objects)],
        "arrows": [
            {"name": G.arrow_name(a), "src": G.object_name(a[0]), "tgt": G.object_name(a[1])}
            for a in arrows
        ],
        "compose": compose,
        "identities": {G.object_name(x): G.arrow_name((x, x, 0)) for x in range(G.n_objects)},
    }


def groupoid_to_json(G: FiniteGroupoid) -> str:
    return json.dumps(groupoid_to_doc(G), sort_keys=True, indent=1) + "\n"
