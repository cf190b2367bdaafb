"""Identity type categories: the backend interface, its law suite, and the
degenerate backend on finite sets with (bijections, all maps) as the weak
factorisation system.
"""

from __future__ import annotations

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .errors import NotAnRMap, NotLMap, SquareDoesNotCommute


@dataclass(frozen=True, eq=False)
class Pullback:
    """A chosen pullback of ``left: A -> C`` along the R-map ``right: B -> C``.

    ``p`` projects to A and ``q`` to B, so ``left . p == right . q``.
    """

    left: Any
    right: Any
    apex: Any
    p: Any
    q: Any


class ITCategory(ABC):
    """A category with a weak factorisation system (L, R), a terminal object
    whose unique maps are in R, pullbacks of R-maps, and L stable under
    pullback along R.

    Morphisms are value objects compared with ``==`` and carrying ``dom`` and
    ``cod`` attributes.
    """

    name = "abstract"

    # category structure
    @abstractmethod
    def identity(self, X): ...

    @abstractmethod
    def compose(self, g, f):
        """``g . f`` (first f, then g)."""

    def compose_all(self, *maps):
        """``compose_all(h, g, f) == h . g . f``."""
        out = maps[-1]
        for m in reversed(maps[:-1]):
            out = self.compose(m, out)
        return out

    @abstractmethod
    def terminal(self): ...

    @abstractmethod
    def to_terminal(self, X): ...

    # limits
    @abstractmethod
    def pullback(self, f, r) -> Pullback: ...

    @abstractmethod
    def pair(self, pb: Pullback, x, y):
        """The mediating map into ``pb.apex`` of a cone ``(x, y)``."""

    # weak factorisation system
    @abstractmethod
    def factorize(self, f) -> tuple[Any, Any]: ...

    @abstractmethod
    def lift(self, l, r, top, bottom): ...

    @abstractmethod
    def is_L(self, f) -> bool: ...

    @abstractmethod
    def is_R(self, f) -> bool: ...

    # decision procedures used by checkers and oracles
    @abstractmethod
    def is_iso(self, f) -> bool: ...

    @abstractmethod
    def search_morphisms(self, dom, cod, post=(), pre=(), limit=None) -> list:
        """Exhaustively search maps ``h: dom -> cod`` with ``G . h == K`` for
        every ``(G, K)`` in ``post`` and ``h . l == T`` for every ``(l, T)`` in
        ``pre``.  Stops after ``limit`` solutions when given."""

    @abstractmethod
    def first_difference(self, f, g):
        """None when ``f == g``, otherwise a description of a datum where they differ."""

    @abstractmethod
    def describe(self, X) -> dict: ...

    @abstractmethod
    def sample_objects(self, rng: random.Random, count: int) -> list: ...

    @abstractmethod
    def sample_morphisms(self, rng: random.Random, count: int) -> list: ...

    # derived constructions
    def product(self, X, Y) -> Pullback:
        return self.pullback(self.to_terminal(X), self.to_terminal(Y))

    def diagonal(self, X):
        pb = self.product(X, X)
        one = self.identity(X)
        return self.pair(pb, one, one), pb


# ---------------------------------------------------------------------------
# Finite sets


@dataclass(frozen=True)
class FinSet:
    labels: tuple

    def __len__(self):
        return len(self.labels)

    @classmethod
    def of_size(cls, n: int) -> "FinSet":
        return cls(tuple(range(n)))


@dataclass(frozen=True)
class FinMap:
    dom: FinSet
    cod: FinSet
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.dom):
            raise ValueError("a map needs one value per domain element")
        if any(not 0 <= v < len(self.cod) for v in self.values):
            raise ValueError("map leaves its codomain")

    def __call__(self, i: int) -> int:
        return self.values[i]

    def to_json(self) -> dict:
        return {"dom": len(self.dom), "cod": len(self.cod), "values": list(self.values)}


class DiscreteBackend(ITCategory):
    """Finite sets with L = bijections and R = all maps."""

    name = "discrete"

    def identity(self, X: FinSet) -> FinMap:
        return FinMap(X, X, tuple(range(len(X))))

    def compose(self, g: FinMap, f: FinMap) -> FinMap:
        if f.cod != g.dom:
            raise ValueError("maps are not composable")
        return FinMap(f.dom, g.cod, tuple(g.values[v] for v in f.values))

    def terminal(self) -> FinSet:
        return FinSet(("*",))

    def to_terminal(self, X: FinSet) -> FinMap:
        return FinMap(X, self.terminal(), (0,) * len(X))

    def pullback(self, f: FinMap, r: FinMap) -> Pullback:
        if f.cod != r.cod:
            raise NotAnRMap("cospan legs have different codomains")
        pairs = [(a, b) for a in range(len(f.dom)) for b in range(len(r.dom)) if f(a) == r(b)]
        apex = FinSet(tuple((f.dom.labels[a], r.dom.labels[b]) for a, b in pairs))
        p = FinMap(apex, f.dom, tuple(a for a, _ in pairs))
        q = FinMap(apex, r.dom, tuple(b for _, b in pairs))
        return Pullback(f, r, apex, p, q)

    def pair(self, pb: Pullback, x: FinMap, y: FinMap) -> FinMap:
        if self.compose(pb.left, x) != self.compose(pb.right, y):
            raise SquareDoesNotCommute("cone does not commute over the cospan")
        index = {(a, b): i for i, (a, b) in enumerate(zip(pb.p.values, pb.q.values))}
        return FinMap(x.dom, pb.apex, tuple(index[(x(i), y(i))] for i in range(len(x.dom))))

    def factorize(self, f: FinMap) -> tuple[FinMap, FinMap]:
        return self.identity(f.dom), f

    def lift(self, l: FinMap, r: FinMap, top: FinMap, bottom: FinMap) -> FinMap:
        if not self.is_L(l):
            raise NotLMap("left leg is not a bijection")
        if self.compose(r, top) != self.compose(bottom, l):
            raise SquareDoesNotCommute("lifting square does not commute")
        inverse = [0] * len(l.values)
        for i, v in enumerate(l.values):
            inverse[v] = i
        d = FinMap(l.cod, top.cod, tuple(top(inverse[b]) for b in range(len(l.cod))))
        assert self.compose(d, l) == top and self.compose(r, d) == bottom
        return d

    def is_L(self, f: FinMap) -> bool:
        return self.is_iso(f)

    def is_R(self, f: FinMap) -> bool:
        return True

    def is_iso(self, f: FinMap) -> bool:
        return len(f.dom) == len(f.cod) and len(set(f.values)) == len(f.values)

    def search_morphisms(self, dom, cod, post=(), pre=(), limit=None) -> list:
        forced: dict[int, int] = {}
        for l, top in pre:
            for i, v in enumerate(l.values):
                if forced.setdefault(v, top(i)) != top(i):
                    return []
        choices = []
        for x in range(len(dom)):
            cands = [forced[x]] if x in forced else range(len(cod))
            cands = [y for y in cands if all(G(y) == K(x) for G, K in post)]
            if not cands:
                return []
            choices.append(cands)
        out = []
        for values in itertools.product(*choices):
            out.append(FinMap(dom, cod, tuple(values)))
            if limit is not None and len(out) >= limit:
                break
        return out

    def first_difference(self, f: FinMap, g: FinMap):
        if f.dom != g.dom or f.cod != g.cod:
            return "domain/codomain"
        for i, (a, b) in enumerate(zip(f.values, g.values)):
            if a != b:
                return f"element {f.dom.labels[i]!r}: {f.cod.labels[a]!r} != {g.cod.labels[b]!r}"
        return None

    def describe(self, X: FinSet) -> dict:
        return {"elements": len(X)}

    def sample_objects(self, rng, count):
        return [FinSet.of_size(rng.randint(0, 4)) for _ in range(count)]

    def sample_morphisms(self, rng, count):
        out = []
        for _ in range(count):
            a, b = FinSet.of_size(rng.randint(0, 4)), FinSet.of_size(rng.randint(1, 4))
            out.append(FinMap(a, b, tuple(rng.randrange(len(b)) for _ in range(len(a)))))
        return out

    def all_maps(self, max_size: int = 4) -> Iterable[FinMap]:
        """Every map between sets of size <= max_size (used for exhaustive law checks)."""
        for n in range(max_size + 1):
            for m in range(max_size + 1):
                A, B = FinSet.of_size(n), FinSet.of_size(m)
                for values in itertools.product(range(m), repeat=n):
                    yield FinMap(A, B, values)


# ---------------------------------------------------------------------------
# Law suite


@dataclass
class LawResult:
    law: str
    checked: int = 0
    failures: int = 0
    first_failure: str | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, witness) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = str(witness)


@dataclass
class LawReport:
    backend: str
    results: dict[str, LawResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def law(self, name: str) -> LawResult:
        return self.results.setdefault(name, LawResult(name))

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "passed": self.passed,
            "laws": {
                k: {"checked": r.checked, "failures": r.failures, "first_failure": r.first_failure}
                for k, r in sorted(self.results.items())
            },
        }


def _guarded(result: LawResult, witness, check) -> None:
    try:
        ok = bool(check())
    except Exception as exc:  # a raising backend is a failing backend
        result.record(False, f"{witness}: {type(exc).__name__}: {exc}")
        return
    result.record(ok, witness)


def law_suite(
    backend: ITCategory,
    objects: Sequence[Any] = (),
    morphisms: Sequence[Any] = (),
    check_universal: bool = True,
) -> LawReport:
    """Check every identity-type-category law on the given sample objects and
    morphisms.  The report records the first failing datum of each law."""
    report = LawReport(backend.name)
    fact = report.law("factorization")
    term = report.law("terminal_is_R")
    pull = report.law("pullback_of_R")
    stab = report.law("L_stable_under_R_pullback")
    lift = report.law("lifting")

    objs = list(objects) + [m.dom for m in morphisms] + [m.cod for m in morphisms]
    seen = []
    for X in objs:
        if not any(X == Y for Y in seen):
            seen.append(X)
    for X in seen:
        _guarded(term, X, lambda X=X: backend.is_R(backend.to_terminal(X)))

    for idx, f in enumerate(morphisms):
        tag = f"morphism #{idx}"
        try:
            l, r = backend.factorize(f)
        except Exception as exc:
            fact.record(False, f"{tag}: factorize raised {exc!r}")
            continue
        _guarded(fact, f"{tag}: r.l != f", lambda: backend.compose(r, l) == f)
        _guarded(fact, f"{tag}: left factor not in L", lambda: backend.is_L(l))
        _guarded(fact, f"{tag}: right factor not in R", lambda: backend.is_R(r))
        if not (backend.is_L(l) and backend.is_R(r)):
            continue

        P = l.cod
        r_l = backend.factorize(l)[1]
        r_candidates = [
            ("identity", backend.identity(P)),
            ("factor of l", r_l),
            ("product projection", backend.product(P, P).q),
        ]
        for rname, r2 in r_candidates:
            if not backend.is_R(r2):
                continue
            def pb_check(r2=r2):
                pb = backend.pullback(l, r2)
                if backend.compose(l, pb.p) != backend.compose(r2, pb.q):
                    return False
                if backend.pair(pb, pb.p, pb.q) != backend.identity(pb.apex):
                    return False
                if check_universal:
                    found = backend.search_morphisms(
                        pb.apex, pb.apex, post=[(pb.p, pb.p), (pb.q, pb.q)], limit=2
                    )
                    if len(found) != 1:
                        return False
                return True

            _guarded(pull, f"{tag}: pullback along {rname}", pb_check)
            _guarded(
                stab,
                f"{tag}: L-map pulled back along {rname}",
                lambda r2=r2: backend.is_L(backend.pullback(l, r2).q),
            )

        for uname, u in (("r", r), ("identity", backend.identity(P)), ("to terminal", backend.to_terminal(P))):
            def lift_check(u=u):
                l_u, r_u = backend.factorize(u)
                top = backend.compose(l_u, l)
                d = backend.lift(l, r_u, top, u)
                return backend.compose(d, l) == top and backend.compose(r_u, d) == u

            _guarded(lift, f"{tag}: square against factor of {uname}", lift_check)
    return report
