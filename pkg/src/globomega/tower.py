"""Iterated path objects.

Starting from X(0) = X, level n+1 is obtained by factoring the pairing
``<1, 1>: X(n) -> B(n+1)`` into an L-map followed by an R-map, where B(n+1)
is the pullback of the boundary map of level n against itself (and B(1) is
the product X x X, a pullback over the terminal object).  The two pullback
projections composed with the R-map give the source and target maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import BackendLawFailure, OutOfRange
from .wfs import ITCategory, Pullback


@dataclass
class LevelCertificate:
    level: int
    i_is_L: bool
    s_is_R: bool
    t_is_R: bool
    boundary_is_R: bool
    s_section: bool
    t_section: bool
    s_i_equals_t_i: bool
    globular: bool

    def ok(self) -> bool:
        return all(
            (self.i_is_L, self.s_is_R, self.t_is_R, self.boundary_is_R,
             self.s_section, self.t_section, self.s_i_equals_t_i, self.globular)
        )

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PathTower:
    backend: ITCategory
    X: Any
    levels: list = field(default_factory=list)
    boundaries: list = field(default_factory=list)  # boundaries[n] is B(n) as a Pullback (n >= 1)
    bd: list = field(default_factory=list)  # bd[n]: X(n) -> B(n); bd[0] goes to the terminal
    incl: list = field(default_factory=list)  # incl[n] = i_{n,n+1}
    src: list = field(default_factory=list)  # src[n] = s_n for n >= 1
    tgt: list = field(default_factory=list)
    certificates: list = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.levels) - 1

    def obj(self, n: int):
        self._check_level(n, 0)
        return self.levels[n]

    def s(self, n: int):
        self._check_level(n, 1)
        return self.src[n]

    def t(self, n: int):
        self._check_level(n, 1)
        return self.tgt[n]

    def i(self, n: int):
        """``i_{n,n+1}: X(n) -> X(n+1)``."""
        self._check_level(n + 1, 1)
        return self.incl[n]

    def boundary_map(self, n: int):
        self._check_level(n, 0)
        return self.bd[n]

    def _check_level(self, n: int, low: int) -> None:
        if not low <= n <= self.N:
            raise OutOfRange(f"level {n} outside {low}..{self.N}")

    def iterated_s(self, m: int, k: int):
        """``s`` applied until dimension k: ``X(m) -> X(k)``."""
        f = self.backend.identity(self.levels[m])
        for n in range(m, k, -1):
            f = self.backend.compose(self.src[n], f)
        return f

    def iterated_t(self, m: int, k: int):
        f = self.backend.identity(self.levels[m])
        for n in range(m, k, -1):
            f = self.backend.compose(self.tgt[n], f)
        return f

    def iterated_i(self, k: int, m: int):
        """``i`` applied from dimension k up to m: ``X(k) -> X(m)``."""
        f = self.backend.identity(self.levels[k])
        for n in range(k, m):
            f = self.backend.compose(self.incl[n], f)
        return f

    def extend(self, N: int) -> "PathTower":
        """Build levels up to N (idempotent; existing levels are kept)."""
        if N < 0:
            raise OutOfRange("truncation must be non-negative")
        B = self.backend
        if not self.levels:
            self.levels.append(self.X)
            self.boundaries.append(None)
            self.bd.append(B.to_terminal(self.X))
            self.src.append(None)
            self.tgt.append(None)
        while self.N < N:
            self._add_level()
        return self

    def _add_level(self) -> None:
        B = self.backend
        n = self.N
        Xn = self.levels[n]
        pb: Pullback = B.pullback(self.bd[n], self.bd[n])
        ident = B.identity(Xn)
        diag = B.pair(pb, ident, ident)
        l, r = B.factorize(diag)
        s = B.compose(pb.p, r)
        t = B.compose(pb.q, r)
        self.levels.append(l.cod)
        self.boundaries.append(pb)
        self.bd.append(r)
        self.incl.append(l)
        self.src.append(s)
        self.tgt.append(t)
        cert = self._certify(n + 1)
        self.certificates.append(cert)
        if not cert.ok():
            failed = [k for k, v in cert.to_dict().items() if v is False]
            raise BackendLawFailure(f"tower level {n + 1} fails {failed}")

    def _certify(self, n: int) -> LevelCertificate:
        B = self.backend
        s, t, i = self.src[n], self.tgt[n], self.incl[n - 1]
        ident = B.identity(self.levels[n - 1])
        si, ti = B.compose(s, i), B.compose(t, i)
        globular = True
        if n >= 2:
            s0, t0 = self.src[n - 1], self.tgt[n - 1]
            globular = B.compose(s0, s) == B.compose(s0, t) and B.compose(t0, s) == B.compose(t0, t)
        return LevelCertificate(
            level=n,
            i_is_L=B.is_L(i),
            s_is_R=B.is_R(s),
            t_is_R=B.is_R(t),
            boundary_is_R=B.is_R(self.bd[n]),
            s_section=si == ident,
            t_section=ti == ident,
            s_i_equals_t_i=si == ti,
            globular=globular,
        )

    def certified(self) -> bool:
        return all(c.ok() for c in self.certificates)

    def summary(self) -> dict:
        B = self.backend
        return {
            "truncation": self.N,
            "levels": [B.describe(X) for X in self.levels],
            "boundaries": [None] + [B.describe(pb.apex) for pb in self.boundaries[1:]],
            "certificates": [c.to_dict() for c in self.certificates],
        }


def build_tower(backend: ITCategory, X, N: int) -> PathTower:
    return PathTower(backend, X).extend(N)


def boundary(tower: PathTower, n: int, check_monic: bool = True) -> Pullback:
    """The boundary object B(n) with its two projections.

    With ``check_monic`` the projections are verified to be jointly monic by
    searching for endomorphisms of B(n) that they do not distinguish.
    """
    if not 1 <= n <= tower.N:
        raise OutOfRange(f"boundary level {n} outside 1..{tower.N}")
    pb = tower.boundaries[n]
    if check_monic:
        found = tower.backend.search_morphisms(
            pb.apex, pb.apex, post=[(pb.p, pb.p), (pb.q, pb.q)], limit=2
        )
        if len(found) != 1 or found[0] != tower.backend.identity(pb.apex):
            raise BackendLawFailure(f"boundary projections at level {n} are not jointly monic")
    return pb
