"""Small finite groups given by Cayley tables (element 0 is the identity)."""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Callable, Hashable, Iterator, Sequence


class FiniteGroup:
    def __init__(self, table: Sequence[Sequence[int]]):
        table = tuple(tuple(row) for row in table)
        n = len(table)
        if n == 0 or any(len(row) != n for row in table):
            raise ValueError("Cayley table must be square and non-empty")
        if table[0] != tuple(range(n)) or tuple(row[0] for row in table) != tuple(range(n)):
            raise ValueError("element 0 must be the identity")
        inv = []
        for a in range(n):
            try:
                inv.append(table[a].index(0))
            except ValueError:
                raise ValueError(f"element {a} has no inverse") from None
        self.table = table
        self.inv = tuple(inv)

    def __len__(self) -> int:
        return len(self.table)

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def mul3(self, a: int, b: int, c: int) -> int:
        return self.table[self.table[a][b]][c]

    def inverse(self, a: int) -> int:
        return self.inv[a]

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and (self is other or self.table == other.table)

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def check_associative(self) -> bool:
        t = self.table
        n = len(t)
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in range(n) for b in range(n) for c in range(n))

    @classmethod
    def from_elements(
        cls, elements: Sequence[Hashable], mul: Callable[[Hashable, Hashable], Hashable]
    ) -> tuple["FiniteGroup", dict]:
        """Build a group from explicit elements; the identity must come first."""
        index = {e: i for i, e in enumerate(elements)}
        table = [[index[mul(a, b)] for b in elements] for a in elements]
        return cls(table), index

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        return cls([[(a + b) % n for b in range(n)] for a in range(n)])

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls([[0]])

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        perms = list(itertools.permutations(range(n)))
        group, _ = cls.from_elements(perms, lambda p, q: tuple(p[q[i]] for i in range(n)))
        return group

    @cached_property
    def generators(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily in element order."""
        gens: list[int] = []
        span = {0}
        for a in range(1, self.order):
            if a not in span:
                gens.append(a)
                span = self._closure(gens)
        return tuple(gens)

    def _closure(self, gens: Sequence[int]) -> set[int]:
        seen = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return seen

    def is_hom(self, mapping: Sequence[int], other: "FiniteGroup") -> bool:
        t, u = self.table, other.table
        n = self.order
        return all(mapping[t[a][b]] == u[mapping[a]][mapping[b]] for a in range(n) for b in range(n))

    def homs_to(self, other: "FiniteGroup") -> Iterator[tuple[int, ...]]:
        """All homomorphisms into ``other``, in lexicographic order of generator images."""
        gens = self.generators
        for images in itertools.product(range(other.order), repeat=len(gens)):
            mapping = self._extend(gens, images, other)
            if mapping is not None:
                yield mapping

    def _extend(self, gens, images, other: "FiniteGroup") -> tuple[int, ...] | None:
        mapping: list[int | None] = [None] * self.order
        mapping[0] = 0
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g, img in zip(gens, images):
                y = self.table[x][g]
                want = other.table[mapping[x]][img]
                if mapping[y] is None:
                    mapping[y] = want
                    frontier.append(y)
                elif mapping[y] != want:
                    return None
        return tuple(mapping)  # type: ignore[arg-type]
