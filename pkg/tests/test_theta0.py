from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from globomega.errors import BoundaryMismatch, TruncationExceeded
from globomega.glob_core import TableOfDimensions, all_tables
from globomega.theta0 import (
    D_functor,
    D_on_maps,
    GlobeMap,
    IdentityTheory,
    TheoryPresentation,
    carrier,
    check_product_preservation,
    cocone,
    compose,
    identity,
    sigma,
    tau,
    theta0_hom,
    yoneda_count,
)
from oracles import brute_force_homs


def test_hom_examples():
    assert len(theta0_hom((1,), (1, 0, 1))) == 2
    assert len(theta0_hom((0,), (1,))) == 2
    for n in range(4):
        assert identity((n,)) in theta0_hom((n,), (n,))


def test_bound_is_enforced():
    with pytest.raises(TruncationExceeded):
        theta0_hom((2,), (1,), bound=1)


SMALL = [t for t in all_tables(3, 2)] + [TableOfDimensions((1, 0, 1, 0, 1))]


@pytest.mark.parametrize("n,m", list(itertools.product(SMALL, SMALL)), ids=str)
def test_hom_enumeration_matches_brute_force(n, m):
    S, T = carrier(n), carrier(m)
    space = 1
    for d, level in enumerate(S.cells):
        space *= len(T.cells[d]) ** len(level) if d < len(T.cells) else 0
    if space > 200_000:
        pytest.skip("assignment space too large for the brute-force oracle")
    found = sorted(f.underlying.components for f in theta0_hom(n, m))
    assert found == sorted(brute_force_homs(S, T))


@pytest.mark.parametrize("table", all_tables(5, 3), ids=str)
def test_yoneda(table):
    for n in range(4):
        assert len(theta0_hom((n,), table)) == yoneda_count(n, table)


def test_composition_is_unital_and_associative():
    tables = all_tables(3, 2)
    for a, b in itertools.product(tables, repeat=2):
        for f in theta0_hom(a, b):
            assert compose(identity(a), f) == f
            assert compose(f, identity(b)) == f
    for a, b, c in itertools.product(all_tables(3, 1), repeat=3):
        for f, g in itertools.product(theta0_hom(a, b), theta0_hom(b, c)):
            gf = compose(f, g)
            assert gf in theta0_hom(a, c)
            for d in all_tables(3, 1):
                for h in theta0_hom(c, d):
                    assert compose(gf, h) == compose(f, compose(g, h))


def test_compose_checks_boundaries():
    f = theta0_hom((0,), (1,))[0]
    with pytest.raises(BoundaryMismatch):
        compose(f, f)


def test_face_then_projection_matches_enumeration():
    # (0) -> (1) -> (1) composites are exactly the two point inclusions
    composites = {compose(f, g) for f in theta0_hom((0,), (1,)) for g in theta0_hom((1,), (1,))}
    assert composites == set(theta0_hom((0,), (1,)))


def test_D_functor():
    assert D_functor(0) == TableOfDimensions((0,))
    # tau picks the source face, sigma the target face
    assert D_on_maps(tau(1)).image(0, "0:top") == "0:s0"
    assert D_on_maps(sigma(1)).image(0, "0:top") == "0:t0"
    assert D_on_maps(sigma(1)) in theta0_hom((0,), (1,))
    assert D_on_maps(sigma(1)) != D_on_maps(tau(1))


@pytest.mark.parametrize("first,second", list(itertools.product(["sigma", "tau"], repeat=2)))
def test_D_is_functorial(first, second):
    for n in range(1, 4):
        g1 = GlobeMap(n - 1, n, first)
        g2 = GlobeMap(n, n + 1, second)
        assert D_on_maps(g1.then(g2)) == compose(D_on_maps(g1), D_on_maps(g2))
    # coglobular relations: the composite only depends on the first generator
    assert sigma(1).then(sigma(2)) == sigma(1).then(tau(2))


def test_identity_theory_preserves_globular_products():
    for table in all_tables(5, 2):
        result = check_product_preservation(IdentityTheory(), table)
        assert result.ok, result.counterexample
        assert result.cones_checked > 0


class _Collapsed(IdentityTheory):
    """Sends (1,0,1) to (1): every cone then has two or no mediators."""

    bad = TableOfDimensions((1, 0, 1))

    def arrow(self, theta):
        if theta.cod == self.bad:
            return identity((1,))
        return theta

    def mediators(self, apex, legs, table, projections, limit):
        if table == self.bad:
            return [h for h in theta0_hom((1,), apex) if all(compose(p, h) == leg for p, leg in zip(projections, legs))]
        return super().mediators(apex, legs, table, projections, limit)


def test_corrupted_assignment_is_rejected():
    result = check_product_preservation(_Collapsed(), (1, 0, 1))
    assert not result.ok
    assert result.counterexample


def test_cocone_legs_hit_segment_tops():
    table = TableOfDimensions((2, 1, 2, 0, 1))
    for j, leg in enumerate(cocone(table)):
        assert leg.image(table.segments[j], "0:top") == f"{j}:top"


def test_theory_presentation_validation():
    f = theta0_hom((0,), (1,))[0]
    pres = TheoryPresentation(
        generators={"m": (TableOfDimensions((1, 0, 1)), TableOfDimensions((1,)))},
        relations=[([f, "m"], [f, "m"])],
    )
    pres.validate()
    bad = TheoryPresentation(
        generators={"m": (TableOfDimensions((1, 0, 1)), TableOfDimensions((1,)))},
        relations=[(["m"], [f])],
    )
    with pytest.raises(BoundaryMismatch):
        bad.validate()


@given(st.sampled_from(all_tables(3, 2)), st.sampled_from(all_tables(3, 2)), st.data())
@settings(max_examples=40, deadline=None)
def test_homs_are_globular_maps(n, m, data):
    homs = theta0_hom(n, m)
    if not homs:
        return
    f = data.draw(st.sampled_from(homs))
    S, T = carrier(n), carrier(m)
    for d in range(1, S.truncation + 1):
        for i in range(len(S.cells[d])):
            c = f.underlying.components[d][i]
            assert T.source(d, c) == f.underlying.components[d - 1][S.source(d, i)]
