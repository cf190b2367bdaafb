from __future__ import annotations

import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from globomega.errors import GroupoidFormatError, NotAnRMap, NotLMap, NotRMap, SquareDoesNotCommute
from globomega.grpd import (
    FiniteGroupoid,
    GroupoidBackend,
    GroupoidFunctor,
    bz,
    contractible,
    discrete,
    groupoid_from_json,
    groupoid_to_json,
    is_groupoid_iso,
    is_injective_equivalence,
    is_isofibration,
    lift_square,
    mapping_path_factorize,
    pullback_along_R,
    random_functor,
    random_groupoid,
    search_functors,
    terminal_groupoid,
    to_terminal,
)
from oracles import (
    all_table_functors,
    as_table,
    as_table_functor,
    cyclic_groupoid,
    table_is_injective_equivalence,
    table_is_isofibration,
    table_mapping_path,
    table_pullback,
    table_product,
    TableFunctor,
)

DATA = Path(__file__).resolve().parents[1] / "data"
backend = GroupoidBackend()


def point_into(X, x):
    return GroupoidFunctor(terminal_groupoid(), X, [x], [(0,)], [0])


def test_classification_examples():
    C2 = contractible(2)
    for X in (bz(2), C2, discrete(3)):
        assert is_isofibration(to_terminal(X))
        assert is_isofibration(GroupoidFunctor.identity(X))
        assert is_injective_equivalence(GroupoidFunctor.identity(X))
    inc = point_into(C2, 0)
    assert not is_isofibration(inc)
    assert is_injective_equivalence(inc)
    # Z/2 -> trivial is full but not faithful
    assert not is_injective_equivalence(to_terminal(bz(2)))


def _random_functors(seed, count):
    rng = random.Random(seed)
    return [random_functor(rng, random_groupoid(rng), random_groupoid(rng, min_objects=1)) for _ in range(count)]


@pytest.mark.parametrize("seed", range(5))
def test_classification_matches_explicit_oracle(seed):
    for F in _random_functors(seed, 40):
        T = as_table_functor(F)
        assert is_isofibration(F) == table_is_isofibration(T)
        assert is_injective_equivalence(F) == table_is_injective_equivalence(T)


def test_mapping_path_examples():
    X = bz(2)
    l, r = mapping_path_factorize(GroupoidFunctor.identity(X))
    assert l.cod.n_objects == 2
    diag, _ = backend.diagonal(X)
    l, r = mapping_path_factorize(diag)
    assert (l.cod.n_objects, l.cod.arrow_count()) == (4, 32)
    # the explicit construction on the cyclic group agrees
    C = cyclic_groupoid(2)
    B, _, _ = table_product(C, C)
    apos = {key: i for i, (_, _, key) in enumerate(B.arrows)}
    tdiag = TableFunctor(C, B, [0], [apos[(u, u)] for u in range(2)])
    P, _, _ = table_mapping_path(tdiag)
    assert (len(P.objects), len(P.arrows)) == (4, 32)


def test_mapping_path_of_empty_domain():
    empty = FiniteGroupoid((), ())
    F = GroupoidFunctor(empty, bz(2), [], [], [])
    l, r = mapping_path_factorize(F)
    assert l.dom == l.cod == empty
    assert l.is_identity()
    assert r == F


@pytest.mark.parametrize("seed", range(5))
def test_mapping_path_matches_explicit_oracle(seed):
    for F in _random_functors(seed, 30):
        l, r = mapping_path_factorize(F)
        assert is_injective_equivalence(l) and is_isofibration(r)
        assert l.then(r) == F
        P, _, _ = table_mapping_path(as_table_functor(F))
        assert (l.cod.n_objects, l.cod.arrow_count()) == (len(P.objects), len(P.arrows))


def test_mapping_path_is_deterministic():
    F = _random_functors(7, 1)[0]
    a, b = mapping_path_factorize(F), mapping_path_factorize(F)
    assert a[0].cod.labels == b[0].cod.labels
    assert a == b


def test_pullback_along_identity_is_iso():
    for F in _random_functors(3, 20):
        pb = pullback_along_R(F, GroupoidFunctor.identity(F.cod))
        assert is_groupoid_iso(pb.p)


def test_second_boundary_of_bz2_has_16_objects():
    diag, _ = backend.diagonal(bz(2))
    _, r = mapping_path_factorize(diag)
    pb = pullback_along_R(r, r)
    assert pb.apex.n_objects == 16
    assert pb.apex.arrow_count() == 256


@pytest.mark.parametrize("seed", range(3))
def test_pullback_matches_explicit_oracle(seed):
    rng = random.Random(seed)
    for _ in range(20):
        C = random_groupoid(rng, min_objects=1)
        f = random_functor(rng, random_groupoid(rng), C)
        _, r = mapping_path_factorize(random_functor(rng, random_groupoid(rng), C))
        pb = pullback_along_R(f, r)
        P, _, _ = table_pullback(as_table_functor(f), as_table_functor(r))
        assert (pb.apex.n_objects, pb.apex.arrow_count()) == (len(P.objects), len(P.arrows))
        assert pb.p.then(f) == pb.q.then(r)


def test_pullback_needs_an_R_map():
    C2 = contractible(2)
    with pytest.raises(NotAnRMap):
        pullback_along_R(point_into(C2, 1), point_into(C2, 0))


def test_pullback_of_L_along_R_is_L():
    for F in _random_functors(11, 30):
        l, r = mapping_path_factorize(F)
        _, r2 = mapping_path_factorize(l)
        assert is_injective_equivalence(pullback_along_R(l, r2).q)


def test_lift_square_forced_cases():
    for F in _random_functors(5, 15):
        l, r = mapping_path_factorize(F)
        P = l.cod
        # l = identity: the diagonal is the top map
        top = l
        d = lift_square(GroupoidFunctor.identity(F.dom), r, top, top.then(r))
        assert d == top
        # r = identity: the diagonal is the bottom map
        d = lift_square(l, GroupoidFunctor.identity(P), l, GroupoidFunctor.identity(P))
        assert d == GroupoidFunctor.identity(P)


def test_lift_square_errors():
    C2 = contractible(2)
    inc = point_into(C2, 0)
    X = bz(2)
    l, r = mapping_path_factorize(GroupoidFunctor.identity(X))
    with pytest.raises(NotLMap):
        lift_square(to_terminal(X), to_terminal(X), GroupoidFunctor.identity(X), to_terminal(X))
    with pytest.raises(NotRMap):
        lift_square(GroupoidFunctor.identity(terminal_groupoid()), inc, inc, inc)
    assert issubclass(NotRMap, NotAnRMap)
    # r . top is the identity but the bottom kills the loop
    trivial = GroupoidFunctor(X, X, [0], [(0, 0)], [0])
    with pytest.raises(SquareDoesNotCommute):
        lift_square(GroupoidFunctor.identity(X), r, l, trivial)


@pytest.mark.parametrize("seed", range(4))
def test_constructed_filler_is_among_all_fillers(seed):
    rng = random.Random(seed)
    checked = 0
    while checked < 10:
        A, C = random_groupoid(rng, max_objects=3), random_groupoid(rng, max_objects=3, min_objects=1)
        F = random_functor(rng, A, C)
        l, _ = mapping_path_factorize(F)
        u = random_functor(rng, l.cod, random_groupoid(rng, max_objects=3, min_objects=1))
        l_u, r_u = mapping_path_factorize(u)
        if l_u.cod.n_objects > 12:
            continue
        top = l.then(l_u)
        d = lift_square(l, r_u, top, u)
        fillers = search_functors(l.cod, l_u.cod, post=[(r_u, u)], pre=[(l, top)], limit=500)
        assert fillers
        assert all(l.then(h) == top and h.then(r_u) == u for h in fillers)
        if len(fillers) < 500:
            assert d in fillers
        checked += 1


@pytest.mark.parametrize("seed", range(6))
def test_functor_search_matches_explicit_enumeration(seed):
    rng = random.Random(seed)
    done = 0
    while done < 6:
        A = random_groupoid(rng, max_objects=3)
        B = random_groupoid(rng, max_objects=3, min_objects=1)
        if B.arrow_count() ** A.arrow_count() > 10**6:
            continue  # too large for the explicit oracle
        done += 1
        got = search_functors(A, B)
        TA, _ = as_table(A)
        TB, _ = as_table(B)
        assert len(got) == len(set(got)) == len(all_table_functors(TA, TB))
        assert all(isinstance(F, GroupoidFunctor) for F in got)


def test_search_respects_constraints():
    X = bz(2)
    assert len(search_functors(X, X)) == 2
    ident = GroupoidFunctor.identity(X)
    assert search_functors(X, X, post=[(ident, ident)]) == [ident]
    assert search_functors(X, X, limit=1) == search_functors(X, X)[:1]


@pytest.mark.parametrize("name", ["bz2.json", "bz3.json", "contractible2.json", "discrete2.json"])
def test_data_files_round_trip_bit_exact(name):
    text = (DATA / name).read_text()
    G = groupoid_from_json(text)
    assert groupoid_to_json(G) == text
    assert groupoid_from_json(groupoid_to_json(G)) == G


def test_named_groupoids_round_trip():
    for G in (bz(2), bz(3), contractible(3), discrete(2)):
        text = groupoid_to_json(G)
        assert groupoid_to_json(groupoid_from_json(text)) == text


def _doc(**changes):
    doc = json.loads(groupoid_to_json(bz(2)))
    doc.update(changes)
    return doc


@pytest.mark.parametrize(
    "doc,message",
    [
        ("not json", "invalid JSON"),
        ([], "JSON object"),
        ({"objects": []}, "missing key"),
        (_doc(arrows=[{"name": "g0", "src": "*", "tgt": "?"}, {"name": "g1", "src": "*", "tgt": "*"}]), "unknown endpoint"),
        (_doc(compose=[]), "missing composition"),
        (_doc(identities={"*": "g1"}), "identity law"),
        (_doc(compose=[["g0", "g0", "g0"], ["g0", "g1", "g1"], ["g1", "g0", "g1"], ["g1", "g1", "g1"]]), "inverse"),
        (_doc(compose=[["g0", "g0", "g0"], ["g0", "g1", "g1"], ["g1", "g0", "g1"], ["g1", "g1", "nope"]]), "three known"),
    ],
)
def test_malformed_groupoid_files(doc, message):
    text = doc if isinstance(doc, str) else json.dumps(doc)
    with pytest.raises(GroupoidFormatError, match=message):
        groupoid_from_json(text)


def test_associativity_is_validated():
    # a magma on {e, a, b} with e as unit: a.a = b, a.b = e, b.a = a, b.b = a is not associative
    names = ["e", "a", "b"]
    table = {("a", "a"): "b", ("a", "b"): "e", ("b", "a"): "e", ("b", "b"): "b"}
    compose = [[x, "e", x] for x in names] + [["e", x, x] for x in names[1:]]
    compose += [[l, r, v] for (l, r), v in table.items()]
    doc = {
        "objects": ["*"],
        "arrows": [{"name": n, "src": "*", "tgt": "*"} for n in names],
        "compose": compose,
        "identities": {"*": "e"},
    }
    with pytest.raises(GroupoidFormatError, match="associativity"):
        groupoid_from_json(json.dumps(doc))


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_factorization_and_lifting_properties(seed):
    rng = random.Random(seed)
    F = random_functor(rng, random_groupoid(rng), random_groupoid(rng, min_objects=1))
    l, r = mapping_path_factorize(F)
    assert l.then(r) == F
    u = r
    l_u, r_u = mapping_path_factorize(u)
    d = lift_square(l, r_u, l.then(l_u), u)
    assert l.then(d) == l.then(l_u) and d.then(r_u) == u
    text = groupoid_to_json(l.cod)
    assert groupoid_to_json(groupoid_from_json(text)) == text
