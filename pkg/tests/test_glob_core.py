from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from globomega.errors import DimensionMismatch, MalformedTable, NotGlobular, NotParallel
from globomega.glob_core import (
    CellFamily,
    GlobularSet,
    GlobularSetMap,
    TableOfDimensions,
    all_tables,
    glob_sum,
    is_lifting,
    parallel_pair,
    parse_table,
    representable,
    segment_inclusion,
    validate_table,
)
from oracles import colimit_counts, colimit_oracle


def test_validate_table_examples():
    assert validate_table((1, 0, 2, 1, 2)).dims == (1, 0, 2, 1, 2)
    assert validate_table((0,)).k == 1
    with pytest.raises(MalformedTable) as err:
        validate_table((1, 1, 2))
    assert err.value.index == 2


@pytest.mark.parametrize("dims", [(), (1, 0), (0, 0, 1), (2, 3, 4), (1, 0, 1, 1, 2)])
def test_malformed_tables(dims):
    with pytest.raises(MalformedTable):
        validate_table(dims)


def test_parse_table_literal():
    assert parse_table("(1,0,2,1,2)") == TableOfDimensions((1, 0, 2, 1, 2))
    assert parse_table(" ( 3 ) ") == TableOfDimensions((3,))
    with pytest.raises(MalformedTable):
        parse_table("1,0,1")


def test_all_tables_enumeration_is_complete():
    tables = all_tables(5, 3)
    assert len(tables) == len(set(tables))
    brute = set()
    import itertools

    for k in (1, 3, 5):
        for dims in itertools.product(range(4), repeat=k):
            try:
                brute.add(validate_table(dims))
            except MalformedTable:
                pass
    assert set(tables) == brute


def test_glob_sum_counts_from_figure():
    assert glob_sum((1,)).counts() == (2, 1)
    assert glob_sum((1, 0, 2, 1, 2)).counts() == (3, 4, 2)
    assert glob_sum((0,)).counts() == (1,)


def test_glob_sum_labels_leftmost_wins():
    Y = glob_sum((1, 0, 2, 1, 2))
    assert Y.cells[0] == ("0:s0", "0:t0", "1:t0")
    assert Y.cells[1] == ("0:top", "1:s1", "1:t1", "2:t1")
    assert Y.cells[2] == ("1:top", "2:top")
    # the second 2-cell starts where the first one ends
    assert Y.label(1, Y.source(2, Y.index(2, "2:top"))) == "1:t1"


@pytest.mark.parametrize("table", all_tables(5, 3), ids=str)
def test_glob_sum_matches_colimit_oracle(table):
    Y = glob_sum(table)
    assert Y.counts() == colimit_counts(table.dims)
    classes, src, tgt = colimit_oracle(table.dims)
    # each label "seg:tag" names the class of that cell of segment node 2*seg
    for d, labels in enumerate(Y.cells):
        reps = set()
        for label in labels:
            seg, tag = label.split(":")
            key = (2 * int(seg), d, "top" if tag == "top" else tag[0])
            rep = classes[d][key]
            reps.add(rep)
            # leftmost wins: no segment node further left lies in the class
            members = [c for c, r in classes[d].items() if r == rep and c[0] % 2 == 0]
            assert min(c[0] for c in members) == 2 * int(seg)
            if d:
                s_label = Y.label(d - 1, Y.source(d, Y.index(d, label)))
                s_seg, s_tag = s_label.split(":")
                s_key = (2 * int(s_seg), d - 1, "top" if s_tag == "top" else s_tag[0])
                assert classes[d - 1][s_key] == src[rep]
        assert len(reps) == len(labels)


@pytest.mark.parametrize("n", range(5))
def test_single_segment_is_representable(n):
    counts = glob_sum((n,)).counts()
    assert counts == tuple([2] * n + [1])
    assert representable(n).counts() == counts


def test_segment_inclusion_is_a_map():
    table = validate_table((2, 0, 1, 0, 2))
    for j in range(3):
        inc = segment_inclusion(table, j)
        assert inc.image(table.segments[j], "top") == f"{j}:top"


def test_globular_identities_are_enforced():
    # a 2-cell whose source and target 1-cells do not share endpoints
    cells = (("a", "b", "c"), ("f", "g"), ("alpha",))
    src = ((0, 0), (0,))
    tgt = ((1, 2), (1,))
    with pytest.raises(NotGlobular):
        GlobularSet(cells, src, tgt)


def test_json_round_trip_is_bit_stable():
    Y = glob_sum((1, 0, 2, 1, 2))
    text = Y.to_json()
    assert GlobularSet.from_json(text) == Y
    assert GlobularSet.from_json(text).to_json() == text
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_map_commutation_is_checked():
    D1 = representable(1)
    with pytest.raises(NotGlobular):
        GlobularSetMap(D1, D1, ((0, 0), (0,)))  # collapses the endpoints but keeps the arrow


def test_parallel_pairs():
    Y = glob_sum((1, 0, 1))
    # any two 0-cell families are parallel
    parallel_pair(CellFamily.of(Y, 0, "0:s0"), CellFamily.of(Y, 0, "1:t0"), 0, Y)
    f = CellFamily.of(Y, 1, "0:top")
    parallel_pair(f, f, 1, Y)
    with pytest.raises(NotParallel) as err:
        parallel_pair(CellFamily.of(Y, 1, "0:top"), CellFamily.of(Y, 1, "1:top"), 1, Y)
    assert err.value.witness is not None


def test_is_lifting_in_a_globular_sum():
    Y = glob_sum((1, 0, 2, 1, 2))
    pair = parallel_pair(CellFamily.of(Y, 1, "1:s1"), CellFamily.of(Y, 1, "1:t1"), 1, Y)
    assert is_lifting(pair, CellFamily.of(Y, 2, "1:top"))
    assert not is_lifting(pair, CellFamily.of(Y, 2, "2:top"))
    with pytest.raises(DimensionMismatch):
        is_lifting(pair, CellFamily.of(Y, 1, "0:top"))


tables = st.sampled_from(all_tables(5, 4))


@given(tables)
@settings(max_examples=60, deadline=None)
def test_glob_sum_count_formula(table):
    # each segment contributes its cells minus those glued to the left neighbour
    expected = [0] * (table.max_dim + 1)
    for j, n in enumerate(table.segments):
        for d in range(n + 1):
            expected[d] += 1 if d == n else 2
        if j:
            m = table.junctions[j - 1]
            for d in range(m + 1):
                expected[d] -= 1 if d == m else 2
    assert glob_sum(table).counts() == tuple(expected)
