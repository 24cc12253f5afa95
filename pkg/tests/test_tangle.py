"""Expression layer: parsing, validation, printing, strand bookkeeping."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctkit.tangle import (ClosedTangle, Crossing, DeadLabel, Disjoint,
                          HVertex, LabelClash, Merge, Relabel, Strand,
                          TangleSyntaxError, atoms, canonical_text,
                          live_labels, merges, parse_expr, piece_writhes,
                          strand_pieces, vertex_chain_order)


def test_atom_parses():
    assert parse_expr("S[3]") == Strand(3)
    assert parse_expr("X[1,2]") == Crossing(1, 2, 1)
    assert parse_expr("Xb[1,2]") == Crossing(1, 2, -1)
    assert parse_expr("H[9;1,2]") == HVertex("9", 1, 2)
    assert parse_expr("H[lk;1,2]") == HVertex("lk", 1, 2)


def test_structure_of_compound_expression():
    e = parse_expr("X[1,2] Xb[3,4] // m[1,3>5]")
    assert e == Merge(Disjoint(Crossing(1, 2, 1), Crossing(3, 4, -1)),
                      1, 3, 5)
    assert atoms(e) == [Crossing(1, 2, 1), Crossing(3, 4, -1)]
    assert [type(op) for op in merges(e)] == [Merge]
    assert live_labels(e) == frozenset({2, 4, 5})


def test_multi_merge_folds_left():
    folded = parse_expr("X[1,4] X[3,2] // m[1,2,3,4>5]")
    spelled = parse_expr("X[1,4] X[3,2] // m[1,2>5] // m[5,3>5] // m[5,4>5]")
    assert folded == spelled
    assert live_labels(folded) == frozenset({5})


def test_single_arg_merge_is_relabel():
    e = parse_expr("S[1] // m[1>7]")
    assert e == Relabel(Strand(1), 1, 7)
    assert live_labels(e) == frozenset({7})


@pytest.mark.parametrize("text", [
    "X[1,4] X[5,2] X[3,6] // m[1,2,3,4,5,6>7]",
    "X[1,2] Xb[3,4] H[9;5,6] // m[1,3>7] // m[2,4>8]",
    "S[1] // m[1>2]",
    "H[A;10,4] H[B;3,7] X[6,1] Xb[8,2] Xb[5,9] // m[1,2,3,4,5,6,7,8,9,10>11]",
    "X[1,2] S[5] // m[1,2>3] // m[3,3>4]",
])
def test_canonical_text_fixed_points(text):
    assert canonical_text(parse_expr(text)) == text


def test_canonical_text_normalizes_spacing():
    assert canonical_text(parse_expr("X[ 1, 2 ]//m[1,2>3]")) \
        == "X[1,2] // m[1,2>3]"


@pytest.mark.parametrize("text", [
    "", "X[1]", "X[1,1]", "H[9;1,1]", "Q[1,2]", "X[0,1]", "X[1,2] //",
    "m[1,2>3]", "X[1,2] ]", "X[1,2] // m[>3]", "X[1,2] // m[1,2>0]",
    "X[1,2] extra",
])
def test_syntax_rejects(text):
    with pytest.raises(TangleSyntaxError):
        parse_expr(text)


def test_validation_errors():
    with pytest.raises(LabelClash):
        parse_expr("X[1,2] X[2,3]")
    with pytest.raises(LabelClash):
        parse_expr("X[1,2] X[3,4] // m[1,3>2]")
    with pytest.raises(DeadLabel):
        parse_expr("X[1,2] // m[1,5>3]")
    with pytest.raises(DeadLabel):
        parse_expr("X[1,2] // m[5>3]")
    with pytest.raises(ClosedTangle):
        parse_expr("X[1,2] // m[1,2>3] // m[3,3>4]")


# -- random expressions ------------------------------------------------


@st.composite
def tangle_texts(draw):
    n_atoms = draw(st.integers(1, 4))
    kinds = draw(st.lists(st.sampled_from("SXBH"),
                          min_size=n_atoms, max_size=n_atoms))
    nxt = iter(range(1, 60)).__next__
    parts = []
    for kind in kinds:
        if kind == "S":
            parts.append(f"S[{nxt()}]")
        elif kind == "X":
            parts.append(f"X[{nxt()},{nxt()}]")
        elif kind == "B":
            parts.append(f"Xb[{nxt()},{nxt()}]")
        else:
            parts.append(f"H[v{nxt()};{nxt()},{nxt()}]")
    text = " ".join(parts)
    live = sorted(live_labels(parse_expr(text)))
    ops = []
    fresh = 100
    for _ in range(draw(st.integers(0, 4))):
        if len(live) >= 2 and draw(st.booleans()):
            a = draw(st.sampled_from(live))
            b = draw(st.sampled_from([x for x in live if x != a]))
            fresh += 1
            ops.append(f"m[{a},{b}>{fresh}]")
            live = [x for x in live if x not in (a, b)] + [fresh]
        else:
            a = draw(st.sampled_from(live))
            fresh += 1
            ops.append(f"m[{a}>{fresh}]")
            live = [x for x in live if x != a] + [fresh]
    if ops:
        text += " // " + " // ".join(ops)
    return text


@given(tangle_texts())
def test_reparse_is_stable(text):
    e = parse_expr(text)
    c = canonical_text(e)
    e2 = parse_expr(c)
    assert canonical_text(e2) == c
    assert live_labels(e2) == live_labels(e)
    assert atoms(e2) == atoms(e)


@given(tangle_texts())
def test_pieces_partition_passages(text):
    """Every atom passage lands in exactly one strand walk."""
    e = parse_expr(text)
    pieces, closed = strand_pieces(e)
    walks = list(pieces.values()) + closed
    passages = [p for w in walks for p in w]
    assert len(passages) == len(set(passages))
    expect = {(i, l) for i, a in enumerate(atoms(e))
              for l in ((a.label,) if isinstance(a, Strand)
                        else (a.over, a.under) if isinstance(a, Crossing)
                        else (a.up, a.down))}
    assert set(passages) == expect
    assert set(pieces) == set(live_labels(e))


# -- strand walks ------------------------------------------------------


def test_strand_pieces_walk_order():
    e = parse_expr("H[2;1,4] H[1;2,3] // m[1,2>5] // m[5,3>6] // m[6,4>7]")
    pieces, closed = strand_pieces(e)
    assert pieces == {7: [(0, 1), (1, 2), (1, 3), (0, 4)]}
    assert closed == []
    assert vertex_chain_order(e) == ["2", "1"]


def test_self_merge_closes_component():
    e = parse_expr("X[1,2] S[5] // m[1,2>3] // m[3,3>4]")
    pieces, closed = strand_pieces(e)
    assert pieces == {5: [(1, 5)]}
    assert closed == [[(0, 1), (0, 2)]]


def test_piece_writhes_plain_strand():
    assert piece_writhes(parse_expr("S[1]")) == [(0, 0)]


def test_piece_writhes_single_curl():
    assert piece_writhes(parse_expr("X[1,2] // m[1,2>3]")) == [(0, 1)]
    assert piece_writhes(parse_expr("Xb[1,2] // m[1,2>3]")) == [(0, -1)]


def test_piece_writhes_split_at_contacts():
    # strand 4 crosses the contact once: two empty pieces; strand 6
    # carries the curl up to the contact, then an empty tail
    e = parse_expr("X[1,2] H[9;3,4] // m[1,2>5] // m[5,3>6]")
    assert piece_writhes(e) == [(0, 0), (1, 0), (2, 1), (3, 0)]


def test_piece_writhes_crossing_between_strands_counts_nowhere():
    # both passages of a crossing must sit on the same piece to score
    e = parse_expr("X[1,2] S[3] // m[1,3>4]")
    assert piece_writhes(e) == [(0, 0), (1, 0)]


def test_piece_writhes_closed_loop():
    e = parse_expr("X[1,2] S[5] // m[1,2>3] // m[3,3>4]")
    assert piece_writhes(e) == [(0, 0), (1, 1)]


def test_piece_writhes_closed_loop_with_contacts():
    # the loop is cut at its first contact passage, so the curl sits in
    # the piece running up to the second contact
    e = parse_expr("H[9;1,2] X[3,4] S[99] // m[2,3>5] // m[5,4>6] "
                   "// m[6,1>7] // m[7,7>8]")
    assert piece_writhes(e) == [(0, 0), (1, 1), (2, 0)]
