import itertools
from math import factorial

import pytest

import graphconf as gc
from graphconf.model import (CapExceededError, boundary_of_cell, cell_is_valid,
                             cell_dimension, complex_to_doc,
                             corner_configurations, face, make_cell,
                             relabel_cell, state_record)

from conftest import brute_force_cells


# -- enumeration ----------------------------------------------------------

def test_circle_two_particles_counts():
    # hand enumeration: 4 resting configurations (two orders on the loop,
    # or one particle on the vertex) and 4 move cells
    cx = gc.enumerate_cells(gc.circle(), 2)
    assert cx.cell_counts() == (4, 4)


def test_interval_no_sinks_orderings():
    for n in range(1, 5):
        cx = gc.enumerate_cells(gc.interval(), n)
        assert cx.cell_counts() == (factorial(n),)


def test_two_sink_interval_is_cube_skeleton():
    for n in range(1, 6):
        cx = gc.enumerate_cells(gc.interval(sinks={0, 1}), n)
        assert cx.cell_counts() == (2 ** n, n * 2 ** (n - 1))


def test_sink_circle_is_bouquet():
    for n in range(1, 6):
        cx = gc.enumerate_cells(gc.circle(sinks={0}), n)
        assert cx.cell_counts() == (1, n)


@pytest.mark.parametrize("graph,n", [
    (gc.circle(), 2),
    (gc.star(3), 2),
    (gc.interval(sinks={0, 1}), 3),
    (gc.banana(2), 2),
    (gc.banana(4), 2),
    (gc.circle(sinks={0}), 3),
    (gc.star(3, sinks={1}), 2),
])
def test_enumeration_matches_brute_force(graph, n):
    # oracle: filter the full syntactic state universe through an
    # independent transcription of the validity rules
    expected = brute_force_cells(graph, n)
    cx = gc.enumerate_cells(graph, n)
    got = {dim: set(cells) for dim, cells in enumerate(cx.cells) if cells}
    assert got == expected


def test_enumeration_deterministic():
    a = gc.enumerate_cells(gc.banana(3), 2)
    b = gc.enumerate_cells(gc.banana(3), 2)
    assert a.cells == b.cells


def test_enumeration_cap():
    with pytest.raises(CapExceededError):
        gc.enumerate_cells(gc.complete(5), 3, max_cells=100)


def test_zero_particles():
    cx = gc.enumerate_cells(gc.star(3), 0)
    assert cx.cell_counts() == (1,)
    assert cx.cells[0] == [()]


# -- validity ----------------------------------------------------------------

def test_validity_examples():
    g = gc.banana(4)
    # two moves into the same end of one edge target the same vertex
    assert not cell_is_valid(g, make_cell([(0, ("ME", 0, 0)), (1, ("ME", 0, 0))]))
    # two moves on one edge at opposite ends are independent (they claim
    # different junctions), so the square exists
    assert cell_is_valid(g, make_cell([(0, ("ME", 0, 0)), (1, ("ME", 0, 1))]))
    # on a loop both ends claim the same vertex
    loop = gc.circle()
    assert not cell_is_valid(loop, make_cell([(0, ("ME", 0, 0)),
                                              (1, ("ME", 0, 1))]))
    # a non-sink leaf vertex is never occupied
    st = gc.star(3)
    assert not cell_is_valid(st, make_cell([(0, ("V", 1))]))
    # sinks admit collisions
    gs = gc.interval(sinks={0, 1})
    assert cell_is_valid(gs, make_cell([(0, ("V", 0)), (1, ("V", 0))]))
    # no two full traversals of one edge, even between sinks
    assert not cell_is_valid(gs, make_cell([(0, ("MF", 0)), (1, ("MF", 0))]))
    # no interior slots on sink-incident edges
    assert not cell_is_valid(gs, make_cell([(0, ("E", 0, 0))]))
    # a move toward an occupied non-sink vertex is blocked
    assert not cell_is_valid(g, make_cell([(0, ("V", 0)), (1, ("ME", 0, 0))]))
    # slot ranks must be exactly 0..m-1
    assert not cell_is_valid(g, make_cell([(0, ("E", 0, 1))]))
    assert cell_is_valid(g, make_cell([(0, ("E", 0, 1)), (1, ("E", 0, 0))]))


# -- faces and boundary ----------------------------------------------------

def test_full_traversal_faces():
    g = gc.interval(sinks={0, 1})
    cell = make_cell([(0, ("MF", 0))])
    assert face(g, cell, 0, 0) == make_cell([(0, ("V", 0))])
    assert face(g, cell, 0, 1) == make_cell([(0, ("V", 1))])
    bnd = boundary_of_cell(g, cell)
    assert bnd == {make_cell([(0, ("V", 1))]): 1, make_cell([(0, ("V", 0))]): -1}


def test_move_end_face_reranks():
    # entering at the iota end inserts at slot 0 and shifts the resident
    g = gc.banana(4)
    cell = make_cell([(0, ("ME", 0, 0)), (1, ("E", 0, 0))])
    assert face(g, cell, 0, 0) == make_cell([(0, ("E", 0, 0)), (1, ("E", 0, 1))])
    assert face(g, cell, 0, 1) == make_cell([(0, ("V", 0)), (1, ("E", 0, 0))])
    # entering at the tau end appends at the last rank
    cell = make_cell([(0, ("ME", 0, 1)), (1, ("E", 0, 0))])
    assert face(g, cell, 0, 0) == make_cell([(0, ("E", 0, 1)), (1, ("E", 0, 0))])


def test_face_index_error():
    g = gc.circle()
    cell = make_cell([(0, ("E", 0, 0))])
    with pytest.raises(IndexError):
        face(g, cell, 0, 1)


def test_every_face_of_valid_cell_is_valid(small_complexes):
    cx = small_complexes("star3-n2")
    for dim in range(1, cx.max_dim + 1):
        for cell in cx.cells[dim]:
            for slot in range(dim):
                for side in (0, 1):
                    assert cell_is_valid(cx.graph, face(cx.graph, cell, slot, side))


def test_boundary_of_zero_cell_is_zero():
    g = gc.star(3)
    assert boundary_of_cell(g, make_cell([(0, ("E", 0, 0))])) == {}


def test_boundary_squared_zero_exhaustive(small_complexes):
    cx = small_complexes("banana4-n3")
    g = cx.graph
    for cell in cx.cells[2]:
        total = {}
        for f, s in boundary_of_cell(g, cell).items():
            for ff, ss in boundary_of_cell(g, f).items():
                total[ff] = total.get(ff, 0) + s * ss
        assert not any(total.values())


def test_boundary_matrix_product_vanishes(small_complexes):
    cx = small_complexes("k5-n2")
    d1_cols = {}
    for (r, c), v in gc.boundary_matrix(cx, 1).data.items():
        d1_cols.setdefault(c, {})[r] = v
    d2_cols = {}
    for (r, c), v in gc.boundary_matrix(cx, 2).data.items():
        d2_cols.setdefault(c, {})[r] = v
    for col in d2_cols.values():
        out = {}
        for r, v in col.items():
            for rr, vv in d1_cols.get(r, {}).items():
                out[rr] = out.get(rr, 0) + vv * v
        assert not any(out.values())


# -- corners ----------------------------------------------------------------

def test_corner_of_zero_cell_is_itself():
    g = gc.star(3)
    cell = make_cell([(0, ("E", 1, 0))])
    assert corner_configurations(g, cell) == [cell]


def test_two_cell_corners_distinct_and_valid(small_complexes):
    cx = small_complexes("k5-n2")
    for cell in cx.cells[2][::7]:
        corners = corner_configurations(cx.graph, cell)
        assert len(corners) == 4
        assert len(set(corners)) == 4
        for c in corners:
            assert cell_is_valid(cx.graph, c)
            assert cell_dimension(c) == 0


def test_conflicting_moves_detected_at_corner():
    # two moves toward one junction: the corner with both particles on it
    # is an invalid resting configuration
    g = gc.banana(4)
    candidate = make_cell([(0, ("ME", 0, 0)), (1, ("ME", 1, 0))])
    assert not cell_is_valid(g, candidate)
    corners = corner_configurations(g, candidate)
    bad = make_cell([(0, ("V", 0)), (1, ("V", 0))])
    assert bad in corners
    assert not cell_is_valid(g, bad)


# -- relabeling ----------------------------------------------------------------

def test_relabel_identity_and_inverse():
    g = gc.banana(4)
    cell = make_cell([(0, ("ME", 0, 0)), (1, ("E", 1, 0)), (2, ("E", 2, 0))])
    ident = {0: 0, 1: 1, 2: 2}
    assert relabel_cell(cell, ident) == cell
    perm = {0: 2, 1: 0, 2: 1}
    inv = {2: 0, 0: 1, 1: 2}
    assert relabel_cell(relabel_cell(cell, perm), inv) == cell


def test_relabel_chain_orientation_sign():
    # swapping the two movers of a square reverses its orientation
    g = gc.banana(4)
    cell = make_cell([(0, ("ME", 0, 0)), (1, ("ME", 1, 1))])
    z = gc.Chain(g, 2, {cell: 1})
    swapped = gc.relabel_chain(z, {0: 1, 1: 0})
    assert list(swapped.terms.values()) == [-1]
    # renaming a lone mover never picks up a sign
    single = gc.Chain(g, 1, {make_cell([(0, ("ME", 0, 0)),
                                        (1, ("E", 1, 0))]): 1})
    assert list(gc.relabel_chain(single, {0: 1, 1: 0}).terms.values()) == [1]


def test_relabel_chain_commutes_with_boundary(small_complexes):
    cx = small_complexes("banana4-n3")
    perm = {0: 1, 1: 2, 2: 0}
    for cell in cx.cells[2][::17]:
        z = gc.Chain(cx.graph, 2, {cell: 1})
        lhs = gc.relabel_chain(gc.boundary_chain(z), perm)
        rhs = gc.boundary_chain(gc.relabel_chain(z, perm))
        assert lhs.terms == rhs.terms


def test_betti_invariant_under_all_relabelings(small_complexes):
    cx = small_complexes("banana4-n3")
    base = gc.homology(cx, torsion=False).betti_vector()
    for perm in itertools.permutations(range(3)):
        relabeled = cx.relabeled(dict(enumerate(perm)))
        assert gc.homology(relabeled, torsion=False).betti_vector() == base


# -- chains -------------------------------------------------------------------

def test_chain_algebra():
    g = gc.star(3)
    c1 = make_cell([(0, ("E", 0, 0))])
    c2 = make_cell([(0, ("E", 1, 0))])
    z = gc.Chain(g, 0, {c1: 2, c2: -1})
    w = gc.Chain(g, 0, {c1: -2})
    s = z + w
    assert s.terms == {c2: -1}
    assert (z - z).is_zero()
    assert z.scaled(3).terms == {c1: 6, c2: -3}
    with pytest.raises(ValueError):
        gc.Chain(g, 1, {c1: 1})  # degree mismatch


def test_export_records():
    assert state_record(("ME", 3, 1)) == "ME 3 1"
    assert state_record(("V", 2)) == "V 2"
    cx = gc.enumerate_cells(gc.interval(sinks={0, 1}), 1)
    doc = complex_to_doc(cx)
    assert doc["particles"] == 1
    assert doc["cells"][0] == [[[0, "V 0"]], [[0, "V 1"]]]
    assert doc["boundaries"]["1"] == [[0, 0, -1], [1, 0, 1]]
