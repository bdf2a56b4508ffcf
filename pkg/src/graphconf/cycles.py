"""Explicit cycles in the cube-complex model.

Every 1-cycle here is produced by the same walk machinery: starting from
an assembled configuration (a 0-cell), elementary moves replace one
particle's static state by a move state and step across that 1-cell to
the other face.  Traversing a closed itinerary accumulates cells with
signs +1 along the stored orientation and -1 against it, so the result
has zero boundary by telescoping.  Constructors assert the zero-boundary
contract explicitly.

An "end station" abstracts where a particle rests just off a vertex v on
a chosen half-edge: on an edge without sink endpoints it is the outermost
interior slot at that end, reached by an 'ME' move; on an edge whose far
endpoint is a sink it is the sink vertex itself, reached by an 'MF' move.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .graphs import Graph, GraphSpec, build_graph, edge_of_end, end_side, \
    essential_vertices, other_end, wedge
from .model import (CapExceededError, Chain, CubeComplex, DEFAULT_MAX_CELLS,
                    boundary_chain, cell_is_valid, cell_movers, enumerate_cells,
                    face, is_move_state, make_cell, state_record)


class CycleConstructionError(ValueError):
    """A requested cycle cannot be realized (bad spec, blocked itinerary,
    or conflicting parking)."""


# -- specifications ----------------------------------------------------------

@dataclass(frozen=True)
class StarSpec:
    """Center vertex and an ordered triple of distinct edge-ends at it.

    A loop at the center contributes two usable ends.  The cycle is
    alternating in the triple: an odd permutation of the ends negates it.
    """

    vertex: int
    ends: tuple

    def __post_init__(self):
        if len(self.ends) != 3 or len(set(self.ends)) != 3:
            raise CycleConstructionError("star spec needs three distinct ends")


@dataclass(frozen=True)
class CircuitSpec:
    """Closed walk of edge-ends forming an embedded circuit.

    ``ends[i]`` is the half-edge along which the circuit leaves its i-th
    vertex; the far endpoint of ``ends[i]`` is the next vertex.  Edges and
    vertices are distinct; a single loop edge is the shortest case.
    """

    ends: tuple

    def __post_init__(self):
        if not self.ends:
            raise CycleConstructionError("empty circuit")


@dataclass(frozen=True)
class HSpec:
    """Two distinct vertices joined by an embedded path, with two side
    edge-ends designated at each non-sink endpoint (sink endpoints reorder
    particles on the sink itself and need no side ends)."""

    v: int
    w: int
    path: tuple
    v_sides: tuple = ()
    w_sides: tuple = ()

    def __post_init__(self):
        if self.v == self.w:
            raise CycleConstructionError("h spec endpoints must be distinct")


# -- stations and configuration assembly -------------------------------------

def _check_end(g, end):
    if not 0 <= end < 2 * g.num_edges:
        raise CycleConstructionError(f"no half-edge {end}")
    return end


def _station(g, end):
    """(kind, edge, data) for resting just off ``vertex_of_end(end)`` along
    ``end``: ('slot', e, side) or ('sink', e, far_vertex)."""
    e = edge_of_end(end)
    if g.sink_endpoints(e) == 0:
        return ("slot", e, end_side(end))
    far = g.vertex_of_end(other_end(end))
    if not g.is_sink(far):
        raise CycleConstructionError(
            f"end {end}: sink-incident edge with a non-sink far endpoint"
            " cannot hold a resting particle")
    return ("sink", e, far)


def _station_move(station):
    kind, e, data = station
    return ("ME", e, data) if kind == "slot" else ("MF", e)


def normalize_parking(g, parking):
    """Validate a parking map ``particle -> ('V', v) | ('E', e, k)``; the
    ``k`` of an 'E' state only orders the parked particles of one edge."""
    parking = dict(parking or {})
    for pid, st in parking.items():
        if st[0] == "V":
            if not (g.is_sink(st[1]) or g.valence(st[1]) >= 2):
                raise CycleConstructionError(
                    f"particle {pid} parked on an unusable vertex {st[1]}")
        elif st[0] == "E":
            if g.sink_endpoints(st[1]):
                raise CycleConstructionError(
                    f"particle {pid} parked inside a sink-incident edge")
        else:
            raise CycleConstructionError(f"parking state {st} is not static")
    return parking


def assemble_configuration(g, parking, rests):
    """Build the starting 0-cell from parked particles and active rests.

    ``rests`` maps particles to ``('V', v)`` or ``('end', end)``; an 'end'
    rest occupies the outermost slot at that end (or the far sink).  Parked
    particles on one edge keep their relative nominal order and sit inward
    of any active particle at the edge ends.
    """
    by_edge = {}
    pairs = []
    for pid, st in sorted(parking.items()):
        if st[0] == "V":
            pairs.append((pid, ("V", st[1])))
        else:
            by_edge.setdefault(st[1], []).append((st[2], pid))
    ordered = {e: [pid for _, pid in sorted(slots)] for e, slots in by_edge.items()}
    for pid, rest in sorted(rests.items()):
        if rest[0] == "V":
            pairs.append((pid, ("V", rest[1])))
            continue
        kind, e, data = _station(g, rest[1])
        if kind == "sink":
            pairs.append((pid, ("V", data)))
        elif data == 0:
            ordered.setdefault(e, []).insert(0, pid)
        else:
            ordered.setdefault(e, []).append(pid)
    for e, pids in ordered.items():
        for r, pid in enumerate(pids):
            pairs.append((pid, ("E", e, r)))
    cell = make_cell(pairs)
    if not cell_is_valid(g, cell):
        raise CycleConstructionError(
            "parking conflicts with the active configuration")
    return cell


class _Walk:
    """Accumulates 1-cells along an itinerary of elementary moves."""

    def __init__(self, graph, start):
        self.graph = graph
        self.start = start
        self.config = start
        self.terms = {}

    def move(self, pid, move_state):
        g = self.graph
        rest = []
        old = None
        for p, s in self.config:
            if p == pid:
                old = s
            else:
                rest.append((p, s))
        if old is None or is_move_state(old):
            raise CycleConstructionError(f"particle {pid} has no static state")
        if old[0] == "E":
            e, r = old[1], old[2]
            rest = [(p, ("E", s[1], s[2] - 1))
                    if s[0] == "E" and s[1] == e and s[2] > r else (p, s)
                    for p, s in rest]
        cell = make_cell(rest + [(pid, move_state)])
        if not cell_is_valid(g, cell):
            raise CycleConstructionError(
                f"itinerary blocked: move {move_state} of particle {pid}"
                " is not independent of the rest of the configuration")
        slot = [p for p, _ in cell_movers(cell)].index(pid)
        f0 = face(g, cell, slot, 0)
        f1 = face(g, cell, slot, 1)
        if f0 == self.config:
            coef, nxt = 1, f1
        elif f1 == self.config:
            coef, nxt = -1, f0
        else:
            raise CycleConstructionError(
                "elementary move does not start at the current configuration")
        c = self.terms.get(cell, 0) + coef
        if c:
            self.terms[cell] = c
        else:
            self.terms.pop(cell, None)
        self.config = nxt

    def go_through_end(self, pid, end):
        """Move ``pid`` between the vertex of ``end`` and its station."""
        self.move(pid, _station_move(_station(self.graph, end)))

    def traverse_edge(self, pid, end):
        """Move ``pid`` along the edge of ``end`` from the vertex of ``end``
        to the far endpoint."""
        g = self.graph
        e = edge_of_end(end)
        if g.sink_endpoints(e) == 0:
            self.move(pid, ("ME", e, end_side(end)))
            self.move(pid, ("ME", e, end_side(other_end(end))))
        else:
            self.move(pid, ("MF", e))

    def chain(self):
        if self.config != self.start:
            raise CycleConstructionError("itinerary is not closed")
        return Chain(self.graph, 1, self.terms)


def _closed(walk):
    z = walk.chain()
    assert boundary_chain(z).is_zero(), "constructed chain is not a cycle"
    return z


# -- star cycles --------------------------------------------------------------

def _check_star_spec(g, spec):
    v = spec.vertex
    if g.is_sink(v):
        raise CycleConstructionError("star center must not be a sink")
    if g.valence(v) < 3:
        raise CycleConstructionError(
            f"star center needs valence >= 3, has {g.valence(v)}")
    for end in spec.ends:
        _check_end(g, end)
        if g.vertex_of_end(end) != v:
            raise CycleConstructionError(f"end {end} is not incident to {v}")


def star_cycle_chain(g, spec, pair, parking=None):
    """The twelve-cell shuffle of two particles over three ends of a star.

    Both particles start on different ends; in turns each moves across the
    center to the free end until the initial configuration returns.  Each
    of the six transits contributes its outbound and inbound 1-cells, for
    a support of exactly twelve cells with coefficients +-1: the cell with
    a particle moving at end a and the other resting at end b carries the
    sign of the cyclic orientation of (a, b) within the spec triple.
    """
    spec = spec if isinstance(spec, StarSpec) else StarSpec(*spec)
    _check_star_spec(g, spec)
    x, y = pair
    if x == y:
        raise CycleConstructionError("star cycle needs two distinct particles")
    parking = normalize_parking(g, parking)
    if x in parking or y in parking:
        raise CycleConstructionError("active particle is also parked")
    d0, d1, d2 = spec.ends
    start = assemble_configuration(
        g, parking, {x: ("end", d0), y: ("end", d1)})
    walk = _Walk(g, start)
    for pid, frm, to in ((x, d0, d2), (y, d1, d0), (x, d2, d1),
                         (y, d0, d2), (x, d1, d0), (y, d2, d1)):
        walk.go_through_end(pid, frm)
        walk.go_through_end(pid, to)
    z = _closed(walk)
    if len({edge_of_end(d) for d in spec.ends}) == 3:
        assert len(z) == 12, "star cycle support must be twelve cells"
    return z


def star_cycle(cx, spec, pair, parking=None):
    return star_cycle_chain(cx.graph, spec, pair, parking)


def star4_relation_chain(g, vertex, ends, pair, parking=None):
    """Alternating sum of the four star cycles over the 3-subsets of four
    ends, the omitted index carrying the sign; cancels cell by cell."""
    ends = tuple(ends)
    if len(ends) != 4 or len(set(ends)) != 4:
        raise CycleConstructionError("the relation needs four distinct ends")
    total = Chain(g, 1)
    for i in range(4):
        sub = tuple(d for j, d in enumerate(ends) if j != i)
        z = star_cycle_chain(g, StarSpec(vertex, sub), pair, parking)
        total = total + (z if i % 2 == 0 else -z)
    return total


def star4_relation(cx, vertex, ends, pair, parking=None):
    return star4_relation_chain(cx.graph, vertex, ends, pair, parking)


# -- circuit cycles ------------------------------------------------------------

def _check_circuit(g, spec):
    ends = spec.ends
    for h in ends:
        _check_end(g, h)
    edges = [edge_of_end(h) for h in ends]
    if len(set(edges)) != len(edges):
        raise CycleConstructionError("circuit repeats an edge")
    verts = [g.vertex_of_end(h) for h in ends]
    if len(set(verts)) != len(verts):
        raise CycleConstructionError("circuit repeats a vertex")
    for i, h in enumerate(ends):
        nxt = ends[(i + 1) % len(ends)]
        if g.vertex_of_end(other_end(h)) != g.vertex_of_end(nxt):
            raise CycleConstructionError("circuit ends do not chain up")
    return verts


def circuit_cycle_chain(g, spec, particles, parking=None):
    """One or more particles travelling once around an embedded circuit.

    A single particle walks the whole circuit (two cells per sink-free
    edge, one full traversal per sink-incident edge).  Several particles
    are supported on one-edge circuits, i.e. loops, where they rotate
    cyclically in the given order; this realizes the classes that move all
    particles of a circle component at once.
    """
    spec = spec if isinstance(spec, CircuitSpec) else CircuitSpec(tuple(spec))
    verts = _check_circuit(g, spec)
    if isinstance(particles, int):
        particles = (particles,)
    particles = tuple(particles)
    if len(set(particles)) != len(particles) or not particles:
        raise CycleConstructionError("need distinct active particles")
    parking = normalize_parking(g, parking)
    if any(p in parking for p in particles):
        raise CycleConstructionError("active particle is also parked")

    if len(particles) == 1:
        p = particles[0]
        start = assemble_configuration(g, parking, {p: ("V", verts[0])})
        walk = _Walk(g, start)
        for h in spec.ends:
            walk.traverse_edge(p, h)
        return _closed(walk)

    if len(spec.ends) != 1:
        raise CycleConstructionError(
            "multi-particle rotation is supported on loop circuits only")
    e = edge_of_end(spec.ends[0])
    u = verts[0]
    m = len(particles)
    if g.is_sink(u):
        # every particle traverses the loop once; each full traversal is
        # already closed since both endpoints coincide
        start = assemble_configuration(
            g, parking, {p: ("V", u) for p in particles})
        walk = _Walk(g, start)
        for p in particles:
            walk.move(p, ("MF", e))
        return _closed(walk)
    interior = dict(parking)
    for i, p in enumerate(particles[1:]):
        interior[p] = ("E", e, i)
    start = assemble_configuration(g, interior, {particles[0]: ("V", u)})
    walk = _Walk(g, start)
    for j in range(m):
        walk.move(particles[j], ("ME", e, 1))
        walk.move(particles[(j + 1) % m], ("ME", e, 0))
    return _closed(walk)


def circuit_cycle(cx, spec, particles, parking=None):
    return circuit_cycle_chain(cx.graph, spec, particles, parking)


# -- h cycles -----------------------------------------------------------------

def _check_h_spec(g, spec):
    if not spec.path:
        raise CycleConstructionError("h spec needs a connecting path")
    for h in spec.path + spec.v_sides + spec.w_sides:
        _check_end(g, h)
    verts = [g.vertex_of_end(spec.path[0])]
    for h in spec.path:
        if g.vertex_of_end(h) != verts[-1]:
            raise CycleConstructionError("path ends do not chain up")
        verts.append(g.vertex_of_end(other_end(h)))
    if verts[0] != spec.v or verts[-1] != spec.w:
        raise CycleConstructionError("path does not join the two endpoints")
    if len(set(verts)) != len(verts):
        raise CycleConstructionError("path is not embedded")
    edges = [edge_of_end(h) for h in spec.path]
    if len(set(edges)) != len(edges):
        raise CycleConstructionError("path repeats an edge")
    for vertex, sides, path_end in ((spec.v, spec.v_sides, spec.path[0]),
                                    (spec.w, spec.w_sides, other_end(spec.path[-1]))):
        if g.is_sink(vertex):
            continue
        if len(sides) != 2 or len(set(sides)) != 2:
            raise CycleConstructionError(
                f"non-sink endpoint {vertex} needs two distinct side ends")
        for s in sides:
            if g.vertex_of_end(s) != vertex:
                raise CycleConstructionError(f"side end {s} is not at {vertex}")
            if s == path_end:
                raise CycleConstructionError("side end lies on the path")


def h_cycle_chain(g, spec, pair, parking=None):
    """Difference of the two orders in which a particle pair crosses a
    path between two reordering vertices.

    At a sink endpoint the particles stack on the sink itself; at a
    non-sink endpoint each particle keeps its own designated side end.
    Both crossing orders join the same two configurations, so the
    difference closes up.
    """
    spec = spec if isinstance(spec, HSpec) else HSpec(*spec)
    _check_h_spec(g, spec)
    x, y = pair
    if x == y:
        raise CycleConstructionError("h cycle needs two distinct particles")
    parking = normalize_parking(g, parking)
    if x in parking or y in parking:
        raise CycleConstructionError("active particle is also parked")

    if g.is_sink(spec.v):
        rests = {x: ("V", spec.v), y: ("V", spec.v)}
        sides = {}
    else:
        rests = {x: ("end", spec.v_sides[0]), y: ("end", spec.v_sides[1])}
        sides = {x: spec.v_sides[0], y: spec.v_sides[1]}
    targets = {x: spec.w_sides[0], y: spec.w_sides[1]} if spec.w_sides else {}
    start = assemble_configuration(g, parking, rests)

    def crossing(walk, pid):
        if sides:
            walk.go_through_end(pid, sides[pid])
        for h in spec.path:
            walk.traverse_edge(pid, h)
        if targets:
            walk.go_through_end(pid, targets[pid])

    first = _Walk(g, start)
    crossing(first, x)
    crossing(first, y)
    second = _Walk(g, start)
    crossing(second, y)
    crossing(second, x)
    if first.config != second.config:
        raise CycleConstructionError("the two crossing orders do not meet")
    z = Chain(g, 1, first.terms) - Chain(g, 1, second.terms)
    assert boundary_chain(z).is_zero(), "h cycle is not a cycle"
    if z.is_zero():
        raise CycleConstructionError("h cycle degenerated to zero")
    return z


def h_cycle(cx, spec, pair, parking=None):
    return h_cycle_chain(cx.graph, spec, pair, parking)


# -- products and push-ins ------------------------------------------------------

def _state_support(g, state):
    kind = state[0]
    if kind == "V":
        return (("v", state[1]),)
    if kind == "E":
        return (("e", state[1]),)
    if kind == "ME":
        return (("e", state[1]), ("v", g.edges[state[1]][state[2]]))
    u, v = g.edges[state[1]]
    return (("e", state[1]), ("v", u), ("v", v))


def chain_support_elements(z):
    """Vertices and edges touched by any cell of the chain."""
    elems = set()
    for cell in z.terms:
        for _, s in cell:
            elems.update(_state_support(z.graph, s))
    return elems


def chain_particles(z):
    pids = set()
    for cell in z.terms:
        pids.update(p for p, _ in cell)
    return pids


def _shuffle_sign(pids1, pids2):
    inv = sum(1 for a in pids1 for b in pids2 if a > b)
    return -1 if inv % 2 else 1


def product_chain(z1, z2):
    """Bilinear cell-wise product of chains with disjoint particle sets and
    disjoint graph support.

    The merged move slots are ordered by particle id, so each cell pair
    picks up the sign of the shuffle interleaving the two mover id lists;
    this is exactly what makes the graded Leibniz rule hold.
    """
    if z1.graph != z2.graph:
        raise ValueError("product factors live on different graphs")
    if chain_particles(z1) & chain_particles(z2):
        raise ValueError("product factors share particles")
    if chain_support_elements(z1) & chain_support_elements(z2):
        raise ValueError("product factors share graph support")
    terms = {}
    for c1, a1 in z1.terms.items():
        movers1 = [p for p, s in c1 if is_move_state(s)]
        for c2, a2 in z2.terms.items():
            movers2 = [p for p, s in c2 if is_move_state(s)]
            coef = a1 * a2 * _shuffle_sign(movers1, movers2)
            cell = make_cell(c1 + c2)
            v = terms.get(cell, 0) + coef
            if v:
                terms[cell] = v
            else:
                terms.pop(cell, None)
    return Chain(z1.graph, z1.degree + z2.degree, terms)


def parked_chain(g, parking):
    """Degree-0 chain with one cell holding the parked particles."""
    cell = assemble_configuration(g, normalize_parking(g, parking), {})
    return Chain(g, 0, {cell: 1})


def push_in(z, e, s, leaf_end=None):
    """Insert a new particle ``s`` just inside the leaf end of edge ``e``.

    The particle occupies the outermost interior slot at the leaf end and
    existing occupants re-rank; if the leaf vertex is a sink the particle
    sits on it, and if instead the inner endpoint is a sink (the edge then
    has no interior slots in the model) the particle settles there.  This
    is a chain map: it commutes with the boundary and sends cycles to
    cycles.
    """
    g = z.graph
    if not 0 <= e < g.num_edges:
        raise ValueError(f"no edge {e}")
    if leaf_end is None:
        if g.valence(g.edges[e][1]) == 1:
            leaf_end = 1
        elif g.valence(g.edges[e][0]) == 1:
            leaf_end = 0
        else:
            raise ValueError(f"edge {e} is not a leaf edge")
    leaf = g.edges[e][leaf_end]
    if g.valence(leaf) != 1:
        raise ValueError(f"end {leaf_end} of edge {e} is not a leaf")
    if s in chain_particles(z):
        raise ValueError(f"particle {s} already present")

    def insert(cell):
        if g.is_sink(leaf):
            return make_cell(cell + ((s, ("V", leaf)),))
        if g.sink_endpoints(e):
            inner = g.edges[e][1 - leaf_end]
            return make_cell(cell + ((s, ("V", inner)),))
        if leaf_end == 0:
            shifted = tuple(
                (p, ("E", e, st[2] + 1)) if st[0] == "E" and st[1] == e else (p, st)
                for p, st in cell)
            return make_cell(shifted + ((s, ("E", e, 0)),))
        count = sum(1 for _, st in cell if st[0] == "E" and st[1] == e)
        return make_cell(cell + ((s, ("E", e, count)),))

    return Chain(g, z.degree, {insert(c): v for c, v in z.terms.items()})


# -- the non-product two-cycle --------------------------------------------------

def _parallel_four_layout(g):
    """Ends at the two vertices of the four parallel edges 0..3, which must
    join vertices 0 and 1 with no sinks involved."""
    if g.num_vertices < 2 or g.num_edges < 4:
        raise CycleConstructionError("expected four parallel edges")
    for e in range(4):
        if set(g.edges[e]) != {0, 1}:
            raise CycleConstructionError(
                "edges 0..3 must join vertices 0 and 1")
    if 0 in g.sinks or 1 in g.sinks:
        raise CycleConstructionError("the two junction vertices must not be sinks")
    v_ends = tuple(2 * e + (0 if g.edges[e][0] == 0 else 1) for e in range(4))
    w_ends = tuple(other_end(h) for h in v_ends)
    return v_ends, w_ends


def nonproduct_cycle_chain(g, particles=(0, 1, 2)):
    """The 144-cell 2-cycle of three particles on four parallel edges.

    For each choice of a moving pair and each omitted edge (signed by its
    index), the twelve-cell star shuffle of the pair at one junction is
    multiplied with the 1-cell carrying the third particle along the
    omitted edge toward the other junction.  The junction-side boundary
    parts vanish by the four-star relation; the slot-side parts cancel in
    pairs across the choices of the pair.
    """
    v_ends, w_ends = _parallel_four_layout(g)
    particles = tuple(particles)
    total = Chain(g, 2)
    for t in particles:
        pair = tuple(sorted(set(particles) - {t}))
        for i in range(4):
            ends = tuple(d for j, d in enumerate(v_ends) if j != i)
            z = star_cycle_chain(g, StarSpec(0, ends), pair)
            mover = Chain(g, 1, {make_cell([(t, ("ME", i, end_side(w_ends[i])))]): 1})
            piece = product_chain(z, mover)
            total = total + (piece if i % 2 == 0 else -piece)
    assert len(total) == 144, "expected 144 distinct cells"
    assert boundary_chain(total).is_zero(), "the 144-cell chain must be a cycle"
    return total


def nonproduct_cycle(cx):
    """The 144-cell 2-cycle on the three-particle complex of the four-edge
    banana graph."""
    if cx.n != 3:
        raise CycleConstructionError("the non-product cycle needs 3 particles")
    g = cx.graph
    if g.num_vertices != 2 or g.num_edges != 4 or g.sinks:
        raise CycleConstructionError(
            "expected the two-vertex graph with four parallel edges and no sinks")
    return nonproduct_cycle_chain(g)


@dataclass
class LoopAugmentedCycle:
    spec: GraphSpec
    graph: Graph
    num_particles: int
    degree: int
    description: str
    chain: Chain | None = None
    complex: CubeComplex | None = None
    checks: dict = field(default_factory=dict)


def loop_augmented_nonproduct(k, materialize=None, max_cells=DEFAULT_MAX_CELLS):
    """The four-edge banana with ``k`` looped stems at one junction, and
    the recipe multiplying the 144-cell 2-cycle with one circle class per
    loop: a ``(k+2)``-cycle on ``k+3`` particles.

    For ``k <= 1`` the chain is materialized and checked; materializing
    ``k >= 2`` is past desk scale by design and raises the cap error.
    """
    if k < 0:
        raise ValueError("loop count must be nonnegative")
    g = build_graph(GraphSpec.named("banana", 4))
    for _ in range(k):
        g = wedge(g, 0, Graph(2, [(0, 1), (1, 1)]), 0)
    spec = GraphSpec.explicit(g.num_vertices, g.edges, sorted(g.sinks))
    description = ("product of the 144-cell two-cycle on the parallel edges"
                   f" with {k} one-particle circle class(es) on the attached loops")
    result = LoopAugmentedCycle(spec=spec, graph=g, num_particles=k + 3,
                                degree=k + 2, description=description)
    if materialize is None:
        materialize = k <= 1
    if not materialize:
        return result
    if k >= 2:
        raise CapExceededError(
            "materializing the augmented cycle for k >= 2 is beyond desk scale")
    z = nonproduct_cycle_chain(g)
    for j in range(k):
        loop_edge = 4 + 2 * j + 1
        z = product_chain(
            z, circuit_cycle_chain(g, CircuitSpec((2 * loop_edge,)), 3 + j))
    cx = enumerate_cells(g, k + 3, max_cells=max_cells)
    from .homology import is_boundary, is_cycle
    result.chain = z
    result.complex = cx
    result.checks = {
        "support": len(z),
        "is_cycle": is_cycle(z),
        "is_boundary": is_boundary(z, cx),
    }
    return result


# -- local star bases -----------------------------------------------------------

def one_dim_cycle_basis(cx):
    """Fundamental-cycle basis of the first homology of a complex of
    dimension at most one: one cycle per 1-cell outside a breadth-first
    spanning forest of the 1-skeleton."""
    if cx.max_dim > 1:
        raise ValueError("cycle basis needs a complex of dimension <= 1")
    g = cx.graph
    if cx.max_dim < 1:
        return []
    n0 = len(cx.cells[0])
    adj = [[] for _ in range(n0)]
    faces = []
    for j, cell in enumerate(cx.cells[1]):
        a = cx.index[face(g, cell, 0, 0)][1]
        b = cx.index[face(g, cell, 0, 1)][1]
        faces.append((a, b))
        adj[a].append((b, j, 1))
        adj[b].append((a, j, -1))
    visited = [False] * n0
    to_root = [None] * n0  # sparse chain with boundary (node - root)
    tree = set()
    for root in range(n0):
        if visited[root]:
            continue
        visited[root] = True
        to_root[root] = {}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, j, s in adj[x]:
                if visited[y]:
                    continue
                visited[y] = True
                tree.add(j)
                pc = dict(to_root[x])
                pc[j] = pc.get(j, 0) + s
                to_root[y] = pc
                queue.append(y)
    basis = []
    for j, (a, b) in enumerate(faces):
        if j in tree:
            continue
        coeffs = {j: 1}
        for jj, s in to_root[b].items():
            coeffs[jj] = coeffs.get(jj, 0) - s
        for jj, s in to_root[a].items():
            coeffs[jj] = coeffs.get(jj, 0) + s
        terms = {cx.cells[1][jj]: v for jj, v in coeffs.items() if v}
        basis.append(Chain(g, 1, terms))
    return basis


def _local_star(g, v):
    """The star neighborhood of ``v`` as a standalone graph: incident
    edges keep their stored orientation and slot ranks, non-loop far
    endpoints become stubs (sinks when they were sinks).

    Returns the subgraph, the local-to-global edge map, and the
    local-to-global vertex map.
    """
    edges = []
    edge_map = []
    vertex_map = {0: v}
    sinks = set()
    next_vertex = 1
    for e in range(g.num_edges):
        u0, u1 = g.edges[e]
        if u0 != v and u1 != v:
            continue
        if u0 == v and u1 == v:
            edges.append((0, 0))
        else:
            far = u1 if u0 == v else u0
            edges.append((0, next_vertex) if u0 == v else (next_vertex, 0))
            vertex_map[next_vertex] = far
            if g.is_sink(far):
                sinks.add(next_vertex)
            next_vertex += 1
        edge_map.append(e)
    return Graph(next_vertex, edges, sinks), edge_map, vertex_map


def _map_local_state(edge_map, vertex_map, state):
    kind = state[0]
    if kind == "V":
        return ("V", vertex_map[state[1]])
    if kind == "E":
        return ("E", edge_map[state[1]], state[2])
    if kind == "ME":
        return ("ME", edge_map[state[1]], state[2])
    return ("MF", edge_map[state[1]])


def local_star_classes(g, v, actives, max_cells=DEFAULT_MAX_CELLS):
    """A complete set of degree-1 classes of the given particles confined
    to the star neighborhood of the essential vertex ``v``.

    The confined model is one-dimensional (one essential vertex, no
    sink-to-sink edges), so a spanning-forest cycle basis of it is a basis
    of its first homology; these map verbatim onto cells of the ambient
    graph."""
    sub, edge_map, vertex_map = _local_star(g, v)
    cx = enumerate_cells(sub, len(actives), max_cells=max_cells)
    actives = tuple(sorted(actives))
    out = []
    for z in one_dim_cycle_basis(cx):
        terms = {}
        for cell, coef in z.terms.items():
            pairs = [(actives[p], _map_local_state(edge_map, vertex_map, s))
                     for p, s in cell]
            terms[make_cell(pairs)] = coef
        out.append(Chain(g, 1, terms))
    return out


# -- enumeration of candidate generating cycles --------------------------------

@dataclass(frozen=True)
class EnumerationCaps:
    max_chains: int = 4000
    max_parkings: int = 24
    max_path_edges: int = 4
    max_circuit_edges: int = 6
    max_local_cells: int = 200_000


@dataclass
class BasicClasses:
    chains: list
    truncated: bool = False


def star_specs(g):
    specs = []
    for v in sorted(essential_vertices(g)):
        if g.is_sink(v):
            continue
        for triple in itertools.combinations(sorted(g.ends_at(v)), 3):
            specs.append(StarSpec(v, triple))
    return specs


def circuit_specs(g, max_edges=6):
    """Embedded circuits, one representative per edge set (the edge set of
    an embedded circuit determines it up to rotation and reflection)."""
    specs = [CircuitSpec((2 * e,)) for e in range(g.num_edges) if g.is_loop(e)]
    seen = set()

    def extend(start, at, ends, verts, used):
        if len(ends) >= max_edges:
            return
        for h in sorted(g.ends_at(at)):
            e = edge_of_end(h)
            if g.is_loop(e) or e in used or g.vertex_of_end(h) != at:
                continue
            far = g.vertex_of_end(other_end(h))
            if far == start:
                if ends:
                    key = frozenset(used | {e})
                    if key not in seen:
                        seen.add(key)
                        specs.append(CircuitSpec(ends + (h,)))
                continue
            if far < start or far in verts:
                continue
            extend(start, far, ends + (h,), verts | {far}, used | {e})

    for start in range(g.num_vertices):
        extend(start, start, (), {start}, frozenset())
    return specs


def h_specs(g, max_path_edges=4):
    """Endpoint pairs (sinks or essential vertices) joined by short embedded
    paths, with canonical side ends at non-sink endpoints."""
    anchors = sorted(set(essential_vertices(g)) | g.sinks)
    specs = []
    for v, w in itertools.combinations(anchors, 2):
        for path in _embedded_paths(g, v, w, max_path_edges):
            v_sides = () if g.is_sink(v) else _side_ends(g, v, path[0])
            w_sides = () if g.is_sink(w) else _side_ends(g, w, other_end(path[-1]))
            if v_sides is None or w_sides is None:
                continue
            specs.append(HSpec(v, w, path, v_sides, w_sides))
    return specs


def _side_ends(g, v, path_end):
    free = [h for h in sorted(g.ends_at(v)) if h != path_end]
    if len(free) < 2:
        return None
    return tuple(free[:2])


def _embedded_paths(g, v, w, max_edges):
    paths = []

    def extend(at, ends, verts):
        if len(ends) >= max_edges:
            return
        for h in sorted(g.ends_at(at)):
            e = edge_of_end(h)
            if g.is_loop(e) or g.vertex_of_end(h) != at:
                continue
            if e in {edge_of_end(x) for x in ends}:
                continue
            far = g.vertex_of_end(other_end(h))
            if far == w:
                paths.append(ends + (h,))
                continue
            if far in verts:
                continue
            extend(far, ends + (h,), verts | {far})

    extend(v, (), {v})
    return paths


def _parking_options(g, remaining, blocked, caps, deep_ends=()):
    """Deterministic parkings of the remaining particles over sinks,
    non-blocked sink-free edges, and the deep slots behind the given ends;
    edge and deep groups run through all orders."""
    if not remaining:
        return [dict()]
    containers = [("V", s) for s in sorted(g.sinks)]
    for e in range(g.num_edges):
        if g.sink_endpoints(e) == 0 and e not in blocked:
            containers.append(("E", e))
    containers.extend(("D", h) for h in deep_ends)
    if not containers:
        return []
    options = []
    for combo in itertools.product(range(len(containers)), repeat=len(remaining)):
        groups = {}
        for pid, ci in zip(remaining, combo):
            groups.setdefault(ci, []).append(pid)
        orderings = []
        for ci, pids in sorted(groups.items()):
            if containers[ci][0] == "V":
                orderings.append([(ci, tuple(pids))])
            else:
                orderings.append([(ci, perm)
                                  for perm in itertools.permutations(pids)])
        for arrangement in itertools.product(*orderings):
            parking = {}
            for ci, pids in arrangement:
                kind, data = containers[ci]
                for slot, pid in enumerate(pids):
                    parking[pid] = ("V", data) if kind == "V" else (kind, data, slot)
            options.append(parking)
            if len(options) >= caps.max_parkings:
                return options
    return options


def _attach_parked(z, g, parking):
    """Merge constant parked states into every cell of a partial chain.

    Parked particles sit on sinks, on edges untouched by the chain, or
    "deep" behind an end the chain rests on: a ``('D', end, k)`` entry
    parks leafward of every active occupant of that end's edge, so the
    moves of the chain never interact with it.  Ranks are recomputed per
    cell where an edge is shared.
    """
    if not parking:
        return z
    fixed = []
    free_edges = {}
    deep = {}
    for pid, st in sorted(parking.items()):
        if st[0] == "V":
            fixed.append((pid, ("V", st[1])))
        elif st[0] == "E":
            free_edges.setdefault(st[1], []).append((st[2], pid))
        else:
            end = st[1]
            deep.setdefault(edge_of_end(end), [end_side(end), []])[1].append(
                (st[2], pid))
    for e, slots in free_edges.items():
        for r, (_, pid) in enumerate(sorted(slots)):
            fixed.append((pid, ("E", e, r)))
    terms = {}
    for cell, coef in z.terms.items():
        pairs = list(cell) + fixed
        for e, (side, slots) in deep.items():
            group = [pid for _, pid in sorted(slots)]
            if side == 0:
                # actives hug the iota end; parked fill the tau side
                j = sum(1 for _, s in cell if s[0] == "E" and s[1] == e)
                pairs.extend((pid, ("E", e, j + k)) for k, pid in enumerate(group))
            else:
                # parked fill the iota side and push the actives up
                p = len(group)
                pairs = [(q, ("E", e, s[2] + p))
                         if s[0] == "E" and s[1] == e else (q, s)
                         for q, s in pairs]
                pairs.extend((pid, ("E", e, k)) for k, pid in enumerate(group))
        merged = make_cell(pairs)
        if not cell_is_valid(g, merged):
            raise CycleConstructionError("parking conflicts with the cycle")
        terms[merged] = coef
    return Chain(g, z.degree, terms)


def _deep_ends(g, ends):
    """Ends usable for deep parking: not loops, not sink-incident."""
    out = []
    for h in ends:
        e = edge_of_end(h)
        if not g.is_loop(e) and g.sink_endpoints(e) == 0:
            out.append(h)
    return tuple(sorted(set(out)))


def _candidate_partials(g, n, caps):
    """Candidate cycle makers: classic two-particle star shuffles, the
    complete local star bases at the essential vertices, circuit
    rotations, and path crossings.

    Each entry is ``(make, actives, blocked_edges, deep_ends)`` where
    ``make(parking)`` realizes the cycle with the given parked particles.
    Star, circuit and crossing cycles take parking in their constructor
    (so particles may park inward on the edges the cycle rests on); the
    prebuilt local classes get parking merged in afterwards, with the
    ``deep_ends`` available for leafward slots on their own edges.
    """
    out = []
    pids = range(n)

    def constructor(fn, *args):
        return lambda parking: fn(g, *args, parking)

    for spec in star_specs(g):
        for pair in itertools.combinations(pids, 2):
            try:
                if star_cycle_chain(g, spec, pair).is_zero():
                    continue
            except CycleConstructionError:
                continue
            out.append((constructor(star_cycle_chain, spec, pair),
                        pair, frozenset(), ()))
    for v in sorted(essential_vertices(g)):
        if g.is_sink(v):
            continue
        blocked = frozenset(edge_of_end(h) for h in g.ends_at(v))
        deep = _deep_ends(g, g.ends_at(v))
        for m in range(2, n + 1):
            for actives in itertools.combinations(pids, m):
                for z in local_star_classes(g, v, actives,
                                            max_cells=caps.max_local_cells):
                    out.append((
                        lambda parking, z=z: _attach_parked(z, g, parking),
                        actives, blocked, deep))
    for spec in circuit_specs(g, caps.max_circuit_edges):
        blocked = frozenset(edge_of_end(h) for h in spec.ends)
        if len(spec.ends) == 1:
            groups = []
            for m in range(1, n + 1):
                for subset in itertools.combinations(pids, m):
                    for order in itertools.permutations(subset[1:]):
                        groups.append((subset[0],) + order)
        else:
            groups = [(p,) for p in pids]
        for actives in groups:
            try:
                circuit_cycle_chain(g, spec, actives)
            except CycleConstructionError:
                continue
            out.append((constructor(circuit_cycle_chain, spec, actives),
                        actives, blocked, ()))
    for spec in h_specs(g, caps.max_path_edges):
        blocked = frozenset(edge_of_end(h) for h in spec.path)
        for pair in itertools.combinations(pids, 2):
            try:
                h_cycle_chain(g, spec, pair)
            except CycleConstructionError:
                continue
            out.append((constructor(h_cycle_chain, spec, pair),
                        pair, blocked, ()))
    return out


def enumerate_basic_classes(cx, degree=1, caps=None):
    """Deterministic candidate generating cycles.

    Degree 1: two-particle star shuffles, the full local star basis at
    every essential vertex for every active particle subset, circuit
    rotations and path-crossing differences, each filled up to all
    particles by parking the rest over sinks and untouched edges.  Degree
    2: products of two degree-1 candidates with disjoint particles and
    disjoint graph support.  Returns the chains and a truncation flag.
    """
    caps = caps or EnumerationCaps()
    g = cx.graph
    n = cx.n
    if degree not in (1, 2):
        raise ValueError("only degrees 1 and 2 are enumerated")
    partials = _candidate_partials(g, n, caps)
    chains = []
    truncated = False

    def emit(chain):
        nonlocal truncated
        if len(chains) >= caps.max_chains:
            truncated = True
            return False
        chains.append(chain)
        return True

    if degree == 1:
        for make, actives, blocked, deep in partials:
            remaining = [p for p in range(n) if p not in actives]
            for parking in _parking_options(g, remaining, blocked, caps, deep):
                try:
                    full = make(parking)
                except CycleConstructionError:
                    continue
                if not emit(full):
                    return BasicClasses(chains, truncated)
        return BasicClasses(chains, truncated)

    built = []
    for make, actives, blocked, _ in partials:
        try:
            built.append((make({}), actives, blocked))
        except CycleConstructionError:
            continue
    for i, (z1, act1, blk1) in enumerate(built):
        for z2, act2, blk2 in built[i + 1:]:
            if set(act1) & set(act2):
                continue
            remaining = [p for p in range(n)
                         if p not in act1 and p not in act2]
            try:
                z = product_chain(z1, z2)
            except ValueError:
                continue
            blocked = (blk1 | blk2
                       | {elem[1] for elem in chain_support_elements(z)
                          if elem[0] == "e"})
            for parking in _parking_options(g, remaining, blocked, caps):
                try:
                    full = _attach_parked(z, g, parking)
                except CycleConstructionError:
                    continue
                if not emit(full):
                    return BasicClasses(chains, truncated)
    return BasicClasses(chains, truncated)


# -- export ---------------------------------------------------------------

def chain_to_doc(z):
    """Chain export: (coefficient, cell) pairs in the cell record syntax."""
    return {
        "degree": z.degree,
        "support_size": len(z.terms),
        "cells": [
            {"coefficient": coef,
             "cell": [[p, state_record(s)] for p, s in cell]}
            for cell, coef in sorted(z.terms.items())
        ],
    }


def cycle_report(z, cx):
    """Certificate summary for one chain on a complex: degree, support,
    cycle and boundary status, and the rank its class contributes on top
    of the boundaries."""
    from .homology import class_span_rank, is_boundary, is_cycle
    cycle = is_cycle(z)
    return {
        "degree": z.degree,
        "support_size": len(z.terms),
        "is_cycle": cycle,
        "is_boundary": is_boundary(z, cx),
        "span_contribution": class_span_rank([z], cx, z.degree) if cycle else 0,
    }
