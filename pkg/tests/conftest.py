"""Shared independent oracles for the test suite.

These re-derive model facts through deliberately naive code paths (full
cartesian state universes, dense fraction arithmetic, minor expansions)
so that agreement with the library is meaningful.
"""

import itertools
from fractions import Fraction
from math import gcd

import pytest


def reference_cell_valid(g, cell):
    """First-principles transcription of the cell rules, written against
    the raw definitions rather than the library helpers."""
    pids = [p for p, _ in cell]
    if sorted(pids) != list(pids) or len(set(pids)) != len(pids):
        return False
    vertex_load = {}
    edge_ranks = {}
    full_traversals = []
    for _, state in cell:
        kind = state[0]
        if kind == "V":
            v = state[1]
            if not (0 <= v < g.num_vertices):
                return False
            if not g.is_sink(v):
                if g.valence(v) < 2:
                    return False
                vertex_load[v] = vertex_load.get(v, 0) + 1
        elif kind == "E":
            e, r = state[1], state[2]
            if not (0 <= e < g.num_edges):
                return False
            u0, u1 = g.edges[e]
            if g.is_sink(u0) or g.is_sink(u1):
                return False
            edge_ranks.setdefault(e, []).append(r)
        elif kind == "ME":
            e, end = state[1], state[2]
            if not (0 <= e < g.num_edges) or end not in (0, 1):
                return False
            u0, u1 = g.edges[e]
            if g.is_sink(u0) or g.is_sink(u1):
                return False
            target = g.edges[e][end]
            if g.is_sink(target) or g.valence(target) < 2:
                return False
            vertex_load[target] = vertex_load.get(target, 0) + 1
        elif kind == "MF":
            e = state[1]
            if not (0 <= e < g.num_edges):
                return False
            u0, u1 = g.edges[e]
            if not (g.is_sink(u0) or g.is_sink(u1)):
                return False
            for u in (u0, u1):
                if not g.is_sink(u):
                    if g.valence(u) < 2:
                        return False
                    vertex_load[u] = vertex_load.get(u, 0) + 1
            full_traversals.append(e)
        else:
            return False
    if any(load > 1 for load in vertex_load.values()):
        return False
    if len(full_traversals) != len(set(full_traversals)):
        return False
    for ranks in edge_ranks.values():
        if sorted(ranks) != list(range(len(ranks))):
            return False
    return True


def brute_force_cells(g, n):
    """All valid cells of n labeled particles from the full syntactic
    state universe, grouped by dimension."""
    states = [("V", v) for v in range(g.num_vertices)]
    for e in range(g.num_edges):
        states.extend(("E", e, r) for r in range(n))
        states.extend(("ME", e, end) for end in (0, 1))
        states.append(("MF", e))
    by_dim = {}
    for combo in itertools.product(states, repeat=n):
        cell = tuple((p, s) for p, s in enumerate(combo))
        if reference_cell_valid(g, cell):
            dim = sum(1 for s in combo if s[0] in ("ME", "MF"))
            by_dim.setdefault(dim, set()).add(cell)
    return by_dim


def fraction_rank(m):
    """Dense rank over exact fractions."""
    rows = [[Fraction(0)] * m.num_cols for _ in range(m.num_rows)]
    for (r, c), v in m.data.items():
        rows[r][c] = Fraction(v)
    rank = 0
    lead = 0
    for c in range(m.num_cols):
        piv = next((r for r in range(lead, m.num_rows) if rows[r][c]), None)
        if piv is None:
            continue
        rows[lead], rows[piv] = rows[piv], rows[lead]
        for r in range(lead + 1, m.num_rows):
            if rows[r][c]:
                f = rows[r][c] / rows[lead][c]
                for cc in range(c, m.num_cols):
                    rows[r][cc] -= f * rows[lead][cc]
        lead += 1
        rank += 1
    return rank


def minors_gcd_invariant_factors(m):
    """Smith invariant factors through determinantal divisors: d_k is the
    gcd of all k x k minors, and the k-th factor is d_k / d_(k-1).
    Exponential; only for tiny matrices."""
    rows = [[0] * m.num_cols for _ in range(m.num_rows)]
    for (r, c), v in m.data.items():
        rows[r][c] = v

    def det(rs, cs):
        if not rs:
            return 1
        total = 0
        r0 = rs[0]
        for i, c in enumerate(cs):
            minor = det(rs[1:], cs[:i] + cs[i + 1:])
            term = rows[r0][c] * minor
            total += term if i % 2 == 0 else -term
        return total

    factors = []
    prev = 1
    for k in range(1, min(m.num_rows, m.num_cols) + 1):
        dk = 0
        for rs in itertools.combinations(range(m.num_rows), k):
            for cs in itertools.combinations(range(m.num_cols), k):
                dk = gcd(dk, det(list(rs), list(cs)))
        if dk == 0:
            break
        factors.append(dk // prev)
        prev = dk
    return sorted(factors)


@pytest.fixture(scope="session")
def small_complexes():
    """Cache of enumerated complexes reused across test modules."""
    import graphconf as gc
    cache = {}

    def get(name):
        if name not in cache:
            builders = {
                "star3-n2": lambda: gc.enumerate_cells(gc.star(3), 2),
                "star3-n3": lambda: gc.enumerate_cells(gc.star(3), 3),
                "star4-n2": lambda: gc.enumerate_cells(gc.star(4), 2),
                "banana4-n2": lambda: gc.enumerate_cells(gc.banana(4), 2),
                "banana4-n3": lambda: gc.enumerate_cells(gc.banana(4), 3),
                "k5-n2": lambda: gc.enumerate_cells(gc.complete(5), 2),
                "h-n2": lambda: gc.enumerate_cells(gc.h_graph(), 2),
                "intervalsinks-n2": lambda: gc.enumerate_cells(
                    gc.interval(sinks={0, 1}), 2),
            }
            cache[name] = builders[name]()
        return cache[name]

    return get
