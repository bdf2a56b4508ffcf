"""Exact integer linear algebra and homology of cube complexes.

All arithmetic is arbitrary-precision integer arithmetic; ranks are exact
ranks over the rationals and torsion is certified through Smith normal
form invariant factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .model import (CapExceededError, SparseEntries, boundary_chain, face)


class SparseIntMatrix:
    """Sparse integer matrix in coordinate form."""

    __slots__ = ("num_rows", "num_cols", "data")

    def __init__(self, num_rows, num_cols, entries=()):
        self.num_rows = num_rows
        self.num_cols = num_cols
        data = {}
        if isinstance(entries, dict):
            entries = [(r, c, v) for (r, c), v in entries.items()]
        for r, c, v in entries:
            if not (0 <= r < num_rows and 0 <= c < num_cols):
                raise ValueError(f"entry ({r},{c}) out of range")
            if (r, c) in data:
                raise ValueError(f"duplicate entry at ({r},{c})")
            if v:
                data[(r, c)] = int(v)
        self.data = data

    @classmethod
    def from_entries(cls, entries: SparseEntries):
        return cls(entries.num_rows, entries.num_cols, entries.entries)

    @property
    def nnz(self):
        return len(self.data)

    def rows(self):
        """Mutable dict-of-rows copy for elimination."""
        rows = {}
        for (r, c), v in self.data.items():
            rows.setdefault(r, {})[c] = v
        return rows

    def transpose(self):
        return SparseIntMatrix(
            self.num_cols, self.num_rows,
            [(c, r, v) for (r, c), v in self.data.items()])

    def __eq__(self, other):
        return (isinstance(other, SparseIntMatrix)
                and (self.num_rows, self.num_cols) == (other.num_rows, other.num_cols)
                and self.data == other.data)

    def __repr__(self):
        return f"SparseIntMatrix({self.num_rows}x{self.num_cols}, nnz={self.nnz})"


def _column_index(rows):
    cols = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)
    return cols


def rank_over_rationals(m):
    """Exact rank via fraction-free (Bareiss) elimination.

    Pivots are chosen by Markowitz cost to limit fill-in.  Rows untouched
    by recent pivot columns are kept at the elimination epoch where they
    were last modified and rescaled lazily; the rescale factor is a ratio
    of pivot values and the division is exact.
    """
    rows = m.rows()
    cols = _column_index(rows)
    pivots = [1]
    epoch = {r: 0 for r in rows}
    rank = 0

    def refresh(r, target):
        if epoch[r] == target:
            return
        num, den = pivots[target], pivots[epoch[r]]
        row = rows[r]
        for c in list(row):
            q, rem = divmod(row[c] * num, den)
            assert rem == 0, "inexact Bareiss rescale"
            row[c] = q
        epoch[r] = target

    while cols:
        best = None
        for c, rset in cols.items():
            col_cost = len(rset) - 1
            for r in rset:
                key = ((len(rows[r]) - 1) * col_cost, abs(rows[r][c]), r, c)
                if best is None or key < best[0]:
                    best = (key, r, c)
        _, r0, c0 = best
        step = len(pivots)
        refresh(r0, step - 1)
        piv = rows[r0][c0]
        pivots.append(piv)
        prev = pivots[step - 1]
        pivot_row = rows.pop(r0)
        del epoch[r0]
        for c in pivot_row:
            cols[c].discard(r0)
            if not cols[c]:
                del cols[c]
        for r in list(cols.get(c0, ())):
            refresh(r, step - 1)
            row = rows[r]
            factor = row.pop(c0)
            cols[c0].discard(r)
            for c in list(row):
                if c in pivot_row:
                    continue
                q, rem = divmod(piv * row[c], prev)
                assert rem == 0, "inexact Bareiss rescale"
                row[c] = q
            for c, pv in pivot_row.items():
                if c == c0:
                    continue
                q, rem = divmod(piv * row.get(c, 0) - factor * pv, prev)
                assert rem == 0, "inexact Bareiss update"
                if q:
                    if c not in row:
                        cols.setdefault(c, set()).add(r)
                    row[c] = q
                elif c in row:
                    del row[c]
                    cols[c].discard(r)
                    if not cols[c]:
                        del cols[c]
            epoch[r] = step
            if not row:
                del rows[r]
                del epoch[r]
        if c0 in cols and not cols[c0]:
            del cols[c0]
        rank += 1
    return rank


def _pick_pivot(rows, cols):
    best = None
    for r, row in rows.items():
        for c, v in row.items():
            cost = (len(row) - 1) * (len(cols[c]) - 1)
            key = (abs(v) != 1, abs(v), cost, r, c)
            if best is None or key < best[0]:
                best = (key, r, c)
    return best[1], best[2]


def _divmod_balanced(a, p):
    """Quotient and remainder with the remainder in (-p/2, p/2]; small
    quotients keep elimination entries from blowing up."""
    q, r = divmod(a, p)
    if 2 * r > p:
        q += 1
        r -= p
    return q, r


def _diagonalize(rows, carry=None):
    """Bring a dict-of-rows matrix to diagonal form by unimodular row and
    column operations.

    Row operations are mirrored on ``carry`` (a dict indexed by row) when
    given.  Returns ``{row: pivot_value}`` with positive pivot values; rows
    absent from the result were reduced to zero.
    """
    cols = _column_index(rows)
    pivot_of_row = {}

    def row_op(r, r0, q):
        # row_r -= q * row_r0
        row0 = rows[r0]
        row = rows[r]
        for c, v in row0.items():
            nv = row.get(c, 0) - q * v
            if nv:
                if c not in row:
                    cols[c].add(r)
                row[c] = nv
            elif c in row:
                del row[c]
                cols[c].discard(r)
        if carry is not None:
            nv = carry.get(r, 0) - q * carry.get(r0, 0)
            if nv:
                carry[r] = nv
            else:
                carry.pop(r, None)

    def col_op(c, c0, q):
        # col_c -= q * col_c0; only rows holding c0 are affected
        for r in list(cols.get(c0, ())):
            v0 = rows[r][c0]
            nv = rows[r].get(c, 0) - q * v0
            if nv:
                if c not in rows[r]:
                    cols.setdefault(c, set()).add(r)
                rows[r][c] = nv
            elif c in rows[r]:
                del rows[r][c]
                cols[c].discard(r)

    while any(rows.values()):
        for r in [r for r, row in rows.items() if not row]:
            del rows[r]
        r0, c0 = _pick_pivot(rows, cols)
        while True:
            if rows[r0][c0] < 0:
                rows[r0] = {c: -v for c, v in rows[r0].items()}
                if carry is not None and carry.get(r0):
                    carry[r0] = -carry[r0]
            piv = rows[r0][c0]
            moved = False
            for r in list(cols[c0]):
                if r == r0:
                    continue
                q, rem = _divmod_balanced(rows[r][c0], piv)
                if q:
                    row_op(r, r0, q)
                if rem:
                    r0 = r  # strictly smaller value: restart the cascade
                    moved = True
                    break
            if moved:
                continue
            for c in list(rows[r0]):
                if c == c0:
                    continue
                q, rem = _divmod_balanced(rows[r0][c], piv)
                if q:
                    col_op(c, c0, q)
                if rem:
                    c0 = c
                    moved = True
                    break
            if not moved:
                break
        pivot_of_row[r0] = rows[r0][c0]
        row0 = rows.pop(r0)
        for c in row0:
            cols[c].discard(r0)
            if not cols[c]:
                del cols[c]
    return pivot_of_row


def smith_normal_form(m):
    """Invariant factors d_1 | d_2 | ... | d_r of an integer matrix, all
    positive, with r equal to the rank."""
    pivots = _diagonalize(m.rows())
    factors = sorted(pivots.values())
    if factors and factors[-1] > 1:
        changed = True
        while changed:
            changed = False
            for i in range(len(factors)):
                for j in range(i + 1, len(factors)):
                    if factors[j] % factors[i]:
                        g = gcd(factors[i], factors[j])
                        factors[i], factors[j] = g, factors[i] * factors[j] // g
                        changed = True
            factors.sort()
    return factors


def solve_in_image(m, vec):
    """Whether ``m x = vec`` has an integer solution; ``vec`` is a sparse
    dict indexed by row.

    The matrix is diagonalized with the target carried along the row
    operations; solvability is divisibility on the pivot rows plus
    vanishing on the rows that reduce to zero.
    """
    carry = {r: v for r, v in vec.items() if v}
    pivots = _diagonalize(m.rows(), carry=carry)
    for r, v in carry.items():
        d = pivots.get(r)
        if d is None or v % d:
            return False
    return True


def integer_kernel_basis(m):
    """An integral basis of ``ker m`` (as column vectors, sparse dicts).

    Columns are reduced by unimodular column operations against a companion
    identity; companions of columns that reduce to zero form the basis.
    """
    columns = [dict() for _ in range(m.num_cols)]
    for (r, c), v in m.data.items():
        columns[c][r] = v
    companions = [{c: 1} for c in range(m.num_cols)]

    def combine(i, j, a, b, c, d):
        # (col_i, col_j) <- (a*col_i + b*col_j, c*col_i + d*col_j); ad-bc=1
        for vecs in (columns, companions):
            vi, vj = vecs[i], vecs[j]
            ni, nj = {}, {}
            for k in set(vi) | set(vj):
                x, y = vi.get(k, 0), vj.get(k, 0)
                if a * x + b * y:
                    ni[k] = a * x + b * y
                if c * x + d * y:
                    nj[k] = c * x + d * y
            vecs[i], vecs[j] = ni, nj

    active = list(range(m.num_cols))
    for r in range(m.num_rows):
        hot = [c for c in active if r in columns[c]]
        if not hot:
            continue
        lead = hot[0]
        for c in hot[1:]:
            x, y = columns[lead][r], columns[c][r]
            g, s, t = _xgcd(x, y)
            combine(lead, c, s, t, -(y // g), x // g)
        active.remove(lead)
    return [companions[c] for c in active if not columns[c]]


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    g, h = a, b
    while h:
        q = g // h
        g, h = h, g - q * h
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return g, x0, y0


# -- homology ---------------------------------------------------------------

@dataclass(frozen=True)
class DegreeData:
    cells: int
    betti: int
    torsion: tuple


@dataclass(frozen=True)
class HomologySummary:
    degrees: tuple
    euler: int

    def betti(self, k):
        return self.degrees[k].betti if 0 <= k < len(self.degrees) else 0

    def torsion(self, k):
        return self.degrees[k].torsion if 0 <= k < len(self.degrees) else ()

    def betti_vector(self):
        return tuple(d.betti for d in self.degrees)

    def torsion_free(self):
        return all(not d.torsion for d in self.degrees)

    def to_doc(self):
        return {
            "degrees": [
                {"degree": k, "cells": d.cells, "betti": d.betti,
                 "torsion": list(d.torsion)}
                for k, d in enumerate(self.degrees)
            ],
            "euler": self.euler,
        }


def boundary_matrix(cx, k, max_nnz=None):
    entries = cx.boundary_entries(k)
    if max_nnz is not None and len(entries.entries) > max_nnz:
        raise CapExceededError(
            f"boundary operator in degree {k} has more than {max_nnz} entries")
    return SparseIntMatrix.from_entries(entries)


def euler_characteristic(cx):
    return sum((-1) ** k * c for k, c in enumerate(cx.cell_counts()))


def connected_components(cx):
    """Number of components of the 1-skeleton, by union-find."""
    parent = list(range(len(cx.cells[0])))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if cx.max_dim >= 1:
        for cell in cx.cells[1]:
            a = cx.index[face(cx.graph, cell, 0, 0)][1]
            b = cx.index[face(cx.graph, cell, 0, 1)][1]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    return len({find(i) for i in range(len(parent))})


def homology(cx, torsion=True, max_nnz=None, snf_ranks=True):
    """Betti numbers, torsion coefficients and Euler characteristic.

    ``b_k = #k-cells - rank D_k - rank D_{k+1}``; torsion in degree ``k``
    is the list of invariant factors of ``D_{k+1}`` exceeding 1.  When
    torsion is requested the ranks default to the Smith normal form rank
    count (one elimination per matrix); ``snf_ranks=False`` additionally
    runs the fraction-free elimination and checks agreement.
    """
    counts = cx.cell_counts()
    top = cx.max_dim
    ranks = [0] * (top + 2)
    factors = [[] for _ in range(top + 2)]
    for k in range(1, top + 1):
        mat = boundary_matrix(cx, k, max_nnz=max_nnz)
        if torsion:
            factors[k] = smith_normal_form(mat)
            ranks[k] = len(factors[k])
            if not snf_ranks:
                assert rank_over_rationals(mat) == ranks[k], \
                    "rank disagreement between eliminations"
        else:
            ranks[k] = rank_over_rationals(mat)
    degrees = []
    for k in range(top + 1):
        betti = counts[k] - ranks[k] - ranks[k + 1]
        tors = tuple(d for d in factors[k + 1] if d > 1)
        degrees.append(DegreeData(cells=counts[k], betti=betti, torsion=tors))
    return HomologySummary(degrees=tuple(degrees), euler=euler_characteristic(cx))


# -- cycles and spans -------------------------------------------------------

def is_cycle(z):
    """Whether the chain has zero boundary."""
    return boundary_chain(z).is_zero()


def _chain_vector(z, cx):
    vec = {}
    for cell, coef in z.terms.items():
        try:
            dim, i = cx.index[cell]
        except KeyError:
            raise ValueError("chain has support outside the complex") from None
        if dim != z.degree:
            raise ValueError("chain degree does not match its cells")
        vec[i] = coef
    return vec


def is_boundary(z, cx):
    """Whether ``z`` is the boundary of an integral chain of the complex."""
    k = z.degree
    vec = _chain_vector(z, cx)
    if k + 1 > cx.max_dim:
        return not vec
    return solve_in_image(boundary_matrix(cx, k + 1), vec)


def _augmented_matrix(zs, cx, degree):
    num_rows = len(cx.cells[degree])
    d = (cx.boundary_entries(degree + 1) if degree + 1 <= cx.max_dim
         else SparseEntries(num_rows, 0, ()))
    entries = []
    for j, z in enumerate(zs):
        for i, v in _chain_vector(z, cx).items():
            entries.append((i, j, v))
    shift = len(zs)
    for (r, c, v) in d.entries:
        entries.append((r, c + shift, v))
    return SparseIntMatrix(num_rows, shift + d.num_cols, entries), d


def class_span_rank(zs, cx, degree):
    """Rank over the rationals of the span of the classes of ``zs`` in
    degree-``degree`` homology, computed as
    ``rank [zs | D_{degree+1}] - rank D_{degree+1}``."""
    zs = list(zs)
    for z in zs:
        if z.degree != degree:
            raise ValueError("span input of wrong degree")
        if not is_cycle(z):
            raise ValueError("span input is not a cycle")
    if not zs:
        return 0
    aug, d = _augmented_matrix(zs, cx, degree)
    return rank_over_rationals(aug) - rank_over_rationals(
        SparseIntMatrix.from_entries(d))


def certify_integral_generation(zs, cx, degree):
    """Whether the classes of ``zs`` generate degree-``degree`` homology
    over the integers.

    The lattice spanned by the cycles together with the boundaries must
    contain an integral basis of the cycle lattice ``ker D_degree``.
    Intended for small instances.
    """
    zs = list(zs)
    for z in zs:
        if z.degree != degree or not is_cycle(z):
            raise ValueError("integral certification needs cycles of the right degree")
    kernel = integer_kernel_basis(boundary_matrix(cx, degree))
    generators, _ = _augmented_matrix(zs, cx, degree)
    return all(solve_in_image(generators, kvec) for kvec in kernel)
