"""Point-evaluation representers (delta members) and their dual basis.

For an interior point ``q`` of cell ``j``, the delta member is the
reproducing kernel of the cell space at ``q``: integrating any member against
it returns the member's value at ``q``.  At an interior node the kernel is
the half-sum of the two one-sided kernels, matching the node-average value
convention; at the support endpoints it is the single one-sided kernel.

A full set of ``p + 1`` interior points per cell yields a basis of delta
members.  Its dual basis consists of cardinal (Lagrange-type) interpolants:
``cardinal_a(b) == (a == b)`` on the point set, so members are recovered from
their point values by a plain weighted sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import IndependenceError, InvalidArgumentError
from .grid import PointKind
from .space import Side, Space, Ultrafunction


class DeltaKind(Enum):
    INTERIOR = "interior"
    NODE_AVERAGE = "node-average"
    NODE_PLUS = "node-plus"
    NODE_MINUS = "node-minus"
    ENDPOINT_LEFT = "endpoint-left"
    ENDPOINT_RIGHT = "endpoint-right"


def delta_kind(space: Space, q: float, side: Side | None = None) -> DeltaKind:
    """Classify the delta member centered at ``q`` (optionally one-sided)."""
    loc = space.grid.locate(q)
    if loc.is_outside:
        raise InvalidArgumentError(f"center {q!r} lies outside the support")
    if loc.is_interior:
        if side is not None:
            raise InvalidArgumentError("one-sided deltas exist at nodes only")
        return DeltaKind.INTERIOR
    j = loc.index
    if side == "plus":
        if j >= space.n_cells:
            raise InvalidArgumentError("no cell to the right of the last node")
        return DeltaKind.NODE_PLUS
    if side == "minus":
        if j <= 0:
            raise InvalidArgumentError("no cell to the left of the first node")
        return DeltaKind.NODE_MINUS
    if j == 0:
        return DeltaKind.ENDPOINT_LEFT
    if j == space.n_cells:
        return DeltaKind.ENDPOINT_RIGHT
    return DeltaKind.NODE_AVERAGE


def delta(space: Space, q: float) -> Ultrafunction:
    """Member representing point evaluation at ``q`` against the L2 pairing."""
    loc = space.grid.locate(q)
    if loc.is_outside:
        raise InvalidArgumentError(f"center {q!r} lies outside the support")
    blocks = np.zeros((space.n_cells, space.block_size))
    if loc.kind is PointKind.INTERIOR:
        j = loc.index
        blocks[j] = space.basis_values(j, q)
        return Ultrafunction(space, blocks)
    j = loc.index
    if j == 0:
        blocks[0] = space.edge_values(0, "minus")
    elif j == space.n_cells:
        blocks[-1] = space.edge_values(space.n_cells - 1, "plus")
    else:
        blocks[j - 1] = 0.5 * space.edge_values(j - 1, "plus")
        blocks[j] = 0.5 * space.edge_values(j, "minus")
    return Ultrafunction(space, blocks)


def delta_sided(space: Space, j: int, side: Side) -> Ultrafunction:
    """One-sided delta at node ``j``: pairing yields the one-sided limit."""
    blocks = np.zeros((space.n_cells, space.block_size))
    if side == "plus":
        if not 0 <= j < space.n_cells:
            raise InvalidArgumentError("plus side unavailable at this node")
        blocks[j] = space.edge_values(j, "minus")
    elif side == "minus":
        if not 0 < j <= space.n_cells:
            raise InvalidArgumentError("minus side unavailable at this node")
        blocks[j - 1] = space.edge_values(j - 1, "plus")
    else:
        raise InvalidArgumentError("side must be 'plus' or 'minus'")
    return Ultrafunction(space, blocks)


def default_interpolation_points(space: Space) -> np.ndarray:
    """Per-cell Gauss abscissae: ``p + 1`` interior points in every cell.

    Guaranteed unisolvent for the cell polynomials and well conditioned.
    """
    from numpy.polynomial.legendre import leggauss

    t, _ = leggauss(space.block_size)
    pts = np.empty(space.dim)
    for j in range(space.n_cells):
        a, b = space.grid.cell_bounds(j)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        pts[j * space.block_size : (j + 1) * space.block_size] = mid + half * t
    return pts


@dataclass(frozen=True)
class BasisPair:
    """A delta basis at interior points and its dual cardinal basis.

    Columns of ``delta_coeffs`` / ``cardinal_coeffs`` hold the flat
    coefficient vectors of the basis members, in the order of ``points``.
    """

    space: Space
    points: np.ndarray
    delta_coeffs: np.ndarray
    cardinal_coeffs: np.ndarray

    @property
    def size(self) -> int:
        return self.points.size

    def delta_at(self, i: int) -> Ultrafunction:
        return self._member(self.delta_coeffs[:, i])

    def cardinal_at(self, i: int) -> Ultrafunction:
        return self._member(self.cardinal_coeffs[:, i])

    def _member(self, flat: np.ndarray) -> Ultrafunction:
        sp = self.space
        return Ultrafunction(sp, flat.reshape(sp.n_cells, sp.block_size))

    def interpolate(self, values) -> Ultrafunction:
        """Member taking the given values at ``points``: a cardinal-weighted sum."""
        v = np.asarray(values, dtype=float)
        if v.shape != (self.size,):
            raise InvalidArgumentError(f"need exactly {self.size} point values")
        return self._member(self.cardinal_coeffs @ v)

    def duality_matrix(self) -> np.ndarray:
        """Pairings of every delta member with every cardinal member."""
        n = self.size
        out = np.empty((n, n))
        deltas = [self.delta_at(i) for i in range(n)]
        cards = [self.cardinal_at(i) for i in range(n)]
        for a in range(n):
            for b in range(n):
                out[a, b] = deltas[a].inner(cards[b])
        return out

    def cell_condition_numbers(self) -> np.ndarray:
        """2-norm condition number of each cell's point-evaluation matrix.

        Reported so callers can judge non-default point sets; no threshold
        is enforced here.
        """
        sp = self.space
        out = np.empty(sp.n_cells)
        for j in range(sp.n_cells):
            cols = slice(j * sp.block_size, (j + 1) * sp.block_size)
            evals = np.array(
                [sp.basis_values(j, q) for q in self.points[cols]]
            )
            out[j] = np.linalg.cond(evals)
        return out


def basis_pair(space: Space, points=None) -> BasisPair:
    """Build the delta basis at ``points`` and solve for its dual basis.

    ``points`` must hold exactly ``p + 1`` distinct points interior to every
    cell (defaults to the per-cell Gauss abscissae).  The duality systems are
    block-diagonal and solved cell by cell.
    """
    if points is None:
        pts = default_interpolation_points(space)
    else:
        pts = np.asarray(points, dtype=float).reshape(-1)
    if pts.size != space.dim:
        raise IndependenceError(
            f"need {space.dim} points ({space.block_size} per cell), got {pts.size}"
        )
    per_cell: dict[int, list[int]] = {j: [] for j in range(space.n_cells)}
    for i, q in enumerate(pts):
        loc = space.grid.locate(q)
        if loc.kind is not PointKind.INTERIOR:
            raise IndependenceError(
                f"point {q!r} is not interior to a cell; nodes are not allowed"
            )
        per_cell[loc.index].append(i)
    n = space.block_size
    delta_cols = np.zeros((space.dim, space.dim))
    cardinal_cols = np.zeros((space.dim, space.dim))
    for j, idx in per_cell.items():
        if len(idx) != n:
            raise IndependenceError(
                f"cell {j} holds {len(idx)} points, expected {n}"
            )
        cell_pts = pts[idx]
        if np.unique(cell_pts).size != n:
            raise IndependenceError(f"repeated point in cell {j}")
        evals = np.array([space.basis_values(j, q) for q in cell_pts])  # (n, n)
        try:
            dual = np.linalg.solve(evals, np.eye(n))  # columns: cardinal coeffs
        except np.linalg.LinAlgError as exc:
            raise IndependenceError(
                f"points in cell {j} do not determine a basis"
            ) from exc
        rows = slice(j * n, (j + 1) * n)
        for a, i in enumerate(idx):
            delta_cols[rows, i] = evals[a]
            cardinal_cols[rows, i] = dual[:, a]
    pts = pts.copy()
    pts.flags.writeable = False
    delta_cols.flags.writeable = False
    cardinal_cols.flags.writeable = False
    return BasisPair(space, pts, delta_cols, cardinal_cols)
