"""Grid-partitioned piecewise-polynomial space with per-cell orthonormal bases.

Construction
------------
On the reference interval ``[-1, 1]`` the monomials ``1, t, ..., t**p`` are
orthonormalized by Gram-Schmidt (with one re-orthogonalization pass) against
the exact Gauss inner product.  Each cell carries the affinely mapped copy of
that basis, rescaled by ``sqrt(2 / h)`` so it stays orthonormal in L2 over the
cell.  The whole space is the orthogonal direct sum of the cell spaces: basis
elements of different cells have disjoint supports, so their inner product is
exactly zero, never merely small.

Pointwise conventions
---------------------
Members are polynomials inside each open cell.  At an interior node the value
is the average of the two one-sided limits; at ``-beta`` and ``beta`` it is
the one-sided limit from the single adjacent cell; outside ``[-beta, beta]``
every member is zero.

All inner products and integrals use the per-cell Gauss rule with ``p + 2``
points, exact for polynomial integrands of degree up to ``2p + 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial import polynomial as npoly
from numpy.polynomial.legendre import leggauss

from .errors import InvalidArgumentError
from .grid import Grid, PointKind

Side = Literal["plus", "minus"]


def _orthonormal_reference_basis(degree: int):
    """Coefficients (rows -> monomial powers) of the orthonormal basis on [-1, 1]."""
    n = degree + 1
    t, w = leggauss(degree + 2)
    powers = t[:, None] ** np.arange(n)[None, :]  # (nq, n)

    def dot(a, b):
        return float(np.sum(w * (powers @ a) * (powers @ b)))

    coeffs = np.zeros((n, n))
    for k in range(n):
        c = np.zeros(n)
        c[k] = 1.0
        for _ in range(2):  # second pass re-orthogonalizes
            for m in range(k):
                c = c - dot(c, coeffs[m]) * coeffs[m]
        coeffs[k] = c / math.sqrt(dot(c, c))
    return coeffs, t, w


class Space:
    """Direct sum of degree-``p`` polynomial spaces, one per grid cell."""

    __slots__ = (
        "grid",
        "degree",
        "_coeffs",
        "_quad_t",
        "_quad_w",
        "_quad_vals",
        "_deriv_ref",
        "_edge_minus",
        "_edge_plus",
        "_widths",
        "_mids",
        "_scales",
    )

    def __init__(self, grid: Grid, degree: int):
        if degree != int(degree) or int(degree) < 0:
            raise InvalidArgumentError("degree must be a nonnegative integer")
        degree = int(degree)
        coeffs, t, w = _orthonormal_reference_basis(degree)
        vals = npoly.polyval(t, coeffs.T)  # (n, nq): basis k at quad point i
        dcoeffs = np.zeros_like(coeffs)
        if degree > 0:
            dcoeffs[:, :-1] = coeffs[:, 1:] * np.arange(1, degree + 1)
        dvals = npoly.polyval(t, dcoeffs.T)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "_coeffs", coeffs)
        object.__setattr__(self, "_quad_t", t)
        object.__setattr__(self, "_quad_w", w)
        object.__setattr__(self, "_quad_vals", np.ascontiguousarray(vals.T))
        # reference derivative coupling: ref[m, k] = integral of e_m * e_k'
        object.__setattr__(self, "_deriv_ref", (vals * w) @ dvals.T)
        object.__setattr__(self, "_edge_minus", npoly.polyval(-1.0, coeffs.T))
        object.__setattr__(self, "_edge_plus", npoly.polyval(1.0, coeffs.T))
        widths = grid.widths()
        object.__setattr__(self, "_widths", widths)
        object.__setattr__(self, "_mids", 0.5 * (grid.nodes[:-1] + grid.nodes[1:]))
        object.__setattr__(self, "_scales", np.sqrt(2.0 / widths))

    def __setattr__(self, name, value):
        raise AttributeError("Space is immutable")

    # ------------------------------------------------------------------
    # structure
    # ------------------------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self.grid.n_cells

    @property
    def block_size(self) -> int:
        return self.degree + 1

    @property
    def dim(self) -> int:
        return self.n_cells * (self.degree + 1)

    def flat_index(self, j: int, k: int) -> int:
        return j * self.block_size + k

    def __eq__(self, other) -> bool:
        if not isinstance(other, Space):
            return NotImplemented
        return self.degree == other.degree and self.grid == other.grid

    __hash__ = None

    def __repr__(self) -> str:
        return f"Space(n_cells={self.n_cells}, degree={self.degree}, dim={self.dim})"

    # ------------------------------------------------------------------
    # basis evaluation
    # ------------------------------------------------------------------

    def to_reference(self, j: int, x: float) -> float:
        return (2.0 * x - 2.0 * self._mids[j]) / self._widths[j]

    def basis_values(self, j: int, x: float) -> np.ndarray:
        """Values of the cell-``j`` basis polynomials at ``x`` (closure of the cell)."""
        t = self.to_reference(j, float(x))
        return self._scales[j] * npoly.polyval(t, self._coeffs.T)

    def edge_values(self, j: int, side: Side) -> np.ndarray:
        """One-sided basis values of cell ``j`` at its left (minus) or right edge."""
        ref = self._edge_minus if side == "minus" else self._edge_plus
        return self._scales[j] * ref

    def cell_quadrature(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Physical Gauss points and weights for cell ``j``."""
        h = self._widths[j]
        return self._mids[j] + 0.5 * h * self._quad_t, 0.5 * h * self._quad_w

    # ------------------------------------------------------------------
    # members
    # ------------------------------------------------------------------

    def member(self, blocks) -> "Ultrafunction":
        return Ultrafunction(self, blocks)

    def zero(self) -> "Ultrafunction":
        return Ultrafunction(self, np.zeros((self.n_cells, self.block_size)))

    def from_polynomial(self, poly_coeffs) -> "Ultrafunction":
        """Exact member equal to ``sum_m a_m x**m`` on the whole support.

        The polynomial degree must not exceed the cell degree.
        """
        a = np.asarray(poly_coeffs, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise InvalidArgumentError("polynomial coefficients must be a 1-d sequence")
        if a.size > self.block_size:
            raise InvalidArgumentError(
                f"polynomial degree {a.size - 1} exceeds cell degree {self.degree}"
            )
        blocks = np.empty((self.n_cells, self.block_size))
        for j in range(self.n_cells):
            xs, ws = self.cell_quadrature(j)
            fvals = npoly.polyval(xs, a)
            bvals = self._scales[j] * self._quad_vals  # (nq, n)
            blocks[j] = (ws * fvals) @ bvals
        return Ultrafunction(self, blocks)

    def constant(self, value: float) -> "Ultrafunction":
        return self.from_polynomial([float(value)])

    def grid_function(self, cell_values) -> "Ultrafunction":
        """Member that is constant on every cell, with the given values."""
        v = np.asarray(cell_values, dtype=float)
        if v.shape != (self.n_cells,):
            raise InvalidArgumentError("need one value per cell")
        blocks = np.zeros((self.n_cells, self.block_size))
        # e_{j,0} is the positive constant scale * coeffs[0, 0]
        blocks[:, 0] = v / (self._scales * self._coeffs[0, 0])
        return Ultrafunction(self, blocks)

    def indicator(self, a: float, b: float) -> "Ultrafunction":
        """Characteristic function of ``[a, b]`` for grid nodes ``a <= b``."""
        return self.constant(1.0).restrict(a, b)

    def splitted_basis(self) -> "SplittedBasis":
        return SplittedBasis(self)


class Ultrafunction:
    """Member of a :class:`Space`: one coefficient block per cell."""

    __slots__ = ("space", "blocks")

    def __init__(self, space: Space, blocks):
        arr = np.asarray(blocks, dtype=float).copy()
        if arr.shape != (space.n_cells, space.block_size):
            raise InvalidArgumentError(
                f"blocks must have shape {(space.n_cells, space.block_size)}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "blocks", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Ultrafunction is immutable")

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    def __call__(self, x: float) -> float:
        loc = self.space.grid.locate(x)
        if loc.kind is PointKind.OUTSIDE:
            return 0.0
        if loc.kind is PointKind.INTERIOR:
            j = loc.index
            return float(self.blocks[j] @ self.space.basis_values(j, x))
        return self.node_value(loc.index)

    def node_value(self, j: int) -> float:
        """Value at node ``j``: one-sided at the endpoints, average inside."""
        ell = self.space.n_cells
        if j == 0:
            return self.side_value(0, "plus")
        if j == ell:
            return self.side_value(ell, "minus")
        return 0.5 * (self.side_value(j, "minus") + self.side_value(j, "plus"))

    def side_value(self, j: int, side: Side) -> float:
        """One-sided limit at node ``j`` from the adjacent cell."""
        ell = self.space.n_cells
        if side == "plus":
            if j >= ell:
                raise InvalidArgumentError("no cell to the right of the last node")
            return float(self.blocks[j] @ self.space.edge_values(j, "minus"))
        if side == "minus":
            if j <= 0:
                raise InvalidArgumentError("no cell to the left of the first node")
            return float(self.blocks[j - 1] @ self.space.edge_values(j - 1, "plus"))
        raise InvalidArgumentError("side must be 'plus' or 'minus'")

    def jump(self, j: int) -> float:
        """Jump at interior node ``j``: plus limit minus minus limit."""
        if not 0 < j < self.space.n_cells:
            raise InvalidArgumentError("jumps are defined at interior nodes only")
        return self.side_value(j, "plus") - self.side_value(j, "minus")

    def sample(self, xs) -> np.ndarray:
        return np.array([self(float(x)) for x in np.asarray(xs, dtype=float)])

    # ------------------------------------------------------------------
    # inner products
    # ------------------------------------------------------------------

    def inner(self, other: "Ultrafunction") -> float:
        """L2 inner product, summed cell by cell with the exact Gauss rule."""
        sp = self.space
        if other.space is not sp and other.space != sp:
            raise InvalidArgumentError("members belong to different spaces")
        a = self.blocks @ sp._quad_vals.T  # (cells, nq), scale-free
        b = other.blocks @ sp._quad_vals.T
        return float(np.einsum("ji,ji,i->", a, b, sp._quad_w))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self), 0.0))

    # ------------------------------------------------------------------
    # algebra
    # ------------------------------------------------------------------

    def _check_same_space(self, other):
        if not isinstance(other, Ultrafunction):
            raise TypeError("expected an Ultrafunction")
        if other.space is not self.space and other.space != self.space:
            raise InvalidArgumentError("members belong to different spaces")

    def __add__(self, other):
        self._check_same_space(other)
        return Ultrafunction(self.space, self.blocks + other.blocks)

    def __sub__(self, other):
        self._check_same_space(other)
        return Ultrafunction(self.space, self.blocks - other.blocks)

    def __neg__(self):
        return Ultrafunction(self.space, -self.blocks)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return Ultrafunction(self.space, self.blocks * float(scalar))

    __rmul__ = __mul__

    # ------------------------------------------------------------------

    @property
    def coefficients(self) -> np.ndarray:
        """Flat coefficient vector in cell-major order."""
        return self.blocks.reshape(-1)

    def block(self, j: int) -> np.ndarray:
        return self.blocks[j]

    def restrict(self, a: float, b: float) -> "Ultrafunction":
        """Multiply by the characteristic function of ``[a, b]``, ``a, b`` nodes."""
        grid = self.space.grid
        n = grid.node_index(a, "left endpoint")
        m = grid.node_index(b, "right endpoint")
        if n > m:
            raise InvalidArgumentError("left endpoint must not exceed right endpoint")
        blocks = np.zeros_like(self.blocks)
        blocks[n:m] = self.blocks[n:m]
        return Ultrafunction(self.space, blocks)

    def __repr__(self) -> str:
        return f"Ultrafunction(dim={self.space.dim}, norm={self.norm():.6g})"


@dataclass(frozen=True)
class SplittedBasis:
    """Orthonormal basis organized cell by cell.

    Element ``(j, k)`` is the member whose only nonzero coefficient is the
    ``k``-th one of cell ``j``; iteration is cell-major.
    """

    space: Space

    def __len__(self) -> int:
        return self.space.dim

    def element(self, j: int, k: int) -> Ultrafunction:
        sp = self.space
        if not (0 <= j < sp.n_cells and 0 <= k < sp.block_size):
            raise InvalidArgumentError("basis index out of range")
        blocks = np.zeros((sp.n_cells, sp.block_size))
        blocks[j, k] = 1.0
        return Ultrafunction(sp, blocks)

    def __iter__(self):
        for j in range(self.space.n_cells):
            for k in range(self.space.block_size):
                yield self.element(j, k)

    def gram_matrix(self) -> np.ndarray:
        """Matrix of pairwise inner products (identity up to rounding)."""
        elements = list(self)
        n = len(elements)
        g = np.empty((n, n))
        for i, u in enumerate(elements):
            for k, v in enumerate(elements):
                g[i, k] = u.inner(v)
        return g
