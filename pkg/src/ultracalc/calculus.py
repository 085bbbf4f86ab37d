"""Derivative operators and the exact integration-by-parts / FTC identities.

Two linear derivative operators act on the space:

* kind ``"D"`` — the generalized derivative: the cellwise classical
  derivative plus, at every interior node, the jump of the function times
  the node-centered delta member.  The node deltas use the node-average
  convention, which is exactly what closes integration by parts over the
  full support, ``pairing(Du, v) = -pairing(u, Dv) + boundary product``,
  and the fundamental theorem ``integral of Du over [a, b] = u(b) - u(a)``
  for grid nodes ``a, b`` with no error beyond rounding.

* kind ``"D2"`` — the cellwise derivative alone.  It annihilates every
  piecewise-constant member, but satisfies the piecewise identities whose
  boundary terms are one-sided sums over the traversed cells.

The naive two-point integration-by-parts formula with node-average boundary
values is *false* for the generalized derivative: its defect equals a quarter
of the difference of jump products at the two endpoints.
``naive_ibp_defect`` exposes that failure.

Cellwise derivatives drop the polynomial degree by one, so they already lie
in the space and the operators are assembled directly, without a projection
solve.  Matrices are materialized densely; the dimensions stay small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, PreconditionError
from .space import Space, Ultrafunction

#: absolute jump size below which a member counts as continuous at a node
CONTINUITY_TOL = 1e-12


@dataclass(frozen=True)
class JumpCorrection:
    """Jump structure at one interior node.

    ``left_values`` / ``right_values`` are the one-sided basis values of the
    two adjacent cells at the node; they build both the jump functional and
    the node-average delta coefficients.
    """

    node: int
    left_values: np.ndarray
    right_values: np.ndarray


@dataclass(frozen=True)
class DerivOperator:
    """Dense derivative matrix in cell-major splitted-basis coordinates."""

    kind: str
    space: Space
    matrix: np.ndarray
    jumps: tuple[JumpCorrection, ...]
    jump_matrix: np.ndarray | None

    def apply(self, u: Ultrafunction) -> Ultrafunction:
        sp = self.space
        if u.space is not sp and u.space != sp:
            raise InvalidArgumentError("member belongs to a different space")
        flat = self.matrix @ u.coefficients
        return Ultrafunction(sp, flat.reshape(sp.n_cells, sp.block_size))

    __call__ = apply


def _cellwise_matrix(space: Space) -> np.ndarray:
    n = space.block_size
    mat = np.zeros((space.dim, space.dim))
    widths = space.grid.widths()
    for j in range(space.n_cells):
        rows = slice(j * n, (j + 1) * n)
        mat[rows, rows] = (2.0 / widths[j]) * space._deriv_ref
    return mat


def _jump_corrections(space: Space) -> tuple[JumpCorrection, ...]:
    out = []
    for j in range(1, space.n_cells):
        left = space.edge_values(j - 1, "plus")
        right = space.edge_values(j, "minus")
        left.flags.writeable = False
        right.flags.writeable = False
        out.append(JumpCorrection(j, left, right))
    return tuple(out)


def _jump_matrix(space: Space, jumps) -> np.ndarray:
    n = space.block_size
    mat = np.zeros((space.dim, space.dim))
    for jc in jumps:
        j = jc.node
        # functional row: jump of u at the node
        row = np.zeros(space.dim)
        row[(j - 1) * n : j * n] = -jc.left_values
        row[j * n : (j + 1) * n] = jc.right_values
        # node-average delta coefficients
        col = np.zeros(space.dim)
        col[(j - 1) * n : j * n] = 0.5 * jc.left_values
        col[j * n : (j + 1) * n] = 0.5 * jc.right_values
        mat += np.outer(col, row)
    return mat


def derivative_operator(space: Space, kind: str = "D") -> DerivOperator:
    """Assemble the generalized (``"D"``) or cellwise (``"D2"``) derivative."""
    if kind not in ("D", "D2"):
        raise InvalidArgumentError("kind must be 'D' or 'D2'")
    cellwise = _cellwise_matrix(space)
    if kind == "D2":
        cellwise.flags.writeable = False
        return DerivOperator("D2", space, cellwise, (), None)
    jumps = _jump_corrections(space)
    jump_mat = _jump_matrix(space, jumps)
    matrix = cellwise + jump_mat
    matrix.flags.writeable = False
    jump_mat.flags.writeable = False
    return DerivOperator("D", space, matrix, jumps, jump_mat)


# ----------------------------------------------------------------------
# definite integrals
# ----------------------------------------------------------------------


def _cell_integrals(u: Ultrafunction) -> np.ndarray:
    sp = u.space
    vals = u.blocks @ sp._quad_vals.T  # scale-free values at reference points
    return np.sqrt(0.5 * sp.grid.widths()) * (vals @ sp._quad_w)


def integrate(u: Ultrafunction, a: float, b: float) -> float:
    """Definite integral of ``u`` between the grid nodes ``a <= b``."""
    grid = u.space.grid
    n = grid.node_index(a, "lower limit")
    m = grid.node_index(b, "upper limit")
    if n > m:
        raise InvalidArgumentError("lower limit exceeds upper limit")
    return float(np.sum(_cell_integrals(u)[n:m]))


def integrate_product(u: Ultrafunction, v: Ultrafunction, n: int, m: int) -> float:
    """Integral of ``u * v`` over cells ``n`` to ``m - 1`` (node indices)."""
    sp = u.space
    if v.space is not sp and v.space != sp:
        raise InvalidArgumentError("members belong to different spaces")
    _check_node_range(sp, n, m)
    a = u.blocks[n:m] @ sp._quad_vals.T
    b = v.blocks[n:m] @ sp._quad_vals.T
    return float(np.einsum("ji,ji,i->", a, b, sp._quad_w))


def _check_node_range(space: Space, n: int, m: int):
    if not (0 <= n <= m <= space.n_cells):
        raise InvalidArgumentError("node indices must satisfy 0 <= n <= m <= last")


# ----------------------------------------------------------------------
# identity defects
# ----------------------------------------------------------------------


def ibp_defect(u: Ultrafunction, v: Ultrafunction) -> float:
    """Residual of full-support integration by parts for the generalized derivative.

    Returns ``|pairing(Du, v) + pairing(u, Dv) - (u v at beta - u v at -beta)|``
    with one-sided boundary values; zero up to rounding for every pair.
    """
    sp = u.space
    d = derivative_operator(sp, "D")
    ell = sp.n_cells
    boundary = u.node_value(ell) * v.node_value(ell) - u.node_value(0) * v.node_value(0)
    return abs(d.apply(u).inner(v) + u.inner(d.apply(v)) - boundary)


def ibp_c1_defect(u: Ultrafunction, v: Ultrafunction, n: int, m: int) -> float:
    """Residual of two-point integration by parts for members continuous on the range.

    Requires both members to have jumps below ``CONTINUITY_TOL`` at every
    interior node with index in ``[n, m]``; otherwise the identity is false
    and :class:`~ultracalc.errors.PreconditionError` is raised.
    """
    sp = u.space
    _check_node_range(sp, n, m)
    for i in range(max(n, 1), min(m, sp.n_cells - 1) + 1):
        if abs(u.jump(i)) > CONTINUITY_TOL or abs(v.jump(i)) > CONTINUITY_TOL:
            raise PreconditionError(
                f"member jumps at node {i}; the two-point formula does not apply"
            )
    if n == m:
        return 0.0
    d = derivative_operator(sp, "D")
    du, dv = d.apply(u), d.apply(v)
    boundary = u.side_value(m, "minus") * v.side_value(m, "minus") - u.side_value(
        n, "plus"
    ) * v.side_value(n, "plus")
    return abs(
        integrate_product(du, v, n, m) + integrate_product(u, dv, n, m) - boundary
    )


def ibp_piecewise_defect(u: Ultrafunction, v: Ultrafunction, n: int, m: int) -> float:
    """Residual of piecewise integration by parts for the cellwise derivative.

    Holds for arbitrary (including discontinuous) members; the boundary term
    is the one-sided product sum over the traversed cells.
    """
    sp = u.space
    _check_node_range(sp, n, m)
    d2 = derivative_operator(sp, "D2")
    du, dv = d2.apply(u), d2.apply(v)
    boundary = sum(
        u.side_value(i + 1, "minus") * v.side_value(i + 1, "minus")
        - u.side_value(i, "plus") * v.side_value(i, "plus")
        for i in range(n, m)
    )
    return abs(
        integrate_product(du, v, n, m) + integrate_product(u, dv, n, m) - boundary
    )


def ftc_piecewise_defect(u: Ultrafunction, n: int, m: int) -> float:
    """Residual of the cellwise fundamental theorem over cells ``n .. m - 1``."""
    sp = u.space
    _check_node_range(sp, n, m)
    d2 = derivative_operator(sp, "D2")
    lhs = float(np.sum(_cell_integrals(d2.apply(u))[n:m]))
    rhs = sum(
        u.side_value(i + 1, "minus") - u.side_value(i, "plus") for i in range(n, m)
    )
    return abs(lhs - rhs)


def naive_ibp_defect(u: Ultrafunction, v: Ultrafunction, n: int, m: int) -> float:
    """Residual of the *invalid* two-point formula with node-average values.

    For the generalized derivative, restricting integration by parts to a
    subrange while keeping node-average boundary products fails whenever
    both members jump at an endpoint node; the defect equals one quarter of
    the difference of the endpoint jump products.
    """
    sp = u.space
    _check_node_range(sp, n, m)
    d = derivative_operator(sp, "D")
    du, dv = d.apply(u), d.apply(v)
    boundary = u.node_value(m) * v.node_value(m) - u.node_value(n) * v.node_value(n)
    return abs(
        integrate_product(du, v, n, m) + integrate_product(u, dv, n, m) - boundary
    )
