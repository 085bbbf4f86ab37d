"""Orthogonal L2 projection of integrable functions onto the space.

``project`` maps any cell-wise integrable function ``f`` to the unique member
whose pairing with every member equals the pairing of ``f`` itself.  Because
the space splits orthogonally over cells, the projection is strictly local:
each coefficient block depends only on ``f`` restricted to its own cell.

Quadrature
----------
Coefficients are per-cell integrals of ``f`` against the cell basis, computed
by adaptive Gauss bisection to a caller-visible tolerance.  Cells containing
a declared singular point are handled by geometric subdivision toward the
singularity (ratio one half), summing panel integrals until the increment
drops below the tolerance; the integrand is only ever evaluated on open
subintervals, never at a declared singular point.  Either scheme raises
:class:`~ultracalc.errors.QuadratureError` with the cell index after 60
subdivisions without convergence.

Note that the default tolerance cannot always be reached within the
subdivision cap for strong integrable singularities (the increments of
``|x|**-0.5`` shrink only like ``2**(-m/2)``); callers project such
functions with an explicitly loosened tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import InvalidArgumentError, QuadratureError
from .space import Space, Ultrafunction

DEFAULT_TOL = 1e-12
MAX_SUBDIVISIONS = 60


@dataclass(frozen=True)
class FunctionHandle:
    """A scalar function together with its declared singular points.

    An empty ``singular`` tuple asserts the function is bounded on every
    cell; otherwise it is integrable with singularities exactly at the
    listed points.
    """

    fn: Callable[[float], float]
    singular: tuple[float, ...] = ()

    def __call__(self, x: float) -> float:
        return float(self.fn(x))


def as_handle(f) -> FunctionHandle:
    if isinstance(f, FunctionHandle):
        return f
    if callable(f):
        return FunctionHandle(f)
    raise InvalidArgumentError("expected a callable or a FunctionHandle")


# ----------------------------------------------------------------------
# adaptive quadrature core (vector-valued integrands)
# ----------------------------------------------------------------------

_PANEL_T, _PANEL_W = leggauss(12)


def _panel(fvec, lo: float, hi: float, t, w) -> np.ndarray:
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    total = 0.0
    for ti, wi in zip(t, w):
        total = total + wi * np.asarray(fvec(mid + half * ti))
    return half * total


def _adaptive(fvec, lo, hi, tol, t, w, depth, cell_index) -> np.ndarray:
    whole = _panel(fvec, lo, hi, t, w)
    mid = 0.5 * (lo + hi)
    left = _panel(fvec, lo, mid, t, w)
    right = _panel(fvec, mid, hi, t, w)
    halves = left + right
    err = float(np.max(np.abs(halves - whole)))
    if err <= tol or (hi - lo) <= 4.0 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi)):
        return halves
    if depth >= MAX_SUBDIVISIONS:
        raise QuadratureError(
            f"adaptive quadrature did not converge on cell {cell_index}", cell_index
        )
    half_tol = 0.5 * tol
    return _adaptive(fvec, lo, mid, half_tol, t, w, depth + 1, cell_index) + _adaptive(
        fvec, mid, hi, half_tol, t, w, depth + 1, cell_index
    )


def _toward_singularity(fvec, s, far, tol, t, w, cell_index) -> np.ndarray:
    """Sum panels over geometrically shrinking intervals approaching ``s``."""
    total = None
    for m in range(MAX_SUBDIVISIONS):
        outer = s + (far - s) * 0.5**m
        inner = s + (far - s) * 0.5 ** (m + 1)
        lo, hi = (inner, outer) if inner < outer else (outer, inner)
        piece = _adaptive(fvec, lo, hi, tol, t, w, 0, cell_index)
        total = piece if total is None else total + piece
        if float(np.max(np.abs(piece))) < tol:
            return total
    raise QuadratureError(
        f"singular quadrature did not converge on cell {cell_index}", cell_index
    )


def _integrate_cell(space, j, fvec, singular, tol, panel) -> np.ndarray:
    a, b = space.grid.cell_bounds(j)
    t, w = panel
    sing = sorted(s for s in singular if a <= s <= b)
    if not sing:
        return _adaptive(fvec, a, b, tol, t, w, 0, j)
    # split at singular points; each resulting piece has the singularity
    # at one of its ends (pieces between two singular points are halved)
    cuts = [a] + [s for s in sing if a < s < b] + [b]
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        lo_sing = lo in sing
        hi_sing = hi in sing
        if lo_sing and hi_sing:
            mid = 0.5 * (lo + hi)
            total = total + _toward_singularity(fvec, lo, mid, tol, t, w, j)
            total = total + _toward_singularity(fvec, hi, mid, tol, t, w, j)
        elif lo_sing:
            total = total + _toward_singularity(fvec, lo, hi, tol, t, w, j)
        elif hi_sing:
            total = total + _toward_singularity(fvec, hi, lo, tol, t, w, j)
        else:
            total = total + _adaptive(fvec, lo, hi, tol, t, w, 0, j)
    return total


def _panel_rule(space: Space):
    n = max(12, space.degree + 4)
    if n == 12:
        return _PANEL_T, _PANEL_W
    return leggauss(n)


def _cell_load_vector(space, j, handle, tol, panel) -> np.ndarray:
    def fvec(x):
        return handle(x) * space.basis_values(j, x)

    return _integrate_cell(space, j, fvec, handle.singular, tol, panel)


# ----------------------------------------------------------------------
# public operations
# ----------------------------------------------------------------------


def project(space: Space, f, *, tol: float = DEFAULT_TOL) -> Ultrafunction:
    """Orthogonal projection of ``f`` onto the space.

    The result is the best L2 approximation of ``f`` among members, and the
    unique member pairing like ``f`` against every member.
    """
    handle = as_handle(f)
    panel = _panel_rule(space)
    blocks = np.empty((space.n_cells, space.block_size))
    for j in range(space.n_cells):
        blocks[j] = _cell_load_vector(space, j, handle, tol, panel)
    return Ultrafunction(space, blocks)


def project_via_basis(pair, f, *, weights: str = "delta", tol: float = DEFAULT_TOL) -> Ultrafunction:
    """Projection assembled through a delta/cardinal basis pair.

    With ``weights="delta"`` the result is the cardinal-basis sum with
    weights ``integral of f times each delta member``; ``weights="sigma"``
    swaps the roles.  Both agree with :func:`project` up to quadrature
    tolerance and serve as a cross-check of the direct assembly.
    """
    handle = as_handle(f)
    space = pair.space
    panel = _panel_rule(space)
    if weights == "delta":
        sources, targets = pair.delta_coeffs, pair.cardinal_coeffs
    elif weights == "sigma":
        sources, targets = pair.cardinal_coeffs, pair.delta_coeffs
    else:
        raise InvalidArgumentError("weights must be 'delta' or 'sigma'")
    n = space.block_size
    flat = np.zeros(space.dim)
    for j in range(space.n_cells):
        rows = slice(j * n, (j + 1) * n)
        load = _cell_load_vector(space, j, handle, tol, panel)
        # weight for column i: load . source-block, since sources live on cell j only
        for i in range(pair.size):
            block = sources[rows, i]
            if np.any(block != 0.0):
                flat += (load @ block) * targets[:, i]
    return Ultrafunction(space, flat.reshape(space.n_cells, n))


def integral_against_member(f, u: Ultrafunction, *, tol: float = DEFAULT_TOL) -> float:
    """Adaptive integral of ``f(x) * u(x)`` over the support.

    Computed directly from the product integrand, independently of the
    projection path, so it can serve as an oracle for the defining property
    of :func:`project`.
    """
    handle = as_handle(f)
    space = u.space
    panel = _panel_rule(space)
    total = 0.0
    for j in range(space.n_cells):
        block = u.blocks[j]

        def fvec(x, _j=j, _block=block):
            return handle(x) * float(_block @ space.basis_values(_j, x))

        total += float(_integrate_cell(space, j, fvec, handle.singular, tol, panel))
    return total


def l2_error(f, u: Ultrafunction, *, tol: float = DEFAULT_TOL) -> float:
    """L2 norm of ``f - u`` over the support."""
    handle = as_handle(f)
    space = u.space
    panel = _panel_rule(space)
    total = 0.0
    for j in range(space.n_cells):
        block = u.blocks[j]

        def fvec(x, _j=j, _block=block):
            d = handle(x) - float(_block @ space.basis_values(_j, x))
            return d * d

        total += float(_integrate_cell(space, j, fvec, handle.singular, tol, panel))
    return math.sqrt(max(total, 0.0))


def compare_ae(
    space: Space,
    f,
    g,
    region: tuple[float, float],
    *,
    tol: float = DEFAULT_TOL,
    coeff_tol: float = 1e-10,
) -> bool:
    """Whether ``f`` and ``g`` agree almost everywhere on ``region``.

    True iff the projection of ``f - g`` has every block of the cells
    contained in ``region`` below ``coeff_tol`` in norm; pointwise changes on
    a null set are invisible to the projection.
    """
    fh, gh = as_handle(f), as_handle(g)
    lo, hi = float(region[0]), float(region[1])
    if lo > hi:
        raise InvalidArgumentError("region must be an ordered interval")
    diff = FunctionHandle(
        lambda x: fh(x) - gh(x), tuple(sorted(set(fh.singular) | set(gh.singular)))
    )
    d = project(space, diff, tol=tol)
    for j in range(space.n_cells):
        a, b = space.grid.cell_bounds(j)
        if a >= lo and b <= hi:
            if float(np.linalg.norm(d.blocks[j])) > coeff_tol:
                return False
    return True


def locality_residual(
    space: Space, f, cells: Iterable[int], *, tol: float = DEFAULT_TOL
) -> float:
    """Deviation of per-cell blocks from projections of per-cell masked data.

    For every listed cell, compares the block of the full projection with
    the corresponding block of the projection of ``f`` zeroed outside that
    cell.  The projection never mixes cells, so the residual is zero.
    """
    handle = as_handle(f)
    panel = _panel_rule(space)
    full = project(space, handle, tol=tol)
    worst = 0.0
    for j in cells:
        a, b = space.grid.cell_bounds(int(j))
        masked = FunctionHandle(
            lambda x, _a=a, _b=b: handle(x) if _a < x < _b else 0.0,
            tuple(s for s in handle.singular if a <= s <= b),
        )
        block = _cell_load_vector(space, int(j), masked, tol, panel)
        worst = max(worst, float(np.linalg.norm(full.blocks[int(j)] - block)))
    return worst
