"""Partition of a bounded support [-beta, beta] into open cells.

The grid is the backbone of every other object in the package: function
spaces are direct sums of per-cell polynomial spaces, and all pointwise
conventions (one-sided limits, node averages) are phrased in terms of the
classification produced by :meth:`Grid.locate`.

Node identity is decided by exact comparison after snapping: an input within
a relative distance of ``2**-40`` of a node is treated as that node.  The
pointwise conventions at nodes are genuinely discontinuous, so the fuzz is
kept explicit and tiny rather than hidden in comparisons downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidArgumentError

#: Relative half-width of the snap-to-node window.
SNAP_REL = 2.0 ** -40


class PointKind(Enum):
    INTERIOR = "interior"
    NODE = "node"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class PointClass:
    """Classification of a real point against a grid.

    ``kind`` is one of :class:`PointKind`; ``index`` is the cell index for
    interior points, the node index for nodes, and ``None`` outside.
    """

    kind: PointKind
    index: int | None

    @classmethod
    def interior(cls, j: int) -> "PointClass":
        return cls(PointKind.INTERIOR, j)

    @classmethod
    def node(cls, j: int) -> "PointClass":
        return cls(PointKind.NODE, j)

    @classmethod
    def outside(cls) -> "PointClass":
        return cls(PointKind.OUTSIDE, None)

    @property
    def is_interior(self) -> bool:
        return self.kind is PointKind.INTERIOR

    @property
    def is_node(self) -> bool:
        return self.kind is PointKind.NODE

    @property
    def is_outside(self) -> bool:
        return self.kind is PointKind.OUTSIDE


class Grid:
    """Strictly increasing nodes ``-beta = g_0 < ... < g_n = beta``.

    Cell ``j`` is the open interval ``(nodes[j], nodes[j+1])``; every gap is
    bounded by ``h_max``.  Grids are immutable after construction.
    """

    __slots__ = ("beta", "nodes", "h_max")

    def __init__(self, beta: float, nodes, h_max: float):
        beta = float(beta)
        if not math.isfinite(beta) or beta <= 0.0:
            raise InvalidArgumentError("beta must be a positive finite number")
        arr = np.asarray(nodes, dtype=float).copy()
        if arr.ndim != 1 or arr.size < 2:
            raise InvalidArgumentError("need at least two nodes")
        if arr[0] != -beta or arr[-1] != beta:
            raise InvalidArgumentError("nodes must start at -beta and end at beta")
        gaps = np.diff(arr)
        if np.any(gaps <= 0.0):
            raise InvalidArgumentError("nodes must be strictly increasing")
        h_max = float(h_max)
        if not math.isfinite(h_max) or h_max <= 0.0:
            raise InvalidArgumentError("h_max must be a positive finite number")
        # 1-ulp slack: uniform construction can overshoot h_max by rounding.
        if np.any(gaps > h_max * (1.0 + 1e-12)):
            raise InvalidArgumentError("a cell exceeds the h_max bound")
        arr.flags.writeable = False
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "nodes", arr)
        object.__setattr__(self, "h_max", h_max)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("Grid is immutable")

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def uniform(cls, beta: float, ell: int) -> "Grid":
        """Uniform partition of ``[-beta, beta]`` into ``ell`` cells."""
        if ell != int(ell) or int(ell) < 1:
            raise InvalidArgumentError("ell must be a positive integer")
        ell = int(ell)
        beta = float(beta)
        if not math.isfinite(beta) or beta <= 0.0:
            raise InvalidArgumentError("beta must be a positive finite number")
        nodes = np.linspace(-beta, beta, ell + 1)
        return cls(beta, nodes, 2.0 * beta / ell)

    @classmethod
    def with_tags(cls, beta: float, tags, h_max: float) -> "Grid":
        """Grid whose nodes contain ``tags``, gaps filled down to ``h_max``.

        Every tag must lie strictly inside ``(-beta, beta)``.  Gaps wider
        than ``h_max`` are split into the minimal number of equal parts.
        """
        beta = float(beta)
        if not math.isfinite(beta) or beta <= 0.0:
            raise InvalidArgumentError("beta must be a positive finite number")
        h_max = float(h_max)
        if not math.isfinite(h_max) or h_max <= 0.0:
            raise InvalidArgumentError("h_max must be a positive finite number")
        tag_list = sorted({float(t) for t in tags})
        for t in tag_list:
            if not (-beta < t < beta):
                raise InvalidArgumentError(
                    f"tag {t!r} is not strictly inside (-beta, beta)"
                )
        anchors = [-beta] + tag_list + [beta]
        nodes: list[float] = [anchors[0]]
        for a, b in zip(anchors[:-1], anchors[1:]):
            gap = b - a
            parts = max(1, math.ceil(gap / h_max - 1e-12))
            for i in range(1, parts):
                nodes.append(a + gap * i / parts)
            nodes.append(b)
        return cls(beta, np.asarray(nodes), h_max)

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    @property
    def n_cells(self) -> int:
        return self.nodes.size - 1

    def cell_bounds(self, j: int) -> tuple[float, float]:
        if not 0 <= j < self.n_cells:
            raise InvalidArgumentError(f"cell index {j} out of range")
        return float(self.nodes[j]), float(self.nodes[j + 1])

    def cell_width(self, j: int) -> float:
        a, b = self.cell_bounds(j)
        return b - a

    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)

    def snap(self, x: float) -> float:
        """Return the node value identified with ``x``, or ``x`` itself."""
        loc = self.locate(x)
        if loc.is_node:
            return float(self.nodes[loc.index])
        return float(x)

    def locate(self, x: float) -> PointClass:
        """Classify ``x`` as interior to a cell, a node, or outside."""
        x = float(x)
        nodes = self.nodes
        i = int(np.searchsorted(nodes, x))
        # nearest node among neighbours of the insertion point
        best = None
        for j in (i - 1, i):
            if 0 <= j < nodes.size:
                d = abs(x - nodes[j])
                if best is None or d < best[1]:
                    best = (j, d)
        j, d = best
        if d <= SNAP_REL * max(1.0, abs(nodes[j])):
            return PointClass.node(j)
        if x < nodes[0] or x > nodes[-1]:
            return PointClass.outside()
        return PointClass.interior(min(i - 1, self.n_cells - 1))

    def node_index(self, x: float, what: str = "point") -> int:
        """Node index of ``x``; raises if ``x`` is not a grid node."""
        loc = self.locate(x)
        if not loc.is_node:
            raise InvalidArgumentError(f"{what} {x!r} is not a grid node")
        return loc.index

    # ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.beta == other.beta
            and self.nodes.shape == other.nodes.shape
            and bool(np.all(self.nodes == other.nodes))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Grid(beta={self.beta}, n_cells={self.n_cells}, h_max={self.h_max})"
