"""Refinement ladders: directed stages with monotone grid and degree growth.

A stage bundles a grid and a polynomial degree.  The three refinement
policies preserve every existing node, so the node sets of a ladder form a
chain under inclusion, the support half-width never shrinks and the cell
bound never grows.  Observables evaluated along a ladder yield convergence
tables with dyadic-ratio order estimates.

This is the honest finite shadow of a limit over ever-finer configurations:
the ladder only ever exhibits finitely many stages and measured rates; no
claim is made about the limit object itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InsufficientDataError, InvalidArgumentError
from .grid import Grid
from .space import Space

POLICIES = ("dyadic-split", "beta-growth", "degree-raise")


@dataclass(frozen=True)
class Stage:
    """One rung of a refinement ladder."""

    grid: Grid
    degree: int
    index: int = 0

    def space(self) -> Space:
        return Space(self.grid, self.degree)


def refine(stage: Stage, policy: str, *, factor: float = 2.0) -> Stage:
    """Produce the next stage under the given growth policy.

    ``dyadic-split`` halves every cell; ``beta-growth`` widens the support
    by ``factor`` keeping all old nodes and the old cell bound;
    ``degree-raise`` increments the polynomial degree on the same grid.
    """
    g = stage.grid
    if policy == "dyadic-split":
        mids = 0.5 * (g.nodes[:-1] + g.nodes[1:])
        nodes = np.sort(np.concatenate([g.nodes, mids]))
        new = Grid(g.beta, nodes, 0.5 * g.h_max)
        return Stage(new, stage.degree, stage.index + 1)
    if policy == "beta-growth":
        if not factor > 1.0:
            raise InvalidArgumentError("beta-growth requires factor > 1")
        new_beta = g.beta * factor
        extension = new_beta - g.beta
        parts = max(1, math.ceil(extension / g.h_max - 1e-12))
        step = extension / parts
        right = g.beta + step * np.arange(1, parts + 1)
        right[-1] = new_beta
        left = -right[::-1]
        nodes = np.concatenate([left, g.nodes, right])
        new = Grid(new_beta, nodes, g.h_max)
        return Stage(new, stage.degree, stage.index + 1)
    if policy == "degree-raise":
        return Stage(g, stage.degree + 1, stage.index + 1)
    raise InvalidArgumentError(f"unknown policy {policy!r}; expected one of {POLICIES}")


@dataclass(frozen=True)
class ObservationRow:
    """One ladder stage of a convergence table."""

    stage: int
    value: float
    error: float | None
    order: float | None


class Ladder:
    """Ordered stages plus a registry of per-stage scalar observables."""

    def __init__(self, stages):
        stages = list(stages)
        if not stages:
            raise InvalidArgumentError("a ladder needs at least one stage")
        for prev, nxt in zip(stages[:-1], stages[1:]):
            prev_nodes = set(prev.grid.nodes.tolist())
            if not prev_nodes.issubset(set(nxt.grid.nodes.tolist())):
                raise InvalidArgumentError("stage node sets must form a chain")
        self.stages = stages
        self._observables: dict[str, Callable[[Stage], float]] = {}

    @classmethod
    def from_base(
        cls, base: Stage, levels: int, policy: str, *, factor: float = 2.0
    ) -> "Ladder":
        if levels < 1:
            raise InvalidArgumentError("need at least one level")
        stages = [base]
        for _ in range(levels - 1):
            stages.append(refine(stages[-1], policy, factor=factor))
        return cls(stages)

    def register(self, label: str, fn: Callable[[Stage], float]) -> None:
        self._observables[label] = fn

    def observe(self, label: str, target: float | None = None) -> list[ObservationRow]:
        """Evaluate an observable on every stage and estimate convergence orders.

        With a ``target``, errors are distances to it; without one, the
        finest-stage value serves as the reference (and gets no error of its
        own).  Orders are base-2 logarithms of successive error ratios;
        stalled or vanishing errors leave the order undefined (``None``).
        """
        if label not in self._observables:
            raise InvalidArgumentError(f"unknown observable {label!r}")
        if len(self.stages) < 3:
            raise InsufficientDataError(
                "order estimation needs at least three stages"
            )
        fn = self._observables[label]
        values = [float(fn(stage)) for stage in self.stages]
        if target is not None:
            errors: list[float | None] = [abs(v - target) for v in values]
        else:
            ref = values[-1]
            errors = [abs(v - ref) for v in values[:-1]] + [None]
        rows: list[ObservationRow] = []
        for i, v in enumerate(values):
            order = None
            if i > 0 and errors[i] is not None and errors[i - 1] is not None:
                if errors[i] > 0.0 and errors[i - 1] > 0.0:
                    order = math.log2(errors[i - 1] / errors[i])
            rows.append(ObservationRow(i, v, errors[i], order))
        return rows
