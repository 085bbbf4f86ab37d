"""JSON serialization for grids, spaces, members and basis pairs.

Spaces are identified in member files by a content hash over the grid nodes
and the degree, so mismatched files fail loudly.  Member files additionally
embed the full space description (``space_spec``) so they remain
self-contained for sampling.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .basis import BasisPair
from .errors import InvalidArgumentError
from .grid import Grid
from .space import Space, Ultrafunction


def grid_to_dict(grid: Grid) -> dict:
    return {"beta": grid.beta, "nodes": [float(x) for x in grid.nodes]}


def grid_from_dict(data: dict) -> Grid:
    try:
        beta = float(data["beta"])
        nodes = [float(x) for x in data["nodes"]]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed grid data: {exc}") from exc
    h_max = float(np.max(np.diff(nodes)))
    return Grid(beta, nodes, h_max)


def space_to_dict(space: Space) -> dict:
    return {"grid": grid_to_dict(space.grid), "degree": space.degree}


def space_from_dict(data: dict) -> Space:
    try:
        return Space(grid_from_dict(data["grid"]), int(data["degree"]))
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed space data: {exc}") from exc


def space_hash(space: Space) -> str:
    payload = json.dumps(space_to_dict(space), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def member_to_dict(u: Ultrafunction) -> dict:
    return {
        "space": space_hash(u.space),
        "space_spec": space_to_dict(u.space),
        "blocks": [[float(c) for c in row] for row in u.blocks],
    }


def member_from_dict(data: dict, space: Space | None = None) -> Ultrafunction:
    try:
        file_hash = data["space"]
        blocks = data["blocks"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed member data: {exc}") from exc
    if space is None:
        if "space_spec" not in data:
            raise InvalidArgumentError(
                "member file carries no space description; pass the space explicitly"
            )
        space = space_from_dict(data["space_spec"])
    if file_hash != space_hash(space):
        raise InvalidArgumentError(
            "member file was written for a different space (hash mismatch)"
        )
    return Ultrafunction(space, np.asarray(blocks, dtype=float))


def basis_pair_to_dict(pair: BasisPair) -> dict:
    return {
        "space": space_hash(pair.space),
        "points": [float(q) for q in pair.points],
        "delta": [[float(c) for c in row] for row in pair.delta_coeffs],
        "sigma": [[float(c) for c in row] for row in pair.cardinal_coeffs],
        "cell_condition": [float(c) for c in pair.cell_condition_numbers()],
    }


def dump_json(data: dict, path_or_none: str | None) -> str:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if path_or_none is not None:
        with open(path_or_none, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
