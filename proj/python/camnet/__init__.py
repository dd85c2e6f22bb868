"""Multi-camera data association by dual decomposition.

Datasets and results are plain dicts in the same layout as the files the
``camnet`` command line tool reads and writes.
"""

import json
from dataclasses import dataclass, field

from ._core import (
    ConfigError,
    Error,
    FeasibilityError,
    InfeasibleProblemError,
    InputError,
    SizeError,
    preset_names,
)
from . import _core

__all__ = [
    "ConfigError",
    "Error",
    "FeasibilityError",
    "InfeasibleProblemError",
    "InputError",
    "SizeError",
    "Solution",
    "evaluate",
    "generate",
    "preset_names",
    "solve",
    "solve_assignment",
]

ITERATION_FIELDS = ("t", "alpha", "dual", "best_dual", "primal", "best_primal", "conflicts")
MESSAGE_FIELDS = ("iteration", "sender", "receiver", "kind", "bytes")


@dataclass
class Solution:
    result: dict
    iterations: list = field(default_factory=list)
    messages: list | None = None
    lrmcf_duals: list = field(default_factory=list)

    @property
    def partition(self):
        return self.result.get("partition")


def generate(preset=None, spec=None, seed=None):
    """Generate a synthetic dataset from a preset name or a spec dict."""
    doc = dict(spec or {})
    if preset is not None:
        doc["preset"] = preset
    if seed is not None:
        doc["seed"] = seed
    return json.loads(_core.generate(json.dumps(doc)))


def solve(dataset, algo="qdd", execution="centralized", **options):
    """Run a solver on a dataset dict.

    Options mirror the command line flags: step_scale, virtual_cost, tol,
    window, max_iters, seed, affinity, threads.
    """
    text, iterations, messages, duals = _core.solve(
        json.dumps(dataset), algo=algo, exec=execution, **options
    )
    return Solution(
        result=json.loads(text),
        iterations=[dict(zip(ITERATION_FIELDS, row)) for row in iterations],
        messages=None if messages is None else [dict(zip(MESSAGE_FIELDS, m)) for m in messages],
        lrmcf_duals=list(duals),
    )


def evaluate(result, dataset):
    """Return the evaluation block for a result; `result` is not modified."""
    if isinstance(result, Solution):
        result = result.result
    scored = json.loads(_core.evaluate(json.dumps(result), json.dumps(dataset)))
    return scored["evaluation"]


def solve_assignment(cost, replicable=()):
    """Minimum-cost assignment of every row of `cost` to a column.

    `cost` is a list of rows; None marks an inadmissible cell. Columns in
    `replicable` may take any number of rows. Returns (assignment, total).
    """
    rows = len(cost)
    cols = max((len(r) for r in cost), default=0)
    cells = [
        (i, j, float(c))
        for i, row in enumerate(cost)
        for j, c in enumerate(row)
        if c is not None
    ]
    return _core.solve_assignment(rows, cols, cells, set(replicable))
