"""Solution quality metrics and vertex-usage heatmaps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lgmapf.solver.grid import Instance
from lgmapf.solver.solution import Solution


@dataclass
class Metrics:
    """Flowtime against the trivial lower bound, plus per-vertex visit counts."""
    flowtime: int | None
    lower_bound: int
    runtime_ms: float
    solved: bool
    visits: np.ndarray | None = field(default=None, repr=False)

    @property
    def ratio(self) -> float | None:
        """flowtime / LB, fixed at 1 when LB is 0."""
        if self.flowtime is None:
            return None
        if self.lower_bound == 0:
            return 1.0
        return self.flowtime / self.lower_bound

    def to_dict(self):
        return {
            'solved': self.solved,
            'flowtime': self.flowtime,
            'lower_bound': self.lower_bound,
            'ratio': self.ratio,
            'runtime_ms': round(self.runtime_ms, 3),
        }


def visit_counts(instance: Instance, solution: Solution) -> np.ndarray:
    """Occupancy per vertex, counting agent i at timesteps 0..T_i."""
    visits = np.zeros(instance.grid.size, dtype=np.int64)
    makespan = solution.makespan
    for i, path in enumerate(solution.paths):
        end = min(solution.travel_times[i], makespan)
        np.add.at(visits, path[:end + 1], 1)
    return visits


def compute_metrics(instance: Instance, solution: Solution | None, runtime_ms: float) -> Metrics:
    """Metrics of a solution; ``solution`` None records an unsolved run."""
    lower_bound = instance.lower_bound()
    if solution is None:
        return Metrics(None, lower_bound, runtime_ms, False)
    return Metrics(
        solution.flowtime, lower_bound, runtime_ms, True,
        visits=visit_counts(instance, solution),
    )


def heatmap_grid(instance: Instance, visits: np.ndarray) -> np.ndarray:
    """Visit counts laid out as a height x width grid, -1 on blocked cells."""
    grid = instance.grid
    out = np.full((grid.height, grid.width), -1, dtype=np.int64)
    mask = grid.passable
    out[mask] = visits[grid.vertex_ids[mask]]
    return out


def visit_histogram(visits: np.ndarray) -> list[tuple[int, int]]:
    """(visit count, number of vertices with that count) pairs, ascending."""
    values, counts = np.unique(visits, return_counts=True)
    return [(int(v), int(c)) for v, c in zip(values, counts)]
