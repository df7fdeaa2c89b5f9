"""Global guidance by space utilization optimization (SUO).

Every agent gets a time-independent start-to-goal path. Starting from
shortest paths, agents are replanned in index order against the vertex usage
of everyone else, with vertex cost 1 + beta * usage, so that paths spread
over less used parts of the map.
"""

from __future__ import annotations

import heapq
import threading

import numpy as np
from loguru import logger

from lgmapf.solver.grid import Instance, bfs_distances, format_path


class GlobalGuidance:
    """Per-agent global paths with lazily built distance-to-path tables."""

    def __init__(self, instance: Instance, paths):
        self.instance = instance
        self.paths = [tuple(p) for p in paths]
        self._next = [dict(zip(p, p[1:])) for p in self.paths]
        self._delta: dict[int, list[int]] = {}
        self._delta_arrays: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def next_vertex(self, i: int, v: int) -> int | None:
        """Vertex after v on agent i's path, None if v is not on it or is its end."""
        return self._next[i].get(v)

    def hints(self, Q) -> list[int | None]:
        return [self._next[i].get(v) for i, v in enumerate(Q)]

    def delta_table(self, i: int) -> list[int]:
        """Hop distance from every vertex to agent i's path."""
        table = self._delta.get(i)
        if table is None:
            with self._lock:
                table = self._delta.get(i)
                if table is None:
                    array = bfs_distances(self.instance.grid, set(self.paths[i]))
                    self._delta_arrays[i] = array
                    table = array.tolist()
                    self._delta[i] = table
        return table

    def delta_array(self, i: int) -> np.ndarray:
        if i not in self._delta_arrays:
            self.delta_table(i)
        return self._delta_arrays[i]

    def delta(self, i: int, v: int) -> int:
        return self.delta_table(i)[v]

    def usage(self) -> np.ndarray:
        """Number of paths through each vertex."""
        counts = np.zeros(self.instance.grid.size, dtype=np.int64)
        for path in self.paths:
            counts[list(set(path))] += 1
        return counts

    def overlap(self) -> int:
        """Total pairwise vertex overlap between paths."""
        counts = self.usage()
        return int((counts * (counts - 1) // 2).sum())

    def dump(self, fh, label: str = 'global'):
        """Write one tab-separated `label  i:(x,y),...` line per agent."""
        grid = self.instance.grid
        for i, path in enumerate(self.paths):
            fh.write(f'{label}\t{i}:{format_path(grid, path)}\n')

    def __len__(self):
        return len(self.paths)

    def __repr__(self):
        return f'<GlobalGuidance n={len(self.paths)}>'


def shortest_path(instance: Instance, i: int) -> list[int]:
    """Descend the distance table from s_i, preferring smaller vertex ids."""
    adjacency = instance.grid.adjacency
    dist = instance.goal_table(i)
    v = instance.starts[i]
    path = [v]
    while dist[v] > 0:
        v = min(u for u in adjacency[v] if dist[u] == dist[v] - 1)
        path.append(v)
    return path


def least_congested_path(instance: Instance, i: int, usage, beta: float) -> list[int]:
    """A* from s_i to g_i where entering v costs 1 + beta * usage[v]."""
    adjacency = instance.grid.adjacency
    dist = instance.goal_table(i)
    start, goal = instance.starts[i], instance.goals[i]

    best = {start: 0.0}
    parent = {start: None}
    closed = set()
    heap = [(float(dist[start]), 0.0, start)]
    while heap:
        _, cost, v = heapq.heappop(heap)
        if v in closed:
            continue
        closed.add(v)
        if v == goal:
            path = []
            while v is not None:
                path.append(v)
                v = parent[v]
            return path[::-1]
        for u in adjacency[v]:
            if u in closed:
                continue
            c = cost + 1.0 + beta * usage[u]
            if c < best.get(u, float('inf')):
                best[u] = c
                parent[u] = v
                heapq.heappush(heap, (c + dist[u], c, u))
    raise AssertionError(f'agent {i}: goal unreachable')


def build_suo(instance: Instance, passes: int = 2, beta: float = 0.5) -> GlobalGuidance:
    """Congestion-diversified global paths."""
    usage = np.zeros(instance.grid.size, dtype=np.int64)
    paths = [shortest_path(instance, i) for i in range(instance.n)]
    for path in paths:
        usage[path] += 1

    for _ in range(passes):
        for i in range(instance.n):
            usage[paths[i]] -= 1
            paths[i] = least_congested_path(instance, i, usage.tolist(), beta)
            usage[paths[i]] += 1

    guidance = GlobalGuidance(instance, paths)
    logger.debug('SUO built {} paths over {} passes, overlap {}', instance.n, passes, guidance.overlap())
    return guidance
