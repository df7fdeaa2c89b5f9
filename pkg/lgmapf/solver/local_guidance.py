"""Local guidance: windowed, collision-penalized per-agent path hints.

For a configuration Q every agent gets a path of exactly ``window + 1``
vertices starting at Q[i]. Paths are planned one agent at a time by a
space-time A* against the other agents' current paths, minimizing the
lexicographic cost

    sum_t <step + alpha * [chi > 0], chi> + <dist(pi[w], g_i), 0>

where chi counts vertex and swap conflicts of the step and ``step`` is 1,
except for a wait on the agent's own goal, which costs ``goal_wait_cost``.
With the default of 0 the cost counts travel time the way flowtime does;
1 charges every step alike. With global guidance the distance to the
agent's global path is inserted as a middle component.

The search itself runs in a numba kernel over flat, pre-allocated arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from lgmapf.solver.grid import Configuration, Grid, Instance

EMPTY_PATH: tuple[int, ...] = ()

# heap rows: f primary, f middle, f collisions, -t, dist to goal, vertex
HEAP_COLUMNS = 6


@dataclass(frozen=True)
class GuidanceParams:
    """Window, collision penalty, sweep counts and ablation switches."""
    window: int = 20
    alpha: float = 3.0
    iterations: int = 1
    initial_iterations: int = 2
    use_global: bool = False
    goal_wait_cost: float = 0.0
    sort_agents: bool = True
    cache: bool = True

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f'window must be at least 1, got {self.window}')
        if self.alpha < 0:
            raise ValueError(f'alpha must be non-negative, got {self.alpha}')
        if self.iterations < 1 or self.initial_iterations < 1:
            raise ValueError('iteration counts must be at least 1')
        if not 0 <= self.goal_wait_cost <= 1:
            raise ValueError(f'goal_wait_cost must be within [0, 1], got {self.goal_wait_cost}')


@dataclass
class Guidance:
    """One windowed path per agent (empty when uninitialized) and its collision count."""
    paths: list[tuple[int, ...]]
    collisions: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.collisions:
            self.collisions = [0] * len(self.paths)

    @classmethod
    def empty(cls, n: int) -> Guidance:
        return cls([EMPTY_PATH] * n)

    def hints(self) -> list[int | None]:
        """Next vertex each agent is guided to, None for empty paths."""
        return [p[1] if len(p) > 1 else None for p in self.paths]

    @property
    def total_collisions(self) -> int:
        return sum(self.collisions)

    def __len__(self):
        return len(self.paths)


def init_guidance(Q: Configuration, prev: Guidance | None) -> Guidance:
    """Shift the previous guidance one timestep forward.

    Agents standing on the vertex their previous path led to keep the path,
    shifted by one and padded with a wait at the end; everyone else starts
    empty.
    """
    if prev is None:
        return Guidance.empty(len(Q))
    paths, collisions = [], []
    for i, v in enumerate(Q):
        path = prev.paths[i]
        if len(path) > 1 and path[1] == v:
            paths.append(path[1:] + path[-1:])
            collisions.append(prev.collisions[i])
        else:
            paths.append(EMPTY_PATH)
            collisions.append(0)
    return Guidance(paths, collisions)


def count_collisions(u: int, v: int, t: int, guidance: Guidance, agent: int) -> int:
    """Conflicts of the step u -> v between t and t+1 against the other agents' paths."""
    chi = 0
    for j, path in enumerate(guidance.paths):
        if j == agent or not path:
            continue
        if path[t + 1] == v:
            chi += 1
        elif u != v and path[t] == v and path[t + 1] == u:
            chi += 1
    return chi


def order_agents(guidance: Guidance) -> list[int]:
    """Agents by descending collision count, ties broken by index."""
    collisions = guidance.collisions
    return sorted(range(len(collisions)), key=lambda i: (-collisions[i], i))


@njit(cache=True)
def _reserve(vertices, moves, offsets, heads, path, sign):
    last = path.shape[0] - 1
    for t in range(last + 1):
        vertices[t, path[t]] += sign
    for t in range(last):
        v = path[t]
        u = path[t + 1]
        if u != v:
            for e in range(offsets[v], offsets[v + 1]):
                if heads[e] == u:
                    moves[t, e] += sign
                    break


class ReservationTable:
    """Per-timestep vertex and arc counts over a set of windowed paths."""

    def __init__(self, window: int, grid: Grid):
        self.grid = grid
        self.vertices = np.zeros((window + 1, grid.size), dtype=np.int32)
        self.moves = np.zeros((window, len(grid.arcs[1])), dtype=np.int32)

    def add(self, path, sign: int = 1):
        offsets, heads, _ = self.grid.arcs
        _reserve(self.vertices, self.moves, offsets, heads, np.asarray(path, dtype=np.int64), sign)

    def remove(self, path):
        self.add(path, -1)

    def clear(self):
        self.vertices.fill(0)
        self.moves.fill(0)

    def count(self, u: int, v: int, t: int) -> int:
        """Same value as count_collisions for a path not in the table."""
        chi = int(self.vertices[t + 1, v])
        if u != v:
            chi += int(self.moves[t, self.grid.arc(v, u)])
        return chi


@njit(cache=True)
def _row_less(heap, a, b):
    for k in range(HEAP_COLUMNS):
        if heap[a, k] < heap[b, k]:
            return True
        if heap[a, k] > heap[b, k]:
            return False
    return False


@njit(cache=True)
def _swap_rows(heap, a, b):
    for k in range(HEAP_COLUMNS):
        tmp = heap[a, k]
        heap[a, k] = heap[b, k]
        heap[b, k] = tmp


@njit(cache=True)
def _heap_push(heap, size, primary, middle, chi, neg_t, d, v):
    if size == heap.shape[0]:
        grown = np.empty((2 * size, HEAP_COLUMNS))
        grown[:size] = heap[:size]
        heap = grown
    heap[size, 0] = primary
    heap[size, 1] = middle
    heap[size, 2] = chi
    heap[size, 3] = neg_t
    heap[size, 4] = d
    heap[size, 5] = v
    k = size
    while k > 0:
        up = (k - 1) >> 1
        if not _row_less(heap, k, up):
            break
        _swap_rows(heap, k, up)
        k = up
    return heap, size + 1


@njit(cache=True)
def _heap_pop(heap, size):
    size -= 1
    if size > 0:
        for c in range(HEAP_COLUMNS):
            heap[0, c] = heap[size, c]
        k = 0
        while True:
            child = 2 * k + 1
            if child >= size:
                break
            if child + 1 < size and _row_less(heap, child + 1, child):
                child += 1
            if not _row_less(heap, child, k):
                break
            _swap_rows(heap, child, k)
            k = child
    return size


@njit(cache=True)
def _lex_less(a0, a1, a2, b0, b1, b2):
    if a0 != b0:
        return a0 < b0
    if a1 != b1:
        return a1 < b1
    return a2 < b2


@njit(cache=True)
def _windowed_astar(start, goal, window, alpha, goal_wait_cost, offsets, heads, reverse,
                    dist, delta, use_delta, vertices, moves,
                    stamp, closed, g, parent, generation, heap, path_out):
    size = dist.shape[0]
    stamp[start] = generation
    g[start, 0] = 0.0
    g[start, 1] = 0.0
    g[start, 2] = 0.0
    parent[start] = -1
    h = dist[start] + goal_wait_cost * max(window - dist[start], 0)
    heap, count = _heap_push(heap, 0, h, 0.0, 0.0, 0.0, dist[start], start)
    expansions = 0

    while count > 0:
        f0 = heap[0, 0]
        f1 = heap[0, 1]
        f2 = heap[0, 2]
        t = int(-heap[0, 3])
        v = int(heap[0, 5])
        count = _heap_pop(heap, count)
        idx = t * size + v
        if closed[idx] == generation:
            continue
        closed[idx] = generation
        expansions += 1

        if t == window:
            k = idx
            j = window
            while k >= 0:
                path_out[j] = k % size
                k = parent[k]
                j -= 1
            return f0, f1, f2, expansions, heap

        remaining = window - t - 1
        base = idx + size - v
        first = offsets[v]
        degree = offsets[v + 1] - first
        for k in range(degree + 1):
            if k < degree:
                e = first + k
                u = heads[e]
                chi = vertices[t + 1, u] + moves[t, reverse[e]]
                step = 1.0
            else:
                u = v
                chi = vertices[t + 1, u]
                step = goal_wait_cost if v == goal else 1.0
            nidx = base + u
            if closed[nidx] == generation:
                continue
            n0 = g[idx, 0] + step + (alpha if chi > 0 else 0.0)
            n1 = g[idx, 1] + (delta[u] if use_delta else 0)
            n2 = g[idx, 2] + chi
            if stamp[nidx] != generation or _lex_less(n0, n1, n2, g[nidx, 0], g[nidx, 1], g[nidx, 2]):
                stamp[nidx] = generation
                g[nidx, 0] = n0
                g[nidx, 1] = n1
                g[nidx, 2] = n2
                parent[nidx] = idx
                h = dist[u] + goal_wait_cost * max(remaining - dist[u], 0)
                heap, count = _heap_push(heap, count, n0 + h, n1, n2, -(t + 1.0), dist[u], u)

    raise AssertionError('windowed search exhausted without reaching the last layer')


class GuidancePlanner:
    """Builds local guidance for configurations of one instance.

    Owns the A* workspace over the (window + 1) * |V| time-expanded layers;
    entries are invalidated by a generation stamp instead of being cleared.
    The heuristic is the goal distance plus ``goal_wait_cost`` for each step
    the agent would rest after arriving, which never overestimates.

    Equal-cost entries pop deepest layer first, then nearest to the goal, then
    lowest vertex id. Ordering by goal distance before vertex id keeps the
    waits of equally cheap paths at their end, so with ``goal_wait_cost=1``
    an agent one step from its goal is guided (v, g, g) and not (v, v, g).
    """

    def __init__(self, instance: Instance, params: GuidanceParams, global_guidance=None):
        self.instance = instance
        self.params = params
        self.global_guidance = global_guidance if params.use_global else None
        self.size = instance.grid.size
        self._offsets, self._heads, self._reverse = instance.grid.arcs
        layers = (params.window + 1) * self.size
        self._stamp = np.zeros(layers, dtype=np.int64)
        self._closed = np.zeros(layers, dtype=np.int64)
        self._g = np.zeros((layers, 3))
        self._parent = np.full(layers, -1, dtype=np.int64)
        self._heap = np.empty((max(1024, 4 * self.size), HEAP_COLUMNS))
        self._path = np.empty(params.window + 1, dtype=np.int64)
        self._no_delta = np.zeros(1, dtype=np.int32)
        self._table = ReservationTable(params.window, instance.grid)
        self._generation = 0
        self.expansions = 0
        self.builds = 0

    def build(self, Q: Configuration, prev: Guidance | None = None) -> Guidance:
        """Guidance for Q, initialized from the previous configuration's guidance."""
        params = self.params
        if not params.cache:
            prev = None
            sweeps = params.iterations
        else:
            sweeps = params.iterations if prev is not None else params.initial_iterations
        guidance = init_guidance(Q, prev)
        table = self._table
        for path in guidance.paths:
            if path:
                table.add(path)
        try:
            for _ in range(sweeps):
                order = order_agents(guidance) if params.sort_agents else range(len(Q))
                for i in order:
                    if guidance.paths[i]:
                        table.remove(guidance.paths[i])
                    path, cost = self.plan(i, Q, table)
                    guidance.paths[i] = path
                    guidance.collisions[i] = cost[-1]
                    table.add(path)
        except BaseException:
            table.clear()
            raise
        for path in guidance.paths:
            table.remove(path)
        self.builds += 1
        return guidance

    def plan(self, i: int, Q: Configuration, table: ReservationTable):
        """Lexicographically cheapest windowed path for agent i; returns (path, cost)."""
        params = self.params
        delta = self.global_guidance.delta_array(i) if self.global_guidance is not None else None
        self._generation += 1
        primary, middle, chi, expanded, self._heap = _windowed_astar(
            Q[i], self.instance.goals[i], params.window, float(params.alpha),
            float(params.goal_wait_cost), self._offsets, self._heads, self._reverse,
            self.instance.goal_array(i), self._no_delta if delta is None else delta, delta is not None,
            table.vertices, table.moves, self._stamp, self._closed, self._g, self._parent,
            self._generation, self._heap, self._path,
        )
        self.expansions += expanded
        path = tuple(self._path.tolist())
        if delta is None:
            return path, (primary, int(chi))
        return path, (primary, int(middle), int(chi))


def build_guidance(Q: Configuration, prev: Guidance | None, instance: Instance,
                   params: GuidanceParams, global_guidance=None) -> Guidance:
    """One-off guidance construction with a fresh planner."""
    return GuidancePlanner(instance, params, global_guidance).build(Q, prev)


def spacetime_astar(i: int, Q: Configuration, guidance: Guidance, instance: Instance,
                    params: GuidanceParams, global_guidance=None):
    """Plan agent i against the other paths in ``guidance``; returns (path, cost)."""
    table = ReservationTable(params.window, instance.grid)
    for j, path in enumerate(guidance.paths):
        if j != i and path:
            table.add(path)
    return GuidancePlanner(instance, params, global_guidance).plan(i, Q, table)
