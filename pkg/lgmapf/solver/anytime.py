"""Anytime refinement by large neighborhood search.

Each proposal removes a random subset of agents from the incumbent and
replans them one by one with prioritized planning, treating every other path
as a hard moving obstacle. A proposal is installed only when it strictly
lowers the flowtime.
"""

from __future__ import annotations

import heapq
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from loguru import logger

from lgmapf.bench.validator import validate
from lgmapf.solver.grid import Instance
from lgmapf.solver.solution import Solution
from lgmapf.utils.timing import Deadline


class SubsetStrategy(str, Enum):
    """How agents are drawn for a proposal."""
    UNIFORM = 'uniform'


@dataclass(frozen=True)
class TraceRecord:
    """One point of the cost-vs-time curve."""
    proposal: int
    elapsed_ms: float
    flowtime: int


class SpaceTimeReservations:
    """Occupied (t, v) cells, used moves and goal rests of fixed paths."""

    def __init__(self, size: int):
        self.size = size
        self.cells = set()
        self.moves = set()
        self.rest_from: dict[int, int] = {}
        self.last_visit: dict[int, int] = {}

    def add(self, path):
        """Reserve a path whose agent rests at its last vertex afterwards."""
        size = self.size
        for t, v in enumerate(path):
            self.cells.add(t * size + v)
            if self.last_visit.get(v, -1) < t:
                self.last_visit[v] = t
        for t in range(len(path) - 1):
            u, v = path[t], path[t + 1]
            if u != v:
                self.moves.add((t * size + u) * size + v)
        self.rest_from[path[-1]] = len(path) - 1

    def is_free(self, u: int, v: int, t: int) -> bool:
        """Whether moving from u at t to v at t+1 avoids every reservation."""
        size = self.size
        if (t + 1) * size + v in self.cells:
            return False
        rest = self.rest_from.get(v)
        if rest is not None and t + 1 >= rest:
            return False
        return u == v or ((t * size + v) * size + u) not in self.moves

    def can_stop(self, v: int, t: int) -> bool:
        """Whether an agent may rest at v forever from t."""
        return self.last_visit.get(v, -1) < t and v not in self.rest_from


def plan_full_horizon(instance: Instance, i: int, reservations: SpaceTimeReservations,
                      horizon: int) -> list[int] | None:
    """Earliest-arrival path for agent i that can rest at its goal, or None."""
    size = instance.grid.size
    adjacency = instance.grid.adjacency
    dist = instance.goal_table(i)
    start, goal = instance.starts[i], instance.goals[i]

    parent = {start: -1}
    closed = set()
    heap = [(dist[start], 0, start)]
    while heap:
        _, t, v = heapq.heappop(heap)
        key = t * size + v
        if key in closed:
            continue
        closed.add(key)
        if v == goal and reservations.can_stop(v, t):
            path = []
            while key >= 0:
                path.append(key % size)
                key = parent[key]
            return path[::-1]
        if t >= horizon:
            continue
        for u in (*adjacency[v], v):
            nkey = key + size - v + u
            if nkey in closed or nkey in parent or not reservations.is_free(v, u, t):
                continue
            parent[nkey] = key
            heapq.heappush(heap, (t + 1 + dist[u], t + 1, u))
    return None


def pp_repair(subset, incumbent: Solution, instance: Instance, rng: np.random.Generator):
    """Replan ``subset`` around the rest of the incumbent.

    Returns new paths keyed by agent, or None when some agent cannot reach
    its goal within the horizon.
    """
    chosen = set(int(i) for i in subset)
    reservations = SpaceTimeReservations(instance.grid.size)
    for j, path in enumerate(incumbent.paths):
        if j not in chosen:
            reservations.add(path[:incumbent.travel_times[j] + 1])

    horizon = incumbent.makespan + instance.grid.size
    repaired = {}
    for i in rng.permutation(sorted(chosen)):
        i = int(i)
        path = plan_full_horizon(instance, i, reservations, horizon)
        if path is None:
            return None
        reservations.add(path)
        repaired[i] = path
    return repaired


def merge_paths(incumbent: Solution, repaired: dict, instance: Instance) -> Solution:
    """Incumbent with the repaired agents' paths swapped in."""
    paths = incumbent.paths
    for i, path in repaired.items():
        paths[i] = path
    return Solution.from_paths(paths, instance.goals)


@dataclass
class RefinementState:
    """Incumbent shared by the workers, replaced only under the lock."""
    incumbent: Solution
    deadline: Deadline
    version: int = 0
    proposals: int = 0
    acceptances: int = 0
    trace: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def snapshot(self):
        with self.lock:
            return self.incumbent, self.version

    def claim_proposal(self, max_proposals) -> int | None:
        with self.lock:
            if max_proposals is not None and self.proposals >= max_proposals:
                return None
            self.proposals += 1
            return self.proposals

    def install(self, candidate: Solution, based_on: int, repaired: dict,
                instance: Instance, proposal: int) -> bool:
        """Install a strictly better solution; stale proposals are rebased and revalidated."""
        with self.lock:
            if based_on != self.version:
                candidate = merge_paths(self.incumbent, repaired, instance)
                if not validate(instance, candidate):
                    return False
            if candidate.flowtime >= self.incumbent.flowtime:
                return False
            self.incumbent = candidate
            self.version += 1
            self.acceptances += 1
            self.trace.append(TraceRecord(proposal, self.deadline.elapsed, candidate.flowtime))
            return True


def draw_subset(rng: np.random.Generator, n: int, max_subset: int,
                strategy: SubsetStrategy = SubsetStrategy.UNIFORM) -> np.ndarray:
    """Uniform size in [1, max_subset] capped at n, then uniform distinct agents."""
    if strategy is not SubsetStrategy.UNIFORM:
        raise ValueError(f'unsupported subset strategy {strategy!r}')
    size = int(rng.integers(1, min(max_subset, n) + 1))
    return rng.choice(n, size=size, replace=False)


def _worker(state: RefinementState, instance: Instance, rng: np.random.Generator,
            max_proposals, max_subset: int, strategy: SubsetStrategy):
    n = instance.n
    while not state.deadline.is_expired:
        proposal = state.claim_proposal(max_proposals)
        if proposal is None:
            break
        incumbent, version = state.snapshot()
        subset = draw_subset(rng, n, max_subset, strategy)
        repaired = pp_repair(subset, incumbent, instance, rng)
        if repaired is None:
            continue
        candidate = merge_paths(incumbent, repaired, instance)
        if candidate.flowtime < incumbent.flowtime:
            if state.install(candidate, version, repaired, instance, proposal):
                logger.debug('LNS proposal {} accepted, flowtime {}', proposal, candidate.flowtime)


def refine(initial: Solution, instance: Instance, deadline: Deadline | None = None,
           workers: int = 1, seed: int = 0, max_proposals: int | None = None,
           max_subset: int = 30, strategy: SubsetStrategy = SubsetStrategy.UNIFORM,
           trace: list | None = None) -> Solution:
    """Improve ``initial`` until the deadline or the proposal budget runs out.

    Improvements are appended to ``trace`` as TraceRecord entries, starting
    with the initial solution at proposal 0.
    """
    deadline = deadline if deadline is not None else Deadline(None)
    if deadline.time_limit_ms is None and max_proposals is None:
        raise ValueError('refine needs a deadline or a proposal budget')
    state = RefinementState(initial, deadline)
    state.trace.append(TraceRecord(0, deadline.elapsed, initial.flowtime))

    if deadline.is_expired:
        if trace is not None:
            trace.extend(state.trace)
        return initial

    if workers <= 1:
        _worker(state, instance, np.random.default_rng(seed), max_proposals, max_subset, strategy)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_worker, state, instance, np.random.default_rng([seed, k]),
                            max_proposals, max_subset, strategy)
                for k in range(workers)
            ]
            for future in futures:
                future.result()

    logger.info('LNS: {} proposals, {} accepted, flowtime {} -> {}',
                state.proposals, state.acceptances, initial.flowtime, state.incumbent.flowtime)
    if trace is not None:
        trace.extend(state.trace)
    return state.incumbent
