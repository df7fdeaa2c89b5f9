"""PIBT configuration generator with guidance-aware preferences and swap."""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from lgmapf.solver.grid import NO_VERTEX, Configuration, Instance

NO_AGENT = -1


def sort_candidates(candidates, distances, guided=None, swap_mode=False, eps=None) -> list[int]:
    """Order candidates ascending by the preference score.

    Normal mode scores <Ind[v != guided], dist(v), eps>; with no guided vertex
    the indicator is constant. Swap mode scores <0, -dist(v), eps>.
    """
    if eps is None:
        eps = [0.0] * len(candidates)
    if swap_mode:
        keys = [(0, -d, e) for d, e in zip(distances, eps)]
    else:
        keys = [(0 if v == guided else 1, d, e) for v, d, e in zip(candidates, distances, eps)]
    ranked = sorted(range(len(candidates)), key=keys.__getitem__)
    return [candidates[k] for k in ranked]


@dataclass
class PriorityState:
    """Dynamic PIBT priorities for one configuration."""
    values: list[float]

    @classmethod
    def initial(cls, instance: Instance) -> PriorityState:
        size = instance.grid.size
        return cls([instance.dist(s, i) / size for i, s in enumerate(instance.starts)])

    def advance(self, Q: Configuration, goals: Configuration) -> PriorityState:
        """Priorities for the successor configuration Q.

        Agents off their goal gain one; agents at their goal drop back to the
        fractional base.
        """
        return PriorityState([
            p + 1 if v != g else p - int(p)
            for p, v, g in zip(self.values, Q, goals)
        ])

    @property
    def order(self) -> list[int]:
        """Agents by descending priority, ties broken by index."""
        values = self.values
        return sorted(range(len(values)), key=lambda i: (-values[i], i))


class PIBT:
    """One-step configuration generator.

    Holds the occupancy scratch arrays and the generator used for the random
    tie-break, both owned by the enclosing search.
    """

    def __init__(self, instance: Instance, rng: np.random.Generator, swap: bool = True):
        self.instance = instance
        self.n = instance.n
        self.goals = instance.goals
        self.adjacency = instance.grid.adjacency
        self.rng = rng
        self.swap = swap
        self.dist = [instance.goal_table(i) for i in range(self.n)]
        self.occupied_now = [NO_AGENT] * instance.grid.size
        self.occupied_next = [NO_AGENT] * instance.grid.size
        self._hints = None
        # priority inheritance may chain through every agent
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * self.n + 1000))

    def candidates(self, v: int) -> tuple[int, ...]:
        """Neighbors of v followed by v itself."""
        return (*self.adjacency[v], v)

    def build_preference(self, i: int, Q: Configuration, hints=None, swap_mode=False) -> list[int]:
        """Candidate order for agent i at Q.

        ``hints[i]`` is the vertex the guidance wants i to take next, or None.
        """
        candidates = self.candidates(Q[i])
        table = self.dist[i]
        eps = self.rng.random(len(candidates))
        guided = hints[i] if hints is not None else None
        return sort_candidates(candidates, [table[v] for v in candidates], guided, swap_mode, eps)

    def progress_vertex(self, i: int, pref, hints=None) -> int:
        """First entry of ``pref`` by goal distance alone.

        Swap detection uses this vertex, never the guided one.
        """
        if hints is None or hints[i] is None:
            return pref[0]
        return min(pref, key=self.dist[i].__getitem__)

    def swap_needed(self, i: int, Q: Configuration, hints=None) -> int | None:
        """Swap partner of agent i at Q when nothing has been assigned yet."""
        for a, v in enumerate(Q):
            self.occupied_now[v] = a
        try:
            first = self.progress_vertex(i, self.build_preference(i, Q, hints), hints)
            partner = self._swap_partner(i, Q, [NO_VERTEX] * self.n, first)
        finally:
            for v in Q:
                self.occupied_now[v] = NO_AGENT
        return None if partner == NO_AGENT else partner

    def step(self, Q: Configuration, order, constraints=(), hints=None) -> Configuration | None:
        """Generate a neighboring configuration of Q.

        ``order`` lists agents by descending priority and ``constraints`` is a
        sequence of (agent, vertex) pairs forcing those agents' next vertices.
        Returns None when the constraints cannot be met.
        """
        Q_to = [NO_VERTEX] * self.n
        self._hints = hints
        for i, v in enumerate(Q):
            self.occupied_now[v] = i
        try:
            if not self._apply_constraints(Q, Q_to, constraints):
                return None
            for i in order:
                if Q_to[i] == NO_VERTEX and not self._func_pibt(i, Q, Q_to):
                    return None
            return tuple(Q_to)
        finally:
            for v in Q:
                self.occupied_now[v] = NO_AGENT
            for v in Q_to:
                if v != NO_VERTEX:
                    self.occupied_next[v] = NO_AGENT

    def _apply_constraints(self, Q, Q_to, constraints) -> bool:
        for i, v in constraints:
            if v != Q[i] and v not in self.adjacency[Q[i]]:
                return False
            if self.occupied_next[v] != NO_AGENT:
                return False
            j = self.occupied_now[v]
            if j != NO_AGENT and j != i and Q_to[j] == Q[i]:
                return False
            Q_to[i] = v
            self.occupied_next[v] = i
        return True

    def _func_pibt(self, i: int, Q, Q_to) -> bool:
        occupied_now = self.occupied_now
        occupied_next = self.occupied_next

        pref = self.build_preference(i, Q, self._hints)
        swap_agent = NO_AGENT
        if self.swap:
            swap_agent = self._swap_partner(i, Q, Q_to, self.progress_vertex(i, pref, self._hints))
            if swap_agent != NO_AGENT:
                pref = self.build_preference(i, Q, swap_mode=True)

        for k, u in enumerate(pref):
            if occupied_next[u] != NO_AGENT:
                continue
            j = occupied_now[u]
            # no swaps with agents already heading to Q[i]
            if j != NO_AGENT and Q_to[j] == Q[i]:
                continue

            occupied_next[u] = i
            Q_to[i] = u

            # priority inheritance
            if j != NO_AGENT and j != i and Q_to[j] == NO_VERTEX and not self._func_pibt(j, Q, Q_to):
                continue

            # pull the swap partner into the vacated vertex
            if (k == 0 and swap_agent != NO_AGENT and Q_to[swap_agent] == NO_VERTEX
                    and occupied_next[Q[i]] == NO_AGENT):
                occupied_next[Q[i]] = swap_agent
                Q_to[swap_agent] = Q[i]
            return True

        occupied_next[Q[i]] = i
        Q_to[i] = Q[i]
        return False

    def _swap_partner(self, i: int, Q, Q_to, first: int) -> int:
        occupied_now = self.occupied_now

        # the agent sitting on i's first choice
        j = occupied_now[first]
        if (j != NO_AGENT and j != i and Q_to[j] == NO_VERTEX
                and self._swap_required(i, j, Q[i], Q[j]) and self._swap_possible(Q[j], Q[i])):
            return j

        # clearing: i steps forward and drags a neighbor behind it
        if first != Q[i]:
            for u in self.adjacency[Q[i]]:
                k = occupied_now[u]
                if k == NO_AGENT or first == Q[k]:
                    continue
                if self._swap_required(k, i, Q[i], first) and self._swap_possible(first, Q[i]):
                    return k
        return NO_AGENT

    def _open_neighbors(self, v_puller: int, v_pusher: int) -> tuple[int, int]:
        """Neighbors of v_puller usable to step aside, and the last one seen."""
        count = 0
        last = NO_VERTEX
        for u in self.adjacency[v_puller]:
            a = self.occupied_now[u]
            if u == v_pusher or (len(self.adjacency[u]) == 1 and a != NO_AGENT and self.goals[a] == u):
                continue
            count += 1
            last = u
        return count, last

    def _swap_required(self, pusher: int, puller: int, v_pusher: int, v_puller: int) -> bool:
        d_pusher = self.dist[pusher]
        d_puller = self.dist[puller]
        while d_pusher[v_puller] < d_pusher[v_pusher]:
            count, ahead = self._open_neighbors(v_puller, v_pusher)
            if count >= 2:
                return False
            if count <= 0:
                break
            v_pusher, v_puller = v_puller, ahead
        return (d_puller[v_pusher] < d_puller[v_puller]
                and (d_pusher[v_pusher] == 0 or d_pusher[v_puller] < d_pusher[v_pusher]))

    def _swap_possible(self, v_pusher_origin: int, v_puller_origin: int) -> bool:
        v_pusher, v_puller = v_pusher_origin, v_puller_origin
        while v_puller != v_pusher_origin:
            count, ahead = self._open_neighbors(v_puller, v_pusher)
            if count >= 2:
                return True
            if count <= 0:
                return False
            v_pusher, v_puller = v_puller, ahead
        return False
