"""Brute-force reference implementations used as test oracles."""

import heapq
import itertools
from collections import deque

import networkx as nx

from lgmapf.solver.local_guidance import count_collisions


def to_networkx(grid):
    graph = nx.Graph()
    graph.add_nodes_from(range(grid.size))
    graph.add_edges_from(grid.edges())
    return graph


def all_pairs_distances(grid):
    return dict(nx.all_pairs_shortest_path_length(to_networkx(grid)))


def multi_source_distances(grid, sources):
    return nx.multi_source_dijkstra_path_length(to_networkx(grid), set(sources))


def is_valid_step(Q, Q_to):
    """No shared vertex and no exchanged pair between Q and Q_to."""
    if len(set(Q_to)) != len(Q_to):
        return False
    for i, j in itertools.combinations(range(len(Q)), 2):
        if Q[i] != Q_to[i] and Q_to[i] == Q[j] and Q_to[j] == Q[i]:
            return False
    return True


def successors(grid, Q):
    """Every valid configuration one synchronous step away from Q."""
    options = [(*grid.adjacency[v], v) for v in Q]
    return {Q_to for Q_to in itertools.product(*options) if is_valid_step(Q, Q_to)}


def is_solvable(instance):
    """Breadth-first search over joint configurations."""
    start, goal = instance.starts, instance.goals
    seen = {start}
    queue = deque([start])
    while queue:
        Q = queue.popleft()
        if Q == goal:
            return True
        for nxt in successors(instance.grid, Q):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def optimal_flowtime(instance):
    """Minimum flowtime by Dijkstra over (configuration, agents committed to rest).

    An agent on its goal may commit to resting there for good; every step
    costs the number of agents not yet committed.
    """
    n = instance.n
    goals = instance.goals
    full = (1 << n) - 1
    start = (instance.starts, 0)
    best = {start: 0}
    counter = itertools.count()
    heap = [(0, next(counter), start)]

    def push(state, cost):
        if cost < best.get(state, float('inf')):
            best[state] = cost
            heapq.heappush(heap, (cost, next(counter), state))

    while heap:
        cost, _, state = heapq.heappop(heap)
        if cost > best[state]:
            continue
        Q, done = state
        if done == full:
            return cost
        for i in range(n):
            if not done >> i & 1 and Q[i] == goals[i]:
                push((Q, done | 1 << i), cost)
        step_cost = n - bin(done).count('1')
        for Q_to in successors(instance.grid, Q):
            if any(done >> i & 1 and Q_to[i] != Q[i] for i in range(n)):
                continue
            push((Q_to, done), cost + step_cost)
    return None


def windowed_paths(grid, start, window):
    """All walks of window + 1 vertices from start, waits included."""
    paths = [(start,)]
    for _ in range(window):
        paths = [p + (u,) for p in paths for u in (*grid.adjacency[p[-1]], p[-1])]
    return paths


def windowed_cost(path, i, guidance, instance, alpha, delta=None, goal_wait_cost=0.0):
    """Total lexicographic cost of a windowed path, stage by stage.

    A wait on the agent's own goal costs ``goal_wait_cost`` instead of one.
    """
    goal = instance.goals[i]
    primary = 0.0
    delta_sum = 0
    chi_sum = 0
    for t in range(len(path) - 1):
        chi = count_collisions(path[t], path[t + 1], t, guidance, i)
        step = goal_wait_cost if path[t] == path[t + 1] == goal else 1
        primary += step + (alpha if chi > 0 else 0)
        chi_sum += chi
        if delta is not None:
            delta_sum += delta[path[t + 1]]
    primary += instance.dist(path[-1], i)
    if delta is None:
        return (primary, chi_sum)
    return (primary, delta_sum, chi_sum)


def best_windowed_cost(i, Q, guidance, instance, params, global_guidance=None):
    """Exhaustive minimum of windowed_cost over every windowed path of agent i."""
    delta = None
    if params.use_global and global_guidance is not None:
        delta = global_guidance.delta_table(i)
    return min(
        windowed_cost(path, i, guidance, instance, params.alpha, delta, params.goal_wait_cost)
        for path in windowed_paths(instance.grid, Q[i], params.window)
    )


def guidance_collisions(guidance):
    """Conflicts over all agents' windowed paths, each agent counted against the rest."""
    total = 0
    for i, path in enumerate(guidance.paths):
        for t in range(len(path) - 1):
            total += count_collisions(path[t], path[t + 1], t, guidance, i)
    return total
