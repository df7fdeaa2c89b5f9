"""LaCAM: depth-first search over configurations with lazy successor generation.

Each high-level node stores a configuration and a queue of low-level
constraint lists. Popping a constraint list yields one successor through
PIBT and enqueues its extensions by the next agent in the node's order, so
every successor configuration is eventually reachable and the search stays
complete. Guidance is attached to each node when it is created.
"""

from __future__ import annotations

from collections import deque
from contextlib import nullcontext
from dataclasses import dataclass, field, fields
from enum import Enum

import numpy as np
from loguru import logger

from lgmapf.errors import SolveTimeout, Unsolvable
from lgmapf.solver.global_guidance import GlobalGuidance, build_suo
from lgmapf.solver.grid import Configuration, Instance, format_path
from lgmapf.solver.local_guidance import Guidance, GuidanceParams, GuidancePlanner, init_guidance
from lgmapf.solver.pibt import PIBT, PriorityState
from lgmapf.solver.solution import Solution
from lgmapf.utils.timing import Deadline


class GuidanceMode(str, Enum):
    """Which guidance feeds the PIBT preference."""
    NONE = 'none'
    GLOBAL = 'global'
    LOCAL = 'local'
    BOTH = 'both'

    @property
    def uses_local(self) -> bool:
        return self in (GuidanceMode.LOCAL, GuidanceMode.BOTH)

    @property
    def uses_global(self) -> bool:
        return self in (GuidanceMode.GLOBAL, GuidanceMode.BOTH)


@dataclass(frozen=True)
class SolverOptions:
    """Search and guidance settings."""
    guidance: GuidanceMode = GuidanceMode.NONE
    window: int = 20
    alpha: float = 3.0
    iterations: int = 1
    initial_iterations: int = 2
    guidance_interval: int = 1
    goal_wait_cost: float = 0.0
    sort_agents: bool = True
    guidance_cache: bool = True
    swap: bool = True
    seed: int = 0
    time_limit_ms: int | None = 30000
    max_nodes: int | None = None
    suo_passes: int = 2
    suo_beta: float = 0.5
    dump_guidance: str | None = None

    def __post_init__(self):
        object.__setattr__(self, 'guidance', GuidanceMode(self.guidance))
        if self.guidance_interval < 1:
            raise ValueError('guidance_interval must be at least 1')
        if self.suo_passes < 0 or self.suo_beta < 0:
            raise ValueError('suo_passes and suo_beta must be non-negative')
        object.__setattr__(self, '_params', GuidanceParams(
            window=self.window,
            alpha=self.alpha,
            iterations=self.iterations,
            initial_iterations=self.initial_iterations,
            use_global=self.guidance is GuidanceMode.BOTH,
            goal_wait_cost=self.goal_wait_cost,
            sort_agents=self.sort_agents,
            cache=self.guidance_cache,
        ))

    # configuration keys, see lgmapf.config
    _config_keys = {
        'TIME_LIMIT_MS': 'time_limit_ms',
        'MAX_NODES': 'max_nodes',
        'GUIDANCE_WINDOW': 'window',
        'GUIDANCE_ALPHA': 'alpha',
        'GUIDANCE_ITERATIONS': 'iterations',
        'GUIDANCE_INITIAL_ITERATIONS': 'initial_iterations',
        'GUIDANCE_GOAL_WAIT_COST': 'goal_wait_cost',
        'SUO_PASSES': 'suo_passes',
        'SUO_BETA': 'suo_beta',
    }

    @classmethod
    def from_config(cls, config, **overrides) -> SolverOptions:
        """Options from a configuration mapping, then explicit overrides."""
        values = {attr: config[key] for key, attr in cls._config_keys.items() if key in config}
        names = {f.name for f in fields(cls)}
        values.update({k: v for k, v in overrides.items() if k in names and v is not None})
        return cls(**values)

    @property
    def guidance_params(self) -> GuidanceParams:
        return self._params


@dataclass(eq=False)
class LowLevelNode:
    """Constraints on a prefix of the node's agent order."""
    who: tuple[int, ...] = ()
    where: tuple[int, ...] = ()

    @property
    def depth(self) -> int:
        return len(self.who)

    @property
    def constraints(self):
        return zip(self.who, self.where)

    def child(self, i: int, v: int) -> LowLevelNode:
        return LowLevelNode(self.who + (i,), self.where + (v,))


@dataclass(eq=False)
class HighLevelNode:
    """A configuration in the search together with its lazy successor state."""
    config: Configuration
    priorities: PriorityState
    parent: HighLevelNode | None = None
    guidance: Guidance | None = None
    hints: list | None = None
    depth: int = 0
    tree: deque = field(default_factory=lambda: deque([LowLevelNode()]))
    order: list[int] = field(init=False)

    def __post_init__(self):
        self.order = self.priorities.order

    def __repr__(self):
        return f'<HighLevelNode depth={self.depth}>'


def extract_solution(node: HighLevelNode, instance: Instance) -> Solution:
    """Follow parent links from a goal node back to the start."""
    configs = []
    while node is not None:
        configs.append(node.config)
        node = node.parent
    configs.reverse()
    return Solution.from_configs(configs, instance.goals)


class LaCAM:
    """LaCAM solver with optional local and global guidance.

    Statistics of the last run are kept on the solver: ``nodes_generated``,
    ``guidance_builds``, ``expansions`` and ``elapsed_ms``.
    """

    def __init__(self, options: SolverOptions | None = None):
        self.options = options or SolverOptions()
        self.nodes_generated = 0
        self.guidance_builds = 0
        self.expansions = 0
        self.elapsed_ms = 0.0
        self.global_guidance: GlobalGuidance | None = None

    def solve(self, instance: Instance, deadline: Deadline | None = None) -> Solution:
        """Search for a solution; raises SolveTimeout or Unsolvable on failure."""
        options = self.options
        deadline = deadline if deadline is not None else Deadline(options.time_limit_ms)
        self.nodes_generated = 0
        self.guidance_builds = 0

        self._instance = instance
        self._pibt = PIBT(instance, np.random.default_rng(options.seed), swap=options.swap)
        self.global_guidance = None
        if options.guidance.uses_global:
            self.global_guidance = build_suo(instance, options.suo_passes, options.suo_beta)
        self._planner = None
        if options.guidance.uses_local:
            self._planner = GuidancePlanner(instance, options.guidance_params, self.global_guidance)

        dump = open(options.dump_guidance, 'w') if options.dump_guidance else nullcontext()
        with dump as self._dump:
            if self._dump is not None and self.global_guidance is not None:
                self.global_guidance.dump(self._dump)
            try:
                return self._search(instance, deadline)
            finally:
                self.elapsed_ms = deadline.elapsed
                if self._planner is not None:
                    self.expansions = self._planner.expansions

    def _search(self, instance: Instance, deadline: Deadline) -> Solution:
        n = instance.n
        goals = instance.goals
        max_nodes = self.options.max_nodes
        pibt = self._pibt

        root = self._create_node(instance.starts, None)
        stack = [root]
        explored = {root.config: root}
        logger.debug('search started, n={} |V|={}', n, instance.grid.size)

        while stack:
            if deadline.is_expired:
                logger.info('timeout after {:.0f}ms, {} nodes', deadline.elapsed, len(explored))
                raise SolveTimeout(f'no solution within {deadline.time_limit_ms}ms')

            node = stack[-1]
            if node.config == goals:
                solution = extract_solution(node, instance)
                logger.info('solved in {:.0f}ms, {} nodes, flowtime {}',
                            deadline.elapsed, len(explored), solution.flowtime)
                return solution

            if not node.tree:
                stack.pop()
                continue

            low = node.tree.popleft()
            if low.depth < n:
                i = node.order[low.depth]
                for v in pibt.build_preference(i, node.config, node.hints):
                    node.tree.append(low.child(i, v))

            Q_to = pibt.step(node.config, node.order, low.constraints, node.hints)
            if Q_to is None:
                continue

            known = explored.get(Q_to)
            if known is not None:
                stack.append(known)
                continue

            if max_nodes is not None and len(explored) >= max_nodes:
                logger.info('node budget of {} exhausted', max_nodes)
                raise SolveTimeout(f'node budget of {max_nodes} exhausted')
            child = self._create_node(Q_to, node)
            explored[Q_to] = child
            stack.append(child)

        logger.info('no solution, {} configurations explored', len(explored))
        raise Unsolvable(f'all {len(explored)} reachable configurations explored')

    def _create_node(self, Q: Configuration, parent: HighLevelNode | None) -> HighLevelNode:
        instance = self._instance
        if parent is None:
            priorities = PriorityState.initial(instance)
            depth = 0
        else:
            priorities = parent.priorities.advance(Q, instance.goals)
            depth = parent.depth + 1

        guidance = None
        hints = None
        if self._planner is not None:
            prev = parent.guidance if parent is not None else None
            if prev is None or depth % self.options.guidance_interval == 0:
                guidance = self._planner.build(Q, prev)
                self.guidance_builds += 1
                self._dump_guidance(guidance)
            else:
                guidance = init_guidance(Q, prev)
            hints = guidance.hints()
        elif self.global_guidance is not None:
            hints = self.global_guidance.hints(Q)

        self.nodes_generated += 1
        return HighLevelNode(Q, priorities, parent, guidance, hints, depth)

    def _dump_guidance(self, guidance: Guidance):
        if self._dump is None:
            return
        grid = self._instance.grid
        for i, path in enumerate(guidance.paths):
            self._dump.write(f'{self.guidance_builds}\t{i}:{format_path(grid, path)}\n')


def solve(instance: Instance, options: SolverOptions | None = None,
          deadline: Deadline | None = None) -> Solution:
    """Solve with a fresh LaCAM solver."""
    return LaCAM(options).solve(instance, deadline)
