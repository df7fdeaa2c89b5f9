"""Independent solution checker."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation; ``kind`` is None when the solution is valid."""
    kind: str | None = None
    timestep: int | None = None
    agents: tuple[int, ...] = field(default_factory=tuple)
    message: str = 'ok'

    @property
    def ok(self) -> bool:
        return self.kind is None

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {
            'ok': self.ok,
            'kind': self.kind,
            'timestep': self.timestep,
            'agents': list(self.agents),
            'message': self.message,
        }


def validate(instance, solution) -> ValidationReport:
    """Check start, goal, moves and collisions of a solution.

    Reports the first violation found, scanning timesteps in order.
    """
    configs = solution.configs
    grid = instance.grid
    if not configs:
        return ValidationReport('empty', None, (), 'solution has no configurations')
    if any(len(Q) != instance.n for Q in configs):
        return ValidationReport('size', None, (), f'configurations must hold {instance.n} agents')

    for i, (v, s) in enumerate(zip(configs[0], instance.starts)):
        if v != s:
            return ValidationReport('start', 0, (i,), f'agent {i} does not begin at its start')

    for t, Q in enumerate(configs):
        for i, v in enumerate(Q):
            if not 0 <= v < grid.size:
                return ValidationReport('vertex', t, (i,), f'agent {i} at invalid vertex {v} at t={t}')
        seen = {}
        for i, v in enumerate(Q):
            if v in seen:
                return ValidationReport(
                    'vertex-collision', t, (seen[v], i),
                    f'agents {seen[v]} and {i} both at {grid.coord(v)} at t={t}',
                )
            seen[v] = i
        if t == 0:
            continue

        prev = configs[t - 1]
        for i, (u, v) in enumerate(zip(prev, Q)):
            if u != v and v not in grid.adjacency[u]:
                return ValidationReport(
                    'jump', t, (i,),
                    f'agent {i} jumps from {grid.coord(u)} to {grid.coord(v)} at t={t}',
                )
        where = {u: i for i, u in enumerate(prev)}
        for i, (u, v) in enumerate(zip(prev, Q)):
            j = where.get(v)
            if u != v and j is not None and j != i and Q[j] == u:
                return ValidationReport(
                    'edge-swap', t, (min(i, j), max(i, j)),
                    f'agents {i} and {j} swap between t={t - 1} and t={t}',
                )

    for i, (v, g) in enumerate(zip(configs[-1], instance.goals)):
        if v != g:
            return ValidationReport('goal', len(configs) - 1, (i,), f'agent {i} does not end at its goal')
    return ValidationReport()
