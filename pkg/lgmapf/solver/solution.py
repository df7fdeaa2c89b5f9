"""Solutions as sequences of configurations."""

from __future__ import annotations

from dataclasses import dataclass

from lgmapf.solver.grid import Configuration


def travel_times(configs, goals) -> tuple[int, ...]:
    """Per agent, the timestep after which it rests at its goal for good."""
    times = []
    for i, goal in enumerate(goals):
        t = len(configs) - 1
        while t > 0 and configs[t - 1][i] == goal and configs[t][i] == goal:
            t -= 1
        if configs[t][i] != goal:
            t = len(configs)
        times.append(t)
    return tuple(times)


@dataclass(frozen=True)
class Solution:
    """Configurations Q_0..Q_T plus per-agent travel times."""
    configs: tuple[Configuration, ...]
    travel_times: tuple[int, ...]

    @classmethod
    def from_configs(cls, configs, goals) -> Solution:
        configs = tuple(tuple(Q) for Q in configs)
        return cls(configs, travel_times(configs, goals))

    @classmethod
    def from_paths(cls, paths, goals) -> Solution:
        """Build from per-agent vertex paths, padding each with waits at its end."""
        horizon = max(len(p) for p in paths)
        padded = [list(p) + [p[-1]] * (horizon - len(p)) for p in paths]
        return cls.from_configs(zip(*padded), goals)

    @property
    def n(self) -> int:
        return len(self.configs[0])

    @property
    def makespan(self) -> int:
        return len(self.configs) - 1

    @property
    def flowtime(self) -> int:
        """Sum of travel times."""
        return sum(self.travel_times)

    def path(self, i: int) -> list[int]:
        return [Q[i] for Q in self.configs]

    @property
    def paths(self) -> list[list[int]]:
        return [list(p) for p in zip(*self.configs)]

    def __len__(self):
        return len(self.configs)

    def __repr__(self):
        return f'<Solution n={self.n} makespan={self.makespan} flowtime={self.flowtime}>'
