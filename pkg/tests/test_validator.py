"""Tests for the solution validator."""

import pytest

from lgmapf.bench.validator import validate
from lgmapf.solver.lacam import SolverOptions, solve
from lgmapf.solver.solution import Solution
from tests.helpers import make_instance


def corridor(length, starts, goals):
    return make_instance(['.' * length], [(x, 0) for x in starts], [(x, 0) for x in goals])


def from_configs(instance, configs):
    return Solution.from_configs(configs, instance.goals)


class TestValidate:

    def test_valid(self):
        instance = corridor(4, [0], [3])
        report = validate(instance, from_configs(instance, [(0,), (1,), (2,), (3,)]))
        assert report
        assert report.to_dict() == {'ok': True, 'kind': None, 'timestep': None, 'agents': [], 'message': 'ok'}

    def test_vertex_collision(self):
        instance = corridor(6, [0, 5], [5, 0])
        report = validate(instance, from_configs(instance, [(0, 5), (1, 4), (2, 3), (3, 3)]))
        assert not report
        assert (report.kind, report.timestep, report.agents) == ('vertex-collision', 3, (0, 1))

    def test_edge_swap(self):
        instance = corridor(4, [0, 3], [3, 0])
        report = validate(instance, from_configs(instance, [(0, 3), (1, 2), (2, 1)]))
        assert (report.kind, report.timestep, report.agents) == ('edge-swap', 2, (0, 1))

    def test_jump(self):
        instance = corridor(4, [0], [2])
        report = validate(instance, from_configs(instance, [(0,), (2,)]))
        assert (report.kind, report.timestep, report.agents) == ('jump', 1, (0,))

    def test_wrong_start(self):
        instance = corridor(4, [0], [2])
        report = validate(instance, from_configs(instance, [(1,), (2,)]))
        assert (report.kind, report.timestep) == ('start', 0)

    def test_wrong_goal(self):
        instance = corridor(4, [0], [3])
        report = validate(instance, from_configs(instance, [(0,), (1,), (2,)]))
        assert (report.kind, report.timestep, report.agents) == ('goal', 2, (0,))

    def test_invalid_vertex(self):
        instance = corridor(4, [0], [3])
        report = validate(instance, from_configs(instance, [(0,), (-1,), (3,)]))
        assert report.kind == 'vertex'

    def test_wrong_agent_count(self):
        instance = corridor(4, [0, 3], [3, 0])
        assert validate(instance, Solution(((0,), (1,)), (1,))).kind == 'size'

    def test_empty(self):
        instance = corridor(4, [0], [3])
        assert validate(instance, Solution((), ())).kind == 'empty'

    def test_rotation_is_allowed(self):
        # 2x2 cycle: everyone moves one step around the square
        instance = make_instance(['..', '..'], [(0, 0), (1, 0), (1, 1), (0, 1)],
                                 [(1, 0), (1, 1), (0, 1), (0, 0)])
        assert validate(instance, from_configs(instance, [(0, 1, 3, 2), (1, 3, 2, 0)]))

    def test_first_violation_reported(self):
        instance = corridor(6, [0, 5], [5, 0])
        configs = [(0, 5), (2, 4), (3, 3)]
        report = validate(instance, from_configs(instance, configs))
        assert report.kind == 'jump'
        assert report.timestep == 1


class TestSolverOutput:

    @pytest.mark.parametrize('mode', ['none', 'global', 'local', 'both'])
    def test_solutions_pass(self, mode):
        instance = make_instance(
            ['......', '.@@.@.', '......', '.@....'],
            [(0, 0), (5, 0), (0, 2), (5, 3), (3, 1)],
            [(5, 3), (0, 2), (5, 0), (0, 0), (2, 3)],
        )
        solution = solve(instance, SolverOptions(guidance=mode, window=5, time_limit_ms=None))
        assert validate(instance, solution)
