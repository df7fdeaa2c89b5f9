"""Tests for SUO global guidance."""

import io
import random

import numpy as np

from lgmapf.solver.global_guidance import (
    GlobalGuidance, build_suo, least_congested_path, shortest_path,
)
from tests.helpers import make_instance
from tests.oracles import multi_source_distances

SPLIT_ROWS = ['.......', '..@@@..', '.......']


def random_open_instance(seed, n, width=10, height=10):
    rng = random.Random(seed)
    cells = [(x, y) for y in range(height) for x in range(width)]
    return make_instance(['.' * width] * height, rng.sample(cells, n), rng.sample(cells, n))


class TestPaths:

    def test_single_agent_shortest(self):
        instance = make_instance(SPLIT_ROWS, [(0, 1)], [(6, 1)])
        guidance = build_suo(instance)
        path = guidance.paths[0]
        assert len(path) - 1 == instance.dist(instance.starts[0], 0)
        assert path[0] == instance.starts[0]
        assert path[-1] == instance.goals[0]

    def test_shortest_path_descends(self):
        instance = make_instance(['....', '.@..'], [(0, 1)], [(3, 1)])
        path = shortest_path(instance, 0)
        dists = [instance.dist(v, 0) for v in path]
        assert dists == list(range(dists[0], -1, -1))

    def test_congestion_splits_agents(self):
        instance = make_instance(SPLIT_ROWS, [(0, 1), (1, 1)], [(6, 1), (5, 1)])
        guidance = build_suo(instance, passes=2, beta=0.5)
        grid = instance.grid
        middle = [{v for v in path if 2 <= grid.coord(v)[0] <= 4} for path in guidance.paths]
        assert middle[0] and middle[1]
        assert not middle[0] & middle[1]

    def test_zero_beta_keeps_shortest_lengths(self):
        instance = random_open_instance(0, n=12)
        guidance = build_suo(instance, passes=2, beta=0.0)
        for i, path in enumerate(guidance.paths):
            assert len(path) - 1 == instance.dist(instance.starts[i], i)

    def test_weighted_path_is_connected(self):
        instance = random_open_instance(1, n=5)
        usage = np.random.default_rng(0).integers(0, 4, instance.grid.size).tolist()
        for i in range(instance.n):
            path = least_congested_path(instance, i, usage, beta=1.0)
            assert path[0] == instance.starts[i]
            assert path[-1] == instance.goals[i]
            for u, v in zip(path, path[1:]):
                assert v in instance.grid.adjacency[u]

    def test_reduces_overlap(self):
        improved = 0
        trials = 20
        for seed in range(trials):
            instance = random_open_instance(seed, n=30)
            baseline = GlobalGuidance(instance, [shortest_path(instance, i) for i in range(instance.n)])
            if build_suo(instance, passes=2, beta=0.5).overlap() <= baseline.overlap():
                improved += 1
        assert improved >= 0.95 * trials


class TestHints:

    def test_next_vertex(self):
        instance = make_instance(['....'], [(0, 0)], [(3, 0)])
        guidance = GlobalGuidance(instance, [[0, 1, 2, 3]])
        assert guidance.hints((1,)) == [2]
        assert guidance.next_vertex(0, 3) is None


class TestDelta:

    def setup_method(self):
        self.instance = make_instance(['.....', '.....', '.....'], [(0, 0)], [(4, 0)])
        self.guidance = GlobalGuidance(self.instance, [shortest_path(self.instance, 0)])

    def test_zero_on_path(self):
        for v in self.guidance.paths[0]:
            assert self.guidance.delta(0, v) == 0

    def test_one_next_to_path(self):
        grid = self.instance.grid
        assert self.guidance.delta(0, grid.vertex_at(2, 1)) == 1
        assert self.guidance.delta(0, grid.vertex_at(2, 2)) == 2

    def test_matches_multi_source_oracle(self):
        instance = random_open_instance(3, n=6)
        guidance = build_suo(instance)
        for i, path in enumerate(guidance.paths):
            oracle = multi_source_distances(instance.grid, path)
            assert guidance.delta_table(i) == [oracle[v] for v in range(instance.grid.size)]

    def test_lipschitz_over_edges(self):
        instance = random_open_instance(4, n=6)
        guidance = build_suo(instance)
        for i in range(instance.n):
            table = guidance.delta_table(i)
            for u, v in instance.grid.edges():
                assert abs(table[u] - table[v]) <= 1

    def test_table_cached(self):
        assert self.guidance.delta_table(0) is self.guidance.delta_table(0)


class TestDump:

    def test_format(self):
        instance = make_instance(['...'], [(0, 0)], [(2, 0)])
        guidance = GlobalGuidance(instance, [[0, 1, 2]])
        fh = io.StringIO()
        guidance.dump(fh)
        assert fh.getvalue() == 'global\t0:(0,0),(1,0),(2,0)\n'
