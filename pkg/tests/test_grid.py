"""Tests for map and scenario parsing and distance tables."""

import math
import random

import numpy as np
import pytest

from lgmapf.errors import MapFormatError, ScenarioError
from lgmapf.solver.grid import (
    NO_VERTEX, DistTable, Grid, Instance, format_path, load_instance, parse_map,
    parse_scenario, serialize_map,
)
from tests.helpers import grid_from_rows, map_text, scen_text, write_instance_files
from tests.oracles import all_pairs_distances


def random_grid(seed, width=8, height=8, density=0.2):
    rng = random.Random(seed)
    rows = [''.join('@' if rng.random() < density else '.' for _ in range(width)) for _ in range(height)]
    return grid_from_rows(*rows)


class TestParseMap:

    def test_two_by_two(self):
        grid = parse_map(map_text('..', '.@'))
        assert grid.size == 3
        assert grid.edges() == {(0, 1), (0, 2)}

    def test_corridor(self):
        grid = parse_map(map_text('....'))
        assert grid.size == 4
        assert len(grid.edges()) == 3

    def test_cell_characters(self):
        grid = parse_map(map_text('.G@T', 'OSW.'))
        assert grid.passable.tolist() == [[True, True, False, False], [False, False, False, True]]

    def test_unknown_character_names_line(self):
        with pytest.raises(MapFormatError) as exc:
            parse_map(map_text('...', '.x.'))
        assert exc.value.line == 6
        assert 'line 6' in str(exc.value)

    def test_wrong_row_length(self):
        with pytest.raises(MapFormatError, match='expected 3 cells'):
            parse_map(map_text('...', '..'))

    def test_missing_rows(self):
        text = 'type octile\nheight 3\nwidth 2\nmap\n..\n..\n'
        with pytest.raises(MapFormatError, match='expected 3 rows'):
            parse_map(text)

    def test_extra_rows(self):
        text = 'type octile\nheight 1\nwidth 2\nmap\n..\n..\n'
        with pytest.raises(MapFormatError, match='extra content'):
            parse_map(text)

    def test_malformed_header(self):
        with pytest.raises(MapFormatError, match='integer height'):
            parse_map('type octile\nheight x\nwidth 2\nmap\n..\n')

    def test_missing_marker(self):
        with pytest.raises(MapFormatError, match="'map' marker"):
            parse_map('type octile\nheight 1\nwidth 2\n')

    def test_no_passable_cells(self):
        with pytest.raises(MapFormatError, match='no passable'):
            parse_map(map_text('@@', '@@'))

    def test_adjacency_symmetric_and_inside(self):
        grid = random_grid(3)
        for v in range(grid.size):
            x, y = grid.coord(v)
            for u in grid.neighbors(v):
                assert v in grid.neighbors(u)
                ux, uy = grid.coord(u)
                assert abs(ux - x) + abs(uy - y) == 1
                assert grid.passable[uy, ux]
        assert grid.size == int(grid.passable.sum())

    def test_serialize_fixed_point(self):
        for seed in range(5):
            grid = random_grid(seed, width=7, height=5)
            if grid.size == 0:
                continue
            again = parse_map(serialize_map(grid))
            assert np.array_equal(again.passable, grid.passable)
            assert serialize_map(again) == serialize_map(grid)


class TestCoordinates:

    def test_x_is_column_y_is_row(self):
        # 3 columns, 2 rows: (2, 0) is passable, (0, 1) blocked
        grid = grid_from_rows('...', '@..')
        assert grid.vertex_at(2, 0) == 2
        assert grid.vertex_at(0, 1) == NO_VERTEX
        assert grid.vertex_at(1, 1) == 3
        assert grid.coord(3) == (1, 1)
        assert grid.vertex_at(3, 0) == NO_VERTEX

    def test_degree(self):
        grid = grid_from_rows('...', '...', '...')
        assert grid.degree(grid.vertex_at(1, 1)) == 4
        assert grid.degree(grid.vertex_at(0, 0)) == 2

    def test_format_path(self):
        grid = grid_from_rows('...', '@..')
        assert format_path(grid, [0, 1, 3]) == '(0,0),(1,0),(1,1)'


class TestParseScenario:

    def test_single_record(self):
        grid = parse_map(map_text('....'))
        instance = parse_scenario(scen_text([(0, 0, 3, 0)]), grid, 1)
        assert instance.n == 1
        assert instance.dist(instance.starts[0], 0) == 3

    def test_first_n_records(self):
        grid = parse_map(map_text('....', '....'))
        records = [(0, 0, 3, 0), (0, 1, 3, 1), (1, 0, 2, 1)]
        instance = parse_scenario(scen_text(records), grid, 2)
        assert instance.starts == (grid.vertex_at(0, 0), grid.vertex_at(0, 1))

    def test_insufficient_records(self):
        grid = parse_map(map_text('....', '....'))
        records = [(0, 0, 3, 0), (0, 1, 3, 1), (1, 0, 2, 1)]
        with pytest.raises(ScenarioError, match='insufficient records: requested 5, found 3'):
            parse_scenario(scen_text(records), grid, 5)

    def test_asymmetric_map_orientation(self):
        # wide map: a transposed reading would put (5, 1) outside it
        grid = parse_map(map_text('......', '......'))
        instance = parse_scenario(scen_text([(5, 1, 0, 0)]), grid, 1)
        assert grid.coord(instance.starts[0]) == (5, 1)

    def test_blocked_start(self):
        grid = parse_map(map_text('.@..'))
        with pytest.raises(ScenarioError, match='not a passable cell'):
            parse_scenario(scen_text([(1, 0, 3, 0)]), grid, 1)

    def test_unreachable_goal(self):
        grid = parse_map(map_text('.@.'))
        with pytest.raises(ScenarioError, match='unreachable'):
            parse_scenario(scen_text([(0, 0, 2, 0)]), grid, 1)

    def test_duplicate_starts(self):
        grid = parse_map(map_text('....'))
        with pytest.raises(ScenarioError, match='share start'):
            parse_scenario(scen_text([(0, 0, 3, 0), (0, 0, 2, 0)]), grid, 2)

    def test_duplicate_goals(self):
        grid = parse_map(map_text('....'))
        with pytest.raises(ScenarioError, match='share goal'):
            parse_scenario(scen_text([(0, 0, 3, 0), (1, 0, 3, 0)]), grid, 2)

    def test_missing_version(self):
        grid = parse_map(map_text('....'))
        with pytest.raises(ScenarioError, match='version'):
            parse_scenario('0\tt.map\t4\t1\t0\t0\t3\t0\t3\n', grid, 1)

    def test_space_separated_fields(self):
        grid = parse_map(map_text('....'))
        instance = parse_scenario('version 1\n0 t.map 4 1 0 0 3 0 3.0\n', grid, 1)
        assert instance.goals == (3,)

    def test_load_instance(self, tmp_path):
        map_path, scen_path = write_instance_files(tmp_path, ['....', '....'], [(0, 0, 3, 1)])
        instance = load_instance(map_path, scen_path, 1)
        assert instance.lower_bound() == 4


class TestDistances:

    def test_identity(self):
        grid = random_grid(1)
        table = DistTable(grid)
        for g in range(0, grid.size, 7):
            assert table.dist(g, g) == 0

    def test_corridor(self):
        table = DistTable(grid_from_rows('....'))
        assert table.dist(0, 3) == 3

    def test_unreachable_is_infinite(self):
        table = DistTable(grid_from_rows('.@.'))
        assert math.isinf(table.dist(0, 1))

    @pytest.mark.parametrize('seed', [0, 1, 2])
    def test_matches_all_pairs_oracle(self, seed):
        grid = random_grid(seed)
        table = DistTable(grid, single_threaded=True)
        oracle = all_pairs_distances(grid)
        for g in range(grid.size):
            for v in range(grid.size):
                expected = oracle[v].get(g, math.inf)
                assert table.dist(v, g) == expected

    def test_bfs_consistency_and_triangle_inequality(self):
        grid = random_grid(4, density=0.1)
        table = DistTable(grid)
        rng = random.Random(0)
        for g in range(grid.size):
            for u, v in grid.edges():
                du, dv = table.dist(u, g), table.dist(v, g)
                if not math.isinf(du):
                    assert abs(du - dv) <= 1
        for _ in range(200):
            a, b, c = (rng.randrange(grid.size) for _ in range(3))
            assert table.dist(a, c) <= table.dist(a, b) + table.dist(b, c)

    def test_tables_built_lazily(self):
        grid = random_grid(5)
        table = DistTable(grid)
        assert len(table) == 0
        table.dist(0, 3)
        table.dist(1, 3)
        assert len(table) == 1
        assert table.table(3) is table.table(3)


class TestInstance:

    def test_lower_bound(self):
        grid = grid_from_rows('....', '....')
        instance = Instance.from_coords(grid, [(0, 0), (3, 1)], [(3, 0), (3, 1)])
        assert instance.lower_bound() == 3

    def test_mismatched_lengths(self):
        grid = grid_from_rows('....')
        with pytest.raises(ScenarioError):
            Instance(grid, (0, 1), (2,))

    def test_invalid_vertex(self):
        grid = grid_from_rows('....')
        with pytest.raises(ScenarioError, match='is not a vertex'):
            Instance(grid, (0,), (9,))

    def test_grid_from_mask_ids_row_major(self):
        grid = Grid.from_mask([[True, False], [True, True]])
        assert grid.coords == ((0, 0), (0, 1), (1, 1))
