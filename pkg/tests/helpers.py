"""Instance builders shared by the tests."""

from lgmapf.solver.grid import Grid, Instance


def grid_from_rows(*rows):
    """Grid from map rows using '.' for passable and '@' for blocked cells."""
    return Grid.from_mask([[ch != '@' for ch in row] for row in rows])


def make_instance(rows, starts, goals, **kwargs):
    """Instance from map rows and (x, y) starts and goals."""
    return Instance.from_coords(grid_from_rows(*rows), starts, goals, **kwargs)


def map_text(*rows):
    header = ['type octile', f'height {len(rows)}', f'width {len(rows[0])}', 'map']
    return '\n'.join(header + list(rows)) + '\n'


def scen_text(records, map_name='test.map', width=0, height=0):
    """Scenario text from (sx, sy, gx, gy) records."""
    lines = ['version 1']
    for sx, sy, gx, gy in records:
        lines.append(f'0\t{map_name}\t{width}\t{height}\t{sx}\t{sy}\t{gx}\t{gy}\t0')
    return '\n'.join(lines) + '\n'


def write_instance_files(tmp_path, rows, records, name='test'):
    """Write a .map and a .scen file; returns their paths as strings."""
    map_path = tmp_path / f'{name}.map'
    scen_path = tmp_path / f'{name}.scen'
    map_path.write_text(map_text(*rows))
    scen_path.write_text(scen_text(records, f'{name}.map', len(rows[0]), len(rows)))
    return str(map_path), str(scen_path)
