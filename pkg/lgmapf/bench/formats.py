"""Result files: solutions, heatmaps, LNS traces and the results table."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from lgmapf.bench.metrics import heatmap_grid, visit_histogram
from lgmapf.errors import ScenarioError
from lgmapf.solver.grid import Instance, format_path
from lgmapf.solver.solution import Solution

RESULT_COLUMNS = (
    'map', 'scen', 'n', 'mode', 'w', 'alpha', 'seed',
    'solved', 'flowtime', 'lb', 'ratio', 'runtime_ms',
)


def solution_to_dict(instance: Instance, solution: Solution, map_name: str = '', seed: int = 0):
    grid = instance.grid
    return {
        'map': map_name,
        'n': solution.n,
        'seed': seed,
        'flowtime': solution.flowtime,
        'paths': [[list(grid.coord(v)) for v in path] for path in solution.paths],
    }


def solution_from_dict(data, instance: Instance) -> Solution:
    """Rebuild a solution from (x, y) paths; off-map cells become invalid vertices."""
    paths = data.get('paths') if isinstance(data, dict) else None
    if not paths or not all(isinstance(p, list) and p for p in paths):
        raise ScenarioError('solution must contain a non-empty path per agent')
    if len(paths) != instance.n:
        raise ScenarioError(f'solution has {len(paths)} paths for {instance.n} agents')
    grid = instance.grid
    try:
        vertex_paths = [[grid.vertex_at(int(x), int(y)) for x, y in path] for path in paths]
    except (TypeError, ValueError):
        raise ScenarioError('paths must be lists of [x, y] pairs') from None
    return Solution.from_paths(vertex_paths, instance.goals)


def write_solution_json(path, instance: Instance, solution: Solution, map_name: str = '', seed: int = 0):
    data = solution_to_dict(instance, solution, map_name, seed)
    Path(path).write_text(json.dumps(data, indent=1) + '\n')


def load_solution_data(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f'{path}: not valid JSON ({e.msg})') from None
    if not isinstance(data, dict):
        raise ScenarioError(f'{path}: expected a JSON object')
    return data


def read_solution_json(path, instance: Instance) -> Solution:
    return solution_from_dict(load_solution_data(path), instance)


def write_solution_text(path, instance: Instance, solution: Solution):
    """One `agent_id:(x,y),(x,y),...` line per agent."""
    grid = instance.grid
    with open(path, 'w') as fh:
        for i, p in enumerate(solution.paths):
            fh.write(f'{i}:{format_path(grid, p)}\n')


def write_heatmap(prefix, instance: Instance, visits: np.ndarray):
    """Write `<prefix>_visits.csv` and `<prefix>_histogram.csv`."""
    np.savetxt(f'{prefix}_visits.csv', heatmap_grid(instance, visits), fmt='%d', delimiter=',')
    with open(f'{prefix}_histogram.csv', 'w', newline='') as fh:
        writer = csv.writer(fh)
        writer.writerow(['visits', 'frequency'])
        writer.writerows(visit_histogram(visits))


def write_trace(path, trace, elapsed: bool = True):
    """LNS improvements; without ``elapsed`` the file depends on the seed alone."""
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh)
        if elapsed:
            writer.writerow(['proposal', 'elapsed_ms', 'flowtime'])
            writer.writerows([r.proposal, f'{r.elapsed_ms:.3f}', r.flowtime] for r in trace)
        else:
            writer.writerow(['proposal', 'flowtime'])
            writer.writerows([r.proposal, r.flowtime] for r in trace)


def format_row(row: dict) -> dict:
    """CSV cell text for a result row."""
    ratio = row['ratio']
    return {
        **row,
        'alpha': f"{row['alpha']:g}",
        'solved': 'true' if row['solved'] else 'false',
        'flowtime': '' if row['flowtime'] is None else row['flowtime'],
        'ratio': '' if ratio is None else f'{ratio:.6f}',
        'runtime_ms': f"{row['runtime_ms']:.3f}",
    }


def results_csv(rows) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=RESULT_COLUMNS, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(format_row(row))
    return buffer.getvalue()


def write_results(path, rows):
    Path(path).write_text(results_csv(rows))
