"""Benchmark matrix runner.

Every (scenario, agent count, guidance mode) cell of the matrix is solved
under the time limit, validated, measured and written as one results row.
Solver failures become unsolved rows; only configuration and parse errors
stop a run.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

from loguru import logger

from lgmapf.bench.formats import (
    write_heatmap, write_results, write_solution_json, write_solution_text, write_trace,
)
from lgmapf.bench.metrics import compute_metrics
from lgmapf.bench.validator import validate
from lgmapf.errors import SolveFailure
from lgmapf.solver.anytime import refine
from lgmapf.solver.grid import DistTable, Instance, parse_map, parse_scenario
from lgmapf.solver.lacam import GuidanceMode, LaCAM, SolverOptions
from lgmapf.utils.log import setup_logging
from lgmapf.utils.timing import Deadline


@dataclass
class RunConfig:
    """One benchmark matrix: instances times agent counts times guidance modes."""
    map_path: str
    scen_paths: list[str]
    agents: list[int]
    modes: list[GuidanceMode] = field(default_factory=lambda: [GuidanceMode.NONE])
    options: SolverOptions = field(default_factory=SolverOptions)
    anytime: bool = False
    workers: int = 1
    lns_proposals: int | None = None
    lns_max_subset: int = 30
    jobs: int = 1
    out: str | None = None
    solution: str | None = None
    heatmap: str | None = None
    trace: str | None = None
    trace_elapsed: bool = True
    record: bool = False
    log_level: str = 'INFO'

    def __post_init__(self):
        self.modes = [GuidanceMode(m) for m in self.modes]
        if not self.scen_paths:
            raise ValueError('at least one scenario is required')
        if not self.agents or any(n < 1 for n in self.agents):
            raise ValueError('agent counts must be positive')
        if self.options.time_limit_ms is None or self.options.time_limit_ms <= 0:
            raise ValueError('time limit must be positive')
        if self.jobs < 1 or self.workers < 1:
            raise ValueError('jobs and workers must be at least 1')


@dataclass(frozen=True)
class Task:
    """A single matrix cell, self-contained so it can cross process boundaries."""
    map_name: str
    map_text: str
    scen_index: int
    scen_text: str
    n: int
    options: SolverOptions
    anytime: bool
    workers: int
    lns_proposals: int | None
    lns_max_subset: int
    solution: str | None = None
    heatmap: str | None = None
    trace: str | None = None
    trace_elapsed: bool = True


@lru_cache(maxsize=8)
def _grid_and_table(map_text: str):
    grid = parse_map(map_text)
    return grid, DistTable(grid)


@lru_cache(maxsize=64)
def load_task_instance(map_text: str, scen_text: str, n: int) -> Instance:
    """Parse an instance, sharing the grid and distance tables across agent counts."""
    grid, table = _grid_and_table(map_text)
    return parse_scenario(scen_text, grid, n, dist_table=table)


def _tagged(path: str | None, tag: str, single: bool) -> str | None:
    """Insert the matrix cell tag before the suffix unless the matrix has one cell."""
    if path is None or single:
        return path
    p = Path(path)
    return str(p.with_name(f'{p.stem}.{tag}{p.suffix}'))


def build_tasks(config: RunConfig) -> list[Task]:
    """Read the files and check every instance before anything is solved."""
    map_text = Path(config.map_path).read_text()
    scen_texts = [Path(p).read_text() for p in config.scen_paths]
    for scen_text in scen_texts:
        for n in config.agents:
            load_task_instance(map_text, scen_text, n)

    single = len(scen_texts) * len(config.agents) * len(config.modes) == 1
    tasks = []
    for scen_index, scen_text in enumerate(scen_texts):
        for n in config.agents:
            for mode in config.modes:
                tag = f'scen{scen_index}.n{n}.{mode.value}'
                heatmap = config.heatmap if single or config.heatmap is None else f'{config.heatmap}.{tag}'
                options = replace(
                    config.options,
                    guidance=mode,
                    dump_guidance=_tagged(config.options.dump_guidance, tag, single),
                )
                tasks.append(Task(
                    map_name=Path(config.map_path).name,
                    map_text=map_text,
                    scen_index=scen_index,
                    scen_text=scen_text,
                    n=n,
                    options=options,
                    anytime=config.anytime,
                    workers=config.workers,
                    lns_proposals=config.lns_proposals,
                    lns_max_subset=config.lns_max_subset,
                    solution=_tagged(config.solution, tag, single),
                    heatmap=heatmap,
                    trace=_tagged(config.trace, tag, single),
                    trace_elapsed=config.trace_elapsed,
                ))
    return tasks


def run_task(task: Task) -> dict:
    """Solve, validate and measure one matrix cell; returns its results row."""
    instance = load_task_instance(task.map_text, task.scen_text, task.n)
    options = task.options
    row = {
        'map': task.map_name,
        'scen': task.scen_index,
        'n': task.n,
        'mode': options.guidance.value,
        'w': options.window,
        'alpha': options.alpha,
        'seed': options.seed,
    }

    trace = [] if task.anytime else None
    deadline = Deadline(options.time_limit_ms)
    solution = None
    try:
        solution = LaCAM(options).solve(instance, deadline)
        if task.anytime:
            solution = refine(
                solution, instance, deadline,
                workers=task.workers, seed=options.seed,
                max_proposals=task.lns_proposals, max_subset=task.lns_max_subset, trace=trace,
            )
    except SolveFailure as e:
        logger.warning('{} scen {} n={} {}: {}', task.map_name, task.scen_index, task.n,
                       options.guidance.value, e)
    runtime_ms = deadline.elapsed

    if solution is not None:
        report = validate(instance, solution)
        if not report:
            logger.error('invalid solution for {} scen {} n={}: {}',
                         task.map_name, task.scen_index, task.n, report.message)
            solution = None

    metrics = compute_metrics(instance, solution, runtime_ms)
    row.update(
        solved=metrics.solved,
        flowtime=metrics.flowtime,
        lb=metrics.lower_bound,
        ratio=metrics.ratio,
        runtime_ms=metrics.runtime_ms,
    )

    if solution is not None:
        if task.solution:
            if task.solution.endswith('.json'):
                write_solution_json(task.solution, instance, solution, task.map_name, options.seed)
            else:
                write_solution_text(task.solution, instance, solution)
        if task.heatmap:
            write_heatmap(task.heatmap, instance, metrics.visits)
    if task.trace and trace is not None:
        write_trace(task.trace, trace, task.trace_elapsed)
    return row


def run_benchmark(config: RunConfig, app=None) -> list[dict]:
    """Run the matrix and write the results table; rows are kept in matrix order."""
    tasks = build_tasks(config)
    logger.info('running {} instance(s) with {} job(s)', len(tasks), config.jobs)

    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs, initializer=setup_logging,
                                 initargs=(config.log_level,)) as pool:
            rows = list(pool.map(run_task, tasks))
    else:
        rows = [run_task(task) for task in tasks]

    if config.out:
        Path(config.out).parent.mkdir(parents=True, exist_ok=True)
        write_results(config.out, rows)
        logger.info('wrote {} rows to {}', len(rows), config.out)
    if config.record:
        record_rows(rows, app)
    return rows


def record_rows(rows, app=None):
    """Store result rows as BenchmarkRun records."""
    from lgmapf import create_app
    from lgmapf.extensions import db
    from lgmapf.models import BenchmarkRun

    app = app or create_app()
    with app.app_context():
        for row in rows:
            db.session.add(BenchmarkRun.from_row(row))
        db.session.commit()
    logger.info('recorded {} rows', len(rows))
