"""Benchmark command line: solve matrices, validate solution files, export metrics."""

import json

import click
from flask import Config
from loguru import logger

from lgmapf.bench.formats import load_solution_data, results_csv, solution_from_dict
from lgmapf.bench.runner import RunConfig, run_benchmark
from lgmapf.bench.validator import validate
from lgmapf.config import config as configs
from lgmapf.errors import MAPFError
from lgmapf.solver.grid import load_instance
from lgmapf.solver.lacam import GuidanceMode, SolverOptions
from lgmapf.utils.log import setup_logging


def _parse_agents(ctx, param, value):
    if value is None:
        return None
    try:
        agents = [int(part) for part in value.split(',') if part.strip()]
    except ValueError:
        raise click.BadParameter('expected N or a comma-separated list N,N,...') from None
    if not agents or any(n < 1 for n in agents):
        raise click.BadParameter('agent counts must be positive')
    return agents


def load_settings(name):
    """Configuration class ``name`` as a mapping."""
    settings = Config('.')
    settings.from_object(configs[name])
    return settings


@click.command('bench')
@click.option('--map', 'map_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='MovingAI .map file.')
@click.option('--scen', 'scen_paths', required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help='MovingAI .scen file; repeat for several instances.')
@click.option('--agents', callback=_parse_agents, help='Agent counts, N[,N...].')
@click.option('--guidance', 'modes', multiple=True,
              type=click.Choice([m.value for m in GuidanceMode]),
              help='Guidance mode; repeat to compare modes.')
@click.option('--window', type=click.IntRange(min=1), help='Local guidance window w.')
@click.option('--alpha', type=click.FloatRange(min=0), help='Collision penalty alpha.')
@click.option('--iterations', type=click.IntRange(min=1), help='Guidance sweeps per search step.')
@click.option('--guidance-interval', type=click.IntRange(min=1), default=1, show_default=True,
              help='Rebuild local guidance every k generations.')
@click.option('--goal-wait-cost', type=click.FloatRange(min=0, max=1),
              help='Guidance cost of a wait on the own goal; 1 charges every step alike.')
@click.option('--unsorted-agents', is_flag=True,
              help='Plan guidance in agent index order instead of by collision count.')
@click.option('--no-guidance-cache', is_flag=True,
              help='Plan guidance from scratch at every node, ignoring the parent guidance.')
@click.option('--suo-passes', type=click.IntRange(min=0), help='SUO replanning passes.')
@click.option('--suo-beta', type=click.FloatRange(min=0), help='SUO congestion weight.')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--time-limit-ms', type=click.IntRange(min=1), help='Per-instance time limit.')
@click.option('--max-nodes', type=click.IntRange(min=1), help='High-level node budget.')
@click.option('--anytime', is_flag=True, help='Refine solutions with LNS until the time limit.')
@click.option('--workers', type=click.IntRange(min=1), help='LNS worker threads.')
@click.option('--lns-proposals', type=click.IntRange(min=0), help='LNS proposal budget.')
@click.option('--jobs', type=click.IntRange(min=1), default=1, show_default=True,
              help='Instances solved in parallel.')
@click.option('--out', type=click.Path(dir_okay=False), help='Results CSV; stdout when omitted.')
@click.option('--solution', type=click.Path(dir_okay=False),
              help='Solution file, JSON for a .json suffix, text otherwise.')
@click.option('--heatmap', help='Prefix for the visit-count and histogram CSV files.')
@click.option('--trace', type=click.Path(dir_okay=False), help='LNS cost trace CSV.')
@click.option('--trace-elapsed/--no-trace-elapsed', default=True, show_default=True,
              help='Include the elapsed_ms column in the trace CSV.')
@click.option('--dump-guidance', type=click.Path(dir_okay=False), help='Guidance path dump.')
@click.option('--validate-only', type=click.Path(exists=True, dir_okay=False),
              help='Validate a JSON solution file and exit.')
@click.option('--record', is_flag=True, help='Store rows in the results database.')
@click.option('--config', 'config_name', type=click.Choice(sorted(configs)),
              envvar='LGMAPF_CONFIG', default='benchmark', show_default=True)
@click.option('-v', '--verbose', is_flag=True, help='Debug logging.')
@click.option('-q', '--quiet', is_flag=True, help='Warnings and errors only.')
def bench(map_path, scen_paths, agents, modes, window, alpha, iterations, guidance_interval,
          goal_wait_cost, unsorted_agents, no_guidance_cache,
          suo_passes, suo_beta, seed, time_limit_ms, max_nodes, anytime, workers, lns_proposals,
          jobs, out, solution, heatmap, trace, trace_elapsed, dump_guidance, validate_only, record,
          config_name, verbose, quiet):
    """Run LaCAM with optional guidance over a benchmark matrix."""
    settings = load_settings(config_name)
    level = 'DEBUG' if verbose else 'WARNING' if quiet else settings['LOG_LEVEL']
    setup_logging(level)

    if validate_only:
        _validate_file(map_path, scen_paths[0], agents, validate_only)
        return
    if agents is None:
        raise click.UsageError('--agents is required unless --validate-only is given')

    try:
        options = SolverOptions.from_config(
            settings,
            window=window,
            alpha=alpha,
            iterations=iterations,
            guidance_interval=guidance_interval,
            goal_wait_cost=goal_wait_cost,
            sort_agents=not unsorted_agents,
            guidance_cache=not no_guidance_cache,
            suo_passes=suo_passes,
            suo_beta=suo_beta,
            seed=seed,
            time_limit_ms=time_limit_ms,
            max_nodes=max_nodes,
            dump_guidance=dump_guidance,
        )
        run_config = RunConfig(
            map_path=map_path,
            scen_paths=list(scen_paths),
            agents=agents,
            modes=list(modes) or [GuidanceMode.NONE],
            options=options,
            anytime=anytime,
            workers=workers or settings['LNS_WORKERS'],
            lns_proposals=lns_proposals,
            lns_max_subset=settings['LNS_MAX_SUBSET'],
            jobs=jobs,
            out=out,
            solution=solution,
            heatmap=heatmap,
            trace=trace,
            trace_elapsed=trace_elapsed,
            record=record,
            log_level=level,
        )
        app = None
        if record:
            from lgmapf import create_app
            app = create_app(config_name)
        rows = run_benchmark(run_config, app)
    except (MAPFError, ValueError) as e:
        raise click.UsageError(str(e)) from None

    if not out:
        click.echo(results_csv(rows), nl=False)
    solved = sum(1 for row in rows if row['solved'])
    logger.info('{}/{} instances solved', solved, len(rows))


def _validate_file(map_path, scen_path, agents, solution_path):
    try:
        data = load_solution_data(solution_path)
        paths = data.get('paths') or []
        n = agents[0] if agents else len(paths)
        instance = load_instance(map_path, scen_path, n)
        report = validate(instance, solution_from_dict(data, instance))
    except MAPFError as e:
        raise click.UsageError(str(e)) from None

    click.echo(json.dumps(report.to_dict()))
    if not report:
        logger.warning('invalid solution: {}', report.message)
        click.get_current_context().exit(1)
