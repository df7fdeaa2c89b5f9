"""JSON API endpoints for visualizers and scripted clients."""

from flask import Blueprint, current_app, jsonify, request
from loguru import logger
from lgmapf.bench.formats import solution_from_dict, solution_to_dict
from lgmapf.bench.metrics import compute_metrics
from lgmapf.bench.validator import validate
from lgmapf.errors import MAPFError, SolveFailure
from lgmapf.forms import SolveForm, ValidateForm
from lgmapf.models import BenchmarkRun
from lgmapf.solver.anytime import refine
from lgmapf.solver.grid import parse_map, parse_scenario
from lgmapf.solver.lacam import LaCAM, SolverOptions
from lgmapf.utils.decorators import json_required
from lgmapf.utils.timing import Deadline

api_bp = Blueprint('api', __name__)


def _form_error(form):
    return jsonify({'success': False, 'message': 'Invalid input', 'errors': form.errors}), 400


@api_bp.route('/solve', methods=['POST'])
@json_required
def solve():
    """Solve an instance given as map and scenario text."""
    form = SolveForm()
    if not form.validate():
        return _form_error(form)

    try:
        grid = parse_map(form.map.data)
        instance = parse_scenario(form.scen.data, grid, form.agents.data)
    except MAPFError as e:
        return jsonify({'success': False, 'message': str(e)}), 400

    config = current_app.config
    options = SolverOptions.from_config(
        config,
        guidance=form.guidance.data,
        window=form.window.data,
        alpha=form.alpha.data,
        iterations=form.iterations.data,
        seed=form.seed.data,
        time_limit_ms=form.time_limit_ms.data,
    )
    solver = LaCAM(options)
    deadline = Deadline(options.time_limit_ms)
    solution = None
    message = 'solved'
    try:
        solution = solver.solve(instance, deadline)
        if form.anytime.data:
            solution = refine(
                solution, instance, deadline,
                workers=config['LNS_WORKERS'], seed=options.seed,
                max_subset=config['LNS_MAX_SUBSET'],
            )
    except SolveFailure as e:
        message = str(e)
    metrics = compute_metrics(instance, solution, deadline.elapsed)
    logger.info('API solve n={} mode={}: {}', instance.n, options.guidance.value, message)

    return jsonify({
        'success': True,
        'message': message,
        'metrics': metrics.to_dict(),
        'stats': {
            'nodes_generated': solver.nodes_generated,
            'guidance_builds': solver.guidance_builds,
        },
        'solution': solution_to_dict(instance, solution, seed=options.seed) if solution is not None else None,
    })


@api_bp.route('/validate', methods=['POST'])
@json_required
def validate_solution():
    """Validate submitted (x, y) paths against an instance."""
    form = ValidateForm()
    if not form.validate():
        return _form_error(form)

    data = request.get_json()
    paths = data.get('paths')
    if not isinstance(paths, list) or not paths:
        return jsonify({'success': False, 'message': 'paths must be a non-empty list'}), 400

    try:
        grid = parse_map(form.map.data)
        instance = parse_scenario(form.scen.data, grid, form.agents.data or len(paths))
        solution = solution_from_dict(data, instance)
    except MAPFError as e:
        return jsonify({'success': False, 'message': str(e)}), 400

    report = validate(instance, solution)
    return jsonify({'success': True, 'report': report.to_dict()})


@api_bp.route('/runs')
def list_runs():
    """Latest recorded benchmark rows."""
    limit = request.args.get('limit', 50, type=int)
    limit = max(1, min(limit, 500))
    runs = BenchmarkRun.query.order_by(
        BenchmarkRun.created_at.desc(), BenchmarkRun.id.desc()
    ).limit(limit).all()
    return jsonify({'success': True, 'runs': [r.to_dict() for r in runs]})
