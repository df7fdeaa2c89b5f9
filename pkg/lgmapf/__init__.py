"""Flask application factory."""

import os
from flask import Flask, jsonify
from .config import config
from .extensions import db


def create_app(config_name=None):
    """Create and configure the Flask application."""
    if config_name is None:
        config_name = os.environ.get('LGMAPF_CONFIG', 'default')

    app = Flask(__name__)
    app.config.from_object(config[config_name])

    # Initialize extensions
    db.init_app(app)

    # Results directory and the SQLite store next to it
    os.makedirs(app.config['RESULTS_DIR'], exist_ok=True)
    os.makedirs(app.instance_path, exist_ok=True)

    # Register blueprints
    from .routes import register_blueprints
    register_blueprints(app)

    # Benchmark command: `flask --app run bench ...`
    from .cli import bench
    app.cli.add_command(bench)

    with app.app_context():
        from . import models  # noqa: F401
        db.create_all()

    # Error handlers
    @app.errorhandler(404)
    def not_found_error(error):
        return jsonify({'success': False, 'message': 'Not found'}), 404

    @app.errorhandler(500)
    def internal_error(error):
        db.session.rollback()
        return jsonify({'success': False, 'message': 'Internal server error'}), 500

    return app
