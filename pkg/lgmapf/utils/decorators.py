"""Request guards for the JSON API."""

from functools import wraps
from flask import request, jsonify


def json_required(f):
    """Decorator to require a JSON object body."""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        if not request.is_json or not isinstance(request.get_json(silent=True), dict):
            return jsonify({'success': False, 'message': 'Expected a JSON object body'}), 400
        return f(*args, **kwargs)
    return decorated_function
