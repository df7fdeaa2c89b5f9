"""Shared fixtures."""

import os

import pytest

from lgmapf import create_app
from lgmapf.extensions import db


@pytest.fixture
def app():
    """Application built with the testing configuration; pytest-flask derives `client` from it."""
    app = create_app('testing')
    yield app
    with app.app_context():
        db.session.remove()
        db.drop_all()


@pytest.fixture
def bench_dir():
    """Directory holding the MovingAI benchmark files, skipping when unset."""
    path = os.environ.get('LGMAPF_BENCH_DIR')
    if not path or not os.path.isdir(path):
        pytest.skip('LGMAPF_BENCH_DIR is not set')
    return path
