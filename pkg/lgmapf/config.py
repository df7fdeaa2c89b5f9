import os
from dotenv import load_dotenv

load_dotenv()


def _optional_int(name):
    value = os.environ.get(name)
    return int(value) if value else None


class Config:
    """Base configuration."""
    SECRET_KEY = os.environ.get('SECRET_KEY') or 'dev-secret-key-change-in-production'

    # Forms are fed from JSON bodies, no browser session to protect
    WTF_CSRF_ENABLED = False

    # Results store - SQLite next to the package by default
    basedir = os.path.dirname(os.path.dirname(__file__))
    SQLALCHEMY_DATABASE_URI = os.environ.get('DATABASE_URL') or \
        f'sqlite:///{os.path.join(basedir, "instance", "lgmapf.db")}'
    SQLALCHEMY_TRACK_MODIFICATIONS = False

    RESULTS_DIR = os.environ.get('RESULTS_DIR') or os.path.join(basedir, 'results')
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')

    # Solver defaults
    TIME_LIMIT_MS = int(os.environ.get('TIME_LIMIT_MS', 30000))
    MAX_NODES = _optional_int('MAX_NODES')
    GUIDANCE_WINDOW = int(os.environ.get('GUIDANCE_WINDOW', 20))
    GUIDANCE_ALPHA = float(os.environ.get('GUIDANCE_ALPHA', 3.0))
    GUIDANCE_ITERATIONS = int(os.environ.get('GUIDANCE_ITERATIONS', 1))
    GUIDANCE_INITIAL_ITERATIONS = int(os.environ.get('GUIDANCE_INITIAL_ITERATIONS', 2))
    GUIDANCE_GOAL_WAIT_COST = float(os.environ.get('GUIDANCE_GOAL_WAIT_COST', 0.0))
    SUO_PASSES = int(os.environ.get('SUO_PASSES', 2))
    SUO_BETA = float(os.environ.get('SUO_BETA', 0.5))

    # Anytime refinement
    LNS_WORKERS = int(os.environ.get('LNS_WORKERS', 4))
    LNS_MAX_SUBSET = int(os.environ.get('LNS_MAX_SUBSET', 30))


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    SQLALCHEMY_ECHO = False


class BenchmarkConfig(Config):
    """Benchmark configuration."""
    DEBUG = False
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'WARNING')


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    SQLALCHEMY_DATABASE_URI = 'sqlite:///:memory:'
    TIME_LIMIT_MS = 5000
    LNS_WORKERS = 1
    LOG_LEVEL = 'WARNING'


config = {
    'development': DevelopmentConfig,
    'benchmark': BenchmarkConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
