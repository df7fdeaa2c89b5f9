"""Benchmark run model."""

from datetime import datetime
from slugify import slugify
from lgmapf.extensions import db


class BenchmarkRun(db.Model):
    """One results row of a benchmark matrix."""
    __tablename__ = 'benchmark_runs'

    id = db.Column(db.Integer, primary_key=True)
    run_name = db.Column(db.String(200), unique=True, index=True)
    map_name = db.Column(db.String(150), nullable=False)
    scen_index = db.Column(db.Integer, nullable=False)
    agents = db.Column(db.Integer, nullable=False)
    mode = db.Column(db.String(10), nullable=False)
    window = db.Column(db.Integer)
    alpha = db.Column(db.Float)
    seed = db.Column(db.Integer, default=0)
    solved = db.Column(db.Boolean, default=False)
    flowtime = db.Column(db.Integer)  # empty when unsolved
    lower_bound = db.Column(db.Integer, nullable=False)
    ratio = db.Column(db.Float)
    runtime_ms = db.Column(db.Float)
    created_at = db.Column(db.DateTime, default=datetime.utcnow)

    @classmethod
    def from_row(cls, row):
        """Build a record from a runner results row."""
        run = cls(
            map_name=row['map'],
            scen_index=row['scen'],
            agents=row['n'],
            mode=row['mode'],
            window=row['w'],
            alpha=row['alpha'],
            seed=row['seed'],
            solved=row['solved'],
            flowtime=row['flowtime'],
            lower_bound=row['lb'],
            ratio=row['ratio'],
            runtime_ms=row['runtime_ms'],
        )
        run.generate_run_name()
        return run

    def generate_run_name(self):
        """Generate a unique slug for the run."""
        base = slugify(f'{self.map_name} scen {self.scen_index} n {self.agents} {self.mode} seed {self.seed}')
        name = base
        counter = 1
        while BenchmarkRun.query.filter_by(run_name=name).first() is not None:
            name = f'{base}-{counter}'
            counter += 1
        self.run_name = name

    def to_dict(self):
        return {
            'run_name': self.run_name,
            'map': self.map_name,
            'scen': self.scen_index,
            'n': self.agents,
            'mode': self.mode,
            'w': self.window,
            'alpha': self.alpha,
            'seed': self.seed,
            'solved': self.solved,
            'flowtime': self.flowtime,
            'lb': self.lower_bound,
            'ratio': self.ratio,
            'runtime_ms': self.runtime_ms,
            'created_at': self.created_at.isoformat() if self.created_at else None,
        }

    def __repr__(self):
        return f'<BenchmarkRun {self.run_name}>'
