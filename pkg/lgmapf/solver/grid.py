"""Grid graphs, MAPF instances and lazily built distance tables.

Maps and scenarios use the MovingAI benchmark text formats. Scenario
coordinates are (x, y) with x the column and y the row; vertex ids are dense
and assigned in row-major order over passable cells.
"""

from __future__ import annotations

import math
import threading
from contextlib import nullcontext
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from loguru import logger
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from lgmapf.errors import MapFormatError, ScenarioError

PASSABLE_CELLS = frozenset('.G')
BLOCKED_CELLS = frozenset('@TOSW')

NO_VERTEX = -1
UNREACHABLE = -1

# up, right, down, left as (dx, dy)
MOVES = ((0, -1), (1, 0), (0, 1), (-1, 0))

Configuration = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Grid:
    """Four-connected grid graph over the passable cells of a map."""
    width: int
    height: int
    passable: np.ndarray
    vertex_ids: np.ndarray
    coords: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...]
    csgraph: csr_matrix = field(repr=False)

    @classmethod
    def from_mask(cls, passable) -> Grid:
        """Build the graph from a (height, width) boolean mask."""
        passable = np.array(passable, dtype=bool)
        height, width = passable.shape
        vertex_ids = np.full((height, width), NO_VERTEX, dtype=np.int32)
        ys, xs = np.nonzero(passable)
        vertex_ids[ys, xs] = np.arange(len(ys), dtype=np.int32)

        coords = tuple((int(x), int(y)) for y, x in zip(ys, xs))
        adjacency = []
        rows, cols = [], []
        for v, (x, y) in enumerate(coords):
            neighbors = []
            for dx, dy in MOVES:
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height and passable[ny, nx]:
                    u = int(vertex_ids[ny, nx])
                    neighbors.append(u)
                    rows.append(v)
                    cols.append(u)
            adjacency.append(tuple(neighbors))

        size = len(coords)
        graph = csr_matrix(
            (np.ones(len(rows), dtype=np.float64), (rows, cols)), shape=(size, size)
        )
        passable.setflags(write=False)
        vertex_ids.setflags(write=False)
        return cls(width, height, passable, vertex_ids, coords, tuple(adjacency), graph)

    @property
    def size(self) -> int:
        """Number of vertices."""
        return len(self.coords)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def coord(self, v: int) -> tuple[int, int]:
        """(x, y) of a vertex."""
        return self.coords[v]

    def vertex_at(self, x: int, y: int) -> int:
        """Vertex id at column x, row y, or NO_VERTEX for blocked or outside cells."""
        if 0 <= x < self.width and 0 <= y < self.height:
            return int(self.vertex_ids[y, x])
        return NO_VERTEX

    def edges(self) -> set[tuple[int, int]]:
        """Undirected edges as (smaller id, larger id) pairs."""
        return {(v, u) for v, nbrs in enumerate(self.adjacency) for u in nbrs if v < u}

    @cached_property
    def arcs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed edges in adjacency order as (offsets, heads, reverse).

        Arc ``e`` in ``offsets[v]:offsets[v + 1]`` runs v -> heads[e] and
        ``reverse[e]`` is the arc heads[e] -> v.
        """
        offsets = np.zeros(self.size + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(nbrs) for nbrs in self.adjacency])
        heads = np.fromiter((u for nbrs in self.adjacency for u in nbrs),
                            dtype=np.int64, count=int(offsets[-1]))
        index = {(v, int(u)): e for v in range(self.size)
                 for e, u in enumerate(heads[offsets[v]:offsets[v + 1]], start=int(offsets[v]))}
        reverse = np.array([index[int(u), v] for (v, u) in index], dtype=np.int64)
        return offsets, heads, reverse

    def arc(self, v: int, u: int) -> int:
        """Index of the arc v -> u."""
        offsets, heads, _ = self.arcs
        for e in range(offsets[v], offsets[v + 1]):
            if heads[e] == u:
                return int(e)
        raise KeyError(f'no edge {v} -> {u}')

    def __repr__(self):
        return f'<Grid {self.width}x{self.height} |V|={self.size}>'


def bfs_distances(grid: Grid, sources) -> np.ndarray:
    """Hop distance from the nearest source to every vertex, UNREACHABLE where none."""
    dist = dijkstra(
        grid.csgraph, directed=False, indices=list(sources), unweighted=True, min_only=True
    )
    out = np.full(grid.size, UNREACHABLE, dtype=np.int32)
    finite = np.isfinite(dist)
    out[finite] = dist[finite].astype(np.int32)
    return out


class DistTable:
    """Per-goal hop distances, built on the first query for each goal.

    Each table is kept twice: as a plain list for the Python search, which reads
    one entry at a time, and as an int32 array for the compiled guidance
    planner. Construction is guarded by a lock unless ``single_threaded`` is set.
    """

    def __init__(self, grid: Grid, single_threaded: bool = False):
        self.grid = grid
        self._tables: dict[int, list[int]] = {}
        self._arrays: dict[int, np.ndarray] = {}
        self._lock = nullcontext() if single_threaded else threading.Lock()

    def table(self, goal: int) -> list[int]:
        table = self._tables.get(goal)
        if table is None:
            with self._lock:
                table = self._tables.get(goal)
                if table is None:
                    array = bfs_distances(self.grid, [goal])
                    self._arrays[goal] = array
                    table = array.tolist()
                    self._tables[goal] = table
        return table

    def array(self, goal: int) -> np.ndarray:
        array = self._arrays.get(goal)
        if array is None:
            self.table(goal)
            array = self._arrays[goal]
        return array

    def dist(self, v: int, goal: int) -> int | float:
        """Shortest-path hop count from v to goal, math.inf if unreachable."""
        d = self.table(goal)[v]
        return math.inf if d == UNREACHABLE else d

    def __len__(self):
        return len(self._tables)


@dataclass(frozen=True, eq=False)
class Instance:
    """A grid plus one start and one goal vertex per agent."""
    grid: Grid
    starts: Configuration
    goals: Configuration
    dist_table: DistTable = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'starts', tuple(int(v) for v in self.starts))
        object.__setattr__(self, 'goals', tuple(int(v) for v in self.goals))
        if self.dist_table is None:
            object.__setattr__(self, 'dist_table', DistTable(self.grid))
        self._check()

    @classmethod
    def from_coords(cls, grid: Grid, starts, goals, **kwargs) -> Instance:
        """Build an instance from (x, y) start and goal cells."""
        def to_vertex(kind, i, xy):
            v = grid.vertex_at(*xy)
            if v == NO_VERTEX:
                raise ScenarioError(f'agent {i}: {kind} {tuple(xy)} is not a passable cell')
            return v

        return cls(
            grid,
            tuple(to_vertex('start', i, xy) for i, xy in enumerate(starts)),
            tuple(to_vertex('goal', i, xy) for i, xy in enumerate(goals)),
            **kwargs,
        )

    @property
    def n(self) -> int:
        return len(self.starts)

    def dist(self, v: int, i: int) -> int | float:
        """Distance from v to agent i's goal."""
        return self.dist_table.dist(v, self.goals[i])

    def goal_table(self, i: int) -> list[int]:
        return self.dist_table.table(self.goals[i])

    def goal_array(self, i: int) -> np.ndarray:
        return self.dist_table.array(self.goals[i])

    def lower_bound(self) -> int:
        """Sum over agents of dist(s_i, g_i)."""
        return sum(self.goal_table(i)[s] for i, s in enumerate(self.starts))

    def _check(self):
        if len(self.starts) != len(self.goals):
            raise ScenarioError('starts and goals differ in length')
        for kind, vertices in (('start', self.starts), ('goal', self.goals)):
            for i, v in enumerate(vertices):
                if not 0 <= v < self.grid.size:
                    raise ScenarioError(f'agent {i}: {kind} {v} is not a vertex')
            if len(set(vertices)) != len(vertices):
                seen = {}
                for i, v in enumerate(vertices):
                    if v in seen:
                        raise ScenarioError(
                            f'agents {seen[v]} and {i} share {kind} {self.grid.coord(v)}'
                        )
                    seen[v] = i
        for i, (s, g) in enumerate(zip(self.starts, self.goals)):
            if math.isinf(self.dist_table.dist(s, g)):
                raise ScenarioError(
                    f'agent {i}: goal {self.grid.coord(g)} unreachable from {self.grid.coord(s)}'
                )

    def __repr__(self):
        return f'<Instance n={self.n} {self.grid!r}>'


def parse_map(text: str) -> Grid:
    """Parse MovingAI map text."""
    lines = text.splitlines()
    header = {}
    idx = 0
    while True:
        if idx >= len(lines):
            raise MapFormatError("missing 'map' marker", idx)
        line = lines[idx].strip()
        idx += 1
        if not line:
            continue
        if line == 'map':
            break
        parts = line.split()
        if len(parts) != 2:
            raise MapFormatError(f'malformed header entry {line!r}', idx)
        header[parts[0].lower()] = parts[1]

    try:
        height = int(header['height'])
        width = int(header['width'])
    except (KeyError, ValueError):
        raise MapFormatError('header must declare integer height and width', idx) from None
    if height <= 0 or width <= 0:
        raise MapFormatError(f'invalid dimensions {height}x{width}', idx)

    rows = lines[idx:idx + height]
    if len(rows) < height:
        raise MapFormatError(f'expected {height} rows, found {len(rows)}', len(lines))

    passable = np.zeros((height, width), dtype=bool)
    for r, row in enumerate(rows):
        lineno = idx + r + 1
        row = row.rstrip()
        if len(row) != width:
            raise MapFormatError(f'expected {width} cells, found {len(row)}', lineno)
        for c, ch in enumerate(row):
            if ch in PASSABLE_CELLS:
                passable[r, c] = True
            elif ch not in BLOCKED_CELLS:
                raise MapFormatError(f'unknown cell character {ch!r}', lineno)

    for extra, line in enumerate(lines[idx + height:], start=idx + height + 1):
        if line.strip():
            raise MapFormatError(f'expected {height} rows, found extra content', extra)

    if not passable.any():
        raise MapFormatError('map has no passable cells', idx)
    return Grid.from_mask(passable)


def serialize_map(grid: Grid) -> str:
    """Write a grid back out in MovingAI map format."""
    rows = (''.join('.' if cell else '@' for cell in row) for row in grid.passable)
    header = ['type octile', f'height {grid.height}', f'width {grid.width}', 'map']
    return '\n'.join([*header, *rows]) + '\n'


def parse_scenario(text: str, grid: Grid, n: int | None = None, **kwargs) -> Instance:
    """Parse MovingAI scen text, taking the first n records as agents.

    The optimal-length column is ignored.
    """
    lines = text.splitlines()
    if not lines or not lines[0].strip().lower().startswith('version'):
        raise ScenarioError("line 1: expected a 'version' line")

    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if n is not None and len(records) == n:
            break
        if not line.strip():
            continue
        fields = line.split('\t') if '\t' in line else line.split()
        if len(fields) < 8:
            raise ScenarioError(f'line {lineno}: expected at least 8 fields, found {len(fields)}')
        try:
            sx, sy, gx, gy = (int(f) for f in fields[4:8])
        except ValueError:
            raise ScenarioError(f'line {lineno}: non-integer coordinates') from None
        records.append((lineno, (sx, sy), (gx, gy)))

    if n is not None and len(records) < n:
        raise ScenarioError(f'insufficient records: requested {n}, found {len(records)}')

    starts, goals = [], []
    for lineno, start, goal in records:
        for kind, xy, out in (('start', start, starts), ('goal', goal, goals)):
            v = grid.vertex_at(*xy)
            if v == NO_VERTEX:
                raise ScenarioError(f'line {lineno}: {kind} {xy} is not a passable cell')
            out.append(v)

    instance = Instance(grid, tuple(starts), tuple(goals), **kwargs)
    logger.debug('parsed scenario with {} agents on {!r}', instance.n, grid)
    return instance


def load_instance(map_path, scen_path, n: int | None = None, **kwargs) -> Instance:
    """Read a map file and a scen file into an instance."""
    grid = parse_map(Path(map_path).read_text())
    return parse_scenario(Path(scen_path).read_text(), grid, n, **kwargs)


def format_path(grid: Grid, path) -> str:
    """'(x,y),(x,y),...' for a vertex path."""
    return ','.join('({},{})'.format(*grid.coord(v)) for v in path)
