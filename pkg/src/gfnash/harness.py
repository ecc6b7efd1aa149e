"""
Multi-seed experiments, parameter sweeps and CSV artifacts.

An :class:`ExperimentSpec` is declarative (game parameters, topology, run
configuration, seeds) so it can be rebuilt for every sweep point and
shipped to worker processes.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .game import ActionSet, GameSpec, QuadraticGame, hvac_game, solve_quadratic_ne
from .graph import DiGraph, balance_weights, topology
from .metrics import consensus_error, relative_error
from .seeker import GRADIENT_BASED, GRADIENT_FREE, RunConfig, RunRecord, run

__all__ = [
    "relative_error",
    "consensus_error",
    "GameConfig",
    "GraphConfig",
    "ExperimentSpec",
    "ExperimentResult",
    "run_experiment",
    "SWEEP_AXES",
    "sweep",
    "compare",
    "CompareReport",
    "plateau",
    "iterations_to_threshold",
    "decade_means",
    "TRAJECTORY_HEADER",
    "SUMMARY_HEADER",
    "read_csv",
]

TRAJECTORY_HEADER = ["k", "alpha", "mu", "rel_err", "consensus_err"]
SUMMARY_HEADER = ["k", "rel_err_mean", "rel_err_min", "rel_err_max", "cons_mean", "cons_min", "cons_max"]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return " ".join(_fmt(u) for u in np.ravel(v))


@dataclass(frozen=True)
class GameConfig:
    """Quadratic game parameters.

    ``a`` may be a scalar (shared by all players) or a per-player list.
    ``xr=None`` selects the simulation defaults of :func:`hvac_game`, which
    also makes the config resizable along the ``N`` sweep axis.
    """

    n: int = 5
    a: object = 1.0
    b: float = 0.1
    c: float = 10.0
    xr: Optional[tuple] = None
    lo: float = 0.0
    hi: float = 50.0

    def build(self) -> QuadraticGame:
        if self.xr is not None and len(self.xr) != self.n:
            raise ValueError(f"xr has {len(self.xr)} entries for {self.n} players")
        if np.ndim(self.a) and len(self.a) != self.n:
            raise ValueError(f"a has {len(self.a)} entries for {self.n} players")
        return hvac_game(self.n, a=self.a, b=self.b, c=self.c, xr=self.xr)

    def sets(self) -> tuple:
        return (ActionSet(self.lo, self.hi),) * self.n

    def spec(self) -> GameSpec:
        return self.build().spec(self.sets())

    def with_n(self, n: int) -> "GameConfig":
        if self.xr is not None or np.ndim(self.a):
            raise ValueError("resizing needs scalar a and default xr")
        return replace(self, n=int(n))


@dataclass(frozen=True)
class GraphConfig:
    """Builtin topology name, or ``"custom"`` with 0-based ``(source, target)`` edges.

    ``weights=None`` balances the graph automatically.
    """

    topology: str = "ring"
    edges: Optional[tuple] = None
    weights: Optional[np.ndarray] = None

    def graph(self, n: int) -> DiGraph:
        if self.topology == "custom":
            if self.edges is None:
                raise ValueError("custom topology needs an edge list")
            return DiGraph.from_edges(n, self.edges)
        return topology(self.topology, n)

    def build(self, n: int) -> tuple[DiGraph, np.ndarray]:
        g = self.graph(n)
        w = balance_weights(g) if self.weights is None else np.asarray(self.weights, dtype=float)
        return g, w


@dataclass(frozen=True)
class ExperimentSpec:
    game: GameConfig = field(default_factory=GameConfig)
    graph: GraphConfig = field(default_factory=GraphConfig)
    run: RunConfig = field(default_factory=RunConfig)
    seeds: tuple = tuple(range(20))
    reference: Optional[np.ndarray] = None  # None: solve for the equilibrium

    def __post_init__(self):
        if len(self.seeds) == 0:
            raise ValueError("an experiment needs at least one seed")

    def xstar(self) -> np.ndarray:
        if self.reference is not None:
            ref = np.asarray(self.reference, dtype=float)
            if ref.shape != (self.game.n,):
                raise ValueError(f"reference has shape {ref.shape}, expected ({self.game.n},)")
            return ref
        return solve_quadratic_ne(self.game.build(), self.game.sets())


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    xstar: np.ndarray
    records: list
    rel_err: np.ndarray     # (seeds, samples)
    consensus: np.ndarray   # (seeds, samples)

    @property
    def k(self) -> np.ndarray:
        return self.records[0].k

    @property
    def rel_err_mean(self) -> np.ndarray:
        return self.rel_err.mean(axis=0)

    @property
    def consensus_mean(self) -> np.ndarray:
        return self.consensus.mean(axis=0)

    def summary(self) -> dict:
        return {
            "k": self.k,
            "rel_err_mean": self.rel_err.mean(axis=0),
            "rel_err_min": self.rel_err.min(axis=0),
            "rel_err_max": self.rel_err.max(axis=0),
            "cons_mean": self.consensus.mean(axis=0),
            "cons_min": self.consensus.min(axis=0),
            "cons_max": self.consensus.max(axis=0),
        }

    def trajectory_rows(self, s: int):
        rec = self.records[s]
        for m in range(len(rec.k)):
            yield [rec.k[m], rec.alpha[m], rec.mu[m], self.rel_err[s, m], rec.consensus[m], *rec.x[m]]


def _run_seed(game: GameSpec, w, cfg: RunConfig) -> RunRecord:
    return run(game, w, cfg)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])


def _write_artifacts(out_dir: Path, result: ExperimentResult):
    n = result.spec.game.n
    header = TRAJECTORY_HEADER + [f"x_{i + 1}" for i in range(n)]
    for s, rec in enumerate(result.records):
        _write_csv(out_dir / f"trajectory_seed{rec.seed}.csv", header, result.trajectory_rows(s))
    summ = result.summary()
    _write_csv(out_dir / "summary.csv", SUMMARY_HEADER, zip(*(summ[h] for h in SUMMARY_HEADER)))


def _execute(jobs, tasks):
    # tasks: list of (game, w, cfg); yields records in task order, stops at
    # the first failure with (completed, exception)
    done = []
    if jobs <= 1:
        for t in tasks:
            try:
                done.append(_run_seed(*t))
            except Exception as exc:
                return done, exc
        return done, None
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_seed, *t) for t in tasks]
        for fut in futures:
            try:
                done.append(fut.result())
            except Exception as exc:
                for f in futures:
                    f.cancel()
                return done, exc
    return done, None


def _result(spec, xstar, records):
    relative_error(xstar, xstar)  # rejects a zero-norm reference
    # same arithmetic as relative_error, row by row
    ref = np.sqrt((xstar ** 2).sum())
    rel = np.array([np.sqrt(((rec.x - xstar) ** 2).sum(axis=-1)) / ref for rec in records])
    cons = np.array([rec.consensus for rec in records])
    return ExperimentResult(spec=spec, xstar=xstar, records=records, rel_err=rel, consensus=cons)


def run_experiment(spec: ExperimentSpec, out_dir=None, jobs: int = 1) -> ExperimentResult:
    """Run every seed of ``spec`` and aggregate the metrics.

    With ``out_dir`` set, writes ``trajectory_seed<S>.csv`` per seed and
    ``summary.csv``. If a seed fails, the finished seeds are still written
    together with a ``FAILED`` marker file before the error is re-raised.
    Aggregates do not depend on ``jobs``.
    """
    xstar = spec.xstar()
    game = spec.game.spec()
    _, w = spec.graph.build(spec.game.n)
    tasks = [(game, w, replace(spec.run, seed=int(s))) for s in spec.seeds]
    records, exc = _execute(jobs, tasks)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "FAILED").unlink(missing_ok=True)
    if exc is not None:
        if out is not None:
            if records:
                _write_artifacts(out, _result(spec, xstar, records))
            (out / "FAILED").write_text(f"{type(exc).__name__}: {exc}\n")
        raise exc
    result = _result(spec, xstar, records)
    if out is not None:
        _write_artifacts(out, result)
    return result


SWEEP_AXES = ("alpha0", "N", "topology", "mode", "delta", "mu0")


def _apply_axis(base: ExperimentSpec, axis: str, value) -> ExperimentSpec:
    r = base.run
    if axis == "alpha0":
        return replace(base, run=replace(r, schedule=replace(r.schedule, alpha0=float(value))))
    if axis == "mu0":
        return replace(base, run=replace(r, smoothing=replace(r.smoothing, mu0=float(value))))
    if axis == "delta":
        return replace(base, run=replace(r, deltas=value))
    if axis == "mode":
        return replace(base, run=replace(r, mode=str(value)))
    if axis == "topology":
        return replace(base, graph=GraphConfig(topology=str(value)))
    if axis == "N":
        if base.graph.topology == "custom" or base.graph.weights is not None:
            raise ValueError("the N axis needs a builtin topology with automatic weights")
        if base.reference is not None:
            raise ValueError("the N axis needs the equilibrium oracle as reference")
        return replace(base, game=base.game.with_n(int(value)))
    raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def sweep(base: ExperimentSpec, axis: str, values: Sequence, out_dir=None, jobs: int = 1) -> list:
    """One experiment per value of ``axis``; returns ``[(value, ExperimentResult), ...]``.

    With ``out_dir`` set, writes the long-format table ``sweep_<axis>.csv``
    (trajectory columns prefixed by ``axis,value,seed``; ``x_*`` columns
    are padded to the largest player count).
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    results = [(v, run_experiment(_apply_axis(base, axis, v), jobs=jobs)) for v in values]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        nmax = max(res.spec.game.n for _, res in results)
        header = ["axis", "value", "seed"] + TRAJECTORY_HEADER + [f"x_{i + 1}" for i in range(nmax)]

        def rows():
            for v, res in results:
                for s, rec in enumerate(res.records):
                    for row in res.trajectory_rows(s):
                        yield [axis, v, rec.seed, *row] + [""] * (nmax - res.spec.game.n)

        with open(out / f"sweep_{axis}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows():
                w.writerow([_fmt(c) for c in row])
    return results


# --------------------------------------------------------------------------
# trajectory statistics

def plateau(k, values, iters: int | None = None) -> float:
    """Mean of ``values`` over the final 10% of iterations."""
    k = np.asarray(k)
    values = np.asarray(values, dtype=float)
    iters = int(k[-1]) if iters is None else iters
    mask = k >= 0.9 * iters
    return float(values[..., mask].mean())


def iterations_to_threshold(k, values, threshold: float = 0.1) -> Optional[int]:
    """First recorded iteration with ``values <= threshold``, or ``None``."""
    hit = np.flatnonzero(np.asarray(values) <= threshold)
    return int(np.asarray(k)[hit[0]]) if len(hit) else None


def decade_means(k, values) -> list:
    """Means of ``values`` over ``[1, 10), [10, 100), ...`` (recorded iterations only)."""
    k = np.asarray(k)
    values = np.asarray(values, dtype=float)
    out = []
    lo = 1
    while lo <= k[-1]:
        mask = (k >= lo) & (k < 10 * lo)
        if mask.any():
            out.append(float(values[mask].mean()))
        lo *= 10
    return out


@dataclass
class CompareReport:
    threshold: float
    hits: dict          # mode -> first iteration of the seed-averaged curve, or None
    results: dict       # mode -> ExperimentResult

    def lines(self) -> list:
        out = []
        for mode, hit in self.hits.items():
            status = f"reached at k={hit}" if hit is not None else "not reached"
            out.append(f"{mode}: rel_err <= {self.threshold:g} {status}")
        return out


def compare(base: ExperimentSpec, out_dir=None, jobs: int = 1, threshold: float = 0.1) -> CompareReport:
    """Gradient-free versus gradient-based runs with shared seeds.

    Reports when each seed-averaged relative-error curve first drops to
    ``threshold``; no ordering is asserted.
    """
    results = dict(sweep(base, "mode", [GRADIENT_FREE, GRADIENT_BASED], out_dir=out_dir, jobs=jobs))
    hits = {m: iterations_to_threshold(r.k, r.rel_err_mean, threshold) for m, r in results.items()}
    return CompareReport(threshold=threshold, hits=hits, results=results)


def read_csv(path) -> dict:
    """Load a numeric CSV artifact into ``{column: array}`` (non-numeric columns kept as strings)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in body]
        try:
            cols[name] = np.array([float(v) if v != "" else math.nan for v in raw])
        except ValueError:
            cols[name] = np.array(raw)
    return cols
