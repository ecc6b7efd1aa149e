"""
YAML run documents.

A document has four sections::

    game:       {type: quadratic, n, a, b, c, xr, lo, hi}
    graph:      {builtin: ring | complete | two-successor-cycle
                          | three-successor-cycle | custom,
                 edges: [[from, to], ...], edges_file: path, weights: auto | path}
    algo:       {stepsize: {kind, alpha0, exponent},
                 smoothing: {kind, mu0, exponent},
                 delta, iters, mode, record_stride}
    experiment: {seeds: [..] | count, output: dir, reference: oracle | path}

Edge endpoints in documents and files are 1-based. Relative paths resolve
against the document's directory. Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .exceptions import ConfigError
from .graph import TOPOLOGIES, read_graph, read_weights
from .harness import ExperimentSpec, GameConfig, GraphConfig
from .oracle import SmoothingSchedule
from .seeker import RunConfig, StepSchedule

__all__ = ["RunDocument", "load_document", "parse_document", "apply_override"]

_SCHEMA = {
    "game": {"type": None, "n": None, "a": None, "b": None, "c": None, "xr": None, "lo": None, "hi": None},
    "graph": {"builtin": None, "edges": None, "edges_file": None, "weights": None},
    "algo": {
        "stepsize": {"kind": None, "alpha0": None, "exponent": None},
        "smoothing": {"kind": None, "mu0": None, "exponent": None},
        "delta": None, "iters": None, "mode": None, "record_stride": None,
    },
    "experiment": {"seeds": None, "output": None, "reference": None},
}


@dataclass
class RunDocument:
    spec: ExperimentSpec
    output: Path
    game_type: str
    raw: dict
    path: Path | None = None


def _line_map(text):
    # dotted key path -> 1-based line number of the key
    lines = {}

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                path = f"{prefix}.{k.value}" if prefix else str(k.value)
                lines[path] = k.start_mark.line + 1
                walk(v, path)

    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {exc}", line=mark.line + 1 if mark else None) from None
    walk(root, "")
    return lines


def _check_keys(raw, schema, prefix, lines):
    if not isinstance(raw, dict):
        raise ConfigError("expected a mapping", field=prefix or "<root>", line=lines.get(prefix))
    for key, val in raw.items():
        path = f"{prefix}.{key}" if prefix else str(key)
        if key not in schema:
            raise ConfigError("unknown key", field=path, line=lines.get(path))
        if isinstance(schema[key], dict):
            _check_keys(val, schema[key], path, lines)


def apply_override(raw: dict, assignment: str) -> None:
    """Apply ``section.key=value`` in place; the value is parsed as YAML."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} must look like key=value")
    key, value = assignment.split("=", 1)
    parts = key.strip().split(".")
    node, schema = raw, _SCHEMA
    for p in parts[:-1]:
        if not isinstance(schema, dict) or p not in schema or not isinstance(schema[p], dict):
            raise ConfigError("unknown override key", field=key)
        schema = schema[p]
        node = node.setdefault(p, {})
    if not isinstance(schema, dict) or parts[-1] not in schema:
        raise ConfigError("unknown override key", field=key)
    node[parts[-1]] = yaml.safe_load(value)


def _get(section, key, default, lines, prefix, kind=None):
    val = section.get(key, default)
    path = f"{prefix}.{key}"
    if kind is not None and val is not None:
        try:
            if kind is list:
                val = [float(v) for v in val] if isinstance(val, (list, tuple)) else float(val)
            else:
                val = kind(val)
        except (TypeError, ValueError):
            raise ConfigError(f"expected {getattr(kind, '__name__', kind)}, got {val!r}",
                              field=path, line=lines.get(path)) from None
    return val


def _resolve(base: Path, p) -> Path:
    p = Path(p)
    return p if p.is_absolute() else base / p


def parse_document(text: str, base_dir=".", overrides=()) -> RunDocument:
    """Build a :class:`RunDocument` from YAML text plus ``key=value`` overrides."""
    base_dir = Path(base_dir)
    lines = _line_map(text)
    raw = yaml.safe_load(text) or {}
    for ov in overrides:
        apply_override(raw, ov)
    _check_keys(raw, _SCHEMA, "", lines)
    for section in _SCHEMA:
        if section not in raw:
            raise ConfigError("missing section", field=section)

    def fail(msg, path):
        raise ConfigError(msg, field=path, line=lines.get(path))

    g = raw["game"]
    game_type = g.get("type", "quadratic")
    if game_type != "quadratic":
        fail(f"unsupported game type {game_type!r} (only 'quadratic' is available)", "game.type")
    n = _get(g, "n", None, lines, "game", int)
    if n is None or n < 1:
        fail("player count must be a positive integer", "game.n")
    a = _get(g, "a", 1.0, lines, "game", list)
    xr = _get(g, "xr", None, lines, "game", list)
    if isinstance(xr, float):
        fail("xr must be a list", "game.xr")
    try:
        game = GameConfig(n=n, a=tuple(a) if isinstance(a, list) else a,
                          b=_get(g, "b", 0.1, lines, "game", float), c=_get(g, "c", 10.0, lines, "game", float),
                          xr=tuple(xr) if xr is not None else None,
                          lo=_get(g, "lo", 0.0, lines, "game", float), hi=_get(g, "hi", 50.0, lines, "game", float))
        game.build()
        game.sets()
    except ValueError as exc:
        fail(str(exc), "game")

    gr = raw["graph"]
    name = gr.get("builtin", "ring")
    edges = None
    if name == "custom":
        if "edges_file" in gr:
            path = _resolve(base_dir, gr["edges_file"])
            if not path.exists():
                fail(f"file {path} does not exist", "graph.edges_file")
            try:
                dg = read_graph(path)
            except ValueError as exc:
                fail(f"{path}: {exc}", "graph.edges_file")
            if dg.n != n:
                fail(f"graph file has {dg.n} nodes, game has {n} players", "graph.edges_file")
            edges = tuple(sorted(dg.edges))
        elif "edges" in gr:
            try:
                edges = tuple((int(j) - 1, int(i) - 1) for j, i in gr["edges"])
            except (TypeError, ValueError):
                fail("edges must be a list of [from, to] pairs", "graph.edges")
            if any(not (0 <= j < n and 0 <= i < n) for j, i in edges):
                fail(f"edge endpoint outside 1..{n}", "graph.edges")
        else:
            fail("custom topology needs 'edges' or 'edges_file'", "graph.builtin")
    elif name not in TOPOLOGIES:
        fail(f"unknown topology {name!r}; choose from {sorted(TOPOLOGIES) + ['custom']}", "graph.builtin")
    weights = gr.get("weights", "auto")
    w = None
    if weights != "auto":
        path = _resolve(base_dir, weights)
        if not path.exists():
            fail(f"file {path} does not exist", "graph.weights")
        try:
            w = read_weights(path)
        except ValueError as exc:
            fail(str(exc), "graph.weights")
        if w.shape != (n, n):
            fail(f"weight matrix shape {w.shape} does not match {n} players", "graph.weights")
    graph = GraphConfig(topology=name, edges=edges, weights=w)

    al = raw["algo"]
    ss = al.get("stepsize", {}) or {}
    sm = al.get("smoothing", {}) or {}
    try:
        schedule = StepSchedule(kind=ss.get("kind", "diminishing"),
                                alpha0=_get(ss, "alpha0", 0.1, lines, "algo.stepsize", float),
                                exponent=_get(ss, "exponent", 0.5, lines, "algo.stepsize", float))
    except ValueError as exc:
        fail(str(exc), "algo.stepsize")
    try:
        smoothing = SmoothingSchedule(kind=sm.get("kind", "diminishing"),
                                      mu0=_get(sm, "mu0", 1e-2, lines, "algo.smoothing", float),
                                      exponent=_get(sm, "exponent", 1.0, lines, "algo.smoothing", float))
    except ValueError as exc:
        fail(str(exc), "algo.smoothing")
    delta = _get(al, "delta", 0.5, lines, "algo", list)
    if isinstance(delta, list):
        if len(delta) != n:
            fail(f"expected {n} deltas, got {len(delta)}", "algo.delta")
        delta = tuple(delta)
    try:
        runcfg = RunConfig(iters=_get(al, "iters", 10_000, lines, "algo", int), schedule=schedule,
                           smoothing=smoothing, deltas=delta, mode=al.get("mode", "gradient-free"),
                           record_stride=_get(al, "record_stride", 1, lines, "algo", int))
    except ValueError as exc:
        fail(str(exc), "algo")

    ex = raw["experiment"]
    seeds = ex.get("seeds", 20)
    if isinstance(seeds, int) and not isinstance(seeds, bool):
        seeds = tuple(range(seeds))
    elif isinstance(seeds, list) and all(isinstance(s, int) for s in seeds):
        seeds = tuple(seeds)
    else:
        fail("seeds must be a count or a list of integers", "experiment.seeds")
    if not seeds:
        fail("at least one seed is required", "experiment.seeds")
    reference = ex.get("reference", "oracle")
    ref = None
    if reference != "oracle":
        path = _resolve(base_dir, reference)
        if not path.exists():
            fail(f"file {path} does not exist", "experiment.reference")
        ref = np.loadtxt(path, delimiter=",", ndmin=1)
        if ref.shape != (n,):
            fail(f"reference must hold {n} values, got {ref.size}", "experiment.reference")
    output = _resolve(base_dir, ex.get("output", "out"))

    spec = ExperimentSpec(game=game, graph=graph, run=runcfg, seeds=seeds, reference=ref)
    return RunDocument(spec=spec, output=output, game_type=game_type, raw=raw)


def load_document(path, overrides=()) -> RunDocument:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    doc = parse_document(text, base_dir=path.parent, overrides=overrides)
    doc.path = path
    return doc
