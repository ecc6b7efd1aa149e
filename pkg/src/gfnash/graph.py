"""
Directed communication graphs and mixing weights.

Conventions
-----------
Players are indexed from 0 in the Python API. An edge ``(j, i)`` means that
information flows from player ``j`` to player ``i``; the weight matrix is
indexed receiver-first, so ``w[i, j] > 0`` exactly when ``(j, i)`` is an
edge. Text files use 1-based indices.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import connected_components

from .exceptions import InvalidDelta, NonConvergence

__all__ = [
    "DiGraph",
    "SpectralCertificate",
    "Violation",
    "ring",
    "successor_cycle",
    "complete",
    "TOPOLOGIES",
    "topology",
    "is_strongly_connected",
    "balance_weights",
    "validate_doubly_stochastic",
    "validate_deltas",
    "tilde_matrix",
    "spectral_radius",
    "spectral_certificate",
    "decay_ratios",
    "parse_graph",
    "format_graph",
    "read_graph",
    "read_weights",
    "write_weights",
]


@dataclass(frozen=True)
class DiGraph:
    """Directed graph on ``n`` nodes with mandatory self-loops.

    Use :meth:`from_edges` to build one from a partial edge list; the plain
    constructor insists that every ``(i, i)`` is already present.
    """

    n: int
    edges: frozenset

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"player count must be a positive integer, got {self.n}")
        for j, i in self.edges:
            if not (0 <= j < self.n and 0 <= i < self.n):
                raise ValueError(f"edge ({j}, {i}) has an endpoint outside [0, {self.n})")
        missing = [i for i in range(self.n) if (i, i) not in self.edges]
        if missing:
            raise ValueError(f"self-loops missing for nodes {missing}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DiGraph":
        """Build a graph from ``(source, target)`` pairs, adding self-loops."""
        es = {(int(j), int(i)) for j, i in edges}
        es.update((i, i) for i in range(n))
        return cls(n, frozenset(es))

    def support(self) -> np.ndarray:
        """Boolean ``n x n`` mask with ``mask[i, j]`` true iff ``(j, i)`` is an edge."""
        s = np.zeros((self.n, self.n), dtype=bool)
        for j, i in self.edges:
            s[i, j] = True
        return s

    def in_neighbors(self, i: int) -> list[int]:
        return sorted(j for j, t in self.edges if t == i)

    def out_neighbors(self, i: int) -> list[int]:
        return sorted(t for j, t in self.edges if j == i)


@dataclass(frozen=True)
class SpectralCertificate:
    """Numeric stand-in for the geometric decay rate of a damped mixing matrix."""

    player: int
    rho: float
    margin: float = 1e-3

    @property
    def gamma(self) -> float:
        return self.rho + self.margin

    @property
    def valid(self) -> bool:
        return self.gamma < 1.0


@dataclass(frozen=True)
class Violation:
    """First offending entry found by one of the ``validate_*`` checks."""

    kind: str
    index: tuple
    value: float
    message: str

    def __str__(self):
        return self.message


# --------------------------------------------------------------------------
# topologies

def ring(n: int) -> DiGraph:
    """Directed cycle ``0 -> 1 -> ... -> n-1 -> 0``."""
    return successor_cycle(n, 1)


def successor_cycle(n: int, hops: int) -> DiGraph:
    """Each node sends to its next ``hops`` successors, cyclically."""
    edges = [(i, (i + h) % n) for i in range(n) for h in range(1, hops + 1)]
    return DiGraph.from_edges(n, edges)


def complete(n: int) -> DiGraph:
    return DiGraph.from_edges(n, [(j, i) for j in range(n) for i in range(n)])


TOPOLOGIES = {
    "ring": ring,
    "two-successor-cycle": lambda n: successor_cycle(n, 2),
    "three-successor-cycle": lambda n: successor_cycle(n, 3),
    "complete": complete,
}


def topology(name: str, n: int) -> DiGraph:
    """Look up a builtin topology by name."""
    try:
        return TOPOLOGIES[name](n)
    except KeyError:
        raise ValueError(f"unknown topology {name!r}; choose from {sorted(TOPOLOGIES)}") from None


def is_strongly_connected(g: DiGraph) -> bool:
    ncomp, _ = connected_components(g.support().astype(np.int8), directed=True, connection="strong")
    return ncomp == 1


# --------------------------------------------------------------------------
# weights

def balance_weights(g: DiGraph, max_iters: int = 100_000, tol: float = 1e-10) -> np.ndarray:
    """Doubly-stochastic weights supported on the edges of ``g``.

    Alternating row/column normalisation started from the 0/1 support
    pattern. A strongly connected graph with self-loops has total support,
    so the iteration converges and keeps every edge weight positive.

    Raises
    ------
    NonConvergence
        If row sums are not within ``tol`` of one after ``max_iters`` sweeps.
    """
    w = g.support().astype(float)
    err = np.inf
    for _ in range(max_iters):
        w /= w.sum(axis=1, keepdims=True)
        w /= w.sum(axis=0, keepdims=True)
        err = np.abs(w.sum(axis=1) - 1.0).max()
        if err <= tol:
            return w
    raise NonConvergence(f"balancing stalled at row error {err:.3e} after {max_iters} sweeps")


def validate_doubly_stochastic(w, tol: float = 1e-10, graph: DiGraph | None = None) -> Violation | None:
    """Return ``None`` if ``w`` is doubly stochastic, else the first violation.

    When ``graph`` is given the support of ``w`` must match its edge set.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        return Violation("shape", w.shape, np.nan, f"weight matrix must be square, got shape {w.shape}")
    neg = np.argwhere(w < 0)
    if len(neg):
        i, j = map(int, neg[0])
        return Violation("negative", (i, j), float(w[i, j]), f"negative weight {float(w[i, j])!r} at ({i}, {j})")
    if graph is not None:
        if graph.n != w.shape[0]:
            return Violation("shape", w.shape, np.nan, f"graph has {graph.n} nodes, matrix is {w.shape}")
        bad = np.argwhere((w > 0) != graph.support())
        if len(bad):
            i, j = map(int, bad[0])
            return Violation("support", (i, j), float(w[i, j]),
                             f"weight at ({i}, {j}) is {float(w[i, j])!r} but edge ({j}, {i}) is "
                             f"{'present' if graph.support()[i, j] else 'absent'}")
    rows = w.sum(axis=1)
    for i, s in enumerate(rows.tolist()):
        if abs(s - 1.0) > tol:
            return Violation("row", (i,), float(s), f"row {i} sums to {s!r}")
    cols = w.sum(axis=0)
    for j, s in enumerate(cols.tolist()):
        if abs(s - 1.0) > tol:
            return Violation("column", (j,), float(s), f"column {j} sums to {s!r}")
    return None


def validate_deltas(w, deltas) -> Violation | None:
    """Check ``0 <= deltas[l] * w[l, i] < 2 * w[l, l]`` for every ``l`` and ``i``."""
    w = np.asarray(w, dtype=float)
    d = np.broadcast_to(np.asarray(deltas, dtype=float), (w.shape[0],))
    for l in range(w.shape[0]):
        for i in range(w.shape[1]):
            v = float(d[l] * w[l, i])
            if not (0.0 <= v < 2.0 * w[l, l]):
                return Violation("delta", (l, i), v,
                                 f"delta[{l}] * w[{l}, {i}] = {v!r} outside [0, {float(2 * w[l, l])!r})")
    return None


def tilde_matrix(w, i: int, deltas) -> np.ndarray:
    """Mixing matrix with diagonal damped by the correction gains toward player ``i``.

    Off-diagonal entries are those of ``w``; diagonal entry ``l`` is
    ``|w[l, l] - deltas[l] * w[l, i]|``.
    """
    w = np.asarray(w, dtype=float)
    bad = validate_deltas(w, deltas)
    if bad is not None:
        raise InvalidDelta(bad.message)
    d = np.broadcast_to(np.asarray(deltas, dtype=float), (w.shape[0],))
    out = w.copy()
    diag = np.arange(w.shape[0])
    out[diag, diag] = np.abs(w[diag, diag] - d * w[:, i])
    return out


# --------------------------------------------------------------------------
# spectral machinery

def _perron_root(m, iters, tol, rng):
    # m irreducible and nonnegative: m + I is primitive, so power iteration
    # from a positive vector converges and the Collatz-Wielandt ratios
    # bracket the Perron root from both sides.
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    shifted = m + np.eye(n)
    v = rng.uniform(0.5, 1.5, size=n)
    v /= v.sum()
    lo = hi = np.nan
    for _ in range(iters):
        u = shifted @ v
        r = u / v
        lo, hi = r.min(), r.max()
        if hi - lo <= tol:
            return float(0.5 * (lo + hi) - 1.0)
        v = u / u.sum()
    raise NonConvergence(f"power iteration bracket [{lo - 1:.12g}, {hi - 1:.12g}] still open after {iters} iterations")


def spectral_radius(m, iters: int = 100_000, tol: float = 1e-10, seed: int = 0) -> float:
    """Largest eigenvalue modulus of a nonnegative square matrix.

    Power iteration with a strictly positive random start, run separately
    on every strongly connected block of the sparsity pattern (the radius
    of a reducible matrix is the largest block radius). Stops once the
    Collatz-Wielandt bounds are within ``tol`` of each other.

    Raises
    ------
    NonConvergence
        If some block's bracket does not close within ``iters`` iterations.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    if (m < 0).any():
        raise ValueError("matrix must be entrywise nonnegative")
    rng = np.random.default_rng(seed)
    ncomp, labels = connected_components((m > 0).astype(np.int8), directed=True, connection="strong")
    rho = 0.0
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        rho = max(rho, _perron_root(m[np.ix_(idx, idx)], iters, tol, rng))
    return rho


def spectral_certificate(w, i: int, deltas, margin: float = 1e-3, **kwargs) -> SpectralCertificate:
    """Estimate the decay rate of the damped mixing matrix for player ``i``."""
    rho = spectral_radius(tilde_matrix(w, i, deltas), **kwargs)
    return SpectralCertificate(player=i, rho=rho, margin=margin)


def decay_ratios(m, gamma: float, kmax: int = 200) -> np.ndarray:
    """``||m^k||_inf / gamma^k`` for ``k = 1..kmax`` by repeated multiplication.

    A bounded, eventually non-increasing sequence certifies
    ``||m^k||_inf <= c * gamma^k`` on the tested range.
    """
    m = np.asarray(m, dtype=float)
    p = np.eye(m.shape[0])
    out = np.empty(kmax)
    scale = 1.0
    for k in range(kmax):
        p = p @ m
        scale *= gamma
        out[k] = np.abs(p).sum(axis=1).max() / scale
    return out


# --------------------------------------------------------------------------
# text formats

def parse_graph(text: str) -> DiGraph:
    """Parse ``n <N>`` followed by 1-based ``<from> <to>`` lines.

    Blank lines and ``#`` comments are ignored; self-loops are added.
    """
    lines = [(no, ln.split("#", 1)[0].split()) for no, ln in enumerate(text.splitlines(), 1)]
    lines = [(no, toks) for no, toks in lines if toks]
    if not lines or lines[0][1][0] != "n" or len(lines[0][1]) != 2:
        raise ValueError("graph file must start with a line 'n <N>'")
    n = int(lines[0][1][1])
    edges = []
    for no, toks in lines[1:]:
        if len(toks) != 2:
            raise ValueError(f"line {no}: expected '<from> <to>', got {' '.join(toks)!r}")
        j, i = int(toks[0]) - 1, int(toks[1]) - 1
        if not (0 <= j < n and 0 <= i < n):
            raise ValueError(f"line {no}: endpoint outside 1..{n}")
        edges.append((j, i))
    return DiGraph.from_edges(n, edges)


def format_graph(g: DiGraph) -> str:
    body = "".join(f"{j + 1} {i + 1}\n" for j, i in sorted(g.edges) if j != i)
    return f"n {g.n}\n" + body


def read_graph(path) -> DiGraph:
    return parse_graph(Path(path).read_text())


def read_weights(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    w = np.array(rows, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"{path}: weight CSV must hold a square matrix, got shape {w.shape}")
    return w


def write_weights(w, path=None) -> str:
    """Emit ``w`` as CSV with 17 significant digits; also write to ``path`` if given."""
    buf = io.StringIO()
    for row in np.asarray(w, dtype=float):
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
