"""
Two-point Gaussian-smoothing oracle and Monte Carlo checks of its moments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DegenerateSmoothing
from .game import GameSpec, eval_cost

__all__ = [
    "MU_FLOOR",
    "SmoothingSchedule",
    "RandomSource",
    "player_sources",
    "Estimate",
    "gf_oracle",
    "estimate_smoothed_grad",
    "smoothed_cost_estimate",
    "second_moment_estimate",
]

MU_FLOOR = 1e-12


@dataclass(frozen=True)
class SmoothingSchedule:
    """Smoothing radius ``mu_k = mu0 / (k + 1) ** exponent`` (or ``mu0`` if constant)."""

    kind: str = "diminishing"
    mu0: float = 1e-2
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in ("constant", "diminishing"):
            raise ValueError(f"smoothing kind must be 'constant' or 'diminishing', got {self.kind!r}")
        if not self.mu0 > 0:
            raise ValueError("mu0 must be positive")
        if self.kind == "diminishing" and not self.exponent > 0:
            raise ValueError("diminishing smoothing needs a positive exponent")

    def raw(self, k: int) -> float:
        if self.kind == "constant":
            return self.mu0
        return self.mu0 / (k + 1) ** self.exponent

    def __call__(self, k: int) -> float:
        return max(self.raw(k), MU_FLOOR)


class RandomSource:
    """Reproducible standard-normal stream ``stream`` of master seed ``seed``.

    Streams of the same seed are independent (``SeedSequence`` spawn keys).
    Draws are buffered in blocks; the values are the same as drawing one at
    a time, so ``(seed, stream, draw index)`` fixes every variate.
    """

    _BLOCK = 4096

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._gen = np.random.Generator(np.random.PCG64(ss))
        self._buf = np.empty(0)
        self._pos = 0
        self.drawn = 0

    def normal(self, size=None):
        if size is None:
            if self._pos >= len(self._buf):
                self._buf = self._gen.standard_normal(self._BLOCK)
                self._pos = 0
            v = self._buf[self._pos]
            self._pos += 1
            self.drawn += 1
            return float(v)
        n = int(np.prod(size))
        take = min(n, len(self._buf) - self._pos)
        head = self._buf[self._pos:self._pos + take]
        self._pos += take
        tail = self._gen.standard_normal(n - take)
        self.drawn += n
        return np.concatenate([head, tail]).reshape(size)

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream={self.stream}, drawn={self.drawn})"


def player_sources(seed: int, n: int) -> list[RandomSource]:
    """One independent stream per player, all derived from ``seed``."""
    return [RandomSource(seed, i) for i in range(n)]


class Estimate(NamedTuple):
    mean: float
    stderr: float


def gf_oracle(g: GameSpec, i: int, y, mu: float, xi: float) -> float:
    """Two-point smoothed-gradient estimate for player ``i`` at estimate vector ``y``.

    Returns ``(f_i(y + mu * xi * e_i) - f_i(y)) / mu * xi`` using exactly two
    cost evaluations. The probe is not projected onto the action set.
    """
    if not mu > 0:
        raise DegenerateSmoothing(f"smoothing radius must be positive, got {mu!r}")
    y = np.asarray(y, dtype=float)
    probe = y.copy()
    probe[i] += mu * xi
    return (eval_cost(g, i, probe) - eval_cost(g, i, y)) / mu * xi


def _mean_stderr(v) -> Estimate:
    v = np.asarray(v, dtype=float)
    return Estimate(float(v.mean()), float(v.std(ddof=1) / np.sqrt(len(v))))


def _probe_costs(g, i, x, mu, xi):
    # cost at x + mu * xi_s * e_i for every draw
    x = np.asarray(x, dtype=float)
    pts = np.repeat(x[None, :], len(xi), axis=0)
    pts[:, i] += mu * xi
    if g.vectorized:
        return np.asarray(eval_cost(g, i, pts), dtype=float)
    return np.array([eval_cost(g, i, p) for p in pts])


def estimate_smoothed_grad(g: GameSpec, i: int, x, mu: float, samples: int, rng: RandomSource) -> Estimate:
    """Monte Carlo mean and standard error of the oracle over ``samples`` draws.

    The mean estimates the derivative of the smoothed cost in ``x_i``.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    if not mu > 0:
        raise DegenerateSmoothing(f"smoothing radius must be positive, got {mu!r}")
    xi = rng.normal(samples)
    base = eval_cost(g, i, np.asarray(x, dtype=float))
    return _mean_stderr((_probe_costs(g, i, x, mu, xi) - base) / mu * xi)


def smoothed_cost_estimate(g: GameSpec, i: int, x, mu: float, samples: int, rng: RandomSource) -> Estimate:
    """Monte Carlo estimate of the Gaussian-smoothed cost ``E f_i(x_i + mu xi, x_-i)``."""
    if samples < 2:
        raise ValueError("need at least two samples")
    return _mean_stderr(_probe_costs(g, i, x, mu, rng.normal(samples)))


def second_moment_estimate(g: GameSpec, i: int, x, mu: float, samples: int, rng: RandomSource) -> Estimate:
    """Sample mean (with standard error) of the squared oracle output."""
    if samples < 2:
        raise ValueError("need at least two samples")
    if not mu > 0:
        raise DegenerateSmoothing(f"smoothing radius must be positive, got {mu!r}")
    xi = rng.normal(samples)
    base = eval_cost(g, i, np.asarray(x, dtype=float))
    gvals = (_probe_costs(g, i, x, mu, xi) - base) / mu * xi
    return _mean_stderr(gvals ** 2)
