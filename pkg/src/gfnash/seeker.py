"""
Leader-following consensus Nash equilibrium seeking.

Every round, each player ``i``

* queries the smoothing oracle at its own estimate vector ``y[i]`` and takes
  a projected step ``x_i <- P_i(x_i - alpha_k * g_i)``;
* mixes its in-neighbours' estimates and corrects the estimate of each
  in-neighbour ``j`` toward the true action ``x_j``:
  ``y[i, j] <- sum_l w[i, l] y[l, j] + delta_i w[i, j] (x_j - y[i, j])``.

All right-hand sides use the values at round ``k`` (synchronous update).
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .exceptions import EvaluationFailure, InvalidCertificate, InvalidDelta, MissingGradient, NumericOverflow
from .game import GameSpec
from .graph import SpectralCertificate, validate_deltas
from .metrics import consensus_error
from .oracle import MU_FLOOR, RandomSource, SmoothingSchedule, gf_oracle, player_sources

__all__ = [
    "GRADIENT_FREE",
    "GRADIENT_BASED",
    "StepSchedule",
    "RunConfig",
    "SeekerState",
    "RunRecord",
    "step",
    "gradient_step",
    "run",
    "admissible_alpha",
]

GRADIENT_FREE = "gradient-free"
GRADIENT_BASED = "gradient-based"


@dataclass(frozen=True)
class StepSchedule:
    """Step size ``alpha_k = alpha0 / (k + 1) ** exponent`` (or ``alpha0`` if constant)."""

    kind: str = "diminishing"
    alpha0: float = 0.1
    exponent: float = 0.5

    def __post_init__(self):
        if self.kind not in ("constant", "diminishing"):
            raise ValueError(f"step kind must be 'constant' or 'diminishing', got {self.kind!r}")
        if not self.alpha0 >= 0:
            raise ValueError("alpha0 must be nonnegative")

    def __call__(self, k: int) -> float:
        if self.kind == "constant":
            return self.alpha0
        return self.alpha0 / (k + 1) ** self.exponent

    @property
    def square_summable(self) -> bool:
        """Whether the sequence is non-summable but square-summable."""
        return self.kind == "diminishing" and 0.5 < self.exponent <= 1.0


@dataclass(frozen=True)
class RunConfig:
    iters: int = 10_000
    schedule: StepSchedule = field(default_factory=StepSchedule)
    smoothing: SmoothingSchedule = field(default_factory=SmoothingSchedule)
    deltas: object = 0.5
    seed: int = 0
    mode: str = GRADIENT_FREE
    record_stride: int = 1
    keep_estimates: bool = False

    def __post_init__(self):
        if self.iters < 0:
            raise ValueError("iters must be nonnegative")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if self.mode not in (GRADIENT_FREE, GRADIENT_BASED):
            raise ValueError(f"mode must be {GRADIENT_FREE!r} or {GRADIENT_BASED!r}, got {self.mode!r}")

    def delta_vector(self, n: int) -> np.ndarray:
        d = np.asarray(self.deltas, dtype=float)
        if d.ndim and d.shape != (n,):
            raise ValueError(f"expected {n} deltas, got {d.shape[0]}")
        return np.broadcast_to(d, (n,)).copy()


@dataclass(frozen=True)
class SeekerState:
    k: int
    x: np.ndarray
    y: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "SeekerState":
        return cls(0, np.zeros(n), np.zeros((n, n)))


@dataclass
class RunRecord:
    """Thinned trajectory of one run."""

    k: np.ndarray
    x: np.ndarray
    consensus: np.ndarray
    alpha: np.ndarray
    mu: np.ndarray
    final: SeekerState
    seed: int
    mode: str
    y: Optional[np.ndarray] = None
    mu_floor_hit: bool = False
    wall_time: float = 0.0


class _Kernel:
    """Precomputed arrays shared by every round of one run."""

    def __init__(self, g: GameSpec, w, cfg: RunConfig):
        w = np.asarray(w, dtype=float)
        if w.shape != (g.n, g.n):
            raise ValueError(f"weight matrix shape {w.shape} does not match {g.n} players")
        deltas = cfg.delta_vector(g.n)
        bad = validate_deltas(w, deltas)
        if bad is not None:
            raise InvalidDelta(bad.message)
        if cfg.mode == GRADIENT_BASED and g.grad is None and g.batch_grad is None:
            raise MissingGradient("gradient-based mode needs a game with gradients")
        self.g = g
        self.w = w
        self.cfg = cfg
        self.correction = deltas[:, None] * w
        self.lo = g.lo
        self.hi = g.hi
        self.diag = np.arange(g.n)

    def oracle(self, y, mu, xi):
        g = self.g
        if g.batch_cost is None:
            return np.array([gf_oracle(g, i, y[i], mu, xi[i]) for i in range(g.n)])
        probe = y.copy()
        probe[self.diag, self.diag] += mu * xi
        try:
            return (g.batch_cost(probe) - g.batch_cost(y)) / mu * xi
        except Exception as exc:
            raise EvaluationFailure(f"batched cost evaluation failed: {exc}") from exc

    def gradient(self, y):
        g = self.g
        if g.batch_grad is not None:
            return np.asarray(g.batch_grad(y), dtype=float)
        return np.array([g.grad(i, y[i]) for i in range(g.n)])

    def advance(self, k, x, y, gvals):
        alpha = self.cfg.schedule(k)
        x_new = np.clip(x - alpha * gvals, self.lo, self.hi)
        y_new = self.w @ y + self.correction * (x[None, :] - y)
        if not (np.isfinite(x_new).all() and np.isfinite(y_new).all()):
            raise NumericOverflow(k)
        return x_new, y_new

    def round(self, k, x, y, rng):
        if self.cfg.mode == GRADIENT_BASED:
            return self.advance(k, x, y, self.gradient(y))
        xi = np.array([src.normal() for src in rng])
        return self.advance(k, x, y, self.oracle(y, self.cfg.smoothing(k), xi))


def _check_state(state: SeekerState, n: int):
    if state.x.shape != (n,) or state.y.shape != (n, n):
        raise ValueError(f"state shapes {state.x.shape}, {state.y.shape} do not match {n} players")


def step(state: SeekerState, g: GameSpec, w, cfg: RunConfig, rng) -> SeekerState:
    """One synchronous gradient-free round.

    ``rng`` holds one :class:`RandomSource` per player; each contributes
    exactly one draw.
    """
    _check_state(state, g.n)
    kern = _Kernel(g, w, replace(cfg, mode=GRADIENT_FREE))
    x, y = kern.round(state.k, state.x, state.y, rng)
    return SeekerState(state.k + 1, x, y)


def gradient_step(state: SeekerState, g: GameSpec, w, cfg: RunConfig, rng=None) -> SeekerState:
    """One synchronous round with the true own-action partial at ``y[i]``.

    ``rng`` is accepted for signature parity with :func:`step` and unused.
    """
    _check_state(state, g.n)
    kern = _Kernel(g, w, replace(cfg, mode=GRADIENT_BASED))
    x, y = kern.round(state.k, state.x, state.y, rng)
    return SeekerState(state.k + 1, x, y)


def run(g: GameSpec, w, cfg: RunConfig, init_x=None, init_y=None) -> RunRecord:
    """Iterate ``cfg.iters`` rounds from the given (default all-zero) state.

    The state is recorded at ``k = 0``, every ``cfg.record_stride`` rounds
    and at the final round. Randomness comes from ``cfg.seed`` only.
    """
    t0 = time.perf_counter()
    n = g.n
    kern = _Kernel(g, w, cfg)
    x = np.zeros(n) if init_x is None else np.array(init_x, dtype=float)
    y = np.zeros((n, n)) if init_y is None else np.array(init_y, dtype=float)
    _check_state(SeekerState(0, x, y), n)
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("initial state must be finite")
    rng = player_sources(cfg.seed, n)

    ks, xs, ys, cons, alphas, mus = [], [], [], [], [], []

    def record(k):
        ks.append(k)
        xs.append(x.copy())
        cons.append(consensus_error(x, y))
        alphas.append(cfg.schedule(k))
        mus.append(cfg.smoothing(k))
        if cfg.keep_estimates:
            ys.append(y.copy())

    record(0)
    for k in range(cfg.iters):
        x, y = kern.round(k, x, y, rng)
        if (k + 1) % cfg.record_stride == 0 or k + 1 == cfg.iters:
            record(k + 1)

    floor_hit = cfg.mode == GRADIENT_FREE and cfg.iters > 0 and cfg.smoothing.raw(cfg.iters - 1) < MU_FLOOR
    return RunRecord(
        k=np.array(ks), x=np.array(xs), consensus=np.array(cons),
        alpha=np.array(alphas), mu=np.array(mus),
        final=SeekerState(cfg.iters, x, y), seed=cfg.seed, mode=cfg.mode,
        y=np.array(ys) if cfg.keep_estimates else None,
        mu_floor_hit=bool(floor_hit), wall_time=time.perf_counter() - t0,
    )


def admissible_alpha(chi: float, lhat: float, bbound: float, cert: SpectralCertificate,
                     n: int, C: float | None = None) -> tuple:
    """Constant step sizes with ``0 < 2 chi a - q a^2 < 1``.

    Here ``q = lhat * (gamma * n * C * bbound / (1 - gamma) + bbound)`` with
    ``gamma`` taken from the certificate. Returns a tuple of disjoint open
    intervals ``(lo, hi)``; it is empty when no step qualifies.

    The geometric-decay prefactor ``C`` has no computable closed form; it
    defaults to 1 with a warning, so the result is a diagnostic rather than
    a guarantee.
    """
    if not chi > 0:
        raise ValueError(f"chi must be positive, got {chi!r}")
    gamma = cert.gamma
    if not gamma < 1:
        raise InvalidCertificate(f"certificate gamma {gamma!r} is not below 1")
    if C is None:
        warnings.warn("decay prefactor C unknown; using C = 1", stacklevel=2)
        C = 1.0
    q = lhat * (gamma * n * C * bbound / (1 - gamma) + bbound)
    if q <= 0:
        return ((0.0, 1.0 / (2 * chi)),)
    upper = 2 * chi / q
    disc = chi * chi - q
    if disc < 0:
        return ((0.0, upper),)
    root = np.sqrt(disc)
    r1, r2 = (chi - root) / q, (chi + root) / q
    # the expression reaches 1 on [r1, r2]
    return ((0.0, r1), (r2, upper))
