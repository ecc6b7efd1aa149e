"""
Games with scalar actions on compact intervals.

:class:`GameSpec` is the black-box view used by the seeking iteration: it
only needs cost values. :class:`QuadraticGame` is the closed-form energy
consumption game

    f_i(x) = a_i (x_i - xr_i)^2 + (b * sum(x) + c) * x_i

which also supplies gradients, a linear-system equilibrium oracle and the
constants that appear in the step-size conditions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import EvaluationFailure, NotInterior, NotMonotone, SingularSystem

__all__ = [
    "ActionSet",
    "GameSpec",
    "QuadraticGame",
    "DerivedConstants",
    "hvac_game",
    "project",
    "eval_cost",
    "solve_quadratic_ne",
    "monotonicity_constant",
    "lipschitz_bounds",
    "derived_constants",
]


@dataclass(frozen=True)
class ActionSet:
    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("action set bounds must be finite")
        if self.lo > self.hi:
            raise ValueError(f"empty action set [{self.lo}, {self.hi}]")


def _as_sets(sets, n) -> tuple:
    if isinstance(sets, ActionSet):
        return (sets,) * n
    sets = tuple(sets)
    if len(sets) != n:
        raise ValueError(f"expected {n} action sets, got {len(sets)}")
    return sets


@dataclass(frozen=True)
class GameSpec:
    """Black-box game.

    Parameters
    ----------
    n : int
        Number of players.
    sets : sequence of ActionSet
        Per-player action interval.
    cost : callable
        ``cost(i, x) -> float`` for a full action vector ``x``. Must be
        defined slightly outside the action sets, since oracle probes are
        not projected.
    grad : callable, optional
        ``grad(i, x) -> float``, the partial derivative of player ``i``'s
        cost in its own action. Only needed for the gradient-based baseline.
    batch_cost, batch_grad : callable, optional
        ``batch_cost(Y)`` returns ``[cost(i, Y[i]) for i in range(n)]``;
        used as a fast path by the iteration when present.
    vectorized : bool
        True if ``cost(i, X)`` accepts a stack of points ``X`` of shape
        ``(m, n)`` and returns ``m`` values.
    """

    n: int
    sets: tuple
    cost: Callable
    grad: Optional[Callable] = None
    batch_cost: Optional[Callable] = None
    batch_grad: Optional[Callable] = None
    vectorized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "sets", _as_sets(self.sets, self.n))

    @property
    def lo(self) -> np.ndarray:
        return np.array([s.lo for s in self.sets])

    @property
    def hi(self) -> np.ndarray:
        return np.array([s.hi for s in self.sets])


@dataclass(frozen=True)
class QuadraticGame:
    """Energy consumption game with per-player quadratic discomfort."""

    a: np.ndarray
    b: float
    c: float
    xr: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        xr = np.atleast_1d(np.asarray(self.xr, dtype=float))
        a = np.broadcast_to(a, xr.shape).copy()
        if (a <= 0).any():
            raise ValueError("all a_i must be positive")
        if self.b < 0:
            raise ValueError("b must be nonnegative")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "xr", xr)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", float(self.c))

    @property
    def n(self) -> int:
        return len(self.xr)

    def cost(self, i, x):
        """Cost of player ``i``; ``x`` may carry leading batch dimensions."""
        x = np.asarray(x, dtype=float)
        xi = x[..., i]
        return self.a[i] * (xi - self.xr[i]) ** 2 + (self.b * x.sum(axis=-1) + self.c) * xi

    def partial(self, i, x):
        """Derivative of player ``i``'s cost in its own action."""
        x = np.asarray(x, dtype=float)
        xi = x[..., i]
        return 2 * self.a[i] * (xi - self.xr[i]) + self.b * x.sum(axis=-1) + self.c + self.b * xi

    def batch_cost(self, y):
        y = np.asarray(y, dtype=float)
        own = np.diagonal(y)
        return self.a * (own - self.xr) ** 2 + (self.b * y.sum(axis=1) + self.c) * own

    def batch_grad(self, y):
        y = np.asarray(y, dtype=float)
        own = np.diagonal(y)
        return 2 * self.a * (own - self.xr) + self.b * y.sum(axis=1) + self.c + self.b * own

    def game_mapping(self, x) -> np.ndarray:
        """Stacked own-action partial derivatives."""
        x = np.asarray(x, dtype=float)
        return 2 * self.a * (x - self.xr) + self.b * x.sum(axis=-1, keepdims=True) + self.c + self.b * x

    def jacobian(self) -> np.ndarray:
        return np.full((self.n, self.n), self.b) + np.diag(2 * self.a + self.b)

    def spec(self, sets) -> GameSpec:
        return GameSpec(self.n, _as_sets(sets, self.n), cost=self.cost, grad=self.partial,
                        batch_cost=self.batch_cost, batch_grad=self.batch_grad, vectorized=True)


def hvac_game(n: int = 5, a=1.0, b=0.1, c=10.0, xr=None) -> QuadraticGame:
    """HVAC energy game with the simulation defaults.

    ``xr`` defaults to ``(10, 15, 20, 25, 30)`` for five players and to
    ``2 * i`` (1-based ``i``) otherwise.
    """
    if xr is None:
        xr = [10.0, 15.0, 20.0, 25.0, 30.0] if n == 5 else 2.0 * np.arange(1, n + 1)
    return QuadraticGame(a=a, b=b, c=c, xr=xr)


@dataclass(frozen=True)
class DerivedConstants:
    d1: float
    d2: float
    bbound: float
    chi: float
    lhat: float


def project(s: ActionSet, v):
    """Euclidean projection onto ``[s.lo, s.hi]``."""
    return np.clip(v, s.lo, s.hi)


def eval_cost(g: GameSpec, i: int, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != g.n:
        raise ValueError(f"action vector has length {x.shape[-1]}, game has {g.n} players")
    try:
        return g.cost(i, x)
    except Exception as exc:
        raise EvaluationFailure(f"cost evaluation for player {i} failed: {exc}") from exc


def solve_quadratic_ne(q: QuadraticGame, sets) -> np.ndarray:
    """Interior Nash equilibrium from the stacked first-order conditions.

    Solves ``(2 a_i + 2 b) x_i + b * sum_{j != i} x_j = 2 a_i xr_i - c``.

    Raises
    ------
    SingularSystem
        If the linear system is (numerically) singular.
    NotInterior
        If the solution touches or leaves an action set; the constrained
        equilibrium is then a complementarity problem this oracle does not
        handle.
    """
    sets = _as_sets(sets, q.n)
    m = q.jacobian()
    rhs = 2 * q.a * q.xr - q.c
    if np.linalg.cond(m) > 1e12:
        raise SingularSystem(f"first-order system is ill-conditioned (cond={np.linalg.cond(m):.3e})")
    try:
        x = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    for i, s in enumerate(sets):
        if not (s.lo < x[i] < s.hi):
            raise NotInterior(f"player {i}: equilibrium action {x[i]!r} not strictly inside [{s.lo}, {s.hi}]")
    return x


def monotonicity_constant(q: QuadraticGame) -> float:
    """Strong-monotonicity modulus of the game mapping.

    The smallest eigenvalue of the symmetric part of the mapping's
    Jacobian (``2 a_i + 2 b`` on the diagonal, ``b`` elsewhere).
    """
    j = q.jacobian()
    chi = float(np.linalg.eigvalsh(0.5 * (j + j.T)).min())
    if chi <= 0:
        raise NotMonotone(f"game mapping is not strongly monotone (chi={chi!r})")
    return chi


def _affine_abs_max(coef, const, lo, hi):
    # max of |const + coef @ x| over the box [lo, hi]; attained at a corner
    top = const + np.where(coef > 0, coef * hi, coef * lo).sum()
    bot = const + np.where(coef > 0, coef * lo, coef * hi).sum()
    return max(abs(top), abs(bot))


def lipschitz_bounds(q: QuadraticGame, sets) -> tuple[float, float]:
    """Exact ``(d1, d2)`` over the box of action sets.

    ``d1`` bounds ``|df_i/dx_i|`` and ``d2`` bounds the norm of the gradient
    with respect to the other players' actions. Both partials are affine,
    so their extremes sit at corners of the box; each corner maximum is
    found coordinate-wise instead of by enumerating ``2^N`` corners.
    """
    sets = _as_sets(sets, q.n)
    lo = np.array([s.lo for s in sets])
    hi = np.array([s.hi for s in sets])
    n = q.n
    d1 = 0.0
    for i in range(n):
        coef = np.full(n, q.b)
        coef[i] = 2 * q.a[i] + 2 * q.b
        d1 = max(d1, _affine_abs_max(coef, -2 * q.a[i] * q.xr[i] + q.c, lo, hi))
    # df_i/dx_j = b x_i for every j != i
    d2 = max(q.b * max(abs(lo[i]), abs(hi[i])) * np.sqrt(n - 1) for i in range(n))
    return float(d1), float(d2)


def derived_constants(q: QuadraticGame, sets, mu: float) -> DerivedConstants:
    """Constants entering the oracle moment bound and the step-size condition.

    ``mu`` is the reference smoothing radius used for the smoothed-gradient
    Lipschitz constants ``d1 / mu`` and ``d2 / mu``.
    """
    if mu <= 0:
        raise ValueError("reference smoothing radius must be positive")
    d1, d2 = lipschitz_bounds(q, sets)
    lhat = d1 / mu + np.sqrt(q.n - 1) * d2 / mu
    return DerivedConstants(d1=d1, d2=d2, bbound=float(np.sqrt(5.0) * d1),
                            chi=monotonicity_constant(q), lhat=float(lhat))
