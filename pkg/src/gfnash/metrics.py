"""Error metrics shared by the iteration and the experiment harness."""

import numpy as np

from .exceptions import DegenerateReference


def relative_error(x, xstar) -> float:
    """``||x - xstar|| / ||xstar||``."""
    x = np.asarray(x, dtype=float)
    xstar = np.asarray(xstar, dtype=float)
    ref = np.sqrt((xstar ** 2).sum())
    if ref == 0:
        raise DegenerateReference("reference equilibrium has zero norm")
    return float(np.sqrt(((x - xstar) ** 2).sum(axis=-1)) / ref)


def consensus_error(x, y) -> float:
    """Largest gap between any action ``x[j]`` and any player's estimate ``y[i, j]``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.abs(y - x[None, :]).max())
