"""
One gradient-free seeking run on the five-node ring, then a few seeds.
"""

import numpy as np

from gfnash import ActionSet, RunConfig, balance_weights, hvac_game, ring, run, solve_quadratic_ne
from gfnash.harness import ExperimentSpec, run_experiment
from gfnash.metrics import relative_error

game = hvac_game()
box = ActionSet(0.0, 50.0)
w = balance_weights(ring(5))
xstar = solve_quadratic_ne(game, box)

# steps 0.1/sqrt(k+1), smoothing 0.01/(k+1), deltas 0.5, zero start
rec = run(game.spec(box), w, RunConfig(iters=10_000, seed=0, record_stride=1000))
for k, x, ce in zip(rec.k, rec.x, rec.consensus):
    print(f"k={k:>6}  rel_err={relative_error(x, xstar):.3e}  consensus_err={ce:.3e}")
print("final actions:", np.round(rec.final.x, 6))
print(f"wall time {rec.wall_time:.2f} s")

# across seeds
res = run_experiment(ExperimentSpec(run=RunConfig(iters=2000, record_stride=500), seeds=range(5)))
for k, m in zip(res.k, res.rel_err_mean):
    print(f"k={k:>5}  mean rel_err over 5 seeds = {m:.3e}")
