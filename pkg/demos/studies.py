"""
Short versions of the experimental studies: topology, player count,
gradient-free against gradient-based, and constant-step plateaus.

Sizes are cut down so the script finishes in well under a minute.
"""

from dataclasses import replace

from gfnash.harness import ExperimentSpec, GameConfig, GraphConfig, compare, plateau, sweep
from gfnash.seeker import RunConfig, StepSchedule

seeds = range(10)

# denser graphs track other players' actions faster early on
short = ExperimentSpec(run=RunConfig(iters=100, record_stride=100), seeds=seeds)
for name, res in sweep(short, "topology", ["ring", "two-successor-cycle", "three-successor-cycle"]):
    print(f"{name:>22}: mean rel_err at k=100 = {res.rel_err_mean[-1]:.4f}")

# more players, slower start; equilibria go negative for N >= 10, hence the wider box
wide = replace(short, game=GameConfig(lo=-100, hi=100), graph=GraphConfig("two-successor-cycle"))
for n, res in sweep(wide, "N", [10, 20, 30, 40]):
    print(f"N={n}: mean rel_err at k=100 = {res.rel_err_mean[-1]:.4f}")

# first iteration where the seed-averaged error drops to 0.1
report = compare(ExperimentSpec(run=RunConfig(iters=500), seeds=seeds))
print("\n".join(report.lines()))

# halving a constant step roughly halves the steady-state error
const = ExperimentSpec(run=RunConfig(iters=5000, schedule=StepSchedule("constant", 0.1), record_stride=10),
                       seeds=seeds)
(_, a), (_, b) = sweep(const, "alpha0", [0.1, 0.05])
print(f"plateau ratio: rel_err {plateau(b.k, b.rel_err_mean) / plateau(a.k, a.rel_err_mean):.3f}, "
      f"consensus {plateau(b.k, b.consensus_mean) / plateau(a.k, a.consensus_mean):.3f}")
