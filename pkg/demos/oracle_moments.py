"""
Two-point Gaussian-smoothing oracle.

For a quadratic cost the oracle is unbiased for the true partial at any
smoothing radius; its second moment stays below ``5 * d1**2``.
"""

import numpy as np

from gfnash import ActionSet, RandomSource, estimate_smoothed_grad, gf_oracle, hvac_game, second_moment_estimate
from gfnash.game import lipschitz_bounds

game = hvac_game()
box = ActionSet(0.0, 50.0)
spec = game.spec(box)

# one draw, by hand
print("single oracle value at 0 with xi = 1:", gf_oracle(spec, 0, np.zeros(5), 0.01, 1.0))

x = np.random.default_rng(1).uniform(0, 50, 5)
d1, _ = lipschitz_bounds(game, box)
for mu in (1.0, 0.1, 0.01):
    src = RandomSource(seed=7, stream=0)
    est = estimate_smoothed_grad(spec, 0, x, mu, 100_000, src)
    m2 = second_moment_estimate(spec, 0, x, mu, 100_000, src)
    z = (est.mean - game.partial(0, x)) / est.stderr
    print(f"mu={mu:<5} mean={est.mean:9.4f} partial={game.partial(0, x):9.4f} z={z:+.2f} "
          f"E[g^2]={m2.mean:10.1f} bound={5 * d1 ** 2:.0f}")
