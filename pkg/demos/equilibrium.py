"""
Equilibrium of the five-player HVAC game and the constants derived from it.
"""

import numpy as np

from gfnash import ActionSet, derived_constants, hvac_game, monotonicity_constant, solve_quadratic_ne

game = hvac_game()                # a=1, b=0.1, c=10, xr=(10, 15, 20, 25, 30)
box = ActionSet(0.0, 50.0)

xstar = solve_quadratic_ne(game, box)
print("equilibrium:", np.round(xstar, 6))
print("total load: ", xstar.sum(), "(closed form", 150 / 2.6, ")")

# at an interior equilibrium every player's own partial vanishes
print("partials at x*:", [f"{game.partial(i, xstar):+.1e}" for i in range(5)])

# a unilateral deviation never helps
rng = np.random.default_rng(0)
for i in range(5):
    x = xstar.copy()
    x[i] += rng.normal(scale=2.0)
    assert game.cost(i, x) >= game.cost(i, xstar)

chi = monotonicity_constant(game)
dc = derived_constants(game, box, mu=0.01)
print(f"chi = {chi}, d1 = {dc.d1}, d2 = {dc.d2}, B = {dc.bbound:.3f}, L-hat(mu=0.01) = {dc.lhat:.0f}")
