"""
Balanced weights on directed graphs and the decay of the damped mixing matrix.
"""

import numpy as np

from gfnash import balance_weights, spectral_certificate, tilde_matrix, topology, validate_doubly_stochastic
from gfnash.graph import decay_ratios, format_graph, write_weights

for name in ("ring", "two-successor-cycle", "three-successor-cycle"):
    g = topology(name, 5)
    w = balance_weights(g)
    assert validate_doubly_stochastic(w, 1e-10, graph=g) is None
    certs = [spectral_certificate(w, i, 0.5) for i in range(5)]
    print(f"{name:>22}: {len(g.edges) - 5} arcs, diag weight {w[0, 0]:.3f}, "
          f"rho = {max(c.rho for c in certs):.6f}")

g = topology("ring", 5)
print("\nring in file form:\n" + format_graph(g))
w = balance_weights(g)
print(write_weights(w))

# the infinity norm of powers decays at the certified rate
cert = spectral_certificate(w, 0, 0.5)
r = decay_ratios(tilde_matrix(w, 0, 0.5), cert.gamma, 200)
print(f"||A^k|| / gamma^k: k=1 {r[0]:.3f}, k=50 {r[49]:.3f}, k=200 {r[-1]:.3f}")
print("largest ratio:", np.round(r.max(), 3))
