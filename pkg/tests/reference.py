"""
Independent reference computations for the test suite.

Nothing here imports the package; each helper solves its problem by a
different route than the library does (best-response sweeps instead of a
linear solve, dense eigensolvers instead of power iteration, brute-force
corner enumeration, grid scans).
"""

import itertools

import numpy as np


def hvac_cost(a, b, c, xr, i, x):
    x = np.asarray(x, dtype=float)
    return a[i] * (x[i] - xr[i]) ** 2 + (b * x.sum() + c) * x[i]


def best_response_ne(a, b, c, xr, lo, hi, tol=1e-10, max_sweeps=100_000):
    """Gauss-Seidel best-response iteration to a fixed point.

    Player i minimises a_i (x_i - xr_i)^2 + (b (x_i + s) + c) x_i over
    [lo_i, hi_i] with s the others' total, which has the closed-form
    minimiser (2 a_i xr_i - c - b s) / (2 a_i + 2 b).
    """
    a, xr = np.asarray(a, float), np.asarray(xr, float)
    n = len(xr)
    lo, hi = np.broadcast_to(lo, n), np.broadcast_to(hi, n)
    x = np.clip(xr.copy(), lo, hi)
    for _ in range(max_sweeps):
        prev = x.copy()
        for i in range(n):
            s = x.sum() - x[i]
            x[i] = np.clip((2 * a[i] * xr[i] - c - b * s) / (2 * a[i] + 2 * b), lo[i], hi[i])
        if np.abs(x - prev).max() < tol:
            return x
    raise RuntimeError("best response did not settle")


def random_quadratic(rng, n):
    a = rng.uniform(0.5, 3.0, n)
    b = float(rng.uniform(0.01, 0.5))
    c = float(rng.uniform(-5, 5))
    xr = rng.uniform(5, 40, n)
    return a, b, c, xr


def own_partial(a, b, c, xr, i, x):
    x = np.asarray(x, dtype=float)
    return 2 * a[i] * (x[i] - xr[i]) + b * x.sum() + c + b * x[i]


def corner_lipschitz(a, b, c, xr, lo, hi):
    """(d1, d2) by evaluating the partials at every corner of the box."""
    n = len(xr)
    d1 = d2 = 0.0
    for corner in itertools.product(*zip(lo, hi)):
        x = np.array(corner, dtype=float)
        for i in range(n):
            d1 = max(d1, abs(own_partial(a, b, c, xr, i, x)))
            others = np.full(n - 1, b * x[i])
            d2 = max(d2, float(np.linalg.norm(others)))
    return d1, d2


def dense_spectral_radius(m):
    return float(np.abs(np.linalg.eigvals(np.asarray(m, float))).max())


def random_strong_digraph(rng, n, extra):
    """0-based (source, target) edges: a random Hamiltonian cycle plus ``extra`` random arcs."""
    perm = rng.permutation(n)
    edges = {(int(perm[k]), int(perm[(k + 1) % n])) for k in range(n)}
    for _ in range(extra):
        j, i = rng.integers(0, n, 2)
        edges.add((int(j), int(i)))
    edges.update((i, i) for i in range(n))
    return edges


def reachable_all(n, edges):
    """Strong connectivity by breadth-first search both ways from node 0."""
    def reach(adj):
        seen, stack = {0}, [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == n

    fwd = {u: [] for u in range(n)}
    bwd = {u: [] for u in range(n)}
    for j, i in edges:
        fwd[j].append(i)
        bwd[i].append(j)
    return reach(fwd) and reach(bwd)


def admissible_mask(alphas, chi, q):
    """Pointwise test of 0 < 2 chi a - q a^2 < 1."""
    v = 2 * chi * alphas - q * alphas ** 2
    return (v > 0) & (v < 1)
