"""Shared builders and independent desk-scale oracles for the test suite.

The oracles here intentionally avoid the library's vectorized paths: the
extension is summed subset by subset in plain Python, so agreement with the
fast implementations is evidence, not circularity.
"""

import numpy as np

import submax as sm


def brute_force_extension(f, x):
    """F(x) by direct summation over all subsets (independent oracle)."""
    n = f.n
    total = 0.0
    for mask in range(1 << n):
        p = 1.0
        for i in range(n):
            p *= x[i] if (mask >> i) & 1 else (1.0 - x[i])
        total += p * f.value_mask(mask)
    return total


def random_cut(rng, n, p=0.4):
    while True:
        keep = rng.random((n, n)) < p
        np.fill_diagonal(keep, False)
        pairs = np.argwhere(keep)
        if pairs.size:
            break
    return sm.DirectedCut(n, [(int(a), int(b), float(1.0 - rng.random()))
                              for a, b in pairs])


def random_coverage(rng, n, m=None):
    m = m or 2 * n
    while True:
        inc = rng.random((n, m)) < 0.3
        if inc.any():
            break
    covers = [np.nonzero(inc[i])[0].tolist() for i in range(n)]
    return sm.Coverage(n, covers, (1.0 - rng.random(m)).tolist())


def random_table_function(rng, n):
    """Nonnegative submodular by construction: cut plus coverage mixture."""
    table = random_cut(rng, n).full_table() + random_coverage(rng, n).full_table()
    return sm.ExplicitTable(n, table)


def random_function(rng, n):
    k = int(rng.integers(3))
    if k == 0:
        return random_cut(rng, n)
    if k == 1:
        return random_coverage(rng, n)
    return random_table_function(rng, n)


def random_constraint(rng, n):
    k = int(rng.integers(3))
    if k == 0:
        return sm.CardinalityPolytope(n, int(rng.integers(1, max(2, n // 2) + 1)))
    if k == 1:
        half = n // 2
        blocks = [list(range(half)), list(range(half, n))]
        budgets = [int(rng.integers(1, half + 1)), int(rng.integers(1, n - half + 1))]
        return sm.PartitionMatroidPolytope(n, blocks, budgets)
    costs = 0.5 + rng.random(n)
    return sm.KnapsackPolytope(n, costs, float(rng.uniform(0.3, 0.7) * costs.sum()))


def random_box(rng, n):
    a = rng.random(n)
    b = rng.random(n)
    return sm.Point(np.minimum(a, b)), sm.Point(np.maximum(a, b))
