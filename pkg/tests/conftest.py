"""Shared fixtures: tiny named graphs and exact determinantal-law oracles."""

import itertools

import numpy as np
import pytest

from graphdpp import Graph


@pytest.fixture
def k2():
    return Graph(2, [(0, 1, 1.0)])


@pytest.fixture
def p3():
    return Graph(3, [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])


@pytest.fixture
def two_k2():
    return Graph(4, [(0, 1, 1.0), (2, 3, 1.0)])


@pytest.fixture
def edgeless5():
    return Graph(5, [])


def dpp_exact_law(kernel_matrix):
    """Exact subset law of a determinantal process, straight from the
    inclusion probabilities: P(A = S) obtained by Moebius inversion of
    P(T subset of A) = det(K_T) over all supersets T of S.

    Independent of any sampling code; practical up to ~10 items.
    """
    k = np.asarray(kernel_matrix, dtype=float)
    n = k.shape[0]
    law = {}
    for s in range(1 << n):
        s_idx = [i for i in range(n) if s >> i & 1]
        rest = [i for i in range(n) if not s >> i & 1]
        total = 0.0
        for extra in range(1 << len(rest)):
            t_idx = s_idx + [rest[i] for i in range(len(rest)) if extra >> i & 1]
            sign = -1.0 if bin(extra).count("1") % 2 else 1.0
            sub = k[np.ix_(t_idx, t_idx)]
            det = np.linalg.det(sub) if t_idx else 1.0
            total += sign * det
        law[frozenset(s_idx)] = total
    return law


def empirical_tv(samples, law):
    """Total-variation distance between an empirical subset distribution
    (list of index iterables) and an exact law (frozenset -> probability)."""
    counts = {}
    for s in samples:
        key = frozenset(int(i) for i in s)
        counts[key] = counts.get(key, 0) + 1
    total = len(samples)
    keys = set(counts) | set(law)
    return 0.5 * sum(abs(counts.get(k, 0) / total - law.get(k, 0.0)) for k in keys)


def exhaustive_best_volume(u_k):
    """Largest determinant of the restriction Gram over all size-k node sets."""
    n, k = u_k.shape
    best = 0.0
    for nodes in itertools.combinations(range(n), k):
        sub = u_k[list(nodes), :]
        best = max(best, abs(np.linalg.det(sub.T @ sub)))
    return best
