"""Deterministic sampling-set optimization and the i.i.d. leverage baseline."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .dpp import SamplingSet
from .errors import DegenerateBasis, InvalidDistribution, InvalidParams, NoConvergence

_RANK_TOL = 1e-12


class ObjectiveKind(Enum):
    """Figure of merit for a size-k node set, over the singular values of
    the row-restricted basis: worst-case error maximizes the smallest one,
    mean square error minimizes the summed inverse squares, maximum volume
    maximizes the product of squares."""

    WCE = "wce"
    MSE = "mse"
    MV = "mv"


def singular_values_restriction(u_k: np.ndarray, nodes) -> np.ndarray:
    """Ascending singular values of the rows of u_k indexed by the node list."""
    nodes = np.asarray(nodes, dtype=np.int64)
    sub = u_k[nodes, :]
    return np.linalg.svd(sub, compute_uv=False)[::-1]


def _score(kind: ObjectiveKind, gram_eigs: np.ndarray, rows: int, k: int) -> float:
    """Objective value of one candidate restriction; larger is better.

    `gram_eigs` are the k eigenvalues of the restriction's Gram matrix,
    i.e. the squared singular values padded with zeros. Until the set
    reaches k rows the printed objectives are degenerate, so only the
    nonzero singular values are scored; from k rows on, zeros count and
    sink the candidate. Maximum volume is scored in the log domain.
    """
    sq = np.sort(np.clip(gram_eigs, 0.0, None))
    if rows < k:
        sq = sq[k - rows :]
        sq = sq[sq > _RANK_TOL]
        if len(sq) == 0:
            return -np.inf
    if kind is ObjectiveKind.WCE:
        return float(sq[0])
    if sq[0] <= _RANK_TOL:
        return -np.inf
    if kind is ObjectiveKind.MSE:
        return float(-np.sum(1.0 / sq))
    return float(np.sum(np.log(sq)))


def greedy_select(u_k: np.ndarray, objective) -> SamplingSet:
    """Grow a size-k node set one node at a time, maximizing the objective.

    At each step every unused node is scored by the singular values of the
    restriction extended with it, evaluated on the k x k Gram matrix which
    an added row updates by a rank-one term; ties break to the lowest node
    index, so the output is deterministic.
    """
    kind = objective if isinstance(objective, ObjectiveKind) else ObjectiveKind(objective)
    u_k = np.asarray(u_k, dtype=float)
    n, k = u_k.shape
    if k > n:
        raise InvalidParams("cannot select more nodes than the graph has")
    gram = np.zeros((k, k))
    chosen = np.zeros(n, dtype=bool)
    nodes = []
    for step in range(k):
        best_node = -1
        best_val = None
        for cand in range(n):
            if chosen[cand]:
                continue
            row = u_k[cand, :]
            eigs = np.linalg.eigvalsh(gram + np.outer(row, row))
            val = _score(kind, eigs, step + 1, k)
            if best_val is None or val > best_val:
                best_val = val
                best_node = cand
        chosen[best_node] = True
        nodes.append(best_node)
        row = u_k[best_node, :]
        gram += np.outer(row, row)
    final = np.clip(np.linalg.eigvalsh(gram), 0.0, None)
    if np.sqrt(final[0]) <= _RANK_TOL:
        raise DegenerateBasis("greedy selection ended with a singular restriction")
    return SamplingSet(
        nodes=np.asarray(nodes, dtype=np.int64),
        weights=np.ones(k),
        method=f"greedy-{kind.value}",
    )


def maxvol_select(u_k: np.ndarray, delta: float = 1e-2, max_swaps: int = 1000) -> SamplingSet:
    """Row-swap refinement of the maximum-volume square submatrix.

    Seeded with the greedy maximum-volume set; each pass swaps in the row
    whose coefficient in the current cross basis exceeds one the most, so
    the absolute determinant grows by that factor. Stops when no swap
    improves it by more than 1 + delta.
    """
    u_k = np.asarray(u_k, dtype=float)
    n, k = u_k.shape
    nodes = list(greedy_select(u_k, ObjectiveKind.MV).nodes)
    for _ in range(max_swaps):
        sub = u_k[nodes, :]
        coeff = u_k @ np.linalg.inv(sub)
        flat = int(np.argmax(np.abs(coeff)))
        i, j = divmod(flat, k)
        if abs(coeff[i, j]) <= 1.0 + delta:
            return SamplingSet(
                nodes=np.asarray(nodes, dtype=np.int64),
                weights=np.ones(k),
                method="maxvol",
            )
        nodes[j] = i
    raise NoConvergence(f"maxvol did not stabilize within {max_swaps} swaps")


def iid_leverage_sample(p_star: np.ndarray, m: int, rng=None) -> SamplingSet:
    """Draw m nodes independently with replacement from the distribution p_star.

    Weights are m * p of each drawn node, which makes the reweighted
    measurement norm unbiased for the signal norm.
    """
    p = np.asarray(p_star, dtype=float)
    if m < 1:
        raise InvalidParams("m must be at least 1")
    if np.any(p < 0) or not np.isfinite(p).all():
        raise InvalidDistribution("probabilities must be nonnegative and finite")
    if abs(p.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"probabilities sum to {p.sum():.12f}, not 1")
    rng = np.random.default_rng(rng)
    cdf = np.cumsum(p)
    nodes = np.searchsorted(cdf, rng.random(m) * cdf[-1], side="right")
    nodes = np.minimum(nodes, len(p) - 1).astype(np.int64)
    return SamplingSet(nodes=nodes, weights=m * p[nodes], method="iid")
