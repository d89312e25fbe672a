"""Determinantal point processes on graph nodes: kernels and exact sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams, NumericalDegeneracy, OutOfRange, ZeroMarginal
from .spectral import SpectralBasis

_EIGENVALUE_SLACK = 1e-10
_MASS_TOL = 1e-6
_DROP_TOL = 1e-12


@dataclass
class SamplingSet:
    """An ordered set of sampled nodes with per-sample recovery weights.

    `weights` holds the diagonal reweighting values used at recovery time
    (inclusion probabilities for determinantal samples, m * p for i.i.d.
    draws, ones for deterministic selections). The random-walk sampler
    leaves it None; callers fill it from an explicit kernel or from the
    sketch-based estimator.
    """

    nodes: np.ndarray
    weights: np.ndarray | None = None
    method: str = ""

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=np.int64)
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != self.nodes.shape:
                raise InvalidParams("weights and nodes must have equal length")
            if np.any(self.weights <= 0):
                raise InvalidParams("weights must be strictly positive")

    def __len__(self):
        return len(self.nodes)


@dataclass
class MarginalKernel:
    """Symmetric PSD kernel with spectrum in [0, 1], held in eigenform.

    The diagonal gives per-node inclusion probabilities; restrictions give
    joint inclusion probabilities through their determinants.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    _dense: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        mu = np.asarray(self.eigenvalues, dtype=float)
        if np.any(mu < -_EIGENVALUE_SLACK) or np.any(mu > 1.0 + _EIGENVALUE_SLACK):
            raise InvalidParams("kernel eigenvalues must lie in [0, 1]")
        self.eigenvalues = np.clip(mu, 0.0, 1.0)

    @property
    def n(self):
        return self.vectors.shape[0]

    def matrix(self) -> np.ndarray:
        """Dense kernel matrix (cached; desk scale only)."""
        if self._dense is None:
            v = self.vectors
            k = (v * self.eigenvalues) @ v.T
            self._dense = (k + k.T) / 2.0
        return self._dense

    def diagonal(self) -> np.ndarray:
        """Per-node inclusion probabilities."""
        return (self.vectors**2) @ self.eigenvalues

    def restriction(self, nodes) -> np.ndarray:
        rows = self.vectors[np.asarray(nodes, dtype=np.int64), :]
        return (rows * self.eigenvalues) @ rows.T


def ideal_lowpass_kernel(basis: SpectralBasis, k: int) -> MarginalKernel:
    """Rank-k projector onto the k lowest graph frequencies."""
    if not 1 <= k <= basis.n:
        raise OutOfRange(f"k must lie in [1, {basis.n}], got {k}")
    mu = np.zeros(basis.n)
    mu[:k] = 1.0
    return MarginalKernel(eigenvalues=mu, vectors=basis.vectors)


def wilson_kernel_explicit(basis: SpectralBasis, q: float) -> MarginalKernel:
    """Kernel of the absorbing-walk process: eigenvalues q / (q + lambda)."""
    if q <= 0:
        raise InvalidParams("q must be positive")
    mu = q / (q + basis.eigenvalues)
    return MarginalKernel(eigenvalues=mu, vectors=basis.vectors)


def _orthonormalize_columns(v: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt, dropping directions shorter than the tolerance."""
    cols = []
    for idx in range(v.shape[1]):
        c = v[:, idx].copy()
        for b in cols:
            c -= (b @ c) * b
        norm = np.linalg.norm(c)
        if norm > _DROP_TOL:
            cols.append(c / norm)
    if not cols:
        return np.empty((v.shape[0], 0))
    return np.column_stack(cols)


def dpp_sample(kernel: MarginalKernel, rng=None) -> SamplingSet:
    """Draw one sample of the determinantal process with the given kernel.

    Two phases: a Bernoulli draw over the kernel's eigenvalues fixes the
    sample size and selects a column subspace; then one node per remaining
    dimension is drawn with probability proportional to the squared row
    norms of the subspace basis, which is deflated against the selected
    coordinate after every pick. Node selection is inverse-CDF in index
    order, so draws are reproducible under a fixed seed.
    """
    rng = np.random.default_rng(rng)
    mu = kernel.eigenvalues
    keep = rng.random(len(mu)) < mu
    v = kernel.vectors[:, keep].copy()
    nodes = []
    while v.shape[1] > 0:
        r = v.shape[1]
        p = np.einsum("ij,ij->i", v, v) / r
        mass = p.sum()
        if abs(mass - 1.0) > _MASS_TOL:
            raise NumericalDegeneracy(f"selection mass {mass:.8f} drifted from 1")
        cdf = np.cumsum(p)
        i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        i = min(i, kernel.n - 1)
        nodes.append(i)
        j = int(np.argmax(np.abs(v[i, :])))
        pivot = v[:, j].copy()
        v -= np.outer(pivot / pivot[i], v[i, :])
        v = np.delete(v, j, axis=1)
        v = _orthonormalize_columns(v)
    nodes = np.asarray(nodes, dtype=np.int64)
    weights = kernel.diagonal()[nodes] if len(nodes) else None
    return SamplingSet(nodes=nodes, weights=weights, method="dpp")


def inclusion_probability(kernel: MarginalKernel, nodes) -> float:
    """Probability that all the given (distinct) nodes appear in a sample."""
    nodes = np.asarray(nodes, dtype=np.int64)
    if len(nodes) == 0:
        return 1.0
    det = np.linalg.det(kernel.restriction(nodes))
    return max(float(det), 0.0)


def sample_size_moments(kernel: MarginalKernel):
    """Exact mean and variance of the sample size (a sum of Bernoulli trials)."""
    mu = kernel.eigenvalues
    return float(mu.sum()), float((mu * (1.0 - mu)).sum())


def dpp_weight_matrix(kernel: MarginalKernel, nodes) -> np.ndarray:
    """Diagonal recovery weights: the inclusion probability of each sampled node."""
    nodes = np.asarray(nodes, dtype=np.int64)
    pi = kernel.diagonal()[nodes]
    if np.any(pi <= 0.0):
        raise ZeroMarginal("a sampled node has zero inclusion probability")
    return pi
