"""Weighted least-squares fit of the square root of a density.

Nodes are drawn from the mixture density ``(1/m) sum_nu L_nu^2`` and redrawn
until the weighted empirical Gramian is within 1/2 of the identity in spectral
norm; only then is the density evaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bisection import bisect
from .legendre import squared_antiderivatives
from .multiindex import MultiIndexSet
from .surrogate import PolynomialSurrogate, basis_matrix

SAMPLING_ITERATIONS = 48
NEGATIVE_TOLERANCE = 1e-12


class FitError(RuntimeError):
    def __init__(self, message, gramian_norm=None, rounds=None):
        super().__init__(message)
        self.gramian_norm = gramian_norm
        self.rounds = rounds


@dataclass
class WlsRun:
    n: int
    points: np.ndarray
    weights: np.ndarray
    gramian_norm: float
    rounds: int


def default_sample_count(m: int) -> int:
    return 10 * m * math.ceil(math.log(4 * m))


def sample_optimal(lam: MultiIndexSet, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draws from the density ``(1/|lam|) sum_nu L_nu(x)^2`` on the unit cube.

    Picks ``nu`` uniformly, then inverts the CDF of ``L_{nu_j}^2`` in each
    coordinate. Returns one point of shape (d,) when ``size`` is None.
    """
    if len(lam) == 0:
        raise ValueError("empty multi-index set")
    n = 1 if size is None else int(size)
    nus = lam.indices[rng.integers(len(lam), size=n)]
    u = rng.random((n, lam.dim))
    x = np.empty_like(u)
    for j in range(lam.dim):
        deg = nus[:, j]
        top = int(deg.max(initial=0))

        def cdf(t, deg=deg, top=top):
            return np.take_along_axis(squared_antiderivatives(top, t), deg[:, None], axis=1)[:, 0]

        x[:, j] = bisect(cdf, u[:, j], SAMPLING_ITERATIONS)
    return x[0] if size is None else x


def optimal_density(lam: MultiIndexSet, points) -> np.ndarray:
    b = basis_matrix(lam, points)
    return np.mean(b * b, axis=1)


def _gramian(basis, weights):
    n = basis.shape[0]
    return (basis.T * weights) @ basis / n


def gramian_norm(points, weights, lam: MultiIndexSet) -> float:
    """Spectral norm of ``G - I`` for the weighted empirical Gramian."""
    basis = basis_matrix(lam, points)
    w = np.asarray(weights, dtype=float)
    if w.shape[0] != basis.shape[0]:
        raise ValueError("points and weights differ in length")
    return _spectral_gap(_gramian(basis, w))


def _spectral_gap(g):
    ev = np.linalg.eigvalsh(g - np.eye(g.shape[0]))
    return float(np.max(np.abs(ev)))


def sqrt_density(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("density returned non-finite values")
    if np.any(v < -NEGATIVE_TOLERANCE):
        raise ValueError(f"density returned negative value {v.min():g}")
    return np.sqrt(np.clip(v, 0.0, None))


def fit(
    oracle,
    lam: MultiIndexSet,
    rng: np.random.Generator,
    n: int | None = None,
    max_rounds: int = 50,
) -> tuple[PolynomialSurrogate, WlsRun]:
    """Least-squares surrogate ``g`` of ``sqrt(oracle)`` on span{L_nu : nu in lam}."""
    m = len(lam)
    if m == 0:
        raise ValueError("empty multi-index set")
    n = default_sample_count(m) if n is None else int(n)
    if n < 1:
        raise ValueError("sample count must be positive")

    norm = math.inf
    for rounds in range(1, max_rounds + 1):
        points = sample_optimal(lam, rng, n)
        basis = basis_matrix(lam, points)
        weights = 1.0 / np.mean(basis * basis, axis=1)
        gram = _gramian(basis, weights)
        norm = _spectral_gap(gram)
        if norm <= 0.5:
            break
    else:
        raise FitError(
            f"Gramian resampling did not converge in {max_rounds} rounds "
            f"(last ||G - I|| = {norm:.4g}, n = {n}, m = {m})",
            gramian_norm=norm,
            rounds=max_rounds,
        )

    target = sqrt_density(oracle(points))
    rhs = basis.T @ (weights * target) / n
    coeffs = np.linalg.solve(gram, rhs)
    run = WlsRun(n=n, points=points, weights=weights, gramian_norm=norm, rounds=rounds)
    meta = {"method": "wls", "evaluations": n, "rounds": rounds}
    return PolynomialSurrogate(lam, coeffs, meta), run
