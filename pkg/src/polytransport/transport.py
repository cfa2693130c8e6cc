"""Knothe-Rosenblatt transport for a squared polynomial surrogate.

``S`` maps the normalized density ``g^2 / int g^2`` to the uniform measure on
the unit cube; its components are conditional CDFs. ``T = S^{-1}`` is computed
by componentwise bisection, which pushes uniform samples to the surrogate.

The evaluator works on batches of points. Per dimension j it keeps the partial
sums ``gamma`` over unique index tails, so one evaluation of ``S`` costs
``sum_j sum_groups |group|^2`` instead of ``|Lambda|^2``.
"""
from __future__ import annotations

import math

import numpy as np

from .bisection import bisect
from .legendre import legendre_values, product_antiderivative_table
from .multiindex import TailPartition, build_tail_partition
from .parallel import map_rows
from .surrogate import PolynomialSurrogate

ZERO_THRESHOLD = 1e-14
DEFAULT_ITERATIONS = 48


def bisection_iterations(cardinality: int, dim: int, smoothness: tuple[float, float] | None) -> int:
    """Bit count matched to the surrogate error ``|Lambda|^{-(k+alpha)/d}``."""
    if smoothness is None:
        return DEFAULT_ITERATIONS
    k, alpha = smoothness
    bits = (k + alpha) / dim * math.log(max(cardinality, 2)) / math.log(2)
    return max(1, math.ceil(bits))


class TriangularTransport:
    def __init__(self, surrogate: PolynomialSurrogate, zero_threshold: float = ZERO_THRESHOLD):
        mass = surrogate.mass()
        if not mass > 0:
            raise ValueError("surrogate is identically zero")
        self.surrogate = surrogate
        self.partition: TailPartition = build_tail_partition(surrogate.index_set)
        self.max_degrees = [int(lv.degrees.max()) for lv in self.partition.levels]
        self.mass = mass
        self.zero_threshold = zero_threshold
        self._gamma0 = np.empty(len(surrogate.coeffs))
        self._gamma0[self.partition.order] = surrogate.coeffs

    @property
    def dim(self) -> int:
        return self.surrogate.dim

    # ---- per-dimension kernels -------------------------------------------------
    def _numerator(self, j, gamma, xj):
        lv = self.partition.levels[j]
        table = product_antiderivative_table(self.max_degrees[j], xj)
        ints = table[:, lv.degrees[lv.pair_a], lv.degrees[lv.pair_b]]
        return np.sum(gamma[:, lv.pair_a] * gamma[:, lv.pair_b] * ints, axis=1)

    def _component(self, j, gamma, denom, xj):
        num = self._numerator(j, gamma, xj)
        degenerate = denom <= self.zero_threshold * self.mass
        safe = np.where(degenerate, 1.0, denom)
        return np.clip(np.where(degenerate, xj, num / safe), 0.0, 1.0)

    def _advance(self, j, gamma, xj):
        lv = self.partition.levels[j]
        vals = legendre_values(self.max_degrees[j], xj)
        contrib = gamma * vals[:, lv.degrees]
        nxt = np.add.reduceat(contrib, lv.group_ptr[:-1], axis=1)
        return nxt, np.sum(nxt * nxt, axis=1)

    def _start(self, n):
        gamma = np.broadcast_to(self._gamma0, (n, len(self._gamma0)))
        return gamma, np.full(n, self.mass)

    # ---- batch evaluators ------------------------------------------------------
    def _S_block(self, x):
        out = np.empty_like(x)
        gamma, denom = self._start(x.shape[0])
        for j in range(self.dim):
            out[:, j] = self._component(j, gamma, denom, x[:, j])
            if j < self.dim - 1:
                gamma, denom = self._advance(j, gamma, x[:, j])
        return out

    def _T_block(self, y, iterations):
        out = np.empty_like(y)
        gamma, denom = self._start(y.shape[0])
        for j in range(self.dim):
            out[:, j] = bisect(
                lambda t, j=j, gamma=gamma, denom=denom: self._component(j, gamma, denom, t),
                y[:, j],
                iterations,
            )
            if j < self.dim - 1:
                gamma, denom = self._advance(j, gamma, out[:, j])
        return out

    def S(self, x, threads: int = 1) -> np.ndarray:
        """Inverse transport; accepts one point (d,) or a batch (n, d)."""
        pts, single = self._as_batch(x)
        out = map_rows(self._S_block, pts, threads)
        return out[0] if single else out

    def T(self, y, iterations: int = DEFAULT_ITERATIONS, threads: int = 1) -> np.ndarray:
        """Bisection inverse of ``S``; each coordinate to within ``2**-iterations``."""
        if iterations < 1:
            raise ValueError("need at least one bisection iteration")
        pts, single = self._as_batch(y)
        out = map_rows(lambda b: self._T_block(b, iterations), pts, threads)
        return out[0] if single else out

    def marginal_masses(self, x) -> np.ndarray:
        """``s_0, s_1(x_1), ..., s_{d-1}(x_{:d-1})`` as columns, for diagnostics."""
        pts, _ = self._as_batch(x)
        cols = []
        gamma, denom = self._start(pts.shape[0])
        cols.append(denom)
        for j in range(self.dim - 1):
            gamma, denom = self._advance(j, gamma, pts[:, j])
            cols.append(denom)
        return np.stack(cols, axis=1)

    def _as_batch(self, x):
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {arr.shape[1]}")
        if np.any(~((arr >= 0.0) & (arr <= 1.0))):
            raise ValueError("points must lie in [0, 1]^d")
        return arr, single


def build(surrogate: PolynomialSurrogate) -> TriangularTransport:
    return TriangularTransport(surrogate)


def evaluate_S(transport: TriangularTransport, x, threads: int = 1) -> np.ndarray:
    return transport.S(x, threads=threads)


def evaluate_T(transport: TriangularTransport, y, iterations: int = DEFAULT_ITERATIONS, threads: int = 1):
    return transport.T(y, iterations=iterations, threads=threads)


def pushforward_sample(
    transport: TriangularTransport,
    n: int,
    rng: np.random.Generator,
    iterations: int = DEFAULT_ITERATIONS,
    threads: int = 1,
) -> np.ndarray:
    """``n`` approximate draws from ``g^2 / int g^2``: uniform draws mapped through T."""
    u = rng.random((int(n), transport.dim))
    if n == 0:
        return u
    return transport.T(u, iterations=iterations, threads=threads)


def naive_S(surrogate: PolynomialSurrogate, x) -> np.ndarray:
    """Reference ``S`` from the full double sum over ``Lambda x Lambda``.

    Quadratic in ``|Lambda|``; meant for cross-checking the fast evaluator.
    """
    lam = surrogate.index_set.indices
    c = surrogate.coeffs
    x = np.asarray(x, dtype=float)
    d = lam.shape[1]
    out = np.empty(d)
    for j in range(d):
        head = np.ones(len(lam))
        for i in range(j):
            top = int(lam[:, i].max())
            head *= legendre_values(top, x[i])[lam[:, i]]
        same_tail = np.all(lam[:, None, j + 1 :] == lam[None, :, j + 1 :], axis=2)
        same_tail_j = same_tail & (lam[:, None, j] == lam[None, :, j])
        weight = np.outer(c * head, c * head)
        table = product_antiderivative_table(int(lam[:, j].max()), float(x[j]))
        ints = table[lam[:, j][:, None], lam[:, j][None, :]]
        r = np.sum(weight * ints * same_tail)
        s = np.sum(weight * same_tail_j)
        out[j] = x[j] if s <= ZERO_THRESHOLD * float(c @ c) else r / s
    return np.clip(out, 0.0, 1.0)
