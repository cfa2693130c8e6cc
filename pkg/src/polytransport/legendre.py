"""Orthonormal Legendre polynomials on [0, 1].

``L_n(x) = sqrt(2n + 1) * P_n(2x - 1)`` where ``P_n`` is the classical Legendre
polynomial with ``P_n(1) = 1``. Everything here is vectorized over ``x``: array
inputs produce outputs with the degree axis (or axes) appended last.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LegendreEval:
    n_max: int
    x: float
    values: np.ndarray
    derivs: np.ndarray


def _check(n_max, x):
    if n_max < 0:
        raise ValueError(f"degree must be nonnegative, got {n_max}")
    x = np.asarray(x, dtype=float)
    if np.any(~((x >= 0.0) & (x <= 1.0))):
        raise ValueError("points must lie in [0, 1]")
    return x


def _raw_tables(n_max, x):
    # P_n and P_n' on [-1, 1] via the three-term recursion (m = 0 and m = 1)
    t = 2.0 * x - 1.0
    p = np.empty(x.shape + (n_max + 1,))
    dp = np.empty_like(p)
    p[..., 0] = 1.0
    dp[..., 0] = 0.0
    if n_max >= 1:
        p[..., 1] = t
        dp[..., 1] = 1.0
    for n in range(2, n_max + 1):
        p[..., n] = ((2 * n - 1) * t * p[..., n - 1] - (n - 1) * p[..., n - 2]) / n
        dp[..., n] = ((2 * n - 1) * t * dp[..., n - 1] - n * dp[..., n - 2]) / (n - 1)
    scale = np.sqrt(2.0 * np.arange(n_max + 1) + 1.0)
    return p * scale, dp * (2.0 * scale)


def legendre_values(n_max: int, x) -> np.ndarray:
    """Values ``L_0(x), ..., L_{n_max}(x)``, shape ``x.shape + (n_max + 1,)``."""
    x = _check(n_max, x)
    return _raw_tables(n_max, x)[0]


def legendre_tables(n_max: int, x) -> tuple[np.ndarray, np.ndarray]:
    """Values and first derivatives up to degree ``n_max``."""
    x = _check(n_max, x)
    return _raw_tables(n_max, x)


def eval_all(n_max: int, x: float) -> LegendreEval:
    xa = _check(n_max, x)
    if xa.ndim != 0:
        raise ValueError("eval_all takes a scalar point; use legendre_tables for arrays")
    vals, ders = _raw_tables(n_max, xa)
    return LegendreEval(n_max=n_max, x=float(xa), values=vals, derivs=ders)


def _offdiag(vals, ders, n, k, x):
    # int_0^x L_n L_k for n != k
    return (x - x * x) * (vals[..., n] * ders[..., k] - vals[..., k] * ders[..., n]) / (
        (n + k + 1) * (n - k)
    )


def _diag_from(vals, ders, n_max, x):
    """Diagonal ``int_0^x L_n^2`` for n = 0..n_max; needs tables up to n_max + 1."""
    out = np.empty(x.shape + (n_max + 1,))
    out[..., 0] = x
    if n_max >= 1:
        out[..., 1] = ((2.0 * x - 1.0) ** 3 + 1.0) / 2.0
    for n in range(2, n_max + 1):
        up = _offdiag(vals, ders, n + 1, n - 1, x)
        down = _offdiag(vals, ders, n, n - 2, x)
        out[..., n] = (
            out[..., n - 1]
            + up * (n + 1) * np.sqrt(2 * n - 1) / (n * np.sqrt(2 * n + 3))
            - down * (n - 1) * np.sqrt(2 * n + 1) / (n * np.sqrt(2 * n - 3))
        )
    return out


def squared_antiderivatives(n_max: int, x) -> np.ndarray:
    """``int_0^x L_n(t)^2 dt`` for n = 0..n_max, in O(n_max) per point.

    Each of these is the CDF of the probability density ``L_n^2`` on [0, 1].
    """
    x = _check(n_max, x)
    vals, ders = _raw_tables(n_max + 1, x)
    return _diag_from(vals, ders, n_max, x)


def product_antiderivative(n: int, k: int, x: float) -> float:
    """``int_0^x L_n(t) L_k(t) dt``."""
    if n < 0 or k < 0:
        raise ValueError("degrees must be nonnegative")
    x = _check(max(n, k), x)
    if n != k:
        vals, ders = _raw_tables(max(n, k), x)
        return float(_offdiag(vals, ders, n, k, x))
    return float(squared_antiderivatives(n, x)[..., n])


def product_antiderivative_table(m: int, x) -> np.ndarray:
    """Full symmetric table ``I[n, k] = int_0^x L_n L_k`` for n, k <= m.

    One Legendre evaluation up to degree m + 1, then O(1) per off-diagonal entry;
    the diagonal is filled last by the recursion that consumes the entries
    ``I[n+1, n-1]`` and ``I[n, n-2]``.
    """
    x = _check(m, x)
    vals, ders = _raw_tables(m + 1, x)
    deg = np.arange(m + 1)
    n, k = np.triu_indices(m + 1, 1)
    xe = x[..., None]
    upper = (xe - xe * xe) * (vals[..., n] * ders[..., k] - vals[..., k] * ders[..., n]) / (
        (n + k + 1) * (n - k)
    )
    table = np.empty(x.shape + (m + 1, m + 1))
    table[..., n, k] = upper
    table[..., k, n] = upper
    table[..., deg, deg] = _diag_from(vals, ders, m, x)
    return table
