"""Interpolation surrogates: tensor Chebyshev interpolation and sparse combinations.

All interpolants are converted to Legendre coefficients so they plug into the
same transport machinery as the least-squares surrogates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .legendre import legendre_values
from .multiindex import MultiIndexSet, full_box, is_downward_closed, total_degree
from .surrogate import PolynomialSurrogate
from .wls import sqrt_density

MODES = ("tensor", "sparse-combination", "sparse-mix")


def chebyshev_nodes(m: int) -> np.ndarray:
    """Chebyshev-Gauss nodes of degree ``m`` mapped to [0, 1], ascending."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    j = np.arange(m, -1, -1)
    return 0.5 * (1.0 + np.cos((2 * j + 1) * np.pi / (2 * m + 2)))


def _bary_weights(m):
    j = np.arange(m, -1, -1)
    return (-1.0) ** j * np.sin((2 * j + 1) * np.pi / (2 * m + 2))


def lagrange_matrix(m: int, t) -> np.ndarray:
    """``E[a, b] = ell_{m,b}(t_a)``: Lagrange basis at Chebyshev nodes, barycentric form."""
    t = np.asarray(t, dtype=float).reshape(-1)
    nodes = chebyshev_nodes(m)
    w = _bary_weights(m)
    diff = t[:, None] - nodes[None, :]
    hit = diff == 0.0
    diff[hit] = 1.0
    q = w[None, :] / diff
    out = q / q.sum(axis=1, keepdims=True)
    rows = hit.any(axis=1)
    out[rows] = hit[rows].astype(float)
    return out


def lebesgue_constant(m: int, samples: int = 1001) -> float:
    t = np.linspace(0.0, 1.0, samples)
    return float(np.abs(lagrange_matrix(m, t)).sum(axis=1).max())


def _coefficient_map(m):
    # Legendre coefficients of the degree-m interpolant from its node values;
    # Gauss-Legendre with m+1 points integrates p * L_mu (degree <= 2m) exactly
    gx, gw = np.polynomial.legendre.leggauss(m + 1)
    gx = 0.5 * (gx + 1.0)
    gw = 0.5 * gw
    basis = legendre_values(m, gx)
    return (basis.T * gw) @ lagrange_matrix(m, gx)


def _tensor_coeffs(fn, degrees):
    degrees = [int(v) for v in degrees]
    axes = [chebyshev_nodes(m) for m in degrees]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(degrees))
    vals = np.asarray(fn(grid), dtype=float).reshape([m + 1 for m in degrees])
    for j, m in enumerate(degrees):
        vals = np.moveaxis(np.tensordot(_coefficient_map(m), vals, axes=([1], [j])), 0, j)
    return vals.reshape(-1), grid.shape[0]


def tensor_interpolate(fn, degrees) -> PolynomialSurrogate:
    """Interpolate ``fn`` on the tensor Chebyshev grid with ``degrees[j] + 1`` nodes per axis."""
    if any(int(v) < 0 for v in degrees):
        raise ValueError("degrees must be nonnegative")
    coeffs, count = _tensor_coeffs(fn, degrees)
    meta = {"method": "interp", "mode": "tensor", "evaluations": count}
    return PolynomialSurrogate(full_box(degrees), coeffs, meta)


def combination_coefficients(lam: MultiIndexSet) -> dict[tuple[int, ...], int]:
    """Nonzero ``c_nu = sum_{e in {0,1}^d, nu + e in lam} (-1)^|e|``."""
    members = lam._lookup
    out = {}
    for nu in members:
        # nu + e in lam needs nu + e_j in lam for every j in supp(e) (downward closed)
        free = [j for j in range(len(nu)) if nu[:j] + (nu[j] + 1,) + nu[j + 1 :] in members]
        total = 0
        for r in range(len(free) + 1):
            for sub in itertools.combinations(free, r):
                shifted = list(nu)
                for j in sub:
                    shifted[j] += 1
                if tuple(shifted) in members:
                    total += (-1) ** r
        if total:
            out[nu] = total
    return out


@dataclass(frozen=True)
class InterpolationPlan:
    mode: str
    degrees: tuple[int, ...] | None = None
    index_set: MultiIndexSet | None = None
    level: int | None = None
    dim: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown interpolation mode {self.mode!r}")
        if self.mode == "tensor" and self.degrees is None:
            raise ValueError("tensor mode needs degrees")
        if self.mode == "sparse-combination" and self.index_set is None:
            raise ValueError("sparse-combination mode needs an index set")
        if self.mode == "sparse-mix" and (self.level is None or self.dim is None):
            raise ValueError("sparse-mix mode needs level and dim")

    def terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Tensor terms as (per-axis degrees, combination coefficient)."""
        if self.mode == "tensor":
            return [(tuple(int(v) for v in self.degrees), 1)]
        if self.mode == "sparse-combination":
            if not is_downward_closed(self.index_set):
                raise ValueError("index set is not downward closed")
            return sorted(combination_coefficients(self.index_set).items())
        levels = total_degree(self.dim, self.level + 0.5)
        return [
            (tuple(2**v for v in nu), c) for nu, c in sorted(combination_coefficients(levels).items())
        ]

    def node_count(self) -> int:
        return sum(int(np.prod([m + 1 for m in deg])) for deg, _ in self.terms())


def sparse_interpolate(fn, plan: InterpolationPlan) -> PolynomialSurrogate:
    """``sum_nu c_nu I_nu[fn]`` expressed in Legendre coefficients."""
    terms = plan.terms()
    if plan.mode == "tensor":
        return tensor_interpolate(fn, terms[0][0])
    dim = len(terms[0][0])
    boxes = np.unique(
        np.concatenate([full_box(deg).indices for deg, _ in terms]).reshape(-1, dim), axis=0
    )
    lam = MultiIndexSet(boxes)
    coeffs = np.zeros(len(lam))
    evaluations = 0
    for deg, c in terms:
        part, count = _tensor_coeffs(fn, deg)
        evaluations += count
        pos = [lam.position(mu) for mu in full_box(deg)]
        coeffs[pos] += c * part
    meta = {"method": "interp", "mode": plan.mode, "evaluations": evaluations}
    return PolynomialSurrogate(lam, coeffs, meta)


def fit_interpolation(oracle, plan: InterpolationPlan) -> PolynomialSurrogate:
    """Interpolation surrogate of ``sqrt(oracle)``."""
    return sparse_interpolate(lambda x: sqrt_density(oracle(x)), plan)
