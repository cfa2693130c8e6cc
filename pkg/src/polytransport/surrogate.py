"""Polynomial surrogates ``g = sum_nu c_nu L_nu`` in the tensorized Legendre basis."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .legendre import legendre_values
from .multiindex import MultiIndexSet


def basis_matrix(lam: MultiIndexSet, points) -> np.ndarray:
    """``B[k, i] = L_{nu_i}(points[k])``, shape (n, |lam|)."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    if x.shape[1] != lam.dim:
        raise ValueError("point dimension does not match the index set")
    out = np.ones((x.shape[0], len(lam)))
    for j, deg in enumerate(lam.max_degrees()):
        vals = legendre_values(int(deg), x[:, j])
        out *= vals[:, lam.indices[:, j]]
    return out


@dataclass(frozen=True, eq=False)
class PolynomialSurrogate:
    index_set: MultiIndexSet
    coeffs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if len(c) != len(self.index_set):
            raise ValueError(f"{len(c)} coefficients for an index set of size {len(self.index_set)}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.index_set.dim

    def __call__(self, points) -> np.ndarray:
        return basis_matrix(self.index_set, points) @ self.coeffs

    def mass(self) -> float:
        """``int g^2`` over the unit cube (Parseval)."""
        return float(np.dot(self.coeffs, self.coeffs))

    def scaled(self, factor: float) -> PolynomialSurrogate:
        return PolynomialSurrogate(self.index_set, factor * self.coeffs, dict(self.meta))

    def coefficient(self, nu) -> float:
        return float(self.coeffs[self.index_set.position(nu)])
