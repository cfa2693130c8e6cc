"""Built-in unnormalized target densities on the unit cube."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .legendre import legendre_values
from .multiindex import MultiIndexSet
from .oracle import DensityOracle


# ---------------------------------------------------------------------------
# Rosenbrock mixture
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RosenbrockTarget:
    """Sum of three rotated, scaled and shifted Rosenbrock bananas on [0, 1]^2.

    ``sign`` multiplies the curvature term of ``r(u, v) = (a - u)^2 + sign*b*(v - u^2)^2``.
    Only +1 gives a bounded density.
    """

    a: float = 0.4
    b: float = 4.0
    s: float = 7.0
    thetas: tuple[float, ...] = (6.147, 4.052, 1.96)
    centers: tuple[tuple[float, float], ...] = ((0.437, 0.606), (0.414, 0.347), (0.649, 0.457))
    sign: float = 1.0

    dim = 2

    def rosenbrock(self, u, v):
        return (self.a - u) ** 2 + self.sign * self.b * (v - u * u) ** 2

    def mode_terms(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        terms = []
        for theta, (c1, c2) in zip(self.thetas, self.centers):
            dx, dy = x[:, 0] - c1, x[:, 1] - c2
            u = self.s * (np.cos(theta) * dx - np.sin(theta) * dy)
            v = self.s * (np.sin(theta) * dx + np.cos(theta) * dy)
            terms.append(np.exp(-self.rosenbrock(u, v)))
        return np.stack(terms, axis=1)

    def __call__(self, x) -> np.ndarray:
        return self.mode_terms(x).sum(axis=1)

    def oracle(self) -> DensityOracle:
        return DensityOracle(self, 2, name="rosenbrock")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["thetas"] = list(self.thetas)
        out["centers"] = [list(c) for c in self.centers]
        return out


def rosenbrock_density(params: RosenbrockTarget, x) -> float:
    return float(params(np.asarray(x, dtype=float).reshape(1, 2))[0])


# ---------------------------------------------------------------------------
# Deconvolution posterior
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeconvolutionSpec:
    """Hat-function signal model observed through a Gaussian blur.

    ``sigma`` is the noise standard deviation in the likelihood;
    ``noise_level`` (default: ``sigma``) is the standard deviation used when
    synthesizing the data. ``x_true`` fixes the ground truth in [-1, 1]^d,
    otherwise it is drawn uniformly from the seeded generator.
    """

    max_level: int = 3
    decay: float = 2.0
    kernel_scale: float = 10.0
    n_measurements: int = 10
    sigma: float = 0.05
    noise_level: float | None = None
    points_per_piece: int = 32
    x_true: tuple[float, ...] | None = None

    @property
    def dim(self) -> int:
        return 2 ** (self.max_level + 1) - 1

    def hats(self) -> list[tuple[int, int]]:
        return [(lv, i) for lv in range(self.max_level + 1) for i in range(2**lv)]


def hat(level: int, offset: int, decay: float, y) -> np.ndarray:
    """Hat of width ``2^(1-level)`` inside [-1, 1] with peak ``2^(-decay*level)``."""
    t = np.asarray(y, dtype=float) + 1.0
    h = 2.0 ** (1 - level)
    left, mid, right = offset * h, (offset + 0.5) * h, (offset + 1) * h
    up = 2.0**level * (t - left)
    down = 2.0**level * (right - t)
    val = np.where((t >= left) & (t < mid), up, np.where((t >= mid) & (t <= right), down, 0.0))
    return 2.0 ** (-decay * level) * val


def measurement_points(n: int) -> np.ndarray:
    j = np.arange(1, n + 1)
    return (2 * j + 1) / n - 1.0


def forward_matrix(spec: DeconvolutionSpec, kernel=None) -> np.ndarray:
    """``A[j, col] = int psi_col(t) k(chi_j - t) dt``, Gauss-Legendre per linear piece."""
    if kernel is None:
        scale = spec.kernel_scale
        kernel = lambda y: np.exp(-scale * y * y)  # noqa: E731
    chi = measurement_points(spec.n_measurements)
    gx, gw = np.polynomial.legendre.leggauss(spec.points_per_piece)
    cols = []
    for level, offset in spec.hats():
        h = 2.0 ** (1 - level)
        left = -1.0 + offset * h
        total = np.zeros_like(chi)
        for a in (left, left + 0.5 * h):
            b = a + 0.5 * h
            t = 0.5 * (b - a) * gx + 0.5 * (a + b)
            w = 0.5 * (b - a) * gw
            psi = hat(level, offset, spec.decay, t)
            total += (kernel(chi[:, None] - t[None, :]) * (w * psi)[None, :]).sum(axis=1)
        cols.append(total)
    return np.stack(cols, axis=1)


@dataclass(frozen=True, eq=False)
class DeconvolutionTarget:
    spec: DeconvolutionSpec
    matrix: np.ndarray
    x_true: np.ndarray
    noise: np.ndarray
    data: np.ndarray
    seed: int | None = None

    @property
    def dim(self) -> int:
        return self.spec.dim

    def forward(self, x) -> np.ndarray:
        return np.atleast_2d(x) @ self.matrix.T

    def log_density(self, u) -> np.ndarray:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        resid = self.data[None, :] - self.forward(2.0 * u - 1.0)
        return -0.5 * np.sum(resid * resid, axis=1) / self.spec.sigma**2

    def __call__(self, u) -> np.ndarray:
        return np.exp(self.log_density(u))

    def oracle(self) -> DensityOracle:
        return DensityOracle(self, self.dim, name="deconvolution")

    def to_dict(self) -> dict:
        out = asdict(self.spec)
        out["x_true"] = self.x_true.tolist()
        out["data"] = self.data.tolist()
        out["seed"] = self.seed
        return out


def build_deconvolution(spec: DeconvolutionSpec, rng: np.random.Generator | int | None = None) -> DeconvolutionTarget:
    if spec.max_level < 0 or spec.n_measurements < 1 or spec.points_per_piece < 1:
        raise ValueError("invalid hat-basis specification")
    if not spec.sigma > 0:
        raise ValueError("sigma must be positive")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = np.random.default_rng(rng)
    a = forward_matrix(spec)
    if spec.x_true is None:
        x_true = rng.uniform(-1.0, 1.0, spec.dim)
    else:
        x_true = np.asarray(spec.x_true, dtype=float)
        if x_true.shape != (spec.dim,) or np.any(np.abs(x_true) > 1):
            raise ValueError(f"x_true must be a point of [-1, 1]^{spec.dim}")
    level = spec.sigma if spec.noise_level is None else spec.noise_level
    noise = level * rng.standard_normal(spec.n_measurements)
    data = a @ x_true + noise
    return DeconvolutionTarget(spec, a, x_true, noise, data, seed=None if seed is None else int(seed))


def deconvolution_density(target: DeconvolutionTarget, u) -> float:
    return float(target(np.asarray(u, dtype=float).reshape(1, -1))[0])


def anisotropic_weights(dim: int) -> np.ndarray:
    """``k_i = ceil(log2(i + 1))`` for i = 1..dim."""
    i = np.arange(1, dim + 1)
    return np.ceil(np.log2(i + 1))


# ---------------------------------------------------------------------------
# Synthetic targets
# ---------------------------------------------------------------------------


def uniform_oracle(dim: int) -> DensityOracle:
    return DensityOracle(lambda x: np.ones(x.shape[0]), dim, name="uniform")


@dataclass(frozen=True, eq=False)
class PlantedTarget:
    """Density ``g*(x)^2`` for a polynomial ``g*`` with known Legendre coefficients."""

    index_set: MultiIndexSet
    coeffs: np.ndarray = field(default=None)

    @property
    def dim(self) -> int:
        return self.index_set.dim

    def sqrt(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.ones((x.shape[0], len(self.index_set)))
        for j, deg in enumerate(self.index_set.max_degrees()):
            out *= legendre_values(int(deg), x[:, j])[:, self.index_set.indices[:, j]]
        return out @ np.asarray(self.coeffs, dtype=float)

    def __call__(self, x) -> np.ndarray:
        return self.sqrt(x) ** 2

    def oracle(self) -> DensityOracle:
        return DensityOracle(self, self.dim, name="planted")


def positive_planted(index_set: MultiIndexSet, rng: np.random.Generator, scale: float = 1.0) -> PlantedTarget:
    """``g* = 1 + small perturbation`` kept strictly positive on the cube.

    Perturbation coefficients are drawn from [-1, 1] and shrunk so that the sum
    of their sup norms ``sqrt(prod(2 nu_j + 1))`` stays below 1/2.
    """
    c = rng.uniform(-1.0, 1.0, len(index_set))
    zero = index_set.position((0,) * index_set.dim)
    c[zero] = 0.0
    sup = np.sqrt(np.prod(2 * index_set.indices + 1, axis=1))
    bound = float(np.sum(np.abs(c) * sup))
    if bound > 0.5:
        c *= 0.5 / bound
    c[zero] = 1.0
    return PlantedTarget(index_set, scale * c)
