"""Hellinger distances and the convergence-study harness."""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .interp import InterpolationPlan, fit_interpolation
from .multiindex import construct_anisotropic
from .surrogate import PolynomialSurrogate
from .wls import FitError, fit, sqrt_density

TENSOR_MAX_DIM = 3
MIN_AXIS_POINTS = 64


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Probability-weighted quadrature on [0, 1]^d.

    In tensor mode ``points``/``weights`` are the Gauss-Legendre product rule;
    in Monte Carlo mode they are uniform draws with weights ``1/n``.
    """

    dim: int
    mode: str
    points: np.ndarray
    weights: np.ndarray
    axis_nodes: np.ndarray | None = None
    axis_weights: np.ndarray | None = None
    seed: int | None = None

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @classmethod
    def tensor(cls, dim: int, per_axis: int = MIN_AXIS_POINTS) -> QuadratureGrid:
        if per_axis < 1:
            raise ValueError("need at least one point per axis")
        gx, gw = np.polynomial.legendre.leggauss(per_axis)
        nodes, w = 0.5 * (gx + 1.0), 0.5 * gw
        pts = np.stack(np.meshgrid(*[nodes] * dim, indexing="ij"), axis=-1).reshape(-1, dim)
        wts = np.ones(1)
        for _ in range(dim):
            wts = np.multiply.outer(wts, w).reshape(-1)
        return cls(dim, "tensor", pts, wts, nodes, w)

    @classmethod
    def monte_carlo(cls, dim: int, samples: int, seed: int = 0) -> QuadratureGrid:
        if samples < 2:
            raise ValueError("need at least two Monte Carlo samples")
        pts = np.random.default_rng(seed).random((samples, dim))
        return cls(dim, "mc", pts, np.full(samples, 1.0 / samples), seed=seed)

    @classmethod
    def auto(cls, dim: int, max_degree: int = 0, samples: int = 100_000, seed: int = 0) -> QuadratureGrid:
        if dim <= TENSOR_MAX_DIM:
            return cls.tensor(dim, max(MIN_AXIS_POINTS, 2 * int(max_degree) + 1))
        return cls.monte_carlo(dim, samples, seed)


def surrogate_mass(g: PolynomialSurrogate) -> float:
    return g.mass()


@dataclass(frozen=True)
class HellingerEstimate:
    value: float
    stderr: float = 0.0


def _mc_distance(a, b, fb_mass=None):
    # d_H^2 = 2 - 2 BC with BC = mean(sqrt(p q)) / sqrt(mean(p) mean(q));
    # standard error by the delta method on the three sample means
    n = a.shape[0]
    stats = np.stack([a * b, a * a, b * b if fb_mass is None else np.full(n, fb_mass)])
    means = stats.mean(axis=1)
    cov = np.cov(stats) / n
    m_ab, m_a, m_b = means
    if m_a <= 0 or m_b <= 0:
        raise ValueError("normalization estimate is not positive")
    bc = m_ab / math.sqrt(m_a * m_b)
    grad = np.array([1.0 / math.sqrt(m_a * m_b), -0.5 * bc / m_a, -0.5 * bc / m_b])
    if fb_mass is not None:
        grad[2] = 0.0
    var2 = 4.0 * float(grad @ cov @ grad)
    sq = max(0.0, 2.0 - 2.0 * bc)
    value = math.sqrt(sq)
    stderr = math.sqrt(max(var2, 0.0)) / (2.0 * value) if value > 0 else math.sqrt(max(var2, 0.0))
    return HellingerEstimate(value, stderr)


def _quad_distance(a, b, weights, b_mass=None):
    ca = float(weights @ (a * a))
    cb = float(weights @ (b * b)) if b_mass is None else b_mass
    if ca <= 0 or cb <= 0:
        raise ValueError("normalization estimate is not positive")
    diff = a / math.sqrt(ca) - b / math.sqrt(cb)
    return HellingerEstimate(math.sqrt(max(float(weights @ (diff * diff)), 0.0)))


def hellinger_estimate(oracle, g: PolynomialSurrogate, grid: QuadratureGrid) -> HellingerEstimate:
    """Hellinger distance between ``oracle / c_pi`` and ``g^2 / c_g``, with standard error."""
    cg = g.mass()
    if not cg > 0:
        raise ValueError("surrogate is identically zero")
    root = sqrt_density(oracle(grid.points))
    if not float(grid.weights @ (root * root)) > 0:
        raise ValueError("target integrates to zero on the quadrature grid")
    absg = np.abs(g(grid.points))
    if grid.mode == "mc":
        return _mc_distance(root, absg, fb_mass=cg)
    return _quad_distance(root, absg, grid.weights, b_mass=cg)


def hellinger(oracle, g: PolynomialSurrogate, grid: QuadratureGrid) -> float:
    return hellinger_estimate(oracle, g, grid).value


def hellinger_between(f, h, grid: QuadratureGrid) -> HellingerEstimate:
    """Hellinger distance between two unnormalized density oracles."""
    a = sqrt_density(f(grid.points))
    b = sqrt_density(h(grid.points))
    if grid.mode == "mc":
        return _mc_distance(a, b)
    return _quad_distance(a, b, grid.weights)


def sqrt_l2_error(oracle, g: PolynomialSurrogate, grid: QuadratureGrid) -> float:
    """``||sqrt(oracle) - g||`` on the grid; ``2/sqrt(c_g)`` times it bounds the Hellinger distance."""
    diff = sqrt_density(oracle(grid.points)) - g(grid.points)
    return math.sqrt(float(grid.weights @ (diff * diff)))


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------

CSV_FIELDS = ("cardinality", "evaluations", "hellinger", "method", "seconds")


@dataclass
class ConvergenceRow:
    level: float
    cardinality: int
    evaluations: int
    hellinger: float
    method: str
    seconds: float
    stderr: float = 0.0
    failed: bool = False
    message: str = ""


@dataclass
class ConvergenceRecord:
    target: str
    rows: list[ConvergenceRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def write_csv(self, path, extra: bool = False) -> None:
        fields = list(CSV_FIELDS) + (["level", "stderr", "status"] if extra else [])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(fields)
            for r in self.rows:
                h = "failed" if r.failed else format(r.hellinger, ".17g")
                row = [r.cardinality, r.evaluations, h, r.method, format(r.seconds, ".6f")]
                if extra:
                    row += [format(r.level, "g"), format(r.stderr, ".17g"), "failed" if r.failed else "ok"]
                w.writerow(row)


def fit_surrogate(oracle, lam, method: str, rng, interp_mode: str = "sparse-combination", n=None, max_rounds=50):
    """Dispatch to the least-squares or interpolation surrogate; returns (surrogate, evaluations)."""
    if method == "wls":
        g, run = fit(oracle, lam, rng, n=n, max_rounds=max_rounds)
        return g, run.n
    if method == "interp":
        if interp_mode == "tensor":
            plan = InterpolationPlan("tensor", degrees=tuple(int(v) for v in lam.max_degrees()))
        else:
            plan = InterpolationPlan("sparse-combination", index_set=lam)
        g = fit_interpolation(oracle, plan)
        return g, g.meta["evaluations"]
    raise ValueError(f"unknown method {method!r}")


def convergence_study(
    oracle,
    target: str,
    weights,
    levels,
    method: str = "wls",
    grid: QuadratureGrid | None = None,
    seed: int = 0,
    log=None,
    n: int | None = None,
    max_rounds: int = 50,
    interp_mode: str = "sparse-combination",
) -> ConvergenceRecord:
    """Fit one surrogate per level of ``Lambda_{k, level}`` and record its Hellinger error.

    Each level draws from its own child of ``SeedSequence(seed)``, so a row does
    not depend on which other levels are in the study. Fit failures are recorded
    as failed rows. ``n`` overrides the least-squares sample count for every level.
    """
    levels = [float(v) for v in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    if method not in ("wls", "interp"):
        raise ValueError(f"unknown method {method!r}")
    children = np.random.SeedSequence(seed).spawn(len(levels))
    record = ConvergenceRecord(target)
    for level, child in zip(levels, children):
        lam = construct_anisotropic(weights, level)
        rng = np.random.default_rng(child)
        start = time.perf_counter()
        try:
            g, used = fit_surrogate(oracle, lam, method, rng, interp_mode, n=n, max_rounds=max_rounds)
            q = grid if grid is not None else QuadratureGrid.auto(lam.dim, int(lam.max_degrees().max()))
            est = hellinger_estimate(oracle, g, q)
            row = ConvergenceRow(level, len(lam), used, est.value, method, time.perf_counter() - start, est.stderr)
        except (FitError, ValueError, np.linalg.LinAlgError) as exc:
            row = ConvergenceRow(
                level, len(lam), 0, math.nan, method, time.perf_counter() - start, failed=True, message=str(exc)
            )
        record.rows.append(row)
        if log is not None:
            log(row)
    record.rows.sort(key=lambda r: r.cardinality)
    return record
