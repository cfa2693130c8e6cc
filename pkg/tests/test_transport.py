import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import gauss, ks_statistic, quadrature_S
from polytransport.multiindex import MultiIndexSet, construct_anisotropic, total_degree
from polytransport.surrogate import PolynomialSurrogate
from polytransport.targets import positive_planted
from polytransport.transport import (
    DEFAULT_ITERATIONS,
    TriangularTransport,
    bisection_iterations,
    build,
    evaluate_S,
    evaluate_T,
    naive_S,
    pushforward_sample,
)


def cubic_cdf(x):
    return ((2 * x - 1) ** 3 + 1) / 2


def one_d(coeffs):
    lam = MultiIndexSet.from_indices([(n,) for n in range(len(coeffs))])
    return build(PolynomialSurrogate(lam, coeffs))


def random_surrogate(rng, d, level):
    k = rng.uniform(0.6, 1.5, d)
    lam = construct_anisotropic(k, level)
    return PolynomialSurrogate(lam, rng.uniform(-1, 1, len(lam)))


def test_uniform_surrogate_is_identity(rng):
    t = build(PolynomialSurrogate(MultiIndexSet.from_indices([(0, 0, 0)]), [1.0]))
    x = rng.random((20, 3))
    assert np.array_equal(evaluate_S(t, x), x)
    assert np.max(np.abs(evaluate_T(t, x) - x)) <= 2.0**-DEFAULT_ITERATIONS


def test_degree_one_cdf():
    t = one_d([0.0, 1.0])
    x = np.linspace(0, 1, 17)[:, None]
    assert np.max(np.abs(t.S(x)[:, 0] - cubic_cdf(x[:, 0]))) < 1e-15
    assert abs(t.S([0.5])[0] - 0.5) < 1e-16
    assert abs(t.S([0.0])[0]) < 1e-12 and abs(t.S([1.0])[0] - 1.0) < 1e-12
    # the density vanishes at 1/2, where S(1/2 + e) - 1/2 = 4 e^3 drops below
    # rounding for e < ~2.4e-6, so bisection cannot resolve further
    assert abs(t.T([0.5], iterations=30)[0] - 0.5) < 3e-6
    assert abs(t.T([0.2], iterations=30)[0] - 0.5 + 0.5 * 0.6 ** (1 / 3)) <= 2.0**-30


def test_zero_surrogate_rejected():
    with pytest.raises(ValueError):
        build(PolynomialSurrogate(MultiIndexSet.from_indices([(0,), (1,)]), [0.0, 0.0]))


def test_domain_checks():
    t = one_d([1.0, 0.2])
    with pytest.raises(ValueError):
        t.S([1.5])
    with pytest.raises(ValueError):
        t.T([-0.1])
    with pytest.raises(ValueError):
        t.S(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        t.T([0.3], iterations=0)


@pytest.mark.parametrize("d,level", [(1, 12.0), (2, 5.0), (3, 3.5)])
def test_fast_matches_naive(rng, d, level):
    g = random_surrogate(rng, d, level)
    t = build(g)
    x = rng.random((50, d))
    fast = t.S(x)
    naive = np.array([naive_S(g, xi) for xi in x])
    assert np.max(np.abs(fast - naive)) < 1e-11


@pytest.mark.parametrize("d,level", [(1, 6.0), (2, 3.5), (3, 2.5)])
def test_naive_matches_quadrature_oracle(rng, d, level):
    g = random_surrogate(rng, d, level)
    for x in rng.random((3, d)):
        assert np.max(np.abs(naive_S(g, x) - quadrature_S(g.index_set.indices, g.coeffs, x))) < 1e-10


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_S_range_and_boundaries(d, seed):
    rng = np.random.default_rng(seed)
    g = random_surrogate(rng, d, 4.0)
    t = build(g)
    x = rng.random((10, d))
    s = t.S(x)
    assert np.all((s >= 0) & (s <= 1))
    lo, hi = x.copy(), x.copy()
    lo[:, -1], hi[:, -1] = 0.0, 1.0
    assert np.max(np.abs(t.S(lo)[:, -1])) < 1e-10
    assert np.max(np.abs(t.S(hi)[:, -1] - 1.0)) < 1e-10


@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_S_monotone_in_each_coordinate(d, seed):
    rng = np.random.default_rng(seed)
    t = build(random_surrogate(rng, d, 4.0))
    head = rng.random(d)
    j = int(rng.integers(d))
    pts = np.tile(head, (200, 1))
    pts[:, j] = np.linspace(0, 1, 200)
    assert np.all(np.diff(t.S(pts)[:, j]) >= -1e-14)


def test_mass_telescoping(rng):
    g = random_surrogate(rng, 3, 4.0)
    t = build(g)
    nodes, w = gauss(0.0, 1.0, 64)
    for head in rng.random((5, 3)):
        for j in range(2):
            pts = np.tile(head, (64, 1))
            pts[:, j] = nodes
            s = t.marginal_masses(pts)
            assert abs(s[0, j] - np.sum(w * s[:, j + 1])) < 1e-10


def test_density_identity(rng):
    lam = total_degree(2, 4)
    g = positive_planted(lam, rng)
    t = build(PolynomialSurrogate(lam, g.coeffs))
    h = 1e-6
    for x in rng.uniform(0.05, 0.95, (100, 2)):
        jac = 1.0
        for j in range(2):
            lo, hi = x.copy(), x.copy()
            lo[j] -= h
            hi[j] += h
            jac *= (t.S(hi)[j] - t.S(lo)[j]) / (2 * h)
        ref = g.sqrt(x[None])[0] ** 2 / t.mass
        assert abs(jac - ref) < 1e-4 * max(1.0, ref)


def test_scale_invariance(rng):
    g = random_surrogate(rng, 2, 5.0)
    x = rng.random((30, 2))
    assert np.max(np.abs(build(g).S(x) - build(g.scaled(10.0)).S(x))) < 1e-12


def test_degenerate_marginal_uses_identity():
    # g = L_1(x1) vanishes on x1 = 1/2, so the conditional of x2 is undefined there
    lam = MultiIndexSet.from_indices([(0, 0), (1, 0), (0, 1)])
    g = PolynomialSurrogate(lam, [1.0 if nu == (1, 0) else 0.0 for nu in lam])
    t = build(g)
    assert np.array_equal(t.S([0.5, 0.3]), [0.5, 0.3])


def test_round_trip_positive_surrogate(rng):
    lam = construct_anisotropic((1.0, 1.3, 0.8), 3.0)
    g = positive_planted(lam, rng)
    t = build(PolynomialSurrogate(lam, g.coeffs))
    x = rng.random((100, 3))
    assert np.max(np.abs(t.T(t.S(x)) - x)) < 1e-12


def test_threads_do_not_change_results(rng):
    t = build(random_surrogate(rng, 2, 6.0))
    y = rng.random((3000, 2))
    assert np.array_equal(t.T(y, threads=1), t.T(y, threads=4))
    assert np.array_equal(t.S(y, threads=1), t.S(y, threads=3))


def test_single_point_and_batch_agree(rng):
    t = build(random_surrogate(rng, 2, 5.0))
    y = rng.random((4, 2))
    batch = t.T(y)
    for i in range(4):
        assert np.array_equal(t.T(y[i]), batch[i])


def test_pushforward_ks():
    t = one_d([0.0, 1.0])
    x = pushforward_sample(t, 100_000, np.random.default_rng(1))
    assert ks_statistic(x[:, 0], cubic_cdf) < 0.01


def test_pushforward_uniform_chi_square(rng):
    t = build(PolynomialSurrogate(MultiIndexSet.from_indices([(0, 0)]), [2.0]))
    x = pushforward_sample(t, 10_000, rng)
    counts, _, _ = np.histogram2d(x[:, 0], x[:, 1], bins=10, range=[[0, 1], [0, 1]])
    chi2 = np.sum((counts - 100.0) ** 2 / 100.0)
    assert chi2 < 134.6  # 99th percentile of chi-square with 99 degrees of freedom


def test_pushforward_two_modes(rng):
    # g = L_1 / sqrt(3) = 2x - 1 has a double zero of g^2 at 1/2
    t = one_d([0.0, 1.0 / np.sqrt(3.0)])
    x = pushforward_sample(t, 100_000, rng)[:, 0]
    counts, _ = np.histogram(x, bins=20, range=(0, 1))
    assert counts[9] + counts[10] <= 0.01 * counts.max() * 2
    assert counts[0] > 0.1 * len(x) and counts[-1] > 0.1 * len(x)


def test_pushforward_empty():
    t = one_d([1.0])
    assert pushforward_sample(t, 0, np.random.default_rng(0)).shape == (0, 1)


def test_pushforward_reproducible():
    t = one_d([1.0, 0.4, 0.2])
    a = pushforward_sample(t, 500, np.random.default_rng(9))
    b = pushforward_sample(t, 500, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_bisection_iteration_rule():
    assert bisection_iterations(100, 2, None) == DEFAULT_ITERATIONS
    assert bisection_iterations(1024, 2, (3, 1)) == 20
    assert bisection_iterations(1000, 1, (0.5, 0.5)) == 10


def test_rosenbrock_surrogate_round_trip_in_y():
    from polytransport.targets import RosenbrockTarget
    from polytransport.wls import fit

    g, _ = fit(RosenbrockTarget().oracle(), total_degree(2, 10), np.random.default_rng(0))
    t = TriangularTransport(g)
    y = np.random.default_rng(1).random((100, 2))
    assert np.max(np.abs(t.S(t.T(y, iterations=40)) - y)) < 1e-9
