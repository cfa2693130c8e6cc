from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from oracles import eval_poly
from polytransport.multiindex import MultiIndexSet, construct_anisotropic
from polytransport.oracle import DensityOracle
from polytransport.parallel import map_rows
from polytransport.surrogate import PolynomialSurrogate, basis_matrix


def test_evaluation_matches_reference(rng):
    lam = construct_anisotropic((1.0, 0.7, 1.3), 4.0)
    c = rng.uniform(-1, 1, len(lam))
    g = PolynomialSurrogate(lam, c)
    x = rng.random((30, 3))
    assert np.max(np.abs(g(x) - eval_poly(lam.indices, c, x))) < 1e-12


def test_coefficient_lookup_and_immutability():
    lam = MultiIndexSet.from_indices([(0,), (1,), (2,)])
    g = PolynomialSurrogate(lam, [1.0, 2.0, 3.0])
    assert g.coefficient((2,)) == 3.0
    with pytest.raises(ValueError):
        g.coeffs[0] = 5.0


def test_length_mismatch():
    with pytest.raises(ValueError):
        PolynomialSurrogate(MultiIndexSet.from_indices([(0,)]), [1.0, 2.0])
    with pytest.raises(ValueError):
        basis_matrix(MultiIndexSet.from_indices([(0, 0)]), np.zeros((2, 3)))


def test_oracle_counts_under_threads():
    oracle = DensityOracle(lambda x: np.ones(len(x)), 2)
    with ThreadPoolExecutor(4) as pool:
        list(pool.map(lambda _: oracle(np.zeros((10, 2))), range(100)))
    assert oracle.evaluations == 1000
    oracle.reset()
    assert oracle.evaluations == 0


def test_oracle_checks_shapes():
    oracle = DensityOracle(lambda x: np.ones(len(x) + 1), 2)
    with pytest.raises(ValueError):
        oracle(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        DensityOracle(lambda x: np.ones(len(x)), 2)(np.zeros((3, 1)))


def test_map_rows_chunking_is_thread_independent(rng):
    x = rng.random((5000, 3))
    fn = lambda b: np.cumsum(b, axis=0)  # noqa: E731  (chunk-sensitive on purpose)
    assert np.array_equal(map_rows(fn, x, 1), map_rows(fn, x, 6))
