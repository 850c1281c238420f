import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmetric.errors import UsageError
from nmetric.exterior import (
    d_simplex,
    det_rule_margin,
    gram_matrix,
    hadamard_margin,
    sine_of_angle,
    transform_tuple,
    triangle_area_form,
    wedge_norm,
)
from nmetric.linalg import Rng


def _tuple(seed, k, m):
    return Rng(seed).normal_array(k * m).reshape(k, m)


def _wedge_by_minors(X):
    # ||x_1 ^ .. ^ x_k||^2 is the sum of squared k x k minors (Cauchy-Binet)
    k, m = X.shape
    return math.sqrt(sum(np.linalg.det(X[:, list(c)]) ** 2 for c in itertools.combinations(range(m), k)))


def test_wedge_examples():
    assert wedge_norm(np.eye(3)) == 1.0
    assert wedge_norm([[1.0, 0.0], [1.0, 1.0]]) == pytest.approx(1.0)
    assert wedge_norm([[1.0, 2.0], [2.0, 4.0]]) == 0.0
    assert wedge_norm(np.ones((3, 2))) == 0.0  # k > m
    assert wedge_norm([[3.0, 4.0]]) == pytest.approx(5.0)


@settings(max_examples=100)
@given(st.integers(1, 4), st.integers(0, 3), st.integers(0, 2**32))
def test_wedge_matches_cauchy_binet(k, extra, seed):
    X = _tuple(seed, k, k + extra)
    assert wedge_norm(X) == pytest.approx(_wedge_by_minors(X), rel=1e-9)


def test_gram_matrix_is_symmetric():
    X = _tuple(1, 3, 5)
    G = gram_matrix(X)
    assert np.array_equal(G, G.T)
    np.testing.assert_allclose(G, X @ X.T)


@settings(max_examples=200)
@given(st.integers(1, 4), st.integers(0, 2), st.integers(0, 2**32))
def test_determinant_rule(n, extra, seed):
    rng = Rng(seed)
    A = rng.normal_array(n * n).reshape(n, n)
    X = rng.normal_array(n * (n + extra)).reshape(n, n + extra)
    scale = max(1.0, abs(np.linalg.det(A)) * wedge_norm(X))
    assert det_rule_margin(A, X) <= 1e-8 * scale


def test_transform_tuple_convention():
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    Y = transform_tuple(A, X)
    # output j = sum_i A[i, j] x_i
    np.testing.assert_array_equal(Y[0], [1.0, 3.0])
    np.testing.assert_array_equal(Y[1], [2.0, 4.0])
    with pytest.raises(UsageError):
        transform_tuple(np.eye(3), X)


@settings(max_examples=200)
@given(st.integers(2, 5), st.integers(0, 3), st.integers(0, 2**32), st.data())
def test_hadamard_inequality(k, extra, seed, data):
    X = _tuple(seed, k, k + extra)
    j = data.draw(st.integers(1, k - 1))
    assert hadamard_margin(X, j) >= -1e-10 * max(1.0, wedge_norm(X))


def test_hadamard_equality_for_orthogonal_blocks():
    X = np.diag([2.0, 3.0, 5.0])
    assert hadamard_margin(X, 1) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(UsageError):
        hadamard_margin(X, 3)


def test_simplex_examples():
    tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    assert d_simplex(tri) == pytest.approx(1.0)  # twice the area 1/2
    assert d_simplex([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]) == pytest.approx(1.0)
    assert d_simplex([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]) == 0.0
    assert d_simplex([[1.0, 2.0], [4.0, 6.0]]) == pytest.approx(5.0)
    with pytest.raises(UsageError):
        d_simplex([[1.0, 2.0]])


@settings(max_examples=100)
@given(st.integers(0, 2**32))
def test_simplex_is_translation_and_rotation_invariant(seed):
    rng = Rng(seed)
    X = rng.normal_array(9).reshape(3, 3)
    Q, _ = np.linalg.qr(rng.normal_array(9).reshape(3, 3))
    shift = rng.normal_array(3)
    assert d_simplex(X @ Q.T + shift) == pytest.approx(d_simplex(X), rel=1e-9, abs=1e-12)


def test_sine_and_area():
    assert sine_of_angle([1, 0], [0, 2]) == pytest.approx(1.0)
    assert sine_of_angle([1, 0], [1, 1]) == pytest.approx(math.sqrt(0.5))
    assert sine_of_angle([1, 0], [-3, 0]) == 0.0
    assert sine_of_angle([1.0, 0.0], [1.0, 1e-9]) == pytest.approx(1e-9, rel=1e-6)
    with pytest.raises(UsageError):
        sine_of_angle([0, 0], [1, 0])
    u, v, w = np.array([0.0, 0.0]), np.array([2.0, 0.0]), np.array([0.0, 3.0])
    assert triangle_area_form(u, v, w) == pytest.approx(d_simplex([u, v, w]))


def test_non_finite_input_rejected():
    with pytest.raises(UsageError):
        wedge_norm([[1.0, math.nan]])
