import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vertexlab import kernel
from vertexlab.kernel import ModelParams, params_from_c, params_from_delta, params_from_q

angle = st.floats(-math.pi, math.pi, allow_nan=False)
qs = st.floats(4.05, 200.0)


def test_params_relations():
    p = params_from_q(10.0)
    assert p.c == pytest.approx(math.sqrt(2 + math.sqrt(10)), rel=1e-15)
    assert p.Delta == pytest.approx(-math.sqrt(10) / 2, rel=1e-15)
    assert math.cosh(p.lambda_) == pytest.approx(math.sqrt(10) / 2, rel=1e-14)
    assert p.p_c == pytest.approx(math.sqrt(10) / (1 + math.sqrt(10)), rel=1e-15)


@pytest.mark.parametrize("q", [4.0, 3.0, -1.0])
def test_params_reject_q(q):
    with pytest.raises(ValueError):
        params_from_q(q)


def test_params_reject_c_and_delta():
    with pytest.raises(ValueError):
        params_from_c(2.0)
    with pytest.raises(ValueError):
        params_from_delta(-1.0)


def test_minus_infinity():
    p = ModelParams.minus_infinity()
    assert p.is_infinite and p.lambda_ == math.inf


def test_acosh_near_one():
    x = 1 + 1e-12
    assert kernel._acosh(x) == pytest.approx(math.acosh(x), rel=1e-6)
    assert kernel._acosh(1.0) == 0.0


@given(qs)
@settings(max_examples=40, deadline=None)
def test_round_trips(q):
    p = params_from_q(q)
    assert params_from_c(p.c).q == pytest.approx(q, rel=1e-10)
    assert params_from_delta(p.Delta).q == pytest.approx(q, rel=1e-10)


def test_json_round_trip():
    p = params_from_q(7.25)
    data = json.loads(json.dumps(p.to_json()))
    assert set(data) == {"q", "p_c", "c", "Delta", "lambda"}
    assert ModelParams.from_json(data) == p


@given(angle, angle, qs)
@settings(max_examples=100, deadline=None)
def test_theta_antisymmetry(x, y, q):
    D = params_from_q(q).Delta
    assert kernel.theta(D, x, y) == pytest.approx(-kernel.theta(D, y, x), abs=1e-13)


@given(angle, angle, qs)
@settings(max_examples=100, deadline=None)
def test_theta_quasi_periodic(x, y, q):
    D = params_from_q(q).Delta
    t = kernel.theta(D, x, y)
    assert kernel.theta(D, x + 2 * math.pi, y) == pytest.approx(t - 2 * math.pi, abs=1e-12)
    assert kernel.theta(D, x, y + 2 * math.pi) == pytest.approx(t + 2 * math.pi, abs=1e-12)


@given(angle, angle, qs)
@settings(max_examples=100, deadline=None)
def test_theta_derivatives_match_finite_differences(x, y, q):
    D = params_from_q(q).Delta
    h = 1e-6
    fd1 = (kernel.theta(D, x + h, y) - kernel.theta(D, x - h, y)) / (2 * h)
    fd2 = (kernel.theta(D, x, y + h) - kernel.theta(D, x, y - h)) / (2 * h)
    assert kernel.d1_theta(D, x, y) == pytest.approx(fd1, rel=1e-7, abs=1e-8)
    assert kernel.d2_theta(D, x, y) == pytest.approx(fd2, rel=1e-7, abs=1e-8)


def test_theta_exponential_form():
    D = params_from_q(6.0).Delta
    x, y = 0.7, -1.9
    A = np.exp(-1j * x) + np.exp(1j * y) - 2 * D
    want = np.exp(1j * (x - y)) * A / np.conj(A)
    assert np.exp(-1j * kernel.theta(D, x, y)) == pytest.approx(want, abs=1e-14)
    assert kernel.theta(D, 0.0, 0.0) == 0.0


def test_theta_minus_infinity():
    D = kernel.DELTA_MINUS_INFINITY
    assert kernel.theta(D, 0.3, -0.2) == pytest.approx(-0.5)
    assert kernel.d1_theta(D, 0.3, 0.1) == -1.0
    assert kernel.d2_theta(D, 0.3, 0.1) == 1.0
    assert kernel.theta(-1e9, 0.3, -0.2) == pytest.approx(-0.5, abs=1e-8)


def test_theta_vectorized():
    D = params_from_q(5.0).Delta
    x = np.linspace(-3, 3, 7)
    out = kernel.theta(D, x[:, None], x[None, :])
    assert out.shape == (7, 7)
    assert np.allclose(out, -out.T, atol=1e-14)
    assert isinstance(kernel.theta(D, 0.1, 0.2), float)


def test_xi_matches_naive_form():
    a = np.linspace(-math.pi, math.pi, 11)
    mu = 0.8
    assert np.allclose(kernel.xi(mu, a), np.sinh(mu) / (np.cosh(mu) - np.cos(a)), rtol=1e-13)
    with pytest.raises(ValueError):
        kernel.xi(0.0, a)


@given(angle, st.floats(0.05, 5.0))
@settings(max_examples=100, deadline=None)
def test_k_round_trip(a, lam):
    assert kernel.k_inverse(lam, kernel.k_map(lam, a)) == pytest.approx(a, abs=1e-12)


@pytest.mark.parametrize("lam", [0.1, 1.0, 3.0])
def test_k_map_properties(lam):
    assert kernel.k_map(lam, math.pi) == pytest.approx(math.pi)
    assert kernel.k_map(lam, -math.pi) == pytest.approx(-math.pi)
    a = np.linspace(-math.pi, math.pi, 201)
    k = kernel.k_map(lam, a)
    assert np.all(np.diff(k) > 0)
    assert np.allclose(kernel.k_map(lam, -a), -k)
    # exponential definition
    want = (np.exp(lam) - np.exp(-1j * a[1:-1])) / (np.exp(lam - 1j * a[1:-1]) - 1)
    assert np.allclose(np.exp(1j * k[1:-1]), want, atol=1e-12)
    # derivative
    h = 1e-6
    fd = (kernel.k_map(lam, a[1:-1] + h) - kernel.k_map(lam, a[1:-1] - h)) / (2 * h)
    assert np.allclose(kernel.k_prime(lam, a[1:-1]), fd, rtol=1e-7)
