import numpy as np
import pytest
from numpy.polynomial import Polynomial

from lindblad_learn.bernstein import (
    BernsteinRate, basis_eval, binomial, rate_eval, sample_rate,
)


def test_basis_examples():
    assert basis_eval(1, 2, 0.5) == pytest.approx(0.5)
    assert basis_eval(0, 2, 0.0) == 1.0
    assert sum(basis_eval(j, 5, 0.37) for j in range(6)) == pytest.approx(1.0, abs=1e-15)


def test_basis_errors():
    with pytest.raises(ValueError):
        basis_eval(3, 2, 0.5)
    with pytest.raises(ValueError):
        basis_eval(-1, 2, 0.5)
    with pytest.raises(ValueError):
        basis_eval(0, 2, 1.5)


def test_binomial_matches_math_comb():
    import math
    for n in range(21):
        for k in range(n + 1):
            assert binomial(n, k) == math.comb(n, k)


def test_partition_of_unity(rng):
    for _ in range(500):
        n = int(rng.integers(0, 9))
        t = rng.random()
        assert abs(sum(basis_eval(j, n, t) for j in range(n + 1)) - 1.0) <= 1e-12


def test_rate_examples():
    flat = BernsteinRate((1.0, 1.0, 1.0), (0.0, 10.0))
    np.testing.assert_allclose(rate_eval(flat, np.linspace(0, 10, 7)), 1.0, atol=1e-15)
    bump = BernsteinRate((0.1, 2.0, 0.1), (0.0, 10.0))
    assert rate_eval(bump, 5.0) == pytest.approx(1.05, abs=1e-14)
    r = BernsteinRate((0.3, 1.7, 0.9), (2.0, 4.0))
    assert r(2.0) == 0.3 and r(4.0) == pytest.approx(0.9)
    assert r.scalar(3.3) == pytest.approx(r(3.3), abs=1e-15)


def test_rate_rejects_time_outside_window():
    r = BernsteinRate((1.0, 2.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        r(1.5)
    with pytest.raises(ValueError):
        r.scalar(-0.1)


def test_rate_rejects_negative_coefficients():
    with pytest.raises(ValueError):
        BernsteinRate((1.0, -0.1))


def test_rates_are_nonnegative(rng):
    for _ in range(10_000):
        n = int(rng.integers(0, 6))
        r = BernsteinRate(tuple(rng.uniform(0, 2, n + 1)), (0.0, 10.0))
        assert r.scalar(rng.uniform(0, 10)) >= 0.0


def test_degree_zero_is_constant(rng):
    r = BernsteinRate.constant(0.42, (0.0, 10.0))
    assert r.degree == 0
    np.testing.assert_array_equal(r(rng.uniform(0, 10, 50)), 0.42)


def test_sample_rate():
    r = sample_rate(2, 0.1, 2.0, np.random.default_rng(3), (0.0, 10.0))
    assert r.degree == 2
    assert all(0.1 < c < 2.0 for c in r.coeffs)
    again = sample_rate(2, 0.1, 2.0, np.random.default_rng(3), (0.0, 10.0))
    assert r.coeffs == again.coeffs
    assert sample_rate(0, 0.0, 2.0, np.random.default_rng(1)).degree == 0
    with pytest.raises(ValueError):
        sample_rate(2, 1.0, 0.5, np.random.default_rng(1))


def _monomial_antiderivative(coeffs, t0, t1, t):
    """Independent route: expand in powers of tau, integrate with numpy.polynomial."""
    n = len(coeffs) - 1
    tau = Polynomial([0.0, 1.0])
    poly = sum(c * binomial(n, j) * tau**j * (1 - tau) ** (n - j) for j, c in enumerate(coeffs))
    return (t1 - t0) * poly.integ()((t - t0) / (t1 - t0))


def test_closed_form_integral_matches_polynomial_oracle(rng):
    for _ in range(50):
        n = int(rng.integers(0, 7))
        t0 = rng.uniform(-1, 1)
        t1 = t0 + rng.uniform(0.5, 10)
        r = BernsteinRate(tuple(rng.uniform(0, 2, n + 1)), (t0, t1))
        ts = np.linspace(t0, t1, 13)
        np.testing.assert_allclose(r.integral(ts), _monomial_antiderivative(r.coeffs, t0, t1, ts),
                                   rtol=1e-12, atol=1e-12)


def test_serialization_round_trip():
    r = BernsteinRate((0.5, 1.5, 0.3), (0.0, 10.0))
    d = r.to_dict()
    assert d == {"degree": 2, "coeffs": [0.5, 1.5, 0.3], "t_span": [0.0, 10.0]}
    assert BernsteinRate.from_dict(d) == r
