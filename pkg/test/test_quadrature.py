from math import cos, exp, inf, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st
from scipy import integrate

from hororadon.errors import AccuracyError, DomainError
from hororadon.quadrature import integrate_line, integrate_singular, line_fourier
from hororadon.specs import GridSpec, QuadratureSpec


def test_gaussian():
    estimate = integrate_line(lambda x: exp(-x * x))
    assert abs(estimate.value - sqrt(pi)) < 1e-12
    assert estimate.evaluations > 0


def test_rational():
    estimate = integrate_line(lambda x: 1 / (1 + x * x) ** 2, QuadratureSpec(tail_exponent=4.0))
    assert abs(estimate.value - pi / 2) < 1e-10
    assert estimate.tail_bound > 0


def test_residue_oracle():
    # both poles in the lower half plane: the integral vanishes; ∫|f| = π
    estimate = integrate_line(lambda x: (x + 1j * (1 - x * x / 2)) ** -2, scale=pi)
    assert abs(estimate.value) < 1e-10
    assert estimate.error <= 1e-10 * pi


def test_finite_range_and_breakpoints():
    estimate = integrate_line(lambda x: abs(x - 0.3), lower=-1.0, upper=1.0, breakpoints=[0.3, 5.0])
    assert estimate.value == pytest.approx((1.3 ** 2 + 0.7 ** 2) / 2, abs=1e-12)


def test_empty_range():
    with pytest.raises(DomainError):
        integrate_line(lambda x: x, lower=1.0, upper=1.0)


def test_nan_sample():
    with pytest.raises(DomainError):
        integrate_line(lambda x: float("nan"), lower=0.0, upper=1.0)


def test_accuracy_error_carries_estimate():
    spec = QuadratureSpec(max_subdivisions=1, rel_tol=1e-14, abs_tol=1e-15)
    with pytest.raises(AccuracyError) as info:
        integrate_line(lambda x: np.sin(1 / x) if x else 0.0, spec, lower=0.0, upper=1.0)
    assert np.isfinite(info.value.estimate)
    assert info.value.error > 0


def test_unreachable_tolerance_raises():
    # quad stalls on roundoff long before 1e-15 relative
    spec = QuadratureSpec(rel_tol=1e-15, abs_tol=1e-300)
    with pytest.raises(AccuracyError):
        integrate_line(lambda x: exp(-x * x), spec, lower=-5.0, upper=5.0)
    with pytest.raises(AccuracyError):
        integrate_line(lambda x: sqrt(abs(x - 0.3)), spec, lower=0.0, upper=1.0)


def test_error_meets_tolerance():
    spec = QuadratureSpec()
    for f, lower, upper in ((lambda x: exp(-x * x), -inf, inf),
                            (lambda x: sqrt(abs(x - 0.3)), 0.0, 1.0),
                            (lambda x: 1 / (1 + x * x) ** 2, -inf, 2.0)):
        estimate = integrate_line(f, spec, lower=lower, upper=upper, breakpoints=[0.3])
        assert estimate.error <= max(spec.abs_tol, spec.rel_tol * abs(estimate.value))


def test_subdivision_budget_is_honoured():
    spec = QuadratureSpec(max_subdivisions=1)
    with pytest.raises(AccuracyError, match=r"subdivisions \(1\)"):
        integrate_line(lambda x: exp(-x * x), spec, lower=-5.0, upper=5.0)
    # breakpoints add their own intervals on top of the budget
    with pytest.raises(AccuracyError, match=r"subdivisions \(4\)"):
        integrate_line(lambda x: exp(-x * x), spec, lower=-5.0, upper=5.0,
                       breakpoints=[-1.0, 1.0])


@hypothesis_settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-1, 1))
def test_linearity(alpha, beta, shift):
    def f(x):
        return exp(-(x - shift) ** 2)

    def g(x):
        return 1 / (1 + x * x) ** 2

    spec = QuadratureSpec(tail_exponent=4.0)
    # opposite signs may cancel: measure against the mass of both terms
    lhs = integrate_line(lambda x: alpha * f(x) + beta * g(x), spec,
                         scale=2 * (abs(alpha) + abs(beta)))
    rhs = alpha * integrate_line(f, spec).value + beta * integrate_line(g, spec).value
    assert abs(lhs.value - rhs) <= 1e-9 * (1 + abs(alpha) + abs(beta))


@hypothesis_settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(0.2, 3))
def test_reflection(center, width):
    def f(x):
        return exp(-((x - center) / width) ** 2) * (1 + 0.5j * x)

    spec = QuadratureSpec()
    forward = integrate_line(f, spec, lower=-10.0, upper=10.0)
    backward = integrate_line(lambda x: f(-x), spec, lower=-10.0, upper=10.0)
    assert abs(forward.value - backward.value) < 1e-9


def test_singular_square_root():
    estimate = integrate_singular(lambda x: abs(x) ** -0.5, [0.0], -0.5, lower=-1.0, upper=1.0)
    assert abs(estimate.value - 4) < 1e-8


def test_singular_against_oversampled_reference():
    estimate = integrate_singular(lambda x: abs(x) ** -0.5 * cos(x), [0.0], -0.5,
                                  lower=-1.0, upper=1.0)
    # substitute x = t² on each side
    reference, _ = integrate.quad(lambda t: 4 * cos(t * t), 0.0, 1.0, epsabs=1e-14, epsrel=1e-14)
    assert abs(estimate.value - reference) < 1e-8


def test_singular_infinite_range():
    estimate = integrate_singular(lambda x: abs(x - 1) ** -0.5 * exp(-x * x), [1.0], -0.5)
    reference = sum(integrate.quad(lambda t, sign=sign: 2 * exp(-(1 + sign * t * t) ** 2),
                                   0.0, inf)[0] for sign in (1, -1))
    assert abs(estimate.value - reference) < 1e-8


def test_singular_rejects_non_integrable():
    with pytest.raises(DomainError):
        integrate_singular(lambda x: 1 / abs(x), [0.0], -1.0, lower=-1.0, upper=1.0)


def test_fourier_at_zero():
    grid = GridSpec.line(-10.0, 10.0, 401)
    samples = np.exp(-grid.axis(0) ** 2)
    table = line_fourier(samples, grid, 0.0, [0.0])
    assert abs(table[0.0] - sqrt(pi)) < 1e-8
    assert table.method == "direct"
    assert not table.warnings


def test_fourier_gaussian_pair():
    grid = GridSpec.line(-10.0, 10.0, 401)
    omegas = np.linspace(-4.0, 4.0, 33)
    table = line_fourier(np.exp(-grid.axis(0) ** 2), grid, 0.0, 1j * omegas)
    assert table.method == "czt"
    np.testing.assert_allclose(table.values, sqrt(pi) * np.exp(-omegas ** 2 / 4), atol=1e-8)


def test_fourier_czt_matches_direct():
    s = np.linspace(-8.0, 9.0, 300)
    samples = np.exp(-(s - 1) ** 2) * (1 + 0.3j * s)
    lattice = 1j * np.linspace(-2.0, 3.0, 11)
    fast = line_fourier(samples, s, 0.5, lattice)
    picks = [0, 2, 10, 4]
    direct = line_fourier(samples, s, 0.5, lattice[picks])
    assert fast.method == "czt" and direct.method == "direct"
    np.testing.assert_allclose(fast.values[picks], direct.values, atol=1e-10)


def test_fourier_weight_exponent():
    grid = GridSpec.line(-12.0, 12.0, 801)
    table = line_fourier(np.exp(-(grid.axis(0) - 1) ** 2), grid, 1.0, [0.0])
    assert abs(table[0.0] - exp(5 / 4) * sqrt(pi)) < 1e-6


def test_fourier_agrees_with_integrate_line():
    grid = GridSpec.line(-10.0, 10.0, 2001)
    s = grid.axis(0)
    table = line_fourier(1 / (1 + s ** 2) ** 3, grid, 0.0, [0.0])
    reference = integrate_line(lambda x: 1 / (1 + x * x) ** 3, lower=-10.0, upper=10.0)
    assert abs(table[0.0] - reference.value) < 1e-10


def test_fourier_truncation_warning():
    grid = GridSpec.line(-1.0, 1.0, 41)
    table = line_fourier(np.exp(-grid.axis(0) ** 2), grid, 0.0, [0.0])
    assert table.warnings


def test_fourier_rejects_mismatched_samples():
    with pytest.raises(DomainError):
        line_fourier(np.ones(3), np.linspace(0.0, 1.0, 4), 0.0, [0.0])
