from math import cos, cosh, exp, pi, sin, sinh, sqrt

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from hororadon.errors import DomainError
from hororadon.sl2core import IDENTITY, iwasawa, random_element, rotation, torus, unipotent
from hororadon.variety import (
    HoroChart,
    HoroPoint,
    HorocycleCurve,
    PointY,
    Y0,
    adjoint_action,
    chart_transport,
    horocycle,
    invariant_integral,
    iota,
    section,
    wave_operator,
)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def test_point_rejects_off_hyperboloid():
    with pytest.raises(DomainError):
        PointY(1.0, 1.0, 0.0)


@hypothesis_settings(max_examples=50)
@given(st.floats(0, 2 * pi, exclude_max=True), st.floats(-50, 50))
def test_chart_round_trip(phi, s):
    y = PointY.from_chart(phi, s)
    assert y.s == s
    assert abs(y.constraint_residual) < 1e-10 * (1 + s * s)
    assert abs(np.exp(1j * y.phi) - np.exp(1j * phi)) < 1e-12


def test_matrix_model():
    y = PointY.from_chart(0.4, -1.3)
    assert np.allclose(PointY.from_matrix(y.matrix).ambient, y.ambient, rtol=1e-15, atol=1e-15)
    assert np.trace(y.matrix) == 0
    assert np.linalg.det(y.matrix) == pytest.approx(-1.0)


def test_iota_examples():
    assert iota(IDENTITY) == Y0
    s = 0.7
    y = iota(torus(s))
    assert (y.x1, y.x2, y.x3) == pytest.approx((0.0, cosh(2 * s), sinh(2 * s)))
    # iota(r_θ) sits on the waist at angle 2θ + π/2
    y = iota(rotation(0.3))
    assert (y.x1, y.x2, y.x3) == pytest.approx((-sin(0.6), cos(0.6), 0.0))


def test_iota_is_equivariant(rng):
    for _ in range(100):
        g, h = random_element(rng, 0.6), random_element(rng, 0.6)
        left, right = iota(g @ h), iota(h).translated(g)
        assert np.allclose(left.ambient, right.ambient, rtol=1e-9, atol=1e-9)


def test_adjoint_action_vectorized(rng):
    g = random_element(rng, 0.6)
    phis = np.linspace(0, 2 * pi, 7)
    points = [PointY.from_chart(p, 0.5) for p in phis]
    moved = np.array(adjoint_action(g, *np.array([p.ambient for p in points]).T))
    for column, p in zip(moved.T, points):
        assert np.allclose(column, p.translated(g).ambient)


def test_section(rng):
    for _ in range(100):
        y = Y0.translated(random_element(rng, 0.8))
        g = section(y)
        assert np.allclose(iota(g).ambient, y.ambient, rtol=1e-9, atol=1e-9)


def test_horopoint_normalizes_angle():
    assert HoroPoint(2 * pi + 1.0, 0.3).angle == pytest.approx(1.0)
    assert HoroPoint(-1.0, 0.3).angle == pytest.approx(2 * pi - 1.0)


def _same(a: HoroPoint, b: HoroPoint) -> bool:
    return abs(np.exp(1j * a.angle) - np.exp(1j * b.angle)) < 1e-10 and abs(a.s - b.s) < 1e-10


def test_horopoint_from_group():
    xi = HoroPoint(1.2, -0.4)
    assert _same(HoroPoint.from_group(xi.representative()), xi)
    # right multiplication by N does not move the horosphere
    assert _same(HoroPoint.from_group(xi.representative() @ unipotent(3.0)), xi)
    # nor does -1 ∈ M_H
    assert _same(HoroPoint.from_group(-xi.representative()), xi)


def test_horopoint_translation(rng):
    for _ in range(50):
        g = random_element(rng, 0.6)
        xi = HoroPoint(rng.uniform(0, 2 * pi), rng.normal())
        moved = xi.translated(g)
        # g·ξ contains g·(points of ξ), shifted along N by the Iwasawa x of g·ξ's representative
        offset = iwasawa(g @ xi.representative()).x
        for x in (-1.0, 0.0, 2.0):
            y = horocycle(xi, x).translated(g)
            assert np.allclose(horocycle(moved, offset + x).ambient, y.ambient,
                               rtol=1e-8, atol=1e-8)


def test_horocycle_starts_at_representative():
    xi = HoroPoint(0.8, 1.1)
    assert horocycle(xi, 0.0) == iota(xi.representative())


def test_chart_transport_identity_base():
    xi = HoroPoint(0.8, 1.1)
    chart = HoroChart()
    for x in (-2.0, 0.5):
        assert np.allclose(chart_transport(chart, xi, x).ambient, horocycle(xi, x).ambient)


def test_chart_transport_at_origin():
    chart = HoroChart(rotation(pi / 4))
    xi = HoroPoint(0.0, 0.0)
    y = chart_transport(chart, xi, 0.0)
    assert np.allclose(y.ambient, Y0.ambient)


def test_curve_matches_iota(rng):
    left, right = random_element(rng, 0.5), random_element(rng, 0.5)
    curve = HorocycleCurve.through(left, right)
    for x in (-3.0, -0.2, 0.0, 1.7, 12.0):
        expected = iota(left @ unipotent(x) @ right).ambient
        assert np.allclose(curve.at(x), expected, rtol=1e-9, atol=1e-9)
    assert curve(np.zeros((2, 3))).shape == (3, 2, 3)


def test_focus_points():
    s = 0.5
    curve = HorocycleCurve.through(torus(s))
    # x3(x) = (e^{2s}(1 - x²) - e^{-2s}) / 2 peaks at 0 and vanishes at ±sqrt(1 - e^{-4s})
    points = curve.focus_points()
    crossing = sqrt(1 - exp(-4 * s))
    for expected in (0.0, crossing, -crossing):
        assert min(abs(p - expected) for p in points) < 1e-9
    assert points == sorted(points)


def test_focus_points_near_centres():
    curve = HorocycleCurve.through(IDENTITY)
    center = np.array(iota(unipotent(5.0)).ambient)
    assert min(abs(p - 5.0) for p in curve.focus_points([center])) < 1e-6


def test_invariant_integral():
    estimate = invariant_integral(lambda y: exp(-y.s ** 2))
    assert estimate.value == pytest.approx(2 * pi * sqrt(pi), rel=1e-9)


def test_invariant_integral_ambient_sampler():
    class Sampler:
        def ambient(self, x1, x2, x3):
            return np.exp(-x3 ** 2) * (1 + x1 / np.sqrt(1 + x3 ** 2))

    estimate = invariant_integral(Sampler())
    assert estimate.value == pytest.approx(2 * pi * sqrt(pi), rel=1e-9)


def test_invariant_integral_is_invariant(rng):
    def bump(x1, x2, x3):
        return np.exp(-((x1 - 0.5) ** 2 + (x2 - 1.0) ** 2 + (x3 - 0.5) ** 2))

    g = random_element(rng, 0.4)
    inverse = g.inverse()

    class Moved:
        def ambient(self, x1, x2, x3):
            return bump(*adjoint_action(inverse, x1, x2, x3))

    class Base:
        def ambient(self, x1, x2, x3):
            return bump(x1, x2, x3)

    center = PointY(0.5, 1.0, 0.5)
    base = invariant_integral(Base(), heights=[center.s]).value
    moved = invariant_integral(Moved(), heights=[center.translated(g).s]).value
    assert moved == pytest.approx(base, rel=1e-8)


@pytest.mark.parametrize("coordinate", [0, 1, 2])
def test_linear_coordinates_are_eigenfunctions(coordinate):
    def f(y):
        return y.ambient[coordinate]

    for y in (Y0, PointY.from_chart(1.0, 0.7), PointY.from_chart(4.0, -2.0)):
        assert wave_operator(f, y) == pytest.approx(-2 * f(y), abs=1e-6)


def test_wave_operator_rejects_step():
    with pytest.raises(DomainError):
        wave_operator(lambda y: 1.0, Y0, step=-1.0)


@hypothesis_settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 16), st.floats(0.0, 2 * pi), st.floats(-1.5, 1.5))
def test_wave_operator_commutes_with_translation(seed, phi, s):
    def f(y):
        x1, x2, x3 = y.ambient
        return exp(-((x1 - 0.5) ** 2 + (x2 - 1.0) ** 2 + (x3 - 0.5) ** 2))

    g = random_element(np.random.default_rng(seed), 0.4)
    inverse = g.inverse()

    def moved(y):
        return f(y.translated(inverse))

    y = PointY.from_chart(phi, s)
    expected = wave_operator(f, y.translated(inverse))
    assert wave_operator(moved, y) == pytest.approx(expected, abs=1e-5)
