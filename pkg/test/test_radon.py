import io
from math import cosh, exp, log, pi

import numpy as np
import pytest
from scipy import integrate

from hororadon.errors import DomainError
from hororadon.funcspace import (
    Decay,
    FunctionOnY,
    combination,
    discrete_series,
    gaussian_bump,
    radial_bump,
)
from hororadon.radon import (
    CSV_HEADER,
    MultiplierTable,
    TransformGrid,
    a_rho_asymptotics,
    change_of_variables_check,
    dual_radon,
    horocycle_mass,
    horopoint_along_h,
    inversion_multiplier_probe,
    radon,
    radon_at,
    radon_grid,
    radon_translated,
    sup_bound_probe,
)
from hororadon.sl2core import IDENTITY, W0, h_element, random_element, rotation, torus, unipotent
from hororadon.specs import GridSpec, QuadratureSpec
from hororadon.variety import HoroChart, HoroPoint, Y0, iota


@pytest.fixture
def rng():
    return np.random.default_rng(11)


KERNEL_POINTS = [HoroPoint(angle, s) for angle in (0.0, 1.3, 4.0) for s in (-2.0, 0.0, 1.5)]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_discrete_series_in_kernel(n):
    f = discrete_series(n)
    for xi in KERNEL_POINTS:
        mass = horocycle_mass(f, xi).value.real
        assert mass > 0
        assert abs(radon(f, xi, scale=mass).value) <= 1e-8 * mass


def test_translated_discrete_series_in_kernel(rng):
    f = discrete_series(3).translated(random_element(rng, 0.5))
    for xi in KERNEL_POINTS[:4]:
        mass = horocycle_mass(f, xi).value.real
        assert abs(radon(f, xi, scale=mass).value) <= 1e-8 * mass


def test_discrete_series_in_kernel_of_w0_chart():
    f = discrete_series(2)
    chart = HoroChart(W0)
    for xi in KERNEL_POINTS[::2]:
        mass = horocycle_mass(f, xi, chart=chart).value.real
        assert mass > 0
        assert abs(radon_translated(f, chart, xi, scale=mass).value) <= 1e-8 * mass


def test_bump_transform_is_positive():
    f = gaussian_bump(Y0, 1.0)
    for xi in KERNEL_POINTS:
        value = radon(f, xi).value
        assert value.real > 0
        assert abs(value.imag) < 1e-12


def test_radial_bump_against_direct_quadrature():
    width = 0.8
    f = radial_bump(width)
    for s in (-1.0, 0.0, 0.5):
        # x3 along a_s n_x·y0 is (e^{2s}(1 - x²) - e^{-2s}) / 2
        reference, _ = integrate.quad(
            lambda x: exp(-((exp(2 * s) * (1 - x * x) - exp(-2 * s)) / 2) ** 2 / width ** 2),
            -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
        for angle in (0.0, 2.5):
            assert radon(f, HoroPoint(angle, s)).value.real == pytest.approx(reference, rel=1e-8)


def test_equivariance(rng):
    f = gaussian_bump(Y0, 1.0)
    for _ in range(3):
        g = random_element(rng, 0.5)
        xi = HoroPoint(rng.uniform(0, 2 * pi), rng.normal(0, 0.5))
        moved = radon(f.translated(g), xi).value
        pulled = radon(f, xi.translated(g.inverse())).value
        assert moved == pytest.approx(pulled, rel=1e-8)


def test_radon_at_ignores_n():
    f = gaussian_bump(Y0, 1.0)
    g = rotation(0.4) @ torus(0.3)
    assert radon_at(f, g @ unipotent(2.0)).value == pytest.approx(radon_at(f, g).value, rel=1e-9)


def test_radon_translated_identity_chart():
    f = gaussian_bump(Y0, 1.0)
    xi = HoroPoint(0.7, 0.2)
    assert radon_translated(f, HoroChart(), xi).value == pytest.approx(radon(f, xi).value)


def test_radon_translated_against_direct_quadrature():
    f = gaussian_bump(Y0, 1.0)
    base = rotation(0.6)
    xi = HoroPoint(1.0, 0.3)
    g = xi.representative()
    reference, _ = integrate.quad(
        lambda t: f(iota(g @ base.inverse() @ unipotent(t) @ base)).real,
        -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    assert radon_translated(f, HoroChart(base), xi).value.real == pytest.approx(reference, rel=1e-8)


def test_rejects_non_integrable_decay():
    f = FunctionOnY(label="slow", sampler=lambda x1, x2, x3: (x1 * x1 + x2 * x2) ** -0.25,
                    decay=Decay("discrete-series", 1.0))
    with pytest.raises(DomainError):
        radon(f, HoroPoint(0.0, 0.0))


@pytest.mark.parametrize("f", [discrete_series(2), gaussian_bump(Y0, 1.0)], ids=["f2", "bump"])
def test_change_of_variables(f):
    for angle in (0.0, 2.0):
        for s in (-1.0, 0.5):
            assert change_of_variables_check(f, angle, s).residual <= 1e-9


def test_a_rho_law():
    values = a_rho_asymptotics(gaussian_bump(Y0, 1.0), IDENTITY, [4.0, 5.0])
    assert abs(values[1] - values[0]) <= 1e-2 * abs(values[1])


def test_sup_bound_probe():
    grid = GridSpec.horospheres(4, 5, 2.0)
    sup = sup_bound_probe(discrete_series(2), grid)
    assert 0 < sup < np.inf


# *** grids *******************************************************************

def test_radon_grid_kernel():
    f = discrete_series(2)
    out = radon_grid(f, GridSpec.horospheres(4, 5, 2.0))
    assert out.shape == (4, 5)
    assert not out.flagged.any()
    assert np.all(np.abs(out.values) <= 1e-8 * out.masses)


def test_radon_grid_flags_failures():
    f = FunctionOnY(label="nan", sampler=lambda x1, x2, x3: np.nan * x1, decay=Decay("custom", 4.0))
    out = radon_grid(f, GridSpec.horospheres(2, 2, 1.0))
    assert out.flagged.all()
    assert np.all(np.isinf(out.errors))
    assert len(out.warnings) == 4


def test_csv_round_trip():
    out = radon_grid(gaussian_bump(Y0, 1.0), GridSpec.horospheres(4, 3, 1.0), with_mass=False)
    stream = io.StringIO()
    out.to_csv(stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 12
    # heights vary slowest
    assert [float(line.split(",")[1]) for line in lines[1:5]] == [-1.0] * 4
    back = TransformGrid.from_csv(io.StringIO(stream.getvalue()))
    np.testing.assert_array_equal(back.values, out.values)
    np.testing.assert_array_equal(back.angles, out.angles)


def test_csv_rejects_malformed():
    with pytest.raises(DomainError):
        TransformGrid.from_csv(io.StringIO("a,b,c\n1,2,3\n"))
    with pytest.raises(DomainError):
        TransformGrid.from_csv(io.StringIO(",".join(CSV_HEADER) + "\n"))
    text = ",".join(CSV_HEADER) + "\n0,0,1,0,0\n1,0,1,0,0\n0,1,1,0,0\n"
    with pytest.raises(DomainError):
        TransformGrid.from_csv(io.StringIO(text))


def test_grid_shape_mismatch():
    with pytest.raises(DomainError):
        TransformGrid(np.zeros(2), np.zeros(3), np.zeros((3, 2), dtype=complex), np.zeros((2, 3)))


def _synthetic() -> TransformGrid:
    out = TransformGrid.empty(GridSpec.horospheres(8, 9, 4.0))
    angles, heights = np.meshgrid(out.angles, out.heights, indexing="ij")
    out.values[:] = np.exp(-heights ** 2) * (2 + np.cos(angles))
    return out


def test_interpolator():
    out = _synthetic()
    F = out.interpolator()
    assert F(HoroPoint(out.angles[3], out.heights[2])) == pytest.approx(out.values[3, 2])
    # periodic in the angle, linear across the seam
    seam = HoroPoint(out.angles[-1] + (2 * pi - out.angles[-1]) / 2, 0.0)
    assert F(seam) == pytest.approx((out.values[-1, 4] + out.values[0, 4]) / 2)
    assert F(HoroPoint(0.3, 10.0)) == 0


def test_kinks_along_h_hit_grid_lines():
    out = TransformGrid.empty(GridSpec.horospheres(4, 5, 2.0))
    g = rotation(0.5) @ torus(-0.2) @ unipotent(0.3)
    kinks = out.kinks_along_h(g)
    assert kinks and kinks == sorted(kinks)
    for u in kinks:
        xi = horopoint_along_h(g, u)
        on_height = np.min(np.abs(out.heights - xi.s)) < 1e-9
        on_angle = np.min(np.abs(np.exp(1j * out.angles) - np.exp(1j * xi.angle))) < 1e-9
        assert on_height or on_angle


def test_slice_sups_and_decay_height():
    out = _synthetic()
    sups = out.slice_sups()
    assert sups[4] == pytest.approx(3.0)
    assert out.decay_height(1e-3) == pytest.approx(2.0)
    assert TransformGrid.empty(GridSpec.horospheres(2, 2, 1.0)).decay_height() == 0.0


# *** dual transform **********************************************************

def test_horopoint_along_h():
    assert horopoint_along_h(IDENTITY, 0.0) == HoroPoint(0.0, 0.0)
    g = rotation(0.5) @ torus(-0.2)
    for u in (-1.0, 0.3, 2.0):
        expected = HoroPoint.from_group(g @ h_element(u))
        actual = horopoint_along_h(g, u)
        assert abs(np.exp(1j * actual.angle) - np.exp(1j * expected.angle)) < 1e-10
        assert actual.s == pytest.approx(expected.s)


def test_horopoint_height_grows_like_u():
    g = rotation(0.5) @ torus(-0.2) @ unipotent(0.3)
    for sign in (1.0, -1.0):
        near, far = (horopoint_along_h(g, sign * u).s - u for u in (20.0, 30.0))
        assert far == pytest.approx(near, abs=1e-9)


def test_dual_radon():
    def F(xi):
        return exp(-xi.s ** 2)

    reference, _ = integrate.quad(lambda u: exp(-(log(cosh(2 * u)) / 2) ** 2), -40, 40,
                                  points=[0.0], epsabs=1e-13, epsrel=1e-12, limit=200)
    estimate = dual_radon(F, IDENTITY)
    assert estimate.value.real == pytest.approx(reference, rel=1e-9)
    assert estimate.tail_bound < 1e-12


def _lopsided(xi):
    return exp(-xi.s ** 2) * (1 + 0.3 * np.cos(xi.angle))


def test_dual_radon_rotation_equivariance():
    g = torus(-0.2) @ unipotent(0.3)
    for theta in (0.4, 2.5):
        k = rotation(theta)

        def turned(xi, k=k):
            return _lopsided(HoroPoint.from_group(k @ xi.representative()))

        moved = dual_radon(_lopsided, k @ g).value
        assert dual_radon(turned, g).value == pytest.approx(moved, rel=1e-9)
    assert dual_radon(lambda xi: exp(-xi.s ** 2), rotation(1.1) @ g).value == pytest.approx(
        dual_radon(lambda xi: exp(-xi.s ** 2), g).value, rel=1e-9)


def test_dual_radon_window_doubling():
    g = rotation(0.5) @ torus(-0.2)
    short = dual_radon(_lopsided, g, QuadratureSpec(truncation_radius=8.0))
    wide = dual_radon(_lopsided, g, QuadratureSpec(truncation_radius=16.0))
    assert wide.value == pytest.approx(short.value, rel=1e-10)


def test_dual_radon_rejects_slow_decay():
    with pytest.raises(DomainError):
        dual_radon(lambda xi: 1.0, IDENTITY)
    with pytest.raises(DomainError):
        dual_radon(lambda xi: exp(-xi.s ** 2), IDENTITY, tail_exponent=1.0)


def test_multiplier_table_rows():
    table = MultiplierTable(np.array([0, 1]), np.array([0.0, 1.0]),
                            np.array([[1.0, np.nan], [2.0 + 1j, 3.0]], dtype=complex))
    assert table.as_rows() == [(0, 0.0, 1.0), (1, 0.0, 2.0 + 1j), (1, 1.0, 3.0)]
    assert table.defined.sum() == 3


def test_multiplier_probe_shape():
    f = radial_bump(1.0)
    y_grid = GridSpec(lower=(0.0, -3.0), upper=(2 * pi, 3.0), points=(4, 13), periodic=(True, False))
    table = inversion_multiplier_probe(f, GridSpec.horospheres(4, 17, 4.0), y_grid,
                                       frequencies=[0.0, 0.5])
    assert table.ratios.shape == (1, 2)
    assert table.defined[0, 0]
    assert table.ratios[0, 0].real > 0


def test_multiplier_probe_is_homogeneous():
    f = radial_bump(1.0)
    xi_grid = GridSpec.horospheres(4, 17, 4.0)
    y_grid = GridSpec(lower=(0.0, -3.0), upper=(2 * pi, 3.0), points=(4, 13), periodic=(True, False))
    base = inversion_multiplier_probe(f, xi_grid, y_grid, frequencies=[0.0, 0.5])
    scaled = inversion_multiplier_probe(combination([2.0 - 1.0j], [f]), xi_grid, y_grid,
                                        frequencies=[0.0, 0.5])
    assert np.array_equal(base.defined, scaled.defined)
    np.testing.assert_allclose(scaled.ratios[base.defined], base.ratios[base.defined], rtol=1e-6)
