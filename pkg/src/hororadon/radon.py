"""The horospherical Radon transform, its chart translates and its dual.

ℛf(g·M_H N) = ∫ f(g n_x·y0) dx. Horocycle curves are quadratic in x, so
the features of an integrand (crossings of the waist, closest approach to
a bump centre) are located exactly and handed to the quadrature as
breakpoints, each surrounded by a geometric ladder of further breakpoints.
"""
import csv
from dataclasses import dataclass, field, replace
from logging import getLogger
from math import atan2, atanh, cos, cosh, exp, hypot, log, pi, sin, sinh, sqrt
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
from scipy import interpolate

from .config import evolve
from .errors import DomainError, HoroRadonError
from .funcspace import FunctionOnY
from .quadrature import Estimate, integrate_line, line_fourier
from .sl2core import GroupElement, IDENTITY, torus
from .specs import GridSpec, QuadratureSpec
from .variety import HoroChart, HoroPoint, HorocycleCurve, PointY, section


logger = getLogger(__name__)


CSV_HEADER = ("phi", "s", "re", "im", "err")
# ladder rungs grow by this factor away from a focus point
LADDER_RATIO = 4.0

type XiSampler = Callable[[HoroPoint], complex]


# *** horocycle integrals *****************************************************

def _ladder(curve: HorocycleCurve, f: FunctionOnY, reach: float) -> list[float]:
    points = []
    for focus in curve.focus_points(f.centers):
        rung = min(1.0, f.feature_scale / max(curve.speed(focus), 1e-300))
        points.append(focus)
        while rung <= reach:
            points.extend((focus - rung, focus + rung))
            rung *= LADDER_RATIO
    return points


def _horocycle_spec(f: FunctionOnY, spec: QuadratureSpec | None) -> QuadratureSpec:
    if not f.decay.exponent > 1:
        raise DomainError(
            f"{f.label}: decay |x|^-{f.decay.exponent} along horocycles is not integrable")
    spec = spec or QuadratureSpec()
    return evolve(spec, tail_exponent=f.decay.exponent)


def _curve_integral(f: FunctionOnY, curve: HorocycleCurve, spec: QuadratureSpec,
                    absolute: bool, scale: float) -> Estimate:
    reach = max(spec.truncation_radius,
                *(LADDER_RATIO * abs(p) for p in curve.focus_points(f.centers)))
    breakpoints = _ladder(curve, f, reach)
    sampler = f.absolute().sampler if absolute else f.sampler

    def integrand(t: float) -> complex:
        return sampler(*curve.at(t))

    return integrate_line(integrand, spec, breakpoints=breakpoints, scale=scale)


def horocycle_integral(
        f: FunctionOnY,
        g: GroupElement,
        spec: QuadratureSpec | None = None,
        *,
        chart: HoroChart | None = None,
        absolute: bool = False,
        scale: float | None = None,
) -> Estimate:
    """∫ f(g·x^{-1} n_t x·y0) dt for the chart base x (identity by default)

    The tolerance is relative to ``scale``, which defaults to the L¹ mass
    along the same curve, so integrals that cancel to 0 still settle.
    """
    spec = _horocycle_spec(f, spec)
    base = chart.base if chart is not None else IDENTITY
    curve = HorocycleCurve.through(g @ base.inverse(), base)
    if absolute:
        return _curve_integral(f, curve, spec, True, scale or 0.0)
    if scale is None:
        scale = _curve_integral(f, curve, spec, True, 0.0).value.real
    return _curve_integral(f, curve, spec, False, scale)


def radon(f: FunctionOnY, xi: HoroPoint, spec: QuadratureSpec | None = None,
          *, scale: float | None = None) -> Estimate:
    """ℛf(ξ) = ∫_N f(r_{φ̃/2} a_s n·y0) dn"""
    return horocycle_integral(f, xi.representative(), spec, scale=scale)


def radon_at(f: FunctionOnY, g: GroupElement, spec: QuadratureSpec | None = None,
             *, scale: float | None = None) -> Estimate:
    """ℛf at the horosphere g·M_H N of an arbitrary group element"""
    return horocycle_integral(f, g, spec, scale=scale)


def radon_translated(f: FunctionOnY, chart: HoroChart, xi: HoroPoint,
                     spec: QuadratureSpec | None = None, *, scale: float | None = None) -> Estimate:
    """ℛ_x f(ξ) = ∫_N f(g x^{-1} n x·y0) dn in the chart Ξ_x"""
    return horocycle_integral(f, xi.representative(), spec, chart=chart, scale=scale)


def horocycle_mass(f: FunctionOnY, xi: HoroPoint, spec: QuadratureSpec | None = None,
                   *, chart: HoroChart | None = None) -> Estimate:
    """∫_N |f| along the horocycle of ξ"""
    return horocycle_integral(f, xi.representative(), spec, chart=chart, absolute=True)


# *** sampled transforms ******************************************************

@dataclass
class TransformGrid:
    """values on an (angle, s) grid; row index is the angle, column the height"""
    angles: np.ndarray
    heights: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    flagged: np.ndarray | None = None
    masses: np.ndarray | None = None
    source: str = ""
    transform: str = "R"
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        shape = (self.angles.size, self.heights.size)
        if self.flagged is None:
            self.flagged = np.zeros(shape, dtype=bool)
        for name in ("values", "errors", "flagged"):
            if getattr(self, name).shape != shape:
                raise DomainError(
                    f"TransformGrid.{name} has shape {getattr(self, name).shape}, grid is {shape}")

    @classmethod
    def empty(cls, grid: GridSpec, source: str = "", transform: str = "R") -> "TransformGrid":
        angles, heights = grid.axis(0), grid.axis(1)
        shape = (angles.size, heights.size)
        return cls(angles, heights, np.zeros(shape, dtype=complex), np.zeros(shape),
                   source=source, transform=transform)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def periodic(self) -> bool:
        if self.angles.size < 2:
            return False
        step = self.angles[1] - self.angles[0]
        return bool(np.isclose(self.angles[-1] + step - self.angles[0], 2 * pi, rtol=1e-9))

    def slice_sups(self) -> np.ndarray:
        """sup over the angle of |values| per height"""
        return np.max(np.abs(np.where(self.flagged, 0, self.values)), axis=0)

    def decay_height(self, fraction: float = 1e-3) -> float:
        """largest |s| whose slice sup still reaches fraction·peak"""
        sups = self.slice_sups()
        peak = float(np.max(sups)) if sups.size else 0.0
        if peak == 0.0:
            return 0.0
        return float(np.max(np.abs(self.heights[sups >= fraction * peak])))

    def interpolator(self, method: str = "linear") -> XiSampler:
        """ξ ↦ value, periodic in the angle and zero beyond the height window"""
        angles, values = self.angles, self.values
        if self.periodic:
            angles = np.append(angles, angles[0] + 2 * pi)
            values = np.vstack([values, values[:1]])
        table = interpolate.RegularGridInterpolator(
            (angles, self.heights), values, method=method, bounds_error=False, fill_value=0.0)

        def sample(xi: HoroPoint) -> complex:
            angle = xi.angle
            if self.periodic:
                angle = self.angles[0] + (angle - self.angles[0]) % (2 * pi)
            return complex(table([[angle, xi.s]])[0])

        return sample

    def kinks_along_h(self, g: GroupElement) -> list[float]:
        """u where g·exp(uZ)·M_H N crosses a grid line

        the linear interpolator bends there. Heights solve a quadratic in
        w = e^{2u}, angles a linear equation in (cosh u, sinh u).
        """
        a, b, c, d = g.a, g.b, g.c, g.d
        # |first column|² = alpha·w + beta + gamma/w
        alpha = ((a + b) ** 2 + (c + d) ** 2) / 4
        gamma = ((a - b) ** 2 + (c - d) ** 2) / 4
        beta = (a * a + c * c - b * b - d * d) / 2
        kinks = []
        for s in self.heights:
            linear = beta - exp(2 * s)
            discriminant = linear * linear - 4 * alpha * gamma
            if discriminant < 0:
                continue
            for sign in (1.0, -1.0):
                w = (-linear + sign * sqrt(discriminant)) / (2 * alpha)
                if w > 0:
                    kinks.append(log(w) / 2)
        for angle in self.angles:
            p = a * sin(angle / 2) - c * cos(angle / 2)
            q = b * sin(angle / 2) - d * cos(angle / 2)
            if abs(p) < abs(q):
                kinks.append(atanh(-p / q))
        return sorted(kinks)

    def to_csv(self, out: Path | TextIO):
        """rows ``phi,s,re,im,err`` ordered by height first, then angle"""
        if isinstance(out, Path):
            with out.open("w", newline="") as stream:
                return self.to_csv(stream)
        writer = csv.writer(out)
        writer.writerow(CSV_HEADER)
        for j, s in enumerate(self.heights):
            for i, phi in enumerate(self.angles):
                value = self.values[i, j]
                writer.writerow([f"{phi:.16e}", f"{s:.16e}", f"{value.real:.16e}",
                                 f"{value.imag:.16e}", f"{self.errors[i, j]:.16e}"])

    @classmethod
    def from_csv(cls, source: Path | TextIO, transform: str = "R") -> "TransformGrid":
        if isinstance(source, Path):
            with source.open(newline="") as stream:
                return cls.from_csv(stream, transform)
        reader = csv.reader(source)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise DomainError(f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
        rows = np.array([[float(v) for v in row] for row in reader if row])
        if rows.size == 0:
            raise DomainError("transform grid file has no rows")
        angles = np.unique(rows[:, 0])
        heights = np.unique(rows[:, 1])
        if rows.shape[0] != angles.size * heights.size:
            raise DomainError(f"{rows.shape[0]} rows do not fill a "
                              f"{angles.size}x{heights.size} grid")
        # height-major row order
        values = (rows[:, 2] + 1j * rows[:, 3]).reshape(heights.size, angles.size).T
        errors = rows[:, 4].reshape(heights.size, angles.size).T
        return cls(angles, heights, values, errors, flagged=~np.isfinite(errors),
                   transform=transform)


def radon_points(f: FunctionOnY, points: Iterable[HoroPoint],
                 spec: QuadratureSpec | None = None) -> list[Estimate]:
    return [radon(f, xi, spec) for xi in points]


def radon_grid(
        f: FunctionOnY,
        grid: GridSpec,
        spec: QuadratureSpec | None = None,
        *,
        chart: HoroChart | None = None,
        with_mass: bool = True,
) -> TransformGrid:
    """ℛf (or ℛ_x f for a chart) over an (angle, s) grid

    points whose quadrature fails are flagged and the sweep goes on. The
    horocycle L¹ mass is the reference scale of every value; ``with_mass``
    keeps the masses on the grid.
    """
    out = TransformGrid.empty(grid, source=f.label,
                              transform="R" if chart is None else "R_x")
    masses = np.zeros(out.shape)
    for i, angle in enumerate(out.angles):
        for j, s in enumerate(out.heights):
            xi = HoroPoint(angle, s)
            try:
                masses[i, j] = scale = horocycle_mass(f, xi, spec, chart=chart).value.real
                estimate = horocycle_integral(f, xi.representative(), spec,
                                              chart=chart, scale=scale)
            except HoroRadonError as error:
                message = f"{f.label} at {xi!r}: {error}"
                logger.warning(message)
                out.warnings.append(message)
                out.flagged[i, j] = True
                out.errors[i, j] = np.inf
                continue
            out.values[i, j] = estimate.value
            out.errors[i, j] = estimate.error
    if with_mass:
        out.masses = masses
    return out


# *** convergence checks ******************************************************

@dataclass(frozen=True)
class ChangeOfVariables:
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.lhs), abs(self.rhs), 1e-300)


def change_of_variables_check(f: FunctionOnY, angle: float, s: float,
                              spec: QuadratureSpec | None = None) -> ChangeOfVariables:
    """∫|f(k n a·y0)| dn against e^{2s}·∫|f(k a n·y0)| dn"""
    k = HoroPoint(angle, 0.0).representative()
    a = torus(s)
    spec = _horocycle_spec(f, spec)
    lhs = _curve_integral(f, HorocycleCurve.through(k, a), spec, absolute=True, scale=0.0)
    rhs = horocycle_integral(f, k @ a, spec, absolute=True)
    return ChangeOfVariables(lhs=lhs.value.real, rhs=exp(2 * s) * rhs.value.real)


def sup_bound_probe(f: FunctionOnY, grid: GridSpec, spec: QuadratureSpec | None = None) -> float:
    """grid sup over (angle, s) of ∫_N |f(k a n·y0)| dn"""
    best = 0.0
    for angle in grid.axis(0):
        for s in grid.axis(1):
            best = max(best, horocycle_mass(f, HoroPoint(angle, s), spec).value.real)
    return best


def a_rho_asymptotics(f: FunctionOnY, g: GroupElement, s_values: Iterable[float],
                      spec: QuadratureSpec | None = None) -> np.ndarray:
    """e^{2s}·ℛf(g a_s), which settles to a constant as s → ∞"""
    return np.array([exp(2 * s) * radon_at(f, g @ torus(s), spec).value
                     for s in s_values], dtype=complex)


# *** dual transform **********************************************************

def horopoint_along_h(g: GroupElement, u: float) -> HoroPoint:
    """the horosphere g·exp(uZ)·M_H N, read off the first column g·(cosh u, sinh u)"""
    v1 = g.a * cosh(u) + g.b * sinh(u)
    v2 = g.c * cosh(u) + g.d * sinh(u)
    return HoroPoint(2 * atan2(v2, v1), log(hypot(v1, v2)))


def dual_radon(F: XiSampler, g: GroupElement, spec: QuadratureSpec | None = None,
               *, tail_exponent: float = 2.0, scale: float | None = None,
               breakpoints: Iterable[float] = ()) -> Estimate:
    """ℛ^∨F(gH) = ∫ F(g exp(uZ)·M_H N) du over |u| <= truncation radius

    along H the height of the horosphere grows like |u|. F must decay
    there: |F| at the window edge has to stay below half of |F| at half
    the radius, else the input is rejected. The neglected tails are
    bounded assuming |F| ~ |u|^-tail_exponent beyond the edge. Sampled F
    should pass the u where it bends, see :meth:`TransformGrid.kinks_along_h`.
    """
    spec = spec or QuadratureSpec()
    if not tail_exponent > 1:
        raise DomainError(f"|u|^-{tail_exponent} is not integrable along H")
    radius = spec.truncation_radius
    edges = []
    for sign in (1.0, -1.0):
        near = abs(F(horopoint_along_h(g, sign * radius / 2)))
        far = abs(F(horopoint_along_h(g, sign * radius)))
        if far > 1e-14 and far > 0.5 * near:
            raise DomainError(
                f"F does not decay along g·exp(uZ): |F| = {near:.3e} at u = {sign * radius / 2:g}, "
                f"{far:.3e} at u = {sign * radius:g}")
        edges.append(far)

    def along(u: float) -> complex:
        return F(horopoint_along_h(g, u))

    window = dict(lower=-radius, upper=radius, breakpoints=(0.0, *breakpoints))
    if scale is None:
        # ∫|F| measures integrals that cancel
        scale = integrate_line(lambda u: abs(along(u)), spec, **window).value.real
    estimate = integrate_line(along, spec, scale=scale, **window)
    return replace(estimate, tail_bound=sum(edges) * radius / (tail_exponent - 1))


@dataclass(frozen=True)
class MultiplierTable:
    modes: np.ndarray
    frequencies: np.ndarray
    # complex ratio per (mode, frequency); nan where undefined
    ratios: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.ratios)

    def as_rows(self) -> list[tuple[int, float, complex]]:
        return [(int(m), float(nu), complex(self.ratios[i, j]))
                for i, m in enumerate(self.modes)
                for j, nu in enumerate(self.frequencies) if np.isfinite(self.ratios[i, j])]


def _mode_coefficients(samples: np.ndarray, heights: np.ndarray, modes: Sequence[int],
                       frequencies: np.ndarray) -> np.ndarray:
    angular = np.fft.fft(samples, axis=0) / samples.shape[0]
    out = np.empty((len(modes), frequencies.size), dtype=complex)
    for i, m in enumerate(modes):
        out[i] = line_fourier(angular[m], heights, 0.0, 1j * frequencies).values
    return out


def inversion_multiplier_probe(
        f: FunctionOnY,
        xi_grid: GridSpec,
        y_grid: GridSpec,
        spec: QuadratureSpec | None = None,
        *,
        modes: Sequence[int] = (0,),
        frequencies: Iterable[float] = np.linspace(0.0, 2.0, 5),
        cutoff: float = 1e-8,
) -> MultiplierTable:
    """empirical multiplier of ℛ^∨ℛ per (angular mode, frequency in s)

    the ratio of the coefficients of ℛ^∨ℛf against those of f; bins where
    the coefficient of f falls below ``cutoff`` times the largest are
    undefined.
    """
    frequencies = np.asarray(list(frequencies), dtype=float)
    transform = radon_grid(f, xi_grid, spec, with_mass=False)
    F = transform.interpolator()
    angles, heights = y_grid.axis(0), y_grid.axis(1)
    original = np.empty((angles.size, heights.size), dtype=complex)
    image = np.empty_like(original)
    for i, phi in enumerate(angles):
        for j, s in enumerate(heights):
            y = PointY.from_chart(phi, s)
            original[i, j] = f(y)
            g = section(y)
            image[i, j] = dual_radon(F, g, spec, breakpoints=transform.kinks_along_h(g)).value
    ours = _mode_coefficients(original, heights, modes, frequencies)
    theirs = _mode_coefficients(image, heights, modes, frequencies)
    floor = cutoff * float(np.max(np.abs(ours))) if ours.size else 0.0
    ratios = np.full(ours.shape, np.nan, dtype=complex)
    defined = np.abs(ours) > max(floor, 1e-300)
    ratios[defined] = theirs[defined] / ours[defined]
    logger.debug(f"{f.label}: {int(defined.sum())} of {ratios.size} multiplier bins defined")
    return MultiplierTable(np.asarray(modes), frequencies, ratios)
