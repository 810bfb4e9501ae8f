"""The de Sitter surface Y = G/H and the horosphere parameter space Ξ.

Y is modelled as the adjoint orbit of Z = [[0, 1], [1, 0]], written in
coordinates x1 = X11, x2 = (X12 + X21)/2, x3 = (X12 - X21)/2 so that
x1² + x2² - x3² = 1. The chart (φ, s) has x3 = s and carries the invariant
measure dy = dφ ds.
"""
from dataclasses import dataclass
from logging import getLogger
from math import asinh, atan2, cos, pi, sin, sqrt
from typing import Callable, Iterable, Protocol, runtime_checkable

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError
from .quadrature import Estimate, integrate_line
from .sl2core import (
    GroupElement,
    IDENTITY,
    adjoint_coordinates,
    in_Gh,
    iwasawa,
    rotation,
    torus,
    unipotent,
)
from .specs import QuadratureSpec


logger = getLogger(__name__)


CONSTRAINT_TOLERANCE = 1e-10


def adjoint_action(g: GroupElement | np.ndarray, x1, x2, x3):
    """Ad(g) on ambient coordinates

    works on arrays, and on complex coordinates and complex determinant-one
    matrices g for holomorphic extensions.
    """
    if isinstance(g, GroupElement):
        a, b, c, d = g.a, g.b, g.c, g.d
    else:
        (a, b), (c, d) = np.asarray(g)
    p, q = x2 + x3, x2 - x3
    y11 = (a * d + b * c) * x1 + b * d * q - a * c * p
    y12 = a * a * p - b * b * q - 2 * a * b * x1
    y21 = d * d * q - c * c * p + 2 * c * d * x1
    return y11, (y12 + y21) / 2, (y12 - y21) / 2


@dataclass(frozen=True)
class PointY:
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        if abs(self.constraint_residual) > CONSTRAINT_TOLERANCE * max(1.0, self.x3 * self.x3):
            raise DomainError(f"{self!r} is off the hyperboloid x1² + x2² - x3² = 1")

    @classmethod
    def from_chart(cls, phi: float, s: float) -> "PointY":
        radius = sqrt(1 + s * s)
        return cls(radius * cos(phi), radius * sin(phi), s)

    @classmethod
    def from_matrix(cls, m) -> "PointY":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], (m[0, 1] + m[1, 0]) / 2, (m[0, 1] - m[1, 0]) / 2)

    @property
    def phi(self) -> float:
        return atan2(self.x2, self.x1) % (2 * pi)

    @property
    def s(self) -> float:
        return self.x3

    @property
    def ambient(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.x1, self.x2 + self.x3], [self.x2 - self.x3, -self.x1]])

    @property
    def constraint_residual(self) -> float:
        return self.x1 * self.x1 + self.x2 * self.x2 - self.x3 * self.x3 - 1

    def translated(self, g: GroupElement) -> "PointY":
        """g·y"""
        return PointY(*(float(v) for v in adjoint_action(g, self.x1, self.x2, self.x3)))


Y0 = PointY(0.0, 1.0, 0.0)


@dataclass(frozen=True)
class HoroPoint:
    """ξ = r_{φ̃/2}·a_s·M_H N ∈ Ξ"""
    angle: float
    s: float

    def __post_init__(self):
        object.__setattr__(self, "angle", float(self.angle) % (2 * pi))

    @classmethod
    def from_group(cls, g: GroupElement) -> "HoroPoint":
        """the horosphere g·M_H N·y0, read off g = r_θ a_s n_x"""
        parts = iwasawa(g)
        return cls(2 * parts.angle, parts.s)

    def representative(self) -> GroupElement:
        return rotation(self.angle / 2) @ torus(self.s)

    def translated(self, g: GroupElement) -> "HoroPoint":
        return HoroPoint.from_group(g @ self.representative())


@dataclass(frozen=True)
class HoroChart:
    """translated chart Ξ_x of horospheres g x^{-1} N x·y0"""
    base: GroupElement = IDENTITY

    def __post_init__(self):
        if not in_Gh(self.base):
            raise DomainError(f"chart base {self.base!r} is not in G_h")


def iota(g: GroupElement) -> PointY:
    """gH ↦ Ad(g)Z"""
    return PointY(*adjoint_coordinates(g))


def section(y: PointY) -> GroupElement:
    """r_θ a_s with iota(r_θ a_s) = y"""
    s = asinh(y.x3) / 2
    angle = (atan2(-y.x1, y.x2) % (2 * pi)) / 2
    return rotation(angle) @ torus(s)


def horocycle(xi: HoroPoint, x: float) -> PointY:
    return iota(xi.representative() @ unipotent(x))


def chart_transport(chart: HoroChart, xi: HoroPoint, x: float) -> PointY:
    return iota(xi.representative() @ chart.base.inverse() @ unipotent(x) @ chart.base)


# *** horocycle curves as quadratics ******************************************

@dataclass(frozen=True)
class HorocycleCurve:
    """x ↦ iota(left·n_x·right) = c0 + c1·x + c2·x², rows of ``coefficients``"""
    coefficients: np.ndarray

    @classmethod
    def through(cls, left: GroupElement, right: GroupElement = IDENTITY) -> "HorocycleCurve":
        p0, p1, pm = (np.array(adjoint_coordinates(left @ unipotent(x) @ right))
                      for x in (0.0, 1.0, -1.0))
        return cls(np.vstack([p0, (p1 - pm) / 2, (p1 + pm) / 2 - p0]))

    def __call__(self, x):
        """ambient coordinates, shape (3,) + shape(x)"""
        x = np.asarray(x, dtype=float)
        c0, c1, c2 = self.coefficients
        return (c0[:, None] + c1[:, None] * x.ravel() + c2[:, None] * x.ravel() ** 2).reshape(
            (3,) + x.shape)

    def at(self, x: float) -> tuple[float, float, float]:
        c0, c1, c2 = self.coefficients
        point = c0 + x * (c1 + x * c2)
        return float(point[0]), float(point[1]), float(point[2])

    def speed(self, x: float) -> float:
        c0, c1, c2 = self.coefficients
        return float(np.linalg.norm(c1 + 2 * c2 * x))

    def _component(self, i: int) -> Polynomial:
        return Polynomial(self.coefficients[:, i])

    def _squared_distance(self, center: np.ndarray) -> Polynomial:
        shifted = self.coefficients.copy()
        shifted[0] -= center
        return sum((Polynomial(shifted[:, i]) ** 2 for i in range(3)), Polynomial([0.0]))

    def focus_points(self, centers: Iterable[np.ndarray] = ()) -> list[float]:
        """parameters where the curve changes behaviour

        crossings and turning point of the height x3, the point closest to
        the waist and the points closest to every listed ambient centre.
        """
        height = self._component(2)
        polynomials = [height, height.deriv(), self._squared_distance(np.zeros(3)).deriv()]
        polynomials += [self._squared_distance(np.asarray(center)).deriv() for center in centers]
        candidates = [z for p in polynomials for z in _real_roots(p)]
        return sorted({round(z, 12) for z in candidates})


def _real_roots(p: Polynomial, reach: float = 1e8) -> list[float]:
    scale = float(np.max(np.abs(p.coef))) if p.coef.size else 0.0
    if scale == 0.0:
        return []
    p = p.trim(tol=1e-14 * scale)
    if p.degree() < 1:
        return []
    return [float(z.real) for z in p.roots() if abs(z.imag) < 1e-9 and abs(z.real) < reach]


# *** integrals and differential operators ************************************

@runtime_checkable
class AmbientSampler(Protocol):
    """vectorized evaluation in ambient coordinates"""
    def ambient(self, x1, x2, x3): ...


type YSampler = Callable[[PointY], complex]


def _circle_average(f, s: float, tol: float, max_nodes: int = 1 << 16) -> complex:
    """∫_0^{2π} F(φ, s) dφ by periodic trapezoid, nodes doubled to convergence"""
    radius = sqrt(1 + s * s)
    nodes = 64
    previous = None
    while True:
        phis = 2 * pi * np.arange(nodes) / nodes
        if isinstance(f, AmbientSampler):
            values = np.asarray(f.ambient(radius * np.cos(phis), radius * np.sin(phis),
                                          np.full(nodes, s)), dtype=complex)
        else:
            values = np.array([f(PointY.from_chart(p, s)) for p in phis], dtype=complex)
        if not np.all(np.isfinite(values)):
            raise DomainError(f"non-finite samples on the circle x3={s!r}")
        current = complex(2 * pi * np.mean(values))
        if previous is not None and abs(current - previous) <= tol * max(1.0, abs(current)):
            return current
        if nodes >= max_nodes:
            logger.warning(f"circle average at s={s:g} unconverged at {nodes} nodes")
            return current
        previous, nodes = current, 2 * nodes


def invariant_integral(
        f: YSampler | AmbientSampler,
        spec: QuadratureSpec | None = None,
        *,
        heights: Iterable[float] = (),
) -> Estimate:
    """∫_Y f dy = ∫∫ f dφ ds

    the φ-integral is a periodic trapezoid sum; the s-integral goes through
    :func:`integrate_line` with ``heights`` as breakpoints.
    """
    spec = spec or QuadratureSpec()
    return integrate_line(lambda s: _circle_average(f, s, spec.rel_tol), spec,
                          breakpoints=heights)


def wave_operator(f: YSampler, y: PointY, step: float = 1e-3) -> complex:
    """□f = (1+s²)^{-1} ∂²_φ F - ∂_s((1+s²) ∂_s F) in the chart

    second order central differences at step and step/2 with one
    Richardson extrapolation.
    """
    if not step > 0:
        raise DomainError(f"step must be positive, got {step!r}")
    phi, s = y.phi, y.s

    def sample(dphi: float, ds: float) -> complex:
        value = complex(f(PointY.from_chart(phi + dphi, s + ds)))
        if not np.isfinite(value):
            raise DomainError(f"non-finite sample {value!r} near {y!r}")
        return value

    center = sample(0.0, 0.0)

    def box(h: float) -> complex:
        f_phiphi = (sample(h, 0.0) - 2 * center + sample(-h, 0.0)) / (h * h)
        up, down = sample(0.0, h), sample(0.0, -h)
        f_s = (up - down) / (2 * h)
        f_ss = (up - 2 * center + down) / (h * h)
        return f_phiphi / (1 + s * s) - 2 * s * f_s - (1 + s * s) * f_ss

    return (4 * box(step / 2) - box(step)) / 3
