"""SL(2,R) as the symmetric space (G×G)/ΔG.

The horospheres are the double cosets g·N N̄·h^{-1}, and the transform is
∫∫ f(g n_x n̄_y h^{-1}) dx dy. The slice g n_x n̄_y h^{-1} is affine in x
for fixed y, which the inner quadrature uses to place its breakpoint.

Haar measure in KAK coordinates: dg = sinh(2t) dt dk1 dk2 with
dk = dθ/2π, so ∫_G |φ_k| dg = ∫ cosh(t)^{-k} sinh(2t) dt = 2/(k - 2).
"""
from dataclasses import dataclass, field
from logging import getLogger
from math import cosh, inf, log, pi, sinh
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

from .errors import DomainError
from .quadrature import Estimate, integrate_line
from .sl2core import GroupElement, IDENTITY, rotation, torus
from .specs import QuadratureSpec


logger = getLogger(__name__)


type EntrySampler = Callable[..., complex | np.ndarray]


@dataclass(frozen=True)
class GroupPointPair:
    g: GroupElement = IDENTITY
    h: GroupElement = IDENTITY

    def slice_matrices(self, y: float) -> tuple[np.ndarray, np.ndarray]:
        """M0, M1 with g n_x n̄_y h^{-1} = M0 + x·M1"""
        g, h_inv = self.g.matrix, self.h.inverse().matrix
        lower = np.array([[1.0, 0.0], [y, 1.0]])
        m0 = g @ lower @ h_inv
        m1 = g @ np.array([[y, 1.0], [0.0, 0.0]]) @ h_inv
        return m0, m1


@dataclass(frozen=True)
class GroupFunction:
    label: str
    # evaluated on the entries (a, b, c, d)
    sampler: EntrySampler
    # |f| along a unipotent line falls off like |x|^-tail_exponent
    tail_exponent: float = inf
    weight: int | None = None
    modulus: EntrySampler | None = field(default=None, compare=False)

    def __call__(self, g: GroupElement) -> complex:
        return complex(self.sampler(g.a, g.b, g.c, g.d))

    def absolute(self) -> "GroupFunction":
        modulus = self.modulus or (lambda a, b, c, d: np.abs(self.sampler(a, b, c, d)))
        return GroupFunction(f"|{self.label}|", modulus, self.tail_exponent, None, modulus)

    def translated(self, left: GroupElement = IDENTITY, right: GroupElement = IDENTITY) -> "GroupFunction":
        """(L(left) R(right) f)(g) = f(left^{-1}·g·right)"""
        base = self.sampler
        l, r = left.inverse().matrix, right.matrix

        def moved(a, b, c, d):
            m = l @ np.array([[a, b], [c, d]]) @ r
            return base(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

        return GroupFunction(f"L·R({self.label})", moved, self.tail_exponent, self.weight)


def ds_coefficient(k: int) -> GroupFunction:
    """φ_k(g) = 2^k·((a + d) + i(b - c))^{-k}, K-covariant of weight k on both sides"""
    if not isinstance(k, (int, np.integer)) or k < 3:
        raise DomainError(f"φ_k is integrable on G only for k >= 3, got {k!r}")
    return _coefficient(k)


def _coefficient(k: int) -> GroupFunction:
    def sampler(a, b, c, d):
        return 2.0 ** k * ((a + d) + 1j * (b - c)) ** (-k)

    def modulus(a, b, c, d):
        return 2.0 ** k * ((a + d) ** 2 + (b - c) ** 2) ** (-k / 2)

    return GroupFunction(f"φ_{k}", sampler, tail_exponent=float(k), weight=k, modulus=modulus)


def weight_two_coefficient() -> GroupFunction:
    """φ_2, the borderline coefficient that is not integrable on G"""
    return _coefficient(2)


def gaussian_entries(width: float = 1.0) -> GroupFunction:
    """exp(-(a² + b² + c² + d² - 2)/width²), peaked on K"""
    if not width > 0:
        raise DomainError(f"width must be positive, got {width!r}")

    def sampler(a, b, c, d):
        return np.exp(-(a * a + b * b + c * c + d * d - 2) / width ** 2)

    return GroupFunction(f"gauss({width:g})", sampler)


def separable_witness(width: float = 1.0) -> GroupFunction:
    """exp(-(b² + c²)/width²): on the slice through (e, e) it is u(x)·v(y)"""
    def sampler(a, b, c, d):
        return np.exp(-(b * b + c * c) / width ** 2)

    return GroupFunction(f"sep({width:g})", sampler)


# *** the transform ***********************************************************

def _inner(f: GroupFunction, pair: GroupPointPair, y: float, spec: QuadratureSpec,
           scale: float, radius: float = inf) -> complex:
    m0, m1 = pair.slice_matrices(y)
    norm = float(np.sum(m1 * m1))
    # minimizer of the Frobenius norm along the line
    center = -float(np.sum(m0 * m1)) / norm if norm > 0 else 0.0

    def integrand(x: float) -> complex:
        m = m0 + x * m1
        return f.sampler(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    return integrate_line(integrand, spec, lower=-radius, upper=radius,
                          breakpoints=(center,), scale=scale).value


def _slice_spec(f: GroupFunction, spec: QuadratureSpec | None) -> QuadratureSpec:
    if not f.tail_exponent > 1:
        raise DomainError(f"{f.label}: tails |x|^-{f.tail_exponent} are not integrable")
    return spec or QuadratureSpec()


def group_radon(f: GroupFunction, pair: GroupPointPair, spec: QuadratureSpec | None = None,
                *, scale: float = 0.0) -> Estimate:
    """∫∫ f(g n_x n̄_y h^{-1}) dx dy, x inner"""
    spec = _slice_spec(f, spec)
    return integrate_line(lambda y: _inner(f, pair, y, spec, scale), spec,
                          breakpoints=(0.0,), scale=scale)


def slice_mass(f: GroupFunction, pair: GroupPointPair, spec: QuadratureSpec | None = None) -> float:
    return group_radon(f.absolute(), pair, spec).value.real


@dataclass(frozen=True)
class FubiniCheck:
    iterated: complex
    joint: complex
    mass: float

    @property
    def residual(self) -> float:
        scale = max(abs(self.iterated), abs(self.joint), self.mass)
        return abs(self.iterated - self.joint) / scale if scale > 0 else 0.0


def fubini_factorization_check(f: GroupFunction, pair: GroupPointPair,
                               spec: QuadratureSpec | None = None) -> FubiniCheck:
    """x-inner iterated integral against scipy's dblquad with y inner"""
    spec = _slice_spec(f, spec)
    mass = slice_mass(f, pair, spec)
    iterated = group_radon(f, pair, spec, scale=mass).value

    def part(component: Callable[[complex], float]) -> float:
        def integrand(y: float, x: float) -> float:
            m0, m1 = pair.slice_matrices(y)
            m = m0 + x * m1
            return component(complex(f.sampler(m[0, 0], m[0, 1], m[1, 0], m[1, 1])))

        value, _ = integrate.dblquad(integrand, -inf, inf, -inf, inf,
                                     epsabs=max(spec.abs_tol, spec.rel_tol * mass),
                                     epsrel=spec.rel_tol)
        return value

    joint = complex(part(lambda z: z.real), part(lambda z: z.imag))
    check = FubiniCheck(iterated=iterated, joint=joint, mass=mass)
    logger.debug(f"{f.label} at {pair!r}: iterated {iterated:.6e}, joint {joint:.6e}, "
                 f"residual {check.residual:.2e}")
    return check


# *** integrability on G ******************************************************

def group_l1_closed_form(k: int, radius: float = inf) -> float:
    """∫_{t <= radius} |φ_k| dg = 2(1 - cosh(radius)^{2-k})/(k - 2)"""
    if k == 2:
        return 2 * log(cosh(radius)) if radius < inf else inf
    if radius == inf:
        return 2 / (k - 2) if k > 2 else inf
    return 2 * (1 - cosh(radius) ** (2 - k)) / (k - 2)


def group_l1_norm(f: GroupFunction, radius: float = 30.0, spec: QuadratureSpec | None = None,
                  angles: int = 8) -> Estimate:
    """∫ |f| dg in KAK coordinates, K-averages by periodic trapezoid"""
    spec = spec or QuadratureSpec()
    thetas = 2 * pi * np.arange(angles) / angles
    rotations = [rotation(theta) for theta in thetas]
    modulus = f.absolute()

    def radial(t: float) -> float:
        a = torus(t)
        total = sum(modulus(r1 @ a @ r2).real for r1 in rotations for r2 in rotations)
        return sinh(2 * t) * total / angles ** 2

    return integrate_line(radial, spec, lower=0.0, upper=radius)


def slice_growth(f: GroupFunction, pair: GroupPointPair, radii: Iterable[float],
                 spec: QuadratureSpec | None = None) -> np.ndarray:
    """∫∫_{[-R, R]²} |f| on the unipotent slice for every R"""
    spec = spec or QuadratureSpec()
    modulus = f.absolute()
    return np.array([
        integrate_line(lambda y: _inner(modulus, pair, y, spec, 0.0, radius).real, spec,
                       lower=-radius, upper=radius, breakpoints=(0.0,)).value.real
        for radius in radii])
