"""SL(2,R) with the involutions and decompositions of the pair (G, H).

Conventions: η = diag(1,-1), θ(g) = g^{-T}, τ = Ad(η)∘θ, H = G^τ = ±exp(ℝZ)
with Z = E + F, A = {a_s = diag(e^s, e^{-s})}, N upper unipotent, ρ ↔ 1
(Ad(a_s) scales 𝔫 by e^{2s}), M = M_H = {±I}, K = SO(2) with r_θ the
counter-clockwise rotation and w0 = r_{π/2}.
"""
from dataclasses import dataclass
from logging import getLogger
from math import atan2, asinh, atanh, cos, cosh, exp, log, pi, sin, sinh, sqrt
from typing import TYPE_CHECKING, Callable, Literal, NamedTuple

import numpy as np
from scipy import linalg, special

from .errors import (
    BoundaryOrbit,
    DegenerateDecomposition,
    DomainError,
    InternalConsistencyError,
)
from .quadrature import Estimate

if TYPE_CHECKING:
    from .variety import PointY


logger = getLogger(__name__)


DEGENERACY_THRESHOLD = 1e-12
G_H_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GroupElement:
    """[[a, b], [c, d]] with ad - bc = 1 (renormalized on construction)"""
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if not det > 0:
            raise DomainError(f"{self!r} has determinant {det!r}, not in SL(2,R)")
        if det != 1.0:
            scale = 1.0 / sqrt(det)
            for name in "abcd":
                object.__setattr__(self, name, float(getattr(self, name)) * scale)

    @classmethod
    def from_matrix(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def distance(self, other: "GroupElement") -> float:
        """entrywise maximum distance"""
        return float(np.max(np.abs(self.matrix - other.matrix)))


IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)


def rotation(theta: float) -> GroupElement:
    """r_θ ∈ K"""
    return GroupElement(cos(theta), -sin(theta), sin(theta), cos(theta))


def torus(s: float) -> GroupElement:
    """a_s ∈ A"""
    return GroupElement(exp(s), 0.0, 0.0, exp(-s))


def unipotent(x: float) -> GroupElement:
    """n_x ∈ N"""
    return GroupElement(1.0, x, 0.0, 1.0)


def opposite_unipotent(x: float) -> GroupElement:
    """n̄_x ∈ N̄ = θ(N)"""
    return GroupElement(1.0, 0.0, x, 1.0)


def h_element(u: float) -> GroupElement:
    """exp(uZ) ∈ H"""
    return GroupElement(cosh(u), sinh(u), sinh(u), cosh(u))


W0 = rotation(pi / 2)
ETA = np.diag([1.0, -1.0])


def random_element(rng: np.random.Generator, spread: float = 1.5) -> GroupElement:
    """r_θ a_s n_x with θ uniform, s and x normal with the given spread"""
    return (rotation(rng.uniform(0, 2 * pi)) @ torus(rng.normal(0, spread))
            @ unipotent(rng.normal(0, spread)))


# *** involutions *************************************************************

def theta(g: GroupElement) -> GroupElement:
    """Cartan involution, transpose-inverse"""
    return GroupElement(g.d, -g.c, -g.b, g.a)


def tau(g: GroupElement) -> GroupElement:
    """η·θ(g)·η; its fixed group is H = SO(1,1)"""
    t = theta(g)
    return GroupElement(t.a, -t.b, -t.c, t.d)


# *** Lie algebra *************************************************************

@dataclass(frozen=True)
class LieVec:
    """h·diag(1,-1) + e·E + f·F"""
    h: float
    e: float
    f: float

    @classmethod
    def from_matrix(cls, m) -> "LieVec":
        m = np.asarray(m)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.h, self.e], [self.f, -self.h]])

    def __add__(self, other: "LieVec") -> "LieVec":
        return LieVec(self.h + other.h, self.e + other.e, self.f + other.f)

    def __mul__(self, scalar: float) -> "LieVec":
        return LieVec(scalar * self.h, scalar * self.e, scalar * self.f)

    __rmul__ = __mul__

    def killing(self, other: "LieVec") -> float:
        """κ(X, Y) = 4 tr(XY) = 8hh' + 4(ef' + fe')"""
        return 8 * self.h * other.h + 4 * (self.e * other.f + self.f * other.e)

    def norm(self) -> float:
        return float(np.sqrt(self.h ** 2 + self.e ** 2 + self.f ** 2))


LIE_H = LieVec(1.0, 0.0, 0.0)
LIE_E = LieVec(0.0, 1.0, 0.0)
LIE_F = LieVec(0.0, 0.0, 1.0)
LIE_Z = LieVec(0.0, 1.0, 1.0)
# derivative multi-indices of Schwartz seminorms refer to this basis
LIE_BASIS = (LIE_H, LIE_E, LIE_F)


def adjoint(g: GroupElement, u: LieVec) -> LieVec:
    return LieVec.from_matrix(g.matrix @ u.matrix @ g.inverse().matrix)


def exp_lie(u: LieVec, t: float = 1.0) -> GroupElement:
    return GroupElement.from_matrix(linalg.expm(t * u.matrix))


def in_Gh(x: GroupElement) -> bool:
    """Ad(x^{-1})𝔫 ∩ 𝔥 = {0}, i.e. Ad(x^{-1})E is not proportional to Z"""
    v = adjoint(x.inverse(), LIE_E)
    # proportional to Z = (0, 1, 1) iff h = 0 and e = f
    return abs(v.h) + abs(v.e - v.f) > G_H_TOLERANCE * v.norm()


# *** decompositions **********************************************************

class IwasawaParts(NamedTuple):
    angle: float
    s: float
    x: float


def iwasawa(g: GroupElement) -> IwasawaParts:
    """g = r_θ·a_s·n_x with θ ∈ [0, 2π)"""
    norm = sqrt(g.a ** 2 + g.c ** 2)
    angle = atan2(g.c, g.a) % (2 * pi)
    s = log(norm)
    # n_x = a_{-s} r_{-θ} g, read off its upper right entry
    x = (cos(angle) * g.b + sin(angle) * g.d) / norm
    return IwasawaParts(angle, s, x)


@dataclass(frozen=True)
class PolarKAH:
    angle: float
    s: float
    u: float
    sign: int

    def compose(self) -> GroupElement:
        h = h_element(self.u)
        return rotation(self.angle) @ torus(self.s) @ (h if self.sign > 0 else -h)


def adjoint_coordinates(g: GroupElement) -> tuple[float, float, float]:
    """(x1, x2, x3) of Ad(g)Z, the model of g·y0"""
    # Ad(g)Z = g Z g^{-1}, written out for [[a, b], [c, d]]
    a, b, c, d = g.a, g.b, g.c, g.d
    x11 = b * d - a * c
    x12 = a * a - b * b
    x21 = d * d - c * c
    return x11, (x12 + x21) / 2, (x12 - x21) / 2


def polar_kah(g: GroupElement) -> PolarKAH:
    """g = r_θ·a_s·(±exp(uZ)) with θ ∈ [0, π) and g·y0 at height x3 = sinh 2s"""
    x1, x2, x3 = adjoint_coordinates(g)
    if x1 * x1 + x2 * x2 < DEGENERACY_THRESHOLD:
        raise DegenerateDecomposition(f"{g!r}: K-angle undefined at {(x1, x2, x3)!r}")
    s = asinh(x3) / 2
    # Ad(r_θ) rotates (0, cosh 2s) counter-clockwise by 2θ
    angle = (atan2(-x1, x2) % (2 * pi)) / 2
    h = torus(-s) @ rotation(-angle) @ g
    sign = 1 if h.a > 0 else -1
    u = asinh(sign * h.b)
    if abs(h.b - h.c) > 1e-8 * max(1.0, abs(h.a)):
        raise InternalConsistencyError(f"{g!r}: H-part {h!r} is not symmetric")
    return PolarKAH(angle, s, u, sign)


type Orbit = Literal["e", "w0"]


@dataclass(frozen=True)
class HwanFactorization:
    orbit: Orbit
    u: float
    s: float
    x: float
    sign: int

    def compose(self) -> GroupElement:
        h = h_element(self.u)
        w = IDENTITY if self.orbit == "e" else W0
        out = h @ w @ torus(self.s) @ unipotent(self.x)
        return out if self.sign > 0 else -out


def orbit_of(g: GroupElement, threshold: float = DEGENERACY_THRESHOLD) -> Orbit | None:
    """open H-orbit of g·P_min, None on the boundary"""
    q = g.a * g.a - g.c * g.c
    if abs(q) < threshold:
        return None
    return "e" if q > 0 else "w0"


def hwan_decompose(g: GroupElement, threshold: float = DEGENERACY_THRESHOLD) -> HwanFactorization:
    """g = ±exp(uZ)·w·a_s·n_x for w ∈ {e, w0}

    the orbit is read off v = g·e1: w = e if v1² > v2², w0 if v2² > v1².
    """
    v1, v2 = g.a, g.c
    q = v1 * v1 - v2 * v2
    if abs(q) < threshold:
        raise BoundaryOrbit(f"{g!r}: v1² - v2² = {q!r} on the orbit boundary")
    s = log(abs(q)) / 2
    if q > 0:
        orbit, sign, u = "e", (1 if v1 > 0 else -1), atanh(v2 / v1)
        w = IDENTITY
    else:
        orbit, sign, u = "w0", (1 if v2 > 0 else -1), atanh(v1 / v2)
        w = W0
    head = h_element(u) @ w @ torus(s)
    if sign < 0:
        head = -head
    n = head.inverse() @ g
    return HwanFactorization(orbit, u, s, n.b, sign)


# *** norm, spherical function, weight ****************************************

def _symmetric_part(g: GroupElement) -> np.ndarray:
    """M_g = z·θ(z)^{-1} = z zᵀ for z = g·τ(g)^{-1}"""
    z = (g @ tau(g).inverse()).matrix
    return z @ z.T


def variety_norm(g: GroupElement) -> float:
    """‖g·y0‖ = ¼·|log(z θ(z)^{-1})|_Frobenius, z = g τ(g)^{-1}"""
    low, top = np.linalg.eigvalsh(_symmetric_part(g))
    if not (top > 0 and low > -1e-8 * top):
        raise InternalConsistencyError(
            f"z θ(z)^-1 of {g!r} is not positive definite: eigenvalues {low!r}, {top!r}")
    # det = 1: the spectrum is {1/top, top}
    return float(sqrt(2) * abs(log(top)) / 4)


def cartan_parameter(g: GroupElement) -> float:
    """t ≥ 0 with g ∈ K a_t K"""
    singular_values = np.linalg.svd(g.matrix, compute_uv=False)
    return float(log(singular_values[0]))


def phi0(g: GroupElement) -> float:
    """Harish-Chandra's basic spherical function ∫_K e^{-ρH(gk)} dk

    bi-K-invariance reduces it to a_t; the circle average of
    (e^{2t}cos² + e^{-2t}sin²)^{-1/2} is a complete elliptic integral.
    """
    t = cartan_parameter(g)
    return float(2 / pi * exp(-t) * special.ellipkm1(exp(-4 * t)))


def phi0_by_quadrature(g: GroupElement, nodes: int = 4096) -> float:
    """periodic trapezoidal rule for ∫_K |g·k·e1|^{-1} dk"""
    angles = 2 * pi * np.arange(nodes) / nodes
    columns = g.matrix @ np.vstack([np.cos(angles), np.sin(angles)])
    return float(np.mean(1 / np.linalg.norm(columns, axis=0)))


def theta_weight(g: GroupElement) -> float:
    """Θ(gH) = φ0(g τ(g)^{-1})^{-1/2}"""
    return phi0(g @ tau(g).inverse()) ** -0.5


# *** Lie derivatives *********************************************************

def lie_derivative(
        f: Callable[["PointY"], complex],
        u: LieVec,
        y: "PointY",
        step: float = 1e-3,
) -> Estimate:
    """(L_u f)(y) = d/dt f(exp(-tu)·y) at t = 0

    central differences at step and step/2, combined by one Richardson
    extrapolation; the error estimate is the size of that correction.
    """
    if not step > 0:
        raise DomainError(f"step must be positive, got {step!r}")

    def sample(t: float) -> complex:
        value = complex(f(y.translated(exp_lie(u, -t))))
        if not np.isfinite(value):
            raise DomainError(f"non-finite sample {value!r} along exp(-t u)·y at t={t!r}")
        return value

    def central(h: float) -> complex:
        return (sample(h) - sample(-h)) / (2 * h)

    coarse, fine = central(step), central(step / 2)
    value = (4 * fine - coarse) / 3
    return Estimate(value=value, error=abs(value - fine), evaluations=4)
