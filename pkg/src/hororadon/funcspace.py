"""Function families on Y with declared decay and regularity.

A :class:`FunctionOnY` carries a vectorized sampler in ambient coordinates
plus the metadata the quadrature layer needs: decay class, centres of mass
and a feature scale for breakpoint placement, and an optional Casimir
eigenvalue. Samplers of the built-in families are entire in the ambient
coordinates, which is what the analytic-vector probe relies on.
"""
from dataclasses import dataclass, field, replace
from logging import getLogger
from math import inf, pi
from typing import Annotated, Callable, Iterable, Literal, Sequence

import numpy as np
from scipy import linalg

from .config import settings, Check, at_least
from .errors import DomainError, UnsupportedFamily
from .quadrature import Estimate
from .sl2core import (
    GroupElement,
    LieVec,
    LIE_BASIS,
    lie_derivative,
    theta_weight,
    unipotent,
    variety_norm,
)
from .specs import GridSpec, QuadratureSpec
from .variety import PointY, Y0, adjoint_action, invariant_integral, section, wave_operator


logger = getLogger(__name__)


EIGENVALUE_TOLERANCE = 1e-5

type AmbientFunction = Callable[..., np.ndarray | complex]
type DecayKind = Literal["discrete-series", "ambient-gaussian", "custom"]


@dataclass(frozen=True)
class Decay:
    kind: DecayKind
    # |f| along a horocycle falls off like |x|^-exponent
    exponent: float = inf

    def __post_init__(self):
        if self.kind == "custom" and not self.exponent > 1:
            raise DomainError(f"custom decay needs a tail exponent > 1, got {self.exponent!r}")


def _validation_grid() -> GridSpec:
    return GridSpec(lower=(0.0, -3.0), upper=(2 * pi, 3.0), points=(12, 9), periodic=(True, False))


@dataclass(frozen=True)
class FunctionOnY:
    label: str
    sampler: AmbientFunction
    decay: Decay
    smooth: bool = True
    eigenvalue: complex | None = None
    # the sampler accepts complex ambient coordinates holomorphically
    holomorphic: bool = False
    centers: tuple[tuple[float, float, float], ...] = ()
    feature_scale: float = 1.0
    # |f| in closed form, when the family knows it
    modulus: AmbientFunction | None = field(default=None, compare=False)

    def __call__(self, y: PointY) -> complex:
        return complex(self.sampler(y.x1, y.x2, y.x3))

    def ambient(self, x1, x2, x3):
        return self.sampler(x1, x2, x3)

    def translated(self, g: GroupElement) -> "FunctionOnY":
        """L(g)f = f(g^{-1}·)"""
        inverse = g.inverse()
        base = self.sampler
        modulus = self.modulus

        def moved(x1, x2, x3):
            return base(*adjoint_action(inverse, x1, x2, x3))

        moved_modulus = None
        if modulus is not None:
            def moved_modulus(x1, x2, x3):
                return modulus(*adjoint_action(inverse, x1, x2, x3))

        centers = tuple(tuple(float(v) for v in adjoint_action(g, *c)) for c in self.centers)
        return replace(self, label=f"L(g){self.label}", sampler=moved,
                       centers=centers, modulus=moved_modulus)

    def absolute(self) -> "FunctionOnY":
        modulus = self.modulus or (lambda x1, x2, x3: np.abs(self.sampler(x1, x2, x3)))
        return replace(self, label=f"|{self.label}|", sampler=modulus, eigenvalue=None,
                       holomorphic=False, modulus=modulus)

    def validate(self, grid: GridSpec | None = None) -> "FunctionOnY":
        """finite samples, and the eigenvalue equation if one is declared

        every family constructor of this module runs it on what it builds.
        """
        grid = grid or _validation_grid()
        for phi in grid.axis(0):
            for s in grid.axis(1):
                y = PointY.from_chart(phi, s)
                value = self(y)
                if not np.isfinite(value):
                    raise DomainError(f"{self.label} is not finite at {y!r}")
                if self.eigenvalue is None:
                    continue
                residual = abs(wave_operator(self, y) - self.eigenvalue * value)
                if residual > EIGENVALUE_TOLERANCE * max(1.0, abs(self.eigenvalue * value)):
                    raise DomainError(
                        f"{self.label}: □f - {self.eigenvalue}·f = {residual:.3e} at {y!r}")
        return self


def combination(coefficients: Sequence[complex], functions: Sequence[FunctionOnY]) -> FunctionOnY:
    """Σ c_i f_i; the eigenvalue survives only if all terms share it"""
    if len(coefficients) != len(functions) or not functions:
        raise DomainError("a combination needs one coefficient per function")
    samplers = [f.sampler for f in functions]
    coefficients = [complex(c) for c in coefficients]

    def sampler(x1, x2, x3):
        return sum(c * f(x1, x2, x3) for c, f in zip(coefficients, samplers))

    eigenvalues = {f.eigenvalue for f in functions}
    kinds = {f.decay.kind for f in functions}
    exponent = min(f.decay.exponent for f in functions)
    decay = Decay(kinds.pop() if len(kinds) == 1 else "custom", exponent)
    return FunctionOnY(
        label=" + ".join(f"{c:g}·{f.label}" for c, f in zip(coefficients, functions)),
        sampler=sampler,
        decay=decay,
        smooth=all(f.smooth for f in functions),
        eigenvalue=eigenvalues.pop() if len(eigenvalues) == 1 else None,
        holomorphic=all(f.holomorphic for f in functions),
        centers=tuple(c for f in functions for c in f.centers),
        feature_scale=min(f.feature_scale for f in functions),
    ).validate()


# *** families ****************************************************************

def discrete_series(n: int) -> FunctionOnY:
    """f_n = (x1 + i·x2)^{-n}, a Casimir eigenfunction with eigenvalue n(1 - n)"""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise DomainError(f"discrete series witnesses need an integer n >= 2, got {n!r}")

    def sampler(x1, x2, x3):
        return (x1 + 1j * x2) ** (-n)

    def modulus(x1, x2, x3):
        return (x1 * x1 + x2 * x2) ** (-n / 2)

    return FunctionOnY(
        label=f"f_{n}",
        sampler=sampler,
        # along N, x1² + x2² grows like x⁴
        decay=Decay("discrete-series", 2.0 * n),
        eigenvalue=complex(n * (1 - n)),
        holomorphic=True,
        modulus=modulus,
    ).validate()


def gaussian_bump(center: PointY, width: float) -> FunctionOnY:
    """exp(-|y - center|² / width²) with the euclidean ambient distance"""
    if not width > 0:
        raise DomainError(f"bump width must be positive, got {width!r}")
    c1, c2, c3 = center.x1, center.x2, center.x3

    def sampler(x1, x2, x3):
        return np.exp(-((x1 - c1) ** 2 + (x2 - c2) ** 2 + (x3 - c3) ** 2) / width ** 2)

    return FunctionOnY(
        label=f"bump({c1:g},{c2:g},{c3:g};{width:g})",
        sampler=sampler,
        decay=Decay("ambient-gaussian"),
        holomorphic=True,
        centers=((c1, c2, c3),),
        feature_scale=width,
    ).validate()


def radial_bump(width: float) -> FunctionOnY:
    """the K-invariant bump exp(-x3² / width²)"""
    if not width > 0:
        raise DomainError(f"bump width must be positive, got {width!r}")

    def sampler(x1, x2, x3):
        return np.exp(-x3 ** 2 / width ** 2) * np.ones_like(x1)

    return FunctionOnY(
        label=f"kbump({width:g})",
        sampler=sampler,
        decay=Decay("ambient-gaussian"),
        holomorphic=True,
        centers=((0.0, 1.0, 0.0),),
        feature_scale=width,
    ).validate()


# *** Schwartz space **********************************************************

@settings
class SchwartzSeminorm:
    # powers of (H, E, F), applied as L_H^a L_E^b L_F^c
    derivatives: Annotated[tuple[int, int, int],
                           Check(at_least(0), "derivative orders are counts")] = (0, 0, 0)
    order: Annotated[int, Check(at_least(0), "polynomial order is a count")] = 0

    @property
    def total_derivatives(self) -> int:
        return sum(self.derivatives)


def _derivative_chain(f: Callable[[PointY], complex], sn: SchwartzSeminorm):
    chain: Callable[[PointY], complex] = f
    total = sn.total_derivatives
    # nested differences lose digits; coarser steps for higher orders
    step = 1e-3 if total <= 1 else 1e-2
    for u, count in reversed(list(zip(LIE_BASIS, sn.derivatives))):
        for _ in range(count):
            chain = (lambda inner, u: lambda y: lie_derivative(inner, u, y, step).value)(chain, u)
    return chain


def weight(y: PointY, order: int) -> float:
    """Θ(y)·(1 + ‖y‖)^order"""
    g = section(y)
    return theta_weight(g) * (1 + variety_norm(g)) ** order


def schwartz_seminorm(f: FunctionOnY, sn: SchwartzSeminorm, grid: GridSpec) -> float:
    """grid sup of Θ(y)(1 + ‖y‖)^n |(L_u f)(y)|, a lower bound of the seminorm"""
    derivative = _derivative_chain(f, sn)
    best = 0.0
    for phi in grid.axis(0):
        for s in grid.axis(1):
            y = PointY.from_chart(phi, s)
            try:
                value = abs(derivative(y))
            except DomainError as error:
                raise DomainError(f"{f.label}: derivative {sn!r} failed at {y!r}: {error}") from error
            best = max(best, weight(y, sn.order) * value)
    logger.debug(f"{f.label}: seminorm {sn!r} >= {best:.6e}")
    return best


def l1_norm(f: FunctionOnY, spec: QuadratureSpec | None = None) -> Estimate:
    heights = [c[2] for c in f.centers]
    return invariant_integral(f.absolute(), spec, heights=heights)


@dataclass(frozen=True)
class L1ProbeReport:
    epsilon: float
    base: float
    # direction -> ‖f(exp(iεu)·)‖_L¹
    shifted: dict[LieVec, float]

    @property
    def bounded(self) -> bool:
        return all(np.isfinite(v) for v in self.shifted.values()) and np.isfinite(self.base)

    @property
    def worst_ratio(self) -> float:
        return max(self.shifted.values(), default=self.base) / self.base


def holomorphic_shift(f: FunctionOnY, u: LieVec, epsilon: float) -> FunctionOnY:
    """y ↦ f(exp(iεu)·y) through the complexified adjoint action"""
    if not f.holomorphic:
        raise UnsupportedFamily(f"{f.label} has no holomorphic extension")
    shift = linalg.expm(1j * epsilon * u.matrix)
    base = f.sampler

    def shifted(x1, x2, x3):
        return base(*adjoint_action(shift, x1, x2, x3))

    return replace(f, label=f"{f.label}∘exp({epsilon:g}i·u)", sampler=shifted,
                   eigenvalue=None, holomorphic=False, modulus=None)


def l1_analytic_probe(
        f: FunctionOnY,
        directions: Iterable[LieVec],
        epsilon: float,
        spec: QuadratureSpec | None = None,
) -> L1ProbeReport:
    """‖f(exp(iεu)·)‖_L¹ along each direction, next to ‖f‖_L¹"""
    if not f.holomorphic:
        raise UnsupportedFamily(f"{f.label} has no holomorphic extension")
    base = abs(l1_norm(f, spec).value)
    shifted = {}
    for u in directions:
        value = l1_norm(holomorphic_shift(f, u, epsilon), spec)
        shifted[u] = abs(value.value)
        logger.debug(f"{f.label}: ‖f(exp({epsilon}i·{u}))‖₁ = {shifted[u]:.6e}")
    return L1ProbeReport(epsilon=epsilon, base=base, shifted=shifted)


def horocycle_tail_profile(f: FunctionOnY, xs: Iterable[float]) -> np.ndarray:
    """|x|·|f(n_x·y0)|, which tends to 0 for Schwartz class f"""
    xs = np.asarray(list(xs), dtype=float)
    out = np.empty_like(xs)
    for i, x in enumerate(xs):
        out[i] = abs(x) * abs(f(Y0.translated(unipotent(x))))
    return out
