"""A-Fourier transforms, the open-orbit Poisson functionals and the
Fourier transform on Y.

The two open H-orbits on G/P_min are indexed by w ∈ {e, w0}. A functional
η has one component per orbit, and
``j(λ, η, g) = η_w·|v1² - v2²|^{(λ-1)/2}`` for v = g·e1 in the orbit of w.
Unwinding the Fourier transform over the two orbits gives

    ℱ(f)(λ, η, g) = 2·[η_e·ℱ_A^e(ℛf)(-λ; g) + η_w0·ℱ_A^w0(ℛ_w0 f)(λ; g·w0)]

with ℱ_A^w(F)(μ; g) = ∫ e^{(ρ_w + μ)t} F(g a_t) dt, ρ_e = 1, ρ_w0 = -1;
the factor 2 is the density of dy in a_t n_x coordinates.
"""
import csv
from cmath import log as clog
from dataclasses import dataclass, field, replace
from logging import getLogger
from math import asin, atan2, pi, sqrt
from pathlib import Path
from typing import Iterable, Literal, Sequence, TextIO

import numpy as np

from .errors import BoundaryOrbit, DomainError
from .funcspace import FunctionOnY
from .quadrature import Estimate, FourierTable, integrate_line, integrate_singular, line_fourier
from .radon import TransformGrid, XiSampler, horocycle_integral, radon_grid
from .sl2core import GroupElement, W0, hwan_decompose, torus
from .specs import GridSpec, QuadratureSpec
from .variety import HoroChart, HoroPoint


logger = getLogger(__name__)


IDENTITY_CSV_HEADER = ("lambda_re", "lambda_im", "g_id", "eta_e", "eta_w",
                       "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual")
# step used to read off the exponential rate of ℛf at a window edge
_RATE_STEP = 0.5

type Orbit = Literal["e", "w0"]
RHO = {"e": 1.0, "w0": -1.0}


@dataclass(frozen=True)
class SpectralParam:
    """λ ∈ 𝔞*_ℂ as the number λ(H0), so that a_s^λ = e^{λs}; ρ is 1"""
    lam: complex

    @classmethod
    def of(cls, value: "SpectralParam | complex") -> "SpectralParam":
        return value if isinstance(value, SpectralParam) else cls(complex(value))

    @property
    def unitary(self) -> bool:
        return self.lam.real == 0

    def require_convergent(self):
        """the Poisson kernel |q|^{(λ-1)/2} is locally integrable iff Re λ > -1"""
        if not self.lam.real > -1:
            raise DomainError(f"Re λ = {self.lam.real} <= -1: the Fourier integral diverges")

    def __neg__(self) -> "SpectralParam":
        return SpectralParam(-self.lam)


@dataclass(frozen=True)
class OrbitFunctional:
    eta_e: complex = 1.0
    eta_w: complex = 0.0

    def __getitem__(self, orbit: Orbit) -> complex:
        return self.eta_e if orbit == "e" else self.eta_w


ETA_E = OrbitFunctional(1.0, 0.0)
ETA_W = OrbitFunctional(0.0, 1.0)


# *** ℱ_A *********************************************************************

def fourier_A(
        F: TransformGrid | XiSampler,
        lambdas: Iterable[SpectralParam | complex],
        angle: float,
        s_axis: GridSpec | np.ndarray | None = None,
) -> FourierTable:
    """ℱ_A F(λ, ξ) = ∫ e^{(1+λ)s} F(angle, s) ds on a sampled s-axis

    grids are read along their row at ``angle``; samplers are sampled on
    ``s_axis``.
    """
    lambdas = [SpectralParam.of(lam).lam for lam in lambdas]
    if isinstance(F, TransformGrid):
        row = int(np.argmin(np.abs((F.angles - angle + pi) % (2 * pi) - pi)))
        if abs((F.angles[row] - angle + pi) % (2 * pi) - pi) > 1e-12:
            raise DomainError(f"angle {angle!r} is not on the grid")
        return line_fourier(F.values[row], F.heights, 1.0, lambdas)
    if s_axis is None:
        raise DomainError("sampled ℱ_A needs an s-axis")
    heights = s_axis.axis(0) if isinstance(s_axis, GridSpec) else np.asarray(s_axis)
    samples = np.array([F(HoroPoint(angle, s)) for s in heights], dtype=complex)
    return line_fourier(samples, s_axis, 1.0, lambdas)


def _transform_along_a(f: FunctionOnY, g: GroupElement, orbit: Orbit,
                       spec: QuadratureSpec | None):
    chart = HoroChart(W0) if orbit == "w0" else None
    cache: dict[float, complex] = {}

    def sample(t: float) -> complex:
        if t not in cache:
            cache[t] = horocycle_integral(f, g @ torus(t), spec, chart=chart).value
        return cache[t]

    return sample


def _exponential_tail(integrand, F, edge: float, inner: float, exponent: complex,
                      outward: int, floor: float) -> complex:
    """∫ beyond ``edge`` of e^{exponent·t}·F(t), F continued as a pure exponential"""
    at_edge = integrand(edge)
    if abs(at_edge) <= floor:
        return 0j
    ratio_inner = F(inner)
    if ratio_inner == 0:
        raise DomainError(f"no decay rate: the transform vanishes at t={inner:g}")
    kappa = exponent + clog(F(edge) / ratio_inner) / (edge - inner)
    if not outward * kappa.real < 0:
        raise DomainError(f"integrand grows beyond t={edge:g} (rate {kappa:.3g}); "
                          f"widen the window")
    return -outward * at_edge / kappa


def fourier_A_coset(
        f: FunctionOnY,
        mu: SpectralParam | complex,
        g: GroupElement,
        orbit: Orbit = "e",
        spec: QuadratureSpec | None = None,
        *,
        window: float = 6.0,
        scale: float = 0.0,
) -> Estimate:
    """ℱ_A^w(ℛ_w f)(μ; g) = ∫ e^{(ρ_w + μ)t}·ℛ_w f(g a_t) dt

    integrated adaptively over |t| <= window; beyond it ℛ_w f(g a_t) is
    continued with the exponential rate read off at the edge (the a^{-2ρ}
    law on the growing side), which closes both tails in closed form.
    ``scale`` is the reference of the tolerance when the oscillation of
    e^{iμt} cancels the body.
    """
    spec = spec or QuadratureSpec()
    mu = SpectralParam.of(mu).lam
    exponent = RHO[orbit] + mu
    F = _transform_along_a(f, g, orbit, spec)

    def integrand(t: float) -> complex:
        return np.exp(exponent * t) * F(t)

    body = integrate_line(integrand, spec, lower=-window, upper=window, scale=scale)
    floor = spec.abs_tol + 1e-2 * spec.rel_tol * abs(body.value)
    tails = (_exponential_tail(integrand, F, window, window - _RATE_STEP, exponent, +1, floor)
             + _exponential_tail(integrand, F, -window, -window + _RATE_STEP, exponent, -1, floor))
    logger.debug(f"ℱ_A^{orbit}(ℛ{f.label})({mu}): body {body.value:.6e}, tails {tails:.3e}")
    return replace(body, value=body.value + tails, tail_bound=abs(tails))


# *** Poisson functionals *****************************************************

def poisson_j(lam: SpectralParam | complex, eta: OrbitFunctional, g: GroupElement) -> complex:
    """j(λ, η, g) = η_w·e^{(λ-1)s} for g = h·w·a_s·n; 0 on the orbit boundary"""
    lam = SpectralParam.of(lam).lam
    try:
        parts = hwan_decompose(g)
    except BoundaryOrbit:
        logger.debug(f"{g!r} is on the orbit boundary, j = 0")
        return 0j
    return eta[parts.orbit] * np.exp((lam - 1) * parts.s)


def kernel_form(u: np.ndarray, x1, x2, x3):
    """q(y) = v1² - v2² for v = section(y)^{-1}·u, as a quadratic form in u"""
    return (x2 - x3) * u[0] ** 2 - 2 * x1 * u[0] * u[1] - (x2 + x3) * u[1] ** 2


def _null_angles(u: np.ndarray, s: float) -> tuple[float, float]:
    """the two φ on the circle x3 = s where q vanishes"""
    alpha = atan2(u[1], u[0])
    offset = asin(s / sqrt(1 + s * s))
    return 2 * alpha + offset, 2 * alpha + pi - offset


def fourier_Y(
        f: FunctionOnY,
        lam: SpectralParam | complex,
        eta: OrbitFunctional,
        g: GroupElement,
        spec: QuadratureSpec | None = None,
        *,
        scale: float = 0.0,
) -> Estimate:
    """ℱ(f)(λ, η, g) = ∫_Y f(y)·j(λ, η, y^{-1}g) dy

    y^{-1} is taken through the section y ↦ r_θ a_s. On every circle
    x3 = s the kernel has two power singularities of order (Re λ - 1)/2,
    handled by graded panels; the s-integral is adaptive.
    """
    param = SpectralParam.of(lam)
    param.require_convergent()
    lam = param.lam
    u = np.array([g.a, g.c])
    exponent = (lam.real - 1) / 2
    heights = [c[2] for c in f.centers]
    power = (lam - 1) / 2

    def circle(s: float) -> complex:
        radius = sqrt(1 + s * s)
        null = _null_angles(u, s)
        middle = (null[0] + null[1]) / 2

        def integrand(phi: float) -> complex:
            x1, x2 = radius * np.cos(phi), radius * np.sin(phi)
            q = kernel_form(u, x1, x2, s)
            if q == 0:
                return 0j
            weight = eta.eta_e if q > 0 else eta.eta_w
            if weight == 0:
                return 0j
            return f.sampler(x1, x2, s) * weight * np.exp(power * np.log(abs(q)))

        panels = dict(lower=middle - pi, upper=middle + pi)
        # sign changes of f and η cancel on the circle
        mass = integrate_singular(lambda phi: abs(integrand(phi)), null, exponent, spec, **panels)
        return integrate_singular(integrand, null, exponent, spec, scale=mass.value.real,
                                  **panels).value

    return integrate_line(circle, spec, breakpoints=heights, scale=scale)


# *** the unwinding identity **************************************************

@dataclass(frozen=True)
class IdentityCheck:
    lam: complex
    eta: OrbitFunctional
    lhs: complex
    rhs: complex
    reference: float = 0.0
    g_id: str = "e"

    @property
    def residual(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs), self.reference)
        return abs(self.lhs - self.rhs) / scale if scale > 0 else 0.0

    def as_row(self) -> list[str]:
        def eta(value: complex) -> str:
            return f"{value.real:.16e}" if value.imag == 0 else f"{value}"

        return [f"{self.lam.real:.16e}", f"{self.lam.imag:.16e}", self.g_id,
                eta(complex(self.eta.eta_e)), eta(complex(self.eta.eta_w)),
                f"{self.lhs.real:.16e}", f"{self.lhs.imag:.16e}",
                f"{self.rhs.real:.16e}", f"{self.rhs.imag:.16e}", f"{self.residual:.6e}"]


@dataclass(frozen=True)
class UnwoundParts:
    """ℱ_A^e(ℛf)(-λ; g) and ℱ_A^w0(ℛ_w0 f)(λ; g·w0)"""
    on_e: Estimate
    on_w0: Estimate

    def combine(self, eta: OrbitFunctional) -> complex:
        return 2 * (eta.eta_e * self.on_e.value + eta.eta_w * self.on_w0.value)


def unwound_parts(f: FunctionOnY, lam: SpectralParam | complex, g: GroupElement,
                  spec: QuadratureSpec | None = None, *, window: float = 6.0,
                  scale: float = 0.0) -> UnwoundParts:
    lam = SpectralParam.of(lam)
    lam.require_convergent()
    return UnwoundParts(
        on_e=fourier_A_coset(f, -lam, g, "e", spec, window=window, scale=scale),
        on_w0=fourier_A_coset(f, lam, g @ W0, "w0", spec, window=window, scale=scale),
    )


def fourier_radon_identity(
        f: FunctionOnY,
        lam: SpectralParam | complex,
        eta: OrbitFunctional,
        g: GroupElement,
        spec: QuadratureSpec | None = None,
        *,
        window: float = 6.0,
        reference: float = 0.0,
        g_id: str = "g",
) -> IdentityCheck:
    """ℱ(f) by direct quadrature on Y against its unwinding over ℛ and ℛ_w0"""
    lhs = fourier_Y(f, lam, eta, g, spec, scale=reference).value
    rhs = unwound_parts(f, lam, g, spec, window=window, scale=reference).combine(eta)
    check = IdentityCheck(SpectralParam.of(lam).lam, eta, lhs, rhs, reference, g_id)
    logger.debug(f"{f.label}, λ={check.lam}, η={eta}: lhs {lhs:.8e} rhs {rhs:.8e} "
                 f"residual {check.residual:.2e}")
    return check


def identity_battery(
        f: FunctionOnY,
        lambdas: Sequence[SpectralParam | complex],
        elements: dict[str, GroupElement],
        etas: Sequence[OrbitFunctional] = (ETA_E, ETA_W),
        spec: QuadratureSpec | None = None,
        *,
        window: float = 6.0,
        reference: float = 0.0,
) -> list[IdentityCheck]:
    """every (λ, g, η) combination; both sides are linear in η, so each
    (λ, g) costs two direct and two unwound integrals"""
    checks = []
    for lam in lambdas:
        lam = SpectralParam.of(lam)
        for g_id, g in elements.items():
            lhs_e = fourier_Y(f, lam, ETA_E, g, spec, scale=reference).value
            lhs_w = fourier_Y(f, lam, ETA_W, g, spec, scale=reference).value
            parts = unwound_parts(f, lam, g, spec, window=window, scale=reference)
            for eta in etas:
                lhs = eta.eta_e * lhs_e + eta.eta_w * lhs_w
                checks.append(IdentityCheck(lam.lam, eta, lhs, parts.combine(eta),
                                            reference, g_id))
    return checks


def write_identity_csv(checks: Iterable[IdentityCheck], out: Path | TextIO):
    if isinstance(out, Path):
        with out.open("w", newline="") as stream:
            return write_identity_csv(checks, stream)
    writer = csv.writer(out)
    writer.writerow(IDENTITY_CSV_HEADER)
    for check in checks:
        writer.writerow(check.as_row())


# *** injectivity *************************************************************

@dataclass(frozen=True)
class GramReport:
    gram: np.ndarray
    singular_values: np.ndarray
    # functions whose transform vanishes on the grid
    kernel: tuple[int, ...] = field(default=())

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1])


def injectivity_gram(functions: Sequence[FunctionOnY], grid: GridSpec,
                     spec: QuadratureSpec | None = None, *, kernel_tol: float = 1e-12) -> GramReport:
    """Gram matrix of {ℛf_i} under the grid inner product on Ξ"""
    if len(functions) < 2:
        raise DomainError("a Gram probe needs at least two functions")
    weight = grid.spacing(0) * grid.spacing(1) if grid.uniform else 1.0
    rows = []
    for f in functions:
        transform = radon_grid(f, grid, spec)
        rows.append(np.where(transform.flagged, 0, transform.values).ravel())
    matrix = np.array(rows)
    gram = weight * matrix @ matrix.conj().T
    singular_values = np.linalg.svd(gram, compute_uv=False)
    diagonal = np.abs(np.diag(gram))
    kernel = tuple(int(i) for i in np.flatnonzero(diagonal <= kernel_tol * max(diagonal.max(), 1e-300)))
    if kernel:
        logger.info(f"transforms of {[functions[i].label for i in kernel]} vanish on the grid")
    return GramReport(gram=gram, singular_values=singular_values, kernel=kernel)
