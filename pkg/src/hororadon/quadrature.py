"""Line integrals, singular line integrals and discrete A-Fourier sums.

Every ``∫_N ... dn`` and ``∫_A ... da`` of the package ends up here. Complex
integrands are integrated as two real ``scipy.integrate.quad`` passes that
share one sample cache.
"""
from dataclasses import dataclass, field
from logging import getLogger
from math import inf, isfinite
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, signal

from .errors import AccuracyError, DomainError
from .specs import QuadratureSpec, GridSpec


logger = getLogger(__name__)


type LineSampler = Callable[[float], complex]


@dataclass(frozen=True)
class Estimate:
    value: complex
    error: float
    evaluations: int = 0
    warnings: tuple[str, ...] = ()
    tail_bound: float = 0.0

    def __complex__(self) -> complex:
        return complex(self.value)

    def __abs__(self) -> float:
        return abs(self.value)


class _Sampler:
    """finite-checking, caching wrapper around a complex line sampler"""

    def __init__(self, f: LineSampler):
        self._f = f
        self._cache: dict[float, complex] = {}

    @property
    def evaluations(self) -> int:
        return len(self._cache)

    def __call__(self, x: float) -> complex:
        try:
            return self._cache[x]
        except KeyError:
            pass
        value = complex(self._f(x))
        if not (isfinite(value.real) and isfinite(value.imag)):
            raise DomainError(f"non-finite sample {value!r} at x={x!r}")
        self._cache[x] = value
        return value

    def real(self, x: float) -> float:
        return self(x).real

    def imag(self, x: float) -> float:
        return self(x).imag


def _quad_complex(
        sampler: Callable[[float], complex] | _Sampler,
        a: float,
        b: float,
        spec: QuadratureSpec,
        points: Sequence[float] = (),
        scale: float = 0.0,
        pieces: int = 1,
) -> tuple[complex, float, list[str]]:
    """one quad pass per real part, each held to a share of the tolerance

    ``pieces`` is the number of calls whose errors get summed into one
    estimate; the real and imaginary pass of every piece take half of that
    piece's share, so the summed error meets the requested tolerance.
    """
    if not isinstance(sampler, _Sampler):
        sampler = _Sampler(sampler)
    share = 2 * pieces
    problems: list[str] = []
    parts = []
    # breakpoints open len(points) + 1 intervals before any bisection
    limit = spec.max_subdivisions + (len(points) + 1 if points else 0)
    options = dict(epsabs=max(spec.abs_tol, spec.rel_tol * scale) / share,
                   epsrel=spec.rel_tol / share, limit=limit, full_output=1)
    if points:
        options["points"] = list(points)
    for part in (sampler.real, sampler.imag):
        out = integrate.quad(part, a, b, **options)
        parts.append(out[:2])
        if len(out) > 3:
            problems.append(str(out[3]).splitlines()[0])
    (re, re_err), (im, im_err) = parts
    return complex(re, im), re_err + im_err, problems


def _settle(value: complex, error: float, problems: list[str],
            spec: QuadratureSpec, evaluations: int, tail_bound: float = 0.0,
            what: str = "integral", scale: float = 0.0) -> Estimate:
    """the estimate, or AccuracyError when error > max(abs_tol, rel_tol·max(|value|, scale))"""
    tolerance = max(spec.abs_tol, spec.rel_tol * max(abs(value), scale))
    if not error <= tolerance:
        reason = f": {problems[0]}" if problems else ""
        raise AccuracyError(
            f"{what} did not converge{reason} (estimate {value!r}, "
            f"error {error:.3e} > tolerance {tolerance:.3e})",
            estimate=value, error=error)
    for problem in problems:
        logger.debug(f"{what}: quad reported {problem!r} (error {error:.3e})")
    return Estimate(value=value, error=error, evaluations=evaluations,
                    warnings=tuple(dict.fromkeys(problems)), tail_bound=tail_bound)


def integrate_line(
        f: LineSampler,
        spec: QuadratureSpec | None = None,
        *,
        lower: float = -inf,
        upper: float = inf,
        breakpoints: Iterable[float] = (),
        scale: float = 0.0,
) -> Estimate:
    """∫ f(x) dx over [lower, upper], the real line by default

    Infinite ranges are split into a finite core ``[-R, R]`` (R the
    truncation radius, widened to cover all breakpoints) where the
    breakpoints anchor the subdivision, and two tails. Raises
    :class:`AccuracyError` unless the summed error estimate meets
    max(abs_tol, rel_tol·max(|value|, scale)), and :class:`DomainError` on
    non-finite samples.
    For integrals that cancel, ``scale`` (typically ∫|f|) replaces |value|
    as the reference of the relative tolerance.
    """
    spec = spec or QuadratureSpec()
    if not upper > lower:
        raise DomainError(f"empty integration range [{lower}, {upper}]")
    sampler = _Sampler(f)
    pts = sorted({float(p) for p in breakpoints
                  if isfinite(p) and lower < p < upper})

    radius = spec.truncation_radius
    a = lower if isfinite(lower) else min([-radius] + [p - 1.0 for p in pts])
    b = upper if isfinite(upper) else max([radius] + [p + 1.0 for p in pts])
    inner = [p for p in pts if a < p < b]
    pieces = 1 + (not isfinite(lower)) + (not isfinite(upper))

    value, error, problems = _quad_complex(sampler, a, b, spec, inner, scale, pieces)
    tail_bound = 0.0
    for tail_a, tail_b, edge in ((-inf, a, a), (b, inf, b)):
        if isfinite(tail_a) and isfinite(tail_b):
            continue
        if (tail_a == -inf and isfinite(lower)) or (tail_b == inf and isfinite(upper)):
            continue
        v, e, p = _quad_complex(sampler, tail_a, tail_b, spec, scale=scale, pieces=pieces)
        value += v
        error += e
        problems += p
        if isfinite(spec.tail_exponent):
            # |f| <= |f(edge)| (|x|/|edge|)^-p beyond the edge
            tail_bound += abs(sampler(edge)) * abs(edge) / (spec.tail_exponent - 1)
    return _settle(value, error, problems, spec, sampler.evaluations, tail_bound, scale=scale)


def integrate_singular(
        f: LineSampler,
        singular_points: Iterable[float],
        exponent: float,
        spec: QuadratureSpec | None = None,
        *,
        lower: float = -inf,
        upper: float = inf,
        scale: float = 0.0,
) -> Estimate:
    """∫ f for f ~ |x - x0|^exponent near every listed singular point

    Each panel adjacent to a singular point is graded with
    ``x = x0 ± h·t^p``, ``p = 1/(1 + exponent)``, which turns the power
    singularity into a smooth integrand in ``t``. Non-negative exponents
    need no grading; the points are then plain breakpoints.
    """
    spec = spec or QuadratureSpec()
    if not exponent > -1:
        raise DomainError(f"|x|^{exponent} is not integrable at its singular point")
    singular = sorted({float(p) for p in singular_points if lower < p < upper})
    if exponent >= 0:
        return integrate_line(f, spec, lower=lower, upper=upper, breakpoints=singular, scale=scale)
    if not singular:
        return integrate_line(f, spec, lower=lower, upper=upper, scale=scale)

    grading = 1.0 / (1.0 + exponent)
    sampler = _Sampler(f)
    value, error, problems = 0j, 0.0, []

    # (left, right, left is singular, right is singular)
    panels: list[tuple[float, float, bool, bool]] = []
    if lower == -inf:
        panels.append((-inf, singular[0] - 1.0, False, False))
        panels.append((singular[0] - 1.0, singular[0], False, True))
    elif lower < singular[0]:
        panels.append((lower, singular[0], False, True))
    for left, right in zip(singular, singular[1:]):
        middle = (left + right) / 2
        panels.append((left, middle, True, False))
        panels.append((middle, right, False, True))
    if upper == inf:
        panels.append((singular[-1], singular[-1] + 1.0, True, False))
        panels.append((singular[-1] + 1.0, inf, False, False))
    elif singular[-1] < upper:
        panels.append((singular[-1], upper, True, False))

    for left, right, left_singular, right_singular in panels:
        if left_singular or right_singular:
            anchor, width = (left, right - left) if left_singular else (right, left - right)

            def graded(t, anchor=anchor, width=width):
                return sampler(anchor + width * t ** grading) * abs(width) * grading * t ** (grading - 1)

            v, e, p = _quad_complex(graded, 0.0, 1.0, spec, scale=scale,
                                      pieces=len(panels))
        else:
            v, e, p = _quad_complex(sampler, left, right, spec, scale=scale,
                                    pieces=len(panels))
        value += v
        error += e
        problems += p
    return _settle(value, error, problems, spec, sampler.evaluations,
                   what="singular integral", scale=scale)


@dataclass(frozen=True)
class FourierTable:
    """λ ↦ ∫ e^{(ρ̂+λ)s} F(s) ds on a sampled s-axis"""
    lambdas: np.ndarray
    values: np.ndarray
    method: str
    warnings: tuple[str, ...] = field(default=())

    def __getitem__(self, lam: complex) -> complex:
        index = int(np.argmin(np.abs(self.lambdas - lam)))
        if abs(self.lambdas[index] - lam) > 1e-12 * max(1.0, abs(lam)):
            raise KeyError(lam)
        return complex(self.values[index])

    def as_dict(self) -> dict[complex, complex]:
        return {complex(lam): complex(v) for lam, v in zip(self.lambdas, self.values)}


def _is_imaginary_lattice(lambdas: np.ndarray) -> bool:
    if lambdas.size < 2 or np.any(lambdas.real != 0):
        return False
    steps = np.diff(lambdas.imag)
    return bool(np.allclose(steps, steps[0], rtol=1e-12, atol=0) and steps[0] != 0)


def line_fourier(
        samples: np.ndarray,
        s_axis: np.ndarray | GridSpec,
        rho_hat: float,
        lambdas: Iterable[complex],
        *,
        truncation_tol: float = 1e-8,
) -> FourierTable:
    """trapezoidal ∫ e^{(ρ̂+λ)s} F(s) ds for every λ

    On a uniform s-axis a uniform imaginary λ-lattice is summed with the
    chirp z-transform; anything else is summed directly.
    """
    if isinstance(s_axis, GridSpec):
        uniform = s_axis.uniform
        s_axis = s_axis.axis(0)
    else:
        s_axis = np.asarray(s_axis, dtype=float)
        steps = np.diff(s_axis)
        uniform = bool(np.allclose(steps, steps[0], rtol=1e-10, atol=0))
    samples = np.asarray(samples, dtype=complex)
    lambdas = np.asarray(list(lambdas), dtype=complex)
    if samples.shape != s_axis.shape:
        raise DomainError(f"{samples.shape[0]} samples on a {s_axis.size}-point axis")
    if not np.all(np.isfinite(samples)):
        raise DomainError("non-finite samples handed to line_fourier")

    weighted = np.exp(rho_hat * s_axis) * samples
    warnings: list[str] = []
    peak = float(np.max(np.abs(weighted))) if weighted.size else 0.0
    edge = max(abs(weighted[0]), abs(weighted[-1])) if weighted.size else 0.0
    if peak > 0 and edge > truncation_tol * peak:
        message = (f"window [{s_axis[0]:g}, {s_axis[-1]:g}] truncates: edge "
                   f"{edge:.3e} vs peak {peak:.3e}")
        logger.warning(message)
        warnings.append(message)

    if lambdas.size == 0:
        return FourierTable(lambdas, np.zeros(0, dtype=complex), "empty", tuple(warnings))

    if uniform and _is_imaginary_lattice(lambdas):
        step = s_axis[1] - s_axis[0]
        trapezoid = weighted * step
        trapezoid[0] /= 2
        trapezoid[-1] /= 2
        omega0 = lambdas[0].imag
        d_omega = lambdas[1].imag - lambdas[0].imag
        values = signal.czt(trapezoid, m=lambdas.size,
                            w=np.exp(1j * d_omega * step),
                            a=np.exp(-1j * omega0 * step))
        values = values * np.exp(1j * lambdas.imag * s_axis[0])
        return FourierTable(lambdas, values, "czt", tuple(warnings))

    phases = np.exp(np.outer(lambdas, s_axis))
    values = integrate.trapezoid(phases * weighted[None, :], s_axis, axis=1)
    return FourierTable(lambdas, values, "direct", tuple(warnings))
