"""Verification batteries.

Each suite runs a fixed battery and files one record per check into a
:class:`VerificationReport`; the report passes iff every record does.
Reports are written as ``key=value`` lines and contain nothing that
varies between runs with the same seed.
"""
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from logging import getLogger
from math import exp, log, pi, sqrt
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from .errors import DomainError
from .funcspace import combination, discrete_series, gaussian_bump, horocycle_tail_profile, l1_norm
from .groupcase import (
    GroupPointPair,
    ds_coefficient,
    fubini_factorization_check,
    gaussian_entries,
    group_l1_closed_form,
    group_l1_norm,
    group_radon,
    separable_witness,
    slice_growth,
    slice_mass,
    weight_two_coefficient,
)
from .radon import (
    a_rho_asymptotics,
    change_of_variables_check,
    horocycle_integral,
    horocycle_mass,
    radon_grid,
    sup_bound_probe,
)
from .sl2core import (
    IDENTITY,
    in_Gh,
    random_element,
    rotation,
    theta_weight,
    torus,
    unipotent,
    variety_norm,
)
from .specs import GridSpec, QuadratureSpec
from .spectral import ETA_E, ETA_W, identity_battery, injectivity_gram
from .variety import HoroPoint, PointY, Y0, invariant_integral, iota, wave_operator


logger = getLogger(__name__)


def package_version() -> str:
    try:
        return version("hororadon")
    except PackageNotFoundError:
        return "unknown"


def _number(value: float) -> str:
    return f"{value:.16e}"


@dataclass(frozen=True)
class CheckRecord:
    id: str
    value: float
    tolerance: float
    # "le": value <= tolerance, "ge": value >= tolerance
    relation: str
    passed: bool
    quantities: dict[str, float] = field(default_factory=dict)

    def as_line(self) -> str:
        items = {"check": self.id, "value": _number(self.value),
                 "relation": self.relation, "tolerance": _number(self.tolerance),
                 "pass": str(self.passed).lower()}
        items |= {name: _number(v) for name, v in self.quantities.items()}
        return " ".join(f"{k}={v}" for k, v in items.items())


@dataclass
class VerificationReport:
    suite: str
    seed: int = 0
    version: str = field(default_factory=package_version)
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def _file(self, record: CheckRecord) -> bool:
        self.records.append(record)
        if record.passed:
            logger.info(f"{self.suite}/{record.id}: {record.value:.3e} ({record.relation} "
                        f"{record.tolerance:.1e})")
        else:
            logger.warning(f"{self.suite}/{record.id} FAILED: {record.value:.6e} not "
                           f"{record.relation} {record.tolerance:.1e}")
        return record.passed

    def at_most(self, id: str, value: float, tolerance: float, **quantities: float) -> bool:
        value = float(value)
        return self._file(CheckRecord(id, value, tolerance, "le",
                                      bool(value <= tolerance), quantities))

    def at_least(self, id: str, value: float, bound: float, **quantities: float) -> bool:
        value = float(value)
        return self._file(CheckRecord(id, value, bound, "ge", bool(value >= bound), quantities))

    def lines(self) -> list[str]:
        head = [f"suite={self.suite}", f"version={self.version}", f"seed={self.seed}"]
        tail = [f"checks={len(self.records)}",
                f"failed={sum(not r.passed for r in self.records)}",
                f"overall={'pass' if self.passed else 'fail'}"]
        return head + [r.as_line() for r in self.records] + tail

    def write(self, out: Path | TextIO):
        if isinstance(out, Path):
            with out.open("w") as stream:
                return self.write(stream)
        for line in self.lines():
            out.write(line + "\n")


type Suite = Callable[[VerificationReport, QuadratureSpec, np.random.Generator], None]


def _relative_to_mass(f, grid: GridSpec, spec: QuadratureSpec) -> tuple[float, int]:
    transform = radon_grid(f, grid, spec)
    ratios = np.abs(transform.values) / np.maximum(transform.masses, 1e-300)
    return float(np.max(np.where(transform.flagged, np.inf, ratios))), int(transform.flagged.sum())


# *** suites ******************************************************************

def kernel_suite(report: VerificationReport, spec: QuadratureSpec, rng: np.random.Generator):
    """ℛ vanishes on the discrete series witnesses and on their translates"""
    grid = GridSpec.horospheres(16, 41, 4.0)
    for n in (2, 3, 4):
        worst, flagged = _relative_to_mass(discrete_series(n), grid, spec)
        report.at_most(f"f{n}.grid", worst, 1e-8, flagged=flagged)

    f2 = discrete_series(2)
    origin = HoroPoint(0.0, 0.0)
    mass = horocycle_mass(f2, origin, spec).value.real
    value = horocycle_integral(f2, origin.representative(), spec, scale=mass).value
    report.at_most("f2.origin", abs(value) / mass, 1e-8, mass=mass)

    f3 = discrete_series(3)
    mix = combination([1.0, 0.5j, -2.0],
                      [f3, f3.translated(random_element(rng, 0.5)),
                       f3.translated(random_element(rng, 0.5))])
    worst, flagged = _relative_to_mass(mix, GridSpec.horospheres(4, 5, 2.0), spec)
    report.at_most("f3.translates", worst, 1e-8, flagged=flagged)


def decay_suite(report: VerificationReport, spec: QuadratureSpec, rng: np.random.Generator):
    """ℛ of a bump vanishes at infinity on Ξ"""
    f = gaussian_bump(Y0, 1.0)
    transform = radon_grid(f, GridSpec.horospheres(16, 25, 6.0), spec, with_mass=False)
    sups = transform.slice_sups()
    peak = float(np.max(sups))
    heights = transform.heights
    at_five = float(np.max(sups[np.isclose(np.abs(heights), 5.0)]))
    report.at_most("bump.sup_at_5", at_five / peak, 1e-3, peak=peak)

    upper = sups[heights >= 3.0 - 1e-12]
    lower = sups[heights <= -3.0 + 1e-12][::-1]
    rises = max(float(np.max(np.diff(upper), initial=-np.inf)),
                float(np.max(np.diff(lower), initial=-np.inf)))
    report.at_most("bump.monotone_tails", rises / peak, 1e-12,
                   decay_height=transform.decay_height())

    scaled = np.abs(a_rho_asymptotics(f, IDENTITY, (4.0, 5.0), spec))
    report.at_most("bump.a_rho_law", abs(scaled[1] - scaled[0]) / scaled[1], 1e-2,
                   limit=float(scaled[1]))


def change_of_variables_suite(report: VerificationReport, spec: QuadratureSpec,
                              rng: np.random.Generator):
    """∫|f(k n a·y0)| dn = e^{2s}∫|f(k a n·y0)| dn over a (k, s) battery"""
    angles = (0.0, 2 * pi / 3, 4 * pi / 3)
    heights = (-2.0, -1.0, 0.0, 1.0, 2.0)
    for f in (discrete_series(2), gaussian_bump(PointY.from_chart(0.5, 0.3), 0.8)):
        worst = max(change_of_variables_check(f, angle, s, spec).residual
                    for angle in angles for s in heights)
        report.at_most(f"{f.label}.residual", worst, 1e-9)


KAPPA0 = sqrt(2) / 4


def _level(t: float, x: float) -> float:
    """top eigenvalue behind ‖a_s n_x·y0‖ for t = e^s"""
    return exp(variety_norm(torus(log(t)) @ unipotent(x)) / KAPPA0)


def _signed(values: np.ndarray) -> np.ndarray:
    return np.concatenate([-values[::-1], [0.0], values])


def _norm_samples(ts, xs, small_ts, small_xs):
    inner, outer = [], []
    for t in ts:
        for x in xs:
            if abs(x) <= 0.5:
                inner.append(_level(t, x) / t ** 4)
            # the bound degenerates along |x| = 1 where the top eigenvalue stays O(1)
            elif abs(abs(x) - 1) >= 0.5:
                outer.append(_level(t, x) / (t * x) ** 4)
    small = [variety_norm(torus(log(t)) @ unipotent(x)) / log(abs(x))
             for t in small_ts for x in small_xs]
    return {"c1": min(inner), "c2": min(outer), "kappa": min(small)}


def _fitted_norm_constants() -> dict[str, float]:
    """constants of ‖a_s n_x·y0‖ ≥ κ0·log(bound) on a (t, x) grid

    κ0 = √2/4 turns the Frobenius norm of the logarithm back into the
    log of the largest eigenvalue. c1, c2 and κ are fitted here; c3 is
    the observed envelope c2·(tx)⁴ - level near |x| = 1 on this grid only,
    it grows with t.
    """
    ts = np.geomspace(1.0, 20.0, 25)
    xs = _signed(np.geomspace(1e-3, 50.0, 60))
    constants = _norm_samples(ts, xs, np.geomspace(0.05, 0.99, 20), np.geomspace(2.0, 100.0, 20))
    constants["c3"] = max(0.0, max(constants["c2"] * (t * x) ** 4 - _level(t, x)
                                   for t in ts for x in xs if abs(x) > 0.5))
    return constants


def _held_out_norm_ratios(constants: dict[str, float]) -> dict[str, float]:
    """fitted constants against a second sample reaching past the first"""
    held_out = _norm_samples(np.geomspace(1.3, 40.0, 17), _signed(np.geomspace(2e-3, 100.0, 41)),
                             np.geomspace(0.07, 0.95, 13), np.geomspace(3.0, 300.0, 13))
    return {name: held_out[name] / constants[name] for name in ("c1", "c2", "kappa")}


def schwartz_bounds_suite(report: VerificationReport, spec: QuadratureSpec,
                          rng: np.random.Generator):
    """explicit growth bounds behind ℛ(𝒞(Y)) ⊂ BC^∞(Ξ)"""
    xs = np.geomspace(2.0, 100.0, 500)
    xs = np.concatenate([-xs, xs])
    margins = [variety_norm(unipotent(x)) - log(x ** 4 / 2 + 0.5) / 4 for x in xs]
    report.at_least("norm_of_unipotent.margin", min(margins), 0.0)

    ratio = min(theta_weight(unipotent(x)) / abs(x) for x in xs)
    report.at_least("theta_over_x.constant", ratio, 1e-12)

    constants = _fitted_norm_constants()
    report.at_least("two_case.c1", constants["c1"], 1e-12, **constants)
    report.at_least("two_case.c2", constants["c2"], 1e-12)
    report.at_least("small_t.kappa", constants["kappa"], 1e-12)
    # a fitted constant that only describes its own sample fails here
    for name, ratio in _held_out_norm_ratios(constants).items():
        report.at_least(f"held_out.{name}", ratio, 0.5)

    f2 = discrete_series(2)
    near = sup_bound_probe(f2, GridSpec.horospheres(8, 13, 3.0), spec)
    far = sup_bound_probe(f2, GridSpec.horospheres(8, 25, 6.0), spec)
    report.at_most("f2.sup_growth", far / near, 1.1, sup=far)

    profile = horocycle_tail_profile(f2, (10.0, 100.0, 1000.0))
    report.at_most("f2.tail_profile", profile[-1] / profile[0], 1e-3)


def fourier_radon_suite(report: VerificationReport, spec: QuadratureSpec,
                        rng: np.random.Generator):
    """ℱ on Y against its unwinding over ℛ and ℛ_w0"""
    f = gaussian_bump(Y0, 1.0)
    reference = abs(l1_norm(f, spec).value)
    elements = {"e": IDENTITY, "a0.5": torus(0.5), "r0.3": rotation(0.3)}
    for lam, tolerance in ((2.0, 1e-5), (0.8j, 1e-4)):
        checks = identity_battery(f, [lam], elements, (ETA_E, ETA_W), spec, reference=reference)
        for check in checks:
            eta = "e" if check.eta == ETA_E else "w0"
            report.at_most(f"lambda={lam}.g={check.g_id}.eta={eta}", check.residual, tolerance,
                           lhs_abs=abs(check.lhs), rhs_abs=abs(check.rhs))


def measure_invariance_suite(report: VerificationReport, spec: QuadratureSpec,
                             rng: np.random.Generator):
    """∫·dφ ds under G-translates, the hyperboloid model, □ on f_n"""
    f = gaussian_bump(PointY.from_chart(0.4, 0.3), 0.8)
    base = invariant_integral(f, spec, heights=[0.3]).value
    worst = 0.0
    for _ in range(20):
        moved = f.translated(random_element(rng, 0.5))
        value = invariant_integral(moved, spec, heights=[c[2] for c in moved.centers]).value
        worst = max(worst, abs(value - base) / abs(base))
    report.at_most("translates.integral", worst, 1e-8, integral=abs(base))

    residual = 0.0
    for _ in range(1000):
        y = iota(random_element(rng))
        residual = max(residual, abs(y.constraint_residual) / max(1.0, y.x3 * y.x3))
    report.at_most("hyperboloid.constraint", residual, 1e-12)

    grid = GridSpec(lower=(0.0, -3.0), upper=(2 * pi, 3.0), points=(12, 9), periodic=(True, False))
    for n in (2, 3, 4):
        fn = discrete_series(n)
        worst = 0.0
        for phi in grid.axis(0):
            for s in grid.axis(1):
                y = PointY.from_chart(phi, s)
                expected = fn.eigenvalue * fn(y)
                worst = max(worst, abs(wave_operator(fn, y) - expected) / abs(expected))
        report.at_most(f"f{n}.eigenvalue", worst, 1e-5)


def group_case_suite(report: VerificationReport, spec: QuadratureSpec,
                     rng: np.random.Generator):
    """(G×G)/ΔG: the discrete series kernel, Fubini and integrability"""
    elements = (IDENTITY, torus(0.4), rotation(0.7))
    phi4 = ds_coefficient(4)
    worst = 0.0
    for g in elements:
        for h in elements:
            pair = GroupPointPair(g, h)
            mass = slice_mass(phi4, pair, spec)
            value = group_radon(phi4, pair, spec, scale=mass).value
            worst = max(worst, abs(value) / mass)
    report.at_most("phi4.pairs", worst, 1e-7)

    pairs = (GroupPointPair(), GroupPointPair(torus(0.3), rotation(0.5)))
    for f in (separable_witness(1.0), gaussian_entries(1.0)):
        residual = max(fubini_factorization_check(f, pair, spec).residual for pair in pairs)
        report.at_most(f"{f.label}.fubini", residual, 1e-9)

    for k, radius in ((3, 30.0), (4, 30.0), (2, 5.0), (2, 10.0)):
        numeric = group_l1_norm(ds_coefficient(k) if k > 2 else weight_two_coefficient(),
                                radius, spec).value.real
        closed = group_l1_closed_form(k, radius)
        report.at_most(f"phi{k}.l1_ball_{radius:g}", abs(numeric - closed) / closed, 1e-6,
                       closed_form=closed)

    growth = slice_growth(weight_two_coefficient(), GroupPointPair(), (10.0, 20.0, 40.0), spec)
    report.at_most("phi2.slice_saturates", (growth[2] - growth[1]) / growth[2], 1e-1,
                   slice_mass=float(growth[2]))


def gh_density_suite(report: VerificationReport, spec: QuadratureSpec,
                     rng: np.random.Generator):
    """every element has a genuine horosphere through it"""
    misses = sum(not in_Gh(random_element(rng)) for _ in range(10_000))
    report.at_most("random.misses", misses, 0)
    report.at_least("rotation_pi_4", float(in_Gh(rotation(pi / 4))), 1.0)


def gram_suite(report: VerificationReport, spec: QuadratureSpec, rng: np.random.Generator):
    """injectivity on bumps and the kernel direction of f2"""
    bumps = [gaussian_bump(PointY.from_chart(phi, s), 0.8)
             for phi, s in ((0.0, 0.0), (1.0, 0.5), (2.0, -0.5), (3.0, 1.0), (4.5, 0.0))]
    coarse = injectivity_gram(bumps, GridSpec.horospheres(8, 17, 4.0), spec)
    fine = injectivity_gram(bumps, GridSpec.horospheres(16, 33, 4.0), spec)
    relative = coarse.sigma_min / float(coarse.singular_values[0])
    report.at_least("bumps.sigma_min", relative, 1e-8, sigma_min=coarse.sigma_min)
    report.at_most("bumps.refinement", abs(fine.sigma_min - coarse.sigma_min) / coarse.sigma_min,
                   0.1, sigma_min_fine=fine.sigma_min)

    with_kernel = injectivity_gram(bumps + [discrete_series(2)],
                                   GridSpec.horospheres(8, 17, 4.0), spec)
    report.at_most("with_f2.sigma_min",
                   with_kernel.sigma_min / float(with_kernel.singular_values[0]), 1e-8,
                   kernel_members=len(with_kernel.kernel))


SUITES: dict[str, Suite] = {
    "kernel": kernel_suite,
    "decay": decay_suite,
    "schwartz-bounds": schwartz_bounds_suite,
    "change-of-variables": change_of_variables_suite,
    "fourier-radon": fourier_radon_suite,
    "measure-invariance": measure_invariance_suite,
    "group-case": group_case_suite,
    "gh-density": gh_density_suite,
    "gram": gram_suite,
}


def run_suite(name: str, spec: QuadratureSpec | None = None, seed: int = 0) -> VerificationReport:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    report = VerificationReport(suite=name, seed=seed)
    logger.info(f"running suite {name!r} with seed {seed}")
    SUITES[name](report, spec or QuadratureSpec(), np.random.default_rng(seed))
    return report
