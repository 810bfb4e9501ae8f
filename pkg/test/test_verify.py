import io

import pytest

from hororadon.errors import DomainError
from hororadon.verify import (
    SUITES,
    CheckRecord,
    VerificationReport,
    _fitted_norm_constants,
    _held_out_norm_ratios,
    package_version,
    run_suite,
)


def test_record_line():
    record = CheckRecord("f2.kernel", 1e-12, 1e-8, "le", True, {"mass": 2.0})
    assert record.as_line() == ("check=f2.kernel value=9.9999999999999998e-13 relation=le "
                                "tolerance=1.0000000000000000e-08 pass=true "
                                "mass=2.0000000000000000e+00")


def test_report_bookkeeping():
    report = VerificationReport(suite="demo", seed=4, version="0.0")
    assert report.passed
    assert report.at_most("small", 1e-9, 1e-8)
    assert report.at_least("large", 2.0, 1.0)
    assert report.passed
    assert not report.at_most("too.large", 1.0, 1e-8)
    assert not report.passed
    lines = report.lines()
    assert lines[:3] == ["suite=demo", "version=0.0", "seed=4"]
    assert lines[-3:] == ["checks=3", "failed=1", "overall=fail"]
    assert "pass=false" in lines[5]


def test_report_nan_fails():
    report = VerificationReport(suite="demo")
    assert not report.at_most("nan", float("nan"), 1.0)
    assert not report.at_least("nan", float("nan"), 1.0)


def test_report_write(tmp_path):
    report = VerificationReport(suite="demo", version="0.0")
    report.at_most("x", 0.0, 1.0)
    stream = io.StringIO()
    report.write(stream)
    report.write(tmp_path / "report.txt")
    assert (tmp_path / "report.txt").read_text() == stream.getvalue()
    assert stream.getvalue().endswith("overall=pass\n")


def test_package_version():
    assert package_version()


def test_suites():
    assert set(SUITES) == {"kernel", "decay", "schwartz-bounds", "change-of-variables",
                           "fourier-radon", "measure-invariance", "group-case", "gh-density",
                           "gram"}


def test_unknown_suite():
    with pytest.raises(DomainError):
        run_suite("unicorn")


def test_gh_density_suite():
    report = run_suite("gh-density", seed=0)
    assert report.passed
    assert [r.id for r in report.records] == ["random.misses", "rotation_pi_4"]


def test_reports_are_deterministic():
    first = run_suite("gh-density", seed=3).lines()
    assert run_suite("gh-density", seed=3).lines() == first
    assert "seed=3" in first


def test_change_of_variables_suite():
    report = run_suite("change-of-variables")
    assert report.passed, "\n".join(report.lines())


def test_norm_constants_hold_off_their_sample():
    constants = _fitted_norm_constants()
    assert all(constants[name] > 0 for name in ("c1", "c2", "kappa"))
    assert constants["c3"] >= 0
    for name, ratio in _held_out_norm_ratios(constants).items():
        assert ratio >= 0.5, name
