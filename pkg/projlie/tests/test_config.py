import math

import numpy as np
import pytest

from projlie.catalog import CaseParams
from projlie.config import cases_config, parse_config
from projlie.exceptions import ConfigError, DomainError
from projlie.geometry import Domain
from projlie.reports import CaseResult, _clean, build_report, summary_lines
from projlie.sampler import sample_points, sample_starts
from projlie.suites import DEFAULT_TOLERANCES, CheckRun

# # # # # # # # # # # #
#      FIXTURES       #
# # # # # # # # # # # #


@pytest.fixture
def config_data():
    return {
        "seed": 42,
        "samples": 20,
        "tolerances": {"bracket": 1e-7},
        "case": [{"id": "3d"}, {"id": "1c", "nu": 0.25}, {"id": "normal_liouville", "X": "sin", "sign": -1}],
    }


# # # # # # # # # # # # #
#  CONFIG PARSING       #
# # # # # # # # # # # # #


def test_parse_config(config_data):
    config = parse_config(config_data)

    assert config.seed == 42
    assert config.samples == 20
    assert [case.id for case in config.cases] == ["3d", "1c", "normal_liouville"]
    assert config.cases[1].params == CaseParams(nu=0.25)
    assert config.cases[2].functions == {"X": "sin", "Y": "exp", "h": "tan"}
    assert config.cases[2].params.sign == -1


def test_tolerances_are_merged_over_defaults(config_data):
    config = parse_config(config_data)

    assert config.tolerance("bracket") == 1e-7
    assert config.tolerance("metrizability") == DEFAULT_TOLERANCES["metrizability"]


def test_defaults_come_from_settings(settings):
    settings.PROJLIE_DEFAULT_SEED = 9

    config = cases_config(["2a"])

    assert config.seed == 9
    assert config.out is None


def test_overrides_keep_unset_values(config_data):
    config = parse_config(config_data).with_overrides(out="report.json")

    assert config.seed == 42
    assert config.out == "report.json"


@pytest.mark.parametrize(
    "changes",
    [
        {"case": []},
        {"samples": 3},
        {"seed": -1},
        {"colour": "blue"},
        {"case": [{"id": "1c", "mu": 0.5}]},
        {"case": [{"id": "normal_complex", "sign": 0}]},
        {"case": [{"id": "normal_liouville", "X": "gamma"}]},
    ],
)
def test_invalid_config(config_data, changes):
    with pytest.raises(ConfigError) as excinfo:
        parse_config({**config_data, **changes})

    assert "Invalid run configuration" in str(excinfo.value)


# # # # # # # # # # # # #
#  CHECK OUTCOMES       #
# # # # # # # # # # # # #


def test_upper_bound_check():
    run = CheckRun("metrizability", 1e-9)
    run.record(1e-12, (0.1, 0.2))
    run.record(5e-10, (0.3, 0.4))

    record = run.finish()

    assert record.passed
    assert record.max_residual == 5e-10
    assert record.worst_point == (0.3, 0.4)


def test_lower_bound_check_reports_the_smallest_value():
    run = CheckRun("killing", 1e-6, bound="lower")
    run.record(1e-2, (0.1, 0.2))
    run.record(1e-8, (0.3, 0.4))

    record = run.finish()

    assert not record.passed
    assert record.max_residual == 1e-8


def test_check_without_samples_fails():
    run = CheckRun("bracket", 1e-9)
    with run.at((0.0, 0.0)):
        raise DomainError("outside")

    record = run.finish()

    assert not record.passed
    assert record.rejected == 1
    assert record.sample_count == 0


def test_check_with_mostly_rejected_points_fails():
    run = CheckRun("bracket", 1e-9)
    for i in range(16):
        with run.at((0.0, float(i))):
            if i:
                raise DomainError("outside")
            run.record(1e-12, (0.0, 0.0))

    record = run.finish()

    assert not record.passed
    assert record.rejected == 15
    assert record.details["accepted_fraction"] == pytest.approx(1 / 16)


def test_check_with_few_rejected_points_passes():
    run = CheckRun("bracket", 1e-9)
    for i in range(4):
        with run.at((0.0, float(i))):
            if i == 3:
                raise DomainError("outside")
            run.record(1e-12, (0.0, float(i)))

    record = run.finish()

    assert record.passed
    assert record.details["accepted_fraction"] == pytest.approx(0.75)


def test_nan_fails_the_check():
    run = CheckRun("bracket", 1e-9)
    run.record(1e-12)
    run.record(float("nan"))

    assert not run.finish().passed


# # # # # # # # # # # # #
#  REPORTS              #
# # # # # # # # # # # # #


def test_clean_values():
    cleaned = _clean({"a": np.float64(1.5), "b": [math.inf, np.int64(3)], "c": np.array([1.0, np.nan]), "d": 1 + 2j})

    assert cleaned == {"a": 1.5, "b": [None, 3], "c": [1.0, None], "d": [1.0, 2.0]}


def test_report_summary():
    passing = CheckRun("metrizability", 1e-9)
    passing.record(1e-12)
    failing = CheckRun("bracket", 1e-9)
    failing.record(1e-3)
    results = [CaseResult("1c", CaseParams().as_dict(), [passing.finish(), failing.finish()])]

    report = build_report(results, seed=3)

    assert report["summary"] == {"total": 2, "passed": 1, "failed": 1}
    assert report["cases"][0]["passed"] is False
    assert report["cases"][0]["checks"][0]["worst_point"] is None
    assert [line.split()[0] for line in summary_lines(results)] == ["PASS", "FAIL"]


# # # # # # # # # # # # #
#  SAMPLING             #
# # # # # # # # # # # # #


def test_sampling_is_reproducible():
    domain = Domain((0.0, 1.0), (0.0, 1.0), lambda x, y: abs(x - y) - 0.1, "|x - y| > 0.1")

    first = sample_points(domain, 10, seed=5)
    second = sample_points(domain, 10, seed=5)

    assert first == second
    assert first != sample_points(domain, 10, seed=6)
    assert all(domain.contains(x, y) for x, y in first)


def test_starts_have_unit_speed():
    domain = Domain((0.0, 1.0), (0.0, 1.0))

    starts = sample_starts(domain, 5, seed=1)

    assert [math.hypot(*start.xi) for start in starts] == pytest.approx([1.0] * 5)


def test_empty_domain_is_reported():
    domain = Domain((0.0, 1.0), (0.0, 1.0), lambda x, y: -1.0, "nowhere")

    with pytest.raises(DomainError) as excinfo:
        sample_points(domain, 3)

    assert "nowhere" in str(excinfo.value)
