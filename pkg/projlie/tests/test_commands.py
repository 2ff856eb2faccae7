import json
from io import StringIO
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from projlie.management.base import CHECK_FAILURE, CONFIG_ERROR
from projlie.reports import CaseResult, CheckRecord

# # # # # # # # # # # #
#      FIXTURES       #
# # # # # # # # # # # #


@pytest.fixture
def write_config(tmp_path):
    def write(text):
        path = tmp_path / "run.toml"
        path.write_text(text)
        return str(path)

    return write


@pytest.fixture
def passing_record():
    return CheckRecord("metrizability", "g solves its own system", 10, 0, 1e-13, 1e-9, True, (0.5, 1.0))


def run(*args):
    out = StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


# # # # # # # # # # # # # #
#  CONFIGURATION ERRORS   #
# # # # # # # # # # # # # #


@pytest.mark.parametrize(
    "text",
    [
        "case = []\n",
        'seeed = 3\n[[case]]\nid = "3d"\n',
        '[tolerances]\nmetrizability = -1.0\n[[case]]\nid = "3d"\n',
        '[tolerances]\nlinearity = 1e-3\n[[case]]\nid = "3d"\n',
        '[[case]]\nid = "1c"\nnu = 1.0\n',
        '[[case]]\nid = "4a"\n',
        "seed = \n",
    ],
)
def test_invalid_config_exits_with_config_error(write_config, text):
    with pytest.raises(CommandError) as excinfo:
        run("verify", "--config", write_config(text))

    assert excinfo.value.returncode == CONFIG_ERROR


def test_missing_config_file(tmp_path):
    with pytest.raises(CommandError) as excinfo:
        run("verify", "--config", str(tmp_path / "missing.toml"))

    assert excinfo.value.returncode == CONFIG_ERROR


def test_nothing_to_run():
    with pytest.raises(CommandError) as excinfo:
        run("verify")

    assert excinfo.value.returncode == CONFIG_ERROR


# # # # # # # # # # # # # #
#  VERIFY                 #
# # # # # # # # # # # # # #


@patch("projlie.management.commands.verify.run_config")
def test_verify_writes_report(mock_run_config, tmp_path, passing_record):
    mock_run_config.return_value = [CaseResult("3d", {}, [passing_record])]
    report_path = tmp_path / "report.json"

    output = run("verify", "--case", "3d", "--out", str(report_path), "--seed", "4")

    report = json.loads(report_path.read_text())
    assert report["schema_version"] == 1
    assert report["seed"] == 4
    assert report["summary"] == {"total": 1, "passed": 1, "failed": 0}
    assert report["cases"][0]["checks"][0]["worst_point"] == [0.5, 1.0]
    assert "1 of 1 checks passed" in output


@patch("projlie.management.commands.verify.run_config")
def test_verify_fails_on_failed_check(mock_run_config, passing_record):
    failing = CheckRecord("bracket", "F is an integral", 10, 0, 1e-3, 1e-9, False)
    mock_run_config.return_value = [CaseResult("3d", {}, [passing_record, failing])]

    with pytest.raises(CommandError) as excinfo:
        run("verify", "--case", "3d")

    assert excinfo.value.returncode == CHECK_FAILURE
    assert "3d:bracket" in str(excinfo.value)


def test_verify_special_case(write_config, tmp_path):
    path = write_config('seed = 5\nsamples = 12\ngeodesic_starts = 2\n[[case]]\nid = "3d"\n')

    output = run("verify", "--config", path, "--json")

    report = json.loads(output[: output.rindex("}") + 1])
    checks = {check["name"]: check for check in report["cases"][0]["checks"]}
    assert len(checks) >= 8
    assert {"metrizability", "bracket", "lv_fit", "integral_ode", "solution_dimension"} <= set(checks)
    assert report["summary"]["failed"] == 0


def test_threshold_override_fails_the_check(write_config):
    path = write_config(
        'seed = 5\nsamples = 12\ngeodesic_starts = 2\n[tolerances]\nmetrizability = 1e-30\n[[case]]\nid = "3d"\n'
    )

    with pytest.raises(CommandError) as excinfo:
        run("verify", "--config", path)

    assert excinfo.value.returncode == CHECK_FAILURE
    assert "3d:metrizability" in str(excinfo.value)


# # # # # # # # # # # # # #
#  TRACE                  #
# # # # # # # # # # # # # #


def test_trace_flat_metric_is_a_straight_line():
    output = run("trace", "--flat", "--start", "0", "0", "--velocity", "1", "2", "--t-end", "1")

    frame = pd.read_csv(StringIO(output), comment="#")
    assert list(frame.columns) == ["t", "x", "y", "p1", "p2", "I_flat"]
    assert np.allclose(frame["y"], 2.0 * frame["x"], atol=1e-12)
    assert "# metric: flat" in output


def test_trace_refuses_start_outside_domain():
    with pytest.raises(CommandError) as excinfo:
        run("trace", "--case", "1a", "--start", "0.1", "0.1")

    assert excinfo.value.returncode == CONFIG_ERROR
    assert "0.2 <= x, y <= 5" in str(excinfo.value)


def test_trace_reports_leaving_the_domain():
    output = run("trace", "--case", "1c", "--start", "1.4", "0.0", "--velocity", "1", "0", "--t-end", "5")

    assert "# DomainExit:" in output


def test_trace_json_carries_the_domain_exit():
    output = run(
        "trace", "--case", "1c", "--start", "1.4", "0.0", "--velocity", "1", "0", "--t-end", "5", "--json"
    )

    payload = json.loads(output)
    assert payload["domain_exit"].startswith("Geodesic of g left the")
    assert payload["points"] == len(payload["trajectory"])
    assert payload["representation"] == "tangent"


def test_trace_json_without_exit():
    payload = json.loads(run("trace", "--flat", "--start", "0", "0", "--momentum", "1", "2", "--t-end", "1", "--json"))

    assert payload["domain_exit"] is None
    assert payload["representation"] == "cotangent"
    assert payload["trajectory"][-1]["y"] == pytest.approx(2.0 * payload["trajectory"][-1]["x"])


def test_trace_writes_to_the_configured_output(write_config, tmp_path):
    target = tmp_path / "trace.csv"
    path = write_config(f'out = "{target}"\n[[case]]\nid = "1c"\n')

    output = run("trace", "--config", path, "--start", "0.5", "-0.4", "--t-end", "0.2")

    assert f"Wrote {target}" in output
    frame = pd.read_csv(target, comment="#")
    assert list(frame.columns[:5]) == ["t", "x", "y", "p1", "p2"]


# # # # # # # # # # # # # #
#  CLASSIFY AND SWEEP     #
# # # # # # # # # # # # # #


def test_classify_multiple_of_metric():
    output = run("classify", "--case", "1c", "--scale", "2", "--points", "5", "--json")

    rows = json.loads(output)
    assert len(rows) == 5
    assert {row["kind"] for row in rows} == {"proportional"}


def test_classify_normal_form():
    output = run("classify", "--normal-form", "jordan", "--points", "5")

    assert "jordan_block: 5" in output


def test_sweep_case_1a():
    output = run("sweep", "--case", "1a", "--mu", "2", "--ys", "0.6", "1.1", "--json")

    rows = json.loads(output)
    assert sorted({row["mu"] for row in rows}) == [1.0, 2.0]
    assert max(row["relative_det"] for row in rows if row["expected_zero"]) < 1e-8


def test_sweep_inhomogeneous_branch():
    output = run("sweep", "--case", "1a", "--inhomogeneous", "--ys", "0.5", "1.0")

    frame = pd.read_csv(StringIO(output))
    assert frame["relative_error"].max() < 1e-8
    assert (frame["det_b"] * frame["closed_form"] > 0).all()


def test_sweep_needs_a_liouville_case():
    with pytest.raises(CommandError) as excinfo:
        run("sweep", "--case", "3d")

    assert excinfo.value.returncode == CONFIG_ERROR
