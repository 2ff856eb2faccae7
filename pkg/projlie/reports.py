"""
Verification reports: one CheckRecord per check and case, assembled into a versioned JSON
document.

    {
      "schema_version": 1,
      "generated_at": "2026-01-01T12:00:00+00:00",
      "seed": 42,
      "cases": [{"id": "3d", "params": {...}, "passed": true, "checks": [...]}],
      "summary": {"total": 12, "passed": 12, "failed": 0}
    }
"""

import math
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from django.utils import timezone
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer


@dataclass
class CheckRecord:
    """
    Outcome of one check. bound = "upper" passes when max_residual <= threshold, bound = "lower"
    passes when the smallest observed value (reported as max_residual) stays above it.
    """

    name: str
    anchor: str
    sample_count: int
    rejected: int
    max_residual: float
    threshold: float
    passed: bool
    worst_point: tuple = None
    bound: str = "upper"
    details: dict = field(default_factory=dict)


def _clean(value):
    """Plain JSON values; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, complex):
        return [_clean(value.real), _clean(value.imag)]
    return value


class CheckRecordSerializer(serializers.Serializer):
    name = serializers.CharField()
    anchor = serializers.CharField()
    sample_count = serializers.IntegerField()
    rejected = serializers.IntegerField()
    max_residual = serializers.SerializerMethodField()
    threshold = serializers.FloatField()
    bound = serializers.CharField()
    passed = serializers.BooleanField()
    worst_point = serializers.SerializerMethodField()
    details = serializers.SerializerMethodField()

    def get_max_residual(self, record):
        return _clean(record.max_residual)

    def get_worst_point(self, record):
        return _clean(record.worst_point)

    def get_details(self, record):
        return _clean(record.details)


@dataclass
class CaseResult:
    id: str
    params: dict
    checks: list

    @property
    def passed(self):
        return all(check.passed for check in self.checks)


def build_report(results, seed):
    """The report document for a list of CaseResult."""
    records = [check for result in results for check in result.checks]
    passed = sum(1 for check in records if check.passed)
    return {
        "schema_version": settings.PROJLIE_REPORT_SCHEMA_VERSION,
        "generated_at": timezone.now().isoformat(),
        "seed": seed,
        "cases": [
            {
                "id": result.id,
                "params": _clean(result.params),
                "passed": result.passed,
                "checks": CheckRecordSerializer(result.checks, many=True).data,
            }
            for result in results
        ],
        "summary": {"total": len(records), "passed": passed, "failed": len(records) - passed},
    }


def render_report(report):
    return JSONRenderer().render(report, renderer_context={"indent": 2})


def summary_lines(results):
    """One human-readable line per check."""
    lines = []
    for result in results:
        for check in result.checks:
            status = "PASS" if check.passed else "FAIL"
            comparison = "<=" if check.bound == "upper" else ">"
            lines.append(
                f"{status} {result.id:<22} {check.name:<26} {check.max_residual:.3e} {comparison} "
                f"{check.threshold:.1e} ({check.sample_count} samples, {check.rejected} rejected)"
            )
    return lines
