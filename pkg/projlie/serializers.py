from django.conf import settings
from rest_framework import serializers

from projlie.catalog import FREE_FUNCTIONS, NORMAL_FORM_KINDS, CaseId, CaseParams, validate_params
from projlie.exceptions import ParamConstraintViolation
from projlie.suites import DEFAULT_TOLERANCES, NORMAL_FORM_PREFIX

CASE_CHOICES = [case_id.value for case_id in CaseId] + [NORMAL_FORM_PREFIX + kind for kind in NORMAL_FORM_KINDS]
FUNCTION_CHOICES = sorted(FREE_FUNCTIONS)
PARAM_FIELDS = ("c", "lam", "nu", "eta", "phase", "epsilon", "y0", "sign")


class StrictSerializer(serializers.Serializer):
    """Rejects keys that are not declared fields, also when nested."""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ["Unknown key."] for key in unknown})
        return super().to_internal_value(data)


class CaseSerializer(StrictSerializer):
    id = serializers.ChoiceField(choices=CASE_CHOICES)
    c = serializers.FloatField(required=False)
    lam = serializers.FloatField(required=False)
    nu = serializers.FloatField(required=False)
    eta = serializers.FloatField(required=False)
    phase = serializers.FloatField(required=False)
    epsilon = serializers.IntegerField(required=False)
    y0 = serializers.FloatField(required=False, allow_null=True)
    sign = serializers.IntegerField(required=False)
    X = serializers.ChoiceField(choices=FUNCTION_CHOICES, default="tan")
    Y = serializers.ChoiceField(choices=FUNCTION_CHOICES, default="exp")
    h = serializers.ChoiceField(choices=FUNCTION_CHOICES, default="tan")

    def validate(self, attrs):
        params = CaseParams(**{key: attrs[key] for key in PARAM_FIELDS if key in attrs})
        if attrs["id"].startswith(NORMAL_FORM_PREFIX):
            if params.sign not in (-1, 1):
                raise serializers.ValidationError(f"Case {attrs['id']}: sign must be +1 or -1, got {params.sign}.")
        else:
            try:
                validate_params(attrs["id"], params)
            except ParamConstraintViolation as exc:
                raise serializers.ValidationError(f"Case {attrs['id']}: {exc}")
        attrs["params"] = params
        return attrs


class TolerancesSerializer(serializers.DictField):
    child = serializers.FloatField()

    def to_internal_value(self, data):
        tolerances = super().to_internal_value(data)
        unknown = sorted(set(tolerances) - set(DEFAULT_TOLERANCES))
        if unknown:
            raise serializers.ValidationError(
                f"Unknown checks {', '.join(unknown)}; known checks are {', '.join(sorted(DEFAULT_TOLERANCES))}."
            )
        for name, value in tolerances.items():
            if not value > 0:
                raise serializers.ValidationError(f"Tolerance for {name} must be positive, got {value}.")
        return tolerances


class RunConfigSerializer(StrictSerializer):
    seed = serializers.IntegerField(min_value=0, default=lambda: settings.PROJLIE_DEFAULT_SEED)
    samples = serializers.IntegerField(min_value=6, default=lambda: settings.PROJLIE_DEFAULT_SAMPLES)
    geodesic_starts = serializers.IntegerField(min_value=1, default=lambda: settings.PROJLIE_GEODESIC_STARTS)
    killing_samples = serializers.IntegerField(min_value=1, default=50)
    out = serializers.CharField(required=False, allow_null=True, default=None)
    tolerances = TolerancesSerializer(required=False, default=dict)
    case = CaseSerializer(many=True, allow_empty=False)
