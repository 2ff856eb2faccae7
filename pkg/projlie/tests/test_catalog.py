import numpy as np
import pytest

from projlie.analysis import connection_in_y
from projlie.catalog import (
    NORMAL_FORM_KINDS,
    CaseId,
    CaseParams,
    adapted_case,
    adapted_connection_1a,
    all_cases,
    normal_form,
    bara_1a,
    canonical_partner,
    free_function,
    make_case,
    partial_solution_1a,
    partial_solution_residual_1a,
    validate_params,
)
from projlie.exceptions import ParamConstraintViolation
from projlie.geometry import connection_of
from projlie.jets import Jet2
from projlie.metrizability import WeightedTensor, a_from_metric, metrizability_residual
from projlie.sampler import sample_points

# # # # # # # # # # # #
#      FIXTURES       #
# # # # # # # # # # # #


@pytest.fixture(scope="module")
def cases():
    return {entry.case_id: entry for entry in all_cases()}


@pytest.fixture
def adapted_point():
    return (0.2, 1.5)


def max_residual(g, metric, point):
    K = connection_of(g, point, 2)
    return float(np.max(np.abs(metrizability_residual(K, a_from_metric(metric, point, 2), normalized=True))))


# # # # # # # # # # # # # #
#  PARAMETER VALIDATION   #
# # # # # # # # # # # # # #


@pytest.mark.parametrize(
    "case_id, params",
    [
        ("1c", CaseParams(nu=1.0)),
        ("1c", CaseParams(nu=5.0)),
        ("2c", CaseParams(nu=0.0)),
        ("3c", CaseParams(eta=0.5)),
        ("1b", CaseParams(lam=0.0, c=1.0)),
        ("1a", CaseParams(sign=2)),
        ("3a", CaseParams(y0=3.0)),
    ],
)
def test_invalid_parameters_are_refused(case_id, params):
    with pytest.raises(ParamConstraintViolation) as excinfo:
        validate_params(case_id, params)

    # The message names the violated constraint
    assert excinfo.value.constraint in str(excinfo.value)


def test_defaults_are_valid():
    for case_id in CaseId:
        assert validate_params(case_id, CaseParams()) == CaseParams()


def test_unknown_free_function():
    with pytest.raises(ParamConstraintViolation):
        free_function("gamma")


# # # # # # # # # # # # # # # # #
#  SOLUTIONS OF EVERY CASE      #
# # # # # # # # # # # # # # # # #


@pytest.mark.parametrize("case_id", list(CaseId))
def test_every_solution_solves_the_system_of_g(cases, case_id):
    entry = cases[case_id]

    for point in sample_points(entry.domain, 5, seed=7):
        for metric in entry.solution_basis():
            assert max_residual(entry.g, metric, point) < 1e-9, (metric.name, point)


@pytest.mark.parametrize("kind", NORMAL_FORM_KINDS)
def test_normal_form_pairs_share_the_system(kind):
    form = normal_form(kind)

    for point in sample_points(form.domain, 5, seed=7):
        assert max_residual(form.g, form.gbar, point) < 1e-9, point


def test_case_families(cases):
    assert cases[CaseId.LIOUVILLE_JORDAN].expected_class == "liouville"
    assert cases[CaseId.COMPLEX_ROTATION].expected_class == "complex_liouville"
    assert cases[CaseId.NULL_SPECIAL].expected_class == "jordan_block"
    assert cases[CaseId.NULL_SPECIAL].tilde is not None
    assert canonical_partner(cases[CaseId.LIOUVILLE_DIAGONAL]) is cases[CaseId.LIOUVILLE_DIAGONAL].partner


def test_jordan_branch_domain(cases):
    # Default lower limit 5 on the branch above the poles 0 and 3
    assert cases[CaseId.NULL_JORDAN].domain.y_range == (4.0, 10.0)


def test_unknown_normal_form():
    with pytest.raises(ParamConstraintViolation):
        normal_form("cubic")


# # # # # # # # # # # # # # # # #
#  ADAPTED COORDINATES (1a)     #
# # # # # # # # # # # # # # # # #


def test_adapted_case_turns_v_into_d_dx(cases):
    adapted = adapted_case(cases[CaseId.LIOUVILLE_JORDAN])

    assert adapted.v.values((1.0, 0.5)) == pytest.approx([1.0, 0.0])
    assert adapted.adapted


def test_jordan_cases_have_no_adapted_form(cases):
    with pytest.raises(ParamConstraintViolation):
        adapted_case(cases[CaseId.NULL_SPECIAL])


def test_closed_form_connection_matches_metric(cases, adapted_point):
    adapted = adapted_case(cases[CaseId.LIOUVILLE_JORDAN])

    from_metric = connection_of(adapted.g, adapted_point, 2).values()
    closed = adapted_connection_1a(1.0)(adapted_point[1])

    assert from_metric == pytest.approx(closed, rel=1e-9)


def test_bara_solves_the_adapted_system(adapted_point):
    x, y = Jet2.coordinates(adapted_point, 3)
    bara = WeightedTensor(*bara_1a(1.0)(x, y))
    K = connection_in_y(adapted_connection_1a(1.0), adapted_point[1], degree=3, x=adapted_point[0])

    residual = metrizability_residual(K, bara, normalized=True)

    assert np.max(np.abs(residual)) < 1e-10


def test_partial_solution_is_shifted_by_bara(adapted_point):
    x, y = Jet2.coordinates(adapted_point, 3)
    P = partial_solution_1a(1.0)(x, y)
    bara = bara_1a(1.0)(x, y)

    for p, b in zip(P, bara):
        assert p.diff(0).value == pytest.approx(p.value + b.value, rel=1e-12)


def test_partial_solution_residual(adapted_point):
    x, y = Jet2.coordinates(adapted_point, 3)
    P = WeightedTensor(*partial_solution_1a(1.0)(x, y))
    K = connection_in_y(adapted_connection_1a(1.0), adapted_point[1], degree=3, x=adapted_point[0])

    residual = metrizability_residual(K, P) / np.exp(adapted_point[0])
    expected = [float(r) for r in partial_solution_residual_1a(1.0)(adapted_point[1])]

    assert residual == pytest.approx(expected, rel=1e-9, abs=1e-12)
