import numpy as np
import pytest
from scipy.linalg import expm

from projlie.exceptions import DegenerateMetric, DegreeMismatch
from projlie.geometry import (
    Domain,
    MetricField,
    SymmetricJet,
    VectorField,
    christoffel,
    connection_of,
    conformal_metric,
    curvature_invariants,
    flat_metric,
    lie_derivative_metric,
    rotation_field,
    rotational_metric,
    round_sphere_metric,
    scalar_curvature_from_jets,
)
from projlie.jets import exp

# # # # # # # # # # # #
#      FIXTURES       #
# # # # # # # # # # # #


@pytest.fixture
def exponential_metric():
    # e^{2x} (dx^2 + dy^2)
    return conformal_metric(lambda x, y: exp(2.0 * x), name="exponential")


@pytest.fixture
def point():
    return (0.4, -0.3)


# # # # # # # # # # # # #
#  CONNECTION TESTS     #
# # # # # # # # # # # # #


def test_flat_metric_has_no_connection(point):
    K = connection_of(flat_metric(), point, degree=2)

    assert np.allclose(K.values(), 0.0)


def test_christoffel_symbols_of_conformal_metric(exponential_metric, point):
    gamma = christoffel(exponential_metric, point, degree=2)

    assert gamma[0][0][0].value == pytest.approx(1.0)
    assert gamma[0][1][1].value == pytest.approx(-1.0)
    assert gamma[1][0][1].value == pytest.approx(1.0)
    assert gamma[1][1][1].value == pytest.approx(0.0, abs=1e-14)


def test_projective_connection_of_conformal_metric(exponential_metric, point):
    K = connection_of(exponential_metric, point, degree=2)

    # y'' = K0 + K1 y' + K2 y'^2 + K3 y'^3
    assert K.values() == pytest.approx([0.0, -1.0, 0.0, -1.0], abs=1e-13)


# # # # # # # # # # # # #
#  CURVATURE TESTS      #
# # # # # # # # # # # # #


def test_round_sphere_scalar_curvature(point):
    R = scalar_curvature_from_jets(round_sphere_metric().jets(point, 4))

    # R = 2K with K = 1
    assert R.value == pytest.approx(2.0, rel=1e-12)


def test_curvature_invariants_of_sphere_are_constant(point):
    invariants = curvature_invariants(round_sphere_metric(), point)

    assert invariants.R == pytest.approx(2.0, rel=1e-12)
    assert np.allclose(invariants.dR, 0.0, atol=1e-11)
    assert invariants.L == pytest.approx(0.0, abs=1e-11)


def test_scalar_curvature_of_sphere_is_constant_at_random_points():
    rng = np.random.default_rng(5)
    sphere = round_sphere_metric()

    for x, y in rng.uniform(-2.0, 2.0, size=(12, 2)):
        R = scalar_curvature_from_jets(sphere.jets((x, y), 4))
        assert abs(R.value) == pytest.approx(2.0, rel=1e-10)


def test_curvature_invariants_need_degree_five(point):
    with pytest.raises(DegreeMismatch):
        curvature_invariants(round_sphere_metric(), point, degree=4)


# # # # # # # # # # # # #
#  LIE DERIVATIVE TESTS #
# # # # # # # # # # # # #


def test_rotation_is_killing_for_rotational_metric(point):
    lie = lie_derivative_metric(rotational_metric(), rotation_field(), point, degree=2)

    assert np.allclose(lie.matrix().astype(float), 0.0, atol=1e-14)


def test_translation_scales_exponential_metric(exponential_metric, point):
    translation = VectorField(lambda x, y: (0.0 * x + 1.0, 0.0 * y), name="d/dx")

    lie = lie_derivative_metric(exponential_metric, translation, point, degree=2)

    assert lie.matrix().astype(float) == pytest.approx(2.0 * exponential_metric.values(point))


def test_lie_derivative_matches_the_derivative_of_the_flow_pullback(point):
    g = MetricField(lambda x, y: (2.0 + x * x, 0.3 * x * y, 1.5 + y * y * y), name="polynomial")
    B = np.array([[0.3, -0.7], [0.5, 0.2]])
    v = VectorField(lambda x, y: (B[0, 0] * x + B[0, 1] * y, B[1, 0] * x + B[1, 1] * y), name="linear")
    h = 1e-4

    lie = lie_derivative_metric(g, v, point, degree=2)
    forward = g.pullback(expm(h * B)).values(point)
    backward = g.pullback(expm(-h * B)).values(point)

    assert lie.matrix().astype(float) == pytest.approx((forward - backward) / (2 * h), rel=1e-7, abs=1e-9)


# # # # # # # # # # # # #
#  FIELD HELPERS        #
# # # # # # # # # # # # #


def test_pullback_of_flat_metric():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])

    transported = flat_metric().pullback(A)

    assert transported.values((0.3, 0.2)) == pytest.approx(A.T @ A)


def test_pushforward_inverts_the_change():
    A = np.array([[1.0, 1.0], [1.0, -1.0]])
    diagonal = VectorField(lambda x, y: (0.0 * x + 1.0, 0.0 * y + 1.0))

    assert diagonal.pushforward(A).values((0.3, 0.2)) == pytest.approx([1.0, 0.0])


def test_scaled_metric():
    g = MetricField(lambda x, y: (1.0 + x * x, 0.5 * y, 2.0))

    assert g.scaled(3.0).values((1.0, 2.0)) == pytest.approx(3.0 * g.values((1.0, 2.0)))


def test_degenerate_tensor_is_refused():
    with pytest.raises(DegenerateMetric):
        SymmetricJet(1.0, 1.0, 1.0).inverse()


def test_domain_margin():
    domain = Domain((0.0, 1.0), (0.0, 1.0), lambda x, y: abs(x - y) - 0.1, "|x - y| > 0.1")

    assert domain.contains(0.8, 0.2)
    assert not domain.contains(0.5, 0.55)
    assert not domain.contains(1.5, 0.2)


def test_domain_treats_failing_margin_as_outside():
    domain = Domain((-1.0, 1.0), (-1.0, 1.0), lambda x, y: 1.0 / x)

    assert not domain.contains(0.0, 0.5)
