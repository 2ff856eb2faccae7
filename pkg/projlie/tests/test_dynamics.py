import numpy as np
import pytest

from projlie.catalog import make_case, normal_form
from projlie.dynamics import (
    PhasePoint,
    Trajectory,
    catalog_integrals,
    conservation_check,
    geodesic_integrate,
    hamiltonian,
    momentum_integrals,
    poisson_bracket_residual,
    reverse,
    trajectory_frame,
    unparameterized_match,
)
from projlie.exceptions import DomainError, DomainExit, EmptyTrajectory
from projlie.geometry import Domain, MomentumQuadratic, flat_metric, rotational_metric, round_sphere_metric
from projlie.metrizability import partner_integral
from projlie.sampler import sample_points, sample_starts

# # # # # # # # # # # #
#      FIXTURES       #
# # # # # # # # # # # #


@pytest.fixture
def flat():
    return flat_metric()


@pytest.fixture
def angular_momentum_squared():
    # (x p_y - y p_x)^2
    return MomentumQuadratic(lambda x, y: (y * y, -2.0 * x * y, x * x), name="L^2")


@pytest.fixture(scope="module")
def diagonal_case():
    return make_case("1c")


def linear_combination(terms):
    """sum_k s_k Q_k for momentum quadratics Q_k."""

    def components(x, y):
        parts = [[s * e for e in Q.components(x, y)] for s, Q in terms]
        return tuple(sum(column) for column in zip(*parts))

    return MomentumQuadratic(components, name="combination")


# # # # # # # # # # # # #
#  INTEGRATION TESTS    #
# # # # # # # # # # # # #


def test_flat_geodesic_is_a_straight_line(flat):
    start = PhasePoint((0.0, 0.0), (1.0, 2.0))

    trajectory = geodesic_integrate(flat, start, 1.0)

    assert not trajectory.exited
    assert np.allclose(trajectory.positions[:, 1], 2.0 * trajectory.positions[:, 0], atol=1e-12)
    assert trajectory.positions[-1] == pytest.approx([1.0, 2.0])


def test_sphere_geodesic_conserves_energy():
    start = PhasePoint((0.2, -0.1), (0.6, 0.8))

    trajectory = geodesic_integrate(round_sphere_metric(), start, 1.5)

    assert trajectory.energy_drift < 1e-9


def test_reverse_returns_to_the_start():
    g = round_sphere_metric()
    start = PhasePoint((0.2, -0.1), (0.6, 0.8))

    back = reverse(g, geodesic_integrate(g, start, 1.0))

    assert back.positions[-1] == pytest.approx([0.2, -0.1], abs=1e-8)


def test_start_outside_domain_names_the_predicate(diagonal_case):
    with pytest.raises(DomainError) as excinfo:
        geodesic_integrate(diagonal_case.g, PhasePoint((3.0, 0.0), (1.0, 0.0)), 1.0)

    assert diagonal_case.domain.description in str(excinfo.value)


def test_leaving_the_domain(flat):
    box = Domain((-1.0, 1.0), (-1.0, 1.0))
    start = PhasePoint((0.0, 0.0), (1.0, 0.0))

    clipped = geodesic_integrate(flat, start, 5.0, domain=box)
    assert clipped.exited
    assert clipped.positions[-1][0] == pytest.approx(1.0)

    with pytest.raises(DomainExit) as excinfo:
        geodesic_integrate(flat, start, 5.0, domain=box, on_exit="raise")
    assert excinfo.value.trajectory.exited


# # # # # # # # # # # # #
#  CURVE MATCHING       #
# # # # # # # # # # # # #


def test_reparameterized_curves_match(flat):
    slow = geodesic_integrate(flat, PhasePoint((0.0, 0.0), (1.0, 1.0)), 1.0)
    fast = geodesic_integrate(flat, PhasePoint((0.0, 0.0), (2.0, 2.0)), 0.5)

    assert unparameterized_match(slow, fast) < 1e-9


def test_different_curves_do_not_match(flat):
    first = geodesic_integrate(flat, PhasePoint((0.0, 0.0), (1.0, 0.0)), 1.0)
    second = geodesic_integrate(flat, PhasePoint((0.0, 0.0), (0.0, 1.0)), 1.0)

    assert unparameterized_match(first, second) > 0.5


def test_matching_needs_points():
    single = Trajectory(t=np.array([0.0]), states=np.zeros((1, 4)))

    with pytest.raises(EmptyTrajectory):
        unparameterized_match(single, single)


# # # # # # # # # # # # #
#  INTEGRALS            #
# # # # # # # # # # # # #


def test_hamiltonian_commutes_with_itself():
    g = round_sphere_metric()

    assert poisson_bracket_residual(g, hamiltonian(g), (0.3, 0.1), (0.4, -1.0)) == pytest.approx(0.0, abs=1e-14)


def test_angular_momentum_of_rotational_metric(angular_momentum_squared):
    g = rotational_metric()

    bracket = poisson_bracket_residual(g, angular_momentum_squared, (0.3, 0.5), (0.7, -0.2), relative=True)
    perturbed = poisson_bracket_residual(
        g, angular_momentum_squared.perturbed(0, 0.5), (0.3, 0.5), (0.7, -0.2), relative=True
    )

    assert abs(bracket) < 1e-12
    assert abs(perturbed) > 1e-3


def test_partner_integral_is_conserved(diagonal_case):
    start = PhasePoint((0.5, -0.4), (0.6, 0.8))
    trajectory = geodesic_integrate(diagonal_case.g, start, 0.5)

    result = conservation_check(diagonal_case.g, diagonal_case.partner, trajectory)
    momentum = conservation_check(diagonal_case.g, momentum_integrals(diagonal_case)["g_bar"], trajectory)

    assert result.drift < 1e-8
    assert momentum.values == pytest.approx(result.values, rel=1e-10)


def test_bracket_vanishes_exactly_for_conserved_quadratics(diagonal_case):
    g = diagonal_case.g
    H, F = hamiltonian(g), partner_integral(g, diagonal_case.partner)
    rng = np.random.default_rng(13)
    starts = sample_starts(diagonal_case.domain, 50, seed=4)

    for trial, start in enumerate(starts):
        s, t = rng.uniform(0.5, 2.0, size=2)
        Q = linear_combination([(s, F), (t, H)])
        if trial % 2:
            Q = Q.perturbed(int(rng.integers(3)), float(rng.uniform(0.2, 1.0)))
        trajectory = geodesic_integrate(g, start, 0.3, samples=21)

        bracket = max(
            abs(poisson_bracket_residual(g, Q, point.position, point.to_cotangent(g), relative=True))
            for point in trajectory.phase_points()
        )
        drift = conservation_check(g, Q, trajectory).drift
        assert (bracket < 1e-8) == (drift < 1e-6), (trial, bracket, drift)
        assert (bracket < 1e-8) == (trial % 2 == 0), (trial, bracket)


@pytest.mark.parametrize("Y", ["exp", "cube", "shifted_exp"])
def test_null_coordinate_integral_commutes_at_random_phase_points(Y):
    form = normal_form("jordan", Y=Y)
    points = sample_points(form.domain, 20, seed=8)
    momenta = np.random.default_rng(8).normal(size=(len(points), 2))

    brackets = [
        abs(poisson_bracket_residual(form.g, form.integral, point, p, relative=True)) for point, p in zip(points, momenta)
    ]
    perturbed = [
        abs(poisson_bracket_residual(form.g, form.integral.perturbed(1, 0.3), point, p, relative=True))
        for point, p in zip(points, momenta)
    ]

    assert max(brackets) < 1e-10
    assert max(perturbed) > 1e-3


def test_phase_point_cotangent_round_trip(diagonal_case):
    start = PhasePoint((0.5, -0.4), (0.6, 0.8))

    p = start.to_cotangent(diagonal_case.g)
    back = PhasePoint.from_cotangent(diagonal_case.g, start.position, p)

    assert back.xi == pytest.approx(start.xi)


def test_cotangent_point_is_integrated_from_its_velocity(diagonal_case):
    g = diagonal_case.g
    tangent = PhasePoint((0.5, -0.4), (0.6, 0.8))
    cotangent = PhasePoint.momentum(tangent.position, tangent.to_cotangent(g))

    assert cotangent.representation == "cotangent"
    assert cotangent.to_cotangent(g) == pytest.approx(tangent.to_cotangent(g))
    assert cotangent.to_tangent(g).xi == pytest.approx(tangent.xi)
    assert cotangent.energy(g) == pytest.approx(tangent.energy(g))
    with pytest.raises(ValueError):
        cotangent.state
    assert geodesic_integrate(g, cotangent, 0.2, samples=11).states == pytest.approx(
        geodesic_integrate(g, tangent, 0.2, samples=11).states
    )


def test_unknown_representation_is_refused():
    with pytest.raises(ValueError):
        PhasePoint((0.0, 0.0), (1.0, 0.0), "velocity")


def test_trajectory_frame_columns(diagonal_case):
    trajectory = geodesic_integrate(diagonal_case.g, PhasePoint((0.5, -0.4), (0.6, 0.8)), 0.2, samples=11)

    frame = trajectory_frame(diagonal_case.g, trajectory, catalog_integrals(diagonal_case))

    assert list(frame.columns) == ["t", "x", "y", "p1", "p2", "I_g", "I_g_bar"]
    assert len(frame) == 11
