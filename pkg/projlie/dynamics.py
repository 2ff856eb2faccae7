"""
Geodesic flow of a catalog metric: integration, unparameterized curve matching, quadratic
integrals in momenta and their Poisson brackets with the Hamiltonian.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from projlie.exceptions import (
    DegenerateMetric,
    DomainError,
    DomainExit,
    EmptyTrajectory,
    JetError,
    QuadratureNonconvergence,
    StepUnderflow,
)
from projlie.geometry import MomentumQuadratic, SymmetricJet, christoffel
from projlie.metrizability import integral_from_partner, partner_integral

logger = logging.getLogger(__name__)

RTOL = 1e-10
ATOL = 1e-10
TRAJECTORY_SAMPLES = 401
MATCH_SAMPLES = 2001
NULL_THRESHOLD = 1e-8
DRIFT_FLOOR = 1e-12
REPRESENTATIONS = ("tangent", "cotangent")

# Failures of a metric formula met by the integrator outside the validity domain.
_EVALUATION_ERRORS = (DomainError, DegenerateMetric, QuadratureNonconvergence, JetError, ZeroDivisionError)


@dataclass(frozen=True)
class PhasePoint:
    """
    A point (x, y; xi) of the tangent or cotangent bundle. With representation "tangent" xi is
    a velocity, with "cotangent" a momentum p = g xi; the metric converts between the two.
    """

    position: tuple
    xi: tuple
    representation: str = "tangent"

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"Unknown representation {self.representation!r}; expected one of {REPRESENTATIONS}")

    @property
    def state(self):
        """(x, y, xi) for the geodesic equation; defined for tangent points only."""
        if self.representation != "tangent":
            raise ValueError("A cotangent point has no velocity state; convert it with to_tangent(g)")
        return np.array([*self.position, *self.xi], dtype=float)

    def to_cotangent(self, g):
        """The momentum p = g xi at the position."""
        if self.representation == "cotangent":
            return np.asarray(self.xi, dtype=float)
        return g.values(self.position) @ np.asarray(self.xi, dtype=float)

    def to_tangent(self, g):
        if self.representation == "tangent":
            return self
        xi = np.linalg.solve(g.values(self.position), np.asarray(self.xi, dtype=float))
        return PhasePoint(self.position, tuple(float(c) for c in xi))

    @classmethod
    def from_cotangent(cls, g, position, momentum):
        return cls.momentum(position, momentum).to_tangent(g)

    @classmethod
    def momentum(cls, position, momentum):
        return cls(tuple(float(c) for c in position), tuple(float(c) for c in momentum), "cotangent")

    @classmethod
    def from_angle(cls, position, angle, speed=1.0):
        return cls(tuple(float(c) for c in position), (speed * np.cos(angle), speed * np.sin(angle)))

    def energy(self, g):
        xi = np.asarray(self.to_tangent(g).xi, dtype=float)
        return float(xi @ g.values(self.position) @ xi)


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    states: np.ndarray
    exited: bool = False
    exit_reason: str = None
    energy_drift: float = 0.0
    metric_name: str = field(default="g", compare=False)

    def __len__(self):
        return len(self.t)

    @property
    def positions(self):
        return self.states[:, :2]

    @property
    def velocities(self):
        return self.states[:, 2:]

    def phase_points(self):
        return [PhasePoint(tuple(s[:2]), tuple(s[2:])) for s in self.states]


# # # Integration # # #


def geodesic_rhs(g):
    """d/dt (x, xi) = (xi, -Gamma(xi, xi)), with Christoffel symbols from degree-1 jets."""

    def rhs(t, state):
        gamma = christoffel(g, state[:2], degree=1)
        xi = state[2:]
        acceleration = [
            -sum(float(np.real(gamma[i][j][k].value)) * xi[j] * xi[k] for j in range(2) for k in range(2))
            for i in range(2)
        ]
        return np.array([xi[0], xi[1], *acceleration])

    return rhs


def _energy(g, state):
    xi = state[2:]
    return float(xi @ g.values(state[:2]) @ xi)


def _relative_drift(values, floor=DRIFT_FLOOR):
    values = np.asarray(values, dtype=float)
    return float(np.max(np.abs(values - values[0])) / max(abs(values[0]), floor))


def geodesic_integrate(g, start, t_end, domain=None, samples=TRAJECTORY_SAMPLES, on_exit="clip", rtol=RTOL, atol=ATOL):
    """
    Integrate the geodesic of g from the PhasePoint start over [0, t_end] (t_end may be negative).
    Leaving the domain stops the integration: on_exit="clip" returns the partial trajectory
    flagged as exited, on_exit="raise" raises DomainExit carrying it.
    """
    domain = domain if domain is not None else g.domain
    if domain is not None and not domain.contains(*start.position):
        raise DomainError(f"Start {start.position} violates the domain predicate: {domain.description}")
    start = start.to_tangent(g)

    events = None
    if domain is not None:

        def leaves_domain(t, state):
            return domain.signed_margin(state[0], state[1])

        leaves_domain.terminal = True
        leaves_domain.direction = -1
        events = [leaves_domain]

    t_eval = np.linspace(0.0, t_end, samples)
    try:
        solution = solve_ivp(
            geodesic_rhs(g),
            (0.0, t_end),
            start.state,
            method="DOP853",
            t_eval=t_eval,
            events=events,
            rtol=rtol,
            atol=atol,
        )
    except _EVALUATION_ERRORS as exc:
        raise DomainExit(f"Geodesic of {g.name} left the region where the metric is defined: {exc}") from exc

    if solution.status == -1:
        raise StepUnderflow(f"Integration of {g.name} from {start.position} failed: {solution.message}")

    t, states = solution.t, solution.y.T
    exited = solution.status == 1
    if exited and solution.t_events[0].size:
        t = np.append(t, solution.t_events[0][0])
        states = np.vstack([states, solution.y_events[0][0]])
    if len(t) == 0:
        raise EmptyTrajectory(f"Integration of {g.name} produced no points")

    energies = [_energy(g, s) for s in states]
    scale = max(abs(energies[0]), NULL_THRESHOLD)
    trajectory = Trajectory(
        t=np.asarray(t),
        states=np.asarray(states),
        exited=exited,
        exit_reason=f"left domain: {domain.description}" if exited else None,
        energy_drift=float(np.max(np.abs(np.array(energies) - energies[0])) / scale),
        metric_name=g.name,
    )
    logger.debug(
        "Geodesic of %s from %s: %d points, exited=%s, energy drift %.2e",
        g.name,
        start.position,
        len(trajectory),
        exited,
        trajectory.energy_drift,
    )
    if exited:
        if on_exit == "raise":
            raise DomainExit(f"Geodesic of {g.name} left the domain at t = {t[-1]:.6g}", trajectory)
        logger.warning("Geodesic of %s clipped at t = %.6g (%s)", g.name, t[-1], trajectory.exit_reason)
    return trajectory


def reverse(g, trajectory, domain=None, samples=TRAJECTORY_SAMPLES):
    """Integrate back from the end point with reversed velocity over the same time span."""
    end = trajectory.states[-1]
    start = PhasePoint(tuple(end[:2]), tuple(-end[2:]))
    return geodesic_integrate(g, start, trajectory.t[-1] - trajectory.t[0], domain=domain, samples=samples)


# # # Unparameterized matching # # #


def _arc_length_resample(positions, length, samples):
    steps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(steps)])
    keep = np.concatenate([[True], steps > 0])
    s, positions = s[keep], positions[keep]
    if len(s) < 2:
        raise EmptyTrajectory("Trajectory does not move")
    spline = CubicSpline(s, positions, axis=0)
    return spline(np.linspace(0.0, min(length, s[-1]), samples))


def _arc_length(positions):
    return float(np.sum(np.linalg.norm(np.diff(positions, axis=0), axis=1)))


def _point_to_polyline(points, polyline, chunk=256):
    a, b = polyline[:-1], polyline[1:]
    segment = b - a
    squared = np.maximum(np.einsum("ij,ij->i", segment, segment), 1e-300)
    distances = np.empty(len(points))
    for start in range(0, len(points), chunk):
        p = points[start : start + chunk, None, :]
        along = np.clip(np.einsum("pij,ij->pi", p - a[None], segment) / squared, 0.0, 1.0)
        nearest = a[None] + along[..., None] * segment[None]
        distances[start : start + chunk] = np.min(np.linalg.norm(p - nearest, axis=2), axis=1)
    return distances


def unparameterized_match(first, second, samples=MATCH_SAMPLES):
    """
    Maximal distance between two trajectories as unparameterized curves, over their common
    arc length in coordinate space.
    """
    for trajectory in (first, second):
        if len(trajectory) < 2:
            raise EmptyTrajectory("Curve matching needs at least two points per trajectory")
    length = min(_arc_length(first.positions), _arc_length(second.positions))
    if length <= 0:
        raise EmptyTrajectory("Curve matching needs trajectories of positive length")
    a = _arc_length_resample(first.positions, length, samples)
    b = _arc_length_resample(second.positions, length, samples)
    return float(max(np.max(_point_to_polyline(a, b)), np.max(_point_to_polyline(b, a))))


# # # Quadratic integrals # # #


def hamiltonian(g):
    """H = 1/2 g^{ij} p_i p_j."""

    def components(x, y):
        inverse = SymmetricJet(*g.components(x, y)).inverse()
        return 0.5 * inverse.xx, inverse.xy, 0.5 * inverse.yy

    return MomentumQuadratic(components, name=f"H[{g.name}]")


def _quadratic_parts(Q, point, momentum):
    a, b, c = Q.jets(point, degree=1)
    px, py = momentum
    dq = np.real((a * px * px + b * px * py + c * py * py).gradient).astype(float)
    a0, b0, c0 = (float(np.real(e.value)) for e in (a, b, c))
    dp = np.array([2 * a0 * px + b0 * py, b0 * px + 2 * c0 * py])
    return dq, dp


def poisson_bracket_residual(g, F, point, momentum, relative=False):
    """{H, F} = sum_i dH/dp_i dF/dx_i - dH/dx_i dF/dp_i, the derivative of F along the geodesic flow."""
    dH_dq, dH_dp = _quadratic_parts(hamiltonian(g), point, momentum)
    dF_dq, dF_dp = _quadratic_parts(F, point, momentum)
    terms = np.concatenate([dH_dp * dF_dq, -dH_dq * dF_dp])
    bracket = float(np.sum(terms))
    if relative:
        return bracket / max(float(np.sum(np.abs(terms))), 1e-300)
    return bracket


@dataclass(frozen=True)
class ConservationResult:
    values: np.ndarray
    drift: float
    null_start: bool


def integral_values(g, integral, trajectory):
    """Values of an integral along a trajectory; integral is a partner metric or a MomentumQuadratic."""
    values = []
    for state in trajectory.states:
        point, xi = state[:2], state[2:]
        if isinstance(integral, MomentumQuadratic):
            values.append(integral.evaluate(point, g.values(point) @ xi))
        else:
            values.append(integral_from_partner(g, integral, point, xi))
    return np.asarray(values)


def conservation_check(g, integral, trajectory):
    """
    max |I(t) - I(0)| / max(|I(0)|, 1e-12) along the trajectory. Starts where I(0) is below the
    null threshold are flagged and measured with absolute drift.
    """
    values = integral_values(g, integral, trajectory)
    null_start = abs(values[0]) < NULL_THRESHOLD
    if null_start:
        drift = float(np.max(np.abs(values - values[0])))
    else:
        drift = _relative_drift(values)
    return ConservationResult(values, drift, null_start)


def trajectory_frame(g, trajectory, integrals=None):
    """Trajectory as a DataFrame with columns t, x, y, p1, p2 and one I_<name> column per integral."""
    momenta = np.array([g.values(s[:2]) @ s[2:] for s in trajectory.states])
    frame = pd.DataFrame(
        {
            "t": trajectory.t,
            "x": trajectory.positions[:, 0],
            "y": trajectory.positions[:, 1],
            "p1": momenta[:, 0],
            "p2": momenta[:, 1],
        }
    )
    for name, integral in (integrals or {}).items():
        frame[f"I_{name}"] = integral_values(g, integral, trajectory)
    return frame


def catalog_integrals(entry):
    """Integral columns of a catalog case: the energy and one integral per partner metric."""
    integrals = {entry.g.name: entry.g, entry.partner.name: entry.partner}
    if entry.tilde is not None:
        integrals[entry.tilde.name] = entry.tilde
    return integrals


def momentum_integrals(entry):
    return {partner.name: partner_integral(entry.g, partner) for partner in entry.solution_basis()[1:]}

