"""
Obstructions and classifications: the eigenstructure of a metric pair, the Killing determinants
built from curvature invariants, the prolongation determinants of the metrizability system
with d/dx projective, the integral ODE of the Jordan family and the integral system in null
coordinates.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
import pandas as pd
import sympy as sp

from projlie.catalog import adapted_connection_1a
from projlie.dynamics import poisson_bracket_residual
from projlie.exceptions import DegenerateMetric, NotNullForm
from projlie.geometry import ProjectiveConnection, connection_of, curvature_invariants
from projlie.jets import Jet2, univariate_series

logger = logging.getLogger(__name__)

CLASSIFICATION_THRESHOLD = 1e-8
# Decisions closer than this factor to a threshold are reported as indeterminate.
CLASSIFICATION_MARGIN = 10.0
PROLONGATION_DEGREE = 4
NULL_FORM_TOLERANCE = 1e-12


# # # Pair classification # # #


@dataclass(frozen=True)
class PairClass:
    kind: str
    eigenvalues: np.ndarray
    margin: float
    indeterminate: bool = False


def classify_pair(g, gbar, point, threshold=CLASSIFICATION_THRESHOLD):
    """Eigenstructure of G^i_j = g^{i a} gbar_{a j}."""
    metric, partner = g.values(point), gbar.values(point)
    for name, values in ((g.name, metric), (gbar.name, partner)):
        if abs(np.linalg.det(values)) <= 1e-12 * np.max(np.abs(values)) ** 2:
            raise DegenerateMetric(f"{name} is degenerate at {tuple(point)}")
    G = np.linalg.solve(metric, partner)
    size = np.linalg.norm(G)
    eigenvalues = np.linalg.eigvals(G)
    disc = np.trace(G) ** 2 - 4 * np.linalg.det(G)
    disc_threshold = threshold * size**2
    if abs(disc) > CLASSIFICATION_MARGIN * disc_threshold:
        kind = "liouville" if disc > 0 else "complex_liouville"
        return PairClass(kind, eigenvalues, abs(disc) / disc_threshold)
    if abs(disc) < disc_threshold:
        nilpotent = np.linalg.norm(G - np.trace(G) / 2 * np.eye(2))
        nil_threshold = threshold * size
        if nilpotent > CLASSIFICATION_MARGIN * nil_threshold:
            return PairClass("jordan_block", eigenvalues, nilpotent / nil_threshold)
        if nilpotent < nil_threshold:
            return PairClass("proportional", eigenvalues, nil_threshold / max(nilpotent, 1e-300))
    logger.warning("Indeterminate classification of (%s, %s) at %s: disc = %.3e", g.name, gbar.name, point, disc)
    return PairClass("indeterminate", eigenvalues, abs(disc) / disc_threshold, indeterminate=True)


# # # Killing obstruction # # #


def _unit(vector):
    norm = np.linalg.norm(vector)
    return vector / norm if norm > 0 else vector


def killing_obstruction(g, point, normalized=True):
    """(det[dR; dL], det[dR; dLaplacian R]); both vanish wherever g admits a Killing field."""
    invariants = curvature_invariants(g, point)
    dR, dL, dD = invariants.dR, invariants.dL, invariants.dlaplacian
    if normalized:
        dR, dL, dD = _unit(dR), _unit(dL), _unit(dD)
    return float(np.linalg.det(np.array([dR, dL]))), float(np.linalg.det(np.array([dR, dD])))


# # # Prolongation with d/dx projective # # #


@dataclass(frozen=True)
class ProlongationRows:
    """Rows m_k of the linear relations m_k . (a11, a12, a22) = b_k at one point."""

    m: np.ndarray
    mu: float
    det: float
    b: np.ndarray = None
    det_b: float = None


def connection_in_y(coefficients, y, degree=PROLONGATION_DEGREE, x=0.0):
    """A connection given by y -> (K0..K3), expanded as jets in y at (x, y)."""
    yj = Jet2.variable((x, y), degree, axis=1)
    return ProjectiveConnection(*(k + 0.0 * yj for k in coefficients(yj)))


def adapted_connection(entry, y, degree=PROLONGATION_DEGREE, x=0.0):
    """The connection of an adapted case computed from its metric; its coefficients do not depend on x."""
    return connection_of(entry.g, (x, y), degree + 1)


def _derivative_matrix(coefficients, mu):
    """J with (a11, a12, a22)' = J (a11, a12, a22) from the last three metrizability equations."""
    K0, K1, K2, K3 = coefficients
    zero = 0 * K0
    return [
        [4 * K2 / 3, -2 * mu - 2 * K1 / 3, -2 * K0],
        [K3, K2 / 3, -mu / 2 - 2 * K1 / 3],
        [zero, 2 * K3, -2 * K2 / 3],
    ]


def _prolong(row, J):
    d = row[0].degree - 1
    lowered = [e.truncate(d) for e in row]
    return [row[j].diff(1) + sum(lowered[i] * J[i][j].truncate(d) for i in range(3)) for j in range(3)]


def _values(row):
    return [float(np.real(e.value)) for e in row]


def prolongation_rows_homogeneous(K, mu):
    """
    Rows of the homogeneous branch L_v a = mu a. The first row is the first metrizability
    equation, each next row is the y-derivative of the previous one with a' substituted.
    """
    if K.K0.degree < 2:
        raise ValueError("Prolongation needs connection jets of degree >= 2")
    K0, K1 = K.K0, K.K1
    row = [mu - 2 / 3 * K1, 2 * K0, 0.0 * K0]
    J = _derivative_matrix(K.coefficients(), mu)
    rows = [row]
    for _ in range(2):
        rows.append(_prolong(rows[-1], J))
    m = np.array([_values(r) for r in rows])
    return ProlongationRows(m=m, mu=mu, det=float(np.linalg.det(m)))


def homogeneous_determinant_closed_form(K, mu):
    """The determinant of the homogeneous branch as a polynomial in K_i, their y-derivatives and mu."""
    A, B, C, D = (float(np.real(k.value)) for k in K.coefficients())
    Ap, App = K.K0.derivative(0, 1).real, K.K0.derivative(0, 2).real
    Bp, Bpp = K.K1.derivative(0, 1).real, K.K1.derivative(0, 2).real
    Cp, Dp = K.K2.derivative(0, 1).real, K.K3.derivative(0, 1).real
    m = mu
    terms = [
        -2 * m**6,
        14 / 3 * m**3 * B * A * C,
        10 * Ap * m**2 * A * C,
        -32 / 9 * Ap * B**2 * A * C,
        -40 / 27 * m * B**3 * A * C,
        64 / 729 * B**6,
        6 * m**2 * A * App,
        -10 * m**4 * A * C,
        -16 / 3 * m**2 * B**2 * Ap,
        -14 / 3 * m**3 * B * Ap,
        -64 / 81 * B**4 * A * C,
        64 / 27 * B**3 * A**2 * D,
        -64 / 81 * B**3 * A * Bp,
        16 / 9 * A**2 * C**2 * B**2,
        8 / 3 * m * B * Ap**2,
        40 / 27 * m * B**3 * Ap,
        8 / 3 * m * B**2 * A**2 * D,
        -32 / 9 * m * B**2 * A * Bp,
        20 / 3 * m * A**2 * C * Bp,
        -8 * m * A**3 * C * D,
        16 / 3 * m**2 * B**2 * A * C,
        4 * m**2 * B * A * Bp,
        -32 / 3 * Bp * A**3 * D,
        -8 * m**2 * C**2 * A**2,
        -12 * A**3 * m * Dp,
        -4 * B * m * A * App,
        32 / 3 * B * Ap * A**2 * D,
        -32 / 9 * B * Ap * A * Bp,
        -4 / 3 * m * Ap * B * A * C,
        -32 / 3 * B * A**3 * C * D,
        4 * B * m * A**2 * Cp,
        4 * A**2 * m * Bpp,
        8 / 3 * m * A**2 * C**2 * B,
        -16 * m * Ap * A**2 * D,
        -8 / 3 * m * Ap * A * Bp,
        32 / 9 * B * A**2 * C * Bp,
        16 / 81 * m * B**5,
        64 / 81 * B**4 * Ap,
        -8 / 9 * m**2 * B**4,
        10 / 3 * m**4 * B**2,
        10 * Ap * m**4,
        -28 / 27 * m**3 * B**3,
        -8 * m**2 * Ap**2,
        16 / 9 * A**2 * Bp**2,
        16 * A**4 * D**2,
        16 / 9 * B**2 * Ap**2,
        # every term has weight 6 (mu, K_i: 1, each derivative: +1), which fixes the power of K0 here
        -14 * m**3 * A**2 * D,
        -6 * m**2 * A**2 * Cp,
        14 / 3 * m**3 * A * Bp,
    ]
    return float(sum(terms))


def homogeneous_sweep(connection, mus, ys, expected_zeros=()):
    """
    The homogeneous determinant on a (mu, y) grid; connection maps y to a ProjectiveConnection
    of y-jets. Rows for mu among expected_zeros are flagged as positive controls.
    """
    records = []
    for mu in mus:
        control = any(abs(mu - zero) <= 1e-9 * max(1.0, abs(zero)) for zero in expected_zeros)
        for y in ys:
            K = connection(y)
            rows = prolongation_rows_homogeneous(K, mu)
            scale = float(np.prod(np.linalg.norm(rows.m, axis=1)))
            records.append(
                {
                    "mu": mu,
                    "y": y,
                    "det": rows.det,
                    "relative_det": abs(rows.det) / max(scale, 1e-300),
                    "expected_zero": control,
                }
            )
    return pd.DataFrame.from_records(records, columns=["mu", "y", "det", "relative_det", "expected_zero"])


# # # Inhomogeneous branch of case 1a # # #

# digits carried when evaluating the branch; the substituted determinant cancels about 20 digits per unit of y
INHOMOGENEOUS_DIGITS = 40
_Y = sp.Symbol("y", positive=True)


def _exact(value):
    return sp.Rational(float(value))


def inhomogeneous_rhs_1a(c):
    """
    (b1, s) as expressions in y with m1 . a = b1 and a' = J a + s, for case 1a in adapted
    coordinates. Both are read off the metrizability residual of the partial solution P.
    """
    c = _exact(c)
    weight = _Y ** sp.Rational(2, 3) / (4 * sp.real_root(c, 3) ** 2)
    up, down = sp.exp(3 * _Y), c * sp.exp(-3 * _Y)
    return weight * (up - down), (-2 * weight * (up + down), weight * (up - down) / 2, sp.Integer(0))


def clearing_factors_1a(c):
    """Multipliers of the second and third relations of case 1a that clear their denominators."""
    c = _exact(c)
    return (
        96 * sp.real_root(c, 3) ** 8 * _Y ** sp.Rational(7, 3) * sp.exp(12 * _Y),
        8 * c * _Y ** sp.Rational(2, 3),
    )


def substituted_determinant_closed_form(c, y):
    """The substituted determinant of the inhomogeneous branch of case 1a."""
    e = np.exp
    numerator = (
        18 * e(-9 * y) * c**4 * y
        - 18 * c**2 * e(3 * y) * y
        + 32 * c**3 * e(-3 * y)
        + 32 * c**2 * e(3 * y)
        - 18 * e(9 * y) * y * c
        + 9 * e(-9 * y) * c**4
        + 18 * c**3 * e(-3 * y) * y
        - c**5 * e(-15 * y)
        + 9 * e(9 * y) * c
        - e(15 * y)
    )
    return float(9 * numerator / (64 * np.cbrt(c) ** 8 * np.cbrt(y) ** 7))


@dataclass(frozen=True)
class InhomogeneousSystem:
    """The relations m_k . (a11, a12, a22) = b_k as sympy expressions in y."""

    m: sp.Matrix
    b: list
    det: sp.Expr
    det_b: sp.Expr


def _prolong_symbolic(row, b, J, s):
    prolonged = [sp.diff(row[j], _Y) + sum(row[i] * J[i][j] for i in range(3)) for j in range(3)]
    return prolonged, sp.diff(b, _Y) - sum(row[i] * s[i] for i in range(3))


def prolongation_rows_inhomogeneous(coefficients, rhs, mu=1, factors=(1, 1)):
    """
    Relations of the branch L_v a = mu a + a_bar, with K0..K3 and rhs = (b1, s) given as
    expressions in y. Each next relation is the y-derivative of the previous one with a'
    substituted, multiplied by the matching entry of factors.
    """
    K0, K1 = coefficients[0], coefficients[1]
    J = _derivative_matrix(coefficients, mu)
    b1, s = rhs
    rows, bs = [[mu - 2 * K1 / 3, 2 * K0, sp.Integer(0)]], [b1]
    for factor in factors:
        row, b = _prolong_symbolic(rows[-1], bs[-1], J, s)
        rows.append([factor * e for e in row])
        bs.append(factor * b)
    m = sp.Matrix(rows)
    substituted = m.copy()
    substituted[:, 0] = sp.Matrix(bs)
    return InhomogeneousSystem(m, bs, m.det(method="berkowitz"), substituted.det(method="berkowitz"))


@lru_cache(maxsize=16)
def _inhomogeneous_evaluator_1a(c):
    system = prolongation_rows_inhomogeneous(
        adapted_connection_1a(_exact(c), exponential=sp.exp)(_Y),
        inhomogeneous_rhs_1a(c),
        mu=sp.Integer(1),
        factors=clearing_factors_1a(c),
    )
    return sp.lambdify(_Y, [list(system.m), system.b, system.det, system.det_b], "mpmath")


def inhomogeneous_branch_1a(c, y):
    """
    The branch L_v a = a + a_bar of case 1a at y. Rows are evaluated in extended precision, so
    det stays at rounding level and det_b keeps its sign and leading digits.
    """
    evaluate = _inhomogeneous_evaluator_1a(float(c))
    with mpmath.workdps(INHOMOGENEOUS_DIGITS + int(20 * abs(float(y)))):
        entries, b, det, det_b = evaluate(mpmath.mpf(float(y)))
        m = np.array([float(e) for e in entries]).reshape(3, 3)
        return ProlongationRows(
            m=m, mu=1.0, det=float(det), b=np.array([float(v) for v in b]), det_b=float(det_b)
        )


# # # Integral ODE of the Jordan family # # #


def _profile_derivatives(Y, y):
    series = univariate_series(Y, float(y), 2)
    return float(np.real(series[0])), float(np.real(series[1])), 2 * float(np.real(series[2]))


def jordan_integral_ode_residual(Y, y, alpha1, alpha2, beta0, beta1):
    """6 Y alpha2 - 3 alpha1 + (3 beta1 + 24 alpha2 y) Y' + (2 beta0 + 2 beta1 y + 8 alpha2 y^2) Y''."""
    value, first, second = _profile_derivatives(Y, y)
    return (
        6 * value * alpha2
        - 3 * alpha1
        + (3 * beta1 + 24 * alpha2 * y) * first
        + (2 * beta0 + 2 * beta1 * y + 8 * alpha2 * y * y) * second
    )


def integral_ode_matrix(Y, ys):
    """Rows phi(y) with residual = phi(y) . (alpha1, alpha2, beta0, beta1)."""
    rows = []
    for y in ys:
        value, first, second = _profile_derivatives(Y, y)
        rows.append([-3.0, 6 * value + 24 * y * first + 8 * y * y * second, 2 * second, 3 * first + 2 * y * second])
    return np.array(rows)


@dataclass(frozen=True)
class IntegralWitness:
    smallest_singular: float
    direction: np.ndarray
    admits_extra_integral: bool


def integral_dimension_witness(Y, ys, tolerance=1e-10):
    """
    sigma_min / sqrt(n) of the integral ODE rows bounds max |residual| over unit coefficient directions
    from below; a vanishing value comes with the admissible direction.
    """
    matrix = integral_ode_matrix(Y, ys)
    _, singular, vt = np.linalg.svd(matrix)
    smallest = float(singular[-1] / np.sqrt(len(ys)))
    direction = vt[-1] / vt[-1][np.argmax(np.abs(vt[-1]))]
    return IntegralWitness(smallest, direction, smallest < tolerance)


# # # Integrals in null coordinates # # #


@dataclass(frozen=True)
class NullFormCheck:
    a_y: float
    c_x: float
    system: np.ndarray
    bf_gradient: np.ndarray
    bracket: float


def lin_system_residuals(f, coefficients):
    """The four equations of {H, F} = 0 for g = f dx dy and F = a p_x^2 + b p_x p_y + c p_y^2."""
    a, b, c = coefficients
    fx, fy = f.diff(0), f.diff(1)
    d = fx.degree
    f0, a0, b0, c0 = (e.truncate(d) for e in (f, a, b, c))
    equations = [
        a.diff(1),
        f0 * a.diff(0) + f0 * b.diff(1) + 2 * fx * a0 + fy * b0,
        f0 * b.diff(0) + f0 * c.diff(1) + fx * b0 + 2 * fy * c0,
        c.diff(0),
    ]
    return np.array([float(np.real(e.value)) for e in equations])


def birkhoff_form_check(g_null, F, point, degree=2):
    """
    Integral system of F for a metric in null coordinates. When a and c vanish identically
    near the point, b f must be constant and its gradient is reported.
    """
    g = g_null.jets(point, degree)
    scale = max(abs(float(np.real(g.xy.value))), 1e-300)
    if abs(float(np.real(g.xx.value))) > NULL_FORM_TOLERANCE * scale or abs(float(np.real(g.yy.value))) > NULL_FORM_TOLERANCE * scale:
        raise NotNullForm(f"{g_null.name} has dx^2 or dy^2 components at {tuple(point)}")
    coefficients = F.jets(point, degree)
    system = lin_system_residuals(g.xy, coefficients)
    a, b, c = coefficients
    bf_gradient = None
    if a.magnitude() <= NULL_FORM_TOLERANCE and c.magnitude() <= NULL_FORM_TOLERANCE:
        bf_gradient = np.real((b * g.xy).truncate(1).gradient).astype(float)
    bracket = max(
        abs(poisson_bracket_residual(g_null, F, point, momentum, relative=True))
        for momentum in ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -2.0))
    )
    return NullFormCheck(system[0], system[3], system, bf_gradient, bracket)
