"""
The solution space of the metrizability system.

A metric g is encoded by the weighted tensor a = g / det(g)^{2/3}. Throughout, det^{1/3} is the
real cube root, so a = g / cbrt(det g)^2 and g = a / det(a)^2 holds for every signature.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from projlie.exceptions import DegenerateSolution, IllConditionedFit, UndefinedCombination
from projlie.geometry import (
    MetricField,
    MomentumQuadratic,
    SymmetricJet,
    connection_of,
    lie_derivative_tensor,
)
from projlie.jets import DEFAULT_DEGREE, Jet2, cbrt

logger = logging.getLogger(__name__)

MAX_GRAM_CONDITION = 1e10
MIN_FIT_POINTS = 6


@dataclass(frozen=True)
class WeightedTensor(SymmetricJet):
    """a = det(g)^{-2/3} g, a section of S^2 D (x) (Lambda_2 D)^{-4/3}."""


def _value(e):
    return e.value if isinstance(e, Jet2) else e


# # # The a-map # # #


def weighted_from_components(g):
    det = g.check_nondegenerate()
    root = cbrt(det)
    weight = root * root
    return WeightedTensor(*(e / weight for e in g.entries()))


def a_from_metric(g, point, degree=DEFAULT_DEGREE):
    return weighted_from_components(g.jets(point, degree))


def metric_from_a(a, error=DegenerateSolution):
    det = a.check_nondegenerate(error=error)
    square = det * det
    return SymmetricJet(*(e / square for e in a.entries()))


def weighted_transport(a, A):
    """Values of a in the coordinates u with x = A u: |det A|^{-4/3} A^T a A."""
    A = np.asarray(A, dtype=float)
    return abs(np.linalg.det(A)) ** (-4.0 / 3.0) * A.T @ np.asarray(a, dtype=float) @ A


# # # The linear system # # #


def _system_terms(K, a):
    K0, K1, K2, K3 = K.values()
    a11, a12, a22 = (_value(e) for e in a.entries())
    dx = a.diff(0)
    dy = a.diff(1)
    return [
        [dx.xx.value, -2 / 3 * K1 * a11, 2 * K0 * a12],
        [dy.xx.value, 2 * dx.xy.value, -4 / 3 * K2 * a11, 2 / 3 * K1 * a12, 2 * K0 * a22],
        [2 * dy.xy.value, dx.yy.value, -2 * K3 * a11, -2 / 3 * K2 * a12, 4 / 3 * K1 * a22],
        [dy.yy.value, -2 * K3 * a12, 2 / 3 * K2 * a22],
    ]


def metrizability_residual(K, a, normalized=False):
    """
    The four left-hand sides of the metrizability system at the jets' center.
    With normalized=True each residual is divided by max(1, sum of its term magnitudes).
    """
    terms = _system_terms(K, a)
    residual = np.array([sum(t) for t in terms], dtype=float)
    if normalized:
        residual = residual / np.maximum(1.0, metrizability_scale(K, a, terms))
    return residual


def metrizability_scale(K, a, terms=None):
    terms = _system_terms(K, a) if terms is None else terms
    return np.array([sum(abs(v) for v in t) for t in terms], dtype=float)


# # # Lie derivatives # # #


def lie_derivative_a(g, v, point, degree=DEFAULT_DEGREE):
    """L_v a = det(g)^{-2/3} (L_v g - 2/3 trace_g(L_v g) g)."""
    jets = g.jets(point, degree)
    lg = lie_derivative_tensor(jets, v.jets(point, degree))
    g0 = jets.truncate(degree - 1)
    ginv = g0.inverse()
    trace = sum(lg.entry(i, j) * ginv.entry(i, j) for i in range(2) for j in range(2))
    root = cbrt(g0.det())
    weight = root * root
    return WeightedTensor(
        *((lg.entry(i, j) - 2 / 3 * trace * g0.entry(i, j)) / weight for i, j in ((0, 0), (0, 1), (1, 1)))
    )


def lie_derivative_weighted(a, v):
    """Density rule for weight -4/3; a and v are jets of degree D, the result has degree D - 1."""
    return WeightedTensor(*lie_derivative_tensor(a, v, density_weight=-4.0 / 3.0).entries())


# # # Combinations # # #


def combine_metrics(inputs, point, degree=DEFAULT_DEGREE):
    if not inputs:
        raise UndefinedCombination("At least one metric is needed")
    total = None
    for g, weight in inputs:
        term = a_from_metric(g, point, degree).scale(weight)
        total = term if total is None else total + term
    return metric_from_a(total, error=UndefinedCombination)


def combination_field(inputs, name="g_hat"):
    """The combined metric as a field, so it can be differentiated like any catalog metric."""
    inputs = list(inputs)
    if not inputs:
        raise UndefinedCombination("At least one metric is needed")

    def components(x, y):
        total = None
        for g, weight in inputs:
            term = weighted_from_components(SymmetricJet(*g.components(x, y))).scale(weight)
            total = term if total is None else total + term
        return metric_from_a(total, error=UndefinedCombination).entries()

    first = inputs[0][0]
    return MetricField(components, signature=first.signature, domain=first.domain, name=name)


# # # Integrals # # #


def quadratic_integral(g, a, point, xi):
    """I(xi) = det(g)^{2/3} a(xi, xi)."""
    root = np.cbrt(np.linalg.det(g.values(point)))
    a_values = a.matrix() if isinstance(a, SymmetricJet) else np.asarray(a, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return float(root * root * xi @ a_values @ xi)


def integral_from_partner(g, gbar, point, xi):
    """I(xi) = gbar(xi, xi) (det g / det gbar)^{2/3}."""
    ratio = np.cbrt(np.linalg.det(g.values(point))) / np.cbrt(np.linalg.det(gbar.values(point)))
    xi = np.asarray(xi, dtype=float)
    return float(ratio * ratio * xi @ gbar.values(point) @ xi)


def partner_integral(g, gbar, name=None):
    """The same integral written in momenta: F = (det g / det gbar)^{2/3} g^{-1} gbar g^{-1}."""

    def components(x, y):
        metric = SymmetricJet(*g.components(x, y))
        partner = SymmetricJet(*gbar.components(x, y))
        ratio = cbrt(metric.det()) / cbrt(partner.det())
        inverse = metric.inverse()
        product = [
            [sum(inverse.entry(i, k) * partner.entry(k, m) * inverse.entry(m, j) for k in range(2) for m in range(2)) for j in range(2)]
            for i in range(2)
        ]
        weight = ratio * ratio
        return weight * product[0][0], 2 * weight * product[0][1], weight * product[1][1]

    return MomentumQuadratic(components, name=name or f"I[{gbar.name}]")


# # # Eigenstructure of L_v # # #


@dataclass(frozen=True)
class EigenMatrix:
    """Normal form of const * L_v on a two-dimensional invariant subspace."""

    kind: str
    lam: float = None
    scale: float = 1.0
    swapped: bool = False
    entries: np.ndarray = field(default=None, compare=False)


def canonicalize(M, tolerance=1e-7):
    M = np.asarray(M, dtype=float)[:2, :2]
    size = max(np.linalg.norm(M), 1e-300)
    trace, det = np.trace(M), np.linalg.det(M)
    disc = trace**2 - 4 * det
    if abs(disc) <= tolerance * size**2:
        mu = trace / 2
        nilpotent = np.linalg.norm(M - mu * np.eye(2))
        if nilpotent > tolerance * size and abs(mu) > tolerance * size:
            return EigenMatrix("jordan_one", None, mu, False, np.array([[1.0, 1.0], [0.0, 1.0]]))
        return EigenMatrix("scalar", None, mu, False, np.eye(2))
    if disc < 0:
        alpha, beta = trace / 2, np.sqrt(-disc) / 2
        lam = alpha / beta
        return EigenMatrix("rotation", lam, beta, False, np.array([[lam, -1.0], [1.0, lam]]))
    e1, e2 = sorted(np.real(np.linalg.eigvals(M)), key=abs)
    if abs(e1) <= tolerance * size:
        return EigenMatrix("degenerate", None, 0.0, False, np.diag([e2, 0.0]))
    lam = e2 / e1
    swapped = abs(M[0, 0]) < abs(M[1, 1])
    return EigenMatrix("diagonal", lam, e1, swapped, np.diag([lam, 1.0]))


@dataclass(frozen=True)
class LvFit:
    matrix: np.ndarray
    residual: float
    condition: float
    basis_residual: float
    canonical: EigenMatrix
    eigenvalues: np.ndarray


def _solution_jets(element, point, degree):
    if isinstance(element, MetricField):
        return a_from_metric(element, point, degree)
    return element(point, degree)


def fit_lv_matrix(basis, v, points, connection_metric=None, degree=2):
    """
    Least-squares matrix M with L_v a_i = sum_j M_ij a_j over the sample points.
    Basis elements are metrics (a = a_from_metric) or callables (point, degree) -> WeightedTensor.
    """
    if len(points) < MIN_FIT_POINTS:
        raise IllConditionedFit(f"At least {MIN_FIT_POINTS} sample points are needed, got {len(points)}")
    reference = connection_metric or next((b for b in basis if isinstance(b, MetricField)), None)
    columns = [[] for _ in basis]
    images = [[] for _ in basis]
    basis_residual = 0.0
    for point in points:
        K = connection_of(reference, point, degree) if reference is not None else None
        v_jets = v.jets(point, degree)
        for i, element in enumerate(basis):
            a = _solution_jets(element, point, degree)
            if K is not None:
                basis_residual = max(
                    basis_residual, float(np.max(np.abs(metrizability_residual(K, a, normalized=True))))
                )
            columns[i].extend(_value(e) for e in a.entries())
            images[i].extend(e.value for e in lie_derivative_weighted(a, v_jets).entries())

    X = np.array(columns, dtype=float).T
    Y = np.array(images, dtype=float).T
    norms = np.linalg.norm(X, axis=0)
    if np.any(norms == 0):
        raise IllConditionedFit("A basis element vanishes on the sample set", np.inf)
    Xn = X / norms
    condition = float(np.linalg.cond(Xn.T @ Xn))
    if condition > MAX_GRAM_CONDITION:
        raise IllConditionedFit(f"Basis Gram matrix condition number {condition:.3e}", condition)
    coefficients, *_ = np.linalg.lstsq(Xn, Y, rcond=None)
    M = (coefficients / norms[:, None]).T
    residual = float(np.linalg.norm(X @ M.T - Y) / max(np.linalg.norm(Y), 1e-300))
    logger.debug("L_v fit on %d points: residual %.3e, condition %.3e", len(points), residual, condition)
    return LvFit(
        matrix=M,
        residual=residual,
        condition=condition,
        basis_residual=basis_residual,
        canonical=canonicalize(M),
        eigenvalues=np.linalg.eigvals(M),
    )
