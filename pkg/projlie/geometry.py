"""
Metric-level differential geometry on jets: Christoffel symbols, the projective connection,
Lie derivatives of symmetric tensors and the curvature invariants R, L and Delta.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from projlie.exceptions import DegenerateMetric, DegreeMismatch, DomainError
from projlie.jets import DEFAULT_DEGREE, Jet2, abs_pow

logger = logging.getLogger(__name__)

# |det| below this fraction of the squared entry scale counts as degenerate
DEGENERACY_THRESHOLD = 1e-12

SIGNATURES = ("riemannian", "lorentzian", "negative")


def as_jet(value, point, degree):
    if isinstance(value, Jet2):
        return value
    return Jet2.constant(value, point, degree)


@dataclass(frozen=True)
class Domain:
    """Validity region of a catalog formula: a sampling box and a margin (> 0 inside)."""

    x_range: tuple
    y_range: tuple
    margin: Callable = field(default=lambda x, y: 1.0)
    description: str = "inside the sampling box"

    def signed_margin(self, x, y):
        box = min(
            x - self.x_range[0],
            self.x_range[1] - x,
            y - self.y_range[0],
            self.y_range[1] - y,
        )
        try:
            inner = float(self.margin(x, y))
        except (DomainError, ZeroDivisionError, ArithmeticError):
            return -1.0
        return min(box, inner)

    def contains(self, x, y):
        return self.signed_margin(x, y) > 0


# # # Symmetric 2x2 tensors of jets # # #


@dataclass(frozen=True)
class SymmetricJet:
    """A symmetric 2x2 field (xx, xy, yy) of jets, or of plain numbers."""

    xx: object
    xy: object
    yy: object

    def entry(self, i, j):
        if i == j:
            return self.xx if i == 0 else self.yy
        return self.xy

    def entries(self):
        return self.xx, self.xy, self.yy

    @property
    def degree(self):
        return self.xx.degree

    def det(self):
        return self.xx * self.yy - self.xy * self.xy

    def matrix(self):
        """Values at the center as a 2x2 array."""
        vals = [e.value if isinstance(e, Jet2) else e for e in self.entries()]
        return np.array([[vals[0], vals[1]], [vals[1], vals[2]]])

    def scale(self, s):
        return type(self)(self.xx * s, self.xy * s, self.yy * s)

    def __add__(self, other):
        return type(self)(self.xx + other.xx, self.xy + other.xy, self.yy + other.yy)

    def __sub__(self, other):
        return type(self)(self.xx - other.xx, self.xy - other.xy, self.yy - other.yy)

    def map(self, fn):
        return type(self)(*(fn(e) for e in self.entries()))

    def truncate(self, degree):
        return self.map(lambda e: e.truncate(degree))

    def diff(self, axis):
        return self.map(lambda e: e.diff(axis))

    def check_nondegenerate(self, error=DegenerateMetric):
        det = self.det()
        value = det.value if isinstance(det, Jet2) else det
        scale = np.max(np.abs(self.matrix()))
        if abs(value) <= DEGENERACY_THRESHOLD * scale**2:
            raise error(f"Degenerate symmetric tensor: det = {value!r}")
        return det

    def inverse(self):
        det = self.check_nondegenerate()
        return SymmetricJet(self.yy / det, -self.xy / det, self.xx / det)

    def contract(self, u, w=None):
        """t(u, w) = sum t_ij u^i w^j."""
        w = u if w is None else w
        return self.xx * u[0] * w[0] + self.xy * (u[0] * w[1] + u[1] * w[0]) + self.yy * u[1] * w[1]


# # # Fields # # #


@dataclass(frozen=True)
class MetricField:
    """
    A symmetric 2x2 metric (E, F, G) given by one evaluator of the coordinates.
    The evaluator accepts jets or plain numbers, so the same field serves exact derivatives
    and fast pointwise evaluation.
    """

    components: Callable
    signature: str = "riemannian"
    domain: Domain = None
    name: str = "g"

    def jets(self, point, degree=DEFAULT_DEGREE):
        x, y = Jet2.coordinates(point, degree)
        return SymmetricJet(*(as_jet(c, point, degree) for c in self.components(x, y)))

    def values(self, point):
        E, F, G = self.components(float(point[0]), float(point[1]))
        return np.array([[E, F], [F, G]], dtype=float)

    def scaled(self, c, name=None):
        components = self.components

        def scaled_components(x, y):
            return tuple(c * e for e in components(x, y))

        return replace(self, components=scaled_components, name=name or f"{c}*{self.name}")

    def pullback(self, A, b=(0.0, 0.0), name=None):
        """Transport by the affine change (x, y) = A (u, w) + b."""
        A = np.asarray(A, dtype=float)
        components = self.components

        def transported(u, w):
            x = A[0, 0] * u + A[0, 1] * w + b[0]
            y = A[1, 0] * u + A[1, 1] * w + b[1]
            E, F, G = components(x, y)
            return (
                A[0, 0] ** 2 * E + 2 * A[0, 0] * A[1, 0] * F + A[1, 0] ** 2 * G,
                A[0, 0] * A[0, 1] * E + (A[0, 0] * A[1, 1] + A[0, 1] * A[1, 0]) * F + A[1, 0] * A[1, 1] * G,
                A[0, 1] ** 2 * E + 2 * A[0, 1] * A[1, 1] * F + A[1, 1] ** 2 * G,
            )

        domain = None
        if self.domain is not None:
            original = self.domain
            domain = Domain(
                x_range=(-np.inf, np.inf),
                y_range=(-np.inf, np.inf),
                margin=lambda u, w: original.signed_margin(
                    A[0, 0] * u + A[0, 1] * w + b[0], A[1, 0] * u + A[1, 1] * w + b[1]
                ),
                description=f"transported: {original.description}",
            )
        return replace(self, components=transported, domain=domain, name=name or self.name)


@dataclass(frozen=True)
class VectorField:
    components: Callable
    name: str = "v"

    def jets(self, point, degree=DEFAULT_DEGREE):
        x, y = Jet2.coordinates(point, degree)
        return tuple(as_jet(c, point, degree) for c in self.components(x, y))

    def values(self, point):
        v1, v2 = self.components(float(point[0]), float(point[1]))
        return np.array([v1, v2], dtype=float)

    def scaled(self, c):
        components = self.components
        return replace(self, components=lambda x, y: tuple(c * e for e in components(x, y)))

    def pushforward(self, A, b=(0.0, 0.0)):
        """The same field written in the coordinates u with (x, y) = A u + b."""
        A = np.asarray(A, dtype=float)
        Ainv = np.linalg.inv(A)
        components = self.components

        def transported(u, w):
            v1, v2 = components(A[0, 0] * u + A[0, 1] * w + b[0], A[1, 0] * u + A[1, 1] * w + b[1])
            return Ainv[0, 0] * v1 + Ainv[0, 1] * v2, Ainv[1, 0] * v1 + Ainv[1, 1] * v2

        return replace(self, components=transported)


@dataclass(frozen=True)
class MomentumQuadratic:
    """F = a p_x^2 + b p_x p_y + c p_y^2 with coefficient fields (a, b, c) of the coordinates."""

    components: Callable
    name: str = "F"

    def jets(self, point, degree=DEFAULT_DEGREE):
        x, y = Jet2.coordinates(point, degree)
        return tuple(as_jet(c, point, degree) for c in self.components(x, y))

    def evaluate(self, point, momentum):
        a, b, c = self.components(float(point[0]), float(point[1]))
        px, py = momentum
        return float(a * px * px + b * px * py + c * py * py)

    def perturbed(self, slot, amount):
        components = self.components

        def shifted(x, y):
            coefficients = list(components(x, y))
            coefficients[slot] = coefficients[slot] + amount
            return tuple(coefficients)

        return replace(self, components=shifted, name=f"{self.name}+{amount}")


@dataclass(frozen=True)
class ProjectiveConnection:
    """y'' = K0 + K1 y' + K2 y'^2 + K3 y'^3."""

    K0: Jet2
    K1: Jet2
    K2: Jet2
    K3: Jet2

    def coefficients(self):
        return self.K0, self.K1, self.K2, self.K3

    def values(self):
        return np.array([k.value if isinstance(k, Jet2) else k for k in self.coefficients()])

    def truncate(self, degree):
        return ProjectiveConnection(*(k.truncate(degree) for k in self.coefficients()))

    def rhs(self, slope):
        K0, K1, K2, K3 = self.values()
        return K0 + K1 * slope + K2 * slope**2 + K3 * slope**3


# # # Connection # # #


def christoffel_from_jets(g):
    """Gamma[i][j][k] = 1/2 g^{im} (d_j g_mk + d_k g_mj - d_m g_jk), degree D - 1."""
    d = g.degree
    dg = (g.diff(0), g.diff(1))
    ginv = g.truncate(d - 1).inverse()
    gamma = [[[None, None], [None, None]] for _ in range(2)]
    for i in range(2):
        for j in range(2):
            for k in range(j, 2):
                total = sum(
                    ginv.entry(i, m) * (dg[j].entry(m, k) + dg[k].entry(m, j) - dg[m].entry(j, k))
                    for m in range(2)
                )
                gamma[i][j][k] = gamma[i][k][j] = total * 0.5
    return gamma


def christoffel(g, point, degree=DEFAULT_DEGREE):
    return christoffel_from_jets(g.jets(point, degree))


def projective_connection(gamma):
    return ProjectiveConnection(
        K0=-gamma[1][0][0],
        K1=gamma[0][0][0] - 2 * gamma[1][0][1],
        K2=2 * gamma[0][0][1] - gamma[1][1][1],
        K3=gamma[0][1][1],
    )


def connection_of(g, point, degree=DEFAULT_DEGREE):
    return projective_connection(christoffel(g, point, degree))


# # # Lie derivatives # # #


def lie_derivative_tensor(t, v, density_weight=0.0):
    """
    Lie derivative of a symmetric (0,2) tensor field t along v, both given as jets of degree D.
    A nonzero density_weight w adds w * (div v) * t, the correction for tensors multiplied by
    a power of the area density. Result has degree D - 1.
    """
    d = t.degree
    dt = (t.diff(0), t.diff(1))
    dv = [[v[k].diff(i) for k in range(2)] for i in range(2)]
    t0 = t.truncate(d - 1)
    v0 = [c.truncate(d - 1) for c in v]
    divergence = dv[0][0] + dv[1][1]

    def component(i, j):
        value = v0[0] * dt[0].entry(i, j) + v0[1] * dt[1].entry(i, j)
        for k in range(2):
            value = value + t0.entry(k, j) * dv[i][k] + t0.entry(i, k) * dv[j][k]
        if density_weight:
            value = value + density_weight * divergence * t0.entry(i, j)
        return value

    return SymmetricJet(component(0, 0), component(0, 1), component(1, 1))


def lie_derivative_metric(g, v, point, degree=DEFAULT_DEGREE):
    return lie_derivative_tensor(g.jets(point, degree), v.jets(point, degree))


# # # Curvature # # #


def ricci_from_jets(g):
    """Ricci tensor R_{sn} = R^r_{s r n}; degree D - 2."""
    d = g.degree
    gamma = christoffel_from_jets(g)
    low = [[[gamma[i][j][k].truncate(d - 2) for k in range(2)] for j in range(2)] for i in range(2)]
    dgamma = [[[[gamma[i][j][k].diff(m) for k in range(2)] for j in range(2)] for i in range(2)] for m in range(2)]

    def ricci(s, n):
        total = 0.0
        for r in range(2):
            total = total + dgamma[r][r][n][s] - dgamma[n][r][r][s]
            for lam in range(2):
                total = total + low[r][r][lam] * low[lam][n][s] - low[r][n][lam] * low[lam][r][s]
        return total

    return SymmetricJet(ricci(0, 0), ricci(0, 1), ricci(1, 1))


def scalar_curvature_from_jets(g):
    """R = g^{sn} R_{sn}; equals twice the Gauss curvature (round unit sphere: R = 2)."""
    ric = ricci_from_jets(g)
    ginv = g.truncate(g.degree - 2).inverse()
    return sum(ginv.entry(s, n) * ric.entry(s, n) for s in range(2) for n in range(2))


@dataclass(frozen=True)
class CurvatureInvariants:
    R: float
    L: float
    laplacian: float
    dR: np.ndarray
    dL: np.ndarray
    dlaplacian: np.ndarray


def curvature_invariants(g, point, degree=DEFAULT_DEGREE):
    if degree < 5:
        raise DegreeMismatch(f"Curvature invariants need jets of degree >= 5, got {degree}")
    jets = g.jets(point, degree)
    R = scalar_curvature_from_jets(jets)
    d = degree - 3
    ginv = jets.truncate(d).inverse()
    dR = (R.diff(0), R.diff(1))
    L = ginv.contract(dR)
    root = abs_pow(jets.truncate(d).det(), 0.5)
    flux = [root * (ginv.entry(i, 0) * dR[0] + ginv.entry(i, 1) * dR[1]) for i in range(2)]
    laplacian = (flux[0].diff(0) + flux[1].diff(1)) / root.truncate(d - 1)
    return CurvatureInvariants(
        R=float(R.value),
        L=float(L.value),
        laplacian=float(laplacian.value),
        dR=R.gradient.astype(float),
        dL=L.gradient.astype(float),
        dlaplacian=laplacian.gradient.astype(float),
    )


# # # Reference metrics # # #


def flat_metric(signature="riemannian"):
    if signature == "lorentzian":
        return MetricField(lambda x, y: (1.0, 0.0, -1.0), signature="lorentzian", name="flat")
    return MetricField(lambda x, y: (1.0, 0.0, 1.0), name="flat")


def conformal_metric(factor, name="conformal"):
    def components(x, y):
        f = factor(x, y)
        return f, 0.0 * f, f

    return MetricField(components, name=name)


def round_sphere_metric():
    return conformal_metric(lambda x, y: 4.0 / (1.0 + x * x + y * y) ** 2, name="round sphere")


def rotational_metric():
    return conformal_metric(lambda x, y: 1.0 / (1.0 + x * x + y * y), name="rotational")


def rotation_field():
    return VectorField(lambda x, y: (-y, x), name="rotation")
