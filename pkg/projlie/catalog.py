"""
The catalog of metrics admitting a projective vector field that is not a homothety.

Every case carries the metric g, the projective field v, the canonical partner metric
(the second element of the two-dimensional solution space spanned with g), its validity
domain and the eigen data of L_v that the case is expected to reproduce.

Coordinate conventions: "f dx dy" stands for the symmetric tensor with g_12 = f / 2, and
"dz" is the complex coordinate z = x + i y.
"""

import logging
from dataclasses import dataclass, field, replace
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()
from typing import Callable

import numpy as np

from projlie.exceptions import DomainError, ParamConstraintViolation
from projlie.geometry import Domain, MetricField, MomentumQuadratic, VectorField
from projlie.jets import Jet2, QuadratureJet, abs_pow, arctan, cbrt, cos, differentiate, exp, pow_const, sin, tan
from projlie.metrizability import partner_integral

logger = logging.getLogger(__name__)

PARAMETER_TOLERANCE = 1e-9

# Coordinates in which a translation field along the diagonal becomes d/dx.
DIAGONAL_ADAPTED = np.array([[1.0, 1.0], [1.0, -1.0]])

FAMILY_CLASS = {"liouville": "liouville", "complex": "complex_liouville", "jordan": "jordan_block"}


class CaseId(StrEnum):
    LIOUVILLE_JORDAN = "1a"
    LIOUVILLE_ROTATION = "1b"
    LIOUVILLE_DIAGONAL = "1c"
    COMPLEX_JORDAN = "2a"
    COMPLEX_ROTATION = "2b"
    COMPLEX_DIAGONAL = "2c"
    NULL_JORDAN = "3a"
    NULL_ROTATION = "3b"
    NULL_DIAGONAL = "3c"
    NULL_SPECIAL = "3d"

    @property
    def family(self):
        return {"1": "liouville", "2": "complex", "3": "jordan"}[self.value[0]]


@dataclass(frozen=True)
class CaseParams:
    """Free parameters; each case reads the ones it needs and validates them."""

    c: float = 1.0
    lam: float = 0.5
    nu: float = 0.5
    eta: float = 1.0 / 3.0
    phase: float = 0.7
    epsilon: int = 1
    y0: float = None
    sign: int = 1

    @property
    def C(self):
        return complex(np.cos(self.phase), np.sin(self.phase))

    def as_dict(self):
        return {
            "c": self.c,
            "lam": self.lam,
            "nu": self.nu,
            "eta": self.eta,
            "phase": self.phase,
            "epsilon": self.epsilon,
            "y0": self.y0,
            "sign": self.sign,
        }


@dataclass(frozen=True)
class ExpectedEigen:
    """
    What L_v does on the solution space: the canonical kind of its matrix, the ratio lam where
    the kind has one, the homothety factor k (L_v g = k g) when v is a homothety of g and the
    eigenvalues mu of L_v on span{a, a_bar}.
    """

    kind: str
    lam: float = None
    scale: float = None
    homothety: float = None
    eigenvalues: tuple = ()
    matrix3: np.ndarray = field(default=None, compare=False)

    def canonical_matrix(self):
        """scale times the normal form of the kind, where the case fixes both."""
        if self.kind == "diagonal" and len(self.eigenvalues) == 2:
            small, large = sorted(self.eigenvalues, key=abs)
            return np.diag([large, small])
        if self.scale is None:
            return None
        if self.kind == "jordan_one":
            return self.scale * np.array([[1.0, 1.0], [0.0, 1.0]])
        if self.kind == "rotation" and self.lam is not None:
            return self.scale * np.array([[self.lam, -1.0], [1.0, self.lam]])
        return None


@dataclass(frozen=True)
class CatalogEntry:
    case_id: CaseId
    params: CaseParams
    g: MetricField
    v: VectorField
    partner: MetricField
    domain: Domain
    expected: ExpectedEigen
    tilde: MetricField = None
    adapted: bool = False
    # Y(y) of the Jordan family metric (Y + x) dx dy
    profile: Callable = field(default=None, compare=False)

    @property
    def family(self):
        return self.case_id.family

    @property
    def expected_class(self):
        return FAMILY_CLASS[self.family]

    def solution_basis(self):
        basis = [self.g, self.partner]
        if self.tilde is not None:
            basis.append(self.tilde)
        return basis


# # # Parameter validation # # #


def _near(a, b):
    return abs(a - b) <= PARAMETER_TOLERANCE * max(1.0, abs(b))


def _require(condition, constraint, parameter, value):
    if not condition:
        raise ParamConstraintViolation(constraint, parameter, value)


def _jordan_branch(params, pole):
    """Lower limit y0 of the antiderivative; by default on the branch above the pole and 0."""
    if params.y0 is None:
        return max(pole, 0.0) + 2.0
    return params.y0


def validate_params(case_id, params):
    case_id = CaseId(case_id)
    _require(params.sign in (-1, 1), "sign must be +1 or -1", "sign", params.sign)
    _require(params.epsilon in (-1, 1), "epsilon must be +1 or -1", "epsilon", params.epsilon)
    if case_id.family == "liouville":
        _require(params.c != 0, "c must be nonzero", "c", params.c)
    if case_id in (CaseId.LIOUVILLE_ROTATION, CaseId.COMPLEX_ROTATION) and _near(params.lam, 0.0):
        if case_id is CaseId.LIOUVILLE_ROTATION:
            _require(not _near(abs(params.c), 1.0), "lam = 0 requires c != +1, -1", "c", params.c)
        else:
            _require(
                not _near(abs(np.sin(params.phase)), 0.0), "lam = 0 requires C != +1, -1", "phase", params.phase
            )
    if case_id in (CaseId.LIOUVILLE_DIAGONAL, CaseId.COMPLEX_DIAGONAL):
        _require(0 < params.nu <= 4, "nu must lie in (0, 4]", "nu", params.nu)
        _require(not _near(params.nu, 1.0), "nu must differ from 1", "nu", params.nu)
        if _near(params.nu, 2.0):
            if case_id is CaseId.LIOUVILLE_DIAGONAL:
                _require(not _near(params.c, -params.epsilon), "nu = 2 requires c != -epsilon", "c", params.c)
            else:
                _require(
                    not _near(abs(np.sin(params.phase)), 0.0), "nu = 2 requires C != +1, -1", "phase", params.phase
                )
    if case_id is CaseId.NULL_DIAGONAL:
        _require(0 < params.eta <= 4, "eta must lie in (0, 4]", "eta", params.eta)
        _require(
            not (_near(params.eta, 0.5) or _near(params.eta, 1.0)), "eta must differ from 1/2 and 1", "eta", params.eta
        )
    if case_id is CaseId.NULL_JORDAN:
        y0 = _jordan_branch(params, 3.0)
        _require(not (_near(y0, 0.0) or _near(y0, 3.0)), "y0 must avoid 0 and 3", "y0", y0)
    if case_id is CaseId.NULL_ROTATION:
        y0 = _jordan_branch(params, 3.0 * params.lam)
        _require(not _near(y0, 3.0 * params.lam), "y0 must differ from 3 lam", "y0", y0)
    return params


# # # Free functions # # #


FREE_FUNCTIONS = {
    "identity": lambda u: u,
    "zero": lambda u: 0.0 * u,
    "one": lambda u: 0.0 * u + 1.0,
    "square": lambda u: u * u,
    "cube": lambda u: u * u * u,
    "reciprocal": lambda u: 1.0 / u,
    "exp": exp,
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "arctan": arctan,
    "shifted_exp": lambda u: exp(u) + 2.0,
    "shifted_square": lambda u: u * u + 1.0,
}


def free_function(name):
    try:
        return FREE_FUNCTIONS[name]
    except KeyError:
        raise ParamConstraintViolation(
            f"free functions are one of {', '.join(sorted(FREE_FUNCTIONS))}", "function", name
        ) from None


# # # Family builders # # #


def _complex_coordinate(x, y):
    if isinstance(x, Jet2):
        return x.to_complex() + y * 1j
    return complex(x, y)


def _liouville_field(X, Y, X1, Y1, name):
    """(X(x) - Y(y)) (X1(x) dx^2 + Y1(y) dy^2)."""

    def components(x, y):
        difference = X(x) - Y(y)
        return difference * X1(x), 0.0 * difference, difference * Y1(y)

    return MetricField(components, name=name)


def _liouville_partner(X, Y, X1, Y1, name):
    return _liouville_field(
        lambda x: 1.0 / X(x), lambda y: 1.0 / Y(y), lambda x: X1(x) / X(x), lambda y: Y1(y) / Y(y), name
    )


def _complex_field(h, h1, name):
    """(h - h_bar)(h1 dz^2 - h1_bar dz_bar^2) in real form."""

    def components(x, y):
        z = _complex_coordinate(x, y)
        H, H1 = h(z), h1(z)
        weight = 4.0 * H.imag
        return -weight * H1.imag, -weight * H1.real, weight * H1.imag

    return MetricField(components, signature="lorentzian", name=name)


def _complex_partner(h, h1, name):
    return _complex_field(lambda z: 1.0 / h(z), lambda z: h1(z) / h(z), name)


def _jordan_field(Y, name):
    """(Y(y) + x) dx dy."""

    def components(x, y):
        f = Y(y) + x
        return 0.0 * f, f * 0.5, 0.0 * f

    return MetricField(components, signature="lorentzian", name=name)


def _jordan_partner(Y, name):
    """-2 (Y + x) / y^3 dx dy + (Y + x)^2 / y^4 dy^2."""

    def components(x, y):
        f = Y(y) + x
        return 0.0 * f, -f / pow_const(y, 3), f * f / pow_const(y, 4)

    return MetricField(components, signature="lorentzian", name=name)


def _special_tilde():
    def components(x, y):
        s = y * y + x
        t = pow_const(3.0 * x - y * y, 6)
        return 9.0 / (s * s * t), -2.0 * y * (9.0 * x + y * y) / (t * s * s * s), 12.0 * x / (s * s * t)

    return MetricField(components, signature="lorentzian", name="g_tilde")


def _separation_margin(X, Y, threshold):
    def margin(x, y):
        return abs(float(X(x) - Y(y))) - threshold

    return margin


def _liouville_case(case_id, params):
    c, lam, nu, eps = params.c, params.lam, params.nu, params.epsilon
    if case_id is CaseId.LIOUVILLE_JORDAN:
        X, Y = (lambda x: 1.0 / x), (lambda y: 1.0 / y)
        X1, Y1 = (lambda x: c * exp(-3.0 * x) / x), (lambda y: exp(-3.0 * y) / y)
        domain = Domain((0.2, 5.0), (0.2, 5.0), lambda x, y: abs(x - y) - 0.1, "0.2 <= x, y <= 5, |x - y| > 0.1")
        expected = ExpectedEigen("jordan_one", scale=1.0, eigenvalues=(1.0,))
    elif case_id is CaseId.LIOUVILLE_ROTATION:
        X, Y = tan, tan
        X1, Y1 = (lambda x: c * exp(-3.0 * lam * x) / cos(x)), (lambda y: exp(-3.0 * lam * y) / cos(y))
        domain = Domain((0.15, 1.3), (0.15, 1.3), lambda x, y: abs(x - y) - 0.1, "0.15 <= x, y <= 1.3, |x - y| > 0.1")
        expected = ExpectedEigen("rotation", lam=lam, scale=1.0)
    else:
        X, Y = (lambda x: c * exp(nu * x)), (lambda y: exp(nu * y))
        X1, Y1 = (lambda x: exp(2.0 * x)), (lambda y: eps * exp(2.0 * y))
        domain = Domain((-1.5, 1.5), (-1.5, 1.5), _separation_margin(X, Y, 0.05), "|x|, |y| <= 1.5, |X - Y| > 0.05")
        expected = ExpectedEigen(
            "diagonal",
            lam=(2.0 + nu) / (2.0 - 2.0 * nu),
            homothety=nu + 2.0,
            eigenvalues=(-(nu + 2.0) / 3.0, -(2.0 - 2.0 * nu) / 3.0),
        )
    g = _liouville_field(X, Y, X1, Y1, "g")
    signature = "riemannian" if float(X1(domain.x_range[1]) * Y1(domain.y_range[1])) > 0 else "lorentzian"
    g = replace(g, signature=signature, domain=domain)
    partner = replace(_liouville_partner(X, Y, X1, Y1, "g_bar"), signature=signature, domain=domain)
    v = VectorField(lambda x, y: (0.0 * x + 1.0, 0.0 * y + 1.0), name="d/dx + d/dy")
    return CatalogEntry(case_id, params, g, v, partner, domain, expected)


def _complex_case(case_id, params):
    C, lam, nu, phase = params.C, params.lam, params.nu, params.phase
    if case_id is CaseId.COMPLEX_JORDAN:
        h, h1 = (lambda z: 1.0 / z), (lambda z: C * exp(-3.0 * z) / z)
        domain = Domain((-2.0, 2.0), (0.2, 2.0), description="|x| <= 2, 0.2 <= y <= 2")
        expected = ExpectedEigen("jordan_one", scale=1.0, eigenvalues=(1.0,))
    elif case_id is CaseId.COMPLEX_ROTATION:
        h, h1 = tan, (lambda z: C * exp(-3.0 * lam * z) / cos(z))
        domain = Domain((-1.0, 1.0), (0.2, 1.5), description="|x| <= 1, 0.2 <= y <= 1.5")
        expected = ExpectedEigen("rotation", lam=lam, scale=1.0)
    else:
        h, h1 = (lambda z: C * exp(nu * z)), (lambda z: exp(2.0 * z))
        domain = Domain(
            (-1.5, 1.5),
            (-1.5, 1.5),
            lambda x, y: abs(np.sin(nu * y + phase)) - 0.1,
            "|x|, |y| <= 1.5, |sin(nu y + phase)| > 0.1",
        )
        expected = ExpectedEigen(
            "diagonal",
            lam=(2.0 + nu) / (2.0 - 2.0 * nu),
            homothety=nu + 2.0,
            eigenvalues=(-(nu + 2.0) / 3.0, -(2.0 - 2.0 * nu) / 3.0),
        )
    g = replace(_complex_field(h, h1, "g"), domain=domain)
    partner = replace(_complex_partner(h, h1, "g_bar"), domain=domain)
    v = VectorField(lambda x, y: (0.0 * x + 1.0, 0.0 * y), name="d/dx")
    return CatalogEntry(case_id, params, g, v, partner, domain, expected)


def _branch_box(y0, singular, width, offset=0.5):
    """The y-interval between consecutive singular values that contains y0, kept offset away from them."""
    below = max((p for p in singular if p < y0), default=None)
    above = min((p for p in singular if p > y0), default=None)
    if below is not None:
        low = below + offset
        high = low + width if above is None else min(above - offset, low + width)
    else:
        high = above - offset
        low = high - width
    return (min(low, y0), max(high, y0))


def _jordan_margin(Y, threshold=0.1):
    def margin(x, y):
        return abs(float(Y(y) + x)) - threshold

    return margin


def _jordan_case(case_id, params):
    lam, eta = params.lam, params.eta
    tilde = None
    if case_id is CaseId.NULL_JORDAN:
        y0 = _jordan_branch(params, 3.0)
        integral = QuadratureJet(lambda s: exp(1.5 / s) * abs_pow(s, 0.5) / pow_const(s - 3.0, 2), y0, excluded=(0.0, 3.0))

        def Y(y):
            return exp(1.5 / y) * abs_pow(y, 0.5) / (y - 3.0) + integral(y)

        def v_components(x, y):
            return (y - 3.0) * 0.5 * (x + integral(y)), y * y

        y_range = _branch_box(y0, (0.0, 3.0), 6.0, offset=1.0)
        expected = ExpectedEigen("jordan_one", scale=1.0, eigenvalues=(1.0,))
    elif case_id is CaseId.NULL_ROTATION:
        pole = 3.0 * lam
        y0 = _jordan_branch(params, pole)
        integral = QuadratureJet(
            lambda s: exp(-1.5 * lam * arctan(s)) * pow_const(s * s + 1.0, 0.25) / pow_const(s - pole, 2),
            y0,
            excluded=(pole,),
        )

        def Y(y):
            return exp(-1.5 * lam * arctan(y)) * pow_const(y * y + 1.0, 0.25) / (y - pole) + integral(y)

        def v_components(x, y):
            return (y - pole) * 0.5 * (x + integral(y)), y * y + 1.0

        y_range = _branch_box(y0, (0.0, pole), 4.0)
        expected = ExpectedEigen("rotation", lam=lam, scale=1.0)
    elif case_id is CaseId.NULL_DIAGONAL:

        def Y(y):
            return pow_const(y, 1.0 / eta)

        def v_components(x, y):
            return x, eta * y

        y_range = (0.5, 3.0)
        expected = ExpectedEigen(
            "diagonal",
            lam=(2.0 + eta) / (2.0 - 2.0 * eta),
            homothety=2.0 + eta,
            eigenvalues=(-(2.0 + eta) / 3.0, -(2.0 - 2.0 * eta) / 3.0),
        )
    else:

        def Y(y):
            return y * y

        def v_components(x, y):
            return 2.0 * x, y

        y_range = (0.5, 2.0)
        tilde = _special_tilde()
        expected = ExpectedEigen(
            "diagonal",
            lam=2.5,
            homothety=5.0,
            eigenvalues=(-5.0 / 3.0, -2.0 / 3.0),
            matrix3=np.diag([-5.0 / 3.0, -2.0 / 3.0, 4.0]),
        )

    if case_id is CaseId.NULL_SPECIAL:
        domain = Domain(
            (0.5, 2.0),
            y_range,
            lambda x, y: min(abs(3.0 * x - y * y), abs(y * y + x)) - 0.1,
            "0.5 <= x, y <= 2, |3x - y^2| > 0.1",
        )
        tilde = replace(tilde, domain=domain)
    else:
        domain = Domain((-2.0, 2.0), y_range, _jordan_margin(Y), f"|x| <= 2, y in {y_range}, |Y(y) + x| > 0.1")
    g = replace(_jordan_field(Y, "g"), domain=domain)
    partner = replace(_jordan_partner(Y, "g_bar"), domain=domain)
    v = VectorField(v_components, name="v")
    return CatalogEntry(case_id, params, g, v, partner, domain, expected, tilde=tilde, profile=Y)


def make_case(case_id, params=None):
    case_id = CaseId(case_id)
    params = validate_params(case_id, params or CaseParams())
    builder = {"liouville": _liouville_case, "complex": _complex_case, "jordan": _jordan_case}[case_id.family]
    entry = builder(case_id, params)
    logger.debug("Built catalog case %s with %s", case_id.value, params.as_dict())
    return entry


def all_cases(params=None):
    return [make_case(case_id, params) for case_id in CaseId]


def canonical_partner(entry):
    return entry.partner


def adapted_case(entry):
    """
    The case written in coordinates where v = d/dx: the Liouville cases through
    (x_old, y_old) = (x + y, x - y); the complex cases already have this form.
    """
    if entry.adapted or entry.family == "complex":
        return replace(entry, adapted=True)
    if entry.family != "liouville":
        raise ParamConstraintViolation("adapted coordinates exist for translation fields only", "case", entry.case_id.value)
    original = entry.domain
    (a0, a1), (b0, b1) = original.x_range, original.y_range
    domain = Domain(
        ((a0 + b0) / 2, (a1 + b1) / 2),
        ((a0 - b1) / 2, (a1 - b0) / 2),
        lambda x, y: original.signed_margin(x + y, x - y),
        f"adapted: {original.description}",
    )
    return replace(
        entry,
        g=replace(entry.g.pullback(DIAGONAL_ADAPTED), domain=domain),
        partner=replace(entry.partner.pullback(DIAGONAL_ADAPTED), domain=domain),
        v=replace(entry.v.pushforward(DIAGONAL_ADAPTED), name="d/dx"),
        domain=domain,
        adapted=True,
    )


# # # Closed forms for case 1a in adapted coordinates # # #


def _c_two_thirds(c):
    root = cbrt(c)
    return root * root


def adapted_connection_1a(c, exponential=exp):
    """y -> (K0, K1, K2, K3) of case 1a in adapted coordinates; y may be a jet or a sympy expression."""

    def coefficients(y):
        up, down = exponential(6 * y), exponential(-6 * y)
        denominator = 8 * c * y
        return (
            (up + c * c * down + 2 * c) / denominator,
            3 * (4 * y * c - up + c * c * down) / denominator,
            (-2 * c + 3 * up + 3 * c * c * down) / denominator,
            -(12 * y * c - c * c * down + up) / denominator,
        )

    return coefficients


def bara_1a(c):
    """The weighted solution a_bar of case 1a in adapted coordinates, as (x, y) -> (a11, a12, a22)."""
    k = 4.0 * _c_two_thirds(c)

    def components(x, y):
        weight = exp(x) / (k * cbrt(y))
        down, up = c * exp(-3.0 * y), exp(3.0 * y)
        diagonal = weight * (down * (y - x) - up * (x + y))
        return diagonal, weight * (down * (y - x) + up * (x + y)), diagonal

    return components


def partial_solution_1a(c):
    """P with d/dx P = P + a_bar, the particular solution behind the inhomogeneous branch."""
    k = 8.0 * _c_two_thirds(c)

    def components(x, y):
        weight = x * exp(x) / (k * cbrt(y))
        down, up = c * exp(-3.0 * y), exp(3.0 * y)
        diagonal = weight * (-2.0 * y * up - x * down + 2.0 * y * down - x * up)
        return diagonal, weight * (2.0 * y * up - x * down + 2.0 * y * down + x * up), diagonal

    return components


def partial_solution_residual_1a(c):
    """The metrizability residual of P divided by e^x, a function of y alone."""
    k = 4.0 * _c_two_thirds(c)

    def residual(y):
        root = cbrt(y)
        scale = root * root / k
        down, up = c * exp(-3.0 * y), exp(3.0 * y)
        return (
            scale * (down - up),
            2.0 * scale * (up + down),
            scale * (down - up),
            0.0 * y,
        )

    return residual


# # # Normal forms with a quadratic integral # # #


@dataclass(frozen=True)
class NormalForm:
    kind: str
    g: MetricField
    gbar: MetricField
    integral: MomentumQuadratic
    domain: Domain
    expected_class: str


NORMAL_FORM_KINDS = ("liouville", "complex", "jordan", "jordan_partner")


def _liouville_normal_form(X, Y, sign):
    def metric(x, y):
        f = X(x) - Y(y)
        return f, 0.0 * f, sign * f

    def partner(x, y):
        Xv, Yv = X(x), Y(y)
        f = 1.0 / Yv - 1.0 / Xv
        return f / Xv, 0.0 * f, sign * f / Yv

    def integral(x, y):
        Xv, Yv = X(x), Y(y)
        f = Xv - Yv
        return sign * Yv / f, 0.0 * f, Xv / f

    def margin(x, y):
        Xv, Yv = float(X(x)), float(Y(y))
        return min(abs(Xv - Yv), abs(Xv), abs(Yv)) - 0.05

    domain = Domain((0.2, 1.2), (0.2, 1.2), margin, "0.2 <= x, y <= 1.2 away from X = Y, X = 0, Y = 0")
    signature = "riemannian" if sign > 0 else "lorentzian"
    return NormalForm(
        "liouville",
        MetricField(metric, signature, domain, "g"),
        MetricField(partner, signature, domain, "g_bar"),
        MomentumQuadratic(integral),
        domain,
        "liouville",
    )


def _complex_normal_form(h):
    def parts(x, y):
        H = h(_complex_coordinate(x, y))
        return H.real, H.imag

    def metric(x, y):
        re, im = parts(x, y)
        return 0.0 * im, im, 0.0 * im

    def partner(x, y):
        re, im = parts(x, y)
        modulus = re * re + im * im
        q = im / modulus
        return -q * q, re * im / (modulus * modulus), q * q

    def integral(x, y):
        re, im = parts(x, y)
        return 0.0 * im + 1.0, 2.0 * re / im, 0.0 * im - 1.0

    def margin(x, y):
        re, im = parts(x, y)
        return min(abs(float(im)), abs(complex(re, im))) - 0.05

    domain = Domain((-1.0, 1.0), (0.2, 1.2), margin, "|x| <= 1, 0.2 <= y <= 1.2, Im h != 0")
    return NormalForm(
        "complex",
        MetricField(metric, "lorentzian", domain, "g"),
        MetricField(partner, "lorentzian", domain, "g_bar"),
        MomentumQuadratic(integral),
        domain,
        "complex_liouville",
    )


def _jordan_normal_form(Y):
    dY = differentiate(Y)

    def metric(x, y):
        f = 1.0 + x * dY(y)
        return 0.0 * f, 0.5 * f, 0.0 * f

    def partner(x, y):
        f = 1.0 + x * dY(y)
        Yv = Y(y)
        return 0.0 * f, -f / pow_const(Yv, 3), f * f / pow_const(Yv, 4)

    def integral(x, y):
        f = 1.0 + x * dY(y)
        return 0.0 * f + 1.0, -2.0 * Y(y) / f, 0.0 * f

    def margin(x, y):
        return abs(float(1.0 + x * dY(y))) - 0.05

    domain = Domain((0.2, 1.2), (0.2, 1.2), margin, "0.2 <= x, y <= 1.2, 1 + x Y'(y) != 0")
    return NormalForm(
        "jordan",
        MetricField(metric, "lorentzian", domain, "g"),
        MetricField(partner, "lorentzian", domain, "g_bar"),
        MomentumQuadratic(integral),
        domain,
        "jordan_block",
    )


def _jordan_partner_normal_form(Y):
    domain = Domain((-1.0, 1.0), (0.5, 1.5), _jordan_margin(Y, 0.05), "|x| <= 1, 0.5 <= y <= 1.5, Y + x != 0")
    g = replace(_jordan_field(Y, "g"), domain=domain)
    gbar = replace(_jordan_partner(Y, "g_bar"), domain=domain)
    return NormalForm("jordan_partner", g, gbar, partner_integral(g, gbar, name="F"), domain, "jordan_block")


def normal_form(kind, X="tan", Y="exp", h="tan", sign=1):
    """The normal forms of metric pairs sharing geodesics, with their quadratic integral."""
    if sign not in (-1, 1):
        raise ParamConstraintViolation("sign must be +1 or -1", "sign", sign)
    if kind == "liouville":
        return _liouville_normal_form(free_function(X), free_function(Y), sign)
    if kind == "complex":
        return _complex_normal_form(free_function(h))
    if kind == "jordan":
        return _jordan_normal_form(free_function(Y))
    if kind == "jordan_partner":
        return _jordan_partner_normal_form(free_function(Y))
    raise ParamConstraintViolation(f"normal form kind must be one of {', '.join(NORMAL_FORM_KINDS)}", "kind", kind)


def evaluate_metric(field, point):
    """Pointwise metric values, with singular formulas reported as DomainError."""
    try:
        values = field.values(point)
    except (ZeroDivisionError, FloatingPointError) as exc:
        raise DomainError(f"{field.name} is singular at {tuple(point)}") from exc
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{field.name} is not finite at {tuple(point)}")
    return values
