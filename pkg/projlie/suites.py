"""
Verification suites: the checks run per catalog case and per normal form, each producing a
CheckRecord with its sample count, rejected points, worst residual and verdict.
"""

import logging
from contextlib import contextmanager

import numpy as np

from projlie import analysis, dynamics
from projlie.catalog import CaseId, adapted_case, make_case, normal_form
from projlie.exceptions import IllConditionedFit, ProjLieError
from projlie.geometry import connection_of, lie_derivative_metric
from projlie.metrizability import (
    a_from_metric,
    combination_field,
    fit_lv_matrix,
    integral_from_partner,
    metrizability_residual,
    partner_integral,
    quadratic_integral,
)
from projlie.reports import CaseResult, CheckRecord
from projlie.sampler import sample_momenta, sample_points, sample_starts

logger = logging.getLogger(__name__)

NORMAL_FORM_PREFIX = "normal_"

DEFAULT_TOLERANCES = {
    "metrizability": 1e-9,
    "combination": 1e-9,
    "integral_identity": 1e-10,
    "bracket": 1e-9,
    "lv_fit": 1e-6,
    "lv_nondegenerate": 1e-6,
    "homothety": 1e-8,
    "geodesic_match": 1e-6,
    "integral_conservation": 1e-8,
    "killing": 1e-6,
    "classification": 0.5,
    "prolongation_homogeneous": 1e-8,
    "prolongation_control": 1e-8,
    "prolongation_closed_form": 1e-9,
    "inhomogeneous_branch": 1e-8,
    "integral_ode": 1e-6,
    "solution_dimension": 1e-8,
    "null_form": 1e-10,
}

ANCHORS = {
    "metrizability": "every metric of the case solves the linear metrizability system of g",
    "combination": "generic combinations of solutions give metrics projectively equivalent to g",
    "integral_identity": "the integral built from a partner equals det(g)^(2/3) a_bar(xi, xi)",
    "bracket": "the quadratic integral Poisson-commutes with the geodesic Hamiltonian",
    "lv_fit": "L_v acts on the solution space with the expected canonical matrix",
    "lv_nondegenerate": "the fitted matrix of L_v on span{a, a_bar} is invertible",
    "homothety": "v is a homothety of g exactly in the diagonal cases",
    "geodesic_match": "g and its partners share unparameterized geodesics",
    "integral_conservation": "the partner integrals are constant along geodesics of g",
    "killing": "the metric admits no Killing vector field",
    "classification": "the eigenstructure of g^-1 g_bar matches the family of the case",
    "prolongation_homogeneous": "L_v a = mu a has no solution off the eigenvalues of L_v",
    "prolongation_control": "the homogeneous determinant vanishes at the eigenvalues of L_v",
    "prolongation_closed_form": "the prolongation determinant equals its closed-form polynomial",
    "inhomogeneous_branch": "the inhomogeneous branch is degenerate with the closed-form substituted determinant",
    "integral_ode": "the integral ODE of the Jordan family has a solution exactly for Y = y^2",
    "solution_dimension": "the special case carries a three-dimensional solution space",
    "null_form": "in null coordinates the integral satisfies a_y = c_x = 0",
}

MU_GRID = (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)
COMBINATIONS = 10
COMBINATION_POINTS = 10
FIT_POINTS = 30
PROLONGATION_POINTS = 10
MOMENTA_PER_POINT = 2
INHOMOGENEOUS_YS = np.linspace(0.5, 2.0, 16)
GEODESIC_TIME_FRACTION = 0.25

# Failures of one sample point; they reject the point, never the run.
POINT_ERRORS = (ProjLieError, ArithmeticError, np.linalg.LinAlgError)

# A check with more of its sample points rejected than this fails.
MIN_ACCEPTED_FRACTION = 0.5


class CheckRun:
    """Accumulates per-point values of one check."""

    def __init__(self, name, threshold, bound="upper"):
        self.name = name
        self.threshold = threshold
        self.bound = bound
        self.values = []
        self.points = []
        self.rejected = 0
        self.attempted = 0
        self.details = {}

    @contextmanager
    def at(self, point):
        self.attempted += 1
        try:
            yield
        except POINT_ERRORS as exc:
            self.rejected += 1
            logger.debug("%s: rejected %s (%s: %s)", self.name, point, type(exc).__name__, exc)

    def record(self, value, point=None):
        self.values.append(float(value))
        self.points.append(None if point is None else tuple(float(c) for c in point))

    @property
    def accepted_fraction(self):
        total = self.attempted or self.rejected + len(self.values)
        return (total - self.rejected) / total if total else 0.0

    def finish(self, **details):
        self.details.update(details)
        self.details["accepted_fraction"] = self.accepted_fraction
        if not self.values:
            record = CheckRecord(
                self.name, ANCHORS[self.name], 0, self.rejected, float("nan"), self.threshold, False, None,
                self.bound, {**self.details, "reason": "no usable sample points"},
            )
        else:
            values = np.array(self.values)
            nan = np.isnan(values)
            if self.bound == "upper":
                index = int(np.argmax(np.where(nan, np.inf, values)))
                passed = not nan.any() and values[index] <= self.threshold
            else:
                index = int(np.argmin(np.where(nan, -np.inf, values)))
                passed = not nan.any() and values[index] > self.threshold
            if self.accepted_fraction < MIN_ACCEPTED_FRACTION:
                passed = False
                self.details["reason"] = f"only {self.accepted_fraction:.0%} of the sample points were usable"
            record = CheckRecord(
                self.name, ANCHORS[self.name], len(values), self.rejected, float(values[index]),
                self.threshold, bool(passed), self.points[index], self.bound, self.details,
            )
        logger.info(
            "%s: %s (worst %.3e vs %.1e, %d rejected)",
            self.name, "passed" if record.passed else "FAILED", record.max_residual, record.threshold, record.rejected,
        )
        return record


# # # Checks shared by cases and normal forms # # #


def check_metrizability(g, metrics, points, threshold):
    run = CheckRun("metrizability", threshold)
    worst = {m.name: 0.0 for m in metrics}
    for point in points:
        with run.at(point):
            K = connection_of(g, point, degree=2)
            residuals = {
                m.name: float(np.max(np.abs(metrizability_residual(K, a_from_metric(m, point, 2), normalized=True))))
                for m in metrics
            }
            for name, value in residuals.items():
                worst[name] = max(worst[name], value)
            run.record(max(residuals.values()), point)
    return run.finish(per_metric=worst)


def check_bracket(g, integrals, points, momenta, threshold):
    run = CheckRun("bracket", threshold)
    for i, point in enumerate(points):
        chosen = [momenta[(MOMENTA_PER_POINT * i + k) % len(momenta)] for k in range(MOMENTA_PER_POINT)]
        with run.at(point):
            value = max(
                abs(dynamics.poisson_bracket_residual(g, F, point, p, relative=True)) for F in integrals for p in chosen
            )
            run.record(value, point)
    return run.finish(integrals=[F.name for F in integrals], phase_points=MOMENTA_PER_POINT * len(points))


def check_classification(g, gbar, expected, points, threshold):
    run = CheckRun("classification", threshold)
    kinds, indeterminate = {}, []
    for point in points:
        with run.at(point):
            result = analysis.classify_pair(g, gbar, point)
            if result.indeterminate:
                run.rejected += 1
                indeterminate.append(tuple(float(c) for c in point))
                continue
            kinds[result.kind] = kinds.get(result.kind, 0) + 1
            run.record(0.0 if result.kind == expected else 1.0, point)
    return run.finish(expected=expected, kinds=kinds, indeterminate=indeterminate)


# # # Catalog case checks # # #


def check_combination(entry, points, rng, threshold):
    run = CheckRun("combination", threshold)
    metrics = entry.solution_basis()
    weights = rng.uniform(-2.0, 2.0, size=(COMBINATIONS, len(metrics)))
    for row in weights:
        g_hat = combination_field(list(zip(metrics, row)))
        for point in points[:COMBINATION_POINTS]:
            with run.at(point):
                K = connection_of(entry.g, point, degree=2)
                a = a_from_metric(g_hat, point, 2)
                run.record(np.max(np.abs(metrizability_residual(K, a, normalized=True))), point)
    return run.finish(weights=weights)


def check_integral_identity(entry, points, momenta, threshold):
    run = CheckRun("integral_identity", threshold)
    for i, point in enumerate(points):
        xi = momenta[i % len(momenta)]
        with run.at(point):
            for partner in entry.solution_basis()[1:]:
                direct = integral_from_partner(entry.g, partner, point, xi)
                weighted = quadratic_integral(entry.g, a_from_metric(partner, point, 1), point, xi)
                run.record(abs(direct - weighted) / max(abs(direct), 1e-300), point)
    return run.finish()


def _eigen_error(fitted, expected):
    fitted = np.sort(np.real(fitted))
    expected = np.sort(np.asarray(expected, dtype=float))
    return float(np.max(np.abs(fitted - expected) / np.maximum(1.0, np.abs(expected))))


def check_lv_fit(entry, points, thresholds):
    """The canonical matrix of L_v on span{a, a_bar} and the nondegeneracy of the fitted matrix."""
    run = CheckRun("lv_fit", thresholds["lv_fit"])
    nondegenerate = CheckRun("lv_nondegenerate", thresholds["lv_nondegenerate"], bound="lower")
    expected = entry.expected
    fit_points = points[:FIT_POINTS]
    try:
        fit = fit_lv_matrix([entry.g, entry.partner], entry.v, fit_points)
    except IllConditionedFit as exc:
        run.rejected = nondegenerate.rejected = len(fit_points)
        return [
            run.finish(error=str(exc), condition=exc.condition_number),
            nondegenerate.finish(error=str(exc), condition=exc.condition_number),
        ]
    errors = {"residual": fit.residual}
    if expected.lam is not None and fit.canonical.lam is not None:
        errors["lam"] = abs(fit.canonical.lam - expected.lam) / max(1.0, abs(expected.lam))
    if expected.scale is not None:
        errors["scale"] = abs(fit.canonical.scale - expected.scale) / max(1.0, abs(expected.scale))
    if expected.kind == "diagonal" and len(expected.eigenvalues) == 2:
        errors["eigenvalues"] = _eigen_error(fit.eigenvalues, expected.eigenvalues)
    target = expected.canonical_matrix()
    if target is not None and fit.canonical.kind == expected.kind:
        found = fit.canonical.scale * fit.canonical.entries
        if expected.kind == "diagonal":
            found = np.diag(sorted(np.diag(found), key=abs, reverse=True))
        errors["entries"] = float(np.max(np.abs(found - target)) / max(1.0, np.max(np.abs(target))))
    details = {
        "expected_kind": expected.kind,
        "kind": fit.canonical.kind,
        "lam": fit.canonical.lam,
        "scale": fit.canonical.scale,
        "matrix": fit.matrix,
        "condition": fit.condition,
        "errors": errors,
    }
    if expected.matrix3 is not None:
        triple = fit_lv_matrix(entry.solution_basis(), entry.v, fit_points)
        errors["triple_residual"] = triple.residual
        errors["triple_eigenvalues"] = _eigen_error(triple.eigenvalues, np.diag(expected.matrix3))
        details["matrix3"] = triple.matrix
    value = max(errors.values())
    if fit.canonical.kind != expected.kind:
        value = np.inf
    run.record(value)
    nondegenerate.record(abs(np.linalg.det(fit.matrix)))
    return [run.finish(**details), nondegenerate.finish(matrix=fit.matrix)]


def check_homothety(entry, points, threshold):
    """Fits one constant k with L_v g = k g over all points; the fit is exact only for homotheties."""
    k_expected = entry.expected.homothety
    run = CheckRun("homothety", threshold, bound="upper" if k_expected is not None else "lower")
    pairs = []
    for point in points:
        with run.at(point):
            lie = lie_derivative_metric(entry.g, entry.v, point, degree=1).matrix().astype(float)
            pairs.append((point, lie, entry.g.values(point)))
    if not pairs:
        return run.finish()
    k = sum(np.sum(lie * g) for _, lie, g in pairs) / sum(np.sum(g * g) for _, _, g in pairs)
    for point, lie, g in pairs:
        value = np.linalg.norm(lie - k * g) / np.linalg.norm(g)
        if k_expected is not None:
            value = max(value, abs(k - k_expected) / max(1.0, abs(k_expected)))
        run.record(value, point)
    return run.finish(fitted_factor=k, expected_factor=k_expected)


def _geodesic_time(domain):
    return GEODESIC_TIME_FRACTION * min(domain.x_range[1] - domain.x_range[0], domain.y_range[1] - domain.y_range[0])


def check_geodesics(entry, starts, thresholds):
    """Geodesic matching of g with each partner and conservation of the partner integrals."""
    match = CheckRun("geodesic_match", thresholds["geodesic_match"])
    conservation = CheckRun("integral_conservation", thresholds["integral_conservation"])
    t_end = _geodesic_time(entry.domain)
    partners = entry.solution_basis()[1:]
    clipped, null_starts, energy_drift = 0, 0, 0.0
    for start in starts:
        point = start.position
        with match.at(point):
            trajectory = dynamics.geodesic_integrate(entry.g, start, t_end, domain=entry.domain)
            clipped += trajectory.exited
            energy_drift = max(energy_drift, trajectory.energy_drift)
            deviations = []
            for partner in partners:
                other = dynamics.geodesic_integrate(partner, start, t_end, domain=entry.domain)
                deviations.append(dynamics.unparameterized_match(trajectory, other))
            match.record(max(deviations), point)
            with conservation.at(point):
                for partner in partners:
                    result = dynamics.conservation_check(entry.g, partner, trajectory)
                    null_starts += result.null_start
                    conservation.record(result.drift, point)
    return (
        match.finish(t_end=t_end, clipped=clipped, energy_drift=energy_drift),
        conservation.finish(null_starts=null_starts),
    )


def check_killing(entry, points, threshold):
    run = CheckRun("killing", threshold, bound="lower")
    for point in points:
        with run.at(point):
            first, second = analysis.killing_obstruction(entry.g, point)
            run.record(min(abs(first), abs(second)), point)
    return run.finish()


def check_prolongation(entry, seed, thresholds):
    """Homogeneous determinant on the mu-grid in adapted coordinates, with eigenvalue controls."""
    adapted = adapted_case(entry)
    points = sample_points(adapted.domain, PROLONGATION_POINTS, seed)
    zeros = tuple(float(mu) for mu in entry.expected.eigenvalues)
    mus = sorted(set(MU_GRID) | set(zeros))
    generic = CheckRun("prolongation_homogeneous", thresholds["prolongation_homogeneous"], bound="lower")
    control = CheckRun("prolongation_control", thresholds["prolongation_control"])
    closed = CheckRun("prolongation_closed_form", thresholds["prolongation_closed_form"])
    for x, y in points:
        with generic.at((x, y)):
            K = analysis.adapted_connection(adapted, y, x=x)
            for mu in mus:
                rows = analysis.prolongation_rows_homogeneous(K, mu)
                scale = max(float(np.prod(np.linalg.norm(rows.m, axis=1))), 1e-300)
                is_zero = any(abs(mu - zero) <= 1e-9 * max(1.0, abs(zero)) for zero in zeros)
                (control if is_zero else generic).record(abs(rows.det) / scale, (x, y))
                reference = analysis.homogeneous_determinant_closed_form(K, mu)
                closed.record(abs(rows.det - reference) / scale, (x, y))
    return [
        generic.finish(mu_grid=[mu for mu in mus if mu not in zeros]),
        control.finish(expected_zeros=list(zeros)),
        closed.finish(),
    ]


def check_inhomogeneous(entry, threshold):
    run = CheckRun("inhomogeneous_branch", threshold)
    c = entry.params.c
    for y in INHOMOGENEOUS_YS:
        with run.at((0.0, y)):
            rows = analysis.inhomogeneous_branch_1a(c, y)
            scale = max(float(np.prod(np.linalg.norm(rows.m, axis=1))), 1e-300)
            closed = analysis.substituted_determinant_closed_form(c, y)
            substituted = abs(rows.det_b - closed) / max(abs(closed), 1e-300)
            run.record(max(abs(rows.det) / scale, substituted), (0.0, y))
    return run.finish(c=c, ys=INHOMOGENEOUS_YS)


def check_integral_ode(entry, points, threshold):
    admits = entry.case_id is CaseId.NULL_SPECIAL
    run = CheckRun("integral_ode", threshold, bound="upper" if admits else "lower")
    ys = sorted({round(float(y), 12) for _, y in points})
    try:
        witness = analysis.integral_dimension_witness(entry.profile, ys, tolerance=threshold)
    except POINT_ERRORS as exc:
        run.rejected = len(ys)
        return run.finish(error=str(exc))
    value = witness.smallest_singular
    if admits:
        value = max(value, float(np.max(np.abs(witness.direction - np.array([1.0, 0.0, 0.75, 0.0])))))
    run.record(value)
    return run.finish(direction=witness.direction, smallest_singular=witness.smallest_singular, ys=len(ys))


def check_solution_dimension(entry, points, threshold):
    run = CheckRun("solution_dimension", threshold, bound="lower")
    columns = [[] for _ in entry.solution_basis()]
    used = 0
    for point in points:
        with run.at(point):
            values = [a_from_metric(m, point, 1).matrix().astype(float) for m in entry.solution_basis()]
            for column, a in zip(columns, values):
                column.extend((a[0, 0], a[0, 1], a[1, 1]))
            used += 1
    if used:
        X = np.array(columns).T
        X = X / np.linalg.norm(X, axis=0)
        run.record(np.linalg.det(X.T @ X))
    return run.finish(points=used)


def run_case_suite(entry, config):
    """Every check that applies to a catalog case."""
    tolerances = config.tolerances
    points = sample_points(entry.domain, config.samples, config.seed)
    momenta = sample_momenta(max(len(points), 1) * MOMENTA_PER_POINT, config.seed)
    rng = np.random.default_rng([config.seed, 4])
    metrics = entry.solution_basis()

    records = [
        check_metrizability(entry.g, metrics, points, tolerances["metrizability"]),
        check_combination(entry, points, rng, tolerances["combination"]),
        check_integral_identity(entry, points, momenta, tolerances["integral_identity"]),
        check_bracket(
            entry.g, [partner_integral(entry.g, m) for m in metrics[1:]], points, momenta, tolerances["bracket"]
        ),
        check_homothety(entry, points, tolerances["homothety"]),
    ]
    records.extend(check_lv_fit(entry, points, tolerances))
    starts = sample_starts(entry.domain, config.geodesic_starts, config.seed)
    records.extend(check_geodesics(entry, starts, tolerances))
    records.append(check_classification(entry.g, entry.partner, entry.expected_class, points, tolerances["classification"]))
    if entry.family in ("liouville", "complex"):
        killing_points = sample_points(entry.domain, config.killing_samples, config.seed, stream=3)
        records.append(check_killing(entry, killing_points, tolerances["killing"]))
    if entry.family == "liouville":
        records.extend(check_prolongation(entry, config.seed, tolerances))
    if entry.case_id is CaseId.LIOUVILLE_JORDAN:
        records.append(check_inhomogeneous(entry, tolerances["inhomogeneous_branch"]))
    if entry.family == "jordan":
        records.append(check_integral_ode(entry, points, tolerances["integral_ode"]))
    if entry.tilde is not None:
        records.append(check_solution_dimension(entry, points, tolerances["solution_dimension"]))
    return records


def run_normal_form_suite(form, config):
    """Checks of a normal form: solutions, the integral and, in null coordinates, its structure."""
    tolerances = config.tolerances
    points = sample_points(form.domain, config.samples, config.seed)
    momenta = sample_momenta(len(points) * MOMENTA_PER_POINT, config.seed)
    records = [
        check_metrizability(form.g, [form.g, form.gbar], points, tolerances["metrizability"]),
        check_bracket(form.g, [form.integral], points, momenta, tolerances["bracket"]),
        check_classification(form.g, form.gbar, form.expected_class, points, tolerances["classification"]),
    ]
    if form.kind != "liouville":
        run = CheckRun("null_form", tolerances["null_form"])
        for point in points:
            with run.at(point):
                result = analysis.birkhoff_form_check(form.g, form.integral, point)
                run.record(max(abs(result.a_y), abs(result.c_x)), point)
        records.append(run.finish())
    return records


def build_subject(case):
    """The catalog entry or normal form a CaseSpec names."""
    if case.id.startswith(NORMAL_FORM_PREFIX):
        kind = case.id.removeprefix(NORMAL_FORM_PREFIX)
        return normal_form(kind, sign=case.params.sign, **case.functions)
    return make_case(case.id, case.params)


def run_case(case, config):
    subject = build_subject(case)
    logger.info("Running suite for %s", case.id)
    if case.id.startswith(NORMAL_FORM_PREFIX):
        checks = run_normal_form_suite(subject, config)
        params = {"sign": case.params.sign, **case.functions}
    else:
        checks = run_case_suite(subject, config)
        params = case.params.as_dict()
    return CaseResult(case.id, params, checks)


def run_config(config):
    return [run_case(case, config) for case in config.cases]
