import numpy as np
import pandas as pd
from django.core.management.base import CommandError

from projlie import analysis
from projlie.catalog import CaseId, adapted_case
from projlie.management.base import CHECK_FAILURE, CONFIG_ERROR, ProjlieCommand
from projlie.sampler import sample_points
from projlie.suites import MU_GRID, build_subject

DEFAULT_YS = 8


def _x_inside(domain, y):
    """The first x of the domain box with (x, y) inside the domain."""
    for x in np.linspace(*domain.x_range, 201)[1:-1]:
        if domain.contains(x, y):
            return float(x)
    raise CommandError(f"y = {y} does not meet the domain {domain.description}", returncode=CONFIG_ERROR)


class Command(ProjlieCommand):
    help = "Prolongation determinants of L_v a = mu a over a (mu, y) grid in coordinates with v = d/dx."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--case", help="Liouville case id; the first config case is used when omitted")
        parser.add_argument("--mu", nargs="+", type=float, help="mu values; eigenvalues of L_v are always added")
        parser.add_argument("--ys", nargs="+", type=float, help="y values in adapted coordinates")
        parser.add_argument("--inhomogeneous", action="store_true", help="Sweep the inhomogeneous branch of case 1a")

    def handle(self, *args, **options):
        config = self.run_config(options, [options["case"]] if options["case"] else [])
        case = config.cases[0]
        if case.id not in (CaseId.LIOUVILLE_JORDAN, CaseId.LIOUVILLE_ROTATION, CaseId.LIOUVILLE_DIAGONAL):
            raise CommandError(f"Sweeps need a Liouville case, got {case.id}", returncode=CONFIG_ERROR)
        entry = build_subject(case)
        if options["inhomogeneous"]:
            frame = self.inhomogeneous(entry, options)
        else:
            frame = self.homogeneous(entry, options, config)

        if options["json"]:
            text = frame.to_json(orient="records")
        else:
            text = frame.to_csv(index=False, float_format="%.17g")
        self.emit(text, config.out)

        if "expected_zero" in frame:
            controls = frame[frame["expected_zero"]]
            tolerance = config.tolerance("prolongation_control")
            if len(controls) and controls["relative_det"].max() > tolerance:
                raise CommandError(
                    f"Determinant at an eigenvalue of L_v is {controls['relative_det'].max():.3e} > {tolerance:.1e}",
                    returncode=CHECK_FAILURE,
                )
        if "relative_error" in frame:
            tolerance = config.tolerance("inhomogeneous_branch")
            if frame["relative_error"].max() > tolerance:
                raise CommandError(
                    f"Substituted determinant is off its closed form by {frame['relative_error'].max():.3e} > {tolerance:.1e}",
                    returncode=CHECK_FAILURE,
                )

    def homogeneous(self, entry, options, config):
        adapted = adapted_case(entry)
        if options["ys"]:
            points = [(_x_inside(adapted.domain, y), y) for y in options["ys"]]
        else:
            points = sample_points(adapted.domain, DEFAULT_YS, config.seed)
        zeros = tuple(float(mu) for mu in entry.expected.eigenvalues)
        mus = sorted(set(options["mu"] or MU_GRID) | set(zeros))
        frames = [
            analysis.homogeneous_sweep(lambda y, x=x: analysis.adapted_connection(adapted, y, x=x), mus, [y], zeros)
            for x, y in points
        ]
        return pd.concat(frames, ignore_index=True).sort_values(["mu", "y"], ignore_index=True)

    def inhomogeneous(self, entry, options):
        if entry.case_id is not CaseId.LIOUVILLE_JORDAN:
            raise CommandError("The inhomogeneous branch exists for case 1a only", returncode=CONFIG_ERROR)
        c = entry.params.c
        records = []
        for y in options["ys"] or np.linspace(0.5, 2.0, 16):
            rows = analysis.inhomogeneous_branch_1a(c, y)
            closed = analysis.substituted_determinant_closed_form(c, y)
            records.append(
                {
                    "y": y,
                    "det": rows.det,
                    "det_b": rows.det_b,
                    "closed_form": closed,
                    "relative_error": abs(rows.det_b - closed) / max(abs(closed), 1e-300),
                }
            )
        return pd.DataFrame.from_records(records)
