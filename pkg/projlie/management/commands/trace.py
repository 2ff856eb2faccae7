from django.core.management.base import CommandError

from projlie.catalog import NormalForm
from projlie.dynamics import PhasePoint, catalog_integrals, geodesic_integrate, trajectory_frame
from projlie.exceptions import DomainError, DomainExit, StepUnderflow
from projlie.geometry import flat_metric
from projlie.management.base import CHECK_FAILURE, CONFIG_ERROR, ProjlieCommand
from projlie.reports import render_report
from projlie.suites import build_subject


class Command(ProjlieCommand):
    help = "Integrate one geodesic and export it as CSV with the integral values along it."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--case", help="Case id; the first config case is used when omitted")
        parser.add_argument("--start", nargs=2, type=float, required=True, metavar=("X", "Y"))
        direction = parser.add_mutually_exclusive_group()
        direction.add_argument("--velocity", nargs=2, type=float, metavar=("VX", "VY"))
        direction.add_argument("--momentum", nargs=2, type=float, metavar=("PX", "PY"))
        parser.add_argument("--t-end", type=float, default=1.0)
        parser.add_argument("--flat", action="store_true", help="Trace the flat metric instead of a case")

    def metric_and_integrals(self, options):
        """(g, domain, integrals, out) of the traced subject."""
        if options["flat"]:
            g = flat_metric()
            return g, None, {"flat": g}, options["out"]
        config = self.run_config(options, [options["case"]] if options["case"] else [])
        subject = build_subject(config.cases[0])
        if isinstance(subject, NormalForm):
            integrals = {"g": subject.g, "g_bar": subject.gbar, "F": subject.integral}
            return subject.g, subject.domain, integrals, config.out
        return subject.g, subject.domain, catalog_integrals(subject), config.out

    def start(self, options):
        position = tuple(options["start"])
        if options["momentum"]:
            return PhasePoint.momentum(position, options["momentum"])
        return PhasePoint(position, tuple(options["velocity"] or (1.0, 0.0)))

    def handle(self, *args, **options):
        g, domain, integrals, out = self.metric_and_integrals(options)
        start = self.start(options)

        domain_exit = None
        try:
            trajectory = geodesic_integrate(g, start, options["t_end"], domain=domain, on_exit="raise")
        except DomainError as exc:
            raise CommandError(str(exc), returncode=CONFIG_ERROR)
        except DomainExit as exc:
            if exc.trajectory is None:
                raise CommandError(str(exc), returncode=CHECK_FAILURE)
            trajectory = exc.trajectory
            domain_exit = str(exc)
        except StepUnderflow as exc:
            raise CommandError(str(exc), returncode=CHECK_FAILURE)

        frame = trajectory_frame(g, trajectory, integrals)
        if options["json"]:
            payload = {
                "metric": g.name,
                "representation": start.representation,
                "points": len(trajectory),
                "energy_drift": trajectory.energy_drift,
                "domain_exit": domain_exit,
                "trajectory": frame.to_dict(orient="records"),
            }
            text = render_report(payload).decode()
        else:
            trailer = [] if domain_exit is None else [f"# DomainExit: {domain_exit}"]
            trailer.append(f"# metric: {g.name}, points: {len(trajectory)}, energy drift: {trajectory.energy_drift:.3e}")
            text = frame.to_csv(index=False, float_format="%.17g") + "\n".join(trailer) + "\n"
        self.emit(text, out)
