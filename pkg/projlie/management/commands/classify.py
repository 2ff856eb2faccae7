import pandas as pd

from projlie.analysis import classify_pair
from projlie.catalog import NORMAL_FORM_KINDS, NormalForm
from projlie.management.base import ProjlieCommand
from projlie.sampler import sample_points
from projlie.suites import NORMAL_FORM_PREFIX, POINT_ERRORS, build_subject

DEFAULT_POINTS = 20


class Command(ProjlieCommand):
    help = "Classify the pair (g, g_bar) of a case by the eigenstructure of g^-1 g_bar at sample points."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--case", help="Case id; the first config case is used when omitted")
        parser.add_argument("--normal-form", choices=NORMAL_FORM_KINDS, help="Classify a normal form instead")
        parser.add_argument("--scale", type=float, help="Pair g with scale * g instead of its partner")
        parser.add_argument("--points", type=int, default=DEFAULT_POINTS)

    def handle(self, *args, **options):
        case_ids = [NORMAL_FORM_PREFIX + options["normal_form"]] if options["normal_form"] else []
        if options["case"]:
            case_ids = [options["case"]]
        config = self.run_config(options, case_ids)
        subject = build_subject(config.cases[0])
        g = subject.g
        gbar = subject.gbar if isinstance(subject, NormalForm) else subject.partner
        if options["scale"] is not None:
            gbar = g.scaled(options["scale"], name=f"{options['scale']}*g")

        rows = []
        for x, y in sample_points(subject.domain, options["points"], config.seed):
            try:
                result = classify_pair(g, gbar, (x, y))
            except POINT_ERRORS as exc:
                rows.append({"x": x, "y": y, "kind": "rejected", "margin": None, "note": str(exc)})
                continue
            rows.append({"x": x, "y": y, "kind": result.kind, "margin": result.margin, "note": ""})
        frame = pd.DataFrame.from_records(rows, columns=["x", "y", "kind", "margin", "note"])

        if options["json"]:
            text = frame.to_json(orient="records")
        else:
            counts = frame["kind"].value_counts()
            lines = [frame.to_string(index=False), ""]
            lines += [f"{kind}: {count}" for kind, count in counts.items()]
            indeterminate = frame[frame["kind"] == "indeterminate"]
            if len(indeterminate):
                lines.append("indeterminate at " + ", ".join(f"({x:.6g}, {y:.6g})" for x, y in zip(indeterminate["x"], indeterminate["y"])))
            text = "\n".join(lines)
        self.emit(text, config.out)
