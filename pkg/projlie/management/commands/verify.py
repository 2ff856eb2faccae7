from django.core.management.base import CommandError

from projlie.management.base import CHECK_FAILURE, ProjlieCommand
from projlie.reports import build_report, render_report, summary_lines
from projlie.suites import run_config


class Command(ProjlieCommand):
    help = "Run the verification suites of the configured cases and write a JSON report."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--case", action="append", default=[], help="Case id when no --config is given (repeatable)")

    def handle(self, *args, **options):
        config = self.run_config(options, options["case"])

        results = run_config(config)
        report = build_report(results, config.seed)
        content = render_report(report)

        if config.out:
            with open(config.out, "wb") as handle:
                handle.write(content)
        if options["json"]:
            self.stdout.write(content.decode())
        else:
            for line in summary_lines(results):
                self.stdout.write(line)

        summary = report["summary"]
        self.stdout.write(f"{summary['passed']} of {summary['total']} checks passed")
        if summary["failed"]:
            failed = [f"{r.id}:{c.name}" for r in results for c in r.checks if not c.passed]
            raise CommandError(f"{summary['failed']} checks failed: {', '.join(failed)}", returncode=CHECK_FAILURE)
