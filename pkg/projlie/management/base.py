"""Options and output handling shared by the projlie management commands."""

from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from projlie.config import cases_config, load_config
from projlie.exceptions import ConfigError, ParamConstraintViolation

CONFIG_ERROR = 2
CHECK_FAILURE = 1


class ProjlieCommand(BaseCommand):
    def add_arguments(self, parser):
        parser.add_argument("--config", help="TOML run configuration")
        parser.add_argument("--seed", type=int, help="Seed of the deterministic sampler; overrides the config")
        parser.add_argument("--out", help="Output path; overrides the config")
        parser.add_argument("--json", action="store_true", help="Write JSON instead of text to stdout")

    def config_error(self, exc):
        return CommandError(str(exc), returncode=CONFIG_ERROR)

    def run_config(self, options, case_ids=()):
        """The config file when given, otherwise a config for the cases named on the command line."""
        try:
            if options.get("config"):
                config = load_config(options["config"])
            elif case_ids:
                config = cases_config(case_ids)
            else:
                raise ConfigError("No cases to run: pass --config or name a case")
        except (ConfigError, ParamConstraintViolation) as exc:
            raise self.config_error(exc)
        return config.with_overrides(seed=options.get("seed"), out=options.get("out"))

    def emit(self, text, out=None):
        """Write text to the output file when one is set, else to stdout."""
        if out:
            Path(out).write_text(text)
            self.stdout.write(f"Wrote {out}")
        else:
            self.stdout.write(text, ending="" if text.endswith("\n") else "\n")
