from django.core.management.base import BaseCommand, CommandError

from ekman.config import load_config
from ekman.exceptions import ConfigError, EkmanError, NotConvergedError, ParameterError

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_NOT_CONVERGED = 3


def command_error(exc):
    """Map a simulator error onto a CommandError carrying the documented exit code."""
    if isinstance(exc, NotConvergedError):
        return CommandError(str(exc), returncode=EXIT_NOT_CONVERGED)
    if isinstance(exc, (ConfigError, ParameterError)):
        return CommandError(str(exc), returncode=EXIT_VALIDATION)
    return CommandError(str(exc), returncode=EXIT_RUNTIME)


def load_or_fail(path, overrides=None):
    try:
        return load_config(path, overrides)
    except ConfigError as exc:
        raise command_error(exc) from exc


class EkmanCommand(BaseCommand):
    """Base for the simulator subcommands: a required --config and error translation."""
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='run configuration file (section.key = value)')

    def execute(self, *args, **options):
        try:
            return super().execute(*args, **options)
        except (EkmanError, OSError) as exc:
            raise command_error(exc) from exc
