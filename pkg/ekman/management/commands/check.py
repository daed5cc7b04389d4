from django.core.management.base import CommandError
from django.core.management.commands.check import Command as SystemCheckCommand

from ekman.exceptions import EkmanError
from ekman.management.base import EXIT_VALIDATION, command_error, load_or_fail
from ekman.models import sup_derivative_bound, smallness_constant


class Command(SystemCheckCommand):
    help = ("Report the Ekman layer thickness, spiral coefficients and the smallness "
            "constant C_E of a run configuration (PASS iff C_E < 1). Without --config "
            "the Django system checks run instead.")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--config', help='run configuration file (section.key = value)')

    def handle(self, *app_labels, **options):
        if not options.get('config'):
            return super().handle(*app_labels, **options)

        params, _ = load_or_fail(options['config'])
        try:
            verdict = smallness_constant(params)
            bound = sup_derivative_bound(verdict.solution)
        except EkmanError as exc:
            raise command_error(exc) from exc

        sol = verdict.solution
        self.stdout.write(f"d = {sol.d:.17g}")
        for name in ('k1', 'k2', 'k3', 'k4'):
            self.stdout.write(f"{name} = {getattr(sol, name):.17g}")
        self.stdout.write(f"sup_derivative_bound = {bound:.17g}")
        self.stdout.write(f"C_E = {verdict.value:.17g}")
        if verdict.stable:
            self.stdout.write(self.style.SUCCESS("PASS"))
            return
        self.stdout.write(self.style.ERROR("FAIL"))
        raise CommandError(f"C_E = {verdict.value:.6g} is not below 1", returncode=EXIT_VALIDATION)
