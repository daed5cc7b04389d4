from django.core.management.base import CommandError

from ekman.management.base import EXIT_RUNTIME, EkmanCommand, load_or_fail
from ekman.verification import run_suite


class Command(EkmanCommand):
    help = "Run the invariant suite on the configured scenario and grid; PASS/FAIL per check."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--samples', type=int, default=100, help='random fields per inequality check')
        parser.add_argument('--seed', type=int, help='first seed of the random fields (default init.seed)')

    def handle(self, *args, **options):
        params, sim = load_or_fail(options['config'], {'init.seed': options.get('seed')})
        checks = run_suite(params, sim.grid(params), samples=max(1, options['samples']),
                           seed=sim.initial.seed)
        for check in checks:
            style = self.style.SUCCESS if check.passed else self.style.ERROR
            self.stdout.write(style(str(check)))
        failed = [check.name for check in checks if not check.passed]
        if failed:
            raise CommandError(f"{len(failed)} check(s) failed: {', '.join(failed)}", returncode=EXIT_RUNTIME)
        self.stdout.write(self.style.SUCCESS(f"all {len(checks)} checks passed"))
