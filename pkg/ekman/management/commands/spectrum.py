from ekman.exceptions import NotConvergedError
from ekman.management.base import EkmanCommand, command_error, load_or_fail
from ekman.operators import LinearizedOp, estimate_spectral_bound


class Command(EkmanCommand):
    help = "Estimate the growth bound omega0 of the linearization around the Ekman spiral."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--horizon', type=float, help='propagation horizon H in seconds (default 1/|f|)')
        parser.add_argument('--krylov', type=int, help='Arnoldi steps, at least 2')
        parser.add_argument('--tol', type=float, help='relative Ritz residual accepted as converged')
        parser.add_argument('--dt', type=float, help='time step of the propagator')
        parser.add_argument('--seed', type=int, help='seed of the random start vector (default init.seed)')

    def handle(self, *args, **options):
        params, sim = load_or_fail(options['config'], {
            'spectrum.horizon': options.get('horizon'),
            'spectrum.krylov': options.get('krylov'),
            'spectrum.tol': options.get('tol'),
            'spectrum.dt': options.get('dt'),
            'init.seed': options.get('seed'),
        })
        spectrum = sim.spectrum
        op = LinearizedOp.build(params, sim.grid(params))
        try:
            bound = estimate_spectral_bound(
                op, horizon=spectrum.horizon, krylov_dim=spectrum.krylov_dim,
                tol=spectrum.tol, dt=spectrum.dt, seed=sim.initial.seed,
            )
        except NotConvergedError as exc:
            if exc.estimate is not None:
                self._report(exc.estimate)
            raise command_error(exc) from exc
        self._report(bound)
        self.stdout.write(self.style.SUCCESS("converged"))

    def _report(self, bound):
        self.stdout.write(f"omega0 = {bound.omega0:.17g}")
        self.stdout.write(f"ritz_residual = {bound.residual:.3e}")
        self.stdout.write(f"horizon = {bound.horizon:.17g}")
        self.stdout.write(f"krylov_dim = {bound.krylov_dim}")
        self.stdout.write(f"dt = {bound.dt:.17g}")
        if bound.complex_pair:
            self.stdout.write(self.style.WARNING("dominant Ritz value is a complex pair"))
        if bound.unstable:
            self.stdout.write(self.style.WARNING("unstable regime detected"))
