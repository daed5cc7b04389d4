import logging

from ekman.config import describe
from ekman.exceptions import SolverError
from ekman.management.base import EkmanCommand, command_error, load_or_fail
from ekman.models import smallness_constant
from ekman.runs import RunDirectory, RunManifest, SeriesWriter, timestamp
from ekman.snapshots import write_snapshot
from ekman.solver import full_velocity, simulate

logger = logging.getLogger(__name__)


class Command(EkmanCommand):
    help = ("Integrate the difference v - v_E in time, streaming diagnostics to series.csv, "
            "snapshots to *.pesn and finishing with manifest.txt.")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--out-dir', required=True, help='output directory, owned exclusively by this run')
        parser.add_argument('--seed', type=int, help='override init.seed')

    def handle(self, *args, **options):
        params, sim = load_or_fail(options['config'], {'init.seed': options.get('seed')})
        verdict = smallness_constant(params)

        with RunDirectory(options['out_dir']) as run:
            manifest = RunManifest(
                config=describe(params, sim), seed=sim.initial.seed,
                c_e=verdict.value, c_e_stable=verdict.stable,
                extra={'initial_smoothing': 'implicit-half-step'},
            )
            series = SeriesWriter(run.series_path)

            def save_snapshot(velocity, t, step):
                write_snapshot(velocity, t, run.snapshot_path(step))

            try:
                trajectory = simulate(sim, params, on_record=series.write, on_snapshot=save_snapshot)
                write_snapshot(full_velocity(trajectory.op, trajectory.state.v_d),
                               trajectory.state.t, run.final_snapshot_path)
            except SolverError as exc:
                logger.error("run failed: %s", exc)
                manifest.status = 'failed'
                manifest.failed_step = exc.step_index
                manifest.error = exc
                manifest.finished_at = timestamp()
                manifest.write(run.manifest_path)
                raise command_error(exc) from exc
            finally:
                series.close()

            manifest.status = 'completed'
            manifest.finished_at = timestamp()
            manifest.extra['steps'] = trajectory.state.step_index
            manifest.write(run.manifest_path)

        self.stdout.write(self.style.SUCCESS(
            f"{trajectory.state.step_index} steps to t = {trajectory.state.t:g}; "
            f"{len(trajectory.records)} records in {run.series_path}"))
