import csv
import math
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from ekman.models import smallness_constant
from ekman.runs import read_manifest, read_series
from ekman.serializers import SERIES_COLUMNS
from ekman.snapshots import read_snapshot
from ekman.tests.helpers import make_params, write_config

WIND = {'tau': (0.02, 0.01), 'v_g': (0.01, 0.0)}


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.directory = Path(self._tmp.name)

    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(*args)
        self.assertEqual(ctx.exception.returncode, code)
        return ctx.exception


class CheckCommandTests(CommandTestCase):
    def test_no_forcing_passes(self):
        path = write_config(self.directory)
        output = self.run_command('check', '--config', str(path))
        self.assertIn('C_E = 0', output)
        self.assertIn('d = ', output)
        self.assertIn('PASS', output)

    def test_strong_wind_fails(self):
        base = smallness_constant(make_params(tau=(0.02, 0.0))).value
        scale = math.sqrt(4.0 / base)
        path = write_config(self.directory, physics={'tau': (0.02 * scale, 0.0)})
        error = self.assertExitCode(1, 'check', '--config', str(path))
        self.assertIn('C_E', str(error))

    def test_zero_rotation_rejected(self):
        path = write_config(self.directory, physics={'f': 0.0})
        error = self.assertExitCode(1, 'check', '--config', str(path))
        self.assertIn('Ekman thickness undefined', str(error))

    def test_invalid_config_rejected(self):
        path = write_config(self.directory, physics={'nu_z': -1.0})
        error = self.assertExitCode(1, 'check', '--config', str(path))
        self.assertIn('physics.nu_z', str(error))

    def test_system_checks_without_config(self):
        self.run_command('check')


class EkmanCommandTests(CommandTestCase):
    def read_rows(self, path):
        with path.open(encoding='utf-8', newline='') as stream:
            return list(csv.DictReader(stream))

    def test_endpoints_carry_boundary_values(self):
        config = write_config(self.directory, physics=WIND)
        out = self.directory / 'spiral.csv'
        self.run_command('ekman', '--config', str(config), '--samples', '2', '--out', str(out))
        bottom, top = self.read_rows(out)
        self.assertEqual(float(bottom['z']), -1.0)
        self.assertAlmostEqual(float(bottom['v1']), 0.01, places=12)
        self.assertAlmostEqual(float(bottom['v2']), 0.0, places=12)
        self.assertEqual(float(top['z']), 0.0)
        self.assertAlmostEqual(float(top['dv1dz']), 0.02, places=12)
        self.assertAlmostEqual(float(top['dv2dz']), 0.01, places=12)

    def test_no_forcing_gives_zeros(self):
        config = write_config(self.directory)
        out = self.directory / 'spiral.csv'
        self.run_command('ekman', '--config', str(config), '--out', str(out))
        rows = self.read_rows(out)
        self.assertEqual(len(rows), 101)
        for row in rows:
            self.assertEqual([float(row[name]) for name in ('v1', 'v2', 'dv1dz', 'dv2dz')], [0.0] * 4)

    def test_single_sample_rejected(self):
        config = write_config(self.directory)
        out = self.directory / 'spiral.csv'
        self.assertExitCode(1, 'ekman', '--config', str(config), '--samples', '1', '--out', str(out))
        self.assertFalse(out.exists())


class SimulateCommandTests(CommandTestCase):
    def simulate(self, name, **sections):
        config = write_config(self.directory, name=f'{name}.cfg', **sections)
        out_dir = self.directory / name
        self.run_command('simulate', '--config', str(config), '--out-dir', str(out_dir))
        return out_dir

    def test_run_directory_contents(self):
        out_dir = self.simulate('run', physics=WIND, init={'seed': 3, 'amplitude': 0.1},
                                sim={'snapshot_cadence': 5})
        header = (out_dir / 'series.csv').read_text().splitlines()[0]
        self.assertEqual(header, ','.join(SERIES_COLUMNS))
        records = read_series(out_dir / 'series.csv')
        self.assertEqual([round(r.t, 10) for r in records], [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
        self.assertGreater(records[0].h1, records[-1].h1)

        manifest = read_manifest(out_dir / 'manifest.txt')
        self.assertEqual(manifest['status'], 'completed')
        self.assertEqual(manifest['seed'], '3')
        self.assertEqual(manifest['c_e_stable'], 'true')
        self.assertEqual(manifest['steps'], '10')
        self.assertEqual(manifest['initial_smoothing'], 'implicit-half-step')

        final = read_snapshot(out_dir / 'final.pesn')
        self.assertEqual(final.grid.shape, (2, 8, 8, 17))
        self.assertTrue((out_dir / 'snapshot_00000005.pesn').exists())
        self.assertFalse((out_dir / '.lock').exists())

    def test_zero_amplitude_stays_at_equilibrium(self):
        out_dir = self.simulate('rest', physics=WIND)
        self.assertTrue(all(r.h1 <= 1e-10 for r in read_series(out_dir / 'series.csv')))

    def test_same_seed_same_series(self):
        first = self.simulate('first', init={'seed': 9, 'amplitude': 0.2})
        second = self.simulate('second', init={'seed': 9, 'amplitude': 0.2})
        self.assertEqual((first / 'series.csv').read_bytes(), (second / 'series.csv').read_bytes())

    def test_locked_directory(self):
        config = write_config(self.directory)
        out_dir = self.directory / 'busy'
        out_dir.mkdir()
        (out_dir / '.lock').write_text('1')
        self.assertExitCode(2, 'simulate', '--config', str(config), '--out-dir', str(out_dir))

    def test_solver_failure_is_recorded(self):
        config = write_config(self.directory, physics={'f': 0.01},
                              sim={'dt': 0.1, 't_end': 1.0}, init={'seed': 1, 'amplitude': 100.0})
        out_dir = self.directory / 'unstable'
        error = self.assertExitCode(2, 'simulate', '--config', str(config), '--out-dir', str(out_dir))
        self.assertIn('CFL violation', str(error))
        manifest = read_manifest(out_dir / 'manifest.txt')
        self.assertEqual(manifest['status'], 'failed')
        self.assertEqual(manifest['failed_step'], '1')
        self.assertEqual(len(read_series(out_dir / 'series.csv')), 1)
        self.assertFalse((out_dir / '.lock').exists())


class SpectrumCommandTests(CommandTestCase):
    def test_matches_vertical_diffusion_rate(self):
        config = write_config(self.directory)
        output = self.run_command('spectrum', '--config', str(config), '--horizon', '2',
                                  '--dt', '0.02', '--krylov', '20')
        values = dict(line.split(' = ', 1) for line in output.splitlines() if ' = ' in line)
        expected = -0.1 * (math.pi / 2) ** 2
        self.assertLess(abs(float(values['omega0']) - expected) / abs(expected), 1e-4)
        self.assertEqual(values['krylov_dim'], '20')
        self.assertIn('converged', output)

    def test_krylov_dimension_validated(self):
        config = write_config(self.directory)
        error = self.assertExitCode(1, 'spectrum', '--config', str(config), '--krylov', '1')
        self.assertIn('spectrum.krylov', str(error))

    def test_not_converged_exit_code(self):
        config = write_config(self.directory)
        self.assertExitCode(3, 'spectrum', '--config', str(config), '--horizon', '0.5',
                            '--dt', '0.05', '--krylov', '2', '--tol', '1e-15')


class VerifyCommandTests(CommandTestCase):
    def test_suite_passes(self):
        config = write_config(self.directory, physics=WIND)
        output = self.run_command('verify', '--config', str(config), '--samples', '5')
        self.assertNotIn('FAIL', output)
        self.assertIn('checks passed', output)
