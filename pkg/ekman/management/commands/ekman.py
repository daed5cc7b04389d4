import csv
from pathlib import Path

import numpy as np
from django.core.management.base import CommandError

from ekman.management.base import EXIT_VALIDATION, EkmanCommand, load_or_fail
from ekman.models import ekman_coefficients
from ekman.serializers import PROFILE_COLUMNS, EkmanProfileSerializer


class Command(EkmanCommand):
    help = "Tabulate the Ekman spiral and its shear at uniformly spaced depths."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--samples', type=int, default=101, help='number of depths, at least 2')
        parser.add_argument('--out', required=True, help='CSV file to write')

    def handle(self, *args, **options):
        samples = options['samples']
        if samples < 2:
            raise CommandError(f"--samples must be at least 2, got {samples}", returncode=EXIT_VALIDATION)
        params, _ = load_or_fail(options['config'])
        sol = ekman_coefficients(params)

        z = np.linspace(-params.h, 0.0, samples)
        velocity = sol.profile(z)
        shear = sol.derivative(z)
        out = Path(options['out'])
        with out.open('w', encoding='utf-8', newline='') as stream:
            writer = csv.DictWriter(stream, fieldnames=PROFILE_COLUMNS, lineterminator='\n')
            writer.writeheader()
            for i in range(samples):
                row = {'z': z[i], 'v1': velocity[0, i], 'v2': velocity[1, i],
                       'dv1dz': shear[0, i], 'dv2dz': shear[1, i]}
                writer.writerow(EkmanProfileSerializer(row).data)
        self.stdout.write(self.style.SUCCESS(f"wrote {samples} rows to {out}"))
