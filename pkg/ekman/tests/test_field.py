import math

import numpy as np
from django.test import SimpleTestCase

from ekman.field import (Field, Grid, Space, boundary_residuals, dealias, diff, fractional_h32_norm,
                         inner, lp_norm, random_field, sobolev_norm, vertical_integral)
from ekman.hydrostatics import vertical_average
from ekman.tests.helpers import make_grid


class GridTests(SimpleTestCase):
    def test_rejects_odd_or_small_sizes(self):
        with self.assertRaises(ValueError):
            Grid(9, 8, 16, 1.0, 1.0, 1.0)
        with self.assertRaises(ValueError):
            Grid(6, 8, 16, 1.0, 1.0, 1.0)
        with self.assertRaises(ValueError):
            Grid(8, 8, 12, 1.0, 1.0, 1.0)

    def test_nodes_span_the_layer(self):
        grid = Grid(8, 8, 16, 1.0, 1.0, 3.0)
        self.assertEqual(grid.z[0], 0.0)
        self.assertAlmostEqual(grid.z[-1], -3.0, places=14)

    def test_quadrature_is_exact_for_polynomials(self):
        grid = Grid(8, 8, 16, 1.0, 1.0, 2.0)
        self.assertAlmostEqual(grid.weights.sum(), 2.0, places=13)
        self.assertAlmostEqual(grid.weights @ grid.z ** 2, 8.0 / 3.0, places=12)

    def test_differentiation_is_exact_for_polynomials(self):
        grid = Grid(8, 8, 16, 1.0, 1.0, 2.0)
        z = grid.z
        np.testing.assert_allclose(grid.diff_matrix(1) @ z ** 3, 3 * z ** 2, atol=1e-10)
        np.testing.assert_allclose(grid.diff_matrix(2) @ z ** 4, 12 * z ** 2, atol=1e-9)

    def test_antiderivative_starts_at_bottom(self):
        grid = Grid(8, 8, 16, 1.0, 1.0, 1.0)
        integral = grid.integration_matrix @ np.ones(17)
        np.testing.assert_allclose(integral, grid.z + 1.0, atol=1e-13)


class FieldTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid()

    def test_transform_round_trip(self):
        fld = random_field(self.grid, 3, 1.0, 2.0)
        back = fld.spectral().physical()
        np.testing.assert_allclose(back.data, fld.physical().data, atol=1e-14)

    def test_arithmetic_mixes_spaces(self):
        fld = random_field(self.grid, 1, 1.0, 2.0)
        total = fld.physical() + fld.spectral()
        np.testing.assert_allclose(total.physical().data, 2 * fld.physical().data, atol=1e-14)
        self.assertLess(lp_norm(fld - fld, math.inf), 1e-15)

    def test_arithmetic_rejects_other_grid(self):
        other = make_grid()
        with self.assertRaises(ValueError):
            Field.zeros(self.grid) + Field.zeros(other)

    def test_horizontal_derivative(self):
        fld = Field.from_function(self.grid, lambda x, y, z: (np.sin(2 * x) * np.cos(y), 0 * x))
        expected = 2 * np.cos(2 * fld.grid.x)[:, None] * np.cos(fld.grid.y)[None, :]
        derivative = diff(fld, 'x').physical().data[0]
        np.testing.assert_allclose(derivative, np.repeat(expected[..., None], 17, axis=-1), atol=1e-12)

    def test_unknown_axis(self):
        with self.assertRaises(ValueError):
            diff(Field.zeros(self.grid), 'w')

    def test_vertical_integral(self):
        ones = Field.from_function(self.grid, lambda x, y, z: (1 + 0 * z, 0 * z))
        column = vertical_integral(ones, full=True)
        np.testing.assert_allclose(column[0], self.grid.h, atol=1e-13)
        running = vertical_integral(ones).data[0, 0, 0]
        np.testing.assert_allclose(running, self.grid.z + self.grid.h, atol=1e-13)

    def test_sobolev_norms_of_analytic_field(self):
        # v = (sin x (1 - z^2), 0) on h = 1, L = 2 pi
        fld = Field.from_function(self.grid, lambda x, y, z: (np.sin(x) * (1 - z ** 2), 0 * x))
        area = 2 * math.pi ** 2
        self.assertAlmostEqual(sobolev_norm(fld, 0) ** 2, area * 8 / 15, places=11)
        self.assertAlmostEqual(sobolev_norm(fld, 1) ** 2, area * (8 / 15 + 8 / 15 + 4 / 3), places=11)
        self.assertAlmostEqual(fractional_h32_norm(fld) ** 2, sobolev_norm(fld, 1) * sobolev_norm(fld, 2),
                               places=11)

    def test_sobolev_order_limits(self):
        with self.assertRaises(ValueError):
            sobolev_norm(Field.zeros(self.grid), 5)

    def test_norms_converge_spectrally(self):
        exact = math.sqrt(2 * math.pi ** 2 * (1 - math.exp(-2)) / 2)
        exact_h2 = math.sqrt(6 * math.pi ** 2 * (1 - math.exp(-2)))
        for nz in (16, 24, 32, 48):
            grid = make_grid(nz=nz)
            fld = Field.from_function(grid, lambda x, y, z: (np.sin(x) * np.exp(z), 0 * x))
            self.assertLess(abs(sobolev_norm(fld, 0) - exact), 1e-10)
            self.assertLess(abs(sobolev_norm(fld, 2) - exact_h2), 1e-9)

    def test_lp_norms_of_constant(self):
        fld = Field.from_function(self.grid, lambda x, y, z: (3.0 + 0 * z, 4.0 + 0 * z))
        volume = 4 * math.pi ** 2 * self.grid.h
        self.assertAlmostEqual(lp_norm(fld, math.inf), 5.0, places=13)
        self.assertAlmostEqual(lp_norm(fld, 2), 5.0 * volume ** 0.5, places=11)
        self.assertAlmostEqual(lp_norm(fld, 4), 5.0 * volume ** 0.25, places=11)
        with self.assertRaises(ValueError):
            lp_norm(fld, 3)

    def test_inner_product_matches_norm(self):
        fld = random_field(self.grid, 5, 2.0, 1.0)
        self.assertAlmostEqual(inner(fld, fld) / sobolev_norm(fld, 0) ** 2, 1.0, places=12)

    def test_dealias_removes_high_modes(self):
        high = Field.from_function(self.grid, lambda x, y, z: (np.sin(3 * x) + 0 * z, 0 * x))
        low = Field.from_function(self.grid, lambda x, y, z: (np.sin(2 * x) + 0 * z, np.cos(2 * y) + 0 * z))
        self.assertLess(lp_norm(dealias(high), math.inf), 1e-14)
        np.testing.assert_allclose(dealias(low).physical().data, low.data, atol=1e-14)


class RandomFieldTests(SimpleTestCase):
    def setUp(self):
        self.grid = make_grid()

    def test_seeded_fields_repeat(self):
        a = random_field(self.grid, 42, 1.0, 2.0).physical().data
        b = random_field(self.grid, 42, 1.0, 2.0).physical().data
        c = random_field(self.grid, 43, 1.0, 2.0).physical().data
        self.assertTrue(np.array_equal(a, b))
        self.assertFalse(np.array_equal(a, c))

    def test_amplitude_and_boundaries(self):
        fld = random_field(self.grid, 7, 0.5, 2.0)
        self.assertAlmostEqual(lp_norm(fld, math.inf), 0.5, places=13)
        top, bottom = boundary_residuals(fld)
        self.assertLess(top, 1e-12)
        self.assertLess(bottom, 1e-12)

    def test_solenoidal_average(self):
        fld = random_field(self.grid, 7, 1.0, 2.0, solenoidal=True)
        self.assertLess(np.max(np.abs(vertical_average(fld).divergence())), 1e-13)
        self.assertLess(max(boundary_residuals(fld)), 1e-12)

    def test_spectrum_follows_physical_wavenumber(self):
        wide = Grid(8, 8, 16, 4 * math.pi, 4 * math.pi, 1.0)
        a = random_field(self.grid, 7, 1.0, 2.0).spectral().data
        b = random_field(wide, 7, 1.0, 2.0).spectral().data
        ratio = (np.linalg.norm(b[:, 1, 0]) / np.linalg.norm(a[:, 1, 0])) / (
            np.linalg.norm(b[:, 0, 0]) / np.linalg.norm(a[:, 0, 0]))
        # |k| = 1 on the 2*pi box and 1/2 on the 4*pi box
        self.assertAlmostEqual(ratio, (2.0 / 1.5) ** 2, places=10)

    def test_zero_amplitude(self):
        fld = random_field(self.grid, 7, 0.0, 2.0)
        self.assertIs(fld.space, Space.SPECTRAL)
        self.assertFalse(np.any(fld.data))

    def test_negative_amplitude_rejected(self):
        with self.assertRaises(ValueError):
            random_field(self.grid, 7, -1.0, 2.0)
