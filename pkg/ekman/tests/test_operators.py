import math

import numpy as np
from django.test import SimpleTestCase

from ekman.exceptions import NotConvergedError, ParameterError
from ekman.field import Field, inner, lp_norm, random_field
from ekman.models import smallness_constant
from ekman.oracles import apply_F_closed_form, dense_apply_A_xz, slowest_diffusive_rate
from ekman.operators import (LinearizedOp, apply_A, apply_F, bilinear_ratio, coriolis,
                             estimate_spectral_bound)
from ekman.tests.helpers import make_grid, make_params


def boundary_field(grid):
    """A smooth y-independent field with d_z v(0) = 0 and v(-h) = 0."""
    def velocity(x, y, z):
        zeta = z / grid.h
        return (np.sin(x) * (1 - zeta ** 2) + 0 * y,
                np.cos(2 * x) * (1 + zeta) * zeta ** 2 + 0 * y)
    return Field.from_function(grid, velocity)


class NonlinearTermTests(SimpleTestCase):
    def test_matches_closed_form(self):
        grid = make_grid(nx=12)
        v = Field.from_function(grid, lambda x, y, z: (np.sin(x) * (z + 1) ** 2, 0 * x))
        result = apply_F(v, v).physical().data
        x, z = np.meshgrid(grid.x, grid.z, indexing='ij')
        expected = apply_F_closed_form(x, z, grid.h)
        scale = np.max(np.abs(expected))
        self.assertLess(np.max(np.abs(result[:, :, 0, :] - expected)) / scale, 1e-10)

    def test_bilinear(self):
        grid = make_grid()
        v = random_field(grid, 1, 1.0, 2.0, solenoidal=True)
        vp = random_field(grid, 2, 1.0, 2.0, solenoidal=True)
        scaled = apply_F(v * 2.0, vp * 3.0)
        self.assertLess(lp_norm(scaled - apply_F(v, vp) * 6.0, math.inf), 1e-12)

    def test_transport_conserves_energy(self):
        grid = make_grid()
        for seed in range(5):
            v = random_field(grid, seed, 1.0, 2.0, solenoidal=True)
            scale = math.sqrt(inner(v, v)) ** 3
            self.assertLessEqual(abs(inner(apply_F(v, v), v)), 1e-9 * scale)


class LinearOperatorTests(SimpleTestCase):
    def test_matches_dense_assembly(self):
        params = make_params(f=0.3)
        grid = make_grid(params, nx=12)
        op = LinearizedOp.build(params, grid)
        v = boundary_field(grid)
        result = apply_A(op, v).physical().data[:, :, 0, :]
        expected = dense_apply_A_xz(params, grid, v.data[:, :, 0, :])
        scale = np.max(np.abs(expected))
        self.assertLess(np.max(np.abs(result - expected)) / scale, 1e-6)

    def test_dissipative_in_stable_regime(self):
        params = make_params(tau=(0.01, 0.0))
        self.assertLess(smallness_constant(params).value, 1.0)
        op = LinearizedOp.build(params, make_grid(params))
        for seed in range(100):
            v = random_field(op.grid, seed, 1.0, 2.0, solenoidal=True)
            self.assertLess(inner(apply_A(op, v), v), 0.0)

    def test_linear(self):
        params = make_params(tau=(0.05, 0.02), v_g=(0.01, 0.0))
        op = LinearizedOp.build(params, make_grid(params))
        u = random_field(op.grid, 1, 1.0, 2.0, solenoidal=True)
        v = random_field(op.grid, 2, 1.0, 2.0, solenoidal=True)
        combined = apply_A(op, u * 2.0 + v * -0.5)
        separate = apply_A(op, u) * 2.0 + apply_A(op, v) * -0.5
        scale = lp_norm(separate, math.inf)
        self.assertLess(lp_norm(combined - separate, math.inf) / scale, 1e-12)

    def test_warns_on_boundary_violation(self):
        params = make_params()
        grid = make_grid(params)
        op = LinearizedOp.build(params, grid)
        v = Field.from_function(grid, lambda x, y, z: (np.sin(x) + 0 * z, 0 * x))
        with self.assertLogs('ekman.operators', level='WARNING'):
            apply_A(op, v)

    def test_coriolis_is_energy_neutral(self):
        v = random_field(make_grid(), 3, 1.0, 2.0)
        self.assertLess(abs(inner(coriolis(v, 0.7), v)), 1e-12)

    def test_grid_depth_must_match(self):
        with self.assertRaises(ParameterError):
            LinearizedOp.build(make_params(h=2.0), make_grid(make_params(h=1.0)))


class BilinearRatioTests(SimpleTestCase):
    def test_zero_field_is_undefined(self):
        self.assertIsNone(bilinear_ratio(Field.zeros(make_grid()), 0))

    def test_homogeneous(self):
        v = random_field(make_grid(), 5, 1.0, 2.0, solenoidal=True)
        for k in (0, 1, 2):
            ratio = bilinear_ratio(v, k)
            self.assertLess(abs(bilinear_ratio(v * 2.0, k) - ratio) / ratio, 1e-11)

    def test_stable_under_vertical_refinement(self):
        for k in (0, 1, 2):
            ratios = [bilinear_ratio(boundary_field(make_grid(nz=nz)), k) for nz in (24, 32, 48)]
            self.assertLess((max(ratios) - min(ratios)) / min(ratios), 0.05)

    def test_order_range(self):
        with self.assertRaises(ValueError):
            bilinear_ratio(Field.zeros(make_grid()), 3)


class SpectralBoundTests(SimpleTestCase):
    def setUp(self):
        self.params = make_params(nu_z=0.1, nu_h=0.5, f=0.1, h=1.0)
        self.op = LinearizedOp.build(self.params, make_grid(self.params))

    def test_matches_vertical_diffusion_rate(self):
        expected = slowest_diffusive_rate(self.params, self.op.grid)
        self.assertAlmostEqual(expected, -0.1 * (math.pi / 2) ** 2, places=14)
        for horizon in (2.0, 4.0):
            bound = estimate_spectral_bound(self.op, horizon=horizon, krylov_dim=20, tol=1e-6, dt=0.02)
            self.assertLess(abs(bound.omega0 - expected) / abs(expected), 1e-4)
            self.assertLessEqual(bound.residual, 1e-6)
            self.assertFalse(bound.unstable)

    def test_wind_driven_bound_is_negative(self):
        params = make_params(tau=(0.01, 0.005), v_g=(0.01, 0.0))
        op = LinearizedOp.build(params, make_grid(params))
        bound = estimate_spectral_bound(op, horizon=2.0, krylov_dim=20, tol=1e-6, dt=0.02)
        self.assertLess(bound.omega0, 0.0)

    def test_krylov_dimension_validated(self):
        with self.assertRaises(ParameterError):
            estimate_spectral_bound(self.op, horizon=1.0, krylov_dim=1)

    def test_not_converged_carries_estimate(self):
        with self.assertRaises(NotConvergedError) as ctx:
            estimate_spectral_bound(self.op, horizon=0.5, krylov_dim=2, tol=1e-15, dt=0.05)
        self.assertIsNotNone(ctx.exception.estimate)
