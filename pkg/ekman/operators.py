"""Linearization of the primitive equations around the Ekman spiral."""
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import krylov
from .conf import get_setting
from .exceptions import NotConvergedError, ParameterError
from .field import (Field, Space, boundary_residuals, dealias, diff, fractional_h32_norm,
                    random_field, sobolev_norm, transform)
from .hydrostatics import project, reconstruct_w, vertical_velocity_coefficients
from .models import ekman_coefficients, ekman_derivative, ekman_profile

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class LinearizedOp:
    """The operator A and the coupling terms for one scenario on one grid."""
    params: object
    ekman: object
    grid: object

    @classmethod
    def build(cls, params, grid):
        if not math.isclose(grid.h, params.h, rel_tol=1e-12):
            raise ParameterError(f"grid depth {grid.h:g} differs from physics depth {params.h:g}")
        return cls(params, ekman_coefficients(params), grid)

    @cached_property
    def heights(self):
        return np.clip(self.grid.z, -self.params.h, 0.0)

    @cached_property
    def profile(self):
        """v_E on the vertical nodes, shape (2, N_z + 1)."""
        return ekman_profile(self.ekman, self.heights)

    @cached_property
    def shear(self):
        return ekman_derivative(self.ekman, self.heights)

    def background(self):
        """v_E as a z-dependent, horizontally uniform field."""
        grid = self.grid
        data = np.broadcast_to(self.profile[:, None, None, :], grid.shape).copy()
        return Field(grid, data, Space.PHYSICAL)


@dataclass(frozen=True)
class SpectralBound:
    omega0: float
    ritz_value: complex
    residual: float
    horizon: float
    krylov_dim: int
    dt: float
    complex_pair: bool
    unstable: bool

    def __str__(self):
        return f"omega0 = {self.omega0:.6g} (|lambda| = {abs(self.ritz_value):.6g}, residual {self.residual:.2e})"


def apply_F(v, vp):
    """Dealiased, projected F(v, v') = v . grad_H v' + w(v) d_z v'."""
    grid = v.grid
    v = dealias(v)
    vp = dealias(vp)
    values = transform(v, Space.PHYSICAL).data
    dx = diff(vp, 'x').physical().data
    dy = diff(vp, 'y').physical().data
    dz = diff(vp, 'z').physical().data
    w = reconstruct_w(v)
    product = values[0] * dx + values[1] * dy + w * dz
    return project(dealias(Field(grid, product, Space.PHYSICAL)))


def coriolis(v, f):
    """f v^perp with v^perp = (-v_2, v_1)."""
    data = v.data
    return Field(v.grid, f * np.stack([-data[1], data[0]]), v.space)


def ekman_coupling(op, v):
    """v_E . grad_H v + w(v) d_z v_E, evaluated exactly per mode."""
    grid = op.grid
    data = v.spectral().data
    profile = op.profile[:, None, None, :]
    advection = 1j * (grid.kx_diff[..., None] * profile[0] + grid.ky_diff[..., None] * profile[1])
    w = vertical_velocity_coefficients(v)
    return Field(grid, advection[None] * data + w[None] * op.shear[:, None, None, :], Space.SPECTRAL)


def diffusion(op, v):
    """nu_H Delta_H v + nu_z d_z^2 v (no boundary conditions applied)."""
    grid = op.grid
    data = v.spectral().data
    horizontal = -op.params.nu_h * grid.k2[None, :, :, None] * data
    vertical = op.params.nu_z * (data @ grid.diff_matrix(2).T)
    return Field(grid, horizontal + vertical, Space.SPECTRAL)


def apply_A(op, v):
    """A v = P(nu_H Delta_H v + nu_z d_z^2 v - v_E . grad_H v - w(v) d_z v_E - f v^perp)."""
    top, bottom = boundary_residuals(v)
    scale = 1.0 + sobolev_norm(v, 0)
    if max(top, bottom) > BOUNDARY_TOLERANCE * scale:
        logger.warning("apply_A on a field violating the boundary conditions (top %.2e, bottom %.2e)",
                       top, bottom)
    v = v.spectral()
    total = diffusion(op, v) - ekman_coupling(op, v) - coriolis(v, op.params.f)
    return project(total)


def bilinear_ratio(v, k):
    """Monitored bilinear bound ratio; ``None`` for the zero field.

    k = 0 compares ||F(v, v)||_{L^2} with ||v||_{H^{3/2}}^2; k >= 1 compares
    ||F(v, v)||_{H^k} with ||v||_{H^{k+2}}^{1/2} ||v||_{H^{k+1}} ||v||_{H^k}^{1/2}.
    """
    if k not in (0, 1, 2):
        raise ValueError(f"bilinear ratio is monitored for k in 0..2, got {k}")
    if k == 0:
        denominator = fractional_h32_norm(v) ** 2
    else:
        denominator = (math.sqrt(sobolev_norm(v, k + 2)) * sobolev_norm(v, k + 1)
                       * math.sqrt(sobolev_norm(v, k)))
    if denominator == 0:
        return None
    return sobolev_norm(apply_F(v, v), k) / denominator


def default_propagator_step(params, horizon):
    """Largest dt with at most 0.01 of rotation or vertical decay per step, and 10 steps minimum."""
    rate = max(abs(params.f), params.nu_z * (math.pi / (2 * params.h)) ** 2)
    return horizon / max(10, math.ceil(horizon * rate / 0.01))


def estimate_spectral_bound(op, horizon=None, krylov_dim=None, tol=None, dt=None, seed=0):
    """Growth bound omega0 = ln|lambda_max| / H of the propagator e^{H A}.

    The propagator is the linear-mode time stepper; its dominant eigenvalue is
    approximated by Arnoldi with ``krylov_dim`` steps from a seeded random
    admissible field.
    """
    from .solver import propagate_linear

    params = op.params
    horizon = 1.0 / abs(params.f) if horizon is None else float(horizon)
    krylov_dim = int(get_setting('KRYLOV_DIM') if krylov_dim is None else krylov_dim)
    tol = float(get_setting('SPECTRUM_TOL') if tol is None else tol)
    if not math.isfinite(horizon) or horizon <= 0:
        raise ParameterError(f"horizon must be positive, got {horizon!r}")
    if krylov_dim < 2:
        raise ParameterError(f"Krylov dimension must be at least 2, got {krylov_dim}")
    if dt is None:
        dt = default_propagator_step(params, horizon)

    grid = op.grid
    start = random_field(grid, seed, 1.0, 2.0, solenoidal=True)

    def propagate(vector):
        fld = Field(grid, vector.reshape(grid.shape), Space.PHYSICAL)
        return propagate_linear(op, fld, horizon, dt).physical().data.ravel()

    logger.info("Arnoldi on the propagator: horizon %g, dt %g, %d steps", horizon, dt, krylov_dim)
    result = krylov.arnoldi(propagate, start.physical().data.ravel(), krylov_dim)
    values, residuals = krylov.ritz_pairs(result)
    index = int(np.argmax(np.abs(values)))
    value = complex(values[index])
    magnitude = abs(value)
    omega0 = math.log(magnitude) / horizon if magnitude > 0 else -math.inf
    relative = float(residuals[index] / magnitude) if magnitude > 0 else 0.0
    complex_pair = abs(value.imag) > 1e-12 * magnitude
    bound = SpectralBound(
        omega0=omega0, ritz_value=value, residual=relative, horizon=horizon,
        krylov_dim=result.steps, dt=dt, complex_pair=complex_pair, unstable=omega0 >= 0,
    )
    if complex_pair:
        logger.warning("dominant Ritz value is a complex pair: %s", value)
    if bound.unstable:
        logger.warning("unstable regime detected: omega0 = %.6g", omega0)
    if relative > tol:
        raise NotConvergedError(f"not converged: Ritz residual {relative:.3e} exceeds {tol:.1e}", estimate=bound)
    return bound
