"""Barotropic/baroclinic split, diagnostic vertical velocity, projection and pressure."""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .conf import fft_workers
from .exceptions import ConstraintError
from .field import Field, Space, horizontal_divergence, sobolev_norm

logger = logging.getLogger(__name__)

DIVERGENCE_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class BarotropicField:
    """Vertical average of a field; ``data`` holds spectral coefficients (2, N_x, N_y)."""
    grid: object
    data: np.ndarray

    def divergence(self):
        return horizontal_divergence(self.grid, self.data)

    def l2_norm(self):
        return math.sqrt(self.grid.lx * self.grid.ly * np.sum(np.abs(self.data) ** 2))

    def gradient_norm(self):
        """||grad_H v_bar|| over the torus."""
        power = np.sum(np.abs(self.data) ** 2, axis=0)
        return math.sqrt(self.grid.lx * self.grid.ly * np.sum(self.grid.k2_diff * power))

    def physical(self):
        return scipy.fft.ifft2(self.data, axes=(1, 2), norm='forward', workers=fft_workers()).real

    def broadcast(self):
        """The average as a z-independent field."""
        data = np.repeat(self.data[..., None], self.grid.nz + 1, axis=-1)
        return Field(self.grid, data, Space.SPECTRAL)


@dataclass(frozen=True, eq=False)
class PressureField:
    """Surface pressure pi_s(x, y); the 3D pressure follows hydrostatically."""
    grid: object
    surface: np.ndarray
    balanced_surface: np.ndarray
    momentum_residual: float
    rho0: float
    g: float

    def at(self, z):
        """pi(x, y, z) = pi_s(x, y) - rho0 g z."""
        z = np.asarray(z, dtype=float)
        return self.surface[..., None] - self.rho0 * self.g * z


def vertical_average(v):
    grid = v.grid
    return BarotropicField(grid, v.spectral().data @ grid.weights / grid.h)


def baroclinic_part(v):
    """v - v_bar; its vertical average is zero."""
    average = vertical_average(v)
    data = v.spectral().data - average.data[..., None]
    return Field(v.grid, data, Space.SPECTRAL)


def vertical_velocity_coefficients(v):
    """Spectral w(z) = -int_{-h}^{z} div_H v dz'."""
    grid = v.grid
    divergence = horizontal_divergence(grid, v.spectral().data)
    return -(divergence @ grid.integration_matrix.T)


def reconstruct_w(v):
    """Physical vertical velocity with w(-h) = 0, shape (N_x, N_y, N_z + 1)."""
    coefficients = vertical_velocity_coefficients(v)
    return scipy.fft.ifft2(coefficients, axes=(0, 1), norm='forward', workers=fft_workers()).real


def project_along(v, profile):
    """Remove grad_H phi(x, y) g(z) from ``v`` so that div_H of the average vanishes.

    ``profile`` is g sampled on the nodes, either one column (N_z + 1,) shared by
    every mode or one per mode (N_x, N_y, N_z + 1). A constant profile gives the
    orthogonal hydrostatic projection.
    """
    grid = v.grid
    data = v.spectral().data
    profile = np.broadcast_to(np.asarray(profile, dtype=float), (grid.nx, grid.ny, grid.nz + 1))
    average = data @ grid.weights / grid.h
    profile_mean = profile @ grid.weights / grid.h
    kx = np.broadcast_to(grid.kx_diff, (grid.nx, grid.ny))
    ky = np.broadcast_to(grid.ky_diff, (grid.nx, grid.ny))
    k2 = grid.k2_diff
    active = k2 > 0
    scale = np.zeros((grid.nx, grid.ny), dtype=complex)
    scale[active] = ((kx * average[0] + ky * average[1])[active]
                     / (k2[active] * profile_mean[active]))
    correction = np.stack([kx * scale, ky * scale])[..., None] * profile[None]
    return Field(grid, data - correction, Space.SPECTRAL)


def project(v):
    """Orthogonal hydrostatic projection P onto fields with div_H(v_bar) = 0."""
    return project_along(v, np.ones(v.grid.nz + 1))


def _solve_poisson(grid, rhs):
    """Zero-mean pi with Delta_H pi = rhs, spectral in and out."""
    k2 = grid.k2_diff
    solution = np.zeros_like(rhs)
    active = k2 > 0
    solution[active] = -rhs[active] / k2[active]
    return solution


def _to_physical(data, axes=(0, 1)):
    return scipy.fft.ifft2(data, axes=axes, norm='forward', workers=fft_workers()).real


def _to_spectral(data, axes=(0, 1)):
    return scipy.fft.fft2(data, axes=axes, norm='forward', workers=fft_workers())


def recover_pressure(v, params):
    """Surface pressure of a projected field, gauge mean(pi_s) = 0.

    ``surface`` follows the closed expression
    Delta pi_s = rho0 (-(nu_z/h) div(d_z v|_{z=-h}) + (1/h) div int (v.grad v - v div v)),
    ``balanced_surface`` solves the vertically averaged momentum balance
    (including the Coriolis term). ``momentum_residual`` measures their gap.
    """
    grid = v.grid
    spectral = v.spectral().data
    mask = grid.dealias_mask[None, :, :, None]
    average = vertical_average(v)
    divergence = _to_physical(average.divergence())
    scale = 1.0 + sobolev_norm(v, 1)
    if np.max(np.abs(divergence)) > DIVERGENCE_TOLERANCE * scale:
        raise ConstraintError("field is not projected: div_H of the vertical average does not vanish")

    dealiased = spectral * mask
    values = _to_physical(dealiased, axes=(1, 2))
    dx = _to_physical(1j * grid.kx_diff[None, :, :, None] * dealiased, axes=(1, 2))
    dy = _to_physical(1j * grid.ky_diff[None, :, :, None] * dealiased, axes=(1, 2))
    advection = values[0] * dx + values[1] * dy
    stretching = values * (dx[0] + dy[1])

    def averaged_divergence(integrand):
        column = _to_spectral(integrand @ grid.weights, axes=(1, 2)) * mask[..., 0]
        return horizontal_divergence(grid, column) / grid.h

    bottom_shear = (spectral @ grid.diff_matrix(1).T)[..., -1]
    friction = -params.nu_z / grid.h * horizontal_divergence(grid, bottom_shear)
    rotated = np.stack([-average.data[1], average.data[0]])
    closed_rhs = params.rho0 * (friction + averaged_divergence(advection - stretching))
    balanced_rhs = params.rho0 * (friction - averaged_divergence(advection + stretching)
                                  - params.f * horizontal_divergence(grid, rotated))

    active = grid.k2_diff > 0
    gap = np.where(active, closed_rhs - balanced_rhs, 0.0) / params.rho0
    residual = math.sqrt(grid.lx * grid.ly * np.sum(np.abs(gap) ** 2))
    if residual > DIVERGENCE_TOLERANCE * scale:
        logger.debug("pressure closures differ by %.3e", residual)
    return PressureField(
        grid=grid,
        surface=_to_physical(_solve_poisson(grid, closed_rhs)),
        balanced_surface=_to_physical(_solve_poisson(grid, balanced_rhs)),
        momentum_residual=residual,
        rho0=params.rho0,
        g=params.g,
    )
