"""Velocity fields on T^2 x (-h, 0): Fourier in x and y, Chebyshev-Lobatto in z."""
import enum
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft
from numpy.polynomial import chebyshev as cheb

from .conf import fft_workers

logger = logging.getLogger(__name__)

MAX_SOBOLEV_ORDER = 4


class Space(enum.Enum):
    PHYSICAL = 'physical'
    SPECTRAL = 'spectral'


@dataclass(frozen=True, eq=False)
class Grid:
    """Tensor grid with N_x x N_y Fourier points and N_z + 1 Lobatto nodes.

    Node 0 is the surface z = 0 and node N_z the bottom z = -h.
    """
    nx: int
    ny: int
    nz: int
    lx: float
    ly: float
    h: float

    def __post_init__(self):
        for name in ('nx', 'ny'):
            n = getattr(self, name)
            if n < 8 or n % 2:
                raise ValueError(f"{name} must be even and at least 8, got {n}")
        if self.nz < 16:
            raise ValueError(f"nz must be at least 16, got {self.nz}")
        for name in ('lx', 'ly', 'h'):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")

    @classmethod
    def for_params(cls, params, nx, ny, nz):
        return cls(nx, ny, nz, params.lx, params.ly, params.h)

    def __str__(self):
        return f"{self.nx}x{self.ny}x{self.nz} on [{self.lx:g}, {self.ly:g}] x (-{self.h:g}, 0)"

    @property
    def shape(self):
        return (2, self.nx, self.ny, self.nz + 1)

    @property
    def cell_area(self):
        return self.lx * self.ly / (self.nx * self.ny)

    @property
    def min_spacing(self):
        return min(self.lx / self.nx, self.ly / self.ny)

    @cached_property
    def nodes(self):
        return np.cos(np.pi * np.arange(self.nz + 1) / self.nz)

    @cached_property
    def z(self):
        return self.h * (self.nodes - 1.0) / 2.0

    @cached_property
    def x(self):
        return self.lx * np.arange(self.nx) / self.nx

    @cached_property
    def y(self):
        return self.ly * np.arange(self.ny) / self.ny

    @cached_property
    def mx(self):
        return np.fft.fftfreq(self.nx, 1.0 / self.nx)[:, None]

    @cached_property
    def my(self):
        return np.fft.fftfreq(self.ny, 1.0 / self.ny)[None, :]

    @cached_property
    def kx(self):
        return 2 * np.pi * self.mx / self.lx

    @cached_property
    def ky(self):
        return 2 * np.pi * self.my / self.ly

    @cached_property
    def kx_diff(self):
        # Nyquist dropped so first derivatives of real fields stay real.
        return np.where(np.abs(self.mx) == self.nx // 2, 0.0, self.kx)

    @cached_property
    def ky_diff(self):
        return np.where(np.abs(self.my) == self.ny // 2, 0.0, self.ky)

    @cached_property
    def k2(self):
        return self.kx ** 2 + self.ky ** 2

    @cached_property
    def k2_diff(self):
        return self.kx_diff ** 2 + self.ky_diff ** 2

    @cached_property
    def dealias_mask(self):
        return (np.abs(self.mx) <= self.nx / 3) & (np.abs(self.my) <= self.ny / 3)

    @cached_property
    def vandermonde(self):
        return cheb.chebvander(self.nodes, self.nz)

    @cached_property
    def to_coefficients(self):
        """Maps nodal values to Chebyshev coefficients."""
        return np.linalg.inv(self.vandermonde)

    @cached_property
    def _diff_matrices(self):
        matrices = [np.eye(self.nz + 1)]
        for order in range(1, MAX_SOBOLEV_ORDER + 1):
            coefficients = cheb.chebder(self.to_coefficients, m=order, scl=2.0 / self.h, axis=0)
            matrices.append(cheb.chebvander(self.nodes, self.nz - order) @ coefficients)
        return tuple(matrices)

    def diff_matrix(self, order):
        if not 0 <= order <= MAX_SOBOLEV_ORDER:
            raise ValueError(f"unsupported derivative order {order}")
        return self._diff_matrices[order]

    @cached_property
    def integration_matrix(self):
        """Nodal antiderivative from z = -h: row j integrates up to node j."""
        coefficients = cheb.chebint(self.to_coefficients, m=1, lbnd=-1, scl=self.h / 2.0, axis=0)
        return cheb.chebvander(self.nodes, self.nz + 1) @ coefficients

    @cached_property
    def weights(self):
        """Clenshaw-Curtis weights on [-h, 0]."""
        return self.integration_matrix[0].copy()


@dataclass(frozen=True, eq=False)
class Field:
    """Horizontal velocity of shape (2, N_x, N_y, N_z + 1), treated as immutable."""
    grid: Grid
    data: np.ndarray
    space: Space = Space.PHYSICAL

    def __post_init__(self):
        if self.data.shape != self.grid.shape:
            raise ValueError(f"field shape {self.data.shape} does not match grid {self.grid.shape}")

    @classmethod
    def zeros(cls, grid, space=Space.SPECTRAL):
        dtype = complex if space is Space.SPECTRAL else float
        return cls(grid, np.zeros(grid.shape, dtype=dtype), space)

    @classmethod
    def from_function(cls, grid, fn):
        """Sample ``fn(x, y, z) -> (v1, v2)`` on the grid nodes."""
        x, y, z = np.meshgrid(grid.x, grid.y, grid.z, indexing='ij')
        v1, v2 = fn(x, y, z)
        data = np.stack([np.broadcast_to(v1, x.shape), np.broadcast_to(v2, x.shape)]).astype(float)
        return cls(grid, data, Space.PHYSICAL)

    def spectral(self):
        return transform(self, Space.SPECTRAL)

    def physical(self):
        return transform(self, Space.PHYSICAL)

    def _combine(self, other, op):
        if not isinstance(other, Field):
            return NotImplemented
        if other.grid is not self.grid:
            raise ValueError("fields live on different grids")
        return Field(self.grid, op(self.data, transform(other, self.space).data), self.space)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __neg__(self):
        return Field(self.grid, -self.data, self.space)

    def __mul__(self, scalar):
        if isinstance(scalar, Field):
            return NotImplemented
        return Field(self.grid, self.data * scalar, self.space)

    __rmul__ = __mul__


def transform(fld, target):
    """Change representation; horizontal transforms carry the 1/(N_x N_y) forward."""
    if fld.space is target:
        return fld
    if target is Space.SPECTRAL:
        data = scipy.fft.fft2(fld.data, axes=(1, 2), norm='forward', workers=fft_workers())
    else:
        data = scipy.fft.ifft2(fld.data, axes=(1, 2), norm='forward', workers=fft_workers()).real
    return Field(fld.grid, data, target)


def horizontal_divergence(grid, data):
    """Spectral div_H of a (2, N_x, N_y, ...) coefficient array."""
    extra = (None,) * (data.ndim - 3)
    kx = grid.kx_diff[(...,) + extra]
    ky = grid.ky_diff[(...,) + extra]
    return 1j * (kx * data[0] + ky * data[1])


def diff(fld, axis):
    """Derivative along 'x', 'y' (spectral) or 'z' (Chebyshev); the result is spectral."""
    grid = fld.grid
    if axis == 'z':
        return Field(grid, fld.spectral().data @ grid.diff_matrix(1).T, Space.SPECTRAL)
    if axis == 'x':
        factor = 1j * grid.kx_diff
    elif axis == 'y':
        factor = 1j * grid.ky_diff
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return Field(grid, fld.spectral().data * factor[None, :, :, None], Space.SPECTRAL)


def vertical_integral(fld, full=False):
    """Integral from -h up to each node, or up to z = 0 when ``full`` is set.

    The full integral returns a (2, N_x, N_y) array in the field's space.
    """
    grid = fld.grid
    if full:
        return fld.data @ grid.weights
    return Field(grid, fld.data @ grid.integration_matrix.T, fld.space)


def _horizontal_weight(grid, order):
    kx2 = grid.kx ** 2
    ky2 = grid.ky ** 2
    weight = np.zeros((grid.nx, grid.ny))
    for a in range(order + 1):
        for b in range(order + 1 - a):
            weight = weight + kx2 ** a * ky2 ** b
    return weight


def _vertical_power(grid, data):
    """Sum over components of the z-integral of |data|^2, per horizontal mode."""
    return np.sum(np.abs(data) ** 2, axis=0) @ grid.weights


def sobolev_norm(fld, k):
    """H^k norm summing every mixed derivative d_x^a d_y^b d_z^c with a + b + c <= k."""
    if not 0 <= k <= MAX_SOBOLEV_ORDER:
        raise ValueError(f"unsupported Sobolev order {k}")
    grid = fld.grid
    data = fld.spectral().data
    total = 0.0
    for c in range(k + 1):
        vertical = data if c == 0 else data @ grid.diff_matrix(c).T
        total += np.sum(_horizontal_weight(grid, k - c) * _vertical_power(grid, vertical))
    return math.sqrt(max(total, 0.0) * grid.lx * grid.ly)


def fractional_h32_norm(fld):
    """Interpolation proxy sqrt(||v||_{H^1} ||v||_{H^2}) for the H^{3/2} norm."""
    return math.sqrt(sobolev_norm(fld, 1) * sobolev_norm(fld, 2))


def lp_norm(fld, p):
    """L^p norm of the pointwise Euclidean magnitude, p in {2, 4, inf}."""
    if p not in (2, 4, math.inf):
        raise ValueError(f"unsupported exponent {p!r}")
    grid = fld.grid
    magnitude = np.sqrt(np.sum(fld.physical().data ** 2, axis=0))
    if p == math.inf:
        return float(np.max(magnitude))
    integral = grid.cell_area * np.sum(magnitude ** p @ grid.weights)
    return float(integral ** (1.0 / p))


def inner(a, b):
    """L^2 inner product of two fields on the same grid."""
    grid = a.grid
    product = np.real(np.conj(a.spectral().data) * b.spectral().data)
    return float(grid.lx * grid.ly * np.sum(np.sum(product, axis=0) @ grid.weights))


def dealias(fld):
    """Zero every mode with |m_x| > N_x/3 or |m_y| > N_y/3 (two-thirds rule)."""
    mask = fld.grid.dealias_mask[None, :, :, None]
    return Field(fld.grid, fld.spectral().data * mask, Space.SPECTRAL)


def boundary_residuals(fld):
    """Max |d_z v| at the surface and max |v| at the bottom."""
    grid = fld.grid
    values = fld.physical().data
    shear_top = values @ grid.diff_matrix(1)[0]
    return float(np.max(np.abs(shear_top))), float(np.max(np.abs(values[..., -1])))


def _boundary_profiles(zeta):
    # (1 + zeta) q(zeta) with q(0) + q'(0) = 0: vanishes at the bottom, flat at the top.
    return np.array([
        (1 + zeta) * (1 - zeta),
        (1 + zeta) * zeta ** 2,
        (1 + zeta) * zeta ** 3,
    ])


def random_field(grid, seed, amplitude, slope, solenoidal=False):
    """Seeded random boundary-respecting field with spectrum decaying like (1+|k|)^-slope.

    |k| is the physical horizontal wavenumber.

    The field is band-limited to the dealiased modes and scaled so that its
    maximum magnitude equals ``amplitude``.
    """
    if not math.isfinite(amplitude) or amplitude < 0:
        raise ValueError(f"amplitude must be finite and non-negative, got {amplitude!r}")
    if amplitude == 0:
        return Field.zeros(grid)
    rng = np.random.default_rng(seed)
    profiles = _boundary_profiles(grid.z / grid.h)
    noise = rng.standard_normal((len(profiles), 2, grid.nx, grid.ny))
    spectra = scipy.fft.fft2(noise, axes=(2, 3), norm='forward', workers=fft_workers())
    spectra = spectra * ((1.0 + np.sqrt(grid.k2)) ** (-slope) * grid.dealias_mask)
    fld = Field(grid, np.einsum('pcxy,pz->cxyz', spectra, profiles), Space.SPECTRAL)
    if solenoidal:
        from .hydrostatics import project_along

        zeta = grid.z / grid.h
        fld = project_along(fld, 1.0 - zeta ** 2)
    peak = lp_norm(fld, math.inf)
    if peak == 0:
        return Field.zeros(grid)
    return fld * (amplitude / peak)
