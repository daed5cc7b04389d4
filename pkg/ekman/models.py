import cmath
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError, RangeError

# e^{2h/d} overflows double precision shortly above this ratio.
MAX_DEPTH_RATIO = 600.0


@dataclass(frozen=True)
class PhysicalParams:
    """One physical scenario on the layer T^2 x (-h, 0).

    ``tau`` is the surface shear (1/s): the wind condition reads dv/dz = tau at
    z = 0 with no conversion from stress. ``v_g`` is the geostrophic velocity
    imposed at z = -h.
    """
    nu_h: float
    nu_z: float
    f: float
    rho0: float
    g: float
    h: float
    tau: tuple = (0.0, 0.0)
    v_g: tuple = (0.0, 0.0)
    lx: float = 2 * math.pi
    ly: float = 2 * math.pi

    def __post_init__(self):
        for name in ('tau', 'v_g'):
            vector = tuple(float(c) for c in getattr(self, name))
            if len(vector) != 2:
                raise ParameterError(f"{name} must have 2 components, got {len(vector)}")
            if not all(math.isfinite(c) for c in vector):
                raise ParameterError(f"{name} must be finite, got {vector!r}")
            object.__setattr__(self, name, vector)
        for name in ('nu_h', 'nu_z', 'rho0', 'g', 'h', 'lx', 'ly'):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be a finite positive number, got {value!r}")
            object.__setattr__(self, name, value)
        if not math.isfinite(self.f):
            raise ParameterError(f"f must be finite, got {self.f!r}")
        object.__setattr__(self, 'f', float(self.f))

    def __str__(self):
        return (f"nu_h={self.nu_h:g} nu_z={self.nu_z:g} f={self.f:g} h={self.h:g} "
                f"tau={self.tau} v_g={self.v_g}")


@dataclass(frozen=True)
class EkmanSolution:
    """Coefficients of the finite-depth Ekman spiral.

    The closed form is written for f > 0; ``orientation`` is sign(f) and the
    evaluators mirror the second component when it is negative.
    """
    k1: float
    k2: float
    k3: float
    k4: float
    d: float
    params: PhysicalParams
    orientation: int = 1

    @property
    def coefficients(self):
        return np.array([self.k1, self.k2, self.k3, self.k4])

    def profile(self, z):
        return ekman_profile(self, z)

    def derivative(self, z):
        return ekman_derivative(self, z)

    def pressure(self, z):
        """Hydrostatic pressure of the steady state, pi_E = -rho0 * g * z."""
        return -self.params.rho0 * self.params.g * np.asarray(z, dtype=float)

    def __str__(self):
        return f"Ekman spiral d={self.d:g} k=({self.k1:g}, {self.k2:g}, {self.k3:g}, {self.k4:g})"


@dataclass(frozen=True)
class SmallnessVerdict:
    value: float
    stable: bool
    solution: EkmanSolution

    def __str__(self):
        verdict = 'stable regime' if self.stable else 'outside the stable regime'
        return f"C_E = {self.value:.6g} ({verdict})"


def layer_thickness(params):
    """Ekman layer thickness d = sqrt(2 nu_z / |f|)."""
    if params.f == 0:
        raise ParameterError("Ekman thickness undefined (f = 0)")
    return math.sqrt(2.0 * params.nu_z / abs(params.f))


def _depth_ratio(params, d):
    ratio = 2.0 * params.h / d
    if ratio > MAX_DEPTH_RATIO:
        raise RangeError(f"2h/d = {ratio:.6g} exceeds {MAX_DEPTH_RATIO:g}; e^(2h/d) is not representable")
    return ratio


def ekman_coefficients(params):
    """Closed-form coefficients k1..k4 of the spiral for the data (tau, v_g).

    With W = v_1 + i v_2 the balance nu_z W'' = i f W has the solutions
    W = P e^{(1+i)z/d} + Q e^{-(1+i)z/d}, where Q = k2 + i k1 and P = k4 - i k3.
    The two boundary conditions W'(0) = tau and W(-h) = v_g fix P and Q.
    """
    d = layer_thickness(params)
    _depth_ratio(params, d)
    orientation = 1 if params.f > 0 else -1
    tau = complex(params.tau[0], orientation * params.tau[1])
    v_g = complex(params.v_g[0], orientation * params.v_g[1])

    a = (1 + 1j) * params.h / d
    shear = d * tau / (1 + 1j)
    q = (v_g - shear * cmath.exp(-a)) / (2 * cmath.cosh(a))
    p = q + shear
    return EkmanSolution(
        k1=q.imag, k2=q.real, k3=-p.imag, k4=p.real,
        d=d, params=params, orientation=orientation,
    )


def _heights(sol, z):
    heights = np.asarray(z, dtype=float)
    slack = 1e-12 * sol.params.h
    if np.any(heights < -sol.params.h - slack) or np.any(heights > slack):
        raise RangeError(f"z must lie in [-h, 0] = [{-sol.params.h:g}, 0]")
    return heights


def ekman_profile(sol, z):
    """Velocity (v_1, v_2) of the spiral at height(s) z; shape (2,) or (2, n)."""
    s = _heights(sol, z) / sol.d
    sin, cos = np.sin(s), np.cos(s)
    decay, growth = np.exp(-s), np.exp(s)
    v1 = (sol.k1 * sin * decay + sol.k2 * cos * decay
          + sol.k3 * sin * growth + sol.k4 * cos * growth)
    v2 = (sol.k1 * cos * decay - sol.k2 * sin * decay
          - sol.k3 * cos * growth + sol.k4 * sin * growth)
    return np.array([v1, sol.orientation * v2])


def ekman_derivative(sol, z):
    """Shear (d_z v_1, d_z v_2) of the spiral at height(s) z."""
    s = _heights(sol, z) / sol.d
    sin, cos = np.sin(s), np.cos(s)
    decay, growth = np.exp(-s), np.exp(s)
    dv1 = (sol.k1 * (cos - sin) * decay - sol.k2 * (sin + cos) * decay
           + sol.k3 * (sin + cos) * growth + sol.k4 * (cos - sin) * growth)
    dv2 = (-sol.k1 * (sin + cos) * decay + sol.k2 * (sin - cos) * decay
           + sol.k3 * (sin - cos) * growth + sol.k4 * (sin + cos) * growth)
    return np.array([dv1, sol.orientation * dv2]) / sol.d


def _shear_bracket(sol):
    k1, k2, k3, k4 = sol.k1, sol.k2, sol.k3, sol.k4
    ratio = _depth_ratio(sol.params, sol.d)
    return ((k1 ** 2 + k2 ** 2) * math.exp(ratio) + (k3 ** 2 + k4 ** 2)
            + 2 * abs(k1 * k3 - k2 * k4) + 2 * abs(k2 * k3 + k1 * k4))


def sup_derivative_bound(sol):
    """Upper bound on ||d_z v_E||^2 over [-h, 0]."""
    return 2.0 / sol.d ** 2 * _shear_bracket(sol)


def smallness_constant(params):
    """C_E for ``params``; the spiral is provably stable when C_E < 1."""
    sol = ekman_coefficients(params)
    value = (abs(params.f) * params.h ** 4 / (2 * params.nu_h * params.nu_z ** 2)
             * _shear_bracket(sol))
    return SmallnessVerdict(value=value, stable=value < 1.0, solution=sol)


def equilibrium_residual(sol, grid):
    """Max-norm of nu_z * d_z^2 v_E - f v_E^perp on the vertical nodes of ``grid``."""
    params = sol.params
    z = np.clip(grid.z, -params.h, 0.0)
    profile = ekman_profile(sol, z)
    curvature = profile @ grid.diff_matrix(2).T
    rotated = np.array([-profile[1], profile[0]])
    return float(np.max(np.abs(params.nu_z * curvature - params.f * rotated)))
