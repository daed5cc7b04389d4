"""IMEX time stepping of the difference system v_d = v - v_E."""
import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .conf import get_setting
from .exceptions import CFLViolation, NaNDetected, ParameterError
from .field import Field, Grid, Space, lp_norm, random_field
from .hydrostatics import project_along
from .models import smallness_constant
from .operators import LinearizedOp, apply_F, coriolis, diffusion, ekman_coupling

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    NONLINEAR = 'nonlinear'
    LINEAR = 'linear'


@dataclass(frozen=True)
class InitialCondition:
    seed: int = 0
    amplitude: float = 0.0
    slope: float = 2.0
    snapshot: Optional[Path] = None


@dataclass(frozen=True)
class SpectrumOptions:
    horizon: Optional[float] = None
    krylov_dim: int = 20
    tol: float = 1e-6
    dt: Optional[float] = None


@dataclass(frozen=True)
class SimConfig:
    dt: float
    t_end: float
    nx: int
    ny: int
    nz: int
    cadence: int = 10
    snapshot_cadence: int = 0
    mode: Mode = Mode.NONLINEAR
    initial: InitialCondition = field(default_factory=InitialCondition)
    spectrum: SpectrumOptions = field(default_factory=SpectrumOptions)

    def __post_init__(self):
        if not math.isfinite(self.dt) or self.dt <= 0:
            raise ParameterError(f"sim.dt must be positive, got {self.dt!r}")
        if not math.isfinite(self.t_end) or self.t_end < self.dt:
            raise ParameterError(f"sim.t_end must be at least sim.dt, got {self.t_end!r}")
        if self.cadence < 1:
            raise ParameterError(f"sim.cadence must be at least 1, got {self.cadence}")
        if self.snapshot_cadence < 0:
            raise ParameterError(f"sim.snapshot_cadence must be non-negative, got {self.snapshot_cadence}")
        object.__setattr__(self, 'mode', Mode(self.mode))

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))

    def grid(self, params):
        return Grid.for_params(params, self.nx, self.ny, self.nz)

    def check_rotation(self, params):
        guard = get_setting('ROTATION_GUARD')
        if self.dt * abs(params.f) > guard:
            raise ParameterError(f"sim.dt: dt*|f| = {self.dt * abs(params.f):.3g} exceeds {guard:g}")


@dataclass(frozen=True)
class SimState:
    v_d: Field
    t: float = 0.0
    prev_tendency: Optional[Field] = None
    step_index: int = 0


@dataclass
class Trajectory:
    records: list
    state: SimState
    verdict: object
    op: LinearizedOp


class ImplicitSolver:
    """Solves (I - alpha L) u = r per horizontal mode with d_z u(0) = 0, u(-h) = 0.

    L = nu_H Delta_H + nu_z d_z^2. Each distinct |k|^2 gets one dense Chebyshev-tau
    operator mapping nodal right-hand sides to nodal solutions; the two highest
    coefficient equations are replaced by the boundary rows.
    """

    def __init__(self, grid, nu_h, nu_z, alpha):
        self.grid = grid
        self.alpha = alpha
        n = grid.nz + 1
        second = np.zeros((n, n))
        second[:n - 2] = cheb.chebder(np.eye(n), m=2, scl=2.0 / grid.h, axis=0)
        degrees = np.arange(n)
        surface_shear = degrees ** 2.0
        bottom_value = (-1.0) ** degrees
        truncate = grid.to_coefficients.copy()
        truncate[n - 2:] = 0.0

        levels, index = np.unique(grid.k2, return_inverse=True)
        operators = np.empty((len(levels), n, n))
        for i, k2 in enumerate(levels):
            matrix = (1.0 + alpha * nu_h * k2) * np.eye(n) - alpha * nu_z * second
            matrix[n - 2] = surface_shear
            matrix[n - 1] = bottom_value
            operators[i] = grid.vandermonde @ np.linalg.solve(matrix, truncate)
        self._operators = operators[index.reshape(grid.nx, grid.ny)]
        self.response = self._operators @ np.ones(n)

    def solve(self, rhs):
        """Apply the solve to spectral nodal data of shape (2, N_x, N_y, N_z + 1)."""
        return (self._operators @ rhs[..., None])[..., 0]

    def constrain(self, v):
        """Project along the response to a z-uniform forcing, keeping both boundary conditions."""
        return project_along(v, self.response)


@lru_cache(maxsize=16)
def implicit_solver(grid, params, alpha):
    return ImplicitSolver(grid, params.nu_h, params.nu_z, alpha)


def explicit_tendency(op, v, mode):
    """-v_E . grad_H v - w(v) d_z v_E - f v^perp, plus -F(v, v) in nonlinear mode."""
    tendency = -ekman_coupling(op, v) - coriolis(v, op.params.f)
    if mode is Mode.NONLINEAR:
        tendency = tendency - apply_F(v, v)
    return tendency


def _check_cfl(v, dt, step_index):
    limit = get_setting('CFL_LIMIT')
    courant = lp_norm(v, math.inf) * dt / v.grid.min_spacing
    if courant > limit:
        raise CFLViolation(f"CFL violation: Courant number {courant:.3g} exceeds {limit:g}", step_index)


def advance(state, op, dt, mode):
    """One CNAB2 step; the first step uses explicit Euler for the explicit part."""
    grid = op.grid
    solver = implicit_solver(grid, op.params, dt / 2.0)
    v = state.v_d.spectral()
    if mode is Mode.NONLINEAR:
        _check_cfl(v, dt, state.step_index + 1)
    tendency = explicit_tendency(op, v, mode)
    if state.prev_tendency is None:
        explicit = tendency.data
    else:
        explicit = 1.5 * tendency.data - 0.5 * state.prev_tendency.data
    rhs = v.data + 0.5 * dt * diffusion(op, v).data + dt * explicit
    updated = solver.constrain(Field(grid, solver.solve(rhs), Space.SPECTRAL))
    if not np.all(np.isfinite(updated.data)):
        raise NaNDetected("NaN detected", state.step_index + 1)
    return SimState(updated, state.t + dt, tendency, state.step_index + 1)


def step(state, cfg, op):
    return advance(state, op, cfg.dt, cfg.mode)


def propagate_linear(op, v, horizon, dt):
    """e^{horizon A} v approximated by linear-mode steps of size close to ``dt``."""
    if not horizon > 0 or not dt > 0:
        raise ParameterError("horizon and dt must be positive")
    n_steps = max(1, int(round(horizon / dt)))
    state = SimState(v.spectral())
    for _ in range(n_steps):
        state = advance(state, op, horizon / n_steps, Mode.LINEAR)
    return state.v_d


def prepare_initial(v_d0, op, dt):
    """Implicit half-step smoothing followed by the constraint."""
    solver = implicit_solver(op.grid, op.params, dt / 2.0)
    smoothed = Field(op.grid, solver.solve(v_d0.spectral().data), Space.SPECTRAL)
    return solver.constrain(smoothed)


def initial_difference(cfg, op):
    """v_d(0) from the configured snapshot (full velocity) or a seeded random field."""
    grid = op.grid
    initial = cfg.initial
    if initial.snapshot:
        from .snapshots import read_snapshot

        v0 = read_snapshot(initial.snapshot)
        same_extent = all(math.isclose(a, b, rel_tol=1e-12) for a, b in
                          zip((v0.grid.lx, v0.grid.ly, v0.grid.h), (grid.lx, grid.ly, grid.h)))
        if v0.grid.shape != grid.shape or not same_extent:
            raise ParameterError(f"snapshot grid {v0.grid} does not match {grid}")
        return Field(grid, v0.data, Space.PHYSICAL) - op.background()
    return random_field(grid, initial.seed, initial.amplitude, initial.slope)


def full_velocity(op, v_d):
    return v_d.physical() + op.background()


def simulate(cfg, params, on_record: Optional[Callable] = None, on_snapshot: Optional[Callable] = None):
    """Run the configured simulation, streaming records and snapshots through the callbacks.

    ``on_snapshot(field, t, step)`` receives the full velocity. Solver errors are
    raised with the failing step index after the trajectory so far has been
    emitted.
    """
    from .diagnostics import record

    cfg.check_rotation(params)
    grid = cfg.grid(params)
    op = LinearizedOp.build(params, grid)
    verdict = smallness_constant(params)
    if not verdict.stable:
        logger.warning("%s: convergence to the spiral is not guaranteed", verdict)
    else:
        logger.info("%s", verdict)

    state = SimState(prepare_initial(initial_difference(cfg, op), op, cfg.dt))
    records = []

    def emit():
        entry = record(state.v_d, state.t)
        records.append(entry)
        if on_record is not None:
            on_record(entry)

    emit()
    logger.info("simulating %d steps of %g s on %s (%s)", cfg.n_steps, cfg.dt, grid, cfg.mode.value)
    for _ in range(cfg.n_steps):
        state = step(state, cfg, op)
        if state.step_index % cfg.cadence == 0:
            emit()
        if (on_snapshot is not None and cfg.snapshot_cadence
                and state.step_index % cfg.snapshot_cadence == 0):
            on_snapshot(full_velocity(op, state.v_d), state.t, state.step_index)
    if state.step_index % cfg.cadence != 0:
        emit()
    return Trajectory(records=records, state=state, verdict=verdict, op=op)
