"""The invariant suite behind ``manage.py verify``."""
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import record
from .field import Field, boundary_residuals, lp_norm, random_field, sobolev_norm
from .hydrostatics import baroclinic_part, project, vertical_average
from .models import (ekman_coefficients, ekman_derivative, ekman_profile, equilibrium_residual,
                     sup_derivative_bound)
from .operators import LinearizedOp
from .solver import Mode, SimState, advance

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    limit: float

    def __str__(self):
        status = 'PASS' if self.passed else 'FAIL'
        return f"{status} {self.name}: {self.value:.3e} (limit {self.limit:.1e})"


def _check(name, value, limit):
    return Check(name, bool(value <= limit), float(value), float(limit))


def check_equilibrium(params, grid):
    sol = ekman_coefficients(params)
    scale = 1.0 + float(np.max(np.abs(ekman_profile(sol, np.clip(grid.z, -params.h, 0.0)))))
    return _check('equilibrium residual', equilibrium_residual(sol, grid), 1e-8 * scale)


def check_boundary_conditions(params):
    sol = ekman_coefficients(params)
    top = np.abs(ekman_derivative(sol, 0.0) - np.array(params.tau))
    bottom = np.abs(ekman_profile(sol, -params.h) - np.array(params.v_g))
    scale = 1.0 + max(map(abs, params.tau + params.v_g))
    return _check('boundary conditions', float(max(top.max(), bottom.max())), 1e-10 * scale)


def check_sup_bound(params):
    """The sampled |d_z v_E|^2 never exceeds the closed-form bound."""
    sol = ekman_coefficients(params)
    z = np.linspace(-params.h, 0.0, 2001)
    observed = float(np.max(np.sum(ekman_derivative(sol, z) ** 2, axis=0)))
    bound = sup_derivative_bound(sol)
    return _check('sup derivative bound', observed - bound, 1e-12 * (1.0 + bound))


def check_linearity(params):
    """k1..k4 are linear in (tau, v_g)."""
    a = replace(params, v_g=(0.0, 0.0))
    b = replace(params, tau=(0.0, 0.0))
    combined = ekman_coefficients(params).coefficients
    parts = ekman_coefficients(a).coefficients + ekman_coefficients(b).coefficients
    scale = 1.0 + float(np.max(np.abs(combined)))
    return _check('coefficient linearity', float(np.max(np.abs(combined - parts))), 1e-12 * scale)


def check_random_fields(grid, samples, seed):
    """Jensen, Poincare, orthogonality and idempotence on random admissible fields."""
    jensen = poincare = orthogonality = idempotence = 0.0
    for n in range(samples):
        v = random_field(grid, seed + n, 1.0, 2.0, solenoidal=True)
        diagnostics = record(v, 0.0)
        jensen = max(jensen, -diagnostics.jensen_slack)
        poincare = max(poincare, -diagnostics.poincare_slack)
        total = sobolev_norm(v, 0) ** 2
        split = (vertical_average(v).l2_norm() ** 2 * grid.h
                 + sobolev_norm(baroclinic_part(v), 0) ** 2)
        orthogonality = max(orthogonality, abs(total - split) / total)
        once = project(v)
        idempotence = max(idempotence, lp_norm(project(once) - once, math.inf))
    return [
        _check('Jensen slack', jensen, 1e-10),
        _check('Poincare slack', poincare, 1e-10),
        _check('L2 orthogonality', orthogonality, 1e-10),
        _check('projection idempotence', idempotence, 1e-12),
    ]


def check_fixed_point(params, grid, steps=20, dt=None):
    """v_d = 0 stays exactly zero under the nonlinear stepper."""
    op = LinearizedOp.build(params, grid)
    dt = dt or 0.1 / max(abs(params.f), 1e-12)
    state = SimState(Field.zeros(grid))
    for _ in range(steps):
        state = advance(state, op, dt, Mode.NONLINEAR)
    top, bottom = boundary_residuals(state.v_d)
    return _check('fixed point persistence', max(sobolev_norm(state.v_d, 1), top, bottom), 1e-9)


def run_suite(params, grid, samples=100, seed=0):
    checks = [
        check_equilibrium(params, grid),
        check_boundary_conditions(params),
        check_sup_bound(params),
        check_linearity(params),
    ]
    checks.extend(check_random_fields(grid, samples, seed))
    checks.append(check_fixed_point(params, grid))
    for check in checks:
        logger.debug("%s", check)
    return checks
