import math
from pathlib import Path

from ekman.field import Grid
from ekman.models import PhysicalParams

BASE_PHYSICS = {
    'nu_h': 0.5,
    'nu_z': 0.1,
    'f': 0.1,
    'rho0': 1000.0,
    'g': 9.81,
    'h': 1.0,
    'tau': (0.0, 0.0),
    'v_g': (0.0, 0.0),
    'lx': 2 * math.pi,
    'ly': 2 * math.pi,
}

BASE_SIM = {
    'dt': 0.05,
    't_end': 0.5,
    'nx': 8,
    'ny': 8,
    'nz': 16,
    'cadence': 2,
}


def make_params(**overrides):
    return PhysicalParams(**{**BASE_PHYSICS, **overrides})


def make_grid(params=None, nx=8, ny=8, nz=16):
    params = params or make_params()
    return Grid(nx, ny, nz, params.lx, params.ly, params.h)


def config_text(physics=None, sim=None, init=None, spectrum=None):
    physics = {**BASE_PHYSICS, **(physics or {})}
    tau = physics.pop('tau')
    v_g = physics.pop('v_g')
    physics.update(tau_x=tau[0], tau_y=tau[1], vg_x=v_g[0], vg_y=v_g[1])
    sections = {
        'physics': physics,
        'sim': {**BASE_SIM, **(sim or {})},
        'init': init or {},
        'spectrum': spectrum or {},
    }
    lines = ['# generated for tests']
    for section, values in sections.items():
        for key, value in values.items():
            if isinstance(value, float):
                value = format(value, '.17g')
            lines.append(f"{section}.{key} = {value}")
    return '\n'.join(lines) + '\n'


def write_config(directory, name='run.cfg', **sections):
    path = Path(directory) / name
    path.write_text(config_text(**sections), encoding='utf-8')
    return path
