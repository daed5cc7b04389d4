"""Plain-text run configuration: ``section.key = value`` lines, ``#`` comments."""
import logging
from pathlib import Path

from .exceptions import ConfigError, ParameterError
from .serializers import (InitialConditionSerializer, PhysicsSerializer, SimulationSerializer,
                          SpectrumSerializer)

logger = logging.getLogger(__name__)

SECTIONS = {
    'physics': PhysicsSerializer,
    'sim': SimulationSerializer,
    'init': InitialConditionSerializer,
    'spectrum': SpectrumSerializer,
}


def parse_config(text):
    """Split the text into {section: {name: (value, line)}} without validating values."""
    parsed = {section: {} for section in SECTIONS}
    for line, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0].strip()
        if not content:
            continue
        if '=' not in content:
            raise ConfigError(f"expected key = value, got {content!r}", line=line)
        key, _, value = content.partition('=')
        key = key.strip()
        section, _, name = key.partition('.')
        if section not in SECTIONS or name not in SECTIONS[section]().fields:
            raise ConfigError(f"unknown key '{key}'", key=key, line=line)
        if name in parsed[section]:
            raise ConfigError(f"duplicate key '{key}'", key=key, line=line)
        parsed[section][name] = (value.strip(), line)
    return parsed


def _validated(section, entries, context=None):
    serializer = SECTIONS[section](data={name: value for name, (value, _) in entries.items()},
                                  context=context or {})
    if serializer.is_valid():
        return serializer
    name, messages = next(iter(serializer.errors.items()))
    key = f"{section}.{name}"
    line = entries[name][1] if name in entries else None
    raise ConfigError(f"{key}: {messages[0]}", key=key, line=line)


def load_config(path, overrides=None):
    """Read and validate a run configuration; returns (PhysicalParams, SimConfig).

    ``overrides`` maps dotted keys to values and takes precedence over the file.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    parsed = parse_config(text)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, name = key.partition('.')
        parsed[section][name] = (str(value), None)

    try:
        params = _validated('physics', parsed['physics']).save()
        initial = _validated('init', parsed['init'], {'base_dir': path.parent}).save()
        spectrum = _validated('spectrum', parsed['spectrum']).save()
        sim = _validated('sim', parsed['sim']).save(initial=initial, spectrum=spectrum)
        sim.check_rotation(params)
    except ParameterError as exc:
        key = str(exc).split(':', 1)[0] if str(exc).startswith('sim.') else None
        raise ConfigError(str(exc), key=key) from exc
    logger.debug("loaded %s: %s", path, params)
    return params, sim


def describe(params, sim):
    """Every configuration key with its effective value, for the run manifest."""
    spectrum = sim.spectrum
    initial = sim.initial
    return {
        'physics.nu_h': params.nu_h,
        'physics.nu_z': params.nu_z,
        'physics.f': params.f,
        'physics.rho0': params.rho0,
        'physics.g': params.g,
        'physics.h': params.h,
        'physics.tau_x': params.tau[0],
        'physics.tau_y': params.tau[1],
        'physics.vg_x': params.v_g[0],
        'physics.vg_y': params.v_g[1],
        'physics.lx': params.lx,
        'physics.ly': params.ly,
        'sim.dt': sim.dt,
        'sim.t_end': sim.t_end,
        'sim.nx': sim.nx,
        'sim.ny': sim.ny,
        'sim.nz': sim.nz,
        'sim.cadence': sim.cadence,
        'sim.snapshot_cadence': sim.snapshot_cadence,
        'sim.mode': sim.mode.value,
        'init.seed': initial.seed,
        'init.amplitude': initial.amplitude,
        'init.slope': initial.slope,
        'init.snapshot': initial.snapshot or '',
        'spectrum.horizon': '' if spectrum.horizon is None else spectrum.horizon,
        'spectrum.krylov': spectrum.krylov_dim,
        'spectrum.tol': spectrum.tol,
        'spectrum.dt': '' if spectrum.dt is None else spectrum.dt,
    }
