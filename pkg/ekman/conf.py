from django.conf import settings

DEFAULTS = {
    'THREADS': 1,
    'KRYLOV_DIM': 20,
    'SPECTRUM_TOL': 1e-6,
    'DECAY_TRANSIENT': 0.2,
    'CFL_LIMIT': 0.8,
    'ROTATION_GUARD': 0.5,
}


def get_setting(name):
    """Read one key of ``settings.EKMAN``, falling back to the built-in default."""
    overrides = getattr(settings, 'EKMAN', {})
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]


def fft_workers():
    return max(1, int(get_setting('THREADS')))
