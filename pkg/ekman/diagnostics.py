"""Per-step norms of v_d and the post-processing of their time series."""
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.stats

from .conf import get_setting
from .field import boundary_residuals, diff, lp_norm, sobolev_norm
from .hydrostatics import baroclinic_part, reconstruct_w, vertical_average
from .operators import bilinear_ratio

logger = logging.getLogger(__name__)

ENERGY_TOLERANCE = 1e-10
MIN_FIT_SAMPLES = 5


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    l2: float
    h1: float
    h2: float
    h3: float
    l4_tilde: float
    energy: float
    jensen_slack: float
    poincare_slack: float
    barotropic_h1: float
    bilinear_ratio_k0: float
    h4: float = math.nan
    bc_top: float = math.nan
    bc_bottom: float = math.nan

    def norm(self, k):
        return (self.l2, self.h1, self.h2, self.h3, self.h4)[k]


@dataclass(frozen=True)
class DecayFit:
    amplitude: float
    rate: float
    r_squared: float
    samples: int


@dataclass(frozen=True)
class EnergyReport:
    passed: bool
    first_violation: int = None


@dataclass(frozen=True)
class HkReport:
    k: int
    max_norm: float
    integral: float
    running_max_settled: bool


def _horizontal_gradient_norm(v):
    grid = v.grid
    power = np.sum(np.abs(v.spectral().data) ** 2, axis=0) @ grid.weights
    return math.sqrt(grid.lx * grid.ly * np.sum(grid.k2_diff * power))


def record(v_d, t):
    """Diagnostics of v_d at time t."""
    grid = v_d.grid
    v = v_d.spectral()
    norms = [sobolev_norm(v, k) for k in range(5)]
    w = reconstruct_w(v)
    w_norm_sq = grid.cell_area * np.sum((w ** 2) @ grid.weights)
    gradient = _horizontal_gradient_norm(v)
    shear = sobolev_norm(diff(v, 'z'), 0)
    ratio = bilinear_ratio(v, 0)
    top, bottom = boundary_residuals(v)
    return DiagnosticsRecord(
        t=float(t),
        l2=norms[0],
        h1=norms[1],
        h2=norms[2],
        h3=norms[3],
        l4_tilde=lp_norm(baroclinic_part(v), 4),
        energy=norms[0] ** 2,
        jensen_slack=2 * grid.h ** 2 * gradient ** 2 - float(w_norm_sq),
        poincare_slack=grid.h * shear - norms[0],
        barotropic_h1=vertical_average(v).gradient_norm(),
        bilinear_ratio_k0=math.nan if ratio is None else ratio,
        h4=norms[4],
        bc_top=top,
        bc_bottom=bottom,
    )


def norm_series(records, name='l2'):
    """(t, value) pairs of one record attribute."""
    return [(r.t, getattr(r, name)) for r in records]


def decay_fit(series, transient=None):
    """Least-squares fit of log(value) = log(C) + rate * t after the transient.

    The first ``transient`` fraction of samples is discarded.
    """
    pairs = list(series)
    if len(pairs) < MIN_FIT_SAMPLES:
        raise ValueError(f"insufficient data: {len(pairs)} samples, need {MIN_FIT_SAMPLES}")
    t = np.array([p[0] for p in pairs], dtype=float)
    values = np.array([p[1] for p in pairs], dtype=float)
    if np.any(~(values > 0)):
        raise ValueError("nonpositive values cannot be fitted on a log scale")
    if transient is None:
        transient = get_setting('DECAY_TRANSIENT')
    start = int(transient * len(pairs))
    t, logs = t[start:], np.log(values[start:])

    fit = scipy.stats.linregress(t, logs)
    residual = logs - (fit.intercept + fit.slope * t)
    ss_res = float(np.sum(residual ** 2))
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(amplitude=math.exp(fit.intercept), rate=float(fit.slope),
                    r_squared=r_squared, samples=len(t))


def check_energy_monotone(series):
    """Energy must never grow between samples beyond round-off."""
    energies = [getattr(item, 'energy', item) for item in series]
    for n in range(len(energies) - 1):
        if energies[n + 1] > energies[n] * (1 + ENERGY_TOLERANCE):
            logger.info("energy increased at sample %d: %.17g -> %.17g", n + 1, energies[n], energies[n + 1])
            return EnergyReport(passed=False, first_violation=n + 1)
    return EnergyReport(passed=True)


def hk_boundedness(series, k, windows=4):
    """Max of ||v_d||_{H^k}, time integral of ||v_d||_{H^{k+1}}^2, and whether the
    maxima over successive windows after the transient stop growing.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"H^k boundedness is monitored for k in 1..3, got {k}")
    records = list(series)
    if not records:
        raise ValueError("insufficient data: empty series")
    t = np.array([r.t for r in records])
    current = np.array([r.norm(k) for r in records])
    higher = np.array([r.norm(k + 1) for r in records])
    if np.any(np.isnan(higher)):
        raise ValueError(f"insufficient data: h{k + 1} not recorded")
    integral = float(scipy.integrate.trapezoid(higher ** 2, t)) if len(records) > 1 else 0.0

    tail = current[int(get_setting('DECAY_TRANSIENT') * len(current)):]
    chunks = [chunk for chunk in np.array_split(tail, min(windows, len(tail))) if len(chunk)]
    maxima = [float(np.max(chunk)) for chunk in chunks]
    settled = all(b <= a * (1 + ENERGY_TOLERANCE) for a, b in zip(maxima, maxima[1:]))
    return HkReport(k=k, max_norm=float(np.max(current)), integral=integral, running_max_settled=settled)
