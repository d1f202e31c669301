"""Time integration of the 0-D reactor with sampled timescale evaluation."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..constants import P_ATM
from ..kinetics import RateEvaluation, evaluate_rates
from ..mech_parser import Mechanism
from ..thermo import ThermoState, make_state
from ..timescales import TimescaleSample, evaluate_timescales
from .bdf import BDF, IntegrationError
from .model import ISOTHERMAL, MODES, ReactorSystem, species_jacobian

log = logging.getLogger(__name__)

__all__ = ["ReactorConfig", "Sample", "Trajectory", "integrate", "sample_times", "mole_to_mass",
           "RTOL_FLOOR", "RENORM_DRIFT"]

# below this the error estimate is dominated by roundoff in the Newton update
RTOL_FLOOR = 1e-12
RENORM_DRIFT = 1e-12


@dataclass(frozen=True)
class ReactorConfig:
    mode: str
    T0: float
    P0_atm: float
    composition: dict  # species -> moles, normalized internally
    t_end: float
    rtol: float = 1e-16
    atol: float = 1e-21
    samples_per_decade: int = 20
    t_first_sample: float = 1e-8
    include_steps: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (np.isfinite(self.T0) and self.T0 > 0):
            raise ValueError("T0 must be positive")
        if not (np.isfinite(self.P0_atm) and self.P0_atm > 0):
            raise ValueError("P0 must be positive")
        if not (np.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError("t_end must be finite and nonnegative")
        if not 1e-16 <= self.rtol <= 1e-3:
            raise ValueError(f"rtol {self.rtol:g} outside [1e-16, 1e-3]")
        if not 1e-24 <= self.atol <= 1e-3:
            raise ValueError(f"atol {self.atol:g} outside [1e-24, 1e-3]")
        if self.samples_per_decade < 1:
            raise ValueError("samples_per_decade must be >= 1")
        if not self.t_first_sample > 0:
            raise ValueError("t_first_sample must be positive")
        moles = list(self.composition.values())
        if not moles or any(not np.isfinite(x) or x < 0 for x in moles) or sum(moles) <= 0:
            raise ValueError("initial moles must be nonnegative with at least one positive")


@dataclass(frozen=True, eq=False)
class Sample:
    t: float
    state: ThermoState
    rates: RateEvaluation
    timescales: TimescaleSample
    on_schedule: bool = True


@dataclass
class Trajectory:
    samples: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    renormalizations: int = 0
    max_sum_drift: float = 0.0
    rtol_used: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def temperatures(self) -> np.ndarray:
        return np.array([s.state.T for s in self.samples])

    def mass_fractions(self) -> np.ndarray:
        return np.array([s.state.Y for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        """Timescale attribute across samples, e.g. ``column("tau_iets")``."""
        return np.array([getattr(s.timescales, name) for s in self.samples])


def mole_to_mass(m: Mechanism, composition: dict) -> np.ndarray:
    """Mass fractions from a species -> moles map (names case-insensitive)."""
    X = np.zeros(m.K)
    for name, n in composition.items():
        X[m.species_index(name)] += float(n)
    Y = X * m.molecular_weights()
    return Y / Y.sum()


def sample_times(t_end: float, per_decade: int, t_first: float = 1e-8) -> np.ndarray:
    """0, then a log grid from ``t_first`` with ``per_decade`` points per decade, ending at t_end."""
    if t_end <= 0:
        return np.array([0.0])
    if t_end <= t_first:
        return np.array([0.0, t_end])
    n = int(np.ceil(np.log10(t_end / t_first) * per_decade - 1e-9))
    grid = t_first * 10.0 ** (np.arange(n) / per_decade)
    return np.concatenate(([0.0], grid[grid < t_end * (1 - 1e-12)], [t_end]))


def _make_sample(m: Mechanism, s: ThermoState, t: float, on_schedule=True) -> Sample:
    rates = evaluate_rates(m, s)
    ts = evaluate_timescales(m, s, rates, t, jacobian=species_jacobian(m, s))
    return Sample(t, s, rates, ts, on_schedule)


def integrate(m: Mechanism, cfg: ReactorConfig,
              on_sample: Callable[[Sample], None] | None = None) -> Trajectory:
    """Integrate from t=0 to cfg.t_end, evaluating timescales at each sample.

    On failure the raised :class:`IntegrationError` carries the partial
    trajectory as ``exc.trajectory``.
    """
    Y0 = mole_to_mass(m, cfg.composition)
    P = cfg.P0_atm * P_ATM
    system = ReactorSystem(m, cfg.mode, P, cfg.T0)
    y0 = Y0 if cfg.mode == ISOTHERMAL else np.append(Y0, cfg.T0)
    K = m.K
    rtol = max(cfg.rtol, RTOL_FLOOR)
    if rtol > cfg.rtol:
        log.info("rtol %.1e is below the roundoff floor; using %.1e", cfg.rtol, rtol)
    traj = Trajectory(rtol_used=rtol)

    def emit(t, y, on_schedule=True):
        sample = _make_sample(m, system.state(y), t, on_schedule)
        traj.samples.append(sample)
        if on_sample is not None:
            on_sample(sample)

    times = sample_times(cfg.t_end, cfg.samples_per_decade, cfg.t_first_sample)
    emit(0.0, y0)
    if len(times) == 1:
        traj.stats = {"steps": 0, "rejected": 0, "rhs": 0, "jacobians": 0, "lu": 0, "newton": 0}
        return traj

    solver = None
    try:
        solver = BDF(system.fun, system.jac, 0.0, y0, rtol=rtol, atol=cfg.atol,
                     max_step=cfg.t_end)
        for t_target in times[1:]:
            while solver.t < t_target:
                solver.step(t_target)
                y = solver.y
                drift = float(y[:K].sum() - 1.0)
                traj.max_sum_drift = max(traj.max_sum_drift, abs(drift))
                if abs(drift) > RENORM_DRIFT:
                    y = y.copy()
                    y[:K] /= 1.0 + drift
                    solver.set_state(y)
                    traj.renormalizations += 1
                if cfg.include_steps and solver.t < t_target:
                    emit(solver.t, solver.y, on_schedule=False)
            emit(float(t_target), solver.y)
    except IntegrationError as exc:
        if system.last_error is not None:
            exc.args = (f"{exc.args[0]}; last RHS error: {system.last_error}",)
        traj.stats = dict(solver.stats) if solver is not None else {}
        exc.trajectory = traj
        raise
    traj.stats = dict(solver.stats)
    return traj

