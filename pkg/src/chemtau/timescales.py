"""Chemical timescales of a reacting state.

Five definitions are evaluated side by side:

* IRRTS - inverse of the fastest reaction rate, rho/(Wbar max|q_i|)
* RTS   - depleting species, smallest |Y_k / (W_k wdot_k / rho)|
* RPTS  - producing species, smallest Y_k / (W_k wdot_k / rho)
* IETS  - inverse largest eigenvalue modulus of the species Jacobian
* P/C   - tau_k = 1/|P_k| from the P*Y + C split of dY/dt

Each method carries a validity flag that is cleared when its denominator
drops below the noise floor instead of reporting a huge clamped value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import eigenvalues
from .kinetics import RateEvaluation, kinetics_arrays
from .mech_parser import Mechanism
from .thermo import ThermoState

__all__ = [
    "NOISE_FLOOR",
    "TimescaleSample",
    "tau_irrts",
    "tau_rts",
    "tau_rpts",
    "tau_iets",
    "tau_proposed",
    "evaluate_timescales",
]

NOISE_FLOOR = 1e-30


@dataclass(frozen=True)
class TimescaleSample:
    t: float
    tau_irrts: float
    irrts_reaction: int | None
    tau_rts: float
    rts_species: str | None
    tau_rpts: float
    rpts_species: str | None
    tau_iets: float
    tau_proposed_fast: float
    proposed_fast_species: str | None
    tau_proposed_slow: float
    proposed_slow_species: str | None
    valid_irrts: bool
    valid_rts: bool
    valid_rpts: bool
    valid_iets: bool
    valid_proposed: bool


def tau_irrts(m: Mechanism, s: ThermoState, q) -> tuple[float, int | None]:
    """(rho/Wbar)/max|q_i| and the controlling reaction; (nan, None) if invalid."""
    q = np.abs(np.asarray(q, dtype=float))
    if q.size == 0:
        return np.nan, None
    i = int(np.argmax(q))
    if not q[i] >= NOISE_FLOOR:
        return np.nan, None
    return float(s.density / s.mean_mw / q[i]), i


def _species_ratios(m: Mechanism, s: ThermoState, omega_dot) -> np.ndarray:
    W = kinetics_arrays(m).W
    rate = W * np.asarray(omega_dot, dtype=float) / s.density
    with np.errstate(divide="ignore", invalid="ignore"):
        return s.Y / rate


def tau_rts(m: Mechanism, s: ThermoState, omega_dot) -> tuple[float, str | None]:
    """Depleting-species timescale.

    Each depleting species has a negative ratio Y_k/(dY_k/dt); the least
    negative one (smallest magnitude) controls.
    """
    wdot = np.asarray(omega_dot, dtype=float)
    ok = (wdot < 0) & (np.abs(wdot) >= NOISE_FLOOR) & (s.Y > NOISE_FLOOR)
    if not ok.any():
        return np.nan, None
    tau = _species_ratios(m, s, wdot)
    idx = np.flatnonzero(ok)
    k = int(idx[np.argmax(tau[idx])])
    return float(abs(tau[k])), m.species_names[k]


def tau_rpts(m: Mechanism, s: ThermoState, omega_dot) -> tuple[float, str | None]:
    """Producing-species timescale, min of Y_k/(dY_k/dt) over wdot_k > 0."""
    wdot = np.asarray(omega_dot, dtype=float)
    ok = (wdot >= NOISE_FLOOR) & (s.Y > NOISE_FLOOR)
    if not ok.any():
        return np.nan, None
    tau = _species_ratios(m, s, wdot)
    idx = np.flatnonzero(ok)
    k = int(idx[np.argmin(tau[idx])])
    return float(tau[k]), m.species_names[k]


def tau_iets(spectrum) -> float:
    """1/max|lambda|; nan when every eigenvalue is below the noise floor."""
    mag = np.abs(np.asarray(spectrum))
    if mag.size == 0 or not mag.max() >= NOISE_FLOOR:
        return np.nan
    return float(1.0 / mag.max())


def tau_proposed(P, names=None) -> tuple[float, int | str | None, float, int | str | None]:
    """(tau_fast, fast species, tau_slow, slow species) from tau_k = 1/|P_k|.

    Species are reported by name when ``names`` is given, else by index.
    """
    P = np.abs(np.asarray(P, dtype=float))
    idx = np.flatnonzero(P > NOISE_FLOOR)
    if idx.size == 0:
        return np.nan, None, np.nan, None
    kf = int(idx[np.argmax(P[idx])])
    ks = int(idx[np.argmin(P[idx])])
    label = (lambda k: names[k]) if names is not None else (lambda k: k)
    return float(1.0 / P[kf]), label(kf), float(1.0 / P[ks]), label(ks)


def evaluate_timescales(m: Mechanism, s: ThermoState, rates: RateEvaluation, t: float = 0.0,
                        jacobian: np.ndarray | None = None) -> TimescaleSample:
    """All five timescales at one state.

    ``jacobian`` defaults to the frozen-temperature species Jacobian.
    """
    if jacobian is None:
        from .reactor.model import species_jacobian

        jacobian = species_jacobian(m, s)
    ti, ri = tau_irrts(m, s, rates.q)
    tr, sr = tau_rts(m, s, rates.omega_dot)
    tp, sp = tau_rpts(m, s, rates.omega_dot)
    te = tau_iets(eigenvalues(jacobian))
    tf, sf, tsl, ssl = tau_proposed(rates.P, m.species_names)
    return TimescaleSample(
        t=float(t),
        tau_irrts=ti,
        irrts_reaction=ri,
        tau_rts=tr,
        rts_species=sr,
        tau_rpts=tp,
        rpts_species=sp,
        tau_iets=te,
        tau_proposed_fast=tf,
        proposed_fast_species=sf,
        tau_proposed_slow=tsl,
        proposed_slow_species=ssl,
        valid_irrts=ri is not None,
        valid_rts=sr is not None,
        valid_rpts=sp is not None,
        valid_iets=bool(np.isfinite(te)),
        valid_proposed=sf is not None,
    )
