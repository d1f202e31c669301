"""Ideal-gas thermodynamics from NASA-7 polynomials (CGS-mol units)."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .constants import P_ATM, R_U
from .mech_parser import Mechanism

log = logging.getLogger(__name__)

__all__ = [
    "ThermoState",
    "ThermoTable",
    "thermo_table",
    "species_thermo",
    "mixture_props",
    "equilibrium_constant_kc",
    "log_equilibrium_constants",
    "make_state",
]

# how far outside a fit range a polynomial may be extrapolated
CLAMP_LOW = 0.5
CLAMP_HIGH = 1.5


class ThermoTable:
    """Dense NASA-7 coefficient arrays for vectorized property evaluation."""

    def __init__(self, m: Mechanism):
        self.K = m.K
        self.names = m.species_names
        self.W = m.molecular_weights()
        self.t_low = np.array([s.thermo.t_low for s in m.species])
        self.t_mid = np.array([s.thermo.t_mid for s in m.species])
        self.t_high = np.array([s.thermo.t_high for s in m.species])
        self.low = np.array([s.thermo.coeffs_low for s in m.species])
        self.high = np.array([s.thermo.coeffs_high for s in m.species])
        self._warned = False

    def coeffs(self, T: float) -> np.ndarray:
        self.check_range(T)
        return np.where((T < self.t_mid)[:, None], self.low, self.high)

    def check_range(self, T: float) -> None:
        if not np.isfinite(T) or T <= 0:
            raise ValueError(f"invalid temperature {T!r}")
        if T < self.t_low.max() or T > self.t_high.min():
            out = (T < self.t_low) | (T > self.t_high)
            if np.any((T < CLAMP_LOW * self.t_low) | (T > CLAMP_HIGH * self.t_high)):
                bad = [self.names[k] for k in np.flatnonzero(out)]
                raise ValueError(f"T = {T:g} K outside the usable thermo range of {bad}")
            if np.any(out) and not self._warned:
                self._warned = True
                log.warning(
                    "T = %.1f K outside the fit range of %d species; extrapolating",
                    T,
                    int(out.sum()),
                )

    def cp_R(self, T: float) -> np.ndarray:
        a = self.coeffs(T)
        return a[:, 0] + T * (a[:, 1] + T * (a[:, 2] + T * (a[:, 3] + T * a[:, 4])))

    def h_RT(self, T: float) -> np.ndarray:
        a = self.coeffs(T)
        return (
            a[:, 0]
            + T * (a[:, 1] / 2 + T * (a[:, 2] / 3 + T * (a[:, 3] / 4 + T * a[:, 4] / 5)))
            + a[:, 5] / T
        )

    def s_R(self, T: float) -> np.ndarray:
        a = self.coeffs(T)
        return (
            a[:, 0] * np.log(T)
            + T * (a[:, 1] + T * (a[:, 2] / 2 + T * (a[:, 3] / 3 + T * a[:, 4] / 4)))
            + a[:, 6]
        )

    def g_RT(self, T: float) -> np.ndarray:
        return self.h_RT(T) - self.s_R(T)


def thermo_table(m: Mechanism) -> ThermoTable:
    tab = m._derived.get("thermo")
    if tab is None:
        tab = m._derived["thermo"] = ThermoTable(m)
    return tab


@dataclass(frozen=True, eq=False)
class ThermoState:
    """Snapshot of temperature [K], pressure [dyn/cm^2] and mass fractions.

    ``density`` [g/cm^3], ``mean_mw`` [g/mol] and ``conc`` [mol/cm^3] are
    derived by :func:`make_state`. Concentrations use mass fractions clipped
    at zero so that tiny negative integrator values never enter a rate law.
    """

    T: float
    P: float
    Y: np.ndarray
    density: float
    mean_mw: float
    conc: np.ndarray

    @property
    def P_atm(self) -> float:
        return self.P / P_ATM


def make_state(m: Mechanism, T: float, P: float | None = None, Y=None, *, P_atm: float | None = None,
               density: float | None = None) -> ThermoState:
    """Build a state from T, Y and either P [dyn/cm^2] or ``P_atm``.

    ``density`` overrides the ideal-gas value; the Jacobian uses this to
    hold rho fixed while Y varies.
    """
    if (P is None) == (P_atm is None):
        raise ValueError("give exactly one of P or P_atm")
    if P is None:
        P = P_atm * P_ATM
    Y = np.asarray(Y, dtype=float)
    W = thermo_table(m).W
    inv = float(np.dot(Y, 1.0 / W))
    if not inv > 0:
        raise ValueError("mass fractions sum to zero")
    mean_mw = 1.0 / inv
    rho = P * mean_mw / (R_U * T) if density is None else density
    conc = rho * np.maximum(Y, 0.0) / W
    return ThermoState(float(T), float(P), Y, rho, mean_mw, conc)


def species_thermo(m: Mechanism, k: int, T: float) -> tuple[float, float, float]:
    """Molar (cp [erg/mol/K], h [erg/mol], s [erg/mol/K]) of species ``k``."""
    tab = thermo_table(m)
    th = m.species[k].thermo
    if T < CLAMP_LOW * th.t_low or T > CLAMP_HIGH * th.t_high or T <= 0:
        raise ValueError(f"T = {T:g} K outside the usable range of {m.species[k].name}")
    if not th.t_low <= T <= th.t_high and not tab._warned:
        tab._warned = True
        log.warning("T = %.1f K outside the fit range of %s; extrapolating", T, m.species[k].name)
    a = th.coeffs(T)
    cp = a[0] + T * (a[1] + T * (a[2] + T * (a[3] + T * a[4])))
    h = a[0] + T * (a[1] / 2 + T * (a[2] / 3 + T * (a[3] / 4 + T * a[4] / 5))) + a[5] / T
    s = a[0] * np.log(T) + T * (a[1] + T * (a[2] / 2 + T * (a[3] / 3 + T * a[4] / 4))) + a[6]
    return R_U * cp, R_U * T * h, R_U * s


def mixture_props(m: Mechanism, s: ThermoState) -> tuple[float, float, float]:
    """(cp [erg/g/K], mean molecular weight [g/mol], density [g/cm^3])."""
    tab = thermo_table(m)
    if not np.any(s.Y != 0):
        raise ValueError("all mass fractions are zero")
    cp = R_U * float(np.dot(s.Y, tab.cp_R(s.T) / tab.W))
    return cp, s.mean_mw, s.density


def _stoich_net(m: Mechanism) -> np.ndarray:
    nu = m._derived.get("nu_net")
    if nu is None:
        nu = np.zeros((m.K, m.I))
        for i, r in enumerate(m.reactions):
            for name, c in r.reactants:
                nu[m.species_index(name), i] -= c
            for name, c in r.products:
                nu[m.species_index(name), i] += c
        m._derived["nu_net"] = nu
    return nu


def log_equilibrium_constants(m: Mechanism, T: float) -> np.ndarray:
    """ln K_c for every reaction (concentration units, mol/cm^3 based)."""
    nu = _stoich_net(m)
    g = thermo_table(m).g_RT(T)
    dn = nu.sum(axis=0)
    return -(nu.T @ g) + dn * np.log(P_ATM / (R_U * T))


def equilibrium_constant_kc(m: Mechanism, i: int, T: float) -> float:
    """K_c of reaction ``i`` from Delta S and Delta H of the NASA fits."""
    tab = thermo_table(m)
    nu = _stoich_net(m)[:, i]
    dS = float(nu @ tab.s_R(T))
    dH = float(nu @ tab.h_RT(T))
    kp = np.exp(dS - dH)
    return float(kp * (P_ATM / (R_U * T)) ** nu.sum())
