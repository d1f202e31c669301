"""Governing equations of the 0-D constant-pressure reactor and their Jacobians."""
from __future__ import annotations

import numpy as np

from ..constants import R_U
from ..kinetics import evaluate_rates, kinetics_arrays, rate_of_progress_jacobian
from ..mech_parser import Mechanism
from ..thermo import ThermoState, make_state, mixture_props, thermo_table

__all__ = ["ISOTHERMAL", "ADIABATIC", "MODES", "NonFiniteRateError", "rhs", "species_jacobian",
           "ReactorSystem"]

ISOTHERMAL = "isothermal"
ADIABATIC = "adiabatic_isobaric"
MODES = (ISOTHERMAL, ADIABATIC)


class NonFiniteRateError(FloatingPointError):
    def __init__(self, reaction: int, equation: str):
        self.reaction = reaction
        super().__init__(f"non-finite rate of progress in reaction {reaction} ({equation})")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown reactor mode {mode!r}; expected one of {MODES}")


def rhs(m: Mechanism, s: ThermoState, mode: str, rates=None) -> tuple[np.ndarray, float]:
    """(dY/dt [1/s], dT/dt [K/s]) at constant pressure.

    The energy equation uses molar enthalpies with mass-specific cp, so
    dT/dt = -sum(h_k * wdot_k) / (rho * cp).
    """
    _check_mode(mode)
    rates = evaluate_rates(m, s) if rates is None else rates
    bad = np.flatnonzero(~np.isfinite(rates.q))
    if bad.size:
        raise NonFiniteRateError(int(bad[0]), m.reactions[bad[0]].equation)
    W = kinetics_arrays(m).W
    dYdt = rates.omega_dot * W / s.density
    if mode == ISOTHERMAL:
        return dYdt, 0.0
    tab = thermo_table(m)
    cp, _, rho = mixture_props(m, s)
    h = tab.h_RT(s.T) * s.T * R_U
    return dYdt, float(-np.dot(h, rates.omega_dot) / (rho * cp))


def species_jacobian(m: Mechanism, s: ThermoState) -> np.ndarray:
    """d(dY_k/dt)/dY_j at frozen temperature and density, K x K [1/s]."""
    ka = kinetics_arrays(m)
    dq = rate_of_progress_jacobian(m, s)
    dwdot = ka.nu @ dq
    return (ka.W / s.density)[:, None] * dwdot * (s.density / ka.W)[None, :]


class ReactorSystem:
    """ODE right-hand side and Newton Jacobian in the solver's variables.

    The unknowns are Y (isothermal) or (Y, T) (adiabatic). Unlike
    :func:`species_jacobian`, the Newton Jacobian follows the ideal-gas
    density change with Y and T.
    """

    def __init__(self, m: Mechanism, mode: str, P: float, T0: float):
        _check_mode(mode)
        self.m = m
        self.mode = mode
        self.P = P
        self.T0 = T0
        self.K = m.K
        self.W = kinetics_arrays(m).W
        self.last_error: Exception | None = None

    def state(self, y: np.ndarray) -> ThermoState:
        T = y[self.K] if self.mode == ADIABATIC else self.T0
        return make_state(self.m, T, self.P, y[: self.K])

    def fun(self, t, y):
        try:
            s = self.state(y)
            dY, dT = rhs(self.m, s, self.mode)
        except (NonFiniteRateError, ValueError, FloatingPointError) as exc:
            self.last_error = exc
            return np.full_like(y, np.nan)
        return dY if self.mode == ISOTHERMAL else np.append(dY, dT)

    def jac(self, t, y):
        K = self.K
        s = self.state(y)
        J = species_jacobian(self.m, s)
        # concentrations use max(Y, 0), so f is flat in any negative Y_j
        J[:, s.Y < 0] = 0.0
        f, dT = rhs(self.m, s, self.mode)
        Yc = np.maximum(s.Y, 0.0)
        J = J - np.outer(J @ Yc - f, s.mean_mw / self.W)
        if self.mode == ISOTHERMAL:
            return J
        full = np.zeros((K + 1, K + 1))
        full[:K, :K] = J
        dTs = 1e-7 * s.T
        s2 = make_state(self.m, s.T + dTs, self.P, s.Y)
        f2, dT2 = rhs(self.m, s2, self.mode)
        full[:K, K] = (f2 - f) / dTs
        full[K, K] = (dT2 - dT) / dTs
        tab = thermo_table(self.m)
        h_mass = tab.h_RT(s.T) * s.T * R_U / self.W
        cp_k_mass = tab.cp_R(s.T) * R_U / self.W
        cp = float(np.dot(s.Y, cp_k_mass))
        full[K, :K] = -(h_mass @ J) / cp - dT * cp_k_mass / cp
        return full
