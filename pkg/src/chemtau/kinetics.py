"""Rate constants, rates of progress, production rates and the P/C split.

All rate laws are evaluated on dense arrays compiled once per mechanism.
Concentration products use padded slot tables: every reaction lists its
reactant (and product) species once per unit of stoichiometric coefficient,
padded with a dummy index whose concentration is 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import CAL_TO_ERG, R_U
from .mech_parser import Mechanism
from .thermo import ThermoState, log_equilibrium_constants

__all__ = [
    "RateEvaluation",
    "KineticsArrays",
    "kinetics_arrays",
    "forward_rate_constants",
    "reverse_rate_constants",
    "rate_of_progress",
    "directional_terms",
    "net_production_rates",
    "decompose_pc",
    "evaluate_rates",
    "rate_of_progress_jacobian",
]

EXP_CLAMP = 600.0
Y_FLOOR = 1e-30
_TINY = 1e-300


@dataclass(frozen=True, eq=False)
class RateEvaluation:
    """Rates at one state. P and C satisfy P*Y + C = omega_dot*W/rho."""

    kf: np.ndarray
    kr: np.ndarray
    q: np.ndarray
    omega_dot: np.ndarray
    P: np.ndarray
    C: np.ndarray


def _slots(m: Mechanism, side: str) -> np.ndarray:
    rows = []
    for r in m.reactions:
        row = []
        for name, c in getattr(r, side):
            if not float(c).is_integer():
                raise NotImplementedError(f"non-integer stoichiometry in {r.equation}")
            row += [m.species_index(name)] * int(c)
        rows.append(row)
    width = max((len(r) for r in rows), default=1)
    out = np.full((len(rows), width), m.K, dtype=np.intp)
    for i, row in enumerate(rows):
        out[i, : len(row)] = row
    return out


class KineticsArrays:
    """Dense per-reaction parameter arrays for one mechanism."""

    def __init__(self, m: Mechanism):
        K, I = m.K, m.I
        self.K, self.I = K, I
        self.W = m.molecular_weights()
        self.slots_r = _slots(m, "reactants")
        self.slots_p = _slots(m, "products")
        self.nu_r = np.zeros((K, I))
        self.nu_p = np.zeros((K, I))
        for i, r in enumerate(m.reactions):
            for name, c in r.reactants:
                self.nu_r[m.species_index(name), i] += c
            for name, c in r.products:
                self.nu_p[m.species_index(name), i] += c
        self.nu = self.nu_p - self.nu_r
        # P/C routing masks: term contains X_k or not
        self.nu_fwd_in = self.nu * (self.nu_r > 0)
        self.nu_fwd_out = self.nu * (self.nu_r == 0)
        self.nu_rev_in = self.nu * (self.nu_p > 0)
        self.nu_rev_out = self.nu * (self.nu_p == 0)

        arr = np.array([r.arrhenius for r in m.reactions], dtype=float).reshape(-1, 3)
        self.A = arr[:, 0]
        self.beta = arr[:, 1]
        self.Ta = arr[:, 2] * CAL_TO_ERG / R_U
        self.reversible = np.array([r.reversible for r in m.reactions], dtype=bool)

        # collision partner concentration, for third-body and falloff reactions
        mix = [i for i, r in enumerate(m.reactions) if r.third_body is not None or r.collider]
        self.mix_rows = np.array(mix, dtype=np.intp)
        self.eff = np.zeros((len(mix), K))
        for j, i in enumerate(mix):
            r = m.reactions[i]
            if r.collider:
                self.eff[j, m.species_index(r.collider)] = 1.0
            else:
                self.eff[j, :] = 1.0
                for name, e in r.third_body:
                    self.eff[j, m.species_index(name)] = e
        is_fo = np.array([m.reactions[i].falloff is not None for i in mix], dtype=bool)
        # plain third-body reactions: [M] multiplies the rate of progress
        self.tb_pos = np.flatnonzero(~is_fo)
        self.tb_rows = self.mix_rows[self.tb_pos]
        # falloff reactions: [M] enters through the reduced pressure
        self.fo_pos = np.flatnonzero(is_fo)
        self.fo_rows = self.mix_rows[self.fo_pos]
        low = np.array([m.reactions[i].falloff.low for i in self.fo_rows], dtype=float).reshape(-1, 3)
        self.A0 = low[:, 0]
        self.beta0 = low[:, 1]
        self.Ta0 = low[:, 2] * CAL_TO_ERG / R_U
        n_fo = len(self.fo_rows)
        self.has_troe = np.zeros(n_fo, dtype=bool)
        self.troe = np.full((n_fo, 4), np.nan)
        for j, i in enumerate(self.fo_rows):
            troe = m.reactions[i].falloff.troe
            if troe is not None:
                self.has_troe[j] = True
                self.troe[j, : len(troe)] = troe

    def arrhenius(self, T: float, A, beta, Ta) -> np.ndarray:
        expo = np.clip(-Ta / T, -EXP_CLAMP, EXP_CLAMP)
        return A * T**beta * np.exp(expo)

    def mix_conc(self, conc: np.ndarray) -> np.ndarray:
        return self.eff @ conc

    def falloff(self, T: float, M: np.ndarray):
        """Return (k, dk/dM) for the falloff reactions at collider conc. M."""
        k_inf = self.arrhenius(T, self.A[self.fo_rows], self.beta[self.fo_rows], self.Ta[self.fo_rows])
        k0 = self.arrhenius(T, self.A0, self.beta0, self.Ta0)
        ratio = k0 / np.maximum(k_inf, _TINY)
        Pr = ratio * M
        log10F = np.zeros_like(Pr)
        dlog10F = np.zeros_like(Pr)
        if self.has_troe.any():
            t = self.troe[self.has_troe]
            a, T3, T1, T2 = t[:, 0], t[:, 1], t[:, 2], t[:, 3]
            with np.errstate(divide="ignore", over="ignore"):
                fcent = (1 - a) * np.exp(-T / T3) + a * np.exp(-T / T1)
                fcent = fcent + np.where(np.isnan(T2), 0.0, np.exp(-np.nan_to_num(T2) / T))
            lfc = np.log10(np.maximum(fcent, _TINY))
            c = -0.4 - 0.67 * lfc
            n = 0.75 - 1.27 * lfc
            u = np.log10(np.maximum(Pr[self.has_troe], _TINY)) + c
            den = n - 0.14 * u
            f = u / den
            log10F[self.has_troe] = lfc / (1 + f * f)
            dlog10F[self.has_troe] = -lfc * 2 * f / (1 + f * f) ** 2 * n / den**2
        F = 10.0**log10F
        k = k_inf * Pr / (1 + Pr) * F
        # d ln k / d ln Pr = 1/(1+Pr) + d log10F / d log10Pr ; k/M = k0 F / (1+Pr)
        dk_dM = k0 * F / (1 + Pr) * (1 / (1 + Pr) + dlog10F)
        return k, dk_dM


def kinetics_arrays(m: Mechanism) -> KineticsArrays:
    arr = m._derived.get("kinetics")
    if arr is None:
        arr = m._derived["kinetics"] = KineticsArrays(m)
    return arr


def _products(conc: np.ndarray, slots: np.ndarray) -> np.ndarray:
    padded = np.append(conc, 1.0)
    return np.prod(padded[slots], axis=1)


def forward_rate_constants(m: Mechanism, s: ThermoState) -> np.ndarray:
    """k_f for every reaction; falloff blending uses the state's [M]."""
    ka = kinetics_arrays(m)
    kf = ka.arrhenius(s.T, ka.A, ka.beta, ka.Ta)
    if len(ka.fo_rows):
        M = ka.mix_conc(s.conc)[ka.fo_pos]
        kf[ka.fo_rows], _ = ka.falloff(s.T, M)
    return kf


def _inverse_kc(m: Mechanism, T: float) -> np.ndarray:
    ka = kinetics_arrays(m)
    ln_kc = log_equilibrium_constants(m, T)
    inv = np.exp(np.clip(-ln_kc, -EXP_CLAMP, EXP_CLAMP))
    return np.where(ka.reversible, inv, 0.0)


def reverse_rate_constants(m: Mechanism, T: float, kf: np.ndarray) -> np.ndarray:
    """k_r = k_f / K_c for reversible reactions, 0 otherwise."""
    return kf * _inverse_kc(m, T)


def directional_terms(m: Mechanism, s: ThermoState, kf, kr):
    """Forward and reverse terms of every rate of progress, [M] included."""
    ka = kinetics_arrays(m)
    fwd = kf * _products(s.conc, ka.slots_r)
    rev = kr * _products(s.conc, ka.slots_p)
    if len(ka.tb_rows):
        M = ka.mix_conc(s.conc)[ka.tb_pos]
        fwd[ka.tb_rows] *= M
        rev[ka.tb_rows] *= M
    return fwd, rev


def rate_of_progress(m: Mechanism, s: ThermoState, kf, kr) -> np.ndarray:
    """q_i [mol/cm^3/s]."""
    fwd, rev = directional_terms(m, s, kf, kr)
    return fwd - rev


def net_production_rates(m: Mechanism, q) -> np.ndarray:
    """omega_dot_k = sum_i nu_ki q_i [mol/cm^3/s]."""
    return kinetics_arrays(m).nu @ q


def decompose_pc(m: Mechanism, s: ThermoState, kf, kr, y_floor: float = Y_FLOOR):
    """Split dY_k/dt into P_k*Y_k + C_k.

    A directional term whose concentration product contains [X_k] goes to
    P_k (divided by Y_k once); every other term goes to C_k. Species at or
    below ``y_floor`` keep P_k = 0 and carry everything in C_k.
    """
    ka = kinetics_arrays(m)
    fwd, rev = directional_terms(m, s, kf, kr)
    inner = ka.nu_fwd_in @ fwd - ka.nu_rev_in @ rev
    outer = ka.nu_fwd_out @ fwd - ka.nu_rev_out @ rev
    scale = ka.W / s.density
    live = s.Y > y_floor
    P = np.zeros(ka.K)
    P[live] = inner[live] * scale[live] / s.Y[live]
    C = np.where(live, outer, outer + inner) * scale
    return P, C


def evaluate_rates(m: Mechanism, s: ThermoState) -> RateEvaluation:
    kf = forward_rate_constants(m, s)
    kr = reverse_rate_constants(m, s.T, kf)
    q = rate_of_progress(m, s, kf, kr)
    wdot = net_production_rates(m, q)
    P, C = decompose_pc(m, s, kf, kr)
    return RateEvaluation(kf, kr, q, wdot, P, C)


def rate_of_progress_jacobian(m: Mechanism, s: ThermoState) -> np.ndarray:
    """dq_i/d[X_j] at fixed temperature, as an I x K matrix."""
    ka = kinetics_arrays(m)
    K, I = ka.K, ka.I
    conc = s.conc
    padded = np.append(conc, 1.0)
    kf = forward_rate_constants(m, s)
    inv_kc = _inverse_kc(m, s.T)
    kr = kf * inv_kc

    mfac = np.ones(I)
    M_all = ka.mix_conc(conc)
    if len(ka.tb_rows):
        mfac[ka.tb_rows] = M_all[ka.tb_pos]

    dq = np.zeros((I, K + 1))
    rows = np.arange(I)
    for slots, coef in ((ka.slots_r, kf * mfac), (ka.slots_p, -kr * mfac)):
        vals = padded[slots]
        for j in range(slots.shape[1]):
            others = np.prod(np.delete(vals, j, axis=1), axis=1)
            np.add.at(dq, (rows, slots[:, j]), coef * others)
    dq = dq[:, :K]

    prod_r = _products(conc, ka.slots_r)
    prod_p = _products(conc, ka.slots_p)
    if len(ka.tb_rows):
        base = kf[ka.tb_rows] * prod_r[ka.tb_rows] - kr[ka.tb_rows] * prod_p[ka.tb_rows]
        dq[ka.tb_rows] += base[:, None] * ka.eff[ka.tb_pos]
    if len(ka.fo_rows):
        _, dk_dM = ka.falloff(s.T, M_all[ka.fo_pos])
        r = ka.fo_rows
        base = dk_dM * (prod_r[r] - inv_kc[r] * prod_p[r])
        dq[r] += base[:, None] * ka.eff[ka.fo_pos]
    return dq
