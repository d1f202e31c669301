"""Variable-order (1-5), variable-step BDF integrator with modified Newton.

The solution history is carried as a backward-difference array ``D``
(``D[j]`` holds the j-th backward difference scaled to the current step),
so a step-size change is a linear remap of ``D`` and order changes are
free. Local error is estimated from the Newton correction; the error norm
is the weighted RMS with weights ``atol + rtol*|y|``.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

EPS = np.finfo(float).eps
MAX_ORDER = 5
NEWTON_MAXITER = 4
# a stalled Newton iterate whose correction is this far inside the error
# tolerance is at the roundoff floor and is accepted (error test still applies)
NEWTON_FLOOR = 0.25
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
MAX_NEWTON_FAILURES = 20

# gamma_k = sum_{j<=k} 1/j ; BDF leading coefficient and error constants
_GAMMA = np.hstack((0.0, np.cumsum(1.0 / np.arange(1, MAX_ORDER + 1))))
_ERROR_CONST = 1.0 / np.arange(1, MAX_ORDER + 2)


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(f"{message} (t = {t:.6e} s)")


def _remap_matrix(order: int, factor: float) -> np.ndarray:
    i = np.arange(1, order + 1)[:, None]
    j = np.arange(1, order + 1)
    M = np.zeros((order + 1, order + 1))
    M[1:, 1:] = (i - 1 - factor * j) / i
    M[0] = 1
    return np.cumprod(M, axis=0)


def _change_step(D: np.ndarray, order: int, factor: float) -> None:
    """Rescale the difference array for a new step h_new = factor * h."""
    RU = _remap_matrix(order, factor) @ _remap_matrix(order, 1.0)
    D[: order + 1] = RU.T @ D[: order + 1]


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x * x)))


class BDF:
    """Stiff integrator for y' = fun(t, y) with user Jacobian ``jac(t, y)``.

    Call :meth:`step` repeatedly; each call advances one accepted step
    without passing ``t_bound``.
    """

    def __init__(self, fun, jac, t0: float, y0, *, rtol: float, atol, first_step: float | None = None,
                 max_step: float = np.inf):
        self.fun = fun
        self.jac = jac
        self.t = float(t0)
        self.y = np.array(y0, dtype=float)
        self.n = self.y.size
        self.rtol = rtol
        self.atol = np.broadcast_to(np.asarray(atol, dtype=float), self.y.shape).copy()
        self.max_step = max_step
        self.newton_tol = max(10 * EPS / rtol, min(0.03, rtol**0.5))
        self.stats = {"steps": 0, "rejected": 0, "rhs": 0, "jacobians": 0, "lu": 0, "newton": 0}

        f0 = self._f(self.t, self.y)
        h = first_step if first_step is not None else self._initial_step(f0)
        self.h = min(h, max_step)
        self.order = 1
        self.D = np.zeros((MAX_ORDER + 3, self.n))
        self.D[0] = self.y
        self.D[1] = f0 * self.h
        self.n_equal_steps = 0
        self.J = self._jac(self.t, self.y)
        self.J_current = True
        self.LU = None

    def _f(self, t, y):
        self.stats["rhs"] += 1
        return self.fun(t, y)

    def _jac(self, t, y):
        self.stats["jacobians"] += 1
        return self.jac(t, y)

    def _initial_step(self, f0) -> float:
        scale = self.atol + self.rtol * np.abs(self.y)
        d0 = _rms(self.y / scale)
        d1 = _rms(f0 / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        y1 = self.y + h0 * f0
        f1 = self._f(self.t + h0, y1)
        d2 = _rms((f1 - f0) / scale) / h0
        if max(d1, d2) <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.5
        return min(100 * h0, h1)

    def set_state(self, y) -> None:
        """Replace the current solution value (e.g. after renormalization)."""
        y = np.asarray(y, dtype=float)
        self.D[0] = y
        self.y = y.copy()

    def _newton(self, t_new, y_pred, c, psi, scale):
        d = np.zeros(self.n)
        y = y_pred.copy()
        norm_old = None
        for k in range(NEWTON_MAXITER):
            f = self._f(t_new, y)
            self.stats["newton"] += 1
            if not np.all(np.isfinite(f)):
                return False, k + 1, y, d
            dy = lu_solve(self.LU, c * f - psi - d, check_finite=False)
            norm = _rms(dy / scale)
            rate = None if norm_old is None else norm / norm_old
            if rate is not None and rate >= 1 and norm <= NEWTON_FLOOR and norm_old <= NEWTON_FLOOR:
                return True, k + 1, y, d
            if rate is not None and (rate >= 1 or rate ** (NEWTON_MAXITER - k) / (1 - rate) * norm > self.newton_tol):
                return False, k + 1, y, d
            y += dy
            d += dy
            if norm == 0 or (rate is not None and rate / (1 - rate) * norm < self.newton_tol):
                return True, k + 1, y, d
            norm_old = norm
        return False, NEWTON_MAXITER, y, d

    def step(self, t_bound: float) -> None:
        t = self.t
        D = self.D
        order = self.order
        min_step = 10 * np.abs(np.nextafter(t, np.inf) - t)
        h = self.h
        if h > self.max_step:
            _change_step(D, order, self.max_step / h)
            h = self.max_step
            self.n_equal_steps = 0
            self.LU = None
        clipped_from = None
        newton_failures = 0

        while True:
            if h < min_step:
                raise IntegrationError("step size underflow", t)
            t_new = t + h
            if t_new >= t_bound:
                t_new = t_bound
                factor = (t_new - t) / h
                if factor < 1:
                    clipped_from = h
                    _change_step(D, order, factor)
                    self.n_equal_steps = 0
                    self.LU = None
                h = t_new - t

            y_pred = D[: order + 1].sum(axis=0)
            scale = self.atol + self.rtol * np.abs(y_pred)
            psi = D[1: order + 1].T @ _GAMMA[1: order + 1] / _GAMMA[order]
            c = h / _GAMMA[order]

            converged = False
            while not converged:
                if self.LU is None:
                    self.LU = lu_factor(np.eye(self.n) - c * self.J, check_finite=False)
                    self.stats["lu"] += 1
                converged, n_iter, y_new, d = self._newton(t_new, y_pred, c, psi, scale)
                if not converged:
                    if self.J_current:
                        break
                    self.J = self._jac(t_new, y_pred)
                    self.J_current = True
                    self.LU = None

            if not converged:
                newton_failures += 1
                if newton_failures > MAX_NEWTON_FAILURES:
                    raise IntegrationError("Newton iteration diverged after Jacobian refresh", t)
                self.stats["rejected"] += 1
                _change_step(D, order, 0.5)
                h *= 0.5
                self.n_equal_steps = 0
                self.LU = None
                clipped_from = None
                continue

            safety = 0.9 * (2 * NEWTON_MAXITER + 1) / (2 * NEWTON_MAXITER + n_iter)
            scale = self.atol + self.rtol * np.abs(y_new)
            error_norm = _rms(_ERROR_CONST[order] * d / scale)
            if error_norm > 1:
                self.stats["rejected"] += 1
                factor = max(MIN_FACTOR, safety * error_norm ** (-1 / (order + 1)))
                _change_step(D, order, factor)
                h *= factor
                self.n_equal_steps = 0
                clipped_from = None
                self.LU = None
                continue
            break

        self.stats["steps"] += 1
        self.n_equal_steps += 1
        self.t = t_new
        self.y = y_new
        self.J_current = False

        # d is the (order+1)-th difference of the new solution
        D[order + 2] = d - D[order + 1]
        D[order + 1] = d
        for i in reversed(range(order + 1)):
            D[i] += D[i + 1]

        if clipped_from is not None:
            grow = min(clipped_from / h, MAX_FACTOR)
            _change_step(D, order, grow)
            self.h = h * grow
            self.n_equal_steps = 0
            self.LU = None
            return

        self.h = h
        if self.n_equal_steps < order + 1:
            return

        err_m = _rms(_ERROR_CONST[order - 1] * D[order] / scale) if order > 1 else np.inf
        err_p = _rms(_ERROR_CONST[order + 1] * D[order + 2] / scale) if order < MAX_ORDER else np.inf
        norms = np.array([err_m, error_norm, err_p])
        with np.errstate(divide="ignore"):
            factors = norms ** (-1.0 / np.arange(order, order + 3))
        self.order = order + int(np.argmax(factors)) - 1
        factor = min(MAX_FACTOR, safety * float(np.max(factors)))
        _change_step(D, self.order, factor)
        self.h = h * factor
        self.n_equal_steps = 0
        self.LU = None
