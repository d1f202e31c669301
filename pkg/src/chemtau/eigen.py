"""Eigenvalues of dense real nonsymmetric matrices.

Balancing by powers of two, Householder reduction to upper Hessenberg
form, then the Francis implicit double-shift QR iteration with deflation
on negligible subdiagonal entries.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["EigenError", "balance", "hessenberg", "hessenberg_eigenvalues", "eigenvalues", "eigenvector"]

RADIX = 2.0
MAX_ITS = 60
SAFE_MIN = np.finfo(float).tiny / np.finfo(float).eps
SAFE_MAX = 1.0 / SAFE_MIN


class EigenError(ArithmeticError):
    def __init__(self, message: str, matrix: np.ndarray):
        self.matrix = matrix
        dump = np.array2string(matrix, precision=6, max_line_width=200, threshold=10_000)
        super().__init__(f"{message}\n{dump}")


def balance(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Similarity scaling D^-1 A D with D a diagonal of powers of two.

    Returns (balanced matrix, scaling vector). Rows/columns that are zero
    off the diagonal are left untouched.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    d = np.ones(n)
    sq = RADIX * RADIX
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(a[:, i]).sum() - abs(a[i, i])
            r = np.abs(a[i, :]).sum() - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / RADIX
            f = 1.0
            s = c + r
            while c < g:
                f *= RADIX
                c *= sq
            g = r * RADIX
            while c > g:
                f /= RADIX
                c /= sq
            # keep the accumulated scale inside the safe range
            if (f < 1.0 and d[i] * f <= SAFE_MIN) or (f > 1.0 and d[i] >= SAFE_MAX / f):
                continue
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
                d[i] *= f
    return a, d


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper Hessenberg matrix orthogonally similar to ``a``."""
    h = np.array(a, dtype=float)
    n = h.shape[0]
    for k in range(n - 2):
        xmax = np.abs(h[k + 1:, k]).max()
        if xmax == 0.0:
            continue
        # work on x/xmax so the norm cannot underflow
        v = h[k + 1:, k] / xmax
        v[0] += math.copysign(np.linalg.norm(v), v[0])
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def hessenberg_eigenvalues(h: np.ndarray) -> np.ndarray:
    """All eigenvalues of an upper Hessenberg matrix (destroys a copy)."""
    a = np.array(h, dtype=float)
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = float(np.abs(np.triu(a, -1)).sum())
    tiny = np.finfo(float).eps * anorm
    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            # find a negligible subdiagonal element
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                # relative test, plus a norm-wise one for strongly graded blocks
                # whose shifts would underflow
                if abs(a[l, l - 1]) + s == s or abs(a[l, l - 1]) <= tiny:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = z
                    wi[nn] = -z
                nn -= 2
                break
            if its == MAX_ITS:
                raise EigenError(f"QR iteration did not converge for eigenvalue {nn}", np.array(h))
            if its in (10, 20, 40):
                # exceptional shift
                t += x
                a[np.arange(nn + 1), np.arange(nn + 1)] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            # look for two consecutive small subdiagonal elements
            m = nn - 2
            while True:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            # double-shift QR sweep on rows l..nn, columns m..nn
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                cols = slice(k, nn + 1)
                pr = a[k, cols] + q * a[k + 1, cols]
                if k != nn - 1:
                    pr = pr + r * a[k + 2, cols]
                    a[k + 2, cols] -= pr * z
                a[k + 1, cols] -= pr * y
                a[k, cols] -= pr * x
                rows = slice(l, min(nn, k + 3) + 1)
                pc = x * a[rows, k] + y * a[rows, k + 1]
                if k != nn - 1:
                    pc = pc + z * a[rows, k + 2]
                    a[rows, k + 2] -= pc * r
                a[rows, k + 1] -= pc * q
                a[rows, k] -= pc
    return wr + 1j * wi


def eigenvalues(J: np.ndarray) -> np.ndarray:
    """Full complex spectrum of a real square matrix."""
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ValueError("eigenvalues() needs a square matrix")
    if not np.all(np.isfinite(J)):
        raise EigenError("matrix has non-finite entries", J)
    if J.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    if J.shape[0] == 1:
        return J[0].astype(complex)
    amax = np.abs(J).max()
    if amax == 0.0:
        return np.zeros(J.shape[0], dtype=complex)
    # exact power-of-two scaling to O(1) so deflation tests never underflow
    e = math.frexp(amax)[1]
    b, _ = balance(np.ldexp(J, -e))
    lam = hessenberg_eigenvalues(hessenberg(b))
    return np.ldexp(lam.real, e) + 1j * np.ldexp(lam.imag, e)


def eigenvector(J: np.ndarray, lam: complex, iterations: int = 3) -> np.ndarray:
    """Unit eigenvector for ``lam`` by shifted inverse iteration."""
    J = np.asarray(J, dtype=complex)
    n = J.shape[0]
    scale = max(np.abs(J).max(), 1.0)
    shift = lam + scale * 1e-10 * (1 + 1j)
    A = J - shift * np.eye(n)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n) + 0j
    for _ in range(iterations):
        v = np.linalg.solve(A, v)
        v /= np.linalg.norm(v)
    return v
