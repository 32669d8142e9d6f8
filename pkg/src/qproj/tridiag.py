"""Symmetric tridiagonal eigenproblems for Gauss quadrature.

Eigenvalues come from the implicit-shift QL iteration, accumulating only
the first row of the eigenvector matrix. Gauss weights are the squared
first components of unit eigenvectors; :func:`gauss_weights` recomputes
them from a twisted factorization so that tiny weights keep their
relative accuracy (the QL accumulation only has absolute accuracy).
"""

from __future__ import annotations

import math
from typing import Sequence

__all__ = ["EigenConvergenceError", "gauss_weights", "ql_implicit"]


class EigenConvergenceError(ArithmeticError):
    """The QL iteration exceeded its iteration cap."""

    def __init__(self, index: int, iterations: int):
        super().__init__(f"QL iteration did not converge for eigenvalue {index} after {iterations} sweeps")
        self.index = index
        self.iterations = iterations


def ql_implicit(diag: Sequence[float], offdiag: Sequence[float], max_iter: int | None = None):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Parameters
    ----------
    diag : sequence of float
        Main diagonal, length ``n``.
    offdiag : sequence of float
        Sub-diagonal, length ``n - 1``.
    max_iter : int, optional
        Total sweep cap, default ``50 * n``.

    Returns
    -------
    eigvals, first : list of float
        Eigenvalues in increasing order and the matching first components
        of the unit eigenvectors.
    """
    n = len(diag)
    d = [float(v) for v in diag]
    e = [float(v) for v in offdiag] + [0.0]
    z = [1.0] + [0.0] * (n - 1)
    cap = 50 * n if max_iter is None else max_iter
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > cap:
                raise EigenConvergenceError(l, total)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = sorted(range(n), key=d.__getitem__)
    return [d[i] for i in order], [z[i] for i in order]


def _safe(v: float, floor: float) -> float:
    return v if abs(v) > floor else math.copysign(floor, v if v != 0.0 else 1.0)


def gauss_weights(diag: Sequence[float], offdiag: Sequence[float], nodes: Sequence[float]) -> list[float]:
    """Squared first components of unit eigenvectors, to high relative accuracy.

    For each eigenvalue the eigenvector is rebuilt from forward ratios
    above and backward ratios below a twist index chosen where the
    eigenvector is largest; each ratio recurrence then runs in its stable
    direction. Magnitudes are tracked in logarithms.
    """
    n = len(diag)
    if n == 1:
        return [1.0]
    d = [float(v) for v in diag]
    e = [float(v) for v in offdiag]
    scale = max(abs(v) for v in d + e) or 1.0
    floor = 1e-300 * scale
    weights = []
    for y in nodes:
        # f[k] = v[k+1]/v[k] from the top, k = 0..n-2
        f = [0.0] * (n - 1)
        f[0] = _safe(-(d[0] - y) / e[0], floor)
        for k in range(1, n - 1):
            f[k] = _safe(-((d[k] - y) + e[k - 1] / f[k - 1]) / e[k], floor)
        # g[k] = v[k-1]/v[k] from the bottom, k = 1..n-1
        g = [0.0] * n
        g[n - 1] = _safe(-(d[n - 1] - y) / e[n - 2], floor)
        for k in range(n - 2, 0, -1):
            g[k] = _safe(-((d[k] - y) + e[k] / g[k + 1]) / e[k - 1], floor)
        best, twist = math.inf, 0
        for m in range(n):
            gam = d[m] - y
            if m > 0:
                gam += e[m - 1] / f[m - 1]
            if m < n - 1:
                gam += e[m] / g[m + 1]
            if abs(gam) < best:
                best, twist = abs(gam), m
        logv = [0.0] * n
        for k in range(twist - 1, -1, -1):
            logv[k] = logv[k + 1] - math.log(abs(f[k]))
        for k in range(twist + 1, n):
            logv[k] = logv[k - 1] - math.log(abs(g[k]))
        top = max(logv)
        total = math.fsum(math.exp(2.0 * (v - top)) for v in logv)
        weights.append(math.exp(2.0 * (logv[0] - top)) / total)
    return weights
