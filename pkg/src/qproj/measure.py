"""Orthogonality measures as Gauss quadratures, support data and diagnostics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .family import (
    DomainError,
    Params,
    ZeroPivotError,
    atom_candidate,
    aux_coeff_row,
    aux_monic_coefficients,
    coeff_row,
    k_star,
    monic_coefficients,
)
from .qcore import Backend, Scalar, exact_sqrt
from .tridiag import EigenConvergenceError, gauss_weights, ql_implicit

__all__ = [
    "DeterminacySeries",
    "NegativeProduct",
    "Quadrature",
    "SupportReport",
    "TridiagonalSystem",
    "determinacy_series",
    "extended_gauss_rule",
    "gauss_quadrature",
    "h_curve",
    "h_second_derivative",
    "jacobi_moments",
    "jacobi_truncate",
    "norm_Q",
    "orthonormal_scale",
    "orthonormal_values",
    "orthonormality_defect",
    "quadrature_from_jacobi",
    "sign_changes",
    "support_classify",
]


class NegativeProduct(ArithmeticError):
    """A squared off-diagonal entry is negative, so no positive measure exists."""

    def __init__(self, index: int, value=None):
        super().__init__(f"negative off-diagonal product at index {index}")
        self.index = index
        self.value = value


@dataclass(frozen=True)
class TridiagonalSystem:
    """Truncated Jacobi matrix ``J`` in monic form.

    ``offdiag_sq[n]`` couples rows ``n - 1`` and ``n``; ``offdiag_sq[0]`` is
    always 0.
    """

    diag: tuple
    offdiag_sq: tuple
    family: str

    @property
    def N(self) -> int:
        return len(self.diag)

    def decoupling_index(self) -> int:
        """Size of the leading block ended by the first exact zero coupling."""
        for n in range(1, self.N):
            if self.offdiag_sq[n] == 0:
                return n
        return self.N


@dataclass(frozen=True)
class Quadrature:
    """Nodes and positive weights of a discrete probability measure."""

    nodes: tuple
    weights: tuple
    origin: str
    truncation: int

    def integrate(self, values: Sequence) -> Scalar:
        return sum(w * v for w, v in zip(self.weights, values))

    def moment(self, d: int) -> Scalar:
        return self.integrate([y**d for y in self.nodes])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["node", "weight"])
        for y, w in zip(self.nodes, self.weights):
            writer.writerow([format(float(y), ".17g"), format(float(w), ".17g")])
        return buf.getvalue()


def jacobi_truncate(params: Params, t, N: int, aux: Optional[tuple] = None) -> TridiagonalSystem:
    """The ``N x N`` Jacobi matrix of ``pbar(.; t)`` or, with ``aux=(x, s)``, of ``Qbar``.

    Raises
    ------
    NegativeProduct
        If an off-diagonal product is negative before the first exact zero.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if aux is None:
        diag, lam = monic_coefficients(params, t, N)
        family = "mu"
    else:
        x, s = aux
        diag, lam = aux_monic_coefficients(params, x, t, s, N)
        family = "nu"
    for n in range(1, N):
        if lam[n] == 0:
            break
        if lam[n] < 0:
            raise NegativeProduct(n, lam[n])
    return TridiagonalSystem(tuple(diag), tuple(lam), family)


def quadrature_from_jacobi(sys: TridiagonalSystem) -> Quadrature:
    """Gauss rule of the leading (undecoupled) block of ``sys``.

    Raises
    ------
    NegativeProduct
        If the block has a negative off-diagonal product.
    """
    m = sys.decoupling_index()
    for n in range(1, m):
        if sys.offdiag_sq[n] < 0:
            raise NegativeProduct(n, sys.offdiag_sq[n])
    if m == 1:
        return Quadrature((sys.diag[0],), (sys.diag[0] * 0 + 1,), sys.family, sys.N)
    d = [float(v) for v in sys.diag[:m]]
    e = [math.sqrt(float(v)) for v in sys.offdiag_sq[1:m]]
    nodes, _ = ql_implicit(d, e)
    weights = gauss_weights(d, e, nodes)
    return Quadrature(tuple(nodes), tuple(weights), sys.family, sys.N)


def gauss_quadrature(params: Params, t, N: int, precise: bool = False, dps: int = 40) -> Quadrature:
    """``N``-point Gauss rule of ``mu_t``.

    With ``precise=True`` (exact parameters only) the float rule is re-solved
    at ``dps`` digits by :func:`extended_gauss_rule`; nodes and weights are
    then Fractions.
    """
    sys = jacobi_truncate(params, t, N)
    quad = quadrature_from_jacobi(sys)
    if not precise or len(quad.nodes) == 1:
        return quad
    if params.backend is not Backend.EXACT:
        raise DomainError("precise quadrature needs exact parameters")
    m = sys.decoupling_index()
    rule = extended_gauss_rule(sys.diag[:m], sys.offdiag_sq[:m], quad.nodes, dps)
    if rule is None:
        raise EigenConvergenceError(0, 0)
    return Quadrature(tuple(rule[0]), tuple(rule[1]), quad.origin, quad.truncation)


def _mpf_to_fraction(y) -> Fraction:
    sign, man, exp, _ = y._mpf_
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)


def extended_gauss_rule(diag, lam, nodes, dps: int = 40):
    """Re-solve a Gauss rule at ``dps`` digits from float starting nodes.

    Nodes are Newton-polished zeros of ``Qbar_N``; weights come from the
    Christoffel sum ``1 / sum_k Qbar_k(y)^2 / h_k``. Both are returned as
    exact Fractions of the ``dps``-digit values, or ``None`` if polishing
    fails to keep the nodes distinct.
    """
    import mpmath

    N = len(diag)
    with mpmath.workdps(dps):
        d = [mpmath.mpf(v.numerator) / v.denominator for v in diag]
        l = [mpmath.mpf(v.numerator) / v.denominator for v in lam]
        h = [mpmath.mpf(1)]
        for k in range(1, N):
            h.append(h[-1] * l[k])
        tol = mpmath.mpf(2) ** (-3.3 * dps)
        ys, ws = [], []
        for y0 in nodes:
            y = mpmath.mpf(y0)
            for _ in range(30):
                p0, p1, dp0, dp1 = mpmath.mpf(0), mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0)
                for n in range(N):
                    p0, p1, dp0, dp1 = p1, (y - d[n]) * p1 - l[n] * p0, dp1, p1 + (y - d[n]) * dp1 - l[n] * dp0
                if dp1 == 0:
                    break
                step = p1 / dp1
                y -= step
                if abs(step) <= tol * (1 + abs(y)):
                    break
            p0, p1 = mpmath.mpf(0), mpmath.mpf(1)
            acc = mpmath.mpf(1)
            for n in range(N - 1):
                p0, p1 = p1, (y - d[n]) * p1 - l[n] * p0
                acc += p1 * p1 / h[n + 1]
            ys.append(y)
            ws.append(1 / acc)
        if any(abs(a - b) <= tol * (1 + abs(a)) for a, b in zip(ys, ys[1:])):
            return None
        return [_mpf_to_fraction(y) for y in ys], [_mpf_to_fraction(w) for w in ws]




def jacobi_moments(diag: Sequence, offdiag_sq: Sequence, dmax: int) -> list:
    """Moments ``e0^T J^d e0`` for ``d <= dmax`` of the (monic) Jacobi matrix.

    Uses the unsymmetric form with unit super-diagonal, so exact inputs give
    exact moments. Moments of degree below ``2N`` coincide with those of the
    untruncated measure.
    """
    n = len(diag)
    v = [diag[0] * 0 + 1] + [diag[0] * 0] * (n - 1)
    out = [v[0]]
    for _ in range(dmax):
        w = [diag[i] * v[i] for i in range(n)]
        for i in range(n - 1):
            w[i] += v[i + 1]
            w[i + 1] += offdiag_sq[i + 1] * v[i]
        v = w
        out.append(v[0])
    return out


def _sqrt(value: Scalar) -> Scalar:
    if isinstance(value, Fraction):
        r = exact_sqrt(value)
        if r is not None:
            return r
    return math.sqrt(value)


def orthonormal_scale(params: Params, t, n: int) -> Scalar:
    """``sqrt(a_0...a_{n-1} / (c_1(t)...c_n(t)))``, turning ``p_n`` into ``ptilde_n``.

    Exact when the radicand is a rational square.
    """
    if not params.eta > 0:
        raise DomainError("orthonormal_scale requires eta > 0")
    num = den = params.q * 0 + 1
    for j in range(n):
        num *= coeff_row(params, j, t).a_n
        den *= coeff_row(params, j + 1, t).c_n
    if not (den > 0 and num > 0):
        raise DomainError("nonpositive radicand in orthonormal scaling")
    return _sqrt(num / den)


def orthonormal_values(params: Params, t, y, n_max: int) -> list:
    """``ptilde_0(y;t), ..., ptilde_{n_max}(y;t)`` in float.

    Uses the symmetric recurrence
    ``sqrt(lambda_{n+1}) ptilde_{n+1} = (y - b_n) ptilde_n - sqrt(lambda_n) ptilde_{n-1}``,
    which avoids the cancellation of evaluating ``p_n`` and rescaling.
    """
    diag, lam = monic_coefficients(params, t, n_max + 1)
    y = float(y)
    out = [1.0]
    prev = 0.0
    for n in range(n_max):
        if not lam[n + 1] > 0:
            raise DomainError(f"lambda_{n + 1} must be positive")
        nxt = ((y - float(diag[n])) * out[n] - math.sqrt(float(lam[n])) * prev) / math.sqrt(float(lam[n + 1]))
        prev = out[n]
        out.append(nxt)
    return out


def orthonormality_defect(params: Params, t, quad: Quadrature, n_max: int, dps: int = 40) -> float:
    """``max_{m,n <= n_max} |sum_i w_i ptilde_m(y_i) ptilde_n(y_i) - delta_mn|``.

    Rules with Fraction nodes and weights (see ``precise``) are evaluated at
    ``dps`` digits; float rules use :func:`orthonormal_values`.
    """
    if all(isinstance(v, Fraction) for v in quad.nodes + quad.weights) and params.backend is Backend.EXACT:
        import mpmath

        with mpmath.workdps(dps):
            mp = lambda v: mpmath.mpf(v.numerator) / v.denominator  # noqa: E731
            diag, lam = monic_coefficients(params, t, n_max + 1)
            d, l = [mp(v) for v in diag], [mp(v) for v in lam]
            e = [mpmath.sqrt(v) for v in l]
            rows = []
            for y in quad.nodes:
                y = mp(y)
                out, prev = [mpmath.mpf(1)], mpmath.mpf(0)
                for n in range(n_max):
                    nxt = ((y - d[n]) * out[n] - e[n] * prev) / e[n + 1]
                    prev = out[n]
                    out.append(nxt)
                rows.append(out)
            w = [mp(v) for v in quad.weights]
            worst = mpmath.mpf(0)
            for m_ in range(n_max + 1):
                for n in range(m_, n_max + 1):
                    val = mpmath.fsum(wi * r[m_] * r[n] for wi, r in zip(w, rows))
                    worst = max(worst, abs(val - (1 if m_ == n else 0)))
            return float(worst)
    table = [orthonormal_values(params, t, y, n_max) for y in quad.nodes]
    worst = 0.0
    for m in range(n_max + 1):
        for n in range(m, n_max + 1):
            val = math.fsum(float(w) * row[m] * row[n] for w, row in zip(quad.weights, table))
            worst = max(worst, abs(val - (1.0 if m == n else 0.0)))
    return worst


def norm_Q(params: Params, x, t, s, k: int) -> Scalar:
    """``||Q_k||^2 = prod_{j=1}^k C_j(t,s) / A_{j-1}(x,s)``.

    Raises
    ------
    ZeroPivotError
        If some ``A_{j-1}(x, s)`` vanishes.
    """
    out = params.q * 0 + 1
    for j in range(1, k + 1):
        A = aux_coeff_row(params, j - 1, x, t, s).A_n
        if A == 0:
            raise ZeroPivotError(j - 1, "A_n")
        out *= aux_coeff_row(params, j, x, t, s).C_n / A
    return out


@dataclass(frozen=True)
class SupportReport:
    """Support data of ``mu_t``.

    ``atoms`` lists ``x_0(t), ..., x_{k*}(t)`` (capped at ``max_atoms`` when
    ``k*`` is unbounded, with ``atoms_truncated`` set).
    """

    lower_bound: Scalar
    atoms: tuple
    y_star: Optional[float]
    k_star: Optional[float]
    m_star: Optional[float]
    z_star: Optional[float]
    atoms_truncated: bool = False


def support_classify(params: Params, t, max_atoms: int = 64) -> SupportReport:
    """Lower bound, atoms, ``y*``, ``k*``, ``m*`` and ``z*`` for ``mu_t`` (``eta > 0``)."""
    p = params
    if not p.eta > 0:
        raise DomainError("support_classify requires eta > 0")
    t = p.scalar(t)
    lower = atom_candidate(p, 0, t)
    idx = k_star(p, t)
    z = None
    if p.q < 1:
        num = (1 - p.q) * (1 - p.q + p.eta * p.theta) + p.eta**2 * p.tau
        den = p.eta**2 * ((1 - p.q) * t + p.tau)
        if den > 0 and num >= 0:
            z = math.sqrt(float(num / den))
    if idx.k_star is None:
        return SupportReport(lower, (), None, None, None, z)
    truncated = idx.k_star == math.inf
    last = max_atoms - 1 if truncated else int(idx.k_star)
    atoms = tuple(atom_candidate(p, j, t) for j in range(last + 1))
    if idx.m_star == math.inf:
        y_star = math.inf
    else:
        y_star = atom_candidate(p, int(idx.m_star), t)
    return SupportReport(lower, atoms, y_star, idx.k_star, idx.m_star, z, truncated)


def h_curve(params: Params, s, z):
    """``h(z)`` interpolating ``x_n(s) = h(q^n)``; requires ``q < 1``, ``eta != 0``."""
    p = params
    if p.q == 1 or p.eta == 0:
        raise DomainError("h(z) needs q < 1 and eta != 0")
    return (
        -1 / (p.eta * z)
        + (1 - z) * (s * z * p.eta - p.theta) / (z * (1 - p.q))
        - (1 - z) ** 2 * p.eta * p.tau / (z * (1 - p.q) ** 2)
    )


def h_second_derivative(params: Params, z):
    """Closed form of ``h''(z)``; independent of ``s``."""
    p = params
    if p.q == 1 or p.eta == 0:
        raise DomainError("h(z) needs q < 1 and eta != 0")
    num = (1 - p.q) * (1 - p.q + p.eta * p.theta) + p.eta**2 * p.tau
    return -2 * num / ((1 - p.q) ** 2 * z**3 * p.eta)


def sign_changes(seq: Sequence, rel_zero: float = 1e-12) -> int:
    """Number of strict sign alternations in ``seq``.

    Exact zeros are skipped. Float entries below ``rel_zero`` times the
    running maximum modulus are treated as zero and skipped too.
    """
    count = 0
    last = 0
    running = 0.0
    for v in seq:
        mag = abs(v)
        if isinstance(v, float):
            running = max(running, mag)
            if mag <= rel_zero * running:
                continue
        elif v == 0:
            continue
        sgn = 1 if v > 0 else -1
        if last and sgn != last:
            count += 1
        last = sgn
    return count


@dataclass(frozen=True)
class DeterminacySeries:
    """Partial sums ``S_n`` of the two series at ``x_0``, for ``n = 0..N``."""

    first: tuple
    second: tuple

    @property
    def combined(self) -> tuple:
        return tuple(a + b for a, b in zip(self.first, self.second))


def determinacy_series(params: Params, t, N: int) -> DeterminacySeries:
    """Partial sums of ``sum |ptilde_n(x_0)|^2`` and ``sum |qtilde_n(x_0)|^2`` at ``q = 1``.

    Uses ``|ptilde_n(x_0)|^2 = a_0...a_{n-1} / (c_1...c_n)`` and
    ``|qtilde_n(x_0)| = |ptilde_n(x_0)| f_n`` with
    ``f_n = sum_{k<n} c_1...c_k / (a_0...a_k)`` (``f_0 = 0``). Computed in
    float.
    """
    p = params
    if not (p.eta > 0 and p.q == 1 and p.tau > 0):
        raise DomainError("determinacy_series needs eta > 0, q = 1, tau > 0")
    fp = p.as_float()
    t = float(t)
    a = [coeff_row(fp, n, t).a_n for n in range(N + 1)]
    c = [coeff_row(fp, n, t).c_n for n in range(N + 1)]
    ratio = 1.0  # a_0..a_{n-1} / c_1..c_n
    term = 1.0 / a[0]  # c_1..c_k / a_0..a_k at k = 0
    f = 0.0
    first, second = [], []
    s1 = s2 = 0.0
    for n in range(N + 1):
        if n > 0:
            ratio *= a[n - 1] / c[n]
            f += term
            term *= c[n] / a[n]
        s1 += ratio
        s2 += ratio * f * f
        first.append(s1)
        second.append(s2)
    return DeterminacySeries(tuple(first), tuple(second))
