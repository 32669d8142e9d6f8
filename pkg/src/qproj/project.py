"""The measures ``nu_{x,t,s}`` and the numerical check of the projection formula.

For an exact :class:`~qproj.family.Params`, coefficients and polynomial
values are computed in exact rationals (float quadrature nodes are
converted with ``Fraction(node)``, which is exact); only the eigensolver
and the final weighted sums run in floating point. This matters near
atoms, where the forward recurrence for ``pbar_n(.; t)`` is unstable.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .connect import beta_bar
from .family import (
    DomainError,
    Params,
    atom_candidate,
    aux_monic_coefficients,
    k_star,
    monic_coefficients,
    sign_flip,
)
from .measure import (
    NegativeProduct,
    Quadrature,
    _mpf_to_fraction,
    extended_gauss_rule,
    gauss_quadrature,
    jacobi_truncate,
    quadrature_from_jacobi,
)
from .qcore import Backend, Scalar
from .tridiag import EigenConvergenceError

__all__ = [
    "NodeResult",
    "ProjectionReport",
    "SweepReport",
    "atom_candidates",
    "nu_measure",
    "projection_check",
    "projection_sweep",
    "signed_functional_residuals",
    "tower_check",
]


@lru_cache(maxsize=256)
def _monic(params: Params, t, N: int):
    return monic_coefficients(params, t, N)


def _pbar_values(params: Params, t, y, n_max: int) -> list:
    """``pbar_0..pbar_{n_max}(y; t)``; exact when ``params`` is exact."""
    b, lam = _monic(params, t, max(n_max, 1))
    if params.backend is Backend.EXACT:
        y = Fraction(y)
    out = [y * 0 + 1]
    prev = y * 0
    for n in range(n_max):
        nxt = (y - b[n]) * out[n] - lam[n] * prev
        prev = out[n]
        out.append(nxt)
    return out


def _refine_nodes(params: Params, diag, lam, nodes, t, dps: int = 50) -> list:
    """Newton-polish float Gauss nodes lying near candidate points ``x_k(t)``.

    At those points ``pbar_n(.; t)`` is steep relative to its size, so float
    node errors would dominate the projection residual. The polished node is
    a zero of the characteristic polynomial ``Qbar_N`` computed at ``dps``
    digits and returned as an exact Fraction; other nodes are returned as
    ``Fraction(node)``.
    """
    import mpmath

    out = [Fraction(y) for y in nodes]
    if params.eta == 0 or params.q == 0:
        return out
    N = len(diag)
    cands = [float(atom_candidate(params, k, t)) for k in range(N)]
    near = [i for i, y in enumerate(nodes) if any(abs(y - c) <= 1e-8 * (1 + abs(c)) for c in cands)]
    if not near:
        return out
    with mpmath.workdps(dps):
        d = [mpmath.mpf(v.numerator) / v.denominator for v in diag]
        l = [mpmath.mpf(v.numerator) / v.denominator for v in lam]
        tol = mpmath.mpf(2) ** (-3.3 * dps)
        for i in near:
            y = mpmath.mpf(nodes[i])
            for _ in range(30):
                p0, p1 = mpmath.mpf(0), mpmath.mpf(1)
                dp0, dp1 = mpmath.mpf(0), mpmath.mpf(0)
                for n in range(N):
                    p0, p1, dp0, dp1 = p1, (y - d[n]) * p1 - l[n] * p0, dp1, p1 + (y - d[n]) * dp1 - l[n] * dp0
                if dp1 == 0:
                    break
                step = p1 / dp1
                y -= step
                if abs(step) <= tol * (1 + abs(y)):
                    break
            if abs(y - nodes[i]) <= 1e-10 * (1 + abs(nodes[i])):
                out[i] = _mpf_to_fraction(y)
    return out


def _finite_exact(params: Params, x, t, s, diag, lam, m: int) -> Optional[Quadrature]:
    # the leading m-block of a decoupled system, when its eigenvalues are the atom candidates x_j(t)
    if m == 1:
        return Quadrature((diag[0],), (Fraction(1),), "nu", len(diag))
    if params.eta == 0 or params.q == 0:
        return None
    nodes = sorted(atom_candidate(params, j, t) for j in range(m))
    if len(set(nodes)) != m:
        return None
    h = [Fraction(1)]
    for i in range(1, m):
        h.append(h[-1] * lam[i])
    weights = []
    for y in nodes:
        vals = [Fraction(1)]
        prev = Fraction(0)
        for n in range(m):
            nxt = (y - diag[n]) * vals[n] - lam[n] * prev
            prev = vals[n]
            vals.append(nxt)
        if vals[m] != 0:
            return None
        weights.append(1 / sum(vals[i] ** 2 / h[i] for i in range(m)))
    return Quadrature(tuple(nodes), tuple(weights), "nu", len(diag))


def nu_measure(params: Params, x, t, s, N: int) -> Quadrature:
    """Quadrature for ``nu_{x,t,s}``, the orthogonality measure of ``Qbar_n(.; x, t, s)``.

    At ``x = x_k(s)`` with ``k < N`` the Jacobi matrix decouples and the
    finite measure of the leading block is returned (exactly, for exact
    parameters).

    Raises
    ------
    NegativeProduct
        If ``x`` violates positivity, i.e. lies outside the support of ``mu_s``.
    """
    return _nu_from_system(params, jacobi_truncate(params, t, N, aux=(x, s)), x, t, s)


def _nu_from_system(params: Params, sys, x, t, s) -> Quadrature:
    m = sys.decoupling_index()
    if m < sys.N and params.backend is Backend.EXACT:
        quad = _finite_exact(params, params.scalar(x), params.scalar(t), params.scalar(s), sys.diag, sys.offdiag_sq, m)
        if quad is not None:
            return quad
    quad = quadrature_from_jacobi(sys)
    return Quadrature(quad.nodes, quad.weights, "nu", sys.N)


@dataclass(frozen=True)
class ProjectionReport:
    """Residuals of ``int pbar_n(y;t) nu_x(dy) = pbar_n(x;s)``.

    ``residuals[n]`` is the absolute residual, ``relative[n]`` divides it by
    ``1 + |pbar_n(x;s)|``. ``beta_defect`` is ``max_n |betabar_{n,0} - pbar_n(x;s)|``
    (``None`` when ``eta <= 0``).
    """

    x: Scalar
    t: Scalar
    s: Scalar
    N: int
    residuals: tuple
    relative: tuple
    normalization_error: float
    mean_err: float
    var_err: float
    finite: bool
    beta_defect: Optional[float] = None
    extended: bool = False

    @property
    def max_relative(self) -> float:
        return max(self.relative)


def _fsum_weighted(weights, values) -> float:
    return math.fsum(float(w) * float(v) for w, v in zip(weights, values))


def projection_check(params: Params, x, t, s, n_max: int, N: int) -> ProjectionReport:
    """Compare ``int pbar_n(y;t) nu_{x,t,s}(dy)`` with ``pbar_n(x;s)`` for ``n <= n_max``.

    Exact parameters with a float ``x`` use ``Fraction(x)``.
    """
    if params.backend is Backend.EXACT:
        x = Fraction(x)
    x, t, s = (params.scalar(v) for v in (x, t, s))
    if not 0 <= s <= t:
        raise DomainError("need 0 <= s <= t")
    if 2 * n_max > 2 * N - 1:
        raise DomainError("n_max too large for an N-point rule")
    sys = jacobi_truncate(params, t, N, aux=(x, s))
    nu = _nu_from_system(params, sys, x, t, s)
    finite = all(isinstance(w, Fraction) for w in nu.weights)
    target = _pbar_values(params, s, x, n_max)
    weights, points = nu.weights, nu.nodes
    extended = False
    if params.backend is Backend.EXACT and not finite:
        # float error estimate of the second moment; re-solve at higher precision if it is not negligible
        est = 64 * 2.0**-52 * math.fsum(w * y * y for w, y in zip(nu.weights, nu.nodes))
        rule = extended_gauss_rule(sys.diag, sys.offdiag_sq, nu.nodes) if est > 1e-10 else None
        if rule is not None:
            points, weights = rule
            extended = True
        else:
            points = _refine_nodes(params, sys.diag, sys.offdiag_sq, nu.nodes, t)
    exact_sums = finite or extended
    table = [_pbar_values(params, t, y, n_max) for y in points]
    res, rel = [], []
    for n in range(n_max + 1):
        vals = [row[n] for row in table]
        if exact_sums:
            err = float(abs(sum(w * v for w, v in zip(weights, vals)) - target[n]))
        else:
            err = abs(_fsum_weighted(weights, vals) - float(target[n]))
        res.append(err)
        rel.append(err / (1.0 + abs(float(target[n]))))
    if exact_sums:
        wsum = float(abs(sum(weights) - 1))
        mean_err = float(abs(sum(w * y for w, y in zip(weights, points)) - x))
        second = sum(w * y * y for w, y in zip(weights, points))
        var_err = float(abs(second - x * x - (t - s) * (1 + params.eta * x)))
    else:
        wsum = abs(math.fsum(float(w) for w in weights) - 1.0)
        xf = float(x)
        mean_err = abs(_fsum_weighted(weights, points) - xf)
        second = _fsum_weighted(weights, [y * y for y in points])
        var_err = abs(second - xf * xf - float((t - s) * (1 + params.eta * x)))
    defect = None
    if params.eta > 0:
        bb = beta_bar(params, x, s, n_max)
        defect = max(float(abs(bb[n, 0] - target[n])) for n in range(n_max + 1))
    return ProjectionReport(x, t, s, N, tuple(res), tuple(rel), wsum, mean_err, var_err, finite, defect, extended)


def signed_functional_residuals(params: Params, x, t, s, n_max: int, N: int) -> list:
    """``|e0^T pbar_n(J_nu) e0 - pbar_n(x;s)|`` for ``n <= n_max`` (exact parameters).

    ``J_nu`` is the truncated monic Jacobi matrix of ``Qbar``. This is the
    orthogonality functional of ``Qbar`` applied to ``pbar_n(.; t)``; it needs
    no positivity and so is defined even off the support of ``mu_s``.
    """
    if params.backend is not Backend.EXACT:
        raise DomainError("signed functional residuals need exact parameters")
    x = Fraction(x)
    diag, lam = aux_monic_coefficients(params, x, t, s, N)
    b, blam = _monic(params, params.scalar(t), max(n_max, 1))
    size = N

    def apply(v):
        w = [diag[i] * v[i] for i in range(size)]
        for i in range(size - 1):
            w[i] += v[i + 1]
            w[i + 1] += lam[i + 1] * v[i]
        return w

    zero = [Fraction(0)] * size
    cur = [Fraction(1)] + [Fraction(0)] * (size - 1)
    prev = zero
    target = _pbar_values(params, s, x, n_max)
    out = [float(abs(cur[0] - target[0]))]
    for n in range(n_max):
        Jv = apply(cur)
        nxt = [Jv[i] - b[n] * cur[i] - blam[n] * prev[i] for i in range(size)]
        prev, cur = cur, nxt
        out.append(float(abs(cur[0] - target[n + 1])))
    return out


def atom_candidates(params: Params, s, limit: int) -> list:
    """Atoms ``x_0(s), ..., x_k(s)`` of ``mu_s`` (``k <= min(k*, limit - 1)``), any sign of ``eta``."""
    if params.eta == 0:
        return []
    flip = params.eta < 0
    p = sign_flip(params, 0)[0] if flip else params
    idx = k_star(p, s)
    if idx.k_star is None:
        return [-atom_candidate(p, 0, s) if flip else atom_candidate(p, 0, s)]
    top = limit - 1 if idx.k_star == math.inf else min(int(idx.k_star), limit - 1)
    if p.q == 0:
        top = 0
    atoms = [atom_candidate(p, j, s) for j in range(top + 1)]
    return [-a for a in atoms] if flip else atoms


@dataclass
class NodeResult:
    """Outcome of the projection check at one node of ``mu_s``."""

    x: float
    route: str
    residuals: list = field(default_factory=list)
    mean_err: Optional[float] = None
    var_err: Optional[float] = None
    error: Optional[dict] = None
    snapped_to: Optional[int] = None

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else math.inf


@dataclass
class SweepReport:
    """Aggregate of :func:`projection_check` over the nodes of ``mu_s``."""

    params: Params
    t: Scalar
    s: Scalar
    N: int
    n_max: int
    nodes: list
    error: Optional[dict] = None
    tol: float = 1e-8

    @property
    def max_residual(self) -> float:
        if self.error or not self.nodes:
            return math.inf
        return max(r.max_residual for r in self.nodes)

    @property
    def median_residual(self) -> float:
        ok = [r.max_residual for r in self.nodes if r.error is None]
        return statistics.median(ok) if ok else math.inf

    @property
    def failures(self) -> list:
        return [r for r in self.nodes if r.error is not None or r.max_residual > self.tol]

    @property
    def ok(self) -> bool:
        return self.error is None and bool(self.nodes) and not self.failures

    def to_dict(self) -> dict:
        p = self.params
        return {
            "schema": "qproj.projection/1",
            "params": {k: _jsonable(getattr(p, k)) for k in ("eta", "theta", "tau", "q")},
            "t": _jsonable(self.t),
            "s": _jsonable(self.s),
            "N": self.N,
            "n_max": self.n_max,
            "tol": self.tol,
            "error": self.error,
            "nodes": [asdict(r) for r in self.nodes],
            "max_residual": self.max_residual,
            "median_residual": self.median_residual,
            "failures": [r.x for r in self.failures],
        }


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def _check_node(args) -> NodeResult:
    params, x, exact_x, snapped, t, s, n_max, N = args
    route = "atom" if snapped is not None else "node"
    try:
        rep = projection_check(params, exact_x, t, s, n_max, N)
    except NegativeProduct as exc:
        return NodeResult(x, "outside-support", error={"type": "NegativeProduct", "index": exc.index}, snapped_to=snapped)
    except (EigenConvergenceError, ZeroDivisionError, ArithmeticError) as exc:
        return NodeResult(x, route, error={"type": type(exc).__name__, "message": str(exc)}, snapped_to=snapped)
    if rep.finite:
        route += "-finite"
    elif rep.extended:
        route += "-extended"
    return NodeResult(x, route, list(rep.relative), rep.mean_err, rep.var_err, None, snapped)


def _snap(x: float, atoms: list, rel_tol: float):
    for j, a in enumerate(atoms):
        if abs(x - float(a)) <= rel_tol * (1 + abs(float(a))):
            return j, a
    return None, None


def projection_sweep(
    params: Params,
    t,
    s,
    n_max: int = 12,
    N: int = 40,
    xs=None,
    tol: float = 1e-8,
    snap_tol: float = 1e-10,
    workers: int = 1,
) -> SweepReport:
    """Run :func:`projection_check` at every node of the ``N``-point rule of ``mu_s``.

    Nodes within ``snap_tol`` (relative) of a known atom of ``mu_s`` are
    replaced by the exact atom. Per-node failures are collected, never
    raised. ``xs`` overrides the node set. ``workers > 1`` runs nodes in
    worker processes; results are identical and in node order.
    """
    try:
        t, s = params.scalar(t), params.scalar(s)
        if not 0 <= s <= t:
            raise DomainError("need 0 <= s <= t")
        if xs is None:
            xs = list(gauss_quadrature(params, s, N).nodes)
        atoms = atom_candidates(params, s, N) if params.q > 0 else []
    except (DomainError, NegativeProduct, EigenConvergenceError, ZeroDivisionError) as exc:
        return SweepReport(params, t, s, N, n_max, [], {"type": type(exc).__name__, "message": str(exc)}, tol)
    jobs = []
    for x in xs:
        j, a = _snap(float(x), atoms, snap_tol)
        exact_x = a if a is not None else x
        jobs.append((params, float(x), exact_x, j, t, s, n_max, N))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_check_node, jobs))
    else:
        results = [_check_node(job) for job in jobs]
    return SweepReport(params, t, s, N, n_max, results, None, tol)


def tower_check(params: Params, x, s, u, t, n_max: int = 8, N: int = 40) -> float:
    """Max relative gap between ``int int pbar_n dnu_{z,t,u} dnu_{x,u,s}(z)`` and
    ``int pbar_n dnu_{x,t,s}``, ``n <= n_max``.

    A derived consequence of applying the projection formula twice, not a
    stated result.
    """
    outer = nu_measure(params, Fraction(x) if params.backend is Backend.EXACT else x, u, s, N)
    direct = nu_measure(params, Fraction(x) if params.backend is Backend.EXACT else x, t, s, N)
    composed = [0.0] * (n_max + 1)
    for z, wz in zip(outer.nodes, outer.weights):
        inner = nu_measure(params, Fraction(z) if params.backend is Backend.EXACT else z, t, u, N)
        table = [_pbar_values(params, t, y, n_max) for y in inner.nodes]
        for n in range(n_max + 1):
            composed[n] += float(wz) * _fsum_weighted(inner.weights, [row[n] for row in table])
    table = [_pbar_values(params, t, y, n_max) for y in direct.nodes]
    worst = 0.0
    for n in range(n_max + 1):
        d = _fsum_weighted(direct.weights, [row[n] for row in table])
        worst = max(worst, abs(composed[n] - d) / (1 + abs(d)))
    return worst
