"""Sparse exact polynomials and rational functions, and identity certificates.

Coefficient formulas are written in the indeterminates
``q, v = 1/eta, theta, w = eta*tau, s, t, x``, in which ``a_n``, ``b_n(t)``
and ``c_n(t)`` are polynomial up to a single factor ``1/v``. Each
certificate is the polynomial left after clearing denominators; an
identity holds for the given indices iff it is the zero polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

__all__ = [
    "BASIS",
    "Certificate",
    "MultiPoly",
    "RationalFunction",
    "gamma_poly",
    "h2_polynomial",
    "q_binomial_poly",
    "q_factorial_poly",
    "q_number_poly",
    "verify_H2_t_cancellation",
    "verify_HH0",
    "verify_HHs",
    "verify_boundary_gammas",
    "verify_delta_claim",
    "verify_pascal",
    "verify_splitting",
]

BASIS = ("q", "v", "theta", "w", "s", "t", "x")


class MultiPoly:
    """Sparse polynomial with exact rational coefficients.

    ``terms`` maps exponent tuples (aligned with ``variables``) to nonzero
    Fractions.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str] = BASIS, terms: Mapping | None = None):
        self.variables = tuple(variables)
        self.terms = {e: Fraction(c) for e, c in (terms or {}).items() if c != 0}

    # construction
    @classmethod
    def const(cls, c, variables=BASIS) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables=BASIS, power: int = 1) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            variables = variables + (name,)
        e = [0] * len(variables)
        e[variables.index(name)] = power
        return cls(variables, {tuple(e): 1})

    def _lift(self, variables: tuple) -> "MultiPoly":
        if variables == self.variables:
            return self
        idx = [variables.index(v) for v in self.variables]
        out = {}
        for e, c in self.terms.items():
            f = [0] * len(variables)
            for i, k in zip(idx, e):
                f[i] = k
            out[tuple(f)] = c
        return MultiPoly(variables, out)

    def _coerce(self, other) -> tuple["MultiPoly", "MultiPoly"]:
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction)):
                other = MultiPoly.const(other, self.variables)
            else:
                return NotImplemented, NotImplemented
        if other.variables == self.variables:
            return self, other
        merged = self.variables + tuple(v for v in other.variables if v not in self.variables)
        return self._lift(merged), other._lift(merged)

    # ring operations
    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        out = dict(a.terms)
        for e, c in b.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly(a.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        out: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(i + j for i, j in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return MultiPoly(a.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = MultiPoly.const(1, self.variables)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        raise TypeError("MultiPoly is not a field; use RationalFunction")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(other, self.variables)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = self._coerce(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash(frozenset(self._canonical().terms.items()))

    def _canonical(self) -> "MultiPoly":
        used = [i for i in range(len(self.variables)) if any(e[i] for e in self.terms)]
        names = tuple(self.variables[i] for i in used)
        return MultiPoly(names, {tuple(e[i] for i in used): c for e, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, name: str) -> int:
        if name not in self.variables:
            return 0
        i = self.variables.index(name)
        return max((e[i] for e in self.terms), default=0)

    def coefficient(self, name: str, power: int) -> "MultiPoly":
        """Coefficient of ``name**power`` as a polynomial in the other variables."""
        if name not in self.variables:
            return self if power == 0 else MultiPoly(self.variables)
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == power:
                f = list(e)
                f[i] = 0
                out[tuple(f)] = c
        return MultiPoly(self.variables, out)

    def eval(self, values: Mapping[str, object]) -> "MultiPoly | Fraction":
        """Substitute values for some variables; returns a number when none remain."""
        idx = {v: i for i, v in enumerate(self.variables)}
        keep = [i for i, v in enumerate(self.variables) if v not in values]
        out: dict = {}
        for e, c in self.terms.items():
            val = c
            for name, x in values.items():
                if name in idx and e[idx[name]]:
                    val = val * x ** e[idx[name]]
            f = tuple(e[i] for i in keep)
            out[f] = out.get(f, 0) + val
        if not keep:
            return out.get((), Fraction(0))
        return MultiPoly(tuple(self.variables[i] for i in keep), out)

    def sorted_terms(self) -> list:
        """Terms in descending lexicographic exponent order."""
        return sorted(self.terms.items(), reverse=True)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.variables, e) if k)
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts)


class RationalFunction:
    """Quotient of two MultiPolys; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, MultiPoly):
            num = MultiPoly.const(num)
        if den is None:
            den = MultiPoly.const(1, num.variables)
        elif not isinstance(den, MultiPoly):
            den = MultiPoly.const(den, num.variables)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = num, den

    @staticmethod
    def _wrap(x) -> "RationalFunction":
        return x if isinstance(x, RationalFunction) else RationalFunction(x)

    def __add__(self, other):
        o = self._wrap(other)
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        o = self._wrap(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._wrap(other) / self

    def __eq__(self, other):
        o = self._wrap(other)
        return self.num * o.den == o.num * self.den

    __hash__ = None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eval(self, values: Mapping[str, object]):
        num, den = self.num.eval(values), self.den.eval(values)
        if isinstance(num, MultiPoly):
            return RationalFunction(num, den)
        return num / den


@dataclass(frozen=True)
class Certificate:
    """Cleared polynomial of ``LHS - RHS`` for one identity instance."""

    identity: str
    indices: tuple
    polynomial: MultiPoly

    @property
    def ok(self) -> bool:
        return self.polynomial.is_zero()

    def dump(self) -> str:
        return f"{self.identity}{self.indices}: {self.polynomial!r}"


# q-numbers and coefficient formulas as polynomials

_Q = MultiPoly.var("q")
_ONE = MultiPoly.const(1)


def q_number_poly(n: int) -> MultiPoly:
    """``[n]_q`` as a polynomial in ``q``."""
    if n < 0:
        raise ValueError("q-number index must be nonnegative")
    return MultiPoly(BASIS, {(i,) + (0,) * 6: 1 for i in range(n)})


def q_factorial_poly(n: int) -> MultiPoly:
    out = _ONE
    for m in range(1, n + 1):
        out = out * q_number_poly(m)
    return out


def q_binomial_poly(n: int, k: int) -> MultiPoly:
    """Gaussian binomial via q-Pascal, so no polynomial division is needed."""
    if not 0 <= k <= n:
        return MultiPoly(BASIS)
    return _pascal_rows(n)[k]


@lru_cache(maxsize=64)
def _pascal_rows(n: int) -> tuple:
    if n == 0:
        return (_ONE,)
    row = _pascal_rows(n - 1)
    new = [_ONE] * (n + 1)
    for j in range(1, n):
        new[j] = row[j - 1] + _Q**j * row[j]
    return tuple(new)


def gamma_poly(n: int, k: int, j: int) -> MultiPoly:
    """``gamma_{n,k,j} = q^((k-j)(k-j-1)/2) [n k]_q [k j]_q``; zero off range."""
    if not (0 <= j <= k <= n):
        return MultiPoly(BASIS)
    return _Q ** ((k - j) * (k - j - 1) // 2) * q_binomial_poly(n, k) * q_binomial_poly(k, j)


def _v(name):
    return MultiPoly.var(name)


V, THETA, W, S, T, X = (_v(n) for n in ("v", "theta", "w", "s", "t", "x"))


# v-scaled coefficients: each of these is v times the named coefficient, a polynomial
def _va(n: int) -> MultiPoly:
    Q = q_number_poly(n)
    return V * (V + THETA * Q + W * Q * Q)


def _vb(n: int, t: MultiPoly) -> MultiPoly:
    if n == 0:
        return MultiPoly(BASIS)
    Q, Qm = q_number_poly(n), q_number_poly(n - 1)
    return (t + V * THETA + V * (Q + Qm) * W) * Q


def _vc(n: int, t: MultiPoly) -> MultiPoly:
    if n == 0:
        return MultiPoly(BASIS)
    return (t + V * W * q_number_poly(n - 1)) * q_number_poly(n)


def _vA(k: int) -> MultiPoly:
    return _va(k) + V * _Q**k * X - S * _Q**k * q_number_poly(k)


def _vB(k: int) -> MultiPoly:
    out = _vb(k, T) + V * _Q**k * X
    if k > 0:
        out = out - (1 + _Q) * _Q ** (k - 1) * S * q_number_poly(k)
    return out


def _vC(k: int) -> MultiPoly:
    if k == 0:
        return MultiPoly(BASIS)
    return _vc(k, T) - _Q ** (k - 1) * S * q_number_poly(k)


def _rf(p) -> RationalFunction:
    return RationalFunction(p)


def _ratio(num_idx: Iterable[int], den_idx: Iterable[int], qpow: int = 0):
    """``q^qpow prod [num] / prod [den]`` or ``None`` when a numerator factor is ``[0]``."""
    num_idx, den_idx = list(num_idx), list(den_idx)
    if any(i == 0 for i in num_idx):
        return None
    num = MultiPoly.const(1)
    for i in num_idx:
        num = num * q_number_poly(i)
    den = MultiPoly.const(1)
    for i in den_idx:
        den = den * q_number_poly(i)
    if qpow >= 0:
        num = num * _Q**qpow
    else:
        den = den * _Q ** (-qpow)
    return RationalFunction(num, den)


def _sum_terms(terms) -> RationalFunction:
    out = RationalFunction(MultiPoly(BASIS))
    for t in terms:
        if t is not None:
            out = out + t
    return out


def _times(coef: MultiPoly, ratio):
    return None if ratio is None else ratio * coef


def verify_HHs(n: int, k: int, j: int) -> Certificate:
    """Coefficient-at-``s`` identity for ``1 <= j <= k <= n``, cleared over ``[n-k+1][k+1-j]``."""
    if not 1 <= j <= k <= n:
        raise ValueError("need 1 <= j <= k <= n")
    one = MultiPoly.const(1)
    terms = [
        _times(-one, _ratio([k - 1, k - j], [n - k + 1], j)) if k > 1 else None,
        _times(one, _ratio([n - j, k - j], [n - k + 1], j)),
        _times(one, _ratio([n + 1 - j, j], [n - k + 1], k - 1)),
        _rf(-(1 + _Q) * _Q ** (k - 1) * q_number_poly(k)),
        _rf(_Q**k * q_number_poly(n - j)),
        _times(one, _ratio([n + 1 - j, j], [k + 1 - j], 2 * k - j)),
        _times(-one, _ratio([k + 1, n - k], [k + 1 - j], 2 * k - j)),
    ]
    return Certificate("HHs", (n, k, j), _sum_terms(terms).num)


def _a0(n):
    Q = q_number_poly(n)
    return V + THETA * Q + W * Q * Q


def _b0(n):
    if n == 0:
        return MultiPoly(BASIS)
    Q, Qm = q_number_poly(n), q_number_poly(n - 1)
    return (THETA + (Q + Qm) * W) * Q


def _c0(n):
    if n == 0:
        return MultiPoly(BASIS)
    return W * q_number_poly(n - 1) * q_number_poly(n)


def _hh0_sides(n: int, k: int, j: int):
    lhs = [
        _times(_a0(n), _ratio([n + 1, k - j], [n + 1 - k, j + 1], j - k + 1)),
        _rf(_b0(n) - _b0(k)),
        _times(_c0(n), _ratio([n - k, j], [n, k + 1 - j], k - j)),
    ]
    # a_{n-j-1} appears only multiplied by [k-j], which vanishes when j = k
    aj = (lambda: _a0(n - j - 1)) if k > j else (lambda: MultiPoly(BASIS))
    rhs = [
        _times(_a0(k - 1), _ratio([k - j], [n + 1 - k], j - k + 1)),
        _times(aj(), _ratio([k - j, k - j - 1] if k > j else [0], [n + 1 - k, j + 1], 2 * j - k + 2)),
        _times(_b0(n - j), _ratio([k - j], [n + 1 - k], j)),
        _times(_c0(n + 1 - j), _ratio([j], [n + 1 - k], k - 1)),
        _times(aj(), _ratio([k - j], [j + 1], j + 1)),
        _rf(_b0(n - j) * _Q**k),
        _times(_c0(n + 1 - j), _ratio([j], [k + 1 - j], 2 * k - j)),
        _times(_c0(k + 1), _ratio([n - k], [k + 1 - j], k - j)),
    ]
    return _sum_terms(lhs), _sum_terms(rhs)


def verify_HH0(n: int, k: int, j: int) -> Certificate:
    """Coefficient-free-of-``s`` identity over ``q, v, theta, w`` for ``1 <= j <= k <= n``."""
    if not 1 <= j <= k <= n:
        raise ValueError("need 1 <= j <= k <= n")
    lhs, rhs = _hh0_sides(n, k, j)
    return Certificate("HH0", (n, k, j), (lhs - rhs).num)


def _beta_symbolic(n: int, k: int, p: list) -> MultiPoly:
    if k < 0 or k > n or n < 0:
        return MultiPoly(BASIS)
    out = MultiPoly(BASIS)
    for j in range(k + 1):
        out = out + gamma_poly(n, k, j) * p[n - j]
    return out


def h2_polynomial(n: int, k: int) -> MultiPoly:
    """``v (LHS - RHS)`` of the ``beta``-equation at ``(n, k)`` with symbolic ``p_0..p_{n+1}``.

    ``beta_{m,k}`` is the closed form ``sum_j gamma_{m,k,j} p_{m-j}``. The
    variables ``p0, p1, ...`` stand for ``p_m(x; s)``.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    p = [MultiPoly.var(f"p{m}") for m in range(n + 2)]
    beta = lambda m, i: _beta_symbolic(m, i, p)  # noqa: E731
    lhs = _va(n) * beta(n + 1, k) + _vb(n, T) * beta(n, k) + _vc(n, T) * beta(n - 1, k)
    rhs = _vB(k) * beta(n, k) + _vC(k + 1) * beta(n, k + 1)
    if k > 0:
        rhs = rhs + _vA(k - 1) * beta(n, k - 1)
    return lhs - rhs


def verify_H2_t_cancellation(n: int, k: int) -> Certificate:
    """The coefficient of ``t`` in :func:`h2_polynomial` must vanish."""
    poly = h2_polynomial(n, k)
    if poly.degree("t") > 1:
        return Certificate("H2t", (n, k), poly)
    return Certificate("H2t", (n, k), poly.coefficient("t", 1))


def verify_boundary_gammas(k: int, j: int | None = None) -> list:
    """Certificates for ``gamma_{k,0} = a_k``, ``gamma_{k,j} = a_k`` (``1 <= j <= k``)
    and ``gamma_{k,k+1} = 0``.

    Two routes are certified. The raw coefficient of ``p_{k+1-J}`` in the
    expansion of ``(a_k/q^k) prod_{j<=k} A_j/a_j`` must equal
    ``[k J] q^((k-J)(k-J-1)/2) a_k`` (zero for ``J = k+1``), with ``b`` and
    ``c`` at time ``s``. The closed form of ``gamma_{k,j}`` with its q-number
    ratios must reduce to ``a_k``. With ``j`` given only the certificates
    bearing on ``gamma_{k,j}`` are returned.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    certs = []
    # v * coefficient of p_{k+1-J}
    for J in range(k + 2):
        raw = MultiPoly(BASIS)
        if J <= k:
            raw = raw + _va(k - J) * q_binomial_poly(k, J) * _Q ** ((k - J) * (k - J - 1) // 2)
        if 1 <= J <= k + 1:
            i = J - 1
            w_i = q_binomial_poly(k, i) * _Q ** ((k - i) * (k - i - 1) // 2)
            raw = raw + (_vb(k - i, S) - S * q_number_poly(k)) * w_i
        if 2 <= J <= k + 1:
            i = J - 2
            w_i = q_binomial_poly(k, i) * _Q ** ((k - i) * (k - i - 1) // 2)
            raw = raw + _vc(k - i, S) * w_i
        expected = MultiPoly(BASIS)
        if J <= k:
            expected = _va(k) * q_binomial_poly(k, J) * _Q ** ((k - J) * (k - J - 1) // 2)
        certs.append(Certificate("gamma-raw", (k, J), raw - expected))
    for i in range(1, k + 1):
        expr = _rf(_va(k - i))
        expr = expr + _ratio([i], [k + 1 - i], k - i) * (_vb(k + 1 - i, S) - S * q_number_poly(k))
        r = _ratio([i, i - 1], [k + 2 - i, k + 1 - i], 2 * k - 2 * i + 1)
        if r is not None:
            expr = expr + r * _vc(k + 2 - i, S)
        certs.append(Certificate("gamma-closed", (k, i), (expr - _rf(_va(k))).num))
    if j is not None:
        certs = [c for c in certs if c.indices[1] == j]
    return certs


def verify_pascal(k: int, j: int, q) -> bool:
    """Both q-Pascal forms at a rational ``q``, via independent polynomial expansions."""
    lhs = q_binomial_poly(k + 1, j)
    f1 = _Q**j * q_binomial_poly(k, j) + q_binomial_poly(k, j - 1)
    f2 = q_binomial_poly(k, j) + _Q ** (k - j + 1) * q_binomial_poly(k, j - 1)
    vals = {"q": Fraction(q)}
    return lhs.eval(vals) == f1.eval(vals) == f2.eval(vals) and lhs == f1 == f2


def verify_splitting(k: int, j: int) -> Certificate:
    """``[k-j]_q + q^(k-j) [j]_q - [k]_q``."""
    return Certificate("split", (k, j), q_number_poly(k - j) + _Q ** (k - j) * q_number_poly(j) - q_number_poly(k))


def verify_delta_claim(k: int, r: int, n: int) -> Certificate:
    """``(Delta_{q,k} y)_n - [r = 0]`` for ``y_m = [m, k-r]_q q^(r m)``, ``n >= k``.

    ``(Delta_{q,k} y)_n = sum_j (-1)^j [k j]_q q^(j(j+1)/2) y_{n-j}``.
    """
    if not (0 <= r <= k and n >= k):
        raise ValueError("need 0 <= r <= k <= n")
    out = MultiPoly.const(-1 if r == 0 else 0)
    for j in range(k + 1):
        m = n - j
        y = q_binomial_poly(m, k - r) * _Q ** (r * m)
        out = out + (-1) ** j * q_binomial_poly(k, j) * _Q ** (j * (j + 1) // 2) * y
    return Certificate("delta", (k, r, n), out)
