"""q-combinatorics over a dual exact/float scalar backend.

Scalars are plain Python numbers. The exact backend is
:class:`fractions.Fraction` (``int`` is accepted and promoted), the float
backend is ``float``. Mixing a ``Fraction`` with a ``float`` is never
coerced silently: :func:`backend_of` raises :class:`MixedBackendError`.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

Scalar = Union[Fraction, float]

__all__ = [
    "Backend",
    "MixedBackendError",
    "Scalar",
    "backend_of",
    "coerce",
    "exact_sqrt",
    "parse_rational",
    "q_binomial",
    "q_factorial",
    "q_number",
]


class Backend(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


class MixedBackendError(TypeError):
    """Raised when exact and float scalars meet in one computation."""


def _kind(value) -> Backend | None:
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, float):
        return Backend.FLOAT
    if isinstance(value, Fraction):
        return Backend.EXACT
    if isinstance(value, int) or isinstance(value, Rational):
        return None
    raise TypeError(f"unsupported scalar type {type(value).__name__}")


def backend_of(*values) -> Backend:
    """Return the common backend of ``values``.

    Integers are backend-neutral. If no value fixes a backend the result is
    exact.

    Raises
    ------
    MixedBackendError
        If both a float and a Fraction are present.
    """
    found = None
    for v in values:
        k = _kind(v)
        if k is None:
            continue
        if found is None:
            found = k
        elif found is not k:
            raise MixedBackendError(f"cannot mix {found.value} and {k.value} scalars")
    return found or Backend.EXACT


def coerce(value, backend: Backend) -> Scalar:
    """Convert ``value`` to ``backend`` without crossing backends.

    Integers convert to either backend. A float offered to the exact backend
    (or a Fraction to the float backend) raises :class:`MixedBackendError`.
    """
    k = _kind(value)
    if k is not None and k is not backend:
        raise MixedBackendError(f"{k.value} scalar given to the {backend.value} backend")
    if backend is Backend.EXACT:
        return Fraction(value)
    return float(value)


def parse_rational(text: str) -> Fraction:
    """Parse ``"7/10"``, ``"-3"`` or ``"0.3"`` exactly into a Fraction."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def _check_index(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError("q-number index must be an int")
    if n < 0:
        raise ValueError(f"q-number index must be nonnegative, got {n}")


def q_number(n: int, q: Scalar) -> Scalar:
    """Return ``[n]_q = 1 + q + ... + q^(n-1)``.

    Horner summation, so ``q = 1`` gives ``n`` without a special case.

    Examples
    --------
    >>> q_number(4, Fraction(1, 2))
    Fraction(15, 8)
    """
    _check_index(n)
    return _q_number(n, q, type(q))


@lru_cache(maxsize=8192)
def _q_number(n: int, q: Scalar, tag: type) -> Scalar:
    r = q * 0
    for _ in range(n):
        r = r * q + 1
    return r


@lru_cache(maxsize=4096)
def _q_factorial(n: int, q: Scalar, tag: type) -> Scalar:
    if n == 0:
        return q * 0 + 1
    return _q_factorial(n - 1, q, tag) * q_number(n, q)


def q_factorial(n: int, q: Scalar) -> Scalar:
    """Return ``[n]_q! = [1]_q [2]_q ... [n]_q`` (``1`` for ``n = 0``).

    Memoized per ``(n, q, type(q))`` in a bounded cache, so ``1``, ``1.0``
    and ``Fraction(1)`` never share entries.
    """
    _check_index(n)
    if isinstance(q, int) and not isinstance(q, bool):
        q = Fraction(q)
    return _q_factorial(n, q, type(q))


def q_binomial(n: int, k: int, q: Scalar) -> Scalar:
    """Gaussian binomial coefficient ``[n k]_q``.

    Raises
    ------
    ValueError
        If ``k < 0`` or ``k > n``.
    """
    _check_index(n)
    if not isinstance(k, int) or k < 0 or k > n:
        raise ValueError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if isinstance(q, float):
        return q_factorial(n, q) / (q_factorial(n - k, q) * q_factorial(k, q))
    # exact: q-Pascal keeps the result a polynomial value even at q = 0
    return _pascal_row(n, Fraction(q))[k]


@lru_cache(maxsize=1024)
def _pascal_row(n: int, q: Fraction) -> tuple:
    if n == 0:
        return (Fraction(1),)
    prev = _pascal_row(n - 1, q)
    row = [Fraction(1)] * (n + 1)
    for j in range(1, n):
        row[j] = prev[j - 1] + q**j * prev[j]
    return tuple(row)


def exact_sqrt(value: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational if it is a rational square, else None."""
    from math import isqrt

    value = Fraction(value)
    if value < 0:
        return None
    rn, rd = isqrt(value.numerator), isqrt(value.denominator)
    if rn * rn == value.numerator and rd * rd == value.denominator:
        return Fraction(rn, rd)
    return None
