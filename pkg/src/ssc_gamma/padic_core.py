"""Exact p-adic bookkeeping over the p-adic rationals.

Two scalar layers live here:

* ``Fraction`` is the exact scalar used for matrix entries and coset
  representatives. Every rational is an exact element of Q_p, so membership
  questions (integrality, congruences) are decided without truncation.
* ``PAdicNumber`` is a truncated element ``p^v * u`` with ``u`` a unit known
  modulo ``p^N``. It tracks precision loss and raises ``PrecisionError``
  instead of silently inventing digits.

Measures follow the self-dual normalisation: ``vol(o) = q^(1/2)`` and
``d*x = q^(1/2)/(q-1) |x|^-1 dx`` so that ``vol*(o^x) = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
import math
from typing import Union

INF = math.inf

Number = Union[int, Fraction, "PAdicNumber"]


class PrecisionError(ArithmeticError):
    """Raised when a computation needs digits beyond the working precision."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@dataclass(frozen=True)
class FieldDescriptor:
    """The field Q_p with working precision ``N`` (modulus ``p^N``)."""

    p: int
    N: int = 8

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.N < 2:
            raise ValueError("precision N must be >= 2")

    @property
    def q(self) -> int:
        return self.p

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    def uniformizer(self) -> Fraction:
        return Fraction(self.p)


def _int_val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val(x, p: int):
    """Valuation of an exact scalar (int/Fraction) or a PAdicNumber."""
    if isinstance(x, PAdicNumber):
        return x.valuation()
    x = Fraction(x)
    if x == 0:
        return INF
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


def unit_part(x, p: int) -> Fraction:
    """``x * p^(-v(x))`` for nonzero exact ``x``."""
    x = Fraction(x)
    if x == 0:
        raise ZeroDivisionError("unit part of zero")
    v = val(x, p)
    return x / Fraction(p) ** v


def residue(x, p: int, digits: int = 1) -> int:
    """Image of an integral exact scalar in Z/p^digits."""
    x = Fraction(x)
    if x != 0 and val(x, p) < 0:
        raise ValueError(f"{x} is not integral at p={p}")
    m = p ** digits
    return (x.numerator * pow(x.denominator, -1, m)) % m


def unit_residue(x, p: int, digits: int = 1) -> int:
    """Residue of the unit part of nonzero ``x`` modulo p^digits."""
    return residue(unit_part(x, p), p, digits)


def in_ideal(x, p: int, k: int) -> bool:
    """Membership ``x in p^k o`` (zero lies in every ideal)."""
    return val(x, p) >= k


def in_one_plus(x, p: int, k: int = 1) -> bool:
    """Membership ``x in 1 + p^k o``."""
    return val(Fraction(x) - 1, p) >= k


@total_ordering
class PAdicNumber:
    """Truncated p-adic number ``p^v * u`` with ``u`` a unit mod ``p^N``.

    ``N`` is the relative precision.  An *exact* zero has ``v = inf``; an
    *inexact* zero (all known digits cancelled) keeps the absolute precision
    it is known to in ``abs_prec`` and has ``u = None``.
    """

    __slots__ = ("p", "v", "u", "N", "abs_prec")

    def __init__(self, p: int, v, u, N: int, abs_prec=None):
        self.p = p
        self.v = v
        self.N = N
        if u is None:
            self.u = None
            self.abs_prec = INF if abs_prec is None else abs_prec
        else:
            m = p ** N
            u %= m
            if u % p == 0:
                raise ValueError("unit part must be prime to p")
            self.u = u
            self.abs_prec = v + N

    @classmethod
    def from_rational(cls, x, field: FieldDescriptor) -> "PAdicNumber":
        x = Fraction(x)
        p, N = field.p, field.N
        if x == 0:
            return cls(p, INF, None, N)
        v = val(x, p)
        return cls(p, v, residue(unit_part(x, p), p, N), N)

    @classmethod
    def zero(cls, field: FieldDescriptor) -> "PAdicNumber":
        return cls(field.p, INF, None, field.N)

    # -- predicates -------------------------------------------------------
    def is_exact_zero(self) -> bool:
        return self.u is None and self.abs_prec == INF

    def is_zero(self) -> bool:
        return self.u is None

    def valuation(self):
        """Valuation; for an inexact zero returns ``abs_prec`` as a lower bound
        marker via ``PrecisionError``-free sentinel (see ``valuation_bound``)."""
        if self.u is None:
            return INF if self.abs_prec == INF else ValuationAtLeast(self.abs_prec)
        return self.v

    def to_rational(self) -> Fraction:
        """Canonical rational representative (unit part in ``[0, p^N)``)."""
        if self.u is None:
            return Fraction(0)
        return Fraction(self.p) ** self.v * self.u

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "PAdicNumber":
        if isinstance(other, PAdicNumber):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        return PAdicNumber.from_rational(other, FieldDescriptor(self.p, self.N))

    def __neg__(self):
        if self.u is None:
            return self
        return PAdicNumber(self.p, self.v, -self.u, self.N)

    def __add__(self, other):
        o = self._coerce(other)
        p = self.p
        N = min(self.N, o.N)
        prec = min(self.abs_prec, o.abs_prec)
        if self.u is None and o.u is None:
            return PAdicNumber(p, INF, None, N, abs_prec=prec)
        if self.u is None:
            return _truncate(o, prec, N)
        if o.u is None:
            return _truncate(self, prec, N)
        m = min(self.v, o.v)
        total = self.u * p ** (self.v - m) + o.u * p ** (o.v - m)
        if prec == INF:
            raise PrecisionError("finite-precision sum without precision")
        width = prec - m
        total %= p ** width
        if total == 0:
            return PAdicNumber(p, INF, None, N, abs_prec=prec)
        k = _int_val(total, p)
        rel = width - k
        return PAdicNumber(p, m + k, total // p ** k, rel)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        N = min(self.N, o.N)
        if self.u is None or o.u is None:
            if self.is_exact_zero() or o.is_exact_zero():
                return PAdicNumber(self.p, INF, None, N)
            nz, z = (self, o) if o.u is None else (o, self)
            bound = z.abs_prec + (nz.v if nz.u is not None else z.abs_prec)
            return PAdicNumber(self.p, INF, None, N, abs_prec=bound)
        return PAdicNumber(self.p, self.v + o.v, self.u * o.u, N)

    __rmul__ = __mul__

    def inverse(self) -> "PAdicNumber":
        if self.u is None:
            raise PrecisionError("cannot invert a number indistinguishable from zero")
        return PAdicNumber(self.p, -self.v, pow(self.u, -1, self.p ** self.N), self.N)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if self.u is None or o.u is None:
            return self.u is None and o.u is None and self.abs_prec == o.abs_prec
        N = min(self.N, o.N)
        return self.v == o.v and (self.u - o.u) % self.p ** N == 0

    def __lt__(self, other):  # ordering by valuation only, for sorting
        return (-_vkey(self)) < (-_vkey(self._coerce(other)))

    def __hash__(self):
        return hash((self.p, self.v, self.u, self.N))

    def __repr__(self):
        if self.u is None:
            return f"O({self.p}^{self.abs_prec})" if self.abs_prec != INF else "0"
        return f"{self.p}^{self.v}*{self.u} (mod {self.p}^{self.N})"


def _vkey(x: PAdicNumber):
    return x.v if x.u is not None else x.abs_prec


def _truncate(x: PAdicNumber, abs_prec, N) -> PAdicNumber:
    if abs_prec == INF:
        return PAdicNumber(x.p, x.v, x.u, min(N, x.N))
    rel = min(abs_prec - x.v, x.N, N)
    if rel <= 0:
        return PAdicNumber(x.p, INF, None, N, abs_prec=abs_prec)
    return PAdicNumber(x.p, x.v, x.u % x.p ** rel, rel)


@dataclass(frozen=True)
class ValuationAtLeast:
    """Sentinel: valuation is at least ``bound`` (zero at working precision)."""

    bound: int

    def __repr__(self):
        return f">={self.bound}"


# -- absolute values and measures ------------------------------------------

@dataclass(frozen=True)
class MeasureValue:
    """``coeff * q^(halves/2)``; exact volumes of compact opens."""

    coeff: Fraction
    halves: int = 0

    def __mul__(self, other):
        if isinstance(other, MeasureValue):
            return MeasureValue(self.coeff * other.coeff, self.halves + other.halves)
        return MeasureValue(self.coeff * Fraction(other), self.halves)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MeasureValue):
            return MeasureValue(self.coeff / other.coeff, self.halves - other.halves)
        return MeasureValue(self.coeff / Fraction(other), self.halves)

    def __pow__(self, n: int):
        return MeasureValue(self.coeff ** n, self.halves * n)

    def normalized(self, q: int) -> "MeasureValue":
        """Fold whole powers of ``q`` into the rational coefficient."""
        whole, half = divmod(self.halves, 2)
        return MeasureValue(self.coeff * Fraction(q) ** whole, half)

    def at(self, q: int) -> float:
        return float(self.coeff) * q ** (self.halves / 2)

    def equals(self, other: "MeasureValue", q: int) -> bool:
        a, b = self.normalized(q), other.normalized(q)
        if a.coeff == 0 or b.coeff == 0:
            return a.coeff == b.coeff
        return a == b


def abs_value(x, p: int) -> MeasureValue:
    """``|x| = q^(-v(x))`` with ``|0| = 0``."""
    v = val(x, p)
    if v == INF:
        return MeasureValue(Fraction(0))
    if isinstance(v, ValuationAtLeast):
        raise PrecisionError("absolute value of a number indistinguishable from zero")
    return MeasureValue(Fraction(1), -2 * v)


def measure_ball(v: int) -> MeasureValue:
    """Additive volume of ``p^v o``: ``q^(1/2 - v)``."""
    return MeasureValue(Fraction(1), 1 - 2 * v)


def measure_units_mult(q: int) -> MeasureValue:
    """``vol*(o^x) = 1``."""
    return MeasureValue(Fraction(1))


def measure_one_plus_mult(q: int, k: int = 1) -> MeasureValue:
    """``vol*(1 + p^k o) = 1/((q-1) q^(k-1))`` for ``k >= 1``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return MeasureValue(Fraction(1, (q - 1) * q ** (k - 1)))


def mult_from_additive(add_vol: MeasureValue, v: int, q: int) -> MeasureValue:
    """Convert the dx-volume of a set inside the shell ``|x| = q^-v`` to d*x."""
    return add_vol * MeasureValue(Fraction(1, q - 1), 1) * MeasureValue(Fraction(1), 2 * v)


# -- square classes --------------------------------------------------------

def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def nonresidue(p: int) -> int:
    """Least quadratic non-residue modulo odd ``p``."""
    for a in range(2, p):
        if legendre(a, p) == -1:
            return a
    raise ValueError("p must be an odd prime")


def square_class(x, p: int):
    """Class of ``x`` in F*/(F*)^2.

    For odd p the label is one of ``"1", "u", "pi", "u*pi"``.  For p = 2 the
    label is ``(v mod 2, unit part mod 8)`` with the unit residue in
    {1, 3, 5, 7}.
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("square class of zero")
    v = val(x, p)
    if p == 2:
        return (v % 2, unit_residue(x, 2, 3))
    nonsq = legendre(unit_residue(x, p), p) == -1
    odd = v % 2 == 1
    return {(False, False): "1", (True, False): "u",
            (False, True): "pi", (True, True): "u*pi"}[(nonsq, odd)]


def square_class_mul(c1, c2, p: int):
    """Group law on square-class labels (used to test the homomorphism)."""
    if p == 2:
        return ((c1[0] + c2[0]) % 2, (c1[1] * c2[1]) % 8)
    bits = {"1": (0, 0), "u": (1, 0), "pi": (0, 1), "u*pi": (1, 1)}
    inv = {v: k for k, v in bits.items()}
    a, b = bits[c1], bits[c2]
    return inv[((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)]


def units_mod(p: int, digits: int):
    """Unit representatives ``0 < u < p^digits`` prime to p."""
    return [u for u in range(1, p ** digits) if u % p]
