"""Exact arithmetic in Q(zeta_{p^m})(sqrt(p)).

Values of a level-one additive character on the p-adic rationals are
p-power roots of unity, and Haar volumes carry half-integral powers of q = p.
``AlgNum`` keeps both exact so that integrals with locally constant
integrands can be compared with zero tolerance.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
import math


def _reduce(p: int, m: int, coeffs: dict) -> tuple:
    """Reduce ``sum c_k x^k`` modulo x^{p^m} - 1 and the cyclotomic polynomial."""
    n = p ** m
    step = p ** (m - 1)
    phi = (p - 1) * step
    buf = [Fraction(0)] * n
    for k, c in coeffs.items():
        buf[k % n] += c
    for k in range(n - 1, phi - 1, -1):
        c = buf[k]
        if c:
            buf[k] = Fraction(0)
            base = k - phi
            for j in range(p - 1):
                buf[base + j * step] -= c
    return tuple(buf[:phi])


class Cyclo:
    """Element of Q(zeta_{p^m}) in the power basis 1, z, ..., z^{phi-1}."""

    __slots__ = ("p", "m", "c")

    def __init__(self, p: int, m: int, c: tuple):
        self.p, self.m, self.c = p, m, c

    @classmethod
    def from_dict(cls, p: int, m: int, coeffs: dict) -> "Cyclo":
        return cls(p, m, _reduce(p, m, coeffs))

    @classmethod
    def rational(cls, p: int, x, m: int = 1) -> "Cyclo":
        return cls.from_dict(p, m, {0: Fraction(x)})

    @classmethod
    def root(cls, p: int, angle: Fraction, coeff=1) -> "Cyclo":
        """``coeff * exp(2 pi i angle)`` for ``angle`` with p-power denominator."""
        angle = Fraction(angle) % 1
        d = angle.denominator
        m = 1
        while p ** m < d:
            m += 1
        if p ** m % d:
            raise ValueError(f"angle {angle} is not a p-power root for p={p}")
        k = angle.numerator * (p ** m // d)
        return cls.from_dict(p, m, {k: Fraction(coeff)})

    def lift(self, m: int) -> "Cyclo":
        if m == self.m:
            return self
        if m < self.m:
            raise ValueError("cannot lower the cyclotomic level")
        r = self.p ** (m - self.m)
        return Cyclo.from_dict(self.p, m, {k * r: c for k, c in enumerate(self.c) if c})

    def _align(self, other):
        if not isinstance(other, Cyclo):
            other = Cyclo.rational(self.p, other, self.m)
        m = max(self.m, other.m)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        a, b = self._align(other)
        return Cyclo(a.p, a.m, tuple(x + y for x, y in zip(a.c, b.c)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.p, self.m, tuple(-x for x in self.c))

    def __sub__(self, other):
        return self + (-other if isinstance(other, Cyclo) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclo):
            f = Fraction(other)
            return Cyclo(self.p, self.m, tuple(x * f for x in self.c))
        a, b = self._align(other)
        prod = {}
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        prod[i + j] = prod.get(i + j, Fraction(0)) + x * y
        return Cyclo.from_dict(a.p, a.m, prod)

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclo":
        return Cyclo.from_dict(self.p, self.m, {-k: c for k, c in enumerate(self.c) if c})

    def is_zero(self) -> bool:
        return not any(self.c)

    def as_rational(self):
        """The rational value, or None if the element is irrational."""
        if any(self.c[1:]):
            return None
        return self.c[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclo.rational(self.p, other, self.m)
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = self._align(other)
        return a.c == b.c

    def __hash__(self):
        r = self.as_rational()
        return hash(r) if r is not None else hash((self.p, self.m, self.c))

    def __complex__(self):
        n = self.p ** self.m
        return sum(complex(c) * cmath.exp(2j * math.pi * k / n) for k, c in enumerate(self.c) if c) + 0j

    def __repr__(self):
        r = self.as_rational()
        if r is not None:
            return f"Cyclo({r})"
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.c) if c]
        return f"Cyclo[{self.p}^{self.m}](" + " + ".join(terms) + ")"


class AlgNum:
    """``a + b * sqrt(q)`` with ``a, b`` in Q(zeta_{p^m}) and ``q = p``."""

    __slots__ = ("p", "a", "b")

    def __init__(self, p: int, a=0, b=0):
        self.p = p
        self.a = a if isinstance(a, Cyclo) else Cyclo.rational(p, a)
        self.b = b if isinstance(b, Cyclo) else Cyclo.rational(p, b)

    @classmethod
    def from_measure(cls, p: int, mv, unit: "Cyclo | None" = None) -> "AlgNum":
        """Exact value of ``unit * coeff * q^(halves/2)``."""
        whole, half = divmod(mv.halves, 2)
        c = mv.coeff * Fraction(p) ** whole
        z = unit if unit is not None else Cyclo.rational(p, 1)
        return cls(p, 0, z * c) if half else cls(p, z * c, 0)

    @classmethod
    def root(cls, p: int, angle, coeff=1) -> "AlgNum":
        return cls(p, Cyclo.root(p, angle, coeff), 0)

    def _coerce(self, other):
        if isinstance(other, AlgNum):
            return other
        if isinstance(other, Cyclo):
            return AlgNum(self.p, other, 0)
        return AlgNum(self.p, Fraction(other), 0)

    def __add__(self, other):
        o = self._coerce(other)
        return AlgNum(self.p, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return AlgNum(self.p, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return AlgNum(self.p, self.a * o.a + self.b * o.b * self.p, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> "AlgNum":
        return AlgNum(self.p, self.a.conjugate(), self.b.conjugate())

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __complex__(self):
        return complex(self.a) + complex(self.b) * math.sqrt(self.p)

    def __repr__(self):
        if self.b.is_zero():
            return f"AlgNum({self.a})"
        return f"AlgNum({self.a} + {self.b}*sqrt({self.p}))"


class CycloN:
    """Element of Q(zeta_n) for arbitrary n, reduced modulo Phi_n.

    Slower than ``Cyclo`` but handles the mixed fields Q(zeta_p, zeta_{p-1})
    where Gauss sums of non-quadratic tame characters live.
    """

    __slots__ = ("n", "poly")

    def __init__(self, n: int, poly):
        from sympy import Poly, QQ, cyclotomic_poly, Symbol
        x = Symbol("x")
        if not isinstance(poly, Poly):
            poly = Poly(poly, x, domain=QQ)
        self.n = n
        self.poly = poly.rem(Poly(cyclotomic_poly(n, x), x, domain=QQ))

    @classmethod
    def root(cls, n: int, k: int, coeff=1) -> "CycloN":
        from sympy import Poly, QQ, Symbol, Rational
        x = Symbol("x")
        c = Fraction(coeff)
        return cls(n, Poly(Rational(c.numerator, c.denominator) * x ** (k % n), x, domain=QQ))

    @classmethod
    def rational(cls, n: int, c) -> "CycloN":
        return cls.root(n, 0, c)

    def _coerce(self, other) -> "CycloN":
        if isinstance(other, CycloN):
            if other.n != self.n:
                raise ValueError("mismatched cyclotomic levels")
            return other
        return CycloN.rational(self.n, other)

    def __add__(self, other):
        return CycloN(self.n, self.poly + self._coerce(other).poly)

    __radd__ = __add__

    def __neg__(self):
        return CycloN(self.n, -self.poly)

    def __sub__(self, other):
        return CycloN(self.n, self.poly - self._coerce(other).poly)

    def __mul__(self, other):
        return CycloN(self.n, self.poly * self._coerce(other).poly)

    __rmul__ = __mul__

    def conjugate(self) -> "CycloN":
        out = CycloN.rational(self.n, 0)
        for (k,), c in self.poly.terms():
            out = out + CycloN.root(self.n, -k, Fraction(int(c.numerator), int(c.denominator)))
        return out

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return (self.poly - o.poly).is_zero

    def __hash__(self):
        return hash((self.n, tuple(self.poly.all_coeffs())))

    def __complex__(self):
        return sum((complex(float(c)) * cmath.exp(2j * math.pi * k / self.n)
                    for (k,), c in self.poly.terms()), 0j)

    def __repr__(self):
        return f"CycloN[{self.n}]({self.poly.as_expr()})"
