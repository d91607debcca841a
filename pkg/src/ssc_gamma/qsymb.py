"""Exact rational functions in ``t = q^-s`` over the Gaussian rationals.

A ``RatFunc`` is ``q^(a s + b) * body(t, q)`` where ``body`` lives in the
field Q(i)(t, q) and the prefactor exponents ``a, b`` are half-integers.
Integral parts of the prefactor are folded into the body, so the stored
prefactor is one of q^0, q^(s/2), q^(1/2), q^(s/2 + 1/2) and equality is
decided exactly.

The parameter ``q`` is formal (transcendental); numeric specialisation
happens only in ``substitute``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import cmath
import json
import math

from sympy.polys.domains import QQ_I
from sympy.polys.fields import field

FIELD, T, Q = field("t,q", QQ_I)
RING = FIELD.ring
T_R, Q_R = RING.gens
I_UNIT = QQ_I(0, 1)


class PoleError(ZeroDivisionError):
    """Evaluation at a pole."""


class PrefactorError(ValueError):
    """Sum of two terms whose half-integral prefactors do not match."""


def gaussian(x) -> "QQ_I":
    """Coerce int/Fraction/complex-with-integer-parts/GaussianRational into Q(i)."""
    if isinstance(x, GaussianRational):
        return QQ_I(QQ_I.dom.convert(x.re), QQ_I.dom.convert(x.im))
    if isinstance(x, complex):
        if x.real != int(x.real) or x.imag != int(x.imag):
            raise ValueError(f"{x} is not a Gaussian integer; pass GaussianRational")
        return QQ_I(int(x.real), int(x.imag))
    if isinstance(x, Fraction):
        return QQ_I(QQ_I.dom(x.numerator, x.denominator), 0)
    return QQ_I.convert(x)


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(self.re * other.re - self.im * other.im,
                                    self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    @classmethod
    def from_qqi(cls, z) -> "GaussianRational":
        return cls(Fraction(int(z.x.numerator), int(z.x.denominator)),
                   Fraction(int(z.y.numerator), int(z.y.denominator)))


def _half(x) -> int:
    """Twice a half-integer, as an int."""
    x2 = Fraction(x) * 2
    if x2.denominator != 1:
        raise ValueError(f"{x} is not a half-integer")
    return int(x2)


class RatFunc:
    """``q^(a_halves/2 * s + b_halves/2) * body`` with halves in {0, 1}."""

    __slots__ = ("body", "ah", "bh")

    def __init__(self, body, a=0, b=0):
        ah, bh = _half(a), _half(b)
        body = FIELD(body) if not hasattr(body, "numer") else body
        ea, ah = divmod(ah, 2)
        eb, bh = divmod(bh, 2)
        # q^(ea*s) = t^(-ea)
        if ea:
            body = body * T ** (-ea)
        if eb:
            body = body * Q ** eb
        self.body, self.ah, self.bh = body, ah, bh

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "RatFunc":
        return cls(FIELD(gaussian(c)))

    @classmethod
    def t(cls) -> "RatFunc":
        return cls(T)

    @classmethod
    def q(cls) -> "RatFunc":
        return cls(Q)

    @classmethod
    def qpow(cls, a=0, b=0) -> "RatFunc":
        """``q^(a s + b)``."""
        return cls(FIELD(1), a, b)

    @property
    def prefactor(self) -> tuple:
        return Fraction(self.ah, 2), Fraction(self.bh, 2)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if hasattr(other, "numer"):
            return RatFunc(other)
        return RatFunc.const(other)

    def __add__(self, other):
        o = self._coerce(other)
        if o.body == 0:
            return self
        if self.body == 0:
            return o
        if (self.ah, self.bh) != (o.ah, o.bh):
            raise PrefactorError(f"cannot add prefactors {self.prefactor} and {o.prefactor}")
        return RatFunc(self.body + o.body, Fraction(self.ah, 2), Fraction(self.bh, 2))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.body, Fraction(self.ah, 2), Fraction(self.bh, 2))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RatFunc(self.body * o.body, Fraction(self.ah + o.ah, 2), Fraction(self.bh + o.bh, 2))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.body == 0:
            raise ZeroDivisionError("inverse of the zero RatFunc")
        return RatFunc(1 / self.body, Fraction(-self.ah, 2), Fraction(-self.bh, 2))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RatFunc.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        if self.body == 0 or o.body == 0:
            return self.body == o.body
        return (self.ah, self.bh) == (o.ah, o.bh) and self.body == o.body

    def __hash__(self):
        return hash((self.ah, self.bh, str(self.body)))

    def is_zero(self) -> bool:
        return self.body == 0

    def compose_affine(self, m: int, c: int) -> "RatFunc":
        """``f(m s + c)`` for integers m, c (e.g. ``2s - 1`` or ``1 - s``)."""
        # t -> q^-(m s + c) = t^m q^-c
        image = T ** m * Q ** (-c)
        num = _compose(self.body.numer, image)
        den = _compose(self.body.denom, image)
        a, b = self.prefactor
        return RatFunc(num / den, a * m, a * c + b)

    def __repr__(self):
        a, b = self.prefactor
        pre = f"q^({a}s+{b})*" if (a or b) else ""
        return f"RatFunc({pre}({self.body}))"

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        a, b = self.prefactor
        return {"prefactor": {"a": str(a), "b": str(b)},
                "num": _poly_to_json(self.body.numer),
                "den": _poly_to_json(self.body.denom)}

    @classmethod
    def from_json(cls, d: dict) -> "RatFunc":
        num = _poly_from_json(d["num"])
        den = _poly_from_json(d["den"])
        pre = d["prefactor"]
        return cls(FIELD(num) / FIELD(den), Fraction(pre["a"]), Fraction(pre["b"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _compose(poly, t_image):
    out = FIELD(0)
    for (i, j), c in poly.terms():
        out += FIELD(c) * t_image ** i * Q ** j
    return out


def _poly_to_json(poly) -> list:
    by_t: dict = {}
    for (i, j), c in poly.terms():
        by_t.setdefault(i, []).append((j, c))
    out = []
    for i in sorted(by_t):
        terms = sorted(by_t[i])
        coeff = {"q_poly_num": [j for j, _ in terms], "q_poly_den": [0],
                 "re_num": [], "re_den": [], "im_num": [], "im_den": []}
        for _, c in terms:
            g = GaussianRational.from_qqi(c)
            coeff["re_num"].append(g.re.numerator)
            coeff["re_den"].append(g.re.denominator)
            coeff["im_num"].append(g.im.numerator)
            coeff["im_den"].append(g.im.denominator)
        out.append([i, coeff])
    return out


def _poly_from_json(items):
    out = FIELD(0)
    for i, coeff in items:
        shift = coeff["q_poly_den"][0]
        for k, j in enumerate(coeff["q_poly_num"]):
            g = GaussianRational(Fraction(coeff["re_num"][k], coeff["re_den"][k]),
                                 Fraction(coeff["im_num"][k], coeff["im_den"][k]))
            out += FIELD(gaussian(g)) * T ** i * Q ** (j - shift)
    return out


# -- evaluation --------------------------------------------------------------

def _eval_poly_exact(poly, t0: Fraction, q0: int):
    acc = QQ_I(0, 0)
    for (i, j), c in poly.terms():
        acc += c * QQ_I.convert(QQ_I.dom.convert(t0 ** i * Fraction(q0) ** j))
    return acc


def _eval_poly_float(poly, t0: complex, q0: float) -> complex:
    acc = 0j
    for (i, j), c in poly.terms():
        acc += complex(float(c.x), float(c.y)) * t0 ** i * q0 ** j
    return acc


def _exact_power(q0: int, e: Fraction):
    """``q0 ** e`` as a Fraction when it is rational, else None."""
    n = e.denominator
    r = round(q0 ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand > 0 and cand ** n == q0:
            k = e.numerator
            return Fraction(cand) ** k
    return None


def substitute(f: RatFunc, s0, q0: int, tol: float = 1e-12):
    """Value of ``f`` at ``s = s0``, ``q = q0``.

    Exact (``GaussianRational``) when ``s0`` is rational and every power of
    ``q0`` involved is rational; otherwise a complex float.  Raises
    ``PoleError`` at poles.
    """
    a, b = f.prefactor
    if isinstance(s0, (int, Fraction)):
        s0 = Fraction(s0)
        t0 = _exact_power(q0, -s0)
        pre = _exact_power(q0, a * s0 + b)
        if t0 is not None:
            den = _eval_poly_exact(f.body.denom, t0, q0)
            if den == QQ_I(0, 0):
                raise PoleError(f"pole at s={s0}, q={q0}")
            val = GaussianRational.from_qqi(_eval_poly_exact(f.body.numer, t0, q0) / den)
            if pre is not None:
                return val * pre
            return complex(val) * q0 ** float(a * s0 + b)
    s = complex(s0)
    t0 = cmath.exp(-s * math.log(q0))
    den = _eval_poly_float(f.body.denom, t0, q0)
    if abs(den) < tol:
        raise PoleError(f"pole at s={s0}, q={q0}")
    pre = cmath.exp((float(a) * s + float(b)) * math.log(q0))
    return pre * _eval_poly_float(f.body.numer, t0, q0) / den


def _laurent_in_q(poly, m: int) -> dict:
    """``poly(q^-m, q)`` as {q-exponent: coefficient}."""
    out: dict = {}
    for (i, j), c in poly.terms():
        e = j - m * i
        out[e] = out.get(e, QQ_I(0, 0)) + c
    return {e: c for e, c in out.items() if c != QQ_I(0, 0)}


def _point_factor(m: int):
    """The irreducible polynomial in (t, q) vanishing on ``t = q^-m``."""
    return Q_R ** m * T_R - 1 if m >= 0 else T_R - Q_R ** (-m)


def _multiplicity(poly, fac) -> int:
    k = 0
    while poly != 0:
        quo, rem = poly.div(fac)
        if rem != 0:
            break
        poly = quo
        k += 1
    return k


def order_at(f: RatFunc, s0) -> int:
    """Order of vanishing at ``s = s0`` (negative for poles), ``q`` formal."""
    s0 = Fraction(s0)
    if s0.denominator != 1:
        raise ValueError("order_at supports integral s0 only")
    if f.body == 0:
        raise ValueError("order of the zero function is undefined")
    fac = _point_factor(int(s0))
    return _multiplicity(f.body.numer, fac) - _multiplicity(f.body.denom, fac)


def leading_value(f: RatFunc, s0) -> dict:
    """Leading Laurent coefficient data at ``s = s0`` after removing the
    vanishing factor: the q-Laurent polynomial (exponent -> Q(i)) of the
    reduced numerator over that of the reduced denominator."""
    m = int(Fraction(s0))
    fac = _point_factor(m)
    num, den = f.body.numer, f.body.denom
    for _ in range(_multiplicity(num, fac)):
        num = num.div(fac)[0]
    for _ in range(_multiplicity(den, fac)):
        den = den.div(fac)[0]
    return {"num": _laurent_in_q(num, m), "den": _laurent_in_q(den, m)}


def nonzero_at(f: RatFunc, s0) -> bool:
    """True when ``f`` is holomorphic and nonzero at ``s0`` (q formal)."""
    return order_at(f, s0) == 0 and bool(leading_value(f, s0)["num"])


def is_monomial(f: RatFunc) -> bool:
    """Numerator and denominator are single terms (t-degree spread 0)."""
    return len(f.body.numer.terms()) == 1 and len(f.body.denom.terms()) == 1


def arith(f: RatFunc, g: RatFunc, op: str) -> RatFunc:
    """Field operation by symbol: one of ``+ - * /``."""
    if op == "+":
        return f + g
    if op == "-":
        return f - g
    if op in ("*", "x"):
        return f * g
    if op in ("/", "÷"):
        return f / g
    raise ValueError(f"unknown operation {op!r}")
