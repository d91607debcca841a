"""Characters of F = Q_p, Schwartz functions and Tate's local zeta integral.

Conventions (fixed once, reported by every front end):

* ``psi(x) = exp(2 pi i {x/p}_p)``, the level-one character: trivial on the
  maximal ideal, ``psi(c) = exp(2 pi i c/p)`` for integers c.  ``AddChar``
  carries a unit ``scale`` b and means ``x -> psi(b x)``; the conjugate is
  ``scale = -1``.
* ``dx`` gives the integers volume ``q^(1/2)``; ``d*x`` gives the units
  volume 1.
* Gauss sums are ``g(eta, psi) = sum_{c in k^*} eta(c) psi(c)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
import cmath
import math

import numpy as np

from . import kernels
from .cyclo import AlgNum, CycloN
from .padic_core import (INF, FieldDescriptor, PAdicNumber, legendre,
                         measure_ball, unit_residue, val)
from .qsymb import GaussianRational, RatFunc, T, Q

PSI_CONVENTION = ("psi(x) = exp(2*pi*i*{x/p}_p): level one, trivial on p*Z_p, "
                  "psi(c) = exp(2*pi*i*c/p) for integers c")


class UnsupportedCharacter(ValueError):
    """Character outside the quadratic / depth-zero range of a closed form."""


class DivergenceError(ArithmeticError):
    """A zeta integral has no value at the requested point (pole)."""


# -- small p-adic helpers on rationals -------------------------------------

def _rat(x) -> Fraction:
    if isinstance(x, PAdicNumber):
        return x.to_rational()
    return Fraction(x)


def frac_p(y, p: int) -> Fraction:
    """p-adic fractional part of a rational, in [0, 1)."""
    y = Fraction(y)
    if y == 0:
        return Fraction(0)
    d = y.denominator
    j = 0
    while d % p == 0:
        d //= p
        j += 1
    if j == 0:
        return Fraction(0)
    mod = p ** j
    return Fraction(y.numerator * pow(d, -1, mod) % mod, mod)


def int_residue(u, p: int, digits: int) -> int:
    """Integer congruent to the p-adic integer ``u`` modulo ``p^digits``."""
    u = Fraction(u)
    mod = p ** digits
    return u.numerator * pow(u.denominator, -1, mod) % mod


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    phi = p - 1
    fac = [r for r in range(2, phi + 1) if phi % r == 0 and all(r % d for d in range(2, r))]
    for g in range(2, p):
        if all(pow(g, phi // r, p) != 1 for r in fac):
            return g
    raise ValueError(p)


def log_table(p: int) -> np.ndarray:
    """``tab[c] = j`` with ``c = g^j mod p``; ``tab[0] = 0`` is unused."""
    g = primitive_root(p)
    tab = np.zeros(p, dtype=np.int64)
    c = 1
    for j in range(p - 1):
        tab[c] = j
        c = c * g % p
    return tab


# -- characters --------------------------------------------------------------

@dataclass(frozen=True)
class AddChar:
    """``x -> psi(scale * x)`` for the fixed level-one ``psi``."""

    p: int
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale == 0 or val(self.scale, self.p) != 0:
            raise ValueError("scale must be a p-adic unit to keep level one")

    def angle(self, x) -> Fraction:
        return frac_p(self.scale * _rat(x) / self.p, self.p)

    def exact(self, x) -> AlgNum:
        return AlgNum.root(self.p, self.angle(x))

    def __call__(self, x) -> complex:
        return cmath.exp(2j * math.pi * float(self.angle(x)))

    def conj(self) -> "AddChar":
        return AddChar(self.p, -self.scale)


@dataclass(frozen=True)
class MultChar:
    """Depth-zero character of F^*.

    ``unram`` is the angle of the value on the uniformizer p (value
    ``exp(2 pi i unram)``); ``tame`` is the exponent k with
    ``chi(g^j) = exp(2 pi i j k/(p-1))`` on residues, g the least primitive root.
    """

    p: int
    unram: Fraction = Fraction(0)
    tame: int = 0

    def __post_init__(self):
        object.__setattr__(self, "unram", Fraction(self.unram) % 1)
        object.__setattr__(self, "tame", self.tame % (self.p - 1) if self.p > 2 else 0)

    @classmethod
    def quadratic(cls, p: int, unram_sign: int = 1, tame: bool = False) -> "MultChar":
        if tame and p == 2:
            raise ValueError("no nontrivial quadratic tame character for p = 2")
        return cls(p, Fraction(0 if unram_sign == 1 else 1, 2), (p - 1) // 2 if tame else 0)

    @property
    def ramification(self) -> str:
        return "tame" if self.tame else "unramified"

    @property
    def is_quadratic(self) -> bool:
        return (2 * self.unram).denominator == 1 and (2 * self.tame) % max(self.p - 1, 1) == 0

    @property
    def is_trivial(self) -> bool:
        return self.unram == 0 and self.tame == 0

    def inverse(self) -> "MultChar":
        return MultChar(self.p, -self.unram, -self.tame)

    def __mul__(self, other: "MultChar") -> "MultChar":
        return MultChar(self.p, self.unram + other.unram, self.tame + other.tame)

    def unram_value(self) -> complex:
        return cmath.exp(2j * math.pi * float(self.unram))

    def unram_sign(self) -> int:
        if (2 * self.unram).denominator != 1:
            raise UnsupportedCharacter("value on the uniformizer is not +-1")
        return 1 if self.unram == 0 else -1

    def tame_angle(self, c: int) -> Fraction:
        if self.tame == 0:
            return Fraction(0)
        j = int(log_table(self.p)[c % self.p])
        return Fraction(j * self.tame, self.p - 1)

    def angle(self, x) -> Fraction:
        x = _rat(x)
        if x == 0:
            raise ValueError("multiplicative character at zero")
        v = val(x, self.p)
        return (v * self.unram + self.tame_angle(unit_residue(x, self.p))) % 1

    def __call__(self, x) -> complex:
        return cmath.exp(2j * math.pi * float(self.angle(x)))

    def sign(self, x) -> int:
        """Exact value of a quadratic character."""
        if not self.is_quadratic:
            raise UnsupportedCharacter("sign() needs a quadratic character")
        return 1 if self.angle(x) == 0 else -1

    def label(self) -> str:
        if self.is_trivial:
            return "trivial"
        parts = []
        if self.unram:
            parts.append("unram(-1)" if self.unram == Fraction(1, 2) else f"unram({self.unram})")
        if self.tame:
            parts.append("legendre" if 2 * self.tame == self.p - 1 else f"tame({self.tame})")
        return "*".join(parts)

    def to_json(self) -> dict:
        return {"p": self.p, "unram_angle": str(self.unram), "tame_exponent": self.tame,
                "label": self.label()}


def quadratic_tame_chars(field) -> list:
    """All characters of F^* of order dividing 2 that are trivial on 1 + p."""
    p = field.p if isinstance(field, FieldDescriptor) else int(field)
    tames = [False] if p == 2 else [False, True]
    return [MultChar.quadratic(p, s, t) for t in tames for s in (1, -1)]


def eval_mult(chi: MultChar, x):
    """``chi(x)``; exact +-1 for quadratic characters, complex otherwise."""
    if _rat(x) == 0:
        raise ValueError("multiplicative character at zero")
    return chi.sign(x) if chi.is_quadratic else chi(x)


# -- Gauss sums ------------------------------------------------------------

def gauss_sum(eta: MultChar, psi: AddChar) -> CycloN:
    """``sum_{c in k^*} eta(c) psi(c)`` exactly in Q(zeta_{p(p-1)})."""
    p = eta.p
    n = p * (p - 1) if p > 2 else 2
    tab = log_table(p)
    out = CycloN.rational(n, 0)
    for c in range(1, p):
        a_psi = psi.angle(c)
        a_eta = Fraction(int(tab[c]) * eta.tame, p - 1) if p > 2 else Fraction(0)
        ang = (a_psi + a_eta) % 1
        out = out + CycloN.root(n, int(ang * n))
    return out


def epsilon_tame(eta: MultChar, psi: AddChar) -> GaussianRational:
    """``q^(-1/2) g(eta, psi)`` for quadratic tame ``eta``, a fourth root of unity.

    The square ``g^2 = eta(-1) q`` is checked exactly; the remaining sign is
    read off a float approximation (the candidates are distance >= sqrt 2 apart).
    """
    if not (eta.is_quadratic and eta.tame):
        raise UnsupportedCharacter("epsilon_tame needs a ramified quadratic character")
    p = eta.p
    g = gauss_sum(eta, psi)
    e_m1 = legendre(-1, p)
    if not g * g == e_m1 * p:
        raise ArithmeticError("Gauss sum square check failed")
    approx = complex(g) / math.sqrt(p)
    cands = [GaussianRational(Fraction(1)), GaussianRational(Fraction(-1))] if e_m1 == 1 else \
        [GaussianRational(Fraction(0), Fraction(1)), GaussianRational(Fraction(0), Fraction(-1))]
    return min(cands, key=lambda u: abs(complex(u) - approx))


# -- Schwartz functions ----------------------------------------------------

def _as_coeff(c):
    if isinstance(c, (AlgNum, complex)):
        return c
    if isinstance(c, float):
        return complex(c)
    return None


@dataclass(frozen=True)
class Term:
    """``coeff * prod_i psi(freq_i x_i) * 1[x_i in center_i + p^radius_i]``."""

    coeff: object
    center: tuple
    radius: tuple
    freq: tuple

    def value(self, x: tuple, p: int):
        for xi, c, r in zip(x, self.center, self.radius):
            d = xi - c
            if d != 0 and val(d, p) < r:
                return None
        ang = sum((frac_p(w * xi / p, p) for w, xi in zip(self.freq, x)), Fraction(0)) % 1
        return ang


@dataclass(frozen=True)
class SchwartzFn:
    """Finite sum of modulated indicators of balls in F^dim."""

    p: int
    dim: int
    terms: tuple = dc_field(default_factory=tuple)

    @classmethod
    def indicator(cls, p: int, center=0, radius: int = 0, coeff=1) -> "SchwartzFn":
        return cls.box(p, (center,), (radius,), coeff)

    @classmethod
    def box(cls, p: int, centers, radii, coeff=1, freqs=None) -> "SchwartzFn":
        centers = tuple(Fraction(c) for c in centers)
        freqs = tuple(Fraction(w) for w in (freqs or (0,) * len(centers)))
        c = coeff if isinstance(coeff, (AlgNum, complex)) else AlgNum(p, Fraction(coeff))
        # normalise the center modulo the ball where it is harmless
        return cls(p, len(centers), (Term(c, centers, tuple(int(r) for r in radii), freqs),))

    def __add__(self, other: "SchwartzFn") -> "SchwartzFn":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return SchwartzFn(self.p, self.dim, self.terms + other.terms)

    def scale(self, c) -> "SchwartzFn":
        return SchwartzFn(self.p, self.dim, tuple(
            Term(_mul(t.coeff, c, self.p), t.center, t.radius, t.freq) for t in self.terms))

    def __call__(self, *x):
        """Exact value (``AlgNum``) unless some coefficient is a float."""
        if len(x) == 1 and isinstance(x[0], tuple):
            x = x[0]
        x = tuple(_rat(xi) for xi in x)
        out = AlgNum(self.p, 0)
        for t in self.terms:
            ang = t.value(x, self.p)
            if ang is None:
                continue
            out = _add(out, _mul(t.coeff, AlgNum.root(self.p, ang), self.p))
        return out

    def resolution(self) -> tuple:
        """``(outer, inner)``: support in p^outer, constant on p^inner cosets."""
        outer, inner = 0, 0
        for t in self.terms:
            for c, r, w in zip(t.center, t.radius, t.freq):
                vc = val(c, self.p) if c != 0 else INF
                outer = min(outer, r, vc if vc != INF else r)
                inner = max(inner, r, 1 - val(w, self.p) if w != 0 else r)
        return outer, inner

    def equals(self, other: "SchwartzFn") -> bool:
        """Exact equality as functions, by evaluation on a common coset grid."""
        o1, i1 = self.resolution()
        o2, i2 = other.resolution()
        outer, inner = min(o1, o2), max(i1, i2)
        p = self.p
        step = Fraction(p) ** inner
        base = Fraction(p) ** outer
        n = p ** (inner - outer)
        import itertools
        for idx in itertools.product(range(n), repeat=self.dim):
            x = tuple(base * k for k in idx)
            a, b = self(x), other(x)
            if isinstance(a, complex) or isinstance(b, complex):
                if abs(complex(a) - complex(b)) > 1e-9:
                    return False
            elif not a == b:
                return False
        del step
        return True


def _mul(a, b, p: int):
    if isinstance(a, complex) or isinstance(b, complex):
        return complex(a) * complex(b)
    if not isinstance(a, AlgNum):
        a = AlgNum(p, Fraction(a))
    return a * b


def _add(a, b):
    if isinstance(a, complex) or isinstance(b, complex):
        return complex(a) + complex(b)
    return a + b


def fourier(phi: SchwartzFn, psi: AddChar) -> SchwartzFn:
    """``hat(phi)(y) = int phi(z) psi(z . y) dz`` in closed coset form.

    A term ``psi(w z) 1[z in c + p^k]`` transforms into
    ``vol(p^k) psi(c w) psi(c b y) 1[y in -w/b + p^(1-k)]`` coordinatewise,
    ``b`` being the scale of ``psi``.
    """
    p, b = phi.p, psi.scale
    out = []
    for t in phi.terms:
        coeff = t.coeff
        centers, radii, freqs = [], [], []
        for c, k, w in zip(t.center, t.radius, t.freq):
            vol = AlgNum.from_measure(p, measure_ball(k).normalized(p))
            coeff = _mul(coeff, vol * AlgNum.root(p, frac_p(c * w / p, p)), p)
            centers.append(-w / b)
            radii.append(1 - k)
            freqs.append(c * b)
        out.append(Term(coeff, tuple(centers), tuple(radii), tuple(freqs)))
    return SchwartzFn(p, phi.dim, tuple(out))


def negate_arg(phi: SchwartzFn) -> SchwartzFn:
    """``x -> phi(-x)``."""
    return SchwartzFn(phi.p, phi.dim, tuple(
        Term(t.coeff, tuple(-c for c in t.center), t.radius, tuple(-w for w in t.freq))
        for t in phi.terms))


# -- Tate zeta integral ----------------------------------------------------

@dataclass
class ZetaValue:
    """Numeric zeta value with its truncation data.

    ``value`` includes the closed geometric tail; ``tail_bound`` is the
    modulus of that tail, i.e. what the bare shell sum would miss.  When the
    tail ratio has modulus >= 1 the value is the meromorphic continuation
    and ``convergent`` is False.
    """

    value: complex
    partial: complex
    tail_bound: float
    convergent: bool
    shells: int

    def to_json(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "tail_bound": self.tail_bound,
                "convergent": self.convergent, "shells": self.shells}


def _cell_sum(p: int, w: Fraction, v: int, X0: int, step_exp: int, M: int,
              eta: MultChar, tab) -> complex:
    """``sum over units X = X0 (p^step_exp) mod p^M of psi(w p^v X) tame(X)``."""
    step = p ** step_exp
    X = kernels.unit_grid(p, M, start=X0 % step, step=step, count=p ** (M - step_exp))
    if X.size == 0:
        return 0j
    y = w * Fraction(p) ** (v - 1)
    ang = frac_p(y, p)
    mod = ang.denominator
    if M < 1 or p ** M % mod:
        raise ArithmeticError("cell resolution too coarse for the phase")
    A = ang.numerator
    return kernels.phase_sum(X, A, mod, tab, eta.tame, max(p - 1, 1), p)


def _term_zeta(t: Term, p: int, eta: MultChar, s: complex, N: int, tab):
    c, k, w = t.center[0], t.radius[0], t.freq[0]
    q = p
    vw = val(w, p) if w != 0 else INF
    eta_pi = eta.unram_value()
    if c != 0 and val(c, p) < k:
        v0 = val(c, p)
        M = max(k - v0, 1, (1 - vw - v0) if vw != INF else 1)
        X0 = int_residue(c / Fraction(p) ** v0, p, M)
        S = _cell_sum(p, w, v0, X0, k - v0, M, eta, tab)
        val_ = S * eta_pi ** v0 * q ** (-v0 * s) / ((q - 1) * q ** (M - 1))
        return val_, val_, 0.0, True, 1
    vstar = max(k, (1 - vw) if vw != INF else k)
    r = eta_pi * q ** (-s)
    # growing shells would cancel catastrophically against the continued tail
    V = max(vstar - 1, N) if abs(r) < 1 else vstar - 1
    partial = 0j
    for v in range(k, V + 1):
        M = max(1, (1 - vw - v) if vw != INF else 1)
        S = _cell_sum(p, w, v, 1, 0, M, eta, tab)
        partial += S * eta_pi ** v * q ** (-v * s) / ((q - 1) * q ** (M - 1))
    if eta.tame:
        return partial, partial, 0.0, True, V - k + 1
    if abs(1 - r) < 1e-14:
        raise DivergenceError("zeta integral evaluated at a pole")
    tail = r ** (V + 1) / (1 - r)
    return partial + tail, partial, abs(tail), abs(r) < 1, V - k + 1


def tate_zeta(phi: SchwartzFn, eta: MultChar, s0, N: int = 12) -> ZetaValue:
    """``Z(phi, s0, eta) = int phi(x) eta(x) |x|^s0 d*x`` by shell sums.

    Shells ``p^v Z_p^*`` are summed coset by coset up to ``v = N`` (further
    when the phase of a term needs it); beyond the last oscillating shell the
    integrand is exactly geometric and that tail is summed in closed form.
    """
    if phi.dim != 1:
        raise ValueError("tate_zeta needs a function on F")
    s = complex(s0)
    tab = log_table(eta.p) if eta.p > 2 else np.zeros(2, dtype=np.int64)
    total = partial = 0j
    bound = 0.0
    conv = True
    shells = 0
    for t in phi.terms:
        v, pv, tb, cv, n = _term_zeta(t, phi.p, eta, s, N, tab)
        coef = complex(t.coeff)
        total += coef * v
        partial += coef * pv
        bound += abs(coef) * tb
        conv = conv and cv
        shells = max(shells, n)
    return ZetaValue(total, partial, bound, conv, shells)


@dataclass
class GammaNumeric:
    value: complex
    tail_bound: float
    numerator: ZetaValue
    denominator: ZetaValue


def gamma_tate_numeric(eta: MultChar, psi: AddChar, phi: SchwartzFn, s0, N: int = 12,
                       tol: float = 1e-12) -> GammaNumeric:
    """``Z(hat phi, 1 - s0, eta^-1) / Z(phi, s0, eta)``."""
    den = tate_zeta(phi, eta, s0, N)
    if abs(den.value) < tol:
        raise ZeroDivisionError("zeta integral vanishes for this test function")
    num = tate_zeta(fourier(phi, psi), eta.inverse(), 1 - complex(s0), N)
    g = num.value / den.value
    # rounding only: both tails are closed exactly
    bound = 1e-12 * (1 + abs(g))
    return GammaNumeric(g, bound, num, den)


def gamma_tate_closed(eta: MultChar, psi: AddChar) -> RatFunc:
    """Exact Tate gamma factor for quadratic depth-zero ``eta``.

    Unramified with ``eta(p) = c``:
    ``q^(s-1/2) c (1 - c q^-s) / (1 - c q^(s-1))``.
    Ramified: the constant ``q^(-1/2) g(eta^-1, psi)``.
    """
    if not eta.is_quadratic:
        raise UnsupportedCharacter("closed form implemented for characters of order <= 2")
    if eta.tame:
        eps = epsilon_tame(eta.inverse(), psi)
        return RatFunc.const(eps)
    c = eta.unram_sign()
    body = c * (1 - c * T) / (1 - c * T ** -1 / Q)
    return RatFunc(body, 1, Fraction(-1, 2))


def sample_schwartz(p: int, eta: MultChar) -> list:
    """A few Schwartz functions with nonzero zeta integral against ``eta``."""
    out = [SchwartzFn.indicator(p, 1, 1), SchwartzFn.indicator(p, 1, 2, coeff=3)]
    if eta.tame:
        out.append(SchwartzFn.box(p, (1,), (1,), 1, (1,)) + SchwartzFn.indicator(p, p, 2))
        out.append(SchwartzFn.indicator(p, Fraction(1, p), 0))
    else:
        out.append(SchwartzFn.indicator(p, 0, 0))
        out.append(SchwartzFn.indicator(p, 0, -1) + SchwartzFn.box(p, (0,), (1,), 2, (Fraction(1, p),)))
    return out
