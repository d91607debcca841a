"""Reading off the Langlands parameter from the closed gamma factors.

The quadratic twists with a pole at s = 1 give the one-dimensional summands;
dividing their Tate factors out of the untwisted gamma factor leaves the
gamma factor of the complement, which must be a single monomial
``delta q^(1/2 - s)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .characters import AddChar, MultChar, gamma_tate_closed, quadratic_tame_chars
from .padic_core import legendre, unit_residue
from .qsymb import RatFunc, T, is_monomial, order_at, substitute
from .rs_integral import gamma_closed
from .whittaker import SSCDatum

PSI_CONVENTION = "psi(x) = exp(2 pi i {x/p}_p), level one (trivial on p, not on o)"

CAVEATS = [
    "decomposition assumes the complement is simple supercuspidal (expected, not proved here)",
    "restriction of the complement to wild inertia is not determined",
]


COMPLETE_NOTE = "F = Q_2: the parameter is determined completely by this data"


class SimplificationError(ArithmeticError):
    """The complement's gamma factor did not reduce to a single monomial."""


def pole_summands(datum: SSCDatum) -> list:
    """Quadratic depth-zero characters whose twisted gamma factor has a pole
    at s = 1, unramified first."""
    return list(_pole_summands(datum))


@lru_cache(maxsize=512)
def _pole_summands(datum: SSCDatum) -> tuple:
    out = [tau for tau in quadratic_tame_chars(datum.p)
           if order_at(gamma_closed(datum, tau), 1) == -1]
    return tuple(sorted(out, key=lambda t: (t.tame != 0, t.unram)))


def _summand_tate(datum: SSCDatum, tau: MultChar) -> RatFunc:
    return gamma_tate_closed(tau, AddChar(datum.p))


def gamma_pi_prime(datum: SSCDatum) -> RatFunc:
    """``gamma(s, pi, psi)`` divided by the Tate factors of the pole summands."""
    g = gamma_closed(datum, MultChar(datum.p))
    for tau in pole_summands(datum):
        g = g / _summand_tate(datum, tau)
    return g


def delta(datum: SSCDatum) -> dict:
    """The coefficient of ``q^(1/2 - s)`` in the complement's gamma factor.

    ``matches`` compares the value read off the quotient with
    ``omega eps / eps(tau_2)`` (just ``eps`` for p = 2).
    """
    g = gamma_pi_prime(datum)
    if not is_monomial(g):
        raise SimplificationError(f"complement gamma factor is not a monomial: {g}")
    ratio = g / RatFunc(T, 0, Fraction(1, 2))
    if ratio.prefactor != (0, 0) or not (ratio.body.numer.is_ground and ratio.body.denom.is_ground):
        raise SimplificationError(f"complement gamma factor is not delta q^(1/2-s): {g}")
    if datum.p == 2:
        expected = RatFunc.const(datum.eps)
    else:
        tau2 = [t for t in pole_summands(datum) if t.tame][0]
        expected = RatFunc.const(datum.omega * datum.eps) / _summand_tate(datum, tau2)
    return {"value": substitute(ratio, 0, datum.p), "matches": ratio == expected,
            "psi_convention": PSI_CONVENTION}


def _gauss_str(z) -> str:
    re, im = Fraction(z.re), Fraction(z.im)
    if im == 0:
        return str(re)
    imag = {1: "i", -1: "-i"}.get(im, f"{im}*i")
    return imag if re == 0 else f"{re}+{imag}".replace("+-", "-")


def _summand_json(tau: MultChar) -> dict:
    return {"unram_value": tau.unram_sign(), "tame": "legendre" if tau.tame else "trivial"}


@dataclass
class ParameterReport:
    p: int
    l: int
    alpha_class: str
    eps: int
    omega: int
    summands: list
    complement_dim: int
    central_char: dict
    delta: dict
    caveats: list = field(default_factory=list)
    uniformizer: Optional[str] = None

    @property
    def complete(self) -> bool:
        """Over Q_2 the single summand and the complement's gamma factor
        pin the parameter down."""
        return self.p == 2

    def to_json(self) -> dict:
        d = self.delta
        val = complex(d["value"])
        return {
            "schema": "v1", "p": self.p, "l": self.l, "alpha_class": self.alpha_class,
            "eps": self.eps, "omega": self.omega,
            "summands": [_summand_json(t) for t in self.summands],
            "complement_dim": self.complement_dim, "central_char": self.central_char,
            "delta": {"value": {"re": val.real, "im": val.imag}, "exact": _gauss_str(d["value"]),
                      "psi_convention": d["psi_convention"]},
            "caveats": list(self.caveats), "uniformizer": self.uniformizer,
            "complete": self.complete,
            "annotation": COMPLETE_NOTE if self.complete else None,
        }


def report(datum: SSCDatum) -> ParameterReport:
    p, l = datum.p, datum.l
    summands = pole_summands(datum)
    prod = MultChar(p)
    for t in summands:
        prod = prod * t
    # det phi = 1: the complement's central character inverts the summands
    central = _summand_json(prod.inverse())
    if p == 2:
        alpha_class = "unit"
    else:
        alpha_class = "square" if legendre(unit_residue(datum.alpha, p), p) == 1 else "nonsquare"
    return ParameterReport(p, l, alpha_class, datum.eps, datum.omega, summands,
                           2 * l - 2 if p != 2 else 2 * l - 1, central, delta(datum),
                           list(CAVEATS) if p != 2 else CAVEATS[:1])
