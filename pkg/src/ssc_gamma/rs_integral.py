"""The Rankin-Selberg integral, the intertwining operator and the gamma factor.

Numeric routes sum an integrand over cosets; closed routes build exact
rational functions in ``t = q^-s``.  Every closed form has a numeric oracle
and the tests compare the two.

Cells.  On SO_3 the section ``f_s`` is right I+-invariant, so
``v -> f(w1 u(v) b)`` is constant on ``v0 + p^rho`` once ``b^-1 u(p^rho) b``
lies in I+ (``rho`` is computed exactly from the two coefficient matrices of
the quadratic map ``delta -> b^-1 u(delta) b``).  For large ``|v|`` we write
``w1 u(v) = beta(v) nbar(2/v)`` and use additive cells in ``w = 2/v`` instead;
there the shells are exactly geometric.
"""
from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Optional

from .characters import (AddChar, DivergenceError, MultChar, SchwartzFn, Term, UnsupportedCharacter,
                         fourier, gamma_tate_closed, gamma_tate_numeric, sample_schwartz)
from .cyclo import AlgNum
from .padic_core import INF, MeasureValue, abs_value, measure_ball, unit_residue, val
from .qsymb import RatFunc, Q, T, substitute
from . import so_groups as G
from . import whittaker as W

F0, F1 = Fraction(0), Fraction(1)


def _default_trunc():
    raw = os.environ.get("GAMMA_TRUNC_DEFAULT", "")
    if raw:
        parts = [int(x) for x in raw.replace(",", " ").split()]
        return parts[0], (parts[1] if len(parts) > 1 else 4)
    return 12, 4


@dataclass(frozen=True)
class TruncationSpec:
    """``N_v``: number of explicit valuation shells before a tail;
    ``N_u``: refinement depth (unit digits) for the cell-constancy audit;
    ``tail``: ``"close"`` sums a verified geometric tail exactly,
    ``"bound"`` drops it and declares ``|last| r/(1-r)``."""

    N_v: int = field(default_factory=lambda: _default_trunc()[0])
    N_u: int = field(default_factory=lambda: _default_trunc()[1])
    tail: str = "close"

    def __post_init__(self):
        if self.N_v < 1 or self.N_u < 1:
            raise ValueError("truncation depths must be positive")
        if self.tail not in ("close", "bound"):
            raise ValueError("tail policy is 'close' or 'bound'")

    def to_json(self) -> dict:
        return {"N_v": self.N_v, "N_u": self.N_u, "tail": self.tail}


@dataclass
class IntegralReport:
    value: object
    tail_bound: float
    shells: list
    s: object
    params: dict
    convergent: bool = True
    exact: Optional[object] = None

    def to_json(self) -> dict:
        v = complex(self.value)
        out = {"schema": "v1", "value": {"re": v.real, "im": v.imag}, "tail_bound": self.tail_bound,
               "shells": [[str(k), complex(c).real, complex(c).imag] for k, c in self.shells],
               "convergent": self.convergent, "params": dict(self.params, s=str(self.s))}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


# -- helpers -----------------------------------------------------------------

def _q_power(p: int, e) -> complex:
    return complex(p) ** complex(e)


def _in_p(x, p):
    return x == 0 or val(x, p) >= 1


def _iplus_targets(n):
    return [[0 if j > i else 1 for j in range(n)] for i in range(n)]


def invariance_radius(b, gen, p: int) -> int:
    """Least rho with ``b^-1 gen(d) b`` in I+ for every ``v(d) >= rho``.

    ``gen`` must be quadratic in d with ``gen(0) = 1``.
    """
    bi = G.inverse(b)
    P1 = G.mmul(bi, gen(F1), b)
    Pm = G.mmul(bi, gen(-F1), b)
    n = len(b)
    tgt = _iplus_targets(n)
    rho = -10 ** 9
    for i in range(n):
        for j in range(n):
            A = (P1[i][j] - Pm[i][j]) / 2
            B = (P1[i][j] + Pm[i][j]) / 2 - (1 if i == j else 0)
            if A != 0:
                rho = max(rho, tgt[i][j] - val(A, p))
            if B != 0:
                rho = max(rho, -((val(B, p) - tgt[i][j]) // 2))
    return rho


def _reps(p: int, lo: int, hi: int):
    """Representatives of ``p^lo / p^hi``."""
    if hi <= lo:
        return [F0]
    step = Fraction(p) ** lo
    return [k * step for k in range(p ** (hi - lo))]


def _unit_reps(p: int, digits: int = 1):
    return [Fraction(u) for u in range(1, p ** digits) if u % p]


# -- intertwining operator ---------------------------------------------------

def _m_key(g, A, p):
    """``(v(m), residue of A m)`` for ``f_s(g, A)``, or None off the support.

    Depth-zero characters see only these two numbers, so one pass of the
    engine serves every tame character and every s.
    """
    m = W.section_m(g, p)
    if m is None:
        return None
    return val(m, p), unit_residue(Fraction(A) * m, p)


def _key_value(key, tau: MultChar, s: complex) -> complex:
    v, res = key
    ang = v * tau.unram + tau.tame_angle(res)
    return cmath.exp(2j * math.pi * float(ang % 1)) * _q_power(tau.p, -v * s)


@lru_cache(maxsize=4096)
def _intertwine_records(p: int, gamma: Fraction, b: tuple, A: Fraction, n_shells: int):
    Aarg = -1 / A
    w1 = G.w1()
    v2 = val(Fraction(2), p)
    rho_n = invariance_radius(b, lambda d: G.so3_upper(d, gamma), p)
    rho_f = invariance_radius(b, lambda d: G.so3_lower(1, d, gamma), p)
    # far region v(v) < -J, i.e. v(w) > J + v(2) for w = 2/v
    J = max(0, rho_f - v2 - 1)
    hi = max(rho_n, -J)
    near = {}
    for v0 in _reps(p, -J, hi):
        key = _m_key(G.mmul(w1, G.so3_upper(v0, gamma), b), Aarg, p)
        if key is not None:
            near[key] = near.get(key, 0) + 1
    far = []
    n0 = J + v2 + 1
    for n in range(n0, n0 + n_shells):
        res = max(rho_f, n + 1)
        recs = {}
        for u in _unit_reps(p, res - n):
            w = u * Fraction(p) ** n
            key = _m_key(G.mmul(w1, G.so3_upper(2 / w, gamma), b), Aarg, p)
            if key is not None:
                recs[key] = recs.get(key, 0) + 1
        # dv-volume of w0 + p^res under v = 2/w is |2| |w|^-2 vol(p^res)
        far.append((n, tuple(sorted(recs.items())), measure_ball(res) * Fraction(p) ** (2 * n - v2)))
    info = {"near_cells": p ** max(hi + J, 0), "rho_near": rho_n, "rho_far": rho_f}
    return tuple(sorted(near.items())), measure_ball(hi), tuple(far), info


def intertwine_numeric(tau: MultChar, gamma, b, s0, T: Optional[TruncationSpec] = None,
                       A=F1) -> IntegralReport:
    """``M(tau,s) f_s(b, A) = int_F f_s(w1 u(v) b, -A^-1) dv`` at ``s = s0``.

    ``b`` is an SO_3 element (usually ``so3_lower(a, x, gamma)``).
    """
    T = T or TruncationSpec()
    p = tau.p
    s = complex(s0)
    gamma = Fraction(gamma)
    if s.real <= 0.5:
        raise DivergenceError("the intertwining integral converges only for Re(s) > 1/2")
    B = b.entries if isinstance(b, G.GroupElement) else tuple(tuple(Fraction(x) for x in r) for r in b)
    near, near_vol, far, info = _intertwine_records(p, gamma, B, Fraction(A), T.N_v)
    total = sum(c * _key_value(k, tau, s) for k, c in near) * near_vol.at(p)
    shells = [("near", total)]
    far_vals = []
    for n, recs, dv in far:
        sh = sum(c * _key_value(k, tau, s) for k, c in recs) * dv.at(p)
        far_vals.append(sh)
        shells.append((n, sh))
        total += sh
    tail, bound, conv = _geometric_tail(far, far_vals, p, s, T)
    params = {"p": p, "gamma": str(gamma), "tau": tau.label(), "N_v": T.N_v, **info}
    return IntegralReport(total + tail, bound, shells, s0, params, conv)


def _self_similar(prev, last) -> bool:
    """``last`` equals ``prev`` with every ``v(m)`` raised by 2."""
    return {(a, v + 2): c for (a, v), c in prev[1].items()} == last[1]


def _geometric_tail(far, far_vals, p, s, T):
    """Tail of the far shells after the explicit ones.

    Consecutive far shells are self-similar (``v(m)`` up by 2, volume up by
    q), so the tail is geometric with ratio ``q^(1-2s)``.  The relation is
    checked exactly on the last two shells before it is used.
    """
    if len(far) < 2:
        return 0j, INF, False
    (_, r1, d1), (_, r2, d2) = far[-2], far[-1]
    last = far_vals[-1]
    if not r1 and not r2:
        return 0j, 0.0, True
    same = {(v + 2, res): c for (v, res), c in r1} == dict(r2) and d2.equals(d1 * p, p)
    r = p * _q_power(p, -2 * s)
    if abs(r) >= 1:
        return 0j, INF, False
    if T.tail == "bound" or not same:
        return 0j, abs(last) * abs(r) / (1 - abs(r)), True
    return last * r / (1 - r), 1e-13 * (1 + abs(last)), True


# -- the Rankin-Selberg integral ---------------------------------------------
#
# Coordinates: b = diag(a,1,a^-1) nbar(x) in the lower Borel of SO_3 with
# db = |a|^-1 d*a dx, and r in F^(l-2) with the product of additive measures.
# Cells are valuation-major and unit-digit-minor: a in a0(1+p), x in x0(1+p)
# for x in a shell, the ball p^X around x = 0, and r in the ball p^(l-2).
# Outside that ball some bottom-row entry -r_k of the integrand matrix has
# valuation <= 0 on the whole r-shell, so W_0 vanishes there (the columns of
# the r entries are fixed by right multiplication with g_chi).

def _bottom_row_pattern(M, p) -> bool:
    """Valuation-level necessary condition for M in U g_chi^i Z I+ (i = 0, 1)."""
    n = len(M)
    row = M[n - 1]

    def ok(r):
        return val(r[n - 1], p) == 0 and all(_in_p(r[j], p) for j in range(n - 1))

    # right multiplication by g_chi permutes the bottom row up to unit and
    # varpi^{+-1} scalings: columns 0 <-> n-1 pick up varpi^{-+1}
    swapped = list(row)
    swapped[0], swapped[n - 1] = row[n - 1] * p, row[0] / p
    l = n // 2
    swapped[l - 1], swapped[l] = row[l], row[l - 1]
    return ok(row) or ok(swapped)


def _cells(datum: W.SSCDatum, K_x: int, X: int, depth: int = 1):
    """``(pt, shell, weight)`` over the truncated domain; weight is the exact
    cell measure ``|a0|^-1 vol*(1+p^depth) vol(x-cell) vol(r-cell)``.

    ``depth = 1`` is the coarse grid; larger depths refine every cell by
    ``depth - 1`` further digits (used by the constancy audit).
    """
    import itertools
    p, l = datum.p, datum.l
    units = _unit_reps(p, depth)
    mult = Fraction(1, (p - 1) * p ** (depth - 1))
    a_lo, a_hi = -(2 * K_x + 1), max(K_x, 1)
    x_shells = list(range(-K_x, X)) + [None]
    fine = [Fraction(j) for j in range(p ** (depth - 1))]
    r_pts = [tuple(p * c for c in rr) for rr in itertools.product(fine, repeat=l - 2)]
    r_vol = measure_ball(depth) ** (l - 2)
    for va in range(a_lo, a_hi + 1):
        a_vol = Fraction(p) ** va * mult
        for ua in units:
            a0 = ua * Fraction(p) ** va
            for vx in x_shells:
                if vx is None:
                    xs = [Fraction(p) ** X * j for j in fine]
                    x_vol = measure_ball(X + depth - 1)
                else:
                    xs = [ux * Fraction(p) ** vx for ux in units]
                    x_vol = measure_ball(vx + depth)
                probe = W.BbarPoint(a0, xs[0], (F0,) * (l - 2))
                if not _bottom_row_pattern(W.integrand_matrix(probe, datum), p):
                    continue
                for x0 in xs:
                    for r0 in r_pts:
                        yield W.BbarPoint(a0, x0, r0), vx, x_vol * a_vol * r_vol


@lru_cache(maxsize=256)
def support_cells(datum: W.SSCDatum, K_x: int, X: int, depth: int = 1) -> tuple:
    """Cells of the truncated domain where ``W_0^iota`` is nonzero, with
    their values: ``(pt, x-shell, weight, W)``.  Independent of s and tau."""
    out = []
    for pt, vx, vol in _cells(datum, K_x, X, depth):
        Wv = W.whittaker_w0(W.integrand_matrix(pt, datum), datum)
        if not Wv.is_zero():
            out.append((pt, vx, vol, Wv))
    return tuple(out)


def psi_numeric(datum: W.SSCDatum, tau: MultChar, s0=None, T: Optional[TruncationSpec] = None,
                break_measure: Fraction = F1, depth: int = 1) -> IntegralReport:
    """``Psi(W^iota, f_s)``: exact sum over cells.

    The exact value is a dict ``{v(m): AlgNum}`` meaning
    ``sum coef q^(-v s)``; ``value`` is it evaluated at ``s0`` (2 if None).
    ``break_measure`` rescales vol(o); it exists only as a negative control.
    """
    T = T or TruncationSpec(N_v=5)
    _require_quadratic(tau)
    p, l = datum.p, datum.l
    exact: dict = {}
    shells: dict = {}
    nz = 0
    for pt, vx, vol, Wv in support_cells(datum, T.N_v, T.N_v + 1, depth):
        key = _m_key(W.b_matrix(pt, datum.gamma), F1, p)
        if key is None:
            continue
        nz += 1
        v, res = key
        sign = 1 if (v * tau.unram + tau.tame_angle(res)) % 1 == 0 else -1
        term = Wv * AlgNum.from_measure(p, vol * MeasureValue(Fraction(sign) * Fraction(break_measure) ** (l - 1)))
        exact[v] = exact.get(v, AlgNum(p, 0)) + term
        shells[vx] = shells.get(vx, 0) + complex(term)
    s = complex(2 if s0 is None else s0)
    value = sum(complex(c) * _q_power(p, -v * s) for v, c in exact.items())
    params = {"p": p, "l": l, "alpha": str(datum.alpha), "eps": datum.eps, "omega": datum.omega,
              "tau": tau.label(), "N_v": T.N_v, "nonzero_cells": nz, "depth": depth}
    return IntegralReport(value, 0.0, sorted(shells.items(), key=lambda kv: (kv[0] is None, kv[0] or 0)),
                          s0, params, True, exact)


def psi_audit(datum: W.SSCDatum, tau: MultChar, T: Optional[TruncationSpec] = None) -> bool:
    """Cell-constancy audit: refining every cell by ``N_u - 1`` digits leaves
    the exact value of Psi unchanged."""
    T = T or TruncationSpec(N_v=3, N_u=2)
    base = psi_numeric(datum, tau, None, T).exact
    fine = psi_numeric(datum, tau, None, T, depth=T.N_u).exact
    keys = set(base) | set(fine)
    zero = AlgNum(datum.p, 0)
    return all(base.get(k, zero) == fine.get(k, zero) for k in keys)


def psi_exact_value(rep: IntegralReport):
    """The single coefficient of an s-independent exact Psi, else None."""
    if rep.exact is None or set(rep.exact) - {0}:
        return None
    return rep.exact.get(0)


def psi_closed(datum: W.SSCDatum) -> RatFunc:
    """``vol*(1+p) vol(p)^(l-1) = q^(-(l-1)/2)/(q-1)``."""
    return RatFunc(1 / (Q - 1), 0, Fraction(-(datum.l - 1), 2))


def psi_closed_value(datum: W.SSCDatum) -> AlgNum:
    p = datum.p
    return AlgNum.from_measure(p, MeasureValue(Fraction(1, p - 1), -(datum.l - 1)))


def _k_tail(shell_vals: list, T: TruncationSpec, tol: float = 1e-10):
    """Geometric tail of the k-shells from the last three explicit ones."""
    if len(shell_vals) < 3:
        return 0j, INF
    s0, s1, s2 = shell_vals[-3:]
    if abs(s2) == 0 and abs(s1) == 0:
        return 0j, 0.0
    if abs(s1) == 0 or abs(s0) == 0:
        return 0j, INF
    r1, r2 = s1 / s0, s2 / s1
    if abs(r2) >= 1:
        return 0j, INF
    drift = abs(r2 - r1)
    if T.tail == "bound" or drift > tol * max(1.0, abs(r2)):
        return 0j, abs(s2) * abs(r2) / (1 - abs(r2)) + drift
    return s2 * r2 / (1 - r2), 1e-12 * (1 + abs(s2))


def psi_M_numeric(datum: W.SSCDatum, tau: MultChar, s0, T: Optional[TruncationSpec] = None,
                  K_x: Optional[int] = None) -> IntegralReport:
    """``Psi(W^iota, M(tau,s) f_s)`` at ``s0`` with ``Re(s0) > 1/2``.

    Shells are grouped by ``k = -v(x)``; the explicit ones run to ``K_x``
    (default 3, 2 for p >= 5) and the rest is closed as a geometric tail
    once the last three shells show a constant ratio.
    """
    T = T or TruncationSpec()
    p, l = datum.p, datum.l
    if K_x is None:
        K_x = 2 if p >= 5 else 3
    by_shell: dict = {}
    nz = 0
    for pt, vx, vol, Wv in support_cells(datum, K_x, T.N_v + 1):
        Mf = intertwine_numeric(tau, datum.gamma, W.b_matrix(pt, datum.gamma), s0, T)
        if not Mf.convergent:
            raise DivergenceError("intertwining integral diverges at this s")
        nz += 1
        k = "c1" if vx is None or vx >= 1 else -vx
        by_shell[k] = by_shell.get(k, 0) + complex(Wv) * Mf.value * vol.at(p)
    ks = list(range(0, K_x + 1))
    vals = [by_shell.get(k, 0j) for k in ks]
    tail, bound = _k_tail(vals, T)
    vals = [by_shell.get("c1", 0j)] + vals
    ks = ["c1"] + ks
    total = sum(vals) + tail
    params = {"p": p, "l": l, "alpha": str(datum.alpha), "eps": datum.eps, "omega": datum.omega,
              "tau": tau.label(), "K_x": K_x, "nonzero_cells": nz}
    return IntegralReport(total, bound, list(zip(ks, vals)), s0, params, bound < INF)


# -- closed forms --------------------------------------------------------------

def _v2(p: int) -> int:
    return 1 if p == 2 else 0


def _abs2_pow(p: int, a=0, b=0) -> RatFunc:
    """``|2|^(a s + b)`` as a q-power (trivial for odd p)."""
    e = _v2(p)
    return RatFunc.qpow(-e * Fraction(a), -e * Fraction(b))


def _absgamma_pow(p: int, a=0, b=0) -> RatFunc:
    """``|gamma|^(a s + b)`` with ``|gamma| = |4|``."""
    e = 2 * _v2(p)
    return RatFunc.qpow(-e * Fraction(a), -e * Fraction(b))


def _require_quadratic(tau: MultChar):
    if not tau.is_quadratic:
        raise UnsupportedCharacter("closed forms are stated for quadratic tame characters")


def _bracket(datum: W.SSCDatum, tau: MultChar) -> RatFunc:
    tg = tau.sign(datum.gamma)
    tw = tau.sign(datum.varpi)
    first = RatFunc(tg * T ** 2 / (1 - Q * T ** 2), 0, Fraction(1, 2))
    second = RatFunc(datum.eps * tw * T / (1 - 1 / Q), 0, Fraction(-1, 2))
    return first + second


def intertwine_closed_case1(p: int, gamma, tau: MultChar) -> RatFunc:
    """``|gamma|^s tau(gamma)(q-1)|2|^(1-2s) q^(1/2-2s)/(1-q^(1-2s))``."""
    _require_quadratic(tau)
    body = tau.sign(Fraction(gamma)) * (Q - 1) * T ** 2 / (1 - Q * T ** 2)
    return RatFunc(body, 0, Fraction(1, 2)) * _absgamma_pow(p, 1) * _abs2_pow(p, -2, 1)


def intertwine_closed_case2(p: int, gamma, tau: MultChar, a, k: int) -> RatFunc:
    """``|gamma|^s tau(gamma)|a|^(1-s) tau^-1(a)|2|^(1-2s) q^(2k(s-1)) vol(p)``."""
    _require_quadratic(tau)
    va = val(Fraction(a), p)
    sign = tau.sign(Fraction(gamma)) * tau.sign(Fraction(a))
    # |a|^(1-s) = q^(-va) t^(-va);  q^(2k(s-1)) = q^(-2k) t^(-2k)
    body = sign * Q ** (-va - 2 * k) * T ** (-va - 2 * k)
    return RatFunc(body, 0, Fraction(-1, 2)) * _absgamma_pow(p, 1) * _abs2_pow(p, -2, 1)


def psi_star_closed(datum: W.SSCDatum, tau: MultChar) -> RatFunc:
    """``Psi(W^iota, M(tau,s) f_s)`` in closed form."""
    _require_quadratic(tau)
    p = datum.p
    return (psi_closed(datum) * (Q - 1) * _abs2_pow(p, -2, 1) * _absgamma_pow(p, 1)
            * _bracket(datum, tau))


def tate_at_2s_minus_1(tau: MultChar) -> RatFunc:
    return gamma_tate_closed(tau * tau, AddChar(tau.p)).compose_affine(2, -1)


def c_factor(tau: MultChar, gamma, psi: Optional[AddChar] = None) -> RatFunc:
    """``tau^4(2)|2|^(4s) tau^-1(gamma)|gamma|^(-s-1) gamma^Tate(2s-1, tau^2, psi)``."""
    p = tau.p
    psi = psi or AddChar(p)
    if psi.scale != 1:
        raise UnsupportedCharacter("c_factor is tabulated for the pinned psi")
    gamma = Fraction(gamma)
    t2 = tau * tau
    pre = _tau_value(tau * tau * tau * tau, Fraction(2)) * _tau_value(tau.inverse(), gamma)
    return (RatFunc.const(pre) * _abs2_pow(p, 4) * _absgamma_pow(p, -1, -1)
            * gamma_tate_closed(t2, psi).compose_affine(2, -1))


def _tau_value(tau: MultChar, x):
    """Exact value of a character whose value is +-1 or +-i."""
    ang = tau.angle(x)
    table = {Fraction(0): 1, Fraction(1, 2): -1, Fraction(1, 4): 1j, Fraction(3, 4): -1j}
    if ang not in table:
        raise UnsupportedCharacter("character value is not a fourth root of unity")
    return table[ang]


def normalizer(datum: W.SSCDatum, tau: MultChar) -> RatFunc:
    """``pi(-I) tau(-1)^l tau^2(2)|2|^(2s-1) tau^-2(gamma)|gamma|^(-2s+1)``."""
    p = datum.p
    c = (datum.omega * _tau_value(tau, Fraction(-1)) ** datum.l * _tau_value(tau * tau, Fraction(2))
         * _tau_value((tau * tau).inverse(), datum.gamma))
    return RatFunc.const(c) * _abs2_pow(p, 2, -1) * _absgamma_pow(p, -2, 1)


@lru_cache(maxsize=1024)
def gamma_closed(datum: W.SSCDatum, tau: MultChar) -> RatFunc:
    """``pi(-I) tau(-1)^l tau(gamma)(q-1) gamma^Tate(2s-1,tau^2,psi)`` times the bracket."""
    _require_quadratic(tau)
    c = datum.omega * tau.sign(Fraction(-1)) ** datum.l * tau.sign(datum.gamma)
    return RatFunc.const(c) * (Q - 1) * tate_at_2s_minus_1(tau) * _bracket(datum, tau)


def gamma_via_normalization(datum: W.SSCDatum, tau: MultChar) -> RatFunc:
    """The same factor assembled from its ingredients:
    ``normalizer * C * Psi(W, M f) / Psi(W, f)``."""
    return (normalizer(datum, tau) * c_factor(tau, datum.gamma) * psi_star_closed(datum, tau)
            / psi_closed(datum))


@dataclass
class GammaReport:
    value: complex
    closed: complex
    tail_bound: float
    psi: IntegralReport
    psi_m: IntegralReport

    @property
    def error(self) -> float:
        return abs(self.value - self.closed)

    def to_json(self) -> dict:
        return {"schema": "v1", "value": {"re": self.value.real, "im": self.value.imag},
                "closed": {"re": self.closed.real, "im": self.closed.imag},
                "tail_bound": self.tail_bound, "error": self.error,
                "psi": self.psi.to_json(), "psi_M": self.psi_m.to_json()}


def gamma_numeric(datum: W.SSCDatum, tau: MultChar, s0, T: Optional[TruncationSpec] = None) -> GammaReport:
    """Right side of the normalized functional equation over Psi, numerically.

    ``Psi* = C * Psi(W, M f)``; C comes from its closed form (it is checked
    against its own numeric oracle separately).
    """
    T = T or TruncationSpec()
    p = datum.p
    closed_f = gamma_closed(datum, tau)
    closed = complex(substitute(closed_f, s0, p))
    ps = psi_numeric(datum, tau, s0, T)
    if abs(ps.value) == 0:
        raise ZeroDivisionError("Psi vanishes")
    pm = psi_M_numeric(datum, tau, s0, T)
    factor = complex(substitute(normalizer(datum, tau) * c_factor(tau, datum.gamma), s0, p))
    value = factor * pm.value / ps.value
    bound = abs(factor) * pm.tail_bound / abs(ps.value)
    return GammaReport(value, closed, bound, ps, pm)


# -- numeric C(s, tau, psi) ---------------------------------------------------

@dataclass
class CFactorReport:
    value: complex
    closed: complex
    lhs: complex
    rhs_over_c: complex
    tate: complex
    tail_bound: float

    @property
    def error(self) -> float:
        return abs(self.value - self.closed)

    def to_json(self) -> dict:
        return {"schema": "v1", "value": {"re": self.value.real, "im": self.value.imag},
                "closed": {"re": self.closed.real, "im": self.closed.imag},
                "error": self.error, "tail_bound": self.tail_bound}


def _one_dim(p: int, t, i: int) -> SchwartzFn:
    return SchwartzFn(p, 1, (Term(AlgNum(p, F1), (t.center[i],), (t.radius[i],), (t.freq[i],)),))


def _z_shells(p: int, lo: int, hi: int, digits, fn, tau2: MultChar, expo: complex) -> complex:
    """``int fn(z) tau2(z) |z|^expo d*z`` over ``lo <= v(z) <= hi``.

    ``digits(v)`` is the number of unit digits on which ``fn`` is constant
    on the shell ``v``; each coset carries ``d*z``-volume ``1/((q-1)q^(M-1))``.
    """
    total = 0j
    for v in range(lo, hi + 1):
        M = max(1, digits(v))
        shell = 0j
        for X in range(1, p ** M):
            if X % p == 0:
                continue
            z = Fraction(p) ** v * X
            f = fn(z)
            if f:
                shell += f * tau2(z)
        total += shell * p ** (-expo * v) / ((p - 1) * p ** (M - 1))
    return total


def c_factor_numeric(tau: MultChar, gamma, psi: Optional[AddChar], phi, s0,
                     T: Optional[TruncationSpec] = None, tol: float = 1e-12) -> CFactorReport:
    """``C(s0, tau, psi)`` from both sides of Shahidi's functional equation.

    The section is ``f(h, a) = tau(a) int_Z Phi(e1 z g) tau(det zg)|det zg|^s dz``
    with ``g`` a preimage of ``h`` in GL_2 (``phi`` a product-type Schwartz
    function on F^2).  The left side is the Whittaker integral of
    ``f(w1 u, 1)``; on the right the u-integral is taken inside the centre
    integral, which turns ``M f`` at ``w1 u`` into a finite shell sum times
    the inverse Tate factor.  Both centre integrals have compact support in
    ``z`` because the u-integrals are Fourier transforms; the Tate factor is
    computed numerically from an auxiliary test function.
    """
    p = tau.p
    psi = psi or AddChar(p)
    if psi.scale != 1:
        raise UnsupportedCharacter("sections are built for the pinned psi")
    if phi.dim != 2:
        raise ValueError("phi must be a Schwartz function on F^2")
    s = complex(s0)
    if s.real <= 0.5:
        raise DivergenceError("the centre integrals need Re(s) > 1/2")
    gamma = Fraction(gamma)
    two = Fraction(2)
    tau2 = tau * tau
    v2 = val(two, p)
    lhs = rhs = 0j
    for t in phi.terms:
        c = complex(t.coeff)
        f1, f2 = _one_dim(p, t, 0), _one_dim(p, t, 1)
        h1, h2 = fourier(f1, psi), fourier(f2, psi)
        hh2 = fourier(h2, psi)
        o2, i2 = f2.resolution()
        oh, ih = h1.resolution()
        # left: int_u phi1(2zu/gamma) psi(-u) du = |gamma/2z| hat(phi1)(-gamma/2z)
        a4 = val(4 / gamma, p)
        b = val(gamma / 2, p)

        def left(z, f2=f2, h1=h1):
            x = f2(4 * z / gamma)
            if x == 0:
                return 0
            y = h1(-gamma / (2 * z))
            if y == 0:
                return 0
            return complex(x) * complex(y) * abs_value(gamma / (2 * z), p).at(p)

        lhs += c * _z_shells(p, o2 - a4, b - oh, lambda v: max(i2 - a4 - v, ih - b + v) + 1,
                             left, tau2, 2 * s)
        # right: |gamma/4| int_u hat(Phi)(z, -zu/2) psi(-u) du
        #      = |gamma/4||2/z| hat(phi1)(z) hat(hat(phi2))(2/z)
        oh1, ih1 = h1.resolution()
        ohh, ihh = hh2.resolution()

        def right(z, h1=h1, hh2=hh2):
            x = h1(z)
            if x == 0:
                return 0
            y = hh2(two / z)
            if y == 0:
                return 0
            return complex(x) * complex(y) * abs_value(two / z, p).at(p)

        rhs += c * _z_shells(p, oh1, v2 - ohh, lambda v: max(ih1 - v, ihh - v2 + v) + 1,
                             right, tau2.inverse(), 2 - 2 * s)
    sign = complex(tau(Fraction(-1)))
    lhs *= sign * complex(tau(4 / gamma)) * _q_power(p, -a4 * s)
    rhs *= sign * abs_value(two, p).at(p) * abs_value(gamma / 4, p).at(p)
    aux = sample_schwartz(p, tau2)[0]
    g = gamma_tate_numeric(tau2, psi, aux, 2 * s - 1)
    if abs(rhs) < tol:
        raise ZeroDivisionError("the right side vanishes for this test function")
    value = lhs * g.value / rhs
    closed = complex(substitute(c_factor(tau, gamma, psi), s0, p))
    return CFactorReport(value, closed, lhs, rhs, g.value, abs(value) * g.tail_bound)
