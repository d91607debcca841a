"""Oracle comparisons shared by ``ssc-gamma verify`` and the acceptance tests.

Each check returns a list of :class:`CheckResult`, one per case, carrying the
measured and expected values and the tail bound used in the comparison.
Grids default to the ones the acceptance suite runs.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import so_groups as G
from .characters import (
    AddChar, MultChar, SchwartzFn, fourier, gamma_tate_closed, gamma_tate_numeric, gauss_sum,
    negate_arg, quadratic_tame_chars, sample_schwartz,
)
from .padic_core import nonresidue
from .parameter import delta, gamma_pi_prime
from .qsymb import RatFunc, is_monomial, nonzero_at, order_at, substitute
from .rs_integral import (
    TruncationSpec, c_factor_numeric, gamma_closed, gamma_numeric, intertwine_closed_case1,
    intertwine_closed_case2, intertwine_numeric, psi_closed_value, psi_exact_value, psi_numeric,
)
from .whittaker import (
    BbarPoint, SSCDatum, chain_check, classify_by_engine, classify_support,
)

S_INTERTWINE = (1, Fraction(3, 2), 2, 2 + 1j)
S_GAMMA = (Fraction(3, 2), 2, 2 + 1j, Fraction(5, 2), 3 - 0.5j)
S_TATE = (Fraction(3, 2), 2, 2 + 1j, Fraction(5, 2), 3 - 0.5j)
S_CFACTOR = (2, Fraction(3, 2), 2 + 1j)
TOL = 1e-9


@dataclass
class CheckResult:
    check: str
    case: str
    passed: bool
    measured: object = None
    expected: object = None
    tail_bound: float = 0.0
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.check, "case": self.case, "passed": bool(self.passed),
                "measured": _jsonable(self.measured), "expected": _jsonable(self.expected),
                "tail_bound": self.tail_bound, "detail": self.detail}


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return str(x)


@dataclass
class Grid:
    """Optional restriction of a check's parameter grid."""

    primes: Optional[tuple] = None
    ranks: Optional[tuple] = None
    break_measure: Fraction = Fraction(1)
    seed: int = 0
    trunc: Optional[TruncationSpec] = None

    def p(self, default):
        return tuple(x for x in default if self.primes is None or x in self.primes)

    def l(self, default):
        return tuple(x for x in default if self.ranks is None or x in self.ranks)


def alphas(p: int) -> tuple:
    """Representatives of the square classes of residue units."""
    return (1,) if p == 2 else (1, nonresidue(p))


def data_grid(p: int, l: int, all_alpha: bool = True):
    for alpha in (alphas(p) if all_alpha else (1,)):
        for eps in (1, -1):
            for omega in ((1,) if p == 2 else (1, -1)):
                yield SSCDatum(l, p, alpha=alpha, eps=eps, omega=omega)


def _dlabel(d: SSCDatum) -> str:
    return f"p={d.p} l={d.l} alpha={d.alpha} eps={d.eps:+d} omega={d.omega:+d}"


# -- 1: the Whittaker-section integral ------------------------------------------------

def check_psi(grid: Grid = Grid()) -> list:
    out = []
    T = grid.trunc or TruncationSpec(N_v=5, N_u=4)
    for p in grid.p((2, 3, 5)):
        for l in grid.l((2, 3, 4)):
            d = SSCDatum(l, p)
            want = psi_closed_value(d)
            t0 = time.perf_counter()
            got = []
            for tau in quadratic_tame_chars(p):
                r = psi_numeric(d, tau, 2, T, break_measure=grid.break_measure)
                got.append((tau, psi_exact_value(r)))
            dt = time.perf_counter() - t0
            for tau, v in got:
                out.append(CheckResult("psi", f"p={p} l={l} tau={tau.label()}", v == want, v, want,
                                       0.0, f"exact arithmetic, N_v={T.N_v}"))
            out.append(CheckResult("psi", f"p={p} l={l} runtime", dt < 10, round(dt, 3), "< 10 s"))
    return out


# -- 2: intertwining operator -----------------------------------------------------------

def intertwine_points(p: int, alpha):
    """(label, b, closed) for a Case 1 point and Case 2 points with k = 0, 1."""
    gamma = -4 * Fraction(alpha)
    yield "case1", G.so3_lower(1 + p, p, gamma), lambda tau: intertwine_closed_case1(p, gamma, tau)
    for k in (0, 1):
        x = Fraction(1, p ** k)
        a = gamma / 4 * x * x / p
        yield f"case2 k={k}", G.so3_lower(a, x, gamma), \
            (lambda tau, a=a, k=k: intertwine_closed_case2(p, gamma, tau, a, k))


def check_intertwining(grid: Grid = Grid()) -> list:
    out = []
    T = grid.trunc or TruncationSpec(N_v=12)
    for p in grid.p((2, 3, 5)):
        for alpha in alphas(p):
            gamma = -4 * Fraction(alpha)
            for name, b, closed in intertwine_points(p, alpha):
                for tau in quadratic_tame_chars(p):
                    f = closed(tau)
                    for s in S_INTERTWINE:
                        r = intertwine_numeric(tau, gamma, b, s, T)
                        want = complex(substitute(f, s, p))
                        err = abs(r.value - want)
                        ok = err <= max(r.tail_bound, 1e-12) or err <= TOL
                        if p >= 3 and T.N_v >= 12:
                            ok = ok and r.tail_bound <= TOL
                        out.append(CheckResult(
                            "intertwining", f"p={p} alpha={alpha} {name} tau={tau.label()} s={s}",
                            ok, r.value, want, r.tail_bound, f"error {err:.3g}"))
    return out


# -- 3: gamma factor, numeric against closed ------------------------------------------------

def check_gamma(grid: Grid = Grid()) -> list:
    out = []
    T = grid.trunc or TruncationSpec()
    for p in grid.p((2, 3, 5)):
        for l in grid.l((2, 3)):
            for d in data_grid(p, l, all_alpha=False):
                for tau in quadratic_tame_chars(p):
                    for s in S_GAMMA:
                        case = f"{_dlabel(d)} tau={tau.label()} s={s}"
                        try:
                            g = gamma_numeric(d, tau, s, T)
                        except ZeroDivisionError as e:
                            want = complex(substitute(gamma_closed(d, tau), s, p))
                            out.append(CheckResult("gamma", case, False, None, want, 0.0,
                                                   f"numeric route undefined: {e}"))
                            continue
                        out.append(CheckResult("gamma", case, g.error <= TOL, g.value, g.closed,
                                               g.tail_bound, f"error {g.error:.3g}"))
    return out


# -- 4: poles at s = 1 ---------------------------------------------------------------------

def check_poles(grid: Grid = Grid()) -> list:
    out = []
    for p in grid.p((2, 3, 5, 7)):
        for l in grid.l((2, 3, 4)):
            for d in data_grid(p, l):
                for tau in quadratic_tame_chars(p):
                    f = gamma_closed(d, tau)
                    pole = tau.sign(d.varpi) == d.eps * tau.sign(d.gamma)
                    o = order_at(f, 1)
                    ok = o == -1 if pole else (o == 0 and nonzero_at(f, 1))
                    out.append(CheckResult("poles", f"{_dlabel(d)} tau={tau.label()}", ok, o,
                                           -1 if pole else 0))
    return out


# -- 5: the C factor --------------------------------------------------------------------------

def c_factor_test_functions(p: int) -> list:
    """Three product-type Schwartz functions on F^2 whose zeta integrals
    against the pinned psi do not vanish."""
    return [SchwartzFn.box(p, (0, 0), (0, -1)),
            SchwartzFn.box(p, (1, 0), (1, -1)),
            SchwartzFn.box(p, (0, 0), (-1, -1), 1, (1, 0)) + SchwartzFn.box(p, (1, 0), (1, -2), 2)]


def check_c_factor(grid: Grid = Grid()) -> list:
    out = []
    for p in grid.p((3, 5)):
        taus = [MultChar(p), MultChar.quadratic(p, -1), MultChar.quadratic(p, 1, True)]
        for tau in taus:
            for alpha in alphas(p):
                for s in S_CFACTOR:
                    vals = [c_factor_numeric(tau, -4 * alpha, None, phi, s)
                            for phi in c_factor_test_functions(p)]
                    case = f"p={p} tau={tau.label()} alpha={alpha} s={s}"
                    for i, r in enumerate(vals):
                        out.append(CheckResult("c_factor", f"{case} phi{i}", r.error <= TOL + r.tail_bound,
                                               r.value, r.closed, r.tail_bound, f"error {r.error:.3g}"))
                    spread = max(abs(r.value - vals[0].value) for r in vals)
                    out.append(CheckResult("c_factor", f"{case} phi-independence", spread <= TOL,
                                           spread, 0.0))
    return out


# -- 6: Tate suite ----------------------------------------------------------------------------

FOURIER_GENERATORS = (
    lambda: SchwartzFn.indicator(3, 0, 0),
    lambda: SchwartzFn.indicator(3, Fraction(1, 3), 2, 5),
    lambda: SchwartzFn.box(3, (1,), (1,), 1, (Fraction(2, 9),)),
    lambda: SchwartzFn.box(5, (Fraction(2, 5),), (0,), 3, (Fraction(3, 25),)),
    lambda: SchwartzFn.box(2, (0, 1), (0, 2), 1, (Fraction(1, 4), 0)),
)


def check_tate(grid: Grid = Grid()) -> list:
    out = []
    for p in grid.p((2, 3, 5)):
        psi = AddChar(p)
        for eta in quadratic_tame_chars(p):
            closed = gamma_tate_closed(eta, psi)
            for s in S_TATE:
                want = complex(substitute(closed, s, p))
                vals = [gamma_tate_numeric(eta, psi, phi, s) for phi in sample_schwartz(p, eta)]
                err = max(abs(v.value - want) for v in vals)
                spread = max(abs(v.value - vals[0].value) for v in vals)
                out.append(CheckResult("tate", f"p={p} eta={eta.label()} s={s} closed", err <= TOL,
                                       vals[0].value, want, vals[0].tail_bound, f"max error {err:.3g}"))
                out.append(CheckResult("tate", f"p={p} eta={eta.label()} s={s} phi-independence",
                                       spread <= TOL, spread, 0.0))
    for p in grid.p((2, 3, 5, 7)):
        for scale in (1, 2 if p > 2 else 3):
            psi = AddChar(p, scale)
            for eta in quadratic_tame_chars(p):
                g = gamma_tate_closed(eta, psi) * \
                    gamma_tate_closed(eta.inverse(), psi.conj()).compose_affine(-1, 1)
                out.append(CheckResult("tate", f"p={p} scale={scale} eta={eta.label()} inversion",
                                       g == RatFunc.const(1), g, 1))
    for i, mk in enumerate(FOURIER_GENERATORS):
        phi = mk()
        for scale in (1, 2 if phi.p != 2 else 3):
            psi = AddChar(phi.p, scale)
            ok = fourier(fourier(phi, psi), psi).equals(negate_arg(phi))
            out.append(CheckResult("tate", f"fourier involution phi{i} p={phi.p} scale={scale}", ok))
    for p in grid.p((3, 5, 7)):
        for k in range(1, p - 1):
            g = gauss_sum(MultChar(p, 0, k), AddChar(p))
            n = g * g.conjugate()
            out.append(CheckResult("tate", f"p={p} gauss |g|^2 tame({k})", n == p, n, p))
    return out


# -- 7: matrix identities ---------------------------------------------------------------------

def sample_case2(d: SSCDatum, k: int, rng: random.Random) -> BbarPoint:
    """A point with ``|x| = q^k`` and ``(gamma/4) x^2 / (a varpi)`` in ``1 + p``."""
    p = d.p
    ux = rng.choice([u for u in range(1, p * p) if u % p])
    x = Fraction(ux) / Fraction(p) ** k
    corr = 1 + p * Fraction(rng.randrange(p * p), rng.choice([1, 1, 2 if p != 2 else 1]))
    a = d.gamma / 4 * x * x / d.varpi / corr
    r = tuple(p * Fraction(rng.randrange(-4, 5)) for _ in range(d.l - 2))
    return BbarPoint(a, x, r)


def check_matrices(grid: Grid = Grid()) -> list:
    out = []
    for p in grid.p((2, 3, 5)):
        for l in grid.l((2, 3, 4)):
            for alpha in alphas(p):
                rng = random.Random(grid.seed * 7919 + 100 * l + 10 * p + alpha)
                case = f"p={p} l={l} alpha={alpha}"
                g = G.make_g_chi(l, alpha, p)
                out.append(CheckResult("matrices", f"{case} g_chi^2 = 1", G.mul(g, g) == G.identity(2 * l)))
                out.append(CheckResult("matrices", f"{case} g_chi in SO", G.in_so(g)))
                data = G.AffineGenericData.normal_form(l, alpha, p, AddChar(p))
                bad = 0
                for _ in range(100):
                    h = G.random_iplus(l, p, rng)
                    c = G.mmul(g, h, g)
                    if G.iwahori_class(c, p) != "I+" or G.chi_angle(c, data) != G.chi_angle(h, data):
                        bad += 1
                out.append(CheckResult("matrices", f"{case} chi stable under g_chi (100 samples)",
                                       bad == 0, bad, 0, detail="failures"))
                gamma = -4 * Fraction(alpha)
                bad = 0
                for _ in range(100):
                    x, y = G.random_gl2(p, rng), G.random_gl2(p, rng)
                    ix, iy = G.iota_gl2(x, gamma), G.iota_gl2(y, gamma)
                    ok = G.in_so(ix, G.so3_form(gamma)) and G.iota_gl2(G.mul(x, y), gamma) == G.mul(ix, iy)
                    ex, ey = G.embed_so3(ix, l, gamma), G.embed_so3(iy, l, gamma)
                    ok = ok and G.in_so(ex) and G.embed_so3(G.mul(ix, iy), l, gamma) == G.mul(ex, ey)
                    bad += not ok
                out.append(CheckResult("matrices", f"{case} embed_so3/iota_gl2 homomorphisms (100 pairs)",
                                       bad == 0, bad, 0, detail="failures"))
                d = SSCDatum(l, p, alpha=alpha)
                bad = []
                for n in range(50):
                    pt = sample_case2(d, n % 3, rng)
                    res = chain_check(pt, d)
                    if classify_support(pt, d) != ("Case2", n % 3) or not all(res.values()):
                        bad.append(n)
                out.append(CheckResult("matrices", f"{case} second-coset chain (50 samples)",
                                       not bad, len(bad), 0, detail=f"failing samples {bad[:5]}"))
    return out


# -- 8: the complement of the pole summands -------------------------------------------------

def check_delta(grid: Grid = Grid()) -> list:
    out = []
    for p in grid.p((2, 3, 5, 7)):
        for l in grid.l((2, 3, 4)):
            for d in data_grid(p, l):
                g = gamma_pi_prime(d)
                if not is_monomial(g):
                    out.append(CheckResult("delta", _dlabel(d), False, g, "delta q^(1/2-s)"))
                    continue
                r = delta(d)
                ok = r["matches"] and (p != 2 or complex(r["value"]) == d.eps)
                out.append(CheckResult("delta", _dlabel(d), ok, complex(r["value"]),
                                       "omega eps / eps(tau_2)" if p != 2 else d.eps))
    return out


# -- 9: support classification ---------------------------------------------------------------

def _agree(c, e) -> bool:
    if c is None:
        return e is None
    if c == "Case1":
        return bool(e) and all(i == 0 for i, _ in e)
    return bool(e) and all(i == 1 for i, _ in e)


def support_grid(d: SSCDatum, vrange=range(-5, 6)):
    p = d.p
    units = [Fraction(u) for u in range(1, p * p) if u % p]
    As = [u * Fraction(p) ** v for v in vrange for u in units]
    Xs = [Fraction(0)] + [u * Fraction(p) ** v for v in vrange for u in units]
    Rs = [()] if d.l == 2 else [tuple([Fraction(0)] * (d.l - 2)), tuple([Fraction(1, p)] * (d.l - 2))]
    for a in As:
        for x in Xs:
            for r in Rs:
                yield BbarPoint(a, x, r)


def check_support(grid: Grid = Grid()) -> list:
    out = []
    for l in grid.l((2, 3)):
        for alpha in ((1, 2) if l == 2 else (1,)):
            d = SSCDatum(l, 3, alpha=alpha)
            n, bad, seen = 0, [], {}
            for pt in support_grid(d):
                c = classify_support(pt, d)
                n += 1
                key = c if c is None or c == "Case1" else "Case2"
                seen[str(key)] = seen.get(str(key), 0) + 1
                if not _agree(c, classify_by_engine(pt, d)):
                    bad.append(pt)
            out.append(CheckResult("support", f"p=3 l={l} alpha={alpha} points={n}", not bad, len(bad), 0,
                                   detail=f"classes {seen}"))
    return out


CHECKS: dict = {
    "psi": (1, check_psi),
    "intertwining": (2, check_intertwining),
    "gamma": (3, check_gamma),
    "poles": (4, check_poles),
    "c_factor": (5, check_c_factor),
    "tate": (6, check_tate),
    "matrices": (7, check_matrices),
    "delta": (8, check_delta),
    "support": (9, check_support),
}


@dataclass
class VerifyReport:
    results: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for rs in self.results.values() for r in rs)

    def summary(self) -> dict:
        return {name: {"criterion": CHECKS[name][0], "passed": all(r.passed for r in rs),
                       "cases": len(rs), "failures": sum(not r.passed for r in rs),
                       "seconds": round(self.timings.get(name, 0.0), 3)}
                for name, rs in self.results.items()}

    def to_json(self, full: bool = True) -> dict:
        out = {"schema": "v1", "passed": self.passed, "summary": self.summary()}
        if full:
            out["results"] = {k: [r.to_json() for r in v] for k, v in self.results.items()}
        return out


def run_checks(names=None, grid: Grid = Grid(), workers: int = 1,
               progress: Optional[Callable[[str], None]] = None) -> VerifyReport:
    """Run the named checks (all by default).  Results are keyed in the
    order of ``CHECKS`` regardless of completion order."""
    names = list(CHECKS) if names is None else [n for n in CHECKS if n in set(names)]

    def one(name):
        t0 = time.perf_counter()
        res = CHECKS[name][1](grid)
        return name, res, time.perf_counter() - t0

    done = {}
    if workers > 1 and len(names) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as ex:
            for name, res, dt in ex.map(one, names):
                done[name] = (res, dt)
                if progress:
                    progress(name)
    else:
        for name in names:
            _, res, dt = one(name)
            done[name] = (res, dt)
            if progress:
                progress(name)
    rep = VerifyReport()
    for name in names:
        rep.results[name], rep.timings[name] = done[name]
    return rep
