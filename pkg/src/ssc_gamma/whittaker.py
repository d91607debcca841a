"""Simple supercuspidal data, the Whittaker function W_0 and the section f_s.

The factorisation engine is an exact UL decomposition: ``m = u L`` with u
upper unipotent and L lower triangular.  When it exists it is unique, so for
m in SO_2l both factors are orthogonal; and m lies in U I+ exactly when L
lies in I+ (Iwahori factorisation of I+).  Rows are eliminated from the
bottom up, so the bottom-row test runs first and rejects most points.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .characters import AddChar, MultChar
from .cyclo import AlgNum
from .padic_core import FieldDescriptor, val
from . import so_groups as G

F0, F1 = Fraction(0), Fraction(1)


class FactorisationError(RuntimeError):
    """Two factorisations of the same element gave different W_0 values."""


@dataclass(frozen=True)
class SSCDatum:
    """``(varpi, alpha, eps, omega)`` and the rank l; ``gamma = -4 alpha``."""

    l: int
    p: int
    alpha: Fraction = F1
    eps: int = 1
    omega: int = 1
    varpi: Optional[Fraction] = None
    N: int = 8

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "varpi", Fraction(self.varpi if self.varpi is not None else self.p))
        FieldDescriptor(self.p, self.N)
        if self.l < 2:
            raise ValueError("rank l must be >= 2")
        if self.alpha == 0 or val(self.alpha, self.p) != 0:
            raise ValueError("alpha must be a unit")
        if val(self.varpi, self.p) != 1:
            raise ValueError("varpi must be a uniformizer")
        if self.eps not in (1, -1) or self.omega not in (1, -1):
            raise ValueError("eps and omega are signs")
        if self.p == 2 and self.omega != 1:
            raise ValueError("for p = 2 the central character is trivial (-1 lies in I+)")

    @property
    def gamma(self) -> Fraction:
        return -4 * self.alpha

    @property
    def psi(self) -> AddChar:
        return AddChar(self.p)

    @property
    def chi_data(self) -> G.AffineGenericData:
        return G.AffineGenericData.normal_form(self.l, self.alpha, self.varpi, self.psi)

    @property
    def g_chi(self) -> tuple:
        return G.make_g_chi(self.l, self.alpha, self.varpi)

    def to_json(self) -> dict:
        return {"l": self.l, "p": self.p, "alpha": str(self.alpha), "eps": self.eps,
                "omega": self.omega, "varpi": str(self.varpi), "gamma": str(self.gamma)}


@dataclass(frozen=True)
class BbarPoint:
    a: Fraction
    x: Fraction
    r: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "r", tuple(Fraction(c) for c in self.r))
        if self.a == 0:
            raise ValueError("a must be nonzero")


# -- the factorisation engine ------------------------------------------------

def _in_p(x, p):
    return x == 0 or val(x, p) >= 1


def ul_decompose(M, p: Optional[int] = None):
    """``M = u L``; with ``p`` given, stop as soon as a row of L leaves I+.

    Returns ``(u, L)`` or None.
    """
    n = len(M)
    L = [None] * n
    U = [[F1 if i == j else F0 for j in range(n)] for i in range(n)]
    for i in range(n - 1, -1, -1):
        coef = {}
        for c in range(n - 1, i, -1):
            s = M[i][c] - sum((coef[j] * L[j][c] for j in coef if L[j][c]), F0)
            piv = L[c][c]
            if piv == 0:
                if s != 0:
                    return None
                coef[c] = F0
            else:
                coef[c] = s / piv
        row = list(M[i])
        for j, cj in coef.items():
            if cj:
                Lj = L[j]
                row = [x - cj * y for x, y in zip(row, Lj)]
        for c in range(i + 1, n):
            row[c] = F0
        if p is not None:
            if not _in_p(row[i] - 1, p) or not all(_in_p(row[c], p) for c in range(i)):
                return None
        elif row[i] == 0:
            return None
        L[i] = row
        for j, cj in coef.items():
            U[i][j] = cj
    return tuple(tuple(r) for r in U), tuple(tuple(r) for r in L)


def bottom_row_ok(M, p: int) -> bool:
    """Necessary condition for ``M in U I+``."""
    n = len(M)
    return _in_p(M[n - 1][n - 1] - 1, p) and all(_in_p(M[n - 1][j], p) for j in range(n - 1))


def decompose_u_iplus(m, p: int):
    """``(u, y)`` with ``m = u y``, u in U and y in I+, or None."""
    M = m.entries if isinstance(m, G.GroupElement) else m
    if not bottom_row_ok(M, p):
        return None
    return ul_decompose(M, p)


# -- W_0 ---------------------------------------------------------------------

def _options(datum: SSCDatum):
    gc = datum.g_chi
    n = 2 * datum.l
    for i in (0, 1):
        for z in (1, -1):
            right = gc if i else G.identity(n)
            if z == -1:
                right = tuple(tuple(-x for x in row) for row in right)
            yield i, z, right


def w0_factor(g, datum: SSCDatum):
    """All successful ``(i, z, u, y)`` with ``g = u g_chi^i z y'``.

    Here ``y = (g_chi^i z) y' (g_chi^i z)^-1`` is what the engine returns.
    """
    M = g.entries if isinstance(g, G.GroupElement) else g
    out = []
    for i, z, right in _options(datum):
        # (g_chi^i z)^-1 = g_chi^i z since both square to 1
        res = decompose_u_iplus(G.mul(M, right), datum.p)
        if res is not None:
            out.append((i, z, res[0], res[1]))
    return out


def _w0_value(i, z, u, y, datum: SSCDatum) -> AlgNum:
    p = datum.p
    # chi restricts to psi_alpha on U(o), so the function that transforms by
    # psi_alpha^-1 on the left is built from chi^-1 (the same representation:
    # chi^-1 = chi o Ad(t), t = diag(1,-1,1,...) fixes g_chi)
    ang = -G.psi_alpha_angle(u, datum.l, datum.alpha, datum.psi)
    ang -= G.chi_angle(y, datum.chi_data)
    sign = (datum.eps if i else 1) * (datum.omega if z == -1 else 1)
    return AlgNum.root(p, ang % 1, sign)


def whittaker_w0(g, datum: SSCDatum) -> AlgNum:
    """``psi_alpha^-1(u) chi(g_chi^i) omega(z) chi^-1(y)``, or 0 off the support."""
    facs = w0_factor(g, datum)
    if not facs:
        return AlgNum(datum.p, 0)
    vals = [_w0_value(*f, datum) for f in facs]
    if len({(f[0]) for f in facs}) > 1:
        raise FactorisationError("element lies in both double cosets")
    if any(not v == vals[0] for v in vals[1:]):
        raise FactorisationError("inconsistent W_0 values across factorisations")
    return vals[0]


def whittaker_w0_iota(g, datum: SSCDatum) -> AlgNum:
    """``W_0^iota(g) = W_0(iota^-1 g iota)``."""
    return whittaker_w0(G.iota_conj(g, datum.l), datum)


# -- the integration domain ------------------------------------------------------

def b_matrix(pt: BbarPoint, gamma) -> tuple:
    return G.so3_lower(pt.a, pt.x, gamma)


def integrand_matrix(pt: BbarPoint, datum: SSCDatum) -> tuple:
    """``iota^-1 (r w b w^-1) iota`` for the embedded b."""
    l = datum.l
    w = G.w_l1(l)
    b = G.embed_so3(b_matrix(pt, datum.gamma), l, datum.gamma)
    m = G.mmul(G.r_element(l, pt.r or (F0,) * (l - 2)), w, b, G.inverse(w))
    return G.iota_conj(m, l)


def classify_support(pt: BbarPoint, datum: SSCDatum):
    """``"Case1"``, ``("Case2", k)`` or None from the valuation conditions."""
    p = datum.p
    a, x, r = pt.a, pt.x, pt.r
    r_ok = all(_in_p(c, p) for c in r)
    if not r_ok:
        return None
    if _in_p(a - 1, p) and _in_p(x, p):
        return "Case1"
    va = val(a, p)
    if x != 0:
        vx = val(x, p)
        k = -vx
        if k >= 0 and va == -(2 * k + 1):
            c = datum.gamma / 4 * x * x / a / datum.varpi
            if _in_p(c - 1, p):
                return ("Case2", k)
    return None


def classify_by_engine(pt: BbarPoint, datum: SSCDatum):
    """Support class read off the factorisation engine: ``(i, z)`` or None."""
    facs = w0_factor(integrand_matrix(pt, datum), datum)
    if not facs:
        return None
    return sorted({(f[0], f[1]) for f in facs})


# -- the section f_s on SO_3 ---------------------------------------------------------

def so3_borel_factor(h, p: int):
    """``h = beta nbar`` with beta upper triangular and nbar in the lower
    unipotent part of I+ of SO_3; returns ``(beta, nbar)`` or None."""
    H = h.entries if isinstance(h, G.GroupElement) else h
    res = ul_decompose(G.transpose(H))
    if res is None:
        return None
    u, L = res
    nbar = G.transpose(u)
    if not all(_in_p(nbar[i][j], p) for i in range(3) for j in range(i)):
        return None
    return G.transpose(L), nbar


def section_m(h, p: int):
    """The torus coordinate m of ``h = diag(m,1,m^-1) u y``, or None.

    The lower unipotent factor of SO_3 is fixed by its bottom row, so only
    that row is eliminated: ``m = 1/h_33`` and h lies in ``B I+`` iff
    ``h_31/h_33`` and ``h_32/h_33`` lie in p.  ``so3_borel_factor`` is the
    full elimination; the tests check the two agree.
    """
    H = h.entries if isinstance(h, G.GroupElement) else h
    d = H[2][2]
    if d == 0 or not _in_p(H[2][0] / d, p) or not _in_p(H[2][1] / d, p):
        return None
    return 1 / d


def section_m_full(h, p: int):
    res = so3_borel_factor(h, p)
    return None if res is None else res[0][0][0]


def section_f(h, a, tau: MultChar, s0=None):
    """``|m|^s tau(a m)`` on ``B I+``, zero elsewhere.

    With ``s0=None`` the value is returned as ``(coefficient, v(m))`` meaning
    ``coefficient * q^(-v(m) s)``; otherwise as a complex number.
    """
    m = section_m(h, tau.p)
    if m is None:
        return (0, 0) if s0 is None else 0j
    v = val(m, tau.p)
    c = tau(Fraction(a) * m)
    if s0 is None:
        return c, v
    return c * tau.p ** (-v * complex(s0))


# -- second-coset chain objects ----------------------------------------------------------

def _embed_core(l: int, core) -> tuple:
    n = 2 * l
    M = [list(r) for r in G.identity(n)]
    for i in range(4):
        for j in range(4):
            M[l - 2 + i][l - 2 + j] = Fraction(core[i][j])
    return tuple(tuple(r) for r in M)


def chain_u(pt: BbarPoint, datum: SSCDatum) -> tuple:
    a, x, g = pt.a, pt.x, datum.gamma
    core = [[1, -4 * a / x, -a / (g * x), -4 * a * a / (g * x * x)],
            [0, 1, 0, a / (g * x)],
            [0, 0, 1, 4 * a / x],
            [0, 0, 0, 1]]
    return _embed_core(datum.l, core)


def chain_y(pt: BbarPoint, datum: SSCDatum) -> tuple:
    l, n = datum.l, 2 * datum.l
    a, x, g, w = pt.a, pt.x, datum.gamma, datum.varpi
    M = [list(r) for r in G.identity(n)]
    M[0] = [F0] * n
    M[0][0] = g / 4 * x * x / a / w
    M[0][l - 1] = g / 4 * x / a / w
    M[0][l] = x / a / w
    M[0][n - 1] = -1 / (a * w)
    M[l - 1][n - 1] = -4 / (g * x)
    M[l][n - 1] = -1 / x
    M[n - 1] = [F0] * n
    M[n - 1][n - 1] = 4 / g * a / (x * x) * w
    return tuple(tuple(r) for r in M)


def chain_v(pt: BbarPoint, datum: SSCDatum) -> tuple:
    """``v_{r,u} = r (w u^-1 w^-1) r^-1``."""
    l = datum.l
    w = G.w_l1(l)
    r = G.r_element(l, pt.r or (F0,) * (l - 2))
    u = chain_u(pt, datum)
    return G.mmul(r, w, G.inverse(u), G.inverse(w), G.inverse(r))


def chain_check(pt: BbarPoint, datum: SSCDatum) -> dict:
    """The matrix identities behind the value of W on the second coset."""
    l = datum.l
    w = G.w_l1(l)
    u = chain_u(pt, datum)
    b = G.embed_so3(b_matrix(pt, datum.gamma), l, datum.gamma)
    y = chain_y(pt, datum)
    io = G.inverse(G.iota_diag(l))
    lhs = G.mmul(datum.g_chi, w, u, b, G.inverse(w))
    v = chain_v(pt, datum)
    return {
        "u_in_U": all(u[i][i] == 1 and all(u[i][j] == 0 for j in range(i)) for i in range(2 * l))
                  and G.in_so(u),
        "factorization": lhs == G.mmul(io, y, io),
        "y_in_Iplus": G.in_so(y) and G.iwahori_class(y, datum.p) == "I+",
        "psi_v_trivial": G.psi_U_angle(v, l, datum.gamma, datum.psi) == 0,
        "v_in_U": G.in_so(v) and all(v[i][i] == 1 and all(v[i][j] == 0 for j in range(i))
                                     for i in range(2 * l)),
    }
