"""Split SO_2l, the SO_3 of J_{3,gamma}, GL_2 -> SO_3, Iwahori data.

Matrices are tuples of tuples of ``Fraction``; all membership questions are
decided exactly.  Indices are 0-based in code (the usual 1-based labels are
given in comments where they help).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import random

from .padic_core import val
from .characters import AddChar
from .cyclo import AlgNum

F0, F1 = Fraction(0), Fraction(1)


# -- plain matrix helpers ----------------------------------------------------

def mat(rows) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> tuple:
    return tuple(tuple(F1 if i == j else F0 for j in range(n)) for i in range(n))


def diag(*d) -> tuple:
    n = len(d)
    return tuple(tuple(Fraction(d[i]) if i == j else F0 for j in range(n)) for i in range(n))


def mul(A, B) -> tuple:
    n, m, k = len(A), len(B[0]), len(B)
    return tuple(tuple(sum((A[i][t] * B[t][j] for t in range(k) if A[i][t] and B[t][j]), F0)
                       for j in range(m)) for i in range(n))


def mmul(*Ms) -> tuple:
    out = Ms[0]
    for M in Ms[1:]:
        out = mul(out, M)
    return out


def transpose(A) -> tuple:
    return tuple(zip(*A))


def det(A) -> Fraction:
    M = [list(r) for r in A]
    n = len(M)
    d = F1
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return F0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return d


def inverse(A) -> tuple:
    n = len(A)
    M = [list(A[i]) + [F1 if i == j else F0 for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return tuple(tuple(row[n:]) for row in M)


def antidiag(n: int) -> tuple:
    return tuple(tuple(F1 if i + j == n - 1 else F0 for j in range(n)) for i in range(n))


def elementary(n: int, i: int, j: int, c) -> tuple:
    M = [list(r) for r in identity(n)]
    M[i][j] += Fraction(c)
    return tuple(tuple(r) for r in M)


# -- forms and group elements -----------------------------------------------

@dataclass(frozen=True)
class FormDescriptor:
    """``kind`` is ``"J"`` (antidiagonal J_r) or ``"Jgamma"`` (J_{2n+1,gamma})."""

    size: int
    kind: str = "J"
    gamma: Fraction | None = None

    def gram(self) -> tuple:
        G = [list(r) for r in antidiag(self.size)]
        if self.kind == "Jgamma":
            m = self.size // 2
            G[m][m] = Fraction(self.gamma) / 2
        return tuple(tuple(r) for r in G)


def so_form(n: int) -> FormDescriptor:
    return FormDescriptor(n, "J")


def so3_form(gamma) -> FormDescriptor:
    return FormDescriptor(3, "Jgamma", Fraction(gamma))


@dataclass(frozen=True)
class GroupElement:
    entries: tuple
    form: FormDescriptor | None = None

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(mul(self.entries, other.entries), self.form)

    def inv(self) -> "GroupElement":
        return GroupElement(inverse(self.entries), self.form)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def n(self) -> int:
        return len(self.entries)

    def to_json(self, p: int) -> list:
        """Rows of ``[valuation, unit residue mod p^8]`` pairs (``null`` for 0)."""
        from .padic_core import unit_residue
        out = []
        for row in self.entries:
            out.append([None if x == 0 else [val(x, p), unit_residue(x, p, 8)] for x in row])
        return out


def in_so(g, form: FormDescriptor | None = None) -> bool:
    """``t(g) G g = G`` and ``det g = 1`` for the Gram matrix G of the form."""
    M = g.entries if isinstance(g, GroupElement) else g
    form = form or (g.form if isinstance(g, GroupElement) and g.form else so_form(len(M)))
    G = form.gram()
    if len(M) != form.size:
        raise ValueError("matrix size does not match form")
    return mmul(transpose(M), G, M) == G and det(M) == 1


# -- Iwahori classes ---------------------------------------------------------

def _integral(x, p: int) -> bool:
    return x == 0 or val(x, p) >= 0


def _in_p(x, p: int) -> bool:
    return x == 0 or val(x, p) >= 1


def iwahori_class(g, p: int) -> str:
    """One of ``"outside K"``, ``"K only"``, ``"I"``, ``"I+"``."""
    M = g.entries if isinstance(g, GroupElement) else g
    n = len(M)
    if not all(_integral(x, p) for row in M for x in row):
        return "outside K"
    if not all(_in_p(M[i][j], p) for i in range(n) for j in range(i)):
        return "K only"
    if all(_in_p(M[i][i] - 1, p) for i in range(n)):
        return "I+"
    return "I"


# -- SO_2l data ----------------------------------------------------------------

def mirror(n: int, i: int) -> int:
    return n - 1 - i


def root_element(n: int, i: int, j: int, c) -> tuple:
    """One-parameter root subgroup ``I + c(E_ij - E_j'i')`` of SO_n (n even, j != i')."""
    if i == j or j == mirror(n, i):
        raise ValueError("not a root of SO_2l")
    M = [list(r) for r in identity(n)]
    M[i][j] += Fraction(c)
    M[mirror(n, j)][mirror(n, i)] -= Fraction(c)
    return tuple(tuple(r) for r in M)


def torus(*t) -> tuple:
    """``diag(t_1..t_l, t_l^-1..t_1^-1)``."""
    t = [Fraction(x) for x in t]
    return diag(*t, *[1 / x for x in reversed(t)])


@dataclass(frozen=True)
class AffineGenericData:
    """Coefficients ``(a_1..a_{l+1})`` of an affine generic character."""

    l: int
    coeffs: tuple
    varpi: Fraction
    psi: AddChar

    @classmethod
    def normal_form(cls, l: int, alpha, varpi, psi: AddChar) -> "AffineGenericData":
        return cls(l, tuple([F1] * (l - 1) + [Fraction(alpha), F1]), Fraction(varpi), psi)


def chi_angle(h, data: AffineGenericData) -> Fraction:
    """Angle of ``chi(h)``.

    1-based: ``psi(a_1 h_12 + ... + a_{l-1} h_{l-1,l} + a_l h_{l-1,l+1} + a_{l+1} h_{2l-1,1}/varpi)``.
    """
    M = h.entries if isinstance(h, GroupElement) else h
    l, a = data.l, data.coeffs
    arg = sum((a[i] * M[i][i + 1] for i in range(l - 1)), F0)
    arg += a[l - 1] * M[l - 2][l]
    arg += a[l] * M[2 * l - 2][0] / data.varpi
    return data.psi.angle(arg)


def affine_generic_char(h, data: AffineGenericData) -> AlgNum:
    if iwahori_class(h, data.psi.p) != "I+":
        raise ValueError("affine generic character evaluated outside I+")
    return AlgNum.root(data.psi.p, chi_angle(h, data))


def make_g_chi(l: int, alpha, varpi) -> tuple:
    n = 2 * l
    alpha, varpi = Fraction(alpha), Fraction(varpi)
    M = [[F0] * n for _ in range(n)]
    M[0][n - 1] = -1 / varpi
    M[n - 1][0] = -varpi
    for i in range(1, l - 1):
        M[i][i] = F1
        M[mirror(n, i)][mirror(n, i)] = F1
    M[l - 1][l] = 1 / alpha
    M[l][l - 1] = alpha
    return tuple(tuple(r) for r in M)


def central(l: int, sign: int) -> tuple:
    return diag(*([sign] * (2 * l)))


def iota_diag(l: int) -> tuple:
    """``diag(I_{l-1}, 1/4, 4, I_{l-1})``."""
    return diag(*([1] * (l - 1) + [Fraction(1, 4), 4] + [1] * (l - 1)))


def iota_conj(g, l: int) -> tuple:
    """``iota^-1 g iota``."""
    d = iota_diag(l)
    M = g.entries if isinstance(g, GroupElement) else g
    n = len(M)
    return tuple(tuple(M[i][j] * d[j][j] / d[i][i] for j in range(n)) for i in range(n))


def w_l1(l: int) -> tuple:
    """The permutation matrix ``w^{l,1}`` (identity for l = 2)."""
    n = 2 * l
    M = [[F0] * n for _ in range(n)]
    M[0][l - 2] = F1
    for i in range(1, l - 1):
        M[i][i - 1] = F1
    M[l - 1][l - 1] = M[l][l] = F1
    for i in range(l + 1, n - 1):
        M[i][i + 1] = F1
    M[n - 1][l + 1] = F1
    return tuple(tuple(r) for r in M)


def r_element(l: int, r) -> tuple:
    """Element of R^{l,1} with column vector ``r`` in F^{l-2}."""
    n = 2 * l
    M = [list(row) for row in identity(n)]
    for k, c in enumerate(r):
        c = Fraction(c)
        M[1 + k][0] = c
        M[n - 1][mirror(n, 1 + k)] = -c
    return tuple(tuple(row) for row in M)


def w1() -> tuple:
    return mat([[0, 0, 1], [0, -1, 0], [1, 0, 0]])


def psi_U_angle(u, l: int, gamma, psi: AddChar) -> Fraction:
    """Character of U_SO2l used by the integral (1-based):
    ``psi(sum_{i<=l-2} u_{i,i+1} + u_{l-1,l}/4 - gamma u_{l-1,l+1})``."""
    M = u.entries if isinstance(u, GroupElement) else u
    arg = sum((M[i][i + 1] for i in range(l - 2)), F0)
    arg += M[l - 2][l - 1] / 4 - Fraction(gamma) * M[l - 2][l]
    return psi.angle(arg)


def psi_alpha_angle(u, l: int, alpha, psi: AddChar) -> Fraction:
    """``psi(sum_{i<=l-2} u_{i,i+1} + u_{l-1,l} + alpha u_{l-1,l+1})`` (1-based)."""
    M = u.entries if isinstance(u, GroupElement) else u
    arg = sum((M[i][i + 1] for i in range(l - 2)), F0)
    arg += M[l - 2][l - 1] + Fraction(alpha) * M[l - 2][l]
    return psi.angle(arg)


# -- SO_3 and its maps ---------------------------------------------------------

_L4 = None


def embed_so3(x, l: int, gamma) -> tuple:
    """Image of ``x`` in SO_3(J_{3,gamma}) inside SO_2l."""
    X = x.entries if isinstance(x, GroupElement) else x
    g = Fraction(gamma)
    L = mat([[1, 0, 0, 0], [0, Fraction(1, 4), Fraction(1, 4), 0], [0, -g, g, 0], [0, 0, 0, 1]])
    R = mat([[1, 0, 0, 0], [0, 2, -1 / (2 * g), 0], [0, 2, 1 / (2 * g), 0], [0, 0, 0, 1]])
    X4 = mat([[X[0][0], 0, X[0][1], X[0][2]], [0, 1, 0, 0],
              [X[1][0], 0, X[1][1], X[1][2]], [X[2][0], 0, X[2][1], X[2][2]]])
    core = mmul(L, X4, R)
    n, off = 2 * l, l - 2
    M = [list(r) for r in identity(n)]
    for i in range(4):
        for j in range(4):
            M[off + i][off + j] = core[i][j]
    return tuple(tuple(r) for r in M)


def so3_lower(a, x, gamma) -> tuple:
    """``diag(a,1,a^-1)`` times the lower unipotent with parameter x."""
    a, x, g = Fraction(a), Fraction(x), Fraction(gamma)
    return mmul(diag(a, 1, 1 / a), mat([[1, 0, 0], [x, 1, 0], [-g / 4 * x * x, -g / 2 * x, 1]]))


def so3_upper(v, gamma) -> tuple:
    """Upper unipotent of SO_3(J_{3,gamma}) with (1,2)-entry v."""
    v, g = Fraction(v), Fraction(gamma)
    return mat([[1, v, -v * v / g], [0, 1, -2 * v / g], [0, 0, 1]])


def iota_gl2(g, gamma) -> tuple:
    """The isomorphism PGL_2 -> SO_3(J_{3,gamma}).

    Fixed on diagonal, lower unipotent and ``antidiag(4/gamma, 1)`` elements;
    a general g is reduced to these by a Bruhat-type factorisation.
    """
    G = g.entries if isinstance(g, GroupElement) else g
    (a, b), (c, d) = [[Fraction(x) for x in row] for row in G]
    gm = Fraction(gamma)
    k = 4 / gm
    D = a * d - b * c
    if D == 0:
        raise ZeroDivisionError("singular GL_2 element")

    def i_diag(x, y):
        return diag(y / x, 1, x / y)

    def i_lower(u):
        return mat([[1, 2 * u, -k * u * u], [0, 1, -k * u], [0, 0, 1]])

    W = w1()

    def i_upper(t):
        # [[1,t],[0,1]] = W L(t/k) W^-1
        return mmul(W, i_lower(t / k), W)

    if a != 0:
        return mmul(i_lower(c / a), i_diag(a, D / a), i_upper(b / a))
    # g = Wg * (Wg^-1 g), Wg^-1 g has nonzero top-left entry c
    return mul(W, iota_gl2(((c, d), (a / k, b / k)), gamma))


def gl2_det(g) -> Fraction:
    (a, b), (c, d) = g
    return Fraction(a) * d - Fraction(b) * c


# -- random samplers -----------------------------------------------------------

def _rand_frac(rng: random.Random, p: int, vmin: int, span: int = 3) -> Fraction:
    """Random rational with valuation >= vmin (unit denominators allowed)."""
    num = rng.randrange(-p ** span, p ** span + 1)
    den = rng.choice([1, 1, 1, 2, 3, 5, 7])
    while den % p == 0:
        den += 1
    return Fraction(num, den) * Fraction(p) ** vmin


def _rand_unit(rng: random.Random, p: int) -> Fraction:
    while True:
        x = _rand_frac(rng, p, 0)
        if x != 0 and val(x, p) == 0:
            return x


def positive_roots(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n) if j != mirror(n, i) and i < mirror(n, j)]


def random_iplus(l: int, p: int, rng: random.Random, factors: int = 6, iwahori: bool = False) -> tuple:
    """Random element of I+ (or I) as a product of generators."""
    n = 2 * l
    t = [(_rand_unit(rng, p) if iwahori else 1 + _rand_frac(rng, p, 1)) for _ in range(l)]
    while any(x == 0 for x in t):
        t = [1 + _rand_frac(rng, p, 1) for _ in range(l)]
    M = torus(*t)
    roots = positive_roots(n)
    for _ in range(factors):
        i, j = rng.choice(roots)
        M = mul(M, root_element(n, i, j, _rand_frac(rng, p, 0)))
        i, j = rng.choice(roots)
        M = mul(M, root_element(n, j, i, _rand_frac(rng, p, 1)))
    return M


def random_unipotent(l: int, p: int, rng: random.Random, vmin: int = -2, factors: int = 6) -> tuple:
    n = 2 * l
    M = identity(n)
    for i, j in rng.sample(positive_roots(n), min(factors, len(positive_roots(n)))):
        M = mul(M, root_element(n, i, j, _rand_frac(rng, p, vmin)))
    return M


def random_so3(gamma, p: int, rng: random.Random) -> tuple:
    """Random SO_3 element via iota_gl2 of a random GL_2 matrix."""
    while True:
        g = tuple(tuple(_rand_frac(rng, p, rng.randrange(-2, 2)) for _ in range(2)) for _ in range(2))
        if gl2_det(g) != 0:
            return iota_gl2(g, gamma)


def random_gl2(p: int, rng: random.Random) -> tuple:
    while True:
        g = tuple(tuple(_rand_frac(rng, p, rng.randrange(-2, 2)) for _ in range(2)) for _ in range(2))
        if gl2_det(g) != 0:
            return g


def r_sampler(l: int, p: int, m: int, N: int):
    """All ``r`` with coordinates in coset representatives of p^m / p^N."""
    import itertools
    reps = [Fraction(k) * Fraction(p) ** m for k in range(p ** max(N - m, 0))]
    for r in itertools.product(reps, repeat=l - 2):
        yield r


def aux_elements(l: int, gamma, varpi) -> dict:
    return {"w_l1": w_l1(l), "iota": iota_diag(l), "w1": w1(),
            "r": lambda r: r_element(l, r), "r_sampler": lambda p, m, N: r_sampler(l, p, m, N)}
