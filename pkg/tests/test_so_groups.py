import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from ssc_gamma import so_groups as G
from ssc_gamma.characters import AddChar


def _data(l, p, alpha):
    return G.AffineGenericData.normal_form(l, alpha, p, AddChar(p))


@pytest.mark.parametrize("l", [2, 3, 4])
def test_basic_membership(l):
    n = 2 * l
    assert G.in_so(G.identity(n))
    assert G.in_so(G.make_g_chi(l, 2, 3))
    assert G.in_so(G.w_l1(l))
    assert G.in_so(G.r_element(l, [Fr(k + 1, 3) for k in range(l - 2)]))
    assert G.in_so(G.iota_diag(l))
    assert not G.in_so(G.diag(*([2] + [1] * (n - 1))))


def test_iwahori_classes():
    p = 3
    assert G.iwahori_class(G.identity(6), p) == "I+"
    assert G.iwahori_class(G.torus(2, 1, 1), p) == "I"
    assert G.iwahori_class(G.make_g_chi(3, 2, 3), p) == "outside K"
    assert G.iwahori_class(G.w_l1(3), p) == "K only"


@pytest.mark.parametrize("l", [2, 3, 4])
def test_g_chi_is_an_involution(l):
    g = G.make_g_chi(l, Fr(2), 3)
    assert G.mul(g, g) == G.identity(2 * l)


@pytest.mark.parametrize("l,p,alpha", [(3, 3, 2), (3, 5, 3), (4, 3, 1), (3, 2, 1)])
def test_chi_stable_under_g_chi(l, p, alpha):
    rng = random.Random(l * 100 + p)
    data = _data(l, p, alpha)
    g = G.make_g_chi(l, alpha, p)
    for _ in range(100):
        h = G.random_iplus(l, p, rng)
        assert G.iwahori_class(h, p) == "I+"
        c = G.mmul(g, h, g)
        assert G.iwahori_class(c, p) == "I+"
        assert G.chi_angle(c, data) == G.chi_angle(h, data)


def test_chi_not_stable_for_rank_two():
    # the rank-two character misses one simple affine root
    l, p, alpha = 2, 3, Fr(2)
    data = _data(l, p, alpha)
    g = G.make_g_chi(l, alpha, p)
    x = G.root_element(4, 0, 1, 1)
    c = G.mmul(g, x, g)
    assert G.iwahori_class(c, p) == "I+"
    assert G.chi_angle(c, data) == 0
    assert G.psi_alpha_angle(x, l, alpha, AddChar(p)) == Fr(1, 3)


@pytest.mark.parametrize("l,p", [(2, 3), (3, 3), (3, 5), (4, 2)])
def test_chi_is_a_homomorphism(l, p):
    rng = random.Random(7 + l + p)
    data = _data(l, p, 1)
    for _ in range(100):
        a, b = G.random_iplus(l, p, rng), G.random_iplus(l, p, rng)
        assert G.chi_angle(G.mul(a, b), data) == (G.chi_angle(a, data) + G.chi_angle(b, data)) % 1


@pytest.mark.parametrize("l", [2, 3])
def test_embedding_and_gl2_map_are_homomorphisms(l):
    p, gamma = 3, Fr(-8)
    rng = random.Random(11)
    for _ in range(100):
        x, y = G.random_gl2(p, rng), G.random_gl2(p, rng)
        ix, iy = G.iota_gl2(x, gamma), G.iota_gl2(y, gamma)
        assert G.in_so(ix, G.so3_form(gamma))
        assert G.iota_gl2(G.mul(x, y), gamma) == G.mul(ix, iy)
        ex, ey = G.embed_so3(ix, l, gamma), G.embed_so3(iy, l, gamma)
        assert G.in_so(ex)
        assert G.embed_so3(G.mul(ix, iy), l, gamma) == G.mul(ex, ey)


def test_gl2_map_kills_the_centre_and_fixes_w1():
    gamma = Fr(-8)
    assert G.iota_gl2(((5, 0), (0, 5)), gamma) == G.identity(3)
    assert G.iota_gl2(((0, 4 / gamma), (1, 0)), gamma) == G.w1()


def test_lower_borel_image():
    gamma = Fr(-8)
    a, x = Fr(3), Fr(1, 3)
    b = G.so3_lower(a, x, gamma)
    assert G.in_so(b, G.so3_form(gamma))
    assert b == G.mat([[a, 0, 0], [x, 1, 0], [-gamma / 4 * x * x / a, -gamma / 2 * x / a, 1 / a]])


@given(st.lists(st.fractions(max_denominator=50), min_size=2, max_size=2),
       st.lists(st.fractions(max_denominator=50), min_size=2, max_size=2))
def test_r_elements_add(r, s):
    l = 4
    a, b = G.r_element(l, r), G.r_element(l, s)
    assert G.mul(a, b) == G.r_element(l, [x + y for x, y in zip(r, s)])


@pytest.mark.parametrize("l", [2, 3, 4])
def test_iota_twists_psi_alpha_into_psi(l):
    p, alpha = 3, Fr(2)
    gamma = -4 * alpha
    psi = AddChar(p)
    rng = random.Random(l)
    for _ in range(50):
        u = G.random_unipotent(l, p, rng)
        assert G.psi_alpha_angle(G.iota_conj(u, l), l, alpha, psi) == G.psi_U_angle(u, l, gamma, psi)


@pytest.mark.parametrize("l", [2, 3])
def test_random_iplus_generators(l):
    rng = random.Random(3)
    for _ in range(20):
        assert G.iwahori_class(G.random_iplus(l, 5, rng), 5) == "I+"
        assert G.iwahori_class(G.random_iplus(l, 5, rng, iwahori=True), 5) in ("I", "I+")
