import json
from fractions import Fraction

from ssc_gamma.characters import MultChar, quadratic_tame_chars
from ssc_gamma.qsymb import RatFunc, T, is_monomial, leading_value, order_at
from ssc_gamma.parameter import delta, gamma_pi_prime, pole_summands, report
from ssc_gamma.rs_integral import gamma_closed
from ssc_gamma.whittaker import SSCDatum


def grid(primes=(2, 3, 5, 7), ranks=(2, 3, 4)):
    for p in primes:
        for l in ranks:
            for eps in (1, -1):
                for omega in ((1,) if p == 2 else (1, -1)):
                    for alpha in ((1,) if p == 2 else range(1, p)):
                        yield SSCDatum(l, p, alpha=alpha, eps=eps, omega=omega)


def test_summands_odd_p_examples():
    d = SSCDatum(3, 5, alpha=1, eps=1)
    t1, t2 = pole_summands(d)
    assert t1.is_trivial
    assert t2.tame and t2.unram_sign() == t2.sign(d.gamma)
    d = SSCDatum(3, 5, alpha=1, eps=-1)
    assert pole_summands(d)[0].unram_sign() == -1


def test_summands_p2_unique():
    for eps in (1, -1):
        s = pole_summands(SSCDatum(3, 2, eps=eps))
        assert len(s) == 1 and not s[0].tame and s[0].unram_sign() == eps


def test_summand_pole_property():
    for d in grid(primes=(2, 3, 5)):
        chosen = pole_summands(d)
        for tau in quadratic_tame_chars(d.p):
            f = gamma_closed(d, tau)
            if tau in chosen:
                assert order_at(f, 1) == -1
            else:
                assert order_at(f, 1) == 0 and leading_value(f, 1)


def test_complement_is_monomial_everywhere():
    for d in grid():
        g = gamma_pi_prime(d)
        assert is_monomial(g)
        assert delta(d)["matches"]


def test_delta_examples():
    assert complex(delta(SSCDatum(3, 2))["value"]) == 1
    assert complex(delta(SSCDatum(3, 2, eps=-1))["value"]) == -1
    assert complex(delta(SSCDatum(3, 3))["value"]) == -1j
    a = complex(delta(SSCDatum(3, 5, omega=1))["value"])
    b = complex(delta(SSCDatum(3, 5, omega=-1))["value"])
    assert a == -b


def test_gamma_pi_prime_shape():
    d = SSCDatum(3, 3, eps=-1)
    dl = delta(d)["value"]
    assert gamma_pi_prime(d) == RatFunc.const(dl) * RatFunc(T, 0, Fraction(1, 2))


def test_report_fields():
    r = report(SSCDatum(3, 5, alpha=2))
    js = json.loads(json.dumps(r.to_json()))
    assert js["schema"] == "v1"
    assert js["complement_dim"] == 4 and len(js["summands"]) == 2
    assert js["alpha_class"] == "nonsquare"
    assert js["uniformizer"] is None and js["caveats"]
    assert "level one" in js["delta"]["psi_convention"]
    r2 = report(SSCDatum(4, 2))
    assert r2.complement_dim == 7 and len(r2.summands) == 1
    assert r2.central_char == {"unram_value": 1, "tame": "trivial"}


def test_det_condition():
    for d in grid(primes=(3, 5), ranks=(3,)):
        r = report(d)
        prod = MultChar(d.p)
        for t in r.summands:
            prod = prod * t
        cc = r.central_char
        comp = MultChar.quadratic(d.p, cc["unram_value"], cc["tame"] == "legendre")
        assert (prod * comp).is_trivial
