import time
from fractions import Fraction

import pytest
from oracles import primes_up_to

from igusa_cm import classpoly as cp
from igusa_cm import denomcheck as dc


def brute(q, d):
    for x in range(0, d + 1):
        if x * x > d:
            break
        if (d - x * x) % q == 0:
            return True, x
    return False, None


def test_examples():
    assert dc.property1_holds(3, 13) == (True, 1)
    assert dc.property1_holds(11, 13) == (False, None)
    assert dc.property1_holds(13, 13) == (True, 0)
    with pytest.raises(ValueError):
        dc.property1_holds(1, 5)
    with pytest.raises(ValueError):
        dc.property1_holds(3, 0)


def test_oracle_equivalence():
    t = time.perf_counter()
    for q in primes_up_to(50):
        for d in range(1, 201):
            assert dc.property1_holds(q, d) == brute(q, d)
    assert time.perf_counter() - t < 5


def test_planted_primes():
    r = dc.check_prime(7, 16, 16, ["disc h1"])
    assert r.property1_d and r.witness_d == 3 and r.ok
    r = dc.check_prime(23, 16, 16, ["disc h1"])
    assert r.property1_d and r.witness_d == 4
    assert not r.bounded_by_d and not r.ok


def _cps(*polys):
    return cp.ClassPolynomialSet(*polys, precision_used=300, stable=True)


def test_empty_denominators_are_vacuous():
    h = (Fraction(1), Fraction(0))
    cps = _cps(h, h, h)
    rep = dc.denominator_report("(5,5)", 125, 5, cps, cp.discriminant_data(cps))
    assert rep.verdict_discriminant and rep.verdict_coefficient
    assert not rep.counterexamples
    assert any("no denominator primes" in n for n in rep.notes)
    assert dc.INTERPRETATION in rep.notes


def test_report_sections_and_counterexample():
    # disc(x^2 - x/4 - 1/8) = 9/16 -> q = 2; coefficients 1/4, 1/8 -> q = 2; x + 1/23 -> q = 23
    h1 = (Fraction(1), Fraction(-1, 4), Fraction(-1, 8))
    h2 = (Fraction(1), Fraction(1, 23), Fraction(0))
    h3 = (Fraction(1), Fraction(0), Fraction(0))
    cps = _cps(h1, h2, h3)
    dd = cp.discriminant_data(cps)
    rep = dc.denominator_report("planted", 16, 16, cps, dd)
    assert [r.q for r in rep.discriminant_primes] == [2, 23]
    assert rep.discriminant_primes[0].sources == ("disc h1^4",)
    assert [r.q for r in rep.coefficient_primes] == [2, 23]
    assert not rep.verdict_discriminant
    assert {r.q for r in rep.counterexamples} == {23}
    assert dc.denominator_report("planted", 16, 16, cps, dd, coefficients=False).coefficient_primes == ()


def test_witnesses_are_valid():
    for q in primes_up_to(200):
        for d in (5, 44, 125, 2048, 990288):
            ok, x = dc.property1_holds(q, d)
            if ok:
                assert x * x <= d and (d - x * x) % q == 0
    with pytest.raises(AssertionError):
        dc._verify_witness(7, 16, 2)


def test_report_is_pure():
    h = (Fraction(1), Fraction(-1, 4), Fraction(-1, 8))
    cps = _cps(h, h, h)
    dd = cp.discriminant_data(cps)
    assert dc.denominator_report("x", 48, 48, cps, dd) == dc.denominator_report("x", 48, 48, cps, dd)
