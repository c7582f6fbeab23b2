import threading
from fractions import Fraction
from math import factorial

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from bellaplace.errors import ArgumentDomainError
from bellaplace.umbral import (UmbralSequence, blissard_reciprocal, coeff_C,
                               egf_reciprocal_oracle, parse_sequence_spec)

coeff = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def bernoulli(n):
    # sympy >= 1.12 uses B_1 = +1/2; the reciprocal of (e^x - 1)/x has -1/2
    value = sp.bernoulli(n)
    return Fraction(-1, 2) if n == 1 else Fraction(int(value.p), int(value.q))


def test_ones_alternates():
    assert blissard_reciprocal(UmbralSequence.ones(), 20) == [(-1) ** n for n in range(21)]


def test_bernoulli_from_inv_succ():
    b = blissard_reciprocal(UmbralSequence.inv_succ(), 12)
    assert b == [bernoulli(n) for n in range(13)]
    assert b == egf_reciprocal_oracle(UmbralSequence.inv_succ(), 12)
    assert b[1:9] == [Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30), 0,
                      Fraction(1, 42), 0, Fraction(-1, 30)]


def test_factorial_sequence():
    # 1 / (1/(1 - x)) = 1 - x
    assert blissard_reciprocal(UmbralSequence.factorial(), 6) == [1, -1, 0, 0, 0, 0, 0]


def test_laguerre_reciprocal_second_term():
    # b_2 = -a_2 + 2 a_1^2
    for m in (1, 2, 3):
        b = blissard_reciprocal(UmbralSequence.laguerre(m), 2)
        assert b[2] == -Fraction(1, 2 ** m) + 2


@given(st.lists(coeff, min_size=1, max_size=12))
def test_blissard_matches_long_division(tail):
    a = [Fraction(1), *tail]
    N = len(tail)
    assert blissard_reciprocal(a, N) == egf_reciprocal_oracle(a, N)


def test_coeff_c_ones_and_stirling():
    assert coeff_C(UmbralSequence.ones(), 15) == [(-1) ** k for k in range(16)]


@given(st.lists(coeff, min_size=1, max_size=10))
def test_coeff_c_equals_reciprocal(tail):
    # both are EGF coefficients of 1 / E_a
    a = [Fraction(1), *tail]
    assert coeff_C(a, len(tail)) == blissard_reciprocal(a, len(tail))


def test_scaled_and_truncated():
    a = UmbralSequence.inv_succ()
    x = a.scaled(Fraction(1, 2))
    assert x.prefix(3) == [1, Fraction(1, 4), Fraction(1, 12), Fraction(1, 32)]
    t = a.truncated(2)
    assert t.is_finite and t.degree == 2 and t[3] == 0 and t[2] == Fraction(1, 3)


def test_shifted_harmonic():
    h = UmbralSequence.shifted_harmonic()
    assert h.prefix(3) == [1, Fraction(3, 2), Fraction(11, 6), Fraction(25, 12)]


def test_log_coefficients():
    a = UmbralSequence.laguerre(2)
    sign, log_c = a.log_egf_coeff(200)
    assert sign == 1
    assert log_c == pytest.approx(-3 * float(sp.log(sp.factorial(200)).evalf(30)), rel=1e-14)
    assert UmbralSequence.explicit([1, 0, -2]).log_egf_coeff(1)[0] == 0


def test_concurrent_extension():
    seq = UmbralSequence(rule=lambda k: Fraction(1, factorial(k)), label="x")
    out = []

    def worker():
        out.append(seq.prefix(300))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(o == out[0] for o in out)
    assert out[0][250] == Fraction(1, factorial(250))


@pytest.mark.parametrize("text,prefix", [
    ("ones", [1, 1, 1]),
    ("laguerre:1", [1, 1, Fraction(1, 2)]),
    ("factorial", [1, 1, 2]),
    ("inv-succ", [1, Fraction(1, 2), Fraction(1, 3)]),
    ("1,1/2,0", [1, Fraction(1, 2), 0]),
    ("1, -3/4", [1, Fraction(-3, 4), 0]),
])
def test_parse_sequence_spec(text, prefix):
    assert parse_sequence_spec(text).prefix(2) == prefix


@pytest.mark.parametrize("text", ["2,1", "1,0.5", "laguerre:x", "1,,2", "1,1e3", "1,1/0"])
def test_parse_sequence_spec_rejects(text):
    with pytest.raises(ArgumentDomainError):
        parse_sequence_spec(text)


def test_bad_order():
    with pytest.raises(ArgumentDomainError):
        blissard_reciprocal(UmbralSequence.ones(), -1)
