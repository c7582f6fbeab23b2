import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellaplace.errors import ArgumentDomainError, DivergenceError, KernelDomainError
from bellaplace.kernels import (KernelSpec, egf_eval, egf_eval_complex, hp_decay_probe,
                                kernel_derivative, kernel_eval, kernel_eval_complex,
                                kernel_truncation_gap, laguerre_exp, laguerre_exp_complex,
                                log_kernel)
from bellaplace.umbral import UmbralSequence

# mpmath, 40 digits; see oracles/generate.py
E1_AT_1 = 2.2795853023360672674
E1_AT_4 = 11.301921952136330496
INV_E12_AT_1 = 0.49996948426526740301


def test_laguerre_exponential_values():
    assert laguerre_exp(1, 1.0) == pytest.approx(E1_AT_1, rel=1e-14)
    assert laguerre_exp(1, 4.0) == pytest.approx(E1_AT_4, rel=1e-14)
    assert 1 / laguerre_exp(12, 1.0) == pytest.approx(INV_E12_AT_1, rel=1e-13)


# terms are summed as exp(log-term - scale); the log-terms carry an absolute
# rounding error proportional to their size, so relative accuracy degrades
# linearly in x
def _rel(x):
    return 2e-15 * (1 + x)


@given(st.floats(min_value=0, max_value=700))
def test_e0_is_exp(x):
    want = float(mp.exp(x))
    assert laguerre_exp(0, x) == pytest.approx(want, rel=_rel(x))


@given(st.floats(min_value=0, max_value=400))
def test_e1_is_bessel(x):
    want = float(mp.besseli(0, 2 * mp.sqrt(x)))
    assert laguerre_exp(1, x) == pytest.approx(want, rel=_rel(x))


def test_kernel_underflows_gracefully():
    spec = KernelSpec.laguerre(0)
    assert kernel_eval(spec, 1.0, 800.0) == 0.0
    assert log_kernel(spec, 1.0, 800.0) == pytest.approx(-800.0, rel=1e-14)


def test_overflowing_denominator_raises():
    with pytest.raises(DivergenceError):
        egf_eval(UmbralSequence.ones(), 800.0)


def test_factorial_denominator_diverges():
    # geometric series 1/(1 - x) beyond its radius
    spec = KernelSpec.reciprocal_egf(UmbralSequence.factorial())
    with pytest.raises((DivergenceError, KernelDomainError)):
        kernel_eval(spec, 1.0, 2.0)
    assert kernel_eval(spec, 1.0, 0.5) == pytest.approx(0.5, rel=1e-12)


def test_truncated_examples():
    geo = KernelSpec.truncated_geometric(2)
    # factorial sequence cut at n = 2: 1 + x + x^2
    assert kernel_eval(geo, 1.0, 1.0) == pytest.approx(1 / 3, rel=1e-14)
    tl = KernelSpec.truncated_laguerre(1, 2)
    assert kernel_eval(tl, 1.0, 2.0) == pytest.approx(1 / 4.0, rel=1e-14)
    assert tl.is_polynomial and not KernelSpec.laguerre(1).is_polynomial


def test_complex_evaluation_agrees():
    for z in (0.3 + 0.4j, -2.0 + 5.0j, 10.0 - 3.0j):
        want = complex(mp.besseli(0, 2 * mp.sqrt(z)))
        assert laguerre_exp_complex(1, z) == pytest.approx(want, rel=1e-12)
        assert egf_eval_complex(UmbralSequence.ones(), z) == pytest.approx(np.exp(z), rel=1e-12)
    spec = KernelSpec.laguerre(0)
    assert kernel_eval_complex(spec, 1 + 2j) == pytest.approx(np.exp(-(1 + 2j)), rel=1e-13)


def test_derivative_kernel():
    # d/dx [x / (e^x - 1)] at x = 1, closed form
    spec = KernelSpec.reciprocal_egf(UmbralSequence.inv_succ())
    e = math.e
    want = 1 / (e - 1) - e / (e - 1) ** 2
    assert kernel_derivative(spec, 1.0) == pytest.approx(want, rel=1e-13)
    assert kernel_derivative(KernelSpec.laguerre(0), 2.0) == pytest.approx(-math.exp(-2), rel=1e-14)


@pytest.mark.parametrize("r,n,x", [(0, 3, 2.0), (1, 2, 5.0), (0, 10, 0.5), (1, 6, 30.0)])
def test_truncation_gap_matches_difference(r, n, x):
    mp.mp.dps = 30
    P = mp.fsum(mp.mpf(x) ** k / mp.factorial(k) ** (r + 1) for k in range(n + 1))
    E = mp.exp(x) if r == 0 else mp.besseli(0, 2 * mp.sqrt(x))
    want = float(1 / P - 1 / E)
    assert kernel_truncation_gap(KernelSpec.laguerre(r), n, x) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("spec,verdict", [
    (KernelSpec.laguerre(0), "exponential-decay"),
    (KernelSpec.reciprocal_egf(UmbralSequence.inv_succ()), "exponential-decay"),
    (KernelSpec.reciprocal_egf(UmbralSequence.shifted_harmonic()), "exponential-decay"),
    (KernelSpec.laguerre(1), "sub-exponential"),
    (KernelSpec.laguerre(2), "sub-exponential"),
    (KernelSpec.truncated_laguerre(0, 5), "sub-exponential"),
    (KernelSpec.truncated_geometric(3), "sub-exponential"),
    (KernelSpec.reciprocal_egf(UmbralSequence.factorial()), "divergent-denominator"),
])
def test_decay_probe_verdicts(spec, verdict):
    report = hp_decay_probe(spec, 1.0, 200.0)
    assert report.verdict == verdict
    assert report.to_dict()["verdict"] == verdict


def test_decay_probe_fits_the_rate():
    report = hp_decay_probe(KernelSpec.laguerre(0), 2.0, 100.0)
    assert report.fitted_rate == pytest.approx(-2.0, rel=1e-9)


def test_spec_validation_and_equality():
    with pytest.raises(ArgumentDomainError):
        KernelSpec.laguerre(-1)
    with pytest.raises(ArgumentDomainError):
        KernelSpec.truncated_laguerre(0, 0)
    assert KernelSpec.laguerre(1) == KernelSpec.laguerre(1)
    assert (KernelSpec.reciprocal_egf(UmbralSequence.ones())
            != KernelSpec.reciprocal_egf(UmbralSequence.inv_succ()))


def test_negative_arguments_rejected():
    with pytest.raises(ArgumentDomainError):
        kernel_eval(KernelSpec.laguerre(0), 1.0, -1.0)
    with pytest.raises(ArgumentDomainError):
        kernel_eval(KernelSpec.laguerre(0), 0.0, 1.0)
    with pytest.raises(ArgumentDomainError):
        egf_eval(UmbralSequence.ones(), -0.5)
