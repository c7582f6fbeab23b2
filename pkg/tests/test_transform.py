import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellaplace.errors import (ArgumentDomainError, ContourDivergenceError, DivergenceError,
                               NonIntegrableError, ToleranceError)
from bellaplace.expression import FunctionExpr
from bellaplace.kernels import KernelSpec
from bellaplace.transform import (QuadratureConfig, bromwich_invert, bromwich_probe,
                                  formal_integrand_series, property_sides, resum_formal,
                                  transform, transform_complex, transform_many,
                                  transform_truncated, truncation_gap, verify_property)
from bellaplace.umbral import UmbralSequence

# mpmath references, 40 digits (oracles/generate.py)
TRUNC1_EXP = 0.59634736232319407434      # int e^-t / (1 + t)
TRUNC2_ONE = 1.5707963267948966192       # int 1 / (1 + t + t^2/2) = pi/2
F1_EXP_AT_1 = 0.54889674820437448183     # int e^-t / e_1(t)
F1_ONE_AT_1 = 1.5344141825390042697      # int 1 / e_1(t)
INV_SUCC_EXP_AT_1 = 0.64493406684822643647  # zeta(2) - 1
SIN_TRUNC4_AT_1 = 0.49651672584065352356    # int sin t / (1 + t + ... + t^4/24)
GAPS = {
    (0, 2): 0.025457365422603481134, (0, 5): 0.00074678645509528971081,
    (0, 10): 2.8620785881450191926e-6, (0, 20): 4.7826127309440792374e-11,
    (0, 30): 8.095103231833746674e-16,
    (1, 2): 0.0057887842427351793858, (1, 5): 5.3108578336862403499e-6,
    (1, 10): 5.3604005890051441865e-12, (1, 20): 4.6340875113651290327e-26,
    (1, 30): 7.6182993446692094614e-42,
}

L0 = KernelSpec.laguerre(0)
PROBE_PASSING = [
    L0,
    KernelSpec.reciprocal_egf(UmbralSequence.ones()),
    KernelSpec.reciprocal_egf(UmbralSequence.inv_succ()),
    KernelSpec.reciprocal_egf(UmbralSequence.shifted_harmonic()),
]


@pytest.mark.parametrize("text,s,want", [("1", 2.0, 0.5), ("exp(-t)", 1.0, 0.5), ("t", 1.0, 1.0)])
def test_simple_laplace_values(text, s, want):
    res = transform(text, L0, s)
    assert abs(res.value - want) <= QuadratureConfig().abs_tol
    assert res.decay.verdict == "exponential-decay"
    assert "hp-violated" not in res.flags


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("text,closed", [
    ("1", lambda s: 1 / s), ("t", lambda s: 1 / s ** 2), ("t^2", lambda s: 2 / s ** 3),
    ("exp(-t)", lambda s: 1 / (s + 1)), ("sin(t)", lambda s: 1 / (s * s + 1)),
    ("cos(t)", lambda s: s / (s * s + 1)), ("t*exp(-2*t)", lambda s: 1 / (s + 2) ** 2),
])
def test_laplace_closed_forms(text, closed, s):
    assert transform(text, L0, s).value == pytest.approx(closed(s), rel=1e-9)


def test_inv_succ_kernel_value():
    spec = KernelSpec.reciprocal_egf(UmbralSequence.inv_succ())
    assert transform("exp(-t)", spec, 1.0).value == pytest.approx(INV_SUCC_EXP_AT_1, rel=1e-10)


def test_truncated_examples():
    assert transform_truncated("exp(-t)", 0, 1, 1.0).value == pytest.approx(TRUNC1_EXP, rel=1e-10)
    assert transform_truncated("exp(-t)", 3, 1, 1.0).value == pytest.approx(TRUNC1_EXP, rel=1e-10)
    res = transform_truncated("1", 0, 2, 1.0)
    # the algebraic tail is cut at max_interval; its estimate is in the error
    assert abs(res.value - TRUNC2_ONE) <= res.error_estimate
    assert res.value == pytest.approx(TRUNC2_ONE, abs=5e-6)
    assert {"finite-interval-mode", "hp-violated"} <= res.flags


def test_truncated_non_integrable():
    with pytest.raises(NonIntegrableError):
        transform_truncated("1", 0, 1, 1.0)
    with pytest.raises(NonIntegrableError):
        transform_truncated("t^2", 1, 3, 1.0)
    # same growth is fine one order higher
    transform_truncated("t^2", 1, 4, 1.0)


@pytest.mark.parametrize("r,n", sorted(GAPS))
def test_truncation_gap_oracle(r, n):
    res = truncation_gap("exp(-t)", r, n, 1.0)
    assert res.value == pytest.approx(GAPS[(r, n)], rel=1e-8, abs=1e-16)


@pytest.mark.parametrize("r", [0, 1])
def test_truncation_gap_decreases(r):
    gaps = [truncation_gap("exp(-t)", r, n, 1.0).value for n in range(2, 31)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] <= 1e-6


def test_laguerre_one_kernel():
    res = transform("exp(-t)", KernelSpec.laguerre(1), 1.0)
    assert res.value == pytest.approx(F1_EXP_AT_1, rel=1e-10)
    assert {"hp-violated", "finite-interval-mode"} <= res.flags
    loose = transform("1", KernelSpec.laguerre(1), 1.0, QuadratureConfig(abs_tol=1e-8, rel_tol=1e-6))
    tight = transform("1", KernelSpec.laguerre(1), 1.0, QuadratureConfig(abs_tol=1e-13, rel_tol=1e-12))
    assert abs(loose.value - tight.value) <= 1e-6
    assert tight.value == pytest.approx(F1_ONE_AT_1, rel=1e-10)


@given(st.floats(min_value=0.2, max_value=8.0),
       st.sampled_from(["exp(-t)", "1", "1/(1+t)", "t*exp(-t/2)"]),
       st.sampled_from([L0, KernelSpec.laguerre(1), KernelSpec.truncated_laguerre(0, 4),
                        KernelSpec.reciprocal_egf(UmbralSequence.inv_succ())]))
def test_result_invariants(s, text, spec):
    q = QuadratureConfig()
    res = transform(text, spec, s, q)
    assert res.error_estimate >= 0
    assert 0 < res.cutoff_T <= q.max_interval
    assert set(res.flags) <= {"tail-truncated", "finite-interval-mode", "hp-violated"}
    if "hp-violated" in res.flags:
        assert "finite-interval-mode" in res.flags
    assert res.to_dict()["flags"] == sorted(res.flags)


def test_divergence_paths():
    with pytest.raises(DivergenceError) as info:
        transform("exp(t)", L0, 0.5)
    assert not isinstance(info.value, NonIntegrableError)
    with pytest.raises(DivergenceError):
        transform("1", KernelSpec.reciprocal_egf(UmbralSequence.factorial()), 1.0)
    with pytest.raises(ArgumentDomainError):
        transform("1", L0, 0.0)


def test_tolerance_error():
    with pytest.raises(ToleranceError):
        transform("sin(40*t)", L0, 0.1, QuadratureConfig(max_subdivisions=2))
    with pytest.raises(ToleranceError):
        transform("sin(1/t)", L0, 1.0)


def test_oscillating_function_on_algebraic_kernel():
    # long oscillating stretches are bisected until QUADPACK copes
    res = transform("sin(t)", KernelSpec.truncated_laguerre(0, 4), 1.0)
    assert res.value == pytest.approx(SIN_TRUNC4_AT_1, rel=1e-10)


def test_config_validation():
    with pytest.raises(ArgumentDomainError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(ArgumentDomainError):
        QuadratureConfig(max_interval=-1)


def test_callable_functions_accepted():
    assert transform(lambda t: math.exp(-t), L0, 1.0).value == pytest.approx(0.5, rel=1e-12)


def test_parallel_matches_sequential():
    grid = [0.5, 1.0, 2.0, 3.0]
    seq = transform_many("sin(t)", L0, grid)
    par = transform_many("sin(t)", L0, grid, workers=4)
    assert [r.value for r in seq] == [r.value for r in par]


def test_complex_transform_on_real_axis():
    f = FunctionExpr.parse("exp(-t)")
    assert transform_complex(f, L0, 2.0 + 0j) == pytest.approx(1 / 3, rel=1e-10)
    assert transform_complex(f, L0, 1 + 2j) == pytest.approx(1 / (2 + 2j), rel=1e-10)


# properties --------------------------------------------------------------

def test_documented_property_examples():
    assert verify_property("linearity", "1", L0, 1.0, {"g": "exp(-t)", "A": 2, "B": 3}) <= 1e-9
    lhs, rhs, _ = property_sides("scaling", "exp(-t)", L0, 1.0, {"d": 2})
    assert lhs == pytest.approx(1 / 3, abs=1e-8) and abs(lhs - rhs) <= 1e-8
    spec = KernelSpec.reciprocal_egf(UmbralSequence.ones())
    lhs, rhs, _ = property_sides("derivative-action", "exp(-t)", spec, 1.0)
    assert lhs == pytest.approx(-0.5, abs=1e-8) and abs(lhs - rhs) <= 1e-8


@pytest.mark.parametrize("spec", PROBE_PASSING, ids=lambda k: k.label)
def test_properties_on_passing_kernels(spec):
    f = "exp(-t)"
    assert verify_property("linearity", f, spec, 1.3, {"g": "sin(t)", "A": -1, "B": 4}) <= 1e-7
    for d in (0.5, 2, 3):
        assert verify_property("scaling", f, spec, 1.0, {"d": d}) <= 1e-7
    if spec.family == "reciprocal-egf":
        for x in (Fraction(1, 2), 2):
            assert verify_property("homothety", f, spec, 1.0, {"x": x}) <= 1e-7
    lhs, rhs, err = property_sides("derivative-action", f, spec, 1.0)
    assert abs(lhs - rhs) <= max(1e-7, 10 * err)


@given(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=20))
def test_scaling_random_d(d):
    for spec in PROBE_PASSING[2:]:
        assert verify_property("scaling", "exp(-t)", spec, 1.0, {"d": d}) <= 1e-7


def test_homothety_exact_coefficients():
    # E_{x a}(s t) and E_a(x s t) share every coefficient of (s t)^k
    for seq in (UmbralSequence.inv_succ(), UmbralSequence.shifted_harmonic(),
                UmbralSequence.laguerre(2)):
        for x in (Fraction(1, 2), Fraction(2), Fraction(-3, 7)):
            scaled = seq.scaled(x)
            assert [scaled[k] for k in range(26)] == [x ** k * seq[k] for k in range(26)]


def test_derivative_action_outside_exponential_decay():
    # the identity only needs the boundary term to vanish
    lhs, rhs, err = property_sides("derivative-action", "sin(t)", KernelSpec.laguerre(1), 1.0)
    assert abs(lhs - rhs) <= max(1e-9, 10 * err)


def test_derivative_action_boundary_guard():
    with pytest.raises(ArgumentDomainError):
        property_sides("derivative-action", "t^2", KernelSpec.truncated_laguerre(0, 4), 1.0)


def test_unknown_property():
    with pytest.raises(ArgumentDomainError):
        verify_property("parity", "1", L0, 1.0)
    with pytest.raises(ArgumentDomainError):
        verify_property("scaling", "1", L0, 1.0, {"d": 0})


# formal tables -------------------------------------------------------------

def test_formal_rows_examples():
    ones = UmbralSequence.ones()
    rows = formal_integrand_series([1, 1, 1], "taylor", ones, 2)
    assert [term.weight for term in rows[2]] == [1, -2, 1]
    delta = formal_integrand_series([1, 0, 0, 0], "taylor", ones, 3)
    for n, row in enumerate(delta):
        live = [term for term in row if term.weight != 0]
        assert len(live) == 1 and live[0].k == n and live[0].weight == (-1) ** n
    laurent = formal_integrand_series([1, 0, 0, 0], "laurent", ones, 3)
    for n, row in enumerate(laurent):
        live = [term for term in row if term.weight != 0]
        assert (live[0].s_power, live[0].t_power) == (n, n)
        assert live[0].coefficient == Fraction((-1) ** n, math.factorial(n))


def test_formal_rows_resum():
    rows = formal_integrand_series([(-1) ** k for k in range(31)], "taylor",
                                   UmbralSequence.ones(), 30)
    s = t = 0.5  # s t = 1/4
    direct = math.exp(-t) * math.exp(-s * t)
    remainder = (t * (1 + s)) ** 31 / math.factorial(31)
    assert abs(resum_formal(rows, s, t) - direct) <= remainder + 1e-15


def test_formal_rows_validation():
    with pytest.raises(ArgumentDomainError):
        formal_integrand_series([1], "taylor", UmbralSequence.ones(), 3)
    with pytest.raises(ArgumentDomainError):
        formal_integrand_series([1, 2], "fourier", UmbralSequence.ones(), 1)


# inversion ---------------------------------------------------------------

@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_bromwich_classical(t):
    res = bromwich_invert(lambda z: 1 / (z + 1), 0, t, 0.0)
    assert res.value == pytest.approx(math.exp(-t), abs=1e-6)
    assert res.converged and not res.experimental


def test_bromwich_ramp():
    res = bromwich_invert(lambda z: 1 / z ** 2, 0, 2.0, 0.5)
    assert res.value == pytest.approx(2.0, abs=1e-5)


def test_bromwich_experimental_report():
    f = FunctionExpr.parse("exp(-t)")
    q = QuadratureConfig(abs_tol=1e-9, rel_tol=1e-7, tail_epsilon=1e-10)
    spec = KernelSpec.laguerre(1)
    report = bromwich_probe(lambda z: transform_complex(f, spec, z, q), 1, 1.0, 1.0, tau_max=8.0)
    assert report["experimental"] is True
    assert len(report["tau"]) == len(report["partial_values"]) == 3
    assert isinstance(report["converged"], bool)
    with pytest.raises(ContourDivergenceError) as info:
        bromwich_invert(lambda z: transform_complex(f, spec, z, q), 1, 1.0, 1.0, tau_max=8.0)
    assert info.value.report["r"] == 1


def test_bromwich_domain():
    with pytest.raises(ArgumentDomainError):
        bromwich_invert(lambda z: 1 / z, 0, -1.0, 1.0)
