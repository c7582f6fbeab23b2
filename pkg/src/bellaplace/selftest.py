"""Exact-arithmetic identity suite behind ``bellaplace selftest``.

Every check compares two independent exact computations; none involves a
floating-point tolerance.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable

from .bellcore import bell_partition_oracle, bell_table, complete_bell, stirling2
from .isomorphism import (apply_iso, convention_gap, exp_series, iso_reciprocal_convention,
                          laguerre_series)
from .umbral import UmbralSequence, blissard_reciprocal, coeff_C, egf_reciprocal_oracle

BERNOULLI = [Fraction(1), Fraction(-1, 2), Fraction(1, 6), Fraction(0), Fraction(-1, 30),
             Fraction(0), Fraction(1, 42), Fraction(0), Fraction(-1, 30)]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _rational(rng, span=5):
    return Fraction(rng.randint(-span, span), rng.randint(1, span))


def _nonzero(rng):
    while True:
        x = _rational(rng)
        if x:
            return x


def check_bell_vs_partitions(rng, n_max=7, draws=3):
    for _ in range(draws):
        g = [_rational(rng) for _ in range(n_max)]
        table = bell_table(g, n_max)
        for n in range(1, n_max + 1):
            for k in range(1, n + 1):
                if table(n, k) != bell_partition_oracle(n, k, g):
                    return f"B[{n},{k}] differs from the partition sum"
    return None


def check_homogeneity(rng, n_max=8, draws=3):
    for _ in range(draws):
        alpha, beta = _nonzero(rng), _nonzero(rng)
        g = [_rational(rng) for _ in range(n_max)]
        scaled = [alpha * beta ** (j + 1) * gj for j, gj in enumerate(g)]
        t1, t2 = bell_table(g, n_max), bell_table(scaled, n_max)
        for n in range(n_max + 1):
            for k in range(n + 1):
                if t2(n, k) != alpha ** k * beta ** n * t1(n, k):
                    return f"scaling law fails at ({n},{k})"
    return None


def check_complete_scaling(rng, n_max=8, draws=3):
    for _ in range(draws):
        alpha, beta = _nonzero(rng), _nonzero(rng)
        f = [_rational(rng) for _ in range(n_max)]
        g = [_rational(rng) for _ in range(n_max)]
        fs = [alpha ** (k + 1) * fk for k, fk in enumerate(f)]
        gs = [beta ** (j + 1) * gj for j, gj in enumerate(g)]
        for n in range(1, n_max + 1):
            if complete_bell(n, fs[:n], gs[:n]) != beta ** n * complete_bell(
                    n, [alpha ** (k + 1) * fk for k, fk in enumerate(f[:n])], g[:n]):
                return f"Y_{n} scaling fails"
    return None


def check_blissard(rng, N=12, draws=3):
    for _ in range(draws):
        a = [Fraction(1)] + [_rational(rng) for _ in range(N)]
        if blissard_reciprocal(a, N) != egf_reciprocal_oracle(a, N):
            return f"reciprocal of {a} disagrees with long division"
    if blissard_reciprocal(UmbralSequence.ones(), 20) != [Fraction((-1) ** n) for n in range(21)]:
        return "reciprocal of ones is not alternating"
    return None


def check_bernoulli():
    b = blissard_reciprocal(UmbralSequence.inv_succ(), 8)
    if b != BERNOULLI or egf_reciprocal_oracle(UmbralSequence.inv_succ(), 8) != BERNOULLI:
        return f"got {b}"
    return None


def check_coeff_c():
    if coeff_C(UmbralSequence.ones(), 15) != [Fraction((-1) ** k) for k in range(16)]:
        return "C_k(ones) is not alternating"
    for k in range(16):
        if sum((-1) ** (k - h) * factorial(h) * stirling2(k, h) for h in range(k + 1)) != 1:
            return f"Stirling identity fails at k={k}"
    return None


def check_iso():
    for m in (1, 2, 3):
        got = apply_iso(exp_series(30), m)
        if got != laguerre_series(m, 30):
            return f"T^{m}(exp) is not e_{m}"
        b = blissard_reciprocal(UmbralSequence.laguerre(m), 20)
        want = tuple(bk / factorial(k) for k, bk in enumerate(b))
        if iso_reciprocal_convention(exp_series(20), m, 20).coeffs != want:
            return f"multiplicative convention fails for m={m}"
        if convention_gap(m, 10).order != 2:
            return f"convention gap for m={m} is not at order 2"
    p = exp_series(30)
    if apply_iso(apply_iso(p, 1), 1) != apply_iso(p, 2):
        return "composition fails"
    return None


def checks(seed: int = 20240101) -> list[tuple[str, Callable[[], str | None]]]:
    rng = random.Random(seed)
    return [
        ("bell-partition-oracle", lambda: check_bell_vs_partitions(rng)),
        ("bell-homogeneity", lambda: check_homogeneity(rng)),
        ("complete-bell-scaling", lambda: check_complete_scaling(rng)),
        ("blissard-long-division", lambda: check_blissard(rng)),
        ("blissard-bernoulli", check_bernoulli),
        ("coefficients-c", check_coeff_c),
        ("isomorphism", check_iso),
    ]


def run_selftest(seed: int = 20240101) -> list[CheckResult]:
    """Run every check; a raised exception counts as a failure."""
    out = []
    for name, fn in checks(seed):
        try:
            problem = fn()
        except Exception as exc:  # report, do not abort the suite
            problem = f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, problem is None, problem or ""))
    return out
