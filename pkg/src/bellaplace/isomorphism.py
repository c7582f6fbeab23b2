"""Coefficient maps ``s^n -> s^n / (n!)^m`` and ``s^n -> a_n s^n`` on power series.

Two readings of how such a map acts on a kernel ``1 / E(st)`` are kept apart:

* coefficient-wise (linear): the map is applied to the reciprocal series
  itself;
* multiplicative: the image of a reciprocal is the reciprocal of the image,
  which is what turns ``exp`` kernels into ``1 / e_m`` kernels.

:func:`convention_gap` measures where they part ways.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import ArgumentDomainError
from .series import FormalPowerSeries
from .umbral import UmbralSequence, blissard_reciprocal


def _check_m(m):
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ArgumentDomainError(f"iterate count m must be an integer >= 1, got {m!r}")


def _plain(p: FormalPowerSeries) -> FormalPowerSeries:
    return p.to_plain() if p.egf else p


def apply_iso(p: FormalPowerSeries, m: int) -> FormalPowerSeries:
    """Divide the coefficient of ``s^n`` by ``(n!)^m``.

    EGF-normalized input is converted to plain coefficients first; the
    result is always plain.

    >>> apply_iso(FormalPowerSeries.monomial(3), 2)[3]
    Fraction(1, 36)
    """
    _check_m(m)
    p = _plain(p)
    return FormalPowerSeries(tuple(c / factorial(n) ** m for n, c in enumerate(p.coeffs)))


def apply_iso_general(p: FormalPowerSeries, a: UmbralSequence) -> FormalPowerSeries:
    """Multiply the coefficient of ``s^n`` by ``a_n``."""
    p = _plain(p)
    return FormalPowerSeries(tuple(a[n] * c for n, c in enumerate(p.coeffs)))


def iso_reciprocal_convention(denominator: FormalPowerSeries, m: int,
                              N: int) -> FormalPowerSeries:
    """Reciprocal of ``apply_iso(denominator, m)`` through ``s^N``.

    A denominator given to lower order than ``N`` is read as a polynomial
    (missing coefficients are zero).
    """
    _check_m(m)
    if not isinstance(N, int) or N < 0:
        raise ArgumentDomainError("N must be an integer >= 0")
    den = _plain(denominator)
    if den[0] == 0:
        raise ArgumentDomainError("denominator has zero constant term")
    coeffs = list(den.coeffs[:N + 1]) + [Fraction(0)] * max(0, N - den.order)
    return apply_iso(FormalPowerSeries(tuple(coeffs)), m).reciprocal()


@dataclass(frozen=True)
class SeriesMap:
    """A named coefficient map; ``kind`` is ``laguerre-iterate`` or ``general``."""

    kind: str
    m: int | None = None
    sequence: UmbralSequence | None = None

    def __post_init__(self):
        if self.kind == "laguerre-iterate":
            _check_m(self.m)
        elif self.kind == "general":
            if self.sequence is None:
                raise ArgumentDomainError("general map needs a sequence")
        else:
            raise ArgumentDomainError(f"unknown map kind {self.kind!r}")

    @property
    def description(self) -> str:
        if self.kind == "laguerre-iterate":
            return f"s^n -> s^n/(n!)^{self.m}"
        return f"s^n -> a_n s^n with a = {self.sequence.label}"

    def __call__(self, p: FormalPowerSeries) -> FormalPowerSeries:
        if self.kind == "laguerre-iterate":
            return apply_iso(p, self.m)
        return apply_iso_general(p, self.sequence)


def exp_series(N: int, sign: int = 1) -> FormalPowerSeries:
    """Plain coefficients of ``exp(sign * s)`` through ``s^N``."""
    return FormalPowerSeries(tuple(Fraction(sign ** k, factorial(k)) for k in range(N + 1)))


def laguerre_series(r: int, N: int) -> FormalPowerSeries:
    """Plain coefficients of ``e_r(s) = sum s^k / (k!)^(r+1)``."""
    return FormalPowerSeries(tuple(Fraction(1, factorial(k) ** (r + 1)) for k in range(N + 1)))


@dataclass(frozen=True)
class ConventionGap:
    """First order where the two readings disagree, with both coefficient lists."""

    m: int
    order: int | None
    coefficient_wise: Fraction | None
    multiplicative: Fraction | None
    coefficient_wise_series: tuple
    multiplicative_series: tuple


def convention_gap(m: int, N: int) -> ConventionGap:
    """Compare both readings of the map on the kernel ``exp(-x)`` through ``x^N``.

    Coefficient-wise: ``apply_iso`` on the series of ``exp(-x)``.
    Multiplicative: the reciprocal of ``e_m(x)``, built from the Blissard
    reciprocal of ``a_k = 1/(k!)^m``.
    """
    _check_m(m)
    if not isinstance(N, int) or N < 2:
        raise ArgumentDomainError("N must be an integer >= 2")
    literal = apply_iso(exp_series(N, -1), m).coeffs
    b = blissard_reciprocal(UmbralSequence.laguerre(m), N)
    mult = tuple(bk / factorial(k) for k, bk in enumerate(b))
    for k in range(N + 1):
        if literal[k] != mult[k]:
            return ConventionGap(m, k, literal[k], mult[k], literal, mult)
    return ConventionGap(m, None, None, None, literal, mult)
