"""Umbral sequences, the Blissard reciprocal and the transform coefficients.

A sequence ``a = (1, a_1, a_2, ...)`` is identified with its exponential
generating function ``E_a(x) = sum_k a_k x^k / k!``.  The Blissard problem
asks for the sequence ``b`` with ``E_a(x) E_b(x) = 1``; its Bell-polynomial
solution is

    b_n = Y_n(-1!, a_1; 2!, a_2; ...; (-1)^n n!, a_n).

Both that route and plain power-series long division are exposed; the
second one only exists to check the first.
"""
from __future__ import annotations

import functools
import math
import threading
from fractions import Fraction
from typing import Callable, Iterable

from .bellcore import bell_table
from .errors import ArgumentDomainError
from .series import FormalPowerSeries


_RUNNING_FACTORIAL = [1]  # exact (len(_LOG_FACTORIALS) - 1)!
_FACTORIAL_LOCK = threading.Lock()


_LOG_FACTORIALS = [0.0]


def log_factorial(j: int) -> float:
    """``log(j!)`` from the exact integer; lgamma loses a few ulps at large ``j``."""
    if j >= len(_LOG_FACTORIALS):
        with _FACTORIAL_LOCK:
            while len(_LOG_FACTORIALS) <= j:
                _RUNNING_FACTORIAL[0] *= len(_LOG_FACTORIALS)
                _LOG_FACTORIALS.append(math.log(_RUNNING_FACTORIAL[0]))
    return _LOG_FACTORIALS[j]


class UmbralSequence:
    """Lazily extended exact sequence ``a_0 = 1, a_1, a_2, ...``.

    Either ``rule`` (a pure function of the index) or an explicit list of
    ``terms`` is given.  Explicit lists have finite support: every index
    past the list reads as zero and ``degree`` reports the last index.
    Extension of the cache is serialized, so concurrent readers always see a
    consistent prefix.
    """

    def __init__(self, rule: Callable[[int], Fraction] | None = None,
                 terms: Iterable | None = None, label: str = "",
                 degree: int | None = None,
                 log_rule: Callable[[int], tuple[int, float]] | None = None):
        if (rule is None) == (terms is None):
            raise ArgumentDomainError("give exactly one of rule or terms")
        self._lock = threading.Lock()
        self._logs: list[tuple[int, float]] = []
        self._log_rule = log_rule
        if terms is not None:
            values = [Fraction(v) for v in terms]
            if not values:
                raise ArgumentDomainError("an explicit sequence needs a_0")
            self._cache = values
            self._rule = None
            self.degree = len(values) - 1 if degree is None else min(degree, len(values) - 1)
        else:
            self._cache = []
            self._rule = rule
            self.degree = degree
        self.label = label
        if self[0] != 1:
            raise ArgumentDomainError(f"a_0 must be 1, got {self[0]}")

    def __repr__(self):
        return f"UmbralSequence({self.label or '<anonymous>'})"

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            raise ArgumentDomainError("sequence index must be >= 0")
        if self.degree is not None and k > self.degree:
            return Fraction(0)
        if k < len(self._cache):
            return self._cache[k]
        if self._rule is None:
            return Fraction(0)
        with self._lock:
            while len(self._cache) <= k:
                self._cache.append(Fraction(self._rule(len(self._cache))))
        return self._cache[k]

    def prefix(self, n: int) -> list[Fraction]:
        """Return ``[a_0, ..., a_n]``."""
        return [self[k] for k in range(n + 1)]

    def log_egf_coeff(self, k: int) -> tuple[int, float]:
        """Return ``(sign, log|a_k / k!|)``; sign 0 marks a vanishing term.

        The logarithm is taken from the exact numerator and denominator, so
        it stays finite where ``float(a_k / k!)`` would under- or overflow.
        Named rules supply ``(sign, log|a_k|)`` directly and never build the
        (possibly huge) exact terms.
        """
        if k < len(self._logs):
            return self._logs[k]
        while len(self._logs) <= k:
            j = len(self._logs)
            if self.degree is not None and j > self.degree:
                sign, la = 0, -math.inf
            elif self._log_rule is not None:
                sign, la = self._log_rule(j)
            else:
                c = self[j]
                sign = (c > 0) - (c < 0)
                la = (math.log(abs(c.numerator)) - math.log(c.denominator)) if sign else -math.inf
            entry = (sign, la - log_factorial(j)) if sign else (0, -math.inf)
            with self._lock:
                if len(self._logs) == j:
                    self._logs.append(entry)
        return self._logs[k]

    def scaled(self, x) -> "UmbralSequence":
        """Return ``x a := (1, x a_1, x^2 a_2, ...)``."""
        x = Fraction(x)
        if x == 0:
            return UmbralSequence(terms=[1], label=f"0*{self.label}")
        sx, lx = (1 if x > 0 else -1), math.log(abs(x))

        def log_rule(k):
            sign, lc = self.log_egf_coeff(k)
            return sign * sx ** k, lc + log_factorial(k) + k * lx

        return UmbralSequence(rule=lambda k: x ** k * self[k],
                              label=f"({x})*{self.label}", degree=self.degree,
                              log_rule=log_rule)

    def truncated(self, n: int) -> "UmbralSequence":
        """Same terms through ``a_n``, zero afterwards."""
        if n < 0:
            raise ArgumentDomainError("truncation order must be >= 0")
        degree = n if self.degree is None else min(n, self.degree)
        def log_rule(k):
            sign, lc = self.log_egf_coeff(k)
            return sign, lc + log_factorial(k)

        return UmbralSequence(rule=lambda k: self[k], label=f"{self.label}[<={n}]",
                              degree=degree, log_rule=log_rule)

    @property
    def is_finite(self) -> bool:
        return self.degree is not None

    # named rules -------------------------------------------------------

    @classmethod
    def ones(cls) -> "UmbralSequence":
        return _ones()

    @classmethod
    def laguerre(cls, r: int) -> "UmbralSequence":
        """``a_k = 1 / (k!)^r``, whose EGF is the Laguerre-type exponential ``e_r``."""
        if not isinstance(r, int) or r < 0:
            raise ArgumentDomainError(f"laguerre order must be an integer >= 0, got {r!r}")
        return _laguerre(r)

    @classmethod
    def factorial(cls) -> "UmbralSequence":
        """``a_k = k!``; the EGF is the geometric series ``1 / (1 - x)``."""
        return _factorial()

    @classmethod
    def inv_succ(cls) -> "UmbralSequence":
        """``a_k = 1 / (k + 1)``; the EGF is ``(e^x - 1) / x``."""
        return _inv_succ()

    @classmethod
    def shifted_harmonic(cls) -> "UmbralSequence":
        """``a_k = H_{k+1} = 1 + 1/2 + ... + 1/(k+1)``."""
        return _shifted_harmonic()

    @classmethod
    def explicit(cls, values: Iterable, label: str | None = None) -> "UmbralSequence":
        values = [Fraction(v) for v in values]
        if label is None:
            label = ",".join(str(v) for v in values)
        return cls(terms=values, label=label)


@functools.lru_cache(maxsize=None)
def _ones():
    return UmbralSequence(rule=lambda k: Fraction(1), label="ones",
                          log_rule=lambda k: (1, 0.0))


@functools.lru_cache(maxsize=None)
def _laguerre(r):
    return UmbralSequence(rule=lambda k: Fraction(1, math.factorial(k) ** r),
                          label=f"laguerre:{r}",
                          log_rule=lambda k: (1, -r * log_factorial(k)))


@functools.lru_cache(maxsize=None)
def _factorial():
    return UmbralSequence(rule=lambda k: Fraction(math.factorial(k)), label="factorial",
                          log_rule=lambda k: (1, log_factorial(k)))


@functools.lru_cache(maxsize=None)
def _inv_succ():
    return UmbralSequence(rule=lambda k: Fraction(1, k + 1), label="inv-succ",
                          log_rule=lambda k: (1, -math.log(k + 1)))


def _harmonic(k):
    return sum((Fraction(1, j) for j in range(1, k + 2)), Fraction(0))


@functools.lru_cache(maxsize=None)
def _shifted_harmonic():
    return UmbralSequence(rule=_harmonic, label="shifted-harmonic")


def parse_sequence_spec(text: str) -> UmbralSequence:
    """Parse ``ones``, ``laguerre:R``, ``factorial``, ``inv-succ``,
    ``shifted-harmonic`` or an explicit list such as ``1,1/2,0,3``.

    Explicit entries are exact integers or ``p/q`` fractions; decimals are
    rejected because the values feed exact algebra.
    """
    text = text.strip()
    named = {
        "ones": UmbralSequence.ones,
        "factorial": UmbralSequence.factorial,
        "inv-succ": UmbralSequence.inv_succ,
        "shifted-harmonic": UmbralSequence.shifted_harmonic,
    }
    if text in named:
        return named[text]()
    if text.startswith("laguerre:"):
        arg = text.split(":", 1)[1]
        if not arg.isdigit():
            raise ArgumentDomainError(f"bad laguerre order {arg!r}")
        return UmbralSequence.laguerre(int(arg))
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item or "." in item or "e" in item.lower():
            raise ArgumentDomainError(
                f"sequence entries must be integers or p/q fractions, got {item!r}")
        try:
            values.append(Fraction(item))
        except (ValueError, ZeroDivisionError):
            raise ArgumentDomainError(f"cannot parse sequence entry {item!r}") from None
    return UmbralSequence.explicit(values)


def _as_sequence(a) -> UmbralSequence:
    if isinstance(a, UmbralSequence):
        return a
    return UmbralSequence.explicit(a)


def _check_order(N):
    if not isinstance(N, int) or N < 0:
        raise ArgumentDomainError(f"order must be an integer >= 0, got {N!r}")


def blissard_reciprocal(a, N: int) -> list[Fraction]:
    """Solve ``e^{at} e^{bt} = 1`` for ``b_0..b_N`` through Bell polynomials.

    >>> blissard_reciprocal(UmbralSequence.inv_succ(), 4)
    [Fraction(1, 1), Fraction(-1, 2), Fraction(1, 6), Fraction(0, 1), Fraction(-1, 30)]
    """
    _check_order(N)
    a = _as_sequence(a)
    if N == 0:
        return [Fraction(1)]
    table = bell_table(a.prefix(N)[1:], N)
    f = [(-1) ** k * math.factorial(k) for k in range(1, N + 1)]
    return [Fraction(1)] + [table.complete(n, f) for n in range(1, N + 1)]


def egf_reciprocal_oracle(a, N: int) -> list[Fraction]:
    """EGF coefficients of ``1 / sum_k a_k t^k / k!`` by truncated long division."""
    _check_order(N)
    a = _as_sequence(a)
    egf = FormalPowerSeries(tuple(a.prefix(N)), egf=True)
    return list(egf.reciprocal().coeffs)


def coeff_C(a, N: int) -> list[Fraction]:
    """Kernel coefficients ``C_k(a) = sum_h (-1)^h h! B[k, h](a_1, ..., a_{k-h+1})``."""
    _check_order(N)
    a = _as_sequence(a)
    out = [Fraction(1)]
    if N == 0:
        return out
    table = bell_table(a.prefix(N)[1:], N)
    for k in range(1, N + 1):
        out.append(sum(((-1) ** h * math.factorial(h) * table(k, h)
                        for h in range(1, k + 1)), Fraction(0)))
    return out
