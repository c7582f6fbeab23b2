"""Truncated formal power series with exact rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable

from .errors import ArgumentDomainError


@dataclass(frozen=True)
class FormalPowerSeries:
    """Series ``sum_k c_k s^k`` known through ``s^order``.

    ``coeffs[k]`` is the coefficient of ``s^k`` when ``egf`` is false, and
    of ``s^k / k!`` when ``egf`` is true.  Arithmetic between two series
    truncates at the smaller order; mixing conventions is refused.
    """

    coeffs: tuple
    egf: bool = False

    def __post_init__(self):
        if not self.coeffs:
            raise ArgumentDomainError("a series needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, egf: bool = False) -> "FormalPowerSeries":
        return cls(tuple(coeffs), egf)

    @classmethod
    def exp(cls, order: int) -> "FormalPowerSeries":
        """``e^s`` in the plain convention."""
        return cls(tuple(Fraction(1, factorial(k)) for k in range(order + 1)))

    @classmethod
    def monomial(cls, power: int, order: int | None = None) -> "FormalPowerSeries":
        order = power if order is None else order
        return cls(tuple(Fraction(int(k == power)) for k in range(order + 1)))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    def truncate(self, order: int) -> "FormalPowerSeries":
        if order > self.order:
            raise ArgumentDomainError(
                f"cannot extend a series of order {self.order} to {order}")
        return FormalPowerSeries(self.coeffs[:order + 1], self.egf)

    def to_plain(self) -> "FormalPowerSeries":
        if not self.egf:
            return self
        return FormalPowerSeries(
            tuple(c / factorial(k) for k, c in enumerate(self.coeffs)), False)

    def to_egf(self) -> "FormalPowerSeries":
        if self.egf:
            return self
        return FormalPowerSeries(
            tuple(c * factorial(k) for k, c in enumerate(self.coeffs)), True)

    def _pair(self, other):
        if not isinstance(other, FormalPowerSeries):
            other = FormalPowerSeries((Fraction(other),) + (Fraction(0),) * self.order,
                                      self.egf)
        if other.egf != self.egf:
            raise ArgumentDomainError("cannot combine EGF and plain series")
        n = min(self.order, other.order)
        return self.coeffs[:n + 1], other.coeffs[:n + 1], n

    def __add__(self, other):
        a, b, _ = self._pair(other)
        return FormalPowerSeries(tuple(x + y for x, y in zip(a, b)), self.egf)

    __radd__ = __add__

    def __neg__(self):
        return FormalPowerSeries(tuple(-c for c in self.coeffs), self.egf)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        a, b, n = self._pair(other)
        out = []
        for m in range(n + 1):
            if self.egf:
                out.append(sum((comb(m, j) * a[j] * b[m - j] for j in range(m + 1)),
                               Fraction(0)))
            else:
                out.append(sum((a[j] * b[m - j] for j in range(m + 1)), Fraction(0)))
        return FormalPowerSeries(tuple(out), self.egf)

    __rmul__ = __mul__

    def reciprocal(self) -> "FormalPowerSeries":
        """Truncated ``1 / self`` by long division; needs a nonzero constant term."""
        if self.coeffs[0] == 0:
            raise ArgumentDomainError("series with zero constant term has no reciprocal")
        if self.egf:
            return self.to_plain().reciprocal().to_egf()
        c = self.coeffs
        inv0 = 1 / c[0]
        out = [inv0]
        for m in range(1, self.order + 1):
            acc = sum((c[j] * out[m - j] for j in range(1, m + 1)), Fraction(0))
            out.append(-acc * inv0)
        return FormalPowerSeries(tuple(out))

    def scale_variable(self, x) -> "FormalPowerSeries":
        """Series of ``p(x * s)``."""
        x = Fraction(x)
        return FormalPowerSeries(tuple(c * x ** k for k, c in enumerate(self.coeffs)),
                                 self.egf)

    def __call__(self, s):
        """Evaluate the truncated series (Horner) at ``s``."""
        exact = isinstance(s, (int, Fraction))
        acc = Fraction(0) if exact else 0.0
        for c in reversed(self.to_plain().coeffs):
            acc = acc * s + (c if exact else float(c))
        return acc
