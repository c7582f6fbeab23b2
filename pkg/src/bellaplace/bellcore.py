"""Partial and complete Bell polynomials in exact arithmetic.

The partial Bell polynomials ``B[n, k](g_1, ..., g_{n-k+1})`` are built with
the three-term recursion

    B[n, k] = sum_{h=0}^{n-k} C(n-1, h) * B[n-h-1, k-1] * g_{h+1}

seeded with ``B[0, 0] = 1``, ``B[n, 0] = 0`` (n >= 1) and ``B[0, k] = 0``
(k >= 1).  Integers and :class:`fractions.Fraction` inputs are kept exact;
any other object supporting ``+`` and ``*`` (for example sympy symbols) is
passed through untouched so that the polynomials themselves can be
inspected.  Floats are refused.

A brute-force set-partition expansion, :func:`bell_partition_oracle`, is
provided as an independent check of the recursion.
"""
from __future__ import annotations

import functools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Sequence

from .errors import ArgumentDomainError, OracleLimitError

ORACLE_LIMIT = 12


def _exact(x):
    if isinstance(x, bool):
        raise ArgumentDomainError("booleans are not valid Bell arguments")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        raise ArgumentDomainError(
            "floating-point arguments are not accepted; pass Fraction or int")
    return x


def _exact_list(values) -> list:
    return [_exact(v) for v in values]


def _check_nk(n, k):
    if not isinstance(n, int) or not isinstance(k, int):
        raise ArgumentDomainError("n and k must be integers")
    if n < 1:
        raise ArgumentDomainError(f"n must be >= 1, got {n}")
    if k < 1 or k > n:
        raise ArgumentDomainError(f"k must satisfy 1 <= k <= n, got n={n}, k={k}")


def partial_bell(n: int, k: int, g: Sequence[Any]):
    """Return the partial Bell polynomial ``B[n, k](g_1, ..., g_{n-k+1})``.

    Only the band of the triangle that ``B[n, k]`` depends on is evaluated,
    so ``g`` needs just ``n - k + 1`` entries.

    Parameters
    ----------
    n, k : int
        Indices with ``1 <= k <= n``.
    g : sequence
        Values ``g_1, g_2, ...`` (index 0 of the sequence holds ``g_1``).

    Examples
    --------
    >>> partial_bell(4, 2, [1, 1, 1])
    Fraction(7, 1)
    """
    _check_nk(n, k)
    width = n - k + 1
    if len(g) < width:
        raise ArgumentDomainError(
            f"B[{n},{k}] needs {width} values of g, got {len(g)}")
    gv = _exact_list(g[:width])

    # rows[j][m - j] holds B[m, j] for 0 <= m - j <= width - 1
    rows = [[Fraction(1)] + [Fraction(0)] * (width - 1)]
    for j in range(1, k + 1):
        row = []
        for d in range(width):
            m = j + d
            acc = Fraction(0)
            for h in range(d + 1):
                acc += comb(m - 1, h) * rows[j - 1][d - h] * gv[h]
            row.append(acc)
        rows.append(row)
    return rows[k][n - k]


@dataclass(frozen=True)
class PartialBellTable:
    """Full triangle ``B[n, k]`` for ``1 <= k <= n <= n_max`` built for one ``g``."""

    n_max: int
    g: tuple
    values: tuple  # values[n][k], 0 <= k <= n <= n_max

    def __call__(self, n: int, k: int):
        if not 0 <= k <= n <= self.n_max:
            raise ArgumentDomainError(
                f"(n, k) = ({n}, {k}) outside table of size {self.n_max}")
        return self.values[n][k]

    def rows(self):
        """Yield ``(n, k, B[n, k])`` in row-major order, ``k >= 1``."""
        for n in range(1, self.n_max + 1):
            for k in range(1, n + 1):
                yield n, k, self.values[n][k]

    def complete(self, n: int, f: Sequence[Any]):
        """Return ``Y_n = sum_k B[n, k] f_k`` using the stored table."""
        if len(f) < n:
            raise ArgumentDomainError(f"Y_{n} needs {n} values of f, got {len(f)}")
        fv = _exact_list(f[:n])
        return sum((self.values[n][k] * fv[k - 1] for k in range(1, n + 1)),
                   Fraction(0))


def bell_table(g: Sequence[Any], n_max: int | None = None) -> PartialBellTable:
    """Build the whole partial Bell triangle for ``g`` up to row ``n_max``.

    ``n_max`` defaults to ``len(g)``.  The recursion reuses every lower row,
    so this is the cheap way to get many entries for the same ``g``.
    """
    if n_max is None:
        n_max = len(g)
    if n_max < 0:
        raise ArgumentDomainError("n_max must be >= 0")
    if len(g) < n_max:
        raise ArgumentDomainError(
            f"a table of size {n_max} needs {n_max} values of g, got {len(g)}")
    gv = _exact_list(g[:n_max])
    table = [[Fraction(1)]]
    for n in range(1, n_max + 1):
        row = [Fraction(0)] * (n + 1)
        for k in range(1, n + 1):
            acc = Fraction(0)
            for h in range(n - k + 1):
                acc += comb(n - 1, h) * table[n - h - 1][k - 1] * gv[h]
            row[k] = acc
        table.append(row)
    return PartialBellTable(n_max, tuple(gv), tuple(tuple(r) for r in table))


def complete_bell(n: int, f: Sequence[Any], g: Sequence[Any]):
    """Return the complete Bell polynomial ``Y_n(f_1, g_1; ...; f_n, g_n)``.

    ``Y_n`` is the n-th derivative of a composite ``f(g(t))`` written in the
    derivatives ``f_k`` of the outer and ``g_k`` of the inner function.

    >>> complete_bell(2, [1, 1], [2, 3])
    Fraction(7, 1)
    """
    if not isinstance(n, int) or n < 1:
        raise ArgumentDomainError(f"n must be an integer >= 1, got {n!r}")
    if len(f) != n or len(g) != n:
        raise ArgumentDomainError(
            f"Y_{n} needs exactly {n} values of f and g, got {len(f)} and {len(g)}")
    return bell_table(g, n).complete(n, f)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind, ``S(n, k) = B[n, k](1, 1, ...)``."""
    if not isinstance(n, int) or not isinstance(k, int):
        raise ArgumentDomainError("n and k must be integers")
    if n < 0 or k < 0 or k > n:
        raise ArgumentDomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if n == 0:
        return 1
    if k == 0:
        return 0
    value = partial_bell(n, k, [1] * (n - k + 1))
    return int(value)


def _set_partitions(n: int, k: int):
    """Yield the block-size lists of all partitions of {0..n-1} into k blocks.

    Restricted growth strings: element i joins an existing block or opens
    block number ``len(sizes)``.
    """
    sizes: list[int] = []

    def walk(i):
        remaining = n - i
        if len(sizes) + remaining < k:
            return
        if i == n:
            if len(sizes) == k:
                yield tuple(sizes)
            return
        for b in range(len(sizes)):
            sizes[b] += 1
            yield from walk(i + 1)
            sizes[b] -= 1
        if len(sizes) < k:
            sizes.append(1)
            yield from walk(i + 1)
            sizes.pop()

    yield from walk(0)


def bell_partition_oracle(n: int, k: int, g: Sequence[Any], limit: int = ORACLE_LIMIT):
    """Evaluate ``B[n, k]`` by enumerating every partition of an n-set into k blocks.

    Each partition contributes the product of ``g_{|block|}`` over its
    blocks; partitions with the same block sizes are counted together.  The cost follows the Bell numbers, so ``n`` is capped by
    ``limit``.  Meant as a test device, not a production path.
    """
    _check_nk(n, k)
    if n > limit:
        raise OracleLimitError(f"oracle limited to n <= {limit}, got n={n}")
    width = n - k + 1
    if len(g) < width:
        raise ArgumentDomainError(
            f"B[{n},{k}] needs {width} values of g, got {len(g)}")
    gv = _exact_list(g[:width])
    total = Fraction(0)
    for sizes, count in _block_shapes(n, k).items():
        term = Fraction(count)
        for size in sizes:
            term = term * gv[size - 1]
        total = total + term
    return total


@functools.lru_cache(maxsize=None)
def _block_shapes(n: int, k: int) -> dict:
    """Number of set partitions per sorted block-size tuple.

    The enumeration does not depend on ``g``, so it is done once per
    ``(n, k)`` and every evaluation only multiplies out the distinct shapes.
    """
    return dict(Counter(tuple(sorted(sizes)) for sizes in _set_partitions(n, k)))
