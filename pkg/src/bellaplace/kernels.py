"""Numeric evaluation of EGF denominators and the reciprocal kernels built on them.

Every kernel is ``1 / E(s t)`` where ``E(x) = sum_k a_k x^k / k!`` is the EGF
of an umbral sequence, possibly truncated to a polynomial.  Sums are carried
as ``v * exp(L)`` with a running log scale, so ``E`` can be evaluated far past
the double-precision overflow point and the kernel underflows gracefully.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentDomainError, DivergenceError, KernelDomainError
from .umbral import UmbralSequence

DEFAULT_TOL = 1e-17
DEFAULT_MAX_TERMS = 10000

_RESCALE = 300.0
_LOG_GUARD = 1e6

FAMILIES = ("reciprocal-egf", "laguerre", "truncated-laguerre", "truncated-geometric")


def _log_sum(seq: UmbralSequence, x, tol=DEFAULT_TOL, max_terms=DEFAULT_MAX_TERMS,
             derivative=False, start=0):
    """Return ``(v, L)`` with ``sum_{k >= start} c_k x^k = v * exp(L)``.

    ``c_k = a_k / k!`` or, with ``derivative``, ``(k + 1) c_{k+1}`` (the
    coefficients of ``E'``).  Infinite sequences stop once two consecutive
    terms fall below ``tol`` relative to the partial sum.
    """
    offset = 1 if derivative else 0
    degree = None if seq.degree is None else seq.degree - offset
    if degree is not None and degree < start:
        return 0.0, 0.0
    if x == 0:
        if start > 0:
            return 0.0, 0.0
        sign, lc = seq.log_egf_coeff(offset)
        return (float(sign) * math.exp(lc) if sign else 0.0), 0.0
    is_complex = isinstance(x, complex) or x < 0
    logx = cmath.log(x) if is_complex else math.log(x)
    exp = cmath.exp if is_complex else math.exp

    v = 0.0
    scale = None
    small = 0
    k = start
    while True:
        if degree is not None and k > degree:
            break
        if degree is None and k - start >= max_terms:
            raise DivergenceError(
                f"{seq.label} series at x={x} not converged after {max_terms} terms")
        sign, lc = seq.log_egf_coeff(k + offset)
        if sign:
            if derivative:
                lc += math.log(k + 1)
            lt = lc + k * logx
            mag = lt.real if is_complex else lt
            if scale is None:
                scale = mag
            elif mag - scale > _RESCALE:
                v *= math.exp(scale - mag)
                scale = mag
            if scale > _LOG_GUARD:
                raise DivergenceError(
                    f"{seq.label} partial sums at x={x} grew past exp({_LOG_GUARD:g})")
            term = sign * exp(lt - scale)
            v += term
            is_small = abs(term) < tol * abs(v)
        else:
            is_small = True
        if degree is None and k >= start + 1:
            small = small + 1 if is_small else 0
            if small >= 2:
                break
        k += 1
    if scale is None:
        return 0.0, 0.0
    return v, scale


def _coerce_sequence(a) -> UmbralSequence:
    if isinstance(a, UmbralSequence):
        return a
    return UmbralSequence.explicit(a)


def egf_eval(a, x: float, tol: float = DEFAULT_TOL,
             max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """Evaluate ``E_a(x) = sum_k a_k x^k / k!`` for real ``x >= 0``.

    Raises
    ------
    DivergenceError
        If the stopping rule never triggers within ``max_terms`` terms, or
        the value is beyond double-precision range.
    """
    if tol <= 0:
        raise ArgumentDomainError("tol must be positive")
    x = float(x)
    if x < 0 or math.isnan(x):
        raise ArgumentDomainError(f"egf_eval needs x >= 0, got {x}")
    v, scale = _log_sum(_coerce_sequence(a), x, tol, max_terms)
    try:
        value = v * math.exp(scale)
    except OverflowError:
        value = math.inf
    if not math.isfinite(value):
        raise DivergenceError(f"E(x) overflows double precision at x={x}")
    return value


def egf_eval_complex(a, z: complex, tol: float = DEFAULT_TOL,
                     max_terms: int = DEFAULT_MAX_TERMS) -> complex:
    """Complex-argument ``E_a(z)``; the stopping rule acts on term moduli."""
    v, scale = _log_sum(_coerce_sequence(a), complex(z), tol, max_terms)
    try:
        value = complex(v) * math.exp(scale)
    except OverflowError:
        value = complex(math.inf)
    if not cmath.isfinite(value):
        raise DivergenceError(f"E(z) overflows double precision at z={z}")
    return value


def laguerre_exp(r: int, x: float, tol: float = DEFAULT_TOL,
                 max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """Laguerre-type exponential ``e_r(x) = sum_k x^k / (k!)^(r+1)``.

    >>> round(laguerre_exp(1, 1.0), 12)
    2.279585302336
    """
    return egf_eval(UmbralSequence.laguerre(r), x, tol, max_terms)


def laguerre_exp_complex(r: int, z: complex, tol: float = DEFAULT_TOL,
                         max_terms: int = DEFAULT_MAX_TERMS) -> complex:
    return egf_eval_complex(UmbralSequence.laguerre(r), z, tol, max_terms)


@dataclass(frozen=True)
class KernelSpec:
    """Which reciprocal kernel ``1 / E(s t)`` to use.

    Use the constructors :meth:`reciprocal_egf`, :meth:`laguerre`,
    :meth:`truncated_laguerre` and :meth:`truncated_geometric` rather than
    filling the fields by hand.
    """

    family: str
    sequence: UmbralSequence | None = None
    r: int | None = None
    n: int | None = None
    eval_tol: float = DEFAULT_TOL
    max_terms: int = DEFAULT_MAX_TERMS
    denominator: UmbralSequence = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentDomainError(f"unknown kernel family {self.family!r}")
        if self.eval_tol <= 0:
            raise ArgumentDomainError("eval_tol must be positive")
        if self.family == "reciprocal-egf":
            if self.sequence is None:
                raise ArgumentDomainError("reciprocal-egf needs a sequence")
            den = self.sequence
        else:
            if self.family != "truncated-geometric":
                if not isinstance(self.r, int) or self.r < 0:
                    raise ArgumentDomainError(f"r must be an integer >= 0, got {self.r!r}")
            if self.family.startswith("truncated"):
                if not isinstance(self.n, int) or self.n < 1:
                    raise ArgumentDomainError(f"n must be an integer >= 1, got {self.n!r}")
            if self.family == "laguerre":
                den = UmbralSequence.laguerre(self.r)
            elif self.family == "truncated-laguerre":
                den = UmbralSequence.laguerre(self.r).truncated(self.n)
            else:
                den = UmbralSequence.factorial().truncated(self.n)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def reciprocal_egf(cls, a, **kw) -> "KernelSpec":
        return cls("reciprocal-egf", sequence=_coerce_sequence(a), **kw)

    @classmethod
    def laguerre(cls, r: int, **kw) -> "KernelSpec":
        return cls("laguerre", r=r, **kw)

    @classmethod
    def truncated_laguerre(cls, r: int, n: int, **kw) -> "KernelSpec":
        return cls("truncated-laguerre", r=r, n=n, **kw)

    @classmethod
    def truncated_geometric(cls, n: int, **kw) -> "KernelSpec":
        return cls("truncated-geometric", n=n, **kw)

    @property
    def is_polynomial(self) -> bool:
        """True when the denominator is a finite polynomial (algebraic tail)."""
        return self.denominator.is_finite

    @property
    def label(self) -> str:
        if self.family == "reciprocal-egf":
            return f"reciprocal-egf({self.sequence.label})"
        if self.family == "laguerre":
            return f"laguerre({self.r})"
        if self.family == "truncated-laguerre":
            return f"truncated-laguerre({self.r},{self.n})"
        return f"truncated-geometric({self.n})"

    def as_truncated(self, n: int) -> "KernelSpec":
        """The same denominator cut after the ``x^n`` term."""
        if self.family == "laguerre":
            return KernelSpec.truncated_laguerre(self.r, n, eval_tol=self.eval_tol,
                                                 max_terms=self.max_terms)
        return KernelSpec.reciprocal_egf(self.denominator.truncated(n), eval_tol=self.eval_tol,
                                         max_terms=self.max_terms)

    def as_sequence_kernel(self) -> "KernelSpec":
        """Equivalent ``reciprocal-egf`` spec over the effective denominator."""
        return KernelSpec.reciprocal_egf(self.denominator, eval_tol=self.eval_tol,
                                         max_terms=self.max_terms)


def log_denominator(spec: KernelSpec, x: float) -> float:
    """``log E(x)`` for the kernel's denominator; requires ``E(x) > 0``."""
    v, scale = _log_sum(spec.denominator, float(x), spec.eval_tol, spec.max_terms)
    if not v > 0:
        raise KernelDomainError(
            f"denominator of {spec.label} is not positive at x={x} (value {v:g}e^{scale:g})")
    return math.log(v) + scale


def log_kernel(spec: KernelSpec, s: float, t: float) -> float:
    """``log`` of the kernel at ``(s, t)``; finite even where the kernel underflows."""
    return -log_denominator(spec, s * t)


def kernel_eval(spec: KernelSpec, s: float, t: float) -> float:
    """Return ``1 / E(s t)`` for the given kernel.

    Examples
    --------
    >>> round(kernel_eval(KernelSpec.truncated_geometric(1), 2.0, 3.0), 12)
    0.142857142857
    """
    if s <= 0:
        raise ArgumentDomainError(f"s must be positive, got {s}")
    if t < 0:
        raise ArgumentDomainError(f"t must be >= 0, got {t}")
    return math.exp(log_kernel(spec, s, t))


def kernel_derivative(spec: KernelSpec, x: float) -> float:
    """``d/dx [1 / E(x)] = -E'(x) / E(x)^2``.

    Equals the shifted coefficient series ``sum_k C_{k+1} x^k / k!`` without
    ever summing the alternating ``C`` coefficients.
    """
    x = float(x)
    log_e = log_denominator(spec, x)
    v, scale = _log_sum(spec.denominator, x, spec.eval_tol, spec.max_terms,
                        derivative=True)
    if v == 0:
        return 0.0
    return -math.copysign(math.exp(math.log(abs(v)) + scale - 2.0 * log_e), v)


def kernel_truncation_gap(spec: KernelSpec, n: int, x: float) -> float:
    """``1 / P_n(x) - 1 / E(x)`` where ``P_n`` keeps the terms ``k <= n`` of ``E``.

    Computed as ``(E - P_n) / (P_n E)`` with the tail summed directly, so
    the difference keeps full relative accuracy when it is tiny.
    """
    if spec.is_polynomial:
        raise ArgumentDomainError("truncation gap needs a kernel with an infinite series")
    if n < 1:
        raise ArgumentDomainError("n must be >= 1")
    x = float(x)
    if x == 0:
        return 0.0
    v, scale = _log_sum(spec.denominator, x, spec.eval_tol, spec.max_terms, start=n + 1)
    if v == 0:
        return 0.0
    log_p = log_denominator(spec.as_truncated(n), x)
    log_e = log_denominator(spec, x)
    return math.copysign(math.exp(math.log(abs(v)) + scale - log_p - log_e), v)


def kernel_eval_complex(spec: KernelSpec, z: complex) -> complex:
    """``1 / E(z)`` at complex argument ``z = s t``."""
    v, scale = _log_sum(spec.denominator, complex(z), spec.eval_tol, spec.max_terms)
    if v == 0:
        raise KernelDomainError(f"denominator of {spec.label} vanishes at z={z}")
    mag = -(math.log(abs(v)) + scale)
    if mag < -745.0:
        return 0j
    return cmath.exp(complex(mag, -cmath.phase(v)))


VERDICTS = ("exponential-decay", "sub-exponential", "non-decaying", "divergent-denominator")


@dataclass(frozen=True)
class DecayReport:
    """Outcome of probing the tail of a kernel for exponential decay."""

    grid: tuple
    kernel_values: tuple
    fitted_rate: float
    verdict: str
    residual: float = math.nan
    slope_ratio: float = math.nan
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "fitted_rate": self.fitted_rate,
            "residual": self.residual,
            "slope_ratio": self.slope_ratio,
            "note": self.note,
            "grid": list(self.grid),
            "kernel_values": list(self.kernel_values),
        }


def hp_decay_probe(spec: KernelSpec, s: float, t_max: float, n_points: int = 32,
                   residual_threshold: float = 0.02,
                   slope_ratio_threshold: float = 0.7) -> DecayReport:
    """Test whether ``t -> kernel(s, t)`` decays exponentially.

    The kernel is sampled on a geometric grid over ``[t_max / 1000, t_max]``
    and ``log K`` is fitted linearly in ``t`` over the points with
    ``t >= t_max / 8``.  Exponential decay is reported only when the fitted
    slope is negative, the local slope at the end of the tail is within
    ``slope_ratio_threshold`` of the slope at its start, and the largest fit
    residual is below ``residual_threshold`` times the total log drop.
    Algebraic (``t^-p``) and stretched-exponential tails both fail one of
    those tests and come back as ``sub-exponential``.

    Divergent or non-positive denominators are reported, not raised.
    """
    if t_max <= 0:
        raise ArgumentDomainError("t_max must be positive")
    if n_points < 8:
        raise ArgumentDomainError("n_points must be >= 8")
    if s <= 0:
        raise ArgumentDomainError("s must be positive")
    grid = np.geomspace(t_max * 1e-3, t_max, n_points)
    logs = []
    for t in grid:
        try:
            logs.append(log_kernel(spec, s, float(t)))
        except (DivergenceError, KernelDomainError) as exc:
            values = tuple(math.exp(v) for v in logs) + (math.nan,) * (n_points - len(logs))
            return DecayReport(tuple(grid.tolist()), values, math.nan,
                               "divergent-denominator", note=str(exc))
    logs = np.array(logs)
    values = tuple(np.exp(logs).tolist())
    tail = grid >= t_max / 8
    if tail.sum() < 3:
        tail[-3:] = True
    tt, ll = grid[tail], logs[tail]
    drop = ll[0] - ll[-1]
    slope, intercept = np.polyfit(tt, ll, 1)
    if not drop > 1e-9 * max(1.0, abs(ll[0])):
        return DecayReport(tuple(grid.tolist()), values, float(slope), "non-decaying")
    residual = float(np.max(np.abs(ll - (slope * tt + intercept))) / drop)
    first = (ll[1] - ll[0]) / (tt[1] - tt[0])
    last = (ll[-1] - ll[-2]) / (tt[-1] - tt[-2])
    ratio = float(last / first) if first != 0 else math.inf
    if slope < 0 and ratio >= slope_ratio_threshold and residual <= residual_threshold:
        verdict = "exponential-decay"
    else:
        verdict = "sub-exponential"
    return DecayReport(tuple(grid.tolist()), values, float(slope), verdict,
                       residual=residual, slope_ratio=ratio)
