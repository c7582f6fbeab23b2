"""Generalized Laplace transforms ``F(s) = int_0^inf f(t) / E(s t) dt``.

The improper integral is cut at a point ``T`` where an upper envelope of the
integrand has become negligible, the finite part is integrated adaptively
(QUADPACK through :func:`scipy.integrate.quad`) on geometrically growing
segments, and a tail estimate for ``[T, inf)`` is folded into the reported
error.  Whether the kernel itself decays exponentially is probed on every
run and reported in the result flags.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import pairwise
from math import comb, factorial
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import (ArgumentDomainError, ContourDivergenceError, DivergenceError,
                     NonIntegrableError, ToleranceError)
from .expression import FunctionExpr
from .kernels import (DecayReport, KernelSpec, hp_decay_probe, kernel_derivative,
                      kernel_eval_complex, kernel_truncation_gap, laguerre_exp_complex,
                      log_kernel)
from .umbral import UmbralSequence, coeff_C

FLAGS = ("tail-truncated", "finite-interval-mode", "hp-violated")

_TAIL_STEP = 1.25
_TAIL_SAFETY = 2.0
_GROWTH_LIMIT = 1000.0
_MAX_SPLIT = 6


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive quadrature and the tail cut-off."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    tail_epsilon: float = 1e-15
    max_interval: float = 1e6
    max_subdivisions: int = 200

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.tail_epsilon) <= 0:
            raise ArgumentDomainError("tolerances must be positive")
        if self.max_interval <= 0:
            raise ArgumentDomainError("max_interval must be positive")
        if self.max_subdivisions < 1:
            raise ArgumentDomainError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class TransformResult:
    value: float
    error_estimate: float
    cutoff_T: float
    decay: DecayReport | None
    flags: frozenset = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "cutoff_T": self.cutoff_T,
            "flags": sorted(self.flags),
            "decay_verdict": self.decay.verdict if self.decay else None,
        }


def _as_function(f) -> Callable:
    if isinstance(f, str):
        return FunctionExpr.parse(f)
    return f


def _envelope(f, t):
    """``max |f|`` over ``[t, 2t]`` sampled at nine points."""
    best = 0.0
    for u in np.linspace(t, 2.0 * t, 9):
        v = abs(f(float(u)))
        if not math.isfinite(v):
            return math.inf
        best = max(best, v)
    return best


def _log(x):
    return math.log(x) if x > 0 else -math.inf


def _tail(log_env, T):
    """Local power ``p`` of the envelope at ``T`` and the tail it implies.

    With ``G(t) ~ G(T) (t / T)^-p`` the tail integral is ``G(T) T / (p - 1)``;
    an exponential envelope shows up as a large ``p`` and the same formula
    gives ``~ G(T) / rate``.  A factor of two covers the secant bias.
    """
    l1 = log_env(T)
    if l1 == -math.inf:
        return math.inf, 0.0
    if not math.isfinite(l1):
        return -math.inf, math.inf
    l2 = log_env(_TAIL_STEP * T)
    if l2 == -math.inf:
        return math.inf, math.exp(l1) * T * (_TAIL_STEP - 1.0)
    if not math.isfinite(l2):
        return -math.inf, math.inf
    p = (l1 - l2) / math.log(_TAIL_STEP)
    if p <= 1:
        return p, math.inf
    return p, _TAIL_SAFETY * math.exp(l1) * T / (p - 1.0)


def _quad_once(func, a, b, epsabs, q: QuadratureConfig, complex_func):
    """One QUADPACK call; returns ``(value, error, problem message or None)``."""
    out = quad(func, a, b, epsabs=epsabs, epsrel=q.rel_tol, limit=q.max_subdivisions,
               full_output=1, complex_func=complex_func)
    if complex_func and isinstance(out[2], dict) and "real" in out[2]:
        # one full_output tuple per part
        msgs = [m for part in out[2].values() for m in part[3:4]]
    else:
        msgs = list(out[3:4])
    for msg in msgs:
        if isinstance(msg, str) and "roundoff" not in msg.lower():
            return out[0], out[1], msg.strip().splitlines()[0]
    return out[0], out[1], None


def _quad_piece(func, a, b, epsabs, q, complex_func, depth=0):
    val, err, problem = _quad_once(func, a, b, epsabs, q, complex_func)
    if problem is None:
        return val, err
    if depth >= _MAX_SPLIT:
        raise ToleranceError(
            f"quadrature on [{a:g}, {b:g}] did not meet tolerance: {problem}")
    mid = 0.5 * (a + b)
    v1, e1 = _quad_piece(func, a, mid, 0.5 * epsabs, q, complex_func, depth + 1)
    v2, e2 = _quad_piece(func, mid, b, 0.5 * epsabs, q, complex_func, depth + 1)
    return v1 + v2, e1 + e2


def _quad_segments(func, edges, q: QuadratureConfig, complex_func=False):
    """Sum of adaptive integrals over consecutive segments.

    A segment that exhausts ``max_subdivisions`` is bisected (at most
    ``_MAX_SPLIT`` levels, which covers long stretches of an oscillating
    integrand) before a :class:`ToleranceError` is raised.
    """
    nseg = len(edges) - 1
    total, err = 0.0, 0.0
    for a, b in pairwise(edges):
        val, e = _quad_piece(func, a, b, q.abs_tol / nseg, q, complex_func)
        total += val
        err += e
    return total, err


def _edges(t0, T):
    edges = [0.0]
    b = t0
    while b < T:
        edges.append(b)
        b *= 2.0
    edges.append(T)
    return edges


def _integrate(func, log_env, t0, q: QuadratureConfig, polynomial: bool, s: float,
               what: str, complex_func=False):
    """Integrate ``func`` over ``[0, inf)``; returns ``(value, error, T, tail)``."""
    T = min(t0, q.max_interval)
    while True:
        p, tail = _tail(log_env, T)
        if p > 1 and tail <= q.tail_epsilon:
            break
        if T >= q.max_interval:
            break
        if not polynomial and p <= 0 and s * T > _GROWTH_LIMIT:
            raise DivergenceError(
                f"{what}: integrand still growing at t={T:g}; no convergent tail")
        T = min(2.0 * T, q.max_interval)
    if not p > 1:
        cls = NonIntegrableError if polynomial else DivergenceError
        how = "grows" if p < 0 else f"decays only like t^-{p:.3g}"
        raise cls(f"{what}: integrand envelope {how} at t={T:g}; not integrable")
    value, err = _quad_segments(func, _edges(t0, T), q, complex_func)
    return value, err, T, tail


def _kernel_integral(f, spec: KernelSpec, s: float, q: QuadratureConfig,
                     decay: DecayReport | None, probe: bool = True) -> TransformResult:
    if decay is None and probe:
        decay = hp_decay_probe(spec, s, 200.0 / s)
    if decay is not None and decay.verdict == "divergent-denominator":
        raise DivergenceError(f"kernel {spec.label} at s={s:g}: {decay.note}")

    def integrand(t):
        k = math.exp(log_kernel(spec, s, t))
        return 0.0 if k == 0.0 else f(t) * k

    def log_env(t):
        return log_kernel(spec, s, t) + _log(_envelope(f, t))

    value, err, T, tail = _integrate(integrand, log_env, 1.0 / s, q, spec.is_polynomial,
                                     s, f"transform with {spec.label} at s={s:g}")
    return _result(value, err, T, tail, decay, q)


def _result(value, err, T, tail, decay, q):
    flags = set()
    if tail > 0:
        flags.add("tail-truncated")
    if decay is not None and decay.verdict != "exponential-decay":
        flags |= {"hp-violated", "finite-interval-mode"}
    if tail > q.tail_epsilon:
        flags.add("finite-interval-mode")
    return TransformResult(float(value), float(err + tail), float(T), decay, frozenset(flags))


def transform(f, spec: KernelSpec, s: float, q: QuadratureConfig | None = None,
              probe: bool = True) -> TransformResult:
    """Generalized Laplace transform ``int_0^inf f(t) / E(s t) dt``.

    ``f`` is a :class:`FunctionExpr`, an expression string, or any callable
    of one float.  With ``KernelSpec.laguerre(0)`` this is the ordinary
    Laplace transform.

    Raises
    ------
    DivergenceError
        The kernel denominator diverges, or the integrand does not decay.
    NonIntegrableError
        A polynomial (truncated) kernel cannot tame the growth of ``f``.
    ToleranceError
        The adaptive quadrature ran out of subdivisions.
    """
    q = q or QuadratureConfig()
    s = float(s)
    if not s > 0:
        raise ArgumentDomainError(f"s must be positive, got {s}")
    return _kernel_integral(_as_function(f), spec, s, q, None, probe)


def transform_truncated(f, r: int, n: int, s: float,
                        q: QuadratureConfig | None = None) -> TransformResult:
    """Transform with the denominator ``sum_{k<=n} (s t)^k / (k!)^(r+1)``.

    The kernel only decays like ``t^-n``; a non-integrable product raises
    :class:`NonIntegrableError`.
    """
    return transform(f, KernelSpec.truncated_laguerre(r, n), s, q)


def transform_many(f, spec: KernelSpec, s_values, q: QuadratureConfig | None = None,
                   workers: int = 1) -> list[TransformResult]:
    """Evaluate the transform on several ``s``; results keep the input order."""
    f = _as_function(f)
    if workers <= 1:
        return [transform(f, spec, s, q) for s in s_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: transform(f, spec, s, q), s_values))


def truncation_gap(f, r: int, n: int, s: float,
                   q: QuadratureConfig | None = None) -> TransformResult:
    """``F_r^[n](s) - F_r(s)`` integrated directly from the kernel difference.

    Subtracting two separately computed transforms loses everything below
    their quadrature error; this keeps relative accuracy down to the tiny
    gaps of high truncation orders.
    """
    q = q or QuadratureConfig()
    f = _as_function(f)
    s = float(s)
    spec = KernelSpec.laguerre(r)

    def integrand(t):
        return f(t) * kernel_truncation_gap(spec, n, s * t)

    def log_env(t):
        return _log(abs(kernel_truncation_gap(spec, n, s * t))) + _log(_envelope(f, t))

    value, err, T, tail = _integrate(integrand, log_env, 1.0 / s, q, True, s,
                                     f"truncation gap r={r}, n={n}")
    return _result(value, err, T, tail, None, q)


def transform_complex(f, spec: KernelSpec, s: complex,
                      q: QuadratureConfig | None = None) -> complex:
    """``int_0^inf f(t) / E(s t) dt`` for complex ``s`` (used by the inversion probe)."""
    q = q or QuadratureConfig()
    f = _as_function(f)
    s = complex(s)
    scale = abs(s)
    if scale == 0:
        raise ArgumentDomainError("s must be nonzero")

    def integrand(t):
        k = kernel_eval_complex(spec, s * t)
        return 0j if k == 0 else f(t) * k

    def log_env(t):
        return _log(abs(kernel_eval_complex(spec, s * t))) + _log(_envelope(f, t))

    value, _, _, _ = _integrate(integrand, log_env, 1.0 / scale, q, spec.is_polynomial,
                                scale, f"complex transform at s={s}", complex_func=True)
    return complex(value)


# properties --------------------------------------------------------------

PROPERTIES = ("linearity", "homothety", "scaling", "derivative-action")


def shifted_kernel_integral(f, spec: KernelSpec, s: float,
                            q: QuadratureConfig | None = None) -> TransformResult:
    """``int_0^inf f(t) sum_k C_{k+1} (s t)^k / k! dt``, via ``d/dx [1 / E(x)]``."""
    q = q or QuadratureConfig()
    f = _as_function(f)
    s = float(s)

    def integrand(t):
        return f(t) * kernel_derivative(spec, s * t)

    def log_env(t):
        return _log(abs(kernel_derivative(spec, s * t))) + _log(_envelope(f, t))

    value, err, T, tail = _integrate(integrand, log_env, 1.0 / s, q, spec.is_polynomial, s,
                                     f"shifted kernel integral with {spec.label}")
    return _result(value, err, T, tail, None, q)


def property_sides(prop: str, f, spec: KernelSpec, s: float, params: dict | None = None,
                   q: QuadratureConfig | None = None):
    """Both sides of a transform identity and their combined error estimate.

    ``params`` by property:

    * ``linearity``: ``g`` (second function), ``A``, ``B``
    * ``homothety``: ``x`` (rational scale of the sequence)
    * ``scaling``: ``d > 0``
    * ``derivative-action``: optional ``fprime`` (symbolic derivative otherwise)
    """
    q = q or QuadratureConfig()
    params = dict(params or {})
    f = _as_function(f)
    s = float(s)
    if prop == "linearity":
        g = _as_function(params["g"])
        A, B = params.get("A", 1), params.get("B", 1)
        combo = FunctionExpr.linear_combination(A, f, B, g)
        lhs = transform(combo, spec, s, q)
        r1, r2 = transform(f, spec, s, q), transform(g, spec, s, q)
        rhs = float(A) * r1.value + float(B) * r2.value
        err = lhs.error_estimate + abs(float(A)) * r1.error_estimate \
            + abs(float(B)) * r2.error_estimate
        return lhs.value, rhs, err
    if prop == "homothety":
        x = Fraction(params["x"])
        if x <= 0:
            raise ArgumentDomainError("homothety scale must be positive")
        seq = spec.denominator
        lhs = transform(f, KernelSpec.reciprocal_egf(seq.scaled(x)), s, q)
        rhs = transform(f, KernelSpec.reciprocal_egf(seq), float(x) * s, q)
        return lhs.value, rhs.value, lhs.error_estimate + rhs.error_estimate
    if prop == "scaling":
        d = Fraction(params["d"])
        if d <= 0:
            raise ArgumentDomainError("scaling factor must be positive")
        lhs = transform(f.rescaled(d), spec, s, q)
        rhs = transform(f, spec, s / float(d), q)
        return lhs.value, rhs.value / float(d), lhs.error_estimate + rhs.error_estimate / float(d)
    if prop == "derivative-action":
        fprime = params.get("fprime")
        fprime = f.derivative() if fprime is None else _as_function(fprime)
        decay = hp_decay_probe(spec, s, 200.0 / s)
        if decay.verdict == "divergent-denominator":
            raise DivergenceError(f"kernel {spec.label} diverges: {decay.note}")
        lhs = transform(fprime, spec, s, q)
        boundary = abs(f(lhs.cutoff_T)) * math.exp(log_kernel(spec, s, lhs.cutoff_T))
        if boundary > max(1e3 * q.tail_epsilon, 1e-12):
            raise ArgumentDomainError(
                f"boundary term f(T) K(sT) = {boundary:g} does not vanish; "
                "integration by parts is not justified")
        shifted = shifted_kernel_integral(f, spec, s, q)
        rhs = -s * shifted.value - f(0.0)
        return lhs.value, rhs, lhs.error_estimate + s * shifted.error_estimate
    raise ArgumentDomainError(f"unknown property {prop!r}; choose from {PROPERTIES}")


def verify_property(prop: str, f, spec: KernelSpec, s: float, params: dict | None = None,
                    q: QuadratureConfig | None = None) -> float:
    """Residual ``|LHS - RHS|`` of a transform identity, both sides by quadrature."""
    lhs, rhs, _ = property_sides(prop, f, spec, s, params, q)
    return abs(lhs - rhs)


# formal term tables --------------------------------------------------------

@dataclass(frozen=True)
class FormalTerm:
    """One exact term ``coefficient * s^s_power * t^t_power`` of the integrand.

    ``weight`` is ``C(n, k) c_{n-k} C_k(a)``; ``coefficient`` divides it by
    ``n!``.
    """

    n: int
    k: int
    weight: Fraction
    coefficient: Fraction
    s_power: int
    t_power: int


def formal_integrand_series(c, kind: str, a, N: int) -> list[list[FormalTerm]]:
    """Exact Cauchy-product rows of ``f(t) * sum_k C_k(a) (s t)^k / k!``.

    ``c`` holds ``c_0..c_N``.  For ``kind="taylor"`` they are the coefficients
    of ``f(t) = sum c_k t^k / k!`` and row ``n`` collects the terms of total
    ``t`` degree ``n``: ``C(n,k) c_{n-k} C_k s^k t^n / n!``.  For
    ``kind="laurent"`` ``f(t) = sum c_k t^-k / k!`` and the terms are
    ``C(n,k) c_{n-k} C_k s^k t^(2k-n) / n!``.

    The table is formal; integrating it term by term over ``[0, inf)``
    diverges and is deliberately not offered.
    """
    if kind not in ("taylor", "laurent"):
        raise ArgumentDomainError(f"kind must be 'taylor' or 'laurent', got {kind!r}")
    if not isinstance(N, int) or N < 0:
        raise ArgumentDomainError("N must be an integer >= 0")
    if len(c) < N + 1:
        raise ArgumentDomainError(f"need c_0..c_{N}, got {len(c)} values")
    c = [Fraction(v) for v in c[:N + 1]]
    C = coeff_C(a if isinstance(a, UmbralSequence) else UmbralSequence.explicit(a), N)
    rows = []
    for n in range(N + 1):
        row = []
        for k in range(n + 1):
            w = comb(n, k) * c[n - k] * C[k]
            t_power = n if kind == "taylor" else 2 * k - n
            row.append(FormalTerm(n, k, w, w / factorial(n), k, t_power))
        rows.append(row)
    return rows


def resum_formal(rows, s, t):
    """Evaluate a formal table at numeric ``(s, t)`` as a finite double sum."""
    return sum(float(term.coefficient) * s ** term.s_power * t ** term.t_power
               for row in rows for term in row)


# inversion ---------------------------------------------------------------

@dataclass(frozen=True)
class InversionResult:
    value: float
    error_estimate: float
    converged: bool
    experimental: bool
    diagnostics: dict

    def to_dict(self) -> dict:
        return {"value": self.value, "error_estimate": self.error_estimate,
                "converged": self.converged, "experimental": self.experimental,
                "diagnostics": self.diagnostics}


def bromwich_invert(F: Callable[[complex], complex], r: int, t: float, gamma: float,
                    q: QuadratureConfig | None = None, tau_max: float = 32.0,
                    panel_width: float = 1.0, nodes: int = 8,
                    tol: float = 1e-6) -> InversionResult:
    """Contour inversion ``(1/2 pi) int e_r((gamma + iu) t) F(gamma + iu) du``.

    ``F`` must satisfy ``F(conj z) = conj F(z)`` (transforms of real
    functions), which folds the contour onto ``u >= 0``.

    For ``r = 0`` this is the classical Bromwich integral, evaluated with
    QUADPACK's Fourier-integral routine over the whole half line.  For
    ``r >= 1`` the inversion is only conjectural: partial contour integrals
    up to ``tau = 2, 4, ..., tau_max`` are computed by Gauss-Legendre panels
    and returned with their diagnostics, flagged experimental.  When they do
    not settle, :class:`ContourDivergenceError` is raised carrying the
    report.
    """
    q = q or QuadratureConfig()
    if t <= 0:
        raise ArgumentDomainError("t must be positive")
    if not isinstance(r, int) or r < 0:
        raise ArgumentDomainError("r must be an integer >= 0")
    if r == 0:
        re = quad(lambda u: F(complex(gamma, u)).real, 0, np.inf, weight="cos", wvar=t,
                  epsabs=q.abs_tol, limlst=200, full_output=1)
        im = quad(lambda u: F(complex(gamma, u)).imag, 0, np.inf, weight="sin", wvar=t,
                  epsabs=q.abs_tol, limlst=200, full_output=1)
        scale = math.exp(gamma * t) / math.pi
        issues = [m for m in (re[3:4] + im[3:4]) if isinstance(m, str)]
        return InversionResult(float(scale * (re[0] - im[0])), float(scale * (re[1] + im[1])),
                               not issues, False,
                               {"method": "fourier-half-line", "r": 0, "t": t,
                                "gamma": gamma, "messages": issues})

    x, w = np.polynomial.legendre.leggauss(nodes)
    report = {"method": "panel-partial-sums", "r": r, "t": t, "gamma": gamma,
              "tau": [], "partial_values": [], "integrand_modulus": [],
              "experimental": True}
    total, u0, checkpoint = 0.0, 0.0, 2.0
    peak = 0.0
    try:
        while u0 < tau_max:
            u1 = u0 + panel_width
            mid, half = 0.5 * (u0 + u1), 0.5 * (u1 - u0)
            for xi, wi in zip(x, w):
                z = complex(gamma, mid + half * xi)
                val = laguerre_exp_complex(r, z * t) * F(z)
                total += float(half * wi * val.real)
                peak = max(peak, abs(val))
            u0 = u1
            if u0 >= checkpoint - 1e-12:
                z = complex(gamma, u0)
                report["tau"].append(u0)
                report["partial_values"].append(total / math.pi)
                report["integrand_modulus"].append(abs(laguerre_exp_complex(r, z * t) * F(z)))
                checkpoint *= 2.0
    except (DivergenceError, ArithmeticError) as exc:
        report["converged"] = False
        report["failure"] = str(exc)
        raise ContourDivergenceError(f"contour evaluation failed: {exc}", report) from exc
    vals = report["partial_values"]
    mods = report["integrand_modulus"]
    change = abs(vals[-1] - vals[-2]) if len(vals) > 1 else math.inf
    change = float(change)
    decaying = len(mods) > 1 and mods[-1] < mods[0] and mods[-1] <= 1e-3 * max(peak, 1e-300)
    converged = bool(change <= tol * max(1.0, abs(vals[-1])) and decaying)
    report["converged"] = converged
    report["last_change"] = change
    report["peak_modulus"] = peak
    if not converged:
        raise ContourDivergenceError(
            f"contour integrand does not decay for r={r} (modulus {mods[-1]:.3g} at "
            f"tau={report['tau'][-1]:g}, peak {peak:.3g})", report)
    return InversionResult(vals[-1], change, True, True, report)


def bromwich_probe(F, r: int, t: float, gamma: float, **kw) -> dict:
    """Run :func:`bromwich_invert` and always return its diagnostic report."""
    try:
        res = bromwich_invert(F, r, t, gamma, **kw)
    except ContourDivergenceError as exc:
        out = dict(exc.report)
        out["error"] = str(exc)
        return out
    out = dict(res.diagnostics)
    out["value"] = res.value
    return out
