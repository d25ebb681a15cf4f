"""Normalized Bessel functions, 1F2 series, Lommel functions and Jacobi/Gegenbauer polynomials.

The central object is the normalized Bessel function

    j_a(x) = 2^a Gamma(a+1) J_a(x) / x^a,

an even entire function with j_a(0) = 1.  Evaluation uses the ascending
power series where it is cancellation-free and scipy's J_a with a
log-space normalization factor elsewhere; the two regimes overlap so the
switch never lands in a bad region of either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import special as _sp

from .core import DomainError, EvalResult, PrecisionError, RangeError, dim_pi_exact

_LN2 = math.log(2.0)


def _series_mask(alpha: float, x: np.ndarray) -> np.ndarray:
    # (x/2)^2 <= max(0.8*(alpha+1), 1): first series ratio <= 0.8 (or x tiny),
    # so terms decay geometrically and no catastrophic cancellation occurs.
    return (x * x) <= 4.0 * max(0.8 * (alpha + 1.0), 1.0)


def _j_series(alpha: float, x: np.ndarray, max_terms: int = 400) -> np.ndarray:
    # j_a(x) = sum_k (-1)^k (x^2/4)^k / (k! (a+1)_k)
    z = -0.25 * x * x
    term = np.ones_like(x)
    acc = np.ones_like(x)
    for k in range(max_terms):
        term = term * z / ((k + 1.0) * (alpha + 1.0 + k))
        acc += term
        if np.all(np.abs(term) <= 1e-17 * (1.0 + np.abs(acc))):
            return acc
    raise PrecisionError("normalized Bessel series did not converge")


def j_norm_array(alpha: float, x) -> np.ndarray:
    """Vectorized j_alpha over a float array; even extension in x."""
    if not (alpha > -1.0) or not math.isfinite(alpha):
        raise DomainError(f"need order alpha > -1, got {alpha}")
    x = np.abs(np.asarray(x, dtype=float))
    if x.ndim == 0:
        return j_norm_array(alpha, x[None])[0]
    out = np.empty_like(x)
    small = _series_mask(alpha, x)
    if np.any(small):
        out[small] = _j_series(alpha, x[small])
    big = ~small
    if np.any(big):
        xb = x[big]
        jval = _sp.jv(alpha, xb)
        bad = ~np.isfinite(jval)
        if np.any(bad):
            raise RangeError("Bessel backend returned non-finite values")
        mag = np.abs(jval)
        res = np.zeros_like(xb)
        nz = mag > 0.0
        logn = alpha * _LN2 + math.lgamma(alpha + 1.0) - alpha * np.log(xb[nz])
        res[nz] = np.sign(jval[nz]) * np.exp(logn + np.log(mag[nz]))
        if np.any(~np.isfinite(res)):
            raise RangeError("overflow while normalizing Bessel values")
        out[big] = res
    return out


def bessel_j_norm(order: float, x: float) -> EvalResult:
    """j_alpha(x) with an absolute error estimate; requires alpha > -1."""
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    v = float(j_norm_array(order, x))
    scale = 1.0 if order >= -0.5 else (1.0 + abs(x)) ** (-order - 0.5)
    return EvalResult(v, 1e-13 * (scale + abs(v)))


def j_norm_deriv_array(alpha: float, x) -> np.ndarray:
    """Vectorized j_alpha'(x) = -x j_{alpha+1}(x) / (2 alpha + 2)."""
    xs = np.asarray(x, dtype=float)
    return -xs * j_norm_array(alpha + 1.0, xs) / (2.0 * alpha + 2.0)


def bessel_j_norm_deriv(order: float, x: float) -> EvalResult:
    """Derivative of j_alpha at x, via the order-raising identity."""
    if not (order > -1.0):
        raise DomainError(f"need order alpha > -1, got {order}")
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x}")
    inner = bessel_j_norm(order + 1.0, x)
    scale = abs(x) / (2.0 * order + 2.0)
    return EvalResult(-x * inner.value / (2.0 * order + 2.0),
                      scale * inner.est_abs_error + 1e-16 * abs(x))


def j_norm_taylor(nu: float, center: float, dx, n_terms: int = 5) -> np.ndarray:
    """Evaluate j_nu(center + dx) by a Taylor expansion about `center`.

    Coefficients follow from the ODE  t j'' + (2 nu + 1) j' + t j = 0
    differentiated repeatedly; intended for |dx| small (used to remove
    0/0 quotients at simple zeros of j_nu).
    """
    if center <= 0:
        raise DomainError("Taylor expansion center must be positive")
    dx = np.asarray(dx, dtype=float)
    derivs = [float(j_norm_array(nu, center)),
              float(j_norm_deriv_array(nu, center))]
    for m in range(n_terms - 1):
        nxt = -((m + 2.0 * nu + 1.0) * derivs[m + 1]
                + center * derivs[m]
                + (m * derivs[m - 1] if m >= 1 else 0.0)) / center
        derivs.append(nxt)
    acc = np.zeros_like(dx)
    fact = 1.0
    for m, c in enumerate(derivs):
        if m > 0:
            fact *= m
        acc = acc + c * dx ** m / fact
    return acc


@lru_cache(maxsize=256)
def decay_constant(alpha: float, inflate: float = 2.0) -> float:
    """Empirical constant C with |j_alpha(x)| <= C (1+x)^(-alpha-1/2) on [0, 600].

    The grid maximum is inflated (factor 2 by default) to absorb the
    sampling gap; the true constant of the decay estimate is not known
    in closed form.
    """
    x = np.linspace(0.0, 600.0, 60001)
    vals = np.abs(j_norm_array(alpha, x)) * (1.0 + x) ** (alpha + 0.5)
    return float(np.max(vals)) * inflate


@lru_cache(maxsize=256)
def tail_amplitude(alpha: float) -> float:
    """Tight constant C with |j_alpha(x)| <= C x^(-alpha-1/2) for x >= 1."""
    x = np.linspace(1.0, 600.0, 60001)
    vals = np.abs(j_norm_array(alpha, x)) * x ** (alpha + 0.5)
    # beyond the grid the amplitude has settled to its asymptote
    return float(np.max(vals)) * 1.02


def j_envelope(alpha: float, x) -> np.ndarray:
    """Pointwise bound min(1, C x^(-alpha-1/2)) for |j_alpha|, alpha >= -1/2."""
    if alpha < -0.5:
        raise DomainError("envelope bound requires alpha >= -1/2")
    xs = np.asarray(x, dtype=float)
    amp = tail_amplitude(alpha)
    with np.errstate(divide="ignore"):
        dec = np.where(xs > 0, amp * xs ** (-alpha - 0.5), np.inf)
    return np.minimum(1.0, dec)


def hypergeom_1f2(a: float, b1: float, b2: float, z: float,
                  tol: float = 1e-15, max_terms: int = 10000) -> EvalResult:
    """1F2(a; b1, b2; z) by direct summation with a run-length stop guard.

    Terms of the alternating series (z < 0) can dip below tolerance before
    the tail is actually negligible, hence the requirement of three
    consecutive small terms.  The error estimate includes the rounding
    floor of the largest partial sum, which is what limits accuracy for
    large |z|.
    """
    for b in (b1, b2):
        if b <= 0 and float(b).is_integer():
            raise DomainError(f"lower parameter {b} is a non-positive integer")
    term = 1.0
    acc = 1.0
    max_abs = 1.0
    small_run = 0
    for k in range(max_terms):
        term *= (a + k) * z / ((b1 + k) * (b2 + k) * (k + 1.0))
        acc += term
        max_abs = max(max_abs, abs(acc), abs(term))
        if abs(term) < tol * max(abs(acc), 1e-300):
            small_run += 1
            if small_run >= 3:
                return EvalResult(acc, abs(term) + 8e-16 * max_abs)
        else:
            small_run = 0
    raise PrecisionError(f"1F2 series did not converge within {max_terms} terms")


def _lommel_sum(alpha: float, z: float) -> tuple[float, float]:
    """Finite sum and remainder bound with S_{a,a+1}(z) = z^(a-1) (sum + r)."""
    if not (z > alpha > 0):
        raise DomainError(f"need z > alpha > 0, got alpha={alpha}, z={z}")
    n_trunc = int(math.floor(alpha + 2.0))
    acc = 0.0
    prod = 1.0  # prod_{v=1..k} (alpha - v + 1) v
    zz = 0.25 * z * z
    for k in range(n_trunc):
        if k > 0:
            prod *= (alpha - k + 1.0) * k
        acc += prod / zz ** k
    if float(alpha).is_integer() and alpha >= 0:
        rem = 0.0
    else:
        # 1/|Gamma(-alpha)| = Gamma(alpha+1) |sin(pi alpha)| / pi
        log_rem = (math.lgamma(n_trunc + 1.0) + math.lgamma(n_trunc - alpha)
                   + math.lgamma(alpha + 1.0)
                   + math.log(abs(math.sin(math.pi * alpha)) / math.pi)
                   - 2.0 * n_trunc * math.log(z / 2.0))
        rem = math.exp(log_rem)
    return acc, rem


def lommel_s(order: float, z: float) -> EvalResult:
    """Lommel function S_{alpha, alpha+1}(z) for z > alpha > 0.

    Exact (zero remainder) when alpha is a non-negative integer.
    """
    acc, rem = _lommel_sum(order, z)
    log_scale = (order - 1.0) * math.log(z)
    if log_scale > 700.0:
        raise RangeError("Lommel scaling overflows; use the log-space route")
    scale = math.exp(log_scale)
    return EvalResult(scale * acc, scale * (rem + 4e-16 * abs(acc)))


@dataclass(frozen=True)
class JacobiR:
    """Jacobi polynomial basis normalized so R_n(1) = 1."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= -1 or self.b <= -1:
            raise DomainError("Jacobi parameters must exceed -1")


@dataclass(frozen=True)
class Gegenbauer:
    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise DomainError("Gegenbauer parameter must be positive")


PolyBasisId = Union[JacobiR, Gegenbauer]


def _jacobi_p_raw(n: int, a: float, b: float, t):
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.ones_like(t)
    pkm1 = np.ones_like(t)
    pk = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * t
    for k in range(2, n + 1):
        c = 2.0 * k + a + b
        a1 = 2.0 * k * (k + a + b) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 1.0) * c * (c - 2.0)
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        pk, pkm1 = ((a2 + a3 * t) * pk - a4 * pkm1) / a1, pk
    return pk


def jacobi_r(n: int, a: float, b: float, t):
    """R_n^{(a,b)}(t) = P_n^{(a,b)}(t) / P_n^{(a,b)}(1); exact 1 at t = 1."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    num = _jacobi_p_raw(n, a, b, t)
    den = float(_jacobi_p_raw(n, a, b, np.asarray(1.0)))
    return num / den


def jacobi_r_matrix(n_max: int, a: float, b: float, t) -> np.ndarray:
    """Rows k = 0..n_max of R_k^{(a,b)} evaluated on the points t."""
    t = np.asarray(t, dtype=float)
    rows = np.empty((n_max + 1, t.size))
    rows[0] = 1.0
    at_one = np.empty(n_max + 1)
    at_one[0] = 1.0
    if n_max >= 1:
        rows[1] = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * t
        at_one[1] = 0.5 * (a - b) + 0.5 * (a + b + 2.0)
        for k in range(2, n_max + 1):
            c = 2.0 * k + a + b
            a1 = 2.0 * k * (k + a + b) * (c - 2.0)
            a2 = (c - 1.0) * (a * a - b * b)
            a3 = (c - 1.0) * c * (c - 2.0)
            a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
            rows[k] = ((a2 + a3 * t) * rows[k - 1] - a4 * rows[k - 2]) / a1
            at_one[k] = ((a2 + a3) * at_one[k - 1] - a4 * at_one[k - 2]) / a1
    return rows / at_one[:, None]


def gegenbauer_c(n: int, lam: float, t):
    """Gegenbauer polynomial C_n^lambda(t) by the three-term recurrence."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    t = np.asarray(t, dtype=float)
    if n == 0:
        return np.ones_like(t)
    ckm1 = np.ones_like(t)
    ck = 2.0 * lam * t
    for k in range(2, n + 1):
        ck, ckm1 = (2.0 * (k + lam - 1.0) * t * ck
                    - (k + 2.0 * lam - 2.0) * ckm1) / k, ck
    return ck


def poly_eval(basis: PolyBasisId, n: int, t: float) -> float:
    if isinstance(basis, JacobiR):
        return float(jacobi_r(n, basis.a, basis.b, t))
    if isinstance(basis, Gegenbauer):
        return float(gegenbauer_c(n, basis.lam, t))
    raise DomainError(f"unknown polynomial basis {basis!r}")


def kernel_gn(n: int, d: int, t):
    """Reproducing kernel of degree-n spherical polynomials on S^d.

    Closed Jacobi form: dim * R_n^{(d/2, (d-2)/2)}(t).
    """
    if n < 0 or d < 1:
        raise DomainError(f"need n >= 0, d >= 1, got n={n}, d={d}")
    dim = dim_pi_exact(n, d)
    return dim * jacobi_r(n, d / 2.0, (d - 2.0) / 2.0, t)


def kernel_gn_sum(n: int, d: int, t):
    """Same kernel as the Gegenbauer sum: sum_k ((k+lam)/lam) C_k^lam(t).

    Used as an independent cross-check of the closed form; d = 1 is the
    Chebyshev limit 1 + 2 sum_k T_k(t).
    """
    t = np.asarray(t, dtype=float)
    if d == 1:
        acc = np.ones_like(t)
        tkm1 = np.ones_like(t)
        tk = t.copy()
        for k in range(1, n + 1):
            acc = acc + 2.0 * tk
            tk, tkm1 = 2.0 * t * tk - tkm1, tk
        return acc
    lam = (d - 1.0) / 2.0
    acc = np.ones_like(t)
    c_prev = np.ones_like(t)
    if n >= 1:
        c_cur = 2.0 * lam * t
        acc = acc + (1.0 + lam) / lam * c_cur
        for k in range(2, n + 1):
            c_cur, c_prev = (2.0 * (k + lam - 1.0) * t * c_cur
                             - (k + 2.0 * lam - 2.0) * c_prev) / k, c_cur
            acc = acc + (k + lam) / lam * c_cur
    return acc
