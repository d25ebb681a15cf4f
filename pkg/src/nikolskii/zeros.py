"""Positive zeros q_{alpha,k} of the normalized Bessel function j_alpha.

Zeros are found by an upward bracket scan (step pi/8, below the minimal
zero gap) followed by a safeguarded Newton iteration that keeps a
sign-changing bracket at all times.  Tables are cached per order and can
be persisted to the directory named by NIKOLSKII_CACHE_DIR.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass, field

import numpy as np

from .core import ConsistencyError, DomainError, SearchError
from .specfun import j_norm_array

# Two-sided bound on the first zero for alpha > 0; the coefficients are
# directional roundings of 1.85575... and 1.03315... so that the lower
# constant is rounded down and the upper ones up.
_C1_LOWER = 1.855
_C1_UPPER = 1.8558
_C2_UPPER = 1.0332

_SCAN_STEP = math.pi / 8.0


def eq_first_zero_bounds(alpha: float) -> tuple[float, float]:
    """Algebraic two-sided bound sqrt(a(a+2)) < q_{a,1} < sqrt(a+1)(sqrt(a+2)+1)."""
    if alpha <= 0:
        raise DomainError("first-zero bounds require alpha > 0")
    lo = math.sqrt(alpha * (alpha + 2.0))
    hi = math.sqrt(alpha + 1.0) * (math.sqrt(alpha + 2.0) + 1.0)
    return lo, hi


def uniform_first_zero_bounds(alpha: float) -> tuple[float, float]:
    """Uniform bound a + c1 a^(1/3) < q_{a,1} < a + c1 a^(1/3) + c2 a^(-1/3)."""
    if alpha <= 0:
        raise DomainError("first-zero bounds require alpha > 0")
    third = alpha ** (1.0 / 3.0)
    return (alpha + _C1_LOWER * third,
            alpha + _C1_UPPER * third + _C2_UPPER / third)


def _j(alpha: float, x: float) -> float:
    return float(j_norm_array(alpha, x))


def _refine(alpha: float, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Safeguarded Newton inside a sign-changing bracket; returns (root, width)."""
    flo = _j(alpha, lo)
    fhi = _j(alpha, hi)
    if flo == 0.0:
        return lo, 0.0
    if fhi == 0.0:
        return hi, 0.0
    if flo * fhi > 0:
        raise SearchError(f"bracket [{lo}, {hi}] does not change sign")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = _j(alpha, x)
        if fx == 0.0:
            return x, 0.0
        if fx * flo < 0:
            hi = x
        else:
            lo, flo = x, fx
        if hi - lo <= tol:
            break
        deriv = -x * _j(alpha + 1.0, x) / (2.0 * alpha + 2.0)
        x_new = 0.5 * (lo + hi)
        if deriv != 0.0:
            cand = x - fx / deriv
            if lo < cand < hi:
                x_new = cand
        x = x_new
    else:
        raise SearchError("zero refinement did not converge")
    # two unconstrained Newton polish steps for full double precision
    x = 0.5 * (lo + hi)
    for _ in range(2):
        fx = _j(alpha, x)
        deriv = -x * _j(alpha + 1.0, x) / (2.0 * alpha + 2.0)
        if deriv == 0.0:
            break
        x = x - fx / deriv
    if not (lo - tol <= x <= hi + tol):
        x = 0.5 * (lo + hi)
    return x, hi - lo


def _scan_bracket(alpha: float, start: float, limit: float = 1e7) -> tuple[float, float]:
    a = start
    fa = _j(alpha, a)
    while a < limit:
        b = a + _SCAN_STEP
        fb = _j(alpha, b)
        if fa == 0.0:
            return a - 1e-9, a + 1e-9
        if fa * fb < 0:
            return a, b
        a, fa = b, fb
    raise SearchError(f"no sign change found scanning from {start}")


@dataclass(frozen=True)
class ZeroTable:
    """Strictly increasing positive zeros q_{alpha,1..K} of j_alpha."""

    alpha: float
    zeros: np.ndarray = field(repr=False)
    bracket_width: float

    def __post_init__(self):
        z = np.asarray(self.zeros, dtype=float)
        if z.size and (np.any(z <= 0) or np.any(np.diff(z) <= 0)):
            raise ConsistencyError("zero table must be strictly increasing and positive")
        object.__setattr__(self, "zeros", z)
        z.setflags(write=False)

    def q(self, k: int) -> float:
        """k-th positive zero, 1-indexed."""
        return float(self.zeros[k - 1])

    def ratios(self) -> np.ndarray:
        """r_k = q_k / q_1."""
        return self.zeros / self.zeros[0]

    def __len__(self) -> int:
        return int(self.zeros.size)


_cache_lock = threading.Lock()
_cache: dict[float, list[float]] = {}
_persisted_loaded = False


def _cache_path() -> str | None:
    d = os.environ.get("NIKOLSKII_CACHE_DIR")
    if not d:
        return None
    return os.path.join(d, "bessel_zeros.json")


def _load_persisted() -> None:
    global _persisted_loaded
    if _persisted_loaded:
        return
    _persisted_loaded = True
    path = _cache_path()
    if path is None or not os.path.exists(path):
        return
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        for key, zs in raw.items():
            _cache[float(key)] = [float(z) for z in zs]
    except (OSError, ValueError, json.JSONDecodeError):
        # a corrupt cache is ignored, never fatal
        pass


def _save_persisted() -> None:
    path = _cache_path()
    if path is None:
        return
    os.makedirs(os.path.dirname(path), exist_ok=True)
    tmp = path + ".tmp"
    data = {repr(a): zs for a, zs in _cache.items()}
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
    os.replace(tmp, path)


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def bessel_zero(order: float, k: int, tol: float = 1e-12) -> float:
    """k-th positive zero of j_alpha, certified by a sign-changing bracket."""
    if k < 1:
        raise DomainError(f"zero index must be >= 1, got {k}")
    return zero_table(order, k, tol).q(k)


def zero_table(order: float, count: int, tol: float = 1e-12,
               validate: bool = False) -> ZeroTable:
    """First `count` zeros of j_alpha; extends and reuses the per-order cache."""
    alpha = float(order)
    if not (alpha > -1.0):
        raise DomainError(f"need order alpha > -1, got {alpha}")
    if count < 1:
        raise DomainError(f"need count >= 1, got {count}")
    with _cache_lock:
        _load_persisted()
        known = list(_cache.get(alpha, []))
    if len(known) < count:
        while len(known) < count:
            if not known:
                if alpha > 0:
                    lo = max(eq_first_zero_bounds(alpha)[0],
                             uniform_first_zero_bounds(alpha)[0])
                    start = lo
                else:
                    start = 1e-8
            else:
                start = known[-1] + 0.5
            lo, hi = _scan_bracket(alpha, start)
            root, _ = _refine(alpha, lo, hi, tol)
            known.append(root)
        with _cache_lock:
            prev = _cache.get(alpha, [])
            if len(known) > len(prev):
                _cache[alpha] = known
                try:
                    _save_persisted()
                except OSError:
                    pass
    table = ZeroTable(alpha, np.array(known[:count]), tol)
    if validate:
        upper = zero_table(alpha + 1.0, count, tol, validate=False)
        validate_interlacing(table, upper)
    return table


def validate_interlacing(table: ZeroTable, table_next: ZeroTable) -> None:
    """Check q_{a,k} < q_{a+1,k} < q_{a,k+1} for all overlapping indices."""
    qa = table.zeros
    qb = table_next.zeros
    m = min(qa.size, qb.size)
    if not np.all(qa[:m] < qb[:m]):
        raise ConsistencyError("interlacing failed: q_{a,k} < q_{a+1,k} violated")
    if m > 1 and not np.all(qb[:m - 1] < qa[1:m]):
        raise ConsistencyError("interlacing failed: q_{a+1,k} < q_{a,k+1} violated")
