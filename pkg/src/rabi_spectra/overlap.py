"""Displaced-Fock overlap coefficients and displacement-operator matrix elements.

The eigenproblem couples two families of displaced number states, one
displaced by +g and one by -g. Their mutual overlaps reduce to matrix
elements of a single displacement by 2g,

    ⟨m|D(β)|n⟩ = sqrt(p!/q!) · base^(q-p) · e^(-|β|²/2) · L_p^(q-p)(|β|²),

with p = min(m, n), q = max(m, n), base = β for m >= n and -β* otherwise,
and L an associated Laguerre polynomial evaluated by its three-term
recurrence. This route is numerically stable over the whole working domain
(m, n <= 400, coupling |g| <= 1.5), unlike the textbook alternating
factorial sum, which cancels catastrophically once m, n and g are large
(condition number ~1e20 at m = n = 100, g = 1.5). The alternating sum is
still provided, in log-magnitude/sign form, as an independent cross-check
path for the regimes where it is well conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "log_factorial",
    "displaced_overlap",
    "displaced_overlap_series",
    "overlap_ab",
    "overlap_ba",
    "displacement_element",
    "displacement_matrix",
    "OverlapMatrix",
    "overlap_matrix",
]

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def log_factorial(n: int) -> float:
    """ln(n!) for integer n >= 0, accurate to ~1 ulp up to n = 400 and beyond."""
    if n < 0:
        raise ValueError("log_factorial requires n >= 0")
    return math.lgamma(n + 1)


def _laguerre_seq(alpha: int, x: float, kmax: int) -> np.ndarray:
    """L_k^(alpha)(x) for k = 0..kmax by upward three-term recurrence.

    Out-of-range arguments may overflow to inf/nan; callers detect that and
    signal OverflowError, so the intermediate warnings are suppressed here.
    """
    out = np.empty(kmax + 1)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + alpha - x
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(2, kmax + 1):
            out[k] = ((2 * k - 1 + alpha - x) * out[k - 1] - (k - 1 + alpha) * out[k - 2]) / k
    return out


def _unit_power(base: complex, alpha: int) -> complex:
    """(base/|base|)^alpha, exact for bases on the real or imaginary axis."""
    if alpha == 0:
        return 1.0 + 0.0j
    re, im = base.real, base.imag
    if im == 0.0:
        return complex(1.0 if re > 0 else (-1.0) ** alpha)
    if re == 0.0:
        unit = _I_POWERS[alpha % 4]
        return unit if im > 0 else unit * (-1.0) ** alpha
    return (base / abs(base)) ** alpha


def displaced_overlap(m: int, n: int, g: float) -> float:
    """Overlap coefficient between number states displaced by +g and -g.

    Equals (-1)^n ⟨m|D(2g)|n⟩; symmetric in (m, n) and real for real g.
    Accurate to better than 1e-12 absolute for m, n <= 400 and |g| <= 1.5.
    At g = 0 returns (-1)^m δ_mn exactly.
    """
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be >= 0")
    if not math.isfinite(g):
        raise ValueError("g must be finite")
    if g == 0.0:
        return (-1.0) ** m if m == n else 0.0
    p, q = (m, n) if m <= n else (n, m)
    alpha = q - p
    x = 4.0 * g * g
    lag = _laguerre_seq(alpha, x, p)[p]
    log_mag = 0.5 * (log_factorial(p) - log_factorial(q)) - 0.5 * x
    if alpha:
        log_mag += alpha * math.log(2.0 * abs(g))
    # base = 2g for m >= n, -2g for m < n; overall factor (-1)^n on top.
    base_negative = (g < 0.0) != (m < n)
    sign = (-1.0) ** (n + (alpha if base_negative else 0))
    value = sign * math.exp(log_mag) * lag
    if not math.isfinite(value):
        raise OverflowError(f"displaced_overlap({m}, {n}, {g}) is not representable")
    return value


def displaced_overlap_series(m: int, n: int, g: float) -> float:
    """Same coefficient via the alternating factorial sum.

    Evaluated term-by-term in log-magnitude/sign form with exact (fsum)
    accumulation. Reference path only: the sum is alternating and its
    largest term can exceed the result by many orders of magnitude, so
    accuracy degrades once roughly (2g)² · min(m, n) grows large. Reliable
    to ~1e-12 for m, n <= 30 with |g| <= 0.5 and to ~1e-8 at |g| = 1.
    """
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be >= 0")
    if not math.isfinite(g):
        raise ValueError("g must be finite")
    if g == 0.0:
        return (-1.0) ** m if m == n else 0.0
    log_2g = math.log(2.0 * abs(g))
    sign_2g = 1.0 if g > 0.0 else -1.0
    half_lmn = 0.5 * (log_factorial(m) + log_factorial(n))
    logs = []
    signs = []
    for i in range(min(m, n) + 1):
        logs.append(half_lmn + (m + n - 2 * i) * log_2g
                    - log_factorial(m - i) - log_factorial(n - i) - log_factorial(i))
        signs.append((-1.0) ** i * sign_2g ** ((m + n) % 2))
    top = max(logs)
    total = math.fsum(s * math.exp(lg - top) for lg, s in zip(logs, signs))
    value = math.exp(top - 2.0 * g * g) * total
    if not math.isfinite(value):
        raise OverflowError(f"displaced_overlap_series({m}, {n}, {g}) is not representable")
    return value


def overlap_ab(m: int, n: int, g: float) -> float:
    """⟨m (displaced by +g) | n (displaced by -g)⟩ = (-1)^n times the overlap coefficient."""
    return (-1.0) ** n * displaced_overlap(m, n, g)


def overlap_ba(m: int, n: int, g: float) -> float:
    """⟨m (displaced by -g) | n (displaced by +g)⟩ = (-1)^m times the overlap coefficient."""
    return (-1.0) ** m * displaced_overlap(m, n, g)


def _entry(beta: complex, m: int, n: int, lag: float, x: float) -> complex:
    """Assemble ⟨m|D(β)|n⟩ from a precomputed Laguerre value."""
    p, q = (m, n) if m <= n else (n, m)
    alpha = q - p
    base = beta if m >= n else -beta.conjugate()
    log_mag = 0.5 * (log_factorial(p) - log_factorial(q)) - 0.5 * x
    if alpha:
        log_mag += alpha * math.log(abs(beta))
    return _unit_power(base, alpha) * math.exp(log_mag) * lag


def displacement_element(beta: complex, m: int, n: int) -> complex:
    """Matrix element ⟨m| exp(β a† - β* a) |n⟩ of the displacement operator.

    Accurate to ~1e-12 for m, n <= 400 within the documented domain
    |β| <= 4. β = 0 gives δ_mn exactly.
    """
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be >= 0")
    beta = complex(beta)
    if beta == 0:
        return complex(1.0 if m == n else 0.0)
    p = min(m, n)
    x = abs(beta) ** 2
    lag = _laguerre_seq(abs(m - n), x, p)[p]
    value = _entry(beta, m, n, lag, x)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise OverflowError(f"displacement_element({beta}, {m}, {n}) is not representable")
    return value


def displacement_matrix(beta: complex, n: int) -> np.ndarray:
    """Dense (n+1) x (n+1) matrix of ⟨m| exp(β a† - β* a) |k⟩.

    Entries are bit-identical to individual ``displacement_element`` calls;
    the bulk version just shares one Laguerre recurrence per diagonal.
    """
    beta = complex(beta)
    dim = n + 1
    out = np.zeros((dim, dim), dtype=complex)
    if beta == 0:
        np.fill_diagonal(out, 1.0)
        return out
    x = abs(beta) ** 2
    for alpha in range(dim):
        lag = _laguerre_seq(alpha, x, n - alpha)
        for p in range(dim - alpha):
            out[p + alpha, p] = _entry(beta, p + alpha, p, lag[p], x)
            if alpha:
                out[p, p + alpha] = _entry(beta, p, p + alpha, lag[p], x)
    return out


@dataclass(frozen=True)
class OverlapMatrix:
    """Table of displaced-Fock overlap coefficients for one coupling g.

    ``values[m, k]`` holds the coefficient for indices (m, k); the array is
    bitwise symmetric and read-only.
    """

    g: float
    n: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


def overlap_matrix(n: int, g: float) -> OverlapMatrix:
    """Build the (n+1) x (n+1) overlap table, entry-compatible with ``displaced_overlap``."""
    if n < 0:
        raise ValueError("truncation must be >= 0")
    dim = n + 1
    values = np.empty((dim, dim))
    if g == 0.0:
        values[:] = 0.0
        np.fill_diagonal(values, (-1.0) ** np.arange(dim))
        return OverlapMatrix(g=g, n=n, values=values)
    x = 4.0 * g * g
    log_2g = math.log(2.0 * abs(g))
    for alpha in range(dim):
        lag = _laguerre_seq(alpha, x, n - alpha)
        for p in range(dim - alpha):
            q = p + alpha
            log_mag = 0.5 * (log_factorial(p) - log_factorial(q)) - 0.5 * x
            if alpha:
                log_mag += alpha * log_2g
            # upper-triangle entry (m=p, n=q) has base -2g, negative when g > 0
            sign = (-1.0) ** (q + (alpha if g > 0.0 else 0))
            value = sign * math.exp(log_mag) * lag[p]
            values[p, q] = value
            values[q, p] = value
    if not np.all(np.isfinite(values)):
        raise OverflowError(f"overlap_matrix(n={n}, g={g}) is not representable")
    return OverlapMatrix(g=g, n=n, values=values)
