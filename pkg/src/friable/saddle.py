"""Saddle point alpha(x, y), the truncated Euler product zeta(s, y) on real and
complex arguments, the log-derivative quantities sigma_k, and the
Hildebrand-Tenenbaum approximation built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dickman
from .errors import ConvergenceError, RegionError
from .factor_sieve import PrimeTable, primes_up_to


@dataclass(frozen=True)
class SaddleData:
    """Saddle point and curvature data for one (x, y).

    sigma1 equals log x by construction of alpha; sigma2 is the second
    derivative of log zeta(s, y) at alpha and is positive.
    """

    x: float
    y: int
    u: float
    alpha: float
    zeta_alpha_y: float
    log_zeta_alpha_y: float
    sigma1: float
    sigma2: float
    xi_u: float


def _saddle_sums(alpha: float, log_p: np.ndarray):
    """(sum log p/(p^a - 1), sum (log p)^2 p^a/(p^a - 1)^2) for p over the table."""
    e = np.expm1(alpha * log_p)
    s1 = float(np.sum(log_p / e))
    s2 = float(np.sum(log_p * log_p * (1.0 + e) / (e * e)))
    return s1, s2


def solve_alpha(
    x: float,
    y: int,
    primes: PrimeTable | None = None,
    tol: float = 1e-13,
    max_iter: int = 200,
) -> SaddleData:
    """Solve sum_{p<=y} log p / (p^alpha - 1) = log x by safeguarded Newton.

    The left side is strictly decreasing in alpha, so a bisection bracket makes
    the iteration unconditionally convergent; the Newton start 1 - xi(u)/log y
    is already a near-root in Hildebrand-type ranges.
    """
    if y < 2:
        raise ValueError(f"need y >= 2, got {y}")
    if x < y:
        raise ValueError(f"need x >= y, got x={x}, y={y}")
    if primes is None or primes.limit < y:
        primes = primes_up_to(y)
    log_p = np.log(primes.primes[primes.primes <= y].astype(np.float64))
    log_x = math.log(x)
    u = log_x / math.log(y)
    xi_u = dickman.xi(u) if u != 1.0 else 0.0

    lo, hi = 1e-9, 4.0
    alpha = min(max(1.0 - xi_u / math.log(y), 0.05), 1.2)
    target = tol * max(log_x, 1.0)
    for iteration in range(max_iter):
        s1, s2 = _saddle_sums(alpha, log_p)
        g = s1 - log_x
        if abs(g) <= target:
            break
        if g > 0:
            lo = max(lo, alpha)
        else:
            hi = min(hi, alpha)
        step = g / s2  # g' = -s2
        nxt = alpha + step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        alpha = nxt
    else:
        raise ConvergenceError(
            f"saddle equation not solved to {tol:g} in {max_iter} iterations "
            f"for x={x}, y={y}"
        )
    log_zeta = float(np.sum(-np.log(-np.expm1(-alpha * log_p))))
    return SaddleData(
        x=float(x),
        y=int(y),
        u=u,
        alpha=alpha,
        zeta_alpha_y=math.exp(log_zeta),
        log_zeta_alpha_y=log_zeta,
        sigma1=s1,
        sigma2=s2,
        xi_u=xi_u,
    )


def _clog1p(z: np.ndarray) -> np.ndarray:
    """log(1 + z) for complex arrays, series-corrected for tiny |z|."""
    out = np.log1p(z.real * (2.0 + z.real) + z.imag * z.imag) / 2.0 + 1j * np.arctan2(
        z.imag, 1.0 + z.real
    )
    small = np.abs(z) < 1e-4
    if np.any(small):
        zs = z[small]
        out[small] = zs * (1 - zs * (1 / 2 - zs * (1 / 3 - zs / 4)))
    return out


def log_zeta_y(s, y: int, primes: PrimeTable | None = None, chunk: int = 64):
    """log of the y-smooth Euler product sum of -log(1 - p^{-s}) over p <= y;
    accepts scalar or array s with Re s > 0."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(s_arr.real <= 0):
        raise RegionError("zeta(s, y) requires Re s > 0")
    if primes is None or primes.limit < y:
        primes = primes_up_to(y)
    log_p = np.log(primes.primes[primes.primes <= y].astype(np.float64))
    out = np.empty(s_arr.shape, dtype=np.complex128)
    flat = s_arr.reshape(-1)
    res = out.reshape(-1)
    for i0 in range(0, len(flat), chunk):
        block = flat[i0 : i0 + chunk]
        z = np.exp(-np.multiply.outer(block, log_p))
        res[i0 : i0 + chunk] = -np.sum(_clog1p(-z), axis=1)
    return out[0] if np.isscalar(s) or np.asarray(s).ndim == 0 else out


def zeta_y(s, y: int, primes: PrimeTable | None = None):
    """Finite Euler product over p <= y; exact up to rounding for Re s > 0."""
    return np.exp(log_zeta_y(s, y, primes))


def ht_estimate(sd: SaddleData) -> float:
    """Hildebrand-Tenenbaum main term x^alpha zeta(alpha,y)/(alpha sqrt(2 pi sigma2))."""
    log_val = (
        sd.alpha * math.log(sd.x)
        + sd.log_zeta_alpha_y
        - math.log(sd.alpha)
        - 0.5 * math.log(2.0 * math.pi * sd.sigma2)
    )
    return math.exp(log_val)


def rankin_bound(sd: SaddleData) -> float:
    """x^alpha zeta(alpha, y), an upper bound for the smooth count."""
    return math.exp(sd.alpha * math.log(sd.x) + sd.log_zeta_alpha_y)


def alpha_vs_xi(sd: SaddleData) -> float:
    """Deviation alpha - (1 - xi(u)/log y); small in Hildebrand-type domains."""
    return sd.alpha - (1.0 - sd.xi_u / math.log(sd.y))
