"""Exact counting functions over the smoothness index: totals, coprime counts,
progression counts, the per-modulus error term E*, and the Mobius harmonic sum
over y-rough integers.

All counts are exact integers; E* values are exact rationals whose denominator
divides a totient.  Real arguments x are truncated to floor(x) at the counting
layer, with cut points like x/d handled in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import factor_sieve as fs
from .errors import IndexMismatchError

# exact-rational mode of phi_mu is the default up to this bound
PHI_MU_EXACT_LIMIT = 100_000


def _floor(x) -> int:
    return int(math.floor(x))


def _exact(x) -> Fraction:
    """Exact rational value of a float/int/Fraction argument."""
    return x if isinstance(x, Fraction) else Fraction(x)


def _check_index(index: fs.SmoothIndex, x, y: int) -> int:
    n = _floor(x)
    if index.y != y:
        raise IndexMismatchError(f"index built for y={index.y}, queried with y={y}")
    if index.x < n:
        raise IndexMismatchError(f"index covers x<={index.x}, queried at {n}")
    return n


@dataclass(frozen=True)
class ProgressionQuery:
    """Arguments of a progression count: smooth n <= x with n = a (mod q)."""

    x: float
    y: int
    a: int
    q: int

    def __post_init__(self):
        if self.x < 1:
            raise ValueError(f"need x >= 1, got {self.x}")
        if self.y < 2:
            raise ValueError(f"need y >= 2, got {self.y}")
        if self.a == 0:
            raise ValueError("shift a must be nonzero")
        if self.q < 1:
            raise ValueError(f"modulus must be >= 1, got {self.q}")


def psi(x, y: int, index: fs.SmoothIndex) -> int:
    """Count of y-smooth integers n <= x."""
    return index.count(_check_index(index, x, y))


def psi_coprime(x, y: int, q: int, index: fs.SmoothIndex, q_primes=None) -> int:
    """Count of y-smooth n <= x with (n, q) = 1.

    Inclusion-exclusion over the squarefree divisors of the y-smooth radical of
    q: a smooth n can only share primes <= y with q, and for squarefree smooth d
    the smooth multiples of d up to x are counted by psi(x/d).
    """
    n = _check_index(index, x, y)
    if q < 1:
        raise ValueError(f"need q >= 1, got {q}")
    if q_primes is None:
        q_primes = fs.distinct_primes(q)
    small = [p for p in q_primes if p <= y]
    total = 0
    for bitmask in range(1 << len(small)):
        d = 1
        sign = 1
        for i, p in enumerate(small):
            if bitmask >> i & 1:
                d *= p
                sign = -sign
        total += sign * index.count(n // d)
    return total


def psi_progression(query: ProgressionQuery, index: fs.SmoothIndex, starred: bool = False) -> int:
    """Count of y-smooth n <= x with n = a (mod q); the starred variant removes
    the term n = a itself whenever a is a positive member of S(x, y)."""
    n = _check_index(index, query.x, query.y)
    total = index.progression_count(query.a, query.q, n)
    if starred and query.a >= 1:
        total -= int(index.contains(query.a))
    return total


def e_star(query: ProgressionQuery, index: fs.SmoothIndex) -> Fraction:
    """Error of the starred progression count against its expected main term.

    For d = (a, q) this is Psi*(x,y;a,q) - Psi_{q/d}(x/d, y)/phi(q/d); the
    coprime case is d = 1.  Exact rational output.
    """
    _check_index(index, query.x, query.y)
    d = math.gcd(abs(query.a), query.q)
    qd = query.q // d
    starred = psi_progression(query, index, starred=True)
    xd = _exact(query.x) / d
    expected = Fraction(psi_coprime(math.floor(xd), query.y, qd, index), fs.totient(qd))
    return Fraction(starred) - expected


def _rough_mu(x: int, y: int, chunk: int = 1 << 21):
    """Pairs (n, mu(n)) over 1 <= n <= x with smallest prime factor > y."""
    primes = fs.primes_up_to(math.isqrt(x))
    lo = 1
    while lo <= x:
        hi = min(x + 1, lo + chunk)
        seg = fs.sieve_segment(lo, hi, primes)
        keep = (seg.spf > y) & (seg.mu != 0)
        ns = np.nonzero(keep)[0]
        yield ns + lo, seg.mu[ns]
        lo = hi


def phi_mu(x, y: int, mode: str = "auto"):
    """Signed harmonic Mobius sum over n <= x whose prime factors all exceed y.

    mode "exact" returns a Fraction, "float" a compensated float; "auto" picks
    exact for floor(x) <= PHI_MU_EXACT_LIMIT.
    """
    if x < 1:
        raise ValueError(f"need x >= 1, got {x}")
    n_max = _floor(x)
    if mode == "auto":
        mode = "exact" if n_max <= PHI_MU_EXACT_LIMIT else "float"
    if mode == "float":
        return math.fsum(
            float(m) / float(n) for ns, mus in _rough_mu(n_max, y) for n, m in zip(ns, mus)
        )
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    ns_all = []
    mu_all = []
    for ns, mus in _rough_mu(n_max, y):
        ns_all.extend(int(v) for v in ns)
        mu_all.extend(int(v) for v in mus)
    denom = math.lcm(*ns_all) if ns_all else 1
    total = sum(m * (denom // n) for n, m in zip(ns_all, mu_all))
    return Fraction(total, denom)
