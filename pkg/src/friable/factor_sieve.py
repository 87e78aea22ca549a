"""Segmented sieving of primes, largest/smallest prime factors and Mobius values,
plus the packed smoothness bitset with block prefix counts that backs all exact
counting in the package.

Conventions: the largest prime factor of 1 is 1, the smallest prime factor of 1
is the sentinel ``SPF_OF_ONE`` (standing in for +infinity), and mu(1) = 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientPrimesError, MemoryBudgetError

SPF_OF_ONE = np.iinfo(np.int64).max
DEFAULT_SEGMENT_SIZE = 1 << 22
DEFAULT_BLOCK_BITS = 4096
DEFAULT_MEMORY_BUDGET = 2 << 30

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending."""

    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)


def primes_up_to(limit: int) -> PrimeTable:
    """Sieve of Eratosthenes; ``limit < 2`` yields an empty table."""
    limit = int(limit)
    if limit < 2:
        return PrimeTable(limit, np.empty(0, dtype=np.int64))
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return PrimeTable(limit, np.nonzero(sieve)[0].astype(np.int64))


@dataclass(frozen=True)
class FactorSegment:
    """Largest/smallest prime factor and Mobius value for every n in [lo, hi)."""

    lo: int
    hi: int
    lpf: np.ndarray
    spf: np.ndarray
    mu: np.ndarray

    def _at(self, n: int, arr: np.ndarray):
        if not self.lo <= n < self.hi:
            raise IndexError(f"{n} outside window [{self.lo}, {self.hi})")
        return arr[n - self.lo]

    def largest_prime_factor(self, n: int) -> int:
        return int(self._at(n, self.lpf))

    def smallest_prime_factor(self, n: int) -> int:
        return int(self._at(n, self.spf))

    def mobius(self, n: int) -> int:
        return int(self._at(n, self.mu))


def sieve_segment(lo: int, hi: int, primes: PrimeTable) -> FactorSegment:
    """Exact lpf/spf/mu over the window [lo, hi) by segmented trial removal.

    Requires primes up to sqrt(hi - 1); every value left after removing those
    primes is itself prime.
    """
    lo, hi = int(lo), int(hi)
    if not 1 <= lo < hi:
        raise ValueError(f"need 1 <= lo < hi, got [{lo}, {hi})")
    root = math.isqrt(hi - 1)
    if primes.limit < root:
        raise InsufficientPrimesError(
            f"prime table up to {primes.limit} cannot resolve window up to {hi - 1}; "
            f"need primes up to {root}"
        )
    n = hi - lo
    lpf = np.ones(n, dtype=np.int64)
    spf = np.full(n, SPF_OF_ONE, dtype=np.int64)
    mu = np.ones(n, dtype=np.int64)
    rem = np.arange(lo, hi, dtype=np.int64)

    for p in primes.primes:
        p = int(p)
        if p > root:
            break
        start = ((lo + p - 1) // p) * p
        if start >= hi:
            continue
        sl = slice(start - lo, n, p)
        np.minimum(spf[sl], p, out=spf[sl])
        lpf[sl] = p
        mu[sl] = -mu[sl]
        # second and higher powers: kill mu, strip remaining factors of p
        pk = p * p
        while pk < hi:
            start_k = ((lo + pk - 1) // pk) * pk
            if start_k < hi:
                mu[start_k - lo :: pk] = 0
            pk *= p
        pk = p
        while pk < hi:
            start_k = ((lo + pk - 1) // pk) * pk
            if start_k < hi:
                rem[start_k - lo :: pk] //= p
            pk *= p

    left = rem > 1  # a single prime factor > sqrt(hi-1)
    lpf[left] = rem[left]
    np.minimum(spf[left], rem[left], out=spf[left])
    mu[left] = -mu[left]
    return FactorSegment(lo, hi, lpf, spf, mu)


def spf_sieve(limit: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..limit (entries 0 and 1 are 0)."""
    limit = int(limit)
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    unset = spf == 0
    unset[: min(2, limit + 1)] = False
    idx = np.nonzero(unset)[0]
    spf[idx] = idx
    return spf


def totient_sieve(limit: int) -> np.ndarray:
    """Euler totients for 0..limit."""
    limit = int(limit)
    phi = np.arange(limit + 1, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    if limit >= 1:
        sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    for p in np.nonzero(sieve)[0]:
        phi[p::p] -= phi[p::p] // p
    if limit >= 0:
        phi[0] = 0
    return phi


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of |n| by trial division, as (p, exponent) pairs."""
    n = abs(int(n))
    if n <= 1:
        return []
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    step = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return out


def distinct_primes(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def divisors(n: int) -> list[int]:
    """All positive divisors of |n|, ascending."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def totient(n: int) -> int:
    n = abs(int(n))
    if n == 0:
        return 0
    out = n
    for p, _ in factorize(n):
        out -= out // p
    return out


def mobius(n: int) -> int:
    n = abs(int(n))
    if n == 0:
        return 0
    mu = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


def tau(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def tau3(n: int) -> int:
    """Three-fold divisor function of |n|."""
    out = 1
    for _, e in factorize(n):
        out *= (e + 1) * (e + 2) // 2
    return out


def radical(n: int) -> int:
    out = 1
    for p, _ in factorize(n):
        out *= p
    return out


@dataclass
class SmoothIndex:
    """Packed smoothness bitset for 1..x (bit n set iff P(n) <= y) with prefix
    counts at fixed block boundaries, giving near-O(1) count queries."""

    x: int
    y: int
    bits: np.ndarray
    block_counts: np.ndarray
    block_bits: int = DEFAULT_BLOCK_BITS
    _pop: np.ndarray = field(default=_POPCOUNT8, repr=False)

    def contains(self, n: int) -> bool:
        if n < 1 or n > self.x:
            return False
        return bool((self.bits[n >> 3] >> (n & 7)) & 1)

    def count(self, t) -> int:
        """Number of y-smooth integers n with 1 <= n <= t."""
        t = min(int(t), self.x)
        if t < 1:
            return 0
        k = t + 1  # bits at indices < k
        b, rem_bits = divmod(k, self.block_bits)
        total = int(self.block_counts[b])
        if rem_bits:
            start = (b * self.block_bits) >> 3
            full_bytes, last_bits = divmod(rem_bits, 8)
            if full_bytes:
                total += int(self._pop[self.bits[start : start + full_bytes]].sum())
            if last_bits:
                mask = (1 << last_bits) - 1
                total += int(self._pop[self.bits[start + full_bytes] & mask])
        return total

    def progression_count(self, a: int, q: int, t) -> int:
        """Number of y-smooth n <= t with n = a (mod q)."""
        if q < 1:
            raise ValueError(f"modulus must be >= 1, got {q}")
        t = min(int(t), self.x)
        if q == 1:
            return self.count(t)
        a0 = a % q
        start = a0 if a0 else q
        if start > t:
            return 0
        total = 0
        bits = self.bits
        chunk = 1 << 22
        lo = start
        while lo <= t:
            hi = min(t, lo + (chunk - 1) * q)
            idx = np.arange(lo, hi + 1, q, dtype=np.int64)
            total += int(((bits[idx >> 3] >> (idx & 7).astype(np.uint8)) & 1).sum())
            lo = hi + q
        return total

    def smooth_values(self, lo: int, hi: int) -> np.ndarray:
        """All y-smooth n with lo <= n <= hi, ascending."""
        lo = max(int(lo), 1)
        hi = min(int(hi), self.x)
        if lo > hi:
            return np.empty(0, dtype=np.int64)
        b0, b1 = lo >> 3, (hi >> 3) + 1
        flags = np.unpackbits(self.bits[b0:b1], bitorder="little")
        ns = np.nonzero(flags)[0] + (b0 << 3)
        return ns[(ns >= lo) & (ns <= hi)].astype(np.int64)


def _smooth_segment_bits(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """Packed smoothness flags for integers in [lo, hi); lo, hi multiples of 8
    except possibly hi at the very end."""
    rem = np.arange(lo, hi, dtype=np.int64)
    n = hi - lo
    for p in primes:
        p = int(p)
        if p >= hi:
            break
        pk = p
        while pk < hi:
            start = ((lo + pk - 1) // pk) * pk
            if start < hi:
                rem[start - lo :: pk] //= p
            pk *= p
    smooth = rem == 1
    if n % 8:
        smooth = np.concatenate([smooth, np.zeros(8 - n % 8, dtype=bool)])
    return np.packbits(smooth, bitorder="little")


def build_smooth_index(
    x: int,
    y: int,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    block_bits: int = DEFAULT_BLOCK_BITS,
    threads: int = 1,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    primes: PrimeTable | None = None,
) -> SmoothIndex:
    """Streaming construction of the smoothness bitset over disjoint segments.

    Never materializes factorizations for all n at once: each segment strips the
    primes <= y from a residue array and marks n smooth iff nothing remains.
    Segments are processed data-parallel and merged in index order, so the
    result is bit-identical for any thread count.
    """
    x, y = int(x), int(y)
    if x < 1 or y < 2:
        raise ValueError(f"need x >= 1 and y >= 2, got x={x}, y={y}")
    if block_bits % 8 or block_bits & (block_bits - 1):
        raise ValueError("block_bits must be a power of two multiple of 8")
    segment_size = max(int(segment_size) // block_bits, 1) * block_bits
    threads = max(int(threads), 1)
    need = (x + 8) // 8 + 9 * segment_size * threads
    if need > memory_budget:
        raise MemoryBudgetError(
            f"building SmoothIndex(x={x}) needs about {need} bytes which exceeds "
            f"the memory budget of {memory_budget} bytes; raise the budget or "
            f"shrink segment_size"
        )
    if primes is None or primes.limit < min(y, x):
        primes = primes_up_to(min(y, x))
    plist = primes.primes[primes.primes <= y]

    n_bits = x + 1
    n_bytes = (n_bits + 7) // 8
    bits = np.zeros(n_bytes, dtype=np.uint8)
    bounds = list(range(0, n_bits, segment_size)) + [n_bits]
    jobs = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]

    def work(job):
        lo, hi = job
        return lo, _smooth_segment_bits(lo, hi, plist)

    if threads == 1 or len(jobs) == 1:
        results = map(work, jobs)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, jobs))
    for lo, packed in results:
        bits[lo >> 3 : (lo >> 3) + len(packed)] = packed

    per_byte = _POPCOUNT8[bits]
    starts = np.arange(0, n_bytes, block_bits // 8)
    block_sums = np.add.reduceat(per_byte, starts)
    block_counts = np.concatenate([[0], np.cumsum(block_sums)]).astype(np.int64)
    return SmoothIndex(x=x, y=y, bits=bits, block_counts=block_counts, block_bits=block_bits)
