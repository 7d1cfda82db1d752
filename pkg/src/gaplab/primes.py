"""Prime enumeration and primality testing over 64-bit ranges.

Enumeration is a segmented sieve of Eratosthenes that stores odd numbers
only.  Membership testing is a deterministic Miller-Rabin with a witness set
that is exact for every n < 2**64.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import CapacityError, ParameterError

ENUMERATION_LIMIT = 10**10
MEMBERSHIP_LIMIT = 2**63 - 1
DEFAULT_SEGMENT = 1 << 20

# First 12 primes: deterministic for n < 3.3e24, so certainly for n < 2**64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 0 or n >= 1 << 64:
        raise ParameterError(f"is_prime defined for 0 <= n < 2**64, got {n}")
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _small_primes(limit: int) -> np.ndarray:
    """Plain sieve for base primes <= limit."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _check_limit(hi: int, limit: int | None) -> None:
    cap = ENUMERATION_LIMIT if limit is None else limit
    if hi > cap + 1:
        raise CapacityError(f"enumeration bound {hi - 1} exceeds cap {cap}")


@dataclass(frozen=True)
class SieveSegment:
    """Primality flags for the numbers base_offset .. base_offset + length - 1.

    ``flags`` is bit-packed (numpy ``packbits`` big-endian bit order); bit j
    is set iff base_offset + j is prime.
    """

    base_offset: int
    length: int
    flags: np.ndarray

    def is_set(self, j: int) -> bool:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return bool(self.flags[j >> 3] >> (7 - (j & 7)) & 1)

    def primes(self) -> np.ndarray:
        bits = np.unpackbits(self.flags, count=self.length)
        return np.flatnonzero(bits).astype(np.int64) + self.base_offset

    @classmethod
    def from_primes(cls, base_offset: int, length: int, primes: np.ndarray) -> "SieveSegment":
        bits = np.zeros(length, dtype=np.uint8)
        bits[np.asarray(primes, dtype=np.int64) - base_offset] = 1
        return cls(base_offset, length, np.packbits(bits))


def _sieve_odd_window(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi) using base primes (which must cover sqrt(hi))."""
    out = []
    if lo <= 2 < hi:
        out.append(np.array([2], dtype=np.int64))
    first = lo | 1  # first odd >= lo
    if first < 3:
        first = 3
    if first >= hi:
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)
    count = (hi - first + 1) // 2
    flags = np.ones(count, dtype=bool)
    for p in base:
        p = int(p)
        if p == 2:
            continue
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, (first + p - 1) // p * p)
        if start % 2 == 0:
            start += p
        flags[(start - first) // 2 :: p] = False
    out.append(np.flatnonzero(flags).astype(np.int64) * 2 + first)
    return np.concatenate(out)


def segments(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT,
             limit: int | None = None, threads: int = 1) -> Iterator[SieveSegment]:
    """Yield consecutive SieveSegments tiling [lo, hi) in ascending order."""
    if lo < 0 or hi <= lo:
        raise ParameterError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    if segment_size <= 0:
        raise ParameterError("segment_size must be positive")
    _check_limit(hi, limit)
    base = _small_primes(math.isqrt(hi - 1) + 1)
    bounds = [(a, min(a + segment_size, hi)) for a in range(lo, hi, segment_size)]

    def work(ab):
        a, b = ab
        return SieveSegment.from_primes(a, b - a, _sieve_odd_window(a, b, base))

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # map() preserves submission order
            yield from pool.map(work, bounds)
    else:
        for ab in bounds:
            yield work(ab)


def primes_array(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT,
                 limit: int | None = None) -> np.ndarray:
    """All primes in [lo, hi) as an int64 array."""
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    if lo < 0:
        raise ParameterError("lo must be >= 0")
    _check_limit(hi, limit)
    base = _small_primes(math.isqrt(hi - 1) + 1)
    parts = [_sieve_odd_window(a, min(a + segment_size, hi), base)
             for a in range(lo, hi, segment_size)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def primes_up_to(limit: int, *, cap: int | None = None) -> np.ndarray:
    """Ascending primes in [2, limit]."""
    if limit < 0:
        raise ParameterError("limit must be >= 0")
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    return primes_array(2, limit + 1, limit=cap)


def primes_in_range(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT,
                    limit: int | None = None) -> Iterator[int]:
    """Stream the primes of the half-open range [lo, hi)."""
    if lo < 0 or hi <= lo:
        raise ParameterError(f"need 0 <= lo < hi, got [{lo}, {hi})")
    _check_limit(hi, limit)
    base = _small_primes(math.isqrt(hi - 1) + 1)
    for a in range(lo, hi, segment_size):
        for p in _sieve_odd_window(a, min(a + segment_size, hi), base):
            yield int(p)


def prime_count(lo: int, hi: int, limit: int | None = None) -> int:
    """Number of primes in [lo, hi)."""
    if hi <= lo:
        return 0
    return sum(int(np.count_nonzero(np.unpackbits(s.flags, count=s.length)))
               for s in segments(lo, hi, limit=limit))


def nth_prime_upper_bound(n: int) -> int:
    """An integer >= p_n (Rosser-Schoenfeld bound for n >= 6)."""
    if n < 6:
        return 13
    ln = math.log(n)
    return int(n * (ln + math.log(ln))) + 1


def first_primes(count: int, limit: int | None = None) -> np.ndarray:
    """The first ``count`` primes p_1 = 2, ..., p_count."""
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    ps = primes_up_to(nth_prime_upper_bound(count), cap=limit)
    return ps[:count]


def next_prime(n: int) -> int:
    """Smallest prime > n."""
    c = n + 1
    while not is_prime(c):
        c += 1
    return c
