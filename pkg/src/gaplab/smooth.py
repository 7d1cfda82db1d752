"""Smooth-number counts and the survivor estimates of the covering construction."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import CapacityError, ParameterError
from .primes import primes_up_to

PSI_LIMIT = 10**10


class _PrimeTable:
    """Append-only prime list shared by the memoized recursion."""

    def __init__(self):
        self.primes: list[int] = []
        self.bound = 1
        self._lock = threading.Lock()

    def upto(self, y: int) -> int:
        """Extend to cover y; return pi(y)."""
        if y > self.bound:
            with self._lock:
                if y > self.bound:
                    new_bound = max(y, 2 * self.bound)
                    # prefix stays identical, so cached (x, k) entries remain valid
                    self.primes = [int(p) for p in primes_up_to(new_bound)]
                    self.bound = new_bound
        return _bisect_right(self.primes, y)


def _bisect_right(a: list[int], x: int) -> int:
    lo, hi = 0, len(a)
    while lo < hi:
        mid = (lo + hi) // 2
        if a[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


_TABLE = _PrimeTable()


def _largest_prime_factor(n: int) -> int:
    lpf, p = 1, 2
    while p * p <= n:
        while n % p == 0:
            lpf, n = p, n // p
        p += 1
    return max(lpf, n)


def _psi_brute(x: int, y: int) -> int:
    return sum(1 for n in range(1, x + 1) if _largest_prime_factor(n) <= y)


@lru_cache(maxsize=1 << 20)
def _psi(x: int, k: int) -> int:
    # numbers <= x whose prime factors are among the first k primes
    if x < 1:
        return 0
    if k == 0:
        return 1
    P = _TABLE.primes
    if P[k - 1] >= x:
        return x
    if k == 1:
        return x.bit_length()
    total = 1
    for i in range(k):
        p = P[i]
        q = x // p
        if q < p:
            # cofactors below p are automatically p-smooth
            total += sum(x // P[j] for j in range(i, k))
            break
        total += _psi(q, i + 1)
    return total


def psi_exact(x: int, y: int) -> int:
    """Number of n in [1, x] with every prime factor <= y (n = 1 included)."""
    x, y = int(x), int(y)
    if x < 1 or y < 2:
        raise ParameterError(f"need x >= 1 and y >= 2, got x={x}, y={y}")
    if x > PSI_LIMIT:
        raise CapacityError(f"x={x} exceeds psi cap {PSI_LIMIT}")
    if y >= x:
        return x
    if x <= 30:
        return _psi_brute(x, y)
    k = _TABLE.upto(y)
    return _psi(x, k)


def psi_rankin_bound(x: float, y: float) -> float:
    """x * exp(-(log_3 y / log y) log x + log_2 y), the smooth bound without its O-term.

    Diagnostic only: the dropped error term makes it non-effective.
    """
    if x < 1:
        raise ParameterError("x must be >= 1")
    if not y > math.exp(math.e):
        raise ParameterError("psi_rankin_bound requires y > e^e")
    ly = math.log(y)
    l2 = math.log(ly)
    l3 = math.log(l2)
    return x * math.exp(-(l3 / ly) * math.log(x) + l2)


def smooth_survivor_bound(U: int, w: int, m: int) -> float:
    """(log U)^(m+1) * Psi(U, w): bound on survivors composed of small primes."""
    if U < 2 or w < 2 or m < 0:
        raise ParameterError("need U >= 2, w >= 2, m >= 0")
    return math.log(U) ** (m + 1) * psi_exact(U, w)


@dataclass(frozen=True)
class SurvivorEstimate:
    n0_exact: int
    n0_pnt: float
    smooth_term: float | None


def _divisor_products(U: int, bases: Sequence[int]) -> list[int]:
    """All products of powers of ``bases`` that are <= U (distinct, sorted)."""
    prods = {1}
    for b in bases:
        new = set()
        for d in prods:
            while d <= U:
                new.add(d)
                d *= b
        prods = new
    return sorted(prods)


def survivor_forms(R: int, U: int, H: Sequence[int] = (), q: int | None = None) -> set[int]:
    """The n in (R/2, U] of the form p * q^a * prod h_i^(a_i) with p prime."""
    bases = list(H) + ([q] if q else [])
    ps = primes_up_to(U)
    out: set[int] = set()
    for d in _divisor_products(U, bases):
        lo = R // (2 * d) + 1  # p*d > R/2
        hi = U // d
        for p in ps[(ps >= lo) & (ps <= hi)]:
            out.add(int(p) * d)
    return out


def survivor_estimate(R: int, U: int, H: Sequence[int] = (), q: int | None = None,
                      w: int | None = None) -> SurvivorEstimate:
    """Exact count of large-prime-form survivors against its PNT approximation."""
    if R < 2 or U < 2:
        raise ParameterError("need R >= 2 and U >= 2")
    exact = len(survivor_forms(R, U, H, q))
    factor = 1.0
    if q:
        factor /= 1 - 1 / q
    for h in H:
        factor /= 1 - 1 / h
    pnt = (U / math.log(U) - R / (2 * math.log(R))) * factor
    smooth = smooth_survivor_bound(U, w, len(H)) if w is not None else None
    return SurvivorEstimate(exact, pnt, smooth)
