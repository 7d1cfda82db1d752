"""Independent reference computations for the test suite.

Nothing here imports gaplab: each oracle is a direct transcription of a
definition, written for clarity rather than speed.
"""

from fractions import Fraction
from math import gcd, isqrt


def trial_division_is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def trial_division_primes(limit):
    """Primes <= limit, each tested by division by the smaller primes up to its root."""
    found = []
    for n in range(2, limit + 1):
        r = isqrt(n)
        for p in found:
            if p > r:
                found.append(n)
                break
            if n % p == 0:
                break
        else:
            found.append(n)
    return found


def bytearray_sieve(limit):
    """Plain (unsegmented, all-integer) sieve of Eratosthenes."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def gaps_below(hi):
    """(primes p_1..p_L, gaps d_1..d_L) for gaps with both ends below hi."""
    ps = bytearray_sieve(hi - 1)
    return ps[:-1], [b - a for a, b in zip(ps, ps[1:])]


def brute_statistic(d, stat, k):
    """All (n, value) of a gap statistic by direct evaluation, d 1-based via d[i-1]."""
    L = len(d)
    g = lambda i: d[i - 1]
    out = []
    if stat == "chain":
        for s in range(1, L - k + 2):
            out.append((s, Fraction(min(g(s + j) for j in range(k)))))
        return out
    for n in range(1, L + 1):
        block = [g(n - j) for j in range(k) if n - j >= 1]
        if len(block) < k:
            continue
        M = max(block)
        if stat == "forward" and n + 1 <= L:
            out.append((n, Fraction(g(n + 1), M)))
        elif stat == "backward" and n - k >= 1:
            out.append((n, Fraction(g(n - k), M)))
        elif stat == "twosided" and n - k >= 1 and n + 1 <= L:
            out.append((n, Fraction(min(g(n - k), g(n + 1)), M)))
    return out


def brute_records(d, stat, k):
    recs = []
    best = None
    for n, v in brute_statistic(d, stat, k):
        if best is None or v > best:
            best = v
            recs.append((n, v))
    return recs


def occupancy_oracle_admissible(H):
    """Admissible iff no prime p <= max(|H|, 2) has every class mod p occupied.

    Checks every prime up to 2 * |H| + 2, i.e. beyond the |H| shortcut.
    """
    for p in range(2, 2 * len(H) + 3):
        if trial_division_is_prime(p) and len({h % p for h in H}) == p:
            return False
    return True


def largest_prime_factor(n):
    lpf, p = 1, 2
    while p * p <= n:
        while n % p == 0:
            lpf, n = p, n // p
        p += 1
    return max(lpf, n)


def brute_psi(x, y):
    return sum(1 for n in range(1, x + 1) if largest_prime_factor(n) <= y)


def sign_changes(values):
    """Indices (1-based) where a nonzero value's sign differs from the last nonzero one."""
    last = 0
    out = []
    for i, v in enumerate(values, start=1):
        s = (v > 0) - (v < 0)
        if s == 0:
            continue
        if last and s != last:
            out.append(i)
        last = s
    return out


def covered_by_gcd(z, modulus, nu):
    return gcd(z + nu, modulus) > 1


def proven_composite(n, bases=(2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)):
    """True when some base is a Miller-Rabin witness, which proves n composite.

    False means "no witness among the bases", not "prime".
    """
    if n < 4:
        return False
    if n % 2 == 0:
        return True
    d, s = n - 1, 0
    while d % 2 == 0:
        d, s = d // 2, s + 1
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return True
    return False
