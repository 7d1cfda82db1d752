"""Sign changes of weighted gap sums sum_i alpha_i d_{n+i}.

All arithmetic is exact.  A zero value is sign-neutral: it is counted but
neither creates a sign change nor resets the last nonzero sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .primes import first_primes


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class SignPattern:
    alphas: tuple[Fraction, ...]

    def __post_init__(self):
        alphas = tuple(Fraction(a) for a in self.alphas)
        if not alphas:
            raise ParameterError("pattern needs at least one coefficient")
        if all(a == 0 for a in alphas):
            raise ParameterError("pattern coefficients are all zero")
        object.__setattr__(self, "alphas", alphas)

    @property
    def length(self) -> int:
        return len(self.alphas)

    def integer_coefficients(self) -> list[int]:
        """Coefficients scaled by a positive integer so all are integral."""
        den = math.lcm(*(a.denominator for a in self.alphas))
        return [int(a * den) for a in self.alphas]

    def scaled(self, c) -> "SignPattern":
        return SignPattern(tuple(Fraction(c) * a for a in self.alphas))


def parse_pattern(text: str) -> SignPattern:
    return SignPattern(tuple(Fraction(t.strip()) for t in text.split(",") if t.strip()))


def alpha_from_a(a: Sequence) -> SignPattern:
    """Partial sums alpha_j = a_1 + ... + a_j (j < k) of a zero-sum coefficient list."""
    a = [Fraction(x) for x in a]
    if len(a) < 2:
        raise ParameterError("need k >= 2 coefficients")
    if sum(a) != 0:
        raise ParameterError("coefficients must sum to zero, otherwise no sign changes are possible")
    alphas = []
    s = Fraction(0)
    for x in a[:-1]:
        s += x
        alphas.append(s)
    return SignPattern(tuple(alphas))


def _gaps(count: int) -> np.ndarray:
    """d_1 .. d_count as an int64 array (0-based)."""
    return np.diff(first_primes(count + 1))


def weighted_sum(pattern: SignPattern, n: int, gaps: Sequence[int] | None = None) -> Fraction:
    """sum_{i=1..l} alpha_i d_{n+i} as an exact rational."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    need = n + pattern.length
    if gaps is None:
        gaps = _gaps(need)
    elif len(gaps) < need:
        raise ParameterError("not enough gaps supplied")
    return sum((a * int(gaps[n + i - 1]) for i, a in enumerate(pattern.alphas, start=1)),
               Fraction(0))


@dataclass(frozen=True)
class ConditionFlags:
    polya: bool
    cond_i_ratio: Fraction
    cond_ii: bool
    cond_3_1: bool

    def as_dict(self) -> dict:
        return {"polya": self.polya, "cond_i_ratio": str(self.cond_i_ratio),
                "cond_ii": self.cond_ii, "cond_3_1": self.cond_3_1}


def condition_flags(pattern: SignPattern) -> ConditionFlags:
    al = pattern.alphas
    signs = {_sgn(a) for a in al if a != 0}
    polya = len(signs) > 1
    ratio = abs(sum(al)) / sum(abs(a) for a in al)
    total = sum(abs(a) for a in al)
    cond_ii = False
    for j, aj in enumerate(al):
        if aj == 0:
            continue
        rest = total - abs(aj)
        if rest < abs(aj) and all(_sgn(a) != _sgn(aj) for i, a in enumerate(al)
                                  if i != j and a != 0):
            cond_ii = True
            break
    nz = [a for a in al if a != 0]
    cond_3_1 = _sgn(nz[0]) != _sgn(nz[-1])
    return ConditionFlags(polya, ratio, cond_ii, cond_3_1)


@dataclass
class SignChangeReport:
    pattern: SignPattern
    N: int
    changes: list[int]
    positive: int
    negative: int
    zero: int
    flags: ConditionFlags

    def as_dict(self) -> dict:
        return {"alphas": [str(a) for a in self.pattern.alphas], "N": self.N,
                "change_count": len(self.changes), "changes": self.changes,
                "positive": self.positive, "negative": self.negative, "zero": self.zero,
                "flags": self.flags.as_dict()}


def sum_values(pattern: SignPattern, N: int, gaps: np.ndarray | None = None) -> np.ndarray:
    """Integer multiples (same signs) of the weighted sums for n = 1..N."""
    coef = pattern.integer_coefficients()
    ell = len(coef)
    if gaps is None:
        gaps = _gaps(N + ell)
    gaps = np.asarray(gaps)
    big = max(abs(c) for c in coef) * ell * int(gaps[: N + ell].max()) >= 1 << 62
    dtype = object if big else np.int64
    vals = np.zeros(N, dtype=dtype)
    for i, c in enumerate(coef, start=1):
        if c:
            vals = vals + c * gaps[i : i + N].astype(dtype)
    return vals


def scan_sign_changes(pattern: SignPattern, N: int, gaps: np.ndarray | None = None) -> SignChangeReport:
    """Evaluate the weighted sum at n = 1..N and locate its sign changes."""
    if N < pattern.length + 2:
        raise ParameterError(f"N must be >= {pattern.length + 2}")
    vals = sum_values(pattern, N, gaps)
    signs = np.array([_sgn(v) for v in vals], dtype=np.int8) if vals.dtype == object \
        else np.sign(vals).astype(np.int8)
    nz = np.flatnonzero(signs)
    flips = nz[1:][signs[nz[1:]] != signs[nz[:-1]]]
    return SignChangeReport(
        pattern=pattern, N=N, changes=(flips + 1).tolist(),
        positive=int(np.count_nonzero(signs > 0)), negative=int(np.count_nonzero(signs < 0)),
        zero=int(np.count_nonzero(signs == 0)), flags=condition_flags(pattern))
