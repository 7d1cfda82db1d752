"""Consecutive prime gaps and their record statistics.

Gaps are indexed absolutely: p_1 = 2 and d_n = p_{n+1} - p_n.  A gap is
*complete* inside a scan bound ``hi`` when both of its endpoint primes are
below ``hi``; every statistic here only uses complete gaps.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParameterError
from .primes import first_primes, prime_count, primes_array, primes_in_range

SCHEMA_VERSION = 1
STATS = ("forward", "backward", "twosided", "chain")

# e^(e^e); log_4 x > 0 exactly above this point
RANKIN_POLE = math.exp(math.exp(math.e))


@dataclass(frozen=True)
class GapRow:
    n: int
    p: int
    d: int


def gap_stream(lo: int, hi: int, pi_hint: int | None = None) -> Iterator[GapRow]:
    """Yield (n, p_n, d_n) for every gap whose two primes lie in [lo, hi).

    ``pi_hint`` is the number of primes below ``lo``; when omitted it is
    recounted so that n is always the absolute index.
    """
    if hi <= lo:
        raise ParameterError(f"need lo < hi, got [{lo}, {hi})")
    lo = max(lo, 0)
    if pi_hint is None:
        pi_hint = prime_count(0, lo) if lo > 2 else 0
    n = pi_hint
    prev = None
    for p in primes_in_range(lo, hi):
        if prev is not None:
            yield GapRow(n, prev, p - prev)
        prev = p
        n += 1


def complete_gaps(hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Primes p_1..p_L and gaps d_1..d_L for all complete gaps below ``hi``."""
    ps = primes_array(2, hi) if hi > 2 else np.zeros(0, dtype=np.int64)
    if len(ps) < 2:
        return ps[:0], ps[:0]
    return ps[:-1], np.diff(ps)


@dataclass(frozen=True)
class MeanGap:
    N: int
    mean: Fraction
    reference: float
    ratio: float


def mean_gap_check(N: int) -> MeanGap:
    """Compare (p_{N+1} - 2)/N with log N."""
    if N < 2:
        raise ParameterError("N must be >= 2 (log 1 = 0)")
    p_next = int(first_primes(N + 1)[-1])
    mean = Fraction(p_next - 2, N)
    ref = math.log(N)
    return MeanGap(N, mean, ref, float(mean) / ref)


@dataclass(frozen=True)
class NormalizedGapRange:
    min_value: float
    argmin: int
    max_value: float
    argmax: int


def normalized_gap_range(hi: int) -> NormalizedGapRange:
    """Extremes of d_n / log n over complete gaps below ``hi``, n >= 2."""
    _, d = complete_gaps(hi)
    if len(d) < 2:
        raise ParameterError("need at least two complete gaps")
    n = np.arange(2, len(d) + 1)
    vals = d[1:] / np.log(n)
    i, j = int(np.argmin(vals)), int(np.argmax(vals))
    return NormalizedGapRange(float(vals[i]), i + 2, float(vals[j]), j + 2)


@dataclass(frozen=True)
class RatioRecord:
    """One record of a gap statistic.

    ``n`` is the formula index of the statistic, except for ``chain`` where
    it is the index of the first gap of the run.  ``p`` is p_n for that
    index and ``window`` lists the gaps entering the statistic in index order.
    """

    stat: str
    k: int
    n: int
    p: int
    num: int
    den: int
    window: tuple[int, ...] = field(default=())

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def as_dict(self) -> dict:
        return {"n": self.n, "p_n": self.p, "value_num": self.num,
                "value_den": self.den, "window": list(self.window)}


def _sliding_max(d: Sequence[int], k: int) -> list[int]:
    if len(d) < k:
        return []
    arr = np.asarray(d, dtype=np.int64)
    return np.lib.stride_tricks.sliding_window_view(arr, k).max(axis=1).tolist()


def statistic_values(d: Sequence[int], stat: str, k: int) -> list[tuple[int, int, int, int, int]]:
    """Every value of ``stat`` over the 1-based gap list d_1..d_L.

    Returns tuples (n, num, den, first, last) in increasing n, where
    d[first..last] (1-based, inclusive) is the window.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    if stat not in STATS:
        raise ParameterError(f"unknown statistic {stat!r}")
    d = [int(x) for x in d]
    L = len(d)
    out = []
    if stat == "chain":
        # min over the k gaps starting at index s (1-based)
        if L < k:
            return out
        mins = (-np.lib.stride_tricks.sliding_window_view(
            -np.asarray(d, dtype=np.int64), k).max(axis=1)).tolist()
        for s, v in enumerate(mins, start=1):
            out.append((s, v, 1, s, s + k - 1))
        return out
    # bmax[j] = max(d_{j+1}, ..., d_{j+k}) with 0-based j, i.e. the block ending at n = j + k
    bmax = _sliding_max(d, k)
    if stat == "forward":
        for n in range(k, L):
            out.append((n, d[n], bmax[n - k], n - k + 1, n + 1))
    elif stat == "backward":
        for n in range(k + 1, L + 1):
            out.append((n, d[n - k - 1], bmax[n - k], n - k, n))
    else:
        for n in range(k + 1, L):
            out.append((n, min(d[n - k - 1], d[n]), bmax[n - k], n - k, n + 1))
    return out


def records_from_gaps(d: Sequence[int], stat: str, k: int,
                      primes: Sequence[int] | None = None) -> list[RatioRecord]:
    """Strict records of ``stat`` over the gap list d_1..d_L.

    ``primes`` (p_1..p_L), when given, supplies the p_n column.
    """
    recs: list[RatioRecord] = []
    best_num, best_den = None, 1
    for n, num, den, a, b in statistic_values(d, stat, k):
        if best_num is None or num * best_den > best_num * den:
            best_num, best_den = num, den
            p = int(primes[n - 1]) if primes is not None else 0
            recs.append(RatioRecord(stat, k, n, p, num, den, tuple(int(x) for x in d[a - 1 : b])))
    return recs


def ratio_records(stat: str, k: int, hi: int) -> list[RatioRecord]:
    """Records of ``stat`` over all complete gaps with primes below ``hi``."""
    ps, d = complete_gaps(hi)
    return records_from_gaps(d.tolist(), stat, k, ps.tolist())


def forward_ratio_records(k: int, hi: int) -> list[RatioRecord]:
    """Records of d_{n+1} / max(d_n, ..., d_{n-k+1})."""
    return ratio_records("forward", k, hi)


def backward_ratio_records(k: int, hi: int) -> list[RatioRecord]:
    """Records of d_{n-k} / max(d_n, ..., d_{n-k+1})."""
    return ratio_records("backward", k, hi)


def two_sided_records(k: int, hi: int) -> list[RatioRecord]:
    """Records of min(d_{n-k}, d_{n+1}) / max(d_n, ..., d_{n-k+1})."""
    return ratio_records("twosided", k, hi)


def chain_min_records(k: int, hi: int) -> list[RatioRecord]:
    """Records of min(d_{n+1}, ..., d_{n+k})."""
    return ratio_records("chain", k, hi)


def records_to_csv(records: Iterable[RatioRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "p_n", "value_num", "value_den", "window"])
    for r in records:
        w.writerow([r.n, r.p, r.num, r.den, " ".join(map(str, r.window))])
    return buf.getvalue()


def records_to_json(records: Sequence[RatioRecord], stat: str, k: int, hi: int) -> str:
    doc = {"schema": SCHEMA_VERSION, "stat": stat, "k": k, "hi": hi,
           "records": [r.as_dict() for r in records]}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def rankin_f_from_log(log_x: float) -> float:
    """Erdos-Rankin function evaluated from log x (for x too large for a float)."""
    if not log_x > math.log1p(RANKIN_POLE):
        raise ParameterError("rankin_f requires x > e^(e^e) + 1")
    l2 = math.log(log_x)
    l3 = math.log(l2)
    l4 = math.log(l3)
    return l2 * l4 / (l3 * l3)


def rankin_f(x: float) -> float:
    """log_2 x * log_4 x / (log_3 x)^2 with log_v the v-fold iterated log."""
    if not x > RANKIN_POLE + 1:
        raise ParameterError("rankin_f requires x > e^(e^e) + 1")
    return rankin_f_from_log(math.log(x))
