"""Admissible tuples and the prime tuples used by the covering construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NotFoundError, ParameterError
from .primes import is_prime, primes_array, primes_up_to


def _check_distinct(H: Sequence[int]) -> list[int]:
    H = [int(h) for h in H]
    if not H:
        raise ParameterError("tuple must be non-empty")
    if len(set(H)) != len(H):
        raise ParameterError(f"tuple has duplicate elements: {H}")
    return H


def occupancy_profile(H: Sequence[int]) -> dict[int, set[int]]:
    """Residues occupied by H modulo each prime p <= |H|."""
    H = _check_distinct(H)
    return {int(p): {h % int(p) for h in H} for p in primes_up_to(len(H))}


def is_admissible(H: Sequence[int]) -> bool:
    # |H| points cannot fill the p classes of a prime p > |H|
    return all(len(occ) < p for p, occ in occupancy_profile(H).items())


class OccupancyTracker:
    """Occupancy profile maintained while elements are appended one by one."""

    def __init__(self, H: Iterable[int] = ()):
        self.members: list[int] = []
        self.profile: dict[int, set[int]] = {}
        for h in H:
            self.add(h)

    def add(self, h: int) -> None:
        h = int(h)
        if h in self.members:
            raise ParameterError(f"duplicate element {h}")
        self.members.append(h)
        for p, occ in self.profile.items():
            occ.add(h % p)
        size = len(self.members)
        if is_prime(size):
            self.profile[size] = {x % size for x in self.members}

    def admissible(self) -> bool:
        return all(len(occ) < p for p, occ in self.profile.items())


@dataclass(frozen=True)
class AdmissibleTuple:
    offsets: tuple[int, ...]
    admissible: bool

    @property
    def m(self) -> int:
        return len(self.offsets)


def satisfies_divisibility(H: Sequence[int]) -> bool:
    """True iff h_t does not divide h_i - h_j for all t and i != j."""
    return all((a - b) % t != 0 for t in H for a in H for b in H if a != b)


def find_tuple_42(m: int, lo: int, hi: int) -> AdmissibleTuple:
    """Lexicographically first m primes in (lo, hi) with h_t not dividing h_i - h_j.

    Depth-first search over the primes of (lo, hi) in ascending order.
    ``lo`` and ``hi`` play the roles of the lower and upper size constants.
    """
    if m < 1:
        raise ParameterError("m must be >= 1")
    if not m < lo < hi:
        raise ParameterError(f"need m < lo < hi, got m={m}, lo={lo}, hi={hi}")
    cands = [int(p) for p in primes_array(lo + 1, hi)]
    chosen: list[int] = []
    visited = 0

    def compatible(p: int) -> bool:
        # p > every chosen prime, so only differences involving p are new
        for a in chosen:
            if (p - a) % p == 0:
                return False
            for t in chosen:
                if (p - a) % t == 0:
                    return False
        for a in chosen:
            for b in chosen:
                if a != b and (a - b) % p == 0:
                    return False
        return True

    def dfs(start: int) -> bool:
        nonlocal visited
        if len(chosen) == m:
            return True
        for i in range(start, len(cands) - (m - len(chosen)) + 1):
            visited += 1
            p = cands[i]
            if compatible(p):
                chosen.append(p)
                if dfs(i + 1):
                    return True
                chosen.pop()
        return False

    if not dfs(0):
        raise NotFoundError(f"no {m}-tuple of primes in ({lo}, {hi})", visited)
    offsets = tuple(chosen)
    assert satisfies_divisibility(offsets)
    return AdmissibleTuple(offsets, is_admissible(offsets))
