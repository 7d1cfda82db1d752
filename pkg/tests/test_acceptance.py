"""Acceptance suite: one test per criterion, each checked against an independent oracle.

A PASS/FAIL line per criterion is printed in the "acceptance criteria"
section of the pytest summary (see conftest.py).
"""

import hashlib
import json
import math
import os
import random
import subprocess
import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

from gaplab.covering import crt, desk_construction, realize_gap, verify_certificate
from gaplab.gaps import mean_gap_check, normalized_gap_range, ratio_records, records_to_csv
from gaplab.primes import primes_up_to
from gaplab.signs import SignPattern, scan_sign_changes
from gaplab.smooth import _psi, psi_exact
from gaplab.tuples import is_admissible
from oracles import (brute_records, bytearray_sieve, covered_by_gcd,
                     largest_prime_factor, occupancy_oracle_admissible, proven_composite,
                     sign_changes, trial_division_primes)

SWEEP_R = (20, 30, 50, 100, 200)
SWEEP_M = (1, 2)
RECORD_K = (1, 2, 3)
STATS = ("forward", "backward", "twosided", "chain")


@pytest.fixture(scope="module")
def big_oracle_primes():
    # p_{10^6 + 3} is just above 15.48 million
    ps = bytearray_sieve(15_500_000)
    assert len(ps) > 10**6 + 3
    return ps


@lru_cache(maxsize=None)
def sweep():
    return {(R, m): desk_construction(R, m) for m in SWEEP_M for R in SWEEP_R}


def record_csvs(hi=10**5):
    return {(stat, k): records_to_csv(ratio_records(stat, k, hi)) for stat in STATS for k in RECORD_K}


def test_c01_prime_engine_exact():
    t = time.perf_counter()
    got = primes_up_to(10**6)
    elapsed = time.perf_counter() - t
    oracle = trial_division_primes(10**6)
    assert len(oracle) == 78498
    assert len(got) == len(oracle)
    assert got.tolist() == oracle
    assert elapsed < 5, elapsed


def test_c02_mean_gap_law(big_oracle_primes):
    t = time.perf_counter()
    r5, r6 = mean_gap_check(10**5), mean_gap_check(10**6)
    elapsed = time.perf_counter() - t
    for r in (r5, r6):
        oracle = (big_oracle_primes[r.N] - 2) / r.N / math.log(r.N)
        assert r.ratio == pytest.approx(oracle, rel=1e-12)
    assert 1.0 < r5.ratio < 1.2
    assert abs(r6.ratio - 1) < abs(r5.ratio - 1)
    assert elapsed < 60, elapsed


def test_c03_normalized_gap_bracketing(oracle_primes_1e6):
    r = normalized_gap_range(10**6)
    ps = oracle_primes_1e6
    vals = [(ps[n] - ps[n - 1]) / math.log(n) for n in range(2, len(ps))]
    assert r.min_value == pytest.approx(min(vals), rel=1e-12)
    assert r.max_value == pytest.approx(max(vals), rel=1e-12)
    assert r.min_value < 1 < r.max_value


def test_c04_admissibility_oracle():
    rng = random.Random(20240601)
    admissible = 0
    for _ in range(1000):
        H = rng.sample(range(100), rng.randint(1, 10))
        want = occupancy_oracle_admissible(H)
        assert is_admissible(H) == want, H
        admissible += want
    assert 0 < admissible < 1000


def test_c05_psi_exact():
    X, Y = 10**4, 100
    lpf = [0, 1] + [largest_prime_factor(n) for n in range(2, X + 1)]
    _psi.cache_clear()
    t = time.perf_counter()
    got = {(x, y): psi_exact(x, y) for y in range(2, Y + 1) for x in range(1, X + 1)}
    elapsed = time.perf_counter() - t
    for y in range(2, Y + 1):
        count = 0
        for x in range(1, X + 1):
            count += lpf[x] <= y
            assert got[x, y] == count, (x, y)
    assert psi_exact(100, 5) == 34 == sum(1 for n in range(1, 101) if largest_prime_factor(n) <= 5)
    assert elapsed < 30, elapsed


def _per_prime_covered(entries, nu):
    return any((nu + e.residue) % p == 0 for p, e in entries.items())


def test_c06_construction_soundness_sweep():
    t = time.perf_counter()
    certs = sweep()
    for (R, m), cert in certs.items():
        rep = verify_certificate(cert)
        assert rep.valid, (R, m, rep.violations)
        assert cert.params.U == cert.achieved_U == rep.achieved_U >= 1
        z, M = crt({p: e.residue for p, e in cert.entries.items()})
        U = cert.params.U
        for nu in range(-U, U + 1):
            by_gcd = covered_by_gcd(z, M, nu)
            assert by_gcd == _per_prime_covered(cert.entries, nu), (R, m, nu)
            if not by_gcd:
                assert abs(nu) in cert.params.H, (R, m, nu)
        for h in cert.params.H:
            assert not covered_by_gcd(z, M, h)
    elapsed = time.perf_counter() - t
    assert elapsed < 120, elapsed


def test_c07_realized_composite_run():
    cert = sweep()[50, 2]
    g = realize_gap(cert)
    x = g.witness_x
    uncovered = []
    for pos in g.positions:
        n = x + pos.nu
        if pos.kind == "composite":
            assert n % pos.witness == 0 and n > pos.witness
            assert proven_composite(n), pos.nu
        else:
            uncovered.append(pos.nu)
    assert len(g.positions) == 2 * cert.params.U + 1
    assert uncovered == sorted(cert.open_positions)
    assert all(abs(nu) in cert.params.H for nu in uncovered)
    for h in cert.params.H:
        assert math.gcd(x + h, g.modulus) == 1


def test_c08_growth_of_achievable_gaps():
    certs = sweep()
    for m in SWEEP_M:
        us = [certs[R, m].achieved_U for R in SWEEP_R]
        assert all(a <= b for a, b in zip(us, us[1:])), (m, us)
        assert us[-1] / SWEEP_R[-1] > us[0] / SWEEP_R[0], (m, us)


def test_c09_record_statistics_oracle(oracle_gaps_1e5):
    ps, d = oracle_gaps_1e5
    t = time.perf_counter()
    got = {(stat, k): ratio_records(stat, k, 10**5) for stat in STATS for k in RECORD_K}
    elapsed = time.perf_counter() - t
    for (stat, k), recs in got.items():
        want = brute_records(d, stat, k)
        assert [(r.n, r.value) for r in recs] == want, (stat, k)
        assert [r.p for r in recs] == [ps[n - 1] for n, _ in want]
    assert elapsed < 30, elapsed


def test_c10_sign_change_witnesses(big_oracle_primes):
    N = 10**6
    ps = big_oracle_primes[: N + 3]
    d = [b - a for a, b in zip(ps, ps[1:])]          # d[i-1] == d_i
    oracle = sign_changes([d[n] - d[n + 1] for n in range(1, N + 1)])
    rep = scan_sign_changes(SignPattern((1, -1)), N)
    assert rep.changes == oracle
    assert len(rep.changes) > 10**3
    assert scan_sign_changes(SignPattern((1, 1)), N).changes == []


_DIGEST_SCRIPT = """
import hashlib, json, sys
sys.path.insert(0, {tests!r})
from test_acceptance import sweep, record_csvs
out = {{f"cert {{R}} {{m}}": hashlib.sha256(c.to_json().encode()).hexdigest()
        for (R, m), c in sweep().items()}}
out.update({{f"csv {{s}} {{k}}": hashlib.sha256(t.encode()).hexdigest()
            for (s, k), t in record_csvs().items()}})
print(json.dumps(out, sort_keys=True))
"""


def test_c11_determinism():
    local = {f"cert {R} {m}": hashlib.sha256(c.to_json().encode()).hexdigest()
             for (R, m), c in sweep().items()}
    local.update({f"csv {s} {k}": hashlib.sha256(t.encode()).hexdigest()
                  for (s, k), t in record_csvs().items()})
    again = {(R, m): desk_construction(R, m).to_json() for (R, m) in sweep()}
    assert all(again[key] == c.to_json() for key, c in sweep().items())
    script = _DIGEST_SCRIPT.format(tests=str(Path(__file__).parent))
    for seed in ("0", "12345"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        r = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True,
                           env=env, check=True)
        assert json.loads(r.stdout) == local
