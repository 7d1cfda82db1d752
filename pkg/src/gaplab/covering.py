"""Erdos-Rankin covering construction.

Every prime p <= R (except an optional excluded prime q) receives one residue
alpha_p.  An offset nu is *covered* when nu = -alpha_p (mod p) for some
assigned p, i.e. p divides z + nu for any z with z = alpha_p (mod p).  The
goal is to cover every nu in [-U, U] while leaving z + h_i coprime to the
modulus for each tuple element h_i.

Pipeline:

1. small primes (<= v) and middle primes (w, R/2] get alpha = 0;
2. the surviving offsets are enumerated;
3. primes in (v, w] are assigned greedily, each picking the permitted class
   that removes the most survivors;
4. primes in (R/2, R] are matched one-to-one with what is left;
5. leftover primes and the tuple primes get the least permitted residue.

All tie-breaks are deterministic (smallest residue, then smallest prime), so
identical parameters give byte-identical certificates.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import CertificateError, ParameterError
from .gaps import RANKIN_POLE, rankin_f
from .primes import is_prime, primes_up_to

SCHEMA_VERSION = 1
STAGES = ("P1", "P2", "P3", "P4", "H")


class Entry(NamedTuple):
    residue: int
    stage: str


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructionParams:
    R: int
    U: int
    H: tuple[int, ...]
    v: int
    w: int
    q: int | None = None
    c0: float | None = None
    paper_literal: bool = False
    clamped: bool = False

    def __post_init__(self):
        H = tuple(int(h) for h in self.H)
        object.__setattr__(self, "H", H)
        if self.R < 10:
            raise ParameterError(f"R must be >= 10, got {self.R}")
        if self.U < 1:
            raise ParameterError(f"U must be >= 1, got {self.U}")
        if not 2 <= self.v < self.w < self.R / 2:
            raise ParameterError(f"need 2 <= v < w < R/2, got v={self.v}, w={self.w}, R={self.R}")
        if list(H) != sorted(set(H)):
            raise ParameterError(f"tuple must be strictly increasing: {H}")
        for h in H:
            if h > self.R or not is_prime(h):
                raise ParameterError(f"tuple element {h} must be a prime <= R")
        if self.q is not None:
            if not is_prime(self.q):
                raise ParameterError(f"excluded q={self.q} is not prime")
            if self.q in H:
                raise ParameterError("excluded prime q may not belong to the tuple")

    @property
    def m(self) -> int:
        return len(self.H)

    def stage_of(self, p: int) -> str | None:
        """Class of a prime p <= R; None for the excluded prime q."""
        if p == self.q:
            return None
        if p in self.H:
            return "H"
        if p <= self.v:
            return "P1"
        if p <= self.w:
            return "P2"
        if 2 * p <= self.R:
            return "P3"
        return "P4"

    def classes(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {s: [] for s in STAGES}
        for p in primes_up_to(self.R):
            s = self.stage_of(int(p))
            if s is not None:
                out[s].append(int(p))
        return out

    def as_dict(self) -> dict:
        return {"R": self.R, "U": self.U, "H": list(self.H), "v": self.v, "w": self.w,
                "q": self.q, "c0": self.c0, "paper_literal": self.paper_literal,
                "clamped": self.clamped}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConstructionParams":
        return cls(R=int(d["R"]), U=int(d["U"]), H=tuple(d["H"]), v=int(d["v"]),
                   w=int(d["w"]), q=d.get("q"), c0=d.get("c0"),
                   paper_literal=bool(d.get("paper_literal", False)),
                   clamped=bool(d.get("clamped", False)))


def derive_params(R: int, H: Sequence[int], c0: float | None = None, *,
                  U: int | None = None, v: int | None = None, w: int | None = None,
                  q: int | None = None, paper_literal: bool = False) -> ConstructionParams:
    """Fill v, w, U from their asymptotic formulas unless given explicitly.

    v = (log R)^3 and w = exp[(log R log_3 R / log_2 R) / (m + 5)] only
    separate for enormous R, so derived values are clamped into
    2 <= v < w < R/2 and the ``clamped`` flag is set.  Explicit values are
    never clamped; inconsistent ones raise ParameterError.
    """
    if R < 10:
        raise ParameterError("R must be >= 10")
    H = tuple(sorted(int(h) for h in H))
    m = len(H)
    if any(h > R for h in H):
        raise ParameterError("tuple elements must be <= R")
    top = (R - 1) // 2  # largest integer < R/2
    clamped = False

    if v is None:
        v_d = max(round(math.log(R) ** 3), 2)
    else:
        v_d = v
    if w is None:
        l2 = math.log(math.log(R))
        l3 = math.log(l2) if l2 > 0 else None
        if l3 is None:
            raise ParameterError("iterated logs undefined at this R; supply w")
        w_d = round(math.exp((math.log(R) * l3 / l2) / (m + 5)))
    else:
        w_d = w

    if v is not None and w is not None and not v < w < R / 2:
        raise ParameterError(f"explicit v={v}, w={w} violate v < w < R/2")
    if w is not None and not w < R / 2:
        raise ParameterError(f"explicit w={w} must be < R/2")
    if v is not None and not 2 <= v <= top - 1:
        raise ParameterError(f"explicit v={v} leaves no room for w < R/2")

    if v is None:
        hi_v = (w_d - 1) if w is not None else top - 1
        new_v = min(max(v_d, 2), hi_v)
        clamped |= new_v != v_d
        v_d = new_v
    if w is None:
        new_w = min(max(w_d, v_d + 1), top)
        clamped |= new_w != w_d
        w_d = new_w
    if not 2 <= v_d < w_d < R / 2:
        raise ParameterError(f"cannot fit 2 <= v < w < R/2 (v={v_d}, w={w_d})")
    if clamped:
        warnings.warn(f"asymptotic v/w collapse at R={R}; clamped to v={v_d}, w={w_d}",
                      stacklevel=2)

    if U is None:
        if c0 is None or not R > RANKIN_POLE + 1:
            raise ParameterError("U must be supplied unless R > e^(e^e) and c0 is given")
        U = math.floor(c0 * R * rankin_f(R))
    return ConstructionParams(R=R, U=int(U), H=H, v=int(v_d), w=int(w_d), q=q, c0=c0,
                              paper_literal=paper_literal, clamped=clamped)


# ---------------------------------------------------------------------------
# Coverage primitives
# ---------------------------------------------------------------------------


def coverage_witnesses(entries: Mapping[int, Entry], lo: int, hi: int) -> np.ndarray:
    """Smallest prime covering each nu in [lo, hi]; 0 where nu is open."""
    size = hi - lo + 1
    wit = np.zeros(max(size, 0), dtype=np.int64)
    for p in sorted(entries):
        a = entries[p].residue
        first = (-a - lo) % p  # index of the first nu = -a (mod p)
        sl = wit[first::p]
        sl[sl == 0] = p
    return wit


def max_covered_U(entries: Mapping[int, Entry], H: Iterable[int]) -> int:
    """Largest U' with every nu in [-U', U'] covered, tuple positions +-h_i excepted.

    Returns -1 when 0 itself is open.
    """
    skip = set()
    for h in H:
        skip.update((h, -h))
    W = 64
    while True:
        wit = coverage_witnesses(entries, -W, W)
        open_nu = [abs(nu) for nu in (np.flatnonzero(wit == 0) - W).tolist()
                   if nu not in skip]
        if open_nu:
            return min(open_nu) - 1
        if W > 1 << 40:
            raise ParameterError("coverage scan did not terminate")
        W *= 2


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def _largest_prime_factor(n: int) -> int:
    lpf, p = 1, 2
    while p * p <= n:
        while n % p == 0:
            lpf, n = p, n // p
        p += 1
    return max(lpf, n)


@dataclass
class Survivors:
    """Uncovered offsets after the alpha = 0 stage, stored as magnitudes.

    ``positive`` holds n with +n open, ``negative`` holds n with -n open.
    ``tags`` marks each n as 'large-prime' (a prime factor > w) or 'smooth'.
    """

    positive: list[int]
    negative: list[int]
    tags: dict[int, str]


def enumerate_survivors(params: ConstructionParams) -> Survivors:
    """Offsets 1 <= n <= U coprime to every alpha = 0 prime, tuple elements excluded."""
    cls = params.classes()
    zero_primes = cls["P1"] + cls["P3"]
    keep = np.ones(params.U + 1, dtype=bool)
    keep[0] = False
    for p in zero_primes:
        keep[::p] = False
    for h in params.H:
        if h <= params.U:
            keep[h] = False
    ns = np.flatnonzero(keep).tolist()
    tags = {n: ("large-prime" if _largest_prime_factor(n) > params.w else "smooth")
            for n in ns}
    return Survivors(list(ns), list(ns), tags)


def _forbidden(p: int, H: Sequence[int]) -> set[int]:
    return {(-h) % p for h in H}


@dataclass
class Stage2Result:
    entries: dict[int, Entry]
    trajectory: list[int]
    negative_trajectory: list[int]
    bad_counts: list[int]
    positive: list[int]
    negative: list[int]


def greedy_stage2(params: ConstructionParams, survivors: Survivors) -> Stage2Result:
    """Assign the (v, w] primes in ascending order, each to its best permitted class.

    A class a mod p removes +n with n = -a and -n with n = a (mod p).  By
    default both signs count toward the choice; ``paper_literal`` counts the
    positive side only.  trajectory[j] is the number of positive survivors
    after j primes.
    """
    pos = list(survivors.positive)
    neg = list(survivors.negative)
    entries: dict[int, Entry] = {}
    traj = [len(pos)]
    ntraj = [len(neg)]
    bad = []
    H = params.H
    for p in params.classes()["P2"]:
        forb = _forbidden(p, H)
        counts = [0] * p
        for n in pos:
            counts[(-n) % p] += 1
        bad.append(sum(counts[a] for a in forb))
        if not params.paper_literal:
            for n in neg:
                counts[n % p] += 1
        best, best_a = -1, None
        for a in range(p):
            if a not in forb and counts[a] > best:
                best, best_a = counts[a], a
        entries[p] = Entry(best_a, "P2")
        pos = [n for n in pos if (n + best_a) % p]
        neg = [n for n in neg if (n - best_a) % p]
        traj.append(len(pos))
        ntraj.append(len(neg))
    return Stage2Result(entries, traj, ntraj, bad, pos, neg)


@dataclass
class MatchResult:
    entries: dict[int, Entry]
    matched: dict[int, int]
    uncovered: list[int]

    @property
    def complete(self) -> bool:
        return not self.uncovered


def match_stage4(params: ConstructionParams, positive: Sequence[int],
                 negative: Sequence[int]) -> MatchResult:
    """Give each remaining signed survivor n* its own (R/2, R] prime p*.

    p* gets alpha = -n* (mod p*).  A prime is never used when it divides n*
    or n* - h_i for some i (that would cover z + h_i).  Survivors are taken
    by decreasing |n*| (positive first on ties), primes in increasing order.
    A survivor already covered by an earlier match is skipped.
    """
    pool = list(params.classes()["P4"])
    H = params.H
    todo = sorted([n for n in positive] + [-n for n in negative],
                  key=lambda n: (-abs(n), n < 0))
    entries: dict[int, Entry] = {}
    matched: dict[int, int] = {}
    uncovered: list[int] = []
    for n in todo:
        if any((n + e.residue) % p == 0 for p, e in entries.items()):
            continue
        for i, p in enumerate(pool):
            if n % p == 0 or any((n - h) % p == 0 for h in H):
                continue
            entries[p] = Entry((-n) % p, "P4")
            matched[n] = p
            del pool[i]
            break
        else:
            uncovered.append(n)
    return MatchResult(entries, matched, uncovered)


def least_permitted(p: int, H: Sequence[int]) -> int:
    forb = _forbidden(p, H)
    return next(a for a in range(p) if a not in forb)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


@dataclass
class ConstructionCertificate:
    params: ConstructionParams
    entries: dict[int, Entry]
    trajectory: list[int] = field(default_factory=list)
    matched: dict[int, int] = field(default_factory=dict)
    coverage: list[int] = field(default_factory=list)
    open_positions: list[int] = field(default_factory=list)
    achieved_U: int = -1
    valid: bool = False
    complete: bool = True
    problems: list[str] = field(default_factory=list)

    @property
    def modulus(self) -> int:
        return math.prod(self.entries)

    def to_json(self) -> str:
        doc = {
            "schema": SCHEMA_VERSION,
            "params": self.params.as_dict(),
            "entries": [[p, e.residue, e.stage] for p, e in sorted(self.entries.items())],
            "trajectory": list(self.trajectory),
            "matched": [[n, p] for n, p in sorted(self.matched.items())],
            "coverage": list(self.coverage),
            "open": list(self.open_positions),
            "achieved_U": self.achieved_U,
            "valid": self.valid,
            "complete": self.complete,
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ConstructionCertificate":
        try:
            doc = json.loads(text)
            params = ConstructionParams.from_dict(doc["params"])
            entries = {}
            for p, a, s in doc["entries"]:
                if int(p) in entries:
                    raise CertificateError(f"prime {p} listed twice")
                entries[int(p)] = Entry(int(a), str(s))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise CertificateError(f"bad params: {exc}") from exc
            raise CertificateError(f"malformed certificate: {exc}") from exc
        return cls(params=params, entries=entries,
                   trajectory=[int(x) for x in doc.get("trajectory", [])],
                   matched={int(n): int(p) for n, p in doc.get("matched", [])},
                   coverage=[int(x) for x in doc.get("coverage", [])],
                   open_positions=[int(x) for x in doc.get("open", [])],
                   achieved_U=int(doc.get("achieved_U", -1)),
                   valid=bool(doc.get("valid", False)),
                   complete=bool(doc.get("complete", True)))


def certify(params: ConstructionParams, entries: Mapping[int, Entry],
            trajectory: Sequence[int] = (), matched: Mapping[int, int] | None = None,
            complete: bool = True) -> ConstructionCertificate:
    """Compute coverage over [-U, U] and judge validity."""
    U = params.U
    wit = coverage_witnesses(entries, -U, U)
    open_nu = (np.flatnonzero(wit == 0) - U).tolist()
    allowed = set(params.H) | {-h for h in params.H}
    problems = []
    for nu in open_nu:
        if nu not in allowed:
            problems.append(f"offset {nu} is not covered")
    for h in params.H:
        for p, e in entries.items():
            if (e.residue + h) % p == 0:
                problems.append(f"prime {p} divides z + {h}")
    return ConstructionCertificate(
        params=params, entries=dict(sorted(entries.items())), trajectory=list(trajectory),
        matched=dict(matched or {}), coverage=wit.tolist(), open_positions=open_nu,
        achieved_U=max_covered_U(entries, params.H), valid=not problems,
        complete=complete, problems=problems)


def finalize(params: ConstructionParams, entries: Mapping[int, Entry],
             trajectory: Sequence[int] = (), matched: Mapping[int, int] | None = None,
             complete: bool = True) -> ConstructionCertificate:
    """Give every still-unassigned prime its least permitted residue, then certify."""
    full = dict(entries)
    for p in primes_up_to(params.R):
        p = int(p)
        stage = params.stage_of(p)
        if stage is None or p in full:
            continue
        if stage not in ("P4", "H"):
            raise ParameterError(f"prime {p} of class {stage} was never assigned")
        full[p] = Entry(least_permitted(p, params.H), stage)
    return certify(params, full, trajectory, matched, complete)


@dataclass
class BuildResult:
    certificate: ConstructionCertificate
    survivors: Survivors
    stage2: Stage2Result
    match: MatchResult


def build(params: ConstructionParams) -> BuildResult:
    """Run the whole construction for fixed parameters."""
    cls = params.classes()
    entries = {p: Entry(0, "P1") for p in cls["P1"]}
    entries.update({p: Entry(0, "P3") for p in cls["P3"]})
    surv = enumerate_survivors(params)
    st2 = greedy_stage2(params, surv)
    entries.update(st2.entries)
    match = match_stage4(params, st2.positive, st2.negative)
    entries.update(match.entries)
    cert = finalize(params, entries, st2.trajectory, match.matched, match.complete)
    return BuildResult(cert, surv, st2, match)


def shrink_to_achieved(cert: ConstructionCertificate) -> ConstructionCertificate:
    """Re-certify the same assignment on [-U', U'] with U' = achieved_U."""
    if cert.achieved_U < 1:
        raise ParameterError("certificate covers no interval")
    params = replace(cert.params, U=cert.achieved_U)
    return certify(params, cert.entries, cert.trajectory, cert.matched, cert.complete)


def search_construction(R: int, H: Sequence[int], v: int, w: int, *,
                        q: int | None = None, paper_literal: bool = False,
                        targets: Iterable[int] | None = None) -> ConstructionCertificate:
    """Try several target lengths and keep the assignment covering the longest interval.

    The winner (ties to the smaller target) is re-certified at U = achieved_U.
    """
    if targets is None:
        targets = range(2, 3 * R + 1)
    best = None
    for t in targets:
        params = ConstructionParams(R=R, U=t, H=tuple(H), v=v, w=w, q=q,
                                    paper_literal=paper_literal)
        cert = build(params).certificate
        if best is None or cert.achieved_U > best.achieved_U:
            best = cert
    return shrink_to_achieved(best)


def desk_construction(R: int, m: int, *, q: int | None = None,
                      paper_literal: bool = False) -> ConstructionCertificate:
    """Construction with the fixed small-R policy used for sweeps.

    The tuple is the first admissible m-tuple of primes in (R/4, R]; v = 2 and
    w is the largest integer below R/2, so every odd prime outside the tuple
    and below R/2 goes through the greedy stage.
    """
    from .tuples import find_tuple_42

    H = find_tuple_42(m, max(m + 1, R // 4), R + 1).offsets
    return search_construction(R, H, 2, (R - 1) // 2, q=q, paper_literal=paper_literal)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class VerificationReport:
    valid: bool
    violations: list[str]
    achieved_U: int
    open_positions: list[int]


def verify_certificate(cert: ConstructionCertificate) -> VerificationReport:
    """Re-derive every claim of a certificate from (params, entries) alone.

    Structural defects raise CertificateError; arithmetic failures are
    listed in the report.
    """
    params = cert.params
    entries = cert.entries
    expected = {int(p) for p in primes_up_to(params.R) if int(p) != params.q}
    if set(entries) != expected:
        missing = sorted(expected - set(entries))
        extra = sorted(set(entries) - expected)
        raise CertificateError(f"prime set mismatch: missing {missing}, extra {extra}")
    for p, e in entries.items():
        if not 0 <= e.residue < p:
            raise CertificateError(f"residue {e.residue} out of range for prime {p}")
        if e.stage not in STAGES:
            raise CertificateError(f"unknown stage {e.stage!r} for prime {p}")

    violations = []
    for p, e in sorted(entries.items()):
        if e.stage != params.stage_of(p):
            violations.append(f"prime {p} tagged {e.stage}, expected {params.stage_of(p)}")
        if e.stage in ("P1", "P3") and e.residue != 0:
            violations.append(f"prime {p} in {e.stage} must have residue 0")
        for h in params.H:
            if (e.residue + h) % p == 0:
                violations.append(f"prime {p}: residue {e.residue} = -{h} (mod {p})")

    U = params.U
    allowed = set(params.H) | {-h for h in params.H}
    ordered = sorted(entries.items())
    open_nu = []
    for nu in range(-U, U + 1):
        wit = next((p for p, e in ordered if (nu + e.residue) % p == 0), 0)
        if wit == 0:
            open_nu.append(nu)
            if nu not in allowed:
                violations.append(f"offset {nu} is not covered")
        if cert.coverage:
            claimed = cert.coverage[nu + U] if nu + U < len(cert.coverage) else None
            if claimed != wit:
                violations.append(f"offset {nu}: claimed witness {claimed}, actual {wit}")
    if cert.open_positions and cert.open_positions != open_nu:
        violations.append("open-position list does not match recomputation")

    # achieved_U by direct outward scan
    skip = allowed
    t = 0
    while True:
        if any(nu not in skip and not any((nu + e.residue) % p == 0 for p, e in ordered)
               for nu in {t, -t}):
            break
        t += 1
    achieved = t - 1
    if cert.achieved_U != achieved:
        violations.append(f"achieved_U claimed {cert.achieved_U}, actual {achieved}")
    return VerificationReport(not violations, violations, achieved, open_nu)


# ---------------------------------------------------------------------------
# Realization
# ---------------------------------------------------------------------------


def crt(residues: Mapping[int, int]) -> tuple[int, int]:
    """Solve z = r_p (mod p) for pairwise coprime moduli; return (z, modulus)."""
    z, M = 0, 1
    for p, r in sorted(residues.items()):
        # z + M*t = r (mod p)
        t = ((r - z) * pow(M, -1, p)) % p
        z += M * t
        M *= p
    return z, M


class Position(NamedTuple):
    nu: int
    kind: str  # 'composite', 'tuple' or 'open'
    witness: int
    prime: bool | None


@dataclass
class RealizedGap:
    z: int
    modulus: int
    witness_x: int
    positions: list[Position]

    def composite_run(self) -> tuple[int, int]:
        """Longest run of consecutive 'composite' offsets around 0 (inclusive ends)."""
        kinds = {pos.nu: pos.kind for pos in self.positions}
        lo = hi = 0
        while kinds.get(lo - 1) == "composite":
            lo -= 1
        while kinds.get(hi + 1) == "composite":
            hi += 1
        return lo, hi


def realize_gap(cert: ConstructionCertificate) -> RealizedGap:
    """Assemble z by Chinese remaindering and pick a witness x = z (mod M), x > R + U."""
    z, M = crt({p: e.residue for p, e in cert.entries.items()})
    bound = cert.params.R + cert.params.U
    x = z
    if x <= bound:
        x += ((bound - x) // M + 1) * M
    U = cert.params.U
    wit = coverage_witnesses(cert.entries, -U, U)
    tuple_pos = set(cert.params.H) | {-h for h in cert.params.H}
    positions = []
    for nu in range(-U, U + 1):
        p = int(wit[nu + U])
        n = x + nu
        prime = is_prime(n) if n < 1 << 63 else None
        if p:
            positions.append(Position(nu, "composite", p, prime))
        elif nu in tuple_pos:
            positions.append(Position(nu, "tuple", 0, prime))
        else:
            positions.append(Position(nu, "open", 0, prime))
    return RealizedGap(z, M, x, positions)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass
class Stage2Diagnostics:
    n0: int
    n_final: int
    mertens_prediction: float
    bad_counts: list[int]
    bad_budget: list[float]


def stage2_diagnostics(params: ConstructionParams, trajectory: Sequence[int],
                       bad_counts: Sequence[int] = ()) -> Stage2Diagnostics:
    """Observed survivor decay against N0 * prod(1 - 1/p) over the (v, w] primes.

    ``bad_budget[j]`` is N_j / (4 log^2 R), the allowance for survivors sitting
    in forbidden classes at step j.  Reported, never asserted.
    """
    if not trajectory:
        raise ParameterError("trajectory must be non-empty")
    n0 = trajectory[0]
    pred = float(n0)
    for p in params.classes()["P2"]:
        pred *= 1 - 1 / p
    L2 = math.log(params.R) ** 2
    budget = [nj / (4 * L2) for nj in trajectory[:-1]]
    return Stage2Diagnostics(n0, trajectory[-1], pred, list(bad_counts), budget)
