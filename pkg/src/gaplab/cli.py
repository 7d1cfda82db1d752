"""Command-line entry point.

Exit status: 0 success, 2 parameter/usage error, 3 capacity error,
4 invalid or malformed certificate.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__
from .covering import (ConstructionCertificate, build, derive_params,
                       desk_construction, realize_gap, shrink_to_achieved,
                       stage2_diagnostics, verify_certificate)
from .errors import CapacityError, CertificateError, NotFoundError, ParameterError
from .gaps import STATS, mean_gap_check, ratio_records, records_to_csv, records_to_json
from .primes import segments
from .signs import alpha_from_a, parse_pattern, scan_sign_changes
from .smooth import psi_exact, survivor_estimate
from .tuples import find_tuple_42, is_admissible, occupancy_profile

EXIT_OK, EXIT_PARAM, EXIT_CAPACITY, EXIT_CERT = 0, 2, 3, 4
MANIFEST_SCHEMA = 1


class InvalidCertificate(Exception):
    def __init__(self, output):
        super().__init__("certificate failed verification")
        self.output = output


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _cmd_primes(args) -> str:
    segs = segments(args.lo, args.hi, threads=args.threads)
    if args.count_only:
        return f"{sum(len(s.primes()) for s in segs)}\n"
    return "".join(f"{p}\n" for s in segs for p in s.primes().tolist())


def _cmd_gaps_records(args) -> str:
    recs = ratio_records(args.stat, args.k, args.hi)
    if args.format == "json":
        return records_to_json(recs, args.stat, args.k, args.hi)
    return records_to_csv(recs)


def _cmd_gaps_mean(args) -> str:
    r = mean_gap_check(args.N)
    return _dump({"N": r.N, "mean": str(r.mean), "log_N": r.reference, "ratio": r.ratio})


def _cmd_tuples_find(args) -> str:
    t = find_tuple_42(args.m, args.lo, args.hi)
    return ",".join(map(str, t.offsets)) + "\n"


def _cmd_tuples_check(args) -> str:
    H = _ints(args.tuple)
    prof = occupancy_profile(H)
    return _dump({"tuple": H, "admissible": is_admissible(H),
                  "occupancy": {str(p): sorted(r) for p, r in prof.items()}})


def _cmd_smooth_psi(args) -> str:
    return f"{psi_exact(args.x, args.y)}\n"


def _cmd_smooth_survivors(args) -> str:
    H = _ints(args.tuple) if args.tuple else []
    est = survivor_estimate(args.R, args.U, H, args.q, args.w)
    return _dump({"R": args.R, "U": args.U, "tuple": H, "q": args.q,
                  "n0_exact": est.n0_exact, "n0_pnt": est.n0_pnt,
                  "smooth_term": est.smooth_term})


def _write_or_return(args, text: str) -> str:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    return text


def _cmd_cover_build(args) -> str:
    H = _ints(args.tuple) if args.tuple else []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = derive_params(args.R, H, args.c0, U=args.U, v=args.v, w=args.w,
                               q=args.q, paper_literal=args.paper_literal)
    for wmsg in caught:
        print(f"warning: {wmsg.message}", file=sys.stderr)
    res = build(params)
    cert = res.certificate
    if args.shrink:
        cert = shrink_to_achieved(cert)
    diag = stage2_diagnostics(params, res.stage2.trajectory, res.stage2.bad_counts)
    print(f"status={'complete' if cert.complete else 'partial'} valid={cert.valid} "
          f"achieved_U={cert.achieved_U} N0={diag.n0} N_final={diag.n_final} "
          f"mertens={diag.mertens_prediction:.2f}", file=sys.stderr)
    return _write_or_return(args, cert.to_json())


def _cmd_cover_sweep(args) -> str:
    rows = []
    for R in _ints(args.R):
        cert = desk_construction(R, args.m, paper_literal=args.paper_literal)
        rows.append({"R": R, "m": args.m, "tuple": list(cert.params.H),
                     "achieved_U": cert.achieved_U, "valid": verify_certificate(cert).valid})
    return _dump(rows)


def _load_cert(path: str) -> ConstructionCertificate:
    return ConstructionCertificate.from_json(Path(path).read_text(encoding="utf-8"))


def _cmd_cover_verify(args) -> str:
    rep = verify_certificate(_load_cert(args.cert))
    out = _dump({"valid": rep.valid, "achieved_U": rep.achieved_U,
                 "open": rep.open_positions, "violations": rep.violations})
    if not rep.valid:
        raise InvalidCertificate(out)
    return out


def _cmd_cover_realize(args) -> str:
    cert = _load_cert(args.cert)
    rep = verify_certificate(cert)
    if not rep.valid:
        raise InvalidCertificate(_dump({"valid": False, "violations": rep.violations}))
    g = realize_gap(cert)
    lo, hi = g.composite_run()
    return _dump({
        "z": str(g.z), "modulus": str(g.modulus), "witness_x": str(g.witness_x),
        "composite_run": [lo, hi],
        "positions": [{"nu": p.nu, "kind": p.kind, "witness": p.witness, "prime": p.prime}
                      for p in g.positions],
    })


def _cmd_signs_scan(args) -> str:
    rep = scan_sign_changes(parse_pattern(args.alphas), args.N)
    d = rep.as_dict()
    if args.format == "json":
        return json.dumps(d, sort_keys=True, separators=(",", ":")) + "\n"
    d.pop("changes")
    return "".join(f"{k}: {v}\n" for k, v in d.items())


def _cmd_signs_from_a(args) -> str:
    pat = alpha_from_a([Fraction(t) for t in args.a.split(",")])
    return ",".join(str(a) for a in pat.alphas) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaplab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--threads", type=int, default=1, help="worker threads (where supported)")
    ap.add_argument("--seed", type=int, default=None, help="reserved; all algorithms are deterministic")
    ap.add_argument("--manifest", help="write a run manifest to this path")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("primes", help="list or count primes in [lo, hi)")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=_cmd_primes)

    g = sub.add_parser("gaps").add_subparsers(dest="action", required=True)
    p = g.add_parser("records", help="record values of a gap statistic")
    p.add_argument("--stat", choices=STATS, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_gaps_records)
    p = g.add_parser("mean", help="(p_{N+1} - 2)/N against log N")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=_cmd_gaps_mean)

    t = sub.add_parser("tuples").add_subparsers(dest="action", required=True)
    p = t.add_parser("find")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.set_defaults(func=_cmd_tuples_find)
    p = t.add_parser("check")
    p.add_argument("tuple")
    p.set_defaults(func=_cmd_tuples_check)

    s = sub.add_parser("smooth").add_subparsers(dest="action", required=True)
    p = s.add_parser("psi")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=int, required=True)
    p.set_defaults(func=_cmd_smooth_psi)
    p = s.add_parser("survivors")
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--U", type=int, required=True)
    p.add_argument("--tuple", default="")
    p.add_argument("--q", type=int)
    p.add_argument("--w", type=int)
    p.set_defaults(func=_cmd_smooth_survivors)

    c = sub.add_parser("cover").add_subparsers(dest="action", required=True)
    p = c.add_parser("build")
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--tuple", default="")
    p.add_argument("--U", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--c0", type=float)
    p.add_argument("--paper-literal", action="store_true")
    p.add_argument("--shrink", action="store_true", help="re-certify at U = achieved_U")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cover_build)
    p = c.add_parser("sweep", help="desk-policy constructions for several R")
    p.add_argument("--R", default="20,30,50,100,200")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--paper-literal", action="store_true")
    p.set_defaults(func=_cmd_cover_sweep)
    p = c.add_parser("verify")
    p.add_argument("cert")
    p.set_defaults(func=_cmd_cover_verify)
    p = c.add_parser("realize")
    p.add_argument("cert")
    p.set_defaults(func=_cmd_cover_realize)

    sg = sub.add_parser("signs").add_subparsers(dest="action", required=True)
    p = sg.add_parser("scan")
    p.add_argument("--alphas", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=_cmd_signs_scan)
    p = sg.add_parser("from-a")
    p.add_argument("a")
    p.set_defaults(func=_cmd_signs_from_a)

    p = sub.add_parser("replay", help="re-run a manifest and compare output digests")
    p.add_argument("manifest_path")
    p.set_defaults(func=None)
    return ap


def _manifest(argv: list[str], args, output: str) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "manifest")}
    return {"schema": MANIFEST_SCHEMA, "version": __version__,
            "subcommand": " ".join(x for x in (args.command, getattr(args, "action", None)) if x),
            "argv": [a for a in argv], "params": params,
            "output_sha256": hashlib.sha256(output.encode()).hexdigest()}


def _strip_manifest_flag(argv: list[str]) -> list[str]:
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--manifest":
            skip = True
        elif not a.startswith("--manifest="):
            out.append(a)
    return out


def _replay(path: str) -> int:
    man = json.loads(Path(path).read_text(encoding="utf-8"))
    args = build_parser().parse_args(man["argv"])
    output = args.func(args)
    same = hashlib.sha256(output.encode()).hexdigest() == man["output_sha256"]
    print(json.dumps({"reproduced": same}))
    return EXIT_OK if same else 1


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            return _replay(args.manifest_path)
        output = args.func(args)
        status = EXIT_OK
    except InvalidCertificate as exc:
        output, status = exc.output, EXIT_CERT
    except CertificateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CERT
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ParameterError, NotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    if not getattr(args, "out", None):
        sys.stdout.write(output)
    if args.manifest:
        m = _manifest(_strip_manifest_flag(argv), args, output)
        Path(args.manifest).write_text(_dump(m), encoding="utf-8")
    return status


if __name__ == "__main__":
    sys.exit(main())
