"""Batch front-end: build complexes, run experiments, emit certificates.

Exit codes: 0 success or witness found, 2 not found / not implied,
3 budget exceeded, 4 input error.  Identical configurations produce
byte-identical outputs, except for the generated_at field of certificates
which replay verification ignores.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import building as bldg
from . import coset_game as game
from .errors import BudgetExceeded, FiberscopeError
from .flag_complex import FlagComplex

EXIT_OK = 0
EXIT_NOT_FOUND = 2
EXIT_BUDGET = 3
EXIT_INPUT = 4

ESTIMATE_HEADER = "predicate,samples,seed,p_hat,ci_low,ci_high"


def _load_complex(args):
    if args.complex_file:
        return FlagComplex.from_text(Path(args.complex_file).read_text())
    if args.k is not None and args.p is not None:
        return bldg.build_typeA(args.k, args.p).complex
    raise ValueError("provide either --complex-file or both --k and --p")


def cmd_build(args):
    b = bldg.build_typeA(args.k, args.p)
    cx = b.complex
    text = b.dump_text()
    if args.out:
        Path(args.out).write_text(text)
    f = cx.f_vector()
    chi, _ = cx.chromatic_number()
    girth, square_free = cx.girth_and_square_free()
    print(f"vertices {cx.n}")
    print(f"edges {cx.edge_count()}")
    print(f"f_vector {','.join(str(x) for x in f)}")
    print(f"chromatic_number {chi}")
    print(f"kappa2 {cx.charney_davis(2)}")
    print(f"girth {girth}")
    print(f"square_free {square_free}")
    print(f"chambers {len(b.chambers)}")
    print(f"thickness {b.thickness}")
    print(f"diameter {b.diameter}")
    return EXIT_OK


def cmd_estimate(args):
    cx = _load_complex(args)
    if args.strategy == "exhaustive":
        hits, total = game.exact_fraction(cx, args.predicate, workers=args.workers)
        p = hits / total
        row = f"{args.predicate},{total},,{p:.9f},{p:.9f},{p:.9f}"
    else:
        est = game.estimate_fraction(
            cx, args.predicate, args.samples, args.seed, workers=args.workers
        )
        row = (
            f"{est.predicate},{est.samples},{est.seed},"
            f"{est.p_hat:.9f},{est.ci_low:.9f},{est.ci_high:.9f}"
        )
    output = ESTIMATE_HEADER + "\n" + row + "\n"
    if args.out:
        Path(args.out).write_text(output)
    print(output, end="")
    return EXIT_OK


def cmd_certify(args):
    cx = _load_complex(args)
    chi, coloring = cx.chromatic_number()
    system = game.move_system_from_coloring(cx, coloring)
    mode = "homological" if args.mode == "hom" else "connectivity"
    cert = game.coset_search(
        cx, system, args.m, mode=mode, strategy=args.strategy,
        samples=args.samples, seed=args.seed, workers=args.workers,
    )
    if cert is None:
        print(f"NOT-FOUND m={args.m} mode={mode} strategy={args.strategy} chi={chi}")
        return EXIT_NOT_FOUND
    cert.generated_at = datetime.now(timezone.utc).isoformat()
    payload = cert.to_json()
    if args.out:
        Path(args.out).write_text(payload)
    else:
        print(payload, end="")
    ok, failures = game.verify_certificate(cert)
    if not ok:
        print("REPLAY-FAILED " + "; ".join(failures))
        return EXIT_INPUT
    print(f"FOUND m={args.m} mode={mode} rep={cert.rep_bits_hex} replay=pass")
    return EXIT_OK


def cmd_verify_certificate(args):
    cert = game.FiberCertificate.from_json(Path(args.path).read_text())
    ok, failures = game.verify_certificate(cert)
    if ok:
        print("PASS")
        return EXIT_OK
    for f in failures:
        print(f"FAIL {f}")
    return EXIT_NOT_FOUND


def cmd_pigeonhole(args):
    cx = _load_complex(args)
    mode = "homological" if args.mode == "hom" else "connectivity"
    report = game.pigeonhole_check(
        cx, args.m, mode=mode, counting=args.strategy,
        samples=args.samples, seed=args.seed, workers=args.workers,
    )
    print(f"n {report.n}")
    print(f"chromatic_number {report.chi}")
    print(f"threshold {report.threshold_str()}")
    if report.count is not None:
        print(f"count {report.count}")
    if report.p_hat is not None:
        print(f"p_hat {report.p_hat:.9f}")
        print(f"ci {report.ci_low:.9f} {report.ci_high:.9f}")
    print(f"verdict {report.verdict}")
    return EXIT_OK if report.verdict == "CERTIFIED" else EXIT_NOT_FOUND


def make_parser():
    parser = argparse.ArgumentParser(
        prog="fiberscope",
        description="Finite buildings, random subcomplexes, and legal-coset certificates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_complex_source(p):
        p.add_argument("--k", type=int, default=None, help="building rank")
        p.add_argument("--p", type=int, default=None, help="prime field order")
        p.add_argument("--complex-file", default=None, help="complex in text format")

    b = sub.add_parser("build", help="construct a type-A building")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--out", default=None, help="write the complex text here")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("estimate", help="estimate a subcomplex-predicate fraction")
    add_complex_source(e)
    e.add_argument("--predicate", required=True,
                   help="not-connected | not-k-acyclic:K | trivial-top-homology:D | not-chamber-complex:D")
    e.add_argument("--strategy", choices=["exhaustive", "sampled"], default="sampled")
    e.add_argument("--samples", type=int, default=100000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("certify", help="search for a legal coset certificate")
    add_complex_source(c)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--mode", choices=["hom", "conn"], default="hom")
    c.add_argument("--strategy", choices=["exhaustive", "sampled"], default="exhaustive")
    c.add_argument("--samples", type=int, default=None)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify-cert", help="replay a certificate from scratch")
    v.add_argument("path")
    v.set_defaults(func=cmd_verify_certificate)

    g = sub.add_parser("pigeonhole", help="census of bad subcomplexes vs threshold")
    add_complex_source(g)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--mode", choices=["hom", "conn"], default="hom")
    g.add_argument("--strategy", choices=["exhaustive", "sampled"], default="exhaustive")
    g.add_argument("--samples", type=int, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--workers", type=int, default=1)
    g.set_defaults(func=cmd_pigeonhole)

    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FiberscopeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
