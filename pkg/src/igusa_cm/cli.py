"""Command line: ``igusa-cm run ...`` and ``igusa-cm report results.json``."""
from __future__ import annotations

import argparse
import logging
import sys

from .pipeline import FieldSpec, RunConfig, parse_fields_file, run_pipeline


def _field(s: str) -> FieldSpec:
    try:
        a, b = (int(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {s!r}")
    return FieldSpec(a, b)


def _perm(s: str) -> tuple[int, ...]:
    toks = [int(t) for t in s.replace(",", " ").split()]
    if sorted(toks) == list(range(1, 11)):
        toks = [t - 1 for t in toks]
    if sorted(toks) != list(range(10)):
        raise argparse.ArgumentTypeError("theta permutation must list 0..9 (or 1..10) once each")
    return tuple(toks)


def _ideal_data(s: str) -> tuple[tuple[int, int], str]:
    key, _, path = s.partition("=")
    a, b = (int(t) for t in key.split(","))
    if not path:
        raise argparse.ArgumentTypeError("expected 'a,b=PATH'")
    return (a, b), path


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="igusa-cm", description="Igusa class polynomials of quartic CM fields")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="compute class polynomials and the denominator report")
    r.add_argument("--field", type=_field, action="append", default=[], metavar="A,B", help="K = Q[x]/(x^4 + A x^2 + B); repeatable")
    r.add_argument("--fields-file", help="file of 'a b [expected_d]' lines")
    r.add_argument("--ideal-data", type=_ideal_data, action="append", default=[], metavar="A,B=PATH", help="external ideal classes for a field")
    r.add_argument("--precision", type=int, default=300, help="starting precision in bits (default 300)")
    r.add_argument("--max-doublings", type=int, default=4)
    r.add_argument("--cm-types", choices=["single", "all"], default="all")
    r.add_argument("--check-coeff-denoms", action=argparse.BooleanOptionalAction, default=True)
    r.add_argument("--theta-permutation", type=_perm, default=None, metavar="10-TUPLE")
    r.add_argument("--out", default="igusa_out", help="output directory")
    r.add_argument("--cache", default=None, help="theta cache directory")
    r.add_argument("--workers", type=int, default=1)

    rp = sub.add_parser("report", help="re-render report and figures from results.json")
    rp.add_argument("results")
    rp.add_argument("--out", default=None, help="output directory (default: next to results.json)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    if args.command == "report":
        from pathlib import Path

        from .report import load_document, write_document

        doc = load_document(args.results)
        paths = write_document(doc, args.out or Path(args.results).parent)
        for k, v in paths.items():
            print(f"{k}: {v}")
        return 0

    fields = list(args.field)
    if args.fields_file:
        fields += parse_fields_file(args.fields_file)
    if not fields:
        print("no fields given (use --field or --fields-file)", file=sys.stderr)
        return 2
    extra = dict(args.ideal_data)
    fields = [FieldSpec(f.a, f.b, f.expected_d, extra.get((f.a, f.b))) for f in fields]
    cfg = RunConfig(
        tuple(fields),
        precision_start=args.precision,
        max_doublings=args.max_doublings,
        cm_type_scope=args.cm_types,
        check_coefficient_denominators=args.check_coeff_denoms,
        out=args.out,
        cache=args.cache,
        theta_permutation=args.theta_permutation,
        workers=args.workers,
    )
    rec = run_pipeline(cfg)
    failed = 0
    for r in rec.fields:
        if r.status != "ok":
            failed += 1
            print(f"{r.spec.label}: FAILED {r.error}")
            continue
        rep = r.report
        verdict = "holds" if not rep.counterexamples else f"{len(rep.counterexamples)} counterexample prime(s)"
        print(f"{r.spec.label}: h = {r.class_number}, degree {r.polys.degree}, stable = {r.polys.stable}, prime check: {verdict}")
    print(f"outputs written to {args.out}")
    return 1 if failed == len(rec.fields) else 0


if __name__ == "__main__":
    sys.exit(main())
