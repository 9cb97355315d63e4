"""srg-forge command line.

Exit codes: 0 all checks pass, 1 a check failed (report still written),
2 usage, input or I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import blocks, formats, pds

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _print(msg: str = "") -> None:
    print(msg, flush=True)


###############################################################################
#   commands
###############################################################################

def cmd_construct(args) -> int:
    t0 = time.perf_counter()
    try:
        sys_ = blocks.build_system(args.m, args.q, args.seed)
    except blocks.ConstructionError as exc:
        raise UsageError(str(exc))
    out = args.out or f"system_m{args.m}_q{'-'.join(map(str, args.q))}.json"
    formats.save_system(sys_, out)
    _print(f"system m={sys_.m} q={','.join(map(str, args.q))}: u={sys_.u} |G|={sys_.group.order}")
    sizes = sorted({(y == 0, len(B)) for _, _, y, B in sys_.items()})
    for zero_row, size in sizes:
        _print(f"  block size {size} ({'y = 0' if zero_row else 'y != 0'})")
    _print(f"wrote {out} ({time.perf_counter() - t0:.2f}s)")
    return EXIT_OK


def cmd_verify(args) -> int:
    sys_ = formats.load_system(args.file)
    backend = "fast" if args.method == "fast" else "naive"
    results = {}
    timings = {}
    for c in args.conditions:
        if c not in (1, 2, 3, 4, 5):
            raise UsageError(f"unknown condition {c}")
        t0 = time.perf_counter()
        results[c] = blocks.verify(sys_, [c], backend, args.threads)[c]
        timings[str(c)] = round(time.perf_counter() - t0, 4)
    ok = all(r.passed for r in results.values())
    for c, r in results.items():
        line = f"condition ({c}): {'pass' if r.passed else 'FAIL'}"
        if not r.passed:
            line += f"  witness={json.dumps(r.witness)}"
        _print(line)
    if args.report:
        formats.save_report({
            "system": str(args.file),
            "m": sys_.m, "u": sys_.u, "order": sys_.group.order,
            "method": args.method,
            "passed": ok,
            "conditions": [r.to_dict() for r in results.values()],
            "timings": timings,
        }, args.report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_derive(args) -> int:
    sys_ = formats.load_system(args.file)
    try:
        if args.family == "S":
            if args.x is None:
                raise UsageError("--family S needs --x")
            cand = pds.derive_S(sys_, args.x)
            name = f"S_{args.x % sys_.m}"
        else:
            if args.y1 is None or args.y2 is None:
                raise UsageError("--family T needs --y1 and --y2")
            cand = pds.derive_T(sys_, args.y1, args.y2)
            name = f"T_{args.y1 % sys_.m},{args.y2 % sys_.m}"
    except pds.PdsError as exc:
        _print(f"derivation failed: {exc}")
        return EXIT_FAIL
    out = args.out or f"{name.replace(',', '_')}.json"
    formats.save_candidate(cand, out)
    _print(f"{name}: size {len(cand)}; predicted {cand.predicted} ({cand.predicted.type_tag})")
    _print(f"wrote {out}")
    return EXIT_OK


def cmd_check(args) -> int:
    cand = formats.load_candidate(args.file)
    methods = pds.METHODS if args.method == "all" else (args.method,)
    rep = pds.check_pds(cand, methods, backend=args.backend)
    for name, r in rep.methods.items():
        line = f"{name:>6}: {'pass' if r.passed else 'FAIL'}"
        if r.params:
            line += f"  ({r.params})"
        _print(line)
    for name in rep.skipped:
        _print(f"{name:>6}: skipped (size guard)")
    if rep.params:
        _print(f"v k lambda mu: {rep.params}")
        forms = rep.params.latin_forms()
        tag = rep.params.type_tag
        if rep.params.is_conference:
            tag += " (conference graph)"
        if forms:
            tag += "; " + ", ".join(f"u={u} c={c} eps={e:+d}" for u, c, e in forms)
        _print(f"type: {tag}")
    if rep.eigenvalues:
        _print(f"restricted eigenvalues: {list(rep.eigenvalues)}")
    if rep.degenerate:
        _print(f"degenerate: {rep.degenerate}")
    if not rep.passed:
        _print(f"witness: {json.dumps(rep.witness)}")
    if cand.predicted and rep.params and rep.params != cand.predicted:
        _print(f"note: predicted {cand.predicted} differs from measured {rep.params}")
    if args.report:
        formats.save_report({"candidate": str(args.file), "pds": rep.to_dict(),
                             "predicted": cand.predicted.to_dict() if cand.predicted else None},
                            args.report)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_fuse(args) -> int:
    cands = [formats.load_candidate(f) for f in args.files]
    try:
        fused = pds.fuse(cands)
    except pds.FusionError as exc:
        _print(f"fusion rejected: {exc}")
        _print(f"witness: {json.dumps(exc.witness)}")
        return EXIT_FAIL
    out = args.out or "fused.json"
    formats.save_candidate(fused, out)
    _print(f"fused {len(cands)} sets: size {len(fused)}; predicted {fused.predicted}")
    _print(f"wrote {out}")
    return EXIT_OK


def cmd_export(args) -> int:
    cand = formats.load_candidate(args.file)
    path = Path(args.out)
    if args.format == "graph6":
        path.write_bytes(formats.to_graph6(cand.D, header=args.header) + b"\n")
    elif args.format == "edges":
        with path.open("w") as fh:
            for line in formats.edge_lines(cand.D):
                fh.write(line + "\n")
    else:
        formats.save_candidate(cand, path)
    _print(f"wrote {path}")
    return EXIT_OK


def cmd_params(args) -> int:
    try:
        if args.theorem == "main1":
            params = pds.params_main1(args.u, args.m, args.i)
        else:
            if args.form is None or args.j is None:
                raise UsageError("main2 needs --form and --j")
            params = pds.params_main2(args.u, args.m, args.form, args.i, args.j)
    except pds.PdsError as exc:
        raise UsageError(str(exc))
    _print(str(params))
    if params.degenerate:
        _print(f"degenerate: {params.degenerate}")
    return EXIT_OK


###############################################################################
#   parser
###############################################################################

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="srg-forge",
                                 description="Build and verify 2m^2 building-block systems "
                                             "and the strongly regular Cayley graphs they give.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a (product) block system")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=_int_list, required=True, help="q1[,q2,...]")
    p.add_argument("--seed", type=int, default=None,
                   help="shuffle the partition choices; omitted means the canonical choice")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="check conditions (1)-(5) on a system file")
    p.add_argument("file")
    p.add_argument("--conditions", type=_int_list, default=[1, 2, 3, 4, 5])
    p.add_argument("--method", choices=("exact", "fast"), default="exact",
                   help="character scan backend (both exact): naive summation or fast transform")
    p.add_argument("--report")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("derive", help="extract S_x or T_{y1,y2}")
    p.add_argument("file")
    p.add_argument("--family", choices=("S", "T"), required=True)
    p.add_argument("--x", type=int)
    p.add_argument("--y1", type=int)
    p.add_argument("--y2", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check", help="verify a candidate partial difference set")
    p.add_argument("file")
    p.add_argument("--method", choices=("diff", "char", "matrix", "all"), default="all")
    p.add_argument("--backend", choices=("naive", "fast"), default="naive")
    p.add_argument("--report")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("fuse", help="union of disjoint candidates of one type")
    p.add_argument("files", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("export", help="write the Cayley graph of a candidate")
    p.add_argument("file")
    p.add_argument("--format", choices=("graph6", "edges", "json"), default="graph6")
    p.add_argument("--header", action="store_true", help="prefix graph6 output with >>graph6<<")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("params", help="predicted SRG parameters")
    p.add_argument("--theorem", choices=("main1", "main2"), required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int)
    p.add_argument("--form", type=int, choices=(1, 2))
    p.set_defaults(func=cmd_params)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, formats.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
