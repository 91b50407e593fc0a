"""Command-line front end: validate | info | verify | batch | fetch.

Exit codes: 0 all checks pass, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .fetch import FetchError, fetch_corpus
from .reports import VerifyOptions, batch_verify, dumps, to_csv, verify_scheme
from .scheme import SchemeFormatError, classify, intersection_tensor, load_scheme, validate

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message short
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _load(args):
    return load_scheme(args.file, headerless=args.headerless)


def cmd_validate(args) -> int:
    s = _load(args)
    report = validate(s)
    if not report:
        print(f"{args.file}: valid scheme (n={s.n}, d={s.d})")
        return EXIT_OK
    print(f"{args.file}: INVALID")
    for v in report:
        print(f"  {v}")
    return EXIT_FAIL


def cmd_info(args) -> int:
    s = _load(args)
    report = validate(s)
    if report:
        for v in report:
            print(f"  {v}")
        return EXIT_FAIL
    t = intersection_tensor(s)
    cls = classify(t)
    print(f"scheme {s.name}: n={s.n} d={s.d}")
    print("valencies: " + " ".join(str(int(k)) for k in t.k))
    print(f"thin={cls.is_thin} quasi_thin={cls.is_quasi_thin}")
    return EXIT_OK


def _options(args) -> VerifyOptions:
    return VerifyOptions(chars=tuple(args.char), vertex=args.vertex, all_vertices=args.all_vertices,
                         timings=args.timings)


def _summary_lines(rep: dict) -> List[str]:
    lines = [f"{rep['scheme']}: n={rep.get('n')} d={rep.get('d')} verdict={rep['verdict']}"]
    if not rep.get("valid", True):
        lines += [f"  {v}" for v in rep.get("violations", [])]
        return lines
    if "error" in rep:
        return lines + [f"  error: {rep['error']}"]
    tr = rep["triply_regular"]
    if tr["status"] == "pass":
        lines.append(f"  bad pairs: {rep['bad_pairs']}  triply regular: {tr['value']}"
                     + (f" witness {tr['witness']}" if tr["witness"] else ""))
    for fr in rep["fields"]:
        dim, rad, blocks = fr["dimension"], fr["radical"], fr["blocks"]
        parts = [f"  {fr['field']}: dim formula={dim.get('formula')} closure={dim.get('oracle')}"]
        if "dimension" in rad:
            parts.append(f"radical={rad['dimension']}")
        if "sizes" in blocks:
            parts.append(f"blocks={blocks['sizes']}")
        parts.append(f"vertex_invariance={fr['vertex_invariance']['status']}")
        lines.append(" ".join(parts))
        for key in ("dimension", "canonical_basis", "radical", "blocks", "vertex_invariance"):
            if fr[key]["status"] == "fail":
                lines.append(f"    {key}: FAIL {fr[key].get('reason', '')}")
    return lines


def cmd_verify(args) -> int:
    s = _load(args)
    rep = verify_scheme(s, _options(args), identifier=Path(args.file).stem)
    if args.json:
        Path(args.json).write_text(dumps(rep), encoding="utf-8")
    print("\n".join(_summary_lines(rep)))
    return EXIT_OK if rep["verdict"] == "pass" else EXIT_FAIL


def cmd_batch(args) -> int:
    if not Path(args.dir).is_dir():
        print(f"error: {args.dir} is not a directory", file=sys.stderr)
        return EXIT_ERROR
    agg = batch_verify(args.dir, _options(args), jobs=args.jobs)
    text = dumps(agg)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(to_csv(agg["reports"]), encoding="utf-8")
    for rep in agg["reports"]:
        print("\n".join(_summary_lines(rep)))
    sm = agg["summary"]
    print(f"total={sm['total']} passed={sm['passed']} failed={sm['failed']} errors={sm['errors']}")
    return EXIT_OK if sm["passed"] == sm["total"] else EXIT_FAIL


def cmd_fetch(args) -> int:
    man, written = fetch_corpus(args.base_url, args.list, args.dest, timeout=args.timeout)
    print(f"{len(man.entries)} schemes from {man.source}; {written} files written to {args.dest}")
    return EXIT_OK


def _characteristic(text: str) -> int:
    from .linalg import FieldSpec
    try:
        return FieldSpec(int(text)).characteristic
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="quasithin", description="Exact verification of Terwilliger algebras of quasi-thin schemes.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scheme_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file")
        p.add_argument("--import", dest="headerless", action="store_true",
                       help="read a headerless relation matrix")
        return p

    def verify_flags(p):
        p.add_argument("--char", nargs="+", type=_characteristic, default=[0, 2, 3],
                       help="field characteristics (0 means the rationals)")
        p.add_argument("--vertex", type=int, default=0, help="base vertex")
        p.add_argument("--all-vertices", action="store_true", help="check invariance over every base vertex")
        p.add_argument("--timings", action="store_true", help="include wall-clock timings in reports")

    scheme_cmd("validate", "check the scheme axioms")
    scheme_cmd("info", "print valencies and classification")
    p = scheme_cmd("verify", "run the full pipeline on one scheme")
    verify_flags(p)
    p.add_argument("--json", help="write the JSON report here")

    p = sub.add_parser("batch", help="verify every *.scheme file in a directory")
    p.add_argument("dir")
    verify_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write the aggregate JSON report here")
    p.add_argument("--csv", help="write a CSV summary (one row per scheme and characteristic)")

    p = sub.add_parser("fetch", help="download a classification list into a corpus directory")
    p.add_argument("list", help="list identifier, e.g. 28")
    p.add_argument("--dest", default="corpus/fetched")
    p.add_argument("--base-url", default=None, help="overrides $QUASITHIN_CORPUS_URL")
    p.add_argument("--timeout", type=float, default=30.0)
    return ap


COMMANDS = {"validate": cmd_validate, "info": cmd_info, "verify": cmd_verify, "batch": cmd_batch,
            "fetch": cmd_fetch}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return COMMANDS[args.command](args)
    except (OSError, SchemeFormatError, FetchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
