"""Verification reports: run the full pipeline on a scheme and serialize it."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .algebra import radical_char0
from .linalg import FieldSpec
from .scheme import (Scheme, classify, count_nonzero_intersections, intersection_tensor,
                     load_scheme, two_element_pairs, validate)
from .terwilliger import (bad_pair_analysis, build_context, check_canonical_basis, decompose,
                          generate_T, j1_basis, theorem_a_dimension, triply_regular_quasithin,
                          vertex_invariance_report)

SCHEMA = "quasithin.verification/1"
BATCH_SCHEMA = "quasithin.batch/1"
DEFAULT_CHARS = (0, 2, 3)


def passed(**extra) -> dict:
    return {"status": "pass", **extra}


def failed(reason: str, **extra) -> dict:
    return {"status": "fail", "reason": reason, **extra}


def skipped(reason: str, **extra) -> dict:
    return {"status": "skipped", "reason": reason, **extra}


def check(ok: bool, reason: str, **extra) -> dict:
    return passed(**extra) if ok else failed(reason, **extra)


@dataclass
class VerifyOptions:
    chars: Sequence[int] = DEFAULT_CHARS
    vertex: int = 0
    all_vertices: bool = False
    timings: bool = False


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.marks: Dict[str, int] = {}

    def run(self, key: str, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        self.marks[key] = int(round((time.perf_counter() - t0) * 1000))
        return out


def _field_report(s: Scheme, t, p: int, opts: VerifyOptions, quasi_thin: bool, thin: bool) -> dict:
    f = FieldSpec(p)
    clock = _Clock(opts.timings)
    ctx = build_context(s, opts.vertex, f, t)
    T = clock.run("closure", generate_T, ctx)
    rep: dict = {"characteristic": p, "field": f.name,
                 "p_prime_valenced": classify(t, p).p_prime_valenced_for(p)}
    if not quasi_thin:
        rep["dimension"] = skipped("scheme is not quasi-thin; formula does not apply",
                                   formula=None, oracle=T.dim, equal=None)
        for key in ("canonical_basis", "radical", "blocks", "vertex_invariance"):
            rep[key] = skipped("scheme is not quasi-thin")
        if opts.timings:
            rep["timings_ms"] = clock.marks
        return rep
    formula = theorem_a_dimension(t)
    rep["dimension"] = check(formula == T.dim, "formula and closure dimensions differ",
                             formula=formula, oracle=T.dim, equal=formula == T.dim)
    cb = clock.run("canonical_basis", check_canonical_basis, ctx, T)
    rep["canonical_basis"] = check(cb.ok, "canonical basis does not span the algebra",
                                   size=cb.basis_size, spans=cb.spans_equal)
    try:
        dec = clock.run("decompose", decompose, ctx, T, strict=False)
    except Exception as exc:  # a failure here is a verdict, not a crash
        rep["radical"] = failed(f"decomposition raised {type(exc).__name__}: {exc}")
        rep["blocks"] = failed("decomposition unavailable")
    else:
        extra: dict = {"dimension": dec.radical_dim, "nilpotency_index": dec.nilpotency_index,
                       "branch": dec.branch}
        ok = dec.certified
        reason = dec.certificate.reason
        if dec.branch == "p=2":
            equals_j1 = dec.radical == j1_basis(ctx)
            extra["equals_j1"] = equals_j1
            ok = ok and equals_j1 and dec.radical_dim > 0
        else:
            ok = ok and dec.radical_dim == 0
        if p == 0:
            r0 = clock.run("radical_char0", radical_char0, T)
            extra["char0_oracle_dimension"] = r0.dim
            if r0.dim != dec.radical_dim:
                ok, reason = False, "certified radical disagrees with the trace-form radical"
        if dec.identity_check is not None:
            extra["identity_check"] = dec.identity_check
        rep["radical"] = check(ok, reason, **extra)
        sizes = dec.block_sizes
        rep["blocks"] = check(dec.certificate.quotient is not None and dec.certificate.quotient.verified,
                              reason, sizes=sizes, dims=[c * c for c in sizes],
                              quotient_dimension=T.dim - dec.radical_dim)
    if opts.all_vertices:
        vi = clock.run("vertex_invariance", vertex_invariance_report, s, f, None, t)
        rep["vertex_invariance"] = check(vi.invariant, "structure constants differ between base vertices",
                                         vertices=s.n, mismatched=vi.mismatched)
    else:
        rep["vertex_invariance"] = skipped("run with --all-vertices")
    if opts.timings:
        rep["timings_ms"] = clock.marks
    return rep


def verify_scheme(s: Scheme, opts: Optional[VerifyOptions] = None, identifier: str = "") -> dict:
    """Full pipeline on one scheme; returns a JSON-ready report."""
    opts = opts or VerifyOptions()
    ident = identifier or s.name or "scheme"
    report: dict = {"schema": SCHEMA, "scheme": ident, "n": s.n, "d": s.d}
    val = validate(s)
    if val:
        report["valid"] = False
        report["violations"] = [str(v) for v in val]
        report["verdict"] = "fail"
        return report
    if not (0 <= opts.vertex < s.n):
        raise ValueError(f"base vertex {opts.vertex} outside [0, {s.n})")
    t = intersection_tensor(s)
    cls = classify(t)
    report["valid"] = True
    report["base_vertex"] = opts.vertex
    report["valency_histogram"] = {str(k): v for k, v in cls.histogram().items()}
    report["classification"] = {"thin": cls.is_thin, "quasi_thin": cls.is_quasi_thin}
    report["nonzero_intersection_numbers"] = count_nonzero_intersections(t)
    report["two_element_pairs"] = len(two_element_pairs(t))
    if cls.is_quasi_thin:
        bp = bad_pair_analysis(t)
        report["bad_pairs"] = [list(pq) for pq in bp.pairs]
        report["bad_pairs_restricted_reading"] = [list(pq) for pq in bp.restricted_pairs]
        tr = triply_regular_quasithin(t)
        report["triply_regular"] = passed(value=tr.triply_regular,
                                          witness=list(tr.witness) if tr.witness else None,
                                          witness_count=len(tr.witnesses))
    else:
        report["bad_pairs"] = None
        report["triply_regular"] = skipped("scheme is not quasi-thin")
    report["fields"] = [_field_report(s, t, p, opts, cls.is_quasi_thin, cls.is_thin) for p in opts.chars]
    report["verdict"] = "pass" if report_passes(report) else "fail"
    return report


def _statuses(obj):
    if isinstance(obj, dict):
        if "status" in obj:
            yield obj["status"]
        for v in obj.values():
            yield from _statuses(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _statuses(v)


def report_passes(report: dict) -> bool:
    if not report.get("valid", False):
        return False
    return all(s != "fail" for s in _statuses(report))


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# batch ----------------------------------------------------------------------

def _verify_path(args) -> dict:
    path, opts = args
    ident = Path(path).stem
    try:
        s = load_scheme(path)
        return verify_scheme(s, opts, ident)
    except Exception as exc:
        return {"schema": SCHEMA, "scheme": ident, "verdict": "error",
                "error": f"{type(exc).__name__}: {exc}"}


def scheme_files(directory) -> List[Path]:
    return sorted(Path(directory).glob("*.scheme"), key=lambda p: p.stem)


def batch_verify(directory, opts: Optional[VerifyOptions] = None, jobs: int = 1) -> dict:
    """Verify every ``*.scheme`` file in a directory, ordered by identifier."""
    opts = opts or VerifyOptions()
    files = scheme_files(directory)
    work = [(str(p), opts) for p in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_verify_path, work))
    else:
        reports = [_verify_path(w) for w in work]
    reports.sort(key=lambda r: r["scheme"])
    summary = {"total": len(reports),
               "passed": sum(r["verdict"] == "pass" for r in reports),
               "failed": sum(r["verdict"] == "fail" for r in reports),
               "errors": sum(r["verdict"] == "error" for r in reports)}
    return {"schema": BATCH_SCHEMA, "characteristics": list(opts.chars), "reports": reports,
            "summary": summary}


CSV_COLUMNS = ["scheme", "n", "d", "thin", "quasi_thin", "characteristic", "dim_formula", "dim_oracle",
               "dim_equal", "radical_dim", "nilpotency_index", "block_sizes", "vertex_invariance",
               "triply_regular", "verdict"]


def csv_rows(reports: Sequence[dict]) -> List[dict]:
    rows = []
    for r in reports:
        if r.get("verdict") == "error" or not r.get("valid"):
            rows.append({"scheme": r["scheme"], "verdict": r["verdict"]})
            continue
        tr = r["triply_regular"]
        for fr in r["fields"]:
            dim = fr["dimension"]
            rad = fr["radical"]
            blocks = fr["blocks"]
            rows.append({
                "scheme": r["scheme"], "n": r["n"], "d": r["d"],
                "thin": r["classification"]["thin"], "quasi_thin": r["classification"]["quasi_thin"],
                "characteristic": fr["characteristic"], "dim_formula": dim.get("formula"),
                "dim_oracle": dim.get("oracle"), "dim_equal": dim.get("equal"),
                "radical_dim": rad.get("dimension"), "nilpotency_index": rad.get("nilpotency_index"),
                "block_sizes": " ".join(str(c) for c in blocks.get("sizes", [])),
                "vertex_invariance": fr["vertex_invariance"]["status"],
                "triply_regular": tr.get("value"), "verdict": r["verdict"],
            })
    return rows


def to_csv(reports: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in csv_rows(reports):
        w.writerow(row)
    return buf.getvalue()
