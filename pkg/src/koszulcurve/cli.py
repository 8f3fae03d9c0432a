"""Command-line front end.

    koszulcurve betti JOB [--field Fp:10007] [--format text|csv|json]
    koszulcurve koszul JOB --p 3 --q 1
    koszulcurve gonality JOB [--brute]
    koszulcurve pva JOB --p 1
    koszulcurve verify-thm11 JOB
    koszulcurve verify-thm12 JOB --p 1
    koszulcurve verify-cor JOB --p 1
    koszulcurve duality JOB
    koszulcurve run JOB              (command taken from the job file)
    koszulcurve suite [--jobs N]

Exit status: 0 success, 1 a verdict came out false, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .errors import ClassificationError, KoszulCurveError
from .exactalg.fields import field_label
from .jobspec import COMMANDS, parse_divisor, parse_job
from .koszul import GradedSectionData, KoszulComplex, _normalize
from .verify import (
    BRUTE_FORCE,
    FAMILY_FORMULA,
    bvanishing_check,
    corollary_pattern_check,
    duality_check,
    gonality,
    gonality_pattern_check,
    is_exceptional,
    is_p_very_ample,
    table_with_checks,
)

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2


class CliUsageError(Exception):
    pass


# ---------------------------------------------------------------- report helpers


def _gon_or_none(model):
    try:
        return gonality(model).value
    except KoszulCurveError:
        return None


def _header(job, B=None, L=None):
    model = job.model
    B = _normalize(model, job.B) if B is None else B
    L = _normalize(model, job.L) if (L is None and job.L is not None) else L
    return {
        "job": job.name,
        "curve": model.describe(),
        "field": field_label(model.field),
        "B": B.label() if B is not None else None,
        "L": L.label() if L is not None else None,
        "g": model.genus,
        "degL": L.degree if L is not None else None,
        "gon": _gon_or_none(model) if model.genus >= 1 or model.family == "rational" else None,
        "exceptional": bool(is_exceptional(model, L)) if (L is not None and model.genus >= 2) else False,
    }


def _require(value, what):
    if value is None:
        raise CliUsageError(f"this command needs {what}")
    return value


def _triples(d, q=1):
    return [[p, q, v] for p, v in sorted(d.items())]


# ---------------------------------------------------------------- commands


def cmd_betti(job, params):
    _require(job.L, "a divisor L")
    q_max = params.get("q_max", 3)
    table, hil = table_with_checks(job.model, job.B, job.L, q_max=q_max)
    rep = _header(job)
    rep["gon"] = table.gon
    rep["exceptional"] = bool(table.exceptional)
    rep["dims"] = [[p, q, table.dims[p][q]] for p in range(len(table.dims)) for q in range(q_max + 1)]
    rep["table"] = table.dims
    rep["h0L"] = table.h0L
    rep["section_dims"] = table.section_dims
    rep["ranks"] = [[p, q, r] for (p, q), r in sorted(table.ranks.items())]
    rep["hilbert"] = {"ok": hil.ok, "lhs": hil.lhs, "rhs": hil.rhs, "first_mismatch": hil.first_mismatch}
    rep["verdict"] = hil.ok
    rep["_text"] = table.format() + f"\nHilbert identity: {'holds' if hil.ok else 'FAILS at degree %s' % hil.first_mismatch}"
    return rep


def cmd_koszul(job, params):
    _require(job.L, "a divisor L")
    p = _require(params.get("p"), "--p")
    q = _require(params.get("q"), "--q")
    data = GradedSectionData(job.model, job.B, job.L)
    cx = KoszulComplex(data)
    dim = cx.dim(p, q)
    rep = _header(job)
    rep.update(
        p=p,
        q=q,
        dims=[[p, q, dim]],
        chain_dim=cx.chain_dim(p, q),
        rank_out=cx.rank(p, q),
        rank_in=cx.rank(p + 1, q - 1),
        section_dims=[data.w_dim(k) for k in range(max(q + 2, 2))],
        verdict=True,
    )
    rep["_text"] = f"dim K_{{{p},{q}}} = {dim}  (chain {rep['chain_dim']} - rank out {rep['rank_out']} - rank in {rep['rank_in']})"
    return rep


def cmd_gonality(job, params):
    method = BRUTE_FORCE if params.get("brute") else FAMILY_FORMULA
    cert = gonality(job.model, method)
    ok = cert.verify(job.model)
    rep = _header(job)
    rep.update(
        gon=cert.value,
        method=cert.method,
        witness=cert.witness_label(),
        exhaustive_up_to=cert.exhaustive_up_to,
        notes=cert.notes,
        dims=[],
        verdict=ok,
    )
    rep["_text"] = f"gon = {cert.value} ({cert.method}); witness {cert.witness_label()}" + (
        f"; exhaustive over {rep['field']} up to degree {cert.exhaustive_up_to}" if cert.exhaustive_up_to else ""
    )
    return rep


def cmd_pva(job, params):
    p = _require(params.get("p"), "--p")
    res = is_p_very_ample(job.model, job.B, p)
    rep = _header(job)
    witness = None if res.witness is None else " + ".join(f"{k}*{P.label()}" for P, k in res.witness)
    rep.update(
        p=p,
        p_very_ample=res.value,
        witness=witness,
        exhaustive=res.exhaustive,
        divisors_checked=res.checked,
        h0B=res.h0B,
        dims=[],
        verdict=True,
    )
    rep["_text"] = f"B = {rep['B']} is {'' if res.value else 'not '}{p}-very ample" + (
        f"; witness xi = {witness}" if witness else ""
    ) + f" ({res.checked} divisors checked{', exhaustive' if res.exhaustive else ''})"
    return rep


def cmd_gonality_pattern(job, params):
    _require(job.L, "a divisor L")
    r = gonality_pattern_check(job.model, job.L)
    rep = _header(job)
    rep.update(
        gon=r.gon,
        exceptional=r.exceptional,
        r=r.r,
        expected_range=r.expected,
        computed_range=r.computed_range,
        dims=_triples(r.dims),
        section_dims=r.extra["sections"],
        verdict=r.verdict,
    )
    rep["_text"] = (
        f"expected K_p,1 != 0 for p in {r.expected}; computed {r.computed_range}\n"
        + "K_p,1: " + " ".join(f"{p}:{v}" for p, v in sorted(r.dims.items()))
    )
    return rep


def cmd_bvanishing(job, params):
    p = _require(params.get("p"), "--p")
    r = bvanishing_check(job.model, job.B, p)
    B = _normalize(job.model, job.B)
    rep = _header(job, B=B, L=_normalize(job.model, B + job.model.canonical_divisor()))
    rep.update(
        p=p,
        h0B=r.h0B,
        branch=r.branch,
        expected=r.expected,
        dims=[[p, 1, r.computed]],
        verdict=r.verdict,
    )
    rep["_text"] = f"h0(B) = {r.h0B} ({r.branch}); dim K_{{{p},1}}(C,B;B+K) = {r.computed}, expected {r.expected}"
    return rep


def cmd_cor(job, params):
    _require(job.L, "a divisor L")
    p = _require(params.get("p"), "--p")
    r = corollary_pattern_check(job.model, job.B, job.L, p)
    rep = _header(job)
    rep.update(
        p=p,
        h0B=r.h0B,
        L_is_B_plus_K=r.L_is_B_plus_K,
        exceptional=r.exceptional,
        case=r.case,
        dims=_triples(r.dims),
        verdict=r.verdict,
    )
    rep["_text"] = (
        f"L ~ B+K: {r.L_is_B_plus_K}; exceptional: {r.exceptional} {r.case}\n"
        + "K_p,1(C,B;L): " + " ".join(f"{k}:{v}" for k, v in r.dims.items())
    )
    return rep


def cmd_duality(job, params):
    _require(job.L, "a divisor L")
    r = duality_check(job.model, job.L)
    rep = _header(job)
    rep.update(
        r=r.r,
        dims=_triples(r.left),
        dual_dims=[[r.r - 1 - p, 1, v] for p, v in sorted(r.right.items())],
        verdict=r.verdict,
    )
    rep["_text"] = (
        "K_p,1(C;L):          " + " ".join(f"{p}:{v}" for p, v in sorted(r.left.items()))
        + "\nK_r-1-p,1(C,K;L):     " + " ".join(f"{p}:{v}" for p, v in sorted(r.right.items()))
    )
    return rep


HANDLERS = {
    "betti": cmd_betti,
    "koszul": cmd_koszul,
    "gonality": cmd_gonality,
    "pva": cmd_pva,
    "verify-thm11": cmd_gonality_pattern,
    "verify-thm12": cmd_bvanishing,
    "verify-cor": cmd_cor,
    "duality": cmd_duality,
}
assert set(HANDLERS) == set(COMMANDS)


# ---------------------------------------------------------------- rendering


def render(rep, fmt):
    public = {k: v for k, v in rep.items() if not k.startswith("_")}
    if fmt == "json":
        return json.dumps(public, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["curve", "field", "B", "L", "p", "q", "dim"])
        curve = ";".join(f"{k}={v}" for k, v in public["curve"].items())
        for p, q, d in public.get("dims", []):
            w.writerow([curve, public["field"], public["B"], public["L"], p, q, d])
        return buf.getvalue().rstrip("\n")
    lines = []
    curve = ", ".join(f"{k}={v}" for k, v in public["curve"].items())
    lines.append(f"curve: {curve} over {public['field']}")
    lines.append(f"B = {public['B']}   L = {public['L']}")
    lines.append(f"g = {public['g']}  deg L = {public['degL']}  gon = {public['gon']}  exceptional = {public['exceptional']}")
    if rep.get("_text"):
        lines.append(rep["_text"])
    lines.append(f"verdict: {'true' if public['verdict'] else 'FALSE'}")
    return "\n".join(lines)


# ---------------------------------------------------------------- running jobs


def load_job(path, field=None, overrides=None):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return apply_overrides(parse_job(text, field_override=field), overrides or {})


def apply_overrides(job, overrides):
    for key in ("B", "L"):
        if overrides.get(key):
            D = parse_divisor(overrides[key], job.model)
            setattr(job, key, D)
            setattr(job, f"{key}_text", overrides[key])
    return job


def run_job(job, command, params):
    if command not in HANDLERS:
        raise CliUsageError(f"unknown command {command!r}")
    merged = dict(job.params)
    merged.update({k: v for k, v in params.items() if v is not None})
    return HANDLERS[command](job, merged)


# ---------------------------------------------------------------- suite


@dataclass(frozen=True)
class SuiteEntry:
    label: str
    job: str
    command: str
    params: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)
    field_text: str | None = None


SUITE = (
    SuiteEntry("genus 2, L = 2K: exceptional pattern", "genus2.job", "verify-thm11"),
    SuiteEntry("Klein quartic, L = 2K: exceptional pattern", "klein.job", "verify-thm11"),
    SuiteEntry("genus 3 hyperelliptic, L = 2K: clean pattern", "hyperelliptic_g3.job", "verify-thm11"),
    SuiteEntry("Klein quartic, deg L = 4g-3", "klein_deg9.job", "verify-thm11"),
    SuiteEntry("twisted cubic Betti table", "twisted_cubic.job", "betti"),
    SuiteEntry("genus 2 Betti table", "genus2.job", "betti"),
    SuiteEntry("Klein quartic Betti table", "klein.job", "betti"),
    SuiteEntry("genus 3 hyperelliptic Betti table", "hyperelliptic_g3.job", "betti"),
    SuiteEntry("Klein deg 9 Betti table", "klein_deg9.job", "betti"),
    SuiteEntry("h0(B) = p+2, g = 2", "genus2.job", "verify-thm12", {"p": 0}, {"B": "2*Pinf"}),
    SuiteEntry("h0(B) >= p+3, g = 2", "genus2.job", "verify-thm12", {"p": 1}, {"B": "5*Pinf"}),
    SuiteEntry("h0(B) = p+2, Klein", "klein.job", "verify-thm12", {"p": 1}, {"B": "1*H"}),
    SuiteEntry("h0(B) = p+1, rational p = 2", "twisted_cubic.job", "verify-thm12", {"p": 2}, {"B": "2*Pinf"}),
    SuiteEntry("h0(B) = p+1, rational p = 3", "twisted_cubic.job", "verify-thm12", {"p": 3}, {"B": "3*Pinf"}),
    SuiteEntry("corollary, g = 2 off the line", "genus2.job", "verify-cor", {"p": 0}, {"B": "2*Pinf", "L": "5*Pinf"}),
    SuiteEntry("corollary, g = 2 pencil", "genus2.job", "verify-cor", {"p": 0}, {"B": "2*Pinf", "L": "4*Pinf"}),
    SuiteEntry("corollary, Klein plane net", "klein.job", "verify-cor", {"p": 1}, {"B": "1*H", "L": "2*H"}),
    SuiteEntry("duality, genus 2", "genus2.job", "duality"),
    SuiteEntry("duality, Klein", "klein.job", "duality"),
    SuiteEntry("duality, genus 3 hyperelliptic", "hyperelliptic_g3.job", "duality"),
    SuiteEntry("brute gonality, genus 2 over F_11", "genus2.job", "gonality", {"brute": True}, {}, "Fp:11"),
    SuiteEntry("brute gonality, genus 3 over F_11", "hyperelliptic_g3.job", "gonality", {"brute": True}, {}, "Fp:11"),
    SuiteEntry("brute gonality, Klein over F_11", "klein.job", "gonality", {"brute": True}, {}, "Fp:11"),
)


def job_path(name):
    return str(resources.files("koszulcurve").joinpath("jobs", name))


def run_entry(entry, field_override=None):
    job = load_job(job_path(entry.job), entry.field_text or field_override, entry.overrides)
    rep = run_job(job, entry.command, dict(entry.params))
    rep["suite_label"] = entry.label
    return rep


def _run_entry_safe(args):
    entry, field_override = args
    try:
        return run_entry(entry, field_override)
    except KoszulCurveError as exc:
        return {"suite_label": entry.label, "error": str(exc), "verdict": False}


def run_suite(jobs=1, field_override=None):
    work = [(e, field_override) for e in SUITE]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_entry_safe, work))
    return [_run_entry_safe(w) for w in work]


def render_suite(reports, fmt):
    if fmt == "json":
        return json.dumps([{k: v for k, v in r.items() if not k.startswith("_")} for r in reports], indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "p", "q", "dim", "verdict"])
        for r in reports:
            for p, q, d in r.get("dims", []):
                w.writerow([r["suite_label"], p, q, d, r["verdict"]])
            if not r.get("dims"):
                w.writerow([r["suite_label"], "", "", "", r["verdict"]])
        return buf.getvalue().rstrip("\n")
    lines = []
    for r in reports:
        tag = "PASS" if r["verdict"] else "FAIL"
        detail = r.get("error") or (r.get("_text", "").splitlines() or [""])[-1]
        lines.append(f"[{tag}] {r['suite_label']}: {detail}")
    passed = sum(1 for r in reports if r["verdict"])
    lines.append(f"{passed}/{len(reports)} checks passed")
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="koszulcurve", description="Exact Koszul cohomology of explicit curves.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, needs_job=True):
        if needs_job:
            sp.add_argument("job", help="job file")
        sp.add_argument("--field", help="override the curve field: Q or Fp:<prime>")
        sp.add_argument("--format", choices=("text", "csv", "json"), default=None)
        sp.add_argument("--B", dest="B", help="override divisor B")
        sp.add_argument("--L", dest="L", help="override divisor L")
        return sp

    common(sub.add_parser("betti", help="Betti table with Hilbert check")).add_argument("--q-max", dest="q_max", type=int)
    sp = common(sub.add_parser("koszul", help="a single dim K_{p,q}"))
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)
    common(sub.add_parser("gonality", help="gonality certificate")).add_argument("--brute", action="store_true", default=None)
    common(sub.add_parser("pva", help="p-very ampleness of B")).add_argument("--p", type=int)
    common(sub.add_parser("verify-thm11", help="gonality pattern of K_{p,1}(C;L)"))
    common(sub.add_parser("verify-thm12", help="K_{p,1}(C,B;B+K) by h0(B) branch")).add_argument("--p", type=int)
    common(sub.add_parser("verify-cor", help="vanishing of K_{p,1}(C,B;L)")).add_argument("--p", type=int)
    common(sub.add_parser("duality", help="K_{p,1}(C;L) vs K_{r-1-p,1}(C,K;L)"))
    sp = common(sub.add_parser("run", help="run the command named in the job file"))
    sp.add_argument("--p", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--brute", action="store_true", default=None)
    sp = common(sub.add_parser("suite", help="run the built-in acceptance checks"), needs_job=False)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out, err = sys.stdout, sys.stderr
    try:
        if args.command == "suite":
            reports = run_suite(args.jobs, args.field)
            print(render_suite(reports, args.format or "text"), file=out)
            return EXIT_OK if all(r["verdict"] for r in reports) else EXIT_FALSIFIED
        job = load_job(args.job, args.field, {"B": args.B, "L": args.L})
        command = args.command
        if command == "run":
            command = job.command
            if command is None:
                raise CliUsageError("the job file has no [job] command")
        params = {k: getattr(args, k, None) for k in ("p", "q", "brute", "q_max")}
        rep = run_job(job, command, params)
        fmt = args.format or job.params.get("format", "text")
        if fmt not in ("text", "csv", "json"):
            raise CliUsageError(f"unknown format {fmt!r}")
        print(render(rep, fmt), file=out)
        return EXIT_OK if rep["verdict"] else EXIT_FALSIFIED
    except ClassificationError as exc:
        print(f"koszulcurve: falsified: {exc}", file=err)
        return EXIT_FALSIFIED
    except (CliUsageError, KoszulCurveError, OSError) as exc:
        print(f"koszulcurve: error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
