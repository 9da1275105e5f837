"""``verify``: run registered verification cases and report pass/fail."""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .cases import REGISTRY, Options, tags

PASS, FAIL, DOCUMENTED = "pass", "fail", "discrepancy-documented"


class UnknownCase(KeyError):
    pass


@dataclass
class CaseReport:
    id: str
    paper_ref: str
    status: str
    witness: object = None
    millis: int = 0
    note: str | None = None
    detail: object = None

    def as_dict(self) -> dict:
        d = {"id": self.id, "status": self.status, "paper_ref": self.paper_ref}
        if self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        if self.note:
            d["note"] = self.note
        if self.detail is not None:
            d["detail"] = _jsonable(self.detail)
        d["millis"] = self.millis
        return d


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def run_case(case_id: str, seed: int = 0, samples: int = 25, timing: bool = False) -> CaseReport:
    if case_id not in REGISTRY:
        raise UnknownCase(case_id)
    c = REGISTRY[case_id]
    start = time.perf_counter()
    try:
        out = c.run(Options(seed, samples))
    except Exception as e:  # a crash is a failed check, with the error as witness
        status, witness, note, detail = FAIL, f"{type(e).__name__}: {e}", None, None
    else:
        if not out.ok:
            status = FAIL
        else:
            status = DOCUMENTED if out.note else PASS
        witness, note, detail = out.witness, out.note, out.detail
    millis = int((time.perf_counter() - start) * 1000) if timing else 0
    return CaseReport(c.id, c.paper_ref, status, witness, millis, note, detail)


def _run_one(args):
    return run_case(*args)


def run_all(tag: str | None = None, seed: int = 0, samples: int = 25, jobs: int = 1,
            timing: bool = False, ids: list | None = None) -> list[CaseReport]:
    if ids is None:
        ids = sorted(i for i, c in REGISTRY.items() if tag is None or tag in c.tags)
    work = [(i, seed, samples, timing) for i in ids]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_one, work))
    else:
        reports = [_run_one(w) for w in work]
    return sorted(reports, key=lambda r: r.id)


def summarize(reports: list[CaseReport]) -> dict:
    return {"pass": sum(r.status == PASS for r in reports),
            "fail": sum(r.status == FAIL for r in reports),
            "documented": sum(r.status == DOCUMENTED for r in reports)}


def to_json(reports: list[CaseReport]) -> str:
    doc = {"cases": [r.as_dict() for r in reports], "summary": summarize(reports)}
    return json.dumps(doc, indent=2, sort_keys=False)


def to_text(reports: list[CaseReport], timing: bool = False) -> str:
    width = max((len(r.id) for r in reports), default=0)
    lines = []
    for r in reports:
        label = {PASS: "PASS", FAIL: "FAIL", DOCUMENTED: "DOC "}[r.status]
        t = f"  [{r.millis} ms]" if timing else ""
        lines.append(f"{label}  {r.id:<{width}}  {r.paper_ref}{t}")
        if r.note:
            lines.append(f"      note: {r.note}")
        if r.detail is not None:
            lines.append("      " + json.dumps(_jsonable(r.detail)))
        if r.status == FAIL and r.witness is not None:
            lines.append("      witness: " + json.dumps(_jsonable(r.witness)))
    s = summarize(reports)
    lines.append(f"{len(reports)} cases: {s['pass']} pass, {s['documented']} documented, {s['fail']} fail")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Run exact verification cases.")
    p.add_argument("case", nargs="*", help="case ids to run")
    p.add_argument("--all", action="store_true", help="run every registered case")
    p.add_argument("--tag", choices=tags(), help="restrict to cases with this tag")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="record wall time (output is then not reproducible)")
    p.add_argument("--list", action="store_true", help="list case ids and exit")
    return p


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.list:
        for i in sorted(REGISTRY):
            print(f"{i}  [{', '.join(REGISTRY[i].tags)}]")
        return 0
    if args.samples < 1 or args.jobs < 1:
        print("verify: --samples and --jobs must be positive", file=sys.stderr)
        return 2
    if args.case and (args.all or args.tag):
        print("verify: give case ids or --all/--tag, not both", file=sys.stderr)
        return 2
    if not (args.case or args.all or args.tag):
        parser.print_usage(sys.stderr)
        return 2
    unknown = [c for c in args.case if c not in REGISTRY]
    if unknown:
        print(f"verify: UnknownCase: {', '.join(unknown)}", file=sys.stderr)
        return 2
    reports = run_all(args.tag, args.seed, args.samples, args.jobs, args.timing,
                      ids=sorted(set(args.case)) if args.case else None)
    out = to_json(reports) if args.format == "json" else to_text(reports, args.timing)
    print(out)
    return 1 if any(r.status == FAIL for r in reports) else 0


if __name__ == "__main__":
    sys.exit(main())
