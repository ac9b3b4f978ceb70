"""Command line front end.

Exit codes: 0 when verdicts were computed (negative verdicts included),
2 on job schema/reference errors, 3 on engine errors.  ``replay`` exits 1
when some embedded certificate fails to replay.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CategoryError
from .jobs import JobError, load_job, run_job
from .replay import replay_report
from .serialize import dumps

EXIT_OK, EXIT_REPLAY, EXIT_SCHEMA, EXIT_ENGINE = 0, 1, 2, 3
JOB_SUFFIXES = (".yaml", ".yml", ".json")


def execute(path, bound=None, mode=None, fmt="full"):
    """Run one job file.  Returns ``(exit_code, report_or_None, diagnostics)``."""
    try:
        job = load_job(path)
        report, timings = run_job(job, bound, mode, fmt)
    except JobError as exc:
        return EXIT_SCHEMA, None, exc.diagnostics
    except CategoryError as exc:
        return EXIT_ENGINE, None, [f"{path}: engine error: {type(exc).__name__}: {exc}"]
    report["timings"] = timings
    return EXIT_OK, report, []


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timings"}


def _emit(text, out):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    code, report, diags = execute(args.job, args.bound, args.mode, args.format)
    for d in diags:
        print(d, file=sys.stderr)
    if report is not None:
        _emit(dumps(report), args.out)
    return code


def job_files(directory) -> list:
    return sorted(p for p in Path(directory).iterdir()
                  if p.is_file() and p.suffix in JOB_SUFFIXES)


def _verdict_text(verdict: dict) -> str:
    return json.dumps(verdict, sort_keys=True, separators=(",", ":"))


def run_batch(directory, bound=None, mode=None, fmt="full", out=None) -> list:
    """Run every job in filename order; failures become ERROR rows."""
    rows = []
    for path in job_files(directory):
        code, report, diags = execute(path, bound, mode, fmt)
        row = {"job": path.name, "exit": code}
        if report is None:
            row.update(status="ERROR", query=None, verdict=None, error=diags[0] if diags else "")
        else:
            row.update(status="OK", query=report["query"], verdict=report["verdict"])
            if out:
                _emit(dumps(report), Path(out) / f"{path.stem}.json")
        rows.append(row)
    return rows


def format_summary(rows) -> str:
    header = ("job", "status", "query", "verdict")
    table = [header] + [(r["job"], r["status"], r["query"] or "-",
                         _verdict_text(r["verdict"]) if r["verdict"] is not None else r["error"])
                        for r in rows]
    widths = [max(len(t[i]) for t in table) for i in range(3)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(t[:3], widths)) + "  " + t[3] for t in table]
    return "\n".join(lines) + f"\n{len(rows)} job(s), {sum(r['status'] == 'ERROR' for r in rows)} error(s)\n"


def cmd_batch(args) -> int:
    if not Path(args.directory).is_dir():
        print(f"{args.directory}: not a directory", file=sys.stderr)
        return EXIT_SCHEMA
    rows = run_batch(args.directory, args.bound, args.mode, args.format, args.out)
    if args.out:
        _emit(dumps({"summary": rows}), Path(args.out) / "summary.json")
    sys.stdout.write(format_summary(rows))
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"{args.report}: cannot read report: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    results = replay_report(report)
    failed = 0
    for where, res in results:
        status = "ok" if res.ok else "FAIL"
        print(f"{status}  {where or '/'}  tests={res.recounted}")
        for p in res.problems:
            print(f"      {p}")
        failed += not res.ok
    print(f"{len(results)} witness(es) replayed, {failed} failure(s)")
    return EXIT_REPLAY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catschemes",
        description="Localizations, global objects and schemes in finite categories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--bound", type=int, default=None,
                       help="size bound for universal-property verification")
        p.add_argument("--mode", choices=["strict", "permissive"], default=None,
                       help="how points without a localization are treated")
        p.add_argument("--format", choices=["full", "summary"], default="full",
                       help="full embeds certificates and tables; summary keeps verdicts")

    p_run = sub.add_parser("run", help="run one job file")
    p_run.add_argument("job")
    common(p_run)
    p_run.add_argument("--out", default=None, help="write the report here instead of stdout")
    p_run.set_defaults(func=cmd_run)

    p_batch = sub.add_parser("batch", help="run every job file in a directory")
    p_batch.add_argument("directory")
    common(p_batch)
    p_batch.add_argument("--out", default=None, help="directory for per-job reports")
    p_batch.set_defaults(func=cmd_batch)

    p_rep = sub.add_parser("replay", help="independently re-check the witnesses in a report")
    p_rep.add_argument("report")
    p_rep.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "bound", None) is not None and args.bound < 1:
        print("--bound must be positive", file=sys.stderr)
        return EXIT_SCHEMA
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
