"""Command-line interface: ``z4doe <command> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 verification mismatch,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import analysis
from .analysis import AnalysisReport, decimal_str, fraction_str
from .designio import DesignFormatError, design_to_csv, matrix_to_csv, read_design, write_design
from .errors import InfeasibleBranchError, ResourceLimitError, VerificationMismatch, Z4DomainError
from .optimal import Criterion, exhaustive_search, table2
from .theory import BranchClass, FrequencyProfile, Prediction, predict
from .verify import sweep
from .z4core import (
    BinaryDesign,
    as_z4_vector,
    build_design,
    expand_code,
    frequency_profile,
    generator_matrix,
    half_fraction,
)

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_RESOURCE = 0, 1, 2, 3

log = logging.getLogger("z4doe")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _degenerate_warning(v) -> None:
    if v is not None and all(z == 0 for z in v):
        _warn("v is all zeros: columns 1 and 2 are constant, so every product with them is constant")


def _load(args) -> BinaryDesign:
    if args.v is not None and args.input is not None:
        raise UsageError("give either --v or --in, not both")
    if args.v is not None:
        return build_design(as_z4_vector(args.v))
    if args.input is not None:
        return read_design(args.input)
    raise UsageError("one of --v or --in is required")


def render_report(r: AnalysisReport, with_words: bool = False) -> str:
    lines = [f"runs: {r.n_runs}", f"factors: {r.n_factors}"]
    if r.resolution is None:
        lines.append(f"resolution: no words up to size {r.n_factors}")
    else:
        lines.append(f"resolution: {fraction_str(r.resolution)} ({decimal_str(r.resolution)})")
    lines.append(f"wlp: {r.wlp}")
    if r.projectivity is not None:
        lines.append(f"projectivity: {r.projectivity}")
    lines.append(f"regular: {str(r.regular).lower()}")
    if r.words is not None:
        n_complete = sum(w.complete for w in r.words)
        lines.append(f"words: {len(r.words)} ({n_complete} complete, {len(r.words) - n_complete} partial)")
        if with_words:
            for w in r.words:
                lines.append(f"  {{{','.join(map(str, w.columns))}}} rho={fraction_str(w.rho)}")
    return "\n".join(lines)


def render_prediction(p: Prediction) -> str:
    t = p.params
    lines = [
        "source: theory",
        f"profile: f0={p.profile.f0} f1={p.profile.f1} f2={p.profile.f2} f3={p.profile.f3}",
    ]
    if p.branch is not None:
        lines.append(f"branch: {p.branch.value}")
    lines += [
        f"k1: {t.k1}  k2: {t.k2}  rho: {fraction_str(t.rho)}",
        f"runs: {p.n_runs}",
        f"factors: {p.n_factors}",
        f"resolution: {fraction_str(p.resolution)} ({decimal_str(p.resolution)})",
        f"wlp: {p.wlp}",
        f"projectivity: {p.projectivity}",
        f"regular: {str(p.regular).lower()}",
        "words:",
    ]
    for w in p.words:
        kind = "complete" if w.rho == 1 else "partial"
        lines.append(f"  {w.count} x length {w.length} rho={fraction_str(w.rho)} ({kind})")
    return "\n".join(lines)


def cmd_construct(args) -> int:
    v = as_z4_vector(args.v)
    D = build_design(v)
    _degenerate_warning(v)
    if args.code_out:
        Path(args.code_out).write_text(matrix_to_csv(expand_code(generator_matrix(v)), prefix="z"))
    summary = f"N={D.n_runs} m={D.n_factors} profile={frequency_profile(v)}"
    if args.out:
        write_design(D, args.out)
        print(summary)
    else:
        sys.stdout.write(design_to_csv(D))
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args) -> int:
    D = _load(args)
    _degenerate_warning(D.v)
    r = analysis.analyze(D, with_projectivity=args.projectivity)
    if args.json:
        print(json.dumps(r.to_dict(), indent=2))
    else:
        print(render_report(r, with_words=args.words))
    return EXIT_OK


def cmd_half(args) -> int:
    D = _load(args)
    if D.branches:
        raise UsageError("design is already a half fraction; only a single branching is supported")
    H = half_fraction(D, args.col)
    cls = H.branches[-1].column_class
    if args.out:
        write_design(H, args.out)
    r = analysis.analyze(H)
    marker = "f" if args.col == 1 else "l" if args.col == D.n_factors else None
    label = cls.value if cls is not None else "unknown"
    if marker:
        label += f" ({marker})"
    if args.json:
        out = r.to_dict()
        out["branch_column"] = args.col
        out["branch_class"] = None if cls is None else cls.value
        print(json.dumps(out, indent=2))
    else:
        print(f"branch column: {args.col} [{label}]")
        print(render_report(r, with_words=args.words))
    return EXIT_OK


def cmd_predict(args) -> int:
    if (args.v is None) == (args.profile is None):
        raise UsageError("give exactly one of --v or --profile")
    p = FrequencyProfile.of(as_z4_vector(args.v)) if args.v is not None else FrequencyProfile.parse(args.profile)
    branch = BranchClass.parse(args.branch) if args.branch is not None else None
    pred = predict(p, branch)
    if args.json:
        print(json.dumps(pred.to_dict(), indent=2))
    else:
        print(render_prediction(pred))
    return EXIT_OK


def cmd_search(args) -> int:
    crit = Criterion(args.criterion)
    found = exhaustive_search(args.n, crit, half=args.half, verify=args.verify)
    if args.json:
        print(json.dumps([c.summary() for c in found], indent=2))
        return EXIT_OK
    kind = "half fraction" if args.half else "full"
    print(f"n={args.n} {kind} criterion={crit.value}: {len(found)} optimal candidate(s)")
    for c in found:
        branch = "" if c.branch is None else f" branch={c.branch.value}"
        pr = "skipped" if c.projectivity is None else c.projectivity
        status = " verified" if c.verified is not None else ""
        print(f"  {c.label():<16}{branch}  wlp: {c.wlp}  R={decimal_str(c.resolution)}  pr={pr}{status}")
    return EXIT_OK


_TABLE2_FIELDS = ["design", "criterion", "v", "branch", "wlp", "resolution", "projectivity",
                  "reg_resolution", "reg_projectivity", "verified"]


def _table2_records(rows) -> list[dict]:
    out = []
    for row in rows:
        c = row.candidate
        status = row.cell_status()
        out.append({
            "design": row.design,
            "criterion": row.criteria_label,
            "v": "[" + "".join(map(str, c.v)) + "]",
            "branch": c.marker,
            "wlp": str(c.wlp),
            "resolution": decimal_str(c.resolution),
            "projectivity": c.projectivity,
            "reg_resolution": row.regular.resolution,
            "reg_projectivity": row.regular.projectivity,
            "verified": "unverified" if status is None else "ok" if all(status.values()) else "MISMATCH",
        })
    return out


def cmd_table2(args) -> int:
    ms = [args.m] if args.m is not None else range(6, 17)
    for m in ms:
        if m < 6:
            raise UsageError(f"--m must be at least 6, got {m}")
    rows = table2(ms, verify=not args.no_verify)
    recs = _table2_records(rows)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=_TABLE2_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(recs)
        sys.stdout.write(buf.getvalue())
    else:
        head = ["Design", "Crit", "v", "WLP", "R", "pr", "Reg R", "Reg pr", "check"]
        table = [head]
        for row, rec in zip(rows, recs):
            first = row.first_in_group
            table.append([
                rec["design"] if first else "",
                rec["criterion"],
                f"{rec['v']} {rec['branch']}".rstrip(),
                rec["wlp"],
                rec["resolution"],
                str(rec["projectivity"]),
                str(rec["reg_resolution"]) if first else "",
                str(rec["reg_projectivity"]) if first else "",
                rec["verified"],
            ])
        widths = [max(len(r[i]) for r in table) for i in range(len(head))]
        for r in table:
            print("  ".join(cell.ljust(wd) for cell, wd in zip(r, widths)).rstrip())
    bad = [msg for row in rows for msg in row.mismatches()]
    for msg in bad:
        print(f"mismatch: {msg}", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_verify(args) -> int:
    if args.max_n > 6:
        raise ResourceLimitError(f"--max-n {args.max_n} exceeds the brute-force budget of 6")
    res = sweep(args.max_n, all_columns=args.all_columns)
    print(f"checked: {res.checked}")
    print(f"mismatches: {len(res.mismatches)}")
    print(f"projectivity brute-forced (not covered by theory): {len(res.not_covered)}")
    print(f"skipped (infeasible branch): {len(res.skipped)}")
    for msg in res.mismatches:
        print(f"  MISMATCH {msg}")
    if args.verbose:
        for msg in res.not_covered:
            print(f"  {msg}")
    return EXIT_OK if res.ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="z4doe", description="Quarter-fraction two-level designs from quaternary codes.")
    ap.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", help="build the design generated by (v, I_n)")
    p.add_argument("--v", required=True, help="generator vector as Z4 digits, e.g. 112")
    p.add_argument("--out", help="design CSV path (a .prov.json sidecar is written next to it)")
    p.add_argument("--code-out", help="also write the quaternary code as CSV")
    p.set_defaults(func=cmd_construct)

    def source(p):
        p.add_argument("--v", help="generator vector as Z4 digits")
        p.add_argument("--in", dest="input", help="design CSV file")

    p = sub.add_parser("analyze", help="brute-force analysis of a design")
    source(p)
    p.add_argument("--projectivity", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--words", action="store_true", help="list every word")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("half", help="branch on one column and analyze the half fraction")
    source(p)
    p.add_argument("--col", type=int, required=True, help="1-based branching column")
    p.add_argument("--out", help="write the half fraction CSV here")
    p.add_argument("--words", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_half)

    p = sub.add_parser("predict", help="closed-form predictions from the frequency profile")
    p.add_argument("--v", help="generator vector as Z4 digits")
    p.add_argument("--profile", help="f0,f1,f2,f3")
    p.add_argument("--branch", help="branch class of a half fraction: 1, 3, 2, 0 or v")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("search", help="exhaustive search for optimal designs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--criterion", required=True, choices=[c.value for c in Criterion])
    p.add_argument("--half", action="store_true", help="search half fractions")
    p.add_argument("--verify", action="store_true", help="brute-force check each optimum")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("table2", help="optimal designs for m = 6..16 with brute-force checks")
    p.add_argument("--m", type=int, help="only this number of factors")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--no-verify", action="store_true", help="skip brute-force verification")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("verify", help="theory-versus-brute-force sweep over all profiles")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--all-columns", action="store_true", help="branch on every column, not one per class")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, InfeasibleBranchError, DesignFormatError, Z4DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationMismatch as exc:
        print(f"verification mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
