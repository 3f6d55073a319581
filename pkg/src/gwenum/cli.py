"""Command-line surface.

Subcommands: gw, binom, tbinom, pascal, verify-identities, lattice,
wallcross, table, dehn-check, verify-surgery.  Every command can emit
either text or a JSON report (--format json); reports are deterministic
for a fixed --seed (wall-clock timing is only included under --timing).

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
import warnings
from dataclasses import dataclass, field as dc_field

from . import seeds
from .binomial import (
    binom,
    fq_corpus,
    multiquadratic_corpus,
    pascal_triangle,
    run_identity_suite,
    tbinom,
    twisted_diagonal,
)
from .errors import GwenumError
from .etale import EtaleAlgebra, FiniteFactor
from .fields import FQ, BaseField, SquareClass, sq_class
from .gw import GWElement, gw_eq, gw_invariants, gw_to_json, parse_gw, pretty
from .lattice import (
    MODEL_BUILDERS,
    adjunction_genus,
    dehn_twist,
    dot,
    j_range,
    n_points,
    perp_project,
    phi_fiber,
)
from .wallcross import (
    InvariantTable,
    WallCrossDiagnostics,
    check_surgery_consistency,
    dehn_check,
    random_profile,
    wall_cross,
)


@dataclass
class Report:
    command: list[str]
    checks: list[dict] = dc_field(default_factory=list)
    values: list[dict] = dc_field(default_factory=list)
    warnings: list[str] = dc_field(default_factory=list)
    elapsed_s: float | None = None

    def check(self, name: str, passed: bool, detail: str | None = None):
        entry = {"name": name, "status": "pass" if passed else "fail"}
        if detail:
            entry["detail"] = detail
        self.checks.append(entry)

    def value(self, label: str, x: GWElement, extract_h: bool = False, raw: bool = False):
        inv = gw_invariants(x)
        entry = {
            "label": label,
            "pretty": pretty(x, extract_h=extract_h),
            "invariants": {
                "rank": inv.rank,
                "signature": inv.signature,
                "det": inv.det_class.rep,
            },
        }
        if raw:
            entry["terms"] = gw_to_json(x)["terms"]
        self.values.append(entry)

    @property
    def exit_code(self) -> int:
        return 1 if any(c["status"] == "fail" for c in self.checks) else 0

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "checks": self.checks,
            "values": self.values,
            "warnings": self.warnings,
        }
        if self.elapsed_s is not None:
            out["timing"] = {"seconds": round(self.elapsed_s, 3)}
        return out

    def render_text(self) -> str:
        lines = []
        for v in self.values:
            lines.append(f"{v['label']}: {v['pretty']}" if v["label"] else v["pretty"])
        for c in self.checks:
            detail = f"  ({c['detail']})" if "detail" in c else ""
            lines.append(f"[{c['status'].upper()}] {c['name']}{detail}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        if self.elapsed_s is not None:
            lines.append(f"elapsed: {self.elapsed_s:.3f}s")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Argument parsing helpers
# ---------------------------------------------------------------------------


def parse_base(text: str) -> BaseField:
    text = text.lower()
    if text in ("q", "rat", "rationals"):
        return BaseField.rationals()
    if text in ("r", "real"):
        return BaseField.real_closed()
    if text.startswith("fq:"):
        return BaseField.finite(int(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(f"bad base field {text!r} (use q, r, or fq:<q>)")


def parse_d(field: BaseField, text: str) -> SquareClass:
    if text == "u":
        return sq_class(field, "u")
    return sq_class(field, int(text))


def parse_algebra(field: BaseField, text: str) -> EtaleAlgebra:
    """Factor list: "ff:4,ff:2" over F_q; "t,q:-1,q:2" over Q/R; "split:<n>"."""
    if text.startswith("split:"):
        return EtaleAlgebra.split(field, int(text.split(":", 1)[1]))
    specs = []
    for token in text.split(","):
        token = token.strip()
        if token in ("t", "trivial"):
            specs.append(None if field.kind != FQ else 1)
        elif token.startswith("ff:"):
            specs.append(FiniteFactor(int(token.split(":", 1)[1])))
        elif token.startswith("q:"):
            specs.append(int(token.split(":", 1)[1]))
        else:
            raise argparse.ArgumentTypeError(f"bad algebra factor {token!r}")
    return EtaleAlgebra.of(field, specs)


def parse_sigma(field: BaseField, text: str, degree: int) -> EtaleAlgebra:
    if text == "split":
        return EtaleAlgebra.split(field, degree)
    return parse_algebra(field, text)


def parse_divisor(text: str) -> tuple:
    return tuple(int(x) for x in text.split(","))


def load_table(path: str) -> InvariantTable:
    import os

    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return InvariantTable.from_json(json.load(fh))
    fallback = seeds.data_dir() / path
    if fallback.exists():
        with open(fallback, encoding="utf-8") as fh:
            return InvariantTable.from_json(json.load(fh))
    raise FileNotFoundError(f"no invariant DB at {path!r}")


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_gw(args, report: Report):
    field = args.base
    d = args.d.rep if args.d is not None else None
    xs = [parse_gw(expr, field, d=d) for expr in args.exprs]
    if args.op == "eq":
        if len(xs) != 2:
            raise GwenumError("gw eq takes two expressions")
        ok = gw_eq(xs[0], xs[1])
        report.values.append({"label": "equal", "pretty": str(ok).lower(), "invariants": None})
        report.check("gw-eq", ok, f"{args.exprs[0]} vs {args.exprs[1]}")
    elif args.op in ("add", "sub", "mul"):
        if len(xs) != 2:
            raise GwenumError(f"gw {args.op} takes two expressions")
        out = {"add": xs[0] + xs[1], "sub": xs[0] - xs[1], "mul": xs[0] * xs[1]}[args.op]
        report.value("", out, extract_h=args.extract_h, raw=args.raw)
    elif args.op == "invariants":
        for expr, x in zip(args.exprs, xs):
            report.value(expr, x, extract_h=args.extract_h, raw=True)
    else:
        raise GwenumError(f"unknown gw op {args.op!r}")


def _cmd_binom(args, report: Report):
    algebra = parse_algebra(args.base, args.algebra)
    report.value(f"binom({algebra}, {args.j})", binom(algebra, args.j), args.extract_h, args.raw)


def _cmd_tbinom(args, report: Report):
    algebra = parse_algebra(args.base, args.algebra)
    d = parse_d(args.base, args.d)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value = tbinom(algebra, args.j, d)
    for w in caught:
        report.warnings.append(str(w.message))
    report.value(f"tbinom({algebra}, {args.j}, d={d})", value, args.extract_h, args.raw)


def _cmd_pascal(args, report: Report):
    field = args.base
    if field.kind != FQ:
        raise GwenumError("the triangle layout is a finite-field report")
    if args.twisted:
        vals = twisted_diagonal(field.q, args.nmax // 2)
        for j, v in enumerate(vals, start=1):
            report.value(f"j={j}", v.canonical(), False, args.raw)
        return
    rows = pascal_triangle(field.q, args.nmax)
    for j, row in enumerate(rows):
        cells = "  |  ".join(v.canonical().pretty() for v in row)
        report.values.append({"label": f"j={j}", "pretty": cells, "invariants": None})


def _corpus_from_spec(spec: str, classes: tuple):
    parts = spec.split(":")
    if parts[0] == "fq":
        q, degmax = int(parts[1]), int(parts[2]) if len(parts) > 2 else 8
        return fq_corpus(q, degmax), BaseField.finite(q)
    if parts[0] in ("q", "r"):
        base = BaseField.rationals() if parts[0] == "q" else BaseField.real_closed()
        degmax = int(parts[1]) if len(parts) > 1 else 6
        pool = classes if parts[0] == "q" else (-1,)
        return multiquadratic_corpus(base, pool, degmax), base
    raise GwenumError(f"bad corpus spec {spec!r} (use fq:<q>:<degmax> or q:<degmax> or r:<degmax>)")


def _cmd_verify_identities(args, report: Report):
    classes = tuple(int(c) for c in args.classes.split(",")) if args.classes else (-1, 2, 3, 5)
    corpus, base = _corpus_from_spec(args.corpus, classes)
    d = parse_d(base, args.d if args.d else ("u" if base.kind == FQ else "-1"))
    suite = run_identity_suite(corpus, d)
    by_name: dict = {}
    for name, query in suite.failures:
        by_name.setdefault(name, []).append(query)
    for name in ("symmetry", "product", "twisted-product", "main-identity", "useful-identity", "induction-step"):
        fails = by_name.get(name, [])
        detail = None
        if fails:
            detail = "counterexample " + fails[0].describe()
        report.check(f"identities/{name}", not fails, detail)
    report.values.append(
        {
            "label": "summary",
            "pretty": f"{suite.checks_run} checks over {len(corpus)} algebras, {len(suite.failures)} failures",
            "invariants": None,
        }
    )


def _cmd_lattice(args, report: Report):
    model = MODEL_BUILDERS[args.model]()
    if args.dot:
        d1, d2 = (parse_divisor(t) for t in args.dot)
        report.values.append({"label": f"{d1}.{d2}", "pretty": str(dot(model, d1, d2)), "invariants": None})
    elif args.n_points:
        d = parse_divisor(args.n_points)
        report.values.append({"label": f"n_points{d}", "pretty": str(n_points(model, d)), "invariants": None})
    elif args.genus:
        d = parse_divisor(args.genus)
        report.values.append({"label": f"p_a{d}", "pretty": str(adjunction_genus(model, d)), "invariants": None})
    elif args.j_range:
        d = parse_divisor(args.j_range)
        report.values.append({"label": f"j_range{d}", "pretty": str(j_range(model, d)), "invariants": None})
    elif args.dehn:
        d = parse_divisor(args.dehn)
        report.values.append({"label": f"dehn{d}", "pretty": str(dehn_twist(model, d)), "invariants": None})
    elif args.phi_fiber:
        cls, l = args.phi_fiber.rsplit(":", 1)
        d = parse_divisor(cls)
        fib = phi_fiber(model, d, int(l))
        report.values.append({"label": f"phi_fiber{d},l={l}", "pretty": str(fib), "invariants": None})
    elif args.perp:
        d = parse_divisor(args.perp)
        report.values.append({"label": f"perp{d}", "pretty": str(perp_project(model, d)), "invariants": None})
    else:
        raise GwenumError("pick a lattice operation")


def _cmd_wallcross(args, report: Report):
    table = load_table(args.db)
    if args.strict:
        table.missing_policy = "error"
    d_class = parse_divisor(args.cls)
    sigma = parse_sigma(table.field, args.sigma, n_points(table.model, d_class))
    d = parse_d(table.field, args.d)
    diag = WallCrossDiagnostics()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        value = wall_cross(table, d_class, sigma, d, diag)
    for w in caught:
        report.warnings.append(str(w.message))
    report.value(f"N({d_class}, d={d})", value, args.extract_h, args.raw)
    report.values.append(
        {
            "label": "diagnostics",
            "pretty": f"genus window {diag.genus_window}, corrections used {diag.used}, missing {diag.missing}",
            "invariants": None,
        }
    )


def _cmd_table(args, report: Report):
    field = BaseField.rationals()
    d = parse_d(field, args.d)
    if args.surface == "quadric":
        rows = [r for r in seeds.quadric_rows() if r["a"] <= args.amax]
        for row in rows:
            value = seeds.quadric_row_value(field, row, d)
            report.value(f"a={row['a']}", value, extract_h=True, raw=args.raw)
            for i, want in enumerate(seeds.row_presentations(field, row, d)):
                report.check(f"quadric row a={row['a']} presentation {i + 1}", gw_eq(value, want))
    else:
        wanted = {tuple(int(x) for x in spec.split(",")) for spec in args.rows}
        for row in seeds.blowup_rows():
            if (row["a"], row["b"]) not in wanted:
                continue
            value = seeds.blowup_row_value(field, row, d)
            report.value(f"(a,b)=({row['a']},{row['b']})", value, extract_h=True, raw=args.raw)
            for i, want in enumerate(seeds.row_presentations(field, row, d)):
                report.check(f"blowup row ({row['a']},{row['b']}) presentation {i + 1}", gw_eq(value, want))


def _cmd_dehn_check(args, report: Report):
    table = load_table(args.db)
    if args.cls:
        d_class = parse_divisor(args.cls)
        sigma = parse_sigma(table.field, args.sigma, n_points(table.model, d_class))
        ok = dehn_check(table, d_class, sigma)
        report.check(f"dehn {d_class}", ok)
        return
    seen = set()
    for (cls, _), sigma in table.algebras.items():
        twisted = dehn_twist(table.model, cls)
        pair = tuple(sorted([cls, twisted]))
        if pair in seen:
            continue
        seen.add(pair)
        if not table.has(twisted, sigma):
            report.warnings.append(f"no reflected entry for {cls}")
            continue
        ok = dehn_check(table, cls, sigma)
        report.check(f"dehn {cls} <-> {twisted}", ok)


def _cmd_verify_surgery(args, report: Report):
    base = args.base
    rng = random.Random(args.seed)
    d = parse_d(base, args.d if args.d else ("u" if base.kind == FQ else "-1"))
    failures = 0
    first_bad = None
    for i in range(args.trials):
        profile = random_profile(rng, base)
        if not check_surgery_consistency(profile, d):
            failures += 1
            if first_bad is None:
                first_bad = (i, profile)
    detail = f"{args.trials} random profiles over {base}, d={d}"
    if first_bad is not None:
        detail += f"; first failure at trial {first_bad[0]}: {first_bad[1]}"
    report.check("surgery-consistency", failures == 0, detail)


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="gwenum", description=__doc__)
    sub = top.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--extract-h", action="store_true", help="greedy hyperbolic extraction in output")
        p.add_argument("--raw", action="store_true", help="include raw term maps")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")

    p = sub.add_parser("gw", help="GW(k) arithmetic and the equality oracle")
    p.add_argument("op", choices=("eq", "add", "sub", "mul", "invariants"))
    p.add_argument("exprs", nargs="+")
    p.add_argument("--base", type=parse_base, required=True)
    p.add_argument("--d", default=None, help="value for the symbolic class d")
    common(p)
    p.set_defaults(func=_cmd_gw, needs_d_class=True)

    p = sub.add_parser("binom", help="enriched binomial coefficient")
    p.add_argument("--base", type=parse_base, required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--j", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_binom)

    p = sub.add_parser("tbinom", help="twisted binomial coefficient")
    p.add_argument("--base", type=parse_base, required=True)
    p.add_argument("--algebra", required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--d", required=True)
    common(p)
    p.set_defaults(func=_cmd_tbinom)

    p = sub.add_parser("pascal", help="the binomial triangle over F_q")
    p.add_argument("--base", type=parse_base, required=True)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--twisted", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_pascal)

    p = sub.add_parser("verify-identities", help="dual-evaluation identity sweep")
    p.add_argument("--corpus", required=True, help="fq:<q>:<degmax> | q:<degmax> | r:<degmax>")
    p.add_argument("--d", default=None)
    p.add_argument("--classes", default=None, help="quadratic class pool over Q, e.g. -1,2,3,5")
    p.add_argument("--report", choices=("text", "json"), default=None)
    common(p)
    p.set_defaults(func=_cmd_verify_identities)

    p = sub.add_parser("lattice", help="Picard lattice computations")
    p.add_argument("--model", choices=tuple(MODEL_BUILDERS), default="quadric")
    p.add_argument("--dot", nargs=2, metavar=("D1", "D2"))
    p.add_argument("--n-points", dest="n_points")
    p.add_argument("--genus")
    p.add_argument("--j-range", dest="j_range")
    p.add_argument("--dehn")
    p.add_argument("--phi-fiber", dest="phi_fiber", help="<class>:<l>")
    p.add_argument("--perp")
    common(p)
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("wallcross", help="evaluate the wall-crossing formula from a DB")
    p.add_argument("--db", required=True)
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--sigma", default="split")
    p.add_argument("--d", required=True)
    p.add_argument("--strict", action="store_true", help="error on missing entries")
    common(p)
    p.set_defaults(func=_cmd_wallcross)

    p = sub.add_parser("table", help="emit the published invariant tables")
    p.add_argument("surface", choices=("quadric", "blowup"))
    p.add_argument("--amax", type=int, default=4)
    p.add_argument("--rows", nargs="*", default=("5,2", "6,2", "7,2", "7,3"))
    p.add_argument("--d", required=True)
    common(p)
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("dehn-check", help="reflection symmetry of stored values")
    p.add_argument("--db", required=True)
    p.add_argument("--class", dest="cls", default=None)
    p.add_argument("--sigma", default="split")
    common(p)
    p.set_defaults(func=_cmd_dehn_check)

    p = sub.add_parser("verify-surgery", help="randomized degeneration consistency")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--base", type=parse_base, required=True)
    p.add_argument("--d", default=None)
    common(p)
    p.set_defaults(func=_cmd_verify_surgery)

    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    report = Report(command=["gwenum"] + argv)
    t0 = time.perf_counter()
    try:
        if getattr(args, "needs_d_class", False) and args.d is not None:
            args.d = parse_d(args.base, args.d)
        args.func(args, report)
    except (GwenumError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.timing:
        report.elapsed_s = time.perf_counter() - t0
    fmt = getattr(args, "report", None) or args.format
    if fmt == "json":
        print(json.dumps(report.to_json(), indent=1))
    else:
        print(report.render_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
