"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 invalid design, 3 dimension bound
refuted, 4 inconclusive, 5 missing ingredient.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import algebra
from .closure import (DEFAULT_BUDGET, DEFAULT_SAMPLES, dimension, dimension_at_least, span,
                      strong_dimension, strong_dimension_at_least, strong_span)
from .constructions import add_point_fill, break_blocks, delete_point, truncate, wfc
from .designs import GroupDesign, admissible, failing_condition, params, solve_overlap, verify
from .errors import (DesignError, FormatError, MissingIngredient, NoParametersWithinLimits, StageFailed,
                     VerificationFailed)
from .fileformat import read_design, write_design
from .ingredients import IngredientProvider, Registry, file_name, request_for
from .pipeline import SearchLimits, execute, plan

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_MISSING = 0, 1, 2, 3, 4, 5

log = logging.getLogger("pbdim")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _sizes(values) -> list[int]:
    out = []
    for v in values:
        out.extend(_int_list(v) if isinstance(v, str) else [v])
    return out


def _emit(args, text_lines, obj):
    if args.json:
        print(json.dumps(obj, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _out_design(args, design, sizes=None):
    write_design(design, args.out, sizes=sizes, as_json=args.json)


def _provider(args) -> IngredientProvider:
    directory = getattr(args, "registry", None) or os.environ.get("PBD_REGISTRY")
    return IngredientProvider(Registry(directory) if directory else Registry())


# --------------------------------------------------------------------------
# commands


def cmd_params(args):
    p = params(_sizes(args.K))
    _emit(args, [f"alpha={p.alpha} beta={p.beta} gamma={p.gamma}"],
          {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma})
    return EXIT_OK


def cmd_admissible(args):
    K = _sizes(args.K)
    ok = admissible(args.v, K)
    why = failing_condition(args.v, K)
    _emit(args, ["yes" if ok else f"no: {why}"], {"v": args.v, "K": sorted(set(K)), "admissible": ok,
                                                   "failing": why})
    return EXIT_OK


def cmd_build(args):
    kind = args.kind
    if kind == "pipeline":
        return _build_pipeline(args)
    a = args.args
    need = {"ag": 2, "pg": 1, "td": 2, "sts": 1}[kind]
    if len(a) != need:
        raise UsageError(f"build {kind} takes {need} integer argument(s)")
    if kind == "ag":
        design = algebra.affine_space(a[0], a[1])
    elif kind == "pg":
        design = algebra.projective_plane(a[0])
    elif kind == "td":
        design = algebra.transversal_design(a[0], a[1])
    else:
        design = algebra.steiner_triple_system(a[0])
    _out_design(args, design)
    return EXIT_OK


def _build_pipeline(args):
    if args.args:
        raise UsageError("build pipeline takes options only")
    if args.mode == "weak":
        if args.k is None:
            raise UsageError("--mode weak needs --k")
        K = {args.k}
    else:
        if not args.sizes:
            raise UsageError("--mode full needs --sizes")
        K = set(_sizes(args.sizes))
    if args.d is None:
        raise UsageError("--d is required")
    limits = SearchLimits(r_max=args.r_max, q_max=args.q_max, c=args.c)
    p = plan(K, args.d, args.y, mode=args.mode, r=args.r, q=args.q, n=args.n, x=args.x,
             provider=_provider(args), limits=limits)
    for line in p.lines():
        log.info("plan %s", line)
    if args.plan_only:
        _emit(args, p.lines(), {"plan": p.lines()})
        return EXIT_OK
    final, trace = execute(p, samples=args.sample or DEFAULT_SAMPLES, seed=args.seed,
                           certify_stages=not args.no_certify)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            if args.json:
                json.dump({"plan": p.lines(), **trace.to_dict()}, fh, sort_keys=True)
                fh.write("\n")
            else:
                fh.write("\n".join(["# plan", *p.lines(), "# trace", *trace.lines()]) + "\n")
    else:
        for line in trace.lines():
            print(line, file=sys.stderr)
    _out_design(args, final)
    return EXIT_OK


def cmd_verify(args):
    design = read_design(args.file)
    report = verify(design)
    lines = [report.summary()]
    for kind, w in report.violations:
        lines.append(f"{kind} {' '.join(map(str, w))}")
    _emit(args, lines, {"valid": report.valid, "summary": report.summary(), "totals": report.totals,
                        "violations": [[k, list(w)] for k, w in report.violations],
                        "pairs_checked": report.pairs_checked, "blocks_checked": report.blocks_checked})
    return EXIT_OK if report.valid else EXIT_INVALID


def _require_valid(design):
    report = verify(design)
    if not report.valid:
        raise VerificationFailed(f"input design is invalid: {report.summary()}", report)


def cmd_dimension(args):
    design = read_design(args.file)
    _require_valid(design)
    strong = isinstance(design, GroupDesign)
    budget = args.budget if args.budget is not None else DEFAULT_BUDGET
    if args.at_least is not None:
        check = strong_dimension_at_least if strong else dimension_at_least
        if args.sample is not None and not args.exhaustive:
            cert = check(design, args.at_least, "sample", samples=args.sample, seed=args.seed)
        else:
            cert = check(design, args.at_least, "exhaustive", budget=budget)
    else:
        cert = (strong_dimension if strong else dimension)(design, budget)
    _emit(args, cert.lines(), cert.to_dict())
    return {"exact": EXIT_OK, "certified": EXIT_OK, "lower_bound_refuted": EXIT_REFUTED}.get(
        cert.kind, EXIT_INCONCLUSIVE)


def _span_cmd(args, strong):
    design = read_design(args.file)
    if strong and not isinstance(design, GroupDesign):
        raise UsageError("strong-span needs a gdd file")
    S = (strong_span if strong else span)(design, args.points)
    pts = sorted(S)
    _emit(args, [" ".join(map(str, pts))], {"points": pts, "size": len(pts), "full": len(pts) == design.v})
    return EXIT_OK


def cmd_span(args):
    return _span_cmd(args, False)


def cmd_strong_span(args):
    return _span_cmd(args, True)


def _as_gdd(design):
    if isinstance(design, GroupDesign):
        return design
    from .designs import pbd_as_gdd

    return pbd_as_gdd(design)


def cmd_inflate(args):
    master = _as_gdd(read_design(args.file))
    w = _int_list(args.weights)
    weights = w[0] if len(w) == 1 else w
    K = _sizes(args.sizes) if args.sizes else sorted(master.block_sizes)
    _out_design(args, wfc(master, weights, _provider(args), K))
    return EXIT_OK


def cmd_break(args):
    design = read_design(args.file)
    _out_design(args, break_blocks(design, _provider(args), _sizes(args.sizes)))
    return EXIT_OK


def cmd_truncate(args):
    design = read_design(args.file)
    if not isinstance(design, GroupDesign):
        raise UsageError("truncate needs a gdd file")
    _out_design(args, truncate(design, args.group, args.keep))
    return EXIT_OK


def cmd_delete_point(args):
    design = read_design(args.file)
    if isinstance(design, GroupDesign):
        raise UsageError("delete-point needs a pbd file")
    _out_design(args, delete_point(design, args.x))
    return EXIT_OK


def cmd_add_point(args):
    design = read_design(args.file)
    if not isinstance(design, GroupDesign):
        raise UsageError("add-point needs a gdd file")
    if args.fill == "single":
        out = add_point_fill(design)
    else:
        K = _sizes(args.sizes) if args.sizes else None
        if K is None and design.sizes is None:
            raise UsageError("--fill registry needs --sizes when the file declares none")
        out = add_point_fill(design, _provider(args), K)
    _out_design(args, out)
    return EXIT_OK


def cmd_solve_overlap(args):
    n, x = solve_overlap(args.y, args.A, args.c)
    _emit(args, [f"n={n} x={x}"], {"n": n, "x": x})
    return EXIT_OK


def cmd_registry(args):
    design = read_design(args.file)
    reg = Registry(args.dir)
    K = _sizes(args.sizes) if args.sizes else None
    req = request_for(design, K)
    path = reg.put(req, design)
    _emit(args, [f"stored {req} as {path}"], {"request": str(req), "path": str(path),
                                               "name": file_name(req)})
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--out", default="-", help="output design file ('-' for stdout)")
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; work runs in one thread")
    common.add_argument("--registry", help="registry directory (default: $PBD_REGISTRY)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="pbdim", description="Build, transform and certify PBDs and GDDs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("params", parents=[common], help="alpha, beta, gamma of a size set")
    s.add_argument("K", nargs="+")
    s.set_defaults(func=cmd_params)

    s = sub.add_parser("admissible", parents=[common], help="global and local conditions")
    s.add_argument("v", type=int)
    s.add_argument("K", nargs="+")
    s.set_defaults(func=cmd_admissible)

    s = sub.add_parser("build", parents=[common], help="generate a design")
    s.add_argument("kind", choices=["ag", "pg", "td", "sts", "pipeline"])
    s.add_argument("args", nargs="*", type=int)
    s.add_argument("--mode", choices=["weak", "full"], default="weak")
    s.add_argument("--k", type=int)
    s.add_argument("--sizes", nargs="+")
    s.add_argument("--d", type=int)
    s.add_argument("--y", type=int)
    for name in ("r", "q", "n", "x"):
        s.add_argument(f"--{name}", type=int)
    s.add_argument("--r-max", type=int, default=SearchLimits.r_max)
    s.add_argument("--q-max", type=int, default=SearchLimits.q_max)
    s.add_argument("--c", type=int, default=SearchLimits.c)
    s.add_argument("--sample", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--report", help="write the plan and stage trace here instead of stderr")
    s.add_argument("--plan-only", action="store_true")
    s.add_argument("--no-certify", action="store_true", help="skip per-stage dimension checks")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("verify", parents=[common], help="check the design axioms")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("dimension", parents=[common], help="(strong) dimension certificate")
    s.add_argument("file")
    s.add_argument("--at-least", type=int)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--sample", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int)
    s.set_defaults(func=cmd_dimension)

    for name, func in (("span", cmd_span), ("strong-span", cmd_strong_span)):
        s = sub.add_parser(name, parents=[common], help="generated subspace")
        s.add_argument("file")
        s.add_argument("points", nargs="*", type=int)
        s.set_defaults(func=func)

    s = sub.add_parser("inflate", parents=[common], help="Wilson's fundamental construction")
    s.add_argument("file")
    s.add_argument("--weights", required=True, help="one weight for all points, or one per point")
    s.add_argument("--sizes", nargs="+")
    s.set_defaults(func=cmd_inflate)

    s = sub.add_parser("break", parents=[common], help="break blocks into PBD(k, L)")
    s.add_argument("file")
    s.add_argument("--sizes", nargs="+", required=True)
    s.set_defaults(func=cmd_break)

    s = sub.add_parser("truncate", parents=[common], help="shrink one group")
    s.add_argument("file")
    s.add_argument("--group", type=int, required=True)
    s.add_argument("--keep", type=int, required=True)
    s.set_defaults(func=cmd_truncate)

    s = sub.add_parser("delete-point", parents=[common], help="PBD minus a point, as a GDD")
    s.add_argument("file")
    s.add_argument("x", type=int)
    s.set_defaults(func=cmd_delete_point)

    s = sub.add_parser("add-point", parents=[common], help="adjoin a point and fill the groups")
    s.add_argument("file")
    s.add_argument("--fill", choices=["single", "registry"], default="single")
    s.add_argument("--sizes", nargs="+")
    s.set_defaults(func=cmd_add_point)

    s = sub.add_parser("solve-overlap", parents=[common], help="y = nA + x with c <= x <= n")
    s.add_argument("y", type=int)
    s.add_argument("A", type=int)
    s.add_argument("c", type=int)
    s.set_defaults(func=cmd_solve_overlap)

    s = sub.add_parser("registry", parents=[common], help="manage a registry directory")
    rs = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    a = rs.add_parser("add", parents=[common], help="verify a design and store it")
    a.add_argument("file")
    a.add_argument("dir")
    a.add_argument("--sizes", nargs="+", help="declare the size set of the stored request")
    a.set_defaults(func=cmd_registry)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.threads != 1:
        log.info("--threads=%d ignored: single-threaded build", args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pbdim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingIngredient as exc:
        print(f"pbdim: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except NoParametersWithinLimits as exc:
        print(f"pbdim: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except StageFailed as exc:
        print(f"pbdim: {exc}", file=sys.stderr)
        return EXIT_MISSING if isinstance(exc.__cause__, MissingIngredient) else EXIT_INVALID
    except (VerificationFailed, FormatError) as exc:
        print(f"pbdim: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DesignError, ValueError, ZeroDivisionError) as exc:
        print(f"pbdim: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
