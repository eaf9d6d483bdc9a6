"""Command-line interface.

Exit codes: 0 success, 1 semantic failure (false equality, mismatch, model
violation, failed check), 2 input error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import jets, orbifold, stringy
from .catalogue import run_catalogue
from .ering import erat_eq, erat_parse, specialize, truncate_filtration
from .errors import CapExceededError, InvalidModelError, ParseError, PoleError, PreconditionError

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, payload: Any, text: str) -> None:
        if self.fmt == "json":
            print(json.dumps(payload, sort_keys=True, indent=2), file=self.stream)
        else:
            print(text, file=self.stream)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _fmt(x: Fraction) -> str:
    return str(x)


def load_json(path: str) -> Any:
    try:
        if path == "-":
            return json.load(sys.stdin)
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg}", exc.pos) from exc


def _table(headers: list[str], rows: list[list[Any]]) -> str:
    cells = [headers] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


# -- epoly ----------------------------------------------------------------------


def cmd_epoly(args, out: Output) -> int:
    if args.action == "eval":
        value = erat_parse(args.expr)
        out.emit({"value": str(value)}, str(value))
        return EXIT_OK
    if args.action == "eq":
        a, b = erat_parse(args.left), erat_parse(args.right)
        equal = erat_eq(a, b)
        out.emit({"left": str(a), "right": str(b), "equal": equal}, "true" if equal else "false")
        return EXIT_OK if equal else EXIT_FAIL
    if args.action == "truncate":
        series = truncate_filtration(erat_parse(args.expr), args.level)
        out.emit({"level": series.level, "value": str(series)}, str(series))
        return EXIT_OK
    if args.action == "specialize":
        value = specialize(erat_parse(args.expr), args.u, args.v)
        out.emit({"value": _fmt(value)}, _fmt(value))
        return EXIT_OK
    raise AssertionError(args.action)


# -- orbifold -------------------------------------------------------------------


def _load_sectors(path: str):
    obj = load_json(path)
    if isinstance(obj, dict) and "sectors" in obj:
        return orbifold.sector_spec_from_json(obj)
    return orbifold.action_from_json(obj)


def cmd_orbifold(args, out: Output) -> int:
    if args.action == "sectors":
        action = orbifold.action_from_json(load_json(args.file))
        secs = orbifold.sectors(action)
        rows = [
            [",".join(map(str, s.element)), s.order, ",".join(map(str, s.exponents)),
             s.fixed_dim, _fmt(s.shift), _fmt(s.age), str(s.coarse_class)]
            for s in secs
        ]
        text = _table(["element", "order", "exponents", "fixed_dim", "shift", "age", "coarse"], rows)
        out.emit({"sectors": [s.to_dict() for s in secs]}, text)
        return EXIT_OK
    if args.action == "e":
        data = _load_sectors(args.file)
        secs = data if isinstance(data, orbifold.SectorSpec) else orbifold.sectors(data)
        value = orbifold.orbifold_e(secs)
        out.emit({"value": str(value)}, str(value))
        return EXIT_OK
    if args.action == "hodge":
        spec = orbifold.sector_spec_from_json(load_json(args.file))
        try:
            result = orbifold.orbifold_hodge(spec)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
        lines = [f"h^{{{_fmt(p)},{_fmt(q)}}} = {h}" for (p, q), h in result.hodge.items()]
        lines += [f"b_{_fmt(i)} = {b}" for i, b in result.betti.items()]
        if result.euler_from_betti is not None:
            lines.append(f"euler (betti) = {result.euler_from_betti}")
        lines.append(f"euler (E at u=v=1) = {_fmt(result.euler_from_e)}")
        out.emit(result.to_dict(), "\n".join(lines))
        return EXIT_OK if result.consistent else EXIT_FAIL
    if args.action == "check":
        action = orbifold.action_from_json(load_json(args.file))
        gor = orbifold.is_gorenstein(action)
        refl = orbifold.has_reflections(action)
        trivial = orbifold.trivially_acting_elements(action)
        payload = {
            "gorenstein": gor,
            "reflections": refl,
            "trivially_acting": [list(g) for g in trivial],
            "ok": gor and not refl,
        }
        text = [
            f"gorenstein: {'yes' if gor else 'no'}",
            f"reflections: {'present' if refl else 'none'}",
        ]
        if trivial:
            text.append(f"warning: {len(trivial)} non-identity element(s) act trivially")
        out.emit(payload, "\n".join(text))
        return EXIT_OK if payload["ok"] else EXIT_FAIL
    raise AssertionError(args.action)


# -- stringy --------------------------------------------------------------------


def _load_model(path: str) -> stringy.SncModel:
    return stringy.model_from_json(load_json(path))


def cmd_stringy(args, out: Output) -> int:
    if args.action == "kequiv":
        report = stringy.verify_kequivalence(_load_model(args.first), _load_model(args.second))
        text = f"first:  {report.first}\nsecond: {report.second}\nequal:  {str(report.equal).lower()}"
        out.emit(report.to_dict(), text)
        return EXIT_OK if report.equal else EXIT_FAIL
    model = _load_model(args.file)
    if args.action == "validate":
        violations = stringy.validate_snc(model)
        out.emit({"violations": violations}, "\n".join(violations) or "ok")
        return EXIT_FAIL if violations else EXIT_OK
    if args.action in ("integral", "gorenstein"):
        fn = stringy.batyrev_integral if args.action == "integral" else stringy.gorenstein_volume
        value = fn(model)
        out.emit({"value": str(value)}, str(value))
        return EXIT_OK
    if args.action == "levels":
        rows = [[n, str(stringy.ord_level_volume(model, n))] for n in range(args.max + 1)]
        out.emit({"levels": [{"n": n, "volume": v} for n, v in rows]}, _table(["n", "volume"], rows))
        return EXIT_OK
    raise AssertionError(args.action)


# -- verify ---------------------------------------------------------------------


def cmd_verify(args, out: Output) -> int:
    if args.catalogue is not None:
        results = run_catalogue(args.catalogue or None)
        rows = [
            [r.entry.name, str(r.report.stringy), str(r.report.orbifold), "pass" if r.passed else "FAIL"]
            for r in results
        ]
        ok = all(r.passed for r in results)
        payload = {"entries": [r.to_dict() for r in results], "all_passed": ok}
        out.emit(payload, _table(["entry", "stringy", "orbifold", "result"], rows))
        return EXIT_OK if ok else EXIT_FAIL
    if not (args.action and args.resolution):
        raise ParseError("verify needs --action and --resolution, or --catalogue")
    action = orbifold.action_from_json(load_json(args.action))
    model = _load_model(args.resolution)
    report = orbifold.verify_main_theorem(action, model)
    text = (
        f"stringy:  {report.stringy}\norbifold: {report.orbifold}\n"
        f"equal:    {str(report.equal).lower()}"
    )
    out.emit(report.to_dict(), text)
    return EXIT_OK if report.equal else EXIT_FAIL


# -- jets -----------------------------------------------------------------------


def cmd_jets(args, out: Output) -> int:
    cap = args.max_points
    if args.action == "count":
        system = jets.system_from_json(load_json(args.file))
        n = jets.count_jets(system, args.level, args.q, cap)
        out.emit({"count": n, "level": args.level, "q": args.q}, str(n))
        return EXIT_OK
    if args.action == "equations":
        system = jets.system_from_json(load_json(args.file))
        jet = jets.jet_equations(system, args.level)
        eqs = [f.format(jet.var_names) for f in jet.polys]
        out.emit({"vars": list(jet.var_names), "equations": eqs}, "\n".join(eqs))
        return EXIT_OK
    if args.action == "bundle-check":
        system = jets.system_from_json(load_json(args.file))
        report = jets.check_smooth_bundle(system, args.dim, args.max_level, args.q, cap)
        rows = [
            [k, c, "" if k == 0 else ("ok" if report.ratio_ok[k - 1] else "FAIL")]
            for k, c in enumerate(report.counts)
        ]
        out.emit(report.to_dict(), _table(["level", "count", f"c_k = {args.q}^{args.dim} c_(k-1)"], rows))
        return EXIT_OK if report.all_ok else EXIT_FAIL
    if args.action == "twisted-count":
        fam_exps = []
        for w in args.weights:
            a = w % args.order
            fam_exps.append(a if a else args.order)
        fam = jets.TwistedJetFamily(len(fam_exps), args.order, tuple(fam_exps), args.level)
        if args.dim is not None and args.dim != fam.dim:
            raise ParseError(f"--dim {args.dim} does not match {fam.dim} weights")
        n = jets.twisted_jet_count(fam, args.q, cap)
        out.emit({"count": n, "level": args.level, "q": args.q}, str(n))
        return EXIT_OK
    raise AssertionError(args.action)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
    fmt.add_argument("--json", dest="format", action="store_const", const="json", default=argparse.SUPPRESS)
    fmt.add_argument("--text", dest="format", action="store_const", const="text", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="stringy-orbifold",
        description="Stringy and orbifold invariants of Gorenstein quotient singularities.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ep = sub.add_parser("epoly", help="E-polynomial arithmetic", parents=[common])
    esub = ep.add_subparsers(dest="action", required=True)
    p = esub.add_parser("eval", parents=[common])
    p.add_argument("expr")
    p = esub.add_parser("eq", parents=[common])
    p.add_argument("left")
    p.add_argument("right")
    p = esub.add_parser("truncate", parents=[common])
    p.add_argument("expr")
    p.add_argument("--level", type=int, required=True)
    p = esub.add_parser("specialize", parents=[common])
    p.add_argument("expr")
    p.add_argument("--u", type=_rational, required=True)
    p.add_argument("--v", type=_rational, required=True)

    op = sub.add_parser("orbifold", help="twisted sectors and orbifold invariants", parents=[common])
    osub = op.add_subparsers(dest="action", required=True)
    for name in ("sectors", "e", "hodge", "check"):
        p = osub.add_parser(name, parents=[common])
        p.add_argument("file")

    sp = sub.add_parser("stringy", help="stringy volumes of SNC models", parents=[common])
    ssub = sp.add_subparsers(dest="action", required=True)
    for name in ("integral", "gorenstein", "validate"):
        p = ssub.add_parser(name, parents=[common])
        p.add_argument("file")
    p = ssub.add_parser("levels", parents=[common])
    p.add_argument("file")
    p.add_argument("--max", type=int, required=True)
    p = ssub.add_parser("kequiv", parents=[common])
    p.add_argument("first")
    p.add_argument("second")

    vp = sub.add_parser("verify", help="check stringy = orbifold", parents=[common])
    vp.add_argument("--action")
    vp.add_argument("--resolution")
    vp.add_argument("--catalogue", nargs="?", const="", default=None, metavar="DIR")

    jp = sub.add_parser("jets", help="jet schemes over finite fields", parents=[common])
    jp.add_argument("--max-points", type=int, default=jets.DEFAULT_MAX_POINTS)
    jsub = jp.add_subparsers(dest="action", required=True)
    jcommon = argparse.ArgumentParser(add_help=False, parents=[common])
    jcommon.add_argument("--max-points", type=int, default=argparse.SUPPRESS)
    p = jsub.add_parser("count", parents=[jcommon])
    p.add_argument("file")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p = jsub.add_parser("equations", parents=[jcommon])
    p.add_argument("file")
    p.add_argument("--level", type=int, required=True)
    p = jsub.add_parser("bundle-check", parents=[jcommon])
    p.add_argument("file")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-level", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p = jsub.add_parser("twisted-count", parents=[jcommon])
    p.add_argument("--dim", type=int)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--weights", type=_int_list, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    return parser


COMMANDS = {
    "epoly": cmd_epoly,
    "orbifold": cmd_orbifold,
    "stringy": cmd_stringy,
    "verify": cmd_verify,
    "jets": cmd_jets,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    out = Output(getattr(args, "format", "text"))
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidModelError as exc:
        print("invalid model:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_FAIL
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PoleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
