"""Command-line front end.

Exit codes: 0 when the relation holds or the law passes, 1 when it does not
(or the check is inconclusive), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from . import engines, stability
from ._codes import BudgetExceeded
from .lts import Lts, ParseError, dump_lts, load_lts, load_partition, unify_alphabets
from .orders import CheckReport, check_functorial, check_preorder, default_alphabet, make_order

log = logging.getLogger("simcoal")

LAWS = ("right-stable", "left-stable", "stable", "interchange", "commute", "composition-right",
        "composition-left", "composition-stable", "factored-lift", "op-duality", "preorder", "functorial")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simcoal", description="Simulation checking for finite LTSs.")
    sub = p.add_subparsers(dest="command", required=True)

    def systems(sp, need_rhs=True):
        sp.add_argument("--lhs", required=True, help="left system (.aut, .term or native JSON)")
        sp.add_argument("--rhs", required=need_rhs, help="right system" + ("" if need_rhs else " (default: lhs)"))
        sp.add_argument("--semantics", choices=engines.SEMANTICS)
        sp.add_argument("--order", action="append", default=[], help="order expression instead of --semantics")
        sp.add_argument("--partition", help="JSON action partition for cc semantics")
        sp.add_argument("--mode", choices=("fast", "generic"), default="fast")
        sp.add_argument("--strict-alphabet", action="store_true", help="fail instead of unifying alphabets")

    def output(sp):
        sp.add_argument("--format", choices=("text", "structured"), default="text")
        sp.add_argument("--out", help="write the report here instead of standard output")

    sp = sub.add_parser("check", help="is one state simulated by another")
    systems(sp)
    sp.add_argument("--state", action="append", default=[], help="lhs then rhs state (index or name)")
    output(sp)

    sp = sub.add_parser("preorder", help="print the greatest simulation")
    systems(sp, need_rhs=False)
    output(sp)

    sp = sub.add_parser("oracle", help="compare the engines with brute-force enumeration")
    systems(sp)
    output(sp)

    sp = sub.add_parser("stability", help="check one law for one order on small carriers")
    sp.add_argument("--law", choices=LAWS, required=True)
    sp.add_argument("--order", action="append", default=[], required=True)
    sp.add_argument("--sizes", required=True, help="comma-separated carrier sizes")
    sp.add_argument("--alphabet", type=int, default=1)
    sp.add_argument("--budget", type=int, default=stability.DEFAULT_BUDGET)
    sp.add_argument("--seed", type=int, help="sample above the budget with this seed")
    output(sp)

    sp = sub.add_parser("convert", help="convert between .aut, .term and native formats")
    sp.add_argument("input")
    sp.add_argument("output")
    return p


def _load(path: str) -> Lts:
    try:
        return load_lts(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except (ParseError, ValueError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _systems(args) -> tuple[Lts, Lts]:
    lhs = _load(args.lhs)
    rhs = _load(args.rhs) if args.rhs else lhs
    if lhs.alphabet != rhs.alphabet:
        if args.strict_alphabet:
            raise UsageError(f"alphabets differ: {list(lhs.alphabet)} vs {list(rhs.alphabet)}")
        lhs, rhs = unify_alphabets(lhs, rhs)
        print(f"warning: alphabets unified to {list(lhs.alphabet)}", file=sys.stderr)
    return lhs, rhs


def _semantics(args, alphabet):
    """``(semantics name or None, order, partition)`` chosen by the flags."""
    if args.order and args.semantics:
        raise UsageError("give either --semantics or --order, not both")
    if len(args.order) > 1:
        raise UsageError("one --order expected")
    partition = None
    if args.partition:
        try:
            partition = load_partition(args.partition)
            partition.validate(alphabet)
        except OSError as exc:
            raise UsageError(f"cannot read {args.partition}: {exc.strerror or exc}") from exc
        except ValueError as exc:
            raise UsageError(f"invalid partition: {exc}") from exc
    if args.order:
        try:
            return None, make_order(args.order[0], alphabet), partition
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad order expression: {exc}") from exc
    semantics = args.semantics or "plain"
    if semantics == "cc" and partition is None:
        raise UsageError("--semantics cc needs --partition")
    return semantics, engines.order_for(semantics, alphabet, partition), partition


def _emit(args, text: str, data: dict) -> None:
    body = json.dumps(data, indent=2, sort_keys=True) if args.format == "structured" else text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body + "\n")
    else:
        print(body)


def _state(lts: Lts, ref: Optional[str]) -> int:
    if ref is None:
        return lts.initial if lts.initial is not None else 0
    try:
        return lts.find_state(ref)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _label(lts: Lts, s: int) -> str:
    return "root" if s == lts.initial else lts.state_label(s)


def cmd_check(args) -> int:
    lhs, rhs = _systems(args)
    _, order, _ = _semantics(args, lhs.alphabet)
    if len(args.state) > 2:
        raise UsageError("at most two --state values")
    refs = args.state + [None] * (2 - len(args.state))
    x, y = _state(lhs, refs[0]), _state(rhs, refs[1])
    rel = engines.greatest_coalgebraic_sim(lhs, rhs, order, args.mode)
    ok = (x, y) in rel
    _emit(args, f"{_label(lhs, x)} ⊑ {_label(rhs, y)}: {'true' if ok else 'false'}",
          {"lhs": x, "rhs": y, "order": order.name, "holds": ok})
    return 0 if ok else 1


def cmd_preorder(args) -> int:
    lhs, rhs = _systems(args)
    _, order, _ = _semantics(args, lhs.alphabet)
    rel = engines.greatest_coalgebraic_sim(lhs, rhs, order, args.mode)
    rows = [lhs.state_label(x) for x in range(lhs.state_count)]
    cols = [rhs.state_label(y) for y in range(rhs.state_count)]
    width = max((len(r) for r in rows), default=0)
    lines = [f"{order.name}: {len(rel)} pairs"]
    lines += [f"{r.rjust(width)}  {line}" for r, line in zip(rows, rel.matrix_str().splitlines())]
    lines.append("columns: " + " ".join(cols))
    _emit(args, "\n".join(lines), {"order": order.name, "rows": rows, "cols": cols,
                                    "pairs": [list(p) for p in rel.pairs()]})
    return 0


def cmd_oracle(args) -> int:
    lhs, rhs = _systems(args)
    semantics, order, partition = _semantics(args, lhs.alphabet)
    results = {"fast": engines.greatest_coalgebraic_sim(lhs, rhs, order, "fast"),
               "generic": engines.greatest_coalgebraic_sim(lhs, rhs, order, "generic")}
    if semantics is not None:
        results["classical"] = (engines.greatest_bisimulation(lhs, rhs) if semantics == "bisim"
                                else engines.greatest_classical_sim(lhs, rhs, semantics, partition))
        predicate = engines.classical_predicate(lhs, rhs, semantics, partition)
    else:
        from .lifting import lax_lift_generic
        steps_x, steps_y = lhs.steps, rhs.steps

        def predicate(R, x, y):
            return lax_lift_generic(order, R, steps_x[x], steps_y[y])
    try:
        results["brute-force"] = engines.brute_force_similarity(lhs, rhs, predicate)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    agree = len(set(results.values())) == 1
    text = [f"{name}: {sorted(rel.pairs())}" for name, rel in results.items()]
    text.append("agree" if agree else "MISMATCH")
    _emit(args, "\n".join(text), {"order": order.name, "agree": agree,
                                   "relations": {k: [list(p) for p in v.pairs()] for k, v in results.items()}})
    return 0 if agree else 1


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --sizes {text!r}") from None
    if any(s < 0 for s in sizes):
        raise UsageError("sizes must be nonnegative")
    return sizes


def _run_law(args) -> CheckReport:
    sizes, k = _sizes(args.sizes), args.alphabet
    try:
        orders = [make_order(e, default_alphabet(k)) for e in args.order]
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad order expression: {exc}") from exc
    arity = {"commute": 2, "composition-right": 2, "composition-left": 2, "composition-stable": 2,
             "factored-lift": 3}.get(args.law, 1)
    if len(orders) != arity:
        raise UsageError(f"--law {args.law} takes {arity} --order value(s)")
    want = {"right-stable": 2, "left-stable": 2, "interchange": 2, "factored-lift": 2, "composition-right": 2,
            "composition-left": 2, "stable": 4, "op-duality": 4, "composition-stable": 4,
            "commute": 1, "preorder": 1, "functorial": 2}[args.law]
    if len(sizes) != want:
        raise UsageError(f"--law {args.law} takes {want} sizes")
    law, o, b = args.law, orders[0], args.budget
    if law == "right-stable":
        return stability.check_right_stable(o, *sizes, k, b)
    if law == "left-stable":
        return stability.check_left_stable(o, *sizes, k, b)
    if law == "stable":
        return stability.check_stable(o, *sizes, k, b, sample=args.seed is not None, seed=args.seed or 0)
    if law == "interchange":
        return stability.check_interchange(o, *sizes, k, b)
    if law == "commute":
        return stability.check_commute(o, orders[1], sizes[0], k)
    if law.startswith("composition-"):
        return stability.check_composition_stability(o, orders[1], [*sizes, k], law.split("-")[1], b)
    if law == "factored-lift":
        return stability.check_factored_lift(o, orders[1], orders[2], (*sizes, k), b)
    if law == "op-duality":
        return stability.check_op_duality(o, (*sizes, k), b)
    if law == "preorder":
        return check_preorder(o, sizes[0], k)
    return check_functorial(o, *sizes, k)


def format_report(report: CheckReport) -> str:
    lines = [f"{report.law}: {report.label}"]
    for key, value in report.params.items():
        lines.append(f"  {key}: {value}")
    lines.append(f"  instances: {report.instances}")
    if report.witness is not None:
        lines.append("  witness:")
        lines += [f"    {key}: {value}" for key, value in report.witness.items()]
    for key, value in report.details.items():
        lines.append(f"  {key}: {value}")
    return "\n".join(lines)


def cmd_stability(args) -> int:
    try:
        report = _run_law(args)
    except BudgetExceeded as exc:
        raise UsageError(str(exc)) from exc
    _emit(args, format_report(report), report.to_dict())
    return 0 if report.passed else 1


def cmd_convert(args) -> int:
    lts = _load(args.input)
    try:
        dump_lts(lts, args.output)
    except OSError as exc:
        raise UsageError(f"cannot write {args.output}: {exc.strerror or exc}") from exc
    return 0


COMMANDS = {"check": cmd_check, "preorder": cmd_preorder, "oracle": cmd_oracle,
            "stability": cmd_stability, "convert": cmd_convert}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"simcoal: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())
