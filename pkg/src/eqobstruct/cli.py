"""Command-line front end.

Every command prints a report: the command, the sha256 digest of the
instance, result lines, warnings, and the exit code. ``--format text`` prints
``key: value`` lines, ``--format machine`` prints ``key=value`` lines with a
few extra machine-oriented keys. Exit codes: 0 ok, 1 semantic validation
failure, 2 parse failure, 3 Blocked, 4 NotACocycle, 5 identity failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .bredon import BredonCochain, oracle_cohomology, yoneda_check
from .groups import NotAGroup
from .instance import Instance, ParseError, SemanticError, digest_of, parse_instance, read_document
from .obstruction import (
    STANDING_ASSUMPTIONS,
    DegreeMismatch,
    Kind,
    ObstructionInput,
    check_cocycle,
    decide,
    difference_identity,
)
from .zmodule import GroupInvariants

EXIT_OK = 0
EXIT_SEMANTIC = 1
EXIT_PARSE = 2
EXIT_BLOCKED = 3
EXIT_NOT_A_COCYCLE = 4
EXIT_IDENTITY = 5

VERDICT_EXIT = {
    Kind.EXTENDS_AS_IS: EXIT_OK,
    Kind.EXTENDS_AFTER_MODIFICATION: EXIT_OK,
    Kind.BLOCKED: EXIT_BLOCKED,
    Kind.NOT_A_COCYCLE: EXIT_NOT_A_COCYCLE,
}


class UnknownCochain(KeyError):
    pass


@dataclass
class Report:
    command: str
    digest: str = "-"
    results: list[tuple[str, str, bool]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK

    def add(self, key: str, value: object, machine_only: bool = False) -> None:
        self.results.append((key, str(value), machine_only))

    def render(self, fmt: str = "text") -> str:
        machine = fmt == "machine"
        sep = "=" if machine else ": "
        lines = [f"command{sep}{self.command}", f"instance{sep}{self.digest}"]
        lines += [f"{k}{sep}{v}" for k, v, only in self.results if machine or not only]
        lines += [f"warning{sep}{w}" for w in self.warnings]
        lines.append(f"exit{sep}{self.exit_code}")
        return "\n".join(lines) + "\n"


def format_vector(v: Sequence[int]) -> str:
    return "[" + " ".join(str(int(x)) for x in v) + "]"


def _add_invariants(report: Report, key: str, inv: GroupInvariants) -> None:
    report.add(key, inv)
    report.add(f"{key}.free_rank", inv.free_rank, machine_only=True)
    report.add(f"{key}.torsion", ",".join(str(t) for t in inv.torsion), machine_only=True)


def _add_cochain(report: Report, key: str, c: BredonCochain) -> None:
    for cid, vec in c.values.items():
        report.add(f"{key}[{cid}]", format_vector(vec))


def _fail(report: Report, violations: Sequence[str]) -> Report:
    for v in violations:
        report.add("violation", v)
    report.exit_code = EXIT_SEMANTIC
    return report


def _cochain(inst: Instance, name: str) -> BredonCochain:
    if name not in inst.cochains:
        raise UnknownCochain(name)
    return inst.cochains[name]


def cmd_validate(inst: Instance, report: Report) -> Report:
    report.add("group.order", inst.group.order)
    report.add("family.size", len(inst.family))
    report.add("cells", len(inst.complex.cells))
    report.add("dimension", inst.complex.dimension)
    bad = inst.violations()
    if inst.system is None and inst.system_error is None:
        report.add("coefficients", "absent")
    if bad:
        return _fail(report, bad)
    if inst.system is not None:
        inst.bredon()
    report.add("status", "valid")
    return report


def parse_degrees(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a degree range a..b, got {text!r}") from None
    if a < 0 or b < a:
        raise argparse.ArgumentTypeError(f"invalid degree range {text!r}")
    return a, b


def cmd_cohomology(inst: Instance, report: Report, degrees: tuple[int, int] | None, oracle: bool) -> Report:
    cx = inst.bredon()
    lo, hi = degrees if degrees is not None else (0, max(cx.top, 0))
    mismatches = []
    for n in range(lo, hi + 1):
        inv = cx.cohomology(n).invariants
        _add_invariants(report, f"H^{n}", inv)
        if oracle:
            check = yoneda_check(cx, n)
            other = oracle_cohomology(cx, n)
            agree = check.ok and other == inv
            report.add(f"oracle H^{n}", "agree" if agree else f"DISAGREE ({other}; {'; '.join(check.failures)})")
            if not agree:
                mismatches.append(n)
    if mismatches:
        report.exit_code = EXIT_SEMANTIC
    return report


def cmd_obstruction(inst: Instance, report: Report, name: str) -> Report:
    cx = inst.bredon()
    alpha = _cochain(inst, name)
    inp = ObstructionInput(cx, alpha)
    report.add("cochain", name)
    report.add("n", inp.n)
    check = check_cocycle(inp)
    report.add("cocycle", "yes" if check.ok else f"no (coboundary nonzero on cell {check.witness})")
    verdict = decide(inp)
    report.add("verdict", verdict.kind)
    report.add("meaning", verdict.meaning)
    if verdict.certificate is not None:
        _add_cochain(report, "certificate", verdict.certificate)
    if verdict.cohomology is not None:
        _add_invariants(report, f"H^{inp.n + 1}", verdict.cohomology)
        report.add("class", format_vector(verdict.class_coordinates))
    for d in verdict.diagnostics:
        report.add("diagnostic", d)
    report.warnings.extend(inp.warnings)
    report.exit_code = VERDICT_EXIT[verdict.kind]
    return report


def cmd_check_difference(inst: Instance, report: Report, a1: str, a2: str, d: str) -> Report:
    cx = inst.bredon()
    result = difference_identity(cx, _cochain(inst, a1), _cochain(inst, a2), _cochain(inst, d))
    report.add("identity", f"delta {d} = {a1} - {a2}")
    report.add("holds", "yes" if result.holds else "no")
    if not result.holds:
        _add_cochain(report, "residual", result.residual)
        report.add("cells", ",".join(result.cells))
        report.exit_code = EXIT_IDENTITY
    report.warnings.extend(STANDING_ASSUMPTIONS)
    return report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqobstruct", description="Bredon cohomology and equivariant obstruction verdicts")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", help="check group, complex and coefficient system")
    v.add_argument("file")
    c = sub.add_parser("cohomology", help="Bredon cohomology invariants")
    c.add_argument("file")
    c.add_argument("--degrees", type=parse_degrees, default=None, metavar="a..b")
    c.add_argument("--oracle", action="store_true", help="cross-check against the unreduced cochain groups")
    o = sub.add_parser("obstruction", help="extension verdict for a named cochain")
    o.add_argument("file")
    o.add_argument("--cochain", required=True)
    d = sub.add_parser("check-difference", help="check delta d = a1 - a2")
    d.add_argument("file")
    d.add_argument("--a1", required=True)
    d.add_argument("--a2", required=True)
    d.add_argument("--d", required=True)
    return p


def run(argv: Sequence[str] | None = None) -> tuple[Report, str]:
    args = build_parser().parse_args(argv)
    report = Report(args.command)
    try:
        data = read_document(args.file)
        report.digest = digest_of(data)
        inst = parse_instance(data)
    except ParseError as exc:
        report.add("parse error", f"{exc.path}: {exc.message}")
        report.exit_code = EXIT_PARSE
        return report, args.format
    except NotAGroup as exc:
        return _fail(report, [f"NotAGroup: {exc}"]), args.format
    try:
        if args.command == "validate":
            cmd_validate(inst, report)
        elif args.command == "cohomology":
            cmd_cohomology(inst, report, args.degrees, args.oracle)
        elif args.command == "obstruction":
            cmd_obstruction(inst, report, args.cochain)
        else:
            cmd_check_difference(inst, report, args.a1, args.a2, args.d)
    except SemanticError as exc:
        _fail(report, exc.violations)
    except UnknownCochain as exc:
        report.add("error", f"UnknownCochain: {exc.args[0]}")
        report.exit_code = EXIT_PARSE
    except DegreeMismatch as exc:
        report.add("error", f"DegreeMismatch: {exc}")
        report.exit_code = EXIT_SEMANTIC
    if args.command != "obstruction":
        report.warnings.extend(f"declared: {a}" for a in inst.assumptions)
    return report, args.format


def main(argv: Sequence[str] | None = None) -> int:
    report, fmt = run(argv)
    sys.stdout.write(report.render(fmt))
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
