#!/usr/bin/env python3
"""
liedeform - командная строка
Проверка алгебр и скрещенных модулей, полупрямые и деформированные произведения,
когомологии, дифференцирования, сертификаты неизоморфности и контракции.
Аргументы-объекты: путь к .json / .yaml файлу или ключ каталога вида @key.
"""
import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from analysis import certify_nonisomorphic, fingerprint, is_identity_crmod
from catalog import get_catalog
from cohomology import (
    adjoint_module,
    canonical_cocycle,
    cohomology_report,
    differential,
    is_coboundary,
    trivial_module,
)
from errors import CatalogLookupError, LieDeformError, ParseError, ValidationError
from exact_linalg import format_rational, parse_rational
from lie_core import LieAlgebra, derivations, derivations_as_algebra, jacobi_check
from products import (
    CheckReport,
    CrossedModule,
    check_crossed_module,
    contraction_check_phi,
    contraction_check_psi,
    deformed,
    direct_product,
    semidirect,
)
from serialization import dumps, load_document, object_from_dict, report, write_document

logger = logging.getLogger("liedeform")

LOG_LEVEL = os.getenv("LIEDEFORM_LOG_LEVEL", "WARNING")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Неверные аргументы командной строки: код выхода 2"""


# ============================================================
# INPUT
# ============================================================

def load_object(ref: str, validate: bool = True) -> Union[LieAlgebra, CrossedModule]:
    """
    Ключи каталога уже проверены при сборке; объекты из файлов проверяются здесь
    (Якоби, для скрещенного модуля ещё действие и обе аксиомы), если validate.
    """
    catalog = get_catalog()
    if ref.startswith("@"):
        return catalog.get(ref[1:])
    path = Path(ref)
    if not path.exists():
        raise UsageError(f"File not found: {ref}")
    logger.info(f"Reading {path}")
    obj = object_from_dict(load_document(path), resolver=catalog.get)
    if validate:
        check = validation_report(obj)
        if not check.ok:
            raise ValidationError(f"{path.name} failed validation: {check.summary()}", check)
    return obj


def load_algebra(ref: str) -> LieAlgebra:
    obj = load_object(ref)
    if not isinstance(obj, LieAlgebra):
        raise UsageError(f"{ref} is a crossed module, a Lie algebra is expected here")
    return obj


def load_crossed(ref: str) -> CrossedModule:
    obj = load_object(ref)
    if not isinstance(obj, CrossedModule):
        raise UsageError(f"{ref} is a Lie algebra, a crossed module is expected here")
    return obj


def _rational_arg(value: str):
    try:
        return parse_rational(value)
    except ParseError as e:
        raise argparse.ArgumentTypeError(str(e))


# ============================================================
# OUTPUT
# ============================================================

def _plain(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "(" + ", ".join(_plain(v) for v in value) + ")"
    if isinstance(value, bool):
        return "yes" if value else "no"
    return str(value)


def _table(rows: Sequence[Sequence[Any]]) -> str:
    cells = [[_plain(c) for c in row] for row in rows]
    if not cells:
        return ""
    widths = [max(len(row[i]) for row in cells if i < len(row)) for i in range(max(len(r) for r in cells))]
    lines = ["  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip() for row in cells]
    return "\n".join(lines)


def _emit(args: argparse.Namespace, result: Dict, text: str):
    if args.json:
        sys.stdout.write(dumps(report(args.command, result)))
    else:
        print(text)


def _violation_rows(check: CheckReport) -> List[List[Any]]:
    return [[v.rule, list(v.where), v.detail] for v in check.violations]


# ============================================================
# COMMANDS
# ============================================================

def _jacobi_report(L: LieAlgebra, subject: str) -> CheckReport:
    check = CheckReport(subject)
    for triple in jacobi_check(L):
        check.add("jacobi", triple)
    return check


def validation_report(obj: Union[LieAlgebra, CrossedModule]) -> CheckReport:
    if isinstance(obj, LieAlgebra):
        return _jacobi_report(obj, obj.name)
    check = CheckReport(obj.name)
    check.merge(_jacobi_report(obj.h, obj.h.name))
    check.merge(_jacobi_report(obj.g, obj.g.name))
    if check.ok:
        check.merge(check_crossed_module(obj))
    return check


def cmd_check(args) -> int:
    check = validation_report(load_object(args.object, validate=False))
    text = f"{check.subject}: ok" if check.ok else check.summary() + "\n" + _table(_violation_rows(check))
    _emit(args, check.to_dict(), text)
    return EXIT_OK if check.ok else EXIT_FAILURE


def cmd_analyze(args) -> int:
    obj = load_object(args.object)
    if isinstance(obj, LieAlgebra):
        algebras = [obj]
    else:
        algebras = [direct_product(obj), semidirect(obj), deformed(obj, args.t)]
    result = {L.name: fingerprint(L).to_dict() for L in algebras}
    blocks = []
    for name, values in result.items():
        blocks.append(name + "\n" + _table([[field, value] for field, value in values.items()]))
    _emit(args, result, "\n\n".join(blocks))
    return EXIT_OK


def cmd_semidirect(args) -> int:
    cm = load_crossed(args.crossed)
    L = semidirect(cm) if args.t == 0 else deformed(cm, args.t)
    data = L.to_dict()
    if args.output:
        write_document(args.output, data)
        logger.info(f"Wrote {L.name} to {args.output}")
    if args.json or not args.output:
        sys.stdout.write(dumps(report(args.command, data)) if args.json else dumps(data))
    else:
        print(f"{L.name} (dim {L.dim}) written to {args.output}")
    return EXIT_OK


def cmd_cohomology(args) -> int:
    L = load_algebra(args.object)
    module = adjoint_module(L) if args.module == "adjoint" else trivial_module(L)
    result = cohomology_report(L, module, args.module, degrees=[args.degree])
    k = args.degree
    text = _table([
        ["algebra", L.name],
        ["module", args.module],
        [f"dim Z{k}", result["Z"][f"Z{k}"]],
        [f"dim B{k}", result["B"][f"B{k}"]],
        [f"dim H{k}", result["dims"][f"H{k}"]],
    ])
    _emit(args, result, text)
    return EXIT_OK


def cmd_cocycle_status(args) -> int:
    cm = load_crossed(args.crossed)
    c = canonical_cocycle(cm)
    closed = differential(c).is_zero()
    result: Dict[str, Any] = {"crossed_module": cm.name, "closed": closed, "identically_zero": c.is_zero()}
    if not closed:
        result["coboundary"] = None
        _emit(args, result, "cocycle: no (canonical cochain is not closed)")
        return EXIT_FAILURE
    if c.is_zero():
        result["coboundary"] = True
        text = "coboundary: yes (cocycle is identically zero)"
    else:
        primitive = is_coboundary(c)
        result["coboundary"] = primitive is not None
        if primitive is None:
            text = "coboundary: no (nontrivial class in H2)"
        else:
            result["primitive"] = [format_rational(x) for x in primitive.to_vector()]
            text = "coboundary: yes"
    _emit(args, result, text)
    return EXIT_OK


def cmd_derivations(args) -> int:
    L = load_algebra(args.object)
    if args.as_algebra:
        der_algebra, matrices = derivations_as_algebra(L)
        result = {"algebra": der_algebra.to_dict(), "matrices": [m.to_lists() for m in matrices]}
        text = _table([[label, m.to_lists()] for label, m in zip(der_algebra.basis_labels, matrices)])
        text = f"{der_algebra.name} (dim {der_algebra.dim})\n{text}"
    else:
        der = derivations(L)
        result = {"algebra": L.name, "dim": der.dim, "basis": [m.to_lists() for m in der.basis]}
        text = f"dim Der({L.name}) = {der.dim}"
    _emit(args, result, text)
    return EXIT_OK


def cmd_compare(args) -> int:
    A = load_algebra(args.a)
    B = load_algebra(args.b)
    certificate = certify_nonisomorphic(A, B)
    rows = [["invariant", A.name, B.name]] + [list(diff) for diff in certificate.differing_invariants]
    verdict = "not isomorphic" if certificate.conclusive else "inconclusive (all compared invariants agree)"
    _emit(args, certificate.to_dict(), f"{A.name} vs {B.name}: {verdict}\n" + _table(rows))
    return EXIT_OK


def cmd_contract_verify(args) -> int:
    cm = load_crossed(args.crossed)
    if is_identity_crmod(cm):
        kind, ok = "psi", contraction_check_psi(cm.g, args.s)
    else:
        kind, ok = "phi", contraction_check_phi(cm, args.s)
    result = {"crossed_module": cm.name, "map": kind, "s": format_rational(args.s), "verified": ok}
    text = f"{kind}-contraction verified exactly" if ok else f"{kind}-contraction FAILED"
    _emit(args, result, text)
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_catalog(args) -> int:
    catalog = get_catalog()
    if args.action == "list":
        entries = catalog.list_entries()
        result = {"entries": [e.to_dict() for e in entries]}
        text = _table([[e.key, e.kind.value, e.description] for e in entries])
        _emit(args, result, text)
        return EXIT_OK
    if not args.key:
        raise UsageError("catalog emit needs a key")
    obj = catalog.get(args.key.lstrip("@"))
    data = obj.to_dict()
    if args.json:
        sys.stdout.write(dumps(report(args.command, data)))
    else:
        sys.stdout.write(dumps(data))
    return EXIT_OK


# ============================================================
# ENTRY POINT
# ============================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liedeform", description="Deformations of semidirect products")
    parser.add_argument("--json", action="store_true", help="emit the JSON report")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    # те же флаги допустимы и после имени команды
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="Jacobi identity / crossed-module axioms")
    p.add_argument("object")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("analyze", parents=[common], help="invariant fingerprint")
    p.add_argument("object")
    p.add_argument("--t", type=_rational_arg, default=parse_rational(1))
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("semidirect", parents=[common], help="semidirect or deformed product of a crossed module")
    p.add_argument("--crossed", required=True)
    p.add_argument("--t", type=_rational_arg, default=parse_rational(0))
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_semidirect)

    p = sub.add_parser("cohomology", parents=[common], help="Chevalley-Eilenberg cohomology dimension")
    p.add_argument("object")
    p.add_argument("--degree", type=int, required=True, choices=[0, 1, 2])
    p.add_argument("--module", choices=["adjoint", "trivial"], default="adjoint")
    p.set_defaults(handler=cmd_cohomology)

    p = sub.add_parser("cocycle-status", parents=[common], help="is the canonical 2-cocycle a coboundary")
    p.add_argument("--crossed", required=True)
    p.set_defaults(handler=cmd_cocycle_status)

    p = sub.add_parser("derivations", parents=[common], help="derivation algebra")
    p.add_argument("object")
    p.add_argument("--as-algebra", action="store_true")
    p.set_defaults(handler=cmd_derivations)

    p = sub.add_parser("compare", parents=[common], help="non-isomorphism certificate")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("contract-verify", parents=[common], help="verify the contraction maps exactly")
    p.add_argument("--crossed", required=True)
    p.add_argument("--s", type=_rational_arg, required=True)
    p.set_defaults(handler=cmd_contract_verify)

    p = sub.add_parser("catalog", parents=[common], help="built-in catalog")
    p.add_argument("action", choices=["list", "emit"])
    p.add_argument("key", nargs="?")
    p.set_defaults(handler=cmd_catalog)
    return parser


def setup_logging(verbose: bool):
    level = logging.DEBUG if verbose else getattr(logging, LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=level,
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    setup_logging(args.verbose)
    try:
        return args.handler(args)
    except (UsageError, CatalogLookupError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except LieDeformError as e:
        print(f"Error: {e}", file=sys.stderr)
        report_data = getattr(e, "report", None)
        if isinstance(report_data, CheckReport):
            print(_table(_violation_rows(report_data)), file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
