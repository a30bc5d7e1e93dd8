"""
`by` 서브커맨드: Bruinier-Yang 예측 tally
"""

import argparse
import logging

from app.cli.common import add_field_arguments, add_json_argument, emit_json, resolve_field
from app.schemas.report import FieldReport, TallySet
from app.services.by_formula_service import ByFormulaService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("by", help="Bruinier-Yang tally of a field")
    add_field_arguments(parser)
    parser.add_argument("--max-prime", type=int, default=None, help="largest prime reported")
    parser.add_argument(
        "--correction-mod16",
        action="store_true",
        default=None,
        help="keep only n with 8m + n = 0 mod 16 and p dividing q to odd order",
    )
    add_json_argument(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    fixture, K = resolve_field(args)
    result = ByFormulaService(args.max_prime, args.correction_mod16).predict(K)
    report = FieldReport(
        field=fixture.key if fixture else K.label(),
        tallies=TallySet(
            by=result.tally,
            denominators=fixture.expected_denominator_tally if fixture else None,
        ),
        terms=result.terms,
        flags={
            "correction_mod16": result.correction_mod16,
            "max_prime": result.prime_bound,
        },
        rendered_by=result.rendered,
    )
    if args.json:
        emit_json(report)
        return 0
    print(f"{report.field}: D = {K.D}, D̃ = {K.dtilde}")
    print(f"  BY tally     : {result.tally.render()}")
    print(f"  (p^inner)^outer: {result.rendered}")
    if result.correction_mod16:
        print(f"  odd part     : {result.tally.odd_part().render()}")
    if fixture is not None:
        print(f"  printed      : {fixture.expected_by}")
    print(f"  terms        : {len(result.terms)}")
    return 0
