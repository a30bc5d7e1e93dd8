"""
`table` 서브커맨드: 비교표 재현
"""

import argparse
import logging

from app.cli.common import add_json_argument, emit_json
from app.processors.fixture_processor import FixtureProcessor
from app.services.comparison_service import ComparisonService

logger = logging.getLogger(__name__)


def _split_rows(value: str) -> list[str]:
    return [key.strip() for key in value.split(",") if key.strip()]


def register(subparsers) -> None:
    parser = subparsers.add_parser("table", help="reproduce the comparison table")
    parser.add_argument("--rows", type=_split_rows, default=None, help="comma separated field keys")
    parser.add_argument("--skip-heavy", action="store_true", help="leave out heavy rows")
    parser.add_argument("--by-only", action="store_true", help="skip the embedding counts")
    parser.add_argument("--max-prime", type=int, default=None)
    parser.add_argument("--embed-max-prime", type=int, default=None)
    parser.add_argument("--correction-mod16", action="store_true", default=None)
    parser.add_argument("--workers", type=int, default=None, help="process pool size")
    parser.add_argument("--csv", default=None, metavar="PATH", help="also write rows as CSV")
    add_json_argument(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    fixtures = FixtureProcessor.load_fixtures(args.fixtures)
    service = ComparisonService(
        max_prime=args.max_prime,
        embed_max_prime=args.embed_max_prime,
        correction_mod16=args.correction_mod16,
        max_workers=args.workers,
    )
    report = service.build_report(
        fixtures, rows=args.rows, skip_heavy=args.skip_heavy, with_embedding=not args.by_only
    )
    if args.csv:
        ComparisonService.write_csv(report, args.csv)
    if args.json:
        emit_json(report)
        return 0
    print(ComparisonService.render_table(report))
    for key, notes in report.notes.items():
        for note in notes:
            print(f"{key}: {note}")
    if report.skipped:
        print(f"skipped heavy rows: {', '.join(report.skipped)}")
    return 0
