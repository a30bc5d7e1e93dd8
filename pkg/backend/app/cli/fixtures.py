"""
`validate-fixtures` 서브커맨드
"""

import argparse

from app.processors.fixture_processor import FixtureProcessor


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "validate-fixtures", help="re-check every fixture row (Dtilde, maximality, flags)"
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    fixtures = FixtureProcessor.load_fixtures(args.fixtures)
    failed = 0
    for fixture in fixtures:
        check = FixtureProcessor.validate_fixture(fixture)
        if check.passed:
            print(f"{fixture.key}: ok (D̃ = {fixture.expected_dtilde})")
        else:
            failed += 1
            print(f"{fixture.key}: FAIL {'; '.join(check.messages)}")
    return 1 if failed else 0
