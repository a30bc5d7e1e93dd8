import argparse
import logging
import sys

from app.cli import by, embed, fixtures, table
from app.core.config import settings
from app.core.exceptions import CMDenominatorError
from app.core.logging import setup_logging

logger = logging.getLogger(__name__)

COMMANDS = (by, embed, table, fixtures)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cm-denominators",
        description="Bruinier-Yang tallies and embedding counts for primitive quartic CM fields",
    )
    parser.add_argument("--fixtures", default=None, metavar="PATH", help="fixture JSON file")
    parser.add_argument("--log-level", default=None, help="override LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    """CLI 진입점. 종료 코드를 돌려준다 (0 성공, 1 도메인 오류, 2 사용법 오류)"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or settings.log_level)
    logger.debug(f"명령 실행: {args.command}")
    try:
        return args.handler(args)
    except CMDenominatorError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
