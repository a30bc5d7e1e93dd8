"""
서브커맨드 공통 인자와 필드 선택
"""

import argparse
import logging

from pydantic import BaseModel

from app.core.exceptions import FixtureError
from app.models.cmfield import CMField, cm_from_surd
from app.processors.fixture_processor import FixtureProcessor
from app.schemas.fixture import FIELD_KEYS, FieldFixture

logger = logging.getLogger(__name__)


def add_field_arguments(parser: argparse.ArgumentParser) -> None:
    """--field 또는 --surd/--eta 로 CM 체를 고른다"""
    group = parser.add_argument_group("field selection")
    group.add_argument("--field", choices=FIELD_KEYS, help="fixture key of the field")
    group.add_argument(
        "--surd",
        nargs=3,
        type=int,
        metavar=("D", "A", "B"),
        help="K = Q(sqrt(A + B sqrt(D))) given explicitly",
    )
    group.add_argument(
        "--eta",
        nargs=4,
        type=int,
        metavar=("ALPHA0", "ALPHA1", "BETA0", "BETA1"),
        help="trace and norm of eta in the basis (1, omega); required with --surd",
    )


def add_json_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="print the report as JSON")


def resolve_field(args: argparse.Namespace) -> tuple[FieldFixture | None, CMField]:
    """
    인자에서 (fixture, CMField) 를 만든다

    Raises:
        FixtureError: 필드가 지정되지 않았거나 둘 다 지정되었을 때
    """
    if args.field and args.surd:
        raise FixtureError("use either --field or --surd/--eta, not both")
    if args.field:
        fixtures = FixtureProcessor.load_fixtures(args.fixtures)
        fixture = FixtureProcessor.get_fixture(fixtures, args.field)
        return fixture, FixtureProcessor.build_field(fixture)
    if args.surd:
        if not args.eta:
            raise FixtureError("--surd needs --eta ALPHA0 ALPHA1 BETA0 BETA1")
        d, a, b = args.surd
        K = cm_from_surd(d, a, b, *args.eta, name=f"Q(sqrt({a}+{b}sqrt{d}))")
        return None, K
    raise FixtureError("no field given: pass --field KEY or --surd D A B --eta ...")


def emit_json(model: BaseModel) -> None:
    print(model.model_dump_json(indent=2))
