"""
`embed` 서브커맨드: 임베딩 개수
"""

import argparse
import logging

from sympy import isprime

from app.cli.common import add_field_arguments, add_json_argument, emit_json, resolve_field
from app.core.exceptions import InvalidPrime
from app.schemas.report import FieldReport, TallySet
from app.schemas.tally import PrimeTally
from app.services.embedding_service import EmbeddingService

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("embed", help="embedding counts of a field")
    add_field_arguments(parser)
    parser.add_argument("--p", type=int, default=None, help="count at this prime only")
    parser.add_argument(
        "--max-prime", type=int, default=None, help="count at all candidate primes up to this"
    )
    parser.add_argument(
        "--verbose-orbits",
        action="store_true",
        help="print orbit representatives and the full-automorphism count",
    )
    add_json_argument(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    fixture, K = resolve_field(args)
    service = EmbeddingService(max_prime=args.max_prime, verbose_orbits=args.verbose_orbits)
    if args.p is not None:
        if not isprime(args.p):
            raise InvalidPrime(f"{args.p} is not prime")
        per_prime = [service.count(K, args.p)]
        tally = PrimeTally.from_mapping({args.p: per_prime[0].count})
    else:
        result = service.tally(K)
        per_prime, tally = result.per_prime, result.tally
    report = FieldReport(
        field=fixture.key if fixture else K.label(),
        tallies=TallySet(
            embed=tally,
            denominators=fixture.expected_denominator_tally if fixture else None,
        ),
        flags={"max_prime": service.max_prime, "verbose_orbits": args.verbose_orbits},
        embedding=per_prime,
    )
    if args.json:
        emit_json(report)
        return 0
    print(f"{report.field}: D = {K.D}, D̃ = {K.dtilde}")
    for r in per_prime:
        print(f"  p={r.p}: {r.count}")
        if args.verbose_orbits:
            print(f"    full Aut(O_K) orbits: {r.full_aut_count}")
            for line in r.representatives:
                print(f"    {line}")
    print(f"  embedding tally: {tally.render()}")
    if fixture is not None:
        print(f"  printed        : {fixture.expected_embed}")
    return 0
