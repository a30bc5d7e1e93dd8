from fractions import Fraction

import pytest
from pydantic import ValidationError

from app.schemas.report import FieldReport, TallySet
from app.schemas.tally import PrimeTally, format_exponent


def test_render():
    assert PrimeTally().render() == "1"
    assert PrimeTally.from_mapping({11: 2, 5: 2}).render() == "5^2 11^2"
    assert PrimeTally.from_mapping({2: Fraction(3, 2)}).render() == "2^{3/2}"
    assert format_exponent(Fraction(-1, 2)) == "{-1/2}"


def test_from_mapping_drops_zeros():
    t = PrimeTally.from_mapping({2: 0, 3: Fraction(1, 2)})
    assert t.primes == [3]
    assert t.get(2) == 0


def test_odd_part_and_restrict():
    t = PrimeTally.from_mapping({2: -14, 5: 2, 131: 2})
    assert t.odd_part().primes == [5, 131]
    assert t.restrict(100).primes == [2, 5]


def test_floats_are_rejected():
    with pytest.raises(ValidationError):
        PrimeTally(exponents={2: 1.5})
    with pytest.raises(ValidationError):
        PrimeTally(exponents={2: True})


def test_exponents_serialise_as_exact_strings():
    report = FieldReport(
        field="dt32",
        tallies=TallySet(by=PrimeTally.from_mapping({2: Fraction(-3, 2)})),
        flags={"correction_mod16": False},
    )
    payload = report.model_dump(mode="json")
    assert payload["tallies"]["by"]["exponents"] == {"2": "-3/2"}
    assert FieldReport.model_validate_json(report.model_dump_json()) == report
