import random

import pytest

from app.models.cmfield import CMField
from app.processors.fixture_processor import FixtureProcessor
from app.schemas.fixture import FieldFixture

LIGHT_ROWS = ("dt5", "dt32", "dt13", "dt64x5", "dt5x169", "dt29", "dt37", "dt53", "dt61")


@pytest.fixture(scope="session")
def fixtures() -> list[FieldFixture]:
    return FixtureProcessor.load_fixtures()


@pytest.fixture(scope="session")
def fixture_by_key(fixtures):
    return {f.key: f for f in fixtures}


@pytest.fixture(scope="session")
def build_field(fixture_by_key):
    cache: dict[str, CMField] = {}

    def _build(key: str) -> CMField:
        if key not in cache:
            cache[key] = FixtureProcessor.build_field(fixture_by_key[key])
        return cache[key]

    return _build


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240229)
