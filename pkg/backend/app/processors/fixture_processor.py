"""
필드 fixture 파일 처리 클래스 - 읽기, 검증, CMField 변환
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import CMDenominatorError, FixtureError
from app.models.cmfield import (
    CMField,
    check_maximality,
    cm_from_surd,
    dtilde_from_generators,
    relative_discriminant,
)
from app.models.quadfield import QuadField
from app.schemas.fixture import FIELD_KEYS, FieldFixture

logger = logging.getLogger(__name__)


@dataclass
class FixtureCheck:
    key: str
    passed: bool = True
    messages: list[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.passed = False
        self.messages.append(message)


class FixtureProcessor:
    """fixture JSON 을 FieldFixture / CMField 로 바꾸는 처리 클래스"""

    @staticmethod
    def read_json(file_content: bytes, encoding: str = "utf-8") -> list[dict[str, Any]]:
        """
        JSON 배열 파일 내용을 읽기

        Args:
            file_content: JSON 파일의 바이트 내용
            encoding: 파일 인코딩 (기본값: utf-8)

        Returns:
            fixture 딕셔너리 리스트
        """
        try:
            data = json.loads(file_content.decode(encoding))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            logger.error(f"fixture JSON 읽기 실패: {str(e)}")
            raise FixtureError(f"cannot parse fixture file: {e}") from e
        if not isinstance(data, list):
            raise FixtureError("fixture file must contain a JSON array")
        logger.debug(f"fixture JSON 읽기 성공: {len(data)} 행")
        return data

    @staticmethod
    def load_fixtures(path: Path | str | None = None) -> list[FieldFixture]:
        """
        fixture 파일을 읽어 행 순서대로 돌려준다

        Args:
            path: 파일 경로 (None 이면 설정의 경로)

        Returns:
            list[FieldFixture]: row 오름차순
        """
        path = Path(path) if path is not None else settings.resolved_fixtures_path
        try:
            content = path.read_bytes()
        except OSError as e:
            raise FixtureError(f"cannot read fixture file {path}: {e}") from e
        rows = FixtureProcessor.read_json(content)
        try:
            fixtures = [FieldFixture.model_validate(row) for row in rows]
        except ValidationError as e:
            raise FixtureError(f"invalid fixture in {path}: {e}") from e
        keys = [f.key for f in fixtures]
        if len(set(keys)) != len(keys):
            raise FixtureError(f"duplicate field keys in {path}")
        logger.info(f"fixture {len(fixtures)}개 로드: {path}")
        return sorted(fixtures, key=lambda f: f.row)

    @staticmethod
    def get_fixture(fixtures: list[FieldFixture], key: str) -> FieldFixture:
        for fixture in fixtures:
            if fixture.key == key:
                return fixture
        raise FixtureError(f"unknown field {key!r}; expected one of {', '.join(FIELD_KEYS)}")

    @staticmethod
    def build_field(fixture: FieldFixture) -> CMField:
        """fixture 를 검증된 CMField 로 (D̃ 교차 검증 포함)"""
        K = cm_from_surd(
            fixture.d,
            fixture.a,
            fixture.b,
            fixture.alpha0,
            fixture.alpha1,
            fixture.beta0,
            fixture.beta1,
            name=fixture.key,
        )
        if K.dtilde != fixture.expected_dtilde:
            raise FixtureError(
                f"{fixture.key}: computed D̃ = {K.dtilde}, fixture says {fixture.expected_dtilde}"
            )
        return K

    @staticmethod
    def validate_fixture(fixture: FieldFixture) -> FixtureCheck:
        """
        원시성, cyclic, D̃ (다항식과 상대 판별식 노름), 𝒪_F[η] 극대성 검사

        별표 행 조건은 FieldFixture 로드 시 이미 검사된다.

        Returns:
            FixtureCheck: 실패한 항목의 메시지 포함
        """
        check = FixtureCheck(fixture.key)
        try:
            K = FixtureProcessor.build_field(fixture)
        except CMDenominatorError as e:
            check.fail(f"{type(e).__name__}: {e}")
            return check
        polynomial = dtilde_from_generators(
            QuadField(fixture.d).D, fixture.alpha0, fixture.alpha1, fixture.beta0, fixture.beta1
        )
        if polynomial != fixture.expected_dtilde:
            check.fail(f"D̃ polynomial {polynomial} != {fixture.expected_dtilde}")
        try:
            disc_norm = relative_discriminant(K).norm()
            if disc_norm != fixture.expected_dtilde:
                check.fail(f"Norm(d_K/F) {disc_norm} != {fixture.expected_dtilde}")
            check_maximality(K)
        except CMDenominatorError as e:
            check.fail(f"{type(e).__name__}: {e}")
        if check.passed:
            logger.debug(f"{fixture.key}: fixture 검증 통과")
        else:
            logger.warning(f"{fixture.key}: fixture 검증 실패 {check.messages}")
        return check
