from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

PACKAGE_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_FIXTURES_PATH = PACKAGE_ROOT / "fixtures" / "table1.json"


class Settings(BaseSettings):
    # 소수 범위 설정 (fixture 표의 최대 소수 131을 포함)
    max_prime: int = 150
    embed_max_prime: int = 50

    # Bruinier-Yang 공식 보정 (8m + n ≡ 0 mod 16)
    correction_mod16: bool = False

    # 필드 fixture 파일 경로 (None이면 패키지 내장 table1.json 사용)
    fixtures_path: str | None = None

    # 이데알 류 계산에 쓰는 이웃 소수 (None이면 p가 아닌 가장 작은 소수)
    neighbor_prime: int | None = None

    # 실행 설정
    max_workers: int = 1
    show_progress: bool = False
    log_level: str = "INFO"

    @field_validator("correction_mod16", "show_progress", mode="before")
    @classmethod
    def parse_bool_flag(cls, v):
        """환경 변수 문자열을 bool로 변환"""
        if isinstance(v, bool):
            return v
        if isinstance(v, str):
            return v.lower() in ("true", "1", "yes", "on")
        return bool(v)

    @field_validator("fixtures_path", mode="before")
    @classmethod
    def validate_fixtures_path(cls, v):
        """빈 문자열이면 내장 fixture를 사용"""
        if v is None or (isinstance(v, str) and v.strip() == ""):
            return None
        return v

    @field_validator("max_prime", "embed_max_prime")
    @classmethod
    def validate_prime_bound(cls, v):
        if v < 2:
            raise ValueError("prime bound must be at least 2")
        return v

    @field_validator("max_workers")
    @classmethod
    def validate_max_workers(cls, v):
        if v < 1:
            raise ValueError("max_workers must be at least 1")
        return v

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v):
        if not v or (isinstance(v, str) and v.strip() == ""):
            return "INFO"
        return str(v).upper()

    @property
    def resolved_fixtures_path(self) -> Path:
        if self.fixtures_path is None:
            return DEFAULT_FIXTURES_PATH
        return Path(self.fixtures_path)

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=False,
        env_prefix="",
    )


# 전역 설정 인스턴스
settings = Settings()
