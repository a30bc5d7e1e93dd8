"""
계산 서비스 공통 베이스 클래스
"""

import logging
from abc import ABC

from app.core.config import settings
from app.core.exceptions import CMDenominatorError

logger = logging.getLogger(__name__)


class BaseService(ABC):
    """설정값 해석과 공통 예외 처리를 제공하는 베이스 서비스"""

    def __init__(self, max_prime: int | None = None):
        self.max_prime = max_prime if max_prime is not None else settings.max_prime

    def _handle_exception(self, operation: str, e: Exception) -> None:
        """공통 예외 처리"""
        if isinstance(e, CMDenominatorError):
            raise e

        logger.error(f"Error {operation}: {e}")
        raise CMDenominatorError(f"unexpected failure while {operation}: {e}") from e
