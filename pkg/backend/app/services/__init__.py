"""
서비스 모듈
"""

from .base_service import BaseService
from .by_formula_service import ByFormulaService
from .comparison_service import ComparisonService
from .embedding_service import EmbeddingService

__all__ = [
    "BaseService",
    "ByFormulaService",
    "ComparisonService",
    "EmbeddingService",
]
