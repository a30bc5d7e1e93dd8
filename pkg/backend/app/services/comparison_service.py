"""
비교표 재현: 필드마다 BY tally, 임베딩 tally, 분모 열을 소수별로 나란히 놓는다
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import pandas as pd
from tqdm import tqdm

from app.core.config import settings
from app.processors.fixture_processor import FixtureProcessor
from app.schemas.fixture import FieldFixture
from app.schemas.report import ComparisonReport, ComparisonRow, FieldReport, TallySet
from app.schemas.tally import PrimeTally
from app.services.base_service import BaseService
from app.services.by_formula_service import ByFormulaService
from app.services.embedding_service import EmbeddingService, candidate_primes

logger = logging.getLogger(__name__)

TABLE_COLUMNS = [
    "field",
    "p",
    "denominators",
    "by",
    "expected_by",
    "embed",
    "expected_embed",
    "by_matches_table",
    "embed_matches_table",
    "by_matches_embed",
    "embed_matches_denominators",
]


def anomaly_notes(fixture: FieldFixture, by: PrimeTally | None, embed: PrimeTally | None) -> list[str]:
    """두 계산이 어긋나는 소수마다 알려진 원인을 붙인다"""
    notes: list[str] = []
    if fixture.double_starred:
        notes.append("outside hypotheses: conjecture does not cover this field")
    if by is None or embed is None:
        return notes
    for p in sorted(set(by.primes) | set(embed.primes)):
        e_by, e_embed = by.get(p), embed.get(p)
        if e_by == e_embed:
            continue
        if p == 2:
            reason = "2-adic: BY exponent is not an embedding count"
        elif e_by > e_embed:
            reason = "multiplicity: embeddings are counted without multiplicity"
        else:
            reason = "unexplained discrepancy"
        notes.append(f"p={p}: {reason} (BY {e_by} vs embed {e_embed})")
    if not fixture.double_starred and any(
        e.denominator != 1 or e < 0 for e in by.exponents.values()
    ):
        notes.append("fractional or negative BY exponent")
    return notes


def compare_field(
    fixture: FieldFixture,
    max_prime: int,
    embed_max_prime: int,
    correction_mod16: bool,
    with_embedding: bool = True,
) -> tuple[FieldReport, list[ComparisonRow], list[str]]:
    """
    한 필드의 보고서, 소수별 비교 행, 이상 메모

    임베딩은 후보 소수 중 p ≤ embed_max_prime 이거나 표에 나타나는 소수에서만 센다.
    """
    K = FixtureProcessor.build_field(fixture)
    by_result = ByFormulaService(max_prime, correction_mod16).predict(K)
    embed_tally = None
    embedding = []
    if with_embedding:
        table_primes = set(fixture.table_primes())
        primes = [
            p
            for p in candidate_primes(K, max_prime)
            if p <= embed_max_prime or p in table_primes
        ]
        embed_result = EmbeddingService(max_prime=max_prime, show_progress=False).tally(K, primes)
        embed_tally = embed_result.tally
        embedding = embed_result.per_prime

    denominators = fixture.expected_denominator_tally
    report = FieldReport(
        field=fixture.key,
        tallies=TallySet(by=by_result.tally, embed=embed_tally, denominators=denominators),
        terms=by_result.terms,
        flags={
            "starred": fixture.starred,
            "double_starred": fixture.double_starred,
            "correction_mod16": correction_mod16,
            "max_prime": max_prime,
        },
        rendered_by=by_result.rendered,
        embedding=embedding,
    )

    primes = set(by_result.tally.primes) | set(fixture.table_primes())
    if embed_tally is not None:
        primes |= set(embed_tally.primes)
    rows = []
    for p in sorted(primes):
        e_by = by_result.tally.get(p)
        e_embed = embed_tally.get(p) if embed_tally is not None else None
        expected_by = fixture.expected("by", p)
        expected_embed = fixture.expected("embed", p)
        rows.append(
            ComparisonRow(
                field=fixture.key,
                p=p,
                by=e_by,
                embed=e_embed,
                denominators=denominators.get(p),
                expected_by=expected_by,
                expected_embed=expected_embed,
                by_matches_table=e_by == expected_by,
                embed_matches_table=None if e_embed is None else e_embed == expected_embed,
                by_matches_embed=None if e_embed is None else e_by == e_embed,
                embed_matches_denominators=(
                    None if e_embed is None else e_embed == denominators.get(p)
                ),
            )
        )
    notes = anomaly_notes(fixture, by_result.tally, embed_tally)
    for note in notes:
        logger.warning(f"{fixture.key}: {note}")
    return report, rows, notes


def _compare_field_task(args: tuple) -> tuple[FieldReport, list[ComparisonRow], list[str]]:
    return compare_field(*args)


class ComparisonService(BaseService):
    """비교표 생성 서비스"""

    def __init__(
        self,
        max_prime: int | None = None,
        embed_max_prime: int | None = None,
        correction_mod16: bool | None = None,
        max_workers: int | None = None,
        show_progress: bool | None = None,
    ):
        super().__init__(max_prime)
        self.embed_max_prime = (
            embed_max_prime if embed_max_prime is not None else settings.embed_max_prime
        )
        self.correction_mod16 = (
            correction_mod16 if correction_mod16 is not None else settings.correction_mod16
        )
        self.max_workers = max_workers if max_workers is not None else settings.max_workers
        self.show_progress = show_progress if show_progress is not None else settings.show_progress

    def build_report(
        self,
        fixtures: list[FieldFixture],
        rows: list[str] | None = None,
        skip_heavy: bool = False,
        with_embedding: bool = True,
    ) -> ComparisonReport:
        """
        선택한 행들의 비교 보고서 (행 순서는 fixture 순서로 고정)

        Args:
            fixtures: 로드된 fixture 전체
            rows: 포함할 field key (None 이면 전부)
            skip_heavy: heavy 행 제외
            with_embedding: 임베딩 계산 포함 여부
        """
        try:
            if rows:
                selected = [FixtureProcessor.get_fixture(fixtures, key) for key in rows]
            else:
                selected = list(fixtures)
            selected.sort(key=lambda f: f.row)
            skipped = [f.key for f in selected if skip_heavy and f.heavy]
            selected = [f for f in selected if f.key not in skipped]
            tasks = [
                (f, self.max_prime, self.embed_max_prime, self.correction_mod16, with_embedding)
                for f in selected
            ]
            logger.info(
                f"비교표 계산 시작: {len(tasks)}개 행, 제외 {skipped}, workers={self.max_workers}"
            )
            if self.max_workers > 1 and len(tasks) > 1:
                with ProcessPoolExecutor(max_workers=self.max_workers) as executor:
                    results = list(
                        tqdm(
                            executor.map(_compare_field_task, tasks),
                            total=len(tasks),
                            desc="table",
                            disable=not self.show_progress,
                        )
                    )
            else:
                results = [
                    _compare_field_task(task)
                    for task in tqdm(tasks, desc="table", disable=not self.show_progress)
                ]
            report = ComparisonReport(skipped=skipped)
            for fixture, (field_report, field_rows, notes) in zip(selected, results):
                report.fields.append(field_report)
                report.rows.extend(field_rows)
                if notes:
                    report.notes[fixture.key] = notes
            mismatches = [r for r in report.rows if r.by_matches_table is False]
            if mismatches:
                logger.warning(f"표와 다른 BY 지수 {len(mismatches)}개")
            return report
        except Exception as e:
            self._handle_exception("building the comparison report", e)

    @staticmethod
    def to_dataframe(report: ComparisonReport) -> pd.DataFrame:
        records = [row.model_dump(mode="json") for row in report.rows]
        if not records:
            return pd.DataFrame(columns=TABLE_COLUMNS)
        return pd.DataFrame(records, columns=TABLE_COLUMNS)

    @staticmethod
    def render_table(report: ComparisonReport) -> str:
        df = ComparisonService.to_dataframe(report)
        if df.empty:
            return "(no rows)"
        df = df.where(pd.notnull(df), "-")
        return df.to_string(index=False)

    @staticmethod
    def write_csv(report: ComparisonReport, path: Path | str) -> None:
        df = ComparisonService.to_dataframe(report)
        df.to_csv(path, index=False)
        logger.info(f"CSV 저장: {path} ({len(df)} 행)")
