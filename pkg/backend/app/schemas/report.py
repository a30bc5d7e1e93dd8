from pydantic import BaseModel, Field

from app.schemas.embedding import EmbeddingPrimeResult
from app.schemas.tally import BYTermRecord, ExactRational, PrimeTally


class TallySet(BaseModel):
    by: PrimeTally | None = Field(None, description="Bruinier-Yang tally (None if not computed)")
    embed: PrimeTally | None = Field(None, description="embedding counts (None if not computed)")
    denominators: PrimeTally | None = Field(
        None, description="denominator column from the fixture (None for a --surd field)"
    )


class FieldReport(BaseModel):
    field: str = Field(..., description="fixture key")
    tallies: TallySet
    terms: list[BYTermRecord] = Field(default_factory=list)
    flags: dict[str, bool | int | str] = Field(default_factory=dict)
    rendered_by: str | None = Field(None, description="(p^inner)^outer rendering")
    embedding: list[EmbeddingPrimeResult] = Field(default_factory=list)


class ComparisonRow(BaseModel):
    field: str
    p: int
    by: ExactRational | None = None
    embed: ExactRational | None = None
    denominators: ExactRational
    expected_by: ExactRational
    expected_embed: ExactRational
    by_matches_table: bool | None = Field(None, description="BY exponent equals the printed value")
    embed_matches_table: bool | None = Field(
        None, description="embedding count equals the printed value"
    )
    by_matches_embed: bool | None = Field(None, description="the two pipelines agree")
    embed_matches_denominators: bool | None = None


class ComparisonReport(BaseModel):
    rows: list[ComparisonRow] = Field(default_factory=list)
    fields: list[FieldReport] = Field(default_factory=list)
    notes: dict[str, list[str]] = Field(default_factory=dict, description="anomaly notes per field")
    skipped: list[str] = Field(default_factory=list, description="heavy rows left out")
