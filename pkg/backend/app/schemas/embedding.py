from pydantic import BaseModel, Field

from app.schemas.tally import ExactRational


class EndRingSummary(BaseModel):
    index: int = Field(..., description="position in the all_end_rings list")
    ideal_norm: ExactRational = Field(..., description="N(I)")
    coincident: bool = Field(..., description="E and E' isomorphic (I principal)")
    solutions: int = Field(..., description="solutions of the embedding conditions")
    reduced: int = Field(..., description="solutions left after conjugate removal")
    weight: ExactRational = Field(..., description="contribution to the count (reduced or reduced/2)")


class EmbeddingPrimeResult(BaseModel):
    p: int = Field(..., description="characteristic of the supersingular curves")
    count: int = Field(..., description="number of embeddings up to isomorphism")
    end_rings: list[EndRingSummary] = Field(default_factory=list)
    full_aut_count: ExactRational | None = Field(
        None, description="orbit count under the full cyclic Aut(O_K) (verbose mode)"
    )
    representatives: list[str] = Field(
        default_factory=list, description="rendered (Lambda1, Lambda2) orbit representatives"
    )
