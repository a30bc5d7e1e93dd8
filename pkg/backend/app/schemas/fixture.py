from fractions import Fraction

from pydantic import BaseModel, Field, model_validator
from sympy import isprime

from app.schemas.tally import ExactRational, PrimeTally

FIELD_KEYS = (
    "dt5",
    "dt32",
    "dt13",
    "dt64x5",
    "dt5x169",
    "dt29",
    "dt5x289",
    "dt37",
    "dt32x25",
    "dt25x13",
    "dt64x13",
    "dt53",
    "dt61",
)


class FieldFixture(BaseModel):
    key: str = Field(..., description="field selector used by --field")
    row: int = Field(..., ge=1, description="row of the comparison table")
    name: str = Field(..., description="display name of K")
    d: int = Field(..., gt=1, description="squarefree d with F = Q(sqrt d)")
    a: int = Field(..., description="K = Q(sqrt(a + b sqrt d))")
    b: int
    alpha0: int = Field(..., description="Tr(eta) = alpha0 + alpha1 omega")
    alpha1: int
    beta0: int = Field(..., description="Norm(eta) = beta0 + beta1 omega")
    beta1: int
    expected_dtilde: int = Field(..., gt=0, description="norm of the relative discriminant")
    expected_denominators: str = Field(..., description="denominator column as printed")
    expected_by: str = Field(..., description="Bruinier-Yang column as printed")
    expected_embed: str = Field(..., description="embedding column as printed")
    denominator_tally: dict[int, ExactRational] = Field(default_factory=dict)
    by_tally: dict[int, ExactRational] = Field(default_factory=dict)
    embed_tally: dict[int, ExactRational] = Field(default_factory=dict)
    starred: bool = Field(False, description="conjecture proved for this field")
    double_starred: bool = Field(False, description="outside the conjecture's hypotheses")
    heavy: bool = Field(False, description="embedding search takes minutes or more")
    provenance: str = ""

    @model_validator(mode="after")
    def check_row_flags(self):
        if self.key not in FIELD_KEYS:
            raise ValueError(f"unknown field key {self.key!r}")
        if self.starred and not (isprime(self.expected_dtilde) and self.expected_dtilde % 4 == 1):
            raise ValueError(
                f"{self.key}: starred rows need a prime Dtilde = 1 mod 4, got {self.expected_dtilde}"
            )
        return self

    @property
    def expected_by_tally(self) -> PrimeTally:
        return PrimeTally.from_mapping(self.by_tally)

    @property
    def expected_embed_tally(self) -> PrimeTally:
        return PrimeTally.from_mapping(self.embed_tally)

    @property
    def expected_denominator_tally(self) -> PrimeTally:
        return PrimeTally.from_mapping(self.denominator_tally)

    def table_primes(self) -> list[int]:
        """세 열 중 어느 하나에라도 나타나는 소수"""
        primes = set(self.denominator_tally) | set(self.by_tally) | set(self.embed_tally)
        return sorted(primes)

    def expected(self, column: str, p: int) -> Fraction:
        tally = {"by": self.by_tally, "embed": self.embed_tally, "denominators": self.denominator_tally}
        return tally[column].get(p, Fraction(0))
