from fractions import Fraction
from typing import Annotated

from pydantic import BaseModel, Field, PlainSerializer, PlainValidator


def _parse_fraction(v) -> Fraction:
    """"3/2", "-1/2", 2 같은 입력을 Fraction 으로 (float 은 거부)"""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool) or isinstance(v, float):
        raise ValueError(f"exact rational expected, got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except ValueError as e:
            raise ValueError(f"invalid rational string {v!r}") from e
    raise ValueError(f"exact rational expected, got {type(v).__name__}")


ExactRational = Annotated[
    Fraction,
    PlainValidator(_parse_fraction),
    PlainSerializer(str, return_type=str),
]


def format_exponent(e: Fraction) -> str:
    return str(e) if e.denominator == 1 else "{" + str(e) + "}"


class PrimeTally(BaseModel):
    """소수 p → log p 의 계수 (정확한 유리수)"""

    exponents: dict[int, ExactRational] = Field(
        default_factory=dict, description="prime -> exact rational exponent, zeros dropped"
    )

    @classmethod
    def from_mapping(cls, mapping: dict[int, Fraction | int]) -> "PrimeTally":
        cleaned = {int(p): Fraction(e) for p, e in sorted(mapping.items()) if e != 0}
        return cls(exponents=cleaned)

    def get(self, p: int) -> Fraction:
        return self.exponents.get(p, Fraction(0))

    @property
    def primes(self) -> list[int]:
        return sorted(self.exponents)

    def is_empty(self) -> bool:
        return not self.exponents

    def odd_part(self) -> "PrimeTally":
        return PrimeTally.from_mapping({p: e for p, e in self.exponents.items() if p != 2})

    def restrict(self, bound: int) -> "PrimeTally":
        return PrimeTally.from_mapping({p: e for p, e in self.exponents.items() if p <= bound})

    def render(self) -> str:
        """"5^2 11^2" 꼴 (빈 tally 는 "1")"""
        if not self.exponents:
            return "1"
        return " ".join(f"{p}^{format_exponent(e)}" for p, e in sorted(self.exponents.items()))

    def __str__(self) -> str:
        return self.render()


class BYTermRecord(BaseModel):
    m: int = Field(..., description="Hirzebruch-Zagier index m = (D - x^2)/4")
    x: int = Field(..., description="x with m = (D - x^2)/4")
    n: int = Field(..., description="numerator in t = (n + m*sqrt(Dtilde))/(2D)")
    p: int = Field(..., description="rational prime below P")
    prime: str = Field(..., description="label of the prime ideal P of F")
    f: int = Field(..., description="residue degree of P")
    ordP_t: int = Field(..., description="valuation of t at P")
    rho_value: int = Field(..., description="rho(t d_{K/F} P^-1)")
    contribution: ExactRational = Field(..., description="(ordP_t + 1) * rho_value * f")
    outer: ExactRational = Field(..., description="(ordP_t + 1)/2")
    alt_outer: ExactRational = Field(
        ..., description="(ord_p((m^2 Dtilde - n^2)/(4D)) + 1)/2"
    )
    split_prime_m: bool = Field(..., description="m is a rational prime split in F")

    @property
    def inner(self) -> int:
        return self.rho_value * self.f
