"""
Bruinier-Yang 공식으로 예측한 교차수 tally

2𝒢₁.𝒞ℳ(K) 를 Hirzebruch-Zagier 인자 T_m 들의 합으로 풀고, 각 m 에 대해
b_m(p) = Σ_{𝔭|p} Σ_t (ord_𝔭 t + 1) ρ(t d 𝔭⁻¹) f(𝔭) 를 더한 뒤 Galois ½ 를 곱한다.
"""

import logging
import math
from collections import defaultdict
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction

from sympy import isprime

from app.core.config import settings
from app.models.cmfield import CMField, relative_discriminant, rho, splitting_in_K
from app.models.quadfield import (
    PrimeKind,
    QuadIdealFactored,
    ideal_of_element,
    kronecker,
    padic_order,
)
from app.schemas.tally import BYTermRecord, PrimeTally, format_exponent
from app.services.base_service import BaseService

logger = logging.getLogger(__name__)


def enumerate_m(D: int) -> list[tuple[int, int]]:
    """
    T_{(D − x²)/4} 의 지수 m 과 그 x (x ≥ 0, x² < D, x² ≡ D mod 4)

    Returns:
        list[tuple[int, int]]: (m, x) 를 x 오름차순으로
    """
    pairs = []
    for x in range(math.isqrt(D - 1) + 1):
        if x * x < D and (D - x * x) % 4 == 0:
            pairs.append(((D - x * x) // 4, x))
    if pairs and pairs[0][1] == 0:
        logger.info(f"D={D}: x = 0 이 m = {pairs[0][0]} 으로 기여")
    return pairs


def split_prime_m(D: int, m: int) -> bool:
    """m 이 F 에서 분해되는 소수인지"""
    return isprime(m) and kronecker(D, m) == 1


def _terms_for_m(
    K: CMField, m: int, x: int, correction: bool, prime_bound: int | None
) -> Iterator[BYTermRecord]:
    D, dtilde = K.D, K.dtilde
    disc = relative_discriminant(K)
    hint = {P.p for P in disc.primes()}
    split_m = split_prime_m(D, m)
    bound = math.isqrt(m * m * dtilde - 1)
    for n in range(-bound, bound + 1):
        if correction and (8 * m + n) % 16:
            continue
        t = (K.field.element(n) + K.sqrt_dtilde * m) / (2 * D)
        t_ideal = ideal_of_element(t, support_hint=hint)
        td = t_ideal * disc
        if not td.is_integral():
            continue
        q = Fraction(m * m * dtilde - n * n, 4 * D)
        if correction and q.denominator != 1:
            continue
        for P, exponent in td:
            if exponent <= 0 or (prime_bound is not None and P.p > prime_bound):
                continue
            # 보정 모드: q 가 p 를 홀수 차수로 나누는 항만 (½(ord_p q + 1) 이 정수)
            if correction and padic_order(q, P.p) % 2 == 0:
                continue
            if splitting_in_K(K, P) == PrimeKind.SPLIT:
                continue
            r = rho(K, td / QuadIdealFactored.prime(P))
            if r == 0:
                continue
            ord_t = t_ideal.exponent(P)
            yield BYTermRecord(
                m=m,
                x=x,
                n=n,
                p=P.p,
                prime=str(P),
                f=P.f,
                ordP_t=ord_t,
                rho_value=r,
                contribution=Fraction((ord_t + 1) * r * P.f),
                outer=Fraction(ord_t + 1, 2),
                alt_outer=Fraction(padic_order(q, P.p) + 1, 2),
                split_prime_m=split_m,
            )


def b_m(K: CMField, m: int, p: int, correction: bool = False) -> Fraction:
    """b_m(p): log p 의 계수 (Galois ½ 적용 전)"""
    x = math.isqrt(max(K.D - 4 * m, 0))
    return sum(
        (term.contribution for term in _terms_for_m(K, m, x, correction, None) if term.p == p),
        Fraction(0),
    )


def predicted_tally(
    K: CMField, prime_bound: int, correction: bool = False
) -> tuple[PrimeTally, list[BYTermRecord]]:
    """
    e_p = ½ Σ_m b_m(p) (p ≤ prime_bound, 0 은 제외)

    Returns:
        (PrimeTally, 기여한 항 목록)
    """
    totals: dict[int, Fraction] = defaultdict(Fraction)
    terms: list[BYTermRecord] = []
    for m, x in enumerate_m(K.D):
        for term in _terms_for_m(K, m, x, correction, prime_bound):
            logger.debug(
                f"m={m} n={term.n} {term.prime}: ord={term.ordP_t} rho={term.rho_value} "
                f"f={term.f} -> {term.contribution}"
            )
            totals[term.p] += term.contribution
            terms.append(term)
    tally = PrimeTally.from_mapping({p: e / 2 for p, e in totals.items()})
    return tally, terms


def supported_by_norm(term: BYTermRecord, K: CMField) -> bool:
    """항의 소수 p 가 (m²D̃ − n²)/(4D) 를 나누는지"""
    q = Fraction(term.m * term.m * K.dtilde - term.n * term.n, 4 * K.D)
    return padic_order(q, term.p) > 0


@dataclass(frozen=True)
class RenderGroup:
    p: int
    outer: Fraction
    inner: int


def group_terms(terms: list[BYTermRecord]) -> list[RenderGroup]:
    """
    (p, outer) 별로 inner = Σ ρ·f 를 모은다

    outer = (ord_𝔭 t + 1)/2 가 Galois ½ 를 이미 포함하므로 Σ outer·inner = e_p.
    """
    inner: dict[tuple[int, Fraction], int] = defaultdict(int)
    for term in terms:
        inner[(term.p, term.outer)] += term.inner
    return [
        RenderGroup(p, outer, total)
        for (p, outer), total in sorted(inner.items())
        if outer != 0 and total != 0
    ]


def render_by_tally(terms: list[BYTermRecord]) -> str:
    """(p^inner)^outer 표기, outer = 1 이면 생략"""
    groups = group_terms(terms)
    if not groups:
        return "1"
    parts = []
    for g in groups:
        if g.outer == 1:
            parts.append(f"{g.p}^{g.inner}")
        else:
            parts.append(f"({g.p}^{g.inner})^{format_exponent(g.outer)}")
    return " ".join(parts)


@dataclass
class ByFormulaResult:
    tally: PrimeTally
    terms: list[BYTermRecord]
    rendered: str
    correction_mod16: bool
    prime_bound: int


class ByFormulaService(BaseService):
    """Bruinier-Yang 예측 tally 계산 서비스"""

    def __init__(self, max_prime: int | None = None, correction_mod16: bool | None = None):
        super().__init__(max_prime)
        self.correction_mod16 = (
            correction_mod16 if correction_mod16 is not None else settings.correction_mod16
        )

    def predict(self, K: CMField) -> ByFormulaResult:
        try:
            logger.info(
                f"{K.label()}: BY tally 계산 시작 (p ≤ {self.max_prime}, "
                f"mod16 보정={self.correction_mod16})"
            )
            tally, terms = predicted_tally(K, self.max_prime, self.correction_mod16)
            unsupported = [t for t in terms if not supported_by_norm(t, K)]
            if unsupported:
                logger.warning(
                    f"{K.label()}: {len(unsupported)}개 항이 (m²D̃ − n²)/(4D) 의 소인수 밖에 있음"
                )
            rendered = render_by_tally(terms)
            logger.info(f"{K.label()}: BY tally = {tally.render()} ({len(terms)}개 항)")
            return ByFormulaResult(
                tally=tally,
                terms=terms,
                rendered=rendered,
                correction_mod16=self.correction_mod16,
                prime_bound=self.max_prime,
            )
        except Exception as e:
            self._handle_exception("computing the Bruinier-Yang tally", e)
