"""
𝒪_K ↪ End(E × E′) 임베딩 개수 (곱 편극의 Rosati 가 복소켤레가 되는 것)

E × E′ 의 자기준동형환은 사원수 블록 [[𝒪, I], [I⁻¹, 𝒪′]] 로 표현하고, ω, η 의
상 Λ₁, Λ₂ 를 찾는다. 탐색 구조는 s₁₁ → n → (s₁₂, t₁₁, t₁₂) 순서이며, 노름과
대각합은 닫힌 식으로 미리 정한다.
"""

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from tqdm import tqdm

from app.core.config import settings
from app.core.exceptions import NonIntegralCount
from app.models.cmfield import CMField, galois_generator
from app.models.quadfield import prime_factors
from app.models.quatalg import (
    QuatElem,
    QuatLattice,
    QuatMatrix,
    build_Bp,
    elements_of_norm,
    fixed_norm_and_trace,
    ideal_norm,
    inverse_ideal,
    left_ideal_classes,
    maximal_order,
    right_order,
    unit_group,
)
from app.schemas.embedding import EmbeddingPrimeResult, EndRingSummary
from app.schemas.tally import PrimeTally
from app.services.base_service import BaseService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EndRing:
    """(𝒪, I, 𝒪′) 와 I = 𝒪γ 일 때의 γ"""

    p: int
    order: QuatLattice
    ideal: QuatLattice
    right: QuatLattice
    generator: QuatElem | None = None

    @property
    def norm(self) -> Fraction:
        return ideal_norm(self.ideal)

    @property
    def coincident(self) -> bool:
        return self.generator is not None


@dataclass(frozen=True)
class EmbeddingSolution:
    lambda1: QuatMatrix
    lambda2: QuatMatrix

    def sort_key(self) -> tuple[Fraction, ...]:
        return self.lambda1.sort_key() + self.lambda2.sort_key()

    def __str__(self) -> str:
        return f"Lambda1 = {self.lambda1}; Lambda2 = {self.lambda2}"


def rosati(M: QuatMatrix, NI: Fraction) -> QuatMatrix:
    """[[x, y], [z, w]] ↦ [[x^∨, z^∨·N(I)], [y^∨/N(I), w^∨]]"""
    return QuatMatrix(
        M.m11.conjugate(),
        M.m21.conjugate() * NI,
        M.m12.conjugate() / NI,
        M.m22.conjugate(),
    )


@lru_cache(maxsize=None)
def all_end_rings(p: int, ell: int | None = None) -> tuple[EndRing, ...]:
    """
    순서쌍 (E, E′) 마다 하나의 (𝒪, I, 𝒪′)

    극대 order 는 build_Bp 의 왼쪽 이데알 류들의 오른쪽 order 로 잡고, 각 order 의
    왼쪽 이데알 류 대표마다 삼중쌍을 만든다. 류 대표의 첫 원소는 order 자신이다.
    """
    if ell is None:
        ell = settings.neighbor_prime
    O = maximal_order(build_Bp(p))
    orders = [right_order(I) for I in left_ideal_classes(O, ell)]
    rings = []
    for O1 in orders:
        for I in left_ideal_classes(O1, ell):
            gamma = O1.algebra.scalar(1) if I == O1 else None
            rings.append(EndRing(p, O1, I, right_order(I), gamma))
    logger.info(f"p={p}: 류수 {len(orders)}, EndRing 삼중쌍 {len(rings)}개")
    return tuple(rings)


def twist_end_ring(R: EndRing, gamma: QuatElem) -> EndRing:
    """I 를 Iγ 로, 𝒪′ 를 γ⁻¹𝒪′γ 로 바꾼 같은 (E, E′) 의 표현"""
    gamma_inv = gamma.inverse()
    ideal = R.ideal.right_multiply(gamma)
    right = QuatLattice.from_generators(
        R.right.algebra, [gamma_inv * x * gamma for x in R.right.elements]
    )
    generator = R.generator * gamma if R.generator is not None else None
    return EndRing(R.p, R.order, ideal, right, generator)


def _s11_range(D: int) -> list[int]:
    """(D − √D)/2 < s₁₁ < (D + √D)/2 인 정수"""
    return [a for a in range(D + 1) if (2 * a - D) ** 2 < D]


def _normx_polynomial(K: CMField, a: int) -> Fraction:
    D = Fraction(K.D)
    alpha0, alpha1, beta0, beta1 = map(Fraction, (K.alpha0, K.alpha1, K.beta0, K.beta1))
    return (
        Fraction(1, 4) * a**2 * D**2 * alpha1**2
        - Fraction(1, 4) * a * D**3 * alpha1**2
        + Fraction(1, 16) * D**4 * alpha1**2
        - Fraction(1, 4) * a**2 * D * alpha1**2
        + Fraction(1, 4) * a * D**2 * alpha1**2
        - Fraction(1, 8) * D**3 * alpha1**2
        + a**2 * D * alpha1 * alpha0
        - a * D**2 * alpha1 * alpha0
        + Fraction(1, 4) * D**3 * alpha1 * alpha0
        + Fraction(1, 16) * D**2 * alpha1**2
        - Fraction(1, 4) * D**2 * alpha1 * alpha0
        + a**2 * alpha0**2
        - a * D * alpha0**2
        + Fraction(1, 4) * D**2 * alpha0**2
        - 2 * a**2 * D * beta1
        + 2 * a * D**2 * beta1
        - Fraction(1, 2) * D**3 * beta1
        - Fraction(1, 4) * D * alpha0**2
        - 2 * a * D * beta1
        + Fraction(1, 2) * D**2 * beta1
        - 4 * a**2 * beta0
        + 4 * a * D * beta0
        - D**2 * beta0
        - D * beta0
    )


@dataclass(frozen=True)
class _SearchTargets:
    s11: int
    n: int
    norm_s12: Fraction
    norm_t11: Fraction
    trace_t11: Fraction
    norm_t12: Fraction
    norm_t22: Fraction
    trace_t22: Fraction


def _search_targets(K: CMField, R: EndRing) -> Iterator[_SearchTargets]:
    """정수성 관문을 통과한 (s₁₁, n) 과 그 고정 노름·대각합"""
    D, dtilde, NI = K.D, K.dtilde, R.norm
    nw = K.field.omega_norm
    for a in _s11_range(D):
        delta = -a * a + a * D - nw
        m = delta
        trace_t11 = Fraction(K.alpha0 + K.alpha1 * a)
        trace_t22 = Fraction(K.alpha0 + K.alpha1 * (D - a))
        poly = _normx_polynomial(K, a)
        n_bound = math.isqrt(max(m * m * dtilde - 4 * D, 0))
        for n in range(-n_bound, n_bound + 1):
            normx = (n - poly) / (2 * D)
            normu = delta * (K.beta0 + K.beta1 * a) - delta * normx
            tracexuc = K.beta1 * delta - Fraction(D - 2 * a, delta) * normu
            normv = delta**2 * normx + delta * (D - 2 * a) * tracexuc + (D - 2 * a) ** 2 * normu
            norm_t11 = normx
            norm_t12 = normu * NI / delta
            norm_t22 = normv / delta**2
            norm_s12 = NI * delta
            gate = Fraction(m * m * dtilde - n * n, 4 * D * R.p)
            if all(x.denominator == 1 for x in (gate, norm_t11, norm_t12, norm_t22)):
                yield _SearchTargets(
                    a, n, norm_s12, norm_t11, trace_t11, norm_t12, norm_t22, trace_t22
                )


def verify_conditions(K: CMField, sol: EmbeddingSolution, NI: Fraction) -> bool:
    """
    Λ₁Λ₂ = Λ₂Λ₁, Λ₁² − DΛ₁ + (D² − D)/4 = 0,
    Λ₂ + Λ₂^∨ = α₀ + α₁Λ₁, Λ₂Λ₂^∨ = β₀ + β₁Λ₁
    """
    L1, L2 = sol.lambda1, sol.lambda2
    zero = QuatMatrix.scalar(L1.m11.algebra, 0)
    L2_dual = rosati(L2, NI)
    return (
        L1 * L2 == L2 * L1
        and L1 * L1 - L1 * K.D + K.field.omega_norm == zero
        and L2 + L2_dual == K.alpha0 + L1 * K.alpha1
        and L2 * L2_dual == K.beta0 + L1 * K.beta1
    )


def _assert_consequences(K: CMField, sol: EmbeddingSolution, R: EndRing) -> None:
    L1, L2 = sol.lambda1, sol.lambda2
    zero = QuatMatrix.scalar(L1.m11.algebra, 0)
    quadratic = L2 * L2 - (K.alpha0 + L1 * K.alpha1) * L2 + (K.beta0 + L1 * K.beta1)
    assert quadratic == zero, "Lambda2 does not satisfy the minimal polynomial of eta"
    assert inverse_ideal(R.ideal).contains(L2.m21), "t21 is outside I^-1"


def _build_solution(
    K: CMField, R: EndRing, s11: int, s12: QuatElem, t11: QuatElem, t12: QuatElem, t22: QuatElem
) -> EmbeddingSolution:
    B, NI = R.order.algebra, R.norm
    t21 = (s12.conjugate() * K.alpha1 - t12.conjugate()) / NI
    lambda1 = QuatMatrix(B.scalar(s11), s12, s12.conjugate() / NI, B.scalar(K.D - s11))
    lambda2 = QuatMatrix(t11, t12, t21, t22)
    return EmbeddingSolution(lambda1, lambda2)


def _t22_from_commutation(K: CMField, s11: int, s12: QuatElem, t11: QuatElem, t12: QuatElem) -> QuatElem:
    """(Λ₁Λ₂)₁₂ = (Λ₂Λ₁)₁₂ 에서 s₁₂t₂₂ = t₁₁s₁₂ + (D − 2s₁₁)t₁₂"""
    return s12.inverse() * (t11 * s12 + t12 * (K.D - 2 * s11))


def find_solutions(K: CMField, R: EndRing) -> list[EmbeddingSolution]:
    """
    R 안에서 네 조건을 모두 만족하는 (Λ₁, Λ₂)

    t₂₂ 는 교환 조건의 (1,2) 성분으로 정해지므로 고정 노름·대각합 목록과
    대조만 하고, t₂₁ = (α₁s₁₂^∨ − t₁₂^∨)/N(I) 로 둔다. 받아들이기 전에 네 조건을
    그대로 검사한다.
    """
    solutions: list[EmbeddingSolution] = []
    for target in _search_targets(K, R):
        s12_values = elements_of_norm(R.ideal, target.norm_s12)
        t11_values = fixed_norm_and_trace(target.norm_t11, target.trace_t11, R.order)
        t12_values = elements_of_norm(R.ideal, target.norm_t12)
        for s12 in s12_values:
            for t11 in t11_values:
                for t12 in t12_values:
                    t22 = _t22_from_commutation(K, target.s11, s12, t11, t12)
                    if (
                        t22.reduced_norm() != target.norm_t22
                        or t22.reduced_trace() != target.trace_t22
                        or not R.right.contains(t22)
                    ):
                        continue
                    sol = _build_solution(K, R, target.s11, s12, t11, t12, t22)
                    if verify_conditions(K, sol, R.norm):
                        _assert_consequences(K, sol, R)
                        solutions.append(sol)
    logger.debug(f"p={R.p}, N(I)={R.norm}: 해 {len(solutions)}개")
    return solutions


def direct_search(K: CMField, R: EndRing) -> list[EmbeddingSolution]:
    """
    닫힌 노름 식 없이 nrd(t₁₁) + nrd(t₁₂)/N(I) = β₀ + β₁s₁₁ 만으로 찾는 느린 대조용 탐색
    """
    D, NI = K.D, R.norm
    nw = K.field.omega_norm
    solutions: list[EmbeddingSolution] = []
    for s11 in _s11_range(D):
        delta = -s11 * s11 + s11 * D - nw
        total = K.beta0 + K.beta1 * s11
        trace_t11 = K.alpha0 + K.alpha1 * s11
        s12_values = elements_of_norm(R.ideal, NI * delta)
        for n11 in range(max(total, -1) + 1):
            t11_values = fixed_norm_and_trace(n11, trace_t11, R.order)
            if not t11_values:
                continue
            t12_values = elements_of_norm(R.ideal, NI * (total - n11))
            for s12 in s12_values:
                for t11 in t11_values:
                    for t12 in t12_values:
                        t22 = _t22_from_commutation(K, s11, s12, t11, t12)
                        if not R.right.contains(t22):
                            continue
                        sol = _build_solution(K, R, s11, s12, t11, t12, t22)
                        if verify_conditions(K, sol, NI):
                            solutions.append(sol)
    return solutions


def _conjugations(R: EndRing) -> Iterator[tuple[QuatMatrix, QuatMatrix]]:
    """(U, U⁻¹): 대각 diag(r, s), 두 곡선이 같으면 반대각도"""
    for r in unit_group(R.order):
        for s in unit_group(R.right):
            yield QuatMatrix.diagonal(r, s), QuatMatrix.diagonal(r.conjugate(), s.conjugate())
            if R.coincident:
                gamma = R.generator
                gamma_inv = gamma.inverse()
                U = QuatMatrix.antidiagonal(r * gamma, s * gamma_inv)
                U_inv = QuatMatrix.antidiagonal(gamma * s.conjugate(), gamma_inv * r.conjugate())
                yield U, U_inv


def remove_conjugates(solutions: list[EmbeddingSolution], R: EndRing) -> list[EmbeddingSolution]:
    """
    U-켤레와 복소켤레 (Λ₂ ↦ Λ₂^∨) 로 겹치는 해를 지우고 궤도 대표만 남긴다

    해를 좌표 순으로 정렬한 뒤 앞에서부터 대표를 고정하고, 대표의 상 중 자기 자신이
    아닌 것을 뒤쪽 목록에서 지운다.
    """
    NI = R.norm
    remaining = sorted(solutions, key=EmbeddingSolution.sort_key)
    conjugations = list(_conjugations(R))
    n = 0
    while n < len(remaining):
        current = remaining[n]
        L1, L2 = current.lambda1, current.lambda2
        L2_dual = rosati(L2, NI)
        for U, U_inv in conjugations:
            image_l1 = U * L1 * U_inv
            for image in (
                EmbeddingSolution(image_l1, U * L2 * U_inv),
                EmbeddingSolution(image_l1, U * L2_dual * U_inv),
            ):
                if image == current:
                    continue
                try:
                    position = remaining.index(image, n + 1)
                except ValueError:
                    continue
                del remaining[position]
        n += 1
    return remaining


def _galois_image(K: CMField, sol: EmbeddingSolution) -> EmbeddingSolution:
    """ι ↦ ι∘σ: Λ₁ ↦ D − Λ₁, Λ₂ ↦ (c₀ + c₁Λ₁) + (g₀ + g₁Λ₁)Λ₂"""
    (c0, c1), (g0, g1) = galois_generator(K).coefficients()
    L1, L2 = sol.lambda1, sol.lambda2
    return EmbeddingSolution(K.D - L1, (c0 + L1 * c1) + (g0 + L1 * g1) * L2)


def full_automorphism_orbits(K: CMField, solutions: list[EmbeddingSolution], R: EndRing) -> int:
    """U-켤레와 Gal(K/ℚ) (위수 4) 가 생성하는 군의 궤도 수"""
    ordered = sorted(solutions, key=EmbeddingSolution.sort_key)
    index = {sol: i for i, sol in enumerate(ordered)}
    parent = list(range(len(ordered)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    conjugations = list(_conjugations(R))
    for i, sol in enumerate(ordered):
        images = [_galois_image(K, sol)]
        images.extend(
            EmbeddingSolution(U * sol.lambda1 * U_inv, U * sol.lambda2 * U_inv)
            for U, U_inv in conjugations
        )
        for image in images:
            j = index.get(image)
            if j is None:
                logger.debug(f"p={R.p}: 궤도 상이 해 목록에 없음")
                continue
            parent[find(i)] = find(j)
    return len({find(i) for i in range(len(ordered))})


def candidate_primes(K: CMField, bound: int) -> list[int]:
    """어떤 (s₁₁, n) 에 대해 (m²D̃ − n²)/(4D) 를 나누는 p ≤ bound (나머지 p 는 개수 0)"""
    D, dtilde, nw = K.D, K.dtilde, K.field.omega_norm
    primes: set[int] = set()
    for a in _s11_range(D):
        m = -a * a + a * D - nw
        n_bound = math.isqrt(max(m * m * dtilde - 4 * D, 0))
        for n in range(-n_bound, n_bound + 1):
            q = Fraction(m * m * dtilde - n * n, 4 * D)
            if q.denominator == 1 and q != 0:
                primes.update(p for p in prime_factors(q) if p <= bound)
    return sorted(primes)


def _end_ring_weight(R: EndRing, reduced: int) -> Fraction:
    return Fraction(reduced) if R.coincident else Fraction(reduced, 2)


def embedding_count(K: CMField, p: int) -> int:
    """
    동형류로 센 임베딩 수 (순서쌍 중복은 E ≇ E′ 인 삼중쌍을 ½ 로 보정)

    Raises:
        NonIntegralCount: 합이 정수가 아닐 때
    """
    return EmbeddingService(show_progress=False).count(K, p).count


def count_with_full_automorphisms(K: CMField, p: int) -> Fraction:
    """Gal(K/ℚ) 전체로 나눈 궤도 수 (순서쌍 ½ 보정 포함)"""
    total = Fraction(0)
    for R in all_end_rings(p):
        orbits = full_automorphism_orbits(K, find_solutions(K, R), R)
        total += _end_ring_weight(R, orbits)
    return total


def embedding_tally(K: CMField, prime_bound: int, primes: list[int] | None = None) -> PrimeTally:
    """p ≤ prime_bound 의 임베딩 수 (0 은 제외)"""
    service = EmbeddingService(max_prime=prime_bound, show_progress=False)
    return service.tally(K, primes=primes).tally


@dataclass
class EmbeddingTallyResult:
    tally: PrimeTally
    per_prime: list[EmbeddingPrimeResult]
    prime_bound: int


class EmbeddingService(BaseService):
    """임베딩 개수 계산 서비스"""

    def __init__(
        self,
        max_prime: int | None = None,
        show_progress: bool | None = None,
        verbose_orbits: bool = False,
    ):
        super().__init__(max_prime if max_prime is not None else settings.embed_max_prime)
        self.show_progress = show_progress if show_progress is not None else settings.show_progress
        self.verbose_orbits = verbose_orbits

    def count(self, K: CMField, p: int) -> EmbeddingPrimeResult:
        try:
            rings = all_end_rings(p)
            total = Fraction(0)
            summaries: list[EndRingSummary] = []
            representatives: list[str] = []
            full_total = Fraction(0)
            iterator = tqdm(
                list(enumerate(rings)),
                desc=f"{K.label()} p={p}",
                disable=not self.show_progress,
            )
            for i, R in iterator:
                solutions = find_solutions(K, R)
                reduced = remove_conjugates(solutions, R)
                weight = _end_ring_weight(R, len(reduced))
                total += weight
                summaries.append(
                    EndRingSummary(
                        index=i,
                        ideal_norm=R.norm,
                        coincident=R.coincident,
                        solutions=len(solutions),
                        reduced=len(reduced),
                        weight=weight,
                    )
                )
                if self.verbose_orbits:
                    representatives.extend(f"[{i}] {sol}" for sol in reduced)
                    full_total += _end_ring_weight(R, full_automorphism_orbits(K, solutions, R))
            if total.denominator != 1:
                raise NonIntegralCount(f"{K.label()}, p={p}: count {total} is not an integer")
            logger.info(f"{K.label()}: p={p} 임베딩 수 {total}")
            return EmbeddingPrimeResult(
                p=p,
                count=int(total),
                end_rings=summaries,
                full_aut_count=full_total if self.verbose_orbits else None,
                representatives=representatives,
            )
        except Exception as e:
            self._handle_exception(f"counting embeddings at p={p}", e)

    def tally(self, K: CMField, primes: list[int] | None = None) -> EmbeddingTallyResult:
        """
        p ≤ max_prime 에서 임베딩 수 tally

        Args:
            K: CM 체
            primes: 계산할 소수 (None 이면 정수성 관문을 통과하는 후보 소수 전부)
        """
        try:
            if primes is None:
                primes = candidate_primes(K, self.max_prime)
            else:
                primes = [p for p in primes if p <= self.max_prime]
            logger.info(
                f"{K.label()}: 임베딩 tally 계산 시작 (p ≤ {self.max_prime}, 후보 {primes})"
            )
            per_prime = [self.count(K, p) for p in primes]
            tally = PrimeTally.from_mapping({r.p: r.count for r in per_prime})
            logger.info(f"{K.label()}: 임베딩 tally = {tally.render()}")
            return EmbeddingTallyResult(tally=tally, per_prime=per_prime, prime_bound=self.max_prime)
        except Exception as e:
            self._handle_exception("computing the embedding tally", e)
