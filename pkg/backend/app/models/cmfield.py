"""
원시 cyclic 사차 CM 체 K = F(η), 𝒪_K = 𝒪_F[η]

η 의 최소다항식은 X² − (α₀ + α₁ω)X + (β₀ + β₁ω) 이고 그 판별식
δ = τ² − 4ν 가 totally negative 이다. cyclic 체만 다루므로 반사체 K̃, F̃ 는
K, F 와 같다고 본다.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, legendre_symbol

from app.core.exceptions import (
    InconsistentDtilde,
    NotCyclic,
    NotPositive,
    NotPrimitive,
    NotTotallyImaginary,
)
from app.models.quadfield import (
    PrimeKind,
    QuadElem,
    QuadField,
    QuadIdealFactored,
    QuadPrime,
    completion_image,
    ideal_of_element,
    is_totally_positive,
    prime_factors,
    residue_map,
    residue_ring_elements,
    split_type,
    valuation,
)
from app.utils.exactmath import is_square_integer

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class CMField:
    field: QuadField
    alpha0: int
    alpha1: int
    beta0: int
    beta1: int
    surd: tuple[int, int] | None = None
    name: str | None = field(default=None, compare=False)

    @property
    def D(self) -> int:
        return self.field.D

    @property
    def tau(self) -> QuadElem:
        """Tr(η) = α₀ + α₁ω"""
        return self.field.from_basis(self.alpha0, self.alpha1)

    @property
    def nu(self) -> QuadElem:
        """Norm(η) = β₀ + β₁ω"""
        return self.field.from_basis(self.beta0, self.beta1)

    @property
    def delta(self) -> QuadElem:
        """η 의 최소다항식의 판별식 τ² − 4ν"""
        return self.tau * self.tau - 4 * self.nu

    @property
    def dtilde(self) -> int:
        return dtilde_from_generators(self.D, self.alpha0, self.alpha1, self.beta0, self.beta1)

    @property
    def dtilde_cofactor(self) -> int:
        """D̃ = s²·d 인 s (cyclic 이면 √D̃ = s√d ∈ F)"""
        s_sq, rem = divmod(self.dtilde, self.field.d)
        if rem or not is_square_integer(s_sq):
            raise NotCyclic(f"D̃={self.dtilde} is not d={self.field.d} times a square")
        return math.isqrt(s_sq)

    @property
    def sqrt_dtilde(self) -> QuadElem:
        return self.field.sqrt_d() * self.dtilde_cofactor

    def label(self) -> str:
        return self.name or f"K(d={self.field.d}; {self.alpha0},{self.alpha1},{self.beta0},{self.beta1})"


def dtilde_from_generators(D: int, alpha0: int, alpha1: int, beta0: int, beta1: int) -> int:
    """
    D̃ = Norm_{F/ℚ}(δ) 의 닫힌 다항식

    Raises:
        NotPositive: 값이 양수가 아닐 때 (CM 데이터가 아님)
    """
    D, alpha0, alpha1, beta0, beta1 = map(Fraction, (D, alpha0, alpha1, beta0, beta1))
    value = (
        Fraction(1, 16) * D**4 * alpha1**4
        + Fraction(1, 2) * D**3 * alpha0 * alpha1**3
        - Fraction(1, 8) * D**3 * alpha1**4
        - D**3 * alpha1**2 * beta1
        + Fraction(3, 2) * D**2 * alpha0**2 * alpha1**2
        - Fraction(1, 2) * D**2 * alpha0 * alpha1**3
        - 4 * D**2 * alpha0 * alpha1 * beta1
        + Fraction(1, 16) * D**2 * alpha1**4
        - 2 * D**2 * alpha1**2 * beta0
        + D**2 * alpha1**2 * beta1
        + 4 * D**2 * beta1**2
        + 2 * D * alpha0**3 * alpha1
        - Fraction(1, 2) * D * alpha0**2 * alpha1**2
        - 4 * D * alpha0**2 * beta1
        - 8 * D * alpha0 * alpha1 * beta0
        + 4 * D * alpha0 * alpha1 * beta1
        - 2 * D * alpha1**2 * beta0
        + 16 * D * beta0 * beta1
        - 4 * D * beta1**2
        + alpha0**4
        - 8 * alpha0**2 * beta0
        + 16 * beta0**2
    )
    if value <= 0:
        raise NotPositive(f"D̃ polynomial evaluates to {value}")
    if value.denominator != 1:
        raise InconsistentDtilde(f"D̃ polynomial evaluates to non-integer {value}")
    return int(value)


def is_primitive(d: int, a: int, b: int) -> bool:
    """
    ℚ(√(a + b√d)) 가 원시 (biquadratic 이 아님) 인지

    Raises:
        NotTotallyImaginary: a + b√d 가 totally negative 가 아닐 때
    """
    if not (a < 0 and a * a > b * b * d):
        raise NotTotallyImaginary(f"{a} + {b}*sqrt({d}) is not totally negative")
    return not is_square_integer(a * a - b * b * d)


def uniformizer(F: QuadField, P: QuadPrime) -> QuadElem:
    """ord_P(π) = 1 인 작은 정수 원소 π"""
    if P.kind == PrimeKind.INERT:
        return F.element(P.p)
    for size in range(1, 2 * P.p + 2):
        for a in range(-size, size + 1):
            for b in range(-size, size + 1):
                pi = F.from_basis(a, b)
                if pi and valuation(pi, P) == 1:
                    return pi
    raise ValueError(f"no uniformizer found at {P}")


def _unit_part(t: QuadElem, P: QuadPrime) -> QuadElem:
    """
    ord_P(t) 가 짝수일 때 같은 제곱류의 P-단원 정수 원소

    관성이면 t/p^v, 분기면 t·π̄^v/p^v (π̄ 도 P 에 속하므로 지수 0).
    """
    v = valuation(t, P)
    if v % 2:
        raise ValueError("unit part requires an even valuation")
    if P.kind == PrimeKind.INERT:
        return t / (P.p**v)
    if P.kind == PrimeKind.RAMIFIED:
        pi_bar = uniformizer(t.field, P).conjugate()
        return t * pi_bar**v / (P.p**v)
    raise ValueError("split primes use the completion image")


def _split_unit_residue(t: QuadElem, P: QuadPrime, extra: int) -> int:
    """분해 소수에서 ℚ_p 상의 단원 부분을 p^extra 로 나눈 나머지"""
    v = valuation(t, P)
    precision = v + extra
    modulus = P.p**precision
    z = completion_image(t, P, precision)
    c = z.denominator
    z = int(z * c) * pow(c, -1, modulus) % modulus
    return (z // P.p**v) % (P.p**extra)


def _fp2_mul(x: tuple[int, int], y: tuple[int, int], p: int, D: int, nw: int) -> tuple[int, int]:
    # (a + bω)(c + dω), ω² = Dω − nw
    a, b = x
    c, d = y
    return (a * c - b * d * nw) % p, (a * d + b * c + b * d * D) % p


def _fp2_pow(x: tuple[int, int], k: int, p: int, D: int, nw: int) -> tuple[int, int]:
    result = (1, 0)
    while k:
        if k & 1:
            result = _fp2_mul(result, x, p, D, nw)
        x = _fp2_mul(x, x, p, D, nw)
        k >>= 1
    return result


def _is_local_square_odd(t: QuadElem, P: QuadPrime) -> bool:
    """홀수 P 에서 ord_P(t) 짝수인 t 가 잉여체에서 제곱인지 (Euler 판정)"""
    p = P.p
    if P.kind == PrimeKind.SPLIT:
        return legendre_symbol(_split_unit_residue(t, P, 1), p) == 1
    unit = _unit_part(t, P)
    image = residue_map(unit, P)
    if P.kind == PrimeKind.RAMIFIED:
        return legendre_symbol(image, p) == 1
    F = t.field
    return _fp2_pow(image, (p * p - 1) // 2, p, F.D, F.omega_norm) == (1, 0)


def _square_level_at_two(t: QuadElem, P: QuadPrime, e: int) -> int:
    """t ≡ x² (mod P^{2s}) 가 풀리는 최대 s ≤ e"""
    if P.kind == PrimeKind.SPLIT:
        return 1 if _split_unit_residue(t, P, 2) % 4 == 1 else 0
    unit = _unit_part(t, P)
    for s in range(e, 0, -1):
        for x in residue_ring_elements(t.field, P, 2 * s):
            diff = x * x - unit
            if not diff or valuation(diff, P) >= 2 * s:
                return s
    return 0


def local_discriminant_exponent(K: CMField, P: QuadPrime) -> int:
    """d_{K/F} 의 P-지수를 δ 만으로 계산"""
    delta = K.delta
    v = valuation(delta, P)
    if P.p != 2:
        return v % 2
    e = 2 if P.kind == PrimeKind.RAMIFIED else 1
    if v % 2:
        return 2 * e + 1
    return 2 * (e - _square_level_at_two(delta, P, e))


@lru_cache(maxsize=None)
def relative_discriminant(K: CMField) -> QuadIdealFactored:
    """
    상대 판별식 d_{K/F} (국소 계산)

    Raises:
        InconsistentDtilde: 노름이 D̃ 와 다르거나 (δ) 와 다를 때
    """
    exponents: dict[QuadPrime, int] = {}
    for p in sorted(prime_factors(K.delta.norm()) | {2}):
        for P in split_type(K.field, p):
            exp = local_discriminant_exponent(K, P)
            if exp:
                exponents[P] = exp
    disc = QuadIdealFactored.from_mapping(exponents)
    if disc.norm() != K.dtilde:
        raise InconsistentDtilde(
            f"{K.label()}: Norm(d_K/F) = {disc.norm()} but D̃ = {K.dtilde}"
        )
    check_maximality(K, disc)
    logger.debug(f"{K.label()}: d_K/F = {disc}")
    return disc


def check_maximality(K: CMField, disc: QuadIdealFactored | None = None) -> None:
    """
    𝒪_F[η] 가 극대인지 (국소 상대 판별식 = (δ))

    Raises:
        InconsistentDtilde: 어떤 소수에서든 다를 때
    """
    if disc is None:
        disc = relative_discriminant(K)
    principal = ideal_of_element(K.delta, support_hint={2})
    if principal != disc:
        raise InconsistentDtilde(
            f"{K.label()}: O_F[eta] is not maximal, (delta) = {principal} vs d_K/F = {disc}"
        )


def _residue_root_count(K: CMField, P: QuadPrime) -> int:
    """X² − τX + ν 의 𝒪_F/P 근 개수 (Dedekind-Kummer)"""
    p = P.p
    tau, nu = residue_map(K.tau, P), residue_map(K.nu, P)
    if P.kind != PrimeKind.INERT:
        return sum(1 for x in range(p) if (x * x - tau * x + nu) % p == 0)
    D, nw = K.D, K.field.omega_norm
    count = 0
    for a in range(p):
        for b in range(p):
            x = (a, b)
            x2 = _fp2_mul(x, x, p, D, nw)
            tx = _fp2_mul(tau, x, p, D, nw)
            if ((x2[0] - tx[0] + nu[0]) % p, (x2[1] - tx[1] + nu[1]) % p) == (0, 0):
                count += 1
    return count


@lru_cache(maxsize=None)
def splitting_in_K(K: CMField, P: QuadPrime) -> PrimeKind:
    """F 의 소 이데알 P 가 K 에서 분해/관성/분기하는지"""
    if relative_discriminant(K).exponent(P) > 0:
        return PrimeKind.RAMIFIED
    if P.p == 2:
        roots = _residue_root_count(K, P)
        if roots == 1:
            raise InconsistentDtilde(f"{K.label()}: {P} has a double root but is unramified")
        return PrimeKind.SPLIT if roots == 2 else PrimeKind.INERT
    return PrimeKind.SPLIT if _is_local_square_odd(K.delta, P) else PrimeKind.INERT


def rho(K: CMField, a: QuadIdealFactored) -> int:
    """N_{K/F}(𝔄) = 𝔞 인 𝒪_K 이데알 𝔄 의 개수"""
    result = 1
    for P, k in a:
        if k < 0:
            return 0
        kind = splitting_in_K(K, P)
        if kind == PrimeKind.SPLIT:
            result *= k + 1
        elif kind == PrimeKind.INERT:
            if k % 2:
                return 0
    return result


@dataclass(frozen=True, slots=True)
class GaloisAction:
    """Gal(K/ℚ) 생성원 σ: σ(ω) = ω′, σ(η) = c + gη"""

    c: QuadElem
    g: QuadElem

    def coefficients(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """(c, g) 의 (1, ω) 좌표"""
        (c0, c1), (g0, g1) = self.c.to_basis(), self.g.to_basis()
        return (int(c0), int(c1)), (int(g0), int(g1))


def galois_generator(K: CMField) -> GaloisAction:
    """
    σ(√δ) = s√d/√δ 로 정한 Gal(K/ℚ) 의 생성원 (σ² = 복소켤레)

    Raises:
        NotCyclic: c, g 가 𝒪_F 에 없거나 σ² 이 복소켤레가 아닐 때
    """
    delta, tau = K.delta, K.tau
    g = K.sqrt_dtilde / delta
    c = (tau.conjugate() - g * tau) / 2
    if not (g.is_integral() and c.is_integral()):
        raise NotCyclic(f"{K.label()}: sigma(eta) is not in O_F[eta]")
    if g * g.conjugate() != K.field.element(-1) or c.conjugate() + g.conjugate() * c != tau:
        raise NotCyclic(f"{K.label()}: sigma does not square to complex conjugation")
    return GaloisAction(c, g)


def cm_from_surd(
    d: int,
    a: int,
    b: int,
    alpha0: int,
    alpha1: int,
    beta0: int,
    beta1: int,
    name: str | None = None,
) -> CMField:
    """
    K = ℚ(√(a + b√d)) 와 외부에서 계산된 η 데이터로 CMField 를 만들고 검증

    Raises:
        NotPrimitive, NotCyclic, NotTotallyImaginary, NotPositive, InconsistentDtilde
    """
    if not is_primitive(d, a, b):
        raise NotPrimitive(f"a^2 - b^2 d = {a * a - b * b * d} is a square")
    if not is_square_integer(d * (a * a - b * b * d)):
        raise NotCyclic(f"d(a^2 - b^2 d) = {d * (a * a - b * b * d)} is not a square")
    F = QuadField(d)
    K = CMField(F, alpha0, alpha1, beta0, beta1, surd=(a, b), name=name)
    s = K.dtilde_cofactor
    delta = K.delta
    if not is_totally_positive(-delta):
        raise NotTotallyImaginary(f"{K.label()}: delta = {delta} is not totally negative")
    if (delta * F.element(a, b)).sqrt() is None:
        raise InconsistentDtilde(f"{K.label()}: eta does not generate Q(sqrt({a} + {b}*sqrt({d})))")
    relative_discriminant(K)
    logger.info(
        f"{K.label()}: D = {K.D}, D̃ = {K.dtilde} = {dict(factorint(K.dtilde))}, √D̃ = {s}√{d}"
    )
    return K

