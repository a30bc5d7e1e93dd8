"""
실이차체 F = ℚ(√d) 의 정수론

원소는 x + y√d (x, y 유리수) 로 저장하고, 정수환 기저 (1, ω), ω = (D + √D)/2
와의 변환을 제공한다. 이데알은 항상 소 이데알 지수표 (QuadIdealFactored) 로만
다루므로 생성원 탐색이나 류수 가정이 필요 없다.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, isprime, legendre_symbol, multiplicity, sqrt_mod

from app.core.exceptions import InvalidPrime, ZeroElement

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11: same semantics as the stdlib StrEnum
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__


class PrimeKind(StrEnum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


def padic_order(x: Fraction | int, p: int) -> int:
    """0이 아닌 유리수의 p-진 지수"""
    x = Fraction(x)
    if x == 0:
        raise ZeroElement("p-adic order of zero")
    order = 0
    if x.numerator % p == 0:
        order += multiplicity(p, abs(x.numerator))
    if x.denominator % p == 0:
        order -= multiplicity(p, x.denominator)
    return order


def _padic_order_or_inf(n: int, p: int) -> float:
    return math.inf if n == 0 else padic_order(n, p)


def prime_factors(x: Fraction | int) -> set[int]:
    """유리수의 분자·분모에 나타나는 소수 집합"""
    x = Fraction(x)
    primes: set[int] = set()
    for n in (abs(x.numerator), x.denominator):
        if n > 1:
            primes.update(factorint(n).keys())
    return primes


@dataclass(frozen=True, slots=True)
class QuadField:
    """F = ℚ(√d), d 는 1보다 큰 squarefree 정수"""

    d: int

    def __post_init__(self):
        if self.d <= 1 or any(e > 1 for e in factorint(self.d).values()):
            raise ValueError(f"d={self.d} must be a squarefree integer > 1")

    @property
    def D(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def omega_norm(self) -> int:
        """ω 의 노름 (D² − D)/4"""
        return (self.D * self.D - self.D) // 4

    @property
    def omega(self) -> QuadElem:
        if self.D == self.d:
            return QuadElem(self, Fraction(self.d, 2), Fraction(1, 2))
        return QuadElem(self, Fraction(2 * self.d), Fraction(1))

    def element(self, x: Fraction | int, y: Fraction | int = 0) -> QuadElem:
        return QuadElem(self, Fraction(x), Fraction(y))

    def from_basis(self, a: Fraction | int, b: Fraction | int) -> QuadElem:
        """a + bω"""
        return self.element(a) + self.omega * b

    def sqrt_d(self) -> QuadElem:
        return QuadElem(self, Fraction(0), Fraction(1))


@dataclass(frozen=True, slots=True)
class QuadElem:
    field: QuadField
    x: Fraction
    y: Fraction

    def _coerce(self, other) -> QuadElem:
        if isinstance(other, QuadElem):
            if other.field != self.field:
                raise ValueError("elements of different quadratic fields")
            return other
        return QuadElem(self.field, Fraction(other), Fraction(0))

    def __add__(self, other) -> QuadElem:
        o = self._coerce(other)
        return QuadElem(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self) -> QuadElem:
        return QuadElem(self.field, -self.x, -self.y)

    def __sub__(self, other) -> QuadElem:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QuadElem:
        return self._coerce(other) - self

    def __mul__(self, other) -> QuadElem:
        o = self._coerce(other)
        d = self.field.d
        return QuadElem(
            self.field,
            self.x * o.x + d * self.y * o.y,
            self.x * o.y + self.y * o.x,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> QuadElem:
        o = self._coerce(other)
        n = o.norm()
        if n == 0:
            raise ZeroElement("division by zero in quadratic field")
        return self * o.conjugate() * (1 / n)

    def __rtruediv__(self, other) -> QuadElem:
        return self._coerce(other) / self

    def __pow__(self, k: int) -> QuadElem:
        if k < 0:
            return (1 / self) ** (-k)
        result = self.field.element(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int | Fraction):
            return self.y == 0 and self.x == other
        if isinstance(other, QuadElem):
            return self.field == other.field and self.x == other.x and self.y == other.y
        return NotImplemented

    def __hash__(self) -> int:
        # 유리수 원소는 int, Fraction 과 같은 해시
        if self.y == 0:
            return hash(self.x)
        return hash((self.field.d, self.x, self.y))

    def __bool__(self) -> bool:
        return self.x != 0 or self.y != 0

    def conjugate(self) -> QuadElem:
        return QuadElem(self.field, self.x, -self.y)

    def norm(self) -> Fraction:
        return self.x * self.x - self.field.d * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x

    def to_basis(self) -> tuple[Fraction, Fraction]:
        """(a, b) with self = a + bω"""
        if self.field.D == self.field.d:
            b = 2 * self.y
            return self.x - b * Fraction(self.field.d, 2), b
        b = self.y
        return self.x - 2 * self.field.d * b, b

    def is_integral(self) -> bool:
        a, b = self.to_basis()
        return a.denominator == 1 and b.denominator == 1

    def denominator(self) -> int:
        """self·c 가 𝒪_F 에 들어가는 최소 양의 정수 c"""
        a, b = self.to_basis()
        return math.lcm(a.denominator, b.denominator)

    def is_rational(self) -> bool:
        return self.y == 0

    def sqrt(self) -> QuadElem | None:
        """F 안의 제곱근 (없으면 None)"""
        from app.utils.exactmath import rational_sqrt

        if not self:
            return self
        n = rational_sqrt(self.norm())
        if n is None:
            return None
        # r = u + v√d, r² = self 이면 (2u)² = 2x ± 2N(r)
        for s in (n, -n):
            u_sq = (self.x + s) / 2
            u = rational_sqrt(u_sq)
            if u is None:
                continue
            if u == 0:
                v = rational_sqrt(self.x / self.field.d) if self.y == 0 else None
                if v is not None:
                    candidate = QuadElem(self.field, Fraction(0), v)
                    if candidate * candidate == self:
                        return candidate
                continue
            candidate = QuadElem(self.field, u, self.y / (2 * u))
            if candidate * candidate == self:
                return candidate
        return None

    def __str__(self) -> str:
        if self.y == 0:
            return str(self.x)
        return f"{self.x} + {self.y}*sqrt({self.field.d})"


@dataclass(frozen=True, slots=True, order=True)
class QuadPrime:
    """F 의 소 이데알 (p, 종류, 레이블, 잉여 차수, ω 의 잉여값)"""

    p: int
    label: int
    kind: PrimeKind
    f: int
    omega_residue: int | None = None

    def __str__(self) -> str:
        if self.kind == PrimeKind.SPLIT:
            return f"P{self.p}_{self.label}"
        return f"P{self.p}"


def kronecker(D: int, p: int) -> int:
    """크로네커 기호 (D/p)"""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 == 1 else -1
    if D % p == 0:
        return 0
    return legendre_symbol(D % p, p)


def _omega_roots_mod(F: QuadField, p: int) -> list[int]:
    D, nw = F.D, F.omega_norm
    return [w for w in range(p) if (w * w - D * w + nw) % p == 0]


@lru_cache(maxsize=None)
def split_type(F: QuadField, p: int) -> tuple[QuadPrime, ...]:
    """
    소수 p 위의 F 의 소 이데알들

    분해형은 크로네커 기호 (D/p) 로 정한다. 분해되는 홀수 p 는 r² ≡ D (mod p)
    의 근 r 을 작은 순서로 정렬해 레이블 0, 1 을 주고, 𝔭_label 은
    ω ↦ (D + r)/2 (mod p) 의 핵이다. p = 2 가 분해되면 ω ↦ 0 이 레이블 0 이다.

    Raises:
        InvalidPrime: p 가 소수가 아닐 때
    """
    if not isprime(p):
        raise InvalidPrime(f"{p} is not prime")
    D = F.D
    k = kronecker(D, p)
    if k == -1:
        return (QuadPrime(p, 0, PrimeKind.INERT, 2, None),)
    if k == 0:
        (w,) = _omega_roots_mod(F, p)
        return (QuadPrime(p, 0, PrimeKind.RAMIFIED, 1, w),)
    if p == 2:
        return tuple(
            QuadPrime(2, label, PrimeKind.SPLIT, 1, w)
            for label, w in enumerate(sorted(_omega_roots_mod(F, 2)))
        )
    roots = sorted(sqrt_mod(D % p, p, all_roots=True))
    inv2 = pow(2, -1, p)
    return tuple(
        QuadPrime(p, label, PrimeKind.SPLIT, 1, (D + r) * inv2 % p)
        for label, r in enumerate(roots)
    )


def primes_above(F: QuadField, p: int) -> tuple[QuadPrime, ...]:
    return split_type(F, p)


def omega_lift(F: QuadField, P: QuadPrime, precision: int) -> int:
    """분해 소수 P 에서 ω 의 p-진 상을 p^precision 까지 (Newton/Hensel)"""
    if P.kind != PrimeKind.SPLIT:
        raise ValueError("omega_lift is only defined at split primes")
    p, D, nw = P.p, F.D, F.omega_norm
    w, modulus = P.omega_residue, p
    for _ in range(1, precision):
        modulus *= p
        fw = w * w - D * w + nw
        dfw = 2 * w - D
        w = (w - fw * pow(dfw, -1, modulus)) % modulus
    return w


def completion_image(t: QuadElem, P: QuadPrime, precision: int) -> Fraction:
    """분해 소수 P 에서의 ℚ_p 상 (p^precision 까지 맞춘 유리수 대표)"""
    a, b = t.to_basis()
    w = omega_lift(t.field, P, precision)
    return a + b * w


def residue_map(t: QuadElem, P: QuadPrime) -> int | tuple[int, int]:
    """
    P-정수 원소의 잉여체 𝒪_F/P 로의 상

    Returns:
        F_p 원소 (int) 또는 관성 소수일 때 F_{p²} = F_p[ω] 원소 (a, b)
    """
    p = P.p
    c = t.denominator()
    if c % p == 0:
        raise ValueError(f"{t} is not integral at {P}")
    a, b = (t * c).to_basis()
    c_inv = pow(c, -1, p)
    a, b = int(a) * c_inv % p, int(b) * c_inv % p
    if P.kind == PrimeKind.INERT:
        return a, b
    return (a + b * P.omega_residue) % p


def residue_ring_elements(F: QuadField, P: QuadPrime, k: int) -> Iterator[QuadElem]:
    """𝒪_F/P^k 의 대표원 a + bω (a, b ∈ [0, p^⌈k/e⌉)) 를 나열"""
    e = 2 if P.kind == PrimeKind.RAMIFIED else 1
    bound = P.p ** (-(-k // e))
    for a in range(bound):
        for b in range(bound):
            yield F.from_basis(a, b)


def valuation(t: QuadElem, P: QuadPrime) -> int:
    """
    P-진 값매김 ord_P(t)

    관성·분기 소수는 노름의 p-진 지수로, 분해 소수는 (a + bω)/c 의 내용 지수와
    잉여 대입 a' + b'w ≡ 0 (mod p) 여부로 계산한다.

    Raises:
        ZeroElement: t = 0
    """
    if not t:
        raise ZeroElement("valuation of zero")
    p = P.p
    vn = padic_order(t.norm(), p)
    if P.kind == PrimeKind.INERT:
        return vn // 2
    if P.kind == PrimeKind.RAMIFIED:
        return vn
    c = t.denominator()
    a, b = (t * c).to_basis()
    a, b = int(a), int(b)
    k = int(min(_padic_order_or_inf(a, p), _padic_order_or_inf(b, p)))
    a1, b1 = a // p**k, b // p**k
    v = k
    if (a1 + b1 * P.omega_residue) % p == 0:
        v += padic_order(t.field.from_basis(a1, b1).norm(), p)
    return v - padic_order(c, p)


def is_totally_positive(t: QuadElem) -> bool:
    """x + y√d > 0 이고 x − y√d > 0"""
    return t.x > 0 and t.x * t.x > t.field.d * t.y * t.y


@dataclass(frozen=True, slots=True)
class QuadIdealFactored:
    """소 이데알 → 지수 (분수 이데알이면 음수 허용)"""

    items: tuple[tuple[QuadPrime, int], ...] = ()

    @classmethod
    def from_mapping(cls, mapping: dict[QuadPrime, int] | Iterable[tuple[QuadPrime, int]]) -> QuadIdealFactored:
        pairs = mapping.items() if isinstance(mapping, dict) else mapping
        merged: dict[QuadPrime, int] = {}
        for P, e in pairs:
            merged[P] = merged.get(P, 0) + e
        return cls(tuple(sorted((P, e) for P, e in merged.items() if e != 0)))

    @classmethod
    def prime(cls, P: QuadPrime, exponent: int = 1) -> QuadIdealFactored:
        return cls.from_mapping({P: exponent})

    def as_dict(self) -> dict[QuadPrime, int]:
        return dict(self.items)

    def exponent(self, P: QuadPrime) -> int:
        return self.as_dict().get(P, 0)

    def primes(self) -> list[QuadPrime]:
        return [P for P, _ in self.items]

    def __iter__(self):
        return iter(self.items)

    def __mul__(self, other: QuadIdealFactored) -> QuadIdealFactored:
        return QuadIdealFactored.from_mapping(list(self.items) + list(other.items))

    def inverse(self) -> QuadIdealFactored:
        return QuadIdealFactored.from_mapping([(P, -e) for P, e in self.items])

    def __truediv__(self, other: QuadIdealFactored) -> QuadIdealFactored:
        return self * other.inverse()

    def is_integral(self) -> bool:
        return all(e >= 0 for _, e in self.items)

    def norm(self) -> Fraction:
        result = Fraction(1)
        for P, e in self.items:
            result *= Fraction(P.p) ** (P.f * e)
        return result

    def __str__(self) -> str:
        if not self.items:
            return "(1)"
        return " * ".join(f"{P}^{e}" for P, e in self.items)


def ideal_of_element(t: QuadElem, support_hint: Iterable[int] = ()) -> QuadIdealFactored:
    """
    주 분수 이데알 (t) 의 소인수분해

    노름의 분자·분모, 기저 좌표의 분모에 나타나는 소수와 support_hint 의 소수
    위의 모든 소 이데알에서 값매김을 계산한다.
    """
    if not t:
        raise ZeroElement("ideal of zero")
    candidates = prime_factors(t.norm()) | prime_factors(t.denominator()) | set(support_hint)
    exponents: dict[QuadPrime, int] = {}
    for p in sorted(candidates):
        for P in split_type(t.field, p):
            v = valuation(t, P)
            if v:
                exponents[P] = v
    return QuadIdealFactored.from_mapping(exponents)
