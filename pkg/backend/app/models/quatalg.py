"""
정부호 사원수 대수 B_{p,∞} = (a, b) 와 그 격자 (order, 이데알)

i² = a, j² = b, k = ij. 모든 격자는 정수 HNF 로 정규화된 기저를 가지므로
같은 격자는 같은 값 (==, hash) 이 된다.
"""

from __future__ import annotations

import itertools
import logging
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, isprime, legendre_symbol

from app.core.exceptions import InvalidPrime, MassMismatch, NoSolution, SaturationFailure
from app.models.quadfield import padic_order
from app.utils.exactmath import (
    determinant,
    enumerate_fixed_value,
    inverse,
    rational_gcd,
    rational_hnf,
    rational_sqrt,
    solve_linear,
    transpose,
)

logger = logging.getLogger(__name__)

INFINITE_PLACE = "inf"


@dataclass(frozen=True, slots=True)
class QuatAlgebra:
    a: int
    b: int

    def element(self, *coords: Fraction | int) -> QuatElem:
        return QuatElem(self, tuple(Fraction(c) for c in coords))

    def scalar(self, x: Fraction | int) -> QuatElem:
        return self.element(x, 0, 0, 0)

    def standard_basis(self) -> tuple[QuatElem, ...]:
        return tuple(self.element(*(int(i == j) for j in range(4))) for i in range(4))

    def ramified_places(self) -> set[int | str]:
        places: set[int | str] = set()
        for p in sorted(set(factorint(2 * self.a * self.b).keys())):
            if hilbert_symbol(self.a, self.b, p) == -1:
                places.add(p)
        if hilbert_symbol(self.a, self.b, INFINITE_PLACE) == -1:
            places.add(INFINITE_PLACE)
        return places

    def __str__(self) -> str:
        return f"({self.a}, {self.b})"


@dataclass(frozen=True, slots=True)
class QuatElem:
    algebra: QuatAlgebra
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def _coerce(self, other) -> QuatElem:
        if isinstance(other, QuatElem):
            return other
        return self.algebra.scalar(other)

    def __add__(self, other) -> QuatElem:
        o = self._coerce(other)
        return QuatElem(self.algebra, tuple(x + y for x, y in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self) -> QuatElem:
        return QuatElem(self.algebra, tuple(-x for x in self.coords))

    def __sub__(self, other) -> QuatElem:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QuatElem:
        return self._coerce(other) - self

    def __mul__(self, other) -> QuatElem:
        if not isinstance(other, QuatElem):
            s = Fraction(other)
            return QuatElem(self.algebra, tuple(x * s for x in self.coords))
        a, b = self.algebra.a, self.algebra.b
        x0, x1, x2, x3 = self.coords
        y0, y1, y2, y3 = other.coords
        return QuatElem(
            self.algebra,
            (
                x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
                x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
                x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
                x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
            ),
        )

    def __rmul__(self, other) -> QuatElem:
        return self * other

    def __truediv__(self, other) -> QuatElem:
        if isinstance(other, QuatElem):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def __bool__(self) -> bool:
        return any(self.coords)

    def conjugate(self) -> QuatElem:
        x0, x1, x2, x3 = self.coords
        return QuatElem(self.algebra, (x0, -x1, -x2, -x3))

    def reduced_norm(self) -> Fraction:
        a, b = self.algebra.a, self.algebra.b
        x0, x1, x2, x3 = self.coords
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    def reduced_trace(self) -> Fraction:
        return 2 * self.coords[0]

    nrd = reduced_norm
    trd = reduced_trace

    def inverse(self) -> QuatElem:
        n = self.reduced_norm()
        if n == 0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conjugate() * (1 / n)

    def is_integral(self) -> bool:
        return self.reduced_norm().denominator == 1 and self.reduced_trace().denominator == 1

    def sort_key(self) -> tuple[Fraction, ...]:
        return self.coords

    def __str__(self) -> str:
        names = ("", "i", "j", "k")
        parts = [f"{c}{n}" if n else f"{c}" for c, n in zip(self.coords, names) if c]
        return " + ".join(parts) if parts else "0"


def hilbert_symbol(a: int, b: int, p: int | str) -> int:
    """
    힐베르트 기호 (a, b)_p (p 는 소수 또는 "inf")

    홀수 p: (−1)^{αβε(p)} (u/p)^β (v/p)^α, p = 2: ε, ω 지수 공식.
    """
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol of zero")
    if p == INFINITE_PLACE:
        return -1 if a < 0 and b < 0 else 1
    if not isprime(p):
        raise InvalidPrime(f"{p} is not prime")
    alpha, beta = padic_order(a, p), padic_order(b, p)
    u, v = a // p**alpha, b // p**beta
    if p != 2:
        sign = (-1) ** (alpha * beta * ((p - 1) // 2))
        return sign * legendre_symbol(u % p, p) ** beta * legendre_symbol(v % p, p) ** alpha

    def eps(x: int) -> int:
        return ((x - 1) // 2) % 2

    def omg(x: int) -> int:
        return ((x * x - 1) // 8) % 2

    exponent = eps(u) * eps(v) + alpha * omg(v) + beta * omg(u)
    return -1 if exponent % 2 else 1


@lru_cache(maxsize=None)
def build_Bp(p: int) -> QuatAlgebra:
    """
    p 와 ∞ 에서만 분기하는 B = (a, −p), a 는 조건을 만족하는 최대 음의 정수

    p = 2 는 (−1, −1).
    """
    if not isprime(p):
        raise InvalidPrime(f"{p} is not prime")
    if p == 2:
        return QuatAlgebra(-1, -1)
    b, a = -p, -1
    while True:
        if a % p and legendre_symbol(a % p, p) == -1:
            B = QuatAlgebra(a, b)
            if B.ramified_places() - {INFINITE_PLACE} == {p}:
                logger.debug(f"B_{p} = {B}")
                return B
        a -= 1


@dataclass(frozen=True, slots=True)
class QuatLattice:
    """유리 기저 4개로 생성된 완전 계수 격자 (기저는 정규 HNF)"""

    algebra: QuatAlgebra
    basis: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_generators(cls, algebra: QuatAlgebra, gens: Iterable[QuatElem | Sequence[Fraction | int]]) -> QuatLattice:
        rows = [g.coords if isinstance(g, QuatElem) else tuple(Fraction(x) for x in g) for g in gens]
        basis = rational_hnf(rows)
        if len(basis) != 4:
            raise ValueError(f"generators span a rank {len(basis)} lattice, not 4")
        return cls(algebra, basis)

    @property
    def elements(self) -> tuple[QuatElem, ...]:
        return tuple(QuatElem(self.algebra, row) for row in self.basis)

    def combination(self, x: Sequence[int]) -> QuatElem:
        coords = tuple(
            sum((Fraction(x[i]) * self.basis[i][j] for i in range(4)), Fraction(0)) for j in range(4)
        )
        return QuatElem(self.algebra, coords)

    def coordinates(self, x: QuatElem) -> list[Fraction]:
        return solve_linear([list(r) for r in self.basis], list(x.coords))

    def contains(self, x: QuatElem) -> bool:
        return in_ideal(x, self)

    def contains_lattice(self, other: QuatLattice) -> bool:
        return all(self.contains(x) for x in other.elements)

    def volume(self) -> Fraction:
        """기저 행렬식의 절댓값 (표준 좌표 기준)"""
        return abs(determinant([list(r) for r in self.basis]))

    def scale(self, s: Fraction | int) -> QuatLattice:
        return QuatLattice.from_generators(self.algebra, [x * s for x in self.elements])

    def conjugate(self) -> QuatLattice:
        return QuatLattice.from_generators(self.algebra, [x.conjugate() for x in self.elements])

    def left_multiply(self, g: QuatElem) -> QuatLattice:
        return QuatLattice.from_generators(self.algebra, [g * x for x in self.elements])

    def right_multiply(self, g: QuatElem) -> QuatLattice:
        return QuatLattice.from_generators(self.algebra, [x * g for x in self.elements])

    def __mul__(self, other: QuatLattice) -> QuatLattice:
        return QuatLattice.from_generators(
            self.algebra, [x * y for x in self.elements for y in other.elements]
        )

    def __add__(self, other: QuatLattice) -> QuatLattice:
        return QuatLattice.from_generators(self.algebra, self.elements + other.elements)

    def dual(self) -> QuatLattice:
        """표준 좌표 내적에 대한 쌍대 격자"""
        return QuatLattice.from_generators(
            self.algebra, transpose(inverse([list(r) for r in self.basis]))
        )

    def intersection(self, other: QuatLattice) -> QuatLattice:
        return (self.dual() + other.dual()).dual()

    def __str__(self) -> str:
        return "<" + ", ".join(str(x) for x in self.elements) + ">"


@lru_cache(maxsize=None)
def gram_matrix(L: QuatLattice) -> tuple[tuple[Fraction, ...], ...]:
    """G_ij = trd(b_i b̄_j)/2, 즉 nrd(Σ x_i b_i) = x G xᵀ"""
    els = L.elements
    return tuple(tuple((x * y.conjugate()).reduced_trace() / 2 for y in els) for x in els)


def in_ideal(x: QuatElem, L: QuatLattice) -> bool:
    """x 가 L 의 기저에 대해 정수 좌표를 갖는지"""
    try:
        coords = L.coordinates(x)
    except NoSolution:
        return False
    return all(c.denominator == 1 for c in coords)


@lru_cache(maxsize=None)
def elements_of_norm(L: QuatLattice, N: Fraction) -> tuple[QuatElem, ...]:
    N = Fraction(N)
    if N < 0:
        return ()
    return tuple(L.combination(x) for x in enumerate_fixed_value(gram_matrix(L), N))


def fixed_norm_and_trace(N: Fraction | int, T: Fraction | int, L: QuatLattice) -> list[QuatElem]:
    """L 안에서 nrd = N, trd = T 인 원소 전부"""
    N, T = Fraction(N), Fraction(T)
    if N < 0 or T * T > 4 * N:
        return []
    return [x for x in elements_of_norm(L, N) if x.reduced_trace() == T]


def trace_form_discriminant(O: QuatLattice) -> Fraction:
    els = O.elements
    return abs(determinant([[(x * y).reduced_trace() for y in els] for x in els]))


def reduced_discriminant(O: QuatLattice) -> Fraction:
    root = rational_sqrt(trace_form_discriminant(O))
    if root is None:
        raise ValueError("trace form discriminant is not a square")
    return root


def is_order(L: QuatLattice) -> bool:
    one = L.algebra.scalar(1)
    if not L.contains(one):
        return False
    els = L.elements
    return all(L.contains(x * y) for x in els for y in els)


def _is_integral_lattice(L: QuatLattice) -> bool:
    els = L.elements
    if not all(x.is_integral() for x in els):
        return False
    return all((x * y).reduced_trace().denominator == 1 for x in els for y in els)


def _order_closure(algebra: QuatAlgebra, gens: Sequence[QuatElem], max_rounds: int = 32) -> QuatLattice | None:
    """gens 와 1 이 생성하는 환; 정수성이 깨지면 None"""
    L = QuatLattice.from_generators(algebra, [algebra.scalar(1), *gens])
    for _ in range(max_rounds):
        if not _is_integral_lattice(L):
            return None
        els = L.elements
        grown = QuatLattice.from_generators(algebra, list(els) + [x * y for x in els for y in els])
        if grown == L:
            return L
        L = grown
    return None


@lru_cache(maxsize=None)
def maximal_order(B: QuatAlgebra) -> QuatLattice:
    """
    ℤ⟨1, i, j, k⟩ 를 포화시켜 reduced discriminant 가 p 인 극대 order 를 만든다

    Raises:
        SaturationFailure: 확장 원소를 찾지 못했는데 disc_red ≠ p 일 때
    """
    finite = B.ramified_places() - {INFINITE_PLACE}
    target = 1
    for p in finite:
        target *= p
    O = QuatLattice.from_generators(B, B.standard_basis())
    disc = reduced_discriminant(O)
    while disc != target:
        excess = disc / target
        if excess.denominator != 1:
            raise SaturationFailure(f"disc_red {disc} is not a multiple of {target}")
        enlarged = None
        for ell in sorted(factorint(int(excess)).keys()):
            els = O.elements
            for c in itertools.product(range(ell), repeat=4):
                if not any(c):
                    continue
                x = sum((e * ci for e, ci in zip(els, c)), B.scalar(0)) / ell
                if not x.is_integral():
                    continue
                enlarged = _order_closure(B, [*els, x])
                if enlarged is not None and enlarged != O:
                    break
                enlarged = None
            if enlarged is not None:
                break
        if enlarged is None:
            raise SaturationFailure(f"no enlargement of order with disc_red {disc} in {B}")
        O = enlarged
        disc = reduced_discriminant(O)
        logger.debug(f"{B}: order enlarged, disc_red = {disc}")
    return O


def ideal_norm(I: QuatLattice) -> Fraction:
    """N(I) = gcd{nrd(γ) | γ ∈ I} = gcd(G_ii, 2G_ij)"""
    G = gram_matrix(I)
    values = [G[i][i] for i in range(4)] + [2 * G[i][j] for i in range(4) for j in range(i + 1, 4)]
    return rational_gcd(values)


def right_order(I: QuatLattice) -> QuatLattice:
    """{x : Ix ⊆ I} = ∩_i b_i⁻¹ I"""
    result = None
    for b in I.elements:
        piece = I.left_multiply(b.inverse())
        result = piece if result is None else result.intersection(piece)
    return result


def left_order(I: QuatLattice) -> QuatLattice:
    """{x : xI ⊆ I} = ∩_i I b_i⁻¹"""
    result = None
    for b in I.elements:
        piece = I.right_multiply(b.inverse())
        result = piece if result is None else result.intersection(piece)
    return result


def is_left_ideal(I: QuatLattice, O: QuatLattice) -> bool:
    return all(I.contains(x * y) for x in O.elements for y in I.elements)


def inverse_ideal(I: QuatLattice) -> QuatLattice:
    """I⁻¹ = Ī / N(I)"""
    return I.conjugate().scale(1 / ideal_norm(I))


def is_equivalent(I: QuatLattice, J: QuatLattice) -> bool:
    """같은 왼쪽 order 의 이데알 I, J 가 J = Iγ 꼴인지 (ĪJ 에 노름 N(I)N(J) 원소가 있는지)"""
    if I == J:
        return True
    target = ideal_norm(I) * ideal_norm(J)
    product = I.conjugate() * J
    return bool(enumerate_fixed_value(gram_matrix(product), target, limit=1))


@lru_cache(maxsize=None)
def unit_group(O: QuatLattice) -> tuple[QuatElem, ...]:
    """nrd = 1 원소 (trd ∈ {0, ±1, ±2} 로 모든 torsion 단원을 덮음)"""
    units: list[QuatElem] = []
    for T in (0, 1, -1, 2, -2):
        units.extend(fixed_norm_and_trace(1, T, O))
    return tuple(units)


def neighbor_prime(p: int) -> int:
    """p 가 아닌 가장 작은 소수"""
    return 3 if p == 2 else 2


def neighbors(I: QuatLattice, ell: int) -> list[QuatLattice]:
    """
    ℓI ⊂ J ⊂ I, [I:J] = ℓ² 인 왼쪽 이데알 J = ℓI + Iβ 들 (ℓ+1 개)

    β 는 오른쪽 order 의 원소로 ℓ | nrd(β), β ∉ ℓ𝒪_R.
    """
    OR = right_order(I)
    algebra = I.algebra
    ell_I = I.scale(ell)
    found: list[QuatLattice] = []
    els = OR.elements
    for c in itertools.product(range(ell), repeat=4):
        if not any(c):
            continue
        beta = sum((e * ci for e, ci in zip(els, c)), algebra.scalar(0))
        if beta.reduced_norm() % ell:
            continue
        J = ell_I + I.right_multiply(beta)
        if J.volume() != I.volume() * ell * ell or J in found:
            continue
        found.append(J)
    return found


def class_mass(classes: Iterable[QuatLattice]) -> Fraction:
    """Σ 1/|𝒪_R(I)^× / ±1|"""
    return sum((Fraction(2, len(unit_group(right_order(I)))) for I in classes), Fraction(0))


def eichler_mass(p: int) -> Fraction:
    return Fraction(p - 1, 12)


@lru_cache(maxsize=None)
def left_ideal_classes(O: QuatLattice, ell: int | None = None) -> tuple[QuatLattice, ...]:
    """
    극대 order O 의 왼쪽 이데알 류 대표 (첫 대표는 O 자신)

    ℓ-이웃 닫힘으로 새 류를 찾고, 누적 mass 가 (p−1)/12 가 되면 멈춘다.

    Raises:
        MassMismatch: 닫힘이 끝났는데 mass 가 맞지 않을 때
    """
    finite = O.algebra.ramified_places() - {INFINITE_PLACE}
    (p,) = finite
    if ell is None:
        ell = neighbor_prime(p)
    target = eichler_mass(p)
    classes: list[QuatLattice] = [O]
    mass = class_mass(classes)
    queue = deque([O])
    while mass < target and queue:
        current = queue.popleft()
        for J in neighbors(current, ell):
            if any(is_equivalent(I, J) for I in classes):
                continue
            classes.append(J)
            queue.append(J)
            mass += class_mass([J])
            if mass >= target:
                break
    if mass != target:
        raise MassMismatch(f"p={p}: class mass {mass} != {target}")
    logger.debug(f"p={p}: {len(classes)} left ideal classes")
    return tuple(classes)


@dataclass(frozen=True, slots=True)
class QuatMatrix:
    """B 위의 2×2 행렬 [[m11, m12], [m21, m22]]"""

    m11: QuatElem
    m12: QuatElem
    m21: QuatElem
    m22: QuatElem

    @classmethod
    def scalar(cls, algebra: QuatAlgebra, x: Fraction | int) -> QuatMatrix:
        zero = algebra.scalar(0)
        return cls(algebra.scalar(x), zero, zero, algebra.scalar(x))

    @classmethod
    def diagonal(cls, x: QuatElem, y: QuatElem) -> QuatMatrix:
        zero = x.algebra.scalar(0)
        return cls(x, zero, zero, y)

    @classmethod
    def antidiagonal(cls, x: QuatElem, y: QuatElem) -> QuatMatrix:
        """[[0, x], [y, 0]]"""
        zero = x.algebra.scalar(0)
        return cls(zero, x, y, zero)

    def __add__(self, other) -> QuatMatrix:
        o = self._coerce(other)
        return QuatMatrix(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)

    __radd__ = __add__

    def __neg__(self) -> QuatMatrix:
        return QuatMatrix(-self.m11, -self.m12, -self.m21, -self.m22)

    def __sub__(self, other) -> QuatMatrix:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> QuatMatrix:
        return self._coerce(other) - self

    def _coerce(self, other) -> QuatMatrix:
        if isinstance(other, QuatMatrix):
            return other
        return QuatMatrix.scalar(self.m11.algebra, other)

    def __mul__(self, other) -> QuatMatrix:
        if not isinstance(other, QuatMatrix):
            s = Fraction(other)
            return QuatMatrix(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
        return QuatMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def __rmul__(self, other) -> QuatMatrix:
        return self * other

    def entries(self) -> tuple[QuatElem, QuatElem, QuatElem, QuatElem]:
        return self.m11, self.m12, self.m21, self.m22

    def sort_key(self) -> tuple[Fraction, ...]:
        return tuple(c for e in self.entries() for c in e.coords)

    def __str__(self) -> str:
        return f"[[{self.m11}, {self.m12}], [{self.m21}, {self.m22}]]"
