"""
정확한 유리수 연산 유틸리티 함수들

모든 값은 fractions.Fraction 또는 int 이며 부동소수점은 사용하지 않는다.
벡터는 길이 n 리스트, 행렬은 행 리스트이며 기저 벡터는 행으로 둔다.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from fractions import Fraction

from sympy import QQ, Matrix
from sympy.matrices.normalforms import hermite_normal_form as sympy_hnf
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from app.core.exceptions import NoSolution

Rational = Fraction | int
RationalVector = list[Fraction]
RationalMatrix = list[list[Fraction]]


def to_fraction_vector(v: Iterable[Rational]) -> RationalVector:
    return [Fraction(x) for x in v]


def to_fraction_matrix(A: Iterable[Iterable[Rational]]) -> RationalMatrix:
    return [to_fraction_vector(row) for row in A]


def is_integral(x: Rational) -> bool:
    return Fraction(x).denominator == 1


def lcm_of_denominators(v: Sequence[Rational]) -> int:
    """
    모든 성분을 정수로 만드는 최소 양의 정수

    Args:
        v: 유리수 리스트 (비어 있지 않음)

    Returns:
        int: lcm(분모들)
    """
    return math.lcm(*(Fraction(x).denominator for x in v))


def rational_gcd(values: Iterable[Rational]) -> Fraction:
    """유리수들의 gcd (모두 0이면 0)"""
    values = [Fraction(x) for x in values]
    if not values:
        return Fraction(0)
    scale = lcm_of_denominators(values)
    g = math.gcd(*(int(x * scale) for x in values))
    return Fraction(g, scale)


def floor_sqrt(q: Rational) -> int:
    """
    유리수 q ≥ 0 에 대해 floor(√q) 를 정확히 계산

    floor(√(a/b)) = floor(isqrt(a·b) / b)
    """
    q = Fraction(q)
    if q < 0:
        raise ValueError("floor_sqrt of a negative rational")
    return math.isqrt(q.numerator * q.denominator) // q.denominator


def rational_sqrt(q: Rational) -> Fraction | None:
    """q 가 유리수의 제곱이면 음이 아닌 제곱근, 아니면 None"""
    q = Fraction(q)
    if q < 0:
        return None
    rn = math.isqrt(q.numerator)
    rd = math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def is_square_integer(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def dot(u: Sequence[Rational], v: Sequence[Rational]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def vec_mat(v: Sequence[Rational], A: Sequence[Sequence[Rational]]) -> RationalVector:
    """행 벡터 v 와 행렬 A 의 곱 vA"""
    n = len(A[0])
    return [sum((Fraction(v[i]) * A[i][j] for i in range(len(A))), Fraction(0)) for j in range(n)]


def mat_mul(A: Sequence[Sequence[Rational]], B: Sequence[Sequence[Rational]]) -> RationalMatrix:
    return [vec_mat(row, B) for row in A]


def transpose(A: Sequence[Sequence[Rational]]) -> RationalMatrix:
    return [[Fraction(A[i][j]) for i in range(len(A))] for j in range(len(A[0]))]


def quadratic_value(G: Sequence[Sequence[Rational]], x: Sequence[Rational]) -> Fraction:
    """x G xᵀ"""
    return dot(vec_mat(x, G), x)


def _domain_matrix(A: Sequence[Sequence[Rational]]) -> DomainMatrix:
    rows = [[QQ(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in A]
    return DomainMatrix(rows, (len(rows), len(rows[0])), QQ)


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def solve_linear(A: Sequence[Sequence[Rational]], v: Sequence[Rational]) -> RationalVector:
    """
    xA = v 를 만족하는 x 를 구한다 (행 벡터 규약)

    A 의 rank 가 부족하더라도 v 가 행 공간 안에 있으면 자유 변수를 0으로 둔
    해 하나를 돌려준다.

    Args:
        A: 정사각 유리수 행렬 (행 = 기저 벡터)
        v: 목표 벡터

    Returns:
        RationalVector: 해 x

    Raises:
        NoSolution: v 가 A 의 행 공간 밖일 때
    """
    # xA = v  <=>  Aᵀ xᵀ = vᵀ
    n = len(A)
    augmented = [row + [Fraction(b)] for row, b in zip(transpose(A), v)]
    reduced, pivots = _domain_matrix(augmented).rref()
    if n in pivots:
        raise NoSolution(f"vector {list(map(str, v))} is outside the row span")
    rows = reduced.to_list()
    x = [Fraction(0)] * n
    for row, c in zip(rows, pivots):
        x[c] = _to_fraction(row[n])
    return x


def determinant(A: Sequence[Sequence[Rational]]) -> Fraction:
    return _to_fraction(_domain_matrix(A).det())


def inverse(A: Sequence[Sequence[Rational]]) -> RationalMatrix:
    try:
        inv = _domain_matrix(A).inv()
    except DMNonInvertibleMatrixError as e:
        raise ValueError("matrix is singular") from e
    return [[_to_fraction(x) for x in row] for row in inv.to_list()]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """
    정수 행렬의 행 공간에 대한 (상삼각) Hermite 정규형

    생성원이 몇 개든 같은 격자에 대해 같은 기저를 돌려준다. 피벗은 양수이고
    피벗 위의 성분은 [0, 피벗) 범위로 줄인다.

    Args:
        rows: 정수 생성원 (행)

    Returns:
        list[list[int]]: 0이 아닌 HNF 행들
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    n = len(A[0])
    # sympy 는 열 격자의 HNF (피벗이 아래쪽) 를 준다. 좌표를 뒤집어 넘기고
    # 결과 열 순서를 뒤집으면 행 격자의 상삼각 HNF 가 된다.
    A.extend([0] * n for _ in range(n - len(A)))
    columns = Matrix([[row[n - 1 - i] for row in A] for i in range(n)])
    H = sympy_hnf(columns)
    basis = [[int(H[n - 1 - i, j]) for i in range(n)] for j in reversed(range(H.cols))]
    return [row for row in basis if any(row)]


def rational_hnf(rows: Sequence[Sequence[Rational]]) -> tuple[tuple[Fraction, ...], ...]:
    """유리수 생성원 격자의 정규 기저 (공통 분모로 스케일한 정수 HNF)"""
    flat = [Fraction(x) for row in rows for x in row]
    scale = lcm_of_denominators(flat) if flat else 1
    integral = [[int(Fraction(x) * scale) for x in row] for row in rows]
    return tuple(
        tuple(Fraction(x, scale) for x in row) for row in hermite_normal_form(integral)
    )


def _quadratic_completion(G: Sequence[Sequence[Rational]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """
    Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)² 형태의 분해 (Cholesky의 유리수 버전)

    Returns:
        (대각 성분 q_ii, 상삼각 계수 q_ij)
    """
    n = len(G)
    Q = to_fraction_matrix(G)
    for i in range(n):
        if Q[i][i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    diag = [Q[i][i] for i in range(n)]
    upper = [[Q[i][j] if j > i else Fraction(0) for j in range(n)] for i in range(n)]
    return diag, upper


def enumerate_fixed_value(
    G: Sequence[Sequence[Rational]], value: Rational, limit: int | None = None
) -> list[tuple[int, ...]]:
    """
    양의 정부호 형식 G 에 대해 x G xᵀ = value 인 정수 벡터를 모두 나열

    Fincke-Pohst 방식으로 마지막 좌표부터 차례로 범위를 좁히며, 경계 비교는
    모두 정확한 유리수 비교로 한다.

    Args:
        G: 대칭 양의 정부호 유리수 행렬
        value: 목표 값 (음수면 빈 리스트)
        limit: 이 개수만큼 찾으면 중단 (None이면 전부)

    Returns:
        list[tuple[int, ...]]: 사전식으로 정렬된 해
    """
    value = Fraction(value)
    if value < 0:
        return []
    n = len(G)
    diag, upper = _quadratic_completion(G)
    results: list[tuple[int, ...]] = []
    x = [0] * n

    def search(i: int, remaining: Fraction) -> bool:
        if i < 0:
            if remaining == 0:
                results.append(tuple(x))
                return limit is not None and len(results) >= limit
            return False
        center = -sum((upper[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        radius = floor_sqrt(remaining / diag[i])
        lo = math.ceil(center - radius - 1)
        hi = math.floor(center + radius + 1)
        for xi in range(lo, hi + 1):
            term = diag[i] * (xi - center) ** 2
            if term > remaining:
                continue
            x[i] = xi
            if search(i - 1, remaining - term):
                return True
        x[i] = 0
        return False

    search(n - 1, value)
    return sorted(results)
