"""
도메인 예외 계층

모든 예외는 CMDenominatorError(ValueError)를 상속하며, CLI는 이 타입만
한 줄 메시지와 종료 코드 1로 변환한다.
"""


class CMDenominatorError(ValueError):
    """cm-denominators 공통 예외"""


class NoSolution(CMDenominatorError):
    """선형 방정식 xA = v 의 해가 없음 (v가 행 공간 밖)"""


class InvalidPrime(CMDenominatorError):
    """소수가 아닌 입력"""


class ZeroElement(CMDenominatorError):
    """0 원소에 대해 정의되지 않는 연산"""


class NotPositive(CMDenominatorError):
    """D̃ 다항식 값이 양수가 아님 (CM 데이터가 아님)"""


class NotTotallyImaginary(CMDenominatorError):
    """a + b√d 가 totally negative가 아님"""


class InconsistentDtilde(CMDenominatorError):
    """생성원 데이터 (α, β) 와 D̃ / 상대 판별식이 일치하지 않음"""


class NotPrimitive(CMDenominatorError):
    """biquadratic 체 (a² − b²d 가 제곱수)"""


class NotCyclic(CMDenominatorError):
    """cyclic quartic 체가 아님"""


class SaturationFailure(CMDenominatorError):
    """극대 order 포화 과정에서 확장 원소를 찾지 못함"""


class MassMismatch(CMDenominatorError):
    """이데알 류 닫힘이 Eichler mass (p−1)/12 에 도달하지 못함"""


class NonIntegralCount(CMDenominatorError):
    """/2 보정 후 임베딩 개수가 정수가 아님"""


class FixtureError(CMDenominatorError):
    """fixture 파일 형식 오류 또는 알 수 없는 필드 키"""
