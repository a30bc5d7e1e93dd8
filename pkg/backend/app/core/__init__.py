# 설정, 예외, 로깅
