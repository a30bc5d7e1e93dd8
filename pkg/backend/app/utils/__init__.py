# 정확한 유리수 연산 유틸리티
