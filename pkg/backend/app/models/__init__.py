# 수학 값 타입 패키지
