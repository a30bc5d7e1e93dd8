# 사차 CM 체 분모 계산 엔진 패키지
