"""
fixture 파일 처리기 모듈
"""
