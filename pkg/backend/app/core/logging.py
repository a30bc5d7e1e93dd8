import logging

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """
    루트 로거 설정 (CLI 시작 시 한 번 호출)

    Args:
        level: 로그 레벨 이름 ("DEBUG", "INFO", ...)
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        force=True,
    )
