# coding=utf-8
#
# my_isakit 包的日志配置
# 单个 StreamHandler 挂在 "my_isakit" 上；RSP 包收发与锁步细节在 DEBUG 级别输出
#

import logging
from typing import IO, Optional

LOGGER_NAME = "my_isakit"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure(level: int | str = logging.INFO, stream: Optional[IO[str]] = None) -> logging.Logger:
    """Attach the kit handler on first call; later calls only change the level."""
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    logger.propagate = False
    if not logger.handlers:
        handler = logging.StreamHandler(stream)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    return logger


configure()
