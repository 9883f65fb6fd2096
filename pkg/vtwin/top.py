# coding=utf-8
#
# top.py
# 全局控制台与路径管理
#

import os
from pathlib import Path

from rich.console import Console
from rich.theme import Theme

custom_theme = Theme(
    {
        "info": "dim cyan",
        "system": "dim",
        "warning": "magenta",
        "danger": "bold red",
        "good": "green",
        "bad": "red",
    }
)
console = Console(theme=custom_theme)
# 诊断输出走 stderr
err_console = Console(theme=custom_theme, stderr=True)


DEFAULT_OUT_DIR = "./vtwin-out"
DEFAULT_LISTEN = "127.0.0.1:1234"


def vtwin_dir():
    return os.path.join(Path.home(), ".vtwin")


def vtwin_config_dir():
    config_dir = os.path.join(vtwin_dir(), "config")
    if not os.path.exists(config_dir):
        os.makedirs(config_dir)
    return config_dir
