# coding=utf-8
#
# version.py
# 写入每个产物的 tool_version：源码目录下以 pyproject.toml 为准，否则取安装元数据
#

import re
from functools import lru_cache
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

DISTRIBUTION = "vtwin"
UNKNOWN_VERSION = "unknown"

PYPROJECT = Path(__file__).resolve().parent.parent / "pyproject.toml"
# version key inside the [project] table, up to the next table header
_PROJECT_VERSION = re.compile(r'^\[project\]\s*$(?:(?!^\[).)*?^version\s*=\s*["\']([^"\']+)["\']', re.M | re.S)


def version_from_pyproject(path: Path = PYPROJECT) -> str | None:
    try:
        match = _PROJECT_VERSION.search(path.read_text(encoding="utf-8"))
    except OSError:
        return None
    return match.group(1) if match else None


@lru_cache(maxsize=1)
def get_app_version() -> str:
    local_version = version_from_pyproject()
    if local_version:
        return local_version
    try:
        return version(DISTRIBUTION)
    except PackageNotFoundError:
        return UNKNOWN_VERSION
