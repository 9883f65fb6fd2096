# coding=utf-8
#
# my_isakit 包初始化
# 导入 log 模块以确保日志配置生效
#

from . import log  # noqa: F401
