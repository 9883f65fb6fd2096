# coding=utf-8
#
# vtwin 包初始化
# 导入 top 模块以确保控制台配置生效
#

from . import top  # noqa: F401
