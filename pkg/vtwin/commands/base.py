# coding=utf-8
#
# base.py
# 子命令基类
#

from __future__ import annotations  # 启用延迟注解解析

import argparse

from ..context import Context as CommandContext

EXIT_CLEAN = 0
EXIT_DIVERGED = 1
EXIT_ERROR = 2


class CommandBase:
    """One subcommand. ``name`` is the word typed after ``vtwin``."""

    name: str = ""
    summary: str = ""
    description: str = ""

    def __init__(self, context: CommandContext):
        self.context = context
        self.console = context.console
        self.config = context.config

    async def do_command_async(self) -> int:
        """
        Execute command
        Returns: exit code, 0 clean, 1 divergence or non-convergence
        Raises: any operational error; the entry point maps it to exit code 2
        """
        raise NotImplementedError("Subclasses must implement do_command_async method")

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Subcommand-specific flags; the shared flags are added by the entry point."""
