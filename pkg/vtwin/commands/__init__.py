# coding=utf-8
#
# __init__.py
# Commands package
#

from typing import Optional, Type

from .base import EXIT_CLEAN, EXIT_DIVERGED, EXIT_ERROR, CommandBase, CommandContext
from .fault_commands import FaultCommand
from .repair_commands import RepairCommand
from .run_commands import CampaignCommand, RunCommand
from .score_commands import ScoreCommand
from .stub_commands import StubCommand

def get_command_class_list_async() -> list[Type[CommandBase]]:
    """Get all subcommand classes, in help order"""
    return [
        RunCommand,
        CampaignCommand,
        RepairCommand,
        FaultCommand,
        StubCommand,
        ScoreCommand,
    ]

def get_command_class(name: str) -> Optional[Type[CommandBase]]:
    for one_command in get_command_class_list_async():
        if one_command.name == name:
            return one_command
    return None

async def do_command(context: CommandContext, name: str) -> int:
    """
    Execute the named subcommand
    Returns: exit code
    """
    command_class = get_command_class(name)
    if command_class is None:
        context.notification_display.error(f"Unknown command: {name}")
        return EXIT_ERROR
    return await command_class(context).do_command_async()


__all__ = [
    "EXIT_CLEAN",
    "EXIT_DIVERGED",
    "EXIT_ERROR",
    "CommandBase",
    "CommandContext",
    "do_command",
    "get_command_class",
    "get_command_class_list_async",
    "CampaignCommand",
    "FaultCommand",
    "RepairCommand",
    "RunCommand",
    "ScoreCommand",
    "StubCommand",
]
