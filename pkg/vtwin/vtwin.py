# coding=utf-8
#
# vtwin.py
#

import argparse
import asyncio
import logging
import sys
from typing import Any, Optional, Sequence

from my_isakit import log as isakit_log

from . import config
from .commands import EXIT_CLEAN, EXIT_ERROR, do_command, get_command_class_list_async
from .config import ConfigError, resolve_harness_config
from .context import Context
from .display import NotificationRenderer
from .top import console, err_console
from .version import get_app_version

logger = logging.getLogger(__name__)

# 命令行参数名 -> HarnessConfig 字段
OVERRIDE_FIELDS = (
    "reference",
    "candidate",
    "layout",
    "weights",
    "seed",
    "max_steps",
    "max_iters",
    "fail_fast",
    "out_dir",
    "workers",
    "timeout_secs",
    "listen",
    "program",
    "programs_dir",
    "program_count",
    "program_length",
    "load_address",
    "synth",
    "campaign",
    "fault_count",
    "reports",
)


def apply_app_log_level(level: str):
    """Apply log level for app loggers."""
    logging.getLogger("vtwin").setLevel(level)
    isakit_log.configure(level)
    if level == "DEBUG":
        logging.getLogger("asyncio").setLevel(level)


def _address(text: str) -> int:
    return int(text, 0)


def shared_arguments() -> argparse.ArgumentParser:
    """Flags accepted before or after the subcommand; absent flags leave the config alone."""
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parser.add_argument("--config", help="HarnessConfig JSON document")
    parser.add_argument("--out-dir", dest="out_dir", help="Directory for reports and artifacts")
    parser.add_argument("--seed", type=int, help="Seed for generated programs and fault campaigns (default 0)")
    parser.add_argument("--ref", dest="reference", help="Reference endpoint host:port, or 'golden' (default)")
    parser.add_argument("--candidate", help="Candidate config document")
    parser.add_argument("--weights", help="Score weights document")
    parser.add_argument("--fail-fast", dest="fail_fast", action="store_true", help="Stop at the first divergence")
    parser.add_argument("--max-steps", dest="max_steps", type=int, help="Step budget per run (default 1000)")
    parser.add_argument("--max-iters", dest="max_iters", type=int, help="Repair iteration budget (default 10)")
    parser.add_argument("--listen", help="Stub listen endpoint host:port (default 127.0.0.1:1234)")
    parser.add_argument(
        "--log-level",
        dest="log_level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Set log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )
    parser.add_argument("--program", help="Program file: flat binary, or .hex/.txt/.lst listing")
    parser.add_argument("--programs-dir", dest="programs_dir", help="Directory of program files for campaign")
    parser.add_argument("--count", dest="program_count", type=int, help="Number of generated programs")
    parser.add_argument("--length", dest="program_length", type=int, help="Instructions per generated program")
    parser.add_argument("--load-address", dest="load_address", type=_address, help="Load address of binaries")
    parser.add_argument("--layout", help="Register layout document for RSP endpoints")
    parser.add_argument("--synth", help="External synthesizer command (default: builtin)")
    parser.add_argument("--campaign", help="Fault campaign document")
    parser.add_argument("--faults", dest="fault_count", type=int, help="Faults in a generated campaign")
    parser.add_argument("--workers", type=int, help="Concurrent runs (default: logical cores)")
    parser.add_argument("--timeout", dest="timeout_secs", type=float, help="Protocol and synthesizer timeout")
    parser.add_argument("--reports", nargs="+", help="Stored run reports for score")
    return parser


def build_parser() -> argparse.ArgumentParser:
    shared = shared_arguments()
    parser = argparse.ArgumentParser(
        prog="vtwin",
        description="Lockstep differential testing and repair of CPU models.",
        parents=[shared],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {get_app_version()}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    for command_class in get_command_class_list_async():
        sub = subparsers.add_parser(
            command_class.name,
            parents=[shared],
            help=command_class.summary,
            description=command_class.description or command_class.summary,
        )
        command_class.add_arguments(sub)
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    return {name: getattr(args, name) for name in OVERRIDE_FIELDS if hasattr(args, name)}


async def run_main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    apply_app_log_level(getattr(args, "log_level", None) or "INFO")
    notification = NotificationRenderer(console, err_console)

    try:
        harness_config = resolve_harness_config(getattr(args, "config", None), overrides_from_args(args))
    except ConfigError as exc:
        logger.error(f"Invalid configuration: {exc}")
        notification.error(f"Invalid configuration: {exc}")
        return EXIT_ERROR

    context = Context(console=console, config=harness_config, err_console=err_console)
    context.notification_display.dim(
        f"vtwin {get_app_version()} {args.command}: seed {harness_config.seed}, "
        f"reference {harness_config.reference}, out {harness_config.out_dir}"
    )
    try:
        return await do_command(context, args.command)
    except Exception as exc:  # noqa: BLE001
        logger.error(f"{args.command} failed: {type(exc).__name__}: {exc}")
        logger.debug("Traceback", exc_info=True)
        context.notification_display.error(f"{type(exc).__name__}: {exc}")
        return EXIT_ERROR


def main():
    apply_app_log_level("INFO")
    config.load_config()
    try:
        code = asyncio.run(run_main())
    except KeyboardInterrupt:
        # stub 以 Ctrl+C 正常结束
        code = EXIT_CLEAN if "stub" in sys.argv[1:] else EXIT_ERROR
    sys.exit(code)


if __name__ == "__main__":
    main()
