# coding=utf-8
#
# stub_commands.py
# stub：通过 RSP 对外提供候选模型（或 golden）
#

import logging

from my_isakit.candidate import instantiate
from my_isakit.isa import GoldenMachine, Machine, MemoryImage, Program, load_program
from my_isakit.rsp import serve_stub

from ..display import render_startup_logo
from ..version import get_app_version
from .base import EXIT_CLEAN, CommandBase
from .common import load_candidate, load_optional_layout

logger = logging.getLogger(__name__)

BLANK_IMAGE_SIZE = 0x10000


class StubCommand(CommandBase):
    name = "stub"
    summary = "Serve the candidate over the remote serial protocol"
    description = (
        "Listens on --listen until interrupted. The --program image is preloaded; otherwise "
        "a blank 64 KiB image at the load address is served so debuggers can write one."
    )

    def machine(self) -> Machine:
        candidate = load_candidate(self.config)
        machine = GoldenMachine() if candidate.is_golden else instantiate(candidate)
        if self.config.program:
            program = load_program(self.config.program, self.config.load_address)
        else:
            image = MemoryImage(self.config.load_address, bytes(BLANK_IMAGE_SIZE))
            program = Program(image, self.config.load_address, "blank")
        machine.load(program)
        return machine

    async def do_command_async(self) -> int:
        machine = self.machine()
        layout = load_optional_layout(self.config)
        render_startup_logo(
            self.console,
            app_name="vtwin",
            version=get_app_version(),
            subtitle=f"rsp stub on {self.config.listen}",
        )
        self.context.notification_display.info(
            f"Serving {machine.name} on {self.config.listen}, press Ctrl+C to stop"
        )
        await serve_stub(machine, self.config.listen, persist=True, layout=layout)
        return EXIT_CLEAN
