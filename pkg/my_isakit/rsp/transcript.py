# coding=utf-8
#
# transcript.py
# 原始帧记录：方向 + 时间戳，追加写入日志文件，也保存在内存中供测试比对
#

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

logger = logging.getLogger(__name__)

Direction = Literal["send", "recv"]


@dataclass(frozen=True)
class TranscriptEntry:
    direction: Direction
    data: bytes
    timestamp: float

    def render(self) -> str:
        arrow = "->" if self.direction == "send" else "<-"
        return f"{self.timestamp:.6f} {arrow} {self.data.decode('latin-1')!r}"


@dataclass
class Transcript:
    path: Optional[Path] = None
    entries: list[TranscriptEntry] = field(default_factory=list)

    def __post_init__(self):
        if self.path is not None:
            self.path = Path(self.path)
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def record(self, direction: Direction, data: bytes) -> None:
        if not data:
            return
        entry = TranscriptEntry(direction, bytes(data), time.time())
        self.entries.append(entry)
        if self.path is not None:
            with self.path.open("a", encoding="utf-8") as f:
                f.write(entry.render() + "\n")

    def sent(self) -> list[bytes]:
        return [e.data for e in self.entries if e.direction == "send"]

    def received(self) -> bytes:
        return b"".join(e.data for e in self.entries if e.direction == "recv")
