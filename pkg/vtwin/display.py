# coding=utf-8
#
# display.py - 运行结果的渲染
#

from typing import Optional, Sequence

from pyfiglet import figlet_format
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from my_isakit.diff import RunReport
from my_isakit.fault import FaultCampaignReport
from my_isakit.scoring import FeedbackReport, FidelityScore, RepairHistory


def render_startup_logo(
    console: Console,
    app_name: str = "vtwin",
    version: str = "",
    subtitle: str = "",
):
    """Banner for long-running entry points (the stub)."""
    title = f"Version: {version}" if version else "Version"
    console.print(
        Panel(
            figlet_format(app_name, font="slant"),
            title=title,
            subtitle=subtitle or None,
            expand=False,
        )
    )


class NotificationRenderer:
    """单行提示：信息、成功、警告、错误"""

    STYLES = {
        "info": "blue",
        "success": "green",
        "warning": "yellow",
        "error": "red bold",
        "dim": "dim",
    }

    def __init__(self, console: Console, err_console: Optional[Console] = None):
        self.console = console
        self.err_console = err_console or console

    def info(self, message: str):
        self.console.print(f"• {message}", style=self.STYLES["info"])

    def success(self, message: str):
        self.console.print(f"✓ {message}", style=self.STYLES["success"])

    def warning(self, message: str):
        self.err_console.print(f"▴ {message}", style=self.STYLES["warning"])

    def error(self, message: str):
        self.err_console.print(f"✗ {message}", style=self.STYLES["error"])

    def dim(self, message: str):
        self.console.print(message, style=self.STYLES["dim"])


class ReportRenderer:
    """运行报告、评分、反馈、活动汇总的表格与面板"""

    MAX_ROWS = 20

    def __init__(self, console: Console):
        self.console = console

    def run_summary(self, report: RunReport, score: Optional[FidelityScore] = None):
        style = "bad" if report.diverged else "good"
        lines = [
            f"[bold]Program[/bold]: {report.program_digest[:16]}",
            f"[bold]Steps[/bold]: {report.step_count} / {report.budget} ({report.mode})",
            f"[bold]Stop[/bold]: {report.stop_reason}",
            f"[bold]Discrepancies[/bold]: [{style}]{len(report.discrepancies)}[/{style}]",
        ]
        if score is not None:
            lines.append(f"[bold]Aggregate score[/bold]: {score.aggregate:.6f}")
        self.console.print(Panel("\n".join(lines), title="Lockstep run", expand=False))
        if report.discrepancies:
            self.discrepancies(report)

    def discrepancies(self, report: RunReport):
        table = Table(title="Discrepancies", show_lines=False)
        for column in ("seq", "pc", "field", "expected", "actual", "class"):
            table.add_column(column)
        for d in report.discrepancies[: self.MAX_ROWS]:
            table.add_row(
                str(d.seq),
                f"0x{d.pc:08x}",
                d.field,
                _value(d.expected),
                _value(d.actual),
                d.category.value,
            )
        self.console.print(table)
        hidden = len(report.discrepancies) - self.MAX_ROWS
        if hidden > 0:
            self.console.print(f"... {hidden} more", style="dim")

    def score(self, score: FidelityScore):
        table = Table(title="Fidelity score")
        table.add_column("dimension")
        table.add_column("value", justify="right")
        for name, value in score.dimensions().items():
            table.add_row(name, f"{value:.6f}")
        table.add_row("[bold]aggregate[/bold]", f"[bold]{score.aggregate:.6f}[/bold]")
        self.console.print(table)

    def feedback(self, feedback: FeedbackReport, limit: int = 5):
        self.console.print(f"[bold]Feedback[/bold]: {feedback.summary}")
        for entry in feedback.entries[:limit]:
            self.console.print(f"  [dim]step {entry.seq}[/dim] {entry.text} [dim]({entry.area})[/dim]")

    def campaign(self, rows: Sequence[dict]):
        table = Table(title="Campaign")
        for column in ("program", "steps", "stop", "discrepancies", "aggregate"):
            table.add_column(column)
        for row in rows[: self.MAX_ROWS]:
            if row.get("error"):
                table.add_row(row["digest"][:16], "-", "error", "-", f"[bad]{row['error']}[/bad]")
                continue
            style = "bad" if row["discrepancies"] else "good"
            table.add_row(
                row["digest"][:16],
                str(row["steps"]),
                row["stop_reason"],
                f"[{style}]{row['discrepancies']}[/{style}]",
                f"{row['aggregate']:.6f}",
            )
        self.console.print(table)

    def repair(self, history: RepairHistory):
        table = Table(title=f"Repair ({history.synthesizer}): {history.stop_reason}")
        for column in ("iter", "version", "knobs", "score", "accepted"):
            table.add_column(column)
        for it in history.iterations:
            table.add_row(
                str(it.iteration),
                str(it.version),
                it.error or (", ".join(it.knobs) or "{}"),
                "-" if it.score is None else f"{it.score:.6f}",
                "✓" if it.accepted else "",
            )
        self.console.print(table)

    def fault_campaign(self, report: FaultCampaignReport):
        table = Table(title=f"Fault campaign: divergence {report.fault_response_divergence:.4f}")
        for column in ("#", "fault", "discrepancies", "stop"):
            table.add_column(column)
        for result in report.results[: self.MAX_ROWS]:
            if result.error is not None:
                table.add_row(str(result.index), result.spec.label(), "-", f"[bad]{result.error}[/bad]")
            else:
                table.add_row(
                    str(result.index),
                    result.spec.label(),
                    str(len(result.report.discrepancies)),
                    result.report.stop_reason,
                )
        self.console.print(table)


def _value(value: int | str) -> str:
    return f"0x{value:08x}" if isinstance(value, int) and value > 1 else str(value)
