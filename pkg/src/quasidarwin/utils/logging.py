"""Rich logging for long-running numerical workflows."""

import logging
from typing import Self

from rich import box
from rich.console import Console, RenderableType
from rich.live import Live
from rich.logging import RichHandler
from rich.panel import Panel
from rich.spinner import Spinner
from rich.table import Table
from rich.text import Text

__all__ = [
    "RunLogger",
    "configure_logging",
    "console",
    "render_table",
]

# Shared console instance
console = Console()


def configure_logging(level: int = logging.INFO) -> None:
    """Install a single rich handler on the root logger and quieten third-party loggers."""
    handler = RichHandler(
        console=console,
        show_time=True,
        show_path=False,
        rich_tracebacks=True,
        markup=True,
        show_level=False,
    )
    handler.setFormatter(logging.Formatter("%(message)s"))

    root = logging.getLogger()
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(level)

    for name in ["asyncio", "anyio", "numba", "matplotlib"]:
        logging.getLogger(name).setLevel(logging.WARNING)


def render_table(title: str, columns: list[str], rows: list[list[str]], *, caption: str | None = None) -> Panel:
    """Build a bordered rich table inside a titled panel."""
    table = Table(box=box.SIMPLE_HEAVY, show_edge=False, caption=caption)
    for i, column in enumerate(columns):
        table.add_column(column, justify="left" if i == 0 else "right", style="cyan" if i == 0 else None)
    for row in rows:
        table.add_row(*row)
    return Panel(table, title=f"[bold]{title}[/]", title_align="left", border_style="cyan", expand=False)


class RunLogger:
    """Console logger for one CLI workflow.

    Prints a start rule, keeps a spinner with the number of completed work units
    while the workflow runs, and prints a completion (or error) rule on exit.

    Usage:
        with RunLogger("sweep", total=4) as run:
            for k in range(4):
                ...
                run.on_step(k + 1)
    """

    def __init__(
        self,
        name: str,
        *,
        total: int | None = None,
        show_spinner: bool = True,
        level: int = logging.INFO,
    ) -> None:
        """Initialize the run logger.

        Args:
            name: Workflow name shown in the start/finish rules
            total: Number of work units, if known
            show_spinner: Whether to show a live spinner while running
            level: Console level for the helper methods
        """
        self.name = name
        self.total = total
        self._show_spinner = show_spinner
        self._level = level
        self._done = 0
        self._live: Live | None = None

    def _make_spinner_text(self) -> Text:
        text = Text()
        text.append("Running ", style="bold green")
        text.append(self.name, style="bold green")
        text.append("  │  ", style="dim")
        if self.total:
            text.append(f"{self._done}/{self.total}", style="cyan bold")
        else:
            text.append(f"{self._done}", style="cyan bold")
        text.append(" units", style="cyan")
        return text

    def _make_spinner(self) -> Spinner:
        return Spinner("aesthetic", text=self._make_spinner_text(), style="green")

    def __enter__(self) -> Self:
        if self._level <= logging.INFO:
            console.rule(f"[bold cyan]▶ {self.name}[/]", style="cyan")
            console.print()
            if self._show_spinner:
                self._live = Live(self._make_spinner(), console=console, refresh_per_second=10, transient=True)
                self._live.start()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: object,
    ) -> None:
        if self._live:
            self._live.stop()
            self._live = None

        if self._level > logging.INFO and exc_type is None:
            return

        console.print()
        if exc_type is not None:
            console.rule(f"[bold red]✗ {self.name} - Error[/]", style="red")
            console.print(Text(f"Error: {exc_val}", style="red"))
            console.print()
        else:
            console.rule(f"[bold green]✓ {self.name} - Complete[/]", style="green")

    def on_step(self, done: int, total: int | None = None) -> None:
        """Report the number of completed work units."""
        self._done = done
        if total is not None:
            self.total = total
        if self._live:
            self._live.update(self._make_spinner())

    def pause_live(self) -> None:
        """Pause the spinner (before printing large renderables)."""
        if self._live is not None:
            self._live.stop()

    def resume_live(self) -> None:
        """Resume the spinner after `pause_live`."""
        if self._live is not None:
            self._live.start()

    def show(self, renderable: RenderableType) -> None:
        """Print a renderable without tearing the spinner."""
        if self._level > logging.INFO:
            return
        self.pause_live()
        console.print(renderable)
        self.resume_live()

    def info(self, message: str, *args: object) -> None:
        """Log an info message."""
        if self._level <= logging.INFO:
            formatted = message % args if args else message
            console.print(formatted)

    def warning(self, message: str, *args: object) -> None:
        """Log a warning message (yellow style)."""
        if self._level <= logging.WARNING:
            formatted = message % args if args else message
            console.print(f"[yellow]⚠ {formatted}[/]")
