import platform
import sys
from typing import Any, Optional, Sequence

import colorama
import pandas as pd
from rich.console import Console as RichConsole
from rich.table import Table

from ..logger import get_logger

logger = get_logger()

_global_console: Optional["Console"] = None

# Windows consoles cannot always render these glyphs
IS_WINDOWS = platform.system() == "Windows"
SYMBOLS = {
    "success": "[OK]" if IS_WINDOWS else "✓",
    "error": "[X]" if IS_WINDOWS else "✗",
    "warning": "[!]" if IS_WINDOWS else "⚠",
    "info": "[i]" if IS_WINDOWS else "ℹ",
}
RICH_STYLES = {"success": "bold green", "error": "bold red", "warning": "bold yellow", "info": "bold blue"}
COLORAMA_STYLES = {
    "success": colorama.Fore.GREEN,
    "error": colorama.Fore.RED,
    "warning": colorama.Fore.YELLOW,
    "info": colorama.Fore.BLUE,
}


class Console:
    """Status lines and result tables, through rich when enabled and plain
    colorama-colored text otherwise."""

    def __init__(self, use_colors: bool = True, use_rich: bool = True) -> None:
        self.use_colors = use_colors
        self._rich = RichConsole() if use_rich else None
        if use_colors and self._rich is None:
            colorama.init(autoreset=True)
        logger.trace("Console initialized (rich=%s, colors=%s)", self._rich is not None, use_colors)

    def print(self, message: str, style: Optional[str] = None) -> None:
        if self._rich is not None:
            self._rich.print(message, style=style)
        else:
            print(message)

    def _status(self, kind: str, message: str) -> None:
        line = f"{SYMBOLS[kind]} {message}"
        stream = sys.stderr if kind == "error" else sys.stdout
        if self._rich is not None:
            self._rich.print(line, style=RICH_STYLES[kind])
        elif self.use_colors:
            print(f"{COLORAMA_STYLES[kind]}{line}{colorama.Style.RESET_ALL}", file=stream)
        else:
            print(line, file=stream)

    def print_success(self, message: str) -> None:
        self._status("success", message)

    def print_error(self, message: str) -> None:
        self._status("error", message)

    def print_warning(self, message: str) -> None:
        self._status("warning", message)

    def print_info(self, message: str) -> None:
        self._status("info", message)

    def print_table(self, headers: Sequence[str], rows: Sequence[Sequence[Any]], title: Optional[str] = None) -> None:
        cells = [[_cell(value) for value in row] for row in rows]
        if self._rich is not None:
            table = Table(title=title)
            for header in headers:
                table.add_column(str(header), style="cyan")
            for row in cells:
                table.add_row(*row)
            self._rich.print(table)
            return

        widths = [max([len(str(h))] + [len(row[i]) for row in cells]) for i, h in enumerate(headers)]
        if title:
            print(title)
        print("  ".join(str(h).ljust(w) for h, w in zip(headers, widths)))
        print("  ".join("-" * w for w in widths))
        for row in cells:
            print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))

    def print_frame(self, frame: pd.DataFrame, title: Optional[str] = None) -> None:
        self.print_table(list(frame.columns), list(frame.itertuples(index=False, name=None)), title)


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return "" if value != value else f"{value:.3f}"
    return "" if value is None else str(value)


def get_console() -> Console:
    global _global_console

    if _global_console is None:
        _global_console = Console()

    return _global_console


__all__ = ["Console", "get_console"]
