"""Plain-text table rendering shared by the CLI and the golden tests."""

from __future__ import annotations

from typing import Iterable, Sequence


def render_table(columns: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Align values under a header row; two spaces between columns.

    The output is byte-stable: same columns and rows, same text.
    """
    rows = [[str(v) for v in row] for row in rows]
    widths = [len(c) for c in columns]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = []
    for row in [list(columns)] + rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
