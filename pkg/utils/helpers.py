"""
Helper utility functions for report formatting
"""
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Union


def format_ratio(value: Optional[Union[Fraction, int]]) -> str:
    """Exact ratio as ``p`` or ``p/q``; ``-`` when undefined"""
    if value is None:
        return "-"
    return str(Fraction(value))


def format_large_number(number: Union[int, float]) -> str:
    """Format large numbers with K, M, B suffixes"""
    try:
        if abs(number) >= 1_000_000_000:
            return f"{number / 1_000_000_000:.2f}B"
        elif abs(number) >= 1_000_000:
            return f"{number / 1_000_000:.2f}M"
        elif abs(number) >= 1_000:
            return f"{number / 1_000:.2f}K"
        else:
            return f"{number:.0f}" if isinstance(number, int) else f"{number:.2f}"
    except (TypeError, ValueError):
        return "N/A"


def format_rate(value: Optional[float], decimals: int = 4) -> str:
    if value is None:
        return "-"
    return f"{value:.{decimals}f}"


def fixed_width_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Left-aligned columns padded to the widest cell; trailing spaces stripped"""
    cells: List[List[str]] = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(c.ljust(widths[j]) for j, c in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
