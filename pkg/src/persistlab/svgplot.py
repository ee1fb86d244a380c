"""Static SVG 1.1 charts written directly, with no plotting dependency.

Plots are a convenience; CSV files are the contract.  Output is fully
deterministic: fixed canvas, fixed palette, floats formatted with %.6g.
"""

from __future__ import annotations

import math
from typing import Sequence

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_VERDICT_COLORS = {
    "CertifiedPersistent": "#2ca02c",
    "EvidenceIncomplete": "#ff7f0e",
    "ExtinctionDetected": "#d62728",
}

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _finite_range(values) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if lo == hi:
        pad = 0.5 * max(abs(lo), 1.0)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_chart(path, series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
               title: str, x_label: str, y_label: str) -> None:
    """Write a polyline chart; ``series`` is a list of (name, xs, ys)."""
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = _finite_range(all_x)
    y_lo, y_hi = _finite_range(all_y)

    def sx(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(y: float) -> float:
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
    ]
    for tx in _ticks(x_lo, x_hi):
        px = sx(tx)
        parts.append(f'<line x1="{_fmt(px)}" y1="{_MT}" x2="{_fmt(px)}" y2="{_H - _MB}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{_H - _MB + 18}" text-anchor="middle" '
                     f'font-size="11" font-family="sans-serif">{_fmt(tx)}</text>')
    for ty in _ticks(y_lo, y_hi):
        py = sy(ty)
        parts.append(f'<line x1="{_ML}" y1="{_fmt(py)}" x2="{_W - _MR}" y2="{_fmt(py)}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{_ML - 6}" y="{_fmt(py + 4)}" text-anchor="end" '
                     f'font-size="11" font-family="sans-serif">{_fmt(ty)}</text>')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>')
    parts.append(f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif">{x_label}</text>')
    parts.append(f'<text x="16" y="{_H // 2}" text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif" transform="rotate(-90 16 {_H // 2})">{y_label}</text>')
    for i, (name, xs, ys) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(xs, ys)
                          if math.isfinite(x) and math.isfinite(y))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        parts.append(f'<text x="{_W - _MR - 8}" y="{_MT + 16 + 14 * i}" text-anchor="end" '
                     f'font-size="12" font-family="sans-serif" fill="{color}">{name}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def verdict_grid(path, x_values: Sequence[float], y_values: Sequence[float],
                 verdicts: Sequence[str], title: str, x_label: str, y_label: str) -> None:
    """Colored cell grid for a two-parameter sweep, one cell per verdict."""
    nx, ny = len(x_values), len(y_values)
    cw = (_W - _ML - _MR) / nx
    ch = (_H - _MT - _MB) / ny
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
    ]
    for idx, verdict in enumerate(verdicts):
        ix, iy = divmod(idx, ny)
        color = _VERDICT_COLORS.get(verdict, "#999999")
        px = _ML + ix * cw
        py = _H - _MB - (iy + 1) * ch
        parts.append(f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{_fmt(cw)}" '
                     f'height="{_fmt(ch)}" fill="{color}" stroke="white" stroke-width="0.5"/>')
    for i in (0, nx - 1):
        px = _ML + (i + 0.5) * cw
        parts.append(f'<text x="{_fmt(px)}" y="{_H - _MB + 18}" text-anchor="middle" '
                     f'font-size="11" font-family="sans-serif">{_fmt(x_values[i])}</text>')
    for j in (0, ny - 1):
        py = _H - _MB - (j + 0.5) * ch
        parts.append(f'<text x="{_ML - 6}" y="{_fmt(py + 4)}" text-anchor="end" '
                     f'font-size="11" font-family="sans-serif">{_fmt(y_values[j])}</text>')
    parts.append(f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif">{x_label}</text>')
    parts.append(f'<text x="16" y="{_H // 2}" text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif" transform="rotate(-90 16 {_H // 2})">{y_label}</text>')
    legend_y = _MT + 4
    for i, (verdict, color) in enumerate(_VERDICT_COLORS.items()):
        parts.append(f'<rect x="{_W - _MR - 190}" y="{legend_y + 16 * i - 9}" width="10" '
                     f'height="10" fill="{color}"/>')
        parts.append(f'<text x="{_W - _MR - 176}" y="{legend_y + 16 * i}" font-size="11" '
                     f'font-family="sans-serif">{verdict}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
