"""Minimal static SVG polyline charts for the command-line artifacts."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["polyline_chart"]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

_WIDTH = 760
_HEIGHT = 460
_MARGIN_L = 64
_MARGIN_R = 16
_MARGIN_T = 36
_MARGIN_B = 48


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _finite_minmax(arrays) -> tuple[float, float]:
    lo = math.inf
    hi = -math.inf
    for arr in arrays:
        vals = np.asarray(arr, dtype=float)
        vals = vals[np.isfinite(vals)]
        if vals.size:
            lo = min(lo, float(vals.min()))
            hi = max(hi, float(vals.max()))
    if not math.isfinite(lo):
        lo, hi = 0.0, 1.0
    if hi == lo:
        lo -= 0.5
        hi += 0.5
    return lo, hi


def polyline_chart(x, series, labels, title: str, xlabel: str, ylabel: str) -> str:
    """Render series of y-values over a shared x-axis as a standalone SVG string.

    NaN entries split a series into separate polyline segments, so gaps stay gaps.
    """
    x = np.asarray(x, dtype=float)
    xs_lo, xs_hi = _finite_minmax([x])
    ys_lo, ys_hi = _finite_minmax(series)
    pad = 0.05 * (ys_hi - ys_lo)
    ys_lo -= pad
    ys_hi += pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(v: float) -> float:
        return _MARGIN_L + (v - xs_lo) / (xs_hi - xs_lo) * plot_w

    def py(v: float) -> float:
        return _MARGIN_T + (ys_hi - v) / (ys_hi - ys_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]

    for tx in _ticks(xs_lo, xs_hi):
        gx = px(tx)
        out.append(
            f'<line x1="{gx:.2f}" y1="{_MARGIN_T}" x2="{gx:.2f}" '
            f'y2="{_HEIGHT - _MARGIN_B}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{gx:.2f}" y="{_HEIGHT - _MARGIN_B + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tx:.4g}</text>'
        )
    for ty in _ticks(ys_lo, ys_hi):
        gy = py(ty)
        out.append(
            f'<line x1="{_MARGIN_L}" y1="{gy:.2f}" x2="{_WIDTH - _MARGIN_R}" '
            f'y2="{gy:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 6}" y="{gy + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{ty:.4g}</text>'
        )
    out.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )

    for idx, ys in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        ys = np.asarray(ys, dtype=float)
        segment: list[str] = []
        chunks: list[list[str]] = []
        for xv, yv in zip(x, ys):
            if math.isfinite(xv) and math.isfinite(yv):
                segment.append(f"{px(xv):.2f},{py(yv):.2f}")
            elif segment:
                chunks.append(segment)
                segment = []
        if segment:
            chunks.append(segment)
        for seg in chunks:
            if len(seg) >= 2:
                out.append(
                    f'<polyline points="{" ".join(seg)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.5"/>'
                )
        label = labels[idx] if idx < len(labels) else f"series {idx}"
        ly = _MARGIN_T + 16 + 16 * idx
        lx = _WIDTH - _MARGIN_R - 150
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" font-size="11">{label}</text>'
        )

    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{xlabel}</text>'
    )
    out.append(
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.1f})">{ylabel}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
