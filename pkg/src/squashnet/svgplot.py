"""Minimal deterministic SVG line plots. No plotting framework, fixed layout."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["line_plot", "PALETTE"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")

_MARGIN_LEFT = 64
_MARGIN_RIGHT = 16
_MARGIN_TOP = 36
_MARGIN_BOTTOM = 46


def _finite(values):
    return [v for v in values if isinstance(v, (int, float)) and math.isfinite(v)]


def _data_range(series, axis):
    vals = []
    for _, xs, ys in series:
        vals.extend(_finite(xs if axis == 0 else ys))
    if not vals:
        return 0.0, 1.0
    lo, hi = min(vals), max(vals)
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.03 * (hi - lo)
    return lo - pad, hi + pad


def line_plot(series, title: str = "", xlabel: str = "", ylabel: str = "",
              width: int = 720, height: int = 440) -> str:
    """Render (label, xs, ys) series as one SVG document string.

    Non-finite y values split the polyline into segments. Output bytes are a
    pure function of the inputs.
    """
    series = [(str(label), list(xs), list(ys)) for label, xs, ys in series]
    x0, x1 = _data_range(series, 0)
    y0, y1 = _data_range(series, 1)
    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x):
        return _MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w

    def sy(y):
        return _MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]

    # gridlines and tick labels
    for i in range(5):
        tx = x0 + (x1 - x0) * i / 4
        px = sx(tx)
        parts.append(
            f'<line x1="{px:.2f}" y1="{_MARGIN_TOP}" x2="{px:.2f}" '
            f'y2="{_MARGIN_TOP + plot_h}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{_MARGIN_TOP + plot_h + 16}" font-size="11" '
            f'font-family="sans-serif" text-anchor="middle">{tx:.4g}</text>'
        )
        ty = y0 + (y1 - y0) * i / 4
        py = sy(ty)
        parts.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{py:.2f}" x2="{_MARGIN_LEFT + plot_w}" '
            f'y2="{py:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{py + 4:.2f}" font-size="11" '
            f'font-family="sans-serif" text-anchor="end">{ty:.4g}</text>'
        )

    parts.append(
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333333" stroke-width="1"/>'
    )

    for idx, (label, xs, ys) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        segment = []
        segments = []
        for x, y in zip(xs, ys):
            if math.isfinite(x) and math.isfinite(y):
                segment.append(f"{sx(x):.2f},{sy(y):.2f}")
            elif segment:
                segments.append(segment)
                segment = []
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                parts.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="{color}"/>')
            else:
                parts.append(
                    f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                    f'points="{" ".join(seg)}"/>'
                )
        ly = _MARGIN_TOP + 14 + 16 * idx
        lx = _MARGIN_LEFT + plot_w - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-size="11" '
            f'font-family="sans-serif">{escape(label)}</text>'
        )

    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="20" font-size="14" font-family="sans-serif" '
            f'text-anchor="middle">{escape(title)}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_MARGIN_LEFT + plot_w / 2:.1f}" y="{height - 10}" font-size="12" '
            f'font-family="sans-serif" text-anchor="middle">{escape(xlabel)}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="14" y="{_MARGIN_TOP + plot_h / 2:.1f}" font-size="12" '
            f'font-family="sans-serif" text-anchor="middle" '
            f'transform="rotate(-90 14 {_MARGIN_TOP + plot_h / 2:.1f})">{escape(ylabel)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
