"""Dependency-free SVG line plots (log-log), fixed 800 x 600 viewport."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["svg_line_plot"]

WIDTH, HEIGHT = 800, 600
MARGIN = 70
PALETTE = ["#1b6ca8", "#d1495b", "#2e933c", "#7d5ba6", "#c97b12"]


def _log_range(values):
    finite = [v for v in values if v > 0 and math.isfinite(v)]
    if not finite:
        return -1.0, 1.0
    lo, hi = math.log10(min(finite)), math.log10(max(finite))
    if hi - lo < 1e-9:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def svg_line_plot(series, title="", xlabel="", ylabel=""):
    """Render one polyline per (label, xs, ys) series on log-log axes.

    Nonpositive points are dropped (they have no log image).  Returns the
    SVG document as a string.
    """
    all_x = [x for _, xs, _ in series for x in xs]
    all_y = [y for _, _, ys in series for y in ys]
    x_lo, x_hi = _log_range(all_x)
    y_lo, y_hi = _log_range(all_y)

    def sx(x):
        return MARGIN + (math.log10(x) - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def sy(y):
        return HEIGHT - MARGIN - (math.log10(y) - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2}" y="30" text-anchor="middle" '
            f'font-size="18">{escape(title)}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{WIDTH / 2}" y="{HEIGHT - 20}" text-anchor="middle" '
            f'font-size="14">{escape(xlabel)}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="20" y="{HEIGHT / 2}" text-anchor="middle" font-size="14" '
            f'transform="rotate(-90 20 {HEIGHT / 2})">{escape(ylabel)}</text>'
        )
    for corner, value in ((MARGIN, 10**x_lo), (WIDTH - MARGIN, 10**x_hi)):
        parts.append(
            f'<text x="{corner}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle" '
            f'font-size="11">{value:.3g}</text>'
        )
    for corner, value in ((HEIGHT - MARGIN, 10**y_lo), (MARGIN, 10**y_hi)):
        parts.append(
            f'<text x="{MARGIN - 6}" y="{corner + 4}" text-anchor="end" '
            f'font-size="11">{value:.3g}</text>'
        )

    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        points = " ".join(
            f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
            for x, y in zip(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
            if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y)
        )
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{points}"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN + 4}" y="{MARGIN + 16 * k}" font-size="12" '
            f'fill="{color}">{escape(str(label))}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
