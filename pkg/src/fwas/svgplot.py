"""Minimal native SVG line plots (two polylines and a legend, no deps)."""

from __future__ import annotations

import numpy as np

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 50


def _scale(vals, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return [(out_lo + (v - lo) / span * (out_hi - out_lo)) for v in vals]


def line_plot(series: list[dict], *, title: str = "", xlabel: str = "k",
              ylabel: str = "value", logy: bool = False) -> str:
    """Render polylines; each series is {x, y, label, dash(bool)}.

    Axes cover the full data range of all series.
    """
    xs = np.concatenate([np.asarray(s["x"], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], dtype=float) for s in series])
    if logy:
        ys = np.log10(np.maximum(ys, 1e-300))
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="18" text-anchor="middle">{title}</text>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>',
        f'<text x="{_W / 2}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{_H / 2}" transform="rotate(-90 14 {_H / 2})" '
        f'text-anchor="middle">{ylabel}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        xp = _ML + frac * (_W - _ML - _MR)
        yp = _H - _MB - frac * (_H - _MT - _MB)
        y_txt = f"{10 ** yv:.3g}" if logy else f"{yv:.4g}"
        parts.append(f'<text x="{xp:.1f}" y="{_H - _MB + 16}" text-anchor="middle">{xv:.4g}</text>')
        parts.append(f'<text x="{_ML - 6}" y="{yp + 4:.1f}" text-anchor="end">{y_txt}</text>')

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    for i, s in enumerate(series):
        x = np.asarray(s["x"], dtype=float)
        y = np.asarray(s["y"], dtype=float)
        if logy:
            y = np.log10(np.maximum(y, 1e-300))
        px = _scale(x, x_lo, x_hi, _ML, _W - _MR)
        py = _scale(y, y_lo, y_hi, _H - _MB, _MT)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        dash = ' stroke-dasharray="8 5"' if s.get("dash") else ""
        color = colors[i % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.6"{dash}/>')
        ly = _MT + 16 * (i + 1)
        parts.append(f'<line x1="{_W - _MR - 150}" y1="{ly}" x2="{_W - _MR - 120}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="1.6"{dash}/>')
        parts.append(f'<text x="{_W - _MR - 114}" y="{ly + 4}">{s.get("label", "")}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
