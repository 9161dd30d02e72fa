"""Minimal deterministic SVG rendering for trajectory plots and heatmaps.

Output depends only on the data passed in (fixed palette, fixed decimal
formatting, no timestamps), so identical inputs give byte-identical files.
"""

from __future__ import annotations

import math

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
_W, _H = 720, 420
_ML, _MR, _MT, _MB = 64, 16, 34, 44


def _num(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _ticks(lo: float, hi: float, target: int = 6):
    """Round tick positions covering [lo, hi]."""
    if not (hi > lo):
        pad = 1.0 if lo == 0 else abs(lo) * 0.1
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mag * mult >= raw:
            step = mag * mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return lo, hi, ticks


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def line_plot(times, series, title="", y_label="") -> str:
    """Line plot of named series sharing one time axis.

    ``series`` is a mapping name -> values; insertion order fixes colors
    and legend order.
    """
    names = list(series)
    all_vals = [v for name in names for v in series[name]]
    xlo, xhi, xticks = _ticks(min(times), max(times))
    ylo, yhi, yticks = _ticks(min(all_vals), max(all_vals))

    def px(x):
        return _ML + (x - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (y - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{_esc(title)}</text>',
    ]
    for t in xticks:
        x = px(t)
        parts.append(f'<line x1="{_num(x)}" y1="{_MT}" x2="{_num(x)}" '
                     f'y2="{_H - _MB}" stroke="#dddddd"/>')
        parts.append(f'<text x="{_num(x)}" y="{_H - _MB + 16}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{t:g}</text>')
    for t in yticks:
        y = py(t)
        parts.append(f'<line x1="{_ML}" y1="{_num(y)}" x2="{_W - _MR}" '
                     f'y2="{_num(y)}" stroke="#dddddd"/>')
        parts.append(f'<text x="{_ML - 6}" y="{_num(y + 4)}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">{t:g}</text>')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>')
    if y_label:
        parts.append(f'<text x="14" y="{_H // 2}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12" transform='
                     f'"rotate(-90 14 {_H // 2})">{_esc(y_label)}</text>')
    parts.append(f'<text x="{_W // 2}" y="{_H - 8}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">time (s)</text>')

    for i, name in enumerate(names):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_num(px(t))},{_num(py(v))}"
                          for t, v in zip(times, series[name]))
        parts.append(f'<polyline points="{points}" fill="none" '
                     f'stroke="{color}" stroke-width="1.2"/>')
        lx = _ML + 10 + i * 110
        parts.append(f'<line x1="{lx}" y1="{_MT + 12}" x2="{lx + 22}" '
                     f'y2="{_MT + 12}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 27}" y="{_MT + 16}" '
                     f'font-family="sans-serif" font-size="11">'
                     f'{_esc(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def confusion_heatmap(percent, class_names, title="") -> str:
    """4x4 heatmap of row percentages with in-cell value labels."""
    n = len(class_names)
    cell, left, top = 86, 120, 70
    w = left + n * cell + 20
    h = top + n * cell + 30
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w // 2}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{_esc(title)}</text>',
        f'<text x="{w // 2}" y="44" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">columns: predicted; '
        f'rows: actual</text>',
    ]
    for a in range(n):
        parts.append(f'<text x="{left - 8}" y="{top + a * cell + cell // 2 + 4}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="12">{_esc(class_names[a])}</text>')
        parts.append(f'<text x="{left + a * cell + cell // 2}" y="{top - 8}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="12">{_esc(class_names[a])}</text>')
        for p in range(n):
            v = float(percent[a][p])
            # white at 0 to steel blue at 100
            frac = max(0.0, min(1.0, v / 100.0))
            r = int(round(255 - frac * (255 - 70)))
            g = int(round(255 - frac * (255 - 130)))
            b = int(round(255 - frac * (255 - 180)))
            x, y = left + p * cell, top + a * cell
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" '
                         f'height="{cell}" fill="rgb({r},{g},{b})" '
                         f'stroke="#888888"/>')
            text_fill = "#000000" if frac < 0.55 else "#ffffff"
            parts.append(f'<text x="{x + cell // 2}" y="{y + cell // 2 + 4}" '
                         f'text-anchor="middle" font-family="sans-serif" '
                         f'font-size="12" fill="{text_fill}">{v:.2f}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
