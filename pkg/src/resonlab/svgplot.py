"""Deterministic SVG line charts of action time series.

Hand-rolled emitter: fixed canvas, fixed palette, fixed coordinate
formatting, so a given series always produces byte-identical output.
Actions are drawn on a log10 scale (the display convention for long-time
action plots); exact zeros are clamped to a floor decade.
"""

import math

from .tableio import write_atomic

WIDTH, HEIGHT = 880, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 160, 20, 45
LOG_FLOOR = -18.0

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")


class PlotError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def emit_plot(series, modes, path=None) -> str:
    """SVG with one polyline per requested action-pair index.

    `series` is an ActionSeries; `modes` are pair indices into its action
    columns.  Returns the SVG text; writes it atomically when `path` given.
    """
    if series.n_records == 0:
        raise PlotError("cannot plot an empty series")
    half = series.actions.shape[1]
    for m in modes:
        if not 0 <= m < half:
            raise PlotError(f"mode {m} outside recorded range 0..{half - 1}")
    if not modes:
        raise PlotError("no modes requested")

    t = series.times
    t0, t1 = float(t[0]), float(t[-1])
    if t1 == t0:
        t1 = t0 + 1.0

    logs = {}
    lo, hi = math.inf, -math.inf
    for m in modes:
        col = [max(LOG_FLOOR, math.log10(a)) if a > 0 else LOG_FLOOR
               for a in series.actions[:, m]]
        logs[m] = col
        lo = min(lo, min(col))
        hi = max(hi, max(col))
    if hi == lo:
        hi, lo = hi + 0.5, lo - 0.5
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T

    def sx(tv):
        return x0 + (x1 - x0) * (tv - t0) / (t1 - t0)

    def sy(lv):
        return y0 + (y1 - y0) * (lv - lo) / (hi - lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        'fill="none" stroke="#333333" stroke-width="1"/>',
    ]

    # y ticks on integer decades
    first_dec = math.ceil(lo)
    dec = first_dec
    while dec <= hi:
        y = sy(dec)
        parts.append(f'<line x1="{x0}" y1="{_fmt(y)}" x2="{x1}" y2="{_fmt(y)}" '
                     'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{x0 - 8}" y="{_fmt(y + 4)}" font-size="12" '
                     f'text-anchor="end" font-family="sans-serif">1e{dec}</text>')
        dec += 1

    # x ticks
    for i in range(6):
        tv = t0 + (t1 - t0) * i / 5
        x = sx(tv)
        parts.append(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 5}" '
                     'stroke="#333333" stroke-width="1"/>')
        parts.append(f'<text x="{_fmt(x)}" y="{y0 + 20}" font-size="12" '
                     f'text-anchor="middle" font-family="sans-serif">{tv:g}</text>')
    parts.append(f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 8}" font-size="13" '
                 'text-anchor="middle" font-family="sans-serif">t</text>')

    for i, m in enumerate(modes):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(tv))},{_fmt(sy(lv))}"
                       for tv, lv in zip(t, logs[m]))
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN_T + 18 * (i + 1)
        parts.append(f'<line x1="{x1 + 10}" y1="{ly - 4}" x2="{x1 + 34}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{x1 + 40}" y="{ly}" font-size="12" '
                     f'font-family="sans-serif">A_{m}</text>')

    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if path is not None:
        write_atomic(path, text)
    return text
