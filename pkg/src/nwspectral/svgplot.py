"""Self-contained SVG 1.1 line plots.

Deterministic output: fixed canvas, loose nice-number ticks, %-formatted
coordinates, no timestamps. Non-finite samples split a series into
separate polyline runs, so a pole shows as a gap instead of a spike.
"""

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f6f8b", "#c05c2e", "#5e8c3a", "#7a4a8c", "#a23b4f",
           "#3b6ea5", "#8c6d31", "#4b8b8b")

_W, _H = 640.0, 420.0
_ML, _MR, _MT, _MB = 62.0, 16.0, 30.0, 44.0


def _nice_num(x, round_down):
    """Heckbert's nice number: 1, 2, or 5 times a power of ten."""
    if x <= 0.0 or not math.isfinite(x):
        return 1.0
    exp = math.floor(math.log10(x))
    f = x / 10.0 ** exp
    if round_down:
        nf = 1.0 if f < 1.5 else 2.0 if f < 3.0 else 5.0 if f < 7.0 else 10.0
    else:
        nf = 1.0 if f <= 1.0 else 2.0 if f <= 2.0 else 5.0 if f <= 5.0 else 10.0
    return nf * 10.0 ** exp


def _ticks(lo, hi, count=6):
    """Loose tick labeling covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        lo, hi = 0.0, 1.0
    if hi <= lo:
        pad = 1.0 if lo == 0.0 else abs(lo) * 0.5
        lo, hi = lo - pad, hi + pad
    spacing = _nice_num(_nice_num(hi - lo, False) / max(count - 1, 1), True)
    t_lo = math.floor(lo / spacing) * spacing
    t_hi = math.ceil(hi / spacing) * spacing
    n = int(round((t_hi - t_lo) / spacing))
    return [t_lo + k * spacing for k in range(n + 1)], t_lo, t_hi


def _fmt_tick(v):
    if v == 0.0:
        return "0"
    return "%.6g" % v


def _finite_runs(x, y):
    """Split (x, y) into maximal runs where y is finite."""
    good = np.isfinite(y)
    runs = []
    start = None
    for k, ok in enumerate(good):
        if ok and start is None:
            start = k
        elif not ok and start is not None:
            runs.append((start, k))
            start = None
    if start is not None:
        runs.append((start, len(good)))
    return [(x[a:b], y[a:b]) for a, b in runs if b - a >= 2]


def line_plot(x, series, labels=(), title="", xlabel="x", ylabel="u"):
    """Render one or more y-series over a shared x axis to an SVG string.

    series is a sequence of arrays matching x; labels, when given, must
    match series and populate the legend.
    """
    x = np.asarray(x, dtype=float)
    series = [np.asarray(y, dtype=float) for y in series]
    if not series:
        raise ValueError("at least one series is required")
    for y in series:
        if y.shape != x.shape:
            raise ValueError("series length must match x")
    if labels and len(labels) != len(series):
        raise ValueError("labels must match series")

    finite_y = np.concatenate([y[np.isfinite(y)] for y in series]) \
        if any(np.isfinite(y).any() for y in series) else np.zeros(1)
    xticks, xlo, xhi = _ticks(float(x.min()), float(x.max()), 7)
    yticks, ylo, yhi = _ticks(float(finite_y.min()), float(finite_y.max()), 6)

    def px(v):
        return _ML + (v - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def py(v):
        return _H - _MB - (v - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    out = []
    out.append('<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               'width="%g" height="%g" viewBox="0 0 %g %g">' % (_W, _H, _W, _H))
    out.append('<rect x="0" y="0" width="%g" height="%g" fill="#ffffff"/>'
               % (_W, _H))
    # grid and ticks
    for tv in xticks:
        out.append('<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" '
                   'stroke="#dddddd" stroke-width="1"/>'
                   % (px(tv), py(ylo), px(tv), py(yhi)))
        out.append('<text x="%.2f" y="%.2f" font-family="sans-serif" '
                   'font-size="11" fill="#444444" text-anchor="middle">%s'
                   '</text>' % (px(tv), _H - _MB + 16.0, _fmt_tick(tv)))
    for tv in yticks:
        out.append('<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" '
                   'stroke="#dddddd" stroke-width="1"/>'
                   % (px(xlo), py(tv), px(xhi), py(tv)))
        out.append('<text x="%.2f" y="%.2f" font-family="sans-serif" '
                   'font-size="11" fill="#444444" text-anchor="end">%s'
                   '</text>' % (_ML - 6.0, py(tv) + 4.0, _fmt_tick(tv)))
    out.append('<rect x="%.2f" y="%.2f" width="%.2f" height="%.2f" '
               'fill="none" stroke="#333333" stroke-width="1"/>'
               % (px(xlo), py(yhi), px(xhi) - px(xlo), py(ylo) - py(yhi)))
    # series
    for k, y in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        for xr, yr in _finite_runs(x, y):
            pts = " ".join("%.2f,%.2f" % (px(a), py(b))
                           for a, b in zip(xr, yr))
            out.append('<polyline points="%s" fill="none" stroke="%s" '
                       'stroke-width="1.5"/>' % (pts, color))
    # legend
    if labels:
        ly = _MT + 6.0
        for k, lab in enumerate(labels):
            color = PALETTE[k % len(PALETTE)]
            out.append('<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" '
                       'stroke="%s" stroke-width="2"/>'
                       % (_W - _MR - 120.0, ly, _W - _MR - 100.0, ly, color))
            out.append('<text x="%.2f" y="%.2f" font-family="sans-serif" '
                       'font-size="11" fill="#222222">%s</text>'
                       % (_W - _MR - 94.0, ly + 4.0, escape(str(lab))))
            ly += 16.0
    # titles
    if title:
        out.append('<text x="%.2f" y="%.2f" font-family="sans-serif" '
                   'font-size="14" fill="#111111" text-anchor="middle">%s'
                   '</text>' % (_W / 2.0, 19.0, escape(str(title))))
    if xlabel:
        out.append('<text x="%.2f" y="%.2f" font-family="sans-serif" '
                   'font-size="12" fill="#222222" text-anchor="middle">%s'
                   '</text>' % ((_ML + _W - _MR) / 2.0, _H - 8.0,
                                escape(str(xlabel))))
    if ylabel:
        out.append('<text x="%.2f" y="%.2f" font-family="sans-serif" '
                   'font-size="12" fill="#222222" text-anchor="middle" '
                   'transform="rotate(-90 %.2f %.2f)">%s</text>'
                   % (14.0, (_MT + _H - _MB) / 2.0, 14.0,
                      (_MT + _H - _MB) / 2.0, escape(str(ylabel))))
    out.append("</svg>")
    return "\n".join(out) + "\n"
