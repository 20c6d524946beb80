"""Minimal deterministic SVG line charts with a log-scale y axis.

No rendering dependencies: the output is plain SVG text, byte-stable for
identical input. Values below the floor are clamped for display and the
legend says so.
"""

from __future__ import annotations

import math

from .errors import InvalidInputError

_WIDTH = 640.0
_HEIGHT = 420.0
_MARGIN_L = 72.0
_MARGIN_R = 18.0
_MARGIN_T = 22.0
_MARGIN_B = 52.0


def _fmt(v):
    return f"{v:.2f}"


class Series:
    """One plotted curve: label, x/y data, color, marker shape."""

    def __init__(self, label, x, y, color, marker, dashed=False):
        if len(x) != len(y):
            raise InvalidInputError(
                f"series {label!r}: {len(x)} x values vs {len(y)} y values"
            )
        if not x:
            raise InvalidInputError(f"series {label!r} is empty")
        self.label = label
        self.x = [float(v) for v in x]
        self.y = [float(v) for v in y]
        self.color = color
        self.marker = marker
        self.dashed = dashed


def _marker_svg(marker, px, py, color):
    if marker == "circle":
        return f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="3.5" fill="{color}"/>'
    if marker == "square":
        return (
            f'<rect x="{_fmt(px - 3.0)}" y="{_fmt(py - 3.0)}" width="6" '
            f'height="6" fill="{color}"/>'
        )
    if marker == "diamond":
        pts = (
            f"{_fmt(px)},{_fmt(py - 4.0)} {_fmt(px + 4.0)},{_fmt(py)} "
            f"{_fmt(px)},{_fmt(py + 4.0)} {_fmt(px - 4.0)},{_fmt(py)}"
        )
        return f'<polygon points="{pts}" fill="{color}"/>'
    raise InvalidInputError(f"unknown marker {marker!r}")


def write_log_plot(path, series_list, xlabel, ylabel, floor=1e-4, title=None):
    """Write a chart of the given series with y on a log10 scale.

    ``floor`` is the smallest displayable y value; smaller or nonpositive
    values are drawn at the floor and the legend gains a note. The y range
    is [floor, 1]; x is linear over the data range.
    """
    if not series_list:
        raise InvalidInputError("nothing to plot")
    if not 0.0 < floor < 1.0:
        raise InvalidInputError(f"floor must lie in (0, 1), got {floor}")

    xs = sorted({v for s in series_list for v in s.x})
    x_min, x_max = xs[0], xs[-1]
    span = x_max - x_min
    if span == 0.0:
        x_min -= 1.0
        x_max += 1.0
        span = x_max - x_min
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B
    log_floor = math.log10(floor)

    def to_px(xv):
        return _MARGIN_L + (xv - x_min) / span * plot_w

    clamped = False

    def to_py(yv):
        nonlocal clamped
        if yv < floor:
            clamped = True
            yv = floor
        yv = min(yv, 1.0)
        frac = (math.log10(yv) - log_floor) / (0.0 - log_floor)
        return _MARGIN_T + (1.0 - frac) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}" '
        'font-family="Helvetica, Arial, sans-serif" font-size="12">',
        f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(_WIDTH / 2)}" y="15" text-anchor="middle" '
            f'font-size="13">{title}</text>'
        )

    decades = int(round(-log_floor))
    for d in range(decades + 1):
        yv = 10.0 ** (-d)
        py = to_py(yv)
        parts.append(
            f'<line x1="{_fmt(_MARGIN_L)}" y1="{_fmt(py)}" '
            f'x2="{_fmt(_WIDTH - _MARGIN_R)}" y2="{_fmt(py)}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        label = "1" if d == 0 else f"1e-{d}"
        parts.append(
            f'<text x="{_fmt(_MARGIN_L - 6)}" y="{_fmt(py + 4)}" '
            f'text-anchor="end">{label}</text>'
        )
    for xv in xs:
        px = to_px(xv)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(_HEIGHT - _MARGIN_B)}" '
            f'x2="{_fmt(px)}" y2="{_fmt(_HEIGHT - _MARGIN_B + 4)}" '
            'stroke="#333333" stroke-width="1"/>'
        )
        text = f"{xv:g}"
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(_HEIGHT - _MARGIN_B + 16)}" '
            f'text-anchor="middle">{text}</text>'
        )
    parts.append(
        f'<rect x="{_fmt(_MARGIN_L)}" y="{_fmt(_MARGIN_T)}" '
        f'width="{_fmt(plot_w)}" height="{_fmt(plot_h)}" fill="none" '
        'stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{_fmt(_MARGIN_L + plot_w / 2)}" y="{_fmt(_HEIGHT - 14)}" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt(_MARGIN_T + plot_h / 2)}" '
        'text-anchor="middle" transform="rotate(-90 16 '
        f'{_fmt(_MARGIN_T + plot_h / 2)})">{ylabel}</text>'
    )

    body = []
    for s in series_list:
        points = [(to_px(xv), to_py(yv)) for xv, yv in zip(s.x, s.y)]
        if len(points) > 1:
            coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in points)
            dash = ' stroke-dasharray="6 3"' if s.dashed else ""
            body.append(
                f'<polyline points="{coords}" fill="none" stroke="{s.color}" '
                f'stroke-width="1.5"{dash}/>'
            )
        for px, py in points:
            body.append(_marker_svg(s.marker, px, py, s.color))
    parts.extend(body)

    legend_entries = [(s.label, s.color, s.marker) for s in series_list]
    note = f"values below {floor:g} drawn at floor" if clamped else None
    legend_h = 18.0 * (len(legend_entries) + (1 if note else 0)) + 10.0
    lx = _WIDTH - _MARGIN_R - 210.0
    ly = _MARGIN_T + 8.0
    parts.append(
        f'<rect x="{_fmt(lx)}" y="{_fmt(ly)}" width="204" '
        f'height="{_fmt(legend_h)}" fill="white" fill-opacity="0.85" '
        'stroke="#999999" stroke-width="0.5"/>'
    )
    for i, (label, color, marker) in enumerate(legend_entries):
        ey = ly + 18.0 * i + 14.0
        parts.append(_marker_svg(marker, lx + 12.0, ey - 4.0, color))
        parts.append(f'<text x="{_fmt(lx + 24)}" y="{_fmt(ey)}">{label}</text>')
    if note:
        ey = ly + 18.0 * len(legend_entries) + 14.0
        parts.append(
            f'<text x="{_fmt(lx + 8)}" y="{_fmt(ey)}" font-size="10" '
            f'fill="#666666">{note}</text>'
        )
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed to write plot to {path}: {exc}") from exc
