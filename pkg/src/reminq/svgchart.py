"""Minimal deterministic SVG line charts.

Hand-rolled on purpose: the report artifacts must be byte-identical
across reruns, so no plotting library with embedded timestamps, version
strings, or font metrics gets a say here.
"""

from __future__ import annotations

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#7f7f7f",
)

_MARGIN_LEFT = 64
_MARGIN_RIGHT = 16
_MARGIN_TOP = 34
_MARGIN_BOTTOM = 42


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def line_chart(
    title: str,
    series: list[tuple[str, list[float]]],
    x_label: str = "epoch",
    y_label: str = "",
    width: int = 760,
    height: int = 420,
) -> str:
    """Render labeled series as one self-contained SVG document."""
    if not series or all(len(values) == 0 for _, values in series):
        raise ValueError("line_chart needs at least one nonempty series")

    xs_max = max(len(values) for _, values in series)
    y_all = [v for _, values in series for v in values]
    y_lo, y_hi = min(y_all), max(y_all)
    if y_hi == y_lo:
        y_lo -= 1.0
        y_hi += 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(i: int) -> float:
        if xs_max == 1:
            return _MARGIN_LEFT + plot_w / 2.0
        return _MARGIN_LEFT + plot_w * i / (xs_max - 1)

    def sy(v: float) -> float:
        return _MARGIN_TOP + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" fill="#222222">{title}</text>',
    ]

    for tick in _ticks(y_lo + pad, y_hi - pad):
        y = sy(tick)
        parts.append(
            f'<line x1="{_MARGIN_LEFT}" y1="{y:.2f}" x2="{width - _MARGIN_RIGHT}" '
            f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#555555">{_fmt(tick)}</text>'
        )
    for tick in _ticks(1, xs_max):
        i = int(round(tick)) - 1
        x = sx(max(i, 0))
        parts.append(
            f'<text x="{x:.2f}" y="{height - _MARGIN_BOTTOM + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" fill="#555555">{int(round(tick))}</text>'
        )

    parts.append(
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#888888" stroke-width="1"/>'
    )

    for idx, (label, values) in enumerate(series):
        if not values:
            continue
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{sx(i):.2f},{sy(v):.2f}" for i, v in enumerate(values))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = _MARGIN_TOP + 14 + 16 * idx
        lx = width - _MARGIN_RIGHT - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{ly}" font-family="sans-serif" font-size="11" '
            f'fill="#333333">{label}</text>'
        )

    parts.append(
        f'<text x="{_MARGIN_LEFT + plot_w / 2:.1f}" y="{height - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" fill="#333333">{x_label}</text>'
    )
    if y_label:
        cy = _MARGIN_TOP + plot_h / 2
        parts.append(
            f'<text x="16" y="{cy:.1f}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" fill="#333333" transform="rotate(-90 16 {cy:.1f})">{y_label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
