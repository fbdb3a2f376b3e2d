"""Dependency-free SVG plots: convergence polygons and b_n trend charts."""

from __future__ import annotations

from typing import Sequence

WIDTH, HEIGHT = 640, 480
MARGIN = 56


def _mapper(xs: Sequence[float], ys: Sequence[float]):
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi += 1.0
    if y_hi == y_lo:
        y_hi += 1.0
    pad_x = 0.06 * (x_hi - x_lo)
    pad_y = 0.06 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    def to_px(x: float, y: float) -> tuple[float, float]:
        px = MARGIN + (x - x_lo) * (WIDTH - 2 * MARGIN) / (x_hi - x_lo)
        py = HEIGHT - MARGIN - (y - y_lo) * (HEIGHT - 2 * MARGIN) / (y_hi - y_lo)
        return px, py

    return to_px, (x_lo, x_hi, y_lo, y_hi)


def _header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" font-size="15" text-anchor="middle" '
        f'font-family="sans-serif">{title}</text>',
    ]


def _axes(bounds, x_label: str, y_label: str) -> list[str]:
    x_lo, x_hi, y_lo, y_hi = bounds
    out = [
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" '
        f'height="{HEIGHT - 2 * MARGIN}" fill="none" stroke="#999"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" font-size="12" text-anchor="middle" '
        f'font-family="sans-serif">{x_label}</text>',
        f'<text x="16" y="{HEIGHT // 2}" font-size="12" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 16 {HEIGHT // 2})">{y_label}</text>',
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="10" '
        f'font-family="sans-serif">{x_lo:.4g}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="10" '
        f'text-anchor="end" font-family="sans-serif">{x_hi:.4g}</text>',
        f'<text x="{MARGIN - 4}" y="{HEIGHT - MARGIN}" font-size="10" text-anchor="end" '
        f'font-family="sans-serif">{y_lo:.4g}</text>',
        f'<text x="{MARGIN - 4}" y="{MARGIN + 4}" font-size="10" text-anchor="end" '
        f'font-family="sans-serif">{y_hi:.4g}</text>',
    ]
    return out


def polygon_svg(polygon, title: str = "convergence polygon") -> str:
    """Polygon plot: samples, fitted segments, and the log R = rho boundary."""
    xs = [float(s.rho) for s in polygon.samples]
    ys = [float(s.log_r) for s in polygon.samples]
    xs += [float(polygon.interval.lo), float(polygon.interval.hi)]
    ys += [float(polygon.interval.lo), float(polygon.interval.hi)]
    for seg in polygon.segments:
        ys += [float(seg.value(seg.lo)), float(seg.value(seg.hi))]
    to_px, bounds = _mapper(xs, ys)

    parts = _header(title)
    parts += _axes(bounds, "log-radius rho", "log R")

    # identity line: the Robba boundary log R = rho
    x_lo, x_hi, y_lo, y_hi = bounds
    lo = max(x_lo, y_lo)
    hi = min(x_hi, y_hi)
    if lo < hi:
        (x1, y1), (x2, y2) = to_px(lo, lo), to_px(hi, hi)
        parts.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="#bbb" stroke-dasharray="6 4"/>'
        )
        parts.append(
            f'<text x="{x2 - 6:.1f}" y="{y2 + 14:.1f}" font-size="10" text-anchor="end" '
            f'fill="#888" font-family="sans-serif">log R = rho</text>'
        )

    for seg in polygon.segments:
        (x1, y1) = to_px(float(seg.lo), float(seg.value(seg.lo)))
        (x2, y2) = to_px(float(seg.hi), float(seg.value(seg.hi)))
        parts.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="#1f6fb2" stroke-width="2"/>'
        )

    for s in polygon.samples:
        px, py = to_px(float(s.rho), float(s.log_r))
        parts.append(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="3" fill="#d22"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def sequence_svg(values, title: str = "b_n trend") -> str:
    """Chart of b_n against n; None entries (vanishing matrices) are skipped."""
    pts = [(n, float(v)) for n, v in enumerate(values) if v is not None]
    if not pts:
        pts = [(0, 0.0)]
    to_px, bounds = _mapper([n for n, _ in pts], [v for _, v in pts])
    parts = _header(title)
    parts += _axes(bounds, "n", "b_n")
    path = " ".join(
        f"{'M' if k == 0 else 'L'}{to_px(n, v)[0]:.1f},{to_px(n, v)[1]:.1f}"
        for k, (n, v) in enumerate(pts)
    )
    parts.append(f'<path d="{path}" fill="none" stroke="#1f6fb2" stroke-width="1"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
