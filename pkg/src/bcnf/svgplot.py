"""Minimal static SVG emission for sweep diagrams and phase portraits."""

from __future__ import annotations

from .sweep import SweepResult

_W, _H, _PAD = 760, 520, 50


def _svg(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n<rect width="100%" height="100%" fill="white"/>'
    )
    return head + "\n" + "\n".join(body) + "\n</svg>\n"


def sweep_svg(result: SweepResult) -> str:
    """Horizontal validity segment per k with the kappa staircase overlaid."""
    live = [iv for iv in result.intervals if iv.eps_hi > 0.0]
    eps_max = max((iv.eps_hi for iv in live), default=1.0)
    k_max = result.k_max

    def sx(eps: float) -> float:
        return _PAD + (eps / eps_max) * (_W - 2 * _PAD)

    def sy(k: float) -> float:
        return _H - _PAD - (k / (k_max + 1)) * (_H - 2 * _PAD)

    body = [
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_PAD}" y2="{_PAD}" stroke="black"/>',
        f'<text x="{_W - _PAD}" y="{_H - _PAD + 30}" text-anchor="end" font-size="13">eps (max {eps_max:.3g})</text>',
        f'<text x="{_PAD - 30}" y="{_PAD - 10}" font-size="13">k</text>',
    ]
    for iv in live:
        y = sy(iv.k)
        body.append(
            f'<line x1="{sx(iv.eps_lo)}" y1="{y}" x2="{sx(iv.eps_hi)}" y2="{y}" '
            f'stroke="#1f5fbf" stroke-width="1.5"/>'
        )
    # kappa staircase: kappa(eps) = number of endpoints above eps
    if result.eps_k:
        pts = []
        prev = sx(eps_max)
        for idx, eps in enumerate(result.eps_k, start=1):
            x = sx(eps)
            y = sy(idx)
            pts.append(f"{prev},{y}")
            pts.append(f"{x},{y}")
            prev = x
        body.append(
            f'<polyline points="{" ".join(pts)}" fill="none" stroke="#c23b22" stroke-width="1"/>'
        )
        body.append(
            f'<text x="{_W - _PAD}" y="{_PAD}" text-anchor="end" font-size="13" '
            f'fill="#c23b22">kappa(eps)</text>'
        )
    return _svg(body)


def scatter_svg(
    series: dict[str, list[tuple[float, float]]],
    lines: list[tuple[float, float, str]] | None = None,
) -> str:
    """Scatter of labelled point sets with optional direction lines through the origin."""
    pts = [p for ps in series.values() for p in ps]
    if not pts:
        return _svg(['<text x="20" y="20">no points</text>'])
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs + [0.0]), max(xs + [0.0])
    y0, y1 = min(ys + [0.0]), max(ys + [0.0])
    span_x = (x1 - x0) or 1.0
    span_y = (y1 - y0) or 1.0

    def s(p: tuple[float, float]) -> tuple[float, float]:
        return (
            _PAD + (p[0] - x0) / span_x * (_W - 2 * _PAD),
            _H - _PAD - (p[1] - y0) / span_y * (_H - 2 * _PAD),
        )

    body = []
    zx, _ = s((0.0, 0.0))
    body.append(f'<line x1="{zx}" y1="{_PAD}" x2="{zx}" y2="{_H - _PAD}" stroke="#999"/>')
    palette = ["#1f5fbf", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b", "#464646"]
    for li, (dx, dy, label) in enumerate(lines or []):
        span = max(span_x, span_y)
        scale = span / max(abs(dx), abs(dy), 1e-300)
        a = s((-dx * scale, -dy * scale))
        b = s((dx * scale, dy * scale))
        body.append(
            f'<line x1="{a[0]:.1f}" y1="{a[1]:.1f}" x2="{b[0]:.1f}" y2="{b[1]:.1f}" '
            f'stroke="#777" stroke-dasharray="6 4"/>'
        )
        body.append(f'<text x="{b[0]:.1f}" y="{b[1]:.1f}" font-size="11" fill="#777">{label}</text>')
    for idx, (label, ps) in enumerate(series.items()):
        color = palette[idx % len(palette)]
        for p in ps:
            cx, cy = s(p)
            body.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="2.2" fill="{color}"/>')
        body.append(
            f'<text x="{_W - _PAD}" y="{_PAD + 16 * idx}" text-anchor="end" '
            f'font-size="12" fill="{color}">{label}</text>'
        )
    return _svg(body)
