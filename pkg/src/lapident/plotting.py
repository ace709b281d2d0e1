"""Static three-panel SVG of separation curves. Layout is fixed so output is byte-stable."""

from __future__ import annotations

import math

from .identify import SeparationCurve

PANEL_W, PANEL_H = 300, 220
MARGIN_L, MARGIN_B, MARGIN_T = 45, 35, 25
COLORS = {"WL": "#1f77b4", "LAP": "#d62728", "bucket": "#2ca02c", "single": "#9467bd"}
DASHES = ["", "6,3", "2,2", "8,2,2,2"]


def _polyline(xs, ys, x_range, y_range, x0, color, dash) -> str:
    (xlo, xhi), (ylo, yhi) = x_range, y_range
    sx = (PANEL_W - MARGIN_L - 10) / ((xhi - xlo) or 1.0)
    sy = (PANEL_H - MARGIN_B - MARGIN_T) / ((yhi - ylo) or 1.0)
    pts = []
    for x, y in zip(xs, ys):
        if math.isnan(y):
            continue
        px = x0 + MARGIN_L + (x - xlo) * sx
        py = PANEL_H - MARGIN_B - (y - ylo) * sy
        pts.append(f"{px:.2f},{py:.2f}")
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{" ".join(pts)}"/>'


def _axes(x0, title, xlabel, x_range) -> list[str]:
    left, bottom = x0 + MARGIN_L, PANEL_H - MARGIN_B
    right, top = x0 + PANEL_W - 10, MARGIN_T
    out = [
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{top}" stroke="black"/>',
        f'<text x="{x0 + PANEL_W / 2:.1f}" y="15" text-anchor="middle" font-size="12">{title}</text>',
        f'<text x="{x0 + PANEL_W / 2:.1f}" y="{PANEL_H - 5}" text-anchor="middle" font-size="10">{xlabel}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        y = bottom - frac * (bottom - top)
        out.append(f'<text x="{left - 4}" y="{y + 3:.1f}" text-anchor="end" font-size="9">{frac:.1f}</text>')
    for frac in (0.0, 0.5, 1.0):
        x = left + frac * (right - left)
        val = x_range[0] + frac * (x_range[1] - x_range[0])
        out.append(f'<text x="{x:.1f}" y="{bottom + 12}" text-anchor="middle" font-size="9">{val:.2f}</text>')
    return out


def separation_svg(curves: list[SeparationCurve]) -> str:
    ns = sorted({c.n for c in curves})
    ks = sorted({p.k for c in curves for p in c.points})
    k_range = (min(ks), max(ks))
    kl_range = (min(ks) / math.log2(max(ns)), max(ks) / math.log2(min(ns)))
    y_range = (0.0, 1.0)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{3 * PANEL_W}" height="{PANEL_H + 40}" '
        f'viewBox="0 0 {3 * PANEL_W} {PANEL_H + 40}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    parts += _axes(0, "(a) accuracy vs k", "k", k_range)
    parts += _axes(PANEL_W, "(b) accuracy vs k / log2 n", "k / log2 n", kl_range)
    parts += _axes(2 * PANEL_W, "(c) bucket diagnostics (WL)", "k", k_range)
    for c in curves:
        dash = DASHES[ns.index(c.n) % len(DASHES)]
        pts = sorted(c.points, key=lambda p: p.k)
        xs = [p.k for p in pts]
        acc = [p.accuracy for p in pts]
        color = COLORS[c.method]
        parts.append(_polyline(xs, acc, k_range, y_range, 0, color, dash))
        parts.append(_polyline([k / math.log2(c.n) for k in xs], acc, kl_range, y_range, PANEL_W, color, dash))
        if c.method == "WL":
            parts.append(_polyline(xs, acc, k_range, y_range, 2 * PANEL_W, color, dash))
            parts.append(_polyline(xs, [p.exp_inv_bucket for p in pts], k_range, y_range, 2 * PANEL_W, COLORS["bucket"], dash))
            parts.append(_polyline(xs, [p.singleton_prob for p in pts], k_range, y_range, 2 * PANEL_W, COLORS["single"], dash))
    legend_y = PANEL_H + 20
    entries = [("WL accuracy", COLORS["WL"]), ("LAP accuracy", COLORS["LAP"]),
               ("E[1/|bucket|]", COLORS["bucket"]), ("P(singleton)", COLORS["single"])]
    for i, (label, color) in enumerate(entries):
        x = 20 + i * 150
        parts.append(f'<line x1="{x}" y1="{legend_y}" x2="{x + 20}" y2="{legend_y}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{x + 25}" y="{legend_y + 4}" font-size="10">{label}</text>')
    dash_note = ", ".join(f"n={n}: {'solid' if not DASHES[i % len(DASHES)] else 'dash ' + DASHES[i % len(DASHES)]}"
                          for i, n in enumerate(ns))
    parts.append(f'<text x="620" y="{legend_y + 4}" font-size="9">{dash_note}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
