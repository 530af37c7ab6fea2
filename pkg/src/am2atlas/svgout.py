"""Deterministic SVG rendering for diagrams.

No timestamps, no randomness, stable element ordering and fixed float
formatting, so identical inputs produce byte-identical files suitable
for golden-file comparison.
"""

from __future__ import annotations

import math

import numpy as np

from .equilibria import Label, Status

# fixed layout in px
PLOT_W, PLOT_H = 600.0, 450.0
MARGIN_L, MARGIN_B, MARGIN_T = 54.0, 40.0, 16.0
LEGEND_W = 130.0

#: branch colors for bifurcation diagrams
BRANCH_COLORS = {
    Label.E10: "black",
    Label.E11: "darkorange",
    Label.E12: "magenta",
    Label.E20: "green",
    Label.E21: "red",
    Label.E22: "blue",
}


def _px(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    """Maps data coordinates to a fixed pixel frame and collects elements."""

    def __init__(self, xmin, xmax, ymin, ymax):
        self.xmin, self.xmax = xmin, xmax
        self.ymin, self.ymax = ymin, ymax
        self.parts: list[str] = []

    def x(self, v: float) -> float:
        return MARGIN_L + (v - self.xmin) / (self.xmax - self.xmin) * PLOT_W

    def y(self, v: float) -> float:
        return MARGIN_T + PLOT_H - (v - self.ymin) / (self.ymax - self.ymin) * PLOT_H

    def rect(self, x0, y0, x1, y1, fill):
        xa, xb = self.x(x0), self.x(x1)
        ya, yb = self.y(y1), self.y(y0)
        self.parts.append(
            f'<rect x="{_px(xa)}" y="{_px(ya)}" width="{_px(xb - xa)}" '
            f'height="{_px(yb - ya)}" fill="{fill}"/>'
        )

    def polyline(self, pts, stroke, dashed=False, width=1.5):
        coords = " ".join(f"{_px(self.x(x))},{_px(self.y(y))}" for x, y in pts)
        dash = ' stroke-dasharray="4,4"' if dashed else ""
        self.parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}"{dash}/>'
        )

    def text(self, x_px, y_px, s, size=12, anchor="start"):
        self.parts.append(
            f'<text x="{_px(x_px)}" y="{_px(y_px)}" font-size="{size}" '
            f'font-family="sans-serif" text-anchor="{anchor}">{s}</text>'
        )

    def frame_and_ticks(self, xlabel, ylabel, n_ticks=5):
        self.parts.append(
            f'<rect x="{_px(MARGIN_L)}" y="{_px(MARGIN_T)}" width="{_px(PLOT_W)}" '
            f'height="{_px(PLOT_H)}" fill="none" stroke="black" stroke-width="1"/>'
        )
        for i in range(n_ticks + 1):
            xv = self.xmin + (self.xmax - self.xmin) * i / n_ticks
            yv = self.ymin + (self.ymax - self.ymin) * i / n_ticks
            self.text(self.x(xv), MARGIN_T + PLOT_H + 16, f"{xv:.4g}", 10, "middle")
            self.text(MARGIN_L - 6, self.y(yv) + 3.5, f"{yv:.4g}", 10, "end")
        self.text(MARGIN_L + PLOT_W / 2, MARGIN_T + PLOT_H + 34, xlabel, 12, "middle")
        self.text(14, MARGIN_T + 10, ylabel, 12)

    def document(self) -> str:
        w = MARGIN_L + PLOT_W + LEGEND_W + 10
        h = MARGIN_T + PLOT_H + MARGIN_B
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_px(w)}" '
            f'height="{_px(h)}" viewBox="0 0 {_px(w)} {_px(h)}">\n{body}\n</svg>\n'
        )


def write_cut_svg(cut, path) -> None:
    from .regions import REGION_COLORS, REGIONS

    g = cut.grid
    cv = _Canvas(g.xmin, g.xmax, g.ymin, g.ymax)
    xs, ys = g.xs, g.ys
    dx = (g.xmax - g.xmin) / g.nx
    dy = (g.ymax - g.ymin) / g.ny

    cv.parts.append('<g id="regions">')
    for region in REGIONS:
        code = region.index
        if not np.any(cut.raster == code):
            continue
        cv.parts.append(f'<g id="region-{region.value}" fill="{REGION_COLORS[region]}">')
        for j in range(g.ny):
            row = cut.raster[j]
            i = 0
            y0 = ys[j] - dy / 2
            while i < g.nx:
                if row[i] != code:
                    i += 1
                    continue
                i0 = i
                while i < g.nx and row[i] == code:
                    i += 1
                cv.rect(xs[i0] - dx / 2, y0, xs[i - 1] + dx / 2, y0 + dy, REGION_COLORS[region])
        cv.parts.append("</g>")
    cv.parts.append("</g>")

    cv.parts.append('<g id="boundaries">')
    for k, (gamma, line) in enumerate(cut.boundaries):
        cv.parts.append(f'<g id="gamma-{gamma.value}-{k}">')
        cv.polyline(line, "black", width=1.2)
        cv.parts.append("</g>")
    cv.parts.append("</g>")

    if cut.plane == "s1s2":
        cv.frame_and_ticks("S1in (g/L)", "S2in")
        title = f"S1in-S2in cut, D = {cut.fixed_value:.9g}"
    else:
        cv.frame_and_ticks("D (1/d)", "S1in")
        title = f"D-S1in cut, S2in = {cut.fixed_value:.9g}"
    cv.text(MARGIN_L, MARGIN_T - 4, title, 12)

    lx = MARGIN_L + PLOT_W + 12
    cv.parts.append('<g id="legend">')
    present = cut.regions_present()
    y = MARGIN_T + 10
    for region in REGIONS:
        if region not in present:
            continue
        cv.parts.append(
            f'<rect x="{_px(lx)}" y="{_px(y)}" width="14" height="14" '
            f'fill="{REGION_COLORS[region]}" stroke="black" stroke-width="0.5"/>'
        )
        cv.text(lx + 20, y + 11.5, region.value, 11)
        y += 20
    cv.parts.append("</g>")

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(cv.document())


def write_bifurcation_svg(branches, events, path, component: str = "X1") -> None:
    idx = {"S1": 0, "X1": 1, "S2": 2, "X2": 3}[component]
    xmin = math.inf
    xmax = -math.inf
    ymax = 0.0
    for br in branches.values():
        if br.d.size == 0:
            continue
        xmin = min(xmin, float(br.d.min()))
        xmax = max(xmax, float(br.d.max()))
        ymax = max(ymax, float(br.states[:, idx].max()))
    if not math.isfinite(xmin):
        xmin, xmax, ymax = 0.0, 1.0, 1.0
    cv = _Canvas(xmin, xmax, 0.0, ymax * 1.05 if ymax > 0 else 1.0)

    stable = {Status.STABLE, Status.GAS}
    for label in Label:
        br = branches.get(label)
        if br is None or br.d.size == 0:
            continue
        color = BRANCH_COLORS[label]
        cv.parts.append(f'<g id="branch-{label.value}">')
        # split into runs of constant stability so line style can switch
        i = 0
        n = br.d.size
        while i < n:
            want = br.status[i] in stable
            j = i
            while j < n and (br.status[j] in stable) == want:
                j += 1
            pts = [(float(br.d[k]), float(br.states[k, idx])) for k in range(i, j)]
            if len(pts) == 1:
                pts = pts * 2
            cv.polyline(pts, color, dashed=not want)
            i = j
        cv.parts.append("</g>")

    cv.parts.append('<g id="events">')
    for e in events:
        cv.polyline([(e.D, 0.0), (e.D, cv.ymax)], "gray", dashed=True, width=0.8)
        cv.text(cv.x(e.D), MARGIN_T + 10, f"{e.D:.4g}", 9, "middle")
    cv.parts.append("</g>")

    cv.frame_and_ticks("D (1/d)", component)
    lx = MARGIN_L + PLOT_W + 12
    y = MARGIN_T + 10
    cv.parts.append('<g id="legend">')
    for label in Label:
        br = branches.get(label)
        if br is None or br.d.size == 0:
            continue
        cv.parts.append(
            f'<rect x="{_px(lx)}" y="{_px(y)}" width="14" height="4" '
            f'fill="{BRANCH_COLORS[label]}"/>'
        )
        cv.text(lx + 20, y + 6, label.value, 11)
        y += 18
    cv.parts.append("</g>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(cv.document())
