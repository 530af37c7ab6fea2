"""Operating-diagram regions and their boundary surfaces.

The operating space (D, S1in, S2in) splits into nine regions I0..I8 of
qualitatively identical long-term behavior, separated by six surfaces
G1..G6 (zero sets of threshold residuals).  This module classifies
points, evaluates the boundary residuals, determines the qualitative
shape of the upper coexistence threshold h2(D), and rasterizes
two-dimensional cuts of the diagram in either the (S1in, S2in) plane at
fixed D or the (D, S1in) plane at fixed S2in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kinetics
from .equilibria import ModelParams, OperatingPoint, combined_feed


class Region(enum.Enum):
    I0 = "I0"
    I1 = "I1"
    I2 = "I2"
    I3 = "I3"
    I4 = "I4"
    I5 = "I5"
    I6 = "I6"
    I7 = "I7"
    I8 = "I8"

    @property
    def color(self) -> str:
        return REGION_COLORS[self]

    @property
    def index(self) -> int:
        return int(self.value[1])


REGIONS = tuple(Region)

#: long-term behavior color code shared by all diagrams
REGION_COLORS = {
    Region.I0: "red",
    Region.I1: "blue",
    Region.I2: "cyan",
    Region.I3: "yellow",
    Region.I4: "green",
    Region.I5: "pink",
    Region.I6: "green",
    Region.I7: "pink",
    Region.I8: "pink",
}


class Gamma(enum.Enum):
    """Boundary surfaces, each the zero set of one scalar residual."""

    G1 = "G1"  # s1in = s1_star(D)
    G2 = "G2"  # s2in = s2_star1(D)
    G3 = "G3"  # s2in = s2_star2(D)
    G4 = "G4"  # combined feed = h1(D)
    G5 = "G5"  # combined feed = h2(D)
    G6 = "G6"  # D = d2


GAMMAS = tuple(Gamma)


@dataclass(frozen=True)
class Boundary:
    """Classification outcome for a point lying on one or more surfaces."""

    gammas: tuple[Gamma, ...]


@dataclass(frozen=True)
class Thresholds:
    """D-dependent part of the region inequalities, computed once per D."""

    D: float
    d1: float
    d2: float
    s1_star: float
    s2_star1: float
    s2_star2: float
    h1: float
    h2: float


def thresholds(params: ModelParams, D: float) -> Thresholds:
    r = params.feed_ratio
    ad = params.alpha * D
    s1_star = kinetics.invert_monotone(params.mu1, ad)
    s2_star1, s2_star2 = kinetics.invert_inhibited(params.mu2, ad)
    _, peak_rate = kinetics.peak(params.mu2)
    return Thresholds(
        D=D,
        d1=params.mu1.sup / params.alpha,
        d2=peak_rate / params.alpha,
        s1_star=s1_star,
        s2_star1=s2_star1,
        s2_star2=s2_star2,
        h1=s2_star1 + r * s1_star,
        h2=s2_star2 + r * s1_star,
    )


def _region_of(th: Thresholds, r: float, s1in: float, s2in: float) -> Region:
    """Decide the region from the inequality cascade.

    Exact ties on strict boundaries are assigned to the adjacent
    lower-threshold region so that every point gets exactly one region
    (raster mode); :func:`classify` reports them as :class:`Boundary`
    instead when a tolerance band is active.
    """
    sig = s2in + r * s1in
    if s1in <= th.s1_star:
        if s2in <= th.s2_star1:
            return Region.I0
        if s2in <= th.s2_star2:
            return Region.I1
        return Region.I2
    if sig <= th.h1:
        return Region.I3
    if s2in <= th.s2_star1:
        return Region.I4 if sig <= th.h2 else Region.I5
    if sig <= th.h2:
        return Region.I6
    return Region.I7 if s2in <= th.s2_star2 else Region.I8


def _residuals(th: Thresholds, r: float, s1in: float, s2in: float) -> dict[Gamma, float]:
    """Signed boundary residuals, omitting surfaces out of domain at the point."""
    sig = s2in + r * s1in
    out: dict[Gamma, float] = {}
    if th.D < th.d1:
        out[Gamma.G1] = s1in - th.s1_star
    if th.D < th.d2:
        out[Gamma.G2] = s2in - th.s2_star1
        out[Gamma.G3] = s2in - th.s2_star2
        if th.D < th.d1 and s1in > th.s1_star:
            out[Gamma.G4] = sig - th.h1
            out[Gamma.G5] = sig - th.h2
    out[Gamma.G6] = th.D - th.d2
    return out


def gamma_value(params: ModelParams, gamma: Gamma, pt: OperatingPoint) -> float | None:
    """Signed residual of one boundary surface; ``None`` outside its domain."""
    th = thresholds(params, pt.D)
    return _residuals(th, params.feed_ratio, pt.s1in, pt.s2in).get(gamma)


#: relative band inside which classify reports a Boundary instead of a region
CLASSIFY_BOUNDARY_TOL = 1e-12


def classify(
    params: ModelParams, pt: OperatingPoint, boundary_tol: float = CLASSIFY_BOUNDARY_TOL
) -> Region | Boundary:
    """Region of one operating point, or the set of surfaces it lies on.

    The extended-real threshold conventions make every point with
    ``D >= d1`` or ``D > d2`` classifiable as well.  With
    ``boundary_tol = 0`` a region is always returned.
    """
    th = thresholds(params, pt.D)
    r = params.feed_ratio
    if boundary_tol > 0.0:
        hits = []
        for gamma, res in _residuals(th, r, pt.s1in, pt.s2in).items():
            if math.isinf(res):
                continue
            ref = {
                Gamma.G1: max(abs(pt.s1in), abs(th.s1_star)),
                Gamma.G2: max(abs(pt.s2in), abs(th.s2_star1)),
                Gamma.G3: max(abs(pt.s2in), abs(th.s2_star2)),
                Gamma.G4: max(abs(th.h1), pt.s2in + r * pt.s1in),
                Gamma.G5: max(abs(th.h2), pt.s2in + r * pt.s1in),
                Gamma.G6: max(abs(pt.D), th.d2),
            }[gamma]
            if abs(res) <= boundary_tol * max(1.0, ref):
                hits.append(gamma)
        if hits:
            return Boundary(tuple(sorted(hits, key=lambda g: g.value)))
    return _region_of(th, r, pt.s1in, pt.s2in)


# ---------------------------------------------------------------------------
# qualitative shape of the coexistence thresholds


@dataclass(frozen=True)
class HCaseReport:
    """Shape classification of h2 on its domain (0, min(d1, d2)).

    Case A: d1 > d2 with h2 strictly decreasing.  Case B: d1 > d2 with
    interior extrema of h2 (listed as (D, h2) pairs).  Case C: d1 < d2.
    ``h2_right_limit`` is the limit of h2 at the right end of its domain
    (finite for d2 < d1, infinite otherwise).
    """

    case: str
    d1: float
    d2: float
    minima: tuple[tuple[float, float], ...] = ()
    maxima: tuple[tuple[float, float], ...] = ()
    h2_right_limit: float = math.inf


def _h_value(params: ModelParams, D: float, which: int) -> float:
    th = thresholds(params, D)
    return th.h1 if which == 1 else th.h2


def _h2_slope(params: ModelParams, D: float) -> float:
    """dh2/dD via the inverse-function theorem on both monotone branches."""
    ad = params.alpha * D
    s1 = kinetics.invert_monotone(params.mu1, ad)
    _, s2 = kinetics.invert_inhibited(params.mu2, ad)
    if math.isinf(s1) or math.isinf(s2):
        return -math.inf
    return params.alpha / kinetics.slope(params.mu2, s2) + params.feed_ratio * (
        params.alpha / kinetics.slope(params.mu1, s1)
    )


def h_case(params: ModelParams, n_samples: int = 1024) -> HCaseReport:
    """Classify the shape of h2 by sampling its slope on Chebyshev nodes.

    Sign changes of the slope whose magnitude exceeds 1e-10 on both
    sides are refined by bisection into interior extrema.  Raises
    ``ValueError`` when d1 and d2 coincide within 1e-12 relative.
    """
    if n_samples < 256:
        raise ValueError("n_samples must be at least 256")
    d1 = params.mu1.sup / params.alpha
    peak_s, peak_rate = kinetics.peak(params.mu2)
    d2 = peak_rate / params.alpha
    if abs(d1 - d2) <= 1e-12 * max(d1, d2):
        raise ValueError("degenerate configuration: d1 and d2 coincide within 1e-12")
    if d1 < d2:
        return HCaseReport(case="C", d1=d1, d2=d2, h2_right_limit=math.inf)

    right = peak_s + params.feed_ratio * kinetics.invert_monotone(
        params.mu1, params.alpha * d2
    )
    nodes = [
        0.5 * d2 * (1.0 - math.cos(math.pi * (2 * k + 1) / (2 * n_samples)))
        for k in range(n_samples)
    ]
    slopes = [_h2_slope(params, D) for D in nodes]
    minima: list[tuple[float, float]] = []
    maxima: list[tuple[float, float]] = []
    for i in range(n_samples - 1):
        a, b = slopes[i], slopes[i + 1]
        if abs(a) <= 1e-10 or abs(b) <= 1e-10:
            continue
        if (a < 0.0) == (b < 0.0):
            continue
        lo, hi = nodes[i], nodes[i + 1]
        fa = a
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = _h2_slope(params, mid)
            if hi - lo <= 1e-13 * max(1.0, mid):
                break
            if (fm < 0.0) == (fa < 0.0):
                lo, fa = mid, fm
            else:
                hi = mid
        d_ext = 0.5 * (lo + hi)
        pair = (d_ext, _h_value(params, d_ext, 2))
        if a < 0.0:
            minima.append(pair)
        else:
            maxima.append(pair)
    case = "B" if minima or maxima else "A"
    return HCaseReport(
        case=case,
        d1=d1,
        d2=d2,
        minima=tuple(minima),
        maxima=tuple(maxima),
        h2_right_limit=right,
    )


# ---------------------------------------------------------------------------
# two-dimensional cuts


@dataclass(frozen=True)
class GridSpec:
    """Raster grid over a rectangle; classification happens at cell centers."""

    nx: int
    ny: int
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid must have at least 2x2 cells")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("grid bounds must be increasing")

    @property
    def xs(self) -> np.ndarray:
        dx = (self.xmax - self.xmin) / self.nx
        return self.xmin + dx * (np.arange(self.nx) + 0.5)

    @property
    def ys(self) -> np.ndarray:
        dy = (self.ymax - self.ymin) / self.ny
        return self.ymin + dy * (np.arange(self.ny) + 0.5)


@dataclass
class DiagramCut:
    """One 2-D slice of the operating diagram.

    ``raster[j, i]`` holds the region index of cell (i, j); boundary
    polylines are drawn from their closed forms, not extracted from the
    raster, and are listed as (surface, (N, 2) vertex array) pairs in
    plane coordinates.
    """

    plane: str  # "s1s2" (x=S1in, y=S2in) or "ds1" (x=D, y=S1in)
    fixed_value: float
    grid: GridSpec
    raster: np.ndarray
    boundaries: list[tuple[Gamma, np.ndarray]] = field(default_factory=list)

    def regions_present(self) -> set[Region]:
        return {REGIONS[int(c)] for c in np.unique(self.raster)}


def _codes_s1s2(th: Thresholds, r: float, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    s1, s2 = np.meshgrid(xs, ys)
    sig = s2 + r * s1
    left = s1 <= th.s1_star
    conds = [
        left & (s2 <= th.s2_star1),
        left & (s2 <= th.s2_star2),
        left,
        ~left & (sig <= th.h1),
        ~left & (s2 <= th.s2_star1) & (sig <= th.h2),
        ~left & (s2 <= th.s2_star1),
        ~left & (sig <= th.h2),
        ~left & (s2 <= th.s2_star2),
    ]
    return np.select(conds, np.arange(8), default=8).astype(np.int8)


def _codes_column(th: Thresholds, r: float, s2in: float, ys: np.ndarray) -> np.ndarray:
    s1 = ys
    sig = s2in + r * s1
    left = s1 <= th.s1_star
    conds = [
        left & (s2in <= th.s2_star1),
        left & (s2in <= th.s2_star2),
        left,
        ~left & (sig <= th.h1),
        ~left & (s2in <= th.s2_star1) & (sig <= th.h2),
        ~left & (s2in <= th.s2_star1),
        ~left & (sig <= th.h2),
        ~left & (s2in <= th.s2_star2),
    ]
    return np.select(conds, np.arange(8), default=8).astype(np.int8)


def _clip_segment(p0, p1, grid: GridSpec) -> np.ndarray | None:
    """Liang-Barsky clip of a segment to the grid rectangle."""
    x0, y0 = p0
    x1, y1 = p1
    dx, dy = x1 - x0, y1 - y0
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, x0 - grid.xmin),
        (dx, grid.xmax - x0),
        (-dy, y0 - grid.ymin),
        (dy, grid.ymax - y0),
    ):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        t = q / p
        if p < 0.0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 > t1:
            return None
    return np.array(
        [[x0 + t0 * dx, y0 + t0 * dy], [x0 + t1 * dx, y0 + t1 * dy]]
    )


def _masked_polylines(xs: np.ndarray, ys: np.ndarray, mask: np.ndarray) -> list[np.ndarray]:
    """Split a sampled curve into contiguous valid runs of at least 2 points."""
    out = []
    start = None
    for i, ok in enumerate(mask):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start >= 2:
                out.append(np.column_stack([xs[start:i], ys[start:i]]))
            start = None
    if start is not None and len(mask) - start >= 2:
        out.append(np.column_stack([xs[start:], ys[start:]]))
    return out


def cut_s1s2(params: ModelParams, D: float, grid: GridSpec) -> DiagramCut:
    """Cut at constant D: all boundaries are straight lines.

    G1 is vertical, G2/G3 horizontal, G4/G5 oblique with slope -k2/k1;
    lines whose defining threshold is infinite at this D are absent.
    """
    if D <= 0:
        raise ValueError("D must be positive")
    th = thresholds(params, D)
    r = params.feed_ratio
    raster = _codes_s1s2(th, r, grid.xs, grid.ys)
    bnd: list[tuple[Gamma, np.ndarray]] = []
    if math.isfinite(th.s1_star) and grid.xmin < th.s1_star < grid.xmax:
        bnd.append(
            (Gamma.G1, np.array([[th.s1_star, grid.ymin], [th.s1_star, grid.ymax]]))
        )
    for gamma, level in ((Gamma.G2, th.s2_star1), (Gamma.G3, th.s2_star2)):
        if math.isfinite(level) and grid.ymin < level < grid.ymax:
            bnd.append((gamma, np.array([[grid.xmin, level], [grid.xmax, level]])))
    for gamma, h in ((Gamma.G4, th.h1), (Gamma.G5, th.h2)):
        if not math.isfinite(h):
            continue
        x_lo = max(grid.xmin, th.s1_star)
        seg = _clip_segment((x_lo, h - r * x_lo), (h / r, 0.0), grid)
        if seg is not None and abs(seg[0, 0] - seg[1, 0]) > 0:
            bnd.append((gamma, seg))
    return DiagramCut("s1s2", D, grid, raster, bnd)


def cut_ds1(
    params: ModelParams, s2in: float, grid: GridSpec, curve_samples: int = 1024
) -> DiagramCut:
    """Cut at constant S2in: G2/G3/G6 are vertical lines, the rest curves of D."""
    if s2in < 0:
        raise ValueError("s2in must be nonnegative")
    r = params.feed_ratio
    xs, ys = grid.xs, grid.ys
    raster = np.empty((grid.ny, grid.nx), dtype=np.int8)
    for i, D in enumerate(xs):
        raster[:, i] = _codes_column(thresholds(params, D), r, s2in, ys)

    peak_s, peak_rate = kinetics.peak(params.mu2)
    d1 = params.mu1.sup / params.alpha
    d2 = peak_rate / params.alpha
    bnd: list[tuple[Gamma, np.ndarray]] = []

    ds = np.linspace(max(grid.xmin, 1e-9), grid.xmax, curve_samples)
    ths = [thresholds(params, float(D)) for D in ds]

    y1 = np.array([t.s1_star for t in ths])
    mask = np.isfinite(y1) & (y1 >= grid.ymin) & (y1 <= grid.ymax)
    for line in _masked_polylines(ds, y1, mask):
        bnd.append((Gamma.G1, line))

    if s2in > 0:
        dv = kinetics.growth_rate(params.mu2, s2in) / params.alpha
        if grid.xmin < dv < grid.xmax:
            line = np.array([[dv, grid.ymin], [dv, grid.ymax]])
            if s2in <= peak_s:
                bnd.append((Gamma.G2, line))
            if s2in >= peak_s:
                bnd.append((Gamma.G3, line))
    for gamma, hvals in (
        (Gamma.G4, np.array([t.h1 for t in ths])),
        (Gamma.G5, np.array([t.h2 for t in ths])),
    ):
        yv = (hvals - s2in) / r
        mask = (
            np.isfinite(yv)
            & (ds < min(d1, d2))
            & (yv > y1)
            & (yv >= grid.ymin)
            & (yv <= grid.ymax)
        )
        for line in _masked_polylines(ds, yv, mask):
            bnd.append((gamma, line))
    if grid.xmin < d2 < grid.xmax:
        bnd.append((Gamma.G6, np.array([[d2, grid.ymin], [d2, grid.ymax]])))
    return DiagramCut("ds1", s2in, grid, raster, bnd)


# ---------------------------------------------------------------------------
# serialization


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def write_raster_csv(cut: DiagramCut, path) -> None:
    """Dump the raster as one `D,S1in,S2in,region` row per cell."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("D,S1in,S2in,region\n")
        xs, ys = cut.grid.xs, cut.grid.ys
        for j, y in enumerate(ys):
            for i, x in enumerate(xs):
                if cut.plane == "s1s2":
                    d, s1, s2 = cut.fixed_value, x, y
                else:
                    d, s1, s2 = x, y, cut.fixed_value
                name = REGIONS[int(cut.raster[j, i])].value
                fh.write(f"{_fmt(d)},{_fmt(s1)},{_fmt(s2)},{name}\n")


def read_raster_csv(path) -> list[tuple[float, float, float, Region]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "D,S1in,S2in,region":
            raise ValueError(f"unexpected raster CSV header: {header!r}")
        for line in fh:
            d, s1, s2, name = line.strip().split(",")
            rows.append((float(d), float(s1), float(s2), Region(name)))
    return rows


def write_boundaries_csv(cut: DiagramCut, path) -> None:
    """Dump boundary polylines as `gamma,param,x,y` rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("gamma,param,x,y\n")
        for gamma, line in cut.boundaries:
            for k in range(line.shape[0]):
                x, y = line[k]
                fh.write(f"{gamma.value},{k},{_fmt(x)},{_fmt(y)}\n")


def read_boundaries_csv(path) -> list[tuple[Gamma, np.ndarray]]:
    groups: list[tuple[Gamma, list[list[float]]]] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "gamma,param,x,y":
            raise ValueError(f"unexpected boundaries CSV header: {header!r}")
        for line in fh:
            name, k, x, y = line.strip().split(",")
            if int(k) == 0:
                groups.append((Gamma(name), []))
            groups[-1][1].append([float(x), float(y)])
    return [(g, np.array(pts)) for g, pts in groups]


def write_svg(cut: DiagramCut, path) -> None:
    """Render the cut as a deterministic SVG (region fills, boundary strokes, legend)."""
    from . import svgout

    svgout.write_cut_svg(cut, path)
