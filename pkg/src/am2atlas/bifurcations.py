"""One-parameter bifurcation scans in the dilution rate.

Along a line of constant (S1in, S2in), every region transition happens
where one boundary residual crosses zero.  Crossings of G1..G5 are
transcritical collisions of a steady-state pair; crossing G6 (the fold
of the methanogenic kinetics) is a saddle-node collision of a branch
pair.  The scan brackets every residual sign change on a D grid,
refines it by bisection, names the colliding pair from the subset
conditions, and exports the six steady-state branches for diagrams.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kinetics
from .equilibria import (
    Label,
    ModelParams,
    OperatingPoint,
    Status,
    combined_feed,
    steady_states,
)
from .regions import Gamma, Region, Thresholds, _region_of, _residuals, thresholds

#: bisection stop on the bifurcation dilution value; tighter than the
#: 1e-9 reported precision so that residuals land below 1e-8 even where
#: the thresholds vary steeply with D
REFINE_TOL = 1e-12

#: two candidates closer than this in D are reported as codimension two
CODIM2_TOL = 1e-6


class Kind(enum.Enum):
    TRANSCRITICAL = "transcritical"
    SADDLE_NODE = "saddle-node"


@dataclass(frozen=True)
class BifurcationEvent:
    D: float
    kind: Kind
    pair: tuple[Label, Label]
    gamma: Gamma
    region_before: Region
    region_after: Region


@dataclass(frozen=True)
class CodimTwoCandidate:
    """Coinciding candidates left unclassified (codimension-two point)."""

    D: float
    gammas: tuple[Gamma, ...]


@dataclass
class Branch:
    """Samples of one steady state along the scan; absent stretches are gaps."""

    label: Label
    d: np.ndarray
    states: np.ndarray  # (n, 4) components
    status: list[Status]


@dataclass
class ScanResult:
    events: list[BifurcationEvent]
    branches: dict[Label, Branch]
    codim_two: list[CodimTwoCandidate] = field(default_factory=list)


@dataclass(frozen=True)
class CriticalDilutions:
    """Named bifurcation dilutions of one (S1in, S2in) line.

    ``washout`` is where the acidogen persistence threshold meets S1in
    (G1); ``fold`` is the methanogenic fold dilution (G6);
    ``lower_threshold`` / ``upper_threshold`` are the crossings of the
    combined feed with h1 / h2 (G4 / G5), in increasing order.  Entries
    that do not occur are None / empty.
    """

    washout: float | None
    fold: float
    lower_threshold: tuple[float, ...]
    upper_threshold: tuple[float, ...]


def _h_roots(
    params: ModelParams, sig: float, which: int, n_grid: int = 4096
) -> tuple[float, ...]:
    """All solutions of h_i(D) = sig by sign bracketing plus bisection to 1e-10."""
    _, peak_rate = kinetics.peak(params.mu2)
    d_hi = min(params.mu1.sup, peak_rate) / params.alpha - 1e-9
    if d_hi <= 1e-6:
        return ()
    r = params.feed_ratio

    def f(D: float) -> float:
        th = thresholds(params, D)
        h = th.h1 if which == 1 else th.h2
        return sig - h

    ds = np.linspace(1e-6, d_hi, n_grid)
    vals = np.array([f(float(D)) for D in ds])
    roots = []
    for i in range(n_grid - 1):
        a, b = vals[i], vals[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(ds[i]))
        elif (a < 0.0) != (b < 0.0):
            lo, hi, fa = float(ds[i]), float(ds[i + 1]), a
            while hi - lo > 1e-10:
                mid = 0.5 * (lo + hi)
                fm = f(mid)
                if (fm < 0.0) == (fa < 0.0):
                    lo, fa = mid, fm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return tuple(roots)


def critical_dilutions(params: ModelParams, s1in: float, s2in: float) -> CriticalDilutions:
    """Solve the defining equations of every bifurcation dilution on the line.

    The combined feed ``s2in + (k2/k1) s1in`` generalizes the threshold
    equations beyond the S2in = 0 plane on which they are usually
    stated; for S2in = 0 they reduce to the familiar single-feed form.
    """
    _, peak_rate = kinetics.peak(params.mu2)
    fold = peak_rate / params.alpha
    v = kinetics.growth_rate(params.mu1, s1in)
    washout = v / params.alpha if s1in > 0 else None
    sig = s2in + params.feed_ratio * s1in
    return CriticalDilutions(
        washout=washout,
        fold=fold,
        lower_threshold=_h_roots(params, sig, 1),
        upper_threshold=_h_roots(params, sig, 2),
    )


def classify_crossing(
    params: ModelParams, pt: OperatingPoint, gamma: Gamma, subset_tol: float = 1e-9
) -> list[BifurcationEvent] | None:
    """Name the colliding pair(s) for a point on one boundary surface.

    Returns one event per collision (G1 and G6 subsets can carry two or
    three simultaneous pairs), an empty list when the crossing changes
    no steady state (possible on G6 only), and ``None`` when the point
    sits on a subset corner within ``subset_tol`` (a codimension-two
    situation left unclassified).
    """
    th = thresholds(params, pt.D)
    r = params.feed_ratio

    def region_at(d: float) -> Region:
        dd = max(d, 1e-12)
        return _region_of(thresholds(params, dd), r, pt.s1in, pt.s2in)

    delta = max(1e-6, 1e-6 * pt.D)
    before = region_at(pt.D - delta)
    after = region_at(pt.D + delta)

    def mk(pairs: list[tuple[Label, Label]], kind: Kind) -> list[BifurcationEvent]:
        return [
            BifurcationEvent(pt.D, kind, pair, gamma, before, after) for pair in pairs
        ]

    def rel(a: float, b: float) -> int:
        if math.isinf(a) or math.isinf(b):
            return -1 if a < b else (1 if a > b else 0)
        if abs(a - b) <= subset_tol * max(1.0, abs(a), abs(b)):
            return 0
        return -1 if a < b else 1

    if gamma is Gamma.G1:
        lo = rel(pt.s2in, th.s2_star1)
        hi = rel(pt.s2in, th.s2_star2)
        if lo == 0 or hi == 0:
            return None
        pairs = [(Label.E10, Label.E20)]
        if lo > 0:
            pairs.append((Label.E11, Label.E21))
        if hi > 0:
            pairs.append((Label.E12, Label.E22))
        return mk(pairs, Kind.TRANSCRITICAL)
    if gamma is Gamma.G2:
        return mk([(Label.E10, Label.E11)], Kind.TRANSCRITICAL)
    if gamma is Gamma.G3:
        return mk([(Label.E10, Label.E12)], Kind.TRANSCRITICAL)
    if gamma is Gamma.G4:
        return mk([(Label.E20, Label.E21)], Kind.TRANSCRITICAL)
    if gamma is Gamma.G5:
        return mk([(Label.E20, Label.E22)], Kind.TRANSCRITICAL)

    # G6: the fold dilution; which branch pairs collide depends on the
    # feed subsets and on whether the acidogens can persist at the fold
    peak_s, peak_rate = kinetics.peak(params.mu2)
    d1 = params.mu1.sup / params.alpha
    d2 = peak_rate / params.alpha
    cm = rel(pt.s2in, peak_s)
    if d1 < d2:
        if cm == 0:
            return None
        if cm > 0:
            return mk([(Label.E11, Label.E12)], Kind.SADDLE_NODE)
        return []
    s1_star_fold = kinetics.invert_monotone(params.mu1, params.alpha * d2)
    c1 = rel(pt.s1in, s1_star_fold)
    if cm == 0 or c1 == 0:
        return None
    if cm < 0:
        threshold = s1_star_fold + (peak_s - pt.s2in) / r
        ct = rel(pt.s1in, threshold)
        if ct == 0:
            return None
        if ct > 0:
            return mk([(Label.E21, Label.E22)], Kind.SADDLE_NODE)
        return []
    pairs = [(Label.E11, Label.E12)]
    if c1 > 0:
        pairs.append((Label.E21, Label.E22))
    return mk(pairs, Kind.SADDLE_NODE)


def scan_dilution(
    params: ModelParams,
    s1in: float,
    s2in: float,
    d_range: tuple[float, float],
    n: int = 2048,
) -> ScanResult:
    """Locate and classify every bifurcation on a constant-feed line.

    Samples the boundary residuals on an ``n``-point D grid, refines
    each sign change by bisection on the residual (smooth where the
    region indicator is discrete) to within 1e-9 in D, and assembles the
    steady-state branches sampled on the same grid.  Candidates from
    different surfaces within 1e-6 of each other are reported as
    codimension-two and left unclassified.
    """
    d_min, d_max = d_range
    if not (0.0 < d_min < d_max):
        raise ValueError("need 0 < d_min < d_max")
    if n < 100:
        raise ValueError("n must be at least 100")

    ds = np.linspace(d_min, d_max, n)
    ths = [thresholds(params, float(D)) for D in ds]
    r = params.feed_ratio

    def residual(gamma: Gamma, D: float) -> float | None:
        return _residuals(thresholds(params, D), r, s1in, s2in).get(gamma)

    candidates: list[tuple[float, Gamma]] = []
    for gamma in (Gamma.G1, Gamma.G2, Gamma.G3, Gamma.G4, Gamma.G5):
        vals = [_residuals(t, r, s1in, s2in).get(gamma) for t in ths]
        for i in range(n - 1):
            a, b = vals[i], vals[i + 1]
            if a is None or b is None:
                continue
            if not (math.isfinite(a) and math.isfinite(b)):
                continue
            if a == 0.0:
                candidates.append((float(ds[i]), gamma))
            elif (a < 0.0) != (b < 0.0):
                lo, hi, fa = float(ds[i]), float(ds[i + 1]), a
                while hi - lo > REFINE_TOL:
                    mid = 0.5 * (lo + hi)
                    fm = residual(gamma, mid)
                    if fm is None or fm == 0.0:
                        break
                    if (fm < 0.0) == (fa < 0.0):
                        lo, fa = mid, fm
                    else:
                        hi = mid
                candidates.append((0.5 * (lo + hi), gamma))
    _, peak_rate = kinetics.peak(params.mu2)
    d2 = peak_rate / params.alpha
    if d_min < d2 < d_max:
        candidates.append((d2, Gamma.G6))
    candidates.sort()

    events: list[BifurcationEvent] = []
    codim2: list[CodimTwoCandidate] = []
    i = 0
    while i < len(candidates):
        j = i + 1
        while j < len(candidates) and candidates[j][0] - candidates[i][0] <= CODIM2_TOL:
            j += 1
        group = candidates[i:j]
        if len({g for _, g in group}) > 1:
            codim2.append(
                CodimTwoCandidate(
                    D=group[0][0], gammas=tuple(sorted({g for _, g in group}, key=lambda g: g.value))
                )
            )
        else:
            d_star, gamma = group[0]
            found = classify_crossing(
                params, OperatingPoint(d_star, s1in, s2in), gamma
            )
            if found is None:
                codim2.append(CodimTwoCandidate(D=d_star, gammas=(gamma,)))
            else:
                events.extend(found)
        i = j

    branches: dict[Label, Branch] = {}
    samples: dict[Label, list[tuple[float, np.ndarray, Status]]] = {lab: [] for lab in Label}
    for D in ds:
        for st in steady_states(params, OperatingPoint(float(D), s1in, s2in)):
            if st.exists:
                samples[st.label].append((float(D), st.components, st.status))
    for lab, rows in samples.items():
        if rows:
            branches[lab] = Branch(
                label=lab,
                d=np.array([d for d, _, _ in rows]),
                states=np.stack([c for _, c, _ in rows]),
                status=[s for _, _, s in rows],
            )
        else:
            branches[lab] = Branch(lab, np.empty(0), np.empty((0, 4)), [])
    return ScanResult(events=events, branches=branches, codim_two=codim2)


# ---------------------------------------------------------------------------
# serialization


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def write_events_csv(events: list[BifurcationEvent], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("D,kind,pair,gamma\n")
        for e in events:
            pair = f"{e.pair[0].value}={e.pair[1].value}"
            fh.write(f"{_fmt(e.D)},{e.kind.value},{pair},{e.gamma.value}\n")


def read_events_csv(path) -> list[tuple[float, Kind, tuple[Label, Label], Gamma]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "D,kind,pair,gamma":
            raise ValueError(f"unexpected events CSV header: {header!r}")
        for line in fh:
            d, kind, pair, gamma = line.strip().split(",")
            a, b = pair.split("=")
            rows.append((float(d), Kind(kind), (Label(a), Label(b)), Gamma(gamma)))
    return rows


def write_branches_csv(branches: dict[Label, Branch], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("label,D,S1,X1,S2,X2,status\n")
        for lab in Label:
            br = branches.get(lab)
            if br is None:
                continue
            for k in range(br.d.shape[0]):
                s1, x1, s2, x2 = br.states[k]
                fh.write(
                    f"{lab.value},{_fmt(br.d[k])},{_fmt(s1)},{_fmt(x1)},"
                    f"{_fmt(s2)},{_fmt(x2)},{br.status[k].value}\n"
                )


def read_branches_csv(path) -> dict[Label, Branch]:
    rows: dict[Label, list[tuple[float, list[float], Status]]] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "label,D,S1,X1,S2,X2,status":
            raise ValueError(f"unexpected branches CSV header: {header!r}")
        for line in fh:
            lab, d, s1, x1, s2, x2, status = line.strip().split(",")
            rows.setdefault(Label(lab), []).append(
                (float(d), [float(s1), float(x1), float(s2), float(x2)], Status(status))
            )
    out = {}
    for lab, items in rows.items():
        out[lab] = Branch(
            label=lab,
            d=np.array([d for d, _, _ in items]),
            states=np.array([c for _, c, _ in items]),
            status=[s for _, _, s in items],
        )
    return out


def write_diagram_svg(
    branches: dict[Label, Branch],
    events: list[BifurcationEvent],
    path,
    component: str = "X1",
) -> None:
    """Bifurcation diagram: one branch curve per steady state vs D.

    Solid strokes mark stable stretches, dotted unstable ones; the
    washout/coexistence branches use the conventional black/green/red/
    blue color code.
    """
    from . import svgout

    svgout.write_bifurcation_svg(branches, events, path, component)
