"""Steady states of the AM2 chemostat model and their stability.

The model couples an acidogenic step (substrate S1, biomass X1, monotone
kinetics) to a methanogenic step (S2, X2, inhibited kinetics) through the
dilution rate D and the feed concentrations S1in, S2in:

    S1' = D (S1in - S1) - k1 mu1(S1) X1
    X1' = (mu1(S1) - alpha D) X1
    S2' = D (S2in - S2) + k2 mu1(S1) X1 - k3 mu2(S2) X2
    X2' = (mu2(S2) - alpha D) X2

Up to six steady states exist, labeled E10, E11, E12 (X1 = 0) and E20,
E21, E22 (X1 > 0).  Existence and local stability reduce to threshold
comparisons between the feed concentrations and a handful of auxiliary
quantities; a numeric Jacobian-eigenvalue oracle cross-checks the
analytic verdicts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kinetics
from .kinetics import INF, GrowthLaw, InhibitedLaw, MonotoneLaw

#: relative half-width of the band around a deciding inequality inside
#: which a steady state is reported as non-hyperbolic
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Biological constants of the model; immutable after construction.

    ``k1`` (g substrate / g biomass), ``k2`` and ``k3`` (mmol/g) are the
    yield coefficients of the two bioreactions, ``k4`` scales the methane
    flow only, and ``alpha`` in (0, 1] decouples solid from hydraulic
    retention.
    """

    mu1: MonotoneLaw
    mu2: InhibitedLaw
    k1: float
    k2: float
    k3: float
    alpha: float
    k4: float = 1.0

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3", "k4"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if not kinetics.is_monotone(self.mu1):
            raise ValueError("mu1 must be a monotone growth law")
        if not kinetics.is_inhibited(self.mu2):
            raise ValueError("mu2 must be an inhibited growth law")

    @property
    def feed_ratio(self) -> float:
        """k2/k1, the weight of S1in in the combined methanogenic feed."""
        return self.k2 / self.k1


@dataclass(frozen=True)
class OperatingPoint:
    """The three control parameters: dilution rate and feed concentrations."""

    D: float
    s1in: float
    s2in: float

    def __post_init__(self) -> None:
        if not self.D > 0:
            raise ValueError("dilution rate D must be positive")
        if self.s1in < 0 or self.s2in < 0:
            raise ValueError("feed concentrations must be nonnegative")


class Label(enum.Enum):
    """Steady-state labels; E1* have X1 = 0, E2* have X1 > 0."""

    E10 = "E10"
    E11 = "E11"
    E12 = "E12"
    E20 = "E20"
    E21 = "E21"
    E22 = "E22"


LABELS = tuple(Label)


class Status(enum.Enum):
    ABSENT = "absent"
    GAS = "gas"
    STABLE = "stable"
    UNSTABLE = "unstable"
    NON_HYPERBOLIC = "non-hyperbolic"


@dataclass(frozen=True)
class SteadyState:
    label: Label
    s1: float
    x1: float
    s2: float
    x2: float
    status: Status

    @property
    def exists(self) -> bool:
        return self.status is not Status.ABSENT

    @property
    def components(self) -> np.ndarray:
        return np.array([self.s1, self.x1, self.s2, self.x2])


@dataclass(frozen=True)
class AuxValues:
    """Threshold quantities entering every existence/stability condition.

    Entries honor the extended-real conventions: ``s1_star`` is ``inf``
    at dilutions the acidogens cannot sustain (alpha D at or above the
    supremum of mu1) and both ``s2_star`` roots are ``inf`` above the
    methanogenic fold ``d2``.  ``h1``/``h2`` combine the two thresholds
    into the coexistence bounds on ``s2in + (k2/k1) s1in``.
    """

    d1: float
    d2: float
    s1_star: float
    s2_star1: float
    s2_star2: float
    h1: float
    h2: float
    s2in_star: float
    x1_star: float
    x2_1: float
    x2_2: float
    x2_star1: float
    x2_star2: float


def combined_feed(params: ModelParams, pt: OperatingPoint) -> float:
    """s2in + (k2/k1) s1in, the feed quantity compared against h1/h2."""
    return pt.s2in + params.feed_ratio * pt.s1in


def aux(params: ModelParams, pt: OperatingPoint) -> AuxValues:
    """Evaluate all auxiliary quantities at one operating point."""
    r = params.feed_ratio
    ad = params.alpha * pt.D
    d1 = params.mu1.sup / params.alpha
    _, peak_rate = kinetics.peak(params.mu2)
    d2 = peak_rate / params.alpha

    s1_star = kinetics.invert_monotone(params.mu1, ad)
    s2_star1, s2_star2 = kinetics.invert_inhibited(params.mu2, ad)

    h1 = s2_star1 + r * s1_star
    h2 = s2_star2 + r * s1_star
    s2in_star = pt.s2in + r * (pt.s1in - s1_star)
    x1_star = (pt.s1in - s1_star) / (params.k1 * params.alpha)
    x2_1 = (pt.s2in - s2_star1) / (params.k3 * params.alpha)
    x2_2 = (pt.s2in - s2_star2) / (params.k3 * params.alpha)
    x2_star1 = (s2in_star - s2_star1) / (params.k3 * params.alpha)
    x2_star2 = (s2in_star - s2_star2) / (params.k3 * params.alpha)
    return AuxValues(
        d1=d1,
        d2=d2,
        s1_star=s1_star,
        s2_star1=s2_star1,
        s2_star2=s2_star2,
        h1=h1,
        h2=h2,
        s2in_star=s2in_star,
        x1_star=x1_star,
        x2_1=x2_1,
        x2_2=x2_2,
        x2_star1=x2_star1,
        x2_star2=x2_star2,
    )


def _cmp(lhs: float, rhs: float, tol: float) -> int:
    """-1/0/+1 comparison with a relative dead band; infinities are decisive."""
    if math.isinf(lhs) or math.isinf(rhs):
        if lhs == rhs:
            return 0
        return -1 if lhs < rhs else 1
    band = tol * max(1.0, abs(lhs), abs(rhs))
    d = lhs - rhs
    if abs(d) <= band:
        return 0
    return -1 if d < 0 else 1


def steady_states(
    params: ModelParams, pt: OperatingPoint, tol: float = BOUNDARY_TOL
) -> list[SteadyState]:
    """All six steady states with components and status at one operating point.

    Components follow the closed forms in terms of the auxiliary values;
    a state whose existence condition fails is ``ABSENT`` (components set
    to nan), and a state within ``tol`` (relative) of any of its deciding
    inequalities is ``NON_HYPERBOLIC``.  A stable state is upgraded to
    ``GAS`` exactly when it is the only stable one.
    """
    a = aux(params, pt)
    sig = combined_feed(params, pt)
    c1 = _cmp(pt.s1in, a.s1_star, tol)  # acidogen persistence
    c2a = _cmp(pt.s2in, a.s2_star1, tol)
    c2b = _cmp(pt.s2in, a.s2_star2, tol)
    ch1 = _cmp(sig, a.h1, tol)
    ch2 = _cmp(sig, a.h2, tol)
    cf = _cmp(pt.D, a.d2, tol)  # on the fold, branch pairs coincide

    out: list[SteadyState] = []

    def add(label, s1, x1, s2, x2, status):
        if status is Status.ABSENT:
            s1 = x1 = s2 = x2 = math.nan
        out.append(SteadyState(label, s1, x1, s2, x2, status))

    # E10: total washout, always exists
    if 0 in (c1, c2a, c2b):
        st = Status.NON_HYPERBOLIC
    elif c1 < 0 and (c2a < 0 or c2b > 0):
        st = Status.STABLE
    else:
        st = Status.UNSTABLE
    add(Label.E10, pt.s1in, 0.0, pt.s2in, 0.0, st)

    # E11 / E12: acidogens washed out, methanogens fed by s2in alone
    for label, ce, s2, x2 in (
        (Label.E11, c2a, a.s2_star1, a.x2_1),
        (Label.E12, c2b, a.s2_star2, a.x2_2),
    ):
        if ce < 0:
            st = Status.ABSENT
        elif ce == 0 or c1 == 0 or cf == 0:
            st = Status.NON_HYPERBOLIC
        elif label is Label.E12:
            st = Status.UNSTABLE
        else:
            st = Status.STABLE if c1 < 0 else Status.UNSTABLE
        add(label, pt.s1in, 0.0, s2, x2, st)

    # E20: methanogens washed out
    if c1 < 0:
        st = Status.ABSENT
    elif c1 == 0 or 0 in (ch1, ch2):
        st = Status.NON_HYPERBOLIC
    elif ch1 < 0 or ch2 > 0:
        st = Status.STABLE
    else:
        st = Status.UNSTABLE
    add(Label.E20, a.s1_star, a.x1_star, a.s2in_star, 0.0, st)

    # E21 / E22: coexistence on the two methanogenic branches
    for label, ch, s2, x2, stable in (
        (Label.E21, ch1, a.s2_star1, a.x2_star1, True),
        (Label.E22, ch2, a.s2_star2, a.x2_star2, False),
    ):
        if c1 < 0 or ch < 0:
            st = Status.ABSENT
        elif c1 == 0 or ch == 0 or cf == 0:
            st = Status.NON_HYPERBOLIC
        else:
            st = Status.STABLE if stable else Status.UNSTABLE
        add(label, a.s1_star, a.x1_star, s2, x2, st)

    stable = [i for i, s in enumerate(out) if s.status is Status.STABLE]
    if len(stable) == 1:
        i = stable[0]
        s = out[i]
        out[i] = SteadyState(s.label, s.s1, s.x1, s.s2, s.x2, Status.GAS)
    return out


def vector_field(params: ModelParams, pt: OperatingPoint, x) -> np.ndarray:
    """Right-hand side of the model at state ``x = (S1, X1, S2, X2)``."""
    s1, x1, s2, x2 = x
    m1 = params.mu1(s1)
    m2 = params.mu2(s2)
    ad = params.alpha * pt.D
    return np.array(
        [
            pt.D * (pt.s1in - s1) - params.k1 * m1 * x1,
            (m1 - ad) * x1,
            pt.D * (pt.s2in - s2) + params.k2 * m1 * x1 - params.k3 * m2 * x2,
            (m2 - ad) * x2,
        ]
    )


def jacobian(params: ModelParams, x, pt: OperatingPoint) -> np.ndarray:
    """Analytic 4x4 Jacobian of :func:`vector_field` at ``x``."""
    s1, x1, s2, x2 = (float(v) for v in x)
    m1 = params.mu1(s1)
    m2 = params.mu2(s2)
    dm1 = kinetics.slope(params.mu1, s1)
    dm2 = kinetics.slope(params.mu2, s2)
    ad = params.alpha * pt.D
    return np.array(
        [
            [-pt.D - params.k1 * dm1 * x1, -params.k1 * m1, 0.0, 0.0],
            [dm1 * x1, m1 - ad, 0.0, 0.0],
            [params.k2 * dm1 * x1, params.k2 * m1, -pt.D - params.k3 * dm2 * x2, -params.k3 * m2],
            [0.0, 0.0, dm2 * x2, m2 - ad],
        ]
    )


class Verdict(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


def stability_oracle(
    params: ModelParams, pt: OperatingPoint, margin: float = 1e-9
) -> list[tuple[Label, Verdict]]:
    """Numeric stability verdicts from Jacobian eigenvalues.

    For every existing steady state, the verdict is ``STABLE`` if the
    largest eigenvalue real part is below ``-margin``, ``UNSTABLE`` above
    ``+margin``, and ``MARGINAL`` in between (expected only next to a
    region boundary).  Analytic GAS and STABLE statuses both correspond
    to the numeric ``STABLE``.
    """
    states = [s for s in steady_states(params, pt) if s.exists]
    if not states:
        return []
    mats = np.stack([jacobian(params, s.components, pt) for s in states])
    eigs = np.linalg.eigvals(mats)
    out = []
    for state, ev in zip(states, eigs):
        top = float(ev.real.max())
        if top < -margin:
            v = Verdict.STABLE
        elif top > margin:
            v = Verdict.UNSTABLE
        else:
            v = Verdict.MARGINAL
        out.append((state.label, v))
    return out
