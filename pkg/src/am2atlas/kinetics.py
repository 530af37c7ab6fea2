"""Growth-law kinetics for two-step anaerobic digestion models.

Two closed-form laws are provided: :class:`Monod` (monotone, saturating)
and :class:`Haldane` (substrate-inhibited, unimodal).  Arbitrary callables
with the same qualitative shapes are wrapped by :class:`GenericMonotone`
and :class:`GenericInhibited`; for those, inverses fall back to bracketing
bisection and the peak to a golden-section search.

Extended-real convention
------------------------
Inverse lookups that have no finite solution return ``math.inf`` instead
of raising.  Plain floats already implement the required extended-real
arithmetic (``inf + x == inf``) and total ordering, so downstream
threshold algebra can mix finite and infinite values freely.  All
concentrations are nonnegative; rates are per day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

INF = math.inf

#: absolute + relative tolerance for bisection on concentrations
INV_TOL = 1e-12

#: relative tolerance for golden-section peak search
PEAK_TOL = 1e-12


class ShapeError(ValueError):
    """Operation applied to a growth law of the wrong qualitative shape."""


def _require_nonnegative(name: str, value: float) -> None:
    if value < 0 or math.isnan(value):
        raise ValueError(f"{name} must be nonnegative, got {value!r}")


@dataclass(frozen=True)
class Monod:
    """Saturating monotone law ``m*s / (K + s)``.

    Parameters
    ----------
    m : float
        Maximum specific growth rate (1/d); the supremum, reached only
        in the limit of infinite substrate.
    K : float
        Half-saturation constant; the rate at ``s == K`` is ``m / 2``.
    """

    m: float
    K: float

    def __post_init__(self) -> None:
        if self.m <= 0 or self.K <= 0:
            raise ValueError("Monod parameters m and K must be positive")

    def __call__(self, s: float) -> float:
        return self.m * s / (self.K + s)

    def slope(self, s: float) -> float:
        return self.m * self.K / (self.K + s) ** 2

    @property
    def sup(self) -> float:
        return self.m

    @property
    def scale(self) -> float:
        return self.K


@dataclass(frozen=True)
class Haldane:
    """Substrate-inhibited law ``m*s / (K + s + s**2/K_I)``.

    Increasing up to the peak at ``sqrt(K*K_I)``, decreasing beyond it,
    and vanishing at infinity.
    """

    m: float
    K: float
    K_I: float

    def __post_init__(self) -> None:
        if self.m <= 0 or self.K <= 0 or self.K_I <= 0:
            raise ValueError("Haldane parameters m, K, K_I must be positive")

    def __call__(self, s: float) -> float:
        return self.m * s / (self.K + s + s * s / self.K_I)

    def slope(self, s: float) -> float:
        den = self.K + s + s * s / self.K_I
        return self.m * (self.K - s * s / self.K_I) / (den * den)

    @property
    def peak_s(self) -> float:
        return math.sqrt(self.K * self.K_I)

    @property
    def peak_rate(self) -> float:
        return self.m / (1.0 + 2.0 * math.sqrt(self.K / self.K_I))

    @property
    def scale(self) -> float:
        return self.peak_s


@dataclass(frozen=True)
class GenericMonotone:
    """Monotone law backed by a user callable.

    The callable must vanish at 0, increase strictly on (0, inf) and
    saturate at a finite supremum.  If ``sup`` is not given it is
    estimated by evaluating far out on the saturation plateau.
    """

    fn: Callable[[float], float]
    sup_hint: float | None = None
    scale: float = 1.0

    def __call__(self, s: float) -> float:
        return self.fn(s)

    def slope(self, s: float) -> float:
        return _central_slope(self.fn, s, self.scale)

    @cached_property
    def sup(self) -> float:
        if self.sup_hint is not None:
            return self.sup_hint
        return self.fn(1e12 * self.scale)


@dataclass(frozen=True)
class GenericInhibited:
    """Unimodal (inhibited) law backed by a user callable.

    Must vanish at 0 and at infinity with a single interior maximum.
    The peak is located once by grid bracketing plus golden-section
    search and cached.
    """

    fn: Callable[[float], float]
    scale: float = 1.0

    def __call__(self, s: float) -> float:
        return self.fn(s)

    def slope(self, s: float) -> float:
        return _central_slope(self.fn, s, self.scale)

    @cached_property
    def _peak(self) -> tuple[float, float]:
        lo, hi = _bracket_peak(self.fn, self.scale)
        s = _golden_max(self.fn, lo, hi)
        # value comparisons cannot resolve a quadratic peak below
        # sqrt(eps)*s; polish by bisecting the finite-difference slope
        s = _polish_peak(self.fn, s)
        return s, self.fn(s)

    @property
    def peak_s(self) -> float:
        return self._peak[0]

    @property
    def peak_rate(self) -> float:
        return self._peak[1]


MonotoneLaw = Union[Monod, GenericMonotone]
InhibitedLaw = Union[Haldane, GenericInhibited]
GrowthLaw = Union[Monod, Haldane, GenericMonotone, GenericInhibited]


def is_monotone(law: GrowthLaw) -> bool:
    return isinstance(law, (Monod, GenericMonotone))


def is_inhibited(law: GrowthLaw) -> bool:
    return isinstance(law, (Haldane, GenericInhibited))


def growth_rate(law: GrowthLaw, s: float) -> float:
    """Evaluate the specific growth rate at substrate concentration ``s``."""
    _require_nonnegative("substrate concentration", s)
    return law(s)


def slope(law: GrowthLaw, s: float) -> float:
    """d(rate)/d(substrate); closed form where available, else central difference."""
    _require_nonnegative("substrate concentration", s)
    return law.slope(s)


def peak(law: InhibitedLaw) -> tuple[float, float]:
    """Location and value of the unique interior maximum of an inhibited law."""
    if not is_inhibited(law):
        raise ShapeError("peak is only defined for inhibited (unimodal) laws")
    return law.peak_s, law.peak_rate


def invert_monotone(law: MonotoneLaw, v: float) -> float:
    """Unique ``s`` with ``law(s) == v``; ``inf`` when ``v`` is at or above the supremum."""
    _require_nonnegative("rate", v)
    if not is_monotone(law):
        raise ShapeError("invert_monotone requires a monotone law")
    if v >= law.sup:
        return INF
    if v == 0.0:
        return 0.0
    if isinstance(law, Monod):
        return v * law.K / (law.m - v)
    hi = law.scale
    while law.fn(hi) <= v:
        hi *= 2.0
        if hi > 1e300:
            return INF
    return _bisect(lambda s: law.fn(s) - v, 0.0, hi)


def invert_inhibited(law: InhibitedLaw, v: float) -> tuple[float, float]:
    """Both solutions of ``law(s) == v`` for an inhibited law.

    Returns the pair ``(low, high)`` straddling the peak.  At the peak
    rate both entries equal the peak location; above it both are ``inf``;
    at ``v == 0`` the solutions are ``(0, inf)``.
    """
    _require_nonnegative("rate", v)
    if not is_inhibited(law):
        raise ShapeError("invert_inhibited requires an inhibited law")
    s_peak, v_peak = law.peak_s, law.peak_rate
    if v > v_peak:
        return INF, INF
    if v == v_peak:
        return s_peak, s_peak
    if v == 0.0:
        return 0.0, INF
    if isinstance(law, Haldane):
        # roots of s^2 - (m - v) K_I / v s + K K_I = 0; the high root is
        # numerically stable, the low one follows from the product K*K_I
        disc = (law.m - v) ** 2 * law.K_I * law.K_I - 4.0 * v * v * law.K * law.K_I
        disc = max(disc, 0.0)
        high = ((law.m - v) * law.K_I + math.sqrt(disc)) / (2.0 * v)
        return law.K * law.K_I / high, high
    low = _bisect(lambda s: law.fn(s) - v, 0.0, s_peak)
    hi = 2.0 * s_peak
    while law.fn(hi) >= v:
        hi *= 2.0
        if hi > 1e300:
            return low, INF
    high = _bisect(lambda s: v - law.fn(s), s_peak, hi)
    return low, high


@dataclass(frozen=True)
class ShapeReport:
    """Outcome of sampling-based qualitative checks on a growth law.

    ``peak_bracket`` encloses the maximizer of an inhibited law;
    ``peak_curvature`` is a second-difference estimate at the peak, a
    conditioning indicator for splitting the two inverse branches (a
    near-flat peak makes the split ill-conditioned).
    """

    ok: bool
    violations: tuple[str, ...] = ()
    peak_bracket: tuple[float, float] | None = None
    peak_curvature: float | None = None


def check_hypotheses(law: GrowthLaw, grid_size: int = 1000) -> ShapeReport:
    """Sample the law on a log-spaced grid and report shape violations.

    Checks that the rate vanishes at zero, is nonnegative and finite,
    and is either strictly increasing with a finite supremum (monotone
    laws) or unimodal with a vanishing tail (inhibited laws).
    """
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    scale = getattr(law, "scale", None) or 1.0
    grid = [scale * 10.0 ** (-6.0 + 12.0 * i / (grid_size - 1)) for i in range(grid_size)]
    vals = [law(s) for s in grid]
    violations: list[str] = []

    v0 = law(0.0)
    top = max(abs(v) for v in vals) or 1.0
    if abs(v0) > 1e-12 * top:
        violations.append(f"mu(0) != 0 (got {v0!r})")
    if any(v < -1e-15 * top or not math.isfinite(v) for v in vals):
        violations.append("rate is negative or non-finite on the grid")

    diffs = [vals[i + 1] - vals[i] for i in range(grid_size - 1)]
    bracket = None
    curvature = None
    if is_monotone(law):
        if any(d <= 0 for d in diffs):
            violations.append("not strictly increasing")
        if not math.isfinite(law.sup):
            violations.append("supremum is not finite")
    else:
        sign_changes = [
            i
            for i in range(len(diffs) - 1)
            if diffs[i] > 0 >= diffs[i + 1] or diffs[i] >= 0 > diffs[i + 1]
        ]
        rises = sum(1 for d in diffs if d > 0)
        falls = sum(1 for d in diffs if d < 0)
        if not sign_changes or rises == 0 or falls == 0:
            violations.append("no interior maximum found")
        elif any(diffs[j] > 0 for j in range(sign_changes[0] + 1, len(diffs))):
            violations.append("more than one interior extremum")
        else:
            i = sign_changes[0]
            bracket = (grid[i], grid[i + 2])
            s_m = grid[i + 1]
            h = 1e-4 * s_m
            curvature = (law(s_m + h) - 2.0 * law(s_m) + law(s_m - h)) / (h * h)
        if vals[-1] > 1e-2 * top:
            violations.append("rate does not vanish at large substrate")

    return ShapeReport(
        ok=not violations,
        violations=tuple(violations),
        peak_bracket=bracket,
        peak_curvature=curvature,
    )


# ---------------------------------------------------------------------------
# numerical helpers


def _bisect(f: Callable[[float], float], a: float, b: float) -> float:
    """Root of ``f`` on [a, b] with f(a) <= 0 <= f(b), to INV_TOL abs+rel."""
    fa = f(a)
    if fa == 0.0:
        return a
    for _ in range(200):
        m = 0.5 * (a + b)
        if (b - a) <= INV_TOL * (1.0 + abs(m)):
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f: Callable[[float], float], a: float, b: float) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > PEAK_TOL * (1.0 + abs(a) + abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _fd_slope4(fn: Callable[[float], float], s: float, h: float) -> float:
    """Fourth-order central difference of the slope."""
    return (fn(s - 2 * h) - 8 * fn(s - h) + 8 * fn(s + h) - fn(s + 2 * h)) / (12 * h)


def _polish_peak(fn: Callable[[float], float], s0: float) -> float:
    h = 7.4e-4 * max(abs(s0), 1e-6)  # ~eps**(1/5), balances truncation and noise
    a = max(s0 - 50.0 * h, 0.25 * h)
    b = s0 + 50.0 * h
    fa, fb = _fd_slope4(fn, a, h), _fd_slope4(fn, b, h)
    if not (fa > 0.0 > fb):
        return s0
    for _ in range(80):
        m = 0.5 * (a + b)
        if (b - a) <= 1e-10 * (1.0 + abs(m)):
            break
        fm = _fd_slope4(fn, m, h)
        if fm > 0.0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _bracket_peak(fn: Callable[[float], float], scale: float) -> tuple[float, float]:
    grid = [scale * 10.0 ** (-8.0 + 16.0 * i / 2047) for i in range(2048)]
    vals = [fn(s) for s in grid]
    i = max(range(len(vals)), key=vals.__getitem__)
    lo = grid[i - 1] if i > 0 else 0.0
    hi = grid[i + 1] if i + 1 < len(grid) else grid[-1] * 2.0
    return lo, hi


def _central_slope(fn: Callable[[float], float], s: float, scale: float) -> float:
    h = 1e-6 * max(abs(s), 1e-3 * scale)
    if s - h < 0.0:
        h = s if s > 0.0 else 1e-6 * scale
        if h == 0.0:
            h = 1e-12
        return (fn(s + h) - fn(s)) / h
    return (fn(s + h) - fn(s - h)) / (2.0 * h)
