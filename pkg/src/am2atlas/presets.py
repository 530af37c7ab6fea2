"""Built-in parameter presets.

Three nominal parameter sets sharing everything except the maximum
acidogenic growth rate m1, chosen so that the coexistence threshold h2
exhibits each of its three qualitative shapes: caseA (m1 = 0.6,
decreasing), caseB (m1 = 0.5, non-monotone) and caseC (m1 = 0.4, the
acidogenic limit below the methanogenic fold).  Units: S1 in g/L, S2 in
mmol/L, rates in 1/d.  k4 only scales the methane flow and defaults
to 1.
"""

from __future__ import annotations

from .equilibria import ModelParams
from .kinetics import Haldane, Monod


def _params(m1: float, k4: float = 1.0) -> ModelParams:
    return ModelParams(
        mu1=Monod(m=m1, K=2.1),
        mu2=Haldane(m=0.95, K=24.0, K_I=55.0),
        k1=25.0,
        k2=250.0,
        k3=268.0,
        alpha=0.5,
        k4=k4,
    )


def case_a(k4: float = 1.0) -> ModelParams:
    return _params(0.6, k4)


def case_b(k4: float = 1.0) -> ModelParams:
    return _params(0.5, k4)


def case_c(k4: float = 1.0) -> ModelParams:
    return _params(0.4, k4)


PRESETS = {"caseA": case_a, "caseB": case_b, "caseC": case_c}


def get(name: str) -> ModelParams:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
