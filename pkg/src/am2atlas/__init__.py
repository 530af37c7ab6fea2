"""Complete steady-state, operating-diagram and bifurcation analysis of
the AM2 two-step anaerobic digestion model, with simulation oracles."""

from .bifurcations import (
    BifurcationEvent,
    Branch,
    CodimTwoCandidate,
    CriticalDilutions,
    Kind,
    ScanResult,
    classify_crossing,
    critical_dilutions,
    scan_dilution,
)
from .equilibria import (
    AuxValues,
    Label,
    ModelParams,
    OperatingPoint,
    Status,
    SteadyState,
    Verdict,
    aux,
    combined_feed,
    jacobian,
    stability_oracle,
    steady_states,
    vector_field,
)
from .kinetics import (
    GenericInhibited,
    GenericMonotone,
    Haldane,
    Monod,
    ShapeError,
    ShapeReport,
    check_hypotheses,
    growth_rate,
    invert_inhibited,
    invert_monotone,
    peak,
)
from .presets import case_a, case_b, case_c
from .regions import (
    Boundary,
    DiagramCut,
    Gamma,
    GridSpec,
    HCaseReport,
    Region,
    classify,
    cut_ds1,
    cut_s1s2,
    gamma_value,
    h_case,
    thresholds,
)
from .simulate import (
    IntegrationError,
    State,
    Terminal,
    Trajectory,
    integrate,
    integrate_batch,
    integrate_reduced,
    methane_flow,
    reduced_vector_field,
    to_reduced,
)

__version__ = "0.1.0"
