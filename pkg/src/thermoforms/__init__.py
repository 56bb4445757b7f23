"""Closed and exact 1-forms on the ideal-gas manifold, found by enumeration and
checked against a virtual experiment.

Typical use::

    from thermoforms import enumerate_closed_forms, entropy_theorem_set, theorem_candidates
    from thermoforms import GasSpec, make_path, run_experiment, discover

    forms = enumerate_closed_forms(bound=3)
    gas = GasSpec()
    path = make_path([(1e4, 0.0224), (2e4, 0.0224), (2e4, 0.0448)], ["isochoric", "isobaric"])
    results = discover(run_experiment(gas, path), theorem_candidates(entropy_theorem_set(), 3), gas, path=path)
"""

from .enumeration import (
    CandidateForm,
    SingletonTheorem,
    TheoremCandidate,
    entropy_theorem_set,
    enumerate_closed_forms,
    theorem_candidates,
)
from .errors import (
    DomainError,
    FormSyntaxError,
    InconsistentKind,
    NonFinite,
    NotClosed,
    NotIntegrable,
    ParseError,
    ThermoformsError,
    UnknownSymbol,
    ValidationError,
)
from .experiment import (
    ExperimentRecord,
    GasSpec,
    PathSegment,
    Trajectory,
    entropy,
    make_path,
    read_records,
    run_experiment,
    write_records,
)
from .forms import (
    OneForm,
    Potential,
    ScalarField,
    TwoForm,
    d_one,
    d_scalar,
    find_potential,
    is_closed,
    mono,
    parse_oneform,
)
from .units import Dimension, SI_SYMBOLS, exponent_unit_filter, summands_consistent
from .validate import FitReport, discover, fit_theorem, pullback_integral, segment_integrals

__version__ = "0.1.0"

__all__ = [
    "CandidateForm",
    "SingletonTheorem",
    "TheoremCandidate",
    "entropy_theorem_set",
    "enumerate_closed_forms",
    "theorem_candidates",
    "DomainError",
    "FormSyntaxError",
    "InconsistentKind",
    "NonFinite",
    "NotClosed",
    "NotIntegrable",
    "ParseError",
    "ThermoformsError",
    "UnknownSymbol",
    "ValidationError",
    "ExperimentRecord",
    "GasSpec",
    "PathSegment",
    "Trajectory",
    "entropy",
    "make_path",
    "read_records",
    "run_experiment",
    "write_records",
    "OneForm",
    "Potential",
    "ScalarField",
    "TwoForm",
    "d_one",
    "d_scalar",
    "find_potential",
    "is_closed",
    "mono",
    "parse_oneform",
    "Dimension",
    "SI_SYMBOLS",
    "exponent_unit_filter",
    "summands_consistent",
    "FitReport",
    "discover",
    "fit_theorem",
    "pullback_integral",
    "segment_integrals",
    "__version__",
]
