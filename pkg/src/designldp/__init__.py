"""Local differential privacy protocols built from block designs.

Exact-rational construction of randomisers, unbiased estimators, variances
and optimality bounds, plus a Monte Carlo harness to check them.
"""
from .designs import (
    DesignKind,
    DesignProfile,
    SetSystem,
    catalog_lookup,
    catalog_names,
    classify,
    delete_point,
    dual,
    incidence_matrix,
    k_subset_design,
    validate_set_system,
)
from .estimators import (
    CountVector,
    EstimatorMatrix,
    Provenance,
    closed_form_estimator,
    cn_optimal_estimator,
    estimate_from_counts,
    invert_ci_dj,
    moore_penrose,
    qtq_closed_form,
)
from .linalg import RationalMatrix
from .protocol import (
    ProtocolParams,
    build_tpm,
    params_from_gamma,
    params_from_theta,
    pure_check,
    qstar_bruteforce,
    verify_ldp,
)
from .risk import (
    Distribution,
    cn_lower_bound,
    cn_trace_bound,
    communication_cost,
    induced_distribution,
    risk_report,
    risk_trace,
    trace_uniform_bibd,
    variance_coordinate,
    variance_pnl_bibd,
    variance_pnl_rlambda,
    variance_total,
)
from .simulate import make_randomiser, monte_carlo, perturb, run_trial

__version__ = "0.1.0"
