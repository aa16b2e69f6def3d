"""Finite-blocklength analysis of Schmidt-spectrum conversion.

Compressed spectra and sequence models, self-information tail functionals
and entropy-rate proxies, greedy conversion maps with majorization
certificates and fidelity bounds, and randomized verification suites for the
operator inequalities behind the asymptotic theory.
"""

from .convert import (
    ConversionReport,
    RateVerdict,
    concentration_experiment,
    dilution_experiment,
    direct_convert,
)
from .hermitian import (
    Contraction,
    CPTPMap,
    HermitianOperator,
    StochasticMap,
    SuiteReport,
    TransposeMix,
    VerifyResult,
    apply_tp,
    jordan,
    run_all_suites,
    run_suite,
    trace_plus,
    verify_bd_sandwich,
    verify_continuity,
    verify_lemma_bdm,
    verify_lemma_np,
    verify_product_tails,
    verify_tail_monotonicity,
)
from .infospec import (
    RateCurve,
    RateQuery,
    TailCurve,
    cdf_selfinfo,
    entropy_proxies,
    rate_curve,
    tail_C,
    tail_C_spectrum,
    tail_curve,
    tail_D,
    tail_D_spectrum,
)
from .majorize import (
    BistochasticMatrix,
    DeterministicMap,
    kh_certificate,
    kh_residual,
    majorizes,
    prefix_gap_min,
    pushforward,
    transfer_matrix,
)
from .randgen import (
    FiberAssignment,
    MapSynthesisReport,
    brute_force_optimal,
    convergence_experiment,
    synthesize_map,
)
from .spectra import (
    IID,
    AmplitudeMatrix,
    BudgetExceededError,
    Explicit,
    MaxEnt,
    MaxEntExplicit,
    Mixture,
    SequenceModel,
    Spectrum,
    entropy,
    expand,
    generate,
    iid_spectrum,
    load_model,
    maxent_rank,
    maxent_spectrum,
    model_from_json_dict,
    schmidt_from_amplitudes,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeMatrix",
    "BistochasticMatrix",
    "BudgetExceededError",
    "CPTPMap",
    "Contraction",
    "ConversionReport",
    "DeterministicMap",
    "Explicit",
    "FiberAssignment",
    "HermitianOperator",
    "IID",
    "MapSynthesisReport",
    "MaxEnt",
    "MaxEntExplicit",
    "Mixture",
    "RateCurve",
    "RateQuery",
    "RateVerdict",
    "SequenceModel",
    "Spectrum",
    "StochasticMap",
    "SuiteReport",
    "TailCurve",
    "TransposeMix",
    "VerifyResult",
    "apply_tp",
    "brute_force_optimal",
    "cdf_selfinfo",
    "concentration_experiment",
    "convergence_experiment",
    "dilution_experiment",
    "direct_convert",
    "entropy",
    "entropy_proxies",
    "expand",
    "generate",
    "iid_spectrum",
    "jordan",
    "kh_certificate",
    "kh_residual",
    "load_model",
    "majorizes",
    "maxent_rank",
    "maxent_spectrum",
    "model_from_json_dict",
    "prefix_gap_min",
    "pushforward",
    "rate_curve",
    "run_all_suites",
    "run_suite",
    "schmidt_from_amplitudes",
    "synthesize_map",
    "tail_C",
    "tail_C_spectrum",
    "tail_D",
    "tail_D_spectrum",
    "tail_curve",
    "trace_plus",
    "transfer_matrix",
    "verify_bd_sandwich",
    "verify_continuity",
    "verify_lemma_bdm",
    "verify_lemma_np",
    "verify_product_tails",
    "verify_tail_monotonicity",
]
