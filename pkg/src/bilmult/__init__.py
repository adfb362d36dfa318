"""Bilinear Fourier multiplier operators and Lorentz norms on R and T."""

from ._kernels import BACKEND
from .funcspace import (
    GridSpec,
    SampledFunction,
    TrigPolynomial,
    build_sampled,
    build_trigpoly,
    eval_trigpoly,
    named_function,
    sample_on_torus,
)
from .lorentz import (
    Domain,
    LorentzExponents,
    NormMethod,
    StepProfile,
    distribution,
    double_star,
    lorentz_norm,
    rearrangement,
    weak_norm,
)
from .operators import (
    DiscreteSymbol,
    Regularity,
    Symbol2D,
    apply_Cm,
    apply_Pm,
    dilate,
    fourier_at,
    fourier_sampled,
    make_symbol,
    modulate,
    mollify_symbol,
    periodize,
    periodize_exact,
    translate,
)
from .transference import (
    Constants,
    ExperimentReport,
    RatioStatistics,
    SweepPoint,
    check_g_regulated,
    check_lemma_realtoro,
    check_lemma_sandwich,
    check_lemma_tororealdos,
    compute_constants,
    estimate_norm_real,
    estimate_norm_torus,
    forward_bridge_gap,
    reverse_bridge_gap,
    run_transference_experiment,
    step_envelope,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GridSpec",
    "SampledFunction",
    "TrigPolynomial",
    "build_sampled",
    "build_trigpoly",
    "eval_trigpoly",
    "named_function",
    "sample_on_torus",
    "Domain",
    "LorentzExponents",
    "NormMethod",
    "StepProfile",
    "distribution",
    "double_star",
    "lorentz_norm",
    "rearrangement",
    "weak_norm",
    "DiscreteSymbol",
    "Regularity",
    "Symbol2D",
    "apply_Cm",
    "apply_Pm",
    "dilate",
    "fourier_at",
    "fourier_sampled",
    "make_symbol",
    "modulate",
    "mollify_symbol",
    "periodize",
    "periodize_exact",
    "translate",
    "Constants",
    "ExperimentReport",
    "RatioStatistics",
    "SweepPoint",
    "check_g_regulated",
    "check_lemma_realtoro",
    "check_lemma_sandwich",
    "check_lemma_tororealdos",
    "compute_constants",
    "estimate_norm_real",
    "estimate_norm_torus",
    "forward_bridge_gap",
    "reverse_bridge_gap",
    "run_transference_experiment",
    "step_envelope",
    "__version__",
]
