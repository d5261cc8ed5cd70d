"""Information-driven feature selection for visual localization over a prediction horizon."""

from featsel.motion import HorizonPrior, MotionModel, propagate_prior
from featsel.numerics import (
    IllConditionedError,
    NormalizationError,
    NotPositiveDefiniteError,
    cholesky_logdet,
    eig_extremes,
    schur_complement,
    skew,
)
from featsel.selection import (
    GuardRefusal,
    Objective,
    SelectionResult,
    brute_force,
    evaluate_measures,
    greedy,
    stochastic_greedy,
    surrogate_greedy,
)
from featsel.vision import (
    CameraRig,
    FeatureInfo,
    FeatureTrack,
    PoseSequence,
    TriangulationError,
    build_FE,
    feature_information,
    feature_trace_shortcut,
    make_track,
    simulate_visibility,
)

__version__ = "0.1.0"

__all__ = [
    "CameraRig",
    "FeatureInfo",
    "FeatureTrack",
    "GuardRefusal",
    "HorizonPrior",
    "IllConditionedError",
    "MotionModel",
    "NormalizationError",
    "NotPositiveDefiniteError",
    "Objective",
    "PoseSequence",
    "SelectionResult",
    "TriangulationError",
    "brute_force",
    "build_FE",
    "cholesky_logdet",
    "eig_extremes",
    "evaluate_measures",
    "feature_information",
    "feature_trace_shortcut",
    "greedy",
    "make_track",
    "propagate_prior",
    "schur_complement",
    "simulate_visibility",
    "skew",
    "stochastic_greedy",
    "surrogate_greedy",
]
