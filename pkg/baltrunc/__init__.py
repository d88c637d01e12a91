"""Balanced truncation for continuous-time LTI state-space models."""
from .analysis import (
    BoundVerification,
    FrequencyResponse,
    Signal,
    frequency_sweep,
    hinf_error_estimate,
    l2_norm,
    simulate,
    sinusoid_response,
    verify_bound,
)
from .generators import gen_example
from .gramians import GramianPair, finite_gramians, infinite_gramians, lyapunov_solve
from .model_io import load_model, load_report, load_signal, save_model, save_report, save_signal
from .realization import KalmanDecomposition, kalman_decompose, minimal_realization
from .reduction import (
    BalancedRealization,
    ErrorBudget,
    ExplicitOrder,
    ReductionOptions,
    ReductionReport,
    RelativeFloor,
    balance,
    balanced_truncation,
    hankel_singular_values,
    select_order,
    truncate,
)
from .statespace import SimilarityTransform, StateSpaceModel, apply_similarity, is_stable, transfer_at
from .version import __version__
