"""Commutation distances for symmetric 3x3 tensors.

The package measures how far two real symmetric 3x3 matrices are from
commuting, either through their eigenvector frames (rotation distances on
SO(3)) or through eigenvalues alone (commutator-norm surrogates and the
angle brackets built on them), and applies those measurements to
spectral-signature classification.
"""

from .classify import (
    LaplaceDiag,
    LogRegModel,
    evaluate,
    load_model,
    predict_distribution,
    predict_proba,
    save_model,
    train,
)
from .commute import (
    DistanceReport,
    d_commutator,
    d_E_pm,
    distance_report,
    hoffman_wielandt_gap,
    m_matrix,
    n_matrix,
    theta_bracket_dC,
    theta_bracket_dE,
    theta_from_dC,
    theta_from_dE,
)
from .errors import (
    CommdistError,
    DegenerateData,
    DimensionMismatch,
    ExcludedFrequency,
    InputNotFinite,
    InsufficientSamples,
    MissingFrequency,
    MissingLaplace,
    NonConvergence,
    NonFinite,
    NonMonotoneFrequency,
    NotARotation,
    NotSymmetric,
    SchemaError,
    TooFewSamples,
)
from .features import (
    Dataset,
    ReducedBasis,
    apply_reducer,
    apply_zscore,
    basis_hash,
    build_feature_vector,
    feature_matrix,
    fit_reducer,
    fit_zscore,
    make_dataset,
    one_hot,
    principal_invariants,
    reduce,
    split,
)
from .linalg3 import (
    EigenDecomp,
    SymMat3,
    commutator,
    deviator,
    eigh3_cardano,
    eigh3_jacobi,
    eigvals3,
    frobenius_norm,
    min_relative_gap,
    relative_gap,
)
from .so3 import (
    AxisAngle,
    axis_angle,
    check_rotation,
    d_chordal,
    d_riemann,
    min_rotation_distance,
    rodrigues_exp,
    signed_permutations,
    skew,
    so3_log,
)
from .spectral import (
    SignatureCurves,
    SpectralSignature,
    add_noise,
    commutator_signature,
    distance_signature,
    load_signature,
    rtilde,
    save_signature,
    scaling_exponent,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # linalg3
    "SymMat3", "EigenDecomp", "commutator", "deviator", "eigvals3",
    "eigh3_cardano", "eigh3_jacobi", "frobenius_norm",
    "min_relative_gap", "relative_gap",
    # so3
    "AxisAngle", "axis_angle", "check_rotation", "d_chordal", "d_riemann",
    "min_rotation_distance", "rodrigues_exp", "signed_permutations",
    "skew", "so3_log",
    # commute
    "DistanceReport", "d_commutator", "d_E_pm", "distance_report",
    "hoffman_wielandt_gap", "m_matrix", "n_matrix",
    "theta_bracket_dC", "theta_bracket_dE", "theta_from_dC", "theta_from_dE",
    # spectral
    "SpectralSignature", "SignatureCurves", "add_noise",
    "commutator_signature", "distance_signature", "load_signature",
    "rtilde", "save_signature", "scaling_exponent",
    # features
    "Dataset", "ReducedBasis", "apply_reducer", "apply_zscore", "basis_hash",
    "build_feature_vector", "feature_matrix", "fit_reducer", "fit_zscore",
    "make_dataset", "one_hot", "principal_invariants", "reduce", "split",
    # classify
    "LaplaceDiag", "LogRegModel", "evaluate", "load_model",
    "predict_distribution", "predict_proba", "save_model", "train",
    # errors
    "CommdistError", "DegenerateData", "DimensionMismatch",
    "ExcludedFrequency", "InputNotFinite", "InsufficientSamples",
    "MissingFrequency", "MissingLaplace", "NonConvergence", "NonFinite",
    "NonMonotoneFrequency", "NotARotation", "NotSymmetric", "SchemaError",
    "TooFewSamples",
]
