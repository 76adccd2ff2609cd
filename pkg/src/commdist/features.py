"""Feature vectors from spectral signatures, truncated-SVD reduction, and
dataset assembly.

A feature vector over M selected frequencies has length F = 7M, laid out in
contiguous blocks: the three principal invariants of Rtilde at every
frequency (3M entries), the same for I (3M), then the eigenvalue-only angle
estimate between Rtilde and I at each frequency (M). Every entry is invariant
under a common rotation of the object, which is the whole point.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .commute import theta_from_dE
from .errors import (
    DegenerateData,
    DimensionMismatch,
    ExcludedFrequency,
    MissingFrequency,
    TooFewSamples,
)
from .linalg3 import SymMat3, eigvals3, min_relative_gap
from .spectral import SpectralSignature, rtilde

__all__ = [
    "Dataset",
    "ReducedBasis",
    "principal_invariants",
    "build_feature_vector",
    "one_hot",
    "make_dataset",
    "feature_matrix",
    "label_indices",
    "fit_reducer",
    "reduce",
    "apply_reducer",
    "split",
    "fit_zscore",
    "apply_zscore",
    "basis_hash",
]


@dataclass(frozen=True)
class ReducedBasis:
    """Truncated left singular basis of the feature matrix.

    u_g has orthonormal columns (F x G); sigma holds the G retained singular
    values, descending; truncation_ratio is the sigma_n / sigma_1 cutoff that
    produced G.
    """

    u_g: np.ndarray
    sigma: np.ndarray
    truncation_ratio: float


@dataclass(frozen=True)
class Dataset:
    """Feature/one-hot pairs plus class names and an optional reducer.

    pairs[p] = (x_p, t_p) with every x_p the same length and every t_p a
    one-hot row over class_names.
    """

    pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    class_names: tuple[str, ...]
    reducer: Optional[ReducedBasis] = None

    def __post_init__(self):
        k = len(self.class_names)
        if not self.pairs:
            return
        f = len(self.pairs[0][0])
        for p, (x, t) in enumerate(self.pairs):
            if len(x) != f:
                raise DimensionMismatch(
                    f"sample {p}: feature length {len(x)} != {f}"
                )
            if len(t) != k or not np.all((t == 0.0) | (t == 1.0)) or t.sum() != 1.0:
                raise ValueError(f"sample {p}: encoding is not one-hot over {k} classes")


def principal_invariants(a: SymMat3) -> tuple[float, float, float]:
    """(I1, I2, I3) = (tr A, (tr^2 A - tr A^2)/2, det A).

    These are the elementary symmetric polynomials of the eigenvalues, hence
    invariant under conjugation by any rotation.
    """
    i1 = a.trace()
    tr_sq = (
        a.a11 * a.a11 + a.a22 * a.a22 + a.a33 * a.a33
        + 2.0 * (a.a12 * a.a12 + a.a13 * a.a13 + a.a23 * a.a23)
    )
    i2 = 0.5 * (i1 * i1 - tr_sq)
    i3 = (
        a.a11 * (a.a22 * a.a33 - a.a23 * a.a23)
        - a.a12 * (a.a12 * a.a33 - a.a23 * a.a13)
        + a.a13 * (a.a12 * a.a23 - a.a22 * a.a13)
    )
    return i1, i2, i3


def _match_frequency(grid: tuple[float, ...], w: float) -> int:
    tol = 1e-12 * max(1.0, abs(w))
    for idx, g in enumerate(grid):
        if abs(g - w) <= tol:
            return idx
    raise MissingFrequency(f"frequency {w!r} not on the signature grid")


def build_feature_vector(
    sig: SpectralSignature, frequencies, tol_gap: float = 1e-8
) -> np.ndarray:
    """Assemble the 7M-entry feature vector for the requested frequencies.

    Layout for M frequencies indexed m = 0..M-1 and invariants j = 1..3:
    x[(j-1)*M + m] = I_j(Rtilde(w_m)), x[3M + (j-1)*M + m] = I_j(I(w_m)),
    x[6M + m] = theta_E lower bound for (Rtilde(w_m), I(w_m)). A requested
    frequency with a repeated spectrum in either tensor raises
    ExcludedFrequency: such entries would be garbage, not features.
    """
    freqs = [float(w) for w in frequencies]
    m_count = len(freqs)
    if m_count == 0:
        raise MissingFrequency("at least one frequency is required")
    x = np.empty(7 * m_count)
    for m, w in enumerate(freqs):
        idx = _match_frequency(sig.omega, w)
        rt = rtilde(sig, idx)
        im = sig.i[idx]
        if (
            min_relative_gap(eigvals3(rt)) < tol_gap
            or min_relative_gap(eigvals3(im)) < tol_gap
        ):
            raise ExcludedFrequency(
                f"{sig.object_id}: repeated spectrum at omega = {w!r}"
            )
        inv_rt = principal_invariants(rt)
        inv_im = principal_invariants(im)
        for j in range(3):
            x[j * m_count + m] = inv_rt[j]
            x[3 * m_count + j * m_count + m] = inv_im[j]
        x[6 * m_count + m] = theta_from_dE(rt, im, "lb")
    return x


def one_hot(index: int, n_classes: int) -> np.ndarray:
    t = np.zeros(n_classes)
    t[index] = 1.0
    return t


def make_dataset(features, labels, class_names) -> Dataset:
    """Bundle parallel feature vectors and integer class labels."""
    class_names = tuple(class_names)
    if len(features) != len(labels):
        raise DimensionMismatch(
            f"{len(features)} feature vectors vs {len(labels)} labels"
        )
    pairs = []
    for x, lab in zip(features, labels):
        lab = int(lab)
        if not 0 <= lab < len(class_names):
            raise ValueError(f"label {lab} outside 0..{len(class_names) - 1}")
        pairs.append((np.asarray(x, dtype=float), one_hot(lab, len(class_names))))
    return Dataset(pairs=tuple(pairs), class_names=class_names)


def feature_matrix(dataset: Dataset) -> np.ndarray:
    """Samples as rows: shape (P, F)."""
    return np.array([x for x, _ in dataset.pairs])


def label_indices(dataset: Dataset) -> np.ndarray:
    return np.array([int(np.argmax(t)) for _, t in dataset.pairs])


def fit_reducer(dataset: Dataset, truncation_ratio: float = 1e-9) -> ReducedBasis:
    """Thin SVD of the F x P matrix whose columns are the feature vectors;
    keep singular directions with sigma_n / sigma_1 > truncation_ratio."""
    if len(dataset.pairs) < 2:
        raise ValueError("need at least 2 samples to fit a reducer")
    if not 0.0 < truncation_ratio < 1.0:
        raise ValueError(f"truncation_ratio must be in (0, 1), got {truncation_ratio!r}")
    d = feature_matrix(dataset).T  # F x P
    u, s, _ = np.linalg.svd(d, full_matrices=False)
    if s[0] == 0.0:
        raise DegenerateData("feature matrix is identically zero")
    g = int(np.sum(s / s[0] > truncation_ratio))
    return ReducedBasis(
        u_g=u[:, :g].copy(), sigma=s[:g].copy(), truncation_ratio=truncation_ratio
    )


def reduce(basis: ReducedBasis, x) -> np.ndarray:
    """Project one feature vector onto the reduced basis: U_G^T x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.u_g.shape[0],):
        raise DimensionMismatch(
            f"feature length {x.shape} does not match basis {basis.u_g.shape[0]}"
        )
    return basis.u_g.T @ x


def apply_reducer(dataset: Dataset, basis: ReducedBasis) -> Dataset:
    """Dataset with every feature vector reduced and the basis attached."""
    pairs = tuple((reduce(basis, x), t.copy()) for x, t in dataset.pairs)
    return Dataset(pairs=pairs, class_names=dataset.class_names, reducer=basis)


def split(dataset: Dataset, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic stratified 3:1 split.

    Each class is shuffled with the seeded generator and one quarter (rounded
    down, i.e. toward train) becomes test. Original sample order is preserved
    inside each side. Classes with fewer than 4 samples cannot honor 3:1.
    """
    labels = label_indices(dataset)
    rng = np.random.default_rng(seed)
    test_idx: set[int] = set()
    for c, name in enumerate(dataset.class_names):
        members = np.flatnonzero(labels == c)
        if len(members) < 4:
            raise TooFewSamples(
                f"class {name!r} has {len(members)} samples; 3:1 needs >= 4"
            )
        perm = rng.permutation(len(members))
        n_test = len(members) // 4
        test_idx.update(int(members[p]) for p in perm[:n_test])
    train_pairs = tuple(
        pair for p, pair in enumerate(dataset.pairs) if p not in test_idx
    )
    test_pairs = tuple(
        pair for p, pair in enumerate(dataset.pairs) if p in test_idx
    )
    train = Dataset(train_pairs, dataset.class_names, dataset.reducer)
    test = Dataset(test_pairs, dataset.class_names, dataset.reducer)
    return train, test


def fit_zscore(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and standard deviation (floored at 1e-12)."""
    x = feature_matrix(dataset)
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    return mu, np.maximum(sd, 1e-12)


def apply_zscore(dataset: Dataset, mu: np.ndarray, sd: np.ndarray) -> Dataset:
    pairs = tuple(((x - mu) / sd, t.copy()) for x, t in dataset.pairs)
    return Dataset(pairs=pairs, class_names=dataset.class_names, reducer=dataset.reducer)


def basis_hash(basis: ReducedBasis) -> str:
    """Stable identity for a fitted basis (ties a saved model to it)."""
    h = hashlib.sha256()
    h.update(b"commdist-basis-v1")
    h.update(str(basis.u_g.shape).encode())
    for v in basis.u_g.flat:
        h.update(("%.17g" % v).encode())
    for v in basis.sigma:
        h.update(("%.17g" % v).encode())
    return h.hexdigest()
