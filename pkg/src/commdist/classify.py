"""Multinomial logistic regression trained to the MAP point of a zero-mean
Gaussian prior, with an optional diagonal Laplace approximation so class
probabilities can be reported as posterior samples rather than point values.

Training is full-batch gradient descent with Armijo backtracking: slow by
design and perfectly deterministic, which is what desk-scale experiments
want. No optimizer dependency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, MissingLaplace, NonFinite
from .features import Dataset, feature_matrix

__all__ = [
    "LaplaceDiag",
    "LogRegModel",
    "train",
    "predict_proba",
    "predict_distribution",
    "evaluate",
    "save_model",
    "load_model",
]


@dataclass(frozen=True)
class LaplaceDiag:
    """Per-parameter posterior variances from the diagonal Hessian."""

    var_w: np.ndarray
    var_b: np.ndarray


@dataclass(frozen=True)
class LogRegModel:
    """Softmax classifier: p(class k | x) = softmax(w x + b)_k.

    l2 is the Gaussian prior precision on the weights (biases are free);
    laplace_cov, when present, holds the diagonal Laplace variances used by
    predict_distribution.
    """

    w: np.ndarray
    b: np.ndarray
    l2: float
    laplace_cov: Optional[LaplaceDiag] = None


def _log_softmax(z: np.ndarray) -> np.ndarray:
    m = z.max(axis=-1, keepdims=True)
    shifted = z - m
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def _unpack(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    x = feature_matrix(dataset)
    t = np.array([t for _, t in dataset.pairs])
    return x, t


def _value_and_grad(w, b, x, t, l2):
    logits = x @ w.T + b
    logp = _log_softmax(logits)
    loss = -(t * logp).sum() + 0.5 * l2 * (w * w).sum()
    p = np.exp(logp)
    resid = p - t
    grad_w = resid.T @ x + l2 * w
    grad_b = resid.sum(axis=0)
    return loss, grad_w, grad_b


def train(
    train_set: Dataset,
    l2: float = 1.0,
    max_iter: int = 1000,
    tol: float = 1e-6,
    laplace: bool = True,
) -> LogRegModel:
    """Minimize the penalized cross-entropy sum_i -log p(t_i | x_i) +
    (l2/2)||w||^2 from a zero start.

    Each iteration takes a full gradient step scaled by Armijo backtracking
    (accept t when f(theta - t g) <= f - 0.5 t ||g||^2, halving otherwise,
    starting from twice the previously accepted step). Stops at gradient norm
    <= tol or after max_iter accepted steps; the objective is monotone across
    accepted steps by construction. Raises NonFinite if the loss stops being
    a number, which in practice means absurd feature scales.
    """
    if not train_set.pairs:
        raise ValueError("training set is empty")
    if l2 < 0.0:
        raise ValueError("l2 must be >= 0")
    x, t = _unpack(train_set)
    n_class = len(train_set.class_names)
    n_feat = x.shape[1]
    w = np.zeros((n_class, n_feat))
    b = np.zeros(n_class)
    f, gw, gb = _value_and_grad(w, b, x, t, l2)
    if not np.isfinite(f):
        raise NonFinite("initial loss is not finite")
    step = 1.0
    for _ in range(max_iter):
        gnorm2 = float((gw * gw).sum() + (gb * gb).sum())
        if gnorm2 <= tol * tol:
            break
        trial = 2.0 * step
        while True:
            w_new = w - trial * gw
            b_new = b - trial * gb
            f_new, gw_new, gb_new = _value_and_grad(w_new, b_new, x, t, l2)
            if np.isfinite(f_new) and f_new <= f - 0.5 * trial * gnorm2:
                break
            trial *= 0.5
            if trial < 1e-20:
                # Gradient too shallow to improve in float64: we are done.
                w_new, b_new, f_new, gw_new, gb_new = w, b, f, gw, gb
                break
        if f_new == f and trial < 1e-20:
            break
        w, b, f, gw, gb = w_new, b_new, f_new, gw_new, gb_new
        step = trial
        if not np.isfinite(f):
            raise NonFinite("loss diverged during training")

    cov = None
    if laplace:
        logits = x @ w.T + b
        p = np.exp(_log_softmax(logits))
        s = p * (1.0 - p)  # (P, K)
        h_w = s.T @ (x * x) + l2  # (K, F)
        h_b = s.sum(axis=0)  # (K,)
        # Flat directions (separable data, tiny l2) get a floor instead of an
        # infinite variance.
        cov = LaplaceDiag(
            var_w=1.0 / np.maximum(h_w, 1e-12),
            var_b=1.0 / np.maximum(h_b, 1e-12),
        )
    return LogRegModel(w=w, b=b, l2=float(l2), laplace_cov=cov)


def predict_proba(model: LogRegModel, x) -> np.ndarray:
    """softmax(w x + b): strictly positive, sums to one."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.w.shape[1],):
        raise DimensionMismatch(
            f"input length {x.shape} does not match model width {model.w.shape[1]}"
        )
    return np.exp(_log_softmax(model.w @ x + model.b))


def predict_distribution(
    model: LogRegModel, x, samples: int, seed: int
) -> np.ndarray:
    """Class-probability samples under the diagonal Laplace posterior.

    Draws `samples` parameter vectors around the MAP point and pushes each
    through the softmax; returns shape (K, samples). With zero variances all
    samples equal predict_proba exactly.
    """
    if model.laplace_cov is None:
        raise MissingLaplace("model was trained without a Laplace factor")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    x = np.asarray(x, dtype=float)
    if x.shape != (model.w.shape[1],):
        raise DimensionMismatch(
            f"input length {x.shape} does not match model width {model.w.shape[1]}"
        )
    rng = np.random.default_rng(seed)
    sd_w = np.sqrt(model.laplace_cov.var_w)
    sd_b = np.sqrt(model.laplace_cov.var_b)
    k, g = model.w.shape
    eps_w = rng.standard_normal((samples, k, g))
    eps_b = rng.standard_normal((samples, k))
    logits = (model.w + eps_w * sd_w) @ x + model.b + eps_b * sd_b
    return np.exp(_log_softmax(logits)).T


def evaluate(model: LogRegModel, test: Dataset) -> tuple[float, np.ndarray]:
    """Argmax accuracy and the confusion matrix (rows = true class).

    Ties on the maximum probability resolve to the lowest class index, so
    evaluation is deterministic even for degenerate models.
    """
    if not test.pairs:
        raise ValueError("test set is empty")
    k = len(test.class_names)
    confusion = np.zeros((k, k), dtype=int)
    for x, t in test.pairs:
        pred = int(np.argmax(predict_proba(model, x)))
        true = int(np.argmax(t))
        confusion[true, pred] += 1
    accuracy = float(np.trace(confusion)) / len(test.pairs)
    return accuracy, confusion


def save_model(
    model: LogRegModel,
    path,
    class_names,
    basis_hash: Optional[str] = None,
) -> None:
    """Serialize to JSON (full precision via repr round-trip)."""
    doc = {
        "format": "commdist-logreg-v1",
        "class_names": list(class_names),
        "l2": model.l2,
        "w": [[float(v) for v in row] for row in model.w],
        "b": [float(v) for v in model.b],
        "laplace_var_w": None,
        "laplace_var_b": None,
        "basis_hash": basis_hash,
    }
    if model.laplace_cov is not None:
        doc["laplace_var_w"] = [
            [float(v) for v in row] for row in model.laplace_cov.var_w
        ]
        doc["laplace_var_b"] = [float(v) for v in model.laplace_cov.var_b]
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def load_model(path) -> tuple[LogRegModel, tuple[str, ...], Optional[str]]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != "commdist-logreg-v1":
        raise ValueError(f"{path}: not a commdist model file")
    cov = None
    if doc.get("laplace_var_w") is not None:
        cov = LaplaceDiag(
            var_w=np.array(doc["laplace_var_w"]),
            var_b=np.array(doc["laplace_var_b"]),
        )
    model = LogRegModel(
        w=np.array(doc["w"]),
        b=np.array(doc["b"]),
        l2=float(doc["l2"]),
        laplace_cov=cov,
    )
    return model, tuple(doc["class_names"]), doc.get("basis_hash")
