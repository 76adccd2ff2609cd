"""Rotation-group machinery: Rodrigues exponential, matrix logarithm, the two
classical rotation metrics, and the canonical-representative search over
eigenvector column permutations and sign flips.

Rotations are plain (3,3) numpy arrays; `check_rotation` is the validity
gate used by the log.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotARotation
from .linalg3 import EigenDecomp

__all__ = [
    "AxisAngle",
    "skew",
    "axis_angle",
    "check_rotation",
    "rodrigues_exp",
    "so3_log",
    "d_riemann",
    "d_chordal",
    "signed_permutations",
    "min_rotation_distance",
]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class AxisAngle:
    """Axis-angle parameterization (k, theta, K) with R = exp(theta K).

    k is a unit vector, theta in [0, pi], and K the skew matrix with
    K x = k cross x, so ||K|| = sqrt(2).
    """

    k: np.ndarray
    theta: float
    K: np.ndarray


def skew(v) -> np.ndarray:
    """Skew matrix K with K x = v cross x."""
    v = np.asarray(v, dtype=float)
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def axis_angle(axis, theta: float) -> AxisAngle:
    """Normalize `axis` and package it with the angle and its skew matrix."""
    k = np.asarray(axis, dtype=float)
    n = float(np.linalg.norm(k))
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("rotation axis must be a nonzero finite vector")
    k = k / n
    return AxisAngle(k=k, theta=float(theta), K=skew(k))


def check_rotation(r, tol: float = 1e-6) -> np.ndarray:
    """Validate orthogonality and det = +1 within tol; return the array."""
    m = np.asarray(r, dtype=float)
    if m.shape != (3, 3):
        raise NotARotation(f"expected a 3x3 array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NotARotation("rotation entries must be finite")
    ortho = float(np.abs(m.T @ m - np.eye(3)).max())
    det = float(np.linalg.det(m))
    if ortho > tol or abs(det - 1.0) > tol:
        raise NotARotation(
            f"orthogonality defect {ortho:.3e} or det {det:.6f} out of tolerance"
        )
    return m


def rodrigues_exp(axis: AxisAngle) -> np.ndarray:
    """R = I + sin(theta) K + (1 - cos(theta)) K^2."""
    k = axis.K
    return np.eye(3) + math.sin(axis.theta) * k + (1.0 - math.cos(axis.theta)) * (k @ k)


def so3_log(r) -> AxisAngle:
    """Principal logarithm of a rotation as an AxisAngle.

    theta = atan2(||R - R^T||_F / (2 sqrt 2), (tr R - 1)/2), which equals the
    clamped-arccos angle but keeps full precision near theta = 0. The axis
    comes from the skew part away from theta = pi (normalizing the skew
    vector directly, which stays accurate however small theta gets); at the
    identity itself the axis is the fixed convention (0,0,1), and within
    1e-5 of pi it is extracted from the symmetric part k k^T = (K^2 + I).
    """
    m = check_rotation(r)
    w = 0.5 * np.array(
        [m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]]
    )
    sin_theta = float(np.linalg.norm(w))
    cos_theta = 0.5 * (float(np.trace(m)) - 1.0)
    theta = math.atan2(sin_theta, cos_theta)
    if sin_theta == 0.0 and theta < 1.0:
        k = np.array([0.0, 0.0, 1.0])
        return AxisAngle(k=k, theta=theta, K=skew(k))
    if theta < math.pi - 1e-5:
        k = w / sin_theta
        k = k / float(np.linalg.norm(k))
        return AxisAngle(k=k, theta=theta, K=skew(k))
    # Near pi: sin(theta) cancels, but the symmetric part still carries the
    # axis through I + (1 - cos) (k k^T - I).
    g = (0.5 * (m + m.T) - np.eye(3)) / (1.0 - cos_theta) + np.eye(3)
    j = int(np.argmax(np.diag(g)))
    kj = math.sqrt(max(float(g[j, j]), 0.0))
    k = g[:, j] / kj
    k = k / float(np.linalg.norm(k))
    if sin_theta > 1e-12:
        if float(np.dot(w, k)) < 0.0:
            k = -k
    else:
        big = int(np.argmax(np.abs(k)))
        if k[big] < 0.0:
            k = -k
    return AxisAngle(k=k, theta=theta, K=skew(k))


def _theta_of(m: np.ndarray) -> float:
    """Rotation angle of a trusted rotation array (no validity check)."""
    s2 = (
        (m[2, 1] - m[1, 2]) ** 2
        + (m[0, 2] - m[2, 0]) ** 2
        + (m[1, 0] - m[0, 1]) ** 2
    )
    sin_theta = 0.5 * math.sqrt(float(s2))
    cos_theta = 0.5 * (float(m[0, 0] + m[1, 1] + m[2, 2]) - 1.0)
    return math.atan2(sin_theta, cos_theta)


def d_riemann(qa, qb) -> float:
    """Geodesic angle (1/sqrt 2) ||log(QA QB^T)|| = |theta|, in [0, pi]."""
    qa = check_rotation(qa)
    qb = check_rotation(qb)
    return _theta_of(qa @ qb.T)


def d_chordal(qa, qb) -> float:
    """Straight-line distance ||QA - QB||_F = 2 sqrt(2) sin(|theta|/2)."""
    qa = np.asarray(qa, dtype=float)
    qb = np.asarray(qb, dtype=float)
    d = qa - qb
    return float(np.sqrt((d * d).sum()))


def signed_permutations() -> tuple[np.ndarray, ...]:
    """The 24 signed 3x3 permutation matrices with determinant +1.

    Even permutations pair with sign patterns of product +1 and odd ones with
    product -1, so exactly half of the 48 combinations survive. Enumeration
    order is fixed (itertools order) to make tie-breaks deterministic.
    """
    mats = []
    for perm in itertools.permutations((0, 1, 2)):
        p = np.zeros((3, 3))
        for col, row in enumerate(perm):
            p[row, col] = 1.0
        parity = 1.0 if perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1.0
        for signs in itertools.product((1.0, -1.0), repeat=3):
            if parity * signs[0] * signs[1] * signs[2] != 1.0:
                continue
            mats.append(p * np.array(signs)[np.newaxis, :])
    return tuple(mats)


_SIGNED_PERMS = signed_permutations()


def min_rotation_distance(
    ea: EigenDecomp, eb: EigenDecomp, metric: str = "riemann"
) -> tuple[float, np.ndarray, np.ndarray]:
    """Distance between eigenvector frames minimized over representatives.

    An eigendecomposition determines its rotation only up to column
    permutations and det-preserving sign flips, so the metric is evaluated
    against all 24 signed-permutation images of Q_B and the smallest value
    wins (first winner kept on ties). Returns (value, Q_A, best Q_B).
    """
    if metric not in ("riemann", "chordal"):
        raise ValueError(f"unknown metric {metric!r}")
    qa = check_rotation(ea.q)
    qb = check_rotation(eb.q)
    # Signed permutations are exactly orthogonal, so candidates inherit
    # Q_B's validity and need no per-candidate checks.
    best_val = math.inf
    best_q = qb
    if metric == "riemann":
        qa_t = qa.T
        for t in _SIGNED_PERMS:
            cand = qb @ t
            val = _theta_of(cand @ qa_t)
            if val < best_val:
                best_val = val
                best_q = cand
    else:
        for t in _SIGNED_PERMS:
            cand = qb @ t
            d = qa - cand
            val = float(np.sqrt((d * d).sum()))
            if val < best_val:
                best_val = val
                best_q = cand
    return best_val, qa, best_q
