"""Commutation distances between symmetric 3x3 matrices.

Alongside the classical eigenvector-based rotation metrics, this module
implements the eigenvalue-only measures: the commutator norm d_C, the
Hoffman-Wielandt residuals d_E+/-, the diagonal normalizing matrices M and N
built from pairwise eigenvalue gaps, and the angle estimates obtained by
normalizing those measures. The estimates need no eigenvectors at all, which
is what makes them robust exactly where eigenvector computations degrade.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .linalg3 import (
    SymMat3,
    commutator,
    eigh3_cardano,
    eigvals3,
    frobenius_norm,
    min_relative_gap,
)
from .so3 import min_rotation_distance

__all__ = [
    "DistanceReport",
    "d_commutator",
    "hoffman_wielandt_gap",
    "d_E_pm",
    "m_matrix",
    "n_matrix",
    "theta_from_dE",
    "theta_from_dC",
    "theta_bracket_dE",
    "theta_bracket_dC",
    "distance_report",
]

_PERMS = tuple(itertools.permutations((0, 1, 2)))
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class DistanceReport:
    """Every distance measure for one (A, B) pair, plus degeneracy context.

    d_chordal_scaled is the chordal metric divided by sqrt(2) so that it and
    d_riemann agree to O(theta^3) at small angles. m_diag entries are <= 0 and
    n_diag entries >= 0 by construction; degenerate_flags marks near-repeated
    eigenvalues in A respectively B (the angle estimates lose meaning there,
    but are still reported).
    """

    d_riemann: float
    d_chordal_scaled: float
    d_C_raw: float
    d_E_plus: float
    d_E_minus: float
    theta_E_lb: float
    theta_E_ub: float
    theta_C_lb: float
    theta_C_ub: float
    m_diag: tuple[float, float, float]
    n_diag: tuple[float, float, float]
    degenerate_flags: tuple[bool, bool]

    def to_dict(self) -> dict:
        return {
            "d_riemann": self.d_riemann,
            "d_chordal_scaled": self.d_chordal_scaled,
            "d_C_raw": self.d_C_raw,
            "d_E_plus": self.d_E_plus,
            "d_E_minus": self.d_E_minus,
            "theta_E_lb": self.theta_E_lb,
            "theta_E_ub": self.theta_E_ub,
            "theta_C_lb": self.theta_C_lb,
            "theta_C_ub": self.theta_C_ub,
            "m_diag": list(self.m_diag),
            "n_diag": list(self.n_diag),
            "degenerate_flags": list(self.degenerate_flags),
        }


def d_commutator(a: SymMat3, b: SymMat3) -> float:
    """||[A, B]||: zero iff A and B are simultaneously diagonalizable."""
    return frobenius_norm(commutator(a, b))


def _perm_gaps(lam_a, lam_b):
    for perm in _PERMS:
        yield (
            (lam_a[0] - lam_b[perm[0]]) ** 2
            + (lam_a[1] - lam_b[perm[1]]) ** 2
            + (lam_a[2] - lam_b[perm[2]]) ** 2
        )


def hoffman_wielandt_gap(a: SymMat3, b: SymMat3) -> tuple[float, float]:
    """(min, max) over all six pairings of the squared eigenvalue mismatch.

    The minimum is the classical lower bound min_gap <= ||A - B||^2; the
    maximum gives the matching upper bound.
    """
    lam_a = eigvals3(a)
    lam_b = eigvals3(b)
    gaps = list(_perm_gaps(lam_a, lam_b))
    return min(gaps), max(gaps)


def _d_e_pm_from(diff2: float, min_gap: float) -> tuple[float, float, float]:
    d_plus = diff2 - min_gap
    d_minus = min_gap - diff2
    return d_plus, d_minus, min(abs(d_plus), abs(d_minus))


def d_E_pm(a: SymMat3, b: SymMat3) -> tuple[float, float, float]:
    """(d_plus, d_minus, semi): how much of ||A - B||^2 is *not* explained by
    eigenvalue differences.

    d_plus maximizes ||A - B||^2 - sum_i (lam_i(A) - lam_sigma(i)(B))^2 over
    the six pairings sigma (equivalently subtracts the minimal gap), d_minus
    minimizes the negated expression, and semi = min(|d_plus|, |d_minus|) is
    the semi-metric actually used downstream. semi is always >= 0 and is zero
    exactly when the mismatch of sorted spectra saturates ||A - B||^2, i.e.
    when the two matrices share an eigenvector frame with matched ordering.
    """
    diff = a - b
    diff2 = frobenius_norm(diff) ** 2
    min_gap, _ = hoffman_wielandt_gap(a, b)
    return _d_e_pm_from(diff2, min_gap)


def _check_descending(lam, name: str) -> tuple[float, float, float]:
    l1, l2, l3 = float(lam[0]), float(lam[1]), float(lam[2])
    if l1 < l2 or l2 < l3:
        raise ValueError(f"{name} must be sorted descending, got {(l1, l2, l3)}")
    return l1, l2, l3


def m_matrix(lam_a, lam_b) -> tuple[float, float, float]:
    """Diagonal of M(A, B): minus the products of opposing eigenvalue gaps.

    M_ii = -(gap of A skipping i) * (gap of B skipping i); all entries are
    <= 0 for descending input, and M_ii = 0 exactly when either matrix has the
    corresponding repeated pair.
    """
    a1, a2, a3 = _check_descending(lam_a, "lam_a")
    b1, b2, b3 = _check_descending(lam_b, "lam_b")
    return (
        -(a2 - a3) * (b2 - b3),
        -(a1 - a3) * (b1 - b3),
        -(a1 - a2) * (b1 - b2),
    )


def n_matrix(lam_a, lam_b) -> tuple[float, float, float]:
    """Diagonal of N(A, B) = 2 M^2: the commutator-norm normalizer."""
    a1, a2, a3 = _check_descending(lam_a, "lam_a")
    b1, b2, b3 = _check_descending(lam_b, "lam_b")
    return (
        2.0 * (a2 - a3) ** 2 * (b2 - b3) ** 2,
        2.0 * (a1 - a3) ** 2 * (b1 - b3) ** 2,
        2.0 * (a1 - a2) ** 2 * (b1 - b2) ** 2,
    )


def _normalize_bound(bound: str) -> str:
    if bound in ("lb", "lower"):
        return "lb"
    if bound in ("ub", "upper"):
        return "ub"
    raise ValueError(f"bound must be 'lb' or 'ub', got {bound!r}")


def _theta_ratio(num: float, c: float) -> float:
    # 0/0 means "no resolvable rotation"; x/0 with x > 0 is genuinely
    # unbounded and reported as such rather than masked.
    if c == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return math.sqrt(num / c)


def _theta_e_from(semi: float, m_diag, bound: str) -> float:
    mags = (abs(m_diag[0]), abs(m_diag[1]), abs(m_diag[2]))
    c = max(mags) if bound == "lb" else min(mags)
    return _theta_ratio(semi, c)


def _theta_c_from(d_c: float, n_diag, bound: str) -> float:
    c = max(n_diag) if bound == "lb" else min(n_diag)
    if c == 0.0:
        return 0.0 if d_c == 0.0 else math.inf
    return d_c / math.sqrt(c)


def theta_from_dE(a: SymMat3, b: SymMat3, bound: str = "lb") -> float:
    """Angle estimate from the eigenvalue-mismatch semi-metric.

    theta_est = sqrt(semi / c) with c = max_i |M_ii| for the lower bound
    (default) or min_i |M_ii| for the upper bound. Uses eigenvalues only.
    """
    bound = _normalize_bound(bound)
    semi = d_E_pm(a, b)[2]
    m_diag = m_matrix(eigvals3(a), eigvals3(b))
    return _theta_e_from(semi, m_diag, bound)


def theta_from_dC(a: SymMat3, b: SymMat3, bound: str = "lb") -> float:
    """Angle estimate from the commutator norm: d_C / sqrt(c) with c the
    max (lower bound, default) or min (upper bound) diagonal entry of N."""
    bound = _normalize_bound(bound)
    d_c = d_commutator(a, b)
    n_diag = n_matrix(eigvals3(a), eigvals3(b))
    return _theta_c_from(d_c, n_diag, bound)


def theta_bracket_dE(a: SymMat3, b: SymMat3) -> tuple[float, float]:
    """Consistent small-angle bracket [lo, hi] containing the true relative
    rotation angle, derived from the d_E estimates.

    For a small relative rotation through theta about axis k, the quadratic
    expansion of the semi-metric is semi = 2 theta^2 |k^T M k| + O(theta^3) --
    note the factor 2. The raw estimates sqrt(semi / max|M_ii|) and
    sqrt(semi / min|M_ii|) therefore straddle theta * sqrt(2), not theta;
    dividing both by sqrt(2) yields a genuine bracket up to the cubic
    remainder. The raw lower estimate itself is kept as-is in theta_from_dE
    because its small, nearly angle-independent overshoot is a useful point
    estimate; this function is the calibrated interval.
    """
    lo = theta_from_dE(a, b, "lb")
    hi = theta_from_dE(a, b, "ub")
    return lo / _SQRT2, hi / _SQRT2


def theta_bracket_dC(a: SymMat3, b: SymMat3) -> tuple[float, float]:
    """Small-angle bracket from the commutator estimate.

    ||[A, B]||^2 = theta^2 k^T N k + O(theta^3) holds with no extra factor,
    so the raw lower/upper estimates already bracket theta.
    """
    return theta_from_dC(a, b, "lb"), theta_from_dC(a, b, "ub")


def distance_report(a: SymMat3, b: SymMat3, tol_gap: float = 1e-8) -> DistanceReport:
    """Compute every measure for one pair under shared eigendecompositions.

    The rotation metrics minimize over the 24 representative choices for Q_B;
    the eigenvalue-only measures are representative-free by construction.
    """
    ea = eigh3_cardano(a)
    eb = eigh3_cardano(b)
    d_r, _, _ = min_rotation_distance(ea, eb, "riemann")
    d_f, _, _ = min_rotation_distance(ea, eb, "chordal")
    lam_a = (float(ea.lam[0]), float(ea.lam[1]), float(ea.lam[2]))
    lam_b = (float(eb.lam[0]), float(eb.lam[1]), float(eb.lam[2]))

    diff2 = frobenius_norm(a - b) ** 2
    gaps = list(_perm_gaps(lam_a, lam_b))
    d_plus, d_minus, semi = _d_e_pm_from(diff2, min(gaps))
    m_diag = m_matrix(lam_a, lam_b)
    n_diag = n_matrix(lam_a, lam_b)
    d_c = d_commutator(a, b)

    return DistanceReport(
        d_riemann=d_r,
        d_chordal_scaled=d_f / _SQRT2,
        d_C_raw=d_c,
        d_E_plus=d_plus,
        d_E_minus=d_minus,
        theta_E_lb=_theta_e_from(semi, m_diag, "lb"),
        theta_E_ub=_theta_e_from(semi, m_diag, "ub"),
        theta_C_lb=_theta_c_from(d_c, n_diag, "lb"),
        theta_C_ub=_theta_c_from(d_c, n_diag, "ub"),
        m_diag=m_diag,
        n_diag=n_diag,
        degenerate_flags=(
            min_relative_gap(lam_a) < tol_gap,
            min_relative_gap(lam_b) < tol_gap,
        ),
    )
