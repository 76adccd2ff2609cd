"""Symmetric 3x3 building blocks: norms, commutators, deviators, and two
independent eigensolvers (closed-form Cardano and cyclic Jacobi).

Everything here is fixed-size. The eigensolver kernels work on the six scalar
coefficients directly so that bulk sweeps (tens of thousands of matrices) stay
cheap in pure Python; numpy arrays only appear at the API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputNotFinite, NonConvergence, NotSymmetric

__all__ = [
    "SymMat3",
    "EigenDecomp",
    "frobenius_norm",
    "commutator",
    "deviator",
    "relative_gap",
    "min_relative_gap",
    "eigvals3",
    "eigh3_cardano",
    "eigh3_jacobi",
]

_TWO_PI_THIRDS = 2.0 * math.pi / 3.0


@dataclass(frozen=True)
class SymMat3:
    """Real symmetric 3x3 matrix stored as its six independent coefficients.

    Symmetry holds exactly by construction: only the upper triangle is kept,
    so A == A.T is not a property to verify but a representation fact.
    """

    a11: float
    a22: float
    a33: float
    a12: float
    a13: float
    a23: float

    @staticmethod
    def from_array(a, tol: float = 1e-12) -> "SymMat3":
        """Build from a full 3x3 array, checking finiteness and symmetry.

        The symmetry check is relative: each |a[i,j] - a[j,i]| must be at most
        tol * max(1, ||a||_F). The stored coefficients average the two
        triangles so tiny rounding asymmetries do not leak through.
        """
        m = np.asarray(a, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"expected a 3x3 array, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputNotFinite("matrix entries must be finite")
        scale = max(1.0, float(np.sqrt((m * m).sum())))
        worst = float(np.abs(m - m.T).max())
        if worst > tol * scale:
            raise NotSymmetric(
                f"asymmetry {worst:.3e} exceeds {tol:.1e} * max(1, ||A||)"
            )
        return SymMat3(
            float(m[0, 0]),
            float(m[1, 1]),
            float(m[2, 2]),
            0.5 * float(m[0, 1] + m[1, 0]),
            0.5 * float(m[0, 2] + m[2, 0]),
            0.5 * float(m[1, 2] + m[2, 1]),
        )

    def to_array(self) -> np.ndarray:
        return np.array(
            [
                [self.a11, self.a12, self.a13],
                [self.a12, self.a22, self.a23],
                [self.a13, self.a23, self.a33],
            ]
        )

    def trace(self) -> float:
        return self.a11 + self.a22 + self.a33

    def __add__(self, other: "SymMat3") -> "SymMat3":
        return SymMat3(
            self.a11 + other.a11,
            self.a22 + other.a22,
            self.a33 + other.a33,
            self.a12 + other.a12,
            self.a13 + other.a13,
            self.a23 + other.a23,
        )

    def __sub__(self, other: "SymMat3") -> "SymMat3":
        return SymMat3(
            self.a11 - other.a11,
            self.a22 - other.a22,
            self.a33 - other.a33,
            self.a12 - other.a12,
            self.a13 - other.a13,
            self.a23 - other.a23,
        )

    def scaled(self, s: float) -> "SymMat3":
        return SymMat3(
            s * self.a11, s * self.a22, s * self.a33,
            s * self.a12, s * self.a13, s * self.a23,
        )


@dataclass(frozen=True)
class EigenDecomp:
    """Eigenvalues sorted descending plus a proper-orthogonal eigenvector
    matrix: A = Q diag(lam) Q^T with det Q = +1.

    `lam` holds (lam1, lam2, lam3) with lam1 >= lam2 >= lam3; column j of `q`
    is the eigenvector of lam[j]. Signs are canonical: the largest-magnitude
    entry of each column is positive, except that the last column is flipped
    when needed to force det Q = +1.
    """

    lam: np.ndarray
    q: np.ndarray


def frobenius_norm(a) -> float:
    """Frobenius norm of a 3x3 matrix (SymMat3 or any array-like)."""
    if isinstance(a, SymMat3):
        return math.sqrt(
            a.a11 * a.a11 + a.a22 * a.a22 + a.a33 * a.a33
            + 2.0 * (a.a12 * a.a12 + a.a13 * a.a13 + a.a23 * a.a23)
        )
    m = np.asarray(a, dtype=float)
    return float(np.sqrt((m * m).sum()))


def commutator(a: SymMat3, b: SymMat3) -> np.ndarray:
    """[A, B] = AB - BA, skew-symmetric for symmetric inputs (exactly so in
    floating point: (AB)^T and BA share the same products and sum order)."""
    ma = a.to_array()
    mb = b.to_array()
    return ma @ mb - mb @ ma


def deviator(a: SymMat3) -> SymMat3:
    """Trace-free part A - (1/3) tr(A) I."""
    m = a.trace() / 3.0
    return SymMat3(a.a11 - m, a.a22 - m, a.a33 - m, a.a12, a.a13, a.a23)


def relative_gap(li: float, lj: float) -> float:
    """|li - lj| / max(1, |li|, |lj|): the scale-aware eigenvalue separation."""
    return abs(li - lj) / max(1.0, abs(li), abs(lj))


def min_relative_gap(lam) -> float:
    l1, l2, l3 = float(lam[0]), float(lam[1]), float(lam[2])
    return min(relative_gap(l1, l2), relative_gap(l1, l3), relative_gap(l2, l3))


def _cardano_eigenvalues(a11, a22, a33, a12, a13, a23):
    # Shift to the trace-free part, then solve the depressed cubic.
    m = (a11 + a22 + a33) / 3.0
    b11 = a11 - m
    b22 = a22 - m
    b33 = a33 - m
    p = (
        b11 * b11 + b22 * b22 + b33 * b33
        + 2.0 * (a12 * a12 + a13 * a13 + a23 * a23)
    ) / 6.0
    if p == 0.0:
        return m, m, m
    q = (
        b11 * (b22 * b33 - a23 * a23)
        - a12 * (a12 * b33 - a23 * a13)
        + a13 * (a12 * a23 - b22 * a13)
    ) / 2.0
    # Rounding can push the discriminant marginally negative for
    # near-degenerate spectra; clamp before the root.
    disc = p * p * p - q * q
    if disc < 0.0:
        disc = 0.0
    phi = math.atan2(math.sqrt(disc), q) / 3.0
    rp = 2.0 * math.sqrt(p)
    lam1 = m + rp * math.cos(phi)
    lam3 = m + rp * math.cos(phi + _TWO_PI_THIRDS)
    lam2 = 3.0 * m - lam1 - lam3
    return lam1, lam2, lam3


def eigvals3(a: SymMat3) -> tuple[float, float, float]:
    """Descending eigenvalues by the Cardano closed form.

    Eigenvalues of a symmetric matrix are perfectly conditioned, so unlike the
    eigenvector path this needs no degeneracy fallback.
    """
    if not (
        math.isfinite(a.a11) and math.isfinite(a.a22) and math.isfinite(a.a33)
        and math.isfinite(a.a12) and math.isfinite(a.a13) and math.isfinite(a.a23)
    ):
        raise InputNotFinite("matrix entries must be finite")
    l1, l2, l3 = _cardano_eigenvalues(a.a11, a.a22, a.a33, a.a12, a.a13, a.a23)
    if l1 < l2:
        l1, l2 = l2, l1
    if l2 < l3:
        l2, l3 = l3, l2
    if l1 < l2:
        l1, l2 = l2, l1
    return l1, l2, l3


def _cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _norm3(u):
    return math.sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2])


def _eigvec_cross(a: SymMat3, lam: float):
    """Eigenvector of `lam` as the largest cross product of columns of A - lam I.

    For a rank-2 shifted matrix any two independent columns have a cross
    product parallel to the null space; taking all three pairs and keeping the
    largest avoids the failure mode where a chosen pair happens to be nearly
    dependent.
    """
    c1 = (a.a11 - lam, a.a12, a.a13)
    c2 = (a.a12, a.a22 - lam, a.a23)
    c3 = (a.a13, a.a23, a.a33 - lam)
    best = None
    best_n = -1.0
    for u, v in ((c1, c2), (c1, c3), (c2, c3)):
        w = _cross(u, v)
        n = _norm3(w)
        if n > best_n:
            best_n = n
            best = w
    if best_n <= 0.0:
        # A - lam I vanished: any direction is an eigenvector.
        return (1.0, 0.0, 0.0)
    return (best[0] / best_n, best[1] / best_n, best[2] / best_n)


def _canonical(lams, cols) -> EigenDecomp:
    """Sort descending, fix signs (largest entry positive), force det = +1."""
    order = sorted(range(3), key=lambda idx: -lams[idx])
    lam_sorted = [lams[idx] for idx in order]
    q = [list(cols[idx]) for idx in order]  # q[j] is eigenvector j
    for v in q:
        big = 0
        if abs(v[1]) > abs(v[big]):
            big = 1
        if abs(v[2]) > abs(v[big]):
            big = 2
        if v[big] < 0.0:
            v[0] = -v[0]
            v[1] = -v[1]
            v[2] = -v[2]
    det = (
        q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1])
        - q[1][0] * (q[0][1] * q[2][2] - q[0][2] * q[2][1])
        + q[2][0] * (q[0][1] * q[1][2] - q[0][2] * q[1][1])
    )
    if det < 0.0:
        q[2][0] = -q[2][0]
        q[2][1] = -q[2][1]
        q[2][2] = -q[2][2]
    qmat = np.array(q).T  # columns are eigenvectors
    return EigenDecomp(lam=np.array(lam_sorted), q=qmat)


def eigh3_cardano(a: SymMat3, gap_tol: float = 1e-6) -> EigenDecomp:
    """Closed-form eigendecomposition.

    Eigenvalues come from the Cardano cubic; eigenvectors from cross products
    of the shifted columns, which is fast and accurate while the spectrum is
    well separated. Below a relative gap of `gap_tol` the cross products start
    cancelling, so the whole decomposition falls back to the Jacobi solver.
    """
    lams = eigvals3(a)
    if min_relative_gap(lams) < gap_tol:
        return eigh3_jacobi(a, 1e-14)
    l1, l2, l3 = lams
    v1 = _eigvec_cross(a, l1)
    v3 = _eigvec_cross(a, l3)
    # Re-orthogonalize the smallest-eigenvalue direction against the largest;
    # the middle one is then exactly their cross product (right-handed).
    dot = v1[0] * v3[0] + v1[1] * v3[1] + v1[2] * v3[2]
    w3 = (v3[0] - dot * v1[0], v3[1] - dot * v1[1], v3[2] - dot * v1[2])
    n3 = _norm3(w3)
    if n3 == 0.0:
        return eigh3_jacobi(a, 1e-14)
    v3 = (w3[0] / n3, w3[1] / n3, w3[2] / n3)
    v2 = _cross(v3, v1)
    return _canonical((l1, l2, l3), (v1, v2, v3))


def eigh3_jacobi(a: SymMat3, tol: float = 1e-14) -> EigenDecomp:
    """Cyclic Jacobi iteration, the independent reference solver.

    Sweeps the (0,1), (0,2), (1,2) pivots until the off-diagonal Frobenius
    mass drops to tol * ||A||_F. Convergence is quadratic; three to six sweeps
    suffice for any sane input, and 100 sweeps without convergence raises
    NonConvergence.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    m = [
        [a.a11, a.a12, a.a13],
        [a.a12, a.a22, a.a23],
        [a.a13, a.a23, a.a33],
    ]
    if not all(math.isfinite(m[i][j]) for i in range(3) for j in range(3)):
        raise InputNotFinite("matrix entries must be finite")
    q = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    norm_a = frobenius_norm(a)
    if norm_a == 0.0:
        return _canonical((0.0, 0.0, 0.0), ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    threshold = tol * norm_a
    for _ in range(100):
        off = math.sqrt(
            2.0 * (m[0][1] ** 2 + m[0][2] ** 2 + m[1][2] ** 2)
        )
        if off <= threshold:
            cols = tuple((q[0][j], q[1][j], q[2][j]) for j in range(3))
            return _canonical((m[0][0], m[1][1], m[2][2]), cols)
        for p, r in ((0, 1), (0, 2), (1, 2)):
            apq = m[p][r]
            if apq == 0.0:
                continue
            tau = (m[r][r] - m[p][p]) / (2.0 * apq)
            if tau >= 0.0:
                t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
            else:
                t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            m[p][p] -= t * apq
            m[r][r] += t * apq
            m[p][r] = 0.0
            m[r][p] = 0.0
            k = 3 - p - r  # the spectator index
            mkp = m[k][p]
            mkr = m[k][r]
            m[k][p] = c * mkp - s * mkr
            m[p][k] = m[k][p]
            m[k][r] = s * mkp + c * mkr
            m[r][k] = m[k][r]
            for i in range(3):
                qip = q[i][p]
                qir = q[i][r]
                q[i][p] = c * qip - s * qir
                q[i][r] = s * qip + c * qir
    raise NonConvergence("Jacobi failed to converge within 100 sweeps")
