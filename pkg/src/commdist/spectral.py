"""Spectral-signature data model and per-frequency analysis.

A signature is one object's tensor response sampled over a frequency grid:
a frequency-independent real tensor N0, and per-frequency real and imaginary
parts R(omega) and I(omega). The full real part is Rtilde = N0 + R, computed
on demand so the additive decomposition stays exact. Curves derived from a
signature are the commutator norms ||Z|| = ||[R, I]||, ||Z0|| = ||[N0, I]||,
||Ztilde|| = ||[Rtilde, I]|| and the per-frequency distance measures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .commute import theta_from_dC, theta_from_dE
from .errors import (
    InsufficientSamples,
    NonMonotoneFrequency,
    SchemaError,
)
from .linalg3 import SymMat3, commutator, eigh3_cardano, eigvals3, frobenius_norm, min_relative_gap
from .so3 import min_rotation_distance

__all__ = [
    "SpectralSignature",
    "SignatureCurves",
    "CSV_HEADER",
    "rtilde",
    "load_signature",
    "save_signature",
    "commutator_signature",
    "distance_signature",
    "scaling_exponent",
    "add_noise",
]

_COMPONENTS = ("11", "22", "33", "12", "13", "23")
CSV_HEADER = (
    ["omega"]
    + [f"n0_{c}" for c in _COMPONENTS]
    + [f"r_{c}" for c in _COMPONENTS]
    + [f"i_{c}" for c in _COMPONENTS]
)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SpectralSignature:
    """One object's tensor spectral signature.

    omega is strictly increasing; r and i hold one SymMat3 per frequency; n0
    is the frequency-independent part of the real tensor. alpha (an object
    size, in meters) is carried as optional metadata and never computed from.
    """

    object_id: str
    class_label: str
    omega: tuple[float, ...]
    n0: SymMat3
    r: tuple[SymMat3, ...]
    i: tuple[SymMat3, ...]
    alpha: Optional[float] = None

    def __post_init__(self):
        if len(self.omega) < 1:
            raise SchemaError("signature needs at least one frequency")
        if not (len(self.omega) == len(self.r) == len(self.i)):
            raise SchemaError(
                f"length mismatch: {len(self.omega)} frequencies, "
                f"{len(self.r)} R tensors, {len(self.i)} I tensors"
            )
        for k in range(1, len(self.omega)):
            if not self.omega[k] > self.omega[k - 1]:
                raise NonMonotoneFrequency(
                    f"omega[{k}] = {self.omega[k]!r} does not increase past "
                    f"omega[{k - 1}] = {self.omega[k - 1]!r}"
                )


@dataclass(frozen=True)
class SignatureCurves:
    """Per-frequency scalar curves computed from one signature.

    Fields are parallel to omega; a curve not produced by the originating
    operation is None. Excluded frequencies (repeated spectrum in either
    tensor of the analyzed pair) carry NaN in the distance curves and True in
    `excluded`.
    """

    omega: np.ndarray
    excluded: np.ndarray
    z_norm: Optional[np.ndarray] = None
    z0_norm: Optional[np.ndarray] = None
    ztilde_norm: Optional[np.ndarray] = None
    d_riemann: Optional[np.ndarray] = None
    d_chordal_scaled: Optional[np.ndarray] = None
    theta_E: Optional[np.ndarray] = None
    theta_C: Optional[np.ndarray] = None


def rtilde(sig: SpectralSignature, index: int) -> SymMat3:
    """Rtilde(omega_index) = N0 + R(omega_index), by exact coefficient sums."""
    return sig.n0 + sig.r[index]


def _mat_fields(m: SymMat3) -> list[float]:
    return [m.a11, m.a22, m.a33, m.a12, m.a13, m.a23]


def _fmt(x: float) -> str:
    return "%.17g" % x


def _meta_from_comments(lines: list[str]) -> dict:
    meta = {}
    for line in lines:
        body = line[1:].strip()
        if not body or "=" not in body:
            continue
        key, _, value = body.partition("=")
        meta[key.strip()] = value.strip()
    return meta


def _sidecar_path(path: Path) -> Path:
    return path.with_name(path.stem + ".meta.json")


def _resolve_meta(path: Path, inline: dict) -> tuple[str, str, Optional[float]]:
    meta: dict = {}
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        try:
            loaded = json.loads(sidecar.read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{sidecar}: invalid JSON ({exc})") from exc
        if not isinstance(loaded, dict):
            raise SchemaError(f"{sidecar}: expected a JSON object")
        meta.update(loaded)
    meta.update(inline)  # inline comments win on conflicts
    object_id = str(meta.get("object_id", path.stem))
    class_label = str(meta.get("class_label", "unknown"))
    alpha = meta.get("alpha")
    if alpha is not None:
        try:
            alpha = float(alpha)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"alpha must be numeric, got {alpha!r}") from exc
    return object_id, class_label, alpha


def _parse_csv(path: Path) -> SpectralSignature:
    comment_lines = []
    rows = []
    header = None
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if header is None:
                    comment_lines.append(line)
                continue
            cells = [c.strip() for c in line.split(",")]
            if header is None:
                header = cells
                if header != CSV_HEADER:
                    raise SchemaError(
                        f"{path}: line {lineno}: header mismatch; expected "
                        f"{','.join(CSV_HEADER)}"
                    )
                continue
            if len(cells) != len(CSV_HEADER):
                raise SchemaError(
                    f"{path}: line {lineno}: expected {len(CSV_HEADER)} cells, "
                    f"got {len(cells)}"
                )
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}") from exc
    if header is None or not rows:
        raise SchemaError(f"{path}: no data rows")

    n0_first = rows[0][1:7]
    for ridx, row in enumerate(rows[1:], start=2):
        for cidx in range(6):
            ref = n0_first[cidx]
            if abs(row[1 + cidx] - ref) > 1e-12 * max(1.0, abs(ref)):
                raise SchemaError(
                    f"{path}: data row {ridx}: column {CSV_HEADER[1 + cidx]} "
                    f"varies across rows but N0 must be constant"
                )
    omega = tuple(row[0] for row in rows)
    n0 = SymMat3(*n0_first)
    r = tuple(SymMat3(*row[7:13]) for row in rows)
    i = tuple(SymMat3(*row[13:19]) for row in rows)
    object_id, class_label, alpha = _resolve_meta(path, _meta_from_comments(comment_lines))
    return SpectralSignature(
        object_id=object_id, class_label=class_label,
        omega=omega, n0=n0, r=r, i=i, alpha=alpha,
    )


def _mat_from_json(obj, where: str) -> SymMat3:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object with a11..a23 keys")
    try:
        return SymMat3(
            float(obj["a11"]), float(obj["a22"]), float(obj["a33"]),
            float(obj["a12"]), float(obj["a13"]), float(obj["a23"]),
        )
    except KeyError as exc:
        raise SchemaError(f"{where}: missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def _parse_json(path: Path) -> SpectralSignature:
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    for key in ("omega", "n0", "r", "i"):
        if key not in doc:
            raise SchemaError(f"{path}: missing key {key!r}")
    omega = tuple(float(w) for w in doc["omega"])
    r = tuple(_mat_from_json(o, f"{path}: r[{k}]") for k, o in enumerate(doc["r"]))
    i = tuple(_mat_from_json(o, f"{path}: i[{k}]") for k, o in enumerate(doc["i"]))
    alpha = doc.get("alpha")
    return SpectralSignature(
        object_id=str(doc.get("object_id", path.stem)),
        class_label=str(doc.get("class_label", "unknown")),
        omega=omega,
        n0=_mat_from_json(doc["n0"], f"{path}: n0"),
        r=r,
        i=i,
        alpha=None if alpha is None else float(alpha),
    )


def _infer_format(path: Path, fmt: Optional[str]) -> str:
    if fmt is not None:
        if fmt not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
        return fmt
    suffix = path.suffix.lower()
    if suffix == ".json":
        return "json"
    return "csv"


def load_signature(path, format: Optional[str] = None) -> SpectralSignature:
    """Read a signature from CSV (default) or JSON.

    CSV layout: optional `# key=value` metadata comments, one header row, one
    row per frequency. N0 columns must agree on every row to 1e-12 relative.
    Metadata may instead live in a `<stem>.meta.json` sidecar; inline comments
    take precedence. The JSON layout mirrors SpectralSignature verbatim.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    if _infer_format(path, format) == "json":
        return _parse_json(path)
    return _parse_csv(path)


def save_signature(sig: SpectralSignature, path, format: Optional[str] = None) -> None:
    """Write a signature; numeric fields survive a load round trip bitwise
    (17 significant digits)."""
    path = Path(path)
    if _infer_format(path, format) == "json":
        doc = {
            "object_id": sig.object_id,
            "class_label": sig.class_label,
            "alpha": sig.alpha,
            "omega": list(sig.omega),
            "n0": dict(zip(("a11", "a22", "a33", "a12", "a13", "a23"),
                           _mat_fields(sig.n0))),
            "r": [dict(zip(("a11", "a22", "a33", "a12", "a13", "a23"),
                           _mat_fields(m))) for m in sig.r],
            "i": [dict(zip(("a11", "a22", "a33", "a12", "a13", "a23"),
                           _mat_fields(m))) for m in sig.i],
        }
        path.write_text(json.dumps(doc, indent=1) + "\n")
        return
    lines = [
        f"# object_id={sig.object_id}",
        f"# class_label={sig.class_label}",
    ]
    if sig.alpha is not None:
        lines.append(f"# alpha={_fmt(sig.alpha)}")
    lines.append(",".join(CSV_HEADER))
    n0_cells = [_fmt(v) for v in _mat_fields(sig.n0)]
    for k, w in enumerate(sig.omega):
        cells = [_fmt(w)] + n0_cells \
            + [_fmt(v) for v in _mat_fields(sig.r[k])] \
            + [_fmt(v) for v in _mat_fields(sig.i[k])]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def commutator_signature(sig: SpectralSignature) -> SignatureCurves:
    """Norms of the three commutators at every frequency.

    Z = [R, I] and Z0 = [N0, I] add exactly to Ztilde = [Rtilde, I] because
    the commutator is bilinear; all three are skew-symmetric, and all three
    vanish at frequencies where the tensors share eigenvector frames (e.g.
    mirror-symmetric objects aligned with the axes).
    """
    n = len(sig.omega)
    z = np.empty(n)
    z0 = np.empty(n)
    zt = np.empty(n)
    for k in range(n):
        ik = sig.i[k]
        z[k] = frobenius_norm(commutator(sig.r[k], ik))
        z0[k] = frobenius_norm(commutator(sig.n0, ik))
        zt[k] = frobenius_norm(commutator(rtilde(sig, k), ik))
    return SignatureCurves(
        omega=np.array(sig.omega),
        excluded=np.zeros(n, dtype=bool),
        z_norm=z,
        z0_norm=z0,
        ztilde_norm=zt,
    )


_PAIRS = ("R_I", "N0_I", "Rtilde_I")


def distance_signature(
    sig: SpectralSignature,
    pair: str = "Rtilde_I",
    tol_gap: float = 1e-8,
    bound: str = "lb",
) -> SignatureCurves:
    """Distance measures between the selected tensor pair at each frequency.

    pair selects (R, I), (N0, I) or (Rtilde, I). Frequencies where either
    tensor of the pair has a relative eigenvalue gap below tol_gap are marked
    excluded and carry NaN: repeated eigenvalues make the angle estimates
    meaningless and the eigenvector metrics unstable. Exclusion is per pair --
    the same frequency may be fine for a different pair.
    """
    if pair not in _PAIRS:
        raise ValueError(f"pair must be one of {_PAIRS}, got {pair!r}")
    if bound not in ("lb", "ub", "lower", "upper"):
        raise ValueError(f"bound must be 'lb' or 'ub', got {bound!r}")
    bound = "lb" if bound in ("lb", "lower") else "ub"
    n = len(sig.omega)
    excluded = np.zeros(n, dtype=bool)
    d_r = np.full(n, np.nan)
    d_f = np.full(n, np.nan)
    th_e = np.full(n, np.nan)
    th_c = np.full(n, np.nan)
    for k in range(n):
        if pair == "R_I":
            x = sig.r[k]
        elif pair == "N0_I":
            x = sig.n0
        else:
            x = rtilde(sig, k)
        y = sig.i[k]
        lam_x = eigvals3(x)
        lam_y = eigvals3(y)
        if min_relative_gap(lam_x) < tol_gap or min_relative_gap(lam_y) < tol_gap:
            excluded[k] = True
            continue
        ex = eigh3_cardano(x)
        ey = eigh3_cardano(y)
        d_r[k] = min_rotation_distance(ex, ey, "riemann")[0]
        d_f[k] = min_rotation_distance(ex, ey, "chordal")[0] / _SQRT2
        th_e[k] = theta_from_dE(x, y, bound)
        th_c[k] = theta_from_dC(x, y, bound)
    return SignatureCurves(
        omega=np.array(sig.omega),
        excluded=excluded,
        d_riemann=d_r,
        d_chordal_scaled=d_f,
        theta_E=th_e,
        theta_C=th_c,
    )


def scaling_exponent(curve: SignatureCurves, field: str, omega_range) -> float:
    """Least-squares slope of log(value) against log(omega) over a window.

    Used to check low-frequency growth rates (a curve growing like c * omega
    has slope 1). NaN entries (excluded frequencies) are dropped before the
    count check; at least three positive samples must remain.
    """
    values = getattr(curve, field, None)
    if values is None:
        raise ValueError(f"curve has no values for field {field!r}")
    lo, hi = float(omega_range[0]), float(omega_range[1])
    mask = (curve.omega >= lo) & (curve.omega <= hi) & ~np.isnan(values)
    w = curve.omega[mask]
    v = values[mask]
    if len(w) < 3:
        raise InsufficientSamples(
            f"need at least 3 samples in [{lo:g}, {hi:g}], found {len(w)}"
        )
    if np.any(v <= 0.0) or np.any(w <= 0.0):
        raise ValueError("log-log fit requires positive frequencies and values")
    x = np.log(w)
    y = np.log(v)
    x = x - x.mean()
    return float((x * y).sum() / (x * x).sum())


def add_noise(sig: SpectralSignature, rel_level: float, seed: int) -> SpectralSignature:
    """Gaussian noise injector (plumbing for robustness experiments).

    Perturbs each R and I tensor with symmetric Gaussian noise of standard
    deviation rel_level times that tensor's Frobenius norm; N0 is left exact.
    """
    rng = np.random.default_rng(seed)

    def _noisy(m: SymMat3) -> SymMat3:
        sd = rel_level * frobenius_norm(m)
        e = rng.normal(0.0, sd, size=6) if sd > 0 else np.zeros(6)
        return SymMat3(
            m.a11 + e[0], m.a22 + e[1], m.a33 + e[2],
            m.a12 + e[3], m.a13 + e[4], m.a23 + e[5],
        )

    return SpectralSignature(
        object_id=sig.object_id,
        class_label=sig.class_label,
        omega=sig.omega,
        n0=sig.n0,
        r=tuple(_noisy(m) for m in sig.r),
        i=tuple(_noisy(m) for m in sig.i),
        alpha=sig.alpha,
    )
