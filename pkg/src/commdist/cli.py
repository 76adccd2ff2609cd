"""Command-line surface: single-pair reports, the two demonstration sweeps,
signature analysis, and the end-to-end classification pipeline.

Every subcommand is deterministic for fixed inputs and seeds and emits
self-describing CSV or JSON, so any plotting tool can consume the output.
Exit codes: 0 success, 2 input/schema problems, 3 numerical failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .classify import evaluate, save_model, train
from .commute import distance_report
from .errors import (
    DegenerateData,
    DimensionMismatch,
    ExcludedFrequency,
    InputNotFinite,
    MissingFrequency,
    MissingLaplace,
    NonConvergence,
    NonFinite,
    NotARotation,
    NotSymmetric,
    SchemaError,
    TooFewSamples,
)
from .features import (
    apply_reducer,
    apply_zscore,
    basis_hash,
    build_feature_vector,
    fit_reducer,
    fit_zscore,
    make_dataset,
    split,
)
from .linalg3 import SymMat3, eigh3_cardano, eigh3_jacobi, frobenius_norm, min_relative_gap
from .so3 import axis_angle, rodrigues_exp
from .spectral import commutator_signature, distance_signature, load_signature

__all__ = ["main"]

# Built-in demonstration families: a well-separated spectrum rotated about
# the diagonal axis (angle-sweep), and a nearly-degenerate family against a
# fixed diagonal reference (degeneracy-sweep).
_DEMO_WELL_SEPARATED = SymMat3(3.0, 4.0, 5.0, 1.0, 0.5, 0.25)
_DEMO_AXIS = (1.0, 1.0, 1.0)


def _cell(v) -> str:
    """Shortest round-trip decimal for a float cell."""
    return repr(float(v))


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _read_matrix(path) -> SymMat3:
    """Read a symmetric 3x3 matrix from JSON (nested rows or a11..a23 keys)
    or CSV (one line: a11,a22,a33,a12,a13,a23)."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file not found")
    text = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
        if isinstance(doc, dict):
            try:
                return SymMat3(
                    float(doc["a11"]), float(doc["a22"]), float(doc["a33"]),
                    float(doc["a12"]), float(doc["a13"]), float(doc["a23"]),
                )
            except KeyError as exc:
                raise SchemaError(f"{path}: missing key {exc}") from exc
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"{path}: {exc}") from exc
        try:
            return SymMat3.from_array(np.asarray(doc, dtype=float))
        except (ValueError, TypeError) as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 6:
            raise SchemaError(
                f"{path}: expected 6 values a11,a22,a33,a12,a13,a23, got {len(cells)}"
            )
        try:
            vals = [float(c) for c in cells]
        except ValueError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
        return SymMat3(*vals)
    raise SchemaError(f"{path}: no data line found")


def _decomp_dict(a: SymMat3, decomp) -> dict:
    recon = decomp.q @ np.diag(decomp.lam) @ decomp.q.T
    residual = frobenius_norm(recon - a.to_array())
    return {
        "lam": [float(v) for v in decomp.lam],
        "q": [[float(v) for v in row] for row in decomp.q],
        "residual": residual,
    }


def _cmd_eigen(args) -> int:
    a = _read_matrix(args.input)
    cardano = eigh3_cardano(a)
    jacobi = eigh3_jacobi(a, 1e-14)
    gap = min_relative_gap(cardano.lam)
    if args.format == "csv":
        lines = ["solver,lam1,lam2,lam3,residual"]
        for name, dec in (("cardano", cardano), ("jacobi", jacobi)):
            d = _decomp_dict(a, dec)
            lines.append(
                ",".join([name] + [_cell(v) for v in d["lam"]] + [_cell(d["residual"])])
            )
        _emit("\n".join(lines), args.out)
    else:
        doc = {
            "cardano": _decomp_dict(a, cardano),
            "jacobi": _decomp_dict(a, jacobi),
            "min_relative_gap": gap,
            "degenerate": bool(gap < args.tol_gap),
            "tol_gap": args.tol_gap,
        }
        _emit(json.dumps(doc, indent=1, sort_keys=True), args.out)
    return 0


_REPORT_FIELDS = [
    "d_riemann", "d_chordal_scaled", "d_C_raw", "d_E_plus", "d_E_minus",
    "theta_E_lb", "theta_E_ub", "theta_C_lb", "theta_C_ub",
]


def _cmd_distance(args) -> int:
    a = _read_matrix(args.a)
    b = _read_matrix(args.b)
    rep = distance_report(a, b, tol_gap=args.tol_gap)
    if args.format == "csv":
        header = _REPORT_FIELDS + [
            "m_1", "m_2", "m_3", "n_1", "n_2", "n_3",
            "degenerate_a", "degenerate_b",
        ]
        d = rep.to_dict()
        row = [_cell(d[f]) for f in _REPORT_FIELDS]
        row += [_cell(v) for v in rep.m_diag]
        row += [_cell(v) for v in rep.n_diag]
        row += [str(int(f)) for f in rep.degenerate_flags]
        _emit(",".join(header) + "\n" + ",".join(row), args.out)
    else:
        _emit(json.dumps(rep.to_dict(), indent=1, sort_keys=True), args.out)
    return 0


def _theta_pick(rep, bound: str) -> tuple[float, float]:
    if bound == "ub":
        return rep.theta_E_ub, rep.theta_C_ub
    return rep.theta_E_lb, rep.theta_C_lb


def _cmd_angle_sweep(args) -> int:
    if not (0.0 < args.theta_min <= args.theta_max):
        raise ValueError("need 0 < theta-min <= theta-max")
    a = _DEMO_WELL_SEPARATED
    ea = eigh3_cardano(a)
    lam = np.diag(ea.lam)
    thetas = np.linspace(args.theta_min, args.theta_max, args.steps)
    header = [
        "theta", "d_riemann", "d_chordal_scaled", "theta_chordal",
        "theta_E", "theta_C",
        "rel_err_d_riemann", "rel_err_d_chordal_scaled", "rel_err_theta_chordal",
        "rel_err_theta_E", "rel_err_theta_C",
    ]
    lines = [",".join(header)]
    for theta in thetas:
        rot = rodrigues_exp(axis_angle(_DEMO_AXIS, float(theta)))
        qb = ea.q @ rot.T
        barr = qb @ lam @ qb.T
        b = SymMat3.from_array(0.5 * (barr + barr.T))
        rep = distance_report(a, b, tol_gap=args.tol_gap)
        theta_chordal = 2.0 * math.asin(min(rep.d_chordal_scaled / 2.0, 1.0))
        th_e, th_c = _theta_pick(rep, args.bound)
        vals = [
            theta, rep.d_riemann, rep.d_chordal_scaled, theta_chordal,
            th_e, th_c,
            (rep.d_riemann - theta) / theta,
            (rep.d_chordal_scaled - theta) / theta,
            (theta_chordal - theta) / theta,
            (th_e - theta) / theta,
            (th_c - theta) / theta,
        ]
        lines.append(",".join(_cell(v) for v in vals))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_degeneracy_sweep(args) -> int:
    if not (0.0 < args.eps_min <= args.eps_max):
        raise ValueError("need 0 < eps-min <= eps-max")
    b = SymMat3(1.0, 2.0, 3.0, 0.0, 0.0, 0.0)
    grid = np.geomspace(args.eps_min, args.eps_max, args.steps)
    header = ["eps", "d_riemann", "d_chordal_scaled", "theta_E", "theta_C"]
    lines = [",".join(header)]
    for eps in grid:
        e = float(eps)
        a = SymMat3(1.0 + e, 1.0 - e, 2.0, 0.01, 0.01, 0.01)
        rep = distance_report(a, b, tol_gap=args.tol_gap)
        th_e, th_c = _theta_pick(rep, args.bound)
        vals = [e, rep.d_riemann, rep.d_chordal_scaled, th_e, th_c]
        lines.append(",".join(_cell(v) for v in vals))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_signature(args) -> int:
    sig = load_signature(args.signature)
    comm = commutator_signature(sig)
    dist = distance_signature(sig, pair=args.pair, tol_gap=args.tol_gap, bound=args.bound)
    header = [
        "omega", "z_norm", "z0_norm", "ztilde_norm",
        "d_riemann", "d_chordal_scaled", "theta_E", "theta_C", "excluded",
    ]
    lines = [",".join(header)]
    for k in range(len(sig.omega)):
        row = [
            _cell(comm.omega[k]),
            _cell(comm.z_norm[k]),
            _cell(comm.z0_norm[k]),
            _cell(comm.ztilde_norm[k]),
        ]
        if dist.excluded[k]:
            row += ["", "", "", "", "1"]
        else:
            row += [
                _cell(dist.d_riemann[k]),
                _cell(dist.d_chordal_scaled[k]),
                _cell(dist.theta_E[k]),
                _cell(dist.theta_C[k]),
                "0",
            ]
        lines.append(",".join(row))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_pipeline(args) -> int:
    manifest_path = Path(args.manifest)
    if not manifest_path.exists():
        raise SchemaError(f"{manifest_path}: file not found")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{manifest_path}: invalid JSON ({exc})") from exc
    for key in ("class_names", "frequencies", "signatures"):
        if key not in manifest:
            raise SchemaError(f"{manifest_path}: missing key {key!r}")
    class_names = [str(c) for c in manifest["class_names"]]
    frequencies = [float(w) for w in manifest["frequencies"]]
    base = manifest_path.parent

    features = []
    labels = []
    for rel in manifest["signatures"]:
        sig = load_signature(base / rel)
        if sig.class_label not in class_names:
            raise SchemaError(
                f"{rel}: class {sig.class_label!r} not in manifest class_names"
            )
        features.append(build_feature_vector(sig, frequencies, tol_gap=args.tol_gap))
        labels.append(class_names.index(sig.class_label))
    dataset = make_dataset(features, labels, class_names)
    train_set, test_set = split(dataset, seed=args.seed)
    if args.zscore:
        mu, sd = fit_zscore(train_set)
        train_set = apply_zscore(train_set, mu, sd)
        test_set = apply_zscore(test_set, mu, sd)
    basis = fit_reducer(train_set, truncation_ratio=args.truncation)
    train_red = apply_reducer(train_set, basis)
    test_red = apply_reducer(test_set, basis)
    model = train(train_red, l2=args.l2, laplace=not args.no_laplace)
    accuracy, confusion = evaluate(model, test_red)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    g = basis.u_g.shape[1]
    metrics = {
        "accuracy": accuracy,
        "confusion": [[int(v) for v in row] for row in confusion],
        "class_names": class_names,
        "G": g,
        "n_train": len(train_red.pairs),
        "n_test": len(test_red.pairs),
        "seed": args.seed,
        "truncation": args.truncation,
        "l2": args.l2,
        "zscore": bool(args.zscore),
        "laplace": not args.no_laplace,
    }
    metrics_text = json.dumps(metrics, indent=1, sort_keys=True) + "\n"
    (out_dir / "metrics.json").write_text(metrics_text)

    lines = [",".join([f"f{j + 1}" for j in range(g)] + ["label", "split"])]
    for part, name in ((train_red, "train"), (test_red, "test")):
        for x, t in part.pairs:
            label = class_names[int(np.argmax(t))]
            lines.append(",".join([_cell(v) for v in x] + [label, name]))
    (out_dir / "reduced.csv").write_text("\n".join(lines) + "\n")

    save_model(model, out_dir / "model.json", class_names, basis_hash(basis))
    sys.stdout.write(metrics_text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commdist",
        description=(
            "Commutation distances and eigenvalue-only angle estimates for "
            "symmetric 3x3 tensors, plus spectral-signature classification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="json"):
        p.add_argument("--tol-gap", type=float, default=1e-8,
                       help="relative eigenvalue gap below which spectra count as degenerate")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default)

    p_eigen = sub.add_parser("eigen", help="eigendecompose one matrix with both solvers")
    p_eigen.add_argument("input", help="matrix file (.json or 6-value CSV)")
    common(p_eigen)
    p_eigen.set_defaults(func=_cmd_eigen)

    p_dist = sub.add_parser("distance", help="full distance report for a matrix pair")
    p_dist.add_argument("a", help="first matrix file")
    p_dist.add_argument("b", help="second matrix file")
    common(p_dist)
    p_dist.set_defaults(func=_cmd_distance)

    p_angle = sub.add_parser(
        "angle-sweep",
        help="sweep a known rotation angle on the well-separated demo family",
    )
    p_angle.add_argument("--theta-min", type=float, default=1e-3)
    p_angle.add_argument("--theta-max", type=float, default=0.1)
    p_angle.add_argument("--steps", type=int, default=100)
    p_angle.add_argument("--bound", choices=("lb", "ub"), default="lb")
    p_angle.add_argument("--tol-gap", type=float, default=1e-8)
    p_angle.add_argument("--out", default=None)
    p_angle.set_defaults(func=_cmd_angle_sweep)

    p_degen = sub.add_parser(
        "degeneracy-sweep",
        help="sweep the near-degenerate demo family against diag(1,2,3)",
    )
    p_degen.add_argument("--eps-min", type=float, default=1e-3)
    p_degen.add_argument("--eps-max", type=float, default=0.1)
    p_degen.add_argument("--steps", type=int, default=50)
    p_degen.add_argument("--bound", choices=("lb", "ub"), default="lb")
    p_degen.add_argument("--tol-gap", type=float, default=1e-8)
    p_degen.add_argument("--out", default=None)
    p_degen.set_defaults(func=_cmd_degeneracy_sweep)

    p_sig = sub.add_parser("signature", help="commutator and distance curves of a signature")
    p_sig.add_argument("signature", help="signature file (.csv or .json)")
    p_sig.add_argument("--pair", choices=("R_I", "N0_I", "Rtilde_I"), default="Rtilde_I")
    p_sig.add_argument("--bound", choices=("lb", "ub"), default="lb")
    p_sig.add_argument("--tol-gap", type=float, default=1e-8)
    p_sig.add_argument("--out", default=None)
    p_sig.set_defaults(func=_cmd_signature)

    p_pipe = sub.add_parser("pipeline", help="features -> SVD -> classifier, end to end")
    p_pipe.add_argument("manifest", help="manifest JSON (class_names, frequencies, signatures)")
    p_pipe.add_argument("--truncation", type=float, default=1e-9)
    p_pipe.add_argument("--seed", type=int, default=0)
    p_pipe.add_argument("--l2", type=float, default=1.0)
    p_pipe.add_argument("--tol-gap", type=float, default=1e-8)
    p_pipe.add_argument("--zscore", action="store_true",
                        help="z-score features (fit on train) before the SVD")
    p_pipe.add_argument("--no-laplace", action="store_true",
                        help="skip the Laplace posterior factor")
    p_pipe.add_argument("--out-dir", default=".")
    p_pipe.set_defaults(func=_cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return args.func(args)
    except (
        SchemaError,
        NotSymmetric,
        InputNotFinite,
        MissingFrequency,
        TooFewSamples,
        DimensionMismatch,
        MissingLaplace,
        FileNotFoundError,
        IsADirectoryError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        NonConvergence,
        NonFinite,
        DegenerateData,
        ExcludedFrequency,
        NotARotation,
    ) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
