import numpy as np
import pytest
from hypothesis import given, settings

from commdist import (
    DegenerateData,
    DimensionMismatch,
    ExcludedFrequency,
    MissingFrequency,
    SpectralSignature,
    SymMat3,
    TooFewSamples,
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
    theta_from_dE,
)
from commdist.features import label_indices
from oracles import rand_sym, rand_sym_separated
from test_linalg3 import sym_strategy


def separated_signature(rng, n=3):
    omega = tuple(float(w) for w in np.geomspace(10.0, 1000.0, n))
    zero = SymMat3(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    r = tuple(SymMat3.from_array(rand_sym_separated(rng)) for _ in range(n))
    i = tuple(SymMat3.from_array(rand_sym_separated(rng)) for _ in range(n))
    return SpectralSignature("s", "c", omega, zero, r, i)


def toy_dataset(rng, n_per_class=8, n_classes=3, dim=10):
    feats, labels = [], []
    for c in range(n_classes):
        for _ in range(n_per_class):
            x = rng.normal(size=dim)
            x[c] += 6.0
            feats.append(x)
            labels.append(c)
    return make_dataset(feats, labels, [f"class{c}" for c in range(n_classes)])


# ---------------------------------------------------------------------------
# invariants


@settings(max_examples=150, deadline=None)
@given(sym_strategy())
def test_invariants_match_numpy(s):
    m = s.to_array()
    i1, i2, i3 = principal_invariants(s)
    lam = np.linalg.eigvalsh(m)
    scale = max(1.0, float(np.max(np.abs(lam))) ** 3)
    assert i1 == pytest.approx(np.trace(m), abs=1e-10 * scale)
    assert i2 == pytest.approx(
        lam[0] * lam[1] + lam[0] * lam[2] + lam[1] * lam[2], abs=1e-9 * scale
    )
    assert i3 == pytest.approx(np.linalg.det(m), abs=1e-9 * scale)


def test_invariants_are_rotation_invariant():
    from oracles import rand_rotation

    rng = np.random.default_rng(151)
    for _ in range(30):
        m = rand_sym(rng)
        q = rand_rotation(rng)
        rotated = q @ m @ q.T
        a = principal_invariants(SymMat3.from_array(m))
        b = principal_invariants(SymMat3.from_array(0.5 * (rotated + rotated.T)))
        np.testing.assert_allclose(a, b, atol=1e-12)


# ---------------------------------------------------------------------------
# feature vectors


def test_feature_layout_blockwise():
    rng = np.random.default_rng(157)
    sig = separated_signature(rng, n=3)
    x = build_feature_vector(sig, sig.omega)
    assert x.shape == (21,)
    from commdist import rtilde

    for m in range(3):
        inv_rt = principal_invariants(rtilde(sig, m))
        inv_im = principal_invariants(sig.i[m])
        for j in range(3):
            assert x[j * 3 + m] == pytest.approx(inv_rt[j], rel=1e-14, abs=1e-14)
            assert x[9 + j * 3 + m] == pytest.approx(inv_im[j], rel=1e-14, abs=1e-14)
        assert x[18 + m] == pytest.approx(
            theta_from_dE(rtilde(sig, m), sig.i[m], "lb"), rel=1e-14
        )


def test_feature_vector_subset_of_frequencies():
    rng = np.random.default_rng(163)
    sig = separated_signature(rng, n=4)
    x = build_feature_vector(sig, [sig.omega[1], sig.omega[3]])
    assert x.shape == (14,)


def test_feature_vector_unknown_frequency():
    rng = np.random.default_rng(167)
    sig = separated_signature(rng)
    with pytest.raises(MissingFrequency):
        build_feature_vector(sig, [12345.0])


def test_feature_vector_degenerate_frequency():
    rng = np.random.default_rng(173)
    sig = separated_signature(rng, n=2)
    r = (SymMat3(1.0, 1.0, 1.0, 0.0, 0.0, 0.0), sig.r[1])
    bad = SpectralSignature("s", "c", sig.omega, sig.n0, r, sig.i)
    with pytest.raises(ExcludedFrequency):
        build_feature_vector(bad, [sig.omega[0]])
    # the healthy frequency still works
    build_feature_vector(bad, [sig.omega[1]])


# ---------------------------------------------------------------------------
# dataset plumbing


def test_one_hot_and_validation():
    np.testing.assert_array_equal(one_hot(1, 3), [0.0, 1.0, 0.0])
    with pytest.raises(DimensionMismatch):
        make_dataset([np.zeros(3)], [0, 1], ["a", "b"])
    ds = make_dataset([np.zeros(3), np.ones(3)], [0, 1], ["a", "b"])
    assert ds.class_names == ("a", "b")
    np.testing.assert_array_equal(label_indices(ds), [0, 1])


def test_feature_matrix_shape_and_content():
    rng = np.random.default_rng(179)
    ds = toy_dataset(rng, n_per_class=4, n_classes=2, dim=5)
    fm = feature_matrix(ds)
    assert fm.shape == (8, 5)
    np.testing.assert_array_equal(fm[0], ds.pairs[0][0])


# ---------------------------------------------------------------------------
# reduction


def test_reducer_recovers_exact_rank():
    rng = np.random.default_rng(181)
    basis_vecs = np.linalg.qr(rng.normal(size=(12, 4)))[0]  # orthonormal 12x4
    feats = [basis_vecs @ rng.normal(size=4) for _ in range(40)]
    ds = make_dataset(feats, [0] * 40, ["only"])
    basis = fit_reducer(ds, truncation_ratio=1e-9)
    assert basis.u_g.shape == (12, 4)
    assert basis.sigma.shape == (4,)
    # projection loses nothing on rank-4 data
    for x, _ in ds.pairs[:10]:
        z = reduce(basis, x)
        np.testing.assert_allclose(basis.u_g @ z, x, atol=1e-10)


def test_reducer_ratio_controls_dimension():
    rng = np.random.default_rng(191)
    feats = [
        np.concatenate([rng.normal(size=2), 1e-6 * rng.normal(size=3)])
        for _ in range(30)
    ]
    ds = make_dataset(feats, [0] * 30, ["only"])
    fine = fit_reducer(ds, truncation_ratio=1e-9)
    coarse = fit_reducer(ds, truncation_ratio=1e-3)
    assert fine.u_g.shape[1] == 5
    assert coarse.u_g.shape[1] == 2
    with pytest.raises(ValueError):
        fit_reducer(ds, truncation_ratio=2.0)


def test_reducer_rejects_zero_data():
    ds = make_dataset([np.zeros(4), np.zeros(4)], [0, 0], ["only"])
    with pytest.raises(DegenerateData):
        fit_reducer(ds)


def test_reduce_shape_check():
    rng = np.random.default_rng(193)
    ds = toy_dataset(rng, n_per_class=4, n_classes=2, dim=6)
    basis = fit_reducer(ds)
    with pytest.raises(DimensionMismatch):
        reduce(basis, np.zeros(7))


def test_apply_reducer_keeps_labels():
    rng = np.random.default_rng(197)
    ds = toy_dataset(rng, n_per_class=5, n_classes=3, dim=8)
    red = apply_reducer(ds, fit_reducer(ds))
    assert len(red.pairs) == len(ds.pairs)
    for (_, t_old), (_, t_new) in zip(ds.pairs, red.pairs):
        np.testing.assert_array_equal(t_old, t_new)


# ---------------------------------------------------------------------------
# splitting


def test_split_is_stratified_and_disjoint():
    rng = np.random.default_rng(199)
    ds = toy_dataset(rng, n_per_class=8, n_classes=3)
    tr, te = split(ds, seed=11)
    assert len(tr.pairs) == 18 and len(te.pairs) == 6
    for c in range(3):
        n_te = sum(1 for _, t in te.pairs if np.argmax(t) == c)
        assert n_te == 2  # 8 // 4 per class
    train_ids = {id(x) for x, _ in tr.pairs}
    test_ids = {id(x) for x, _ in te.pairs}
    assert not train_ids & test_ids


def test_split_seed_determinism():
    rng = np.random.default_rng(211)
    ds = toy_dataset(rng)
    tr1, te1 = split(ds, seed=3)
    tr2, te2 = split(ds, seed=3)
    for (x1, _), (x2, _) in zip(te1.pairs, te2.pairs):
        np.testing.assert_array_equal(x1, x2)
    tr3, te3 = split(ds, seed=4)
    different = any(
        not np.array_equal(x1, x3) for (x1, _), (x3, _) in zip(te1.pairs, te3.pairs)
    )
    assert different


def test_split_rejects_tiny_classes():
    ds = make_dataset(
        [np.ones(2)] * 3 + [np.zeros(2)] * 8,
        [0] * 3 + [1] * 8,
        ["few", "many"],
    )
    with pytest.raises(TooFewSamples):
        split(ds, seed=0)


# ---------------------------------------------------------------------------
# standardization and hashing


def test_zscore_normalizes_train_statistics():
    rng = np.random.default_rng(223)
    ds = toy_dataset(rng, n_per_class=20, n_classes=2, dim=4)
    mu, sd = fit_zscore(ds)
    z = apply_zscore(ds, mu, sd)
    fm = feature_matrix(z)
    np.testing.assert_allclose(fm.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(fm.std(axis=0), 1.0, atol=1e-12)


def test_basis_hash_is_stable_and_sensitive():
    rng = np.random.default_rng(227)
    ds = toy_dataset(rng)
    basis = fit_reducer(ds)
    h1 = basis_hash(basis)
    h2 = basis_hash(fit_reducer(ds))
    assert h1 == h2 and len(h1) == 64
    other = fit_reducer(ds, truncation_ratio=0.5)
    assert basis_hash(other) != h1
