import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sammec2.stump import Stump, fit_stump, stump_error, stump_predict

from conftest import dyadic_weights, make_dataset


def brute_force_min_error(X, y, w, K):
    """Smallest weighted error over every split between distinct values and the constant rule.

    Splitting at ``x <= a`` gives the same partition as any threshold in
    ``[a, b)``; using ``(a + b) / 2`` directly would lose the split when the
    two values are adjacent floats and the midpoint rounds up to ``b``.
    """
    best = w.sum() - max(w[y == k].sum() for k in range(K))
    for f in range(X.shape[1]):
        vals = np.unique(X[:, f])
        for a in vals[:-1]:
            left = X[:, f] <= a
            err = 0.0
            for side in (left, ~left):
                err += w[side].sum() - max(w[side & (y == k)].sum() for k in range(K))
            best = min(best, err)
    return best


def test_separable_1d():
    ds = make_dataset([0, 1, 2, 3], [0, 0, 1, 1])
    s = fit_stump(ds, np.full(4, 0.25))
    assert s == Stump(0, 1.5, 0, 1)
    assert stump_error(ds.features, ds.labels, np.full(4, 0.25), s) == 0.0


def test_constant_labels_give_constant_stump():
    ds = make_dataset(np.random.default_rng(0).normal(size=(10, 3)), [2] * 10, K=3)
    s = fit_stump(ds, np.full(10, 0.1))
    assert s.left_class == s.right_class == 2
    assert s.is_constant


def test_constant_features():
    ds = make_dataset(np.ones((6, 2)), [0, 1, 1, 0, 1, 1])
    s = fit_stump(ds, np.full(6, 1 / 6))
    assert s.threshold == -np.inf and s.right_class == 1


def test_predict_boundary_goes_left():
    s = Stump(0, 1.5, 0, 1)
    assert stump_predict(s, [1.5, 9.0]) == 0
    assert stump_predict(s, [1.6, 9.0]) == 1
    c = Stump(0, -np.inf, 2, 2)
    assert {stump_predict(c, [x]) for x in (-1e300, 0.0, 1e300)} == {2}


def test_predict_dimension_mismatch():
    with pytest.raises(ValueError):
        stump_predict(Stump(3, 0.0, 0, 1), [1.0, 2.0])
    with pytest.raises(ValueError):
        stump_predict(Stump(0, 0.0, 0, 1), [1.0, 2.0], n_features=3)


def test_leaf_tie_goes_to_lower_class():
    ds = make_dataset([0, 0, 1, 1], [1, 0, 0, 1])
    s = fit_stump(ds, np.full(4, 0.25))
    assert s.is_constant and s.left_class == 0


def test_split_tie_goes_to_lower_feature():
    X = np.column_stack([[0, 1, 2, 3], [0, 1, 2, 3]])
    ds = make_dataset(X, [0, 0, 1, 1])
    assert fit_stump(ds, np.full(4, 0.25)).feature_index == 0


def test_adjacent_floats_whose_midpoint_rounds_up():
    X = np.array([-0.9, np.nextafter(-0.9, 0.0), np.nextafter(-0.9, 0.0)])
    assert (X[0] + X[1]) / 2 == X[1]
    ds = make_dataset(X, [0, 1, 1])
    s = fit_stump(ds, np.full(3, 1 / 3))
    assert s.predict(ds.features).tolist() == [0, 1, 1]


def test_adjacent_float_midpoint():
    a = 1.0
    b = np.nextafter(a, 2.0)
    ds = make_dataset([a, b], [0, 1])
    s = fit_stump(ds, np.array([0.5, 0.5]))
    assert s.predict(ds.features).tolist() == [0, 1]


def test_weight_validation():
    ds = make_dataset([0, 1], [0, 1])
    with pytest.raises(ValueError):
        fit_stump(ds, [0.5, 0.6])
    with pytest.raises(ValueError):
        fit_stump(ds, [1.0])


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(2, 200),
    d=st.integers(1, 5),
    K=st.integers(2, 4),
    levels=st.integers(2, 30),
    seed=st.integers(0, 2**32 - 1),
)
def test_matches_brute_force(n, d, K, levels, seed):
    rng = np.random.default_rng(seed)
    # few distinct levels force many ties in feature values
    X = rng.integers(0, levels, size=(n, d)).astype(float)
    y = rng.integers(0, K, size=n)
    w = dyadic_weights(rng, n)
    ds = make_dataset(X, y, K=K)
    s = fit_stump(ds, w)
    assert stump_error(X, y, w, s) == brute_force_min_error(X, y, w, K)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 120), d=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_permutation_invariant_and_beats_constant(n, d, seed):
    rng = np.random.default_rng(seed)
    X = np.round(rng.normal(size=(n, d)), 1)
    y = rng.integers(0, 3, size=n)
    w = dyadic_weights(rng, n)
    s = fit_stump(make_dataset(X, y, K=3), w)
    perm = rng.permutation(n)
    assert fit_stump(make_dataset(X[perm], y[perm], K=3), w[perm]) == s
    const = w.sum() - max(w[y == k].sum() for k in range(3))
    assert stump_error(X, y, w, s) <= const


def test_random_weights_close_to_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(20):
        X = rng.normal(size=(150, 4))
        y = rng.integers(0, 3, 150)
        w = rng.random(150)
        w /= w.sum()
        s = fit_stump(make_dataset(X, y, K=3), w)
        assert abs(stump_error(X, y, w, s) - brute_force_min_error(X, y, w, 3)) < 1e-12
