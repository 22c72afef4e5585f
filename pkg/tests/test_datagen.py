import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sammec2.boosting import weighted_error
from sammec2.data import DataError, class_distribution
from sammec2.datagen import GenConfig, apportion, cluster_centers, generate
from sammec2.stump import fit_stump


def test_simulation_proportions():
    ds = generate(GenConfig(n_samples=100_000, n_features=50, n_informative=5,
                            weights=(0.96, 0.035, 0.005), seed=16))
    cd = class_distribution(ds)
    assert cd.counts.tolist() == [96000, 3500, 500]
    np.testing.assert_allclose(cd.proportions, [0.96, 0.035, 0.005])
    assert ds.features.shape == (100_000, 50)


def test_deterministic():
    cfg = GenConfig(n_samples=500, n_features=6, n_informative=3, seed=4)
    a, b = generate(cfg), generate(cfg)
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)
    c = generate(GenConfig(n_samples=500, n_features=6, n_informative=3, seed=5))
    assert not np.array_equal(a.features, c.features)


def test_wide_separation_is_stump_separable():
    cfg = GenConfig(n_samples=200, n_features=2, n_informative=2, n_classes=2,
                    clusters_per_class=1, class_sep=50.0, weights=(0.5, 0.5), seed=0)
    ds = generate(cfg)
    w = np.full(ds.n_samples, 1 / ds.n_samples)
    assert weighted_error(ds, w, fit_stump(ds, w)) < 0.05


def test_starved_class_rejected():
    with pytest.raises(DataError, match="no samples"):
        generate(GenConfig(n_samples=50, n_features=3, n_informative=3,
                           weights=(0.96, 0.035, 0.005)))


def test_config_validation():
    with pytest.raises(ValueError):
        GenConfig(n_features=3, n_informative=4)
    with pytest.raises(ValueError):
        GenConfig(weights=(0.5, 0.4, 0.05))
    with pytest.raises(ValueError):
        GenConfig(n_informative=2, n_classes=3, clusters_per_class=2, n_features=5)


def test_label_noise_changes_labels():
    base = dict(n_samples=2000, n_features=4, n_informative=3, weights=(0.5, 0.3, 0.2), seed=1)
    clean = generate(GenConfig(**base))
    noisy = generate(GenConfig(**base, label_noise=0.3))
    np.testing.assert_array_equal(clean.features, noisy.features)
    changed = np.mean(clean.labels != noisy.labels)
    # a fraction 0.3 is redrawn uniformly; 2/3 of those change class
    assert 0.15 < changed < 0.25


def test_apportion_largest_remainder():
    assert apportion(100_000, (0.96, 0.035, 0.005)).tolist() == [96000, 3500, 500]
    assert apportion(10, (1 / 3, 1 / 3, 1 / 3)).tolist() == [4, 3, 3]
    assert apportion(7, (0.5, 0.5)).tolist() == [4, 3]


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(20, 400),
    raw=st.lists(st.floats(0.05, 1.0), min_size=2, max_size=4),
    seed=st.integers(0, 1000),
)
def test_exact_counts_property(n, raw, seed):
    weights = tuple(np.array(raw) / sum(raw))
    cfg = GenConfig(n_samples=n, n_features=3, n_informative=3, n_classes=len(raw),
                    clusters_per_class=1, weights=weights, seed=seed)
    counts = apportion(n, weights)
    if np.any(counts == 0):
        with pytest.raises(DataError):
            generate(cfg)
        return
    ds = generate(cfg)
    assert ds.n_samples == n
    assert class_distribution(ds).counts.tolist() == counts.tolist()


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_samples_nearest_own_class_center(seed):
    cfg = GenConfig(n_samples=3000, n_features=8, n_informative=5, class_sep=2.0,
                    weights=(0.6, 0.3, 0.1), seed=seed)
    ds = generate(cfg)
    centers = cluster_centers(cfg, np.random.default_rng(cfg.seed))
    owner = np.repeat(np.arange(cfg.n_classes), cfg.clusters_per_class)
    inf = ds.features[:, : cfg.n_informative]
    dist = np.linalg.norm(inf[:, None, :] - centers[None, :, :], axis=2)
    own = np.where(owner[None, :] == ds.labels[:, None], dist, np.inf).min(axis=1)
    other = np.where(owner[None, :] != ds.labels[:, None], dist, np.inf).min(axis=1)
    assert np.mean(own <= other) >= 0.90
