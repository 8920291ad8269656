import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from enci import oracles
from enci.dataset import DataError
from enci.kernels import (
    SWEEP_MULTIPLIERS,
    KernelConfig,
    _kth_scalar_distance,
    center_gram,
    gaussian_gram,
    median_heuristic,
)



@pytest.mark.parametrize(
    "samples, expected",
    [([0.0, 1.0], 1.0), ([0.0, 1.0, 2.0], 1.0), ([0.0, 3.0, 4.0, 10.0], 5.0)],
)
def test_median_heuristic_examples(samples, expected):
    assert median_heuristic(samples) == expected


def test_median_heuristic_matches_enumeration():
    rng = np.random.default_rng(1)
    for _ in range(30):
        x = rng.normal(size=(rng.integers(2, 15), rng.integers(1, 4)))
        assert median_heuristic(x) == pytest.approx(oracles.median_pairwise_distance(x), abs=1e-12)


def test_median_heuristic_degenerate():
    with pytest.raises(DataError, match="zero median distance"):
        median_heuristic([2.0, 2.0, 2.0])
    with pytest.raises(DataError):
        median_heuristic([1.0])


def test_kth_scalar_distance_agrees_with_sort():
    rng = np.random.default_rng(5)
    x = np.sort(np.round(rng.normal(size=300), 2))  # many ties
    d = np.sort(np.abs(x[:, None] - x[None, :])[np.triu_indices(x.size, 1)])
    for k in (1, 17, d.size // 2, d.size // 2 + 1, d.size):
        assert _kth_scalar_distance(x, k) == pytest.approx(d[k - 1], rel=1e-12, abs=1e-15)


def test_large_scalar_median_path(monkeypatch):
    import enci.kernels as K

    rng = np.random.default_rng(2)
    x = rng.normal(size=401)
    exact = median_heuristic(x)
    monkeypatch.setattr(K, "_MAX_EXPLICIT_PAIRS", 10)
    assert median_heuristic(x) == pytest.approx(exact, rel=1e-12)
    assert median_heuristic(x[:400]) == pytest.approx(oracles.median_pairwise_distance(x[:400]), rel=1e-12)


# dyadic rationals keep translations exact
dyadic = st.integers(-4000, 4000).map(lambda i: i / 8)


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.integers(3, 20), elements=dyadic), st.randoms(use_true_random=False), dyadic)
def test_median_heuristic_invariances(x, rnd, shift):
    if np.median(np.abs(x[:, None] - x)[np.triu_indices(x.size, 1)]) == 0:
        return
    base = median_heuristic(x)
    perm = list(range(x.size))
    rnd.shuffle(perm)
    assert median_heuristic(x[perm]) == base
    assert median_heuristic(x + shift) == base


def test_gram_examples():
    assert gaussian_gram([3.0], 0.7).tolist() == [[1.0]]
    K = gaussian_gram([0.0, 1.0], 1.0)
    assert K[0, 1] == pytest.approx(0.6065306597126334, abs=1e-15)
    K = gaussian_gram([0.0, 2.0], 1.0)
    assert K[1, 0] == pytest.approx(0.1353352832366127, abs=1e-15)


def test_gram_rejects_nonfinite():
    with pytest.raises(DataError, match="non-finite input"):
        gaussian_gram([0.0, np.nan], 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(1, 3), st.integers(0, 2**31), st.floats(0.05, 10))
def test_gram_properties(n, d, seed, sigma):
    x = np.random.default_rng(seed).normal(size=(n, d))
    K = gaussian_gram(x, sigma)
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)
    assert np.all(K <= 1.0) and np.all(K >= 0.0)
    assert np.linalg.eigvalsh(K).min() >= -1e-8


def test_gram_strictly_positive_entries_for_moderate_distances():
    x = np.random.default_rng(0).normal(size=(30, 2))
    assert np.all(gaussian_gram(x, median_heuristic(x)) > 0)


@pytest.mark.parametrize("c", [0.5, 2.0, 4.0])
def test_gram_scale_covariance_exact(c):
    x = np.random.default_rng(3).normal(size=(12, 2))
    assert np.array_equal(gaussian_gram(c * x, c * 0.8), gaussian_gram(x, 0.8))


def test_gram_scale_covariance_general():
    x = np.random.default_rng(3).normal(size=(12, 2))
    np.testing.assert_allclose(gaussian_gram(3.7 * x, 3.7 * 0.8), gaussian_gram(x, 0.8), rtol=1e-13)


def test_center_examples():
    assert center_gram([[1.0]]).tolist() == [[0.0]]
    np.testing.assert_array_equal(center_gram(np.eye(2)), [[0.5, -0.5], [-0.5, 0.5]])


@pytest.mark.parametrize("n", [2, 7, 40])
def test_center_rows_and_trace(n):
    K = gaussian_gram(np.random.default_rng(n).normal(size=n), 1.0)
    KH = center_gram(K)
    assert np.max(np.abs(KH.sum(axis=1))) < 1e-12
    H = np.eye(n) - 1.0 / n
    np.testing.assert_allclose(KH, K @ H, atol=1e-14)
    assert np.trace(KH) == pytest.approx(np.trace(H @ K @ H), abs=1e-10)


def test_kernel_config():
    for m in SWEEP_MULTIPLIERS:
        assert KernelConfig(multiplier=m).resolve([0.0, 1.0]) == pytest.approx(m)
    assert KernelConfig.fixed(2.5).resolve([0.0, 1.0]) == 2.5
    assert KernelConfig(multiplier=7.3).resolve([0.0, 2.0]) == pytest.approx(14.6)
    with pytest.raises(ValueError):
        KernelConfig(multiplier=0)
    with pytest.raises(ValueError):
        KernelConfig.fixed(-1.0)
