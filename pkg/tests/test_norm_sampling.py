import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from distmat.metrics import DistanceOracle, PointSet, make_oracle, materialize
from distmat.norm_sampling import (RowWeights, estimate_row_weights,
                                   estimate_row_weights_symmetric, sample_rows, uniform_weights)

from conftest import METRICS, random_oracle


def test_constant_matrix_gives_uniform():
    o = DistanceOracle.from_matrix(np.full((5, 3), 2.0))
    w = estimate_row_weights(o, seed=0)
    assert np.allclose(w.raw, 3 * 4.0)
    assert np.allclose(w.normalized, 0.2)


def test_single_row():
    o = DistanceOracle.from_matrix(np.array([[1.0, 2.0, 3.0]]))
    assert np.array_equal(estimate_row_weights(o, seed=1).normalized, [1.0])


def test_worked_line_example(line3):
    o = make_oracle(line3, line3, "l1")
    w = estimate_row_weights(o, anchors=(0, 0))
    mean_term = (0 + 1 + 9) / 3
    assert np.allclose(w.raw, [mean_term, 1 + mean_term, 9 + mean_term], rtol=0, atol=1e-15)
    A = materialize(o)
    assert (A[2] ** 2).sum() == 13
    assert 13 <= 4 * 3 * w.raw[2]


def test_weight_reads_are_n_plus_m():
    rng = np.random.default_rng(0)
    o = random_oracle(rng, 7, 4, "l2")
    w = estimate_row_weights(o, seed=3)
    assert w.reads_used == 11 == o.ledger.weights_reads
    assert o.ledger.total() == 11


def test_symmetric_worked_examples(line3):
    o = make_oracle(line3, line3, "l1")
    w = estimate_row_weights_symmetric(o, anchor=0)
    assert np.allclose(w.raw, [10 / 3, 1 + 10 / 3, 9 + 10 / 3], rtol=0, atol=1e-15)
    assert w.reads_used == 3

    two = PointSet([[0.0], [1.0]])
    w2 = estimate_row_weights_symmetric(make_oracle(two, two, "l1"), anchor=0)
    assert np.array_equal(w2.raw, [0.5, 1.5])
    assert np.array_equal(w2.normalized, [0.25, 0.75])


def test_symmetric_zero_matrix_falls_back_to_uniform():
    X = PointSet(np.ones((4, 2)))
    w = estimate_row_weights_symmetric(make_oracle(X, X, "l2"), seed=0)
    assert np.array_equal(w.raw, np.zeros(4))
    assert np.array_equal(w.normalized, np.full(4, 0.25))


def test_symmetric_rejects_bipartite():
    rng = np.random.default_rng(1)
    with pytest.raises(ValueError):
        estimate_row_weights_symmetric(random_oracle(rng, 3, 4, "l1"), seed=0)


def test_anchor_draw_order_is_row_then_column():
    rng = np.random.default_rng(2)
    o = random_oracle(rng, 9, 5, "l1")
    w = estimate_row_weights(o, seed=42)
    ref = np.random.default_rng(42)
    assert (w.anchor_row, w.anchor_col) == (int(ref.integers(9)), int(ref.integers(5)))


def test_sample_rows_point_mass():
    w = RowWeights(0, 0, np.array([1.0, 0, 0, 0]), np.array([1.0, 0, 0, 0]), 0)
    assert np.all(sample_rows(w, 50, seed=0) == 0)


def test_sample_rows_uniform_frequencies():
    idx = sample_rows(uniform_weights(4), 10**5, seed=7)
    freq = np.bincount(idx, minlength=4) / 10**5
    # multinomial sd is sqrt(.25*.75/1e5) ~ 0.0014; 1.5% of 0.25 is 2.7 sd
    assert np.all(np.abs(freq - 0.25) <= 0.015 * 0.25)


def test_sample_rows_deterministic():
    w = uniform_weights(10)
    assert np.array_equal(sample_rows(w, 20, seed=5), sample_rows(w, 20, seed=5))
    with pytest.raises(ValueError):
        sample_rows(w, 0)


@pytest.mark.parametrize("metric", METRICS)
def test_dominance_all_anchor_pairs(metric):
    rng = np.random.default_rng(10)
    for _ in range(25):
        n, m = rng.integers(1, 13, size=2)
        o = random_oracle(rng, n, m, metric)
        row_sq = (materialize(o) ** 2).sum(axis=1)
        for i_star in range(n):
            for j_star in range(m):
                raw = estimate_row_weights(o, anchors=(i_star, j_star)).raw
                assert np.all(row_sq <= 4 * m * raw * (1 + 1e-9))


@pytest.mark.parametrize("metric", METRICS)
def test_symmetric_dominance_all_anchors(metric):
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(1, 13))
        o = random_oracle(rng, n, n, metric, symmetric=True)
        row_sq = (materialize(o) ** 2).sum(axis=1)
        for i_star in range(n):
            raw = estimate_row_weights_symmetric(o, anchor=i_star).raw
            assert np.all(row_sq <= 4 * n * raw * (1 + 1e-9))


@pytest.mark.parametrize("metric", ["l1", "l2", "linf"])
def test_expected_mass_exact_by_enumeration(metric):
    # enumerating every anchor gives the expectation exactly
    rng = np.random.default_rng(12)
    o = random_oracle(rng, 6, 5, metric)
    fro = (materialize(o) ** 2).sum()
    mean = np.mean([estimate_row_weights(o, anchors=(i, j)).raw.sum()
                    for i in range(6) for j in range(5)])
    assert mean == pytest.approx(3 / 5 * fro, rel=1e-12)

    s = random_oracle(rng, 7, 7, metric, symmetric=True)
    fro = (materialize(s) ** 2).sum()
    mean = np.mean([estimate_row_weights_symmetric(s, anchor=i).raw.sum() for i in range(7)])
    assert mean == pytest.approx(2 / 7 * fro, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_normalized_is_a_distribution(n, m, seed):
    rng = np.random.default_rng(seed)
    w = estimate_row_weights(random_oracle(rng, n, m, "l2"), seed=seed)
    assert np.all(w.normalized >= 0)
    assert abs(w.normalized.sum() - 1) <= 1e-12
    assert w.reads_used <= n + m + 1
    if np.any(w.raw):
        assert np.allclose(w.normalized, w.raw / w.raw.sum())


def test_markov_consequence():
    rng = np.random.default_rng(13)
    o = random_oracle(rng, 40, 30, "l2", dim=5)
    A = materialize(o)
    share = (A**2).sum(axis=1) / (A**2).sum()
    hits = sum(np.all(estimate_row_weights(o, seed=s).normalized >= 0.1 * share) for s in range(1000))
    assert hits >= 850
