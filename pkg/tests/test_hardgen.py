import math

import numpy as np
import pytest

from distmat import hardgen
from distmat.hardgen import (HardInstance, HardKind, decode_majorities, gamma_for_delta,
                             gen_bipartite_k1, gen_kblock, gen_symmetric_k1, gen_symmetric_kblock,
                             majority_lead_tail, metric_completion, recover_majorities, typicality)
from distmat.metrics import triangle_violations


def test_bipartite_k1_layout():
    inst = gen_bipartite_k1(4, 1 / 3, seed=0)
    A = inst.matrix
    assert A.shape == (5, 3) and inst.r == 3
    assert np.all(A[4] == 2.0)
    assert set(np.unique(A[:4])) <= {1.0, 2.0}
    for i, row in enumerate(inst.perm[0]):
        assert (A[row] == 2).sum() == inst.upper_counts[0, i]
    assert inst.majorities.shape == (1, 4) and not inst.ties.any()


def test_bipartite_k1_rejects_bad_parameters():
    with pytest.raises(ValueError):
        gen_bipartite_k1(4, 0.25, C=0.1)
    with pytest.raises(ValueError):
        gen_bipartite_k1(4, 0.0)
    with pytest.raises(ValueError):
        gen_bipartite_k1(4, 0.25, beta=0.1)


def test_symbol_mean_is_one_and_a_half():
    A = gen_bipartite_k1(20000, 1 / 16, seed=1).matrix[:-1]
    # sd of the mean is 0.5/sqrt(320000) ~ 9e-4
    assert abs(A.mean() - 1.5) <= 0.01


@pytest.mark.parametrize("n,eps,C", [(3, 1 / 4, 1.0), (10, 1 / 16, 0.5), (47, 1 / 16, 1 / 47), (32, 1 / 32, 4.0)])
def test_completion_is_a_metric(n, eps, C):
    for seed in range(3):
        inst = gen_bipartite_k1(n, eps, C=C, seed=seed)
        assert inst.n + inst.r <= 64
        D = metric_completion(inst)
        assert np.array_equal(D, D.T) and np.all(np.diag(D) == 0)
        assert triangle_violations(D) == 0


@pytest.mark.parametrize("n,eps", [(4, 1 / 4), (16, 1 / 8), (48, 1 / 16), (48, 1 / 3)])
def test_symmetric_k1_is_a_metric(n, eps):
    for seed in range(3):
        inst = gen_symmetric_k1(n, eps, seed=seed)
        A = inst.matrix
        assert A.shape == (2 * n, 2 * n) and 2 * n <= 96
        off = A[~np.eye(2 * n, dtype=bool)]
        assert off.min() >= 1 - 1e-12 and off.max() <= 2 + 1e-12
        assert triangle_violations(A) == 0
        assert np.allclose(recover_majorities(inst)[0], inst.majorities)


def test_symmetric_k1_divisibility():
    with pytest.raises(ValueError):
        gen_symmetric_k1(10, 1 / 4)


@pytest.mark.parametrize("n,k,C", [(8, 2, 1.0), (12, 3, 0.5), (5, 1, 2.0)])
def test_kblock_values_and_padding(n, k, C):
    inst = gen_kblock(n, k, 1 / 4, C=C, seed=0)
    A = inst.matrix
    N_eff = inst.params["N_eff"]
    assert A.shape == (N_eff, k * 4)
    assert N_eff & (N_eff - 1) == 0 and N_eff >= round((1 + C) * n)
    assert set(np.unique(A)) <= {1.0, 1.5, 2.0, 2.5, 3.0}
    H = inst.signs * 2
    assert np.array_equal(H @ H.T, N_eff * np.eye(k))
    assert np.all(H.sum(axis=1) == 0)
    # rows without an instance are constant within each block
    used = np.zeros(N_eff, dtype=bool)
    for b in range(k):
        used[:] = False
        used[inst.perm[b]] = True
        block = A[~used, b * 4:(b + 1) * 4]
        assert np.all(block == block[:, :1])
    assert np.array_equal(recover_majorities(inst)[0], inst.majorities)


def test_symmetric_kblock_is_a_metric():
    inst = gen_symmetric_kblock(24, 2, 1 / 4, seed=3)
    A = inst.matrix
    assert A.shape == (48, 48)
    assert triangle_violations(A) == 0
    assert np.array_equal(recover_majorities(inst)[0], inst.majorities)
    with pytest.raises(ValueError):
        gen_symmetric_kblock(20, 2, 1 / 4)


def test_typicality_examples():
    inst = gen_bipartite_k1(5, 1 / 4, seed=0)
    inst.upper_counts = np.array([[4, 0, 3, 1, 2]])
    inst.ties = inst.upper_counts == 2
    rep = typicality(inst, 1.0)
    assert (rep.typical_count, rep.total, rep.ties) == (2, 5, 1)
    assert rep.fraction == 0.5 and rep.fraction_all == 0.4
    assert typicality(inst, 0.5).typical_count == 4


def test_lead_tail_small_case():
    # r = 4: P(lead 4) = 2/16, P(lead 3) = 8/16, tie 6/16
    tails = majority_lead_tail(4)
    assert tails[4] == pytest.approx(0.2) and tails[3] == 1
    assert gamma_for_delta(4, 0.1) == 0.5
    assert gamma_for_delta(16, 0.1) == 0.25


def test_gamma_matches_simulation():
    r = 64
    gamma = gamma_for_delta(r, 0.1)
    inst = gen_bipartite_k1(20000, 1 / r, seed=5)
    assert typicality(inst, gamma).fraction >= 0.88


def test_decode_exact_and_null():
    inst = gen_bipartite_k1(500, 1 / 15, seed=2)
    bits, rate = decode_majorities(inst, inst.matrix)
    assert rate == 1.0 and bits.shape == (500,)
    null = np.full(inst.matrix.shape, 1.5 + 1e-6)
    _, rate = decode_majorities(inst, null)
    assert 0.4 <= rate <= 0.6


def test_decode_accepts_factor_pairs():
    inst = gen_kblock(6, 2, 1 / 4, seed=4)
    left, s, right = np.linalg.svd(inst.matrix, full_matrices=False)
    _, rate = decode_majorities(inst, (left * s, right))
    assert rate == 1.0


def test_save_load_roundtrip(tmp_path):
    inst = gen_kblock(6, 2, 1 / 4, seed=4)
    inst.save(tmp_path)
    back = HardInstance.load(tmp_path)
    assert np.array_equal(back.matrix, inst.matrix)
    assert back.kind is HardKind.BIPARTITE_KBLOCK
    for name in ("majorities", "ties", "upper_counts", "perm", "signs"):
        assert np.array_equal(getattr(back, name), getattr(inst, name))
    assert back.params == inst.params


def test_generate_dispatch_and_seed():
    a = hardgen.generate("symmetric-k1", n=8, eps=0.25, seed=1)
    b = hardgen.generate(HardKind.SYMMETRIC_K1, n=8, eps=0.25, seed=1)
    assert a.matrix.tobytes() == b.matrix.tobytes()
    with pytest.raises(ValueError):
        hardgen.generate("nope", n=8, eps=0.25)
