import numpy as np
import pytest

import smcperiod as sp
from _oracles import oracle_interval_matrix, oracle_return_probability


def test_state_space_basics(dna):
    assert dna.size == 4
    assert dna.symbols == ("A", "C", "G", "T")
    assert dna.index("G") == 2
    with pytest.raises(ValueError):
        dna.index("N")
    with pytest.raises(ValueError):
        sp.StateSpace(("A",))
    with pytest.raises(ValueError):
        sp.StateSpace(("A", "A"))


def test_model_validation_messages(dna):
    P = sp.uniform_embedded(dna)
    H = np.tile(sp.geometric_holding(0.5, 4)[:, None, None], (1, 4, 4))
    sp.SemiMarkovModel(dna, P, H)  # valid

    bad = P.copy()
    bad[2, 0] += 0.1
    with pytest.raises(ValueError, match="row for state G"):
        sp.SemiMarkovModel(dna, bad, H)

    diag = P.copy()
    diag[1, 1] = diag[1, 0]
    diag[1, 0] = 0.0
    with pytest.raises(ValueError, match="diagonal"):
        sp.SemiMarkovModel(dna, diag, H)

    badH = H.copy()
    badH[0, 0, 1] += 0.2
    with pytest.raises(ValueError, match="pair A->C"):
        sp.SemiMarkovModel(dna, P, badH)

    with pytest.raises(ValueError, match="negative|\\[0, 1\\]"):
        sp.SemiMarkovModel(dna, -P, H)


def test_model_renormalizes_truncated_tail(dna):
    P = sp.uniform_embedded(dna)
    raw = 0.5 ** np.arange(1, 6)          # mass 1 - 2^-5, not normalized
    H = np.tile(raw[:, None, None], (1, 4, 4))
    with pytest.raises(ValueError):
        sp.SemiMarkovModel(dna, P, H)
    model = sp.SemiMarkovModel(dna, P, H, renormalize=True)
    assert np.allclose(model.H.sum(axis=0), 1.0, atol=1e-15)
    assert model.m_max == 5


def test_model_arrays_read_only(fix_unif):
    with pytest.raises(ValueError):
        fix_unif.P[0, 1] = 0.5
    with pytest.raises(ValueError):
        fix_unif.H[0, 0, 1] = 0.5


def test_geometric_holding():
    g = sp.geometric_holding(0.75, 30)
    assert g.shape == (30,)
    assert g.sum() == pytest.approx(1.0, abs=1e-15)
    # successive ratio is the failure probability
    assert np.allclose(g[1:] / g[:-1], 0.25)
    with pytest.raises(ValueError):
        sp.geometric_holding(0.0, 5)
    with pytest.raises(ValueError):
        sp.geometric_holding(0.5, 0)


def test_waiting_tail_invariants(fix_unif):
    wt = sp.waiting_time_pmf(fix_unif)
    assert np.allclose(wt.tail_at(0), 1.0, atol=1e-12)
    assert np.allclose(wt.pmf.sum(axis=1), 1.0, atol=1e-12)
    # tails decrease and vanish beyond the truncation point
    for n in range(1, 31):
        assert (wt.tail_at(n) <= wt.tail_at(n - 1) + 1e-15).all()
    assert (wt.tail_at(31) == 0).all()
    assert (wt.tail_at(100) == 0).all()
    with pytest.raises(ValueError):
        wt.tail_at(-1)


def test_fix_det_kernels_match_hand_enumeration(fix_det):
    kern = sp.interval_transition_recursive(fix_det, 6)
    assert np.array_equal(kern.Q[1], [[0, 1], [0, 1]])
    assert np.array_equal(kern.Q[2], [[0, 1], [1, 0]])
    assert np.array_equal(kern.Q[3], np.eye(2))
    # the A,B,B pattern has period 3
    assert np.array_equal(kern.Q[6], np.eye(2))
    # all kernel entries are 0/1 for the deterministic model
    assert set(np.unique(kern.Q)) <= {0.0, 1.0}


def test_fix_unif_kernel_is_flat(fix_unif):
    # an i.i.d. uniform sequence forgets its past entirely: every entry 1/4
    kern = sp.interval_transition_recursive(fix_unif, 12)
    for n in range(1, 13):
        assert np.abs(kern.Q[n] - 0.25).max() < 1e-9


def test_unit_holding_times_reduce_to_markov_powers(dna):
    P = sp.uniform_embedded(dna)
    model = sp.SemiMarkovModel(dna, P, np.ones((1, 4, 4)))
    kern = sp.interval_transition_recursive(model, 9)
    expected = np.eye(4)
    for n in range(10):
        assert np.abs(kern.Q[n] - expected).max() < 1e-13
        assert np.abs(sp.interval_transition_closed(model, n) - expected).max() < 1e-13
        expected = expected @ P


def test_closed_equals_recursive_random_models():
    for seed in range(8):
        model = sp.random_model(seed, m_max=2 + seed % 5)
        kern = sp.interval_transition_recursive(model, 12)
        for n in range(13):
            gap = np.abs(sp.interval_transition_closed(model, n) - kern.Q[n]).max()
            assert gap < 1e-12, (seed, n, gap)


def test_kernels_match_scalar_oracle():
    model = sp.random_model(77, m_max=4)
    table = oracle_interval_matrix(model.P.tolist(), model.H.tolist(), 8)
    kern = sp.interval_transition_recursive(model, 8)
    for n in range(9):
        assert np.abs(np.array(table[(0, n)]) - kern.Q[n]).max() < 1e-12


def test_kernel_rows_are_stochastic():
    for seed in (3, 14, 15):
        model = sp.random_model(seed, m_max=5)
        kern = sp.interval_transition_recursive(model, 15)
        assert np.abs(kern.Q.sum(axis=2) - 1.0).max() < 1e-12


def test_return_probability_exact_entry_is_diag_q(fix_unif):
    kern = sp.interval_transition_recursive(fix_unif, 7)
    for d in (1, 2, 5, 7):
        p = sp.return_probability(fix_unif, d, "exact-entry")
        assert np.abs(p - np.diag(kern.Q[d])).max() < 1e-14


def test_return_probability_fix_unif_values(fix_unif):
    # i.i.d. uniform: chance the symbol repeats 3 later is exactly 1/4
    pe = sp.return_probability(fix_unif, 3, "exact-entry")
    assert np.abs(pe - 0.25).max() < 1e-6
    # survival weighting double counts held-through paths: 21/64 by hand
    ps = sp.return_probability(fix_unif, 3, "paper-survival")
    assert np.abs(ps - 21.0 / 64.0).max() < 1e-6


def test_return_probability_matches_scalar_oracle():
    model = sp.random_model(123, m_max=5)
    for d in (1, 3, 6):
        for variant, survival in (("exact-entry", False), ("paper-survival", True)):
            want = oracle_return_probability(model.P.tolist(), model.H.tolist(), d,
                                             survival=survival)[0]
            got = sp.return_probability(model, d, variant)
            assert np.abs(got - np.array(want)).max() < 1e-12


def test_return_probability_validation(fix_unif):
    with pytest.raises(ValueError):
        sp.return_probability(fix_unif, 0)
    with pytest.raises(ValueError):
        sp.return_probability(fix_unif, 3, "nope")


def test_interval_kernel_validation(fix_unif):
    with pytest.raises(ValueError):
        sp.interval_transition_recursive(fix_unif, -1)
    with pytest.raises(ValueError):
        sp.interval_transition_closed(fix_unif, -2)
    kern = sp.interval_transition_recursive(fix_unif, 0)
    assert np.array_equal(kern.Q[0], np.eye(4))
