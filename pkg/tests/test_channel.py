import math

import numpy as np
import pytest
from conftest import random_channel, random_permutation

from polarq import channel as ch
from polarq.errors import InvalidBudget, InvalidDistribution


def identity_channel(q):
    return ch.Channel(q, np.eye(q))


def single_output_channel(q):
    return ch.Channel(q, np.ones((q, 1)))


def test_constructors():
    w = ch.erasure_channel(4, 0.0)
    assert w.n_outputs == 5
    assert w.probs[:, 4].sum() == 0.0

    bsc = ch.symmetric_channel(2, 0.1)
    assert np.allclose(bsc.probs, [[0.9, 0.1], [0.1, 0.9]])

    with pytest.raises(InvalidDistribution):
        ch.from_table(2, [[0.5, 0.4], [0.5, 0.5]])
    with pytest.raises(InvalidDistribution):
        ch.from_table(2, [[1.1, -0.1], [0.5, 0.5]])
    with pytest.raises(InvalidDistribution):
        ch.erasure_channel(3, 1.5)


def test_symmetric_capacity_examples():
    assert ch.symmetric_capacity(identity_channel(3)) == pytest.approx(1.0, abs=1e-15)
    assert ch.symmetric_capacity(ch.erasure_channel(4, 0.25)) == pytest.approx(0.75, abs=1e-12)
    assert ch.symmetric_capacity(single_output_channel(3)) == 0.0


def test_bhattacharyya_examples():
    for q, eps in [(2, 0.3), (4, 0.7)]:
        w = ch.erasure_channel(q, eps)
        for x in range(q):
            for xp in range(q):
                if x != xp:
                    assert ch.bhattacharyya_pair(w, x, xp) == pytest.approx(eps, abs=1e-14)
        assert ch.bhattacharyya(w) == pytest.approx(eps, abs=1e-14)
    assert ch.bhattacharyya(identity_channel(3)) == 0.0
    w1 = single_output_channel(4)
    assert ch.z_max(w1) == pytest.approx(1.0, abs=1e-14)
    assert ch.z_min(w1) == pytest.approx(1.0, abs=1e-14)


def test_z_matrix_properties_random():
    rng = np.random.default_rng(7)
    for _ in range(50):
        q = int(rng.integers(2, 6))
        w = random_channel(rng, q)
        for x in range(q):
            assert ch.bhattacharyya_pair(w, x, x) == pytest.approx(1.0, abs=1e-12)
            for xp in range(q):
                zxy = ch.bhattacharyya_pair(w, x, xp)
                assert -1e-12 <= zxy <= 1 + 1e-12
                assert zxy == pytest.approx(ch.bhattacharyya_pair(w, xp, x), abs=1e-14)


def test_z_avg_sigma():
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = int(rng.integers(2, 6))
        w = random_channel(rng, q)
        ident = tuple(range(q))
        for x in range(q):
            for xp in range(q):
                assert ch.z_avg_sigma(w, ident, x, xp) == pytest.approx(
                    ch.bhattacharyya_pair(w, x, xp), abs=1e-14
                )
        sigma = random_permutation(rng, q)
        got = ch.z_avg_sigma(w, sigma, 0, min(1, q - 1))
        assert 0.0 <= got <= 1 + 1e-12

    w = ch.erasure_channel(3, 0.4)
    assert ch.z_avg_sigma(w, (1, 2, 0), 0, 1) == pytest.approx(0.4, abs=1e-14)
    assert ch.z_avg_sigma(w, (0, 1, 2), 2, 2) == pytest.approx(1.0, abs=1e-14)


def test_error_prob_examples():
    assert ch.error_prob(identity_channel(4)) == 0.0
    # under strict-inequality regions every output of a constant channel is an error
    assert ch.error_prob(single_output_channel(3)) == 1.0
    # the erasure output ties across both inputs and counts fully
    assert ch.error_prob(ch.erasure_channel(2, 0.3)) == pytest.approx(0.3, abs=1e-14)


def test_bound_report_examples():
    rep = ch.bound_report(identity_channel(5))
    assert rep.p_e == 0.0 and rep.p_e_bound == 0.0
    assert rep.capacity == pytest.approx(1.0, abs=1e-12)
    assert rep.capacity_lower == pytest.approx(1.0, abs=1e-12)

    rep = ch.bound_report(ch.symmetric_channel(2, 0.11))
    z = 2 * math.sqrt(0.11 * 0.89)
    assert rep.p_e_bound == pytest.approx(z, abs=1e-12)
    assert rep.capacity_lower <= rep.capacity + 1e-12
    assert rep.capacity <= rep.capacity_upper_half + 1e-12
    assert rep.capacity <= rep.capacity_upper_exp + 1e-12


def test_bounds_random_sweep():
    rng = np.random.default_rng(11)
    for _ in range(500):
        q = int(rng.integers(2, 6))
        w = random_channel(rng, q)
        rep = ch.bound_report(w)
        assert rep.p_e <= rep.p_e_bound + 1e-12
        assert rep.capacity >= rep.capacity_lower - 1e-12
        assert rep.capacity <= rep.capacity_upper_half + 1e-12
        assert rep.capacity <= rep.capacity_upper_exp + 1e-12


def metrics(w):
    vals = [ch.symmetric_capacity(w), ch.error_prob(w)]
    vals.extend(ch.bhattacharyya_pair(w, x, xp) for x in range(w.q) for xp in range(w.q))
    return np.array(vals)


def test_merge_equivalent_examples():
    w = ch.Channel(2, [[0.25, 0.25, 0.5], [0.25, 0.25, 0.5]])
    merged = ch.merge_equivalent(w)
    assert merged.n_outputs == 1

    # erasure mass split across two identical half-columns merges back
    w = ch.Channel(2, [[0.5, 0.25, 0.25, 0.0], [0.0, 0.25, 0.25, 0.5]])
    merged = ch.merge_equivalent(w)
    assert merged.n_outputs == 3
    assert ch.symmetric_capacity(merged) == pytest.approx(0.5, abs=1e-12)

    ident = identity_channel(3)
    assert ch.merge_equivalent(ident).n_outputs == 3


def test_merge_equivalent_preserves_metrics():
    rng = np.random.default_rng(23)
    for _ in range(60):
        q = int(rng.integers(2, 5))
        w = random_channel(rng, q)
        t = rng.uniform(0.1, 0.9, size=w.n_outputs)
        split = np.concatenate([w.probs * t, w.probs * (1 - t)], axis=1)
        split_w = ch.Channel(q, split)
        merged = ch.merge_equivalent(split_w)
        assert merged.n_outputs <= w.n_outputs
        assert np.all(np.abs(metrics(merged) - metrics(w)) < 1e-10)


def test_degrade_monotone():
    rng = np.random.default_rng(5)
    for _ in range(40):
        q = int(rng.integers(2, 4))
        w = random_channel(rng, q, max_outputs=8, min_outputs=q)
        k = int(rng.integers(q, w.n_outputs + 1))
        d = ch.degrade(w, k)
        assert d.n_outputs <= k
        assert ch.symmetric_capacity(d) <= ch.symmetric_capacity(w) + 1e-12
        for x in range(q):
            for xp in range(x + 1, q):
                assert (
                    ch.bhattacharyya_pair(d, x, xp)
                    >= ch.bhattacharyya_pair(w, x, xp) - 1e-12
                )


def test_degrade_examples():
    w = ch.erasure_channel(2, 0.5)
    same = ch.degrade(w, w.n_outputs)
    assert same.n_outputs == ch.merge_equivalent(w).n_outputs

    d = ch.degrade(w, 2)
    assert ch.symmetric_capacity(d) <= 0.5 + 1e-12
    assert ch.bhattacharyya(d) >= 0.5 - 1e-12

    ident = identity_channel(2)
    d = ch.degrade(ident, 2)
    assert ch.symmetric_capacity(d) == pytest.approx(1.0, abs=1e-12)

    with pytest.raises(InvalidBudget):
        ch.degrade(w, 1)


def test_parse_channel_spec(tmp_path):
    w = ch.parse_channel_spec("qec:4:0.25")
    assert w.q == 4 and w.n_outputs == 5
    w = ch.parse_channel_spec("qsc:3:0.2")
    assert w.probs[0, 0] == pytest.approx(0.8)

    path = tmp_path / "chan.json"
    path.write_text(
        '{"q": 2, "outputs": ["a", "b"], "probs": [[0.9, 0.1], [0.2, 0.8]]}'
    )
    w = ch.parse_channel_spec(f"file:{path}")
    assert w.outputs == ("a", "b")

    with pytest.raises(InvalidDistribution):
        ch.parse_channel_spec("bogus:1:2")
    with pytest.raises(InvalidDistribution):
        ch.parse_channel_spec("qec:4")
