import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbitfed.fl_engine import (
    SOFTMAX,
    DataShard,
    Dataset,
    DivergenceError,
    ModelState,
    TrainingConfig,
    aggregate_global,
    aggregate_partial,
    evaluate,
    fedavg,
    global_loss,
    local_loss,
    local_train,
    num_minibatches,
    partition_data,
    pooled,
    read_idx,
    synthetic_blobs,
    training_time,
    write_idx,
)
from orbitfed.fl_engine.aggregation import inverse_frequency_coefficients
from orbitfed.orbital_mechanics import ConstellationSpec

SPEC40 = ConstellationSpec.walker_delta(5, 8, 1.5e6, math.radians(80))


def shard(n=60, d=5, c=4, seed=0, owner=(0, 0)):
    rng = np.random.default_rng(seed)
    return DataShard(owner, rng.normal(size=(n, d)), rng.integers(0, c, n), c)


def model(w, n, c=4):
    hist = np.zeros(c, dtype=np.int64)
    hist[0] = n
    return ModelState(np.asarray(w, float), n, hist)


def numeric_grad(w, feats, y, step=1e-5):
    g = np.zeros_like(w)
    for i in range(w.size):
        e = np.zeros_like(w)
        e[i] = step
        g[i] = (SOFTMAX.loss(w + e, feats, y) - SOFTMAX.loss(w - e, feats, y)) / (2 * step)
    return g


# -- loss and gradient --------------------------------------------------------

def test_zero_weights_give_log_c():
    s = shard(n=500, c=10)
    w = SOFTMAX.init_weights(5, 10)
    assert local_loss(w, s) == pytest.approx(math.log(10), abs=1e-12)


def test_duplication_leaves_loss_unchanged():
    s = shard()
    w = np.random.default_rng(3).normal(size=SOFTMAX.num_params(5, 4))
    dup = DataShard(s.owner, np.vstack([s.X, s.X]), np.concatenate([s.y, s.y]), 4)
    assert local_loss(w, dup) == pytest.approx(local_loss(w, s), rel=1e-12)


def test_empty_shard_rejected():
    empty = DataShard((0, 0), np.zeros((0, 3)), np.zeros(0, dtype=int), 2)
    with pytest.raises(ValueError):
        local_loss(np.zeros(8), empty)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_gradient_matches_central_differences(seed):
    rng = np.random.default_rng(seed)
    d, c, n = rng.integers(1, 6), rng.integers(2, 5), rng.integers(1, 20)
    feats = SOFTMAX.prepare(rng.normal(size=(n, d)))
    y = rng.integers(0, c, n)
    w = rng.normal(size=SOFTMAX.num_params(d, c))
    g = SOFTMAX.gradient(w, feats, y)
    ref = numeric_grad(w, feats, y)
    assert np.linalg.norm(g - ref) <= 1e-4 * max(np.linalg.norm(ref), 1e-8)


def test_global_loss_is_weighted_mean_and_pooled():
    a, b = shard(40, seed=1), shard(40, seed=2, owner=(0, 1))
    w = np.random.default_rng(0).normal(size=SOFTMAX.num_params(5, 4))
    assert global_loss([a, b], w) == pytest.approx(0.5 * (local_loss(w, a) + local_loss(w, b)), rel=1e-12)
    c = shard(17, seed=3, owner=(1, 0))
    big = pooled([a, b, c])
    whole = DataShard((9, 9), big.X, big.y, 4)
    assert global_loss([a, b, c], w) == pytest.approx(local_loss(w, whole), rel=1e-12)
    assert global_loss([c], w) == local_loss(w, c)


# -- training ---------------------------------------------------------------

def test_zero_learning_rate_is_identity():
    s = shard()
    w0 = np.random.default_rng(0).normal(size=SOFTMAX.num_params(5, 4))
    out = local_train(model(w0, 1), s, TrainingConfig(local_epochs=3, learning_rate=0.0))
    assert np.array_equal(out.weights, w0)
    assert out.sample_count == s.size
    assert np.array_equal(out.class_histogram, s.histogram)


def test_full_batch_epoch_is_one_gradient_step():
    s = shard()
    w0 = np.random.default_rng(1).normal(size=SOFTMAX.num_params(5, 4)) * 0.1
    cfg = TrainingConfig(local_epochs=1, learning_rate=0.05, batch_size=s.size)
    out = local_train(w0, s, cfg)
    expected = w0 - 0.05 * numeric_grad(w0, SOFTMAX.prepare(s.X), s.y)
    assert np.allclose(out.weights, expected, rtol=1e-4, atol=1e-9)


def test_training_descends():
    data = synthetic_blobs(400, 4, 3, 2.0, seed=5)
    s = DataShard((0, 0), data.X, data.y, 3)
    w0 = SOFTMAX.init_weights(4, 3)
    out = local_train(w0, s, TrainingConfig(local_epochs=5, learning_rate=0.01, batch_size=16, seed=2))
    assert local_loss(out, s) < local_loss(w0, s)


def test_training_is_deterministic():
    s = shard()
    cfg = TrainingConfig(local_epochs=4, learning_rate=0.01, batch_size=7, seed=11)
    a = local_train(np.zeros(24), s, cfg)
    b = local_train(np.zeros(24), s, cfg)
    assert a.weights.tobytes() == b.weights.tobytes()


def test_divergence_reports_epoch():
    s = shard()
    s = DataShard(s.owner, s.X * 1e200, s.y, 4)
    with pytest.raises(DivergenceError) as err:
        local_train(np.ones(24), s, TrainingConfig(local_epochs=3, learning_rate=1e10))
    assert err.value.epoch == 0


def test_model_state_invariants():
    with pytest.raises(ValueError):
        ModelState(np.array([np.nan]), 1)
    with pytest.raises(ValueError):
        ModelState(np.zeros(3), 5, np.array([1, 1]))


def test_training_time_arithmetic():
    cfg = TrainingConfig()
    assert num_minibatches(1000, 32) == 32
    assert training_time(1000, cfg) == pytest.approx(0.1024, rel=1e-12)
    doubled = TrainingConfig(local_epochs=200)
    assert training_time(1000, doubled) == pytest.approx(2 * training_time(1000, cfg))
    assert num_minibatches(20, 32) == 1


def test_training_config_invariants():
    for bad in (dict(local_epochs=0), dict(batch_size=0), dict(cpu_freq=0.0), dict(learning_rate=-1.0)):
        with pytest.raises(ValueError):
            TrainingConfig(**bad)


# -- aggregation -----------------------------------------------------------

def test_partial_weighting_examples():
    a, b = model([1.0, 0.0], 1), model([0.0, 1.0], 3)
    out = aggregate_partial([a, b])
    assert np.allclose(out.weights, [0.25, 0.75])
    assert out.sample_count == 4
    assert np.array_equal(aggregate_partial([a]).weights, a.weights)
    eq = aggregate_partial([model([2.0, 4.0], 5), model([4.0, 8.0], 5)])
    assert np.allclose(eq.weights, [3.0, 6.0])


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        aggregate_partial([model([1.0], 1), model([1.0, 2.0], 1)])
    with pytest.raises(ValueError):
        aggregate_partial([])


def test_global_requires_every_orbit():
    parts = {0: model([1.0], 2), 2: model([3.0], 2)}
    with pytest.raises(ValueError, match="missing"):
        aggregate_global(parts, num_orbits=3)
    assert np.allclose(aggregate_global({0: model([1.0], 2), 1: model([3.0], 2)}, 2).weights, [2.0])


def test_identical_partials_and_equal_sizes():
    p = model([0.3, -1.2, 5.0], 7)
    assert np.allclose(aggregate_global([p] * 5).weights, p.weights, rtol=1e-15)
    ws = np.random.default_rng(0).normal(size=(5, 3))
    out = aggregate_global([model(w, 10) for w in ws])
    assert np.allclose(out.weights, ws.mean(axis=0), rtol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_hierarchical_identity_and_conservation(seed):
    rng = np.random.default_rng(seed)
    d, n, c = int(rng.integers(1, 200)), int(rng.integers(1, 30)), 3
    clients = []
    for _ in range(n):
        hist = rng.integers(0, 50, c)
        hist[rng.integers(c)] += 1
        clients.append(ModelState(rng.normal(size=d), int(hist.sum()), hist))
    groups = rng.integers(0, max(1, n // 2), n)
    partials = [aggregate_partial([m for m, g in zip(clients, groups) if g == l]) for l in sorted(set(groups))]
    two = aggregate_global(partials)
    flat = fedavg(clients)
    assert np.linalg.norm(two.weights - flat.weights) <= 1e-12 * max(np.linalg.norm(flat.weights), 1e-300)
    assert two.sample_count == sum(m.sample_count for m in clients)
    assert np.array_equal(two.class_histogram, np.sum([m.class_histogram for m in clients], axis=0))


def test_inverse_frequency_reweighting():
    # orbit A holds class 0 only (90 samples), orbit B class 1 only (10 samples)
    a = ModelState(np.array([1.0]), 90, np.array([90, 0]))
    b = ModelState(np.array([0.0]), 10, np.array([0, 10]))
    assert np.allclose(inverse_frequency_coefficients([a, b]), [0.5, 0.5])
    assert aggregate_global([a, b], reweight="inverse_frequency").weights[0] == pytest.approx(0.5)
    assert aggregate_global([a, b]).weights[0] == pytest.approx(0.9)
    with pytest.raises(ValueError):
        aggregate_global([a, b], reweight="bogus")


# -- data ------------------------------------------------------------------

def test_iid_partition_equal_and_complete():
    data = synthetic_blobs(4000, 8, 10, seed=1)
    shards = partition_data(data, SPEC40, "iid", seed=3)
    assert len(shards) == 40
    for s in shards.values():
        assert s.size == 100
        assert np.all(s.histogram > 0)


def test_non_iid_partition_follows_orbit_class_split():
    data = synthetic_blobs(5000, 8, 10, seed=1)
    shards = partition_data(data, SPEC40, "non-iid", seed=3)
    for (l, _), s in shards.items():
        allowed = set(range(4)) if l in (0, 1) else set(range(4, 10))
        assert set(np.unique(s.y)) <= allowed


@pytest.mark.parametrize("mode", ["iid", "non-iid"])
def test_partition_disjoint_cover_and_deterministic(mode):
    data = synthetic_blobs(1003, 3, 10, seed=9)
    a = partition_data(data, SPEC40, mode, seed=4)
    b = partition_data(data, SPEC40, mode, seed=4)
    rows = np.concatenate([s.X for s in a.values()])
    assert len(rows) == len(data)
    assert len(np.unique(rows, axis=0)) == len(data)
    for sat in a:
        assert a[sat].X.tobytes() == b[sat].X.tobytes()


def test_partition_needs_enough_samples():
    with pytest.raises(ValueError):
        partition_data(synthetic_blobs(39, 2, 10, seed=0), SPEC40, "iid", seed=0)
    with pytest.raises(ValueError):
        partition_data(synthetic_blobs(400, 2, 10, seed=0), SPEC40, "bogus", seed=0)


def test_evaluate_examples():
    X = np.array([[1.0, 0.0]])
    w = np.zeros(SOFTMAX.num_params(2, 3))
    w.reshape(3, 3)[0, 2] = 5.0
    assert evaluate(w, X, np.array([2])) == 1.0
    rng = np.random.default_rng(0)
    Xr, yr = rng.normal(size=(1000, 4)), rng.integers(0, 10, 1000)
    acc = evaluate(np.zeros(50), Xr, yr)
    assert abs(acc - 0.1) <= 0.05
    perm = rng.permutation(1000)
    wr = rng.normal(size=50)
    assert evaluate(wr, Xr, yr) == evaluate(wr, Xr[perm], yr[perm])
    with pytest.raises(ValueError):
        evaluate(w, np.zeros((0, 2)), np.zeros(0, dtype=int))


def test_idx_round_trip(tmp_path):
    images = np.arange(2 * 3 * 4, dtype=np.uint8).reshape(2, 3, 4)
    labels = np.array([1, 7], dtype=np.uint8)
    write_idx(tmp_path / "img.idx", images)
    write_idx(tmp_path / "lab.idx", labels)
    assert np.array_equal(read_idx(tmp_path / "img.idx"), images)
    raw = (tmp_path / "img.idx").read_bytes()
    assert raw[:4] == bytes([0, 0, 0x08, 3]) and raw[4:8] == (2).to_bytes(4, "big")
    (tmp_path / "bad.idx").write_bytes(b"\x01\x02")
    with pytest.raises(ValueError):
        read_idx(tmp_path / "bad.idx")


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 2)), np.array([0, 5]), 3)
