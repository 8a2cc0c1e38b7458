import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paretoflow.gflownet import Trajectory
from paretoflow.pareto import pareto_mask
from paretoflow.replay import BufferWarmingUp, ReplayBuffer, ReplayConfig


def stored_front_ids(buf):
    es = buf.entries()
    F = np.array([e.objectives for e in es])
    return sorted(e.id for e, on in zip(es, pareto_mask(F)) if on)


def test_dominating_insert_demotes():
    buf = ReplayBuffer(capacity=10, warmup=0)
    buf.insert(None, [1, 2])
    buf.insert(None, [2, 1])
    buf.insert(None, [2, 2])
    assert buf.front_ids == [2]


def test_duplicate_of_front_point_joins_front():
    buf = ReplayBuffer(capacity=10, warmup=0)
    buf.insert(None, [1, 1])
    buf.insert(None, [1, 1])
    assert buf.front_ids == [0, 1]


def test_capacity_one():
    buf = ReplayBuffer(capacity=1, warmup=0)
    buf.insert(None, [1, 1])
    assert buf.insert(None, [0, 0]) is False
    assert [e.id for e in buf.entries()] == [0]
    assert buf.insert(None, [0, 2]) is True
    assert [e.id for e in buf.entries()] == [1] and buf.front_ids == [1]


def test_evicts_oldest_non_front_first():
    buf = ReplayBuffer(capacity=3, warmup=0)
    buf.insert(None, [5, 5])  # front
    buf.insert(None, [1, 1])
    buf.insert(None, [2, 2])
    buf.insert(None, [3, 3])
    assert [e.id for e in buf.entries()] == [0, 2, 3]


@pytest.mark.parametrize("ratio,batch,nf", [(0.1, 128, 13), (0.2, 128, 26), (0.4, 128, 52), (0.1, 10, 1), (0.2, 10, 2), (0.4, 10, 4)])
def test_front_quota(ratio, batch, nf):
    buf = ReplayBuffer(capacity=100, warmup=0, pareto_ratio=ratio)
    assert buf.front_quota(batch) == nf


def test_min_pareto_k_floor():
    buf = ReplayBuffer(capacity=100, warmup=0, pareto_ratio=0.1, min_pareto_k=5)
    assert buf.front_quota(8) == 5


@pytest.mark.parametrize("ratio", [0.1, 0.2, 0.4])
def test_batch_composition(ratio):
    rng = np.random.default_rng(0)
    buf = ReplayBuffer(capacity=500, warmup=0, pareto_ratio=ratio)
    buf.insert(None, [10, 10])
    for x in rng.uniform(0, 5, size=(300, 2)):
        buf.insert(None, x)
    batch = buf.sample_batch(128, rng)
    nf = buf.front_quota(128)
    assert len(batch) == 128
    assert all(e.id == 0 for e in batch[:nf])


def test_all_front_buffer_gives_all_front_batch():
    buf = ReplayBuffer(capacity=50, warmup=0)
    for i in range(10):
        buf.insert(None, [i, 9 - i])
    batch = buf.sample_batch(64, 0)
    assert {e.id for e in batch} <= set(buf.front_ids)


def test_warmup_gate():
    buf = ReplayBuffer(capacity=10, warmup=3)
    buf.insert(None, [0, 0])
    with pytest.raises(BufferWarmingUp):
        buf.sample_batch(4, 0)
    with pytest.raises(BufferWarmingUp):
        ReplayBuffer(capacity=10, warmup=0).sample_batch(4, 0)


def test_snapshot_behaviour():
    buf = ReplayBuffer(capacity=10, warmup=0)
    assert len(buf.front_snapshot()) == 0
    buf.insert(None, [1, 2])
    buf.insert(None, [2, 1])
    snap = buf.front_snapshot()
    buf.insert(None, [0, 0])
    after = buf.front_snapshot()
    assert np.array_equal(snap.points, after.points)
    with pytest.raises(ValueError):
        snap.points[0, 0] = 99


def test_config_validation():
    for kw in [{"capacity": 0}, {"pareto_ratio": 0.0}, {"pareto_ratio": 1.0}, {"warmup": -1}]:
        with pytest.raises(ValueError):
            ReplayConfig(**kw)


def test_random_stream_keeps_front_exact():
    rng = np.random.default_rng(7)
    buf = ReplayBuffer(capacity=300, warmup=0)
    for step in range(10_000):
        buf.insert(None, rng.integers(0, 12, size=3))
        if step % 500 == 0 or step == 9_999:
            assert sorted(buf.front_ids) == stored_front_ids(buf)
            assert len(buf) <= 300


@settings(max_examples=40)
@given(
    st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=60),
    st.integers(1, 8),
)
def test_eviction_protects_front(points, cap):
    buf = ReplayBuffer(capacity=cap, warmup=0)
    for p in points:
        before_front = set(buf.front_ids)
        had_non_front = len(buf) > len(before_front)
        full = len(buf) >= cap
        buf.insert(None, p)
        stored = {e.id for e in buf.entries()}
        if full and had_non_front:
            # only demotion may remove front status, never eviction
            assert before_front <= stored
        assert sorted(buf.front_ids) == stored_front_ids(buf)


def test_dump_restore_roundtrip(tmp_path):
    buf = ReplayBuffer(capacity=20, warmup=0)
    rng = np.random.default_rng(1)
    for _ in range(30):
        n = int(rng.integers(1, 4))
        t = Trajectory(rng.integers(0, 5, size=(n, 2)), rng.integers(0, 3, size=n), np.zeros(n), -np.ones(n))
        buf.insert(t, rng.uniform(size=2))
    path = tmp_path / "buf.jsonl"
    buf.dump(path)
    back = ReplayBuffer.restore(path, buf.config)
    assert len(back) == len(buf)
    for a, b in zip(buf.entries(), back.entries()):
        assert np.array_equal(a.objectives, b.objectives)
        assert np.array_equal(a.trajectory.states, b.trajectory.states)
        assert np.array_equal(a.trajectory.actions, b.trajectory.actions)
    assert np.array_equal(buf.front_snapshot().points, back.front_snapshot().points)
