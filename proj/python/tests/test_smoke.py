import math

import pytest

import persistminer as pm


def test_closed_form_examples():
    assert pm.persistence([0, 5, 10], 0, 10) == pytest.approx(1.2041199826559248, abs=1e-12)
    assert pm.persistence([0, 5, 10], 0, 21) == pytest.approx(0.6020599913279624, abs=1e-12)
    assert pm.persistence([4], 4, 4) == pytest.approx(math.log10(2), abs=1e-15)
    w, f, s = pm.persistence_components([0, 5, 10], 0, 10)
    assert (w, s) == (1.0, 2.0)
    assert f == pytest.approx(math.log10(4))


def test_interval_error():
    with pytest.raises(pm.IntervalError):
        pm.persistence([5], 6, 10)


def test_parse_and_format_round_trip():
    u = pm.parse_update("1.5,+,a,calls,b,red,blue")
    assert (u.t, u.op, u.src, u.rel, u.dst, u.src_label) == (1.5, "+", "a", "calls", "b", "red")
    assert pm.parse_update(pm.format_update(u)) == u
    with pytest.raises(pm.StreamError, match="line 7"):
        pm.parse_update("x,+,a,,b", 7)


def test_mine_offline_and_streaming_agree():
    stream = pm.generate_synthetic(3000, 0.5, 12, seed=3)
    off = pm.mine(stream, delta_max=30, k_max=2, view="order")
    on = pm.mine(stream, delta_max=30, k_max=2, view="order", variant="streaming")
    assert [r[0] for r in off] == [r[0] for r in on]
    for a, b in zip(off, on):
        assert a[3] == pytest.approx(b[3], abs=1e-9)
    assert off[0][3] >= off[-1][3]


def test_streaming_miner_query():
    miner = pm.StreamingMiner()
    for t in (0.0, 5.0, 10.0):
        events = miner.push(pm.EdgeUpdate(t, "+", "a", "", "b"))
        assert len(events) == 1
    assert miner.query("(+,a,,b)", 21.0) == pytest.approx(0.60206, abs=1e-5)
    assert miner.query("(+,x,,y)", 21.0) is None
    with pytest.raises(pm.ConfigError):
        pm.StreamingMiner(k_max=0)


def test_inject_and_detect():
    host = pm.generate_trip_stream(trips=4000, node_count=60, seed=1)
    stream, labels = pm.inject(host, trip_count=10, seed=2)
    assert len(stream) == len(labels)
    assert sum(labels) >= 2 * 10 * 5
    scores = pm.detect(stream, seed=1)
    assert len(scores) == len(stream)
    assert scores == pm.detect(stream, seed=1)
    assert 0.0 <= pm.roc_auc(scores, labels) <= 1.0
    assert 0.0 <= pm.f1_at_k(scores, labels, 100) <= 1.0


def test_ds_baseline():
    assert pm.ds_baseline([i + 0.5 for i in range(60)], 0, 60) == 60
    assert pm.ds_baseline([0.1, 0.2], 0, 60) == 1
