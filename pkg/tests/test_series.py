import numpy as np
import pytest

from markovpi import (
    Method,
    NominalLevel,
    NonFiniteInput,
    OrderTooLarge,
    PredictionInterval,
    TimeSeriesSample,
    embed,
    last_predictor,
)


def test_sample_basic():
    s = TimeSeriesSample(values=[1.0, 2.0, 3.0])
    assert s.n == 3
    assert s.values.dtype == np.float64
    with pytest.raises(ValueError):
        s.values[0] = 9.0


def test_sample_rejects_non_finite():
    with pytest.raises(NonFiniteInput):
        TimeSeriesSample(values=[1.0, np.nan])
    with pytest.raises(NonFiniteInput):
        TimeSeriesSample(values=[np.inf, 0.0])


def test_embed_p1_example():
    pairs = embed(TimeSeriesSample(values=[1.0, 2.0, 3.0, 4.0]), 1)
    assert pairs.count == 3
    assert pairs.predictors.tolist() == [[1.0], [2.0], [3.0]]
    assert pairs.responses.tolist() == [2.0, 3.0, 4.0]


def test_embed_p2_example():
    # lag vector is most-recent-first: (Y_{t-1}, Y_{t-2})
    pairs = embed(TimeSeriesSample(values=[1.0, 2.0, 3.0, 4.0]), 2)
    assert pairs.count == 2
    assert pairs.predictors.tolist() == [[2.0, 1.0], [3.0, 2.0]]
    assert pairs.responses.tolist() == [3.0, 4.0]


def test_embed_too_short():
    with pytest.raises(OrderTooLarge):
        embed(TimeSeriesSample(values=[1.0, 2.0, 3.0]), 3)
    with pytest.raises(OrderTooLarge):
        embed(TimeSeriesSample(values=[1.0, 2.0, 3.0]), 2)


def test_embed_rejects_bad_order():
    with pytest.raises(ValueError):
        embed(TimeSeriesSample(values=[1.0, 2.0, 3.0, 4.0]), 0)


def test_embed_reconstruction():
    rng = np.random.default_rng(3)
    y = rng.normal(size=40)
    for p in (1, 2, 3, 5):
        pairs = embed(TimeSeriesSample(values=y), p)
        assert pairs.count == 40 - p
        for i in range(pairs.count):
            t = p + 1 + i  # 1-based time of the response
            assert pairs.responses[i] == y[t - 1]
            for s in range(p):
                assert pairs.predictors[i, s] == y[t - 1 - (s + 1)]


def test_last_predictor_examples():
    s = TimeSeriesSample(values=[1.0, 2.0, 3.0, 4.0])
    assert last_predictor(s, 1).tolist() == [4.0]
    assert last_predictor(s, 2).tolist() == [4.0, 3.0]
    with pytest.raises(OrderTooLarge):
        last_predictor(TimeSeriesSample(values=[5.0]), 2)


def test_nominal_level_domain():
    assert NominalLevel(0.05).alpha == 0.05
    for bad in (0.0, 1.0, -0.1, 1.5, np.nan):
        with pytest.raises(ValueError):
            NominalLevel(bad)


def test_prediction_interval_invariants():
    iv = PredictionInterval(-1.0, 2.5, NominalLevel(0.1), Method.MF)
    assert iv.length == 3.5
    assert iv.method is Method.MF
    with pytest.raises(ValueError):
        PredictionInterval(1.0, 0.0, NominalLevel(0.1))
    with pytest.raises(NonFiniteInput):
        PredictionInterval(0.0, np.inf, NominalLevel(0.1))


def test_method_round_trip():
    for name in ("MF", "PMF", "MDCP", "PMDCP"):
        assert Method(name).value == name
