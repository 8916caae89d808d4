import numpy as np
import pytest

import markovpi.bandwidth as bandwidth_mod
from markovpi import (
    BandwidthGrid,
    Bandwidths,
    DegenerateData,
    DgpSpec,
    TimeSeriesSample,
    cv_select,
    default_grid,
    embed,
    estimate_loo,
    rule_of_thumb,
    select_bandwidths,
    simulate,
)

# frozen against 50-digit evaluations of the closed-form rates
ROT_H_100_1 = 0.39810717055349725  # 100^(-1/5)
ROT_H0_100_1 = 0.15848931924611135  # 100^(-2/5)
ROT_H_100_2_S2 = 0.92831776672255578  # 2 * 100^(-1/6)
ROT_H0_100_2_S2 = 0.43088693800637674  # 2 * 100^(-1/3)


def sample_pairs(n=22, seed=5):
    series = simulate(DgpSpec(model="sine", innovation="normal", n=n, seed=seed))
    return embed(series, 1)


def test_rule_of_thumb_frozen_values():
    bw = rule_of_thumb(100, 1, 1.0)
    assert bw.h == pytest.approx(ROT_H_100_1, rel=1e-14)
    assert bw.h0 == pytest.approx(ROT_H0_100_1, rel=1e-14)
    bw = rule_of_thumb(100, 2, 2.0)
    assert bw.h == pytest.approx(ROT_H_100_2_S2, rel=1e-14)
    assert bw.h0 == pytest.approx(ROT_H0_100_2_S2, rel=1e-14)


def test_rule_of_thumb_rejects_bad_inputs():
    with pytest.raises(ValueError):
        rule_of_thumb(100, 1, 0.0)
    with pytest.raises(ValueError):
        rule_of_thumb(2, 1, 1.0)


def test_default_grid_shape():
    grid = default_grid(100, 1, 1.0)
    assert len(grid.h_candidates) == len(grid.h0_candidates) == 7
    assert grid.h_candidates[3] == pytest.approx(ROT_H_100_1, rel=1e-14)
    assert grid.h0_candidates[3] == pytest.approx(ROT_H0_100_1, rel=1e-14)
    assert grid.h_candidates[0] == pytest.approx(ROT_H_100_1 / 4, rel=1e-14)
    assert grid.h_candidates[-1] == pytest.approx(ROT_H_100_1 * 4, rel=1e-14)


def test_grid_validation():
    with pytest.raises(ValueError):
        BandwidthGrid(h_candidates=(), h0_candidates=(0.1,))
    with pytest.raises(ValueError):
        BandwidthGrid(h_candidates=(0.2, 0.1), h0_candidates=(0.1,))
    with pytest.raises(ValueError):
        BandwidthGrid(h_candidates=(0.0, 0.1), h0_candidates=(0.1,))


def test_cv_singleton_grid():
    pairs = sample_pairs()
    grid = BandwidthGrid(h_candidates=(0.37,), h0_candidates=(0.21,))
    bw = cv_select(pairs, grid)
    assert (bw.h, bw.h0) == (0.37, 0.21)


def _cv_objective_oracle(pairs, h, h0):
    bw = Bandwidths(h=h, h0=h0)
    total = 0.0
    for t in range(pairs.count):
        for s in range(pairs.count):
            ind = 1.0 if pairs.responses[t] <= pairs.responses[s] else 0.0
            est = estimate_loo(
                pairs, bw, t, pairs.predictors[t], float(pairs.responses[s])
            )
            total += (ind - est) ** 2
    return total


def test_cv_matches_brute_force_argmin():
    pairs = sample_pairs(n=21, seed=8)
    rot = rule_of_thumb(21, 1, float(np.std(pairs.responses, ddof=1)))
    mults = (0.5, 0.75, 1.0, 1.5, 2.0)
    grid = BandwidthGrid(
        h_candidates=tuple(m * rot.h for m in mults),
        h0_candidates=tuple(m * rot.h0 for m in mults),
    )
    best = (np.inf, None)
    for h in grid.h_candidates:
        for h0 in grid.h0_candidates:
            crit = _cv_objective_oracle(pairs, h, h0)
            if crit < best[0]:
                best = (crit, (h, h0))
    selected = cv_select(pairs, grid)
    assert (selected.h, selected.h0) == best[1]


def test_cv_constant_series():
    pairs = embed(TimeSeriesSample(values=[1.0] * 10), 1)
    grid = BandwidthGrid(h_candidates=(0.2,), h0_candidates=(0.1,))
    with pytest.raises(DegenerateData):
        cv_select(pairs, grid)
    with pytest.raises(DegenerateData):
        select_bandwidths(pairs, mode="cv")


def test_cv_selection_in_grid_and_minimal():
    pairs = sample_pairs(n=30, seed=12)
    grid = default_grid(30, 1, float(np.std(pairs.responses, ddof=1)))
    bw = cv_select(pairs, grid)
    assert bw.h in grid.h_candidates
    assert bw.h0 in grid.h0_candidates
    crits = bandwidth_mod._cv_criteria(pairs, grid)
    a = grid.h_candidates.index(bw.h)
    b = grid.h0_candidates.index(bw.h0)
    assert crits[a, b] == crits.min()


def test_cv_deterministic():
    pairs = sample_pairs(n=25, seed=3)
    grid = default_grid(25, 1, float(np.std(pairs.responses, ddof=1)))
    first = cv_select(pairs, grid)
    second = cv_select(pairs, grid)
    assert (first.h, first.h0) == (second.h, second.h0)


def test_cv_subsampled_evaluation_points(monkeypatch):
    pairs = sample_pairs(n=16, seed=9)
    monkeypatch.setattr(bandwidth_mod, "CV_SUBSAMPLE_LIMIT", 8)
    grid = default_grid(16, 1, float(np.std(pairs.responses, ddof=1)))
    first = cv_select(pairs, grid)
    second = cv_select(pairs, grid)
    assert first.h in grid.h_candidates
    assert (first.h, first.h0) == (second.h, second.h0)


def test_select_bandwidths_modes():
    pairs = sample_pairs(n=40, seed=2)
    sigma = float(np.std(pairs.responses, ddof=1))
    rot = select_bandwidths(pairs, mode="rot")
    want = rule_of_thumb(40, 1, sigma)
    assert (rot.h, rot.h0) == (want.h, want.h0)
    fixed = Bandwidths(h=0.9, h0=0.4)
    assert select_bandwidths(pairs, mode="fixed", fixed=fixed) is fixed
    with pytest.raises(ValueError):
        select_bandwidths(pairs, mode="fixed")
    with pytest.raises(ValueError):
        select_bandwidths(pairs, mode="nope")
    cv = select_bandwidths(pairs, mode="cv")
    grid = default_grid(40, 1, sigma)
    assert cv.h in grid.h_candidates and cv.h0 in grid.h0_candidates
