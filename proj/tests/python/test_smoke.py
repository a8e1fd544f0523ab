import numpy as np
import pytest

import csmcover

TABLE = np.array([
    [0.00, 0.20, 0.12, 0.30, 0.30],
    [0.05, 0.00, 0.06, 0.25, 0.37],
    [0.21, 0.10, 0.00, 0.32, 0.33],
    [0.25, 0.26, 0.20, 0.00, 0.30],
    [0.19, 0.16, 0.29, 0.32, 0.00],
])
IDS = [21, 22, 31, 60, 229]


def test_grid_codec():
    assert csmcover.GRID_SIZE == 243
    assert csmcover.encode([2, 2, 2, 2, 2]) == 242
    assert list(csmcover.decode(229)) == [2, 2, 1, 1, 1]
    assert all(csmcover.encode(csmcover.decode(i)) == i for i in range(243))
    with pytest.raises(ValueError):
        csmcover.decode(243)


def test_published_table():
    m = csmcover.RegretMatrix(IDS, TABLE)
    c = csmcover.greedy_cover(m, 0.10)
    assert c.representatives == [22, 60, 229]
    assert c.assignment[22] == [21, 22, 31]
    b = csmcover.exact_cover(m, 0.10)
    assert b.complete and b.exact_size == 3
    assert csmcover.lower_bound(m, 0.10) <= 3
    labels = csmcover.cluster_sources(c, m)
    assert labels == {21: 22, 22: 22, 31: 22, 60: 60, 229: 229}
    assert csmcover.filter_representatives(c, 2).uncovered == [60, 229]


def test_bad_matrix():
    bad = TABLE.copy()
    bad[0, 0] = 0.1
    with pytest.raises(csmcover.ValidationError):
        csmcover.RegretMatrix(IDS, bad)


def test_pareto_and_baseline():
    shares = csmcover.pareto_shares([159, 69, 8, 4, 3])
    assert shares[1] == pytest.approx(228 / 243)
    assert csmcover.random_baseline(243, 5, 7) == csmcover.random_baseline(243, 5, 7)


def test_simulated_regret_and_importance():
    cfg = csmcover.SimulatorConfig()
    cfg.dimension = 8
    cfg.samples_per_class = 40
    data = csmcover.simulate_sources([0, 13, 242], cfg)
    assert data[0].train.features.shape == (40, 8)
    det = csmcover.train_detector(data[0])
    assert 0.0 <= csmcover.probability_of_error(det, data[0].test) <= 1.0
    m = csmcover.regret_matrix(data)
    assert np.all(np.diag(m.regret) == 0.0)

    labels = {i: csmcover.decode(i)[1] for i in range(243)}
    mdi = csmcover.mdi_importance(labels, trees=20, seed=1)
    assert max(mdi, key=mdi.get) == "denoising"
    assert sum(mdi.values()) == pytest.approx(1.0)
