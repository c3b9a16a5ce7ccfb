import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qampa.ansatz import AngleSchedule, build, execute
from qampa.metrics import (InvalidDistributionError, best_r_from_state, expected_best_r,
                           group_structure, metric_report, score)
from qampa.oracle import exhaustive_best_r, mc_best_r
from qampa.problem import energy_table, feasible_basis, generate_instance
from qampa.subspace import dicke_state, probabilities


def dist(probs, eps):
    return score(np.asarray(probs, float), np.asarray(eps, float))


def random_distribution(rng, k):
    eps = np.sort(rng.uniform(0, 1, k))
    eps[0], eps[-1] = 0.0, 1.0
    probs = rng.dirichlet(np.ones(k) * rng.uniform(0.2, 2))
    return probs, eps


@pytest.mark.parametrize("R, expected", [(1, 0.5), (2, 0.25)])
def test_two_point_examples(R, expected):
    assert expected_best_r(dist([0.5, 0.5], [0, 1]), R) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("R", [1, 2, 5, 100])
def test_ground_state_mass(R):
    assert expected_best_r(dist([1, 0, 0], [0, 0.5, 1]), R) == 0.0


def test_invalid_r():
    with pytest.raises(ValueError):
        expected_best_r(dist([0.5, 0.5], [0, 1]), 0)


@pytest.mark.parametrize("probs", [[-0.1, 1.1], [0.5, 0.49]])
def test_invalid_distribution(probs):
    with pytest.raises(InvalidDistributionError):
        dist(probs, [0, 1])


def test_score_uniform_dicke(inst4):
    tab = energy_table(inst4, feasible_basis(4, 2))
    d = score(probabilities(dicke_state(feasible_basis(4, 2))), tab)
    # inst4 has ties, so use a table with distinct eps for the F check
    eps = np.linspace(0, 1, 6)
    d = score(np.full(6, 1 / 6), eps)
    np.testing.assert_allclose(d.cdf, np.arange(1, 7) / 6)
    assert len(d) == 6


def test_score_single_and_ties():
    d = score([0, 1.0, 0], [0.2, 0.0, 1.0])
    assert len(score([1.0], [0.0])) == 1
    d = score([0.2, 0.3, 0.5], [0.4, 0.4, 1.0])
    assert d.groups == [(0.4, 0.5), (1.0, 0.5)]
    d = score([0.2, 0.3, 0.5], [0.4, 0.4 + 1e-13, 1.0])
    assert len(d) == 2
    assert np.all(np.diff(d.eps) > 0) and d.cdf[-1] == pytest.approx(1.0)


@given(seed=st.integers(0, 10**6), k=st.integers(1, 6), R=st.integers(1, 4))
@settings(max_examples=150, deadline=None)
def test_matches_exhaustive(seed, k, R):
    probs, eps = random_distribution(np.random.default_rng(seed), k)
    got = expected_best_r(dist(probs, eps), R)
    assert abs(got - exhaustive_best_r(probs, eps, R)) < 1e-12


@given(seed=st.integers(0, 10**6), k=st.integers(1, 30))
@settings(max_examples=60, deadline=None)
def test_monotone_in_r_and_telescoping(seed, k):
    probs, eps = random_distribution(np.random.default_rng(seed), k)
    d = dist(probs, eps)
    vals = [expected_best_r(d, R) for R in range(1, 12)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(float(np.dot(probs, eps)), abs=1e-12)
    for R in (1, 3, 7):
        tail = d.tail()
        nxt = np.append(tail[1:], 0.0)
        assert np.sum(tail ** R - nxt ** R) == pytest.approx(1.0, abs=1e-12)


def test_large_r_limit():
    for seed in range(5):
        inst = generate_instance(8, 4, seed=seed)
        plan = build("QAMPA", inst, 2, 1)
        st_ = execute(plan, AngleSchedule((0.4, 1.0), (0.9, 0.3)))
        tab = energy_table(inst, plan.basis)
        probs = probabilities(st_)
        attained = tab.eps[probs > 0].min()
        assert abs(expected_best_r(score(probs, tab), 10_000) - attained) < 1e-3


def test_monte_carlo_agreement():
    rng = np.random.default_rng(2024)
    for trial in range(5):
        probs, eps = random_distribution(rng, 8)
        mean, se = mc_best_r(probs, eps, 5, 200_000, seed=trial)
        assert abs(expected_best_r(dist(probs, eps), 5) - mean) <= 3 * se + 1e-12


def test_report_on_instance(inst4):
    b = feasible_basis(4, 2)
    tab = energy_table(inst4, b)
    rep = metric_report(dicke_state(b), tab, [2, 3])
    assert set(rep.best) == {1, 2, 3, 5}
    assert rep.best[1] == pytest.approx(tab.eps.mean(), abs=1e-12)
    assert rep.best[5] <= rep.best[1]
    assert rep.expectation == pytest.approx(rep.best[1], abs=1e-12)
    assert rep.p_optimum == pytest.approx(np.sum(tab.eps == 0) / 6)
    st_ = execute(build("QAOA", inst4, 1, 0), AngleSchedule((0.5,), (0.8,)))
    mean, se = mc_best_r(probabilities(st_), tab.eps, 5, 1_000_000, seed=1)
    assert abs(metric_report(st_, tab).best[5] - mean) <= 3 * se + 1e-12
    assert [r["R"] for r in rep.rows("x", "QAOA", 1)] == [1, 2, 3, 5]


def test_kernel_path_matches(inst6):
    plan = build("QAOA", inst6, 2, 3)
    st_ = execute(plan, AngleSchedule((0.4, 1.0), (0.9, 0.3)))
    tab = energy_table(inst6, plan.basis)
    gs = group_structure(tab.eps)
    for R in (1, 2, 5, 17):
        assert best_r_from_state(st_, gs, R) == pytest.approx(
            expected_best_r(score(probabilities(st_), tab), R), abs=1e-13)
