import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qampa import gates
from qampa.metrics import metric_report
from qampa.oracle import DenseState, apply_2q
from qampa.problem import energy_table, feasible_basis, generate_instance
from qampa.subspace import (SubspaceState, apply_field_phases, apply_mp, apply_xy, apply_zz,
                            dicke_state, expectation_epsilon, probabilities, random_state)

angles = st.floats(-7, 7, allow_nan=False)


def basis_state(basis, bits):
    a = np.zeros(len(basis), complex)
    a[basis.index_of(bits)] = 1
    return SubspaceState(basis, a)


def test_dicke_amplitudes():
    st42 = dicke_state(feasible_basis(4, 2))
    np.testing.assert_allclose(st42.amplitudes, np.full(6, 1 / np.sqrt(6)))
    np.testing.assert_allclose(dicke_state(feasible_basis(2, 1)).amplitudes, [2 ** -0.5] * 2)
    assert abs(st42.norm - 1) < 1e-15


def test_dicke_empty_basis():
    b = feasible_basis(2, 1)
    b_empty = type(b).__new__(type(b))
    b_empty.n, b_empty.kappa, b_empty.states = 2, 1, np.array([], dtype=np.int64)
    with pytest.raises(ValueError):
        dicke_state(b_empty)


@pytest.mark.parametrize("gamma", [0.37, -1.2, 2.9])
def test_zz_phase_on_anti_aligned(gamma):
    b = feasible_basis(2, 1)
    out = apply_zz(basis_state(b, "01"), 0, 1, gamma, 1.0)
    assert out.amplitudes[b.index_of("01")] == pytest.approx(np.exp(-1j * gamma), abs=1e-15)


def test_zz_zero_is_identity(rng):
    b = feasible_basis(6, 3)
    s = random_state(b, rng)
    ref = s.amplitudes.copy()
    np.testing.assert_array_equal(apply_zz(s, 1, 4, 0.0, 0.5).amplitudes, ref)


@pytest.mark.parametrize("fn", [apply_zz, apply_xy])
def test_same_qubit_rejected(fn):
    s = dicke_state(feasible_basis(4, 2))
    with pytest.raises(ValueError):
        fn(s, 2, 2, 0.3)


def test_xy_quarter_pi_swaps():
    b = feasible_basis(2, 1)
    out = apply_xy(basis_state(b, "01"), 0, 1, np.pi / 4)
    np.testing.assert_allclose(out.amplitudes[b.index_of("10")], 1j, atol=1e-15)
    np.testing.assert_allclose(out.amplitudes[b.index_of("01")], 0, atol=1e-15)


@pytest.mark.parametrize("beta", [0.0, np.pi])
def test_xy_identity_angles(beta, rng):
    b = feasible_basis(6, 3)
    s = random_state(b, rng)
    ref = s.amplitudes.copy()
    np.testing.assert_allclose(apply_xy(s, 0, 5, beta).amplitudes, ref, atol=1e-14)


def test_field_phases():
    b = feasible_basis(4, 2)
    s = random_state(b, np.random.default_rng(0))
    ref = s.amplitudes.copy()
    np.testing.assert_array_equal(apply_field_phases(s.copy(), 0.7, np.zeros(4)).amplitudes, ref)
    out = apply_field_phases(s.copy(), 0.7, np.full(4, 0.3)).amplitudes
    ratio = out / ref
    np.testing.assert_allclose(ratio, ratio[0], atol=1e-14)
    assert abs(abs(ratio[0]) - 1) < 1e-14
    # non-uniform field acts per state: exp(i g sum h s)
    h = np.array([0.1, -0.4, 0.25, 0.0])
    out = apply_field_phases(s.copy(), 0.7, h).amplitudes
    np.testing.assert_allclose(out, ref * np.exp(0.7j * (b.spins @ h)), atol=1e-14)


@pytest.mark.parametrize("g, bt", [(0.8, 0.0), (0.0, 1.1)])
def test_mp_limits(g, bt, rng):
    b = feasible_basis(6, 3)
    s = random_state(b, rng)
    mp = apply_mp(s.copy(), 1, 3, g, bt, -0.5).amplitudes
    if bt == 0:
        ref = apply_zz(s.copy(), 1, 3, g, -0.5).amplitudes
    else:
        ref = apply_xy(s.copy(), 1, 3, bt).amplitudes
    np.testing.assert_allclose(mp, ref, atol=1e-14)


@given(g=angles, bt=angles, J=st.sampled_from([-1, -0.5, 0.5, 1]))
@settings(max_examples=50, deadline=None)
def test_zz_xy_commute(g, bt, J):
    b = feasible_basis(6, 3)
    s = random_state(b, np.random.default_rng(1))
    a1 = apply_xy(apply_zz(s.copy(), 0, 4, g, J), 0, 4, bt).amplitudes
    a2 = apply_zz(apply_xy(s.copy(), 0, 4, bt), 0, 4, g, J).amplitudes
    np.testing.assert_allclose(a1, a2, atol=1e-12)


@given(seed=st.integers(0, 10**6), steps=st.integers(1, 40))
@settings(max_examples=40, deadline=None)
def test_norm_preserved(seed, steps):
    rng = np.random.default_rng(seed)
    b = feasible_basis(8, 4)
    s = random_state(b, rng)
    for _ in range(steps):
        n, m = rng.choice(8, 2, replace=False)
        g, bt = rng.uniform(-6, 6, 2)
        [lambda: apply_zz(s, n, m, g, 0.5), lambda: apply_xy(s, n, m, bt),
         lambda: apply_mp(s, n, m, g, bt, -1.0)][rng.integers(3)]()
    assert abs(s.norm - 1) < 1e-10


@pytest.mark.parametrize("n", [4, 5, 6])
def test_matches_dense_gates(n, rng):
    kappa = n // 2
    b = feasible_basis(n, kappa)
    s = random_state(b, rng)
    dense = DenseState.embed(b, s.amplitudes).vector
    for _ in range(25):
        a, c = (int(x) for x in rng.choice(n, 2, replace=False))
        g, bt, J = rng.uniform(-4, 4), rng.uniform(-4, 4), rng.choice([-1, 0.5])
        apply_mp(s, a, c, g, bt, J)
        dense = apply_2q(dense, n, gates.mp(J * g, bt), a, c)
    ds = DenseState(dense)
    assert np.max(np.abs(ds.restrict(b) - s.amplitudes)) < 1e-10
    assert ds.leakage(b) < 1e-12


def test_probabilities_and_expectation(inst4):
    b = feasible_basis(4, 2)
    tab = energy_table(inst4, b)
    np.testing.assert_allclose(probabilities(dicke_state(b)), np.full(6, 1 / 6))
    assert expectation_epsilon(basis_state(b, b.bitstring(tab.argmin)), tab) == 0.0
    s = random_state(b, np.random.default_rng(5))
    assert expectation_epsilon(s, tab) == pytest.approx(metric_report(s, tab).best[1], abs=1e-12)


def test_dump(tmp_path):
    s = dicke_state(feasible_basis(4, 2))
    data = __import__("json").loads(s.dump(tmp_path / "a.json").read_text())
    assert data["states"][0] == "0011" and len(data["re"]) == 6
