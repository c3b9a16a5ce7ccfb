import json
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from qampa.oracle import brute_force_spectrum
from qampa.problem import (DEFAULT_COEFFS, DegenerateSpectrumError, FeasibleBasis, InstanceParseError,
                           ProblemInstance, complement, energy_table, evaluate_cost, feasible_basis,
                           generate_instance, iter_bitstrings, load_instance, pair_index, pair_list,
                           save_instance)

from conftest import make_instance


def test_generate_default_coefficients():
    inst = generate_instance(4, 2, DEFAULT_COEFFS, seed=7)
    assert inst.couplings.size == 6
    assert set(inst.couplings) <= set(DEFAULT_COEFFS)
    assert not inst.has_fields


def test_generate_singleton_set():
    inst = generate_instance(2, 1, (1.0,), seed=99)
    assert inst.coupling(0, 1) == 1.0


def test_generate_deterministic(tmp_path):
    a = save_instance(generate_instance(6, 3, seed=3), tmp_path / "a.json")
    b = save_instance(generate_instance(6, 3, seed=3), tmp_path / "b.json")
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("n", [0, -2, 3, 5])
def test_generate_rejects_odd_or_nonpositive(n):
    with pytest.raises(ValueError):
        generate_instance(n, 1)


def test_coupling_distribution_uniform():
    counts = np.zeros(len(DEFAULT_COEFFS))
    for seed in range(400):
        J = generate_instance(8, 4, seed=seed).couplings
        for k, c in enumerate(DEFAULT_COEFFS):
            counts[k] += np.sum(J == c)
    _, pval = stats.chisquare(counts)
    assert pval > 1e-3


@pytest.mark.parametrize("bits, expected", [("01", -1.0), ("00", 1.0), ("10", -1.0), ("11", 1.0)])
def test_evaluate_cost_two_qubits(bits, expected):
    inst = make_instance(2, [1.0], kappa=1)
    assert evaluate_cost(inst, bits) == expected


def test_evaluate_cost_three_qubits():
    inst = make_instance(3, [0.5, -1.0, 1.0], kappa=1)
    assert inst.coupling(0, 2) == -1.0
    assert evaluate_cost(inst, "010") == pytest.approx(-2.5, abs=1e-15)
    labels, energies = brute_force_spectrum(inst)
    assert energies[list(labels).index(0b010)] == pytest.approx(-2.5, abs=1e-15)


def test_evaluate_cost_length_mismatch(inst4):
    with pytest.raises(ValueError):
        evaluate_cost(inst4, "010")


def test_fields_enter_linearly():
    inst = make_instance(2, [0.0], kappa=1, fields=[0.3, -0.2])
    assert evaluate_cost(inst, "01") == pytest.approx(0.3 + 0.2)


@given(seed=st.integers(0, 2**31), x=st.integers(0, 2**8 - 1))
@settings(max_examples=60, deadline=None)
def test_complement_symmetry(seed, x):
    inst = generate_instance(8, 4, seed=seed)
    b = format(x, "08b")
    assert evaluate_cost(inst, b) == pytest.approx(evaluate_cost(inst, complement(b)), abs=1e-12)


@pytest.mark.parametrize("n, kappa, size", [(4, 2, 6), (16, 8, 12870), (2, 0, 1), (5, 2, 10)])
def test_feasible_basis_size(n, kappa, size):
    b = feasible_basis(n, kappa)
    assert len(b) == size == comb(n, kappa)
    assert np.all(np.diff(b.states) > 0)
    assert all(s.count("1") == kappa for s in b.bitstrings()[:50])


def test_feasible_basis_empty_weight():
    assert feasible_basis(2, 0).bitstrings() == ["00"]


@pytest.mark.parametrize("kappa", [-1, 5])
def test_feasible_basis_kappa_range(kappa):
    with pytest.raises(ValueError):
        feasible_basis(4, kappa)


def test_feasible_basis_is_lexicographic():
    b = feasible_basis(6, 3)
    strs = b.bitstrings()
    assert strs == sorted(strs)
    assert strs == [s for s in iter_bitstrings(6) if s.count("1") == 3]


def test_partner_table():
    b = feasible_basis(4, 2)
    for p, (a, c) in enumerate(pair_list(4)):
        for k, s in enumerate(b.bitstrings()):
            j = b.partner_table[p, k]
            if s[a] == s[c]:
                assert j == -1
            else:
                t = list(s)
                t[a], t[c] = t[c], t[a]
                assert b.bitstring(j) == "".join(t)


def test_pair_index_roundtrip():
    n = 7
    for k, (a, b) in enumerate(pair_list(n)):
        assert pair_index(a, b, n) == k == pair_index(b, a, n)


@pytest.mark.parametrize("seed", range(5))
def test_energy_table_matches_enumeration(seed):
    inst = generate_instance(8, 4, seed=seed)
    b = feasible_basis(8, 4)
    tab = energy_table(inst, b)
    labels, energies = brute_force_spectrum(inst)
    assert tab.e_min == pytest.approx(energies.min(), abs=1e-12)
    assert tab.e_max == pytest.approx(energies.max(), abs=1e-12)
    assert tab.eps[tab.argmin] == 0.0 and tab.eps[tab.argmax] == 1.0
    assert energies[list(labels).index(b.states[tab.argmin])] == pytest.approx(energies.min())
    assert energies[list(labels).index(b.states[tab.argmax])] == pytest.approx(energies.max())
    np.testing.assert_allclose(tab.raw, [evaluate_cost(inst, s) for s in b.bitstrings()], atol=1e-12)


def test_degenerate_spectrum():
    inst = make_instance(4, np.zeros(6))
    with pytest.raises(DegenerateSpectrumError):
        energy_table(inst, feasible_basis(4, 2))


def test_roundtrip(tmp_path, inst6):
    path = save_instance(inst6, tmp_path / "i.json")
    assert load_instance(path) == inst6
    withh = ProblemInstance(4, 2, np.ones(6), np.array([0.1, 0, 0, -0.2]), id="x", seed=1)
    assert load_instance(save_instance(withh, tmp_path / "h.json")) == withh


def test_parse_wrong_coupling_count(tmp_path, inst4):
    data = inst4.to_dict()
    data["couplings"] = data["couplings"][:-1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    with pytest.raises(InstanceParseError, match="bad.json.*couplings"):
        load_instance(path)


def test_parse_extra_fields_ignored(tmp_path, inst4):
    data = inst4.to_dict()
    data["comment"] = "future field"
    data["nested"] = {"a": 1}
    path = tmp_path / "extra.json"
    path.write_text(json.dumps(data))
    assert load_instance(path) == inst4


def test_parse_malformed_reports_location(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n "n": 4,\n "kappa": 2,\n "couplings": [1, 2\n')
    with pytest.raises(InstanceParseError, match=r"broken.json:\d+:\d+"):
        load_instance(path)


def test_instances_are_immutable(inst4):
    with pytest.raises(ValueError):
        inst4.couplings[0] = 3.0
    assert isinstance(feasible_basis(4, 2), FeasibleBasis)
