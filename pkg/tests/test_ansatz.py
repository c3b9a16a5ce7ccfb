import itertools

import numpy as np
import pytest

from qampa.ansatz import (AngleSchedule, AnsatzKind, angle_domains, build, execute, gate_order,
                          initial_layout)
from qampa.problem import generate_instance
from qampa.subspace import apply_zz, dicke_state, random_state

from conftest import make_instance

KINDS = list(AnsatzKind)


def fidelity(a, b):
    return abs(np.vdot(a, b)) ** 2


def test_kind_names_stable():
    assert [k.value for k in KINDS] == ["QAOA", "QAMPA", "QAOA_NOJ", "QAMPA_NOJ",
                                        "XY_WEIGHTED", "XY_NOJ"]
    assert AnsatzKind.parse("qampa") is AnsatzKind.QAMPA
    with pytest.raises(ValueError):
        AnsatzKind.parse("VQE")


def test_gate_order_small():
    assert gate_order(2, 0) == [(0, 1)]
    order = gate_order(4, 3)
    assert len(order) == 6 and sorted(order) == list(itertools.combinations(range(4), 2))


@pytest.mark.parametrize("n", [4, 6, 9])
def test_gate_order_seeds_same_multiset(n):
    a, b = gate_order(n, 1), gate_order(n, 2)
    assert sorted(a) == sorted(b) == list(itertools.combinations(range(n), 2))


def test_build_counts(inst4):
    assert build("QAOA", inst4, 1).gate_counts() == {"zz": 6, "xy": 6}
    assert build("QAMPA", inst4, 1).gate_counts() == {"mp": 6}
    assert build("XY_NOJ", inst4, 3).gate_counts() == {"xy": 18}
    with pytest.raises(ValueError):
        build("NOPE", inst4, 1)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("p", [1, 2, 3])
def test_each_round_covers_pairs(kind, p, inst6):
    plan = build(kind, inst6, p, ordering_seed=5)
    assert len(plan.rounds) == p
    for rnd in plan.rounds:
        for fam in {g.family for g in rnd} - {"field"}:
            pairs = sorted(g.pair for g in rnd if g.family == fam)
            assert pairs == list(itertools.combinations(range(6), 2))


def test_coefficients_by_kind(inst6):
    J = {pair: inst6.coupling(*pair) for pair in itertools.combinations(range(6), 2)}
    for kind, fam, weighted in [("QAOA", "zz", True), ("QAOA", "xy", False), ("QAMPA", "mp", True),
                                ("QAOA_NOJ", "zz", False), ("QAMPA_NOJ", "mp", False),
                                ("XY_WEIGHTED", "xy", True), ("XY_NOJ", "xy", False)]:
        for g in build(kind, inst6, 1).rounds[0]:
            if g.family == fam:
                assert g.coef == (J[g.pair] if weighted else 1.0), (kind, fam)


def test_parameter_count_parity(inst4):
    for p in range(1, 5):
        assert AngleSchedule.zeros(p).to_vector().size == 2 * p


@pytest.mark.parametrize("kind", KINDS)
def test_zero_angles_identity(kind, inst6, rng):
    s = random_state(build(kind, inst6, 2).basis, rng)
    out = execute(build(kind, inst6, 2), AngleSchedule.zeros(2), s)
    np.testing.assert_allclose(out.amplitudes, s.amplitudes, atol=1e-15)


def test_round_mismatch(inst4):
    with pytest.raises(ValueError):
        execute(build("QAOA", inst4, 2), AngleSchedule.zeros(1))


def test_execute_does_not_mutate_input(inst4, rng):
    s = random_state(build("QAMPA", inst4, 1).basis, rng)
    ref = s.amplitudes.copy()
    execute(build("QAMPA", inst4, 1), AngleSchedule((0.4,), (0.9,)), s)
    np.testing.assert_array_equal(s.amplitudes, ref)


@pytest.mark.parametrize("trial", range(10))
def test_qampa_embeds_qaoa(trial):
    rng = np.random.default_rng(trial)
    inst = generate_instance(6, 3, seed=trial)
    seed = int(rng.integers(1000))
    g, b = rng.uniform(0, 4 * np.pi), rng.uniform(0, np.pi)
    qaoa = execute(build("QAOA", inst, 1, seed), AngleSchedule((g,), (b,)))
    qampa = execute(build("QAMPA", inst, 2, seed), AngleSchedule((g, 0.0), (0.0, b)))
    assert fidelity(qaoa.amplitudes, qampa.amplitudes) >= 1 - 1e-10


def test_phase_layer_order_irrelevant(inst6, rng):
    b = build("QAOA", inst6, 1).basis
    s = random_state(b, rng)
    pairs = list(itertools.combinations(range(6), 2))
    outs = []
    for perm in (pairs, pairs[::-1], [pairs[i] for i in rng.permutation(len(pairs))]):
        t = s.copy()
        for a, c in perm:
            apply_zz(t, a, c, 0.83, inst6.coupling(a, c))
        outs.append(t.amplitudes)
    np.testing.assert_allclose(outs[0], outs[1], atol=1e-12)
    np.testing.assert_allclose(outs[0], outs[2], atol=1e-12)


def test_ordering_sensitivity(inst4):
    sched = AngleSchedule((0.9, 1.7), (0.6, 2.1))
    outs = {}
    for seed in range(20):
        layout = initial_layout(4, seed)
        outs.setdefault(tuple(gate_order(4, seed)), execute(build("QAMPA", inst4, 2, seed), sched))
        assert sorted(layout) == [0, 1, 2, 3]
    states = list(outs.values())
    assert len(states) > 1
    assert any(np.max(np.abs(s.amplitudes - states[0].amplitudes)) > 1e-6 for s in states[1:])


@pytest.mark.parametrize("kind", ["QAOA_NOJ", "XY_NOJ"])
def test_noj_instance_independent(kind):
    a, b = generate_instance(6, 3, seed=1), generate_instance(6, 3, seed=2)
    sched = AngleSchedule((0.3, 1.2), (0.7, 0.4))
    sa = execute(build(kind, a, 2, 9), sched)
    sb = execute(build(kind, b, 2, 9), sched)
    np.testing.assert_allclose(sa.amplitudes, sb.amplitudes, atol=1e-14)


def test_qaoa_noj_equals_xy_noj_up_to_phase(inst6):
    # sum_{n<m} Z_n Z_m is constant at fixed Hamming weight, so the unweighted
    # phase separator is a global phase and the two circuits coincide.
    sched = AngleSchedule((0.3, 1.2, 2.2), (0.7, 0.4, 1.9))
    a = execute(build("QAOA_NOJ", inst6, 3, 4), sched).amplitudes
    b = execute(build("XY_NOJ", inst6, 3, 4), sched).amplitudes
    assert fidelity(a, b) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_negated_angles_conjugate(kind, inst6):
    sched = AngleSchedule((0.3, 1.2), (0.7, 0.4))
    a = execute(build(kind, inst6, 2, 3), sched).amplitudes
    b = execute(build(kind, inst6, 2, 3), sched.negated()).amplitudes
    np.testing.assert_allclose(np.abs(a) ** 2, np.abs(b) ** 2, atol=1e-12)
    np.testing.assert_allclose(a, np.conj(b), atol=1e-12)


def test_angle_domains():
    assert angle_domains(generate_instance(6, 3, seed=0)) == (4 * np.pi, np.pi)
    assert angle_domains(make_instance(4, np.ones(6))) == (2 * np.pi, np.pi)
    with pytest.raises(ValueError):
        angle_domains(make_instance(4, np.zeros(6)))


def test_schedule_vector_roundtrip():
    s = AngleSchedule((1.0, 2.0), (3.0, 4.0))
    np.testing.assert_array_equal(s.to_vector(), [1, 3, 2, 4])
    assert AngleSchedule.from_vector(s.to_vector()) == s
    assert s.extended(5, 6).p == 3
    r = AngleSchedule((13.0,), (-1.0,)).reduced(4 * np.pi)
    assert 0 <= r.gammas[0] < 4 * np.pi and 0 <= r.betas[0] < np.pi


def test_field_gate_per_layer():
    inst = make_instance(4, np.ones(6), fields=[0.2, -0.3, 0.0, 0.5])
    plan = build("QAOA", inst, 2)
    assert plan.gate_counts()["field"] == 2
    plan = build("XY_NOJ", inst, 2)
    assert "field" not in plan.gate_counts()


def test_plan_dump(tmp_path, inst4):
    import json
    d = json.loads(build("QAOA", inst4, 1, 3).dump(tmp_path / "plan.json").read_text())
    assert d["kind"] == "QAOA" and sum(len(ps["gates"]) for ps in d["passes"]) == 12
