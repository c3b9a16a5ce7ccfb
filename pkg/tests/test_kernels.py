import numpy as np
import pytest

from qampa import _kernels
from qampa.ansatz import AngleSchedule, AnsatzKind, build, execute
from qampa.metrics import group_structure
from qampa.problem import ProblemInstance, energy_table, generate_instance


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    old = _kernels.BACKEND
    _kernels.use_backend(request.param)
    yield request.param
    _kernels.use_backend(old)


def run_all(inst, kind, sched, seed=2):
    plan = build(kind, inst, sched.p, seed)
    amps = execute(plan, sched).amplitudes
    gs = group_structure(energy_table(inst, plan.basis).eps)
    return amps, [_kernels.best_r(amps, gs.order, gs.starts, gs.eps, R) for R in (1, 5)]


@pytest.mark.parametrize("kind", list(AnsatzKind))
def test_backends_agree(kind):
    inst = ProblemInstance(6, 3, generate_instance(6, 3, seed=4).couplings,
                           np.array([0.1, 0.0, -0.3, 0.2, 0.0, 0.5]))
    sched = AngleSchedule((0.4, 2.2, 5.1), (0.8, 0.1, 2.9))
    old = _kernels.BACKEND
    try:
        _kernels.use_backend("numba")
        a_nb, m_nb = run_all(inst, kind, sched)
        _kernels.use_backend("numpy")
        a_np, m_np = run_all(inst, kind, sched)
    finally:
        _kernels.use_backend(old)
    np.testing.assert_allclose(a_nb, a_np, atol=1e-13)
    np.testing.assert_allclose(m_nb, m_np, atol=1e-13)


def test_backend_norm(backend):
    inst = generate_instance(10, 5, seed=1)
    amps, _ = run_all(inst, "QAMPA", AngleSchedule((0.4, 2.2), (0.8, 0.1)))
    assert abs(np.linalg.norm(amps) - 1) < 1e-10


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.use_backend("cuda")


def test_env_flag_default(monkeypatch):
    monkeypatch.setenv("QAMPA_BACKEND", "numpy")
    assert _kernels._default_backend() == "numpy"
    monkeypatch.delenv("QAMPA_BACKEND")
    assert _kernels._default_backend() in ("numba", "numpy")
