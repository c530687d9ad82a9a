import math

import numpy as np
import pytest
from scipy.integrate import quad

from holonomy_sim import transmon as T
from holonomy_sim.pulses import GateSpec, named_gate

MHZ = T.MHZ


def bessel_quad(n, x):
    """Integral representation, independent of the special-function library."""
    return quad(lambda u: math.cos(n * u - x * math.sin(u)), 0.0, math.pi)[0] / math.pi


def test_level_energies():
    e = T.level_energies(MHZ * 5000, MHZ * 300, 4)
    assert np.allclose(e, [0, MHZ * 5000, MHZ * 9700, MHZ * 14100])


def test_params_validation():
    with pytest.raises(ValueError):
        T.TransmonParams(alpha=-1.0)
    with pytest.raises(ValueError):
        T.TransmonParams(levels=3)
    with pytest.raises(ValueError):
        T.DragParams(p1=float("nan"))
    with pytest.raises(ValueError):
        T.map_gate_to_drive(GateSpec(0.3, 0.0, 0.0), MHZ * 40)
    with pytest.raises(ValueError):
        T.map_gate_to_drive(named_gate("X"), -1.0)


@pytest.mark.parametrize("gate", ["X", "Z", "H"])
def test_drive_geometry(gate):
    d = T.map_gate_to_drive(named_gate(gate), MHZ * 40)
    t1, t2 = d.switch_times
    assert 0 < t1 < t2 < d.tau
    assert abs(d.area(t1) - d.chi1) < 1e-10
    assert abs(d.area(t2) - d.area(t1) - d.loop_area) < 1e-10
    assert abs(d.area(d.tau) - (2 * d.chi1 + d.loop_area)) < 1e-10
    assert abs(d.envelope(0.0)) < 1e-12 and abs(d.envelope(d.tau)) < 1e-9
    assert abs(sum(d.durations) - d.tau) < 1e-12


@pytest.mark.parametrize("leakage", [True, False])
def test_single_qubit_hamiltonian_hermitian(leakage):
    d = T.map_gate_to_drive(named_gate("X"), MHZ * 45, drag=T.DEFAULT_DRAG["X"])
    H = T.build_single_qubit_interaction_h(d, leakage=leakage)
    for k, fn in enumerate(H.pieces):
        h = fn(np.linspace(0, H.durations[k], 7))
        assert np.allclose(h, np.conj(np.swapaxes(h, 1, 2)))


def test_single_qubit_hamiltonian_vanishes_without_drive():
    d = T.map_gate_to_drive(named_gate("X"), MHZ * 45)
    h = T.build_single_qubit_interaction_h(d).pieces[0](np.array([0.0]))
    assert np.max(np.abs(h)) < 1e-12


def test_single_qubit_leading_coupling():
    d = T.map_gate_to_drive(named_gate("H"), MHZ * 40)
    t = np.array([0.3 * d.durations[0]])
    h = T.effective_single_qubit_h(d).pieces[0](t)[0]
    th = d.gate.theta
    assert abs(abs(h[0, 1]) - 0.5 * math.sin(th / 2) * d.envelope(t[0])) < 1e-9
    assert abs(abs(h[1, 2]) - 0.5 * math.cos(th / 2) * d.envelope(t[0])) < 1e-9
    assert abs(h[2, 3]) == 0 and abs(h[0, 2]) == 0


def test_zero_theta_turns_off_first_tone():
    d = T.map_gate_to_drive(GateSpec(0.0, 0.0, math.pi), MHZ * 40)
    o1 = d.tones(1, np.linspace(d.switch_times[0], d.switch_times[1], 9))[0]
    assert np.max(np.abs(o1)) == 0


def test_drag_requires_anharmonicity():
    d = T.SingleQubitDrive(named_gate("X"), MHZ * 40, alpha=0.0)
    with pytest.raises(ValueError):
        T.apply_drag(d, T.DragParams(1.0))
    assert T.DragParams().is_off and not T.DEFAULT_DRAG["X"].is_off


@pytest.mark.parametrize("gate", ["X", "Z"])
def test_effective_model_is_exact(gate):
    r = T.single_qubit_fidelity(gate, T.DEFAULT_OMEGA0[gate], model="effective", kappa=0.0)
    assert r.fidelity > 1 - 1e-8 and r.leakage < 1e-8


def test_population_conserved_closed():
    d = T.map_gate_to_drive(named_gate("X"), MHZ * 45)
    from holonomy_sim.dynamics import TimeGrid, propagate_unitary
    u = propagate_unitary(T.build_single_qubit_interaction_h(d), TimeGrid(0, d.tau, d.default_step()))
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-10)


def test_decoherence_lowers_fidelity():
    closed = T.single_qubit_fidelity("X", MHZ * 45, kappa=0.0).fidelity
    open_ = T.single_qubit_fidelity("X", MHZ * 45).fidelity
    assert open_ < closed


def test_model_name_checked():
    with pytest.raises(ValueError):
        T.single_qubit_fidelity("X", MHZ * 45, model="bogus")


@pytest.mark.parametrize("beta", [1.0, 2.3])
def test_bessel_sum_rule(beta):
    total = T.jv(0, beta) ** 2 + 2 * sum(T.jv(n, beta) ** 2 for n in range(1, 30))
    assert abs(total - 1) < 1e-12


def test_couplings_against_integral_bessel():
    p = T.TwoQubitParams()
    assert p.g1 == 0.0
    assert abs(p.g2 - math.sqrt(6) * bessel_quad(1, 2.3) * p.g12) < 1e-9
    q = T.TwoQubitParams(beta2=0.7)
    ref = math.sqrt(6) * bessel_quad(1, 2.3) * p.g12
    assert abs(q.g1 - ref * bessel_quad(1, 0.7)) < 1e-9
    assert abs(q.g2 - ref * bessel_quad(0, 0.7)) < 1e-9
    assert abs(q.theta - 2 * math.atan2(q.g1, q.g2)) < 1e-15


def test_drive_frequencies():
    p = T.TwoQubitParams()
    v1, v2 = p.drive_frequencies()
    assert abs(v1 - MHZ * (1000 - 600 + 380)) < 1e-9
    assert abs(v1 + v2 - MHZ * (1000 - 300 + 760)) < 1e-9


def test_two_qubit_matrix_elements():
    p = T.TwoQubitParams()
    H = T.build_two_qubit_interaction_h(p)
    h = H.pieces[0](np.array([0.0, 0.013, 0.05]))
    assert np.allclose(h, np.conj(np.swapaxes(h, 1, 2)))
    i = T.idx2
    assert np.allclose(np.abs(h[:, i("g", "f"), i("e", "e")]), math.sqrt(2) * p.g12)
    assert np.allclose(np.abs(h[:, i("e", "e"), i("f", "g")]), math.sqrt(2) * p.g12)
    assert np.allclose(np.abs(h[:, i("e", "h"), i("f", "f")]), math.sqrt(6) * p.g12)
    assert np.allclose(np.abs(h[:, i("f", "f"), i("h", "e")]), math.sqrt(6) * p.g12)
    target = T.build_two_qubit_interaction_h(p, "target").pieces[0](np.array([0.01]))
    assert target[0, i("g", "f"), i("e", "e")] == 0
    with pytest.raises(ValueError):
        T.build_two_qubit_interaction_h(p, "none")


def test_zero_coupling_rejected():
    p = T.TwoQubitParams(g12=0.0)
    with pytest.raises(ValueError):
        T.cz_schedule(p)


def test_cz_target_logical_phases():
    tgt = T.cz_target(T.TwoQubitParams())
    assert np.allclose(np.abs(np.diag(tgt)), 1)
    assert np.allclose(tgt[:3, :3], np.eye(3))
    assert abs(tgt[3, 3] + 1) < 1e-9


def test_collapse_ops_are_collective():
    s1, s2 = T.two_qubit_collapse_ops()
    i = T.idx2
    assert abs(s1[i("g", "g"), i("e", "g")] - 1) < 1e-15
    assert abs(s1[i("g", "g"), i("g", "e")] - 1) < 1e-15
    assert abs(s2[i("f", "e"), i("f", "e")] - 3) < 1e-15


def test_effective_cz_exact():
    r = T.cz_fidelity(kappa=0.0, model="effective")
    assert r.fidelity > 1 - 1e-8


def test_params_roundtrip(tmp_path):
    path = tmp_path / "params.json"
    two = T.TwoQubitParams(beta1=2.1)
    T.save_params(path, two=two)
    single, got, drag = T.load_params(path)
    assert got == two and single == T.TransmonParams() and drag == T.DEFAULT_DRAG


def test_scan_omega0_rows():
    rows = T.scan_omega0("X", [MHZ * 35, MHZ * 50], samples=20)
    assert [r[0] for r in rows] == [MHZ * 35, MHZ * 50]
    assert all(0 < v <= 1 + 1e-9 for r in rows for v in r[1:])
