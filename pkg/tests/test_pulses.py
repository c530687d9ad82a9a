import json
import math

import numpy as np
import pytest

from holonomy_sim import pulses as P
from holonomy_sim.holonomy import rotation_matrix
from holonomy_sim.qcore import phase_distance

PI = math.pi


def test_chi_from_gamma_examples():
    assert abs(P.chi_from_gamma(PI) - PI / 2) < 1e-15
    assert P.chi_from_gamma(0.0) == 0.0
    assert abs(P.chi_from_gamma(PI / 2) - PI / 3) < 1e-15
    for g in np.linspace(0, PI, 11):
        assert abs(P.gamma_from_chi(P.chi_from_gamma(g)) - g) < 1e-12
    with pytest.raises(ValueError):
        P.chi_from_gamma(4.0)


def test_gate_time_examples():
    assert abs(P.gate_time(PI, 1.0) - 3 * PI) < 1e-12
    assert P.gate_time(0.0, 2.0) == 0.0
    assert abs(P.gate_time(PI / 2, 1.0) - (2 * PI / 3 + math.sqrt(3) * PI)) < 1e-12
    assert abs(P.gate_time(PI / 2, 1.0) - 7.5357) < 1e-4
    assert abs(P.sr6_gate_time(2.0) - 2 * PI) < 1e-12


def test_gate_time_monotone_and_below_sr6():
    g = np.linspace(0, PI, 101)
    t = [P.gate_time(x, 1.0) for x in g]
    assert all(b >= a for a, b in zip(t, t[1:]))
    assert all(x < 4 * PI for x in t)


def test_gatespec_validation():
    with pytest.raises(ValueError):
        P.GateSpec(0.1, 0.0, 4.0)
    with pytest.raises(ValueError):
        P.GateSpec(-1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        P.GateSpec(float("nan"), 0.0, 1.0)
    assert P.GateSpec(0.3, 0.0, 0.0).is_identity


def test_normalized_folds_to_same_rotation():
    for g in (4.0, 5.5, -1.0):
        s = P.GateSpec.normalized(0.7, 0.4, g)
        n = np.array([math.sin(0.7) * math.cos(0.4), math.sin(0.7) * math.sin(0.4), math.cos(0.7)])
        sig = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
        ns = sum(c * m for c, m in zip(n, sig))
        ref = math.cos(g / 2) * np.eye(2) + 1j * math.sin(g / 2) * ns
        assert phase_distance(rotation_matrix(s), ref) < 1e-12


def test_named_gates():
    h = P.named_gate("H")
    assert (h.theta, h.phi, h.gamma) == (PI / 4, 0.0, PI)
    assert P.named_gate("s").gamma == PI / 2
    assert P.named_gate("T").gamma == PI / 4
    with pytest.raises(ValueError):
        P.named_gate("Q")


def test_bright_dark_examples():
    b, d = P.bright_dark_basis(0.0, 0.0)
    assert np.allclose(b, [0, -1, 0]) and np.allclose(d, [1, 0, 0])
    b, _ = P.bright_dark_basis(PI / 2, 0.0)
    assert np.allclose(b, np.array([1, -1, 0]) / math.sqrt(2))
    b, d = P.bright_dark_basis(PI / 4, 0.0)
    assert abs(np.vdot(b, d)) < 1e-12
    assert abs(np.linalg.norm(b) - 1) < 1e-12 and abs(np.linalg.norm(d) - 1) < 1e-12


def test_asr_schedule_structure():
    s = P.build_asr_schedule(P.named_gate("H"), 1.0)
    assert np.allclose(s.durations, (PI / 2, 2 * PI, PI / 2))
    assert abs(s.duration - P.gate_time(PI, 1.0)) < 1e-12
    assert all(abs(seg.amplitude - 0.5) < 1e-15 for seg in s.segments)
    assert abs(abs(s.segments[1].detuning) - 1.0) < 1e-12
    assert s.segments[0].detuning == 0 and s.segments[2].detuning == 0


def test_asr_identity_is_empty():
    s = P.build_asr_schedule(P.GateSpec(0.4, 0.0, 0.0))
    assert s.is_identity and s.duration == 0 and not s.segments


def test_asr_duration_independent_of_zeta0():
    spec = P.named_gate("T")
    d = [P.build_asr_schedule(spec, 1.3, z).duration for z in (0.0, PI / 3, 1.7)]
    assert max(d) - min(d) < 1e-15


def test_sr6_schedule_structure():
    for g in (PI, PI / 4, 0.0):
        s = P.build_sr6_schedule(P.GateSpec(0.5, 0.1, g), 2.0)
        assert len(s.segments) == 6
        assert np.allclose(s.durations, np.array([PI / 2, PI, PI / 2, PI / 2, PI, PI / 2]) / 2.0)
        assert abs(s.duration - 2 * PI) < 1e-12
        assert all(seg.detuning == 0 for seg in s.segments)


def test_schedule_json_roundtrip():
    s = P.build_asr_schedule(P.named_gate("H"), 1.5, 0.3)
    doc = json.loads(s.to_json())
    assert doc["omega"] == 1.5 and "segments" in doc and "gate" in doc
    s2 = P.PulseSchedule.from_json(s.to_json())
    assert s2.durations == s.durations
    t = np.linspace(0, s.durations[1], 7)
    assert np.allclose(s2.segments[1].coupling(t), s.segments[1].coupling(t))


def test_hamiltonian_dark_state_decoupled():
    for name in ("H", "S", "T"):
        for scheme in ("asr", "sr6"):
            s = P.build_schedule(P.named_gate(name), scheme)
            H = P.schedule_to_hamiltonian(s)
            _, d = P.bright_dark_basis(s.theta, s.phi)
            for t in np.linspace(0, s.duration, 17):
                h = H(t)
                assert np.allclose(h, h.conj().T, atol=1e-14)
                assert np.max(np.abs(h @ d)) < 1e-14


def test_hamiltonian_matrix_elements():
    # Omega_02 = Omega sin(theta/2) e^{i phi}, Omega_12 = -Omega cos(theta/2)
    th, ph, w = PI / 4, 0.3, 1.0
    h = P.lambda_hamiltonian(0.5 * w, 0.0, th, ph)[0]
    assert abs(h[2, 0] - 0.5 * w * math.sin(th / 2) * np.exp(1j * ph)) < 1e-14
    assert abs(h[2, 1] + 0.5 * w * math.cos(th / 2)) < 1e-14


def test_seg1_bright_coupling():
    s = P.build_asr_schedule(P.GateSpec(PI / 2, 0.0, PI), 1.0, 0.4)
    H = P.schedule_to_hamiltonian(s)
    b, _ = P.bright_dark_basis(PI / 2, 0.0)
    v = H(0.3)[2] @ b
    assert abs(v - 0.5j * np.exp(0.4j)) < 1e-14


def test_frame_is_cyclic():
    for scheme in ("asr", "sr6"):
        s = P.build_schedule(P.named_gate("H"), scheme, 1.0, 0.7)
        f = s.frame
        assert abs(f.chi(0.0)) < 1e-15 and abs(f.chi(s.duration)) < 1e-12
        assert abs(f.zeta(0.0) - 0.7) < 1e-15 or scheme == "sr6"


def test_hamiltonian_rejects_out_of_range_time():
    H = P.schedule_to_hamiltonian(P.build_asr_schedule(P.named_gate("H")))
    with pytest.raises(ValueError):
        H(-1.0)
    with pytest.raises(ValueError):
        H(100.0)
