import math
from dataclasses import replace

import numpy as np
import pytest

from holonomy_sim import holonomy as Hm
from holonomy_sim.pulses import GateSpec, bright_dark_basis, build_asr_schedule, build_schedule, named_gate
from holonomy_sim.qcore import PAULI_X, PAULI_Z, phase_distance, trace_fidelity

PI = math.pi
HADAMARD = (PAULI_X + PAULI_Z) / math.sqrt(2)


def test_rotation_examples():
    assert phase_distance(Hm.rotation_matrix(named_gate("H")), HADAMARD) < 1e-14
    assert np.allclose(Hm.rotation_matrix(GateSpec(1.1, 0.4, 0.0)), np.eye(2))
    s = Hm.rotation_matrix(GateSpec(0.0, 0.0, PI / 2))
    assert np.allclose(s, np.diag([np.exp(1j * PI / 4), np.exp(-1j * PI / 4)]))


@pytest.mark.parametrize("spec", [GateSpec(0.3, 1.2, 2.0), GateSpec(2.9, 5.0, 0.4), named_gate("H")])
def test_rotation_is_dark_bright_phase(spec):
    b, d = bright_dark_basis(spec.theta, spec.phi)
    b, d = b[:2], d[:2]
    ref = np.outer(d, d.conj()) + np.exp(-1j * spec.gamma) * np.outer(b, b.conj())
    assert phase_distance(Hm.rotation_matrix(spec), ref) < 1e-13


def test_rotation_inverse():
    spec = GateSpec(0.8, 2.0, 1.3)
    prod = Hm.rotation_matrix(spec) @ Hm.rotation_matrix(spec.inverse())
    assert phase_distance(prod, np.eye(2)) < 1e-13


@pytest.mark.parametrize("scheme", ["asr", "sr6"])
@pytest.mark.parametrize("name", ["H", "S", "T"])
@pytest.mark.parametrize("zeta0", [0.0, PI / 3, 1.7])
def test_ideal_gate_synthesis(scheme, name, zeta0):
    s = build_schedule(named_gate(name), scheme, 1.0, zeta0)
    u = Hm.propagate_schedule(s)
    assert 1 - trace_fidelity(u[:2, :2], Hm.rotation_matrix(s.gate), 2) < 1e-8
    assert Hm.leakage(u) * 2 < 1e-8


def test_identity_schedule():
    s = build_asr_schedule(GateSpec(0.2, 0.0, 0.0))
    assert np.allclose(Hm.propagate_schedule(s), np.eye(3))
    assert Hm.verify_cyclic(s)
    assert np.allclose(Hm.holonomy_from_connection(s.gate, s), np.eye(2))


@pytest.mark.parametrize("scheme", ["asr", "sr6"])
@pytest.mark.parametrize("name", ["H", "S", "T"])
def test_super_robust_integral_vanishes(scheme, name):
    s = build_schedule(named_gate(name), scheme)
    assert abs(Hm.super_robust_integral(s)) < 1e-6 * s.omega * s.duration


def test_seg1_only_integral_is_analytic():
    for g in (PI, PI / 2):
        for z in (0.0, 1.1):
            s = build_asr_schedule(GateSpec(PI / 4, 0.0, g), 1.0, z).truncated(1)
            val = Hm.super_robust_integral(s)
            chi1 = math.acos(1 - g / PI)
            assert abs(abs(val) - chi1 / 2) < 1e-6


def test_seg2_only_integral_vanishes():
    s = build_asr_schedule(named_gate("T"), 1.0, 0.4)
    f = s.frame
    seg2 = replace(s, segments=s.segments[1:2],
                   frame=replace(f, durations=f.durations[1:2], segments=f.segments[1:2]))
    assert abs(Hm.super_robust_integral(seg2)) < 1e-12


def test_integral_zeta0_independent_in_magnitude():
    s0 = build_asr_schedule(named_gate("H"), 1.0, 0.0).truncated(2)
    s1 = build_asr_schedule(named_gate("H"), 1.0, 1.7).truncated(2)
    assert abs(abs(Hm.super_robust_integral(s0)) - abs(Hm.super_robust_integral(s1))) < 1e-12


def test_integral_needs_frame():
    s = replace(build_asr_schedule(named_gate("H")), frame=None)
    with pytest.raises(ValueError):
        Hm.super_robust_integral(s)


@pytest.mark.parametrize("scheme", ["asr", "sr6"])
def test_dmk_integrals(scheme):
    s = build_schedule(named_gate("H"), scheme)
    rep = Hm.dmk_integrals(s)
    assert rep.dmk.shape == (2, 3)
    assert abs(rep.dmk[0, 0]) < 1e-12
    assert np.max(np.abs(rep.dmk[:, :2])) < 1e-6
    assert abs(rep.dmk[1, 2]) < 1e-6
    doc = rep.to_dict()
    assert len(doc["dmk"]) == 2 and len(doc["dmk"][0]) == 3


def test_dmk_nonzero_for_seg1_only():
    s = build_asr_schedule(named_gate("H")).truncated(1)
    rep = Hm.dmk_integrals(s)
    assert abs(abs(rep.dmk[1, 2]) - PI / 4) < 1e-4


def test_verify_cyclic():
    s = build_asr_schedule(named_gate("H"))
    assert Hm.verify_cyclic(s)
    assert Hm.cyclic_residual(s) < 1e-9
    assert not Hm.verify_cyclic(s.truncated(1))


@pytest.mark.parametrize("spec", [named_gate("H"), GateSpec(0.0, 0.0, PI / 2), GateSpec(1.2, 2.2, 0.9)])
def test_connection_holonomy_matches_propagation(spec):
    s = build_asr_schedule(spec)
    hol = Hm.holonomy_from_connection(spec, s)
    u = Hm.propagate_schedule(s)[:2, :2]
    assert phase_distance(hol, u) < 1e-6
    assert phase_distance(hol, Hm.rotation_matrix(spec)) < 1e-6


def test_connection_rejects_non_geometric_frame():
    s = build_schedule(named_gate("H"), "sr6")
    with pytest.raises(ValueError):
        Hm.holonomy_from_connection(s.gate, s)


def test_avg_state_fidelity():
    u = Hm.embed(Hm.rotation_matrix(named_gate("T")), 3)
    probes = Hm.six_state_probes()
    rhos = [np.outer(u @ p, (u @ p).conj()) for p in probes]
    assert abs(Hm.avg_state_fidelity(u, rhos, probes) - 1) < 1e-12
    with pytest.raises(ValueError):
        Hm.avg_state_fidelity(u, rhos[:5], probes)
    with pytest.raises(ValueError):
        Hm.avg_state_fidelity(u, rhos[:5], probes[:5])


def test_probe_sets():
    assert len(Hm.SIX_STATES) == 6 and len(Hm.SIXTEEN_STATES) == 16
    for v in Hm.SIX_STATES + Hm.SIXTEEN_STATES:
        assert abs(np.linalg.norm(v) - 1) < 1e-12


@pytest.mark.parametrize("scheme", ["asr", "sr6"])
def test_error_order_fourth(scheme):
    fit = Hm.error_order_fit(build_schedule(named_gate("H"), scheme))
    assert 3.5 <= fit.slope <= 4.5


def test_error_order_second_for_control():
    fit = Hm.error_order_fit(build_asr_schedule(named_gate("H")).truncated(1))
    assert 1.7 <= fit.slope <= 2.3


def test_error_order_excludes_floor():
    fit = Hm.error_order_fit(build_asr_schedule(named_gate("H")), magnitudes=[0.0, 0.01, 0.03, 0.1])
    assert fit.infidelities[0] < 1e-10 and not fit.used[0]


def test_lindblad_gate_fidelity():
    s = build_asr_schedule(named_gate("H"))
    assert abs(Hm.lindblad_gate_fidelity(s, 0.0) - 1) < 1e-8
    f = Hm.lindblad_gate_fidelity(s, 5e-3)
    assert 0.5 < f < 1
    assert f > Hm.lindblad_gate_fidelity(build_schedule(named_gate("H"), "sr6"), 5e-3)


def test_perturbed_fidelity_origin():
    for scheme in ("asr", "sr6"):
        s = build_schedule(named_gate("T"), scheme)
        assert Hm.perturbed_fidelity(s, 0.0, 0.0) >= 1 - 1e-8
    a = Hm.perturbed_fidelity(build_schedule(named_gate("T"), "asr"), 0.2, 0.0)
    b = Hm.perturbed_fidelity(build_schedule(named_gate("T"), "sr6"), 0.2, 0.0)
    assert a > b
