"""Target gates, fidelity measures and checks that a schedule is a super-robust holonomy.

Two routes certify each property and are kept independent:

* the analytic frame carried by a schedule (auxiliary states and their
  phases) gives the super-robust integral and the connection holonomy;
* numerical propagation of the Hamiltonian gives the dressed-state
  integrals ``D_mk``, the cyclic check and the realised gate.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import INFIDELITY_FLOOR, LAMBDA_STEP_FRACTION
from .dynamics import (ErrorChannel, LindbladModel, TimeGrid, apply_error, evolve_lindblad,
                       propagate_unitary, steps_for)
from .pulses import GateSpec, PulseSchedule, bright_dark_basis, schedule_to_hamiltonian
from .qcore import PAULI_X, PAULI_Y, PAULI_Z, trace_fidelity

_SQ = 1 / math.sqrt(2)

# Six single-qubit probe states: |0>, |1>, |+>, |->, |+i>, |-i>.
SIX_STATES = tuple(np.array(v, dtype=complex) for v in (
    [1, 0], [0, 1], [_SQ, _SQ], [_SQ, -_SQ], [_SQ, 1j * _SQ], [_SQ, -1j * _SQ]))

# Sixteen two-qubit probes: products of {|0>, (|0>-i|1>)/sqrt2, (|0>+|1>)/sqrt2, |1>}.
_FOUR = tuple(np.array(v, dtype=complex) for v in ([1, 0], [_SQ, -1j * _SQ], [_SQ, _SQ], [0, 1]))
SIXTEEN_STATES = tuple(np.kron(a, b) for a in _FOUR for b in _FOUR)


@dataclass(frozen=True)
class TargetGate:
    matrix: np.ndarray
    spec: GateSpec


def rotation_matrix(spec: GateSpec) -> np.ndarray:
    """``exp(i (gamma/2) n.sigma)`` in closed form."""
    n = spec.axis
    ns = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    g = spec.gamma / 2
    return math.cos(g) * np.eye(2, dtype=complex) + 1j * math.sin(g) * ns


def target_unitary(spec: GateSpec) -> TargetGate:
    return TargetGate(rotation_matrix(spec), spec)


def embed(u, dim: int, indices=None) -> np.ndarray:
    """Place ``u`` on ``indices`` (default the leading block) of a ``dim`` space, identity elsewhere."""
    u = np.asarray(u, dtype=complex)
    idx = list(range(u.shape[0])) if indices is None else list(indices)
    out = np.eye(dim, dtype=complex)
    out[np.ix_(idx, idx)] = u
    return out


def embed_state(v, dim: int, indices=None) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    idx = list(range(v.shape[0])) if indices is None else list(indices)
    out = np.zeros(dim, dtype=complex)
    out[idx] = v
    return out


def default_step(omega: float) -> float:
    return 2 * math.pi / (LAMBDA_STEP_FRACTION * omega)


def _grid(schedule: PulseSchedule, step=None) -> TimeGrid:
    return TimeGrid(0.0, schedule.duration, step or default_step(schedule.omega))


def propagate_schedule(schedule: PulseSchedule, step=None, **kw) -> np.ndarray:
    """Full 3x3 propagator of a schedule; identity for an empty schedule."""
    if schedule.is_identity:
        return np.eye(3, dtype=complex)
    return propagate_unitary(schedule_to_hamiltonian(schedule), _grid(schedule, step), **kw)


def gate_infidelity(schedule: PulseSchedule, step=None) -> float:
    u = propagate_schedule(schedule, step)
    return 1.0 - trace_fidelity(u[:2, :2], rotation_matrix(schedule.gate), 2)


def leakage(u) -> float:
    """Population left on ``|2>`` averaged over ``|0>`` and ``|1>``."""
    return float((abs(u[2, 0]) ** 2 + abs(u[2, 1]) ** 2) / 2)


def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


def super_robust_integral(schedule: PulseSchedule, nodes: int = 96) -> complex:
    """``int <psi_2|H|psi_3> dt`` along the analytic frame of the schedule.

    The frame states carry their phases ``gamma_2``, ``gamma_3``; the
    integrand is smooth inside each segment, so Gauss-Legendre quadrature per
    segment is exact to rounding.
    """
    if schedule.frame is None:
        raise ValueError("schedule carries no frame data")
    if schedule.is_identity:
        return 0j
    H = schedule_to_hamiltonian(schedule)
    x, w = _gauss(nodes)
    total = 0j
    for k, T in enumerate(schedule.durations):
        if T == 0:
            continue
        t = T * x
        _, p2, p3 = schedule.frame.dressed_states(t, piece=k)
        h = H.sample(k, t)
        vals = np.einsum("ni,nij,nj->n", p2.conj(), h, p3)
        total += T * np.dot(w, vals)
    return complex(total)


@dataclass
class RobustnessReport:
    """Dressed-state integrals and the derived second-order infidelity coefficient.

    ``dmk[m, k]`` has ``m`` over the computational dressed states and ``k``
    over all three; ``1 - F ~ iota^2 * perturbative_infidelity_coeff``.
    """

    dmk: np.ndarray
    super_robust_residual: complex
    frame_integral: complex
    perturbative_infidelity_coeff: float
    fitted_error_order: float | None = None
    fit: dict = field(default_factory=dict)
    step: float = 0.0

    def to_dict(self):
        def c(z):
            return [float(np.real(z)), float(np.imag(z))]
        return {
            "dmk": [[c(z) for z in row] for row in self.dmk],
            "super_robust_residual": c(self.super_robust_residual),
            "frame_integral": c(self.frame_integral),
            "perturbative_infidelity_coeff": self.perturbative_infidelity_coeff,
            "fitted_error_order": self.fitted_error_order,
            "fit": self.fit,
            "step": self.step,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def dressed_initial_basis(theta: float, phi: float) -> np.ndarray:
    """Columns ``|d>, |b>, -|2>``: the frame states at ``chi = 0``."""
    b, d = bright_dark_basis(theta, phi)
    return np.stack([d, b, np.array([0, 0, -1.0], dtype=complex)], axis=1)


def dmk_integrals(schedule: PulseSchedule, grid: TimeGrid | None = None, *,
                  error_order_magnitudes=None) -> RobustnessReport:
    """``D_mk = int <psi_m|H|psi_k> dt`` from the numerically propagated states.

    Each segment is propagated with an even number of steps and the
    integrand is integrated with composite Simpson on the step nodes.
    """
    step = grid.step if grid is not None else default_step(schedule.omega)
    basis = dressed_initial_basis(schedule.theta, schedule.phi)
    dmk = np.zeros((2, 3), dtype=complex)
    if not schedule.is_identity:
        H = schedule_to_hamiltonian(schedule)
        block = basis
        for k, T in enumerate(schedule.durations):
            if T == 0:
                continue
            n = steps_for(T, step, multiple=2)
            piece = H.subset([k])
            _, hist = propagate_unitary(piece, TimeGrid(0.0, T, T / n), initial=block, history=True)
            t = np.linspace(0.0, T, n + 1)
            h = H.sample(k, t)
            vals = np.einsum("tim,tij,tjk->tmk", hist.conj(), h, hist)[:, :2, :]
            wts = np.ones(n + 1)
            wts[1:-1:2], wts[2:-1:2] = 4, 2
            dmk += (T / n / 3) * np.einsum("t,tmk->mk", wts, vals)
            block = hist[-1]
    frame_int = super_robust_integral(schedule) if schedule.frame is not None else complex("nan")
    coeff = float(np.sum(np.abs(dmk) ** 2) / (2 * 2))
    report = RobustnessReport(dmk, complex(dmk[1, 2]), frame_int, coeff, step=step)
    if error_order_magnitudes is not None:
        fit = error_order_fit(schedule, "global_iota", error_order_magnitudes, step=step)
        report.fitted_error_order = fit.slope
        report.fit = fit.to_dict()
    return report


def cyclic_residual(schedule: PulseSchedule, grid: TimeGrid | None = None) -> float:
    """Max-norm change of the computational projector over the schedule."""
    u = propagate_schedule(schedule, grid.step if grid else None)
    p0 = np.diag([1.0, 1.0, 0.0]).astype(complex)
    cols = u[:, :2]
    return float(np.max(np.abs(cols @ cols.conj().T - p0)))


def verify_cyclic(schedule: PulseSchedule, grid: TimeGrid | None = None, tol: float = 1e-6) -> bool:
    return cyclic_residual(schedule, grid) < tol


def connection_matrix(schedule: PulseSchedule, piece: int, t_local) -> np.ndarray:
    """``A_ml = i <psi~_m| d/dt |psi~_l>`` on the computational pair, from analytic derivatives."""
    fr = schedule.frame
    seg = fr.segments[piece]
    t_local = np.atleast_1d(t_local)
    chi = seg.chi + seg.chi_rate * t_local
    zeta = seg.zeta + seg.zeta_rate * t_local
    b, d = bright_dark_basis(fr.theta, fr.phi)
    e2 = np.array([0, 0, 1.0], dtype=complex)
    c, s = np.cos(chi / 2)[:, None], np.sin(chi / 2)[:, None]
    ez = np.exp(1j * zeta)[:, None]
    p = np.stack([np.broadcast_to(d, (len(chi), 3)), c * b + s * ez * e2], axis=1)
    dp2 = seg.chi_rate * (-0.5 * s * b + 0.5 * c * ez * e2) + seg.zeta_rate * (1j * s * ez * e2)
    dp = np.stack([np.zeros_like(dp2), dp2], axis=1)
    return 1j * np.einsum("tmi,tli->tml", p.conj(), dp)


def holonomy_from_connection(spec: GateSpec, schedule: PulseSchedule, step=None) -> np.ndarray:
    """Path-ordered ``exp(i int A dt)`` mapped onto ``|0>, |1>``.

    Uses the midpoint rule on the propagation grid.  Only frames without
    dynamical phase (``frame.geometric``) qualify.
    """
    if schedule.is_identity:
        return np.eye(2, dtype=complex)
    fr = schedule.frame
    if fr is None or not fr.geometric:
        raise ValueError("holonomy from the connection needs a geometric frame")
    step = step or default_step(schedule.omega)
    P = np.eye(2, dtype=complex)
    for k, T in enumerate(schedule.durations):
        if T == 0:
            continue
        n = steps_for(T, step)
        h = T / n
        A = connection_matrix(schedule, k, h * (np.arange(n) + 0.5))
        for a in A:
            w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
            P = (v * np.exp(1j * h * w)) @ v.conj().T @ P
    basis = dressed_initial_basis(spec.theta, spec.phi)[:2, :2]
    return basis @ P @ basis.conj().T


def avg_state_fidelity(u_ideal, rho_final_per_state, initial_states) -> float:
    """Mean of ``<psi|U^dag rho U|psi>`` over the probe states."""
    rhos = list(rho_final_per_state)
    states = list(initial_states)
    if len(rhos) != len(states):
        raise ValueError("need one final density matrix per initial state")
    if len(states) not in (6, 16):
        raise ValueError("probe set must have 6 (one qubit) or 16 (two qubit) states")
    u = np.asarray(u_ideal, dtype=complex)
    tot = 0.0
    for rho, psi in zip(rhos, states):
        tgt = u @ np.asarray(psi, dtype=complex)
        tot += float(np.real(tgt.conj() @ rho @ tgt))
    return float(min(1.0, max(0.0, tot / len(states))))


def closed_state_fidelity(u_ideal, u_actual, initial_states) -> float:
    """Probe-averaged ``|<U psi|V psi>|^2`` for closed evolution."""
    u = np.asarray(u_ideal, dtype=complex)
    v = np.asarray(u_actual, dtype=complex)
    tot = 0.0
    for psi in initial_states:
        psi = np.asarray(psi, dtype=complex)
        tot += abs(np.vdot(u @ psi, v @ psi)) ** 2
    return float(min(1.0, tot / len(initial_states)))


def six_state_probes(dim: int = 3, indices=(0, 1)):
    return [embed_state(v, dim, indices) for v in SIX_STATES]


@dataclass
class ErrorOrderFit:
    slope: float
    intercept: float
    magnitudes: list
    infidelities: list
    used: list

    def to_dict(self):
        return asdict(self)


def error_order_fit(schedule: PulseSchedule, error_kind: str = "global_iota", magnitudes=None, *,
                    step=None) -> ErrorOrderFit:
    """Slope of ``log(1 - F)`` against ``log|magnitude|``.

    ``F = |Tr(U0^dag U_err)| / 2`` on the computational block, with ``U0`` the
    error-free propagator.  Points with ``1 - F < 1e-12`` are dropped.
    """
    if magnitudes is None:
        magnitudes = np.geomspace(1e-2, 1e-1, 7)
    mags = [float(m) for m in magnitudes]
    H = schedule_to_hamiltonian(schedule)
    grid = _grid(schedule, step)
    u0 = propagate_unitary(H, grid)
    infid = []
    for m in mags:
        u = propagate_unitary(apply_error(H, ErrorChannel(error_kind, m), schedule), grid)
        infid.append(1.0 - trace_fidelity(u0, u, 2))
    used = [m != 0 and f >= INFIDELITY_FLOOR for m, f in zip(mags, infid)]
    x = np.log([abs(m) for m, ok in zip(mags, used) if ok])
    y = np.log([f for f, ok in zip(infid, used) if ok])
    if len(x) < 2 or np.ptp(x) == 0:
        raise ValueError("need at least two distinct magnitudes above the numerical floor")
    slope, intercept = np.polyfit(x, y, 1)
    return ErrorOrderFit(float(slope), float(intercept), mags, infid, used)


def lambda_collapse_ops() -> tuple[np.ndarray, np.ndarray]:
    """Decay ``|0><2| + |1><2|`` and dephasing ``2|2><2| - |1><1| - |0><0|``."""
    s1 = np.zeros((3, 3), dtype=complex)
    s1[0, 2] = s1[1, 2] = 1.0
    s2 = np.diag([-1.0, -1.0, 2.0]).astype(complex)
    return s1, s2


def lindblad_gate_fidelity(schedule: PulseSchedule, kappa: float, step=None, backend=None) -> float:
    """Six-state fidelity of a Lambda-system schedule under decay and dephasing at rate ``kappa``."""
    probes = six_state_probes()
    target = embed(rotation_matrix(schedule.gate), 3)
    if schedule.is_identity:
        return 1.0
    H = schedule_to_hamiltonian(schedule)
    grid = _grid(schedule, step)
    if kappa == 0:
        u = propagate_unitary(H, grid, backend=backend)
        return closed_state_fidelity(target, u, probes)
    rho0 = np.stack([np.outer(p, p.conj()) for p in probes])
    rhos = evolve_lindblad(LindbladModel(H, lambda_collapse_ops(), kappa), rho0, grid, backend=backend)
    return avg_state_fidelity(target, rhos, probes)


def perturbed_fidelity(schedule: PulseSchedule, epsilon: float = 0.0, eta: float = 0.0, step=None) -> float:
    """Closed six-state fidelity against the target with static coupling and detuning errors."""
    target = embed(rotation_matrix(schedule.gate), 3)
    if schedule.is_identity:
        return 1.0
    H = schedule_to_hamiltonian(schedule)
    if epsilon:
        H = apply_error(H, ErrorChannel("coupling_epsilon", epsilon), schedule)
    if eta:
        H = apply_error(H, ErrorChannel("detuning_eta", eta), schedule)
    u = propagate_unitary(H, _grid(schedule, step))
    return closed_state_fidelity(target, u, six_state_probes())
