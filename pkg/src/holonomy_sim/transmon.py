"""Transmon realisation: two-tone single-qubit gates and a parametric CZ.

Units are microseconds and rad/us, so ``2*pi*45`` is a 45 MHz drive.

Single qubit
    Four levels ``g, e, f, h`` with the logical qubit on ``{g, f}`` and
    ``e`` as the shared excited level.  A global ``sin^2`` envelope carries
    the three-segment schedule; segment boundaries are where the integrated
    envelope reaches the areas the constant-magnitude schedule would use.
    The rotating-frame model keeps the four off-resonant leakage terms; the
    effective model drops them.

Two qubits
    Two five-level transmons (index ``5*a + b``, first transmon slow).  A
    two-tone frequency modulation of the first transmon makes the
    ``{eh, ff, he}`` triple a detuned Lambda system, on which the
    three-segment schedule imprints a phase on ``|ff>``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from functools import partial

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .constants import TRANSMON_SAMPLES_PER_PERIOD
from .dynamics import (LindbladModel, PiecewiseHamiltonian, TimeGrid, evolve_lindblad, propagate_unitary,
                       state_diagnostics)
from .holonomy import SIX_STATES, SIXTEEN_STATES, avg_state_fidelity, embed, embed_state, rotation_matrix
from .parallel import parallel_map
from .pulses import GateSpec, PulseSchedule, build_asr_schedule, chi_from_gamma, lambda_hamiltonian, named_gate
from .qcore import ladder

TWO_PI = 2 * math.pi
MHZ = TWO_PI  # rad/us per MHz

SINGLE_LABELS = ("g", "e", "f", "h")
LEVEL_LABELS = ("g", "e", "f", "h", "k")
SINGLE_LOGICAL = (0, 2)


def level_energies(omega: float, alpha: float, levels: int) -> np.ndarray:
    """Transmon ladder ``n*omega - n(n-1)/2 * alpha``."""
    n = np.arange(levels)
    return n * omega - 0.5 * n * (n - 1) * alpha


@dataclass(frozen=True)
class TransmonParams:
    """Single transmon.  ``omega`` never enters the rotating-frame models."""

    alpha: float = MHZ * 300
    levels: int = 4
    kappa: float = MHZ * 0.002
    omega: float | None = None

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("anharmonicity must be positive")
        if self.levels not in (4, 5):
            raise ValueError("levels must be 4 or 5")

    @property
    def labels(self):
        return LEVEL_LABELS[: self.levels]


@dataclass(frozen=True)
class DragParams:
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    p4: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(p) for p in astuple_drag(self)):
            raise ValueError("DRAG parameters must be finite")

    @property
    def is_off(self) -> bool:
        return not any(astuple_drag(self))


def astuple_drag(d: DragParams):
    return (d.p1, d.p2, d.p3, d.p4)


DEFAULT_DRAG = {"X": DragParams(1.8, -1.0, -0.4, -0.3), "Z": DragParams(0.0, 1.6, 0.0, -2.8)}
DEFAULT_OMEGA0 = {"X": MHZ * 45, "Z": MHZ * 41}


@dataclass(frozen=True)
class SingleQubitDrive:
    """Two-tone drive realising ``gate`` with a ``sin^2`` envelope of peak ``omega0``.

    Tone amplitudes are ``Omega_1 = Omega_c sin(theta/2)`` on g-e and
    ``Omega_2 = Omega_c cos(theta/2)/sqrt2`` on e-f, so that the effective
    Lambda coupling has magnitude ``Omega_c``.
    """

    gate: GateSpec
    omega0: float
    alpha: float = MHZ * 300
    drag: DragParams = field(default_factory=DragParams)
    zeta0: float = 0.0

    def __post_init__(self):
        if self.gate.is_identity:
            raise ValueError("identity needs no drive")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")

    @property
    def chi1(self) -> float:
        return chi_from_gamma(self.gate.gamma)

    @property
    def loop_area(self) -> float:
        return TWO_PI * math.sin(self.chi1)

    @property
    def tau(self) -> float:
        # sin^2 envelope has mean 1/2, total area = 2 chi1 + 2 pi sin chi1
        return 2 * (2 * self.chi1 + self.loop_area) / self.omega0

    def area(self, t):
        tau = self.tau
        t = np.asarray(t, dtype=float)
        return self.omega0 * (t / 2 - tau * np.sin(TWO_PI * t / tau) / (4 * math.pi))

    @property
    def switch_times(self) -> tuple[float, float]:
        tau, c1 = self.tau, self.chi1
        t1 = brentq(lambda t: self.area(t) - c1, 0.0, tau, xtol=1e-15, rtol=1e-15)
        t2 = brentq(lambda t: self.area(t) - c1 - self.loop_area, 0.0, tau, xtol=1e-15, rtol=1e-15)
        return t1, t2

    @property
    def durations(self) -> tuple[float, float, float]:
        t1, t2 = self.switch_times
        return t1, t2 - t1, self.tau - t2

    def envelope(self, t):
        return self.omega0 * np.sin(math.pi * np.asarray(t) / self.tau) ** 2

    def envelope_rate(self, t):
        return self.omega0 * math.pi / self.tau * np.sin(TWO_PI * np.asarray(t) / self.tau)

    def _sin4_integral(self, t):
        tau = self.tau
        return (3 * t / 8 - tau * np.sin(TWO_PI * t / tau) / (4 * math.pi)
                + tau * np.sin(2 * TWO_PI * t / tau) / (32 * math.pi))

    def lambda_phase(self, piece: int, t):
        """Phase of the effective Lambda coupling ``c = (Omega_c/2) e^{i xi}``."""
        t = np.asarray(t, dtype=float)
        if piece == 0:
            return np.full(t.shape, math.pi / 2 + self.zeta0)
        if piece == 1:
            return self.zeta0 + (self.area(t) - self.chi1) / math.sin(self.chi1)
        return np.full(t.shape, -math.pi / 2 + self.zeta0)

    def lambda_detuning(self, piece: int, t):
        t = np.asarray(t, dtype=float)
        if piece != 1:
            return np.zeros(t.shape)
        c = self.chi1
        return -self.envelope(t) * (1 + math.cos(c)) / math.sin(c)

    def tones(self, piece: int, t):
        """``(Omega~_1, Omega~_2, phi_1, phi_2, Delta~_1, D)`` at absolute times ``t``.

        ``D`` is the running integral of ``Delta~_1`` used in the frame phases.
        """
        t = np.asarray(t, dtype=float)
        th, ph = self.gate.theta, self.gate.phi
        a = self.alpha
        s1, s2 = math.sin(th / 2), math.cos(th / 2) / math.sqrt(2)
        env, denv = self.envelope(t), self.envelope_rate(t)
        xi = self.lambda_phase(piece, t)
        d = self.drag
        o1 = s1 * env - 1j * d.p1 * s1 * denv / a
        o2 = s2 * env - 1j * d.p2 * s2 * denv / a
        phi1 = -xi - ph
        phi2 = xi + math.pi
        shift = (d.p3 * s1 ** 2 + d.p4 * s2 ** 2) / (2 * a)
        delta1 = -self.lambda_detuning(piece, t) + shift * env ** 2
        c = self.chi1
        t1, t2 = self.switch_times
        loop = (self.area(np.clip(t, t1, t2)) - self.area(t1)) * (1 + math.cos(c)) / math.sin(c)
        dint = loop + shift * self.omega0 ** 2 * self._sin4_integral(t)
        return o1, o2, phi1, phi2, delta1, dint

    def max_frequency(self) -> float:
        return 2 * self.alpha + self.omega0 * (1 + 1 / max(math.sin(self.chi1), 1e-3))

    def default_step(self, samples: int = TRANSMON_SAMPLES_PER_PERIOD) -> float:
        return TWO_PI / (self.max_frequency() * samples)


def apply_drag(drive: SingleQubitDrive, drag: DragParams) -> SingleQubitDrive:
    if drive.alpha == 0:
        raise ValueError("DRAG needs a nonzero anharmonicity")
    return replace(drive, drag=drag)


def map_gate_to_drive(spec: GateSpec, omega0: float, alpha: float = MHZ * 300,
                      drag: DragParams | None = None, zeta0: float = 0.0) -> SingleQubitDrive:
    return SingleQubitDrive(spec, omega0, alpha, drag or DragParams(), zeta0)


def _single_qubit_matrices(drive: SingleQubitDrive, piece: int, t, leakage: bool):
    o1, o2, phi1, phi2, delta1, dint = drive.tones(piece, t)
    a = drive.alpha
    e1 = 0.5 * o1 * np.exp(1j * phi1)
    e2 = 0.5 * o2 * np.exp(1j * phi2)
    w = 1.0 if leakage else 0.0
    h = np.zeros((len(t), 4, 4), dtype=complex)
    h[:, 0, 1] = e1 + w * e2 * np.exp(-1j * (a * t + 2 * dint))
    h[:, 1, 2] = math.sqrt(2) * (w * e1 * np.exp(1j * (a * t + 2 * dint)) + e2)
    h[:, 2, 3] = w * math.sqrt(3) * (e1 * np.exp(1j * (2 * a * t + dint)) + e2 * np.exp(1j * (a * t - dint)))
    h = h + np.conj(np.swapaxes(h, 1, 2))
    h[:, 1, 1] = -delta1
    return h


def build_single_qubit_interaction_h(drive: SingleQubitDrive, params: TransmonParams | None = None,
                                     leakage: bool = True) -> PiecewiseHamiltonian:
    """Rotating-frame Hamiltonian on ``g, e, f, h``; ``leakage=False`` gives the effective model."""
    if params is not None and params.levels != 4:
        raise ValueError("single-qubit model uses four levels")
    t1, _ = drive.switch_times
    starts = (0.0, t1, t1 + drive.durations[1])

    def piece(k):
        return lambda tl: _single_qubit_matrices(drive, k, starts[k] + np.asarray(tl), leakage)

    return PiecewiseHamiltonian(drive.durations, tuple(piece(k) for k in range(3)), 4,
                                labels=("seg1", "seg2", "seg3"))


def effective_single_qubit_h(drive: SingleQubitDrive) -> PiecewiseHamiltonian:
    return build_single_qubit_interaction_h(drive, leakage=False)


def single_qubit_collapse_ops(levels: int = 4):
    a = ladder(levels)
    return a, np.diag(np.arange(levels)).astype(complex)


@dataclass
class FidelityReport:
    fidelity: float
    model: str
    kappa: float
    gate_time: float
    step: float
    leakage: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity

    def to_dict(self):
        return asdict(self)


def _logical_leakage(rhos, indices) -> float:
    pops = np.real(np.einsum("bii->bi", np.asarray(rhos)))
    return float(np.mean(1.0 - pops[:, list(indices)].sum(axis=1)))


def single_qubit_fidelity(gate, omega0: float, *, drag: DragParams | None = None,
                          params: TransmonParams | None = None, kappa: float | None = None,
                          model: str = "full", samples: int = TRANSMON_SAMPLES_PER_PERIOD,
                          backend: str | None = None) -> FidelityReport:
    """Six-state fidelity of a transmon gate under the master equation.

    ``model`` is ``"full"`` (leakage terms kept) or ``"effective"``.
    """
    spec = named_gate(gate) if isinstance(gate, str) else gate
    params = params or TransmonParams()
    kappa = params.kappa if kappa is None else kappa
    drive = map_gate_to_drive(spec, omega0, params.alpha, drag)
    if model not in ("full", "effective"):
        raise ValueError("model must be 'full' or 'effective'")
    H = build_single_qubit_interaction_h(drive, leakage=(model == "full"))
    step = drive.default_step(samples)
    probes = [embed_state(v, 4, SINGLE_LOGICAL) for v in SIX_STATES]
    rho0 = np.stack([np.outer(p, p.conj()) for p in probes])
    s1, s2 = single_qubit_collapse_ops(4)
    lm = LindbladModel(H, (s1, s2), kappa)
    rhos = evolve_lindblad(lm, rho0, TimeGrid(0.0, drive.tau, step), backend=backend)
    target = embed(rotation_matrix(spec), 4, SINGLE_LOGICAL)
    f = avg_state_fidelity(target, rhos, probes)
    return FidelityReport(f, model, kappa, drive.tau, step, _logical_leakage(rhos, SINGLE_LOGICAL),
                          {"omega0": omega0, "drag": astuple_drag(drive.drag), "gate": spec.to_dict(),
                           "hygiene": state_diagnostics(rhos)})


def infidelity_decomposition(gate, omega0: float | None = None, drag: DragParams | None = None,
                             params: TransmonParams | None = None, **kw) -> tuple[float, float]:
    """``(decoherence_part, leakage_part)`` of the full-model infidelity.

    The leakage part is the infidelity with ``kappa = 0``; the decoherence
    part is what the decay and dephasing add on top.
    """
    name = gate if isinstance(gate, str) else ""
    omega0 = omega0 if omega0 is not None else DEFAULT_OMEGA0[name.upper()]
    drag = drag if drag is not None else DEFAULT_DRAG.get(name.upper(), DragParams())
    total = single_qubit_fidelity(gate, omega0, drag=drag, params=params, **kw).infidelity
    closed = single_qubit_fidelity(gate, omega0, drag=drag, params=params, kappa=0.0, **kw).infidelity
    return total - closed, closed


def _omega0_point(gate, drag, params, samples, omega0):
    eff = single_qubit_fidelity(gate, omega0, params=params, model="effective", samples=samples).fidelity
    raw = single_qubit_fidelity(gate, omega0, params=params, samples=samples).fidelity
    dr = single_qubit_fidelity(gate, omega0, drag=drag, params=params, samples=samples).fidelity
    return omega0, eff, raw, dr


def scan_omega0(gate: str, omega0_values, *, drag: DragParams | None = None,
                params: TransmonParams | None = None, samples: int = TRANSMON_SAMPLES_PER_PERIOD,
                jobs: int | None = 1, progress=None):
    """Rows ``(omega0, F_effective, F_full, F_full_with_drag)``."""
    drag = drag if drag is not None else DEFAULT_DRAG[gate.upper()]
    fn = partial(_omega0_point, gate, drag, params, samples)
    return parallel_map(fn, list(omega0_values), jobs, progress)


# ---------------------------------------------------------------------------
# two coupled transmons

TWO_QUBIT_LEVELS = 5


def idx2(a: str, b: str) -> int:
    return TWO_QUBIT_LEVELS * LEVEL_LABELS.index(a) + LEVEL_LABELS.index(b)


TWO_QUBIT_LABELS = tuple(a + b for a in LEVEL_LABELS for b in LEVEL_LABELS)
TWO_QUBIT_LOGICAL = (idx2("g", "g"), idx2("g", "f"), idx2("f", "g"), idx2("f", "f"))


@dataclass(frozen=True)
class TwoQubitParams:
    """Coupled-transmon parameters; defaults are the reference operating point.

    ``gamma`` is the phase written on ``|11>`` (pi for CZ) and ``theta``,
    ``phi`` are set by the Bessel-weighted couplings.
    """

    g12: float = MHZ * 5
    delta12: float = MHZ * 1000
    alpha1: float = MHZ * 300
    alpha2: float = MHZ * 380
    beta1: float = 2.3
    beta2: float = 0.0
    kappa: float = MHZ * 0.002
    gamma: float = math.pi
    zeta0: float = 0.0
    omega1: float | None = None
    omega2: float | None = None

    @property
    def g1(self) -> float:
        return math.sqrt(6) * jv(1, self.beta1) * jv(1, self.beta2) * self.g12

    @property
    def g2(self) -> float:
        return math.sqrt(6) * jv(1, self.beta1) * jv(0, self.beta2) * self.g12

    @property
    def g(self) -> float:
        return math.hypot(self.g1, self.g2)

    @property
    def theta(self) -> float:
        return 2 * math.atan2(self.g1, self.g2)

    def drive_frequencies(self, delta2: float = 0.0) -> tuple[float, float]:
        v1 = self.delta12 - 2 * self.alpha1 + self.alpha2 + delta2
        v2 = self.delta12 - self.alpha1 + 2 * self.alpha2 - delta2 - v1
        return v1, v2

    def max_frequency(self) -> float:
        v1, v2 = self.drive_frequencies()
        side = lambda b: math.ceil(abs(b)) + 4  # noqa: E731 - Bessel sidebands beyond this are negligible
        return (abs(self.delta12) + side(self.beta1) * abs(v1) + side(self.beta2) * abs(v2)
                + 2 * max(self.alpha1, self.alpha2))

    def to_dict(self):
        return asdict(self)


def cz_schedule(p: TwoQubitParams) -> PulseSchedule:
    """Three-segment schedule on ``{eh, ff, he}``: the coupling ``g`` plays ``Omega/2``."""
    if p.g <= 0:
        raise ValueError("effective coupling vanishes (J_1(beta1) = 0?)")
    spec = GateSpec(p.theta, 0.0, p.gamma)
    return build_asr_schedule(spec, 2 * p.g, p.zeta0)


def _schedule_phase(s: PulseSchedule, k: int, t):
    seg = s.segments[k]
    return seg.phase + seg.phase_rate * t


def _schedule_detuning_integral(s: PulseSchedule, k: int, t):
    before = sum(seg.detuning * seg.duration for seg in s.segments[:k])
    return before + s.segments[k].detuning * t


# (row, col, frequency multiplier (alpha1, alpha2), weight) for each term of the coupling
_LEAK_TERMS = (
    (("g", "f"), ("e", "e"), (0, -1), 1.0),
    (("e", "e"), ("f", "g"), (1, 0), 1.0),
)
_TARGET_TERMS = (
    (("e", "h"), ("f", "f"), (1, -2), math.sqrt(3)),
    (("f", "f"), ("h", "e"), (2, -1), math.sqrt(3)),
)


def _two_qubit_matrices(p: TwoQubitParams, s: PulseSchedule, k: int, t, terms):
    t = np.asarray(t, dtype=float)
    start = s.breakpoints[k]
    xi = _schedule_phase(s, k, t - start)
    dint = _schedule_detuning_integral(s, k, t - start)
    phase1 = (p.delta12 - 2 * p.alpha1 + p.alpha2) * t + dint + xi
    phase2 = (p.alpha1 + p.alpha2) * t - 2 * dint - 2 * xi - s.gate.phi
    pref = math.sqrt(2) * p.g12 * np.exp(-1j * (p.delta12 * t + p.beta1 * np.sin(phase1)
                                                + p.beta2 * np.sin(phase2)))
    h = np.zeros((len(t), 25, 25), dtype=complex)
    for (r, c, (m1, m2), wgt) in terms:
        h[:, idx2(*r), idx2(*c)] += wgt * pref * np.exp(1j * (m1 * p.alpha1 + m2 * p.alpha2) * t)
    return h + np.conj(np.swapaxes(h, 1, 2))


def build_two_qubit_interaction_h(p: TwoQubitParams, terms: str = "all") -> PiecewiseHamiltonian:
    """Interaction-picture coupling Hamiltonian on 25 levels.

    ``terms="all"`` keeps both three-level structures; ``"target"`` keeps
    only the ``{eh, ff, he}`` couplings, removing the leakage channel.
    """
    chosen = {"all": _LEAK_TERMS + _TARGET_TERMS, "target": _TARGET_TERMS}.get(terms)
    if chosen is None:
        raise ValueError("terms must be 'all' or 'target'")
    s = cz_schedule(p)

    def piece(k):
        return lambda tl: _two_qubit_matrices(p, s, k, s.breakpoints[k] + np.asarray(tl), chosen)

    return PiecewiseHamiltonian(s.durations, tuple(piece(k) for k in range(len(s.segments))), 25,
                                labels=tuple(seg.label for seg in s.segments))


def effective_two_qubit_h(p: TwoQubitParams) -> PiecewiseHamiltonian:
    """Lambda model on ``|eh>, |he>, |ff>`` (as ``|0>, |1>, |2>``), embedded in 25 levels."""
    s = cz_schedule(p)
    where = [idx2("e", "h"), idx2("h", "e"), idx2("f", "f")]

    def piece(k):
        seg = s.segments[k]

        def fn(tl):
            small = lambda_hamiltonian(seg.coupling(tl), seg.detuning_at(tl), s.theta, s.phi)
            h = np.zeros((len(small), 25, 25), dtype=complex)
            h[:, np.array(where)[:, None], np.array(where)[None, :]] = small
            return h
        return fn

    return PiecewiseHamiltonian(s.durations, tuple(piece(k) for k in range(len(s.segments))), 25,
                                labels=tuple(seg.label for seg in s.segments))


def cz_target(p: TwoQubitParams) -> np.ndarray:
    """Ideal logical action ``diag(1, 1, 1, e^{-i gamma'})`` in the interaction frame.

    The detuning frame leaves ``|ff>`` with the extra phase ``int Delta_2 dt``,
    a multiple of ``2 pi`` when ``gamma' = pi``.
    """
    s = cz_schedule(p)
    extra = sum(seg.detuning * seg.duration for seg in s.segments)
    return np.diag([1, 1, 1, np.exp(-1j * p.gamma + 1j * extra)]).astype(complex)


def two_qubit_collapse_ops():
    a = ladder(TWO_QUBIT_LEVELS)
    n = np.diag(np.arange(TWO_QUBIT_LEVELS)).astype(complex)
    eye = np.eye(TWO_QUBIT_LEVELS)
    return np.kron(a, eye) + np.kron(eye, a), np.kron(n, eye) + np.kron(eye, n)


def cz_fidelity(p: TwoQubitParams | None = None, *, kappa: float | None = None, model: str = "full",
                samples: int = TRANSMON_SAMPLES_PER_PERIOD, backend: str | None = None,
                progress=None) -> FidelityReport:
    """Sixteen-state CZ fidelity.

    ``model``: ``"full"`` (every coupling term), ``"target"`` (leakage
    structure removed) or ``"effective"`` (Lambda model).  With
    ``kappa = 0`` the closed propagator is used directly.
    """
    p = p or TwoQubitParams()
    kappa = p.kappa if kappa is None else kappa
    if model == "effective":
        H = effective_two_qubit_h(p)
    else:
        H = build_two_qubit_interaction_h(p, "all" if model == "full" else "target")
    step = TWO_PI / (p.max_frequency() * samples)
    grid = TimeGrid(0.0, H.duration, step)
    target = embed(cz_target(p), 25, TWO_QUBIT_LOGICAL)
    probes = [embed_state(v, 25, TWO_QUBIT_LOGICAL) for v in SIXTEEN_STATES]
    if kappa == 0:
        block = np.stack(probes, axis=1)
        out = propagate_unitary(H, grid, initial=block, backend=backend)
        rhos = np.einsum("ik,jk->kij", out, out.conj())
        f = avg_state_fidelity(target, rhos, probes)
    else:
        rho0 = np.stack([np.outer(v, v.conj()) for v in probes])
        s1, s2 = two_qubit_collapse_ops()
        rhos = evolve_lindblad(LindbladModel(H, (s1, s2), kappa), rho0, grid, backend=backend,
                               progress=progress)
        f = avg_state_fidelity(target, rhos, probes)
    return FidelityReport(f, model, kappa, H.duration, step, _logical_leakage(rhos, TWO_QUBIT_LOGICAL),
                          {"beta1": p.beta1, "g": p.g, "hygiene": state_diagnostics(rhos)})


def _beta_point(p, kappa, samples, model, beta1):
    rep = cz_fidelity(replace(p, beta1=beta1), kappa=kappa, samples=samples, model=model)
    return beta1, rep.fidelity, rep.details["hygiene"]


def scan_beta1(p: TwoQubitParams | None = None, beta1_values=None, *, kappa: float | None = None,
               samples: int = TRANSMON_SAMPLES_PER_PERIOD, model: str = "full", jobs: int | None = 1,
               progress=None):
    """Rows ``(beta1, fidelity, hygiene)`` of the sixteen-state CZ fidelity."""
    p = p or TwoQubitParams()
    if beta1_values is None:
        beta1_values = np.linspace(1.5, 3.0, 16)
    fn = partial(_beta_point, p, kappa, samples, model)
    return parallel_map(fn, [float(b) for b in beta1_values], jobs, progress)


def save_params(path, single: TransmonParams | None = None, two: TwoQubitParams | None = None,
                drag: dict | None = None):
    doc = {"single": asdict(single or TransmonParams()), "two_qubit": asdict(two or TwoQubitParams()),
           "drag": {k: asdict(v) for k, v in (drag or DEFAULT_DRAG).items()}}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def load_params(path):
    """Read a parameter file written by :func:`save_params` (missing keys take defaults)."""
    with open(path) as fh:
        doc = json.load(fh)
    single = TransmonParams(**doc.get("single", {}))
    two = TwoQubitParams(**doc.get("two_qubit", {}))
    drag = {k: DragParams(**v) for k, v in doc.get("drag", {}).items()} or dict(DEFAULT_DRAG)
    return single, two, drag
