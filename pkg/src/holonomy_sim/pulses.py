"""Pulse schedules for holonomic gates on a detuned Lambda system.

Basis order is ``|0>, |1>, |2>`` with ``|2>`` the shared excited level.  The
drive couples ``|2>`` to the bright state ``|b>`` with a complex coefficient
``c(t)`` and shifts ``|2>`` by the detuning ``Delta(t)``:

    H(t) = Delta(t) |2><2| + c(t) |2><b| + h.c.

Two constructions are provided.  The accelerated three-segment schedule
(``asr``) moves the auxiliary state down a meridian, once around a latitude
and back up; its duration depends on the rotation angle.  The six-segment
resonant schedule (``sr6``) is the fixed-time baseline.

Every schedule carries its analytic frame: the polar angle ``chi``, the
azimuth ``zeta`` and the phases ``gamma2``, ``gamma3`` of the two driven
dressed states, all piecewise linear in time.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import PiecewiseHamiltonian

TWO_PI = 2 * math.pi
_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class GateSpec:
    """Rotation ``exp(i (gamma/2) n.sigma)`` about ``n(theta, phi)``."""

    theta: float
    phi: float = 0.0
    gamma: float = 0.0
    name: str = ""

    def __post_init__(self):
        for v in (self.theta, self.phi, self.gamma):
            if not math.isfinite(v):
                raise ValueError("gate angles must be finite")
        if not -_ANGLE_TOL <= self.theta <= math.pi + _ANGLE_TOL:
            raise ValueError(f"theta = {self.theta} outside [0, pi]")
        if not -_ANGLE_TOL <= self.gamma <= math.pi + _ANGLE_TOL:
            raise ValueError(f"gamma = {self.gamma} outside [0, pi]")
        object.__setattr__(self, "theta", min(max(self.theta, 0.0), math.pi))
        object.__setattr__(self, "gamma", min(max(self.gamma, 0.0), math.pi))
        object.__setattr__(self, "phi", self.phi % TWO_PI)

    @classmethod
    def normalized(cls, theta, phi, gamma, name=""):
        """Fold any rotation angle into ``[0, pi]`` by flipping the axis."""
        g = math.remainder(gamma, 2 * TWO_PI)  # rotation angle is 4pi-periodic up to sign
        g = g % TWO_PI
        if g > math.pi:
            g = TWO_PI - g
            theta, phi = math.pi - theta, phi + math.pi
        return cls(theta, phi, g, name)

    @property
    def axis(self) -> np.ndarray:
        return np.array([math.sin(self.theta) * math.cos(self.phi),
                         math.sin(self.theta) * math.sin(self.phi),
                         math.cos(self.theta)])

    @property
    def is_identity(self) -> bool:
        return self.gamma == 0.0

    def inverse(self) -> "GateSpec":
        """Same angle about the flipped axis; undoes this gate up to phase."""
        return GateSpec(math.pi - self.theta, self.phi + math.pi, self.gamma,
                        f"{self.name}^-1" if self.name else "")

    def to_dict(self):
        return {"theta": self.theta, "phi": self.phi, "gamma": self.gamma}


# Named gates.  "S" and "T" follow exp(i gamma/2 sigma_z), which equals
# diag(1, e^{-i gamma}) up to phase: the conjugates of the usual S and T.
NAMED_GATES = {
    "H": GateSpec(math.pi / 4, 0.0, math.pi, "H"),
    "S": GateSpec(0.0, 0.0, math.pi / 2, "S"),
    "T": GateSpec(0.0, 0.0, math.pi / 4, "T"),
    "X": GateSpec(math.pi / 2, 0.0, math.pi, "X"),
    "Z": GateSpec(0.0, 0.0, math.pi, "Z"),
}


def named_gate(name: str) -> GateSpec:
    try:
        return NAMED_GATES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown gate {name!r}; choose from {sorted(NAMED_GATES)}") from None


def chi_from_gamma(gamma: float) -> float:
    """Meridian angle reached by the first segment: ``arccos(1 - gamma/pi)``."""
    if not -_ANGLE_TOL <= gamma <= math.pi + _ANGLE_TOL:
        raise ValueError(f"gamma = {gamma} outside [0, pi]")
    return math.acos(min(1.0, max(-1.0, 1.0 - gamma / math.pi)))


def gamma_from_chi(chi: float) -> float:
    return math.pi * (1.0 - math.cos(chi))


def gate_time(gamma: float, omega: float) -> float:
    """Duration of the three-segment schedule at coupling magnitude ``omega``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    c = chi_from_gamma(gamma)
    return (2 * c + TWO_PI * math.sin(c)) / omega


def sr6_gate_time(omega: float) -> float:
    if omega <= 0:
        raise ValueError("omega must be positive")
    return 4 * math.pi / omega


def bright_dark_basis(theta: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Bright and dark superpositions of ``|0>, |1>`` embedded in three levels."""
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    bright = np.array([s * np.exp(-1j * phi), -c, 0.0], dtype=complex)
    dark = np.array([c, s * np.exp(1j * phi), 0.0], dtype=complex)
    return bright, dark


@dataclass(frozen=True)
class PulseSegment:
    """One constant-magnitude drive segment.

    ``coupling(t) = amplitude * exp(i (phase + phase_rate * t))`` with ``t``
    measured from the start of the segment; the detuning is constant.
    """

    label: str
    duration: float
    amplitude: float
    phase: float
    phase_rate: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        vals = (self.duration, self.amplitude, self.phase, self.phase_rate, self.detuning)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("segment parameters must be finite")
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")

    @property
    def form(self) -> str:
        return "phase_ramp" if self.phase_rate else "constant"

    def coupling(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * np.exp(1j * (self.phase + self.phase_rate * t))

    def detuning_at(self, t):
        return np.full(np.shape(t), self.detuning)

    def to_dict(self):
        return {"label": self.label, "duration": self.duration, "coupling_form": self.form,
                "amplitude": self.amplitude, "phase": self.phase,
                "phase_rate": self.phase_rate, "detuning": self.detuning}

    @classmethod
    def from_dict(cls, d):
        return cls(d["label"], d["duration"], d["amplitude"], d["phase"],
                   d.get("phase_rate", 0.0), d.get("detuning", 0.0))


@dataclass(frozen=True)
class FrameSegment:
    """Frame angles at the start of a segment and their constant rates."""

    chi: float
    chi_rate: float
    zeta: float
    zeta_rate: float
    gamma2: float
    gamma2_rate: float
    gamma3: float
    gamma3_rate: float


@dataclass(frozen=True)
class FrameTrajectory:
    """Piecewise-linear frame ``chi, zeta, gamma2, gamma3`` for a schedule.

    ``geometric`` marks frames in which the driven dressed state picks up
    no dynamical phase, so that its phase follows from the connection alone.
    """

    theta: float
    phi: float
    durations: tuple[float, ...]
    segments: tuple[FrameSegment, ...]
    geometric: bool = True

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    def _locate(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        bp = self.breakpoints
        k = np.clip(np.searchsorted(bp[1:], t, side="left"), 0, len(self.segments) - 1)
        return k, t - bp[k]

    def _linear(self, name, t, k=None):
        if k is None:
            k, tl = self._locate(t)
        else:
            tl = np.atleast_1d(np.asarray(t, dtype=float))
        start = np.array([getattr(s, name) for s in self.segments])[k]
        rate = np.array([getattr(s, name + "_rate") for s in self.segments])[k]
        return start + rate * tl

    def chi(self, t):
        return self._linear("chi", t)

    def zeta(self, t):
        return self._linear("zeta", t)

    def gamma2(self, t):
        return self._linear("gamma2", t)

    def gamma3(self, t):
        return self._linear("gamma3", t)

    def _where(self, t, piece):
        if piece is None:
            return self._locate(t)
        tl = np.atleast_1d(np.asarray(t, dtype=float))
        return np.full(tl.shape, piece), tl

    def auxiliary_states(self, t, piece=None):
        """Moving frame ``psi~_1, psi~_2, psi~_3`` as arrays of shape ``(n, 3)``.

        With ``piece`` given, ``t`` is local to that piece; this picks a side
        at breakpoints where the azimuth jumps.
        """
        k, tl = self._where(t, piece)
        chi = self._linear("chi", tl, k)
        zeta = self._linear("zeta", tl, k)
        b, d = bright_dark_basis(self.theta, self.phi)
        e2 = np.array([0, 0, 1.0], dtype=complex)
        c, s = np.cos(chi / 2)[:, None], np.sin(chi / 2)[:, None]
        ez = np.exp(1j * zeta)[:, None]
        p1 = np.broadcast_to(d, (len(chi), 3))
        p2 = c * b + s * ez * e2
        p3 = s * np.conj(ez) * b - c * e2
        return p1, p2, p3

    def dressed_states(self, t, piece=None):
        """Solutions ``psi_k = e^{i gamma_k} psi~_k`` predicted by the frame."""
        k, tl = self._where(t, piece)
        p1, p2, p3 = self.auxiliary_states(tl, piece) if piece is not None else self.auxiliary_states(t)
        g2 = self._linear("gamma2", tl, k)[:, None]
        g3 = self._linear("gamma3", tl, k)[:, None]
        return p1, np.exp(1j * g2) * p2, np.exp(1j * g3) * p3

    def connection_phase_rate(self, piece: int) -> float:
        """Connection entry ``i<psi~_2|d/dt|psi~_2>`` is ``-zeta' sin^2(chi/2)``; its
        integral over a piece, divided by the piece duration."""
        s = self.segments[piece]
        T = self.durations[piece]
        if T == 0:
            return 0.0
        if s.chi_rate == 0:
            return -s.zeta_rate * math.sin(s.chi / 2) ** 2
        chi1 = s.chi + s.chi_rate * T
        # int sin^2(chi/2) dt with chi linear
        avg = 0.5 - (math.sin(chi1) - math.sin(s.chi)) / (2 * s.chi_rate * T)
        return -s.zeta_rate * avg


@dataclass(frozen=True)
class PulseSchedule:
    """Piecewise drive for one gate on the Lambda system."""

    segments: tuple[PulseSegment, ...]
    gate: GateSpec
    omega: float
    zeta0: float = 0.0
    scheme: str = "asr"
    frame: FrameTrajectory | None = field(default=None, compare=False)

    excited_index = 2

    @property
    def theta(self) -> float:
        return self.gate.theta

    @property
    def phi(self) -> float:
        return self.gate.phi

    @property
    def durations(self) -> tuple[float, ...]:
        return tuple(s.duration for s in self.segments)

    @property
    def duration(self) -> float:
        return float(sum(self.durations))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    @property
    def is_identity(self) -> bool:
        return len(self.segments) == 0

    def truncated(self, n: int) -> "PulseSchedule":
        """Keep the first ``n`` segments (for deliberately broken controls)."""
        frame = None
        if self.frame is not None:
            frame = replace(self.frame, durations=self.frame.durations[:n],
                            segments=self.frame.segments[:n])
        return replace(self, segments=self.segments[:n], frame=frame,
                       scheme=f"{self.scheme}[:{n}]")

    def to_dict(self):
        return {"scheme": self.scheme, "gate": self.gate.to_dict(), "omega": self.omega,
                "zeta0": self.zeta0, "duration": self.duration,
                "segments": [s.to_dict() for s in self.segments]}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        g = d["gate"]
        gate = GateSpec(g["theta"], g["phi"], g["gamma"])
        builder = {"asr": build_asr_schedule, "sr6": build_sr6_schedule}.get(d.get("scheme"))
        if builder is not None:
            rebuilt = builder(gate, d["omega"], d.get("zeta0", 0.0))
            segs = tuple(PulseSegment.from_dict(s) for s in d["segments"])
            if len(segs) == len(rebuilt.segments):
                return replace(rebuilt, segments=segs)
        return cls(tuple(PulseSegment.from_dict(s) for s in d["segments"]), gate,
                   d["omega"], d.get("zeta0", 0.0), d.get("scheme", "custom"))

    @classmethod
    def from_json(cls, text: str) -> "PulseSchedule":
        return cls.from_dict(json.loads(text))


def _check_omega(omega):
    if not (omega > 0 and math.isfinite(omega)):
        raise ValueError("omega must be positive and finite")


def build_asr_schedule(spec: GateSpec, omega: float = 1.0, zeta0: float = 0.0) -> PulseSchedule:
    """Three constant-magnitude segments: meridian down, latitude loop, meridian up.

    The loop detuning is ``-zeta' (1 + cos chi1)``; the closing segment
    drives with ``chi' = -omega`` and hence carries the opposite sign of the
    opening one.  ``gamma = 0`` gives an empty (identity) schedule.
    """
    _check_omega(omega)
    if spec.is_identity:
        frame = FrameTrajectory(spec.theta, spec.phi, (), ())
        return PulseSchedule((), spec, omega, zeta0, "asr", frame)
    chi1 = chi_from_gamma(spec.gamma)
    t1 = chi1 / omega
    t2 = TWO_PI * math.sin(chi1) / omega
    zdot = TWO_PI / t2
    detuning = -zdot * (1 + math.cos(chi1))
    half = 0.5 * omega
    segs = (
        PulseSegment("seg1", t1, half, zeta0 + math.pi / 2),
        PulseSegment("seg2", t2, half, zeta0, zdot, detuning),
        PulseSegment("seg3", t1, half, zeta0 - math.pi / 2),
    )
    g2_rate = -0.5 * (1 - math.cos(chi1)) * zdot
    g3_rate = 0.5 * (3 + math.cos(chi1)) * zdot
    frame = FrameTrajectory(spec.theta, spec.phi, tuple(s.duration for s in segs), (
        FrameSegment(0.0, omega, zeta0, 0.0, 0.0, 0.0, 0.0, 0.0),
        FrameSegment(chi1, 0.0, zeta0, zdot, 0.0, g2_rate, 0.0, g3_rate),
        FrameSegment(chi1, -omega, zeta0 + TWO_PI, 0.0, g2_rate * t2, 0.0, g3_rate * t2, 0.0),
    ))
    return PulseSchedule(segs, spec, omega, zeta0, "asr", frame)


def build_sr6_schedule(spec: GateSpec, omega: float = 1.0, zeta0: float = 0.0) -> PulseSchedule:
    """Six resonant segments of areas pi/2, pi, pi/2, pi/2, pi, pi/2.

    The fifth segment uses phase ``zeta0 + pi/2 + gamma``, mirroring the
    second; this is what makes the schedule realise the requested angle.
    """
    _check_omega(omega)
    g = spec.gamma
    half = 0.5 * omega
    q, p = 0.5 * math.pi / omega, math.pi / omega
    # coupling (i/2) omega e^{i a} has phase a + pi/2; -(i/2) omega e^{i a} has a - pi/2
    segs = (
        PulseSegment("srA", q, half, zeta0 + math.pi / 2),
        PulseSegment("srB", p, half, zeta0 + math.pi),
        PulseSegment("srC", q, half, zeta0 + math.pi / 2),
        PulseSegment("srD", q, half, zeta0 + g - math.pi / 2),
        PulseSegment("srE", p, half, zeta0 + g),
        PulseSegment("srF", q, half, zeta0 + g - math.pi / 2),
    )
    h = 0.5 * math.pi
    frame = FrameTrajectory(spec.theta, spec.phi, tuple(s.duration for s in segs), (
        FrameSegment(0.0, omega, zeta0, 0.0, 0.0, 0.0, 0.0, 0.0),
        FrameSegment(h, 0.0, zeta0, 0.0, 0.0, half, 0.0, -half),
        FrameSegment(h, omega, zeta0, 0.0, h, 0.0, -h, 0.0),
        # at chi = pi the azimuth jumps by gamma; the phases absorb the jump
        FrameSegment(math.pi, -omega, zeta0 + g, 0.0, h - g, 0.0, -h + g, 0.0),
        FrameSegment(h, 0.0, zeta0 + g, 0.0, h - g, -half, -h + g, half),
        FrameSegment(h, -omega, zeta0 + g, 0.0, -g, 0.0, g, 0.0),
    ), geometric=False)
    return PulseSchedule(segs, spec, omega, zeta0, "sr6", frame)


def build_schedule(spec: GateSpec, scheme: str = "asr", omega: float = 1.0, zeta0: float = 0.0):
    scheme = scheme.lower()
    if scheme == "asr":
        return build_asr_schedule(spec, omega, zeta0)
    if scheme == "sr6":
        return build_sr6_schedule(spec, omega, zeta0)
    raise ValueError(f"unknown scheme {scheme!r}; expected 'asr' or 'sr6'")


def lambda_hamiltonian(coupling, detuning, theta, phi) -> np.ndarray:
    """Stack of ``Delta |2><2| + c |2><b| + h.c.`` for arrays of ``c`` and ``Delta``."""
    coupling = np.atleast_1d(coupling)
    detuning = np.broadcast_to(detuning, coupling.shape)
    b, _ = bright_dark_basis(theta, phi)
    h = np.zeros(coupling.shape + (3, 3), dtype=complex)
    h[..., 2, :] = coupling[..., None] * b.conj()
    h = h + np.conj(np.swapaxes(h, -1, -2))
    h[..., 2, 2] = detuning
    return h


def schedule_to_hamiltonian(s: PulseSchedule) -> PiecewiseHamiltonian:
    """Piecewise Hamiltonian of a schedule in the ``|0>, |1>, |2>`` basis."""
    th, ph = s.theta, s.phi

    def make(seg):
        return lambda t: lambda_hamiltonian(seg.coupling(t), seg.detuning_at(t), th, ph)

    return PiecewiseHamiltonian(s.durations, tuple(make(seg) for seg in s.segments), 3,
                                labels=tuple(seg.label for seg in s.segments))
