"""Closed and open time evolution for piecewise time-dependent Hamiltonians.

A :class:`PiecewiseHamiltonian` is a sequence of pieces, each a vectorized
function of the time measured from the start of that piece.  Step grids are
laid out piece by piece so that no step straddles a discontinuity.

Unitary propagation uses the fourth-order Magnus integrator with two Gauss
nodes per step; every step factor is an exact exponential of a Hermitian
matrix, so the product stays unitary to rounding.  Lindblad evolution is
classical RK4 with the Hamiltonian sampled at the start, middle and end of
each step.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .constants import HERMITIAN_TOL, TRACE_DRIFT_FAIL
from .qcore import dag, expm_hermitian_batch

_GAUSS_OFFSET = math.sqrt(3.0) / 6.0
_LINDBLAD_CHUNK = 2048
_UNITARY_CHUNK = 4096


class ResolutionError(RuntimeError):
    """The time step is too coarse for the requested accuracy."""


@dataclass(frozen=True)
class TimeGrid:
    """Evolution window ``[t0, t1]`` with a maximum step size.

    Within each piece of a piecewise Hamiltonian the actual step is the
    largest value not exceeding ``step`` that divides the piece evenly.
    """

    t0: float
    t1: float
    step: float

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError("step must be positive and finite")
        if self.t1 < self.t0:
            raise ValueError("t1 must not precede t0")

    @classmethod
    def for_frequency(cls, t0, t1, max_frequency, samples_per_period):
        """Grid resolving ``max_frequency`` (rad/time) with the given density."""
        return cls(t0, t1, 2 * math.pi / (max_frequency * samples_per_period))

    @property
    def span(self) -> float:
        return self.t1 - self.t0


def steps_for(length: float, step: float, multiple: int = 1) -> int:
    """Number of equal steps (a multiple of ``multiple``) covering ``length``."""
    if length <= 0:
        return 0
    n = max(1, math.ceil(length / step - 1e-9))
    return multiple * math.ceil(n / multiple)


@dataclass(frozen=True)
class PiecewiseHamiltonian:
    """``H(t) = scale * H_k(t - T_k) + static`` on piece ``k``.

    Each piece function maps an array of local times to an array of shape
    ``(n, d, d)``.  Intervals are closed on the right: a breakpoint belongs to
    the piece that ends there (``t = 0`` belongs to the first piece).
    """

    durations: tuple[float, ...]
    pieces: tuple[Callable[[np.ndarray], np.ndarray], ...]
    dim: int
    static: np.ndarray | None = None
    scale: float = 1.0
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.durations) != len(self.pieces):
            raise ValueError("one duration per piece")
        if any(d < 0 for d in self.durations):
            raise ValueError("durations must be non-negative")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"piece{k}" for k in range(len(self.pieces))))

    @classmethod
    def constant(cls, h, duration):
        h = np.asarray(h, dtype=complex)
        return cls((float(duration),), (lambda t: np.broadcast_to(h, (np.size(t),) + h.shape),), h.shape[0])

    @classmethod
    def from_callable(cls, fn, duration, dim):
        """Wrap a scalar-time function ``fn(t) -> (d, d)``."""
        def piece(t):
            return np.array([fn(float(x)) for x in np.atleast_1d(t)], dtype=complex)
        return cls((float(duration),), (piece,), dim)

    @property
    def duration(self) -> float:
        return float(sum(self.durations))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    def sample(self, k: int, t_local) -> np.ndarray:
        """Hamiltonian samples on piece ``k`` at local times ``t_local``."""
        t_local = np.atleast_1d(np.asarray(t_local, dtype=float))
        h = np.asarray(self.pieces[k](t_local), dtype=complex)
        if self.scale != 1.0:
            h = self.scale * h
        if self.static is not None:
            h = h + self.static
        return h

    def piece_at(self, t: float) -> tuple[int, float]:
        bp = self.breakpoints
        if t < -1e-12 or t > bp[-1] * (1 + 1e-12) + 1e-12:
            raise ValueError(f"t = {t} outside [0, {bp[-1]}]")
        k = int(np.searchsorted(bp[1:], t, side="left"))
        k = min(k, len(self.durations) - 1)
        return k, float(t - bp[k])

    def __call__(self, t: float) -> np.ndarray:
        k, tl = self.piece_at(float(t))
        return self.sample(k, [tl])[0]

    def scaled(self, factor: float) -> "PiecewiseHamiltonian":
        static = None if self.static is None else factor * self.static
        return PiecewiseHamiltonian(self.durations, self.pieces, self.dim, static,
                                    self.scale * factor, self.labels)

    def plus(self, matrix) -> "PiecewiseHamiltonian":
        matrix = np.asarray(matrix, dtype=complex)
        static = matrix if self.static is None else self.static + matrix
        return PiecewiseHamiltonian(self.durations, self.pieces, self.dim, static,
                                    self.scale, self.labels)

    def subset(self, indices: Sequence[int]) -> "PiecewiseHamiltonian":
        idx = list(indices)
        return PiecewiseHamiltonian(tuple(self.durations[k] for k in idx),
                                    tuple(self.pieces[k] for k in idx), self.dim,
                                    self.static, self.scale, tuple(self.labels[k] for k in idx))

    def then(self, other: "PiecewiseHamiltonian") -> "PiecewiseHamiltonian":
        """Concatenate in time.  Both operands must carry no static part."""
        if self.static is not None or other.static is not None or self.scale != other.scale:
            raise ValueError("concatenate before adding static terms or scaling")
        return PiecewiseHamiltonian(self.durations + other.durations, self.pieces + other.pieces,
                                    self.dim, None, self.scale, self.labels + other.labels)


def as_piecewise(H, grid: TimeGrid | None = None, dim: int | None = None) -> PiecewiseHamiltonian:
    if isinstance(H, PiecewiseHamiltonian):
        return H
    if grid is None:
        raise ValueError("a plain callable needs a TimeGrid")
    probe = np.asarray(H(grid.t0), dtype=complex)
    t0 = grid.t0
    return PiecewiseHamiltonian.from_callable(lambda t: H(t0 + t), grid.span, dim or probe.shape[0])


def _window(H: PiecewiseHamiltonian, grid: TimeGrid | None):
    """Yield ``(piece, local_start, length)`` for the part of H inside the grid."""
    bp = H.breakpoints
    lo, hi = (0.0, H.duration) if grid is None else (grid.t0, grid.t1)
    for k, d in enumerate(H.durations):
        a, b = max(lo, bp[k]), min(hi, bp[k + 1])
        if b - a > 1e-15 * max(1.0, abs(b)):
            yield k, a - bp[k], b - a


def _check_hermitian(h: np.ndarray):
    scale = max(1.0, float(np.max(np.abs(h))))
    if np.max(np.abs(h - dag(h))) > HERMITIAN_TOL * scale:
        raise ValueError("Hamiltonian sample is not Hermitian")


def step_propagators(H: PiecewiseHamiltonian, k: int, start: float, h: float, n: int,
                     order: int = 4, check: bool = True) -> np.ndarray:
    """Stack of ``n`` one-step propagators on piece ``k`` from local time ``start``."""
    t = start + h * np.arange(n)
    if order == 2:
        hm = H.sample(k, t + 0.5 * h)
        if check:
            _check_hermitian(hm)
        return expm_hermitian_batch(hm, h)
    if order != 4:
        raise ValueError("order must be 2 or 4")
    h1 = H.sample(k, t + (0.5 - _GAUSS_OFFSET) * h)
    h2 = H.sample(k, t + (0.5 + _GAUSS_OFFSET) * h)
    if check:
        _check_hermitian(h1)
        _check_hermitian(h2)
    comm = h1 @ h2 - h2 @ h1
    heff = 0.5 * (h1 + h2) + (1j * math.sqrt(3.0) * h / 12.0) * comm
    heff = 0.5 * (heff + dag(heff))
    return expm_hermitian_batch(heff, h)


def propagate_unitary(H, grid: TimeGrid | None = None, *, step: float | None = None,
                      initial=None, history: bool = False, order: int = 4,
                      backend: str | None = None, check: bool = True):
    """Time-ordered propagator of ``H`` over the grid window.

    ``initial`` (default identity) is a state or block of states to
    propagate.  With ``history=True`` the return value is ``(times, stack)``
    holding the propagated block after every step, including the start.
    """
    Hp = as_piecewise(H, grid)
    if step is None:
        if grid is None:
            raise ValueError("give a grid or a step")
        step = grid.step
    block = np.eye(Hp.dim, dtype=complex) if initial is None else np.asarray(initial, dtype=complex)
    bp = Hp.breakpoints
    times = [grid.t0 if grid is not None else 0.0]
    stacks = [block[None] if history else None]
    for k, start, length in _window(Hp, grid):
        n = steps_for(length, step)
        h = length / n
        for c0 in range(0, n, _UNITARY_CHUNK):
            c1 = min(n, c0 + _UNITARY_CHUNK)
            steps = step_propagators(Hp, k, start + c0 * h, h, c1 - c0, order, check)
            if history:
                hist = kernels.ordered_product(steps, block, history=True, backend=backend)
                stacks.append(hist[1:])
                block = hist[-1]
                times.extend(bp[k] + start + h * np.arange(c0 + 1, c1 + 1))
            else:
                block = kernels.ordered_product(steps, block, backend=backend)
    if history:
        return np.asarray(times), np.concatenate(stacks)
    return block


@dataclass(frozen=True)
class LindbladModel:
    """``drho/dt = i[rho, H] + (kappa/2) sum_A (2 A rho A^dag - A^dag A rho - rho A^dag A)``."""

    hamiltonian: PiecewiseHamiltonian
    collapse_ops: tuple[np.ndarray, ...] = ()
    kappa: float = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        ops = tuple(np.asarray(a, dtype=complex) for a in self.collapse_ops)
        for a in ops:
            if a.shape != (self.hamiltonian.dim, self.hamiltonian.dim):
                raise ValueError("collapse operator dimension mismatch")
        object.__setattr__(self, "collapse_ops", ops)

    @property
    def jumps(self) -> list[np.ndarray]:
        if self.kappa == 0:
            return []
        return [math.sqrt(self.kappa) * a for a in self.collapse_ops]

    def rhs(self, t: float, rho: np.ndarray) -> np.ndarray:
        """Right-hand side at time ``t``; used by tests as a slow reference."""
        h = self.hamiltonian(t)
        out = 1j * (rho @ h - h @ rho)
        for a in self.collapse_ops:
            ad = a.conj().T
            out += 0.5 * self.kappa * (2 * a @ rho @ ad - ad @ a @ rho - rho @ ad @ a)
        return out


def evolve_lindblad(model: LindbladModel, rho0, grid: TimeGrid | None = None, *,
                    step: float | None = None, record_every: int | None = None,
                    backend: str | None = None, check: bool = True, progress=None):
    """Integrate the master equation from ``rho0`` (one matrix or a batch).

    Returns the final density matrices, or ``(times, stack)`` when
    ``record_every`` is set (samples every that many steps plus piece ends).
    Raises :class:`ResolutionError` if the trace drifts by more than 1e-6.
    """
    H = model.hamiltonian
    if step is None:
        if grid is None:
            raise ValueError("give a grid or a step")
        step = grid.step
    rho = np.array(rho0, dtype=complex, order="C", copy=True)
    single = rho.ndim == 2
    if single:
        rho = rho[None]
    rho = np.ascontiguousarray(rho)
    tr0 = np.trace(rho, axis1=1, axis2=2).real
    jumps = model.jumps
    decay = sum((j.conj().T @ j for j in jumps), np.zeros((H.dim, H.dim), dtype=complex))
    bp = H.breakpoints
    times = [grid.t0 if grid is not None else 0.0]
    frames = [rho.copy()] if record_every else None
    chunk = record_every or _LINDBLAD_CHUNK
    windows = list(_window(H, grid))
    total = sum(steps_for(length, step) for _, _, length in windows)
    done = 0
    for k, start, length in windows:
        n = steps_for(length, step)
        h = length / n
        for c0 in range(0, n, chunk):
            c1 = min(n, c0 + chunk)
            ts = start + h * (c0 + 0.5 * np.arange(2 * (c1 - c0) + 1))
            hs = H.sample(k, ts)
            if check:
                _check_hermitian(hs)
            K = hs - 0.5j * decay
            kernels.lindblad_rk4(rho, K, jumps, h, backend=backend)
            drift = np.max(np.abs(np.trace(rho, axis1=1, axis2=2).real - tr0))
            if not np.all(np.isfinite(rho)) or drift > TRACE_DRIFT_FAIL:
                raise ResolutionError(f"trace drift {drift:.2e} exceeds {TRACE_DRIFT_FAIL}; reduce the step")
            done += c1 - c0
            if progress is not None:
                progress(done, total)
            if record_every:
                times.append(bp[k] + start + h * c1)
                frames.append(rho.copy())
    if record_every:
        stack = np.stack(frames)
        return np.asarray(times), (stack[:, 0] if single else stack)
    return rho[0] if single else rho


def state_diagnostics(rhos) -> dict:
    """Worst trace drift, Hermiticity error and smallest eigenvalue over a batch."""
    r = np.asarray(rhos)
    r = r[None] if r.ndim == 2 else r
    herm = 0.5 * (r + np.conj(np.swapaxes(r, 1, 2)))
    return {"trace_drift": float(np.max(np.abs(np.trace(r, axis1=1, axis2=2) - 1))),
            "hermiticity": float(np.max(np.abs(r - herm))),
            "min_eigenvalue": float(np.min(np.linalg.eigvalsh(herm)))}


@dataclass(frozen=True)
class ErrorChannel:
    """Static control error: ``global_iota``, ``coupling_epsilon`` or ``detuning_eta``."""

    kind: str
    magnitude: float

    KINDS = ("global_iota", "coupling_epsilon", "detuning_eta")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown error kind {self.kind!r}; expected one of {self.KINDS}")
        if not -0.5 <= self.magnitude <= 0.5:
            raise ValueError("error magnitude must lie in [-0.5, 0.5]")


def apply_error(H: PiecewiseHamiltonian, ch: ErrorChannel, meta=None) -> PiecewiseHamiltonian:
    """Return the perturbed Hamiltonian.

    ``meta`` supplies ``omega``, ``theta`` and ``phi`` (a pulse schedule
    works) for the additive kinds; the added terms use the nominal ``omega``
    and act on the excited level, index ``meta.excited_index`` or 2.
    """
    if ch.kind == "global_iota":
        return H.scaled(1.0 + ch.magnitude)
    if meta is None:
        raise ValueError("additive error kinds need schedule metadata")
    e = getattr(meta, "excited_index", 2)
    term = np.zeros((H.dim, H.dim), dtype=complex)
    if ch.kind == "coupling_epsilon":
        th, ph = meta.theta, meta.phi
        bright = np.zeros(H.dim, dtype=complex)
        bright[0] = math.sin(th / 2) * np.exp(-1j * ph)
        bright[1] = -math.cos(th / 2)
        term[e, :] += 0.5 * ch.magnitude * meta.omega * bright.conj()
        term += term.conj().T
    else:
        term[e, e] = 0.5 * ch.magnitude * meta.omega
    return H.plus(term)


def write_trajectory_csv(path, times, rhos, labels, digits: int = 12):
    """Populations per basis state and the trace, one row per sample."""
    pops = np.real(np.einsum("tii->ti", np.asarray(rhos)))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"pop_{lab}" for lab in labels] + ["trace"])
        for t, p in zip(times, pops):
            w.writerow([f"{t:.{digits}g}"] + [f"{x:.{digits}g}" for x in p] + [f"{p.sum():.{digits}g}"])
