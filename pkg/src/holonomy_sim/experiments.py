"""Deterministic scan harness: gate-time, decoherence, robustness, transmon scans and trajectories.

Every run returns a :class:`ScanResult` whose rows are ordered by grid
index, so the CSV it writes is byte-identical for any number of workers.
Floats are printed with 12 significant digits.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__
from .constants import (HERMITIAN_TOL, NORM_TOL, POSITIVITY_FLOOR, TRACE_DRIFT_FAIL, TRACE_TOL,
                        TRANSMON_SAMPLES_PER_PERIOD, UNITARY_TOL)
from .dynamics import LindbladModel, TimeGrid, evolve_lindblad
from .holonomy import (default_step, embed_state, error_order_fit, lindblad_gate_fidelity,
                       perturbed_fidelity, rotation_matrix)
from .parallel import parallel_map
from .pulses import PulseSchedule, build_schedule, gate_time, named_gate, sr6_gate_time
from .transmon import (MHZ, DEFAULT_DRAG, DEFAULT_OMEGA0, SINGLE_LABELS, SINGLE_LOGICAL, TWO_QUBIT_LABELS,
                       TWO_QUBIT_LOGICAL, DragParams, TransmonParams, TwoQubitParams,
                       build_single_qubit_interaction_h, build_two_qubit_interaction_h, cz_target,
                       map_gate_to_drive, scan_beta1, scan_omega0, single_qubit_collapse_ops,
                       two_qubit_collapse_ops)

SCAN_KINDS = ("gate_time_curve", "decoherence_curve", "robustness_grid", "beta1_scan", "omega0_scan",
              "trajectory")
SCHEMES = ("asr", "sr6")
TOLERANCES = {"norm": NORM_TOL, "hermitian": HERMITIAN_TOL, "unitary": UNITARY_TOL, "trace": TRACE_TOL,
              "positivity_floor": POSITIVITY_FLOOR, "trace_drift_fail": TRACE_DRIFT_FAIL}
_SQ = 1 / math.sqrt(2)


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def schedule_hash(s: PulseSchedule) -> str:
    return hashlib.sha256(s.to_json(sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ScanConfig:
    """What to scan.  ``ranges`` maps an axis name to ``(lo, hi, count)``."""

    scan_kind: str
    gates: tuple = ("H", "S", "T")
    schemes: tuple = SCHEMES
    ranges: dict = field(default_factory=dict)
    omega: float = 1.0
    step: float | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scan_kind not in SCAN_KINDS:
            raise ValueError(f"unknown scan kind {self.scan_kind!r}; expected one of {SCAN_KINDS}")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "schemes", tuple(s.lower() for s in self.schemes))
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        rng = {}
        for name, r in self.ranges.items():
            lo, hi, n = r
            n = int(n)
            if n < 1 or not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"range {name!r} is empty or not finite")
            if self.scan_kind == "robustness_grid" and n < 2:
                raise ValueError("grid axes need at least two points")
            rng[name] = (float(lo), float(hi), n)
        object.__setattr__(self, "ranges", rng)
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")

    def axis(self, name: str) -> np.ndarray:
        lo, hi, n = self.ranges[name]
        return np.linspace(lo, hi, n)

    def to_dict(self):
        d = asdict(self)
        d["ranges"] = {k: list(v) for k, v in self.ranges.items()}
        return d


@dataclass
class ScanResult:
    config: ScanConfig
    columns: tuple
    rows: list
    provenance: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(x) for x in r])
        return buf.getvalue()

    def meta(self) -> dict:
        return {"config": self.config.to_dict(), "columns": list(self.columns), "n_rows": len(self.rows),
                "provenance": self.provenance, "summary": self.summary, "version": __version__}

    def write(self, out_dir, stem: str, echo: dict | None = None) -> list[Path]:
        """Write ``<stem>.csv`` and ``<stem>.json`` (config, provenance, summary)."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        p_csv, p_json = out / f"{stem}.csv", out / f"{stem}.json"
        p_csv.write_text(self.to_csv())
        meta = self.meta()
        if echo is not None:
            meta["effective_config"] = echo
        p_json.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n")
        return [p_csv, p_json]


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _provenance(step, schedules=(), **extra) -> dict:
    d = {"step": step, "tolerances": dict(TOLERANCES),
         "schedule_hashes": {k: schedule_hash(s) for k, s in schedules}}
    d.update(extra)
    return d


# ---------------------------------------------------------------------------
# Lambda-system scans

def run_gate_time_curve(omega: float = 1.0, gamma_samples=None) -> ScanResult:
    """Rows ``(gamma, tau_asr, tau_sr6)``."""
    g = np.linspace(0.0, math.pi, 33) if gamma_samples is None else np.asarray(gamma_samples, dtype=float)
    if g.size == 0 or np.any(g < 0) or np.any(g > math.pi):
        raise ValueError("gamma samples must lie in [0, pi]")
    cfg = ScanConfig("gate_time_curve", gates=(), ranges={"gamma": (g[0], g[-1], g.size)}, omega=omega)
    rows = [(float(x), gate_time(float(x), omega), sr6_gate_time(omega)) for x in g]
    return ScanResult(cfg, ("gamma", "tau_asr", "tau_sr6"), rows, _provenance(None),
                      {"ratio_at_pi": gate_time(math.pi, omega) / sr6_gate_time(omega)})


def _decoherence_point(omega, step, item):
    kappa_over_omega, gate, scheme = item
    s = build_schedule(named_gate(gate), scheme, omega)
    return lindblad_gate_fidelity(s, kappa_over_omega * omega, step)


def run_decoherence_curve(gates=("H", "S", "T"), kappa_over_omega=None, scheme="asr", *,
                          omega: float = 1.0, step: float | None = None, jobs: int | None = 1,
                          progress=None) -> ScanResult:
    """Rows ``(kappa_over_omega, gate, scheme, fidelity)`` of the six-state Lindblad fidelity.

    ``kappa_over_omega`` is ``(lo, hi, count)`` or explicit values; the
    default is 21 points on ``[0, 1e-2]``.  ``scheme`` may be a list.
    """
    ks = _values(kappa_over_omega, (0.0, 1e-2, 21))
    schemes = (scheme,) if isinstance(scheme, str) else tuple(scheme)
    step = step or default_step(omega)
    cfg = ScanConfig("decoherence_curve", gates, schemes, {"kappa_over_omega": (ks[0], ks[-1], ks.size)},
                     omega, step)
    items = [(float(k), g, s) for s in cfg.schemes for k in ks for g in cfg.gates]
    fs = parallel_map(partial(_decoherence_point, omega, step), items, jobs, progress)
    rows = [(k, g, s, f) for (k, g, s), f in zip(items, fs)]
    scheds = [(f"{g}/{s}", build_schedule(named_gate(g), s, omega)) for s in cfg.schemes for g in cfg.gates]
    return ScanResult(cfg, ("kappa_over_omega", "gate", "scheme", "fidelity"), rows,
                      _provenance(step, scheds))


def _robustness_point(gate, scheme, omega, step, item):
    eps, eta = item
    return perturbed_fidelity(build_schedule(named_gate(gate), scheme, omega), eps, eta, step)


def run_robustness_grid(gate: str = "H", scheme: str = "asr", epsilon_range=(-0.2, 0.2, 41),
                        eta_range=(-0.2, 0.2, 41), *, omega: float = 1.0, step: float | None = None,
                        jobs: int | None = 1, progress=None) -> ScanResult:
    """Rows ``(epsilon, eta, gate, scheme, fidelity)`` with ``kappa = 0``.

    The summary carries the grid minimum and the fraction of points above 0.999.
    """
    step = step or default_step(omega)
    cfg = ScanConfig("robustness_grid", (gate,), (scheme,), {"epsilon": epsilon_range, "eta": eta_range},
                     omega, step)
    items = [(float(e), float(n)) for e in cfg.axis("epsilon") for n in cfg.axis("eta")]
    fs = parallel_map(partial(_robustness_point, gate, cfg.schemes[0], omega, step), items, jobs, progress)
    rows = [(e, n, gate, cfg.schemes[0], f) for (e, n), f in zip(items, fs)]
    arr = np.asarray(fs)
    sched = build_schedule(named_gate(gate), cfg.schemes[0], omega)
    return ScanResult(cfg, ("epsilon", "eta", "gate", "scheme", "fidelity"), rows,
                      _provenance(step, [(f"{gate}/{cfg.schemes[0]}", sched)]),
                      {"min_fidelity": float(arr.min()), "area_above_0.999": float(np.mean(arr > 0.999))})


def _values(spec, default) -> np.ndarray:
    if spec is None:
        spec = default
    if isinstance(spec, tuple) and len(spec) == 3 and isinstance(spec[2], int):
        v = np.linspace(spec[0], spec[1], spec[2])
    else:
        v = np.asarray(spec, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty range")
    return v


# ---------------------------------------------------------------------------
# transmon scans

def run_omega0_scan(gate: str = "X", omega0_mhz=None, *, drag: DragParams | None = None,
                    params: TransmonParams | None = None, samples: int = TRANSMON_SAMPLES_PER_PERIOD,
                    jobs: int | None = 1, progress=None) -> ScanResult:
    """Rows ``(omega0_mhz, fidelity_effective, fidelity_full, fidelity_drag)``; Omega_0 in MHz."""
    vals = _values(omega0_mhz, (30.0, 60.0, 16))
    params = params or TransmonParams()
    cfg = ScanConfig("omega0_scan", (gate,), ("asr",), {"omega0_mhz": (vals[0], vals[-1], vals.size)},
                     options={"samples": samples, "kappa": params.kappa, "alpha": params.alpha})
    out = scan_omega0(gate, [MHZ * v for v in vals], drag=drag, params=params, samples=samples, jobs=jobs,
                      progress=progress)
    rows = [(float(v), e, r, d) for v, (_, e, r, d) in zip(vals, out)]
    best = max(rows, key=lambda r: r[3])
    return ScanResult(cfg, ("omega0_mhz", "fidelity_effective", "fidelity_full", "fidelity_drag"), rows,
                      _provenance(f"2pi/(f_max*{samples})"),
                      {"optimum_omega0_mhz": best[0], "optimum_fidelity_drag": best[3]})


def run_beta1_scan(beta1_values=None, *, params: TwoQubitParams | None = None, kappa: float | None = None,
                   samples: int = TRANSMON_SAMPLES_PER_PERIOD, model: str = "full", jobs: int | None = 1,
                   progress=None) -> ScanResult:
    """Rows ``(beta1, fidelity)`` of the sixteen-state CZ fidelity."""
    vals = _values(beta1_values, (1.5, 3.0, 16))
    p = params or TwoQubitParams()
    k = p.kappa if kappa is None else kappa
    cfg = ScanConfig("beta1_scan", ("CZ",), ("asr",), {"beta1": (vals[0], vals[-1], vals.size)},
                     options={"samples": samples, "kappa": k, "model": model, "params": p.to_dict()})
    out = scan_beta1(p, vals, kappa=k, samples=samples, model=model, jobs=jobs, progress=progress)
    rows = [(float(b), float(f)) for b, f, _ in out]
    fs = [r[1] for r in rows]
    i = int(np.argmax(fs))
    hyg = [h for _, _, h in out]
    worst = {"trace_drift": max(h["trace_drift"] for h in hyg),
             "hermiticity": max(h["hermiticity"] for h in hyg),
             "min_eigenvalue": min(h["min_eigenvalue"] for h in hyg)}
    return ScanResult(cfg, ("beta1", "fidelity"), rows,
                      _provenance(f"2pi/(f_max*{samples})"),
                      {"optimum_beta1": rows[i][0], "optimum_fidelity": fs[i],
                       "interior_optimum": 0 < i < len(rows) - 1, "hygiene": worst})


# ---------------------------------------------------------------------------
# trajectories

SINGLE_INITIAL = np.array([_SQ, 1j * _SQ])
CZ_INITIAL = np.full(4, 0.5, dtype=complex)


def run_trajectory(gate: str = "X", model: str = "full", initial_state=None, *, omega0: float | None = None,
                   drag: DragParams | None = None, params=None, kappa: float | None = None,
                   samples: int = TRANSMON_SAMPLES_PER_PERIOD, points: int = 200, backend=None) -> ScanResult:
    """Level populations over one gate, rows ``(t, pop_<label>...)``.

    ``gate`` is ``"X"``, ``"Z"`` (one transmon, logical states ``g, f``) or
    ``"CZ"`` (two transmons).  ``initial_state`` is given on the logical
    subspace; defaults are ``(|0> + i|1>)/sqrt2`` and the uniform two-qubit
    superposition.  The summary holds the overlap of the final state with
    the ideal target state.
    """
    gate = gate.upper()
    if gate == "CZ":
        p = params or TwoQubitParams()
        H = build_two_qubit_interaction_h(p, "all" if model == "full" else "target")
        k = p.kappa if kappa is None else kappa
        step = 2 * math.pi / (p.max_frequency() * samples)
        dim, logical, labels = 25, TWO_QUBIT_LOGICAL, TWO_QUBIT_LABELS
        ops = two_qubit_collapse_ops()
        ideal = cz_target(p)
        init = CZ_INITIAL if initial_state is None else initial_state
        extra = {"params": p.to_dict()}
    else:
        tp = params or TransmonParams()
        spec = named_gate(gate)
        w0 = omega0 if omega0 is not None else DEFAULT_OMEGA0[gate]
        dg = drag if drag is not None else DEFAULT_DRAG.get(gate, DragParams())
        drive = map_gate_to_drive(spec, w0, tp.alpha, dg)
        H = build_single_qubit_interaction_h(drive, tp, leakage=(model == "full"))
        k = tp.kappa if kappa is None else kappa
        step = drive.default_step(samples)
        dim, logical, labels = 4, SINGLE_LOGICAL, SINGLE_LABELS
        ops = single_qubit_collapse_ops(4)
        ideal = rotation_matrix(spec)
        init = SINGLE_INITIAL if initial_state is None else initial_state
        extra = {"omega0": w0, "drag": asdict(dg)}
    init = np.asarray(init, dtype=complex)
    if init.shape != (len(logical),) or abs(np.linalg.norm(init) - 1) > NORM_TOL:
        raise ValueError("initial state must be a normalized vector on the logical subspace")
    psi = embed_state(init, dim, logical)
    tgt = embed_state(ideal @ init, dim, logical)
    grid = TimeGrid(0.0, H.duration, step)
    n_steps = max(1, int(round(H.duration / step)))
    every = max(1, n_steps // points)
    times, rhos = evolve_lindblad(LindbladModel(H, ops, k), np.outer(psi, psi.conj()), grid,
                                  record_every=every, backend=backend)
    pops = np.real(np.einsum("tii->ti", rhos.reshape(len(times), dim, dim)))
    rows = [(float(t),) + tuple(float(x) for x in row) for t, row in zip(times, pops)]
    cfg = ScanConfig("trajectory", (gate,), ("asr",), {"t": (0.0, H.duration, len(rows))},
                     options={"model": model, "kappa": k, "samples": samples, **extra})
    final = rhos.reshape(len(times), dim, dim)[-1]
    return ScanResult(cfg, ("t",) + tuple(f"pop_{l}" for l in labels), rows,
                      _provenance(step, record_every=every),
                      {"state_fidelity": float(np.real(tgt.conj() @ final @ tgt)),
                       "final_leakage": float(1 - pops[-1, list(logical)].sum()),
                       "gate_time": H.duration})


# ---------------------------------------------------------------------------
# comparison report

def compare_schemes(gates=("H", "S", "T"), *, omega: float = 1.0, kappa_over_omega=(2e-3, 5e-3, 1e-2),
                    grid: int = 21, step: float | None = None, jobs: int | None = 1) -> dict:
    """JSON-ready comparison of the three-segment and six-segment schemes."""
    step = step or default_step(omega)
    rep = {"omega": omega, "step": step, "tau_ratio_at_pi": gate_time(math.pi, omega) / sr6_gate_time(omega),
           "gates": {}}
    for g in gates:
        spec = named_gate(g)
        entry = {"gamma": spec.gamma, "tau": {"asr": gate_time(spec.gamma, omega), "sr6": sr6_gate_time(omega)}}
        for s in SCHEMES:
            sched = build_schedule(spec, s, omega)
            fit = error_order_fit(sched, step=step)
            dec = run_decoherence_curve((g,), list(kappa_over_omega), s, omega=omega, step=step, jobs=jobs)
            rob = run_robustness_grid(g, s, (-0.2, 0.2, grid), (-0.2, 0.2, grid), omega=omega, step=step,
                                      jobs=jobs)
            entry[s] = {"schedule_hash": schedule_hash(sched), "error_order_slope": fit.slope,
                        "decoherence": {fmt(k): f for k, _, _, f in dec.rows},
                        "grid_min_fidelity": rob.summary["min_fidelity"],
                        "grid_area_above_0.999": rob.summary["area_above_0.999"]}
        rep["gates"][g] = entry
    return rep

