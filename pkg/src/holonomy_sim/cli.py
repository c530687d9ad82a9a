"""Command-line interface: ``holonomy-sim {gate,verify,scan,reproduce,transmon}``.

Settings are layered as defaults < ``--config`` JSON file < flags, and the
effective settings are echoed into every output.  Angles are in radians.
Lambda-system runs use ``omega`` as the frequency unit; transmon runs use
microseconds and rad/us, with ``--omega0`` in MHz and ``--kappa`` in kHz.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import threading
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, experiments as ex
from .holonomy import (cyclic_residual, default_step, dmk_integrals, gate_infidelity, leakage,
                       propagate_schedule, super_robust_integral)
from .dynamics import TimeGrid
from .parallel import default_jobs
from .pulses import GateSpec, NAMED_GATES, build_schedule, named_gate
from .transmon import (MHZ, DEFAULT_DRAG, DEFAULT_OMEGA0, DragParams, TransmonParams, TwoQubitParams,
                       cz_fidelity, infidelity_decomposition, single_qubit_fidelity)

DEFAULTS = {
    "theta": None, "phi": 0.0, "gamma": None, "name": None, "scheme": "asr", "omega": 1.0, "zeta0": 0.0,
    "kappa": None, "step": None, "grid": None, "out": None, "jobs": None, "omega0": None, "samples": 40,
    "model": "full", "drag": True, "truncate": None, "kind": None, "gate": None, "beta1": None,
}
BUNDLES = ("2a", "2b", "3", "5", "6", "7")
SCAN_KINDS = ("gate_time", "decoherence", "robustness", "omega0", "beta1")
KHZ = MHZ * 1e-3
# Lambda-system validity thresholds
GATE_INFIDELITY_MAX = 1e-8
CYCLIC_TOL = 1e-6
SR_TOL = 1e-6
# angles typed with a few decimals may overshoot pi by this much
INPUT_SLACK = 1e-4


class CliError(Exception):
    pass


class Heartbeat:
    """Prints progress to stderr at least once per second while active."""

    def __init__(self, label: str, enabled: bool = True, period: float = 1.0):
        self.label, self.enabled, self.period = label, enabled, period
        self.done, self.total = 0, 0
        self._t0 = time.monotonic()
        self._stop = threading.Event()
        self._thread = None

    def __call__(self, done, total):
        self.done, self.total = done, total

    def _run(self):
        while not self._stop.wait(self.period):
            self._emit()

    def _emit(self):
        el = time.monotonic() - self._t0
        part = f" {self.done}/{self.total}" if self.total else ""
        print(f"[{self.label}]{part} {el:.0f}s", file=sys.stderr, flush=True)

    def __enter__(self):
        if self.enabled:
            self._thread = threading.Thread(target=self._run, daemon=True)
            self._thread.start()
        return self

    def __exit__(self, *exc):
        self._stop.set()
        if self._thread is not None:
            self._thread.join()
            self._emit()
        return False


# ---------------------------------------------------------------------------
# configuration

def load_config(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read config {path}: {e}") from e
    if not isinstance(doc, dict):
        raise CliError("config file must hold a JSON object")
    unknown = sorted(set(doc) - set(DEFAULTS))
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(unknown)}")
    return doc


def effective_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if cfg["jobs"] is None:
        cfg["jobs"] = default_jobs()
    return cfg


def gate_from(cfg) -> GateSpec:
    if cfg["name"]:
        return named_gate(cfg["name"])
    if cfg["gamma"] is not None and float(cfg["gamma"]) == 0 and cfg["theta"] is None:
        return GateSpec(0.0, float(cfg["phi"]), 0.0)  # identity: the axis is irrelevant
    if cfg["theta"] is None or cfg["gamma"] is None:
        raise CliError("give --name or both --theta and --gamma")
    theta, phi, gamma = float(cfg["theta"]), float(cfg["phi"]), float(cfg["gamma"])
    if math.pi < gamma <= math.pi + INPUT_SLACK:
        # rounded decimal input such as 3.1416: fold onto the same rotation
        return GateSpec.normalized(theta, phi, gamma)
    if math.pi < theta <= math.pi + INPUT_SLACK:
        theta = math.pi
    return GateSpec(theta, phi, gamma)


def _out_dir(cfg, default: str) -> Path:
    p = Path(cfg["out"] or default)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CliError(f"output directory {p} not writable: {e}") from e
    return p


def _emit(doc: dict, cfg, stem: str | None = None):
    text = json.dumps(doc, indent=2, sort_keys=True, default=ex._jsonable)
    print(text)
    if stem and cfg["out"]:
        p = _out_dir(cfg, ".") / f"{stem}.json"
        p.write_text(text + "\n")
        print(f"wrote {p}", file=sys.stderr)


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# commands (each returns an exit code)

def cmd_gate(cfg) -> int:
    spec = gate_from(cfg)
    sched = build_schedule(spec, cfg["scheme"], cfg["omega"], cfg["zeta0"])
    step = cfg["step"] or default_step(cfg["omega"])
    if sched.is_identity:
        _log("gamma = 0: identity gate, empty schedule")
        fid, leak = 1.0, 0.0
    else:
        fid = 1.0 - gate_infidelity(sched, step)
        leak = leakage(propagate_schedule(sched, step))
    doc = {"gate": spec.to_dict(), "scheme": cfg["scheme"], "gate_time": sched.duration,
           "trace_fidelity": fid, "leakage": leak, "schedule": sched.to_dict(), "config": cfg}
    _emit(doc, cfg, "gate")
    return 0 if 1 - fid < GATE_INFIDELITY_MAX else 1


def cmd_verify(cfg) -> int:
    spec = gate_from(cfg)
    sched = build_schedule(spec, cfg["scheme"], cfg["omega"], cfg["zeta0"])
    if sched.is_identity:
        _log("gamma = 0: identity gate, nothing to verify")
        _emit({"gate": spec.to_dict(), "identity": True, "config": cfg}, cfg, "verify")
        return 0
    if cfg["truncate"]:
        sched = sched.truncated(int(cfg["truncate"]))
    step = cfg["step"] or default_step(cfg["omega"])
    full = cfg["truncate"] is None
    rep = dmk_integrals(sched, TimeGrid(0.0, sched.duration, step),
                        error_order_magnitudes=np.geomspace(1e-2, 1e-1, 7) if full else None)
    sr = abs(super_robust_integral(sched))
    cyc = cyclic_residual(sched)
    scale = sched.omega * sched.duration
    checks = {"cyclic": cyc < CYCLIC_TOL, "super_robust": sr < SR_TOL * scale}
    doc = {"gate": spec.to_dict(), "scheme": cfg["scheme"], "report": rep.to_dict(),
           "abs_super_robust_integral": sr, "cyclic_residual": cyc, "checks": checks, "step": step,
           "config": cfg}
    _emit(doc, cfg, "verify")
    return 0 if all(checks.values()) else 1


def cmd_scan(cfg) -> int:
    kind = cfg["kind"]
    out = _out_dir(cfg, "scan_out")
    jobs = cfg["jobs"]
    with Heartbeat(f"scan {kind}") as hb:
        if kind == "gate_time":
            res = ex.run_gate_time_curve(cfg["omega"], np.linspace(0, math.pi, cfg["grid"] or 33))
        elif kind == "decoherence":
            kmax = cfg["kappa"] if cfg["kappa"] is not None else 1e-2
            gates = (cfg["name"],) if cfg["name"] else ("H", "S", "T")
            res = ex.run_decoherence_curve(gates, (0.0, kmax, cfg["grid"] or 21), cfg["scheme"],
                                           omega=cfg["omega"], step=cfg["step"], jobs=jobs, progress=hb)
        elif kind == "robustness":
            n = cfg["grid"] or 41
            res = ex.run_robustness_grid(cfg["name"] or "H", cfg["scheme"], (-0.2, 0.2, n), (-0.2, 0.2, n),
                                         omega=cfg["omega"], step=cfg["step"], jobs=jobs, progress=hb)
        elif kind == "omega0":
            gate = (cfg["name"] or "X").upper()
            res = ex.run_omega0_scan(gate, (30.0, 60.0, cfg["grid"] or 31), params=_single_params(cfg),
                                     samples=cfg["samples"], jobs=jobs, progress=hb)
        elif kind == "beta1":
            res = ex.run_beta1_scan((1.5, 3.0, cfg["grid"] or 16), kappa=_kappa_transmon(cfg),
                                    samples=cfg["samples"], model=cfg["model"], jobs=jobs, progress=hb)
        else:
            raise CliError(f"unknown scan kind {kind!r}; choose from {', '.join(SCAN_KINDS)}")
    stem = kind if kind in ("gate_time", "decoherence", "omega0", "beta1") else \
        f"robustness_{cfg['name'] or 'H'}_{cfg['scheme']}"
    for p in res.write(out, stem, echo=cfg):
        _log(f"wrote {p}")
    return 0


def _kappa_transmon(cfg):
    return None if cfg["kappa"] is None else float(cfg["kappa"]) * KHZ


def _single_params(cfg) -> TransmonParams:
    p = TransmonParams()
    return p if cfg["kappa"] is None else replace(p, kappa=_kappa_transmon(cfg))


def _two_params(cfg) -> TwoQubitParams:
    p = TwoQubitParams()
    return p if cfg["beta1"] is None else replace(p, beta1=float(cfg["beta1"]))


def cmd_transmon(cfg) -> int:
    gate = (cfg["gate"] or cfg["name"] or "X").upper()
    if gate == "CZ":
        p = _two_params(cfg)
        with Heartbeat("cz") as hb:
            rep = cz_fidelity(p, kappa=_kappa_transmon(cfg), model=cfg["model"], samples=cfg["samples"],
                              progress=hb)
        doc = {"gate": "CZ", "report": rep.to_dict(), "params": p.to_dict(), "config": cfg}
    else:
        if gate not in DEFAULT_OMEGA0:
            raise CliError("transmon gates are X, Z and CZ")
        omega0 = MHZ * cfg["omega0"] if cfg["omega0"] is not None else DEFAULT_OMEGA0[gate]
        drag = DEFAULT_DRAG[gate] if cfg["drag"] else DragParams()
        params = _single_params(cfg)
        rep = single_qubit_fidelity(gate, omega0, drag=drag, params=params, model=cfg["model"],
                                    samples=cfg["samples"])
        dec, leak = infidelity_decomposition(gate, omega0, drag, params, samples=cfg["samples"])
        doc = {"gate": gate, "report": rep.to_dict(),
               "infidelity_decomposition": {"decoherence": dec, "leakage": leak}, "config": cfg}
    _emit(doc, cfg, f"transmon_{gate}")
    return 0


def cmd_reproduce(cfg) -> int:
    bundle = cfg["bundle"]
    out = _out_dir(cfg, f"bundle_{bundle}")
    jobs = cfg["jobs"]
    written = []
    with Heartbeat(f"reproduce {bundle}") as hb:
        if bundle == "2a":
            written += ex.run_gate_time_curve(cfg["omega"]).write(out, "gate_time", echo=cfg)
        elif bundle == "2b":
            kmax = cfg["kappa"] if cfg["kappa"] is not None else 1e-2
            res = ex.run_decoherence_curve(("H", "S", "T"), (0.0, kmax, cfg["grid"] or 21), ("asr", "sr6"),
                                           omega=cfg["omega"], step=cfg["step"], jobs=jobs, progress=hb)
            written += res.write(out, "decoherence", echo=cfg)
        elif bundle == "3":
            n = cfg["grid"] or 41
            for g in ("H", "S", "T"):
                for s in ("asr", "sr6"):
                    hb.label = f"reproduce 3 {g}/{s}"
                    res = ex.run_robustness_grid(g, s, (-0.2, 0.2, n), (-0.2, 0.2, n), omega=cfg["omega"],
                                                 step=cfg["step"], jobs=jobs, progress=hb)
                    written += res.write(out, f"robustness_{g}_{s}", echo=cfg)
        elif bundle == "5":
            params = _single_params(cfg)
            summary = {}
            for g in ("X", "Z"):
                hb.label = f"reproduce 5 {g}"
                res = ex.run_trajectory(g, cfg["model"], params=params, samples=cfg["samples"])
                written += res.write(out, f"trajectory_{g}", echo=cfg)
                rep = single_qubit_fidelity(g, DEFAULT_OMEGA0[g], drag=DEFAULT_DRAG[g], params=params,
                                            samples=cfg["samples"])
                dec, leak = infidelity_decomposition(g, params=params, samples=cfg["samples"])
                summary[g] = {"fidelity": rep.fidelity, "decoherence": dec, "leakage": leak}
            p = out / "fidelities.json"
            p.write_text(json.dumps({"gates": summary, "config": cfg}, indent=2, sort_keys=True) + "\n")
            written.append(p)
        elif bundle == "6":
            res = ex.run_beta1_scan((1.5, 3.0, cfg["grid"] or 16), kappa=_kappa_transmon(cfg),
                                    samples=cfg["samples"], model=cfg["model"], jobs=jobs, progress=hb)
            written += res.write(out, "beta1_scan", echo=cfg)
            hb.label = "reproduce 6 trajectory"
            p = _two_params(cfg)
            written += ex.run_trajectory("CZ", cfg["model"], params=p, kappa=_kappa_transmon(cfg),
                                         samples=cfg["samples"]).write(out, "trajectory_CZ", echo=cfg)
        elif bundle == "7":
            params = _single_params(cfg)
            for g in ("X", "Z"):
                hb.label = f"reproduce 7 {g}"
                res = ex.run_omega0_scan(g, (30.0, 60.0, cfg["grid"] or 31), params=params,
                                         samples=cfg["samples"], jobs=jobs, progress=hb)
                written += res.write(out, f"omega0_{g}", echo=cfg)
    for p in written:
        _log(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# parser

def _common(p, gate=True):
    p.add_argument("--config", help="JSON file of settings (overridden by flags)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, help="worker processes (default: $HOLONOMY_SIM_JOBS or CPU count)")
    p.add_argument("--step", type=float, help="integration step (default: 2pi/(200 omega) for Lambda runs)")
    p.add_argument("--omega", type=float, help="Lambda-system drive amplitude (default 1)")
    p.add_argument("--kappa", type=float,
                   help="decoherence: kappa/omega (Lambda scans, upper end) or kHz (transmon runs)")
    p.add_argument("--grid", type=int, help="points per scan axis")
    if gate:
        p.add_argument("--theta", type=float, help="rotation axis polar angle in [0, pi]")
        p.add_argument("--phi", type=float, help="rotation axis azimuth")
        p.add_argument("--gamma", type=float, help="rotation angle in [0, pi]")
        p.add_argument("--name", help=f"named gate ({', '.join(NAMED_GATES)}; X, Z, CZ for transmon runs)")
        p.add_argument("--scheme", choices=("asr", "sr6"), help="three-segment (asr) or six-segment (sr6)")
        p.add_argument("--zeta0", type=float, help="initial frame phase")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="holonomy-sim", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gate", help="build a schedule and report its closed-system fidelity")
    _common(p)
    p = sub.add_parser("verify", help="cyclic, super-robust and error-order checks")
    _common(p)
    p.add_argument("--truncate", type=int, help="keep only the first N segments (control schedule)")
    p = sub.add_parser("scan", help="run one scan and write CSV + JSON")
    _common(p)
    p.add_argument("--kind", required=True, choices=SCAN_KINDS)
    p.add_argument("--samples", type=int, help="transmon steps per fastest period (default 40)")
    p.add_argument("--model", choices=("full", "target", "effective"), help="transmon Hamiltonian")
    p = sub.add_parser("reproduce", help="write one data bundle (2a, 2b, 3, 5, 6, 7)")
    p.add_argument("bundle", choices=BUNDLES)
    _common(p)
    p.add_argument("--samples", type=int, help="transmon steps per fastest period (default 40)")
    p.add_argument("--model", choices=("full", "target", "effective"), help="transmon Hamiltonian")
    p.add_argument("--beta1", type=float, help="CZ modulation index beta_1 (default 2.3)")
    p = sub.add_parser("transmon", help="transmon X/Z or CZ fidelity")
    _common(p)
    p.add_argument("--gate", choices=("X", "Z", "CZ"))
    p.add_argument("--omega0", type=float, help="peak drive amplitude in MHz")
    p.add_argument("--no-drag", dest="drag", action="store_const", const=False, help="disable DRAG")
    p.add_argument("--samples", type=int, help="steps per fastest period (default 40)")
    p.add_argument("--model", choices=("full", "target", "effective"), help="Hamiltonian model")
    p.add_argument("--beta1", type=float, help="CZ modulation index beta_1 (default 2.3)")
    return ap


COMMANDS = {"gate": cmd_gate, "verify": cmd_verify, "scan": cmd_scan, "reproduce": cmd_reproduce,
            "transmon": cmd_transmon}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
        if args.command == "reproduce":
            cfg["bundle"] = args.bundle
        return COMMANDS[args.command](cfg)
    except (CliError, ValueError) as e:
        print(f"holonomy-sim: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
