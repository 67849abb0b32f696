"""Command-line front end.

Exit status: 0 when every verdict passes, 2 when a verdict fails (or a study
is inconclusive), 1 on any execution or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import traceback
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from .config import ConfigError, defaults, parse_config, serialize
from .dynamics import SolverConfig, evolve, l2_drift, profile, write_trajectory
from .spectral_core import RealGrid

THREADS_ENV = "SHALLOW_ILW_THREADS"
SCHEMA_VERSION = "shallow_ilw.report/1"
COMMANDS = ("resonance-sweep", "evolve", "converge", "equicont", "instability", "fd-check", "selftest")


def fmt(v) -> str:
    """Numbers go to disk with 17 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.16e}"
    return str(v)


class Writer:
    """Single funnel for every output file; keeps the inventory for the manifest."""

    def __init__(self, out: Path):
        self.out = out
        out.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def json(self, name, obj):
        (self.out / name).write_text(json.dumps(obj, indent=2, sort_keys=True))
        self.files.append(name)

    def csv(self, name, header, rows):
        with open(self.out / name, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow([fmt(v) for v in r])
        self.files.append(name)

    def series(self, name, x, y):
        self.csv(f"series_{name}.csv", ("x", "y"), zip(x, y))

    def add(self, names):
        self.files.extend(names)

    def digests(self) -> dict:
        return {n: hashlib.sha256((self.out / n).read_bytes()).hexdigest() for n in sorted(set(self.files))}


def _grid(sec):
    return RealGrid(sec["box_length"], sec["mode_count"])


def _emit_report(w: Writer, rep: ex.ExperimentReport):
    d = rep.to_dict()
    d.pop("elapsed", None)
    d["schema"] = SCHEMA_VERSION
    w.json("report.json", d)
    if rep.measurements:
        keys = [k for k in rep.measurements[0] if not isinstance(rep.measurements[0][k], (dict, list, tuple))]
        w.csv("measurements.csv", keys, ([m[k] for k in keys] for m in rep.measurements))


def cmd_resonance(cfg, w):
    r = cfg["resonance"]
    rep = ex.run_resonance_sweep(r["samples"], cfg["run"]["seed"], tuple(r["delta_grid"]),
                                 r["identity_samples"], r["b_ratio_samples"], r["jacobian_samples"])
    _emit_report(w, rep)
    return rep


def cmd_evolve(cfg, w):
    e = cfg["evolve"]
    g = _grid(e)
    phi = profile(g, e["profile"], e["amplitude"], e["width"])
    sc = SolverConfig(g, e["delta"], e["dt"], e["horizon"], e["dealias_fraction"], e["record_every"], s=e["s"])
    rec = evolve(e["kind"], phi, sc)
    w.add(write_trajectory(rec, w.out).values())
    rep = ex.ExperimentReport("evolve", dict(e))
    drift = l2_drift(rec)
    rep.measurements = [{"t": t, "l2": a, "hs": b} for t, a, b in
                        zip(rec.times, rec.diagnostics["l2"], rec.diagnostics["hs"])]
    rep.check("L2 drift", drift < 1e-8, drift, "relative < 1e-8")
    w.series("l2", rec.times, rec.diagnostics["l2"])
    _emit_report(w, rep)
    return rep


def cmd_converge(cfg, w):
    c = cfg["converge"]
    spec = ex.ConvergenceStudySpec(_grid(c), c["profile"], c["amplitude"], c["width"], None, c["s"],
                                   c["horizon"], c["dt"], c["record_every"], tuple(c["delta_grid"]))
    rep = ex.run_convergence(spec, c["slack"], c["final_ratio"], threads=cfg["run"]["threads"])
    _emit_report(w, rep)
    pts = [(m["delta"], m["E"]) for m in rep.measurements if m["E"] is not None]
    w.series("E_vs_delta", [p[0] for p in pts], [p[1] for p in pts])
    return rep


def cmd_equicont(cfg, w):
    c = cfg["equicont"]
    spec = ex.EquicontinuitySpec(_grid(c), c["profile"], c["amplitude"], c["width"], None, c["s"],
                                 c["horizon"], c["dt"], c["record_every"], tuple(c["delta_grid"]),
                                 tuple(c["N_grid"]), c["threshold"], c["max_ratio"])
    rep = ex.run_equicontinuity(spec, threads=cfg["run"]["threads"])
    _emit_report(w, rep)
    w.series("sup_tau_vs_N", [m["N"] for m in rep.measurements], [m["sup_tau"] for m in rep.measurements])
    return rep


def cmd_instability(cfg, w):
    c = cfg["instability"]
    spec = ex.InstabilityWitnessSpec(c["s"], c["delta"], c["t"], c["theta"], tuple(c["N_grid"]),
                                     c["quadrature_points"])
    rep = ex.run_instability(spec)
    _emit_report(w, rep)
    w.series("band_norm_vs_N", [m["N"] for m in rep.measurements], [m["band_norm"] for m in rep.measurements])
    return rep


def cmd_fd(cfg, w):
    c = cfg["fd_check"]
    phi = ex.default_fd_field(c["delta"])
    rep = ex.gateaux_fd_crosscheck(c["delta"], c["t"], phi, tuple(c["epsilons"]), c["dt"])
    _emit_report(w, rep)
    w.series("discrepancy_vs_eps", [m["eps"] for m in rep.measurements],
             [m["discrepancy"] for m in rep.measurements])
    return rep


def cmd_selftest(cfg, w):
    rep = ex.selftest()
    _emit_report(w, rep)
    return rep


HANDLERS = {
    "resonance-sweep": cmd_resonance,
    "evolve": cmd_evolve,
    "converge": cmd_converge,
    "equicont": cmd_equicont,
    "instability": cmd_instability,
    "fd-check": cmd_fd,
    "selftest": cmd_selftest,
}


def dispatch(command: str, config: dict, out: Path) -> int:
    if command not in HANDLERS:
        raise ConfigError(f"unknown subcommand {command!r}")
    w = Writer(Path(out))
    start = datetime.now(timezone.utc).isoformat()
    rep = HANDLERS[command](config, w)
    for v in rep.verdicts:
        print(v.line())
    if rep.status != "ok":
        print(f"status: {rep.status}")
    manifest = {
        "command": command,
        "config": config,
        "seed": config["run"]["seed"],
        "threads": config["run"]["threads"],
        "version": __version__,
        "start": start,
        "end": datetime.now(timezone.utc).isoformat(),
        "outputs": w.digests(),
    }
    (Path(out) / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return 0 if rep.passed else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shallow-ilw", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="YAML configuration file")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--threads", type=int, help=f"worker threads (overridden by ${THREADS_ENV})")
    p.add_argument("--seed", type=int, help="seed for sampled sweeps")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else defaults()
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigError("seed must satisfy 0 ≤ seed < 2^64")
            cfg["run"]["seed"] = args.seed
        if args.threads is not None:
            cfg["run"]["threads"] = args.threads
        env = os.environ.get(THREADS_ENV)
        if env:
            cfg["run"]["threads"] = int(env)
        if cfg["run"]["threads"] < 1:
            raise ConfigError("threads must satisfy threads ≥ 1")
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "config.resolved.yaml").write_text(serialize(cfg))
        return dispatch(args.command, cfg, args.out)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # noqa: BLE001 - the exit code is the contract
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
