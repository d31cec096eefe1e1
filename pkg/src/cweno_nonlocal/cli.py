"""Command line front-end: ``run``, ``converge`` and ``audit``.

Settings come from built-in defaults, then an optional ``--config`` file of
``key=value`` lines (keys as the long flag names), then the flags themselves.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import harness as hs
from .timestep import METHODS

DEFAULTS = {"model": "traffic", "kernel": None, "eta": None, "scheme": 3, "integrator": None, "h": None,
            "n": None, "T": None, "limiter": "off", "safety": 0.9, "bounds": "auto", "ref": "auto",
            "out": ".", "case": None, "nmin": 0, "nref": 5}
CONVERT = {"kernel": int, "eta": float, "scheme": int, "n": int, "nmin": int, "nref": int, "safety": float,
           "T": float, "h": lambda s: float(Fraction(s))}


def read_config(path) -> dict:
    out = {}
    for k, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().lstrip("-")
        if not sep or key not in DEFAULTS:
            raise ValueError(f"{path}:{k}: expected key=value with a known key, got {line!r}")
        val = val.strip()
        out[key] = val.replace(",", " ").split() if key == "bounds" else val
    return out


def parse_bounds(v):
    if v in ("auto", ["auto"]):
        return "auto"
    if isinstance(v, str):
        v = v.split()
    if len(v) != 2:
        raise ValueError("bounds must be 'auto' or two numbers")
    return float(v[0]), float(v[1])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file; flags override it")
    common.add_argument("--model", choices=("traffic", "sedimentation"))
    common.add_argument("--case", choices=tuple(hs.CASES),
                        help="initial data and step rule (default: smooth for traffic)")
    common.add_argument("--kernel", type=int, choices=hs.KERNELS)
    common.add_argument("--eta", type=float)
    common.add_argument("--scheme", type=int, choices=hs.SCHEMES)
    common.add_argument("--integrator", choices=tuple(m for m in METHODS if m != "ssprk54"))
    mesh = common.add_mutually_exclusive_group()
    mesh.add_argument("--h", type=lambda s: float(Fraction(s)), help="mesh size, e.g. 0.025 or 1/40")
    mesh.add_argument("--n", type=int, help="level: h = 1/20 * 2^-n (finest level for converge)")
    common.add_argument("--T", type=float, help="final time")
    common.add_argument("--limiter", choices=("on", "off"))
    common.add_argument("--safety", type=float, help="CFL safety factor")
    common.add_argument("--bounds", nargs="+", metavar="B", help="'auto' or LO HI")
    common.add_argument("--ref", help="reference averages (.npy or .dat) or 'auto'")
    common.add_argument("--out", help="output directory")

    ap = argparse.ArgumentParser(prog="cweno-nonlocal", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="single run, writes solution_<n>.dat and audit.txt")
    conv = sub.add_parser("converge", parents=[common], help="error table against a reference run")
    conv.add_argument("--nmin", type=int, help="coarsest level (default 0)")
    conv.add_argument("--nref", type=int, help="reference level when --ref auto (default 5)")
    sub.add_parser("audit", parents=[common], help="bound audit of a single run, writes audit.txt")
    return ap


def settings(args) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    for key, conv in CONVERT.items():
        if isinstance(merged[key], str):
            merged[key] = conv(merged[key])
    merged["bounds"] = parse_bounds(merged["bounds"])
    if merged["case"] is None:
        merged["case"] = hs.DEFAULT_CASE[merged["model"]]
    elif hs.CASES[merged["case"]].model != merged["model"]:
        if args.model is not None:
            raise ValueError(f"case {merged['case']} uses the {hs.CASES[merged['case']].model} model")
        merged["model"] = hs.CASES[merged["case"]].model
    if merged["limiter"] not in ("on", "off"):
        raise ValueError("limiter must be on or off")
    return merged


def make_config(s: dict, n=None) -> hs.RunConfig:
    if n is None:
        n = s["n"] if s["n"] is not None or s["h"] is not None else 0
    return hs.RunConfig(case=s["case"], kernel=s["kernel"], eta=s["eta"], scheme=s["scheme"],
                        integrator=s["integrator"], n=n, h=s["h"] if n is None else None, T=s["T"],
                        limiter=s["limiter"] == "on", safety=s["safety"], bounds=s["bounds"],
                        ref=s["ref"], out=s["out"])


def write_atomic(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def solution_text(grid, averages) -> str:
    return "".join(f"{x:.17g} {r:.17g}\n" for x, r in zip(grid.centers, averages))


def label(cfg: hs.RunConfig) -> str:
    if cfg.n is not None:
        return str(cfg.n)
    n = math.log2(1.0 / (20.0 * cfg.mesh))
    return str(round(n)) if abs(n - round(n)) < 1e-9 else f"h{cfg.mesh:.6g}"


def load_reference(path) -> np.ndarray:
    path = Path(path)
    if path.suffix == ".npy":
        return np.load(path)
    data = np.loadtxt(path, ndmin=2)
    return data[:, -1]


def _single(s, out: Path, write_solution: bool):
    cfg = make_config(s)
    res = hs.run_experiment(cfg)
    audit = hs.maxprinciple_audit(res.trace, res.bounds)
    if write_solution:
        write_atomic(out / f"solution_{label(cfg)}.dat", solution_text(res.grid, res.averages))
    write_atomic(out / "audit.txt", audit.text())
    print(f"{cfg.case}: CWENO{cfg.scheme} {cfg.method} h={cfg.mesh:g} steps={res.steps} "
          f"min={audit.global_min:.6g} max={audit.global_max:.6g} {'ok' if audit.ok else 'VIOLATION'}")
    return res, audit


def cmd_run(s, out: Path) -> int:
    _single(s, out, True)
    return 0


def cmd_audit(s, out: Path) -> int:
    _single(s, out, False)
    return 0


def cmd_converge(s, out: Path) -> int:
    if s["h"] is not None:
        raise ValueError("converge works on levels; use --n for the finest level")
    n_max = 3 if s["n"] is None else s["n"]
    ns = range(s["nmin"], n_max + 1)
    base = make_config(s, n=s["nmin"])
    if s["ref"] == "auto":
        if s["nref"] <= n_max:
            raise ValueError("reference level must be finer than the finest level")
        ref_res = hs.run_experiment(hs.reference_config(base, s["nref"]))
        ref = ref_res.averages
        write_atomic(out / f"reference_{s['nref']}.dat", solution_text(ref_res.grid, ref))
    else:
        ref = load_reference(s["ref"])
    rows = []
    for n in ns:
        cfg = replace(base, n=n)
        res = hs.run_experiment(cfg)
        rep = res.report
        rep.L1, rep.Linf = hs.error_norms(res.averages, ref, res.grid.h)
        if rows:
            rep.L1_rate = hs._rate(rows[-1].L1, rep.L1)
            rep.Linf_rate = hs._rate(rows[-1].Linf, rep.Linf)
        rows.append(rep)
        write_atomic(out / f"solution_{n}.dat", solution_text(res.grid, res.averages))
    table = hs.table_csv(rows)
    write_atomic(out / "table.csv", table)
    sys.stdout.write(table)
    return 0


COMMANDS = {"run": cmd_run, "converge": cmd_converge, "audit": cmd_audit}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        s = settings(args)
        return COMMANDS[args.command](s, Path(s["out"]))
    except (ValueError, OSError) as exc:
        ap.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
