"""Command-line front end: ``orlicz-lab <command> [--config FILE] [--seed S] [--trials T] [--out DIR]``.

Every run writes ``reports.jsonl`` and ``summary.csv`` (deterministic for a
given config and seed) plus ``manifest.json`` (hashes, versions, counts and a
timestamp) into the output directory.  The exit code is 0 iff no hard
assertion failed; hypothesis failures are only counted.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import platform
import sys
import warnings
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import config as cfg
from .errors import InvalidInputError, PreconditionError
from .group import GroupDims, Signal, SiteSet, dft, make_signal, read_csv, read_sites, write_csv
from .inequalities import CONSTANT_FREE, REGISTRY, iter_reports, summarize
from .norms import (DUAL_SUP_CAP, MeasureSpec, luxemburg_norm, modular, orlicz_norm_amemiya,
                    orlicz_norm_dual_sup)
from .recovery import RecoveryProblem, basis_pursuit, phase_experiment
from .restriction import (estimate_lambda_constant, estimate_restriction_constant, generic_size,
                          sample_generic_set)
from .uncertainty import THEOREMS, UPInstance, comb_signal, run_up_trial
from .young import parse_young

COMMANDS = ("verify", "norms", "restriction-estimate", "lambda-estimate", "genset", "up",
            "recover", "phase")


def _clean(obj):
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


class Sink:
    """Collects report rows and summary rows; written once at the end."""

    def __init__(self):
        self.reports: list[dict] = []
        self.summary: list[dict] = []
        self.hard_failures = 0
        self.hypothesis_count = 0

    def report(self, row: dict):
        self.reports.append(_clean(row))

    def add_summary(self, row: dict):
        self.summary.append(_clean(row))

    def write(self, out: Path, manifest: dict):
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "reports.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for row in self.reports:
                fh.write(json.dumps(row, sort_keys=True, allow_nan=False) + "\n")
        if self.summary:
            fields = sorted({k for row in self.summary for k in row})
            with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
                w.writeheader()
                for row in self.summary:
                    w.writerow({k: _csv_cell(row.get(k)) for k in fields})
        with open(out / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(_clean(manifest), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else v


# ---------------------------------------------------------------------------
# commands


def _dims(c) -> GroupDims:
    return GroupDims(c["group"]["N"], c["group"]["d"])


def _phi_psi(c):
    return parse_young(c["young"]["phi"]), parse_young(c["young"]["psi"])


def _sites_from(c, section, dims) -> SiteSet | None:
    sec = c[section]
    if sec.get("sites_file"):
        return read_sites(sec["sites_file"], dims)
    if sec.get("sites") is not None:
        return SiteSet(dims, tuple(int(s) for s in sec["sites"]))
    return None


def cmd_verify(c, sink: Sink):
    ids = c["verify"]["ids"] or list(CONSTANT_FREE)
    for id in ids:
        if id not in REGISTRY:
            raise InvalidInputError(f"unknown inequality id {id!r}")
        reports = []
        for r in iter_reports(id, c["run"]["trials"], c["run"]["seed"], workers=c["run"].get("workers")):
            sink.report(r.to_dict())
            reports.append(r)
        s = summarize(id, reports)
        sink.add_summary(s.to_dict())
        sink.hard_failures += s.fail_count
        sink.hypothesis_count += s.hypothesis_count


def _named_signal(kind: str, dims: GroupDims, rng) -> Signal:
    if kind == "delta":
        return make_signal("delta", dims)
    if kind == "constant":
        return Signal(dims, np.ones(dims.size))
    if kind == "comb":
        step = next((a for a in range(2, dims.N) if dims.N % a == 0), 1)
        return comb_signal(dims, step)
    if kind in ("gaussian", "spectral"):
        return make_signal(kind, dims, sites=SiteSet.full(dims), rng=rng)
    raise InvalidInputError(f"unknown signal {kind!r}; choose delta, constant, comb, gaussian, spectral")


def cmd_norms(c, sink: Sink):
    dims = _dims(c)
    phi, _ = _phi_psi(c)
    rng = np.random.default_rng(c["run"]["seed"])
    rel = c["tolerances"]["relative"]
    sites = _sites_from(c, "norms", dims)
    trials = 1 if c["norms"].get("input") else c["run"]["trials"]
    for t in range(trials):
        if c["norms"].get("input"):
            f = read_csv(c["norms"]["input"])
        else:
            f = _named_signal(c["norms"]["signal"], dims, rng)
        A = sites or SiteSet.full(f.dims)
        mu = MeasureSpec.counting(A)
        lux = luxemburg_norm(f, phi, mu).value
        amem = orlicz_norm_amemiya(f, phi, mu).value
        row = {"trial": t, "phi": phi.label, "N": f.dims.N, "d": f.dims.d, "A_size": len(A),
               "luxemburg": lux, "amemiya": amem,
               "modular_at_luxemburg": modular(np.abs(f.values[A.array]), phi, 1.0, lux) if lux > 0 else 0.0}
        if len(A) <= DUAL_SUP_CAP:
            row["dual_sup"] = orlicz_norm_dual_sup(f, phi, mu).value
        ok = lux * (1 - rel) <= amem <= 2 * lux * (1 + rel) + 1e-300
        row["sandwich_holds"] = ok
        sink.hard_failures += not ok
        sink.report(row)
        sink.add_summary({k: v for k, v in row.items() if not isinstance(v, dict)})


def cmd_restriction(c, sink: Sink):
    dims = _dims(c)
    phi, psi = _phi_psi(c)
    S = _sites_from(c, "restriction", dims) or _generic(c, dims, phi)
    est = estimate_restriction_constant(S, phi, psi, budget=c["restriction"]["budget"], seed=c["run"]["seed"])
    row = est.to_dict()
    sink.report(row)
    sink.add_summary({k: v for k, v in row.items() if k != "S"} | {"S_size": len(S)})


def cmd_lambda(c, sink: Sink):
    dims = _dims(c)
    phi, _ = _phi_psi(c)
    S = _sites_from(c, "restriction", dims) or _generic(c, dims, phi)
    est = estimate_lambda_constant(S, phi, budget=c["restriction"]["budget"], seed=c["run"]["seed"])
    row = est.to_dict()
    sink.report(row)
    sink.add_summary({k: v for k, v in row.items() if k != "S"} | {"S_size": len(S)})


def _generic(c, dims, phi) -> SiteSet:
    size = c["restriction"].get("size") or generic_size(dims, phi)
    return sample_generic_set(dims, float(size), seed=c["run"]["seed"])


def cmd_genset(c, sink: Sink):
    dims = _dims(c)
    phi, _ = _phi_psi(c)
    S = _generic(c, dims, phi)
    sink.report({"N": dims.N, "d": dims.d, "phi": phi.label, "seed": c["run"]["seed"],
                 "size": len(S), "sites": list(S.members)})
    sink.add_summary({"N": dims.N, "d": dims.d, "size": len(S)})


def cmd_up(c, sink: Sink):
    name = c["up"]["theorem"]
    if name not in THEOREMS:
        raise InvalidInputError(f"unknown theorem {name!r}; choose from {sorted(THEOREMS)}")
    signal = c["up"].get("signal")
    if signal:
        dims = _dims(c)
        phi, psi = _phi_psi(c)
        f = _named_signal(signal, dims, np.random.default_rng(c["run"]["seed"]))
        inst = UPInstance.from_signal(f, phi, psi, constants=c["up"]["constants"],
                                      tol=c["tolerances"]["support"], digest=f"{name}|{signal}")
        reports = [THEOREMS[name].check(inst)]
    else:
        reports = [run_up_trial(name, c["run"]["seed"], t) for t in range(c["run"]["trials"])]
    for r in reports:
        sink.report(r.to_dict())
    s = summarize(name, reports)
    sink.add_summary(s.to_dict())
    sink.hard_failures += s.fail_count
    sink.hypothesis_count += s.hypothesis_count


def cmd_recover(c, sink: Sink, out: Path):
    rc = c["recovery"]
    if not rc.get("input"):
        raise InvalidInputError("recover needs --input (spectrum CSV)")
    spectrum = read_csv(rc["input"])
    S = read_sites(rc["erased"], spectrum.dims) if rc.get("erased") else SiteSet(spectrum.dims, ())
    problem = RecoveryProblem.from_spectrum(spectrum, S)
    res = basis_pursuit(problem, step=rc["step"], max_iter=rc["max_iter"], tol=rc["tol"])
    out.mkdir(parents=True, exist_ok=True)
    write_csv(res.recovered, out / "recovered.csv")
    ok = res.converged and res.residual <= 1e-9 * max(1.0, float(np.max(np.abs(problem.observed))))
    row = res.to_dict() | {"N": spectrum.dims.N, "d": spectrum.dims.d, "erased": len(S), "ok": ok}
    sink.report(row)
    sink.add_summary(row)
    sink.hard_failures += not ok


def cmd_phase(c, sink: Sink):
    rows = phase_experiment(_dims(c), [tuple(cell) for cell in c["phase"]["grid"]],
                            c["run"]["trials"], seed=c["run"]["seed"])
    for row in rows:
        d = row.to_dict()
        sink.report(d)
        sink.add_summary(d)
        sink.hard_failures += d["unsound"]


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orlicz-lab")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--N", type=int)
        p.add_argument("--d", type=int)
        p.add_argument("--phi")
        p.add_argument("--psi")
        return p

    common(sub.add_parser("run", help="run the command named in [run].command"))
    common(sub.add_parser("verify")).add_argument("--id", action="append", dest="ids")
    p = common(sub.add_parser("norms"))
    p.add_argument("--signal")
    p.add_argument("--input")
    for name in ("restriction-estimate", "lambda-estimate", "genset"):
        p = common(sub.add_parser(name))
        p.add_argument("--sites", help="file with one site index per line")
        p.add_argument("--size", type=float)
        p.add_argument("--budget", type=int)
    p = common(sub.add_parser("up"))
    p.add_argument("--theorem", choices=sorted(THEOREMS))
    p.add_argument("--signal")
    p = common(sub.add_parser("recover"))
    p.add_argument("--input")
    p.add_argument("--erased")
    common(sub.add_parser("phase"))
    return parser


def resolve_config(args) -> dict:
    c = cfg.load(args.config) if args.config else cfg.defaults()
    c = cfg.override(c, "run", seed=args.seed, trials=args.trials, out=args.out)
    c = cfg.override(c, "group", N=args.N, d=args.d)
    c = cfg.override(c, "young", phi=args.phi, psi=args.psi)
    g = lambda name: getattr(args, name, None)
    c = cfg.override(c, "verify", ids=g("ids"))
    c = cfg.override(c, "norms", signal=g("signal") if args.command == "norms" else None, input=g("input")
                     if args.command == "norms" else None)
    c = cfg.override(c, "restriction", sites_file=g("sites"), size=g("size"), budget=g("budget"))
    if args.command == "up":
        c = cfg.override(c, "up", theorem=g("theorem"), signal=g("signal"))
    if args.command == "recover":
        c = cfg.override(c, "recovery", input=g("input"), erased=g("erased"))
    return c


def run(c: dict, command: str) -> int:
    out = Path(c["run"]["out"])
    sink = Sink()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if command == "verify":
            cmd_verify(c, sink)
        elif command == "norms":
            cmd_norms(c, sink)
        elif command == "restriction-estimate":
            cmd_restriction(c, sink)
        elif command == "lambda-estimate":
            cmd_lambda(c, sink)
        elif command == "genset":
            cmd_genset(c, sink)
        elif command == "up":
            cmd_up(c, sink)
        elif command == "recover":
            cmd_recover(c, sink, out)
        elif command == "phase":
            cmd_phase(c, sink)
        else:
            raise InvalidInputError(f"unknown command {command!r}")
    manifest = {
        "command": command,
        "config_hash": cfg.config_hash(c),
        "seed": c["run"]["seed"],
        "versions": {"orlicz_lab": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "report_count": len(sink.reports),
        "hard_failures": sink.hard_failures,
        "hypothesis_failures": sink.hypothesis_count,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    sink.write(out, manifest)
    return 0 if sink.hard_failures == 0 else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        c = resolve_config(args)
        command = c["run"].get("command") if args.command == "run" else args.command
        if command is None:
            raise InvalidInputError("[run].command is not set")
        code = run(c, command)
    except (ValueError, OSError) as exc:
        print(f"orlicz-lab: error: {exc}", file=sys.stderr)
        return 2
    out = Path(c["run"]["out"])
    print(f"{command}: wrote {out}; exit {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
