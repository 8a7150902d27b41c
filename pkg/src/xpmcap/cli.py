"""Command-line front end.

Commands: coeffs, sweep, region, simulate, verify. Each command writes
its outputs atomically (write-then-rename) into --out-dir together with a
run manifest listing the effective configuration, input digests, output
digests, wall time and master seed.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import tempfile
import time

from . import __version__
from .bounds import (EffectiveCoefficient, read_sweep_csv, sweep, sweep_csv,
                     sweep_rows)
from .channel import simulate_batch, write_batch_csv
from .coefficients import CoeffTensor, coefficient_tensor
from .config import ToolkitConfig, load_config, dbm_to_watts
from .errors import (ConfigError, NoDominantFaceError, NumericalError,
                     SampleBudgetError, ToolkitError)
from .pulses import PulseShape, TimeFreqGrid
from .regions import build_region, dominant_face_midpoint, excess_area
from .svgout import render_curves, render_regions
from .verify import run_suite

ENV_CONFIG = "XPMCAP_CONFIG"
DEFAULT_MASTER_SEED = 12345

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

_PER_MW = 1e3  # 1/mW -> 1/W
_PER_MW2 = 1e6  # 1/mW^2 -> 1/W^2


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


class RunContext:
    """Collects inputs/outputs of one command and writes its manifest."""

    def __init__(self, command: str, args, config: ToolkitConfig,
                 master_seed: int):
        self.command = command
        self.args = args
        self.config = config
        self.master_seed = master_seed
        self.out_dir = args.out_dir
        self.quiet = args.quiet
        self.t0 = time.monotonic()
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        os.makedirs(self.out_dir, exist_ok=True)
        if config.source_path:
            self.note_input(config.source_path)

    def note_input(self, path: str) -> None:
        self.inputs[path] = _sha256_file(path)

    def out_path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def write(self, name: str, text: str) -> str:
        path = self.out_path(name)
        _atomic_write(path, text)
        self.outputs.append(path)
        self.say(f"wrote {path}")
        return path

    def say(self, message: str) -> None:
        if not self.quiet:
            print(message)

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "argv": sys.argv[1:],
            "version": __version__,
            "master_seed": self.master_seed,
            "config_path": self.config.source_path,
            "config": self.config.echo(),
            "inputs": self.inputs,
            "outputs": {p: _sha256_file(p) for p in self.outputs},
            "wall_time_s": time.monotonic() - self.t0,
        }
        _atomic_write(self.out_path(f"{self.command}-manifest.json"),
                      _json_text(manifest))


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _load_effective_config(args) -> ToolkitConfig:
    path = args.config or os.environ.get(ENV_CONFIG)
    if path:
        return load_config(path)
    return ToolkitConfig()


def _pulse_from_config(cfg: ToolkitConfig) -> PulseShape:
    p = cfg.pulse
    return PulseShape(kind=p.get("kind", "nyquist-sinc"),
                      rolloff=float(p.get("rolloff", 0.1)),
                      width_s=p.get("width_s"))


def _grid_from_config(cfg: ToolkitConfig, link) -> TimeFreqGrid:
    g = cfg.grid
    return TimeFreqGrid.for_link(link,
                                 n_samples=int(g.get("n_samples", 4096)),
                                 n_symbols=int(g.get("n_symbols", 64)))


def _load_tensor(ctx: RunContext, path: str) -> CoeffTensor:
    tensor = CoeffTensor.load(path)
    ctx.note_input(path)
    return tensor


def _resolve_g(args, sweep_cfg: dict, tensor: CoeffTensor | None,
               prefix: str = "g") -> EffectiveCoefficient | None:
    """Inline flags beat config values beat the tensor's center tap."""
    flag_real = getattr(args, f"{prefix}_real", None)
    flag_abs = getattr(args, f"{prefix}_abs_sq", None)
    if flag_real is not None or flag_abs is not None:
        return EffectiveCoefficient(
            g_real=(flag_real or 0.0) * _PER_MW,
            g_abs_sq=(flag_abs or 0.0) * _PER_MW2)
    key_real = "g_real_per_mw" if prefix == "g" else "g_w_real_per_mw"
    key_abs = "g_abs_sq_per_mw2" if prefix == "g" else "g_w_abs_sq_per_mw2"
    if key_real in sweep_cfg or key_abs in sweep_cfg:
        return EffectiveCoefficient(
            g_real=float(sweep_cfg.get(key_real, 0.0)) * _PER_MW,
            g_abs_sq=float(sweep_cfg.get(key_abs, 0.0)) * _PER_MW2)
    if tensor is not None:
        return EffectiveCoefficient.from_complex(tensor.get(0, 0, 0))
    return None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_coeffs(args) -> int:
    cfg = _load_effective_config(args)
    link = cfg.link
    overrides = {}
    if args.memory is not None:
        overrides["memory"] = args.memory
    if args.length_km is not None:
        overrides["length_km"] = args.length_km
    if overrides:
        link = dataclasses.replace(link, **overrides)
    ctx = RunContext("coeffs", args, cfg, _master_seed(args, cfg))
    pulse = _pulse_from_config(cfg)
    grid = _grid_from_config(cfg, link)
    reports = {}
    for user in ("x", "w"):
        tensor, report = coefficient_tensor(
            link, pulse, grid, user=user, z_nodes=args.z_nodes,
            with_report=True)
        ctx.write(f"{args.out_base}_{user}.json",
                  _json_text(tensor.to_json_dict()))
        reports[user] = report
    ctx.write(f"{args.out_base}_convergence.json", _json_text(reports))
    ctx.finish()
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_effective_config(args)
    ctx = RunContext("sweep", args, cfg, _master_seed(args, cfg))
    sweep_cfg = cfg.sweep

    powers = args.powers_dbm or sweep_cfg.get("powers_dbm")
    if not powers:
        raise ConfigError("no powers given: pass --powers-dbm or set "
                          "sweep.powers_dbm in the config")
    powers = [float(p) for p in powers]

    coeffs_x = _load_tensor(ctx, args.coeffs_x) if args.coeffs_x else None
    coeffs_w = _load_tensor(ctx, args.coeffs_w) if args.coeffs_w else None
    g_x = _resolve_g(args, sweep_cfg, coeffs_x, "g")
    g_w = _resolve_g(args, sweep_cfg, coeffs_w, "g_w")
    if g_w is None:
        g_w = g_x
    if g_x is None:
        raise ConfigError("missing coefficients: provide --g-real/--g-abs-sq, "
                          "sweep.g_real_per_mw in the config, or --coeffs-x")

    kappa = args.kappa if args.kappa is not None else \
        sweep_cfg.get("kappa_per_mw2")
    kappa_si = kappa * _PER_MW2 if kappa is not None else None
    symmetric = sweep_cfg.get("symmetric", True) if args.p2_dbm is None else False
    bound_sets = sweep(powers, g_x, g_w, cfg.noise.sigma_sq,
                       symmetric=symmetric,
                       p2_dbm=args.p2_dbm if args.p2_dbm is not None
                       else sweep_cfg.get("p2_dbm"),
                       coeffs_x=coeffs_x, coeffs_w=coeffs_w,
                       kappa_x=kappa_si, kappa_w=kappa_si)

    ctx.write(args.out, sweep_csv(powers, bound_sets))
    if args.json:
        ctx.write(args.json, _json_text(sweep_rows(powers, bound_sets)))
    if args.svg:
        series = [
            ("u1", "green", None, powers, [b.u1 for b in bound_sets]),
            ("u2", "#0a7d6b", None, powers, [b.u2 for b in bound_sets]),
            ("u_sum", "blue", None, powers, [b.u_sum for b in bound_sets]),
            ("awgn", "red", "6,4", powers, [b.awgn1 for b in bound_sets]),
            ("ian1", "purple", None, powers, [b.ian1 for b in bound_sets]),
        ]
        ctx.write(args.svg, render_curves(series, "P1 (dBm)",
                                          "Rate (bits per symbol)"))
    ctx.finish()
    return EXIT_OK


def cmd_region(args) -> int:
    cfg = _load_effective_config(args)
    ctx = RunContext("region", args, cfg, _master_seed(args, cfg))

    awgn = args.awgn
    ian1, ian2 = args.ian1, args.ian2
    if args.from_sweep:
        if args.at_dbm is None:
            raise ConfigError("--from-sweep requires --at-dbm")
        rows = read_sweep_csv(args.from_sweep)
        ctx.note_input(args.from_sweep)
        match = [r for r in rows if abs(r["p_dbm"] - args.at_dbm) <= 1e-9]
        if not match:
            raise ConfigError(
                f"no sweep row at {args.at_dbm} dBm; available: "
                f"{sorted(r['p_dbm'] for r in rows)}")
        row = match[0]
        u1, u2, u_sum = row["u1"], row["u2"], row["u_sum"]
        awgn = row["awgn"] if awgn is None else awgn
        ian1 = row["ian1"] if ian1 is None else ian1
        ian2 = row["ian2"] if ian2 is None else ian2
    else:
        if None in (args.u1, args.u2, args.usum):
            raise ConfigError("provide either --u1/--u2/--usum or "
                              "--from-sweep with --at-dbm")
        u1, u2, u_sum = args.u1, args.u2, args.usum
    if min(u1, u2, u_sum) < 0:
        raise ConfigError("bounds must be >= 0")

    region = build_region(u1, u2, u_sum)
    doc = region.to_json_dict()
    try:
        doc["dominant_face_midpoint"] = list(dominant_face_midpoint(region))
    except NoDominantFaceError:
        doc["dominant_face_midpoint"] = None
    doc["area"] = region.area()
    ctx.write(args.out, _json_text(doc))

    if args.svg:
        layers = []
        annotations = []
        if awgn is not None:
            box = build_region(awgn, awgn, 2 * awgn + 1.0, tag="awgn-box")
            layers.append((box, "red", 0.15, "awgn box"))
            annotations.append(
                f"excess area: awgn box outside bound region = "
                f"{excess_area(box, region):.4g} bits^2")
        layers.append((region, "green", 0.35, "outer bound"))
        if ian1 is not None and ian2 is not None:
            ian_box = build_region(ian1, ian2, ian1 + ian2 + 1.0,
                                   tag="ian-box")
            layers.append((ian_box, "blue", 0.35, "interference as noise"))
            annotations.append(
                f"excess area: bound region outside ian box = "
                f"{excess_area(region, ian_box):.4g} bits^2")
        ctx.write(args.svg, render_regions(layers, annotations))
    ctx.finish()
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_effective_config(args)
    ctx = RunContext("simulate", args, cfg, _master_seed(args, cfg))
    sim = cfg.simulation

    n = args.n if args.n is not None else int(sim.get("n", 4096))
    p1_dbm = args.p1_dbm if args.p1_dbm is not None else sim.get("p1_dbm", 0.0)
    p2_dbm = args.p2_dbm if args.p2_dbm is not None else sim.get("p2_dbm", 0.0)
    model = args.model or sim.get("model", "memoryless")

    coeffs_x = _load_tensor(ctx, args.coeffs_x) if args.coeffs_x else None
    coeffs_w = _load_tensor(ctx, args.coeffs_w) if args.coeffs_w else None
    g_x = g_w = None
    if model == "memoryless":
        if args.g_real is not None or args.g_imag is not None:
            g_x = complex((args.g_real or 0.0) * _PER_MW,
                          (args.g_imag or 0.0) * _PER_MW)
        elif "g_real_per_mw" in sim or "g_imag_per_mw" in sim:
            g_x = complex(float(sim.get("g_real_per_mw", 0.0)) * _PER_MW,
                          float(sim.get("g_imag_per_mw", 0.0)) * _PER_MW)
        elif coeffs_x is not None:
            g_x = coeffs_x.get(0, 0, 0)
        else:
            raise ConfigError("memoryless simulation needs --g-real/--g-imag, "
                              "simulation.g_*_per_mw, or --coeffs-x")
        if coeffs_w is not None:
            g_w = coeffs_w.get(0, 0, 0)
    elif model == "full" and coeffs_x is None:
        raise ConfigError("full-model simulation requires --coeffs-x")

    batch = simulate_batch(
        n=n, p1=dbm_to_watts(float(p1_dbm)), p2=dbm_to_watts(float(p2_dbm)),
        sigma_sq=cfg.noise.sigma_sq, master_seed=ctx.master_seed,
        model=model, g_x=g_x, g_w=g_w, coeffs_x=coeffs_x, coeffs_w=coeffs_w)
    path = ctx.out_path(args.out)
    write_batch_csv(batch, path + ".tmp")
    os.replace(path + ".tmp", path)
    ctx.outputs.append(path)
    ctx.say(f"wrote {path}")
    ctx.finish()
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load_effective_config(args)
    ctx = RunContext("verify", args, cfg, _master_seed(args, cfg))
    reports = run_suite(args.suite, args.samples, ctx.master_seed)
    ctx.write(args.out, _json_text([r.to_dict() for r in reports]))
    failed = [r for r in reports if r.verdict == "fail"]
    for r in reports:
        ctx.say(f"{r.verdict.upper():4s} {r.name}: estimate={r.estimate:.6g} "
                f"bound={r.bound:.6g} stderr={r.stderr:.3g}")
    ctx.finish()
    if failed:
        print(f"{len(failed)} check(s) failed", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _master_seed(args, cfg: ToolkitConfig) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in cfg.simulation:
        return int(cfg.simulation["seed"])
    return DEFAULT_MASTER_SEED


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xpmcap",
        description="Rate bounds, cross-phase perturbation coefficients and "
                    "rate-region geometry for a two-user fiber link.")
    parser.add_argument("--config", help=f"config file (YAML); defaults to "
                                         f"${ENV_CONFIG} when set")
    parser.add_argument("--seed", type=int, help="master seed for stochastic "
                                                 "commands")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress output")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="compute per-user coefficient tensors")
    p.add_argument("--out-base", default="tensor", dest="out_base",
                   help="basename for tensor_{x,w}.json outputs")
    p.add_argument("--memory", type=int, help="override link memory window")
    p.add_argument("--length-km", type=float, dest="length_km",
                   help="override span length")
    p.add_argument("--z-nodes", type=int, default=64, dest="z_nodes",
                   help="Gauss-Legendre nodes per distance panel")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("sweep", help="evaluate bounds along a power sweep")
    p.add_argument("--powers-dbm", type=float, nargs="+", dest="powers_dbm")
    p.add_argument("--g-real", type=float, dest="g_real",
                   help="Re of the center tap, 1/mW")
    p.add_argument("--g-abs-sq", type=float, dest="g_abs_sq",
                   help="|center tap|^2, 1/mW^2")
    p.add_argument("--g-w-real", type=float, dest="g_w_real",
                   help="second receiver Re tap, 1/mW (defaults to --g-real)")
    p.add_argument("--g-w-abs-sq", type=float, dest="g_w_abs_sq",
                   help="second receiver |tap|^2, 1/mW^2")
    p.add_argument("--coeffs-x", dest="coeffs_x", help="tensor JSON, user x")
    p.add_argument("--coeffs-w", dest="coeffs_w", help="tensor JSON, user w")
    p.add_argument("--kappa", type=float,
                   help="cubic interference coefficient, 1/mW^2")
    p.add_argument("--p2-dbm", type=float, dest="p2_dbm",
                   help="fix user-2 power (asymmetric sweep)")
    p.add_argument("--out", default="sweep.csv")
    p.add_argument("--json", help="also write full-precision JSON rows")
    p.add_argument("--svg", help="also write a static curve plot")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("region", help="build a rate-region polygon")
    p.add_argument("--u1", type=float)
    p.add_argument("--u2", type=float)
    p.add_argument("--usum", type=float)
    p.add_argument("--from-sweep", dest="from_sweep",
                   help="take the bound triple from a sweep CSV")
    p.add_argument("--at-dbm", type=float, dest="at_dbm",
                   help="power row to read from the sweep CSV")
    p.add_argument("--awgn", type=float, help="overlay box at this rate")
    p.add_argument("--ian1", type=float, help="overlay interference-as-noise "
                                              "box, user-1 rate")
    p.add_argument("--ian2", type=float, help="overlay box, user-2 rate")
    p.add_argument("--out", default="region.json")
    p.add_argument("--svg", help="also write an overlay figure")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("simulate", help="simulate a block and export CSV")
    p.add_argument("--n", type=int, help="block length")
    p.add_argument("--p1-dbm", type=float, dest="p1_dbm")
    p.add_argument("--p2-dbm", type=float, dest="p2_dbm")
    p.add_argument("--model", choices=("memoryless", "full"))
    p.add_argument("--g-real", type=float, dest="g_real",
                   help="Re of the center tap, 1/mW (memoryless)")
    p.add_argument("--g-imag", type=float, dest="g_imag",
                   help="Im of the center tap, 1/mW (memoryless)")
    p.add_argument("--coeffs-x", dest="coeffs_x", help="tensor JSON, user x")
    p.add_argument("--coeffs-w", dest="coeffs_w", help="tensor JSON, user w")
    p.add_argument("--out", default="batch.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the inequality check suites")
    p.add_argument("--suite", default="all",
                   choices=("all", "conv4", "conv6", "moments", "dettrace"))
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--out", default="verify-report.json")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SampleBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error reading inputs: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
