"""Command-line front end.

    tsmatpi {kernels,evolve,validate,bench,bath-info} [CONFIG] [--out DIR]

CONFIG is a plain ``key=value`` file (``#`` starts a comment, commas may
separate pairs on one line).  Omitted keys take the defaults listed in
:data:`DEFAULTS`.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import combinatorics
from .bath import BathConfig, EtaTable, compute_eta, discretize_bath
from .dynamics import DensitySeries, evolve_density, initial_density, propagate_reduced
from .influence import SystemParams, system_propagator
from .kernels import MAX_DK, KernelSet, compute_kernels, tree_node_count
from .oracles import (
    MAX_ORACLE_DK,
    MAX_PATH_STEPS,
    deconvolve_kernels,
    explicit_kernel,
    full_path_propagator,
    iquapi_evolve,
)

log = logging.getLogger("tsmatpi")

METHODS = ("tsmatpi", "iquapi", "fullsum")
RHO0_CHOICES = ("up", "down", "mixed")
SUBCOMMANDS = ("kernels", "evolve", "validate", "bench", "bath-info")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams
    bath: BathConfig
    dt: float
    dk: int
    n_steps: int
    rho0: str
    method: str


DEFAULTS: Dict[str, str] = {
    "epsilon": "1",
    "delta": "1",
    "xi": "0.2",
    "omega_c": "2.5",
    "omega_max": "10",
    "n_modes": "400",
    "beta": "5",
    "dt": "0.1",
    "dk": "10",
    "n_steps": "100",
    "rho0": "up",
    "method": "tsmatpi",
}

_FLOAT_KEYS = ("epsilon", "delta", "xi", "omega_c", "omega_max", "beta", "dt")
_INT_KEYS = ("n_modes", "dk", "n_steps")


def _parse_pairs(text: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for item in line.split(","):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise ConfigError(f"line {lineno}: expected key=value, got {item!r}")
            key, value = (part.strip() for part in item.split("=", 1))
            if key not in DEFAULTS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            if not value:
                raise ConfigError(f"line {lineno}: missing value for {key!r}")
            values[key] = value
    return values


def parse_config(text: str) -> RunConfig:
    """Parse ``key=value`` text into a validated :class:`RunConfig`."""
    raw = dict(DEFAULTS)
    raw.update(_parse_pairs(text))
    num: Dict[str, float] = {}
    for key in _FLOAT_KEYS:
        try:
            num[key] = float(raw[key])
        except ValueError:
            raise ConfigError(f"{key}: malformed number {raw[key]!r}") from None
        if not np.isfinite(num[key]):
            raise ConfigError(f"{key}: value must be finite")
    for key in _INT_KEYS:
        try:
            num[key] = int(raw[key])
        except ValueError:
            raise ConfigError(f"{key}: malformed integer {raw[key]!r}") from None

    if num["dt"] <= 0:
        raise ConfigError(f"dt: must be > 0, got {num['dt']}")
    if num["n_steps"] < 1:
        raise ConfigError(f"n_steps: must be >= 1, got {num['n_steps']}")
    method = raw["method"]
    if method not in METHODS:
        raise ConfigError(f"method: expected one of {METHODS}, got {method!r}")
    if raw["rho0"] not in RHO0_CHOICES:
        raise ConfigError(f"rho0: expected one of {RHO0_CHOICES}, got {raw['rho0']!r}")
    cap = MAX_DK if method == "tsmatpi" else MAX_ORACLE_DK
    if not 1 <= num["dk"] <= cap:
        raise ConfigError(f"dk: must be in [1, {cap}] for method={method}, got {num['dk']}")
    if method == "fullsum" and num["n_steps"] > MAX_PATH_STEPS:
        raise ConfigError(f"n_steps: fullsum supports at most {MAX_PATH_STEPS} steps")
    try:
        bath = BathConfig(num["xi"], num["omega_c"], num["omega_max"], num["n_modes"], num["beta"])
        system = SystemParams(num["epsilon"], num["delta"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(system, bath, num["dt"], num["dk"], num["n_steps"], raw["rho0"], method)


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    log.info("wrote %s", path)


def _setup(cfg: RunConfig, max_lag: Optional[int] = None) -> Tuple[EtaTable, np.ndarray]:
    modes = discretize_bath(cfg.bath)
    eta = compute_eta(modes, cfg.bath.beta, cfg.dt, max_lag or cfg.dk + 1)
    return eta, system_propagator(cfg.system, cfg.dt)


# -- subcommands ---------------------------------------------------------------

def _cmd_kernels(cfg: RunConfig, out: Path, threads: int, **_) -> int:
    eta, k_mat = _setup(cfg)
    ks = compute_kernels(eta, k_mat, cfg.dk, threads=threads)
    rows = []
    for family, arr in (("col0", ks.m_col0), ("col1", ks.m_col1)):
        for k in range(1, cfg.dk + 1):
            for r in range(4):
                for c in range(4):
                    z = arr[k - 1, r, c]
                    rows.append([family, k, r, c, _fmt(z.real), _fmt(z.imag)])
    _write_csv(out / "kernels.csv", ["family", "k", "row", "col", "re", "im"], rows)
    return 0


def _evolve_series(cfg: RunConfig, threads: int = 1) -> DensitySeries:
    rho0 = initial_density(cfg.rho0)
    if cfg.method == "iquapi":
        eta, k_mat = _setup(cfg)
        return iquapi_evolve(eta, k_mat, cfg.dk, rho0, cfg.n_steps)
    if cfg.method == "fullsum":
        eta, k_mat = _setup(cfg, max_lag=max(cfg.n_steps, cfg.dk + 1))
        u = [full_path_propagator(eta, k_mat, r) for r in range(1, cfg.n_steps + 1)]
        return evolve_density(u, rho0, cfg.dt)
    eta, k_mat = _setup(cfg)
    ks = compute_kernels(eta, k_mat, cfg.dk, threads=threads)
    return evolve_density(propagate_reduced(ks, cfg.n_steps), rho0, cfg.dt)


def _cmd_evolve(cfg: RunConfig, out: Path, threads: int, **_) -> int:
    series = _evolve_series(cfg, threads)
    header = ["step", "t"]
    for name in ("pp", "pm", "mp", "mm"):
        header += [f"re_rho_{name}", f"im_rho_{name}"]
    header.append("sigma_z")
    rows = []
    for step, (t, rho, sz) in enumerate(zip(series.times, series.rho, series.sigma_z)):
        row = [step, _fmt(t)]
        for z in (rho[0, 0], rho[0, 1], rho[1, 0], rho[1, 1]):
            row += [_fmt(z.real), _fmt(z.imag)]
        row.append(_fmt(sz))
        rows.append(row)
    _write_csv(out / "density.csv", header, rows)
    return 0


def _cmd_bath_info(cfg: RunConfig, out: Path, **_) -> int:
    modes = discretize_bath(cfg.bath)
    eta = compute_eta(modes, cfg.bath.beta, cfg.dt, cfg.dk + 1)
    _write_csv(out / "modes.csv", ["j", "omega", "c"],
               [[j, _fmt(m.omega), _fmt(m.c)] for j, m in enumerate(modes, 1)])
    rows = []
    for d in range(eta.max_lag + 1):
        zi, zn = eta.eta_initial[d], eta.eta_interior[d]
        rows.append([d, _fmt(zi.real), _fmt(zi.imag), _fmt(zn.real), _fmt(zn.imag)])
    _write_csv(out / "eta.csv", ["d", "re_eta_init", "im_eta_init", "re_eta_int", "im_eta_int"], rows)
    return 0


def validation_checks(cfg: RunConfig) -> List[Tuple[str, float, float]]:
    """Oracle comparisons as ``(name, max abs error, tolerance)`` triples."""
    if cfg.dk > MAX_ORACLE_DK:
        raise ConfigError(f"dk: validate needs dk <= {MAX_ORACLE_DK}, got {cfg.dk}")
    eta, k_mat = _setup(cfg)
    dk = cfg.dk
    fast = compute_kernels(eta, k_mat, dk)
    slow = deconvolve_kernels(eta, k_mat, dk)
    checks = [
        ("kernels col0 vs deconvolution", np.abs(fast.m_col0 - slow.m_col0).max(), 1e-12),
        ("kernels col1 vs deconvolution", np.abs(fast.m_col1 - slow.m_col1).max(), 1e-12),
    ]
    for k in (2, 3):
        if k <= dk:
            err = np.abs(explicit_kernel(eta, k_mat, k) - fast.col0(k)).max()
            checks.append((f"M({k},0) vs explicit formula", err, 1e-13))
    u = propagate_reduced(fast, dk)
    err = max(np.abs(u[r - 1] - full_path_propagator(eta, k_mat, r)).max() for r in range(1, dk + 1))
    checks.append(("propagators vs full path sum (N <= dk)", err, 1e-12))
    rho0 = initial_density(cfg.rho0)
    n_exact = dk + 1
    ours = evolve_density(propagate_reduced(fast, n_exact), rho0, cfg.dt)
    ref = iquapi_evolve(eta, k_mat, dk, rho0, n_exact)
    checks.append(("sigma_z vs i-QuAPI (N <= dk + 1)",
                   np.abs(ours.sigma_z - ref.sigma_z).max(), 1e-12))
    checks.append(("trace drift", ours.trace_drift(), 1e-12))
    checks.append(("hermiticity residual", ours.hermiticity_residual(), 1e-12))
    return checks


def _cmd_validate(cfg: RunConfig, out: Path, **_) -> int:
    checks = validation_checks(cfg)
    failed = 0
    for name, err, tol in checks:
        ok = err <= tol
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: max abs err {err:.3e} (tol {tol:.0e})")
    # long-horizon comparison is reported, not gated: the two truncations differ
    eta, k_mat = _setup(cfg)
    rho0 = initial_density(cfg.rho0)
    ours = evolve_density(propagate_reduced(compute_kernels(eta, k_mat, cfg.dk), cfg.n_steps),
                          rho0, cfg.dt)
    ref = iquapi_evolve(eta, k_mat, cfg.dk, rho0, cfg.n_steps)
    print(f"INFO  sigma_z vs i-QuAPI over {cfg.n_steps} steps: "
          f"max abs diff {np.abs(ours.sigma_z - ref.sigma_z).max():.3e}")
    return 1 if failed else 0


def bench_rows(eta: EtaTable, k_mat: np.ndarray, dks: Sequence[int], repeats: int = 1,
               threads: int = 1) -> List[Tuple[int, int, int, int]]:
    """Time :func:`compute_kernels` for each ``dk``: ``(dk, wall_ns, nodes, model)``."""
    compute_kernels(eta, k_mat, 2)  # JIT warm-up
    rows = []
    for dk in dks:
        best = None
        for _ in range(repeats):
            t0 = time.perf_counter_ns()
            ks = compute_kernels(eta, k_mat, dk, threads=threads)
            elapsed = time.perf_counter_ns() - t0
            best = elapsed if best is None else min(best, elapsed)
        nodes = sum(ks.stats.node_visits.values())
        rows.append((dk, best, nodes, combinatorics.tsmatpi_cost_model(dk)))
        log.info("dk=%d wall=%.3fs nodes=%d", dk, best * 1e-9, nodes)
    return rows


def _cmd_bench(cfg: RunConfig, out: Path, threads: int, dk_min: int, dk_max: int,
               repeats: int, **_) -> int:
    if not 1 <= dk_min <= dk_max <= MAX_DK:
        raise ConfigError(f"bench range must satisfy 1 <= dk_min <= dk_max <= {MAX_DK}")
    eta, k_mat = _setup(cfg, max_lag=dk_max + 1)
    rows = bench_rows(eta, k_mat, range(dk_min, dk_max + 1), repeats, threads)
    _write_csv(out / "bench.csv", ["dk", "wall_ns", "node_count", "model_cost"], rows)
    print(f"{'dk':>3} {'wall_s':>10} {'node_count':>12} {'model_cost':>14}")
    for dk, ns, nodes, model in rows:
        print(f"{dk:>3} {ns * 1e-9:>10.4f} {nodes:>12} {model:>14}")
    return 0


_COMMANDS: Dict[str, Callable[..., int]] = {
    "kernels": _cmd_kernels,
    "evolve": _cmd_evolve,
    "validate": _cmd_validate,
    "bench": _cmd_bench,
    "bath-info": _cmd_bath_info,
}


def run(cfg: RunConfig, subcommand: str, out: Path, threads: int = 1, dk_min: int = 6,
        dk_max: int = 12, repeats: int = 1) -> int:
    if subcommand not in _COMMANDS:
        raise ValueError(f"unknown subcommand {subcommand!r}")
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    return _COMMANDS[subcommand](cfg, out, threads=threads, dk_min=dk_min, dk_max=dk_max,
                                 repeats=repeats)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsmatpi", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("config", nargs="?", help="key=value config file (defaults if omitted)")
    parser.add_argument("--out", default=".", help="output directory (default: cwd)")
    parser.add_argument("--threads", type=int, default=1,
                        help="threads for the kernel traversal; results are identical")
    parser.add_argument("--dk-min", type=int, default=6, help="bench: smallest dk")
    parser.add_argument("--dk-max", type=int, default=12, help="bench: largest dk")
    parser.add_argument("--repeats", type=int, default=1, help="bench: timing repeats (min kept)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        cfg = parse_config(text)
        return run(cfg, args.subcommand, Path(args.out), threads=args.threads,
                   dk_min=args.dk_min, dk_max=args.dk_max, repeats=args.repeats)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
