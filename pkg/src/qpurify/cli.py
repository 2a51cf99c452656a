"""Command-line front end: configuration, orchestration, CSV export.

Subcommands
    baseline   reference curves and their inversions (two CSV files)
    simulate   one ensemble: mean transient + per-run results (two CSVs)
    hist       first-passage or impurity-at-snapshot histogram
    sweep      threshold or delay sweep of the pulse protocol

Configuration comes from an optional flat ``key=value`` file (UTF-8, ``#``
comments) overridden by flags. Every output file is self-describing: the
header echoes the tool version, the full effective configuration and the
master seed, so a row set can always be regenerated. Identical
configuration and seed reproduce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .baseline import (
    impurity_ideal1,
    impurity_no_hamiltonian,
    time_to_impurity_ideal1,
    time_to_impurity_no_hamiltonian,
)
from .controllers import PROTOCOLS, ProtocolSpec
from .ensemble import run_ensemble, speedup_curve, sweep_delay, sweep_zlimit
from .physics import DeviceParams
from .sde import SCHEMES, StepConfig


class ConfigError(Exception):
    """Raised with a message naming every offending key."""


@dataclass(frozen=True)
class RunConfig:
    """Full run description in CLI units (GHz, aF, fs, ns).

    Defaults reproduce the reference device exactly: nu/2pi = 10 GHz,
    C_J = 500 aF, C_g = 0.5 aF, C_p = 1.0 aF, gamma = 7.5e7/s.
    """

    nu_ghz: float = 10.0
    cj_af: float = 500.0
    cg_af: float = 0.5
    cp_af: float = 1.0
    gamma: float = 7.5e7
    protocol: str = "none"
    zlimit: float = 0.333
    ng_lock: float = 0.70
    delay_deg: float = 0.0
    peak_window: int = 1
    dt_fs: float = 200.0
    tmax_ns: float = 20.0
    sample_stride: int = 50
    scheme: str = "kraus"
    runs: int = 10000
    seed: int = 12345
    target_eps: float = 1e-3
    snapshot_ns: float | None = None  # None: snapshot at tmax_ns
    bins: int = 0  # 0: per-command default (100 first-passage, 50 impurity)
    out: str = "qpurify_out.csv"

    @property
    def effective_snapshot_ns(self) -> float:
        return self.tmax_ns if self.snapshot_ns is None else self.snapshot_ns

    def device_params(self) -> DeviceParams:
        return DeviceParams(
            nu=2.0 * math.pi * self.nu_ghz * 1e9,
            c_j=self.cj_af * 1e-18,
            c_g=self.cg_af * 1e-18,
            c_p=self.cp_af * 1e-18,
            gamma=self.gamma,
        )

    def step_config(self) -> StepConfig:
        return StepConfig(
            dt=self.dt_fs * 1e-15,
            sample_stride=self.sample_stride,
            scheme=self.scheme,
        )

    def protocol_spec(self) -> ProtocolSpec:
        return ProtocolSpec(
            kind=self.protocol,
            z_limit=self.zlimit,
            n_g_lock=self.ng_lock,
            delay_phase_deg=self.delay_deg,
            peak_window=self.peak_window,
        )

    def validate(self) -> list[str]:
        """Collect every violation instead of stopping at the first."""
        problems = []
        if self.nu_ghz <= 0:
            problems.append("nu_ghz: must be positive")
        for key in ("cj_af", "cg_af", "cp_af"):
            if getattr(self, key) <= 0:
                problems.append(f"{key}: must be positive")
        if self.gamma < 0:
            problems.append("gamma: must be non-negative")
        if self.protocol not in PROTOCOLS:
            problems.append(f"protocol: must be one of {','.join(PROTOCOLS)}")
        if not 0.0 < self.zlimit <= 1.0:
            problems.append("zlimit: must lie in (0, 1]")
        if not 0.5 <= self.ng_lock <= 0.75:
            problems.append("ng_lock: must lie in [0.5, 0.75]")
        if not 0.0 <= self.delay_deg < 360.0:
            problems.append("delay_deg: must lie in [0, 360)")
        if self.peak_window < 1:
            problems.append("peak_window: must be >= 1")
        if self.dt_fs <= 0:
            problems.append("dt_fs: must be positive")
        if self.tmax_ns <= 0:
            problems.append("tmax_ns: must be positive")
        if self.sample_stride < 1:
            problems.append("sample_stride: must be >= 1")
        if self.scheme not in SCHEMES:
            problems.append(f"scheme: must be one of {','.join(SCHEMES)}")
        if self.runs < 1:
            problems.append("runs: must be >= 1")
        if not 0.0 < self.target_eps < 0.5:
            problems.append("target_eps: must lie in (0, 0.5)")
        if self.snapshot_ns is not None and not 0.0 <= self.snapshot_ns <= self.tmax_ns:
            problems.append("snapshot_ns: must lie in [0, tmax_ns]")
        if self.bins < 0:
            problems.append("bins: must be >= 0")
        if not problems:
            try:
                self.step_config().validate_against(self.device_params())
            except ValueError as exc:
                problems.append(f"dt_fs: {exc}")
        return problems


_INT_KEYS = {"peak_window", "sample_stride", "runs", "seed", "bins"}
_STR_KEYS = {"protocol", "scheme", "out"}
_ALL_KEYS = {f.name for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as a number") from None


def parse_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig from an optional file plus flag overrides.

    Unknown keys, unparsable numbers and invariant violations raise
    :class:`ConfigError` naming each offending key; flags win over file
    entries.
    """
    values: dict = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key not in _ALL_KEYS:
                    raise ConfigError(f"{key}: unknown configuration key")
                values[key] = _coerce(key, raw)
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    cfg = RunConfig(**values)
    problems = cfg.validate()
    if problems:
        raise ConfigError("; ".join(problems))
    return cfg


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def _header_lines(cfg: RunConfig, extra: dict | None = None) -> list[str]:
    items = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
    items["snapshot_ns"] = cfg.effective_snapshot_ns
    items.update(extra or {})
    lines = [
        f"# qpurify {__version__}",
        "# rotation convention: dv/dt = omega x v, omega = (-nu, 0, omega_z)",
        f"# seed {cfg.seed}",
    ]
    lines += [f"# {k}={_fmt(v)}" for k, v in sorted(items.items())]
    return lines


def _write_csv(path, header_lines, columns, rows, json_mirror=False):
    text = "\n".join(header_lines) + "\n" + ",".join(columns) + "\n"
    for row in rows:
        text += ",".join(_fmt(v) for v in row) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    if json_mirror:
        payload = {
            "header": header_lines,
            "columns": list(columns),
            "rows": [[v if isinstance(v, str) else float(v) for v in row] for row in rows],
        }
        with open(str(path) + ".json", "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")


def _sibling(path: str, tag: str) -> str:
    if path.endswith(".csv"):
        return path[: -len(".csv")] + f"_{tag}.csv"
    return path + f"_{tag}.csv"


_BASELINE_EPS_GRID = (3e-1, 1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


def cmd_baseline(cfg: RunConfig, json_mirror: bool = False) -> list[str]:
    """Reference curves on the sample grid plus their inversions."""
    params = cfg.device_params()
    step = cfg.step_config()
    dt_grid = step.dt * step.sample_stride
    n = int(round(cfg.tmax_ns * 1e-9 / dt_grid)) + 1
    rows = []
    for k in range(n):
        t = k * dt_grid
        rows.append(
            (t * 1e9, impurity_no_hamiltonian(t, params.gamma), impurity_ideal1(t, params.gamma))
        )
    _write_csv(
        cfg.out,
        _header_lines(cfg, {"command": "baseline"}),
        ("t_ns", "L_bar_II", "L_bar_I"),
        rows,
        json_mirror,
    )
    inv_path = _sibling(cfg.out, "inversion")
    inv_rows = []
    for eps in _BASELINE_EPS_GRID:
        t2 = time_to_impurity_no_hamiltonian(eps, params.gamma)
        t1 = time_to_impurity_ideal1(eps, params.gamma)
        inv_rows.append((eps, t2 * 1e9, t1 * 1e9, t2 / t1))
    _write_csv(
        inv_path,
        _header_lines(cfg, {"command": "baseline_inversion"}),
        ("eps", "T_II_ns", "T_I_ns", "S_I"),
        inv_rows,
        json_mirror,
    )
    return [cfg.out, inv_path]


def _ensemble_from_config(cfg: RunConfig, n_fp_bins=100, n_imp_bins=50):
    return run_ensemble(
        cfg.protocol_spec(),
        cfg.device_params(),
        cfg.step_config(),
        cfg.runs,
        cfg.seed,
        t_max=cfg.tmax_ns * 1e-9,
        target_eps=cfg.target_eps,
        snapshot_t=cfg.effective_snapshot_ns * 1e-9,
        n_fp_bins=n_fp_bins,
        n_impurity_bins=n_imp_bins,
    )


def cmd_simulate(cfg: RunConfig, json_mirror: bool = False) -> list[str]:
    """Mean transient and per-run results for one ensemble."""
    stats = _ensemble_from_config(cfg)
    rows = [
        (t * 1e9, m, s)
        for t, m, s in zip(stats.times, stats.mean_impurity, stats.stderr_impurity)
    ]
    _write_csv(
        cfg.out,
        _header_lines(cfg, {"command": "simulate"}),
        ("t_ns", "mean_L", "stderr_L"),
        rows,
        json_mirror,
    )
    run_path = _sibling(cfg.out, "runs")
    run_rows = []
    for i in range(stats.n_runs):
        fp = stats.first_passage_times[i]
        run_rows.append(
            (i, "OVER" if np.isnan(fp) else fp * 1e9, stats.impurity_at_snapshot[i])
        )
    _write_csv(
        run_path,
        _header_lines(cfg, {"command": "simulate_runs"}),
        ("run_index", "first_passage_ns", "L_at_snapshot"),
        run_rows,
        json_mirror,
    )
    return [cfg.out, run_path]


def cmd_hist(cfg: RunConfig, kind: str, json_mirror: bool = False) -> list[str]:
    """Histogram CSV; kind is "first-passage" or "impurity-at"."""
    if kind == "first-passage":
        n_bins = cfg.bins or 100
        stats = _ensemble_from_config(cfg, n_fp_bins=n_bins)
        hist = stats.first_passage_hist
        rows = [
            (hist.edges[i] * 1e9, hist.edges[i + 1] * 1e9, int(hist.counts[i]))
            for i in range(len(hist.counts))
        ]
        rows.append(("OVERFLOW", "", hist.overflow_count))
        columns = ("bin_lo_ns", "bin_hi_ns", "count")
    elif kind == "impurity-at":
        n_bins = cfg.bins or 50
        stats = _ensemble_from_config(cfg, n_imp_bins=n_bins)
        hist = stats.impurity_hist
        rows = [
            (hist.edges[i], hist.edges[i + 1], int(hist.counts[i]))
            for i in range(len(hist.counts))
        ]
        columns = ("bin_lo", "bin_hi", "count")
    else:
        raise ConfigError(f"kind: unknown histogram kind {kind!r}")
    _write_csv(
        cfg.out,
        _header_lines(cfg, {"command": f"hist_{kind}"}),
        columns,
        rows,
        json_mirror,
    )
    return [cfg.out]


def cmd_sweep(
    cfg: RunConfig, axis: str, values, levels, json_mirror: bool = False
) -> list[str]:
    """Threshold or delay sweep; cells for unreached levels read NA."""
    spec = cfg.protocol_spec()
    if spec.kind not in ("practical1", "practical2"):
        spec = replace(cfg.protocol_spec(), kind="practical1")
    common = dict(
        t_max=cfg.tmax_ns * 1e-9,
        target_eps=cfg.target_eps,
        snapshot_t=cfg.effective_snapshot_ns * 1e-9,
    )
    if axis == "zlimit":
        result = sweep_zlimit(
            values, levels, spec, cfg.device_params(), cfg.step_config(),
            cfg.runs, cfg.seed, **common,
        )
    elif axis == "delay":
        result = sweep_delay(
            values, levels, spec, cfg.device_params(), cfg.step_config(),
            cfg.runs, cfg.seed, **common,
        )
    else:
        raise ConfigError(f"axis: unknown sweep axis {axis!r}")
    columns = [axis] + [f"S_at_{_fmt(lv)}" for lv in result.impurity_levels]
    rows = []
    for i, v in enumerate(result.values):
        row = [v]
        for j in range(len(result.impurity_levels)):
            row.append(_fmt(result.speedup[i, j]) if result.reached[i, j] else "NA")
        rows.append(tuple(row))
    _write_csv(
        cfg.out,
        _header_lines(cfg, {"command": f"sweep_{axis}", "values": ",".join(_fmt(v) for v in values)}),
        columns,
        rows,
        json_mirror,
    )
    return [cfg.out]


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qpurify",
        description="Monte Carlo toolkit for rapid-purification feedback protocols "
        "on a continuously measured charge qubit.",
    )
    p.add_argument("--version", action="version", version=f"qpurify {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="flat key=value configuration file")
        sp.add_argument("--protocol", choices=PROTOCOLS)
        sp.add_argument("--runs", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--dt-fs", dest="dt_fs", type=float)
        sp.add_argument("--tmax-ns", dest="tmax_ns", type=float)
        sp.add_argument("--zlimit", type=float)
        sp.add_argument("--ng-lock", dest="ng_lock", type=float)
        sp.add_argument("--delay-deg", dest="delay_deg", type=float)
        sp.add_argument("--target-eps", dest="target_eps", type=float)
        sp.add_argument("--snapshot-ns", dest="snapshot_ns", type=float)
        sp.add_argument("--bins", type=int)
        sp.add_argument("--scheme", choices=SCHEMES)
        sp.add_argument("--out", help="output CSV path")
        sp.add_argument("--json", action="store_true", help="also write a JSON mirror")

    add_common(sub.add_parser("baseline", help="reference curves and inversions"))
    add_common(sub.add_parser("simulate", help="run one ensemble"))
    h = sub.add_parser("hist", help="first-passage or impurity histogram")
    add_common(h)
    h.add_argument(
        "--kind", choices=("first-passage", "impurity-at"), default="first-passage"
    )
    s = sub.add_parser("sweep", help="threshold or delay sweep")
    add_common(s)
    s.add_argument("--axis", choices=("zlimit", "delay"), default="zlimit")
    s.add_argument("--values", required=True, help="comma-separated sweep values")
    s.add_argument("--levels", default="1e-2,1e-3", help="comma-separated impurity levels")
    return p


_OVERRIDE_KEYS = (
    "protocol", "runs", "seed", "dt_fs", "tmax_ns", "zlimit", "ng_lock",
    "delay_deg", "target_eps", "snapshot_ns", "bins", "scheme", "out",
)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    try:
        cfg = parse_config(args.config, overrides)
        if args.command == "baseline":
            written = cmd_baseline(cfg, args.json)
        elif args.command == "simulate":
            written = cmd_simulate(cfg, args.json)
        elif args.command == "hist":
            written = cmd_hist(cfg, args.kind, args.json)
        elif args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v]
            levels = [float(v) for v in args.levels.split(",") if v]
            written = cmd_sweep(cfg, args.axis, values, levels, args.json)
        else:  # pragma: no cover - argparse enforces the choices
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
