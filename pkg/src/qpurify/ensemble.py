"""Trajectory ensembles and the statistics built from them.

A trajectory starts from the completely mixed state, is integrated with
the compiled kernel, and records its impurity on a fixed sample grid
(every ``sample_stride`` steps). First-passage times and snapshot
impurities are evaluated on that grid, so both carry at most one sample
interval of bias.

Every trajectory owns a noise stream derived from (master_seed, index),
which makes results reproducible run-for-run and independent of the order
in which trajectories are computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .controllers import EVENT_NAMES, ProtocolSpec
from .physics import BlochState, DeviceParams
from .sde import NoiseStream, StepConfig

_PROTO_CODE = {
    "none": _core.PROTO_NONE,
    "ideal1": _core.PROTO_IDEAL1,
    "ideal2": _core.PROTO_IDEAL2,
    "practical1": _core.PROTO_PRACTICAL1,
    "practical2": _core.PROTO_PRACTICAL2,
}
_SCHEME_CODE = {"kraus": _core.SCHEME_KRAUS, "euler": _core.SCHEME_EULER}

_EVENT_LOG_CAP = 16384


@dataclass(frozen=True)
class TrajectoryResult:
    """Everything recorded from a single run.

    first_passage is the first grid time with impurity <= target_eps, or
    None when the run never got there (overflow). trigger_log lists the
    controller transitions as (time, event-name) pairs.
    """

    times: np.ndarray
    impurity: np.ndarray
    first_passage_index: int
    first_passage: float | None
    impurity_at_snapshot: float
    snapshot_time: float
    target_eps: float
    trigger_log: list[tuple[float, str]]
    clamp_count: int
    final_state: BlochState
    master_seed: int
    index: int


@dataclass(frozen=True)
class Histogram:
    """Bin edges, counts and the overflow count (runs past the last edge)."""

    edges: np.ndarray
    counts: np.ndarray
    overflow_count: int

    @property
    def modal_bin_index(self) -> int:
        return int(np.argmax(self.counts))

    @property
    def modal_bin_center(self) -> float:
        i = self.modal_bin_index
        return 0.5 * (float(self.edges[i]) + float(self.edges[i + 1]))

    @property
    def total(self) -> int:
        return int(np.sum(self.counts)) + self.overflow_count


@dataclass(frozen=True)
class EnsembleStats:
    """Aggregates over an ensemble of trajectories.

    The mean transient is the unweighted average over runs at identical
    grid times. Histogram totals (including overflow) equal the run count.
    """

    times: np.ndarray
    mean_impurity: np.ndarray
    stderr_impurity: np.ndarray
    n_runs: int
    first_passage_times: np.ndarray  # NaN marks overflow
    overflow_count: int
    impurity_at_snapshot: np.ndarray
    snapshot_time: float
    target_eps: float
    first_passage_hist: Histogram
    impurity_hist: Histogram
    clamp_fraction: float
    config: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SpeedupCurve:
    """S(eps) read off a mean transient; reached flags unreachable levels."""

    eps: np.ndarray
    t_test: np.ndarray
    speedup: np.ndarray
    stderr: np.ndarray
    reached: np.ndarray


@dataclass(frozen=True)
class SweepResult:
    """Speed-ups per swept value (rows) and impurity level (columns)."""

    axis: str
    values: np.ndarray
    impurity_levels: np.ndarray
    speedup: np.ndarray
    stderr: np.ndarray
    reached: np.ndarray


def _grid(cfg: StepConfig, t_max: float) -> tuple[int, int, np.ndarray]:
    if cfg.renormalization != "clamp":
        # the state invariant (length <= 1 after every step) is part of the
        # trajectory contract; the "none" policy is a step-level diagnostic
        raise ValueError("trajectory integration requires renormalization='clamp'")
    n_steps = int(round(t_max / cfg.dt))
    n_steps -= n_steps % cfg.sample_stride
    if n_steps <= 0:
        raise ValueError("t_max shorter than one sample stride")
    n_samples = n_steps // cfg.sample_stride + 1
    times = np.arange(n_samples) * (cfg.dt * cfg.sample_stride)
    return n_steps, n_samples, times


def _snapshot_index(times: np.ndarray, snapshot_t: float) -> int:
    idx = int(round(snapshot_t / (times[1] - times[0])))
    if not 0 <= idx < len(times):
        raise ValueError("snapshot time outside the simulated range")
    return idx


def _run_kernel(
    spec: ProtocolSpec,
    params: DeviceParams,
    cfg: StepConfig,
    master_seed: int,
    index: int,
    n_steps: int,
    n_samples: int,
    target_eps: float,
    initial_state: BlochState,
    out_impurity: np.ndarray,
    event_steps: np.ndarray,
    event_codes: np.ndarray,
):
    kind = _PROTO_CODE[spec.kind]
    if kind == _core.PROTO_IDEAL1:
        normals = np.empty(0)  # deterministic path consumes no noise
    else:
        normals = NoiseStream(master_seed, index).normals(n_steps)
    return _core.trajectory_kernel(
        kind, _SCHEME_CODE[cfg.scheme],
        initial_state.x, initial_state.y, initial_state.z,
        params.nu, params.bias_slope, params.gamma, cfg.dt,
        n_steps, cfg.sample_stride,
        spec.z_limit, spec.n_g_lock, spec.delay_steps(params, cfg), spec.peak_window,
        target_eps,
        normals,
        out_impurity,
        event_steps, event_codes,
    )


def run_trajectory(
    spec: ProtocolSpec,
    params: DeviceParams,
    cfg: StepConfig,
    master_seed: int,
    index: int,
    *,
    t_max: float = 20e-9,
    target_eps: float = 1e-3,
    snapshot_t: float | None = None,
    initial_state: BlochState | None = None,
) -> TrajectoryResult:
    """Integrate one trajectory; deterministic given (master_seed, index)
    and the configuration. The snapshot defaults to the end of the run."""
    cfg.validate_against(params)
    n_steps, n_samples, times = _grid(cfg, t_max)
    snap_idx = _snapshot_index(times, snapshot_t if snapshot_t is not None else times[-1])
    imp = np.empty(n_samples)
    ev_steps = np.empty(_EVENT_LOG_CAP, dtype=np.int64)
    ev_codes = np.empty(_EVENT_LOG_CAP, dtype=np.int16)
    start = initial_state if initial_state is not None else BlochState(0.0, 0.0, 0.0)
    fp_idx, clamps, n_events, x, y, z = _run_kernel(
        spec, params, cfg, master_seed, index, n_steps, n_samples,
        target_eps, start, imp, ev_steps, ev_codes,
    )
    n_rec = min(n_events, _EVENT_LOG_CAP)
    log = [
        (float(ev_steps[k] * cfg.dt), EVENT_NAMES[int(ev_codes[k])])
        for k in range(n_rec)
    ]
    return TrajectoryResult(
        times=times,
        impurity=imp,
        first_passage_index=int(fp_idx),
        first_passage=float(times[fp_idx]) if fp_idx >= 0 else None,
        impurity_at_snapshot=float(imp[snap_idx]),
        snapshot_time=float(times[snap_idx]),
        target_eps=target_eps,
        trigger_log=log,
        clamp_count=int(clamps),
        final_state=BlochState(x, y, z),
        master_seed=master_seed,
        index=index,
    )


def run_ensemble(
    spec: ProtocolSpec,
    params: DeviceParams,
    cfg: StepConfig,
    n_runs: int,
    master_seed: int,
    *,
    t_max: float = 20e-9,
    target_eps: float = 1e-3,
    snapshot_t: float | None = None,
    n_fp_bins: int = 100,
    n_impurity_bins: int = 50,
    impurity_log_range: tuple[float, float] = (1e-8, 0.5),
    indices=None,
) -> EnsembleStats:
    """Run ``n_runs`` independent trajectories (indices 0..n-1) and
    aggregate.

    The reduction is by trajectory index, so the statistics do not depend
    on the order the runs are computed in; ``indices`` overrides the index
    set for that very test. The snapshot defaults to the end of the run.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    cfg.validate_against(params)
    n_steps, n_samples, times = _grid(cfg, t_max)
    snap_idx = _snapshot_index(times, snapshot_t if snapshot_t is not None else times[-1])

    idx_list = list(range(n_runs)) if indices is None else list(indices)
    order = np.argsort(np.asarray(idx_list, dtype=np.int64), kind="stable")

    imp = np.empty(n_samples)
    ev_steps = np.empty(0, dtype=np.int64)
    ev_codes = np.empty(0, dtype=np.int16)
    mixed = BlochState(0.0, 0.0, 0.0)

    total = np.zeros(n_samples)
    total_sq = np.zeros(n_samples)
    fp = np.full(len(idx_list), np.nan)
    snap = np.empty(len(idx_list))
    clamp_total = 0

    # process in ascending index order so the whole result is a function of
    # the index *set*, not of the order it was presented in
    for row, pos in enumerate(order):
        index = idx_list[pos]
        fp_idx, clamps, _n_ev, _x, _y, _z = _run_kernel(
            spec, params, cfg, master_seed, index, n_steps, n_samples,
            target_eps, mixed, imp, ev_steps, ev_codes,
        )
        total += imp
        total_sq += imp * imp
        if fp_idx >= 0:
            fp[row] = times[fp_idx]
        snap[row] = imp[snap_idx]
        clamp_total += clamps

    n = len(idx_list)
    mean = total / n
    if n > 1:
        var = np.maximum(total_sq - n * mean * mean, 0.0) / (n - 1)
        stderr = np.sqrt(var / n)
    else:
        stderr = np.zeros(n_samples)

    fp_hist = _first_passage_hist_from_times(fp, t_max, n_fp_bins)
    imp_hist = _impurity_hist_from_values(snap, n_impurity_bins, impurity_log_range)

    return EnsembleStats(
        times=times,
        mean_impurity=mean,
        stderr_impurity=stderr,
        n_runs=len(idx_list),
        first_passage_times=fp,
        overflow_count=int(np.sum(np.isnan(fp))),
        impurity_at_snapshot=snap,
        snapshot_time=float(times[snap_idx]),
        target_eps=target_eps,
        first_passage_hist=fp_hist,
        impurity_hist=imp_hist,
        clamp_fraction=clamp_total / (len(idx_list) * n_steps),
        config={
            "protocol": spec.kind,
            "z_limit": spec.z_limit,
            "n_g_lock": spec.n_g_lock,
            "delay_phase_deg": spec.delay_phase_deg,
            "peak_window": spec.peak_window,
            "dt": cfg.dt,
            "sample_stride": cfg.sample_stride,
            "scheme": cfg.scheme,
            "t_max": t_max,
            "target_eps": target_eps,
            "snapshot_t": snapshot_t,
            "n_runs": len(idx_list),
            "master_seed": master_seed,
            "gamma": params.gamma,
            "nu": params.nu,
        },
    )


def _first_passage_hist_from_times(fp_times, t_max, n_bins) -> Histogram:
    fp_times = np.asarray(fp_times, dtype=float)
    finite = fp_times[~np.isnan(fp_times)]
    counts, edges = np.histogram(finite, bins=n_bins, range=(0.0, t_max))
    return Histogram(
        edges=edges,
        counts=counts,
        overflow_count=int(np.sum(np.isnan(fp_times)) + np.sum(finite > t_max)),
    )


def _impurity_hist_from_values(values, n_bins, log_range) -> Histogram:
    lo, hi = log_range
    if not 0.0 < lo < hi:
        raise ValueError("impurity histogram range must satisfy 0 < lo < hi")
    edges = np.logspace(math.log10(lo), math.log10(hi), n_bins + 1)
    values = np.asarray(values, dtype=float)
    clipped = np.clip(values, lo, hi)  # keep every run in some bin
    counts, _ = np.histogram(clipped, bins=edges)
    return Histogram(edges=edges, counts=counts, overflow_count=0)


def first_passage_histogram(
    results: list[TrajectoryResult], target_eps: float, t_max: float, n_bins: int = 100
) -> Histogram:
    """Uniform-bin histogram of first-passage times with an overflow bin.

    All results must share the target impurity; runs that never reached it
    land in the overflow count, so the total always equals the run count.
    """
    for r in results:
        if r.target_eps != target_eps:
            raise ValueError("results carry a different target impurity")
    fp = np.array(
        [r.first_passage if r.first_passage is not None else np.nan for r in results]
    )
    return _first_passage_hist_from_times(fp, t_max, n_bins)


def impurity_at_time_histogram(
    results: list[TrajectoryResult],
    n_bins: int = 50,
    log_range: tuple[float, float] = (1e-8, 0.5),
) -> Histogram:
    """Log-spaced histogram of the snapshot impurities."""
    snaps = {r.snapshot_time for r in results}
    if len(snaps) > 1:
        raise ValueError("results carry different snapshot times")
    values = [r.impurity_at_snapshot for r in results]
    return _impurity_hist_from_values(values, n_bins, log_range)


def _pava_nonincreasing(y: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit of a non-increasing sequence."""
    vals: list[float] = []
    wts: list[float] = []
    for v in y:
        vals.append(float(v))
        wts.append(1.0)
        while len(vals) > 1 and vals[-2] < vals[-1]:
            w = wts[-1] + wts[-2]
            merged = (vals[-1] * wts[-1] + vals[-2] * wts[-2]) / w
            vals.pop()
            wts.pop()
            vals[-1] = merged
            wts[-1] = w
    out = np.empty(len(y))
    i = 0
    for v, w in zip(vals, wts):
        k = int(round(w))
        out[i : i + k] = v
        i += k
    return out


def invert_transient(times: np.ndarray, mean: np.ndarray, eps: float) -> float | None:
    """First time the (isotonically smoothed) mean transient reaches eps.

    The mean is made non-increasing by PAVA, then inverted with linear
    interpolation in log-impurity. None when the level is never reached.
    """
    iso = _pava_nonincreasing(np.asarray(mean, dtype=float))
    below = np.nonzero(iso <= eps)[0]
    if len(below) == 0:
        return None
    j = int(below[0])
    if j == 0:
        return float(times[0])
    hi, lo = iso[j - 1], iso[j]
    if lo <= 0.0 or hi <= lo:
        return float(times[j])
    f = (math.log(eps) - math.log(hi)) / (math.log(lo) - math.log(hi))
    return float(times[j - 1] + f * (times[j] - times[j - 1]))


def speedup_curve(
    stats: EnsembleStats,
    impurity_grid,
    params: DeviceParams,
    quad=None,
) -> SpeedupCurve:
    """Speed-up of the ensemble's protocol at each requested impurity.

    T_test comes from inverting the run-averaged transient; the error bar
    is propagated by inverting mean +- stderr. Levels the transient never
    reaches are flagged, not extrapolated.
    """
    from .baseline import DEFAULT_QUADRATURE, time_to_impurity_no_hamiltonian

    quad = quad or DEFAULT_QUADRATURE
    eps_grid = np.asarray(list(impurity_grid), dtype=float)
    t_test = np.full(len(eps_grid), np.nan)
    s = np.full(len(eps_grid), np.nan)
    se = np.full(len(eps_grid), np.nan)
    reached = np.zeros(len(eps_grid), dtype=bool)
    for i, eps in enumerate(eps_grid):
        t = invert_transient(stats.times, stats.mean_impurity, eps)
        if t is None or t <= 0.0:
            continue
        reached[i] = True
        t_test[i] = t
        t_baseline = time_to_impurity_no_hamiltonian(eps, params.gamma, quad)
        s[i] = t_baseline / t
        t_lo = invert_transient(stats.times, stats.mean_impurity - stats.stderr_impurity, eps)
        t_hi = invert_transient(stats.times, stats.mean_impurity + stats.stderr_impurity, eps)
        if t_lo is not None and t_hi is not None and t_lo > 0.0:
            se[i] = 0.5 * abs(t_baseline / t_lo - t_baseline / t_hi)
    return SpeedupCurve(eps=eps_grid, t_test=t_test, speedup=s, stderr=se, reached=reached)


def sweep_zlimit(
    values,
    impurity_levels,
    spec_template: ProtocolSpec,
    params: DeviceParams,
    cfg: StepConfig,
    n_runs: int,
    master_seed: int,
    **ensemble_kwargs,
) -> SweepResult:
    """One ensemble per threshold value; speed-up at each impurity level.

    Every value reuses the same master seed (common random numbers), which
    cancels most of the Monte Carlo error out of value-to-value
    comparisons.
    """
    return _sweep(
        "zlimit", values, impurity_levels, spec_template, params, cfg,
        n_runs, master_seed,
        lambda spec, v: ProtocolSpec(
            kind=spec.kind, z_limit=float(v), n_g_lock=spec.n_g_lock,
            delay_phase_deg=spec.delay_phase_deg, peak_window=spec.peak_window,
        ),
        **ensemble_kwargs,
    )


def sweep_delay(
    phase_values_deg,
    impurity_levels,
    spec_template: ProtocolSpec,
    params: DeviceParams,
    cfg: StepConfig,
    n_runs: int,
    master_seed: int,
    **ensemble_kwargs,
) -> SweepResult:
    """Delay sweep for the pulse protocol; phases in [0, 360) degrees."""
    for v in phase_values_deg:
        if not 0.0 <= float(v) < 360.0:
            raise ValueError("delay phases must lie in [0, 360) degrees")
    return _sweep(
        "delay", phase_values_deg, impurity_levels, spec_template, params, cfg,
        n_runs, master_seed,
        lambda spec, v: ProtocolSpec(
            kind=spec.kind, z_limit=spec.z_limit, n_g_lock=spec.n_g_lock,
            delay_phase_deg=float(v), peak_window=spec.peak_window,
        ),
        **ensemble_kwargs,
    )


def _sweep(
    axis, values, impurity_levels, spec_template, params, cfg,
    n_runs, master_seed, make_spec, **ensemble_kwargs,
) -> SweepResult:
    values = np.asarray(list(values), dtype=float)
    levels = np.asarray(list(impurity_levels), dtype=float)
    s = np.full((len(values), len(levels)), np.nan)
    se = np.full((len(values), len(levels)), np.nan)
    reached = np.zeros((len(values), len(levels)), dtype=bool)
    for i, v in enumerate(values):
        spec = make_spec(spec_template, v)
        stats = run_ensemble(
            spec, params, cfg, n_runs, master_seed, **ensemble_kwargs
        )
        curve = speedup_curve(stats, levels, params)
        s[i] = curve.speedup
        se[i] = curve.stderr
        reached[i] = curve.reached
    return SweepResult(
        axis=axis, values=values, impurity_levels=levels,
        speedup=s, stderr=se, reached=reached,
    )
