"""The five feedback protocols as deterministic state machines.

Each protocol maps the conditional state (and its own runtime state) to a
gate bias for the next step. The two ideal protocols instead apply an
instantaneous projection after every measurement step and run with the
Hamiltonian rotation disabled, modelling feedback fast enough to cancel
any Hamiltonian evolution:

  none        constant n_g = 0.5: pure Josephson rotation about x under
              measurement, the spiral baseline.
  ideal1      rotate onto the equatorial plane after each step; the
              measurement noise cancels and the impurity decays as
              exp(-8 gamma t)/2, deterministically.
  ideal2      rotate onto the measurement axis after each step; the state
              diffuses along z and the ensemble mean follows the
              measurement-only curve.
  practical1  bias pulses that pi-rotate the state onto the x-axis
              whenever |z| crosses z_limit (screw-like path).
  practical2  wait for |z| to peak above z_limit, then lock a strong
              constant bias whose tilted rotation axis is nearly parallel
              to the measurement axis.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import _core
from .physics import BlochState, DeviceParams, PulsePlan, pulse_plan
from .sde import StepConfig

PROTOCOLS = ("none", "ideal1", "ideal2", "practical1", "practical2")

_MODE_NAMES = {
    _core.MODE_IDLE: "idle",
    _core.MODE_DELAYING: "delaying",
    _core.MODE_PULSING: "pulsing",
    _core.MODE_LOCKED: "locked",
}
_MODE_CODES = {v: k for k, v in _MODE_NAMES.items()}

EVENT_NAMES = {
    _core.EV_TRIGGER: "trigger",
    _core.EV_PULSE_START: "pulse_start",
    _core.EV_PULSE_END: "pulse_end",
    _core.EV_LOCK: "lock",
    _core.EV_DELAY_START: "delay_start",
}


@dataclass(frozen=True)
class ProtocolSpec:
    """Which protocol to run plus its knobs.

    z_limit        |z| trigger threshold (practical protocols)
    n_g_lock       bias held once practical2 locks (default 0.70)
    delay_phase_deg  practical1 latency between trigger and pulse,
                   as a phase of the Josephson period
    peak_window    consecutive non-increasing |z| comparisons required by
                   practical2's peak detector (default 1)
    """

    kind: str
    z_limit: float = 0.333
    n_g_lock: float = 0.70
    delay_phase_deg: float = 0.0
    peak_window: int = 1

    def __post_init__(self):
        if self.kind not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.kind!r}; choose from {PROTOCOLS}")
        if self.kind in ("practical1", "practical2") and not 0.0 < self.z_limit <= 1.0:
            # z_limit = 1 is allowed: |z| can only touch 1 at an exact pole,
            # so the trigger never fires and feedback is effectively off
            raise ValueError("z_limit must lie in (0, 1]")
        if not 0.5 <= self.n_g_lock <= 0.75:
            raise ValueError("n_g_lock must lie in [0.5, 0.75]")
        if not 0.0 <= self.delay_phase_deg < 360.0:
            raise ValueError("delay_phase_deg must lie in [0, 360)")
        if self.peak_window < 1:
            raise ValueError("peak_window must be >= 1")

    def delay_steps(self, params: DeviceParams, cfg: StepConfig) -> int:
        """Trigger-to-pulse latency in whole steps."""
        period = 2.0 * 3.141592653589793 / params.nu
        return int(round(self.delay_phase_deg / 360.0 * period / cfg.dt))


@dataclass(frozen=True)
class ControllerState:
    """Runtime state of a practical-protocol controller.

    pulsing implies a plan is present with steps_remaining > 0; locked is
    absorbing. previous_abs_z and nonincreasing_count drive practical2's
    discrete peak detection.
    """

    mode: str = "idle"
    pulse: PulsePlan | None = None
    steps_remaining: int = 0
    previous_abs_z: float = 0.0
    nonincreasing_count: int = 0

    def __post_init__(self):
        if self.mode not in _MODE_CODES:
            raise ValueError(f"unknown controller mode {self.mode!r}")
        if self.mode == "pulsing" and (self.pulse is None or self.steps_remaining <= 0):
            raise ValueError("pulsing requires a plan and steps_remaining > 0")


def initial_controller_state(state: BlochState) -> ControllerState:
    return ControllerState(previous_abs_z=abs(state.z))


def control_none(state: BlochState, t: float = 0.0) -> float:
    """No feedback: hold the degeneracy bias, z-rotation stays off."""
    return 0.5


def project_ideal1(state: BlochState) -> BlochState:
    """Rotate onto the equatorial plane, preserving Bloch length.

    Any point with z = 0 is equivalent for the subsequent dynamics;
    (r, 0, 0) is chosen for determinism. The projection itself leaves the
    impurity unchanged.
    """
    return BlochState(state.length, 0.0, 0.0)


def project_ideal2(state: BlochState) -> BlochState:
    """Rotate onto the measurement axis, preserving Bloch length; ties at
    z = 0 go to the +z pole."""
    x, y, z = _core.project_to_pole(state.x, state.y, state.z)
    return BlochState(x, y, z)


def control_practical1(
    state: BlochState,
    ctrl: ControllerState,
    spec: ProtocolSpec,
    params: DeviceParams,
    cfg: StepConfig,
) -> tuple[float, ControllerState]:
    """Pulse-to-x-axis protocol transition.

    Idle below threshold emits 0.5. A trigger (|z| >= z_limit in idle)
    plans a pulse from the actual |z| and the current quadrant, then either
    starts pulsing immediately or waits out the configured delay with the
    plan frozen (latency semantics). While pulsing the plan's bias is held;
    a new trigger is only accepted after the controller returns to idle.
    """
    mode = _MODE_CODES[ctrl.mode]
    pulse_wz = ctrl.pulse.omega_z if ctrl.pulse is not None else 0.0
    pulse_steps = (
        max(1, int(round(ctrl.pulse.tau / cfg.dt))) if ctrl.pulse is not None else 0
    )
    wz, new_mode, steps_remaining, pulse_wz, pulse_steps, _event = (
        _core.practical1_transition(
            state.x, state.y, state.z,
            mode, ctrl.steps_remaining, pulse_wz, pulse_steps,
            spec.z_limit, spec.delay_steps(params, cfg),
            params.nu, params.bias_slope, cfg.dt,
        )
    )
    plan = ctrl.pulse
    if mode == _core.MODE_IDLE and new_mode != _core.MODE_IDLE:
        # the transition planned a pulse; rebuild the plan object from the
        # same trigger data (identical arithmetic via pulse_scalars)
        r = state.length
        plan = pulse_plan(min(abs(state.z), r), r, state.x, state.z, params)
    # the final pulse step emits the pulse bias while the mode returns to idle
    n_g = plan.n_g if wz != 0.0 else 0.5
    if new_mode == _core.MODE_IDLE:
        plan = None
    new_ctrl = ControllerState(
        mode=_MODE_NAMES[new_mode],
        pulse=plan,
        steps_remaining=steps_remaining,
        previous_abs_z=ctrl.previous_abs_z,
        nonincreasing_count=ctrl.nonincreasing_count,
    )
    return n_g, new_ctrl


def control_practical2(
    state: BlochState,
    ctrl: ControllerState,
    spec: ProtocolSpec,
    params: DeviceParams,
) -> tuple[float, ControllerState]:
    """Lock-on protocol transition.

    Idle emits 0.5 and watches |z|; at the first step where |z| is above
    threshold and has stopped increasing (discrete peak detection over
    ``peak_window`` comparisons) the controller locks and emits n_g_lock
    forever: locked is absorbing.
    """
    mode = _MODE_CODES[ctrl.mode]
    wz_lock = params.bias_slope * (0.5 - spec.n_g_lock)
    wz, new_mode, prev_abs_z, noninc, _event = _core.practical2_transition(
        state.z, mode, ctrl.previous_abs_z, ctrl.nonincreasing_count,
        spec.z_limit, wz_lock, spec.peak_window,
    )
    n_g = spec.n_g_lock if new_mode == _core.MODE_LOCKED else 0.5
    new_ctrl = replace(
        ctrl,
        mode=_MODE_NAMES[new_mode],
        previous_abs_z=prev_abs_z,
        nonincreasing_count=noninc,
    )
    return n_g, new_ctrl
