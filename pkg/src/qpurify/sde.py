"""Time stepping of the conditional Bloch-vector equations.

One step of the conditional dynamics is a sequential splitting: an exact
Rodrigues rotation over dt about the instantaneous rotation vector
(-nu, 0, omega_z), then the weak-measurement update with a fresh Wiener
increment, then a clamp onto the unit sphere if the step overshot it.

Two measurement integrators are provided. ``scheme="kraus"`` (default)
applies the normalized measurement operator for the observed record; it
expands to the same Ito increments as the literal Euler-Maruyama form but
keeps the state inside the Bloch ball exactly, so near-pure states carry
no discretisation noise floor. ``scheme="euler"`` adds the literal
first-order increments and relies on the clamp; it leaves additive
O(sqrt(gamma dt)) impurity noise near the sphere and is retained for
increment-level tests and for studying that artifact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _core
from .physics import BlochState, DeviceParams, omega_z_from_bias

SCHEMES = ("kraus", "euler")
RENORM_POLICIES = ("clamp", "none")


@dataclass(frozen=True)
class StepConfig:
    """Discretisation settings.

    dt             time step, seconds (default 200 fs: 500 steps per
                   Josephson period at 10 GHz, gamma*dt = 1.5e-5)
    sample_stride  steps between recorded impurity samples (default 50,
                   a 10 ps grid)
    scheme         measurement integrator, "kraus" or "euler"
    renormalization  "clamp" rescales onto the sphere when a step
                   overshoots it; "none" disables the guard
    """

    dt: float = 2e-13
    sample_stride: int = 50
    scheme: str = "kraus"
    renormalization: str = "clamp"

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.sample_stride < 1 or int(self.sample_stride) != self.sample_stride:
            raise ValueError("sample_stride must be a positive integer")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.renormalization not in RENORM_POLICIES:
            raise ValueError(f"renormalization must be one of {RENORM_POLICIES}")

    def validate_against(self, params: DeviceParams) -> None:
        """Resolution bounds: gamma*dt <= 1e-3 and at least 200 steps per
        Josephson period."""
        if params.gamma * self.dt > 1e-3:
            raise ValueError("gamma*dt exceeds 1e-3; reduce dt")
        period = 2.0 * math.pi / params.nu
        if self.dt > period / 200.0:
            raise ValueError("dt coarser than 1/200 of the Josephson period")


def mix_seed(master_seed: int, index: int) -> int:
    """64-bit avalanche mix (splitmix64 finalizer) of (master_seed, index).

    Gives every trajectory its own reproducible generator seed; the same
    pair always yields the same stream.
    """
    mask = 0xFFFFFFFFFFFFFFFF
    v = ((master_seed & mask) * 0x9E3779B97F4A7C15 + (index & mask)) & mask
    v = ((v ^ (v >> 30)) * 0xBF58476D1CE4E5B9) & mask
    v = ((v ^ (v >> 27)) * 0x94D049BB133111EB) & mask
    return v ^ (v >> 31)


class NoiseStream:
    """Deterministic per-trajectory Gaussian stream.

    The stream is a pure function of (master_seed, trajectory_index);
    draws are standard normal and scale by sqrt(dt) to form Wiener
    increments.
    """

    def __init__(self, master_seed: int, trajectory_index: int):
        self.master_seed = int(master_seed)
        self.trajectory_index = int(trajectory_index)
        self._rng = np.random.default_rng(mix_seed(self.master_seed, self.trajectory_index))

    def normals(self, n: int) -> np.ndarray:
        return self._rng.standard_normal(n)

    def normal(self) -> float:
        return float(self._rng.standard_normal())

    def wiener_increments(self, n: int, dt: float) -> np.ndarray:
        return self.normals(n) * math.sqrt(dt)


def hamiltonian_rotation(
    state: BlochState, omega_x: float, omega_z: float, dt: float
) -> BlochState:
    """Exact rotation of the Bloch vector by |omega|*dt about the axis
    (omega_x, 0, omega_z)/|omega|.

    Length-preserving (Rodrigues form, no truncation). Sign convention:
    dv/dt = omega x v, so positive omega_x rotates +y toward +z.
    """
    c, s, ux, uz = _core.rotation_coefficients(omega_x, omega_z, dt)
    x, y, z = _core.apply_rotation(state.x, state.y, state.z, c, s, ux, uz)
    return BlochState(x, y, z)


def measurement_increment(
    state: BlochState, dw: float, gamma: float, dt: float
) -> tuple[float, float, float]:
    """Literal Euler-Maruyama increments (dx, dy, dz) of the measurement
    term: dx = -(4 g dt + z sqrt(8g) dW) x, dy likewise,
    dz = (1 - z^2) sqrt(8g) dW.

    The poles are fixed points (dz = 0 at z = +-1); at the origin only z
    diffuses.
    """
    return _core.em_increment(state.x, state.y, state.z, dw, gamma, dt)


def measurement_update(
    state: BlochState, dw: float, gamma: float, dt: float
) -> BlochState:
    """Normalized weak-measurement update (the default integrator).

    Conjugates the state by exp(kappa sigma_z / 2) with
    kappa = 8 g z dt + sqrt(8g) dW and renormalises; agrees with
    :func:`measurement_increment` to O(dt) and maps the Bloch ball into
    itself for every record value.
    """
    x, y, z = _core.kraus_update(state.x, state.y, state.z, dw, gamma, dt)
    return BlochState(x, y, z)


def measurement_current_sample(
    state: BlochState, dw: float, gamma: float, dt: float
) -> float:
    """Dimensionless record increment 4 g z dt + sqrt(2g) dW, with the same
    dW as the paired state update."""
    return _core.current_sample(state.z, dw, gamma, dt)


def step(
    state: BlochState,
    n_g: float,
    params: DeviceParams,
    cfg: StepConfig,
    noise: NoiseStream,
) -> tuple[BlochState, float]:
    """One full conditional-dynamics step under gate bias ``n_g``.

    Exact rotation about (-nu, 0, omega_z(n_g)) over dt, then the
    measurement update with a fresh Wiener increment, then the sphere
    clamp. Returns the new state and this step's measurement-current
    sample. With gamma = 0 the step reduces to the pure rotation.
    """
    wz = omega_z_from_bias(n_g, params)
    c, s, ux, uz = _core.rotation_coefficients(-params.nu, wz, cfg.dt)
    x, y, z = _core.apply_rotation(state.x, state.y, state.z, c, s, ux, uz)
    dw = noise.normal() * math.sqrt(cfg.dt)
    current = _core.current_sample(z, dw, params.gamma, cfg.dt)  # record reads pre-update z
    if cfg.scheme == "kraus":
        x, y, z = _core.kraus_update(x, y, z, dw, params.gamma, cfg.dt)
    else:
        dx, dy, dz = _core.em_increment(x, y, z, dw, params.gamma, cfg.dt)
        x, y, z = x + dx, y + dy, z + dz
    if cfg.renormalization == "clamp":
        x, y, z, _ = _core.clamp_to_sphere(x, y, z)
    return BlochState(x, y, z), current
