"""Device model and closed-form feedback geometry for a voltage-biased
charge qubit.

The qubit is a superconducting island coupled to a bulk electrode through
a Josephson junction with fixed tunnelling rate ``nu`` (a sigma_x term in
the two-level Hamiltonian). The dimensionless gate charge ``n_g`` sets the
sigma_z rotation rate linearly; ``n_g = 0.5`` halts z-rotation. All
quantities are SI internally: seconds, farads, rad/s, joules.

Rotation convention used throughout the package: the Bloch vector obeys
``dv/dt = omega x v`` with ``omega = (-nu, 0, omega_z)``; the minus sign
on the x-component comes from the ``-(hbar*nu/2) sigma_x`` term of the
two-level Hamiltonian. With that convention a feedback pulse planned in
the (+x, +z) quadrant carries a bias above 0.5, which is what bounds the
control range to ``0.5 <= n_g <= 0.5323`` for the default device.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._core import pulse_scalars

HBAR = 1.054571817e-34   # J s
E_CHARGE = 1.602176634e-19  # C


def effective_capacitance(c_j: float, c_g: float, c_p: float) -> float:
    """Effective qubit capacitance from the three physical capacitances.

    ``c_j`` is the junction capacitance, ``c_g`` couples the island to the
    grounded electrode and ``c_p`` is the parasitic capacitance between
    the bulk electrodes. All in farads.
    """
    if c_j <= 0.0 or c_g <= 0.0 or c_p < 0.0:
        raise ValueError("capacitances must be positive (parasitic may be zero)")
    return (c_g * c_j + c_j * c_p + c_p * c_g) / (c_g + c_p)


@dataclass(frozen=True)
class DeviceParams:
    """Fixed device constants.

    nu      angular Josephson tunnelling rate, rad/s (10 GHz device:
            nu = 2*pi*1e10)
    c_j, c_g, c_p   capacitances, farads
    gamma   measurement strength, 1/s
    """

    nu: float
    c_j: float
    c_g: float
    c_p: float
    gamma: float

    def __post_init__(self):
        if self.nu <= 0.0:
            raise ValueError("nu must be positive")
        if self.gamma < 0.0:
            raise ValueError("gamma must be non-negative")
        if self.c_p <= 0.0:
            raise ValueError("capacitances must be positive")
        effective_capacitance(self.c_j, self.c_g, self.c_p)  # validates the rest

    @property
    def c_q(self) -> float:
        """Effective capacitance, recomputed from the stored values."""
        return effective_capacitance(self.c_j, self.c_g, self.c_p)

    @property
    def bias_slope(self) -> float:
        """Coefficient (2e)^2 / (hbar * C_q) mapping bias offset to omega_z."""
        return (2.0 * E_CHARGE) ** 2 / (HBAR * self.c_q)

    @classmethod
    def default(cls) -> "DeviceParams":
        """The reference device: 10 GHz junction, 500/0.5/1.0 aF, gamma 7.5e7/s."""
        return cls(
            nu=2.0 * math.pi * 1.0e10,
            c_j=500e-18,
            c_g=0.5e-18,
            c_p=1.0e-18,
            gamma=7.5e7,
        )


@dataclass(frozen=True)
class BlochState:
    """Conditional qubit state in Cartesian Bloch coordinates."""

    x: float
    y: float
    z: float

    _LEN_TOL = 1e-9

    def __post_init__(self):
        if self.x * self.x + self.y * self.y + self.z * self.z > 1.0 + self._LEN_TOL:
            raise ValueError("Bloch vector length exceeds 1")

    @property
    def length(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @property
    def impurity(self) -> float:
        return 0.5 * (1.0 - (self.x * self.x + self.y * self.y + self.z * self.z))


MIXED_STATE = BlochState(0.0, 0.0, 0.0)


def impurity(state: BlochState) -> float:
    """Impurity L = (1 - x^2 - y^2 - z^2)/2, in [0, 0.5].

    Zero for pure states, 0.5 for the completely mixed state.
    """
    return state.impurity


def bloch_length(state: BlochState) -> float:
    return state.length


def omega_z_from_bias(n_g: float, params: DeviceParams) -> float:
    """z-rotation rate for a given gate bias: (2e)^2/(hbar C_q) * (1/2 - n_g).

    Positive for n_g < 0.5, zero at the degeneracy point.
    """
    return params.bias_slope * (0.5 - n_g)


def bias_from_omega_z(omega_z: float, params: DeviceParams) -> float:
    """Inverse of :func:`omega_z_from_bias`."""
    return 0.5 - omega_z / params.bias_slope


def energy_levels(n_g: float, params: DeviceParams) -> tuple[float, float]:
    """Two-level energies (E_minus, E_plus) in joules at gate bias n_g.

    The bias-independent identity term of the Hamiltonian is omitted; it
    does not affect the dynamics. The splitting has its minimum hbar*nu
    at n_g = 0.5 and is symmetric about that point.
    """
    e_el = (2.0 * E_CHARGE) ** 2 / params.c_q * (0.5 - n_g)
    half = 0.5 * math.hypot(e_el, HBAR * params.nu)
    return (-half, half)


def feedback_axis_angle(z_limit: float, bloch_len: float) -> float:
    """Tilt angle of the pulsed rotation axis, alpha = asin(z_limit/r)/2.

    Planned so that a pi-rotation about the axis (cos a, 0, sin a) carries
    the point (sqrt(r^2 - z_limit^2), 0, z_limit) onto (r, 0, 0). Bounded
    by 45 degrees (z_limit = r) from below by asin(z_limit)/2 (r = 1).
    """
    if not 0.0 < z_limit <= bloch_len <= 1.0:
        raise ValueError(
            "pulse geometry requires 0 < z_limit <= bloch_len <= 1 "
            f"(got z_limit={z_limit}, bloch_len={bloch_len})"
        )
    return 0.5 * math.asin(z_limit / bloch_len)


@dataclass(frozen=True)
class PulsePlan:
    """One bias pulse that pi-rotates the Bloch vector onto the x-axis.

    alpha    tilt of the rotation axis from the x-axis, radians, in (0, pi/4]
    omega_z  signed z-rotation rate during the pulse, rad/s; the rotation
             vector is (-nu, 0, omega_z)
    n_g      gate bias realising omega_z
    tau      pulse duration pi/sqrt(nu^2 + omega_z^2), seconds
    target_x_sign  +-1, the x-pole the pulse aims at (same side as the
             triggering state's x)
    """

    alpha: float
    omega_z: float
    n_g: float
    tau: float
    target_x_sign: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 0.25 * math.pi + 1e-12:
            raise ValueError("pulse axis angle must lie in (0, pi/4]")
        if self.tau <= 0.0:
            raise ValueError("pulse duration must be positive")


def pulse_plan(
    z_limit: float,
    bloch_len: float,
    x_sign: float,
    z_sign: float,
    params: DeviceParams,
) -> PulsePlan:
    """Plan the bias pulse for a state triggering at |z| = z_limit.

    ``x_sign``/``z_sign`` are the signs of the triggering state's x and z
    (x_sign = +1 when x = 0). The axis is tilted by x_sign*z_sign*alpha in
    the xz-plane, which lands the trigger point on (x_sign*r, 0, 0) for
    any quadrant; the x-axis is invariant under either rotation sense.
    """
    alpha = feedback_axis_angle(z_limit, bloch_len)  # validates the geometry
    sx = 1.0 if x_sign >= 0.0 else -1.0
    sz = 1.0 if z_sign >= 0.0 else -1.0
    alpha, omega_z, n_g, tau = pulse_scalars(
        z_limit, bloch_len, sx, sz, params.nu, params.bias_slope
    )
    return PulsePlan(alpha=alpha, omega_z=omega_z, n_g=n_g, tau=tau, target_x_sign=sx)


def tilted_axis_angle(omega_z: float, params: DeviceParams) -> float:
    """Angle of the rotation axis from the x-axis, atan(|omega_z|/nu).

    Monotone in |omega_z| and asymptoting to 90 degrees for strong bias;
    used by the lock-on protocol to judge how close to the measurement
    axis the locked rotation axis sits.
    """
    return math.atan2(abs(omega_z), params.nu)
