"""Compiled scalar primitives and the per-trajectory integration loop.

Everything here is numba-jitted and works on plain floats, so the same
arithmetic serves both the public wrappers (physics/sde/controllers) and
the hot loop in :mod:`qpurify.ensemble`. Keeping a single source for the
step math is what makes the kernel-vs-API equivalence tests exact.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# protocol codes for the trajectory kernel
PROTO_NONE = 0
PROTO_IDEAL1 = 1
PROTO_IDEAL2 = 2
PROTO_PRACTICAL1 = 3
PROTO_PRACTICAL2 = 4

# measurement integrator schemes
SCHEME_KRAUS = 0
SCHEME_EULER = 1

# controller modes
MODE_IDLE = 0
MODE_DELAYING = 1
MODE_PULSING = 2
MODE_LOCKED = 3

# controller event codes for the trigger log
EV_TRIGGER = 1
EV_PULSE_START = 2
EV_PULSE_END = 3
EV_LOCK = 4
EV_DELAY_START = 5


@njit(cache=True)
def rotation_coefficients(omega_x, omega_z, dt):
    """(cos, sin, ux, uz) for a rotation by |omega|*dt about the xz-plane
    axis (omega_x, 0, omega_z)/|omega|. Identity when omega = 0."""
    w = np.sqrt(omega_x * omega_x + omega_z * omega_z)
    if w == 0.0:
        return 1.0, 0.0, 1.0, 0.0
    return np.cos(w * dt), np.sin(w * dt), omega_x / w, omega_z / w


@njit(cache=True)
def apply_rotation(x, y, z, c, s, ux, uz):
    """Rodrigues rotation, exact and length-preserving: v' = v cos + (u x v) sin
    + u (u.v)(1-cos) with u = (ux, 0, uz)."""
    d = (1.0 - c) * (ux * x + uz * z)
    return (
        c * x - s * uz * y + d * ux,
        c * y + s * (uz * x - ux * z),
        c * z + s * ux * y + d * uz,
    )


@njit(cache=True)
def em_increment(x, y, z, dw, gamma, dt):
    """Euler-Maruyama measurement increments (dx, dy, dz).

    dx = -(4 g dt + z sqrt(8g) dW) x, dy likewise, dz = (1-z^2) sqrt(8g) dW.
    This is the literal first-order discretisation; it leaves O(dW^2 - dt)
    additive noise in the purity, so the trajectory loop defaults to
    :func:`kraus_update` instead.
    """
    s8 = np.sqrt(8.0 * gamma)
    f = 4.0 * gamma * dt + z * s8 * dw
    return -f * x, -f * y, (1.0 - z * z) * s8 * dw


@njit(cache=True)
def kraus_update(x, y, z, dw, gamma, dt):
    """Normalized weak-measurement update over one step.

    Applies exp(kappa sigma_z / 2) rho exp(kappa sigma_z / 2) / norm with
    kappa = 8 g z dt + sqrt(8g) dW, the record-conditioned measurement
    operator. Ito expansion reproduces :func:`em_increment` to O(dt); the
    map is completely positive, keeps the state inside the Bloch ball for
    any dW, holds pure states exactly pure and fixes the poles.
    """
    kappa = 8.0 * gamma * z * dt + np.sqrt(8.0 * gamma) * dw
    ek = np.exp(kappa)
    iek = 1.0 / ek
    ch = 0.5 * (ek + iek)
    sh = 0.5 * (ek - iek)
    den = ch + z * sh
    return x / den, y / den, (z * ch + sh) / den


@njit(cache=True)
def current_sample(z, dw, gamma, dt):
    """Dimensionless measurement-record increment 4 g z dt + sqrt(2g) dW."""
    return 4.0 * gamma * z * dt + np.sqrt(2.0 * gamma) * dw


@njit(cache=True)
def ideal1_decay(x, y, z, gamma, dt):
    """One step of the equator-projection protocol in its continuous-feedback
    limit: impurity decays by exp(-8 g dt) exactly and the state sits on the
    +x side pole of its Bloch length. Deterministic by construction (the
    continuously applied projection cancels the measurement noise)."""
    r2 = x * x + y * y + z * z
    r2n = 1.0 - (1.0 - r2) * np.exp(-8.0 * gamma * dt)
    return np.sqrt(r2n), 0.0, 0.0


@njit(cache=True)
def project_to_pole(x, y, z):
    """Rotate onto the measurement axis preserving Bloch length; +z pole on
    the z = 0 tie."""
    r = np.sqrt(x * x + y * y + z * z)
    if z >= 0.0:
        return 0.0, 0.0, r
    return 0.0, 0.0, -r


@njit(cache=True)
def clamp_to_sphere(x, y, z):
    """Rescale onto the unit sphere if the step overshot it; returns the
    (possibly unchanged) coordinates and 1 when clamping fired."""
    r2 = x * x + y * y + z * z
    if r2 > 1.0:
        inv = 1.0 / np.sqrt(r2)
        return x * inv, y * inv, z * inv, 1
    return x, y, z, 0


@njit(cache=True)
def pulse_scalars(z_trigger, bloch_len, s_x, s_z, nu, bias_slope):
    """(alpha, omega_z, n_g, tau) of the pi-pulse for a trigger at
    |z| = z_trigger with Bloch length bloch_len in the (s_x, s_z) quadrant.

    omega_z is round-tripped through n_g so that replaying the plan through
    the bias mapping reproduces bit-identical rotation rates.
    """
    alpha = 0.5 * np.arcsin(z_trigger / bloch_len)
    wz_geom = -s_x * s_z * nu * np.tan(alpha)
    n_g = 0.5 - wz_geom / bias_slope
    omega_z = bias_slope * (0.5 - n_g)
    tau = np.pi / np.sqrt(nu * nu + omega_z * omega_z)
    return alpha, omega_z, n_g, tau


@njit(cache=True)
def practical1_transition(
    x, y, z, mode, steps_remaining, pulse_wz, pulse_steps,
    z_limit, delay_steps, nu, bias_slope, dt,
):
    """One controller tick of the pulse-to-x-axis protocol.

    Returns (omega_z for this step, mode, steps_remaining, pulse_wz,
    pulse_steps, event). Idle below threshold emits omega_z = 0; a trigger
    plans the pulse from the actual |z| (which may slightly exceed the
    threshold) and either starts pulsing or waits out the configured phase
    delay; a new trigger is only accepted back in idle.
    """
    event = 0
    if mode == MODE_IDLE:
        az = np.abs(z)
        if az >= z_limit:
            r = np.sqrt(x * x + y * y + z * z)
            zp = az if az < r else r  # az <= r always holds; defensive
            sx = 1.0 if x >= 0.0 else -1.0
            sz = 1.0 if z >= 0.0 else -1.0
            alpha, wz, n_g, tau = pulse_scalars(zp, r, sx, sz, nu, bias_slope)
            ps = int(round(tau / dt))
            if ps < 1:
                ps = 1
            pulse_wz = wz
            pulse_steps = ps
            if delay_steps > 0:
                mode = MODE_DELAYING
                steps_remaining = delay_steps
                return 0.0, mode, steps_remaining, pulse_wz, pulse_steps, EV_DELAY_START
            mode = MODE_PULSING
            steps_remaining = ps
            event = EV_PULSE_START
        else:
            return 0.0, mode, steps_remaining, pulse_wz, pulse_steps, 0
    elif mode == MODE_DELAYING:
        steps_remaining -= 1
        if steps_remaining <= 0:
            mode = MODE_PULSING
            steps_remaining = pulse_steps
            event = EV_PULSE_START
        else:
            return 0.0, mode, steps_remaining, pulse_wz, pulse_steps, 0
    if mode == MODE_PULSING:
        steps_remaining -= 1
        if steps_remaining <= 0:
            mode = MODE_IDLE
            steps_remaining = 0
            event = EV_PULSE_END
        return pulse_wz, mode, steps_remaining, pulse_wz, pulse_steps, event
    return 0.0, mode, steps_remaining, pulse_wz, pulse_steps, event


@njit(cache=True)
def practical2_transition(z, mode, prev_abs_z, noninc, z_limit, wz_lock, peak_window):
    """One controller tick of the lock-on protocol.

    Locks at the first step where |z| is above threshold and has stopped
    increasing for ``peak_window`` consecutive comparisons (discrete peak
    detection); locked is absorbing and emits the fixed lock rotation rate.
    Returns (omega_z, mode, prev_abs_z, noninc, event).
    """
    if mode == MODE_LOCKED:
        return wz_lock, mode, prev_abs_z, noninc, 0
    az = np.abs(z)
    if az <= prev_abs_z:
        noninc += 1
    else:
        noninc = 0
    prev_abs_z = az
    if az >= z_limit and noninc >= peak_window:
        mode = MODE_LOCKED
        return wz_lock, mode, prev_abs_z, noninc, EV_LOCK
    return 0.0, mode, prev_abs_z, noninc, 0


@njit(cache=True)
def trajectory_kernel(
    kind, scheme,
    x0, y0, z0,
    nu, bias_slope, gamma, dt,
    n_steps, stride,
    z_limit, n_g_lock, delay_steps, peak_window,
    target_eps,
    normals,
    out_impurity,
    out_event_step, out_event_code,
):
    """Integrate one trajectory and sample impurity every ``stride`` steps.

    Per step: controller tick (practical protocols), exact Hamiltonian
    rotation with omega = (-nu, 0, omega_z), measurement update per
    ``scheme``, projection (ideal protocols), clamp. The equator-projection
    protocol runs its deterministic continuous-feedback limit and consumes
    no noise. Returns (first_passage_sample_index or -1, clamp_count,
    n_events, x, y, z).
    """
    x, y, z = x0, y0, z0
    sqdt = np.sqrt(dt)

    c0, s0, ux0, uz0 = rotation_coefficients(-nu, 0.0, dt)  # free evolution
    wz_lock = bias_slope * (0.5 - n_g_lock)
    cl, sl, uxl, uzl = rotation_coefficients(-nu, wz_lock, dt)
    # pulse coefficients, refreshed whenever the commanded rate changes
    active_wz = 0.0
    cp, sp, uxp, uzp = c0, s0, ux0, uz0

    mode = MODE_IDLE
    steps_remaining = 0
    pulse_wz = 0.0
    pulse_steps = 0
    prev_abs_z = np.abs(z0)
    noninc = 0

    clamps = 0
    n_events = 0
    ev_cap = out_event_step.shape[0]

    fp_idx = -1
    out_impurity[0] = 0.5 * (1.0 - (x * x + y * y + z * z))
    if out_impurity[0] <= target_eps:
        fp_idx = 0
    si = 1

    for i in range(n_steps):
        # controller: pick this step's z-rotation rate
        event = 0
        if kind == PROTO_PRACTICAL1:
            old_mode = mode
            wz, mode, steps_remaining, pulse_wz, pulse_steps, event = practical1_transition(
                x, y, z, mode, steps_remaining, pulse_wz, pulse_steps,
                z_limit, delay_steps, nu, bias_slope, dt,
            )
            if old_mode == MODE_IDLE and mode != MODE_IDLE:
                if n_events < ev_cap:
                    out_event_step[n_events] = i
                    out_event_code[n_events] = EV_TRIGGER
                n_events += 1
        elif kind == PROTO_PRACTICAL2:
            wz, mode, prev_abs_z, noninc, event = practical2_transition(
                z, mode, prev_abs_z, noninc, z_limit, wz_lock, peak_window,
            )
        else:
            wz = 0.0
        if event != 0:
            if n_events < ev_cap:
                out_event_step[n_events] = i
                out_event_code[n_events] = event
            n_events += 1

        # Hamiltonian rotation (disabled for the ideal protocols)
        if kind == PROTO_NONE:
            x, y, z = apply_rotation(x, y, z, c0, s0, ux0, uz0)
        elif kind == PROTO_PRACTICAL1:
            if wz == 0.0:
                x, y, z = apply_rotation(x, y, z, c0, s0, ux0, uz0)
            else:
                if wz != active_wz:
                    cp, sp, uxp, uzp = rotation_coefficients(-nu, wz, dt)
                    active_wz = wz
                x, y, z = apply_rotation(x, y, z, cp, sp, uxp, uzp)
        elif kind == PROTO_PRACTICAL2:
            if mode == MODE_LOCKED:
                x, y, z = apply_rotation(x, y, z, cl, sl, uxl, uzl)
            else:
                x, y, z = apply_rotation(x, y, z, c0, s0, ux0, uz0)

        # measurement
        if kind == PROTO_IDEAL1:
            x, y, z = ideal1_decay(x, y, z, gamma, dt)
        else:
            dw = normals[i] * sqdt
            if scheme == SCHEME_KRAUS:
                x, y, z = kraus_update(x, y, z, dw, gamma, dt)
            else:
                dx, dy, dz = em_increment(x, y, z, dw, gamma, dt)
                x += dx
                y += dy
                z += dz
            if kind == PROTO_IDEAL2:
                x, y, z = project_to_pole(x, y, z)
            x, y, z, hit = clamp_to_sphere(x, y, z)
            clamps += hit

        if (i + 1) % stride == 0:
            imp = 0.5 * (1.0 - (x * x + y * y + z * z))
            out_impurity[si] = imp
            if fp_idx < 0 and imp <= target_eps:
                fp_idx = si
            si += 1

    return fp_idx, clamps, n_events, x, y, z
