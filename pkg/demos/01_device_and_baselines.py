"""Device constants and the two reference purification curves.

Walks through the closed-form layer of the package: the effective
capacitance of the reference device, the linear bias -> z-rotation-rate
map and its bounded control range, the energy-level structure, and the
two curves every protocol is judged against:

  * the measurement-only average impurity (no Hamiltonian, no feedback),
    evaluated by quadrature, and
  * the exponential decay of the ideal equator-projection protocol.

Run:  python demos/01_device_and_baselines.py
"""

import math

import numpy as np

from qpurify import (
    DeviceParams,
    bias_from_omega_z,
    energy_levels,
    impurity_ideal1,
    impurity_no_hamiltonian,
    omega_z_from_bias,
    speedup,
    tilted_axis_angle,
    time_to_impurity_ideal1,
    time_to_impurity_no_hamiltonian,
)

params = DeviceParams.default()

print("reference device")
print(f"  nu / 2pi          = {params.nu / (2 * math.pi) / 1e9:.1f} GHz")
print(f"  C_J, C_g, C_p     = {params.c_j/1e-18:.1f}, {params.c_g/1e-18:.1f}, {params.c_p/1e-18:.1f} aF")
print(f"  C_q (effective)   = {params.c_q/1e-18:.4f} aF")
print(f"  gamma             = {params.gamma:.3g} 1/s")

print("\nbias control")
print(f"  n_g = 0.5  halts the z-rotation: omega_z = {omega_z_from_bias(0.5, params):.1f}")
upper = bias_from_omega_z(-params.nu, params)
print(f"  |omega_z| = nu at n_g = {upper:.4f}  (pulse-protocol control range 0.5 .. {upper:.4f})")
angle = math.degrees(tilted_axis_angle(omega_z_from_bias(0.70, params), params))
print(f"  lock bias n_g = 0.70 tilts the rotation axis {angle:.1f} deg from x (nearly the z-axis)")

print("\nenergy levels (meV equivalent)")
for n_g in (0.4, 0.5, 0.6):
    lo, hi = energy_levels(n_g, params)
    print(f"  n_g = {n_g:.1f}: splitting = {(hi - lo) / 1.602176634e-19 * 1e3:.4f} meV")

print("\nreference impurity curves")
print("  t_ns   measurement-only   equator-projection")
for t_ns in (0.0, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0):
    t = t_ns * 1e-9
    print(
        f"  {t_ns:5.1f} {impurity_no_hamiltonian(t, params.gamma):16.6f}"
        f" {impurity_ideal1(t, params.gamma):19.6f}"
    )

print("\ntimes to reach a target impurity, and the speed-up bound")
print("  eps      T_baseline(ns)  T_projection(ns)  speed-up")
for eps in (1e-1, 1e-2, 1e-3, 1e-4):
    t2 = time_to_impurity_no_hamiltonian(eps, params.gamma)
    t1 = time_to_impurity_ideal1(eps, params.gamma)
    print(f"  {eps:7.0e} {t2*1e9:14.3f} {t1*1e9:17.3f} {t2/t1:9.4f}")
print("  the ratio climbs toward its limit of 2 as eps shrinks")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ts = np.linspace(0, 20e-9, 400)
    plt.figure(figsize=(6, 4))
    plt.semilogy(ts * 1e9, [impurity_no_hamiltonian(t, params.gamma) for t in ts],
                 label="measurement only")
    plt.semilogy(ts * 1e9, [impurity_ideal1(t, params.gamma) for t in ts],
                 label="equator projection")
    plt.xlabel("t (ns)")
    plt.ylabel("average impurity")
    plt.legend()
    plt.tight_layout()
    plt.savefig("demo01_baselines.png", dpi=120)
    print("\nwrote demo01_baselines.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the plot)")
