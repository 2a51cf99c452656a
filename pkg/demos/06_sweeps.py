"""Sweeping the pulse protocol's knobs: trigger threshold and feedback
latency.

The speed-up as a function of the trigger threshold has a broad plateau:
anywhere between roughly 0.2 and 0.6 performs within a few percent of the
optimum near 1/3, so noisy thresholding is forgiven. Deferring the pulse
by a phase of the Josephson period costs little for small delays and
degrades gracefully; one full period (360 degrees) is almost equivalent
to no delay, because the state returns to the trigger geometry after one
orbit.

Run:  python demos/06_sweeps.py   (several minutes)
"""

from qpurify import DeviceParams, ProtocolSpec, StepConfig, sweep_delay, sweep_zlimit

params = DeviceParams.default()
cfg = StepConfig()
N = 1500
SEED = 6
LEVELS = [1e-2, 1e-3]

print(f"threshold sweep, {N} runs per value, speed-up at impurity 1e-2 / 1e-3")
res = sweep_zlimit(
    [0.1, 0.2, 0.333, 0.5, 0.6, 0.8], LEVELS,
    ProtocolSpec("practical1"), params, cfg, N, SEED,
    t_max=20e-9, target_eps=1e-3,
)
print("  z_limit   S(1e-2)        S(1e-3)")
for i, v in enumerate(res.values):
    cells = []
    for j in range(len(LEVELS)):
        if res.reached[i, j]:
            cells.append(f"{res.speedup[i, j]:.3f}+-{res.stderr[i, j]:.3f}")
        else:
            cells.append("not reached")
    print(f"  {v:7.3f}   {cells[0]:14s} {cells[1]}")
print("  broad optimum around 1/3; very low thresholds retrigger inside the")
print("  noise floor, very high ones fire too late")

print(f"\ndelay sweep at z_limit = 0.333, {N} runs per value")
res = sweep_delay(
    [0.0, 45.0, 90.0, 180.0, 270.0, 315.0], LEVELS,
    ProtocolSpec("practical1", z_limit=0.333), params, cfg, N, SEED,
    t_max=20e-9, target_eps=1e-3,
)
print("  delay_deg  S(1e-2)        S(1e-3)")
for i, v in enumerate(res.values):
    cells = []
    for j in range(len(LEVELS)):
        if res.reached[i, j]:
            cells.append(f"{res.speedup[i, j]:.3f}+-{res.stderr[i, j]:.3f}")
        else:
            cells.append("not reached")
    print(f"  {v:8.0f}   {cells[0]:14s} {cells[1]}")
print("  immediate application wins; near a full period the pulse is almost")
print("  back in phase and most of the performance returns")
