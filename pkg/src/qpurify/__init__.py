"""Monte Carlo toolkit for rapid-purification feedback protocols on a
continuously measured superconducting charge qubit.

The package simulates the conditional Bloch-vector dynamics of a charge
qubit under continuous weak z-measurement and a fixed Josephson x-rotation,
runs the five feedback protocols (none, the two ideal projections and the
two bias-control protocols), and collects the statistics used to compare
them: averaged impurity transients, speed-up curves, first-passage-time
histograms, impurity snapshots and parameter sweeps.
"""

__version__ = "0.1.0"

from .baseline import (
    QuadratureConfig,
    impurity_ideal1,
    impurity_no_hamiltonian,
    speedup,
    time_to_impurity_ideal1,
    time_to_impurity_no_hamiltonian,
)
from .controllers import (
    PROTOCOLS,
    ControllerState,
    ProtocolSpec,
    control_none,
    control_practical1,
    control_practical2,
    initial_controller_state,
    project_ideal1,
    project_ideal2,
)
from .ensemble import (
    EnsembleStats,
    Histogram,
    SpeedupCurve,
    SweepResult,
    TrajectoryResult,
    first_passage_histogram,
    impurity_at_time_histogram,
    invert_transient,
    run_ensemble,
    run_trajectory,
    speedup_curve,
    sweep_delay,
    sweep_zlimit,
)
from .physics import (
    BlochState,
    DeviceParams,
    PulsePlan,
    bias_from_omega_z,
    bloch_length,
    effective_capacitance,
    energy_levels,
    feedback_axis_angle,
    impurity,
    omega_z_from_bias,
    pulse_plan,
    tilted_axis_angle,
)
from .sde import (
    NoiseStream,
    StepConfig,
    hamiltonian_rotation,
    measurement_current_sample,
    measurement_increment,
    measurement_update,
    mix_seed,
    step,
)

__all__ = [
    "__version__",
    "BlochState", "DeviceParams", "PulsePlan", "QuadratureConfig",
    "ProtocolSpec", "ControllerState", "StepConfig", "NoiseStream",
    "TrajectoryResult", "EnsembleStats", "Histogram", "SpeedupCurve", "SweepResult",
    "PROTOCOLS",
    "effective_capacitance", "omega_z_from_bias", "bias_from_omega_z",
    "energy_levels", "impurity", "bloch_length", "feedback_axis_angle",
    "pulse_plan", "tilted_axis_angle",
    "hamiltonian_rotation", "measurement_increment", "measurement_update",
    "measurement_current_sample", "step", "mix_seed",
    "control_none", "control_practical1", "control_practical2",
    "project_ideal1", "project_ideal2", "initial_controller_state",
    "impurity_no_hamiltonian", "impurity_ideal1",
    "time_to_impurity_no_hamiltonian", "time_to_impurity_ideal1", "speedup",
    "run_trajectory", "run_ensemble", "speedup_curve", "invert_transient",
    "first_passage_histogram", "impurity_at_time_histogram",
    "sweep_zlimit", "sweep_delay",
]
