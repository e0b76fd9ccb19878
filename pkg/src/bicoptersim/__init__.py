"""Software-in-the-loop simulator and control toolkit for a bicopter UAV."""

from .control import (
    FLIGHT_GAINS,
    GAIN_PRESETS,
    TESTBED_GAINS,
    AttitudeController,
    ControlScales,
    MixerOutput,
    PidGains,
    PidState,
    Setpoints,
    attitude_error,
    mixer,
    pid_step,
    servo_to_tilt,
    throttle_to_omega,
)
from .dynamics import (
    ActuatorBank,
    ActuatorCommand,
    ActuatorLimits,
    BicopterParams,
    BodyForces,
    ControlVector,
    Diverged,
    ExternalDisturbance,
    RigidBodyState,
    accelerations,
    allocate,
    body_forces,
    control_vector,
    step,
)
from .rotation import (
    EulerAngles,
    GravityVector,
    Quaternion,
    euler_to_quat,
    integrate_gyro,
    normalize,
    quat_to_euler,
    quat_to_gravity,
    wrap_angle,
)
from .scenario import (
    RmseReport,
    Scenario,
    ScenarioError,
    ScenarioResult,
    ScheduleEntry,
    Simulation,
    TelemetryRecord,
    compute_report,
    presets,
    rmse,
    run_scenario,
    write_csv,
)
from .sensing import (
    ComplementaryFilter,
    FilterConfig,
    ImuSample,
    ImuSimulator,
    NoiseModel,
    QuaternionFusion,
    accel_to_angles,
    alpha_from_cutoff,
    hpf_step,
    lpf_step,
)
from .tuning import (
    DesiredCharacteristic,
    DoubleIntegratorPlant,
    char_poly_from_gains,
    cltf_step_response,
    gains_from_characteristic,
    plant_from_params,
    poles,
    simulate_pd_step,
)
from .wind import WindField, WindSpec, drag_force

__version__ = "0.1.0"
