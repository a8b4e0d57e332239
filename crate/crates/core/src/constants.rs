//! Physical constants and fixed design limits shared across the models.

/// Standard gravitational acceleration, m/s^2.
pub const G0: f64 = 9.80665;

/// Sea-level standard pressure, Pa.
pub const P_SEA_LEVEL: f64 = 101_325.0;

/// Specific gas constant of dry air, J/(kg K).
pub const R_AIR: f64 = 287.053;

/// Specific impulse values outside this window indicate a broken model
/// input rather than a bad design; they abort the evaluation.
pub const ISP_SANITY_RANGE_S: (f64, f64) = (200.0, 480.0);

/// Validity range of the engine dry-mass correlation, N of vacuum thrust.
pub const ENGINE_THRUST_RANGE_N: (f64, f64) = (100e3, 3e6);

/// Nozzle exit pressures below this fraction of ambient trigger the
/// flow-separation warning flag.
pub const FLOW_SEPARATION_PRESSURE_RATIO: f64 = 0.3;

/// Minimum lift-off acceleration of the full vehicle, in g.
pub const MIN_ACCEL_FIRST_STAGE_G: f64 = 1.3;

/// Minimum vacuum thrust-to-weight ratio of the loaded upper stage.
pub const MIN_ACCEL_UPPER_STAGE_G: f64 = 0.95;

/// Maximum overall length over first-stage diameter.
pub const MAX_LENGTH_OVER_DIAMETER: f64 = 20.0;

/// Engine count limits per stage.
pub const FIRST_STAGE_ENGINES: (usize, usize) = (5, 15);
pub const UPPER_STAGE_ENGINES: usize = 1;

/// Upper bound on the gas-generator mass-flow fraction; cycles that need
/// more tap-off than this cannot close power-wise.
pub const MAX_GG_MASSFLOW_FRACTION: f64 = 0.2;
