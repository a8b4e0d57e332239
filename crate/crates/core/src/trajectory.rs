//! Two-dimensional ascent simulation with a prescribed gravity turn.
//!
//! The vehicle is a point mass on a flat earth with constant gravity. It
//! rises vertically to the turn start altitude, pitches over at a constant
//! rate to the final pitch angle and holds it until the ascent propellant
//! is spent. The point of the exercise is the trajectory-weighted mean
//! specific impulse of the booster, which feeds back into staging.

use serde::Serialize;
use thiserror::Error;

use crate::constants::{G0, P_SEA_LEVEL, R_AIR};
use crate::propellants::EnginePerformance;

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("vehicle cannot lift off: thrust-to-weight ratio {twr:.3} at the pad")]
    LiftoffFailure { twr: f64 },
    #[error("ascent burn of {burn_time:.0} s exceeds the {limit:.0} s budget")]
    BurnTimeExceeded { burn_time: f64, limit: f64 },
}

/// Ambient air model; altitudes in geometric meters above the pad.
pub trait Atmosphere: Sync {
    fn pressure(&self, altitude: f64) -> f64;
    fn density(&self, altitude: f64) -> f64;
}

/// US Standard Atmosphere 1976, barometric layers up to 86 km geometric;
/// vacuum above.
#[derive(Debug, Clone, Copy, Default)]
pub struct UsStandard1976;

/// (base geopotential altitude m, base temperature K, lapse rate K/m,
/// base pressure Pa)
const LAYERS: [(f64, f64, f64, f64); 7] = [
    (0.0, 288.15, -0.0065, 101_325.0),
    (11_000.0, 216.65, 0.0, 22_632.06),
    (20_000.0, 216.65, 0.001, 5_474.889),
    (32_000.0, 228.65, 0.0028, 868.0187),
    (47_000.0, 270.65, 0.0, 110.9063),
    (51_000.0, 270.65, -0.0028, 66.93887),
    (71_000.0, 214.65, -0.002, 3.956420),
];

/// Geopotential top of the table (86 km geometric).
const TOP: f64 = 84_852.0;
const EARTH_RADIUS: f64 = 6_356_766.0;

impl UsStandard1976 {
    fn temperature_pressure(&self, altitude: f64) -> (f64, f64) {
        let h = EARTH_RADIUS * altitude.max(0.0) / (EARTH_RADIUS + altitude.max(0.0));
        if h >= TOP {
            return (186.87, 0.0);
        }
        let layer = LAYERS
            .iter()
            .rev()
            .find(|(base, ..)| h >= *base)
            .expect("bottom layer starts at 0");
        let (base, t_base, lapse, p_base) = *layer;
        let dh = h - base;
        if lapse == 0.0 {
            let p = p_base * (-G0 * dh / (R_AIR * t_base)).exp();
            (t_base, p)
        } else {
            let t = t_base + lapse * dh;
            let p = p_base * (t / t_base).powf(-G0 / (R_AIR * lapse));
            (t, p)
        }
    }
}

impl Atmosphere for UsStandard1976 {
    fn pressure(&self, altitude: f64) -> f64 {
        self.temperature_pressure(altitude).1
    }

    fn density(&self, altitude: f64) -> f64 {
        let (t, p) = self.temperature_pressure(altitude);
        p / (R_AIR * t)
    }
}

/// Gravity turn prescription.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GravityTurnConfig {
    /// Altitude at which the pitch-over starts, m.
    pub turn_start_altitude: f64,
    /// Pitch angle held after the turn, degrees above horizontal.
    pub final_pitch_deg: f64,
    /// Constant pitch rate during the turn, degrees per second.
    pub pitch_rate_deg_per_s: f64,
    /// Integration step, s.
    pub time_step: f64,
}

impl Default for GravityTurnConfig {
    fn default() -> Self {
        GravityTurnConfig {
            turn_start_altitude: 250.0,
            final_pitch_deg: 25.0,
            pitch_rate_deg_per_s: 0.45,
            time_step: 1.0,
        }
    }
}

/// Optional aerodynamic drag; off by default since the loss budget already
/// carries a drag allowance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DragConfig {
    pub drag_coefficient: f64,
    /// Reference area, m^2.
    pub reference_area: f64,
}

/// Ascent burn limit; longer burns indicate a diverged design.
pub const MAX_BURN_TIME: f64 = 1000.0;

pub struct AscentInputs<'a> {
    /// Mass on the pad, kg.
    pub liftoff_mass: f64,
    /// First-stage propellant burned during ascent, kg.
    pub ascent_propellant: f64,
    pub engine: &'a EnginePerformance,
    pub engine_count: usize,
    pub turn: GravityTurnConfig,
    pub drag: Option<DragConfig>,
    /// Keep per-step samples in the result.
    pub record: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub altitude: f64,
    pub downrange: f64,
    pub velocity: f64,
    pub pitch_deg: f64,
    pub mass: f64,
    pub isp: f64,
    /// Thrust acceleration in units of g0.
    pub acceleration_g: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryResult {
    /// Main engine cut-off time, s.
    pub burn_time: f64,
    /// Massflow-weighted mean specific impulse of the ascent, s.
    pub mean_isp: f64,
    /// Minimum thrust acceleration over the burn, in g0 (the lift-off
    /// value for any physical design).
    pub min_acceleration_g: f64,
    pub final_altitude: f64,
    pub final_velocity: f64,
    pub final_pitch_deg: f64,
    pub samples: Vec<TrajectorySample>,
}

/// Fly the booster until its ascent propellant is spent.
pub fn simulate_ascent(
    inputs: &AscentInputs,
    atmosphere: &dyn Atmosphere,
) -> Result<TrajectoryResult, TrajectoryError> {
    let n = inputs.engine_count as f64;
    let massflow = n * inputs.engine.total_massflow;
    let burn_time = inputs.ascent_propellant / massflow;
    if burn_time > MAX_BURN_TIME {
        return Err(TrajectoryError::BurnTimeExceeded {
            burn_time,
            limit: MAX_BURN_TIME,
        });
    }

    let pad_twr =
        n * inputs.engine.thrust(P_SEA_LEVEL) / (inputs.liftoff_mass * G0);
    if pad_twr <= 1.0 {
        return Err(TrajectoryError::LiftoffFailure { twr: pad_twr });
    }

    let dt_nominal = inputs.turn.time_step;
    let mut t = 0.0;
    let mut mass = inputs.liftoff_mass;
    let mut altitude = 0.0;
    let mut downrange = 0.0;
    let mut velocity = 0.0;
    let mut pitch = 90.0_f64;
    let mut turning = false;

    let mut isp_integral = 0.0;
    let mut min_acceleration: f64 = f64::INFINITY;
    let mut samples = Vec::new();

    while t < burn_time {
        let dt = dt_nominal.min(burn_time - t);

        let pressure = atmosphere.pressure(altitude);
        let thrust = n * inputs.engine.thrust(pressure);
        let isp = inputs.engine.isp(pressure);
        let accel_g = thrust / (mass * G0);
        min_acceleration = min_acceleration.min(accel_g);
        isp_integral += isp * dt;

        if inputs.record {
            samples.push(TrajectorySample {
                time: t,
                altitude,
                downrange,
                velocity,
                pitch_deg: pitch,
                mass,
                isp,
                acceleration_g: accel_g,
            });
        }

        let drag = match &inputs.drag {
            Some(d) => {
                0.5 * atmosphere.density(altitude)
                    * velocity
                    * velocity
                    * d.drag_coefficient
                    * d.reference_area
            }
            None => 0.0,
        };

        let pitch_rad = pitch.to_radians();
        let acceleration =
            thrust / mass - G0 * pitch_rad.sin() - drag / mass * velocity.signum();

        altitude += velocity * pitch_rad.sin() * dt;
        downrange += velocity * pitch_rad.cos() * dt;
        velocity += acceleration * dt;
        mass -= massflow * dt;
        t += dt;

        if !turning && altitude >= inputs.turn.turn_start_altitude {
            turning = true;
        }
        if turning {
            pitch = (pitch - inputs.turn.pitch_rate_deg_per_s * dt)
                .max(inputs.turn.final_pitch_deg);
        }
    }

    Ok(TrajectoryResult {
        burn_time,
        mean_isp: isp_integral / burn_time,
        min_acceleration_g: min_acceleration,
        final_altitude: altitude,
        final_velocity: velocity,
        final_pitch_deg: pitch,
        samples,
    })
}
