//! Mission definitions: payload and the delta-v budget the vehicle must
//! deliver, including the conventional loss allowances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MissionError {
    #[error("unknown mission `{0}` (built in: GTO, LEO)")]
    Unknown(String),
    #[error("mission `{name}`: {problem}")]
    Invalid { name: String, problem: String },
}

/// One contributor to the gap between ideal and budgeted delta-v.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LossComponent {
    pub name: String,
    /// Conventional allowance, m/s.
    pub min_mps: f64,
    pub max_mps: f64,
}

/// A mission the optimizer designs against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MissionSpec {
    pub name: String,
    pub target_orbit: String,
    /// Payload mass, kg.
    pub payload_mass: f64,
    /// Orbit energy requirement without losses, m/s.
    pub dv_ideal: f64,
    /// Budget the vehicle must actually deliver, m/s; includes losses and
    /// the launch-site rotation credit.
    pub dv_total: f64,
    /// Velocity gained from the launch site's earth rotation, m/s.
    pub rotation_credit: f64,
    pub losses: Vec<LossComponent>,
}

impl MissionSpec {
    pub fn validate(&self) -> Result<(), MissionError> {
        let fail = |problem: &str| {
            Err(MissionError::Invalid {
                name: self.name.clone(),
                problem: problem.to_string(),
            })
        };
        if self.payload_mass <= 0.0 {
            return fail("payload must be positive");
        }
        if self.dv_ideal <= 0.0 || self.dv_total <= 0.0 {
            return fail("delta-v entries must be positive");
        }
        // The budget exceeds the ideal requirement minus the rotation
        // credit: losses never pay you back.
        if self.dv_total < self.dv_ideal - self.rotation_credit {
            return fail("budget below the lossless requirement");
        }
        let (lo, hi) = self.loss_window();
        let implied = self.dv_total - (self.dv_ideal - self.rotation_credit);
        if implied < lo * 0.5 || implied > hi * 2.0 {
            return fail("implied losses far outside the stated allowances");
        }
        Ok(())
    }

    /// Sum of the stated loss allowances, (min, max) m/s.
    pub fn loss_window(&self) -> (f64, f64) {
        self.losses
            .iter()
            .fold((0.0, 0.0), |(lo, hi), l| (lo + l.min_mps, hi + l.max_mps))
    }

    /// Losses implied by the budget, m/s.
    pub fn implied_losses(&self) -> f64 {
        self.dv_total - (self.dv_ideal - self.rotation_credit)
    }
}

/// The conventional loss allowances for an ascent of the given ideal
/// delta-v; the safety margin scales with the requirement.
pub fn standard_losses(dv_ideal: f64) -> Vec<LossComponent> {
    let loss = |name: &str, min_mps: f64, max_mps: f64| LossComponent {
        name: name.to_string(),
        min_mps,
        max_mps,
    };
    vec![
        loss("gravity", 1000.0, 1500.0),
        loss("aerodynamic drag", 100.0, 150.0),
        loss("maneuvers", 15.0, 15.0),
        loss("safety margin", 0.01 * dv_ideal, 0.02 * dv_ideal),
    ]
}

/// Geostationary transfer, 200 km x 35786 km, from a near-equatorial site.
pub fn gto() -> MissionSpec {
    MissionSpec {
        name: "GTO".to_string(),
        target_orbit: "200 km x 35786 km".to_string(),
        payload_mass: 5000.0,
        dv_ideal: 10_430.0,
        dv_total: 12_000.0,
        rotation_credit: 460.0,
        losses: standard_losses(10_430.0),
    }
}

/// Low earth orbit, 200 km circular.
pub fn leo() -> MissionSpec {
    MissionSpec {
        name: "LEO".to_string(),
        target_orbit: "200 km x 200 km".to_string(),
        payload_mass: 15_600.0,
        dv_ideal: 8_030.0,
        dv_total: 9_500.0,
        rotation_credit: 460.0,
        losses: standard_losses(8_030.0),
    }
}

pub fn builtin(name: &str) -> Result<MissionSpec, MissionError> {
    match name.trim().to_ascii_uppercase().as_str() {
        "GTO" => Ok(gto()),
        "LEO" => Ok(leo()),
        other => Err(MissionError::Unknown(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_missions_are_valid_and_match_the_requirements() {
        for mission in [gto(), leo()] {
            mission.validate().unwrap();
        }
        assert_eq!(gto().payload_mass, 5000.0);
        assert_eq!(gto().dv_total, 12_000.0);
        assert_eq!(leo().payload_mass, 15_600.0);
        assert_eq!(leo().dv_total, 9_500.0);
    }

    #[test]
    fn implied_losses_are_near_the_stated_allowances() {
        // The budgets round up a little past the nominal loss maxima; keep
        // them within ~15% so a typo in either place is caught.
        for mission in [gto(), leo()] {
            let (lo, hi) = mission.loss_window();
            let implied = mission.implied_losses();
            assert!(
                implied >= lo && implied <= 1.15 * hi,
                "{}: implied {implied} outside [{lo}, {}]",
                mission.name,
                1.15 * hi
            );
        }
    }

    #[test]
    fn unknown_mission_is_reported() {
        assert!(matches!(builtin("SSO"), Err(MissionError::Unknown(_))));
        assert!(builtin("gto").is_ok());
    }

    #[test]
    fn inconsistent_budgets_are_rejected() {
        let mut m = gto();
        m.dv_total = 9_000.0; // below ideal minus rotation credit
        assert!(m.validate().is_err());
        let mut m = gto();
        m.dv_total = 16_000.0; // implies absurd losses
        assert!(m.validate().is_err());
    }
}
