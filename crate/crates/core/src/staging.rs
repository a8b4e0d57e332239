//! Closed-form staging relations.
//!
//! Both stages are sized from the rocket equation rewritten in terms of the
//! structural coefficient eps = m_s / (m_s + m_p). The upper stage carries
//! an effective payload and is expended; the first stage additionally
//! reserves propellant to fly its structure through the descent burns,
//! which is captured by a landing coefficient defined like a structural
//! coefficient of the landing burn.

use serde::Serialize;
use thiserror::Error;

use crate::calibration::Calibration;
use crate::constants::G0;

#[derive(Debug, Error, PartialEq)]
pub enum StagingError {
    #[error(
        "upper stage cannot reach dv = {dv:.0} m/s at Isp = {isp:.1} s with eps = {eps:.4}: \
         required mass ratio {mass_ratio:.2} exceeds the structural limit"
    )]
    UpperStageInfeasible {
        dv: f64,
        isp: f64,
        eps: f64,
        mass_ratio: f64,
    },
    #[error(
        "first stage cannot reach dv = {dv:.0} m/s at mean Isp = {isp:.1} s with \
         eps = {eps:.4} and landing coefficient {eps_landing:.4}"
    )]
    FirstStageInfeasible {
        dv: f64,
        isp: f64,
        eps: f64,
        eps_landing: f64,
    },
    #[error("ascent allocation dv = {dv:.0} m/s outside the supported window [{min:.0}, {max:.0}]")]
    DvAllocationOutOfRange { dv: f64, min: f64, max: f64 },
    #[error("landing burn absorbs the whole propellant load (ascent share {ascent:.0} kg)")]
    NoAscentPropellant { ascent: f64 },
}

/// Ideal velocity increment of a burn from `m0` down to `mf`, m/s.
pub fn tsiolkovsky_dv(isp: f64, m0: f64, mf: f64) -> f64 {
    isp * G0 * (m0 / mf).ln()
}

/// Mass ratio m0/mf required for `dv` at the given specific impulse.
pub fn mass_ratio(dv: f64, isp: f64) -> f64 {
    (dv / (isp * G0)).exp()
}

/// Ascent delta-v split between the stages, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DvAllocation {
    pub stage1_ascent: f64,
    pub stage2: f64,
    pub landing: f64,
    pub total_ascent: f64,
}

/// Window in which the descent law below is considered fitted.
pub const DV_ALLOCATION_RANGE: (f64, f64) = (1500.0, 6000.0);

/// Delta-v of the descent burns (boost-back, reentry, landing) as a
/// function of the ascent allocation of the first stage. Faster staging
/// costs more on the way back, with a floor for the final landing burn.
pub fn landing_dv(dv1_ascent: f64, cal: &Calibration) -> Result<f64, StagingError> {
    let (min, max) = DV_ALLOCATION_RANGE;
    if !(min..=max).contains(&dv1_ascent) {
        return Err(StagingError::DvAllocationOutOfRange {
            dv: dv1_ascent,
            min,
            max,
        });
    }
    Ok(cal.landing_dv_floor.max(dv1_ascent - cal.landing_dv_offset))
}

pub fn allocate_dv(
    dv_total: f64,
    dv1_ascent: f64,
    cal: &Calibration,
) -> Result<DvAllocation, StagingError> {
    Ok(DvAllocation {
        stage1_ascent: dv1_ascent,
        stage2: dv_total - dv1_ascent,
        landing: landing_dv(dv1_ascent, cal)?,
        total_ascent: dv_total,
    })
}

/// Propellant mass of the expendable upper stage, kg.
///
/// `m_eff` is the effective payload the stage pushes (payload plus every
/// bay mass still attached at ignition, minus the fairing dropped earlier).
pub fn upper_stage_propellant(
    m_eff: f64,
    dv: f64,
    isp_vac: f64,
    eps: f64,
) -> Result<f64, StagingError> {
    let r = mass_ratio(dv, isp_vac);
    if eps * r >= 1.0 {
        return Err(StagingError::UpperStageInfeasible {
            dv,
            isp: isp_vac,
            eps,
            mass_ratio: r,
        });
    }
    Ok(m_eff * (r - 1.0) * (1.0 - eps) / (1.0 - eps * r))
}

/// Structural coefficient of the landing burn: final over initial mass of
/// the returning stage, exp(-dv_landing / (isp g0)). Always in (0, 1].
pub fn landing_coefficient(dv_landing: f64, isp: f64) -> f64 {
    (-dv_landing / (isp * G0)).exp()
}

/// Structural mass of the reusable first stage, kg.
///
/// `m0_upper` is everything the first stage accelerates besides itself
/// (loaded upper stage plus payload bay). The stage must deliver
/// `dv_ascent` while keeping enough propellant to fly its own structure
/// through the descent, so its size diverges as eps approaches the landing
/// coefficient budget.
pub fn first_stage_structural_mass(
    m0_upper: f64,
    dv_ascent: f64,
    isp_mean: f64,
    eps: f64,
    eps_landing: f64,
) -> Result<f64, StagingError> {
    let r = mass_ratio(dv_ascent, isp_mean);
    let denominator = 1.0 / eps - r / eps_landing;
    if denominator <= 0.0 {
        return Err(StagingError::FirstStageInfeasible {
            dv: dv_ascent,
            isp: isp_mean,
            eps,
            eps_landing,
        });
    }
    Ok(m0_upper * (r - 1.0) / denominator)
}

/// Propellant load of the first stage split into its two jobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropellantSplit {
    /// Burned between lift-off and stage separation, kg.
    pub ascent: f64,
    /// Reserved for boost-back, reentry and landing, kg.
    pub landing: f64,
    /// Total load, kg.
    pub total: f64,
}

pub fn propellant_split(
    m_s: f64,
    eps: f64,
    eps_landing: f64,
) -> Result<PropellantSplit, StagingError> {
    let total = m_s * (1.0 - eps) / eps;
    let landing = m_s * (1.0 - eps_landing) / eps_landing;
    let ascent = total - landing;
    if ascent <= 0.0 {
        return Err(StagingError::NoAscentPropellant { ascent });
    }
    Ok(PropellantSplit {
        ascent,
        landing,
        total,
    })
}
