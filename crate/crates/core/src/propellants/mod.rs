//! Engine performance model: combustion tables, ideal nozzle flow, the
//! gas-generator cycle tax, and the dry-mass correlation.

pub mod cycle;
pub mod nozzle;
pub mod tables;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::Calibration;
use crate::constants::{
    ENGINE_THRUST_RANGE_N, FLOW_SEPARATION_PRESSURE_RATIO, G0, ISP_SANITY_RANGE_S, P_SEA_LEVEL,
};

pub use cycle::CycleError;
pub use tables::{ChamberProperties, TableError, ThermoTables};

/// Fuel of a LOX/fuel combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fuel {
    Lh2,
    Rp1,
    Lch4,
}

impl Fuel {
    pub const ALL: [Fuel; 3] = [Fuel::Lh2, Fuel::Rp1, Fuel::Lch4];

    /// Mixture ratio bounds of the design space for this combination.
    pub fn rof_bounds(self) -> (f64, f64) {
        match self {
            Fuel::Lh2 => (4.0, 7.9),
            Fuel::Rp1 => (1.5, 3.5),
            Fuel::Lch4 => (2.0, 4.0),
        }
    }

    /// True for fuels that need cryogenic insulation on their tank.
    pub fn cryogenic(self) -> bool {
        !matches!(self, Fuel::Rp1)
    }
}

impl fmt::Display for Fuel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fuel::Lh2 => "LH2",
            Fuel::Rp1 => "RP-1",
            Fuel::Lch4 => "LCH4",
        })
    }
}

impl FromStr for Fuel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LH2" => Ok(Fuel::Lh2),
            "RP1" | "RP-1" => Ok(Fuel::Rp1),
            "LCH4" | "CH4" => Ok(Fuel::Lch4),
            other => Err(format!("unknown propellant combination `{other}`")),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Cycle(#[from] cycle::CycleError),
    #[error("{which} = {value:.1} s outside the physical window [{min}, {max}] s")]
    IspOutOfRange {
        which: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
}

/// Free design parameters of one engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineDesign {
    pub fuel: Fuel,
    /// Chamber pressure, Pa.
    pub chamber_pressure: f64,
    /// Oxidizer-to-fuel mass ratio.
    pub mixture_ratio: f64,
    /// Nozzle throat diameter, m.
    pub throat_diameter: f64,
    /// Nozzle exit-to-throat area ratio.
    pub expansion_ratio: f64,
}

/// Performance and mass of one built engine.
///
/// Thrust varies linearly with ambient pressure between the vacuum value
/// and sea level; `isp(p)` and `thrust(p)` share the same effective exit
/// area so thrust = isp * g0 * massflow holds at every altitude.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnginePerformance {
    pub design: EngineDesign,
    /// Vacuum specific impulse, s (after efficiency and cycle losses).
    pub isp_vac: f64,
    /// Sea-level specific impulse, s.
    pub isp_sl: f64,
    /// Vacuum thrust, N.
    pub thrust_vac: f64,
    /// Sea-level thrust, N.
    pub thrust_sl: f64,
    /// Total propellant flow including the gas-generator tap-off, kg/s.
    pub total_massflow: f64,
    /// Share of the total flow burned in the gas generator.
    pub gg_massflow_fraction: f64,
    /// Dry mass of one engine, kg.
    pub engine_mass: f64,
    /// Geometric exit area, m^2.
    pub exit_area: f64,
    /// Exit area scaled by the loss factors; slope of thrust over ambient
    /// pressure.
    pub effective_exit_area: f64,
    /// Nozzle exit pressure, Pa.
    pub exit_pressure: f64,
    /// Exit pressure below the separation threshold at sea level.
    pub flow_separation_sl: bool,
    /// Vacuum thrust left the validity range of the dry-mass correlation.
    pub outside_mass_correlation: bool,
}

impl EnginePerformance {
    /// Thrust at ambient pressure `p_amb` (Pa), N.
    pub fn thrust(&self, p_amb: f64) -> f64 {
        self.thrust_vac - p_amb * self.effective_exit_area
    }

    /// Specific impulse at ambient pressure `p_amb` (Pa), s.
    pub fn isp(&self, p_amb: f64) -> f64 {
        self.thrust(p_amb) / (self.total_massflow * G0)
    }

    /// The same engine with its specific impulse shifted by `delta`
    /// seconds at every ambient pressure. Massflow and exit area stay put,
    /// so the thrust moves with the Isp; the dry mass stays that of the
    /// as-built engine. Used for model-sensitivity studies.
    pub fn with_isp_offset(&self, delta: f64) -> EnginePerformance {
        if delta == 0.0 {
            return *self;
        }
        let mut shifted = *self;
        shifted.isp_vac = self.isp_vac + delta;
        shifted.isp_sl = self.isp_sl + delta;
        shifted.thrust_vac = shifted.isp_vac * G0 * self.total_massflow;
        shifted.thrust_sl = shifted.isp_sl * G0 * self.total_massflow;
        shifted
    }
}

/// Dry mass of one engine from its vacuum thrust and expansion ratio.
/// Returns the mass and whether the thrust sits inside the validity range
/// of the correlation.
pub fn engine_dry_mass(
    fuel: Fuel,
    thrust_vac: f64,
    expansion_ratio: f64,
    cal: &Calibration,
) -> (f64, bool) {
    let mass = cal.engine_mass_coeff(fuel) * thrust_vac.powf(cal.engine_mass_exponent)
        + cal.engine_mass_nozzle_coeff * expansion_ratio;
    let (lo, hi) = ENGINE_THRUST_RANGE_N;
    (mass, thrust_vac >= lo && thrust_vac <= hi)
}

/// Build one engine: table lookup, nozzle expansion, cycle losses,
/// efficiency correction and dry mass.
///
/// `check_sea_level` additionally applies the physical-Isp window to the
/// sea-level value; set it for booster engines that actually run at 1 atm.
pub fn build_engine(
    design: &EngineDesign,
    tables: &ThermoTables,
    cal: &Calibration,
    check_sea_level: bool,
) -> Result<EnginePerformance, EngineError> {
    let chamber = tables.lookup(design.fuel, design.chamber_pressure, design.mixture_ratio)?;
    let noz = nozzle::ideal_nozzle(
        &chamber,
        design.throat_diameter,
        design.expansion_ratio,
        design.chamber_pressure,
    );
    let gg = cycle::gg_massflow_fraction(
        design.fuel,
        design.chamber_pressure,
        design.mixture_ratio,
        cal,
    )?;

    // The generator flow bypasses the chamber; its exhaust contributes no
    // thrust, which costs 0.9 of its proportional share.
    let loss_factor = cal.isp_efficiency(design.fuel) * (1.0 - 0.9 * gg);
    let total_massflow = noz.core_massflow / (1.0 - gg);

    let isp_vac = noz.isp_vac * loss_factor;
    let thrust_vac = isp_vac * G0 * total_massflow;
    let effective_exit_area = loss_factor * noz.exit_area;
    let thrust_sl = thrust_vac - P_SEA_LEVEL * effective_exit_area;
    let isp_sl = thrust_sl / (total_massflow * G0);

    let (min_isp, max_isp) = ISP_SANITY_RANGE_S;
    let check = |which: &'static str, value: f64| -> Result<(), EngineError> {
        if value < min_isp || value > max_isp {
            return Err(EngineError::IspOutOfRange {
                which,
                value,
                min: min_isp,
                max: max_isp,
            });
        }
        Ok(())
    };
    check("vacuum Isp", isp_vac)?;
    if check_sea_level {
        check("sea-level Isp", isp_sl)?;
    }

    let (engine_mass, in_range) = engine_dry_mass(design.fuel, thrust_vac, design.expansion_ratio, cal);

    Ok(EnginePerformance {
        design: *design,
        isp_vac,
        isp_sl,
        thrust_vac,
        thrust_sl,
        total_massflow,
        gg_massflow_fraction: gg,
        engine_mass,
        exit_area: noz.exit_area,
        effective_exit_area,
        exit_pressure: noz.exit_pressure,
        flow_separation_sl: noz.exit_pressure < FLOW_SEPARATION_PRESSURE_RATIO * P_SEA_LEVEL,
        outside_mass_correlation: !in_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn merlin_like() -> EngineDesign {
        EngineDesign {
            fuel: Fuel::Rp1,
            chamber_pressure: 97e5,
            mixture_ratio: 2.36,
            throat_diameter: 0.264,
            expansion_ratio: 16.0,
        }
    }

    #[test]
    fn kerosene_booster_engine_matches_the_familiar_class() {
        let perf = build_engine(
            &merlin_like(),
            ThermoTables::bundled(),
            Calibration::shipped(),
            true,
        )
        .unwrap();
        assert!(perf.isp_vac > 305.0 && perf.isp_vac < 315.0, "{}", perf.isp_vac);
        assert!(perf.isp_sl > 277.0 && perf.isp_sl < 288.0, "{}", perf.isp_sl);
        assert!(perf.thrust_vac > 0.85e6 && perf.thrust_vac < 1.05e6);
        assert!(perf.engine_mass > 350.0 && perf.engine_mass < 600.0);
        assert!(!perf.flow_separation_sl);
        assert!(!perf.outside_mass_correlation);
    }

    #[test]
    fn thrust_isp_and_massflow_are_consistent_at_any_ambient_pressure() {
        let perf = build_engine(
            &merlin_like(),
            ThermoTables::bundled(),
            Calibration::shipped(),
            true,
        )
        .unwrap();
        for p in [0.0, 2e4, 5e4, P_SEA_LEVEL] {
            assert_relative_eq!(
                perf.thrust(p),
                perf.isp(p) * G0 * perf.total_massflow,
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(perf.thrust(0.0), perf.thrust_vac, max_relative = 1e-12);
        assert_relative_eq!(perf.thrust(P_SEA_LEVEL), perf.thrust_sl, max_relative = 1e-12);
    }

    #[test]
    fn isp_offset_shifts_uniformly_and_keeps_the_bookkeeping_consistent() {
        let perf = build_engine(
            &merlin_like(),
            ThermoTables::bundled(),
            Calibration::shipped(),
            true,
        )
        .unwrap();
        for delta in [-15.0, 0.0, 8.0] {
            let shifted = perf.with_isp_offset(delta);
            for p in [0.0, 3e4, P_SEA_LEVEL] {
                assert_relative_eq!(shifted.isp(p), perf.isp(p) + delta, epsilon = 1e-9);
                assert_relative_eq!(
                    shifted.thrust(p),
                    shifted.isp(p) * G0 * shifted.total_massflow,
                    max_relative = 1e-12
                );
            }
            assert_eq!(shifted.engine_mass, perf.engine_mass);
            assert_eq!(shifted.total_massflow, perf.total_massflow);
            assert_eq!(shifted.effective_exit_area, perf.effective_exit_area);
        }
    }

    #[test]
    fn vacuum_bell_sets_the_separation_flag_at_sea_level() {
        let vac_engine = EngineDesign {
            expansion_ratio: 165.0,
            ..merlin_like()
        };
        let perf = build_engine(
            &vac_engine,
            ThermoTables::bundled(),
            Calibration::shipped(),
            false,
        )
        .unwrap();
        assert!(perf.flow_separation_sl);
        assert!(perf.isp_vac > 330.0 && perf.isp_vac < 355.0, "{}", perf.isp_vac);
    }

    #[test]
    fn hydrogen_upper_engine_hits_the_high_isp_band() {
        let design = EngineDesign {
            fuel: Fuel::Lh2,
            chamber_pressure: 115e5,
            mixture_ratio: 6.4,
            throat_diameter: 0.22,
            expansion_ratio: 200.0,
        };
        let perf = build_engine(&design, ThermoTables::bundled(), Calibration::shipped(), false)
            .unwrap();
        assert!(perf.isp_vac > 440.0 && perf.isp_vac < 460.0, "{}", perf.isp_vac);
    }

    #[test]
    fn tiny_thrust_leaves_the_mass_correlation_range() {
        let design = EngineDesign {
            fuel: Fuel::Rp1,
            chamber_pressure: 50e5,
            mixture_ratio: 2.3,
            throat_diameter: 0.1,
            expansion_ratio: 16.0,
        };
        let perf = build_engine(&design, ThermoTables::bundled(), Calibration::shipped(), true)
            .unwrap();
        assert!(perf.thrust_vac < 100e3);
        assert!(perf.outside_mass_correlation);
    }

    #[test]
    fn out_of_table_pressure_is_reported() {
        let design = EngineDesign {
            chamber_pressure: 250e5,
            ..merlin_like()
        };
        let err = build_engine(&design, ThermoTables::bundled(), Calibration::shipped(), true)
            .unwrap_err();
        assert!(matches!(err, EngineError::Table(_)));
    }
}
