//! Gas-generator cycle power balance.
//!
//! The turbopumps are driven by a fuel-rich gas generator whose exhaust is
//! dumped overboard, so every kilogram tapped off for the turbine is lost
//! for thrust. The tap-off fraction follows from equating pump power with
//! turbine power per kilogram of total propellant flow.

use thiserror::Error;

use crate::calibration::Calibration;
use crate::constants::MAX_GG_MASSFLOW_FRACTION;

use super::Fuel;

#[derive(Debug, Error)]
pub enum CycleError {
    #[error(
        "gas generator needs {fraction:.3} of the total mass flow (limit {limit}); \
         the cycle cannot close at this chamber pressure"
    )]
    PowerBalanceInfeasible { fraction: f64, limit: f64 },
}

/// Fraction of the total propellant flow burned in the gas generator.
///
/// `p_c` in Pa. The fraction rises linearly with pump head, so high chamber
/// pressures and low-density propellants (LH2) pay the largest cycle tax.
pub fn gg_massflow_fraction(
    fuel: Fuel,
    p_c: f64,
    rof: f64,
    cal: &Calibration,
) -> Result<f64, CycleError> {
    // Mass-weighted feed density of the fuel+oxidizer stream.
    let fuel_fraction = 1.0 / (1.0 + rof);
    let ox_fraction = rof / (1.0 + rof);
    let rho_eff = 1.0
        / (fuel_fraction / cal.fuel_density(fuel) + ox_fraction / cal.density_lox);

    // Pump work per kg of total flow: raise the feed to the injector head.
    let pump_work = cal.pump_pressure_factor * p_c / (rho_eff * cal.gg_pump_efficiency);

    // Turbine work per kg of generator flow across the fixed pressure ratio.
    let expansion = 1.0
        - cal
            .gg_pressure_ratio
            .powf(-(cal.gg_gamma - 1.0) / cal.gg_gamma);
    let turbine_work =
        cal.gg_turbine_efficiency * cal.gg_cp(fuel) * cal.gg_temperature * expansion;

    let fraction = pump_work / turbine_work;
    if fraction > MAX_GG_MASSFLOW_FRACTION {
        return Err(CycleError::PowerBalanceInfeasible {
            fraction,
            limit: MAX_GG_MASSFLOW_FRACTION,
        });
    }
    Ok(fraction)
}

impl Calibration {
    pub fn fuel_density(&self, fuel: Fuel) -> f64 {
        match fuel {
            Fuel::Lh2 => self.density_lh2,
            Fuel::Rp1 => self.density_rp1,
            Fuel::Lch4 => self.density_lch4,
        }
    }

    pub fn gg_cp(&self, fuel: Fuel) -> f64 {
        match fuel {
            Fuel::Lh2 => self.gg_cp_lh2,
            Fuel::Rp1 => self.gg_cp_rp1,
            Fuel::Lch4 => self.gg_cp_lch4,
        }
    }

    pub fn isp_efficiency(&self, fuel: Fuel) -> f64 {
        match fuel {
            Fuel::Lh2 => self.isp_efficiency_lh2,
            Fuel::Rp1 => self.isp_efficiency_rp1,
            Fuel::Lch4 => self.isp_efficiency_lch4,
        }
    }

    pub fn insulation_areal_density(&self, fuel: Fuel) -> f64 {
        match fuel {
            Fuel::Lh2 => self.insulation_lh2,
            Fuel::Rp1 => self.insulation_rp1,
            Fuel::Lch4 => self.insulation_lch4,
        }
    }

    pub fn engine_mass_coeff(&self, fuel: Fuel) -> f64 {
        match fuel {
            Fuel::Lh2 => self.engine_mass_coeff_lh2,
            Fuel::Rp1 => self.engine_mass_coeff_rp1,
            Fuel::Lch4 => self.engine_mass_coeff_lch4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_grows_linearly_with_chamber_pressure() {
        let cal = Calibration::shipped();
        let f1 = gg_massflow_fraction(Fuel::Rp1, 50e5, 2.4, cal).unwrap();
        let f2 = gg_massflow_fraction(Fuel::Rp1, 100e5, 2.4, cal).unwrap();
        assert!((f2 / f1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kerosene_engine_pays_a_few_percent() {
        let cal = Calibration::shipped();
        let f = gg_massflow_fraction(Fuel::Rp1, 97e5, 2.36, cal).unwrap();
        assert!(f > 0.02 && f < 0.07, "f = {f}");
    }

    #[test]
    fn hydrogen_low_density_is_offset_by_hot_gas_cp() {
        let cal = Calibration::shipped();
        let f = gg_massflow_fraction(Fuel::Lh2, 115e5, 6.4, cal).unwrap();
        assert!(f > 0.02 && f < 0.08, "f = {f}");
    }

    #[test]
    fn absurd_chamber_pressure_cannot_close_the_power_balance() {
        let cal = Calibration::shipped();
        let mut tweaked = cal.clone();
        tweaked.gg_cp_rp1 = 400.0; // cold turbine gas
        let err = gg_massflow_fraction(Fuel::Rp1, 200e5, 2.4, &tweaked).unwrap_err();
        assert!(matches!(err, CycleError::PowerBalanceInfeasible { .. }));
    }
}
