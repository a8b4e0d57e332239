//! Ideal nozzle flow with a frozen ratio of specific heats.
//!
//! Chamber conditions come from the combustion tables as characteristic
//! velocity and frozen gamma; the gas constant is recovered from the
//! characteristic velocity so no explicit molar mass is needed.

use crate::constants::G0;

use super::tables::ChamberProperties;

/// Vandenkerckhove function of gamma.
pub fn vandenkerckhove(gamma: f64) -> f64 {
    gamma.sqrt() * (2.0 / (gamma + 1.0)).powf((gamma + 1.0) / (2.0 * (gamma - 1.0)))
}

/// Exit Mach number on the supersonic branch of the area ratio relation.
///
/// Solves area_ratio = (1/M) * [(2/(g+1)) (1 + (g-1)/2 M^2)]^((g+1)/(2(g-1)))
/// by bisection; the relation is strictly increasing for M > 1.
pub fn exit_mach(area_ratio: f64, gamma: f64) -> f64 {
    assert!(area_ratio > 1.0, "area ratio must exceed 1 for supersonic flow");
    let gp = gamma + 1.0;
    let gm = gamma - 1.0;
    let exponent = gp / (2.0 * gm);
    let ratio = |m: f64| (2.0 / gp * (1.0 + 0.5 * gm * m * m)).powf(exponent) / m;

    let mut lo = 1.0;
    let mut hi = 2.0;
    while ratio(hi) < area_ratio {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < area_ratio {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Ideal performance of one engine's nozzle, before efficiency and cycle
/// losses are applied.
#[derive(Debug, Clone, Copy)]
pub struct IdealNozzle {
    /// Throat area, m^2.
    pub throat_area: f64,
    /// Exit area, m^2.
    pub exit_area: f64,
    /// Chamber mass flow through the throat, kg/s.
    pub core_massflow: f64,
    /// Exit velocity, m/s.
    pub exit_velocity: f64,
    /// Nozzle exit pressure, Pa.
    pub exit_pressure: f64,
    /// Vacuum specific impulse of the core flow, s.
    pub isp_vac: f64,
}

/// Expand the chamber gas through a bell of the given throat diameter and
/// area expansion ratio. `p_c` in Pa.
pub fn ideal_nozzle(
    chamber: &ChamberProperties,
    throat_diameter: f64,
    area_ratio: f64,
    p_c: f64,
) -> IdealNozzle {
    let gamma = chamber.gamma;
    let throat_area = std::f64::consts::FRAC_PI_4 * throat_diameter * throat_diameter;
    let exit_area = area_ratio * throat_area;
    let core_massflow = p_c * throat_area / chamber.c_star;

    // c* = sqrt(R T_c) / Gamma(gamma) recovers the specific gas energy.
    let rt_c = (chamber.c_star * vandenkerckhove(gamma)).powi(2);

    let mach = exit_mach(area_ratio, gamma);
    let temp_ratio = 1.0 / (1.0 + 0.5 * (gamma - 1.0) * mach * mach);
    let exit_pressure = p_c * temp_ratio.powf(gamma / (gamma - 1.0));
    let exit_velocity =
        (2.0 * gamma / (gamma - 1.0) * rt_c * (1.0 - temp_ratio)).sqrt();

    let vacuum_thrust = core_massflow * exit_velocity + exit_pressure * exit_area;
    let isp_vac = vacuum_thrust / (core_massflow * G0);

    IdealNozzle {
        throat_area,
        exit_area,
        core_massflow,
        exit_velocity,
        exit_pressure,
        isp_vac,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn area_ratio_round_trips_through_exit_mach() {
        for &gamma in &[1.15, 1.22, 1.30, 1.40] {
            for &eps in &[2.0, 10.0, 16.0, 80.0, 200.0] {
                let m = exit_mach(eps, gamma);
                assert!(m > 1.0);
                let gp = gamma + 1.0;
                let gm = gamma - 1.0;
                let back = (2.0 / gp * (1.0 + 0.5 * gm * m * m))
                    .powf(gp / (2.0 * gm))
                    / m;
                assert_relative_eq!(back, eps, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn exit_mach_grows_with_area_ratio() {
        let mut last = 1.0;
        for &eps in &[1.5, 4.0, 10.0, 40.0, 120.0, 200.0] {
            let m = exit_mach(eps, 1.22);
            assert!(m > last);
            last = m;
        }
    }

    #[test]
    fn bigger_bells_raise_vacuum_isp_and_lower_exit_pressure() {
        let chamber = ChamberProperties {
            c_star: 1780.0,
            gamma: 1.22,
            chamber_temperature: 3600.0,
        };
        let small = ideal_nozzle(&chamber, 0.25, 16.0, 97e5);
        let large = ideal_nozzle(&chamber, 0.25, 165.0, 97e5);
        assert!(large.isp_vac > small.isp_vac);
        assert!(large.exit_pressure < small.exit_pressure);
        // Kerosene-class chamber: vacuum Isp in the familiar bracket.
        assert!(small.isp_vac > 300.0 && small.isp_vac < 345.0);
        assert!(large.isp_vac > 330.0 && large.isp_vac < 380.0);
    }

    #[test]
    fn massflow_scales_with_throat_area_and_pressure() {
        let chamber = ChamberProperties {
            c_star: 1780.0,
            gamma: 1.22,
            chamber_temperature: 3600.0,
        };
        let base = ideal_nozzle(&chamber, 0.2, 16.0, 100e5);
        let double_p = ideal_nozzle(&chamber, 0.2, 16.0, 200e5);
        assert_relative_eq!(double_p.core_massflow, 2.0 * base.core_massflow, max_relative = 1e-12);
        let double_a = ideal_nozzle(&chamber, 0.2 * std::f64::consts::SQRT_2, 16.0, 100e5);
        assert_relative_eq!(double_a.core_massflow, 2.0 * base.core_massflow, max_relative = 1e-12);
    }
}
