//! Structural mass estimating relations and stage geometry.
//!
//! Tanks are pressure vessels: a cylindrical barrel closed by two
//! hemispherical domes, with wall thickness from the thin-shell hoop
//! relation (with a safety factor of 1.5) floored at a minimum gauge.
//! Everything else is smeared: areal densities for inter-structures and
//! the fairing, a specific mass per newton for the thrust frame, and
//! fractions for reinforcement, gear, TVC and the project margin.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::calibration::Calibration;
use crate::propellants::{EnginePerformance, Fuel};

#[derive(Debug, Error)]
pub enum MassError {
    #[error("propellant load must be positive, got {0:.1} kg")]
    NonPositivePropellant(f64),
    #[error("stage radius must be positive, got {0:.3} m")]
    NonPositiveRadius(f64),
}

/// Which end of the stack a stage sits on; decides bay lengths, landing
/// gear and margin policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StageRole {
    /// Boosts from the pad and returns: aft engine bay, landing gear,
    /// carries the interstage.
    First,
    /// Expendable top stage: lives inside interstage and forward skirt.
    Upper,
}

/// One pressure-vessel tank shell.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TankShell {
    /// Barrel wall thickness after the gauge floor, m.
    pub wall_thickness: f64,
    /// Dome wall thickness after the gauge floor, m.
    pub dome_thickness: f64,
    /// Barrel lateral area, m^2.
    pub barrel_area: f64,
    /// Area of both domes together (one sphere), m^2.
    pub dome_area: f64,
    /// Shell mass, kg.
    pub mass: f64,
}

/// Thin-shell tank of the given barrel length; both ends are hemispheres.
pub fn tank_shell(radius: f64, barrel_length: f64, cal: &Calibration) -> TankShell {
    let hoop = 1.5 * cal.tank_pressure * radius / cal.tank_wall_strength;
    let wall_thickness = hoop.max(cal.tank_min_gauge);
    let dome_thickness = (0.5 * hoop).max(cal.tank_min_gauge);
    let barrel_area = 2.0 * PI * radius * barrel_length;
    let dome_area = 4.0 * PI * radius * radius;
    let mass =
        cal.tank_wall_density * (barrel_area * wall_thickness + dome_area * dome_thickness);
    TankShell {
        wall_thickness,
        dome_thickness,
        barrel_area,
        dome_area,
        mass,
    }
}

/// Outer dimensions of one stage.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageGeometry {
    pub radius: f64,
    /// Barrel length of the fuel tank, m (0 when the domes already hold
    /// the load).
    pub barrel_length_fuel: f64,
    /// Barrel length of the oxidizer tank, m.
    pub barrel_length_ox: f64,
    /// Dome height, m (hemispherical: equals the radius).
    pub dome_height: f64,
    /// Both tanks stacked, domes included, m.
    pub tank_section_length: f64,
    /// Stage contribution to the stack: tanks plus aft bay (first stage)
    /// or interstage and forward skirt (upper stage), m.
    pub stage_length: f64,
}

/// Size the two tanks of a stage for the given propellant load.
///
/// `interstage_radius` is the radius of the interstage wrapped around this
/// stage's engine; only used for `StageRole::Upper`.
pub fn stage_geometry(
    propellant_mass: f64,
    mixture_ratio: f64,
    fuel: Fuel,
    radius: f64,
    role: StageRole,
    interstage_radius: f64,
    cal: &Calibration,
) -> Result<StageGeometry, MassError> {
    if propellant_mass <= 0.0 {
        return Err(MassError::NonPositivePropellant(propellant_mass));
    }
    if radius <= 0.0 {
        return Err(MassError::NonPositiveRadius(radius));
    }

    let fuel_mass = propellant_mass / (1.0 + mixture_ratio);
    let ox_mass = propellant_mass - fuel_mass;
    let cross_section = PI * radius * radius;
    let sphere_volume = 4.0 / 3.0 * PI * radius.powi(3);
    let barrel_length = |mass: f64, density: f64| -> f64 {
        let volume = mass / density * (1.0 + cal.ullage_fraction);
        ((volume - sphere_volume) / cross_section).max(0.0)
    };

    let barrel_length_fuel = barrel_length(fuel_mass, cal.fuel_density(fuel));
    let barrel_length_ox = barrel_length(ox_mass, cal.density_lox);
    let tank_section_length = barrel_length_fuel + barrel_length_ox + 4.0 * radius;

    let stage_length = match role {
        StageRole::First => tank_section_length + cal.aft_bay_length_radii * radius,
        StageRole::Upper => {
            tank_section_length
                + cal.interstage_length_radii * interstage_radius
                + cal.forward_skirt_length_radii * radius
        }
    };

    Ok(StageGeometry {
        radius,
        barrel_length_fuel,
        barrel_length_ox,
        dome_height: radius,
        tank_section_length,
        stage_length,
    })
}

/// Structural mass of one stage, broken into its bookkeeping components.
/// The stage's structural mass is the sum of all fields.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StageMassBudget {
    pub tank_fuel: f64,
    pub tank_ox: f64,
    pub reinforcement: f64,
    pub insulation: f64,
    pub thrust_frame: f64,
    /// Intertank plus, on the first stage, the interstage shell.
    pub inter_structure: f64,
    /// Engines including thrust-vector actuation.
    pub propulsion: f64,
    pub landing_gear: f64,
    pub margin: f64,
}

impl StageMassBudget {
    /// Total structural (dry) mass, kg.
    pub fn structural_mass(&self) -> f64 {
        self.tank_fuel
            + self.tank_ox
            + self.reinforcement
            + self.insulation
            + self.thrust_frame
            + self.inter_structure
            + self.propulsion
            + self.landing_gear
            + self.margin
    }
}

/// Build the mass budget of one stage from its geometry and engines.
pub fn stage_mass_budget(
    geometry: &StageGeometry,
    fuel: Fuel,
    engine: &EnginePerformance,
    engine_count: usize,
    role: StageRole,
    cal: &Calibration,
) -> StageMassBudget {
    let r = geometry.radius;

    let fuel_shell = tank_shell(r, geometry.barrel_length_fuel, cal);
    let ox_shell = tank_shell(r, geometry.barrel_length_ox, cal);

    let reinforcement_fraction = match role {
        StageRole::First => cal.reinforcement_first_stage,
        StageRole::Upper => cal.reinforcement_upper_stage,
    };
    let reinforcement = reinforcement_fraction * (fuel_shell.mass + ox_shell.mass);

    let insulation = cal.insulation_areal_density(fuel)
        * (fuel_shell.barrel_area + fuel_shell.dome_area)
        + cal.insulation_lox * (ox_shell.barrel_area + ox_shell.dome_area);

    let total_thrust_vac = engine_count as f64 * engine.thrust_vac;
    let thrust_frame = cal.thrust_frame_specific_mass * total_thrust_vac;

    let intertank = 2.0 * PI * r * (cal.intertank_length_radii * r) * cal.intertank_areal_density;
    let inter_structure = match role {
        StageRole::First => {
            let interstage =
                2.0 * PI * r * (cal.interstage_length_radii * r) * cal.interstage_areal_density;
            intertank + interstage
        }
        StageRole::Upper => intertank,
    };

    let propulsion = engine_count as f64 * engine.engine_mass * (1.0 + cal.tvc_fraction);

    let before_gear = fuel_shell.mass
        + ox_shell.mass
        + reinforcement
        + insulation
        + thrust_frame
        + inter_structure
        + propulsion;
    let landing_gear = match role {
        StageRole::First => cal.landing_gear_fraction * before_gear,
        StageRole::Upper => 0.0,
    };

    let margin_fraction = match role {
        StageRole::First => cal.margin_first_stage,
        StageRole::Upper => cal.margin_upper_stage,
    };
    let margin = margin_fraction * (before_gear + landing_gear);

    StageMassBudget {
        tank_fuel: fuel_shell.mass,
        tank_ox: ox_shell.mass,
        reinforcement,
        insulation,
        thrust_frame,
        inter_structure,
        propulsion,
        landing_gear,
        margin,
    }
}

/// Everything riding on top of the upper stage.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PayloadBay {
    pub payload: f64,
    pub fairing: f64,
    pub avionics: f64,
    pub adapter: f64,
}

impl PayloadBay {
    /// Total bay mass on the pad, kg.
    pub fn total(&self) -> f64 {
        self.payload + self.fairing + self.avionics + self.adapter
    }

    /// Mass the upper stage pushes to orbit after fairing separation, kg.
    pub fn effective_payload(&self) -> f64 {
        self.total() - self.fairing
    }
}

/// Fairing shell: a cylinder topped by a cone, dimensions set by the
/// fairing radius.
pub fn fairing_mass(radius: f64, cal: &Calibration) -> f64 {
    let barrel = 2.0 * PI * radius * (cal.fairing_cylinder_radii * radius);
    let cone_height = cal.fairing_cone_radii * radius;
    let slant = (cone_height * cone_height + radius * radius).sqrt();
    let cone = PI * radius * slant;
    cal.fairing_areal_density * (barrel + cone)
}

pub fn fairing_length(radius: f64, cal: &Calibration) -> f64 {
    (cal.fairing_cylinder_radii + cal.fairing_cone_radii) * radius
}

/// Payload bay mass budget for a payload under a fairing of the given
/// diameter.
pub fn payload_bay(payload: f64, fairing_diameter: f64, cal: &Calibration) -> PayloadBay {
    PayloadBay {
        payload,
        fairing: fairing_mass(0.5 * fairing_diameter, cal),
        avionics: cal.avionics_mass,
        adapter: cal.adapter_payload_fraction * payload,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propellants::{build_engine, EngineDesign, ThermoTables};
    use approx::assert_relative_eq;

    fn booster_engine() -> EnginePerformance {
        build_engine(
            &EngineDesign {
                fuel: Fuel::Rp1,
                chamber_pressure: 97e5,
                mixture_ratio: 2.36,
                throat_diameter: 0.264,
                expansion_ratio: 16.0,
            },
            ThermoTables::bundled(),
            Calibration::shipped(),
            true,
        )
        .unwrap()
    }

    #[test]
    fn barrel_mass_scales_with_radius_squared_at_fixed_length() {
        // Above the gauge floor the hoop thickness is proportional to the
        // radius, so barrel shell mass goes with r^2 at fixed length.
        let mut cal = Calibration::shipped().clone();
        cal.tank_min_gauge = 0.0;
        let small = tank_shell(2.0, 10.0, &cal);
        let large = tank_shell(4.0, 10.0, &cal);
        let barrel = |s: &TankShell| s.barrel_area * s.wall_thickness * cal.tank_wall_density;
        assert_relative_eq!(barrel(&large), 4.0 * barrel(&small), max_relative = 1e-12);
        assert_relative_eq!(
            large.wall_thickness,
            2.0 * small.wall_thickness,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gauge_floor_kicks_in_for_small_radii() {
        let cal = Calibration::shipped();
        let shell = tank_shell(1.5, 5.0, cal);
        // 1.5 * 3.5 bar * 1.5 m / 400 MPa = 1.97 mm, below the 5 mm floor.
        assert_eq!(shell.wall_thickness, cal.tank_min_gauge);
        assert_eq!(shell.dome_thickness, cal.tank_min_gauge);
    }

    #[test]
    fn tank_volume_covers_propellant_plus_ullage() {
        let cal = Calibration::shipped();
        let geo = stage_geometry(400e3, 2.36, Fuel::Rp1, 1.83, StageRole::First, 1.83, cal)
            .unwrap();
        let volume = |length: f64| {
            PI * 1.83 * 1.83 * length + 4.0 / 3.0 * PI * 1.83f64.powi(3)
        };
        let fuel_volume_needed = 400e3 / 3.36 / cal.density_rp1 * 1.05;
        let ox_volume_needed = 400e3 * 2.36 / 3.36 / cal.density_lox * 1.05;
        assert_relative_eq!(
            volume(geo.barrel_length_fuel),
            fuel_volume_needed,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            volume(geo.barrel_length_ox),
            ox_volume_needed,
            max_relative = 1e-9
        );
    }

    #[test]
    fn small_loads_fall_back_to_dome_only_tanks() {
        let cal = Calibration::shipped();
        let geo = stage_geometry(4e3, 2.36, Fuel::Rp1, 2.5, StageRole::Upper, 2.5, cal).unwrap();
        assert_eq!(geo.barrel_length_fuel, 0.0);
        assert_eq!(geo.tank_section_length, geo.barrel_length_ox + 4.0 * 2.5);
    }

    #[test]
    fn hydrogen_insulation_outweighs_kerosene() {
        let cal = Calibration::shipped();
        let engine = booster_engine();
        let geo = stage_geometry(100e3, 3.0, Fuel::Lch4, 2.0, StageRole::First, 2.0, cal)
            .unwrap();
        let kerosene = stage_mass_budget(&geo, Fuel::Rp1, &engine, 9, StageRole::First, cal);
        let hydrogen = stage_mass_budget(&geo, Fuel::Lh2, &engine, 9, StageRole::First, cal);
        assert!(hydrogen.insulation > kerosene.insulation);
        // Same geometry otherwise: only insulation may differ.
        assert_eq!(hydrogen.tank_fuel, kerosene.tank_fuel);
        assert_eq!(hydrogen.thrust_frame, kerosene.thrust_frame);
    }

    #[test]
    fn insulation_is_areal_density_times_wetted_area() {
        // 100 m^2 of hydrogen tank at 2.5 kg/m^2 is 250 kg.
        let cal = Calibration::shipped();
        assert_eq!(cal.insulation_lh2 * 100.0, 250.0);
    }

    #[test]
    fn landing_gear_multiplies_the_pre_margin_mass_by_1_15() {
        let cal = Calibration::shipped();
        let engine = booster_engine();
        let geo = stage_geometry(400e3, 2.36, Fuel::Rp1, 1.83, StageRole::First, 1.83, cal)
            .unwrap();
        let with_gear = stage_mass_budget(&geo, Fuel::Rp1, &engine, 9, StageRole::First, cal);
        let pre_margin = with_gear.structural_mass() - with_gear.margin;
        let pre_gear = pre_margin - with_gear.landing_gear;
        assert_relative_eq!(pre_margin, 1.15 * pre_gear, max_relative = 1e-12);
    }

    #[test]
    fn budget_components_grow_with_propellant_load() {
        let cal = Calibration::shipped();
        let engine = booster_engine();
        let mut last_total = 0.0;
        for m_p in [100e3, 200e3, 400e3, 600e3] {
            let geo = stage_geometry(m_p, 2.36, Fuel::Rp1, 1.83, StageRole::First, 1.83, cal)
                .unwrap();
            let budget = stage_mass_budget(&geo, Fuel::Rp1, &engine, 9, StageRole::First, cal);
            assert!(budget.structural_mass() > last_total);
            last_total = budget.structural_mass();
        }
    }

    #[test]
    fn reference_class_payload_bay_arithmetic() {
        let cal = Calibration::shipped();
        let bay = payload_bay(5000.0, 3.66, cal);
        assert_eq!(bay.adapter, 200.0);
        assert_eq!(bay.avionics, 300.0);
        assert!(bay.fairing > 1700.0 && bay.fairing < 2100.0, "{}", bay.fairing);
        assert!(bay.total() > 7100.0 && bay.total() < 7700.0);
        assert_relative_eq!(
            bay.effective_payload(),
            bay.total() - bay.fairing,
            max_relative = 1e-12
        );
        assert_relative_eq!(fairing_length(1.83, cal), 10.61, max_relative = 0.01);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let cal = Calibration::shipped();
        assert!(matches!(
            stage_geometry(-1.0, 2.36, Fuel::Rp1, 1.83, StageRole::First, 1.83, cal),
            Err(MassError::NonPositivePropellant(_))
        ));
        assert!(matches!(
            stage_geometry(1e5, 2.36, Fuel::Rp1, 0.0, StageRole::First, 1.83, cal),
            Err(MassError::NonPositiveRadius(_))
        ));
    }
}
