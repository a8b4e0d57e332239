//! Fitted model constants, loaded from a plain-text calibration file.
//!
//! Every tunable coefficient of the mass and engine models lives here so
//! the fit stays in one reviewable place. The file format is line oriented:
//! `name = value unit`, with `#` comments. Units are part of the contract
//! and are rejected when they do not match the expected unit of the key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

const DEFAULT_TEXT: &str = include_str!("../resources/calibration_default.txt");

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("calibration file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: expected `name = value unit`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: `{name}` given twice")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: `{name}` has unit `{got}`, expected `{want}`")]
    WrongUnit {
        line: usize,
        name: String,
        got: String,
        want: String,
    },
    #[error("line {line}: `{name}` has a non-numeric value `{value}`")]
    BadValue {
        line: usize,
        name: String,
        value: String,
    },
    #[error("missing entry `{0}`")]
    Missing(String),
    #[error("unknown entry `{0}`")]
    Unknown(String),
    #[error("`{name}` = {value} is outside the allowed range [{min}, {max}]")]
    OutOfRange {
        name: String,
        value: f64,
        min: f64,
        max: f64,
    },
}

/// All fitted constants of the toolkit. Field units are SI unless the name
/// says otherwise; the file may use engineering units (bar, MPa, mm) which
/// are converted on load.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    // tank structure
    pub tank_pressure: f64,        // Pa
    pub tank_wall_strength: f64,   // Pa
    pub tank_wall_density: f64,    // kg/m^3
    pub tank_min_gauge: f64,       // m
    pub ullage_fraction: f64,
    pub reinforcement_first_stage: f64,
    pub reinforcement_upper_stage: f64,

    // insulation areal densities, kg/m^2
    pub insulation_lh2: f64,
    pub insulation_lox: f64,
    pub insulation_lch4: f64,
    pub insulation_rp1: f64,

    // secondary structure
    pub thrust_frame_specific_mass: f64, // kg per N of vacuum thrust
    pub intertank_areal_density: f64,    // kg/m^2
    pub interstage_areal_density: f64,   // kg/m^2
    pub fairing_areal_density: f64,      // kg/m^2
    pub landing_gear_fraction: f64,
    pub margin_first_stage: f64,
    pub margin_upper_stage: f64,
    pub tvc_fraction: f64,
    pub avionics_mass: f64, // kg
    pub adapter_payload_fraction: f64,

    // section lengths in units of the local stage radius
    pub intertank_length_radii: f64,
    pub interstage_length_radii: f64,
    pub aft_bay_length_radii: f64,
    pub forward_skirt_length_radii: f64,
    pub fairing_cylinder_radii: f64,
    pub fairing_cone_radii: f64,

    // propellant densities, kg/m^3
    pub density_lox: f64,
    pub density_lh2: f64,
    pub density_rp1: f64,
    pub density_lch4: f64,

    // Isp efficiency per fuel (applied to ideal nozzle performance)
    pub isp_efficiency_lh2: f64,
    pub isp_efficiency_rp1: f64,
    pub isp_efficiency_lch4: f64,

    // gas-generator cycle
    pub gg_pressure_ratio: f64,
    pub gg_turbine_efficiency: f64,
    pub gg_pump_efficiency: f64,
    pub gg_temperature: f64, // K
    pub gg_gamma: f64,
    pub gg_cp_lh2: f64, // J/(kg K)
    pub gg_cp_rp1: f64,
    pub gg_cp_lch4: f64,
    pub pump_pressure_factor: f64,

    // engine dry mass correlation m = a * F_vac^b + c * eps
    pub engine_mass_coeff_lh2: f64,
    pub engine_mass_coeff_rp1: f64,
    pub engine_mass_coeff_lch4: f64,
    pub engine_mass_exponent: f64,
    pub engine_mass_nozzle_coeff: f64, // kg per unit expansion ratio

    // descent propellant law, m/s
    pub landing_dv_floor: f64,
    pub landing_dv_offset: f64,
}

/// Handbook bulk densities at normal boiling point used to sanity-check
/// the calibrated values, kg/m^3.
const DENSITY_REFERENCE: [(&str, f64); 4] = [
    ("density_lox", 1141.0),
    ("density_lh2", 71.0),
    ("density_rp1", 810.0),
    ("density_lch4", 423.0),
];

struct Entry {
    line: usize,
    value: f64,
    unit: String,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn take(&mut self, name: &str, unit: &str) -> Result<f64, CalibrationError> {
        let entry = self
            .0
            .remove(name)
            .ok_or_else(|| CalibrationError::Missing(name.to_string()))?;
        if entry.unit != unit {
            return Err(CalibrationError::WrongUnit {
                line: entry.line,
                name: name.to_string(),
                got: entry.unit,
                want: unit.to_string(),
            });
        }
        Ok(entry.value)
    }
}

impl Calibration {
    /// The calibration shipped with the binary.
    pub fn shipped() -> &'static Calibration {
        static SHIPPED: OnceLock<Calibration> = OnceLock::new();
        SHIPPED.get_or_init(|| {
            Calibration::parse(DEFAULT_TEXT).expect("bundled calibration file is valid")
        })
    }

    pub fn load(path: &Path) -> Result<Calibration, CalibrationError> {
        let text = std::fs::read_to_string(path).map_err(|source| CalibrationError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Calibration::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Calibration, CalibrationError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (name, rest) = content.split_once('=').ok_or_else(|| {
                CalibrationError::Malformed {
                    line,
                    text: content.to_string(),
                }
            })?;
            let name = name.trim().to_string();
            let mut parts = rest.split_whitespace();
            let (value_text, unit) = match (parts.next(), parts.next(), parts.next()) {
                (Some(v), Some(u), None) => (v, u.to_string()),
                _ => {
                    return Err(CalibrationError::Malformed {
                        line,
                        text: content.to_string(),
                    })
                }
            };
            let value = value_text.parse::<f64>().map_err(|_| CalibrationError::BadValue {
                line,
                name: name.clone(),
                value: value_text.to_string(),
            })?;
            if map
                .insert(name.clone(), Entry { line, value, unit })
                .is_some()
            {
                return Err(CalibrationError::Duplicate { line, name });
            }
        }

        let mut e = Entries(map);
        let cal = Calibration {
            tank_pressure: e.take("tank_pressure", "bar")? * 1e5,
            tank_wall_strength: e.take("tank_wall_strength", "MPa")? * 1e6,
            tank_wall_density: e.take("tank_wall_density", "kg/m^3")?,
            tank_min_gauge: e.take("tank_min_gauge", "mm")? * 1e-3,
            ullage_fraction: e.take("ullage_fraction", "-")?,
            reinforcement_first_stage: e.take("reinforcement_first_stage", "-")?,
            reinforcement_upper_stage: e.take("reinforcement_upper_stage", "-")?,
            insulation_lh2: e.take("insulation_lh2", "kg/m^2")?,
            insulation_lox: e.take("insulation_lox", "kg/m^2")?,
            insulation_lch4: e.take("insulation_lch4", "kg/m^2")?,
            insulation_rp1: e.take("insulation_rp1", "kg/m^2")?,
            thrust_frame_specific_mass: e.take("thrust_frame_specific_mass", "kg/N")?,
            intertank_areal_density: e.take("intertank_areal_density", "kg/m^2")?,
            interstage_areal_density: e.take("interstage_areal_density", "kg/m^2")?,
            fairing_areal_density: e.take("fairing_areal_density", "kg/m^2")?,
            landing_gear_fraction: e.take("landing_gear_fraction", "-")?,
            margin_first_stage: e.take("margin_first_stage", "-")?,
            margin_upper_stage: e.take("margin_upper_stage", "-")?,
            tvc_fraction: e.take("tvc_fraction", "-")?,
            avionics_mass: e.take("avionics_mass", "kg")?,
            adapter_payload_fraction: e.take("adapter_payload_fraction", "-")?,
            intertank_length_radii: e.take("intertank_length_radii", "-")?,
            interstage_length_radii: e.take("interstage_length_radii", "-")?,
            aft_bay_length_radii: e.take("aft_bay_length_radii", "-")?,
            forward_skirt_length_radii: e.take("forward_skirt_length_radii", "-")?,
            fairing_cylinder_radii: e.take("fairing_cylinder_radii", "-")?,
            fairing_cone_radii: e.take("fairing_cone_radii", "-")?,
            density_lox: e.take("density_lox", "kg/m^3")?,
            density_lh2: e.take("density_lh2", "kg/m^3")?,
            density_rp1: e.take("density_rp1", "kg/m^3")?,
            density_lch4: e.take("density_lch4", "kg/m^3")?,
            isp_efficiency_lh2: e.take("isp_efficiency_lh2", "-")?,
            isp_efficiency_rp1: e.take("isp_efficiency_rp1", "-")?,
            isp_efficiency_lch4: e.take("isp_efficiency_lch4", "-")?,
            gg_pressure_ratio: e.take("gg_pressure_ratio", "-")?,
            gg_turbine_efficiency: e.take("gg_turbine_efficiency", "-")?,
            gg_pump_efficiency: e.take("gg_pump_efficiency", "-")?,
            gg_temperature: e.take("gg_temperature", "K")?,
            gg_gamma: e.take("gg_gamma", "-")?,
            gg_cp_lh2: e.take("gg_cp_lh2", "J/(kg*K)")?,
            gg_cp_rp1: e.take("gg_cp_rp1", "J/(kg*K)")?,
            gg_cp_lch4: e.take("gg_cp_lch4", "J/(kg*K)")?,
            pump_pressure_factor: e.take("pump_pressure_factor", "-")?,
            engine_mass_coeff_lh2: e.take("engine_mass_coeff_lh2", "kg/N^0.9")?,
            engine_mass_coeff_rp1: e.take("engine_mass_coeff_rp1", "kg/N^0.9")?,
            engine_mass_coeff_lch4: e.take("engine_mass_coeff_lch4", "kg/N^0.9")?,
            engine_mass_exponent: e.take("engine_mass_exponent", "-")?,
            engine_mass_nozzle_coeff: e.take("engine_mass_nozzle_coeff", "kg")?,
            landing_dv_floor: e.take("landing_dv_floor", "m/s")?,
            landing_dv_offset: e.take("landing_dv_offset", "m/s")?,
        };
        if let Some(name) = e.0.keys().next() {
            return Err(CalibrationError::Unknown(name.clone()));
        }
        cal.validate()?;
        Ok(cal)
    }

    fn validate(&self) -> Result<(), CalibrationError> {
        fn check(name: &str, value: f64, min: f64, max: f64) -> Result<(), CalibrationError> {
            if !(value >= min && value <= max) {
                return Err(CalibrationError::OutOfRange {
                    name: name.to_string(),
                    value,
                    min,
                    max,
                });
            }
            Ok(())
        }

        check("isp_efficiency_lh2", self.isp_efficiency_lh2, 0.90, 1.0)?;
        check("isp_efficiency_rp1", self.isp_efficiency_rp1, 0.90, 1.0)?;
        check("isp_efficiency_lch4", self.isp_efficiency_lch4, 0.90, 1.0)?;

        for (name, reference) in DENSITY_REFERENCE {
            let value = match name {
                "density_lox" => self.density_lox,
                "density_lh2" => self.density_lh2,
                "density_rp1" => self.density_rp1,
                _ => self.density_lch4,
            };
            check(name, value, reference * 0.97, reference * 1.03)?;
        }

        check("tank_pressure", self.tank_pressure, 0.5e5, 10e5)?;
        check("tank_wall_strength", self.tank_wall_strength, 50e6, 2000e6)?;
        check("tank_wall_density", self.tank_wall_density, 1000.0, 9000.0)?;
        check("tank_min_gauge", self.tank_min_gauge, 0.5e-3, 20e-3)?;
        check("ullage_fraction", self.ullage_fraction, 0.0, 0.15)?;
        check("gg_pressure_ratio", self.gg_pressure_ratio, 1.5, 100.0)?;
        check("gg_turbine_efficiency", self.gg_turbine_efficiency, 0.1, 1.0)?;
        check("gg_pump_efficiency", self.gg_pump_efficiency, 0.1, 1.0)?;
        check("gg_temperature", self.gg_temperature, 500.0, 1400.0)?;
        check("gg_gamma", self.gg_gamma, 1.05, 1.67)?;
        check("landing_gear_fraction", self.landing_gear_fraction, 0.0, 0.5)?;
        check("margin_first_stage", self.margin_first_stage, 0.0, 0.5)?;
        check("margin_upper_stage", self.margin_upper_stage, 0.0, 0.5)?;
        check("engine_mass_exponent", self.engine_mass_exponent, 0.5, 1.2)?;
        check("landing_dv_floor", self.landing_dv_floor, 0.0, 2000.0)?;
        check("landing_dv_offset", self.landing_dv_offset, 0.0, 4000.0)?;
        Ok(())
    }
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tank pressure           {:>10.2} bar", self.tank_pressure / 1e5)?;
        writeln!(f, "wall strength           {:>10.1} MPa", self.tank_wall_strength / 1e6)?;
        writeln!(f, "minimum gauge           {:>10.2} mm", self.tank_min_gauge * 1e3)?;
        writeln!(f, "thrust frame            {:>10.2e} kg/N", self.thrust_frame_specific_mass)?;
        writeln!(f, "intertank areal density {:>10.2} kg/m^2", self.intertank_areal_density)?;
        writeln!(f, "fairing areal density   {:>10.2} kg/m^2", self.fairing_areal_density)?;
        writeln!(
            f,
            "Isp efficiency          {:>10.4} / {:.4} / {:.4} (LH2/RP-1/LCH4)",
            self.isp_efficiency_lh2, self.isp_efficiency_rp1, self.isp_efficiency_lch4
        )
    }
}
