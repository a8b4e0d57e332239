//! Run configuration: a TOML file with units spelled out in the key names,
//! merged with command-line overrides.
//!
//! Every numeric key carries its unit as a suffix (`payload_mass_kg`,
//! `chamber_pressure_stage1_bar`); a value in the wrong unit therefore
//! requires typing a key that does not exist, which is rejected. All
//! sections are optional — subcommands demand the ones they need.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::missions::{self, MissionSpec};
use crate::optimizer::{gene, GaSettings, Genome, Objective, ObjectiveSpec};
use crate::propellants::Fuel;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    /// TOML syntax or unknown-key errors; the message carries the line.
    #[error("config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config: {0}")]
    Invalid(String),
}

fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(message.into())
}

/// Complete description of one run. Field names double as the TOML schema.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mission: Option<MissionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle: Option<VehicleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genome: Option<GenomeTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<PathsSection>,
}

/// Mission selector (`name`) with optional numeric overrides, or a fully
/// inline mission when all numbers are given.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MissionSection {
    /// Built-in mission: `GTO` (default) or `LEO`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_mass_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv_ideal_mps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv_total_mps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_credit_mps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSection {
    /// `LH2`, `RP-1` or `LCH4` (LOX oxidizer throughout).
    pub propellant_stage1: String,
    pub propellant_stage2: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSection {
    /// `glow`, `sm` or `em`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// First-stage flight count; only the expendable-mass objective reads it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_reuses: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchProfile {
    /// Population 5000 x 50 generations, matching the published runs.
    Paper,
    /// Population 200 x 30 generations for interactive work.
    Desk,
    /// Start from desk settings; `population` and `generations` required.
    Custom,
}

impl std::str::FromStr for SearchProfile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(SearchProfile::Paper),
            "desk" => Ok(SearchProfile::Desk),
            "custom" => Ok(SearchProfile::Custom),
            other => Err(format!(
                "unknown search profile '{other}' (expected paper, desk, or custom)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<SearchProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tournament_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mating_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gene_swap_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gene_mutation_prob: Option<f64>,
}

/// One complete design point, written so a report can be pasted back in.
/// Order and units match the search space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenomeTable {
    pub radius_stage1_m: f64,
    pub throat_diameter_stage1_m: f64,
    pub chamber_pressure_stage1_bar: f64,
    pub expansion_ratio_stage1: f64,
    pub mixture_ratio_stage1: f64,
    pub radius_stage2_m: f64,
    pub throat_diameter_stage2_m: f64,
    pub chamber_pressure_stage2_bar: f64,
    pub expansion_ratio_stage2: f64,
    pub mixture_ratio_stage2: f64,
    pub dv_stage1_mps: f64,
}

impl GenomeTable {
    pub fn to_genome(self) -> Genome {
        let mut g = [0.0; 11];
        g[gene::RADIUS_1] = self.radius_stage1_m;
        g[gene::THROAT_1] = self.throat_diameter_stage1_m;
        g[gene::CHAMBER_PRESSURE_1] = self.chamber_pressure_stage1_bar;
        g[gene::EXPANSION_1] = self.expansion_ratio_stage1;
        g[gene::MIXTURE_1] = self.mixture_ratio_stage1;
        g[gene::RADIUS_2] = self.radius_stage2_m;
        g[gene::THROAT_2] = self.throat_diameter_stage2_m;
        g[gene::CHAMBER_PRESSURE_2] = self.chamber_pressure_stage2_bar;
        g[gene::EXPANSION_2] = self.expansion_ratio_stage2;
        g[gene::MIXTURE_2] = self.mixture_ratio_stage2;
        g[gene::DV_STAGE1] = self.dv_stage1_mps;
        g
    }

    /// The genome a decoded design request corresponds to (pressures come
    /// back out in bar).
    pub fn from_spec(spec: &crate::assembly::VehicleSpec) -> GenomeTable {
        GenomeTable {
            radius_stage1_m: spec.stage1.radius,
            throat_diameter_stage1_m: spec.stage1.engine.throat_diameter,
            chamber_pressure_stage1_bar: spec.stage1.engine.chamber_pressure / 1e5,
            expansion_ratio_stage1: spec.stage1.engine.expansion_ratio,
            mixture_ratio_stage1: spec.stage1.engine.mixture_ratio,
            radius_stage2_m: spec.stage2.radius,
            throat_diameter_stage2_m: spec.stage2.engine.throat_diameter,
            chamber_pressure_stage2_bar: spec.stage2.engine.chamber_pressure / 1e5,
            expansion_ratio_stage2: spec.stage2.engine.expansion_ratio,
            mixture_ratio_stage2: spec.stage2.engine.mixture_ratio,
            dv_stage1_mps: spec.dv1_ascent,
        }
    }

    pub fn from_genome(g: &Genome) -> GenomeTable {
        GenomeTable {
            radius_stage1_m: g[gene::RADIUS_1],
            throat_diameter_stage1_m: g[gene::THROAT_1],
            chamber_pressure_stage1_bar: g[gene::CHAMBER_PRESSURE_1],
            expansion_ratio_stage1: g[gene::EXPANSION_1],
            mixture_ratio_stage1: g[gene::MIXTURE_1],
            radius_stage2_m: g[gene::RADIUS_2],
            throat_diameter_stage2_m: g[gene::THROAT_2],
            chamber_pressure_stage2_bar: g[gene::CHAMBER_PRESSURE_2],
            expansion_ratio_stage2: g[gene::EXPANSION_2],
            mixture_ratio_stage2: g[gene::MIXTURE_2],
            dv_stage1_mps: g[gene::DV_STAGE1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Grid of first-stage ascent delta-v values, m/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv_stage1_grid_mps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySection {
    /// `dv_allocation`, `isp_offset` or `dv_budget_offset`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    /// Grid in the axis unit: m/s for the delta-v axes, s for Isp.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    /// Calibration file; the `RLV_CALIBRATION` environment variable wins
    /// over this entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Canonical text form; `parse(to_toml(c))` reproduces `c`.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Mission after applying overrides; defaults to GTO.
    pub fn resolved_mission(&self) -> Result<MissionSpec, ConfigError> {
        let section = self.mission.clone().unwrap_or_default();
        let name = section.name.as_deref().unwrap_or("GTO");
        let mut mission = missions::builtin(name).map_err(|e| invalid(e.to_string()))?;
        if let Some(payload) = section.payload_mass_kg {
            mission.payload_mass = payload;
        }
        if let Some(dv_ideal) = section.dv_ideal_mps {
            mission.dv_ideal = dv_ideal;
            mission.losses = missions::standard_losses(dv_ideal);
        }
        if let Some(dv_total) = section.dv_total_mps {
            mission.dv_total = dv_total;
        }
        if let Some(credit) = section.rotation_credit_mps {
            mission.rotation_credit = credit;
        }
        mission.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(mission)
    }

    /// Stage propellants; defaults to the kerosene reference pairing.
    pub fn fuels(&self) -> Result<(Fuel, Fuel), ConfigError> {
        match &self.vehicle {
            None => Ok((Fuel::Rp1, Fuel::Rp1)),
            Some(section) => {
                let s1 = section.propellant_stage1.parse::<Fuel>().map_err(invalid)?;
                let s2 = section.propellant_stage2.parse::<Fuel>().map_err(invalid)?;
                Ok((s1, s2))
            }
        }
    }

    /// Objective selection; defaults to GLOW. The expendable-mass
    /// objective defaults to 10 first-stage flights.
    pub fn objective_spec(&self) -> Result<ObjectiveSpec, ConfigError> {
        let section = self.objective.clone().unwrap_or_default();
        let objective = match section.kind.as_deref() {
            None => Objective::Glow,
            Some(kind) => kind.parse::<Objective>().map_err(invalid)?,
        };
        let n_reuses = match objective {
            Objective::ExpendableMass => {
                let n = section.n_reuses.unwrap_or(10);
                if n == 0 {
                    return Err(invalid("n_reuses must be at least 1"));
                }
                n
            }
            _ => 1,
        };
        Ok(ObjectiveSpec { objective, n_reuses })
    }

    /// Search settings from the profile plus any explicit overrides.
    pub fn ga_settings(&self) -> Result<GaSettings, ConfigError> {
        let section = self.search.clone().unwrap_or_default();
        let profile = section.profile.unwrap_or(SearchProfile::Desk);
        let mut ga = match profile {
            SearchProfile::Paper => GaSettings::paper(),
            SearchProfile::Desk | SearchProfile::Custom => GaSettings::desk(),
        };
        if profile == SearchProfile::Custom
            && (section.population.is_none() || section.generations.is_none())
        {
            return Err(invalid(
                "profile = \"custom\" requires population and generations",
            ));
        }
        if let Some(v) = section.population {
            ga.population = v;
        }
        if let Some(v) = section.generations {
            ga.generations = v;
        }
        if let Some(v) = section.tournament_size {
            ga.tournament_size = v;
        }
        if let Some(v) = section.mating_prob {
            ga.mating_prob = v;
        }
        if let Some(v) = section.gene_swap_prob {
            ga.gene_swap_prob = v;
        }
        if let Some(v) = section.mutation_prob {
            ga.mutation_prob = v;
        }
        if let Some(v) = section.gene_mutation_prob {
            ga.gene_mutation_prob = v;
        }
        if ga.population == 0 || ga.generations == 0 {
            return Err(invalid("population and generations must be positive"));
        }
        for (name, p) in [
            ("mating_prob", ga.mating_prob),
            ("gene_swap_prob", ga.gene_swap_prob),
            ("mutation_prob", ga.mutation_prob),
            ("gene_mutation_prob", ga.gene_mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(ga)
    }

    pub fn seed(&self) -> u64 {
        self.search.as_ref().and_then(|s| s.seed).unwrap_or(42)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.paths
            .as_ref()
            .and_then(|p| p.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Calibration file to load instead of the bundled one. The
    /// `RLV_CALIBRATION` environment variable overrides the config entry.
    pub fn calibration_path(&self) -> Option<PathBuf> {
        if let Ok(env_path) = std::env::var("RLV_CALIBRATION") {
            if !env_path.is_empty() {
                return Some(PathBuf::from(env_path));
            }
        }
        self.paths.as_ref().and_then(|p| p.calibration.clone())
    }

    pub fn genome(&self) -> Result<Genome, ConfigError> {
        self.genome
            .map(GenomeTable::to_genome)
            .ok_or_else(|| invalid("a [genome] section is required for this command"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
        [mission]
        name = "GTO"
        payload_mass_kg = 5000.0

        [vehicle]
        propellant_stage1 = "RP-1"
        propellant_stage2 = "LH2"

        [objective]
        kind = "em"
        n_reuses = 10

        [search]
        profile = "desk"
        seed = 7
        population = 120

        [genome]
        radius_stage1_m = 2.1
        throat_diameter_stage1_m = 0.284
        chamber_pressure_stage1_bar = 110.0
        expansion_ratio_stage1 = 25.0
        mixture_ratio_stage1 = 2.1
        radius_stage2_m = 2.0
        throat_diameter_stage2_m = 0.32
        chamber_pressure_stage2_bar = 110.0
        expansion_ratio_stage2 = 200.0
        mixture_ratio_stage2 = 2.3
        dv_stage1_mps = 3000.0

        [sweep]
        dv_stage1_grid_mps = [2500.0, 3000.0, 3500.0]

        [sensitivity]
        axis = "isp_offset"
        grid = [-10.0, 0.0, 10.0]

        [paths]
        output_dir = "runs/demo"
    "#;

    #[test]
    fn full_config_parses_and_resolves() {
        let config = RunConfig::parse(FULL).unwrap();
        let mission = config.resolved_mission().unwrap();
        assert_eq!(mission.name, "GTO");
        assert_eq!(config.fuels().unwrap(), (Fuel::Rp1, Fuel::Lh2));
        let objective = config.objective_spec().unwrap();
        assert_eq!(objective.n_reuses, 10);
        let ga = config.ga_settings().unwrap();
        assert_eq!(ga.population, 120); // override on top of the profile
        assert_eq!(ga.generations, 30);
        assert_eq!(config.seed(), 7);
        let genome = config.genome().unwrap();
        assert_eq!(genome[gene::CHAMBER_PRESSURE_1], 110.0);
        assert_eq!(genome[gene::DV_STAGE1], 3000.0);
    }

    #[test]
    fn round_trips_through_the_canonical_form() {
        let config = RunConfig::parse(FULL).unwrap();
        let reparsed = RunConfig::parse(&config.to_toml()).unwrap();
        assert_eq!(config, reparsed);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = RunConfig::parse("[mission]\npayload_mass = 5000.0\n").unwrap_err();
        let message = err.to_string();
        assert!(message.contains("payload_mass"), "{message}");

        // A unit typo is an unknown key, not a silent reinterpretation.
        let err = RunConfig::parse("[genome]\nradius_stage1_km = 2.1\n").unwrap_err();
        assert!(err.to_string().contains("radius_stage1_km"));
    }

    #[test]
    fn defaults_cover_an_empty_config() {
        let config = RunConfig::parse("").unwrap();
        assert_eq!(config.resolved_mission().unwrap().name, "GTO");
        assert_eq!(config.fuels().unwrap(), (Fuel::Rp1, Fuel::Rp1));
        assert_eq!(config.objective_spec().unwrap().objective, Objective::Glow);
        assert_eq!(config.ga_settings().unwrap(), GaSettings::desk());
        assert!(config.genome().is_err());
    }

    #[test]
    fn inline_mission_overrides_are_validated() {
        let config = RunConfig::parse(
            "[mission]\nname = \"LEO\"\npayload_mass_kg = 12000.0\n",
        )
        .unwrap();
        let mission = config.resolved_mission().unwrap();
        assert_eq!(mission.payload_mass, 12_000.0);
        assert_eq!(mission.dv_total, 9_500.0);

        // A budget below the physical requirement is caught.
        let config = RunConfig::parse("[mission]\ndv_total_mps = 2000.0\n").unwrap();
        assert!(config.resolved_mission().is_err());
    }

    #[test]
    fn custom_profile_requires_the_size() {
        let config = RunConfig::parse("[search]\nprofile = \"custom\"\n").unwrap();
        assert!(config.ga_settings().is_err());
        let config = RunConfig::parse(
            "[search]\nprofile = \"custom\"\npopulation = 40\ngenerations = 5\n",
        )
        .unwrap();
        let ga = config.ga_settings().unwrap();
        assert_eq!((ga.population, ga.generations), (40, 5));
    }

    #[test]
    fn genome_table_round_trips_the_gene_order() {
        let config = RunConfig::parse(FULL).unwrap();
        let table = config.genome.unwrap();
        let genome = table.to_genome();
        assert_eq!(GenomeTable::from_genome(&genome), table);
        assert_eq!(genome[gene::MIXTURE_2], 2.3);
        assert_eq!(genome[gene::EXPANSION_2], 200.0);
    }
}
