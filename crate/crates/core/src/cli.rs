//! Command-line front end: flag parsing, config merging, the five
//! subcommands, and emission of the report and CSV artifacts.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::assembly::{assemble, AssemblyContext, AssemblyOptions, VehicleDesign};
use crate::calibration::Calibration;
use crate::config::{ConfigError, GenomeTable, RunConfig, SearchProfile};
use crate::missions::MissionSpec;
use crate::optimizer::{
    self, gene, GaSettings, GenomeSpace, Objective, ObjectiveSpec, OptimizationOutcome,
};
use crate::propellants::{Fuel, ThermoTables};
use crate::report::{self, CurveRow, DesignReport};
use crate::trajectory::UsStandard1976;

/// Largest Isp perturbation the sensitivity axis accepts, s.
const MAX_ISP_OFFSET: f64 = 50.0;
/// Largest delta-v budget perturbation, m/s.
const MAX_BUDGET_OFFSET: f64 = 1500.0;

#[derive(Debug, Parser)]
#[command(
    name = "rlvopt",
    version,
    about = "Design and optimization of two-stage launchers with a reusable first stage"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML). Flags below override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for the search.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Search size: `paper` (5000 x 50) or `desk` (200 x 30).
    #[arg(long, global = true, value_name = "PROFILE")]
    pub profile: Option<String>,
    /// Directory for report.txt / report.json / history.csv / sweep.csv.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Minimized quantity: `glow`, `sm` or `em`.
    #[arg(long, global = true, value_name = "OBJECTIVE")]
    pub objective: Option<String>,
    /// First-stage flight count for the `em` objective.
    #[arg(long, global = true, value_name = "N")]
    pub reuses: Option<u32>,
    /// Stage propellants, e.g. `RP-1/LH2` (first/upper).
    #[arg(long, global = true, value_name = "STAGE1/STAGE2")]
    pub combo: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble and report the design point given in the config [genome].
    Evaluate,
    /// Search the design space with the genetic algorithm.
    Optimize,
    /// Re-optimize along a grid of first-stage ascent delta-v values.
    Sweep {
        /// Comma-separated grid, m/s (overrides the config).
        #[arg(long, value_name = "V1,V2,...")]
        grid: Option<String>,
    },
    /// Re-optimize along a model-perturbation axis.
    Sensitivity {
        /// `dv_allocation`, `isp_offset` or `dv_budget_offset`.
        #[arg(long, value_name = "AXIS")]
        axis: Option<String>,
        /// Comma-separated grid in the axis unit (m/s or s).
        #[arg(long, value_name = "V1,V2,...")]
        grid: Option<String>,
    },
    /// Rebuild the reference vehicle and compare against published data.
    Validate,
}

/// Failure with the process exit code it maps to: 1 for infeasible
/// designs and failed validation, 2 for configuration and usage problems.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn usage_error(message: impl Into<String>) -> CliError {
    CliError {
        exit_code: 2,
        message: message.into(),
    }
}

fn run_error(message: impl Into<String>) -> CliError {
    CliError {
        exit_code: 1,
        message: message.into(),
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        usage_error(err.to_string())
    }
}

/// Everything a subcommand needs, resolved from config plus flags.
#[derive(Debug)]
struct Session {
    config: RunConfig,
    mission: MissionSpec,
    fuels: (Fuel, Fuel),
    objective: ObjectiveSpec,
    ga: GaSettings,
    seed: u64,
    out_dir: PathBuf,
    /// Loaded from RLV_CALIBRATION or the config; None = bundled.
    calibration: Option<Calibration>,
}

impl Session {
    fn new(common: &CommonArgs) -> Result<Session, CliError> {
        let mut config = match &common.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };

        // Flags override their config counterparts before resolution.
        if let Some(profile) = &common.profile {
            let profile = profile.parse::<SearchProfile>().map_err(usage_error)?;
            config.search.get_or_insert_with(Default::default).profile = Some(profile);
        }
        if let Some(seed) = common.seed {
            config.search.get_or_insert_with(Default::default).seed = Some(seed);
        }
        if let Some(objective) = &common.objective {
            objective.parse::<Objective>().map_err(usage_error)?;
            config.objective.get_or_insert_with(Default::default).kind =
                Some(objective.clone());
        }
        if let Some(reuses) = common.reuses {
            config.objective.get_or_insert_with(Default::default).n_reuses = Some(reuses);
        }
        if let Some(combo) = &common.combo {
            let (s1, s2) = combo
                .split_once('/')
                .ok_or_else(|| usage_error(format!("--combo {combo}: expected STAGE1/STAGE2")))?;
            config.vehicle = Some(crate::config::VehicleSection {
                propellant_stage1: s1.to_string(),
                propellant_stage2: s2.to_string(),
            });
        }
        if let Some(out) = &common.out {
            config.paths.get_or_insert_with(Default::default).output_dir = Some(out.clone());
        }

        let calibration = match config.calibration_path() {
            Some(path) => Some(Calibration::load(&path).map_err(|e| usage_error(e.to_string()))?),
            None => None,
        };

        Ok(Session {
            mission: config.resolved_mission()?,
            fuels: config.fuels()?,
            objective: config.objective_spec()?,
            ga: config.ga_settings()?,
            seed: config.seed(),
            out_dir: config.output_dir(),
            calibration,
            config,
        })
    }

    fn calibration(&self) -> &Calibration {
        self.calibration.as_ref().unwrap_or_else(|| Calibration::shipped())
    }

    fn context<'a>(&'a self, atmosphere: &'a UsStandard1976) -> AssemblyContext<'a> {
        AssemblyContext {
            tables: ThermoTables::bundled(),
            calibration: self.calibration(),
            atmosphere,
            isp_offset: 0.0,
        }
    }

    fn space(&self) -> GenomeSpace {
        GenomeSpace::new(self.fuels.0, self.fuels.1)
    }

    fn write(&self, name: &str, content: &str) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.out_dir).map_err(|e| {
            usage_error(format!("cannot create {}: {e}", self.out_dir.display()))
        })?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, content)
            .map_err(|e| usage_error(format!("cannot write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let session = Session::new(&cli.common)?;
    match &cli.command {
        Command::Evaluate => cmd_evaluate(&session),
        Command::Optimize => cmd_optimize(&session),
        Command::Sweep { grid } => cmd_sweep(&session, grid.as_deref()),
        Command::Sensitivity { axis, grid } => {
            cmd_sensitivity(&session, axis.as_deref(), grid.as_deref())
        }
        Command::Validate => cmd_validate(&session),
    }
}

fn cmd_evaluate(session: &Session) -> Result<(), CliError> {
    let genome = session.config.genome()?;
    let space = session.space();
    let problems = space.check_bounds(&genome);
    if !problems.is_empty() {
        return Err(usage_error(format!(
            "design out of bounds: {}",
            problems.join("; ")
        )));
    }

    let atmosphere = UsStandard1976;
    let ctx = session.context(&atmosphere);
    let spec = space.vehicle_spec(&genome);
    let design = assemble(&spec, &session.mission, &AssemblyOptions::default(), &ctx)
        .map_err(|e| run_error(e.to_string()))?;

    emit_design(session, &design)
}

fn emit_design(session: &Session, design: &VehicleDesign) -> Result<(), CliError> {
    let sheet = DesignReport::new(design, &session.objective);
    print!("{}", report::render_design(&sheet));
    session.write("report.txt", &report::render_design(&sheet))?;
    session.write("report.json", &sheet.to_json())?;
    Ok(())
}

fn cmd_optimize(session: &Session) -> Result<(), CliError> {
    let outcome = run_search(session, &session.space(), &session.mission, 0.0, session.seed)?;
    eprintln!(
        "best {} = {:.2} t after {} evaluations (seed {})",
        session.objective.label(),
        outcome.best_fitness * 1e-3,
        outcome.evaluations,
        outcome.seed
    );
    session.write("history.csv", &report::history_csv(&outcome.history))?;
    emit_design(session, &outcome.best_design)
}

/// One seeded search under an optional Isp perturbation.
fn run_search(
    session: &Session,
    space: &GenomeSpace,
    mission: &MissionSpec,
    isp_offset: f64,
    seed: u64,
) -> Result<OptimizationOutcome, CliError> {
    let atmosphere = UsStandard1976;
    let ctx = session.context(&atmosphere).with_isp_offset(isp_offset);
    optimizer::optimize(space, mission, &session.objective, &session.ga, seed, &ctx)
        .map_err(|e| run_error(e.to_string()))
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| usage_error(format!("grid entry `{part}` is not a number")))
        })
        .collect()
}

fn default_dv_grid(space: &GenomeSpace) -> Vec<f64> {
    let spec = &space.genes[gene::DV_STAGE1];
    let mut grid = Vec::new();
    let mut v = 2500.0_f64.max(spec.min);
    while v <= 4500.0_f64.min(spec.max) + 1e-9 {
        grid.push(v);
        v += 250.0;
    }
    grid
}

fn cmd_sweep(session: &Session, grid_flag: Option<&str>) -> Result<(), CliError> {
    let space = session.space();
    let grid = match grid_flag {
        Some(text) => parse_grid(text)?,
        None => session
            .config
            .sweep
            .as_ref()
            .and_then(|s| s.dv_stage1_grid_mps.clone())
            .unwrap_or_else(|| default_dv_grid(&space)),
    };
    run_allocation_sweep(session, &space, &grid)
}

fn run_allocation_sweep(
    session: &Session,
    space: &GenomeSpace,
    grid: &[f64],
) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(usage_error("the sweep grid is empty"));
    }
    let dv_spec = &space.genes[gene::DV_STAGE1];
    for &v in grid {
        if v < dv_spec.min - 1e-9 || v > dv_spec.max + 1e-9 {
            return Err(usage_error(format!(
                "{} = {v} outside [{}, {}]",
                dv_spec.name, dv_spec.min, dv_spec.max
            )));
        }
    }

    let atmosphere = UsStandard1976;
    let ctx = session.context(&atmosphere);
    let points = optimizer::sweep_allocation(
        space,
        &session.mission,
        &session.objective,
        &session.ga,
        session.seed,
        grid,
        &ctx,
    );
    let rows: Vec<CurveRow> = points
        .iter()
        .map(|p| CurveRow {
            axis_value: p.dv_stage1,
            best_objective_kg: p.best_fitness,
            best_glow_kg: p.best_glow,
            status: if p.error.is_none() { "ok" } else { "infeasible" }.to_string(),
        })
        .collect();
    print_curve("dv_stage1_mps", &rows);
    session.write("sweep.csv", &report::curve_csv("dv_stage1_mps", &rows))
}

fn print_curve(axis: &str, rows: &[CurveRow]) {
    println!("{axis:>20} {:>18} {:>14}", "best objective [t]", "status");
    for row in rows {
        match row.best_objective_kg {
            Some(v) => println!("{:>20} {:>18.2} {:>14}", row.axis_value, v * 1e-3, row.status),
            None => println!("{:>20} {:>18} {:>14}", row.axis_value, "-", row.status),
        }
    }
}

fn cmd_sensitivity(
    session: &Session,
    axis_flag: Option<&str>,
    grid_flag: Option<&str>,
) -> Result<(), CliError> {
    let section = session.config.sensitivity.clone().unwrap_or_default();
    let axis = axis_flag
        .map(str::to_string)
        .or(section.axis)
        .ok_or_else(|| {
            usage_error("an axis is required: dv_allocation, isp_offset, or dv_budget_offset")
        })?;
    let grid = match grid_flag {
        Some(text) => Some(parse_grid(text)?),
        None => section.grid,
    };

    let space = session.space();
    match axis.as_str() {
        "dv_allocation" => {
            let grid = grid.unwrap_or_else(|| default_dv_grid(&space));
            run_allocation_sweep(session, &space, &grid)
        }
        "isp_offset" => {
            let grid = grid.unwrap_or_else(|| vec![-20.0, -10.0, 0.0, 10.0, 20.0]);
            for &delta in &grid {
                if delta.abs() > MAX_ISP_OFFSET {
                    return Err(usage_error(format!(
                        "Isp offset {delta} s outside [-{MAX_ISP_OFFSET}, {MAX_ISP_OFFSET}]"
                    )));
                }
            }
            let rows: Vec<CurveRow> = grid
                .iter()
                .enumerate()
                .map(|(i, &delta)| {
                    eprintln!("isp_offset = {delta} s ...");
                    let result = run_search(
                        session,
                        &space,
                        &session.mission,
                        delta,
                        session.seed.wrapping_add(i as u64),
                    );
                    curve_row(delta, result)
                })
                .collect();
            print_curve("isp_offset_s", &rows);
            session.write("sweep.csv", &report::curve_csv("isp_offset_s", &rows))
        }
        "dv_budget_offset" => {
            let grid = grid.unwrap_or_else(|| vec![-500.0, -250.0, 0.0, 250.0, 500.0]);
            for &delta in &grid {
                if delta.abs() > MAX_BUDGET_OFFSET {
                    return Err(usage_error(format!(
                        "budget offset {delta} m/s outside [-{MAX_BUDGET_OFFSET}, {MAX_BUDGET_OFFSET}]"
                    )));
                }
            }
            let rows: Vec<CurveRow> = grid
                .iter()
                .enumerate()
                .map(|(i, &delta)| {
                    eprintln!("dv_budget_offset = {delta} m/s ...");
                    let mut mission = session.mission.clone();
                    mission.dv_total += delta;
                    let result = match mission.validate() {
                        Ok(()) => run_search(
                            session,
                            &space,
                            &mission,
                            0.0,
                            session.seed.wrapping_add(i as u64),
                        ),
                        Err(e) => Err(run_error(e.to_string())),
                    };
                    curve_row(delta, result)
                })
                .collect();
            print_curve("dv_budget_offset_mps", &rows);
            session.write("sweep.csv", &report::curve_csv("dv_budget_offset_mps", &rows))
        }
        other => Err(usage_error(format!(
            "unknown axis `{other}` (expected dv_allocation, isp_offset, or dv_budget_offset)"
        ))),
    }
}

fn curve_row(axis_value: f64, result: Result<OptimizationOutcome, CliError>) -> CurveRow {
    match result {
        Ok(outcome) => CurveRow {
            axis_value,
            best_objective_kg: Some(outcome.best_fitness),
            best_glow_kg: Some(outcome.best_design.glow),
            status: "ok".to_string(),
        },
        Err(err) => {
            eprintln!("  point failed: {}", err.message);
            CurveRow {
                axis_value,
                best_objective_kg: None,
                best_glow_kg: None,
                status: "infeasible".to_string(),
            }
        }
    }
}

/// The reference-vehicle scenario: kerosene on both stages, 5000 kg to
/// GTO, a 3.5 / 8.5 km/s split, nine boost engines plus one vacuum engine.
pub fn reference_vehicle_genome() -> GenomeTable {
    GenomeTable {
        radius_stage1_m: 1.83,
        throat_diameter_stage1_m: 0.264,
        chamber_pressure_stage1_bar: 97.0,
        expansion_ratio_stage1: 16.0,
        mixture_ratio_stage1: 2.36,
        radius_stage2_m: 1.83,
        throat_diameter_stage2_m: 0.264,
        chamber_pressure_stage2_bar: 97.0,
        expansion_ratio_stage2: 165.0,
        mixture_ratio_stage2: 2.36,
        dv_stage1_mps: 3500.0,
    }
}

fn cmd_validate(session: &Session) -> Result<(), CliError> {
    let started = Instant::now();
    let atmosphere = UsStandard1976;
    let ctx = session.context(&atmosphere);
    let space = GenomeSpace::new(Fuel::Rp1, Fuel::Rp1);
    let spec = space.vehicle_spec(&reference_vehicle_genome().to_genome());
    // The published layout itself sits outside two of the search
    // constraints (upper-stage acceleration, slenderness), so violations
    // are recorded, not enforced.
    let options = AssemblyOptions {
        forced_engine_counts: Some((9, 1)),
        record_violations: true,
        ..AssemblyOptions::default()
    };
    let design = assemble(&spec, &crate::missions::gto(), &options, &ctx)
        .map_err(|e| run_error(e.to_string()))?;

    let validation = report::validate_against_reference(&design, started.elapsed().as_secs_f64());
    print!("{}", report::render_validation(&validation));
    session.write("report.txt", &report::render_validation(&validation))?;
    session.write("report.json", &validation.to_json())?;
    if validation.all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = validation
            .rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.quantity.as_str())
            .collect();
        Err(run_error(format!(
            "validation failed: {}",
            failed.join(", ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn flags_override_the_config_defaults() {
        let cli = parse(&[
            "rlvopt", "optimize", "--seed", "9", "--objective", "em", "--reuses", "25",
            "--combo", "LCH4/LH2", "--profile", "paper",
        ]);
        let session = Session::new(&cli.common).unwrap();
        assert_eq!(session.seed, 9);
        assert_eq!(session.objective.objective, Objective::ExpendableMass);
        assert_eq!(session.objective.n_reuses, 25);
        assert_eq!(session.fuels, (Fuel::Lch4, Fuel::Lh2));
        assert_eq!(session.ga.population, 5000);
    }

    #[test]
    fn bad_flag_values_are_usage_errors() {
        let cli = parse(&["rlvopt", "optimize", "--objective", "cost"]);
        assert_eq!(Session::new(&cli.common).unwrap_err().exit_code, 2);
        let cli = parse(&["rlvopt", "optimize", "--combo", "RP-1"]);
        assert_eq!(Session::new(&cli.common).unwrap_err().exit_code, 2);
        let cli = parse(&["rlvopt", "optimize", "--profile", "huge"]);
        assert_eq!(Session::new(&cli.common).unwrap_err().exit_code, 2);
    }

    #[test]
    fn grid_parsing_accepts_lists_and_rejects_junk() {
        assert_eq!(parse_grid("2500, 3000,3500").unwrap(), vec![2500.0, 3000.0, 3500.0]);
        assert_eq!(parse_grid("a,b").unwrap_err().exit_code, 2);
    }

    #[test]
    fn default_allocation_grid_spans_the_published_window() {
        let space = GenomeSpace::new(Fuel::Lh2, Fuel::Lh2);
        let grid = default_dv_grid(&space);
        assert_eq!(grid.first().copied(), Some(2500.0));
        assert_eq!(grid.last().copied(), Some(4500.0));
        assert_eq!(grid.len(), 9);
    }

    #[test]
    fn reference_scenario_matches_the_published_table() {
        let cli = parse(&["rlvopt", "validate"]);
        let session = Session::new(&cli.common).unwrap();
        let atmosphere = UsStandard1976;
        let ctx = session.context(&atmosphere);
        let space = GenomeSpace::new(Fuel::Rp1, Fuel::Rp1);
        let spec = space.vehicle_spec(&reference_vehicle_genome().to_genome());
        let options = AssemblyOptions {
            forced_engine_counts: Some((9, 1)),
            record_violations: true,
            ..AssemblyOptions::default()
        };
        let design = assemble(&spec, &crate::missions::gto(), &options, &ctx).unwrap();
        let validation = report::validate_against_reference(&design, 0.0);
        assert!(validation.all_pass);
    }
}
