//! C interface to the launcher design library.
//!
//! Handles are opaque pointers created and released by this library;
//! every fallible call returns an `RlvStatus` and leaves a description
//! of the failure in a thread-local slot readable via `rlv_last_error`.
//! Genomes cross the boundary as a flat array of `RLV_GENOME_LEN`
//! doubles in the gene order of the search space (first-stage radius,
//! throat diameter, chamber pressure in bar, nozzle expansion ratio,
//! mixture ratio; the same five for the upper stage; first-stage ascent
//! delta-v in m/s).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use rlvopt::assembly::{assemble, AssemblyContext, AssemblyOptions, VehicleDesign};
use rlvopt::calibration::Calibration;
use rlvopt::missions::{self, MissionSpec};
use rlvopt::optimizer::{optimize, GaSettings, Genome, GenomeSpace, ObjectiveSpec, GENOME_LEN};
use rlvopt::propellants::Fuel;
use rlvopt::report::DesignReport;
use rlvopt::trajectory::UsStandard1976;

/// Number of doubles in a genome array.
pub const RLV_GENOME_LEN: usize = 11;

/// Largest admissible magnitude of the specific-impulse offset, s.
pub const RLV_MAX_ISP_OFFSET: f64 = 50.0;

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlvStatus {
    /// The call succeeded.
    RlvOk = 0,
    /// A required pointer argument was null.
    RlvNullPointer = 1,
    /// An argument was outside its admissible range.
    RlvInvalidArgument = 2,
    /// The design point violates a constraint or does not converge.
    RlvInfeasible = 3,
    /// The search finished without a single feasible design.
    RlvSearchFailed = 4,
    /// A file could not be read or parsed.
    RlvIo = 5,
}

/// Stage propellant selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlvFuel {
    RlvFuelLh2 = 0,
    RlvFuelRp1 = 1,
    RlvFuelLch4 = 2,
}

impl From<RlvFuel> for Fuel {
    fn from(fuel: RlvFuel) -> Fuel {
        match fuel {
            RlvFuel::RlvFuelLh2 => Fuel::Lh2,
            RlvFuel::RlvFuelRp1 => Fuel::Rp1,
            RlvFuel::RlvFuelLch4 => Fuel::Lch4,
        }
    }
}

/// Reference mission selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlvMission {
    RlvMissionGto = 0,
    RlvMissionLeo = 1,
}

impl From<RlvMission> for MissionSpec {
    fn from(mission: RlvMission) -> MissionSpec {
        match mission {
            RlvMission::RlvMissionGto => missions::gto(),
            RlvMission::RlvMissionLeo => missions::leo(),
        }
    }
}

/// Quantity minimized by `rlv_optimize`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RlvObjective {
    /// Gross liftoff mass.
    RlvObjectiveGlow = 0,
    /// Total structural mass of both stages.
    RlvObjectiveStructuralMass = 1,
    /// Structural mass expended per flight at the given reuse count.
    RlvObjectiveExpendableMass = 2,
}

/// Evaluation environment: thermochemistry, calibration, atmosphere.
pub struct RlvContext {
    calibration: Option<Calibration>,
    isp_offset: f64,
    atmosphere: UsStandard1976,
}

/// One assembled vehicle; read it through the `rlv_design_*` getters.
pub struct RlvDesign {
    design: VehicleDesign,
    objective: ObjectiveSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() =
            CString::new(message).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    });
}

fn fail(status: RlvStatus, message: impl Into<String>) -> RlvStatus {
    set_error(message);
    status
}

impl RlvContext {
    fn assembly_context(&self) -> AssemblyContext<'_> {
        AssemblyContext {
            tables: rlvopt::propellants::ThermoTables::bundled(),
            calibration: self.calibration.as_ref().unwrap_or_else(|| Calibration::shipped()),
            atmosphere: &self.atmosphere,
            isp_offset: self.isp_offset,
        }
    }
}

/// Description of the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rlv_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Number of doubles expected in a genome array.
#[no_mangle]
pub extern "C" fn rlv_genome_len() -> usize {
    RLV_GENOME_LEN
}

/// New evaluation context with the shipped calibration.
#[no_mangle]
pub extern "C" fn rlv_context_new() -> *mut RlvContext {
    Box::into_raw(Box::new(RlvContext {
        calibration: None,
        isp_offset: 0.0,
        atmosphere: UsStandard1976,
    }))
}

/// Replace the calibration of `ctx` with the contents of a file.
///
/// # Safety
/// `ctx` must come from `rlv_context_new` and `path` must be a valid
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rlv_context_load_calibration(
    ctx: *mut RlvContext,
    path: *const c_char,
) -> RlvStatus {
    let Some(ctx) = (unsafe { ctx.as_mut() }) else {
        return fail(RlvStatus::RlvNullPointer, "context is null");
    };
    if path.is_null() {
        return fail(RlvStatus::RlvNullPointer, "path is null");
    }
    let Ok(path) = (unsafe { CStr::from_ptr(path) }).to_str() else {
        return fail(RlvStatus::RlvInvalidArgument, "path is not valid UTF-8");
    };
    match Calibration::load(Path::new(path)) {
        Ok(calibration) => {
            ctx.calibration = Some(calibration);
            RlvStatus::RlvOk
        }
        Err(err) => fail(RlvStatus::RlvIo, err.to_string()),
    }
}

/// Shift every engine's specific impulse by `seconds` (|seconds| <= 50).
///
/// # Safety
/// `ctx` must come from `rlv_context_new`.
#[no_mangle]
pub unsafe extern "C" fn rlv_context_set_isp_offset(
    ctx: *mut RlvContext,
    seconds: f64,
) -> RlvStatus {
    let Some(ctx) = (unsafe { ctx.as_mut() }) else {
        return fail(RlvStatus::RlvNullPointer, "context is null");
    };
    if !seconds.is_finite() || seconds.abs() > RLV_MAX_ISP_OFFSET {
        return fail(
            RlvStatus::RlvInvalidArgument,
            format!("Isp offset {seconds} outside [-50, 50] s"),
        );
    }
    ctx.isp_offset = seconds;
    RlvStatus::RlvOk
}

/// Release a context. Null is ignored.
///
/// # Safety
/// `ctx` must come from `rlv_context_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rlv_context_free(ctx: *mut RlvContext) {
    if !ctx.is_null() {
        drop(unsafe { Box::from_raw(ctx) });
    }
}

fn objective_spec(objective: RlvObjective, n_reuses: u32) -> ObjectiveSpec {
    match objective {
        RlvObjective::RlvObjectiveGlow => ObjectiveSpec::glow(),
        RlvObjective::RlvObjectiveStructuralMass => ObjectiveSpec::structural_mass(),
        RlvObjective::RlvObjectiveExpendableMass => ObjectiveSpec::expendable_mass(n_reuses),
    }
}

/// Assemble the vehicle described by `genome` and hand back a design.
///
/// # Safety
/// `ctx` must come from `rlv_context_new`; `genome` must point at
/// `genome_len` doubles; `out_design` must be a valid destination.
#[no_mangle]
pub unsafe extern "C" fn rlv_evaluate(
    ctx: *const RlvContext,
    fuel_stage1: RlvFuel,
    fuel_stage2: RlvFuel,
    mission: RlvMission,
    genome: *const f64,
    genome_len: usize,
    out_design: *mut *mut RlvDesign,
) -> RlvStatus {
    let Some(ctx) = (unsafe { ctx.as_ref() }) else {
        return fail(RlvStatus::RlvNullPointer, "context is null");
    };
    if out_design.is_null() {
        return fail(RlvStatus::RlvNullPointer, "output pointer is null");
    }
    if genome.is_null() {
        return fail(RlvStatus::RlvNullPointer, "genome is null");
    }
    if genome_len != GENOME_LEN {
        return fail(
            RlvStatus::RlvInvalidArgument,
            format!("genome has {genome_len} genes, expected {GENOME_LEN}"),
        );
    }
    let mut values: Genome = [0.0; GENOME_LEN];
    values.copy_from_slice(unsafe { std::slice::from_raw_parts(genome, GENOME_LEN) });

    let space = GenomeSpace::new(fuel_stage1.into(), fuel_stage2.into());
    let problems = space.check_bounds(&values);
    if !problems.is_empty() {
        return fail(RlvStatus::RlvInvalidArgument, problems.join("; "));
    }
    let mission: MissionSpec = mission.into();
    let assembly_ctx = ctx.assembly_context();
    match assemble(&space.vehicle_spec(&values), &mission, &AssemblyOptions::default(), &assembly_ctx)
    {
        Ok(design) => {
            let handle = Box::new(RlvDesign { design, objective: ObjectiveSpec::glow() });
            unsafe { *out_design = Box::into_raw(handle) };
            RlvStatus::RlvOk
        }
        Err(err) => fail(RlvStatus::RlvInfeasible, err.to_string()),
    }
}

/// Search the design space and hand back the best feasible design.
/// `population` and `generations` of zero select the desk-scale defaults.
///
/// # Safety
/// `ctx` must come from `rlv_context_new`; `out_design` must be a valid
/// destination.
#[no_mangle]
pub unsafe extern "C" fn rlv_optimize(
    ctx: *const RlvContext,
    fuel_stage1: RlvFuel,
    fuel_stage2: RlvFuel,
    mission: RlvMission,
    objective: RlvObjective,
    n_reuses: u32,
    population: u32,
    generations: u32,
    seed: u64,
    out_design: *mut *mut RlvDesign,
) -> RlvStatus {
    let Some(ctx) = (unsafe { ctx.as_ref() }) else {
        return fail(RlvStatus::RlvNullPointer, "context is null");
    };
    if out_design.is_null() {
        return fail(RlvStatus::RlvNullPointer, "output pointer is null");
    }
    if objective == RlvObjective::RlvObjectiveExpendableMass && n_reuses == 0 {
        return fail(RlvStatus::RlvInvalidArgument, "reuse count must be positive");
    }
    let mut settings = GaSettings::desk();
    if population > 0 {
        settings.population = population as usize;
    }
    if generations > 0 {
        settings.generations = generations as usize;
    }
    let space = GenomeSpace::new(fuel_stage1.into(), fuel_stage2.into());
    let objective = objective_spec(objective, n_reuses);
    let mission: MissionSpec = mission.into();
    let assembly_ctx = ctx.assembly_context();
    match optimize(&space, &mission, &objective, &settings, seed, &assembly_ctx) {
        Ok(outcome) => {
            let handle = Box::new(RlvDesign { design: outcome.best_design, objective });
            unsafe { *out_design = Box::into_raw(handle) };
            RlvStatus::RlvOk
        }
        Err(err) => fail(RlvStatus::RlvSearchFailed, err.to_string()),
    }
}

/// Release a design. Null is ignored.
///
/// # Safety
/// `design` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_free(design: *mut RlvDesign) {
    if !design.is_null() {
        drop(unsafe { Box::from_raw(design) });
    }
}

unsafe fn design_scalar(
    design: *const RlvDesign,
    value: impl FnOnce(&RlvDesign) -> f64,
) -> f64 {
    match unsafe { design.as_ref() } {
        Some(handle) => value(handle),
        None => {
            set_error("design is null");
            f64::NAN
        }
    }
}

/// Gross liftoff mass, kg. NaN when `design` is null.
///
/// # Safety
/// `design` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_glow_kg(design: *const RlvDesign) -> f64 {
    unsafe { design_scalar(design, |h| h.design.glow) }
}

/// Structural mass of both stages, kg. NaN when `design` is null.
///
/// # Safety
/// `design` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_structural_mass_kg(design: *const RlvDesign) -> f64 {
    unsafe { design_scalar(design, |h| h.design.structural_mass()) }
}

/// Structural mass expended per flight over `n_reuses` booster flights,
/// kg. NaN when `design` is null.
///
/// # Safety
/// `design` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_expendable_mass_kg(
    design: *const RlvDesign,
    n_reuses: u32,
) -> f64 {
    unsafe { design_scalar(design, |h| h.design.expendable_mass(n_reuses)) }
}

/// Value of the objective the design was optimized for, kg.
/// NaN when `design` is null.
///
/// # Safety
/// `design` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_objective_kg(design: *const RlvDesign) -> f64 {
    unsafe { design_scalar(design, |h| h.objective.value(&h.design)) }
}

/// Engine count of a stage (1 = booster, 2 = upper). -1 on bad input.
///
/// # Safety
/// `design` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_engine_count(
    design: *const RlvDesign,
    stage: u32,
) -> i32 {
    let Some(handle) = (unsafe { design.as_ref() }) else {
        set_error("design is null");
        return -1;
    };
    match stage {
        1 => handle.design.stage1.engine_count as i32,
        2 => handle.design.stage2.engine_count as i32,
        _ => {
            set_error(format!("stage {stage} does not exist, use 1 or 2"));
            -1
        }
    }
}

/// Genome of the design in search-space gene order.
///
/// # Safety
/// `design` must come from this library; `out_genome` must point at
/// `genome_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_genome(
    design: *const RlvDesign,
    out_genome: *mut f64,
    genome_len: usize,
) -> RlvStatus {
    let Some(handle) = (unsafe { design.as_ref() }) else {
        return fail(RlvStatus::RlvNullPointer, "design is null");
    };
    if out_genome.is_null() {
        return fail(RlvStatus::RlvNullPointer, "output pointer is null");
    }
    if genome_len != GENOME_LEN {
        return fail(
            RlvStatus::RlvInvalidArgument,
            format!("genome buffer has {genome_len} slots, expected {GENOME_LEN}"),
        );
    }
    let genome = rlvopt::config::GenomeTable::from_spec(&handle.design.spec).to_genome();
    unsafe { std::slice::from_raw_parts_mut(out_genome, GENOME_LEN) }.copy_from_slice(&genome);
    RlvStatus::RlvOk
}

/// Full design report as a JSON document. Free with `rlv_string_free`.
/// Null when `design` is null.
///
/// # Safety
/// `design` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn rlv_design_report_json(design: *const RlvDesign) -> *mut c_char {
    let Some(handle) = (unsafe { design.as_ref() }) else {
        set_error("design is null");
        return ptr::null_mut();
    };
    let report = DesignReport::new(&handle.design, &handle.objective);
    match CString::new(report.to_json()) {
        Ok(json) => json.into_raw(),
        Err(_) => {
            set_error("report contains interior NUL bytes");
            ptr::null_mut()
        }
    }
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rlv_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}
