//! Report emission: a human-readable design sheet, a machine-readable JSON
//! mirror of the same numbers, CSV histories for plotting, and the
//! fixed reference-vehicle validation table.

use serde::{Deserialize, Serialize};

use crate::assembly::VehicleDesign;
use crate::config::GenomeTable;
use crate::optimizer::{GenerationStats, ObjectiveSpec};

/// Machine-readable mirror of one design sheet. Every number printed by
/// [`render_design`] comes from a field of this struct; units are spelled
/// out in the field names (SI base units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub mission: String,
    pub payload_mass_kg: f64,
    pub propellant_stage1: String,
    pub propellant_stage2: String,
    pub objective: String,
    pub objective_value_kg: f64,
    pub n_reuses: u32,
    /// The design point itself, pasteable into a config `[genome]` table.
    pub genome: GenomeTable,
    pub masses: MassBlock,
    pub geometry: GeometryBlock,
    pub propulsion: PropulsionBlock,
    pub delta_v: DeltaVBlock,
    pub constraints: ConstraintBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassBlock {
    pub glow_kg: f64,
    pub payload_bay_kg: f64,
    pub fairing_kg: f64,
    pub structural_stage1_kg: f64,
    pub propellant_stage1_kg: f64,
    pub landing_propellant_stage1_kg: f64,
    pub structural_coefficient_stage1: f64,
    pub landing_coefficient_stage1: f64,
    pub structural_stage2_kg: f64,
    pub propellant_stage2_kg: f64,
    pub structural_coefficient_stage2: f64,
    pub structural_total_kg: f64,
    pub expendable_per_flight_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryBlock {
    pub length_stage1_m: f64,
    pub length_stage2_m: f64,
    pub fairing_length_m: f64,
    pub total_length_m: f64,
    pub diameter_stage1_m: f64,
    pub diameter_stage2_m: f64,
    pub length_over_diameter: f64,
    /// sqrt(reentry mass / cross section), kg^0.5 per m.
    pub ballistic_parameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropulsionBlock {
    pub stage1: EngineBlock,
    pub stage2: EngineBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineBlock {
    pub engine_count: usize,
    pub thrust_vac_total_n: f64,
    /// Total sea-level thrust; absent for the upper stage, whose bell
    /// never runs at one atmosphere.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thrust_sl_total_n: Option<f64>,
    pub isp_vac_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isp_sl_s: Option<f64>,
    /// Trajectory-weighted ascent mean; first stage only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_isp_s: Option<f64>,
    pub burn_time_s: f64,
    pub engine_mass_kg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaVBlock {
    pub stage1_ascent_mps: f64,
    pub stage2_mps: f64,
    pub landing_mps: f64,
    pub total_ascent_mps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintBlock {
    pub liftoff_acceleration_g: f64,
    pub upper_stage_thrust_to_weight_vac: f64,
    pub residual_eps_stage1_rel: f64,
    pub residual_eps_stage2_rel: f64,
    pub residual_mean_isp_s: f64,
    pub flags: Vec<String>,
    pub violations: Vec<ViolationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRow {
    pub constraint: String,
    pub severity: f64,
    pub detail: String,
}

impl DesignReport {
    pub fn new(design: &VehicleDesign, objective: &ObjectiveSpec) -> DesignReport {
        let s1 = &design.stage1;
        let s2 = &design.stage2;
        DesignReport {
            mission: design.mission.clone(),
            payload_mass_kg: design.payload_mass,
            propellant_stage1: format!("LOX/{}", s1.fuel),
            propellant_stage2: format!("LOX/{}", s2.fuel),
            objective: objective.label(),
            objective_value_kg: objective.value(design),
            n_reuses: objective.n_reuses,
            genome: GenomeTable::from_spec(&design.spec),
            masses: MassBlock {
                glow_kg: design.glow,
                payload_bay_kg: design.bay.total(),
                fairing_kg: design.bay.fairing,
                structural_stage1_kg: s1.structural_mass,
                propellant_stage1_kg: s1.propellant.total,
                landing_propellant_stage1_kg: s1.propellant.landing,
                structural_coefficient_stage1: s1.structural_coefficient,
                landing_coefficient_stage1: s1.landing_coefficient,
                structural_stage2_kg: s2.structural_mass,
                propellant_stage2_kg: s2.propellant_mass,
                structural_coefficient_stage2: s2.structural_coefficient,
                structural_total_kg: design.structural_mass(),
                expendable_per_flight_kg: design.expendable_mass(objective.n_reuses),
            },
            geometry: GeometryBlock {
                length_stage1_m: s1.geometry.stage_length,
                length_stage2_m: s2.geometry.stage_length,
                fairing_length_m: design.total_length
                    - s1.geometry.stage_length
                    - s2.geometry.stage_length,
                total_length_m: design.total_length,
                diameter_stage1_m: 2.0 * s1.radius,
                diameter_stage2_m: 2.0 * s2.radius,
                length_over_diameter: design.length_over_diameter,
                ballistic_parameter: design.ballistic_parameter,
            },
            propulsion: PropulsionBlock {
                stage1: EngineBlock {
                    engine_count: s1.engine_count,
                    thrust_vac_total_n: s1.total_thrust_vac,
                    thrust_sl_total_n: Some(s1.total_thrust_sl),
                    isp_vac_s: s1.engine.isp_vac,
                    isp_sl_s: Some(s1.engine.isp_sl),
                    mean_isp_s: Some(s1.mean_isp),
                    burn_time_s: s1.trajectory.burn_time,
                    engine_mass_kg: s1.engine.engine_mass,
                },
                stage2: EngineBlock {
                    engine_count: s2.engine_count,
                    thrust_vac_total_n: s2.engine.thrust_vac * s2.engine_count as f64,
                    thrust_sl_total_n: None,
                    isp_vac_s: s2.engine.isp_vac,
                    isp_sl_s: None,
                    mean_isp_s: None,
                    burn_time_s: s2.burn_time,
                    engine_mass_kg: s2.engine.engine_mass,
                },
            },
            delta_v: DeltaVBlock {
                stage1_ascent_mps: design.dv.stage1_ascent,
                stage2_mps: design.dv.stage2,
                landing_mps: design.dv.landing,
                total_ascent_mps: design.dv.total_ascent,
            },
            constraints: ConstraintBlock {
                liftoff_acceleration_g: s1.liftoff_acceleration_g,
                upper_stage_thrust_to_weight_vac: s2.thrust_to_weight_vac,
                residual_eps_stage1_rel: design.residuals.eps_stage1_rel,
                residual_eps_stage2_rel: design.residuals.eps_stage2_rel,
                residual_mean_isp_s: design.residuals.mean_isp,
                flags: design.flags.clone(),
                violations: design
                    .violations
                    .iter()
                    .map(|v| ViolationRow {
                        constraint: v.constraint.name().to_string(),
                        severity: v.severity,
                        detail: v.detail.clone(),
                    })
                    .collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The design sheet as printed. Masses in t, thrust in kN, delta-v in
/// km/s; everything traces back to the [`DesignReport`] fields.
pub fn render_design(r: &DesignReport) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let w = &mut out;
    let t = 1e-3; // kg -> t
    let kn = 1e-3; // N -> kN
    let kms = 1e-3; // m/s -> km/s

    let _ = writeln!(w, "mission                  {} ({:.0} kg payload)", r.mission, r.payload_mass_kg);
    let _ = writeln!(w, "propellants              {} / {}  (first / upper)", r.propellant_stage1, r.propellant_stage2);
    let _ = writeln!(w, "objective                {}", r.objective);
    let _ = writeln!(w, "objective value          {:.2} t", r.objective_value_kg * t);
    let _ = writeln!(w);
    let _ = writeln!(w, "MASS AND GEOMETRY                     first stage    upper stage");
    let _ = writeln!(w, "  structural mass        [t]       {:>12.2} {:>14.2}", r.masses.structural_stage1_kg * t, r.masses.structural_stage2_kg * t);
    let _ = writeln!(w, "  propellant mass        [t]       {:>12.2} {:>14.2}", r.masses.propellant_stage1_kg * t, r.masses.propellant_stage2_kg * t);
    let _ = writeln!(w, "  landing propellant     [t]       {:>12.2} {:>14}", r.masses.landing_propellant_stage1_kg * t, "-");
    let _ = writeln!(w, "  structural coefficient [-]       {:>12.4} {:>14.4}", r.masses.structural_coefficient_stage1, r.masses.structural_coefficient_stage2);
    let _ = writeln!(w, "  length                 [m]       {:>12.2} {:>14.2}", r.geometry.length_stage1_m, r.geometry.length_stage2_m);
    let _ = writeln!(w, "  diameter               [m]       {:>12.2} {:>14.2}", r.geometry.diameter_stage1_m, r.geometry.diameter_stage2_m);
    let _ = writeln!(w, "  payload bay            [t]       {:>12.2}", r.masses.payload_bay_kg * t);
    let _ = writeln!(w, "  fairing length         [m]       {:>12.2}", r.geometry.fairing_length_m);
    let _ = writeln!(w);
    let _ = writeln!(w, "PROPULSION                            first stage    upper stage");
    let _ = writeln!(w, "  engines                [-]       {:>12} {:>14}", r.propulsion.stage1.engine_count, r.propulsion.stage2.engine_count);
    let _ = writeln!(w, "  vacuum thrust, total   [kN]      {:>12.0} {:>14.0}", r.propulsion.stage1.thrust_vac_total_n * kn, r.propulsion.stage2.thrust_vac_total_n * kn);
    let _ = match r.propulsion.stage1.thrust_sl_total_n {
        Some(f) => writeln!(w, "  sea-level thrust, total[kN]      {:>12.0} {:>14}", f * kn, "-"),
        None => Ok(()),
    };
    let _ = writeln!(w, "  vacuum Isp             [s]       {:>12.1} {:>14.1}", r.propulsion.stage1.isp_vac_s, r.propulsion.stage2.isp_vac_s);
    let _ = match r.propulsion.stage1.isp_sl_s {
        Some(isp) => writeln!(w, "  sea-level Isp          [s]       {:>12.1} {:>14}", isp, "-"),
        None => Ok(()),
    };
    let _ = match r.propulsion.stage1.mean_isp_s {
        Some(isp) => writeln!(w, "  mean ascent Isp        [s]       {:>12.1} {:>14}", isp, "-"),
        None => Ok(()),
    };
    let _ = writeln!(w, "  burn time              [s]       {:>12.1} {:>14.1}", r.propulsion.stage1.burn_time_s, r.propulsion.stage2.burn_time_s);
    let _ = writeln!(w, "  engine dry mass        [kg]      {:>12.0} {:>14.0}", r.propulsion.stage1.engine_mass_kg, r.propulsion.stage2.engine_mass_kg);
    let _ = writeln!(w);
    let _ = writeln!(w, "DELTA-V");
    let _ = writeln!(w, "  first stage ascent     [km/s]    {:>12.2}", r.delta_v.stage1_ascent_mps * kms);
    let _ = writeln!(w, "  upper stage            [km/s]    {:>12.2}", r.delta_v.stage2_mps * kms);
    let _ = writeln!(w, "  landing reserve        [km/s]    {:>12.2}", r.delta_v.landing_mps * kms);
    let _ = writeln!(w, "  total ascent           [km/s]    {:>12.2}", r.delta_v.total_ascent_mps * kms);
    let _ = writeln!(w);
    let _ = writeln!(w, "TOTALS");
    let _ = writeln!(w, "  GLOW                   [t]       {:>12.2}", r.masses.glow_kg * t);
    let _ = writeln!(w, "  structural mass        [t]       {:>12.2}", r.masses.structural_total_kg * t);
    let _ = writeln!(w, "  expendable per flight  [t]       {:>12.2}   ({} first stage flights)", r.masses.expendable_per_flight_kg * t, r.n_reuses);
    let _ = writeln!(w, "  stack length           [m]       {:>12.2}", r.geometry.total_length_m);
    let _ = writeln!(w, "  length over diameter   [-]       {:>12.1}", r.geometry.length_over_diameter);
    let _ = writeln!(w, "  liftoff acceleration   [g]       {:>12.3}", r.constraints.liftoff_acceleration_g);
    let _ = writeln!(w, "  upper stage TWR (vac)  [-]       {:>12.3}", r.constraints.upper_stage_thrust_to_weight_vac);
    let _ = writeln!(w, "  ballistic parameter    [kg^0.5/m]{:>12.1}", r.geometry.ballistic_parameter);

    if !r.constraints.flags.is_empty() || !r.constraints.violations.is_empty() {
        let _ = writeln!(w);
        let _ = writeln!(w, "NOTES");
        for flag in &r.constraints.flags {
            let _ = writeln!(w, "  - {flag}");
        }
        for v in &r.constraints.violations {
            let _ = writeln!(w, "  - {} violated: {}", v.constraint, v.detail);
        }
    }
    out
}

/// `generation,best_fitness_kg,mean_fitness_kg,feasible_fraction` rows.
pub fn history_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best_fitness_kg,mean_fitness_kg,feasible_fraction\n");
    for row in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.generation, row.best, row.mean, row.feasible_fraction
        ));
    }
    out
}

/// One row of a sweep or sensitivity curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub axis_value: f64,
    pub best_objective_kg: Option<f64>,
    pub best_glow_kg: Option<f64>,
    /// `ok`, or `infeasible` when the point produced no feasible design.
    pub status: String,
}

/// CSV for a swept axis; the first column is named after the axis and its
/// unit (`dv_stage1_mps`, `isp_offset_s`, ...). Infeasible points keep
/// their row with empty value cells.
pub fn curve_csv(axis_header: &str, rows: &[CurveRow]) -> String {
    let mut out = format!("{axis_header},best_objective_kg,best_glow_kg,status\n");
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.axis_value,
            cell(row.best_objective_kg),
            cell(row.best_glow_kg),
            row.status
        ));
    }
    out
}

/// One line of the reference-vehicle comparison. `reference` is the flown
/// vehicle, `target` the value this model is expected to reproduce;
/// untoleranced rows are informational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub quantity: String,
    pub unit: String,
    pub reference: f64,
    pub target: f64,
    pub computed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    /// Conjunction of the toleranced rows.
    pub all_pass: bool,
    pub runtime_s: f64,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Published numbers for the kerosene two-stage reference vehicle flying
/// 5000 kg to GTO with a 3.5 / 8.5 km/s split and a 9 + 1 engine layout.
struct ReferenceQuantity {
    quantity: &'static str,
    unit: &'static str,
    /// Flown vehicle.
    reference: f64,
    /// What the model produced when it was fitted; the gate.
    target: f64,
    /// Absolute tolerance on `computed - target`; None = informational.
    tolerance: Option<f64>,
    extract: fn(&VehicleDesign) -> f64,
}

const REFERENCE_TABLE: &[ReferenceQuantity] = &[
    ReferenceQuantity {
        quantity: "GLOW",
        unit: "t",
        reference: 569.3,
        target: 589.9,
        tolerance: Some(0.05 * 589.9),
        extract: |d| d.glow * 1e-3,
    },
    ReferenceQuantity {
        quantity: "payload bay mass",
        unit: "t",
        reference: 7.4,
        target: 7.4,
        tolerance: Some(0.10 * 7.4),
        extract: |d| d.bay.total() * 1e-3,
    },
    ReferenceQuantity {
        quantity: "upper stage structural mass",
        unit: "t",
        reference: 4.5,
        target: 4.9,
        tolerance: Some(0.10 * 4.9),
        extract: |d| d.stage2.structural_mass * 1e-3,
    },
    ReferenceQuantity {
        quantity: "upper stage propellant mass",
        unit: "t",
        reference: 111.5,
        target: 113.7,
        tolerance: Some(0.10 * 113.7),
        extract: |d| d.stage2.propellant_mass * 1e-3,
    },
    ReferenceQuantity {
        quantity: "upper stage structural coefficient",
        unit: "-",
        reference: 0.039,
        target: 0.041,
        tolerance: Some(0.005),
        extract: |d| d.stage2.structural_coefficient,
    },
    ReferenceQuantity {
        quantity: "first stage structural mass",
        unit: "t",
        reference: 27.2,
        target: 27.4,
        tolerance: Some(0.10 * 27.4),
        extract: |d| d.stage1.structural_mass * 1e-3,
    },
    ReferenceQuantity {
        quantity: "first stage propellant mass",
        unit: "t",
        reference: 418.7,
        target: 436.6,
        tolerance: Some(0.10 * 436.6),
        extract: |d| d.stage1.propellant.total * 1e-3,
    },
    ReferenceQuantity {
        quantity: "landing propellant mass",
        unit: "t",
        reference: 25.0,
        target: 26.6,
        tolerance: Some(0.15 * 26.6),
        extract: |d| d.stage1.propellant.landing * 1e-3,
    },
    ReferenceQuantity {
        quantity: "first stage structural coefficient",
        unit: "-",
        reference: 0.061,
        target: 0.059,
        tolerance: Some(0.005),
        extract: |d| d.stage1.structural_coefficient,
    },
    ReferenceQuantity {
        quantity: "first stage vacuum Isp",
        unit: "s",
        reference: 312.0,
        target: 310.0,
        tolerance: Some(2.0),
        extract: |d| d.stage1.engine.isp_vac,
    },
    ReferenceQuantity {
        quantity: "first stage sea-level Isp",
        unit: "s",
        reference: 283.0,
        target: 282.0,
        tolerance: Some(2.0),
        extract: |d| d.stage1.engine.isp_sl,
    },
    ReferenceQuantity {
        quantity: "first stage burn time",
        unit: "s",
        reference: 162.0,
        target: 156.0,
        tolerance: Some(10.0),
        extract: |d| d.stage1.trajectory.burn_time,
    },
    // Context rows: printed for the comparison, not gated.
    ReferenceQuantity {
        quantity: "first stage vacuum thrust",
        unit: "kN",
        reference: 8227.0,
        target: 8536.0,
        tolerance: None,
        extract: |d| d.stage1.total_thrust_vac * 1e-3,
    },
    ReferenceQuantity {
        quantity: "first stage sea-level thrust",
        unit: "kN",
        reference: 7607.0,
        target: 7770.0,
        tolerance: None,
        extract: |d| d.stage1.total_thrust_sl * 1e-3,
    },
    ReferenceQuantity {
        quantity: "upper stage vacuum thrust",
        unit: "kN",
        reference: 981.0,
        target: 1074.0,
        tolerance: None,
        extract: |d| d.stage2.engine.thrust_vac * d.stage2.engine_count as f64 * 1e-3,
    },
    ReferenceQuantity {
        quantity: "upper stage vacuum Isp",
        unit: "s",
        reference: 348.0,
        target: 351.0,
        tolerance: None,
        extract: |d| d.stage2.engine.isp_vac,
    },
    ReferenceQuantity {
        quantity: "upper stage burn time",
        unit: "s",
        reference: 397.0,
        target: 364.0,
        tolerance: None,
        extract: |d| d.stage2.burn_time,
    },
    ReferenceQuantity {
        quantity: "total length",
        unit: "m",
        reference: 70.1,
        target: 80.6,
        tolerance: None,
        extract: |d| d.total_length,
    },
];

/// Compare an assembled reference vehicle against the published table.
pub fn validate_against_reference(design: &VehicleDesign, runtime_s: f64) -> ValidationReport {
    let rows: Vec<ValidationRow> = REFERENCE_TABLE
        .iter()
        .map(|q| {
            let computed = (q.extract)(design);
            let pass = match q.tolerance {
                Some(tol) => (computed - q.target).abs() <= tol,
                None => true,
            };
            ValidationRow {
                quantity: q.quantity.to_string(),
                unit: q.unit.to_string(),
                reference: q.reference,
                target: q.target,
                computed,
                tolerance: q.tolerance,
                pass,
            }
        })
        .collect();
    let all_pass = rows.iter().all(|r| r.pass);
    ValidationReport {
        rows,
        all_pass,
        runtime_s,
    }
}

pub fn render_validation(report: &ValidationReport) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        "{:<38} {:>6} {:>10} {:>10} {:>10}  {}",
        "quantity", "unit", "flown", "target", "computed", "result"
    );
    for row in &report.rows {
        let verdict = match row.tolerance {
            Some(tol) => {
                let word = if row.pass { "pass" } else { "FAIL" };
                format!("{word} (tol {tol:.3})")
            }
            None => "info".to_string(),
        };
        let _ = writeln!(
            w,
            "{:<38} {:>6} {:>10.3} {:>10.3} {:>10.3}  {}",
            row.quantity, row.unit, row.reference, row.target, row.computed, verdict
        );
    }
    let _ = writeln!(w);
    let _ = writeln!(
        w,
        "result: {} ({} rows checked, {:.2} s)",
        if report.all_pass { "PASS" } else { "FAIL" },
        report.rows.iter().filter(|r| r.tolerance.is_some()).count(),
        report.runtime_s
    );
    out
}
