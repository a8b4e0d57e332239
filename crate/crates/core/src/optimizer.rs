//! Genetic search over the eleven-gene vehicle genome.
//!
//! Selection and variation run serially on a seeded generator so results
//! are reproducible; fitness evaluations are pure functions of the genome
//! and run in parallel, independent of worker count.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::assembly::{assemble, AssemblyContext, AssemblyOptions, StageDesign, VehicleDesign, VehicleSpec};
use crate::missions::MissionSpec;
use crate::propellants::{EngineDesign, Fuel};

pub const GENOME_LEN: usize = 11;

/// Gene order within a genome.
pub mod gene {
    pub const RADIUS_1: usize = 0;
    pub const THROAT_1: usize = 1;
    pub const CHAMBER_PRESSURE_1: usize = 2;
    pub const EXPANSION_1: usize = 3;
    pub const MIXTURE_1: usize = 4;
    pub const RADIUS_2: usize = 5;
    pub const THROAT_2: usize = 6;
    pub const CHAMBER_PRESSURE_2: usize = 7;
    pub const EXPANSION_2: usize = 8;
    pub const MIXTURE_2: usize = 9;
    pub const DV_STAGE1: usize = 10;
}

pub type Genome = [f64; GENOME_LEN];

/// One gene's interval and lattice step (0 = continuous).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneSpec {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GeneSpec {
    fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.max <= self.min {
            return self.min;
        }
        if self.step > 0.0 {
            let points = ((self.max - self.min) / self.step).round() as u64;
            self.min + self.step * rng.gen_range(0..=points) as f64
        } else {
            rng.gen_range(self.min..=self.max)
        }
    }

    /// Clamp into the interval and, for lattice genes, round onto the grid.
    fn snap(&self, value: f64) -> f64 {
        let v = value.clamp(self.min, self.max);
        if self.step > 0.0 {
            let k = ((v - self.min) / self.step).round();
            (self.min + k * self.step).clamp(self.min, self.max)
        } else {
            v
        }
    }

    fn contains(&self, value: f64) -> bool {
        value >= self.min - 1e-9 && value <= self.max + 1e-9
    }
}

/// The search space for one propellant pairing.
#[derive(Debug, Clone, Serialize)]
pub struct GenomeSpace {
    pub fuel_stage1: Fuel,
    pub fuel_stage2: Fuel,
    pub genes: [GeneSpec; GENOME_LEN],
}

impl GenomeSpace {
    pub fn new(fuel_stage1: Fuel, fuel_stage2: Fuel) -> Self {
        let (rof1_min, rof1_max) = fuel_stage1.rof_bounds();
        let (rof2_min, rof2_max) = fuel_stage2.rof_bounds();
        let genes = [
            GeneSpec { name: "first stage radius", min: 1.5, max: 4.0, step: 0.1 },
            GeneSpec { name: "first stage throat diameter", min: 0.1, max: 1.0, step: 0.0 },
            GeneSpec { name: "first stage chamber pressure", min: 50.0, max: 200.0, step: 5.0 },
            GeneSpec { name: "first stage expansion ratio", min: 10.0, max: 90.0, step: 5.0 },
            GeneSpec { name: "first stage mixture ratio", min: rof1_min, max: rof1_max, step: 0.1 },
            GeneSpec { name: "upper stage radius", min: 1.5, max: 4.0, step: 0.1 },
            GeneSpec { name: "upper stage throat diameter", min: 0.1, max: 1.0, step: 0.0 },
            GeneSpec { name: "upper stage chamber pressure", min: 20.0, max: 200.0, step: 5.0 },
            GeneSpec { name: "upper stage expansion ratio", min: 80.0, max: 200.0, step: 5.0 },
            GeneSpec { name: "upper stage mixture ratio", min: rof2_min, max: rof2_max, step: 0.1 },
            GeneSpec { name: "first stage ascent delta-v", min: 2000.0, max: 5000.0, step: 100.0 },
        ];
        GenomeSpace { fuel_stage1, fuel_stage2, genes }
    }

    /// Pin one gene to a fixed value (used by allocation sweeps).
    pub fn freeze(&mut self, index: usize, value: f64) {
        let spec = &mut self.genes[index];
        let v = spec.snap(value);
        spec.min = v;
        spec.max = v;
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Genome {
        let mut genome = [0.0; GENOME_LEN];
        for (slot, spec) in genome.iter_mut().zip(&self.genes) {
            *slot = spec.sample(rng);
        }
        self.repair(&mut genome);
        genome
    }

    /// Enforce structural coupling between genes: the upper radius must lie
    /// within [0.75, 1.0] of the first-stage radius, on its own lattice.
    pub fn repair(&self, genome: &mut Genome) {
        for (slot, spec) in genome.iter_mut().zip(&self.genes) {
            *slot = spec.snap(*slot);
        }
        let r1 = genome[gene::RADIUS_1];
        let spec2 = &self.genes[gene::RADIUS_2];
        let step = if spec2.step > 0.0 { spec2.step } else { 0.1 };
        let lo = (0.75 * r1).max(spec2.min);
        let hi = r1.min(spec2.max);
        let mut r2 = genome[gene::RADIUS_2].clamp(lo, hi.max(lo));
        r2 = spec2.snap(r2);
        // Snapping may push past an off-lattice edge of the window; step
        // back inside (the window is always wider than one step).
        if r2 < lo {
            r2 += step;
        }
        if r2 > hi {
            r2 -= step;
        }
        genome[gene::RADIUS_2] = r2.clamp(spec2.min, spec2.max);
    }

    /// Human-readable bound violations, empty when the genome is valid.
    pub fn check_bounds(&self, genome: &Genome) -> Vec<String> {
        let mut problems = Vec::new();
        for (value, spec) in genome.iter().zip(&self.genes) {
            if !spec.contains(*value) {
                problems.push(format!(
                    "{} = {} outside [{}, {}]",
                    spec.name, value, spec.min, spec.max
                ));
            }
        }
        let r1 = genome[gene::RADIUS_1];
        let r2 = genome[gene::RADIUS_2];
        if r2 > r1 + 1e-9 || r2 < 0.75 * r1 - 1e-9 {
            problems.push(format!(
                "upper stage radius {r2} outside [0.75, 1.0] x first stage radius {r1}"
            ));
        }
        problems
    }

    /// Decode a genome into a physical design request.
    pub fn vehicle_spec(&self, genome: &Genome) -> VehicleSpec {
        VehicleSpec {
            stage1: StageDesign {
                radius: genome[gene::RADIUS_1],
                engine: EngineDesign {
                    fuel: self.fuel_stage1,
                    chamber_pressure: genome[gene::CHAMBER_PRESSURE_1] * 1e5,
                    mixture_ratio: genome[gene::MIXTURE_1],
                    throat_diameter: genome[gene::THROAT_1],
                    expansion_ratio: genome[gene::EXPANSION_1],
                },
            },
            stage2: StageDesign {
                radius: genome[gene::RADIUS_2],
                engine: EngineDesign {
                    fuel: self.fuel_stage2,
                    chamber_pressure: genome[gene::CHAMBER_PRESSURE_2] * 1e5,
                    mixture_ratio: genome[gene::MIXTURE_2],
                    throat_diameter: genome[gene::THROAT_2],
                    expansion_ratio: genome[gene::EXPANSION_2],
                },
            },
            dv1_ascent: genome[gene::DV_STAGE1],
        }
    }
}

/// What the search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Objective {
    /// Gross lift-off mass.
    Glow,
    /// Total structural mass of both stages.
    StructuralMass,
    /// Structural mass expended per flight at a given reuse count.
    ExpendableMass,
}

impl std::str::FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "glow" => Ok(Objective::Glow),
            "sm" | "structural" => Ok(Objective::StructuralMass),
            "em" | "expendable" => Ok(Objective::ExpendableMass),
            other => Err(format!(
                "unknown objective '{other}' (expected glow, sm, or em)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveSpec {
    pub objective: Objective,
    /// First-stage flight count for the expendable-mass objective.
    pub n_reuses: u32,
}

impl ObjectiveSpec {
    pub fn glow() -> Self {
        ObjectiveSpec { objective: Objective::Glow, n_reuses: 1 }
    }

    pub fn structural_mass() -> Self {
        ObjectiveSpec { objective: Objective::StructuralMass, n_reuses: 1 }
    }

    pub fn expendable_mass(n_reuses: u32) -> Self {
        ObjectiveSpec { objective: Objective::ExpendableMass, n_reuses }
    }

    pub fn value(&self, design: &VehicleDesign) -> f64 {
        match self.objective {
            Objective::Glow => design.glow,
            Objective::StructuralMass => design.structural_mass(),
            Objective::ExpendableMass => design.expendable_mass(self.n_reuses),
        }
    }

    pub fn label(&self) -> String {
        match self.objective {
            Objective::Glow => "GLOW".to_string(),
            Objective::StructuralMass => "structural mass".to_string(),
            Objective::ExpendableMass => {
                format!("expendable mass ({} reuses)", self.n_reuses)
            }
        }
    }
}

/// Search hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaSettings {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    /// Probability a consecutive pair is crossed.
    pub mating_prob: f64,
    /// Probability each gene swaps within a crossed pair.
    pub gene_swap_prob: f64,
    /// Probability an individual is mutated.
    pub mutation_prob: f64,
    /// Probability each gene of a mutated individual is resampled.
    pub gene_mutation_prob: f64,
    /// Base penalty (kg) for infeasible designs.
    pub penalty_base: f64,
}

impl GaSettings {
    /// Full-size search matching the published runs.
    pub fn paper() -> Self {
        GaSettings {
            population: 5000,
            generations: 50,
            ..GaSettings::desk()
        }
    }

    /// Small search for interactive use and tests.
    pub fn desk() -> Self {
        GaSettings {
            population: 200,
            generations: 30,
            tournament_size: 3,
            mating_prob: 0.3,
            gene_swap_prob: 0.7,
            mutation_prob: 0.1,
            gene_mutation_prob: 0.5,
            penalty_base: 1e7,
        }
    }
}

/// Per-generation summary row.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best-ever fitness (non-increasing).
    pub best: f64,
    /// Mean fitness of the current population.
    pub mean: f64,
    /// Share of the current population that assembled feasibly.
    pub feasible_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationOutcome {
    pub best_genome: Genome,
    pub best_fitness: f64,
    pub best_design: VehicleDesign,
    pub history: Vec<GenerationStats>,
    pub evaluations: usize,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error(
        "no feasible design found after {generations} generations ({evaluations} evaluations)"
    )]
    NoFeasibleDesign { generations: usize, evaluations: usize },
}

/// Fitness plus the design it came from (when feasible).
struct Scored {
    fitness: f64,
    design: Option<VehicleDesign>,
}

fn score(
    space: &GenomeSpace,
    genome: &Genome,
    mission: &MissionSpec,
    objective: &ObjectiveSpec,
    penalty_base: f64,
    ctx: &AssemblyContext,
) -> Scored {
    let bounds = space.check_bounds(genome);
    if !bounds.is_empty() {
        return Scored {
            fitness: penalty_base * (1.0 + bounds.len() as f64),
            design: None,
        };
    }
    let spec = space.vehicle_spec(genome);
    match assemble(&spec, mission, &AssemblyOptions::default(), ctx) {
        Ok(design) => Scored {
            fitness: objective.value(&design),
            design: Some(design),
        },
        Err(infeasible) => Scored {
            fitness: penalty_base * (1.0 + infeasible.severity),
            design: None,
        },
    }
}

struct Individual {
    genome: Genome,
    fitness: f64,
    feasible: bool,
}

/// Run the generational search for one propellant pairing.
pub fn optimize(
    space: &GenomeSpace,
    mission: &MissionSpec,
    objective: &ObjectiveSpec,
    settings: &GaSettings,
    seed: u64,
    ctx: &AssemblyContext,
) -> Result<OptimizationOutcome, OptimizeError> {
    assert!(settings.population > 0, "population must be positive");
    assert!(settings.tournament_size > 0, "tournament size must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0usize;

    let mut best: Option<(Genome, f64, VehicleDesign)> = None;
    let update_best = |genome: &Genome, scored: &Scored, best: &mut Option<(Genome, f64, VehicleDesign)>| {
        if let Some(design) = &scored.design {
            let improved = match best {
                Some((_, fitness, _)) => scored.fitness < *fitness,
                None => true,
            };
            if improved {
                *best = Some((*genome, scored.fitness, design.clone()));
            }
        }
    };

    // Initial population.
    let genomes: Vec<Genome> = (0..settings.population).map(|_| space.sample(&mut rng)).collect();
    let scored: Vec<Scored> = genomes
        .par_iter()
        .map(|g| score(space, g, mission, objective, settings.penalty_base, ctx))
        .collect();
    evaluations += scored.len();
    let mut population: Vec<Individual> = genomes
        .into_iter()
        .zip(scored)
        .map(|(genome, s)| {
            update_best(&genome, &s, &mut best);
            Individual {
                genome,
                fitness: s.fitness,
                feasible: s.design.is_some(),
            }
        })
        .collect();

    let mut history = Vec::with_capacity(settings.generations);
    for generation in 1..=settings.generations {
        // Tournament selection with replacement.
        let mut offspring: Vec<(Genome, f64, bool, bool)> = (0..settings.population)
            .map(|_| {
                let mut winner = rng.gen_range(0..population.len());
                for _ in 1..settings.tournament_size {
                    let rival = rng.gen_range(0..population.len());
                    if population[rival].fitness < population[winner].fitness {
                        winner = rival;
                    }
                }
                let ind = &population[winner];
                (ind.genome, ind.fitness, ind.feasible, false)
            })
            .collect();

        // Uniform crossover on consecutive pairs.
        for pair in offspring.chunks_mut(2) {
            if pair.len() == 2 && rng.gen::<f64>() < settings.mating_prob {
                let (a, b) = pair.split_at_mut(1);
                for k in 0..GENOME_LEN {
                    if rng.gen::<f64>() < settings.gene_swap_prob {
                        std::mem::swap(&mut a[0].0[k], &mut b[0].0[k]);
                    }
                }
                a[0].3 = true;
                b[0].3 = true;
            }
        }

        // Per-gene resampling mutation.
        for ind in offspring.iter_mut() {
            if rng.gen::<f64>() < settings.mutation_prob {
                for (k, spec) in space.genes.iter().enumerate() {
                    if rng.gen::<f64>() < settings.gene_mutation_prob {
                        ind.0[k] = spec.sample(&mut rng);
                    }
                }
                ind.3 = true;
            }
        }

        // Repair and re-score the touched individuals in parallel.
        for ind in offspring.iter_mut() {
            if ind.3 {
                space.repair(&mut ind.0);
            }
        }
        let rescored: Vec<(usize, Scored)> = offspring
            .par_iter()
            .enumerate()
            .filter(|(_, ind)| ind.3)
            .map(|(i, ind)| {
                (
                    i,
                    score(space, &ind.0, mission, objective, settings.penalty_base, ctx),
                )
            })
            .collect();
        evaluations += rescored.len();
        for (i, s) in rescored {
            update_best(&offspring[i].0, &s, &mut best);
            offspring[i].1 = s.fitness;
            offspring[i].2 = s.design.is_some();
        }

        population = offspring
            .into_iter()
            .map(|(genome, fitness, feasible, _)| Individual { genome, fitness, feasible })
            .collect();

        let mean = population.iter().map(|i| i.fitness).sum::<f64>() / population.len() as f64;
        let feasible_fraction =
            population.iter().filter(|i| i.feasible).count() as f64 / population.len() as f64;
        let best_fitness = best
            .as_ref()
            .map(|(_, f, _)| *f)
            .unwrap_or(f64::INFINITY);
        history.push(GenerationStats {
            generation,
            best: best_fitness,
            mean,
            feasible_fraction,
        });
    }

    match best {
        Some((best_genome, best_fitness, best_design)) => Ok(OptimizationOutcome {
            best_genome,
            best_fitness,
            best_design,
            history,
            evaluations,
            seed,
        }),
        None => Err(OptimizeError::NoFeasibleDesign {
            generations: settings.generations,
            evaluations,
        }),
    }
}

/// One point of a frozen-allocation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub dv_stage1: f64,
    pub best_fitness: Option<f64>,
    pub best_glow: Option<f64>,
    pub best_genome: Option<Genome>,
    pub error: Option<String>,
}

/// Re-run the search at each grid point with the first-stage ascent
/// delta-v pinned. Failures are recorded per point; the sweep continues.
pub fn sweep_allocation(
    space: &GenomeSpace,
    mission: &MissionSpec,
    objective: &ObjectiveSpec,
    settings: &GaSettings,
    seed: u64,
    grid: &[f64],
    ctx: &AssemblyContext,
) -> Vec<SweepPoint> {
    grid.iter()
        .enumerate()
        .map(|(i, &dv1)| {
            let mut frozen = space.clone();
            frozen.freeze(gene::DV_STAGE1, dv1);
            let point_seed = seed.wrapping_add(i as u64);
            match optimize(&frozen, mission, objective, settings, point_seed, ctx) {
                Ok(outcome) => SweepPoint {
                    dv_stage1: dv1,
                    best_fitness: Some(outcome.best_fitness),
                    best_glow: Some(outcome.best_design.glow),
                    best_genome: Some(outcome.best_genome),
                    error: None,
                },
                Err(err) => SweepPoint {
                    dv_stage1: dv1,
                    best_fitness: None,
                    best_glow: None,
                    best_genome: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect()
}
