//! Design-space exploration for two-stage launchers with a propulsively
//! landing, reusable first stage.
//!
//! The toolkit assembles virtual vehicles from an eleven-parameter design
//! description: it sizes both stages against calibrated structural-mass
//! relations, models gas-generator engines on bundled combustion tables,
//! flies the booster through a gravity-turn ascent for its mean specific
//! impulse, and closes the coupled staging equations by fixed-point
//! iteration. A genetic algorithm searches the design space for minimal
//! lift-off, structural, or per-flight expendable mass.

pub mod assembly;
pub mod calibration;
pub mod cli;
pub mod config;
pub mod constants;
pub mod masses;
pub mod missions;
pub mod optimizer;
pub mod propellants;
pub mod report;
pub mod staging;
pub mod trajectory;
