//! Mutation-only multi-objective neuroevolution with NSGA-II survivor
//! selection and a pan-generational Pareto archive.

mod archive;
mod engine;
mod mutation;
mod nsga2;
mod objectives;

pub use archive::{non_dominated_subset, ParetoArchive};
pub use engine::{
    evaluate, evaluate_population, non_dominated_sort, run_evolution, EvolutionConfig, EvolutionRun, GenerationEnvs,
    GenerationStats, Individual, ParentSelection, LANDING_ALTITUDES,
};
pub use mutation::{init_genome, init_population, mutate, MutationConfig};
pub use nsga2::{crowding_distance, fast_non_dominated_sort, select_survivors};
pub use objectives::{dominates, landing_objectives, ObjectiveSet, ObjectiveVector, PUNISHED_SPEED, PUNISHED_TIME};
