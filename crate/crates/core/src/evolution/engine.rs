use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::archive::ParetoArchive;
use super::mutation::{init_population, mutate, MutationConfig};
use super::nsga2::{crowding_distance, fast_non_dominated_sort, select_survivors};
use super::objectives::{landing_objectives, ObjectiveSet, ObjectiveVector};
use crate::env::{run_episode, sample_env_params, EnvParams};
use crate::error::{Error, Result};
use crate::seed::{self, tag, StreamRng};
use crate::snn::Genome;
use crate::stats;

/// Initial altitudes of the four evaluation landings, m.
pub const LANDING_ALTITUDES: [f64; 4] = [2.0, 4.0, 6.0, 8.0];

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub id: u64,
    pub genome: Arc<Genome>,
    pub objectives: Option<ObjectiveVector>,
    pub parent: Option<u64>,
    /// Generation in which the individual was created.
    pub generation: u32,
}

/// The four environments shared by every individual of one generation,
/// together with the seeds of their noise streams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationEnvs {
    pub params: [EnvParams; 4],
    pub seeds: [u64; 4],
}

impl GenerationEnvs {
    pub fn sample(master_seed: u64, generation: u32) -> Self {
        let g = u64::from(generation);
        let mut rng = seed::stream(master_seed, &[tag::ENV_PARAMS, g]);
        GenerationEnvs {
            params: std::array::from_fn(|_| sample_env_params(&mut rng)),
            seeds: std::array::from_fn(|k| seed::derive_seed(master_seed, &[tag::EPISODE, g, k as u64])),
        }
    }
}

/// Mean objectives over the four landings of `envs`.
pub fn evaluate(genome: &Genome, envs: &GenerationEnvs) -> Result<ObjectiveVector> {
    let mut per_landing = [ObjectiveVector([0.0; 4]); 4];
    for (k, slot) in per_landing.iter_mut().enumerate() {
        let mut rng = StreamRng::seed_from_u64(envs.seeds[k]);
        let h0 = LANDING_ALTITUDES[k];
        let result = run_episode(genome, h0, &envs.params[k], &mut rng, false)?;
        *slot = landing_objectives(&result, h0);
    }
    Ok(ObjectiveVector::mean(&per_landing))
}

/// Evaluates every individual in parallel; results do not depend on scheduling.
pub fn evaluate_population(individuals: &mut [Individual], envs: &GenerationEnvs) -> Result<()> {
    let scores: Vec<Result<ObjectiveVector>> = individuals.par_iter().map(|ind| evaluate(&ind.genome, envs)).collect();
    for (ind, score) in individuals.iter_mut().zip(scores) {
        ind.objectives = Some(score?);
    }
    Ok(())
}

fn projected(individuals: &[Individual], set: ObjectiveSet) -> Result<Vec<&[f64]>> {
    individuals.iter().map(|i| i.objectives.as_ref().map(|o| set.project(o)).ok_or(Error::Unevaluated(i.id))).collect()
}

/// Pareto fronts of an evaluated population, as indices, best front first.
pub fn non_dominated_sort(individuals: &[Individual], set: ObjectiveSet) -> Result<Vec<Vec<usize>>> {
    Ok(fast_non_dominated_sort(&projected(individuals, set)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParentSelection {
    /// Uniform choice among the survivors.
    #[default]
    Uniform,
    /// Binary tournament on (front rank, crowding distance).
    Tournament,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population: usize,
    pub generations: u32,
    pub n_hidden: usize,
    pub mutation: MutationConfig,
    pub objectives: ObjectiveSet,
    pub parent_selection: ParentSelection,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population: 100,
            generations: 400,
            n_hidden: 20,
            mutation: MutationConfig::default(),
            objectives: ObjectiveSet::ALL,
            parent_selection: ParentSelection::Uniform,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population == 0 {
            return Err(Error::Config("population size must be positive".into()));
        }
        if self.n_hidden > crate::snn::MAX_HIDDEN {
            return Err(Error::Config(format!("at most {} hidden neurons", crate::snn::MAX_HIDDEN)));
        }
        if !(0.0..=1.0).contains(&self.mutation.p_mut) {
            return Err(Error::Config("mutation probability must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Summary of one generation: best and median of each objective over the
/// evaluated pool (survivors and offspring), plus the archive size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub evaluated: usize,
    pub best: [f64; 4],
    pub median: [f64; 4],
    pub archive_size: usize,
}

impl GenerationStats {
    fn collect(generation: u32, pool: &[Individual], archive_size: usize) -> Self {
        let column = |k: usize| -> Vec<f64> { pool.iter().filter_map(|i| i.objectives).map(|o| o.0[k]).collect() };
        let best = std::array::from_fn(|k| column(k).into_iter().fold(f64::INFINITY, f64::min));
        let median = std::array::from_fn(|k| stats::median(&column(k)).unwrap_or(f64::NAN));
        GenerationStats { generation, evaluated: pool.len(), best, median, archive_size }
    }
}

/// State of an evolution in progress.
pub struct EvolutionRun {
    config: EvolutionConfig,
    population: Vec<Individual>,
    archive: ParetoArchive,
    generation: u32,
    next_id: u64,
    history: Vec<GenerationStats>,
}

impl EvolutionRun {
    /// Builds and evaluates the initial population (generation 0).
    pub fn new(config: EvolutionConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = seed::stream(config.seed, &[tag::INIT]);
        let mut population: Vec<Individual> = init_population(config.population, config.n_hidden, &mut rng)
            .into_iter()
            .enumerate()
            .map(|(k, genome)| Individual {
                id: k as u64,
                genome: Arc::new(genome),
                objectives: None,
                parent: None,
                generation: 0,
            })
            .collect();
        evaluate_population(&mut population, &GenerationEnvs::sample(config.seed, 0))?;
        let mut archive = ParetoArchive::new(config.objectives);
        archive.absorb(population.iter().cloned())?;
        let history = vec![GenerationStats::collect(0, &population, archive.len())];
        Ok(EvolutionRun { next_id: config.population as u64, config, population, archive, generation: 0, history })
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn archive(&self) -> &ParetoArchive {
        &self.archive
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }

    pub fn history(&self) -> &[GenerationStats] {
        &self.history
    }

    fn pick_parents(&self, rng: &mut StreamRng) -> Result<Vec<usize>> {
        let mu = self.population.len();
        match self.config.parent_selection {
            ParentSelection::Uniform => {
                let idx: Vec<usize> = (0..mu).collect();
                Ok((0..mu).map(|_| *idx.choose(rng).expect("non-empty population")).collect())
            }
            ParentSelection::Tournament => {
                let points = projected(&self.population, self.config.objectives)?;
                let mut rank = vec![0usize; mu];
                let mut crowd = vec![0.0; mu];
                for (r, front) in fast_non_dominated_sort(&points).iter().enumerate() {
                    for (&i, d) in front.iter().zip(crowding_distance(&points, front)) {
                        rank[i] = r;
                        crowd[i] = d;
                    }
                }
                let better = |a: usize, b: usize| {
                    if rank[a] != rank[b] {
                        rank[a] < rank[b]
                    } else {
                        crowd[a] >= crowd[b]
                    }
                };
                Ok((0..mu)
                    .map(|_| {
                        let a = rng.random_range(0..mu);
                        let b = rng.random_range(0..mu);
                        if better(a, b) {
                            a
                        } else {
                            b
                        }
                    })
                    .collect())
            }
        }
    }

    /// One generation: mutate offspring, re-evaluate parents and offspring on
    /// freshly drawn environments, truncate the pool with NSGA-II and let the
    /// archive absorb every evaluated individual.
    pub fn step(&mut self) -> Result<&GenerationStats> {
        let generation = self.generation + 1;
        let g = u64::from(generation);
        let master = self.config.seed;

        let mut select_rng = seed::stream(master, &[tag::SELECTION, g]);
        let parents = self.pick_parents(&mut select_rng)?;
        let offspring: Vec<Individual> = parents
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let parent = &self.population[p];
                let mut rng = seed::stream(master, &[tag::MUTATION, g, k as u64]);
                Individual {
                    id: self.next_id + k as u64,
                    genome: Arc::new(mutate(&parent.genome, &self.config.mutation, &mut rng)),
                    objectives: None,
                    parent: Some(parent.id),
                    generation,
                }
            })
            .collect();
        self.next_id += offspring.len() as u64;

        let mut pool: Vec<Individual> = self
            .population
            .drain(..)
            .map(|mut i| {
                i.objectives = None;
                i
            })
            .chain(offspring)
            .collect();
        evaluate_population(&mut pool, &GenerationEnvs::sample(master, generation))?;

        let points = projected(&pool, self.config.objectives)?;
        let survivors = select_survivors(&points, self.config.population);
        self.archive.absorb(pool.iter().cloned())?;
        let stats = GenerationStats::collect(generation, &pool, self.archive.len());

        let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
        self.population = survivors.iter().map(|&i| slots[i].take().expect("unique survivor")).collect();
        self.generation = generation;
        self.history.push(stats);
        Ok(self.history.last().expect("just pushed"))
    }
}

/// Runs a full evolution, calling `on_generation` after generation 0 and
/// after every subsequent generation.
pub fn run_evolution<F>(config: EvolutionConfig, mut on_generation: F) -> Result<EvolutionRun>
where
    F: FnMut(&GenerationStats, &ParetoArchive),
{
    let mut run = EvolutionRun::new(config)?;
    on_generation(&run.history[0], &run.archive);
    for _ in 0..config.generations {
        run.step()?;
        on_generation(run.history.last().expect("stats recorded"), &run.archive);
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::archive::non_dominated_subset;
    use crate::evolution::objectives::dominates;

    fn small(seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            population: 8,
            generations: 3,
            n_hidden: 2,
            mutation: MutationConfig::default(),
            objectives: ObjectiveSet::ALL,
            parent_selection: ParentSelection::Uniform,
            seed,
        }
    }

    #[test]
    fn zero_genome_has_zero_spike_rate() {
        let envs = GenerationEnvs::sample(1, 0);
        let o = evaluate(&Genome::zeros(4), &envs).unwrap();
        assert_eq!(o.spike_rate(), 0.0);
        assert!(o.time_to_land() < 5.0);
        assert_eq!(o, evaluate(&Genome::zeros(4), &envs).unwrap());
    }

    #[test]
    fn hover_genome_is_punished() {
        let mut g = Genome::zeros(1);
        g.decoder.r1 = 0.0;
        g.decoder.r2 = 0.0;
        let mut envs = GenerationEnvs::sample(2, 0);
        for p in envs.params.iter_mut() {
            *p = EnvParams::noise_free(p.dt, p.tau_thrust, p.delay_steps);
        }
        let o = evaluate(&g, &envs).unwrap();
        assert_eq!(o.time_to_land(), 60.0);
        assert!((o.final_height() - 5.0).abs() < 1e-9, "mean of 2, 4, 6, 8 m");
        assert_eq!(o.final_speed(), 5.0);
    }

    #[test]
    fn unevaluated_sort_is_an_error() {
        let ind =
            Individual { id: 3, genome: Arc::new(Genome::zeros(0)), objectives: None, parent: None, generation: 0 };
        assert!(matches!(non_dominated_sort(&[ind], ObjectiveSet::ALL), Err(Error::Unevaluated(3))));
    }

    #[test]
    fn zero_generations_archives_initial_front() {
        let cfg = EvolutionConfig { generations: 0, ..small(5) };
        let run = run_evolution(cfg, |_, _| {}).unwrap();
        let expected = non_dominated_subset(ObjectiveSet::ALL, run.population().iter().cloned()).unwrap();
        let ids = |v: &[Individual]| v.iter().map(|i| i.id).collect::<Vec<_>>();
        assert_eq!(ids(run.archive().members()), ids(&expected));
        assert_eq!(run.history().len(), 1);
    }

    #[test]
    fn generations_preserve_invariants() {
        let cfg = EvolutionConfig { generations: 6, parent_selection: ParentSelection::Tournament, ..small(6) };
        let mut prev_best: Option<[f64; 4]> = None;
        let run = run_evolution(cfg, |stats, archive| {
            assert!(archive.is_consistent());
            assert_eq!(archive.len(), stats.archive_size);
            let best = archive.best().unwrap();
            if let Some(prev) = prev_best {
                assert!(best.iter().zip(&prev).all(|(now, before)| now <= before));
            }
            prev_best = Some(best);
            if stats.generation > 0 {
                assert_eq!(stats.evaluated, 16);
            }
        })
        .unwrap();
        assert_eq!(run.population().len(), 8);
        assert!(run.population().iter().all(|i| i.objectives.is_some()));
        // Survivors are never dominated by a non-survivor of the same pool's first front.
        for a in run.archive().members() {
            for b in run.archive().members() {
                assert!(!dominates(a.objectives.unwrap().as_array(), b.objectives.unwrap().as_array()));
            }
        }
    }

    #[test]
    fn replay_is_identical() {
        let a = run_evolution(small(7), |_, _| {}).unwrap();
        let b = run_evolution(small(7), |_, _| {}).unwrap();
        assert_eq!(a.population(), b.population());
        assert_eq!(a.archive().members(), b.archive().members());
        assert_eq!(a.history(), b.history());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let run_with = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_evolution(small(8), |_, _| {}).unwrap())
        };
        let serial = run_with(1);
        let parallel = run_with(4);
        assert_eq!(serial.archive().members(), parallel.archive().members());
        assert_eq!(serial.history(), parallel.history());
    }
}
