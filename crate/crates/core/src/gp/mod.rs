//! Genetic-programming engine: tournament selection, subtree crossover
//! and mutation, generational breeding over ring-migrating islands.

mod program;

pub use program::{grow_tree, Func, Node, Program};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Islands exchange one elite every this many generations.
const MIGRATION_INTERVAL: usize = 5;
/// Bounded retry budget for mutation points that would break the depth cap.
const MUTATE_RETRIES: usize = 20;

pub fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub subpopulations: usize,
    /// When false the whole population breeds as one panmictic pool.
    pub islands: bool,
    pub tournament_k: usize,
    pub crossover_func_pt_fraction: f64,
    pub crossover_any_pt_fraction: f64,
    pub fitness_prop_repro_fraction: f64,
    pub max_depth_new: usize,
    pub max_depth_crossover: usize,
    pub max_mutant_depth: usize,
    pub parsimony_factor: f64,
    pub seed: u64,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            population_size: 200,
            generations: 30,
            subpopulations: 40,
            islands: true,
            tournament_k: 6,
            crossover_func_pt_fraction: 0.7,
            crossover_any_pt_fraction: 0.1,
            fitness_prop_repro_fraction: 0.1,
            max_depth_new: 6,
            max_depth_crossover: 17,
            max_mutant_depth: 4,
            parsimony_factor: 0.0,
            seed: 0,
        }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::Config("population_size must be >= 1".into()));
        }
        if self.generations == 0 {
            return Err(Error::Config("generations must be >= 1".into()));
        }
        if self.subpopulations == 0 {
            return Err(Error::Config("subpopulations must be >= 1".into()));
        }
        if self.tournament_k == 0 {
            return Err(Error::Config("tournament_k must be >= 1".into()));
        }
        let fractions = [
            self.crossover_func_pt_fraction,
            self.crossover_any_pt_fraction,
            self.fitness_prop_repro_fraction,
        ];
        if fractions.iter().any(|f| *f < 0.0 || !f.is_finite()) {
            return Err(Error::Config("breeding fractions must be non-negative".into()));
        }
        if fractions.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::Config("breeding fractions must sum to <= 1".into()));
        }
        if self.max_depth_new == 0 || self.max_mutant_depth == 0 {
            return Err(Error::Config("depth limits must be >= 1".into()));
        }
        if self.max_depth_crossover < self.max_depth_new {
            return Err(Error::Config(
                "max_depth_crossover must be >= max_depth_new".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> GpConfig {
        let mut c = self.clone();
        c.seed = seed;
        c
    }
}

/// One weighted training example for the fitness function.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessCase {
    pub input: Vec<f64>,
    pub target: f64,
    pub weight: f64,
}

/// Weighted absolute loss of the clamped program output, plus the
/// parsimony term.
pub fn fitness_of(program: &Program, cases: &[FitnessCase], parsimony_factor: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for c in cases {
        num += c.weight * (clamp01(program.eval(&c.input)) - c.target).abs();
        den += c.weight;
    }
    num / den + parsimony_factor * program.size() as f64
}

/// Tournament selection: k uniform draws with replacement, lowest fitness
/// wins, ties broken by the earliest population index.
pub fn tournament_select(fitnesses: &[f64], k: usize, rng: &mut ChaCha8Rng) -> usize {
    assert!(!fitnesses.is_empty() && k >= 1);
    let mut best = rng.random_range(0..fitnesses.len());
    for _ in 1..k {
        let i = rng.random_range(0..fitnesses.len());
        if fitnesses[i] < fitnesses[best] || (fitnesses[i] == fitnesses[best] && i < best) {
            best = i;
        }
    }
    best
}

/// Roulette selection with weights 1/(1 + fitness), so lower fitness gets
/// proportionally more reproduction slots.
fn fitness_proportional_select(fitnesses: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let weights: Vec<f64> = fitnesses.iter().map(|f| 1.0 / (1.0 + f)).collect();
    let total: f64 = weights.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        r -= w;
        if r <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverMode {
    FunctionPoint,
    AnyPoint,
}

fn pick_point(p: &Program, mode: CrossoverMode, rng: &mut ChaCha8Rng) -> usize {
    if mode == CrossoverMode::FunctionPoint {
        let funcs = p.function_indices();
        if !funcs.is_empty() {
            return funcs[rng.random_range(0..funcs.len())];
        }
        // No function node: fall back to any-point on this parent.
    }
    rng.random_range(0..p.size())
}

/// Subtree crossover at the given point kind. Children deeper than
/// `max_depth` are replaced by a copy of their corresponding parent.
pub fn crossover_with_mode(
    a: &Program,
    b: &Program,
    mode: CrossoverMode,
    max_depth: usize,
    rng: &mut ChaCha8Rng,
) -> (Program, Program) {
    let pa = pick_point(a, mode, rng);
    let pb = pick_point(b, mode, rng);
    let sub_a = a.subtree(pa).clone();
    let sub_b = b.subtree(pb).clone();
    let mut child_a = a.with_replaced(pa, sub_b);
    let mut child_b = b.with_replaced(pb, sub_a);
    if child_a.depth() > max_depth {
        child_a = a.clone();
    }
    if child_b.depth() > max_depth {
        child_b = b.clone();
    }
    (child_a, child_b)
}

/// Subtree crossover; the point kind is drawn from the two configured
/// mode fractions.
pub fn crossover(
    a: &Program,
    b: &Program,
    func_pt_fraction: f64,
    any_pt_fraction: f64,
    max_depth: usize,
    rng: &mut ChaCha8Rng,
) -> (Program, Program) {
    let total = func_pt_fraction + any_pt_fraction;
    let mode = if total <= 0.0 || rng.random::<f64>() * total < func_pt_fraction {
        CrossoverMode::FunctionPoint
    } else {
        CrossoverMode::AnyPoint
    };
    crossover_with_mode(a, b, mode, max_depth, rng)
}

/// Replace a uniformly chosen node with a fresh grow tree of depth at
/// most `max_mutant_depth`. Points that would push the result past
/// `max_total_depth` are redrawn; after the retry budget the root itself
/// is replaced.
pub fn mutate(
    p: &Program,
    max_mutant_depth: usize,
    max_total_depth: usize,
    feature_count: usize,
    rng: &mut ChaCha8Rng,
) -> Program {
    for _ in 0..MUTATE_RETRIES {
        let idx = rng.random_range(0..p.size());
        let sub = grow_tree(rng, max_mutant_depth, feature_count);
        let candidate = p.with_replaced(idx, sub.root().clone());
        if candidate.depth() <= max_total_depth {
            return candidate;
        }
    }
    grow_tree(rng, max_mutant_depth, feature_count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreedOp {
    CrossoverFuncPoint,
    CrossoverAnyPoint,
    Reproduce,
    Mutate,
}

/// Draw the breeding operation for one offspring slot. The remainder
/// after the three configured fractions is the mutation share.
pub fn draw_breed_op(cfg: &GpConfig, rng: &mut ChaCha8Rng) -> BreedOp {
    let r = rng.random::<f64>();
    let c1 = cfg.crossover_func_pt_fraction;
    let c2 = c1 + cfg.crossover_any_pt_fraction;
    let c3 = c2 + cfg.fitness_prop_repro_fraction;
    if r < c1 {
        BreedOp::CrossoverFuncPoint
    } else if r < c2 {
        BreedOp::CrossoverAnyPoint
    } else if r < c3 {
        BreedOp::Reproduce
    } else {
        BreedOp::Mutate
    }
}

#[derive(Clone)]
struct Individual {
    program: Program,
    fitness: f64,
}

struct Island {
    members: Vec<Individual>,
    rng: ChaCha8Rng,
}

impl Island {
    fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.members.len() {
            if self.members[i].fitness < self.members[best].fitness {
                best = i;
            }
        }
        best
    }

    fn worst_index(&self) -> usize {
        let mut worst = 0;
        for i in 1..self.members.len() {
            if self.members[i].fitness > self.members[worst].fitness {
                worst = i;
            }
        }
        worst
    }
}

/// Result of one GP run: the best program ever seen, its fitness, and the
/// best-ever trace per generation (index 0 is the initial population).
#[derive(Debug, Clone)]
pub struct GpResult {
    pub best: Program,
    pub best_fitness: f64,
    pub generation_best: Vec<f64>,
}

/// Evolve a program against the weighted fitness cases.
pub fn run_gp(cases: &[FitnessCase], cfg: &GpConfig) -> Result<GpResult> {
    cfg.validate()?;
    if cases.is_empty() {
        return Err(Error::Data("run_gp needs at least one fitness case".into()));
    }
    let feature_count = cases[0].input.len();
    if feature_count == 0 {
        return Err(Error::Data("fitness cases need at least one feature".into()));
    }
    if cases.iter().any(|c| c.input.len() != feature_count) {
        return Err(Error::Data("fitness cases disagree on feature count".into()));
    }
    if cases.iter().any(|c| c.weight < 0.0 || !c.weight.is_finite()) {
        return Err(Error::Data("fitness case weights must be non-negative".into()));
    }
    if cases.iter().map(|c| c.weight).sum::<f64>() <= 0.0 {
        return Err(Error::Data("fitness case weights must have a positive sum".into()));
    }

    let island_count = if cfg.islands {
        cfg.subpopulations.min(cfg.population_size)
    } else {
        1
    };
    let base = cfg.population_size / island_count;
    let extra = cfg.population_size % island_count;

    let mut islands: Vec<Island> = (0..island_count)
        .map(|i| {
            let size = base + usize::from(i < extra);
            let mut rng = rng::sub_rng(cfg.seed, "gp-island", i as u64);
            let members = (0..size)
                .map(|_| {
                    let program = grow_tree(&mut rng, cfg.max_depth_new, feature_count);
                    let fitness = fitness_of(&program, cases, cfg.parsimony_factor);
                    Individual { program, fitness }
                })
                .collect();
            Island { members, rng }
        })
        .collect();

    let mut best: Individual = islands
        .iter()
        .flat_map(|isl| isl.members.iter())
        .min_by(|a, b| a.fitness.partial_cmp(&b.fitness).unwrap())
        .expect("population is non-empty")
        .clone();
    let mut generation_best = vec![best.fitness];

    for gen in 1..=cfg.generations {
        for island in &mut islands {
            breed_island(island, cases, cfg, feature_count);
        }
        if island_count > 1 && gen % MIGRATION_INTERVAL == 0 {
            migrate_ring(&mut islands);
        }
        for island in &islands {
            let b = island.best_index();
            if island.members[b].fitness < best.fitness {
                best = island.members[b].clone();
            }
        }
        generation_best.push(best.fitness);
    }

    Ok(GpResult {
        best_fitness: best.fitness,
        best: best.program,
        generation_best,
    })
}

fn breed_island(island: &mut Island, cases: &[FitnessCase], cfg: &GpConfig, feature_count: usize) {
    let size = island.members.len();
    let fitnesses: Vec<f64> = island.members.iter().map(|m| m.fitness).collect();
    let mut next: Vec<Individual> = Vec::with_capacity(size);
    // Elitism of one: the island best survives unchanged.
    next.push(island.members[island.best_index()].clone());
    while next.len() < size {
        let child = match draw_breed_op(cfg, &mut island.rng) {
            op @ (BreedOp::CrossoverFuncPoint | BreedOp::CrossoverAnyPoint) => {
                let mode = if op == BreedOp::CrossoverFuncPoint {
                    CrossoverMode::FunctionPoint
                } else {
                    CrossoverMode::AnyPoint
                };
                let p1 = tournament_select(&fitnesses, cfg.tournament_k, &mut island.rng);
                let p2 = tournament_select(&fitnesses, cfg.tournament_k, &mut island.rng);
                let (c, _) = crossover_with_mode(
                    &island.members[p1].program,
                    &island.members[p2].program,
                    mode,
                    cfg.max_depth_crossover,
                    &mut island.rng,
                );
                let fitness = fitness_of(&c, cases, cfg.parsimony_factor);
                Individual { program: c, fitness }
            }
            BreedOp::Reproduce => {
                let i = fitness_proportional_select(&fitnesses, &mut island.rng);
                island.members[i].clone()
            }
            BreedOp::Mutate => {
                let i = tournament_select(&fitnesses, cfg.tournament_k, &mut island.rng);
                let c = mutate(
                    &island.members[i].program,
                    cfg.max_mutant_depth,
                    cfg.max_depth_crossover,
                    feature_count,
                    &mut island.rng,
                );
                let fitness = fitness_of(&c, cases, cfg.parsimony_factor);
                Individual { program: c, fitness }
            }
        };
        next.push(child);
    }
    island.members = next;
}

/// Ring migration: each island's best replaces the next island's worst.
/// Sources are snapshotted first so the order of application is moot.
fn migrate_ring(islands: &mut [Island]) {
    let k = islands.len();
    let migrants: Vec<Individual> = islands
        .iter()
        .map(|isl| isl.members[isl.best_index()].clone())
        .collect();
    for (i, migrant) in migrants.into_iter().enumerate() {
        let dest = (i + 1) % k;
        let worst = islands[dest].worst_index();
        islands[dest].members[worst] = migrant;
    }
}
