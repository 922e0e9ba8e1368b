//! Genetic algorithm over giant-tour chromosomes.
//!
//! Individuals are permutations of the delivery ids; routes are recovered by
//! greedy demarcation at evaluation time. Selection is by binary tournament,
//! recombination is either best-cost route insertion or position-preserving
//! order crossover, mutation re-arranges three genes, and replacement is
//! elitist truncation of parents and offspring together. An optional 2-opt
//! pass refines every individual at the end of each generation, and the
//! final winner gets a segment-exchange polish.
//!
//! Every stochastic step draws from an RNG keyed by (seed, kind, task
//! index), so runs are reproducible bit for bit at any worker count.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::constructive::demarcate;
use crate::local_search::{string_exchange, two_opt_solution, StringExchangeConfig};
use crate::model::{
    compare_fitness, Chromosome, Constraint, Instance, NodeId, Objectives, Route, Solution,
    DEPOT,
};
use crate::{par, rng, Error, Result};

/// Recombination operator choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossover {
    /// Best-cost route insertion: offspring rebuild the other parent's
    /// removed route delivery by delivery at the cheapest feasible spot.
    RouteInsertion,
    /// Order crossover: the chosen route keeps its absolute gene positions,
    /// the rest is filled from the other parent's order.
    Order,
}

/// Knobs of [`evolve`]. Defaults reproduce the reference benchmark setup.
#[derive(Debug, Clone)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Tournament winners drawn per generation; also the offspring count.
    pub candidate_pool_size: usize,
    pub crossover: Crossover,
    /// Refine every individual with 2-opt at the end of each generation.
    pub local_search: bool,
    /// Stop after this many consecutive generations without strict
    /// improvement of the best fitness.
    pub stall_generations: usize,
    pub seed: u64,
    /// Largest segment length of the final segment-exchange polish.
    pub exchange_segment_len: usize,
    /// Trials per segment length of the final polish.
    pub exchange_trials: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            max_generations: 100,
            crossover_rate: 0.95,
            mutation_rate: 0.10,
            candidate_pool_size: 50,
            crossover: Crossover::RouteInsertion,
            local_search: true,
            stall_generations: 20,
            seed: 0,
            exchange_segment_len: 3,
            exchange_trials: 30_000,
        }
    }
}

/// A chromosome with its decoded routes. `decoded` is always
/// `demarcate(genes)`, so fitness reads straight off the cached objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genes: Chromosome,
    pub decoded: Solution,
}

impl Individual {
    pub fn from_genes(inst: &Instance, genes: Chromosome) -> Individual {
        let decoded = demarcate(inst, &genes);
        Individual { genes, decoded }
    }

    pub fn objectives(&self) -> &Objectives {
        &self.decoded.objectives
    }
}

/// Per-generation telemetry: the best individual's objectives, the
/// population mean length, and wall-clock time since the run started.
/// Generation 0 describes the freshly initialized population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationLog {
    pub generation: usize,
    pub best_vehicles: usize,
    pub best_length: f64,
    pub best_spread: f64,
    pub mean_length: f64,
    pub elapsed: Duration,
}

/// Outcome of a run: the polished best solution and the full log.
#[derive(Debug, Clone)]
pub struct GaResult {
    pub best: Solution,
    pub log: Vec<GenerationLog>,
}

// RNG stream tags; see `rng::task_rng`.
const STREAM_INIT: u64 = 1;
const STREAM_TOURNAMENT: u64 = 2;
const STREAM_PAIRING: u64 = 3;
const STREAM_CROSSOVER: u64 = 4;
const STREAM_MUTATION: u64 = 5;
const STREAM_EXCHANGE: u64 = 6;

/// Uniform random permutations of the delivery ids, one per slot. Each slot
/// shuffles with its own derived RNG, so the population is identical no
/// matter how the work is scheduled.
pub fn init_population(inst: &Instance, size: usize, seed: u64) -> Vec<Individual> {
    let ids: Vec<NodeId> = inst.deliveries().collect();
    par::map_range(size, |i| {
        let mut rng = rng::task_rng(seed, STREAM_INIT, i as u64);
        let mut genes = ids.clone();
        genes.shuffle(&mut rng);
        Individual::from_genes(inst, genes)
    })
}

/// One binary tournament: draws two population indices uniformly (repeats
/// allowed) and returns the fitter one; the first draw wins ties.
pub fn tournament_pick(pop: &[Individual], rng: &mut impl Rng) -> usize {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    if compare_fitness(pop[b].objectives(), pop[a].objectives()).is_lt() {
        b
    } else {
        a
    }
}

/// Removes `removed` from the parent's genes, re-demarcates the reduced
/// tour, and reinserts the removed deliveries one at a time, each at the
/// feasible position with the smallest length increase across all routes
/// (ties to the lowest route and position); a delivery with no feasible slot
/// opens a dedicated route. Returns the rebuilt giant tour.
pub(crate) fn insertion_child(
    inst: &Instance,
    parent: &[NodeId],
    removed: &[NodeId],
) -> Chromosome {
    let n = inst.num_deliveries();
    let mut is_removed = vec![false; n + 1];
    for &d in removed {
        is_removed[d] = true;
    }
    let reduced: Vec<NodeId> = parent.iter().copied().filter(|&d| !is_removed[d]).collect();
    let mut routes = demarcate(inst, &reduced).routes;

    for &d in removed {
        let mut best: Option<(usize, usize, f64)> = None;
        for (ri, route) in routes.iter().enumerate() {
            match inst.constraint() {
                Constraint::Capacity(q) => {
                    if route.load + inst.demand(d) > q {
                        continue;
                    }
                }
                Constraint::MaxRouteLength(_) => {}
            }
            for pos in 0..=route.stops.len() {
                let prev = if pos == 0 { DEPOT } else { route.stops[pos - 1] };
                let next = if pos == route.stops.len() { DEPOT } else { route.stops[pos] };
                let delta = inst.w(prev, d) + inst.w(d, next) - inst.w(prev, next);
                if let Constraint::MaxRouteLength(r_max) = inst.constraint() {
                    if route.length + delta > r_max {
                        continue;
                    }
                }
                if best.map_or(true, |(_, _, b)| delta < b) {
                    best = Some((ri, pos, delta));
                }
            }
        }
        match best {
            Some((ri, pos, _)) => {
                let route = &mut routes[ri];
                route.stops.insert(pos, d);
                route.length = crate::model::route_length(inst, &route.stops);
                route.load += inst.demand(d);
                // The screening delta reassociates float sums; re-check the
                // exact length and fall back to a dedicated route on the
                // rare near-bound miss.
                if let Constraint::MaxRouteLength(r_max) = inst.constraint() {
                    if route.length > r_max {
                        route.stops.remove(pos);
                        route.length = crate::model::route_length(inst, &route.stops);
                        route.load -= inst.demand(d);
                        routes.push(Route::new(inst, vec![d]));
                    }
                }
            }
            None => routes.push(Route::new(inst, vec![d])),
        }
    }
    routes.into_iter().flat_map(|r| r.stops).collect()
}

/// Best-cost route insertion crossover: each offspring is its parent with
/// the other parent's randomly chosen route torn out and re-inserted
/// cheapest-first. Draws two route picks from `rng`.
pub fn insertion_crossover(
    inst: &Instance,
    a: &Individual,
    b: &Individual,
    rng: &mut impl Rng,
) -> (Individual, Individual) {
    let ra = rng.gen_range(0..a.decoded.routes.len());
    let rb = rng.gen_range(0..b.decoded.routes.len());
    let child_a = insertion_child(inst, &a.genes, &b.decoded.routes[rb].stops);
    let child_b = insertion_child(inst, &b.genes, &a.decoded.routes[ra].stops);
    (
        Individual::from_genes(inst, child_a),
        Individual::from_genes(inst, child_b),
    )
}

/// Order-crossover child: the template segment `t` keeps the absolute
/// positions `t_start..t_start + t.len()` it held in its parent; every other
/// position is filled, in order, from the other parent's genes with the
/// segment's deliveries skipped (optionally walking that parent backwards).
pub(crate) fn order_child(
    donor: &[NodeId],
    t: &[NodeId],
    t_start: usize,
    reversed: bool,
) -> Chromosome {
    let n = donor.len();
    let mut in_t = vec![false; n + 1];
    for &d in t {
        in_t[d] = true;
    }
    let mut filler: Vec<NodeId> = donor.iter().copied().filter(|&d| !in_t[d]).collect();
    if reversed {
        filler.reverse();
    }
    let mut filler_iter = filler.into_iter();
    let mut t_iter = t.iter().copied();
    (0..n)
        .map(|pos| {
            if pos >= t_start && pos < t_start + t.len() {
                t_iter.next().unwrap()
            } else {
                filler_iter.next().unwrap()
            }
        })
        .collect()
}

/// Order crossover: picks one route of parent `a`, keeps it at its absolute
/// gene positions, and fills around it from parent `b` (forwards for the
/// first child, backwards for the second). Draws one route pick from `rng`.
pub fn order_crossover(
    inst: &Instance,
    a: &Individual,
    b: &Individual,
    rng: &mut impl Rng,
) -> (Individual, Individual) {
    let ra = rng.gen_range(0..a.decoded.routes.len());
    // Demarcated routes are contiguous blocks of the giant tour, so the
    // chosen route's absolute start is the length prefix sum.
    let t_start: usize = a.decoded.routes[..ra].iter().map(|r| r.stops.len()).sum();
    let t = &a.decoded.routes[ra].stops;
    let child_a = order_child(&b.genes, t, t_start, false);
    let child_b = order_child(&b.genes, t, t_start, true);
    (
        Individual::from_genes(inst, child_a),
        Individual::from_genes(inst, child_b),
    )
}

/// Three-gene rearrangement: picks three distinct positions, evaluates the
/// five non-identity arrangements of their values, and returns the fittest
/// (ties to the earliest in enumeration order). The winner may still be
/// worse than the input; that is intended. Identity on tours shorter than 3.
pub fn mutate(inst: &Instance, ind: &Individual, rng: &mut impl Rng) -> Individual {
    let n = ind.genes.len();
    if n < 3 {
        return ind.clone();
    }
    let mut positions = rand::seq::index::sample(rng, n, 3).into_vec();
    positions.sort_unstable();
    let values = [
        ind.genes[positions[0]],
        ind.genes[positions[1]],
        ind.genes[positions[2]],
    ];
    // All permutations of three items except the identity, in a fixed order.
    const ARRANGEMENTS: [[usize; 3]; 5] =
        [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best: Option<Individual> = None;
    for arr in ARRANGEMENTS {
        let mut genes = ind.genes.clone();
        for (slot, &v) in arr.iter().enumerate() {
            genes[positions[slot]] = values[v];
        }
        let candidate = Individual::from_genes(inst, genes);
        let better = best
            .as_ref()
            .map_or(true, |b| {
                compare_fitness(candidate.objectives(), b.objectives()).is_lt()
            });
        if better {
            best = Some(candidate);
        }
    }
    best.unwrap()
}

/// 2-opt refinement of one individual, kept consistent with demarcation:
/// improve the routes, rewrite the genes as their concatenation, and
/// re-demarcate; when the greedy boundaries move, improve again. The loop
/// nearly always settles in one pass; a cap guards pathological metrics, and
/// the refined individual is only adopted when not worse than the input.
fn refine(inst: &Instance, ind: &Individual) -> Individual {
    let mut current = ind.clone();
    for _ in 0..20 {
        let improved = two_opt_solution(inst, &current.decoded);
        if improved.routes == current.decoded.routes {
            break;
        }
        let genes = improved.flatten();
        let decoded = demarcate(inst, &genes);
        let settled = decoded.routes == improved.routes;
        current = Individual { genes, decoded };
        if settled {
            break;
        }
    }
    if compare_fitness(current.objectives(), ind.objectives()).is_gt() {
        ind.clone()
    } else {
        current
    }
}

/// The full fitness order used for replacement: objective comparison with a
/// final gene tie-break, total over distinct individuals.
fn replacement_order(a: &Individual, b: &Individual) -> std::cmp::Ordering {
    compare_fitness(a.objectives(), b.objectives()).then_with(|| a.genes.cmp(&b.genes))
}

/// An in-progress run. [`Ga::new`] seeds the population, [`Ga::step`]
/// advances one generation, [`Ga::finish`] applies the final polish.
pub struct Ga<'a> {
    inst: &'a Instance,
    cfg: GaConfig,
    population: Vec<Individual>,
    generation: usize,
    stall: usize,
    incumbent: Objectives,
    log: Vec<GenerationLog>,
    started: Instant,
}

impl<'a> Ga<'a> {
    pub fn new(inst: &'a Instance, cfg: GaConfig) -> Result<Ga<'a>> {
        if cfg.population_size == 0 || cfg.candidate_pool_size == 0 {
            return Err(Error::Unsupported(
                "population and candidate pool must not be empty".into(),
            ));
        }
        for (name, rate) in [("crossover", cfg.crossover_rate), ("mutation", cfg.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Unsupported(format!(
                    "{name} rate {rate} is outside [0, 1]"
                )));
            }
        }
        if cfg.stall_generations == 0 {
            return Err(Error::Unsupported("stall window must be positive".into()));
        }
        let started = Instant::now();
        let mut population = init_population(inst, cfg.population_size, cfg.seed);
        population.sort_unstable_by(replacement_order);
        let incumbent = *population[0].objectives();
        let mut ga = Ga {
            inst,
            cfg,
            population,
            generation: 0,
            stall: 0,
            incumbent,
            log: Vec::new(),
            started,
        };
        ga.push_log();
        Ok(ga)
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn log(&self) -> &[GenerationLog] {
        &self.log
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    fn push_log(&mut self) {
        let best = &self.population[0];
        let mean_length = self
            .population
            .iter()
            .map(|i| i.objectives().total_length)
            .sum::<f64>()
            / self.population.len() as f64;
        self.log.push(GenerationLog {
            generation: self.generation,
            best_vehicles: best.objectives().vehicles,
            best_length: best.objectives().total_length,
            best_spread: best.objectives().length_spread,
            mean_length,
            elapsed: self.started.elapsed(),
        });
    }

    /// Runs one generation. Returns `false` once a stopping condition holds:
    /// the generation budget is spent or the best fitness has stalled.
    pub fn step(&mut self) -> bool {
        if self.generation >= self.cfg.max_generations
            || self.stall >= self.cfg.stall_generations
        {
            return false;
        }
        let g = (self.generation + 1) as u64;
        let seed = self.cfg.seed;
        let pool_size = self.cfg.candidate_pool_size;
        let pop = &self.population;

        let mut pool: Vec<usize> = par::map_range(pool_size, |j| {
            let mut rng =
                rng::task_rng(seed, STREAM_TOURNAMENT, g * pool_size as u64 + j as u64);
            tournament_pick(pop, &mut rng)
        });
        pool.shuffle(&mut rng::task_rng(seed, STREAM_PAIRING, g));

        let n_pairs = pool.len() / 2;
        let mut offspring: Vec<Individual> = par::map_range(n_pairs, |p| {
            let mut rng =
                rng::task_rng(seed, STREAM_CROSSOVER, g * n_pairs as u64 + p as u64);
            let a = &pop[pool[2 * p]];
            let b = &pop[pool[2 * p + 1]];
            if rng.gen::<f64>() < self.cfg.crossover_rate {
                let (c, d) = match self.cfg.crossover {
                    Crossover::RouteInsertion => insertion_crossover(self.inst, a, b, &mut rng),
                    Crossover::Order => order_crossover(self.inst, a, b, &mut rng),
                };
                vec![c, d]
            } else {
                vec![a.clone(), b.clone()]
            }
        })
        .into_iter()
        .flatten()
        .collect();
        if pool.len() % 2 == 1 {
            offspring.push(pop[*pool.last().unwrap()].clone());
        }

        let inst = self.inst;
        let mutation_rate = self.cfg.mutation_rate;
        par::for_each_mut(&mut offspring, |o, ind| {
            let mut rng =
                rng::task_rng(seed, STREAM_MUTATION, g * pool_size as u64 + o as u64);
            if rng.gen::<f64>() < mutation_rate {
                *ind = mutate(inst, ind, &mut rng);
            }
        });

        let mut merged = self.population.clone();
        merged.append(&mut offspring);
        if self.cfg.local_search {
            par::for_each_mut(&mut merged, |_, ind| {
                *ind = refine(inst, ind);
            });
        }
        merged.sort_unstable_by(replacement_order);
        merged.truncate(self.cfg.population_size);
        self.population = merged;

        self.generation += 1;
        let best = *self.population[0].objectives();
        if compare_fitness(&best, &self.incumbent).is_lt() {
            self.incumbent = best;
            self.stall = 0;
        } else {
            self.stall += 1;
        }
        self.push_log();
        self.generation < self.cfg.max_generations && self.stall < self.cfg.stall_generations
    }

    /// Applies the segment-exchange polish to the best individual and
    /// returns the result with the log.
    pub fn finish(self) -> GaResult {
        let best = &self.population[0];
        let se = StringExchangeConfig {
            segment_len: self.cfg.exchange_segment_len,
            trials: self.cfg.exchange_trials,
            seed: rng::derive(self.cfg.seed, STREAM_EXCHANGE, 0),
        };
        let polished = string_exchange(self.inst, &best.decoded, &se);
        // The polish only ever improves; keep the better of the two.
        let best_solution =
            if compare_fitness(&polished.objectives, best.objectives()).is_le() {
                polished
            } else {
                best.decoded.clone()
            };
        GaResult { best: best_solution, log: self.log }
    }
}

/// Runs the configured genetic algorithm to completion.
pub fn evolve(inst: &Instance, cfg: &GaConfig) -> Result<GaResult> {
    let mut ga = Ga::new(inst, cfg.clone())?;
    while ga.step() {}
    Ok(ga.finish())
}
