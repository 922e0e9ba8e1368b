//! Exact solver for tiny instances, used as ground truth in tests.
//!
//! Enumerates every permutation of the deliveries and, within each, every
//! placement of route boundaries, keeping the candidate that minimizes
//! (vehicle count, total length) lexicographically. This searches all
//! ordered route partitions, a strictly larger space than the greedy
//! decoder can reach, so it bounds every other module from below.

use crate::model::{Constraint, Instance, NodeId, Objectives, Solution};
use crate::{par, Error, Result};

/// Largest delivery count [`brute_force`] accepts by default; n! · 2^n
/// candidates grow past usefulness right above this.
pub const DEFAULT_LIMIT: usize = 8;

/// Outcome of exhaustive search.
#[derive(Debug, Clone)]
pub struct ExactResult {
    /// Global optimum under (vehicles, total length); among equal-fitness
    /// candidates, the lexicographically smallest route list.
    pub best: Solution,
    pub objectives: Objectives,
    /// Number of delivery orderings evaluated (n!).
    pub explored: u64,
    /// Minimum total length over ALL feasible candidates regardless of
    /// vehicle count. The lexicographic winner may be longer than this when
    /// fewer vehicles cost extra length; constructive-heuristic sanity
    /// checks must compare against this bound, not `objectives`.
    pub min_total_length: f64,
}

#[derive(Debug, Clone)]
struct Candidate {
    vehicles: usize,
    total: f64,
    routes: Vec<Vec<NodeId>>,
}

struct BlockResult {
    best: Option<Candidate>,
    explored: u64,
    min_total: f64,
}

/// Exhaustively solves instances with at most `limit_n` deliveries.
pub fn brute_force(inst: &Instance, limit_n: usize) -> Result<ExactResult> {
    let n = inst.num_deliveries();
    if n > limit_n {
        return Err(Error::Unsupported(format!(
            "exhaustive search refused: {n} deliveries exceeds the limit {limit_n}"
        )));
    }
    let ids: Vec<NodeId> = inst.deliveries().collect();

    // Permutations are enumerated in lexicographic order, parallelized over
    // the first element; the tie-break makes the fold order irrelevant.
    let blocks: Vec<BlockResult> = par::map_range(n, |first| {
        let mut perm = Vec::with_capacity(n);
        perm.push(ids[first]);
        let mut rest: Vec<NodeId> = ids
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| i != first)
            .map(|(_, d)| d)
            .collect();
        let mut block = BlockResult { best: None, explored: 0, min_total: f64::INFINITY };
        let mut scratch = Segments::new(n);
        visit_perms(&mut perm, &mut rest, &mut |perm| {
            scratch.fill(inst, perm);
            let mut bounds = Vec::with_capacity(n);
            scan_splits(perm, &scratch, 0, 0, 0.0, &mut bounds, &mut block);
            block.explored += 1;
        });
        block
    });

    let mut best: Option<Candidate> = None;
    let mut explored = 0;
    let mut min_total = f64::INFINITY;
    for block in blocks {
        explored += block.explored;
        min_total = min_total.min(block.min_total);
        if let Some(c) = block.best {
            if best.as_ref().map_or(true, |b| is_better(&c, b)) {
                best = Some(c);
            }
        }
    }
    // Every permutation admits the all-singletons split on a servable
    // instance, so a best candidate always exists.
    let best = best.expect("servable instance has at least one feasible partition");
    let solution = Solution::new(inst, best.routes);
    debug_assert_eq!(solution.objectives.vehicles, best.vehicles);
    debug_assert_eq!(solution.objectives.total_length, best.total);
    let objectives = solution.objectives;
    Ok(ExactResult { best: solution, objectives, explored, min_total_length: min_total })
}

/// Strict "c replaces b" order: fitness first, then route-list content.
fn is_better(c: &Candidate, b: &Candidate) -> bool {
    match c.vehicles.cmp(&b.vehicles).then(c.total.total_cmp(&b.total)) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => c.routes < b.routes,
    }
}

/// Calls `f` with every permutation extending `perm` by all of `rest`, in
/// lexicographic order of the remaining choices.
fn visit_perms(
    perm: &mut Vec<NodeId>,
    rest: &mut Vec<NodeId>,
    f: &mut impl FnMut(&[NodeId]),
) {
    if rest.is_empty() {
        f(perm);
        return;
    }
    for i in 0..rest.len() {
        let x = rest.remove(i);
        perm.push(x);
        visit_perms(perm, rest, f);
        perm.pop();
        rest.insert(i, x);
    }
}

/// Per-permutation cache of every contiguous segment's closed route length
/// and feasibility. Index (a, b) covers perm[a..=b].
struct Segments {
    n: usize,
    closed: Vec<f64>,
    ok: Vec<bool>,
}

impl Segments {
    fn new(n: usize) -> Segments {
        Segments { n, closed: vec![0.0; n * n], ok: vec![false; n * n] }
    }

    /// Accumulates lengths left to right exactly like `route_length`, so
    /// the sums below match `Solution` caches bit for bit.
    fn fill(&mut self, inst: &Instance, perm: &[NodeId]) {
        let n = self.n;
        for a in 0..n {
            let mut open = inst.w(crate::model::DEPOT, perm[a]);
            let mut load = inst.demand(perm[a]);
            for b in a..n {
                if b > a {
                    open += inst.w(perm[b - 1], perm[b]);
                    load += inst.demand(perm[b]);
                }
                let closed = open + inst.w(perm[b], crate::model::DEPOT);
                self.closed[a * n + b] = closed;
                self.ok[a * n + b] = match inst.constraint() {
                    Constraint::MaxRouteLength(r_max) => closed <= r_max,
                    Constraint::Capacity(q) => load <= q,
                };
            }
        }
    }
}

fn scan_splits(
    perm: &[NodeId],
    seg: &Segments,
    start: usize,
    vehicles: usize,
    total: f64,
    bounds: &mut Vec<(usize, usize)>,
    block: &mut BlockResult,
) {
    let n = perm.len();
    if start == n {
        if total < block.min_total {
            block.min_total = total;
        }
        let replace = match &block.best {
            None => true,
            Some(b) => match vehicles.cmp(&b.vehicles).then(total.total_cmp(&b.total)) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    let routes = materialize(perm, bounds);
                    if routes < b.routes {
                        block.best = Some(Candidate { vehicles, total, routes });
                    }
                    return;
                }
            },
        };
        if replace {
            block.best = Some(Candidate { vehicles, total, routes: materialize(perm, bounds) });
        }
        return;
    }
    for end in start..n {
        if seg.ok[start * n + end] {
            bounds.push((start, end));
            scan_splits(
                perm,
                seg,
                end + 1,
                vehicles + 1,
                total + seg.closed[start * n + end],
                bounds,
                block,
            );
            bounds.pop();
        }
    }
}

fn materialize(perm: &[NodeId], bounds: &[(usize, usize)]) -> Vec<Vec<NodeId>> {
    bounds.iter().map(|&(a, b)| perm[a..=b].to_vec()).collect()
}
