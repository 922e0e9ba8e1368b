//! Problem instances, routes, solutions, and the fitness order.
//!
//! Nodes are dense indices: `0` is the depot, `1..=n` are deliveries.
//! External ids from instance files are kept as labels for output only.
//! Distances are `f64` throughout; instances with integer distances (the
//! rounded-Euclidean convention of the CVRP benchmark sets) store exact
//! integral values, so sums and comparisons on them are exact. Fitness
//! comparison is exact in all cases: no epsilon anywhere.

use crate::{Error, Result};

/// Dense node index. `DEPOT` is 0, deliveries are `1..=n`.
pub type NodeId = usize;

/// A chromosome is a giant tour: a permutation of all delivery ids with no
/// depot and no route delimiters. Route boundaries are recovered by
/// [`crate::constructive::demarcate`].
pub type Chromosome = Vec<NodeId>;

pub const DEPOT: NodeId = 0;

/// Per-route feasibility rule. Exactly one is active per instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// Route travel length (depot legs included) must not exceed the bound.
    MaxRouteLength(f64),
    /// Sum of delivery demands on the route must not exceed the capacity.
    Capacity(u64),
}

#[derive(Debug, Clone)]
enum MetricData {
    /// Flat `(n+1) x (n+1)` row-major matrix.
    Matrix(Vec<f64>),
    /// Euclidean over `coords`; `rounded` applies nearest-integer rounding
    /// (the CVRP benchmark convention).
    Euclidean { rounded: bool },
}

/// An immutable routing instance. Construct via [`Instance::from_points`] or
/// [`Instance::from_matrix`]; both validate structure so downstream code can
/// assume every single delivery is servable on its own.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    /// Number of deliveries (depot excluded).
    n: usize,
    /// External id per node, `labels[0]` is the depot's.
    labels: Vec<u64>,
    /// Planar coordinates per node, when known.
    coords: Option<Vec<(f64, f64)>>,
    /// Demand per node, `demands[0] = 0`. All zeros for length-limited instances.
    demands: Vec<u64>,
    constraint: Constraint,
    metric: MetricData,
    symmetric: bool,
    /// Optional fleet-size cap. Solvers treat the vehicle count as free; the
    /// cap only participates in solution validation.
    k_max: Option<usize>,
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

/// Nearest-integer rounding used by the benchmark-set distance convention.
fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Demand slots for depot plus deliveries; omitted demands default to one
/// unit each so capacity constraints stay meaningful.
fn expand_demands(n: usize, demands: Option<&[u64]>) -> Result<Vec<u64>> {
    let mut all = vec![1u64; n + 1];
    all[0] = 0;
    if let Some(ds) = demands {
        if ds.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{} demand entries for {} deliveries",
                ds.len(),
                n
            )));
        }
        all[1..].copy_from_slice(ds);
    }
    Ok(all)
}

impl Instance {
    /// Builds a Euclidean instance from depot and delivery coordinates.
    /// `points` supplies `(label, x, y)` per delivery in order; `demands`
    /// pairs with `points` and defaults to one unit per delivery.
    pub fn from_points(
        name: impl Into<String>,
        depot: (f64, f64),
        points: &[(u64, f64, f64)],
        demands: Option<&[u64]>,
        rounded: bool,
        constraint: Constraint,
    ) -> Result<Instance> {
        let n = points.len();
        let mut labels = Vec::with_capacity(n + 1);
        let mut coords = Vec::with_capacity(n + 1);
        labels.push(0);
        coords.push(depot);
        for &(id, x, y) in points {
            labels.push(id);
            coords.push((x, y));
        }
        let all_demands = expand_demands(n, demands)?;
        let inst = Instance {
            name: name.into(),
            n,
            labels,
            coords: Some(coords),
            demands: all_demands,
            constraint,
            metric: MetricData::Euclidean { rounded },
            symmetric: true,
            k_max: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Builds an instance from an explicit distance matrix. `matrix` is
    /// row-major `(n+1) x (n+1)` with node 0 as the depot.
    pub fn from_matrix(
        name: impl Into<String>,
        n: usize,
        matrix: Vec<f64>,
        demands: Option<&[u64]>,
        constraint: Constraint,
    ) -> Result<Instance> {
        if matrix.len() != (n + 1) * (n + 1) {
            return Err(Error::InvalidInstance(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                (n + 1) * (n + 1)
            )));
        }
        let symmetric = (0..=n).all(|i| (i..=n).all(|j| matrix[i * (n + 1) + j] == matrix[j * (n + 1) + i]));
        let all_demands = expand_demands(n, demands)?;
        let inst = Instance {
            name: name.into(),
            n,
            labels: (0..=n as u64).collect(),
            coords: None,
            demands: all_demands,
            constraint,
            metric: MetricData::Matrix(matrix),
            symmetric,
            k_max: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInstance("no deliveries".into()));
        }
        if let MetricData::Matrix(m) = &self.metric {
            let side = self.n + 1;
            for i in 0..side {
                for j in 0..side {
                    let w = m[i * side + j];
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::InvalidInstance(format!(
                            "weight ({i},{j}) = {w} is not a finite nonnegative number"
                        )));
                    }
                }
                if m[i * side + i] != 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "nonzero self-distance at node {i}"
                    )));
                }
            }
        }
        for d in 1..=self.n {
            if self.w(DEPOT, d) == 0.0 && self.w(d, DEPOT) == 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "delivery {} is coincident with the depot",
                    self.labels[d]
                )));
            }
        }
        match self.constraint {
            Constraint::MaxRouteLength(r_max) => {
                if !(r_max > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "route length bound {r_max} is not positive"
                    )));
                }
                for d in 1..=self.n {
                    let out_and_back = self.w(DEPOT, d) + self.w(d, DEPOT);
                    if out_and_back > r_max {
                        return Err(Error::Unservable(format!(
                            "delivery {} needs a round trip of {} against a bound of {}",
                            self.labels[d], out_and_back, r_max
                        )));
                    }
                }
            }
            Constraint::Capacity(q) => {
                if q == 0 {
                    return Err(Error::InvalidInstance("zero vehicle capacity".into()));
                }
                for d in 1..=self.n {
                    if self.demands[d] > q {
                        return Err(Error::Unservable(format!(
                            "delivery {} has demand {} against a capacity of {}",
                            self.labels[d], self.demands[d], q
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of deliveries, depot excluded.
    pub fn num_deliveries(&self) -> usize {
        self.n
    }

    /// Delivery ids in ascending order: `1..=n`.
    pub fn deliveries(&self) -> std::ops::RangeInclusive<NodeId> {
        1..=self.n
    }

    /// Travel weight from `a` to `b`.
    #[inline]
    pub fn w(&self, a: NodeId, b: NodeId) -> f64 {
        debug_assert!(a <= self.n && b <= self.n, "unknown node id");
        match &self.metric {
            MetricData::Matrix(m) => m[a * (self.n + 1) + b],
            MetricData::Euclidean { rounded } => {
                let coords = self.coords.as_ref().expect("euclidean metric implies coords");
                let d = euclid(coords[a], coords[b]);
                if *rounded {
                    nint(d)
                } else {
                    d
                }
            }
        }
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    pub fn demand(&self, d: NodeId) -> u64 {
        self.demands[d]
    }

    /// External id of a node, as written by the source file.
    pub fn label(&self, node: NodeId) -> u64 {
        self.labels[node]
    }

    /// Coordinates per node including the depot, when the instance carries
    /// geometry. Matrix-only instances return `None`.
    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn k_max(&self) -> Option<usize> {
        self.k_max
    }

    pub fn set_k_max(&mut self, k_max: Option<usize>) {
        self.k_max = k_max;
    }

    /// Overrides the depot's external label (constructors default it to 0).
    /// File parsers use this to keep the on-disk depot id across a
    /// parse/serialize round trip.
    pub fn set_depot_label(&mut self, label: u64) {
        self.labels[0] = label;
    }

    /// True when the metric rounds to integers, so every route length and
    /// objective is an exact integral `f64`.
    pub fn has_integral_distances(&self) -> bool {
        match &self.metric {
            MetricData::Euclidean { rounded } => *rounded,
            MetricData::Matrix(m) => m.iter().all(|w| w.fract() == 0.0),
        }
    }
}

/// One vehicle route: an ordered stop list (depot excluded) plus its cached
/// travel length and load. Caches are derived from the instance at
/// construction and kept consistent by every operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub stops: Vec<NodeId>,
    pub length: f64,
    pub load: u64,
}

impl Route {
    pub fn new(inst: &Instance, stops: Vec<NodeId>) -> Route {
        let length = route_length(inst, &stops);
        let load = route_load(inst, &stops);
        Route { stops, length, load }
    }
}

/// Travel length of a route: depot to first stop, consecutive stops, last
/// stop back to the depot. An empty stop list has length 0.
pub fn route_length(inst: &Instance, stops: &[NodeId]) -> f64 {
    let Some((&first, rest)) = stops.split_first() else {
        return 0.0;
    };
    let mut len = inst.w(DEPOT, first);
    let mut prev = first;
    for &s in rest {
        len += inst.w(prev, s);
        prev = s;
    }
    len + inst.w(prev, DEPOT)
}

/// Total demand served by a route.
pub fn route_load(inst: &Instance, stops: &[NodeId]) -> u64 {
    stops.iter().map(|&s| inst.demand(s)).sum()
}

/// Whether a route respects the instance's active constraint. Panics on an
/// unknown node id.
pub fn is_feasible(inst: &Instance, stops: &[NodeId]) -> bool {
    for &s in stops {
        assert!(s >= 1 && s <= inst.num_deliveries(), "unknown node id {s}");
    }
    match inst.constraint {
        Constraint::MaxRouteLength(r_max) => route_length(inst, stops) <= r_max,
        Constraint::Capacity(q) => route_load(inst, stops) <= q,
    }
}

/// Solution quality. Ranked lexicographically by `vehicles` then
/// `total_length`; `length_spread` is reported for analysis only and never
/// participates in comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objectives {
    pub vehicles: usize,
    pub total_length: f64,
    /// Sample standard deviation of route lengths; 0 for a single route.
    pub length_spread: f64,
}

/// The fitness order: fewer vehicles first, shorter total length second.
/// Exact comparison; ties are genuine ties.
pub fn compare_fitness(a: &Objectives, b: &Objectives) -> std::cmp::Ordering {
    a.vehicles
        .cmp(&b.vehicles)
        .then_with(|| a.total_length.total_cmp(&b.total_length))
}

/// Computes all three objective values from route caches.
pub fn compute_objectives(routes: &[Route]) -> Objectives {
    let vehicles = routes.len();
    let total_length: f64 = routes.iter().map(|r| r.length).sum();
    let length_spread = if vehicles > 1 {
        let mean = total_length / vehicles as f64;
        let ss: f64 = routes.iter().map(|r| (r.length - mean).powi(2)).sum();
        (ss / (vehicles - 1) as f64).sqrt()
    } else {
        0.0
    };
    Objectives { vehicles, total_length, length_spread }
}

/// A complete solution: routes in a fixed order plus cached objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub objectives: Objectives,
}

impl Solution {
    pub fn new(inst: &Instance, stops: Vec<Vec<NodeId>>) -> Solution {
        let routes: Vec<Route> = stops.into_iter().map(|s| Route::new(inst, s)).collect();
        let objectives = compute_objectives(&routes);
        Solution { routes, objectives }
    }

    pub fn from_routes(routes: Vec<Route>) -> Solution {
        let objectives = compute_objectives(&routes);
        Solution { routes, objectives }
    }

    /// Concatenates the routes back into a giant tour.
    pub fn flatten(&self) -> Chromosome {
        self.routes.iter().flat_map(|r| r.stops.iter().copied()).collect()
    }

    /// Recomputes objectives after in-place route edits.
    pub fn refresh_objectives(&mut self) {
        self.objectives = compute_objectives(&self.routes);
    }

    /// Full structural check: every delivery exactly once, every route
    /// nonempty and feasible, caches consistent, fleet cap respected.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let n = inst.num_deliveries();
        let mut seen = vec![false; n + 1];
        let mut count = 0usize;
        for (i, route) in self.routes.iter().enumerate() {
            if route.stops.is_empty() {
                return Err(Error::InvalidInstance(format!("route {i} is empty")));
            }
            for &s in &route.stops {
                if s < 1 || s > n {
                    return Err(Error::InvalidInstance(format!("unknown node id {s}")));
                }
                if seen[s] {
                    return Err(Error::InvalidInstance(format!(
                        "delivery {} visited more than once",
                        inst.label(s)
                    )));
                }
                seen[s] = true;
                count += 1;
            }
            if !is_feasible(inst, &route.stops) {
                return Err(Error::InvalidInstance(format!("route {i} is infeasible")));
            }
            if route.length != route_length(inst, &route.stops)
                || route.load != route_load(inst, &route.stops)
            {
                return Err(Error::InvalidInstance(format!("route {i} has stale caches")));
            }
        }
        if count != n {
            return Err(Error::InvalidInstance(format!(
                "{count} deliveries routed, expected {n}"
            )));
        }
        if let Some(k_max) = inst.k_max() {
            if self.routes.len() > k_max {
                return Err(Error::InvalidInstance(format!(
                    "{} routes against a fleet cap of {k_max}",
                    self.routes.len()
                )));
            }
        }
        Ok(())
    }
}
