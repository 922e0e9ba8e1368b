//! Constructive heuristics: giant-tour demarcation, savings-based route
//! merging, and angular sweep clustering.

use crate::local_search::two_opt_route;
use crate::model::{
    route_length, Constraint, Instance, NodeId, Route, Solution, DEPOT,
};
use crate::{par, Error, Result};

/// Splits a giant tour into routes greedily, left to right: each delivery is
/// appended to the current route while the extension stays feasible,
/// otherwise a new route opens. The concatenation of the returned routes is
/// exactly `genes`, so demarcation is a pure function of the permutation.
///
/// `genes` may cover any subset of the deliveries; crossover operators rely
/// on demarcating reduced tours. An empty slice yields an empty solution.
pub fn demarcate(inst: &Instance, genes: &[NodeId]) -> Solution {
    let mut routes: Vec<Route> = Vec::new();
    let mut stops: Vec<NodeId> = Vec::new();
    // Length of the open route without the closing depot leg, accumulated in
    // the same order as `route_length` so caches match it bit for bit.
    let mut open_len = 0.0f64;
    let mut open_load = 0u64;

    for &d in genes {
        if stops.is_empty() {
            open_len = inst.w(DEPOT, d);
            open_load = inst.demand(d);
            stops.push(d);
            continue;
        }
        let last = *stops.last().unwrap();
        let fits = match inst.constraint() {
            Constraint::MaxRouteLength(r_max) => {
                open_len + inst.w(last, d) + inst.w(d, DEPOT) <= r_max
            }
            Constraint::Capacity(q) => open_load + inst.demand(d) <= q,
        };
        if fits {
            open_len += inst.w(last, d);
            open_load += inst.demand(d);
            stops.push(d);
        } else {
            let length = open_len + inst.w(last, DEPOT);
            routes.push(Route { stops: std::mem::take(&mut stops), length, load: open_load });
            open_len = inst.w(DEPOT, d);
            open_load = inst.demand(d);
            stops.push(d);
        }
    }
    if let Some(&last) = stops.last() {
        let length = open_len + inst.w(last, DEPOT);
        routes.push(Route { stops, length, load: open_load });
    }
    Solution::from_routes(routes)
}

/// The gain of serving `u` and `v` on one route instead of two dedicated
/// round trips: `w(depot,u) + w(depot,v) - w(u,v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saving {
    pub u: NodeId,
    pub v: NodeId,
    pub value: f64,
}

/// Computes all pair savings, sorted by decreasing value with ties broken by
/// ascending `(u, v)`. Symmetric instances enumerate unordered pairs
/// (`u < v`); asymmetric ones enumerate both directions. The comparator is a
/// total order, so the result is identical however the work is scheduled.
pub fn compute_savings(inst: &Instance) -> Vec<Saving> {
    let n = inst.num_deliveries();
    let rows: Vec<Vec<Saving>> = par::map_range(n, |i| {
        let u = i + 1;
        let vs = if inst.is_symmetric() { u + 1..=n } else { 1..=n };
        vs.filter(|&v| v != u)
            .map(|v| Saving {
                u,
                v,
                value: inst.w(DEPOT, u) + inst.w(DEPOT, v) - inst.w(u, v),
            })
            .collect()
    });
    let mut savings: Vec<Saving> = rows.into_iter().flatten().collect();
    par::sort_unstable_by(&mut savings, |a, b| {
        b.value
            .total_cmp(&a.value)
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });
    savings
}

/// Clarke-Wright savings construction, parallel variant: starts from one
/// dedicated route per delivery and walks the full savings list in
/// decreasing order, merging the two routes whose opposite endpoints are
/// `u` and `v` whenever the concatenation stays feasible. Every saving is
/// attempted, gainful or not; feasibility is the only merge guard.
///
/// On a symmetric metric a route may be reversed to expose the required
/// endpoint; on an asymmetric one only tail-to-head joins apply.
pub fn clarke_wright(inst: &Instance) -> Solution {
    let n = inst.num_deliveries();
    let savings = compute_savings(inst);

    let mut route_of: Vec<usize> = (0..=n).collect();
    let mut members: Vec<Option<Vec<NodeId>>> = (0..=n).map(|d| Some(vec![d])).collect();
    let mut loads: Vec<u64> = (0..=n).map(|d| inst.demand(d)).collect();

    for s in &savings {
        let ru = route_of[s.u];
        let rv = route_of[s.v];
        if ru == rv {
            continue;
        }
        let a = members[ru].as_ref().unwrap();
        let b = members[rv].as_ref().unwrap();

        let u_head = a[0] == s.u;
        let u_tail = *a.last().unwrap() == s.u;
        let v_head = b[0] == s.v;
        let v_tail = *b.last().unwrap() == s.v;

        // Orientation that puts u at the joint's left and v at its right;
        // fixed precedence keeps the walk deterministic.
        let merged: Vec<NodeId> = if u_tail && v_head {
            a.iter().chain(b.iter()).copied().collect()
        } else if !inst.is_symmetric() {
            continue;
        } else if u_tail && v_tail {
            a.iter().chain(b.iter().rev()).copied().collect()
        } else if u_head && v_head {
            a.iter().rev().chain(b.iter()).copied().collect()
        } else if u_head && v_tail {
            b.iter().chain(a.iter()).copied().collect()
        } else {
            continue; // u or v is interior to its route
        };

        let feasible = match inst.constraint() {
            Constraint::Capacity(q) => loads[ru] + loads[rv] <= q,
            Constraint::MaxRouteLength(r_max) => route_length(inst, &merged) <= r_max,
        };
        if !feasible {
            continue;
        }
        for &d in members[rv].as_ref().unwrap() {
            route_of[d] = ru;
        }
        loads[ru] += loads[rv];
        members[ru] = Some(merged);
        members[rv] = None;
    }

    let stops: Vec<Vec<NodeId>> = members.into_iter().skip(1).flatten().collect();
    Solution::new(inst, stops)
}

/// The dedicated-route starting point of the savings construction: one
/// out-and-back route per delivery. Useful as a sanity bound.
pub fn star_solution(inst: &Instance) -> Solution {
    Solution::new(inst, inst.deliveries().map(|d| vec![d]).collect())
}

/// Sweep construction: orders deliveries by polar angle around the depot
/// (start ray pointing east, ties by radius then id), fills a cluster while
/// the cluster's route stays feasible in sweep order, then improves each
/// cluster with 2-opt. Requires geometry; matrix-only instances are
/// rejected.
pub fn sweep(inst: &Instance) -> Result<Solution> {
    let Some(coords) = inst.coords() else {
        return Err(Error::Unsupported(
            "sweep needs delivery coordinates, which this instance does not carry".into(),
        ));
    };
    let (dx, dy) = coords[DEPOT];
    let mut order: Vec<(f64, f64, NodeId)> = inst
        .deliveries()
        .map(|d| {
            let (x, y) = coords[d];
            let mut angle = (y - dy).atan2(x - dx);
            if angle < 0.0 {
                angle += 2.0 * std::f64::consts::PI;
            }
            let radius = ((x - dx).powi(2) + (y - dy).powi(2)).sqrt();
            (angle, radius, d)
        })
        .collect();
    order.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    // Greedy demarcation over the sweep order produces exactly the "fill
    // until the next delivery does not fit" clustering.
    let genes: Vec<NodeId> = order.into_iter().map(|(_, _, d)| d).collect();
    let clustered = demarcate(inst, &genes);

    let routes: Vec<Route> = clustered
        .routes
        .into_iter()
        .map(|r| two_opt_route(inst, r))
        .collect();
    Ok(Solution::from_routes(routes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{compare_fitness, is_feasible};

    /// Depot at origin; deliveries strung out east on the x axis.
    fn line_instance(xs: &[f64], constraint: Constraint, demands: Option<&[u64]>) -> Instance {
        let points: Vec<(u64, f64, f64)> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| (i as u64 + 1, x, 0.0))
            .collect();
        Instance::from_points("line", (0.0, 0.0), &points, demands, false, constraint).unwrap()
    }

    #[test]
    fn demarcate_packs_greedily_under_capacity() {
        let inst = line_instance(
            &[1.0, 2.0, 3.0, 4.0],
            Constraint::Capacity(5),
            Some(&[2, 3, 4, 1]),
        );
        let sol = demarcate(&inst, &[1, 2, 3, 4]);
        // Loads 2+3 = 5 fill the first vehicle; 4+1 = 5 the second.
        let stops: Vec<Vec<NodeId>> = sol.routes.iter().map(|r| r.stops.clone()).collect();
        assert_eq!(stops, vec![vec![1, 2], vec![3, 4]]);
        assert!(sol.validate(&inst).is_ok());
    }

    #[test]
    fn demarcate_respects_route_length_bound() {
        // Out-and-back lengths: d1 = 2, d2 = 4, d3 = 6.
        let inst = line_instance(&[1.0, 2.0, 3.0], Constraint::MaxRouteLength(6.0), None);
        let sol = demarcate(&inst, &[1, 2, 3]);
        // 0->1->2->3->0 has length 1+1+1+3 = 6, exactly the bound.
        assert_eq!(sol.routes.len(), 1);
        assert_eq!(sol.routes[0].stops, vec![1, 2, 3]);
        assert_eq!(sol.routes[0].length, 6.0);

        // A worse order cannot fit in one vehicle: after [3, 1] (length 6),
        // extending by 2 would need 3+2+1+2 = 8 > 6, so a new route opens.
        let sol = demarcate(&inst, &[3, 1, 2]);
        assert_eq!(sol.routes.len(), 2);
        assert_eq!(sol.routes[0].stops, vec![3, 1]);
        assert_eq!(sol.routes[1].stops, vec![2]);
    }

    #[test]
    fn demarcate_single_delivery_and_empty_tour() {
        let inst = line_instance(&[1.0], Constraint::Capacity(1), Some(&[1]));
        let sol = demarcate(&inst, &[1]);
        assert_eq!(sol.routes.len(), 1);
        assert_eq!(sol.objectives.total_length, 2.0);
        let empty = demarcate(&inst, &[]);
        assert!(empty.routes.is_empty());
        assert_eq!(empty.objectives.vehicles, 0);
    }

    #[test]
    fn demarcate_is_stable_under_flatten_and_redo() {
        let inst = line_instance(
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            Constraint::Capacity(4),
            Some(&[2, 2, 1, 3, 1]),
        );
        let sol = demarcate(&inst, &[5, 2, 4, 1, 3]);
        let again = demarcate(&inst, &sol.flatten());
        assert_eq!(sol, again);
    }

    #[test]
    fn saving_value_matches_depot_leg_gain() {
        // Depot legs 3 and 4, direct hop 1: the classic 3-4-5 gain of 6.
        let m = vec![
            0.0, 3.0, 4.0, //
            3.0, 0.0, 1.0, //
            4.0, 1.0, 0.0,
        ];
        let inst = Instance::from_matrix("twin", 2, m, None, Constraint::MaxRouteLength(100.0))
            .unwrap();
        let savings = compute_savings(&inst);
        assert_eq!(savings.len(), 1);
        assert_eq!(savings[0], Saving { u: 1, v: 2, value: 6.0 });
    }

    #[test]
    fn savings_sorted_by_value_then_ids() {
        let inst = line_instance(&[1.0, 2.0, 3.0], Constraint::Capacity(10), Some(&[1, 1, 1]));
        let savings = compute_savings(&inst);
        assert_eq!(savings.len(), 3);
        for w in savings.windows(2) {
            assert!(
                w[0].value > w[1].value
                    || (w[0].value == w[1].value && (w[0].u, w[0].v) < (w[1].u, w[1].v))
            );
        }
        // s(2,3) = 2 + 3 - 1 = 4 is the largest.
        assert_eq!((savings[0].u, savings[0].v), (2, 3));
    }

    #[test]
    fn clarke_wright_merges_when_feasible() {
        let inst = line_instance(&[1.0, 2.0], Constraint::Capacity(2), Some(&[1, 1]));
        let sol = clarke_wright(&inst);
        assert_eq!(sol.objectives.vehicles, 1);
        assert!(sol.validate(&inst).is_ok());
    }

    #[test]
    fn clarke_wright_keeps_routes_apart_when_merge_is_infeasible() {
        let inst = line_instance(&[1.0, 2.0], Constraint::Capacity(1), Some(&[1, 1]));
        let sol = clarke_wright(&inst);
        assert_eq!(sol.objectives.vehicles, 2);
        assert_eq!(sol.objectives.total_length, 2.0 + 4.0);
    }

    #[test]
    fn clarke_wright_chains_collinear_deliveries_into_one_route() {
        let inst = line_instance(&[1.0, 2.0, 3.0], Constraint::Capacity(3), Some(&[1, 1, 1]));
        let sol = clarke_wright(&inst);
        assert_eq!(sol.objectives.vehicles, 1);
        // Optimal chain out to the far end and back: 6.
        assert_eq!(sol.objectives.total_length, 6.0);
    }

    #[test]
    fn clarke_wright_attempts_negative_savings() {
        // Triangle inequality violated: joining 1 and 2 costs more than two
        // dedicated routes, yet the merge is still taken because the walk
        // only checks feasibility.
        let m = vec![
            0.0, 1.0, 1.0, //
            1.0, 0.0, 3.0, //
            1.0, 3.0, 0.0,
        ];
        let inst =
            Instance::from_matrix("spite", 2, m, Some(&[1, 1]), Constraint::Capacity(2)).unwrap();
        let star = star_solution(&inst);
        let sol = clarke_wright(&inst);
        assert_eq!(sol.objectives.vehicles, 1);
        assert!(sol.objectives.total_length > star.objectives.total_length);
    }

    #[test]
    fn clarke_wright_never_places_a_delivery_twice() {
        let inst = line_instance(
            &[1.0, 1.5, 2.0, 2.5, 3.0, 3.5],
            Constraint::Capacity(3),
            Some(&[1, 2, 1, 2, 1, 2]),
        );
        let sol = clarke_wright(&inst);
        assert!(sol.validate(&inst).is_ok());
        for r in &sol.routes {
            assert!(is_feasible(&inst, &r.stops));
        }
    }

    #[test]
    fn sweep_clusters_by_angle_and_improves_with_two_opt() {
        // Wedges at 10 and 20 degrees, then 190 and 200; capacity splits
        // the sorted sweep 2 + 2.
        let deg = |d: f64| d.to_radians();
        let inst = Instance::from_points(
            "wedges",
            (0.0, 0.0),
            &[
                (1, 10.0 * deg(10.0).cos(), 10.0 * deg(10.0).sin()),
                (2, 10.0 * deg(20.0).cos(), 10.0 * deg(20.0).sin()),
                (3, 10.0 * deg(190.0).cos(), 10.0 * deg(190.0).sin()),
                (4, 10.0 * deg(200.0).cos(), 10.0 * deg(200.0).sin()),
            ],
            Some(&[1, 1, 1, 1]),
            false,
            Constraint::Capacity(2),
        )
        .unwrap();
        let sol = sweep(&inst).unwrap();
        assert_eq!(sol.objectives.vehicles, 2);
        assert!(sol.validate(&inst).is_ok());
        let mut groups: Vec<Vec<NodeId>> = sol
            .routes
            .iter()
            .map(|r| {
                let mut s = r.stops.clone();
                s.sort_unstable();
                s
            })
            .collect();
        groups.sort();
        assert_eq!(groups, vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn sweep_start_ray_tie_breaks_by_radius() {
        // Both deliveries sit exactly on the east ray; the closer one leads.
        let inst = Instance::from_points(
            "ray",
            (0.0, 0.0),
            &[(1, 5.0, 0.0), (2, 2.0, 0.0)],
            Some(&[1, 1]),
            false,
            Constraint::Capacity(1),
        )
        .unwrap();
        let sol = sweep(&inst).unwrap();
        assert_eq!(sol.routes[0].stops, vec![2]);
        assert_eq!(sol.routes[1].stops, vec![1]);
    }

    #[test]
    fn sweep_rejects_matrix_only_instances() {
        let m = vec![0.0, 1.0, 1.0, 0.0];
        let inst =
            Instance::from_matrix("m", 1, m, None, Constraint::MaxRouteLength(10.0)).unwrap();
        assert!(matches!(sweep(&inst), Err(Error::Unsupported(_))));
    }

    #[test]
    fn clarke_wright_not_worse_than_star_on_euclidean_instances() {
        let inst = line_instance(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            Constraint::MaxRouteLength(12.0),
            None,
        );
        let star = star_solution(&inst);
        let sol = clarke_wright(&inst);
        assert!(sol.objectives.total_length <= star.objectives.total_length);
        assert!(compare_fitness(&sol.objectives, &star.objectives).is_le());
    }
}
