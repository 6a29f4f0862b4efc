//! Exhaustive search over routes, spacings and activation counts for the
//! best joint throughput of a path pair.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::interference_intensity;
use crate::error::{domain, Error, Result};
use crate::matching::max_support_set;
use crate::model::PathPair;
use crate::periods::{build_matrix, continuation, is_reachable_period};
use crate::rational::Rational;
use crate::scheduler::{schedule_pair_unequal, Schedule};

pub const DEFAULT_MAX_ACTIVATIONS: usize = 4;

/// One way of routing both flows, with the pair it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteCandidate {
    /// Node labels from source to destination, one route per path.
    pub routes: Vec<Vec<String>>,
    pub pair: PathPair,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    pub candidates: Vec<RouteCandidate>,
    /// Optional inclusive spacing bounds per path, intersected with
    /// `[I*, N]` of each route.
    pub period_bounds: [Option<(usize, usize)>; 2],
    pub max_activations: usize,
}

impl SearchSpace {
    /// A single fixed route pair with unrestricted spacings.
    pub fn fixed(pair: PathPair, max_activations: usize) -> Self {
        let routes = pair
            .paths()
            .map(|p| (1..=p.n_senders + 1).map(|k| format!("{}.{k}", p.id)).collect())
            .collect();
        SearchSpace {
            candidates: vec![RouteCandidate { routes, pair }],
            period_bounds: [None, None],
            max_activations,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CandidateStatus {
    Evaluated,
    /// Some phase subset at this spacing contains an interfering pair.
    Unreachable { path_id: u8 },
    /// The best arrangement of this grid point cannot keep every relay
    /// hop alternating, so its formula throughput is not realized.
    Unpipelinable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub route: usize,
    pub spacings: (usize, usize),
    pub activations: Option<(usize, usize)>,
    pub support_number: Option<usize>,
    pub period: Option<usize>,
    pub throughput: Option<Rational>,
    #[serde(flatten)]
    pub status: CandidateStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestParameters {
    pub spacing1: usize,
    pub spacing2: usize,
    pub activations1: usize,
    pub activations2: usize,
    pub support_number: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_route: usize,
    pub best_routes: Vec<Vec<String>>,
    pub best: BestParameters,
    pub best_throughput: Rational,
    pub schedule: Schedule,
    pub search_log: Vec<Candidate>,
}

/// Throughput descending, then shorter period, then parameters ascending.
fn rank(a: &Candidate, b: &Candidate) -> Ordering {
    b.throughput
        .cmp(&a.throughput)
        .then(a.period.cmp(&b.period))
        .then((a.route, a.spacings, a.activations).cmp(&(b.route, b.spacings, b.activations)))
}

fn clamp(bounds: Option<(usize, usize)>, lo: usize, hi: usize) -> std::ops::RangeInclusive<usize> {
    let (blo, bhi) = bounds.unwrap_or((lo, hi));
    blo.max(lo)..=bhi.min(hi)
}

fn grid_for(space: &SearchSpace, route: usize) -> Result<Vec<(usize, usize, usize)>> {
    let pair = &space.candidates[route].pair;
    let mut ranges = Vec::with_capacity(2);
    for (k, bounds) in space.period_bounds.iter().enumerate() {
        let path = pair.path(k as u8 + 1)?;
        let (lower, _) = interference_intensity(pair, &path.senders().collect::<Vec<_>>())?;
        ranges.push(clamp(*bounds, lower, path.n_senders));
    }
    Ok(ranges[0]
        .clone()
        .flat_map(|t1| ranges[1].clone().map(move |t2| (route, t1, t2)))
        .collect())
}

fn evaluate(space: &SearchSpace, route: usize, t1: usize, t2: usize) -> Result<Vec<Candidate>> {
    let pair = &space.candidates[route].pair;
    for (id, t) in [(1u8, t1), (2, t2)] {
        if !is_reachable_period(pair, id, t)? {
            return Ok(vec![Candidate {
                route,
                spacings: (t1, t2),
                activations: None,
                support_number: None,
                period: None,
                throughput: None,
                status: CandidateStatus::Unreachable { path_id: id },
            }]);
        }
    }
    let base = build_matrix(pair, t1, t2)?.entries;
    let mut out = Vec::with_capacity(space.max_activations * space.max_activations);
    for l1 in 1..=space.max_activations {
        for l2 in 1..=space.max_activations {
            let (_, u) = max_support_set(&continuation(&base, l1, l2)?);
            let period = l1 * t1 + l2 * t2 - u;
            out.push(Candidate {
                route,
                spacings: (t1, t2),
                activations: Some((l1, l2)),
                support_number: Some(u),
                period: Some(period),
                throughput: Some(Rational::new((l1 + l2) as u64, period as u64)),
                status: CandidateStatus::Evaluated,
            });
        }
    }
    Ok(out)
}

/// Evaluates every grid point, then materializes schedules in rank order
/// and returns the first one whose beats pipeline. Grid points whose
/// spacing is unreachable, and better-ranked points that do not pipeline,
/// stay in the log with their status.
pub fn optimize(space: &SearchSpace) -> Result<OptimizationResult> {
    if space.candidates.is_empty() || space.max_activations == 0 {
        return domain("search space is empty: need at least one route pair and max_activations >= 1");
    }
    for c in &space.candidates {
        if !c.pair.is_pair() {
            return domain("optimization needs two paths in every route candidate");
        }
    }
    let mut grid = Vec::new();
    for route in 0..space.candidates.len() {
        grid.extend(grid_for(space, route)?);
    }
    if grid.is_empty() {
        return domain("search space is empty after clamping spacings to [I*, N]");
    }
    let evaluated: Vec<Vec<Candidate>> = grid
        .par_iter()
        .map(|&(route, t1, t2)| evaluate(space, route, t1, t2))
        .collect::<Result<_>>()?;
    let mut log: Vec<Candidate> = evaluated.into_iter().flatten().collect();

    let mut order: Vec<usize> = (0..log.len())
        .filter(|&i| log[i].status == CandidateStatus::Evaluated)
        .collect();
    order.sort_by(|&a, &b| rank(&log[a], &log[b]));
    for i in order {
        let c = &log[i];
        let (t1, t2) = c.spacings;
        let (l1, l2) = c.activations.expect("evaluated candidates carry activations");
        let schedule = schedule_pair_unequal(&space.candidates[c.route].pair, t1, t2, l1, l2)?;
        if !schedule.pipelined {
            log[i].status = CandidateStatus::Unpipelinable;
            continue;
        }
        if schedule.support_number != c.support_number.unwrap_or_default() {
            return Err(Error::Internal("schedule and grid disagree on the support number".into()));
        }
        let c = log[i].clone();
        return Ok(OptimizationResult {
            best_route: c.route,
            best_routes: space.candidates[c.route].routes.clone(),
            best: BestParameters {
                spacing1: t1,
                spacing2: t2,
                activations1: l1,
                activations2: l2,
                support_number: schedule.support_number,
            },
            best_throughput: c.throughput.expect("evaluated candidates carry a throughput"),
            schedule,
            search_log: log,
        });
    }
    domain("no reachable, pipelinable grid point in the search space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InterferenceRelation;
    use crate::scheduler::predicted_throughput;

    fn far(n1: usize, n2: usize, width: usize) -> PathPair {
        PathPair::from_predicate(n1, Some(n2), |a, b| a.path_id == b.path_id && a.seq.abs_diff(b.seq) < width).unwrap()
    }

    #[test]
    fn far_pair_reaches_two_thirds() {
        let mut space = SearchSpace::fixed(far(6, 6, 3), 1);
        space.period_bounds = [Some((3, 3)), Some((3, 3))];
        let res = optimize(&space).unwrap();
        assert_eq!(res.best_throughput, Rational::new(2, 3));
        assert_eq!(res.best.support_number, 3);
        assert_eq!(predicted_throughput(&res.schedule), res.best_throughput);
    }

    #[test]
    fn serial_pair_prefers_uneven_activations() {
        let full = PathPair::pair(3, 2, InterferenceRelation::from_fn(5, |_, _| true).unwrap()).unwrap();
        let res = optimize(&SearchSpace::fixed(full, 2)).unwrap();
        assert_eq!(res.best_throughput, Rational::new(3, 7));
        assert_eq!((res.best.activations1, res.best.activations2), (1, 2));
        assert_eq!(res.search_log.len(), 4);
    }

    #[test]
    fn unreachable_spacings_are_logged() {
        // Path 1 has a clique {1,2,3} but sender 4 also hits sender 1, so
        // spacing 3 puts an interfering pair into phase 1.
        let hits = [(1, 2), (2, 3), (3, 4), (1, 3), (1, 4)];
        let pair = PathPair::from_predicate(4, Some(3), |a, b| {
            let (lo, hi) = (a.seq.min(b.seq), a.seq.max(b.seq));
            match (a.path_id, b.path_id) {
                (1, 1) => hits.contains(&(lo, hi)),
                (2, 2) => true,
                _ => false,
            }
        })
        .unwrap();
        let res = optimize(&SearchSpace::fixed(pair, 1)).unwrap();
        let skipped: Vec<_> = res
            .search_log
            .iter()
            .filter(|c| c.status == CandidateStatus::Unreachable { path_id: 1 })
            .map(|c| c.spacings)
            .collect();
        assert_eq!(skipped, vec![(3, 3)]);
        assert_eq!(res.best.spacing1, 4);
        assert!(res.search_log.iter().all(|c| c.throughput <= Some(res.best_throughput)));
    }

    #[test]
    fn empty_space_is_rejected() {
        let mut space = SearchSpace::fixed(far(3, 3, 3), 1);
        space.period_bounds = [Some((5, 6)), None];
        assert!(optimize(&space).is_err());
        space.candidates.clear();
        assert!(optimize(&space).is_err());
    }
}
