//! Periodic beat schedules for one path and for pairs of paths.
//!
//! A single path cycles through the phases of its intrinsic period. A pair
//! first pairs up compatible phases of the two paths (one beat serves both),
//! then serializes the leftovers. Unequal activation counts run the same
//! construction on the block-tiled concurrency matrix.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{bits, Mask};
use crate::matching::{max_support_set, SupportSet};
use crate::matrix::BinaryMatrix;
use crate::model::{NodeRef, PathPair};
use crate::periods::{build_matrix, continuation, intrinsic_period, is_reachable_period, EquallySpacedSubset};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeatCategory {
    /// A single-path schedule beat.
    Primary,
    /// One subset from each path.
    Joint,
    Path1Only,
    Path2Only,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Beat {
    pub category: BeatCategory,
    pub subsets: Vec<EquallySpacedSubset>,
}

impl Beat {
    pub fn phase_of(&self, path_id: u8) -> Option<usize> {
        self.subsets.iter().find(|s| s.path_id == path_id).map(|s| s.phase)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum ScheduleKind {
    Primary { path_id: u8 },
    PairEqual { activations: usize },
    PairUnequal { activations1: usize, activations2: usize },
}

/// Per-path parameters of a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPlan {
    pub path_id: u8,
    pub n_senders: usize,
    pub spacing: usize,
    /// Times each phase subset is activated per period.
    pub activations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub paths: Vec<PathPlan>,
    /// Maximum supporting set of the (tiled) concurrency matrix; empty for
    /// single-path schedules.
    pub support: SupportSet,
    pub support_number: usize,
    pub period: usize,
    /// True when every relay hop alternates with its downstream hop around
    /// the cycle, so that one-block relay buffers never stall.
    pub pipelined: bool,
    /// True when the beats differ from the paired-then-leftover order.
    pub reordered: bool,
    pub beats: Vec<Beat>,
}

impl Schedule {
    pub fn plan(&self, path_id: u8) -> Option<&PathPlan> {
        self.paths.iter().find(|p| p.path_id == path_id)
    }

    pub(crate) fn beat_masks(&self, pair: &PathPair) -> Vec<Mask> {
        self.beats
            .iter()
            .map(|b| b.subsets.iter().fold(0, |m, s| m | s.mask(pair)))
            .collect()
    }

    /// Senders activated in beat `k` (0-based, taken modulo the period).
    pub fn active_nodes(&self, k: usize) -> Vec<NodeRef> {
        let beat = &self.beats[k % self.period];
        beat.subsets
            .iter()
            .flat_map(|s| {
                let n = self.plan(s.path_id).map_or(0, |p| p.n_senders);
                s.members(n)
            })
            .collect()
    }

    /// Rows are senders, columns are beats; `#` marks an active sender.
    pub fn timeline(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>8} ", "beat");
        for k in 1..=self.period {
            out.push(char::from_digit((k % 10) as u32, 10).unwrap());
        }
        out.push('\n');
        for plan in &self.paths {
            for seq in 1..=plan.n_senders {
                let phase = (seq - 1) % plan.spacing + 1;
                let _ = write!(out, "{:>8} ", NodeRef::new(plan.path_id, seq).to_string());
                for beat in &self.beats {
                    out.push(if beat.phase_of(plan.path_id) == Some(phase) { '#' } else { '.' });
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Single-path schedule at the intrinsic period: beat `k` activates the
/// phase-`k` subset.
pub fn schedule_primary(pair: &PathPair, path_id: u8) -> Result<Schedule> {
    let spacing = intrinsic_period(pair, path_id)?;
    schedule_primary_with_spacing(pair, path_id, spacing)
}

/// Single-path schedule at an explicitly chosen reachable spacing.
pub fn schedule_primary_with_spacing(pair: &PathPair, path_id: u8, spacing: usize) -> Result<Schedule> {
    let path = *pair.path(path_id)?;
    require_reachable(pair, path_id, spacing)?;
    let beats = (1..=spacing)
        .map(|phase| {
            Ok(Beat {
                category: BeatCategory::Primary,
                subsets: vec![EquallySpacedSubset::new(&path, phase, spacing)?],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Schedule {
        kind: ScheduleKind::Primary { path_id },
        paths: vec![PathPlan {
            path_id,
            n_senders: path.n_senders,
            spacing,
            activations: 1,
        }],
        support: SupportSet::default(),
        support_number: 0,
        period: spacing,
        pipelined: true,
        reordered: false,
        beats,
    })
}

fn require_reachable(pair: &PathPair, path_id: u8, spacing: usize) -> Result<()> {
    let n = pair.path(path_id)?.n_senders;
    if spacing == 0 || spacing > n {
        return domain(format!("spacing {spacing} outside 1..={n} for path {path_id}"));
    }
    if !is_reachable_period(pair, path_id, spacing)? {
        return domain(format!("spacing {spacing} is not reachable on path {path_id}"));
    }
    Ok(())
}

/// Pair schedule with both paths activated `activations` times per period.
/// Each traversal holds the paired beats in support order, then the unpaired
/// path-1 phases ascending, then the unpaired path-2 phases ascending.
pub fn schedule_pair_equal(pair: &PathPair, t1: usize, t2: usize, activations: usize) -> Result<Schedule> {
    if activations == 0 {
        return domain("activation count must be at least 1");
    }
    let (_, support, one_pass) = pair_traversal(pair, t1, t2, 1, 1)?;
    let beats: Vec<Beat> = (0..activations).flat_map(|_| one_pass.iter().cloned()).collect();
    let support_number = support.len();
    let mut schedule = Schedule {
        kind: ScheduleKind::PairEqual { activations },
        paths: pair_plans(pair, t1, t2, activations, activations)?,
        support,
        support_number,
        period: activations * (t1 + t2 - support_number),
        pipelined: true,
        reordered: false,
        beats,
    };
    schedule.pipelined = is_pipelined(&schedule);
    Ok(schedule)
}

/// Pair schedule with path 1 activated `activations1` times and path 2
/// `activations2` times per period, built on the tiled concurrency matrix.
///
/// If the paired-then-leftover order would make some relay hop fire twice
/// before its downstream hop, the beats are rearranged (possibly pairing
/// phases differently, always with the same number of paired beats) so that
/// every hop alternates with its neighbours. The period is unchanged. When
/// no such arrangement exists the canonical order is kept and `pipelined` is
/// false.
pub fn schedule_pair_unequal(
    pair: &PathPair,
    t1: usize,
    t2: usize,
    activations1: usize,
    activations2: usize,
) -> Result<Schedule> {
    if activations1 == 0 || activations2 == 0 {
        return domain("activation counts must be at least 1");
    }
    let (base, support, beats) = pair_traversal(pair, t1, t2, activations1, activations2)?;
    let support_number = support.len();
    let mut schedule = Schedule {
        kind: ScheduleKind::PairUnequal {
            activations1,
            activations2,
        },
        paths: pair_plans(pair, t1, t2, activations1, activations2)?,
        support,
        support_number,
        period: activations1 * t1 + activations2 * t2 - support_number,
        pipelined: true,
        reordered: false,
        beats,
    };
    if is_pipelined(&schedule) {
        return Ok(schedule);
    }
    match pipelined_arrangement(&base, &schedule.paths, support_number) {
        Arrangement::Found(order) => {
            let (p1, p2) = (*pair.path(1)?, *pair.path(2)?);
            let mut seen1 = vec![0; t1 + 1];
            let mut seen2 = vec![0; t2 + 1];
            let mut elements = Vec::new();
            let mut beats = Vec::with_capacity(order.len());
            for (a, b) in order {
                let mut subsets = Vec::new();
                if let Some(a) = a {
                    subsets.push(EquallySpacedSubset::new(&p1, a, t1)?);
                    seen1[a] += 1;
                }
                if let Some(b) = b {
                    subsets.push(EquallySpacedSubset::new(&p2, b, t2)?);
                    seen2[b] += 1;
                }
                let category = match (a, b) {
                    (Some(a), Some(b)) => {
                        elements.push((a + (seen1[a] - 1) * t1, b + (seen2[b] - 1) * t2));
                        BeatCategory::Joint
                    }
                    (Some(_), None) => BeatCategory::Path1Only,
                    _ => BeatCategory::Path2Only,
                };
                beats.push(Beat { category, subsets });
            }
            elements.sort_unstable();
            schedule.support = SupportSet { elements };
            schedule.beats = beats;
            schedule.reordered = true;
        }
        Arrangement::None => schedule.pipelined = false,
        Arrangement::GaveUp => {
            return Err(Error::Internal(format!(
                "arrangement search exceeded {SEARCH_BUDGET} states for spacings ({t1},{t2})"
            )))
        }
    }
    Ok(schedule)
}

fn pair_plans(pair: &PathPair, t1: usize, t2: usize, a1: usize, a2: usize) -> Result<Vec<PathPlan>> {
    Ok(vec![
        PathPlan {
            path_id: 1,
            n_senders: pair.path(1)?.n_senders,
            spacing: t1,
            activations: a1,
        },
        PathPlan {
            path_id: 2,
            n_senders: pair.path(2)?.n_senders,
            spacing: t2,
            activations: a2,
        },
    ])
}

fn pair_traversal(
    pair: &PathPair,
    t1: usize,
    t2: usize,
    l1: usize,
    l2: usize,
) -> Result<(BinaryMatrix, SupportSet, Vec<Beat>)> {
    let base = build_matrix(pair, t1, t2)?;
    let tiled = continuation(&base.entries, l1, l2)?;
    let (support, _) = max_support_set(&tiled);
    let (p1, p2) = (*pair.path(1)?, *pair.path(2)?);
    let s1 = |row: usize| EquallySpacedSubset::new(&p1, (row - 1) % t1 + 1, t1);
    let s2 = |col: usize| EquallySpacedSubset::new(&p2, (col - 1) % t2 + 1, t2);
    let mut beats = Vec::with_capacity(l1 * t1 + l2 * t2);
    let mut row_used = vec![false; l1 * t1 + 1];
    let mut col_used = vec![false; l2 * t2 + 1];
    for &(r, c) in &support.elements {
        row_used[r] = true;
        col_used[c] = true;
        beats.push(Beat {
            category: BeatCategory::Joint,
            subsets: vec![s1(r)?, s2(c)?],
        });
    }
    for r in (1..=l1 * t1).filter(|&r| !row_used[r]) {
        beats.push(Beat {
            category: BeatCategory::Path1Only,
            subsets: vec![s1(r)?],
        });
    }
    for c in (1..=l2 * t2).filter(|&c| !col_used[c]) {
        beats.push(Beat {
            category: BeatCategory::Path2Only,
            subsets: vec![s2(c)?],
        });
    }
    Ok((base.entries, support, beats))
}

/// Exact blocks-per-beat rate implied by the schedule: total activations of
/// all paths per period divided by the period.
pub fn predicted_throughput(schedule: &Schedule) -> Rational {
    let total: usize = schedule.paths.iter().map(|p| p.activations).sum();
    Rational::new(total as u64, schedule.period as u64)
}

pub fn predicted_path_throughput(schedule: &Schedule, path_id: u8) -> Option<Rational> {
    schedule
        .plan(path_id)
        .map(|p| Rational::new(p.activations as u64, schedule.period as u64))
}

/// Adjacent phase pairs `(p, q)` of a path: sender `j` in phase `p` feeds
/// sender `j + 1` in phase `q`.
fn relay_pairs(plan: &PathPlan) -> Vec<(usize, usize)> {
    let t = plan.spacing;
    if t == 1 {
        return Vec::new();
    }
    let mut pairs: Vec<_> = (1..t).map(|p| (p, p + 1)).collect();
    if plan.n_senders > t && t > 2 {
        pairs.push((t, 1));
    }
    pairs
}

/// True iff, for every path and every pair of phases holding adjacent
/// senders, activations of the two phases alternate around the cycle. This
/// is what lets every activation move a block one hop with one-block relay
/// buffers.
pub fn is_pipelined(schedule: &Schedule) -> bool {
    schedule.paths.iter().all(|plan| {
        let word: Vec<usize> = schedule.beats.iter().filter_map(|b| b.phase_of(plan.path_id)).collect();
        relay_pairs(plan).iter().all(|&(p, q)| {
            let sub: Vec<usize> = word.iter().copied().filter(|&x| x == p || x == q).collect();
            sub.iter()
                .zip(sub.iter().cycle().skip(1))
                .all(|(a, b)| a != b)
        })
    })
}

const SEARCH_BUDGET: usize = 1_000_000;

/// Outcome of the search for a pipelined arrangement.
enum Arrangement {
    Found(Vec<(Option<usize>, Option<usize>)>),
    None,
    GaveUp,
}

/// Depth-first search over every arrangement with `support` joint beats:
/// each beat is a compatible (path-1 phase, path-2 phase) pair or a single
/// phase, every phase is used its declared number of times, and every relay
/// hop alternates with its downstream hop. Failed states are memoized.
fn pipelined_arrangement(matrix: &BinaryMatrix, plans: &[PathPlan], support: usize) -> Arrangement {
    let slots: Vec<Vec<(usize, usize)>> = plans.iter().map(relay_pairs).collect();
    let n_slots = slots[0].len() + slots[1].len();
    // touches[path][phase] = (slot, side) pairs updated by activating it.
    let touches: Vec<Vec<Vec<(usize, u8)>>> = (0..2)
        .map(|pi| {
            let base = if pi == 0 { 0 } else { slots[0].len() };
            (0..=plans[pi].spacing)
                .map(|ph| {
                    slots[pi]
                        .iter()
                        .enumerate()
                        .filter_map(|(i, &(p, q))| {
                            if ph == p {
                                Some((base + i, 1))
                            } else if ph == q {
                                Some((base + i, 2))
                            } else {
                                None
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut st = ArrangeSearch {
        matrix,
        touches,
        rem: [
            vec![plans[0].activations as u8; plans[0].spacing + 1],
            vec![plans[1].activations as u8; plans[1].spacing + 1],
        ],
        last: vec![0; n_slots],
        joint_left: support,
        order: Vec::new(),
        failed: HashSet::new(),
        nodes: 0,
    };
    st.rem[0][0] = 0;
    st.rem[1][0] = 0;
    if st.dfs() {
        Arrangement::Found(st.order)
    } else if st.nodes > SEARCH_BUDGET {
        Arrangement::GaveUp
    } else {
        Arrangement::None
    }
}

struct ArrangeSearch<'a> {
    matrix: &'a BinaryMatrix,
    touches: Vec<Vec<Vec<(usize, u8)>>>,
    rem: [Vec<u8>; 2],
    last: Vec<u8>,
    joint_left: usize,
    order: Vec<(Option<usize>, Option<usize>)>,
    failed: HashSet<Vec<u8>>,
    nodes: usize,
}

impl ArrangeSearch<'_> {
    fn key(&self) -> Vec<u8> {
        let mut k = Vec::with_capacity(self.rem[0].len() + self.rem[1].len() + self.last.len() + 1);
        k.extend(&self.rem[0]);
        k.extend(&self.rem[1]);
        k.extend(&self.last);
        k.push(self.joint_left as u8);
        k
    }

    fn allowed(&self, path: usize, phase: usize) -> bool {
        self.rem[path][phase] > 0 && self.touches[path][phase].iter().all(|&(s, side)| self.last[s] != side)
    }

    fn apply(&mut self, path: usize, phase: usize) -> Vec<(usize, u8)> {
        self.rem[path][phase] -= 1;
        let touched = &self.touches[path][phase];
        let saved = touched.iter().map(|&(s, _)| (s, self.last[s])).collect();
        for &(s, side) in touched {
            self.last[s] = side;
        }
        saved
    }

    fn undo(&mut self, path: usize, phase: usize, saved: Vec<(usize, u8)>) {
        self.rem[path][phase] += 1;
        for (s, v) in saved {
            self.last[s] = v;
        }
    }

    fn dfs(&mut self) -> bool {
        let left = [
            self.rem[0].iter().map(|&c| c as usize).sum::<usize>(),
            self.rem[1].iter().map(|&c| c as usize).sum::<usize>(),
        ];
        if left == [0, 0] {
            return self.joint_left == 0;
        }
        if self.joint_left > left[0].min(left[1]) {
            return false;
        }
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return false;
        }
        let key = self.key();
        if self.failed.contains(&key) {
            return false;
        }
        let (t1, t2) = (self.rem[0].len() - 1, self.rem[1].len() - 1);
        let mut moves: Vec<(Option<usize>, Option<usize>)> = Vec::new();
        if self.joint_left > 0 {
            for a in 1..=t1 {
                for b in 1..=t2 {
                    if self.matrix.get(a, b) && self.allowed(0, a) && self.allowed(1, b) {
                        moves.push((Some(a), Some(b)));
                    }
                }
            }
        }
        if left[0] > self.joint_left {
            moves.extend((1..=t1).filter(|&a| self.allowed(0, a)).map(|a| (Some(a), None)));
        }
        if left[1] > self.joint_left {
            moves.extend((1..=t2).filter(|&b| self.allowed(1, b)).map(|b| (None, Some(b))));
        }
        for mv in moves {
            let s1 = mv.0.map(|a| self.apply(0, a));
            let s2 = mv.1.map(|b| self.apply(1, b));
            let joint = mv.0.is_some() && mv.1.is_some();
            if joint {
                self.joint_left -= 1;
            }
            self.order.push(mv);
            if self.dfs() {
                return true;
            }
            self.order.pop();
            if joint {
                self.joint_left += 1;
            }
            if let (Some(b), Some(saved)) = (mv.1, s2) {
                self.undo(1, b, saved);
            }
            if let (Some(a), Some(saved)) = (mv.0, s1) {
                self.undo(0, a, saved);
            }
        }
        self.failed.insert(key);
        false
    }
}

/// A failed schedule condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuditViolation {
    WrongLength { period: usize, beats: usize },
    EmptyBeat { beat: usize },
    Interference { beat: usize, a: NodeRef, b: NodeRef },
    RepeatedPath { beat: usize, path_id: u8 },
    ForeignSubset { beat: usize, path_id: u8 },
    UnevenActivation { path_id: u8, phase: usize, count: usize, expected: usize },
}

/// Checks a schedule against the pair, independent of how it was built:
/// beats are nonempty and interference-free, no path appears twice in a
/// beat, each subset uses its path's declared spacing, and every phase of
/// every path is activated exactly the declared number of times.
pub fn audit(pair: &PathPair, schedule: &Schedule) -> Result<Vec<AuditViolation>> {
    let mut out = Vec::new();
    if schedule.beats.len() != schedule.period {
        out.push(AuditViolation::WrongLength {
            period: schedule.period,
            beats: schedule.beats.len(),
        });
    }
    for plan in &schedule.paths {
        if pair.path(plan.path_id)?.n_senders != plan.n_senders {
            return domain(format!("schedule and pair disagree on the size of path {}", plan.path_id));
        }
    }
    let mut counts: Vec<Vec<usize>> = schedule.paths.iter().map(|p| vec![0; p.spacing + 1]).collect();
    for (k, beat) in schedule.beats.iter().enumerate() {
        let beat_no = k + 1;
        if beat.subsets.is_empty() {
            out.push(AuditViolation::EmptyBeat { beat: beat_no });
        }
        let mut seen = Vec::new();
        for s in &beat.subsets {
            if seen.contains(&s.path_id) {
                out.push(AuditViolation::RepeatedPath {
                    beat: beat_no,
                    path_id: s.path_id,
                });
            }
            seen.push(s.path_id);
            match schedule.paths.iter().position(|p| p.path_id == s.path_id) {
                Some(i) if schedule.paths[i].spacing == s.spacing && (1..=s.spacing).contains(&s.phase) => {
                    counts[i][s.phase] += 1
                }
                _ => out.push(AuditViolation::ForeignSubset {
                    beat: beat_no,
                    path_id: s.path_id,
                }),
            }
        }
        let nodes = schedule.active_nodes(k);
        let mask = pair.mask_of(&nodes)?;
        let adj = pair.adjacency();
        if let Some(i) = bits(mask).find(|&i| adj[i] & mask != 0) {
            let j = bits(adj[i] & mask).next().unwrap();
            out.push(AuditViolation::Interference {
                beat: beat_no,
                a: pair.node_at(i),
                b: pair.node_at(j),
            });
        }
    }
    for (plan, c) in schedule.paths.iter().zip(&counts) {
        for (phase, &count) in c.iter().enumerate().take(plan.spacing + 1).skip(1) {
            if count != plan.activations {
                out.push(AuditViolation::UnevenActivation {
                    path_id: plan.path_id,
                    phase,
                    count,
                    expected: plan.activations,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InterferenceRelation;

    fn window(n: usize, w: usize) -> PathPair {
        PathPair::single(n, InterferenceRelation::window(n, w).unwrap()).unwrap()
    }

    fn far(n1: usize, n2: usize, w: usize) -> PathPair {
        PathPair::from_predicate(n1, Some(n2), |a, b| a.path_id == b.path_id && a.seq.abs_diff(b.seq) < w).unwrap()
    }

    fn seqs(s: &Schedule, k: usize) -> Vec<(u8, usize)> {
        s.active_nodes(k).iter().map(|n| (n.path_id, n.seq)).collect()
    }

    #[test]
    fn primary_window3() {
        let p = window(6, 3);
        let s = schedule_primary(&p, 1).unwrap();
        assert_eq!(s.period, 3);
        assert_eq!(seqs(&s, 0), vec![(1, 1), (1, 4)]);
        assert_eq!(seqs(&s, 1), vec![(1, 2), (1, 5)]);
        assert_eq!(seqs(&s, 2), vec![(1, 3), (1, 6)]);
        assert!(audit(&p, &s).unwrap().is_empty());
        assert_eq!(predicted_throughput(&s), Rational::new(1, 3));
        assert_eq!(s.timeline().lines().nth(1).unwrap(), "  n(1,1) #..");
    }

    #[test]
    fn primary_degenerate() {
        let s = schedule_primary(&window(4, 1), 1).unwrap();
        assert_eq!((s.period, seqs(&s, 0).len()), (1, 4));
        let s = schedule_primary(&window(1, 1), 1).unwrap();
        assert_eq!((s.period, seqs(&s, 0)), (1, vec![(1, 1)]));
    }

    #[test]
    fn pair_far_apart() {
        let p = far(6, 6, 3);
        let s = schedule_pair_equal(&p, 3, 3, 1).unwrap();
        assert_eq!(s.period, 3);
        assert!(s.beats.iter().all(|b| b.category == BeatCategory::Joint));
        assert_eq!(predicted_throughput(&s), Rational::new(2, 3));
        assert!(audit(&p, &s).unwrap().is_empty());
    }

    #[test]
    fn pair_fully_interfering() {
        let p = PathPair::from_predicate(3, Some(2), |_, _| true).unwrap();
        let s = schedule_pair_equal(&p, 3, 2, 1).unwrap();
        assert_eq!(s.period, 5);
        assert!(s.beats.iter().all(|b| b.category != BeatCategory::Joint));
        assert_eq!(predicted_throughput(&s), Rational::new(2, 5));
        let u = schedule_pair_unequal(&PathPair::from_predicate(2, Some(3), |_, _| true).unwrap(), 2, 3, 3, 2).unwrap();
        assert_eq!(u.period, 12);
        assert!(audit(&PathPair::from_predicate(2, Some(3), |_, _| true).unwrap(), &u).unwrap().is_empty());
    }

    #[test]
    fn unequal_all_ones() {
        let p = far(2, 3, 2);
        let s = schedule_pair_unequal(&p, 2, 3, 3, 2).unwrap();
        assert_eq!(s.support_number, 6);
        assert_eq!(s.period, 6);
        assert!(audit(&p, &s).unwrap().is_empty());
        assert!(is_pipelined(&s));
        assert_eq!(predicted_throughput(&s), Rational::new(5, 6));
    }

    #[test]
    fn mixed_matrix_period() {
        // Phase 1 of path 1 and phase 1 of path 2 are the only compatible pair.
        let p = PathPair::from_predicate(2, Some(2), |a, b| a.path_id == b.path_id || !(a.seq == 1 && b.seq == 1)).unwrap();
        let c = build_matrix(&p, 2, 2).unwrap();
        assert_eq!(c.entries.to_grid(), "10\n00\n");
        let s = schedule_pair_equal(&p, 2, 2, 2).unwrap();
        assert_eq!(s.period, 6);
        assert!(audit(&p, &s).unwrap().is_empty());
        assert!(is_pipelined(&s));
    }

    #[test]
    fn audit_catches_faults() {
        let p = window(6, 3);
        let mut s = schedule_primary(&p, 1).unwrap();
        s.beats[1] = s.beats[0].clone();
        let v = audit(&p, &s).unwrap();
        assert!(v.contains(&AuditViolation::UnevenActivation {
            path_id: 1,
            phase: 2,
            count: 0,
            expected: 1
        }));
        s.beats[1].subsets.clear();
        assert!(audit(&p, &s).unwrap().contains(&AuditViolation::EmptyBeat { beat: 2 }));
        let mut bad = schedule_primary_with_spacing(&window(6, 2), 1, 2).unwrap();
        assert!(audit(&window(6, 3), &bad).unwrap().iter().any(|v| matches!(v, AuditViolation::Interference { beat: 1, .. })));
        bad.period = 3;
        assert!(audit(&window(6, 2), &bad).unwrap().contains(&AuditViolation::WrongLength { period: 3, beats: 2 }));
    }

    #[test]
    fn unreachable_spacing_rejected() {
        let p = far(6, 6, 3);
        assert!(schedule_pair_equal(&p, 2, 3, 1).is_err());
        assert!(schedule_primary_with_spacing(&p, 1, 2).is_err());
        assert!(schedule_pair_equal(&window(6, 3), 3, 3, 1).is_err());
    }

    #[test]
    fn reorder_restores_alternation() {
        // Only path-1 phase 2 pairs with path-2 phase 1, so the leftover
        // path-1 beats run phase 1 twice in a row.
        let p = PathPair::from_predicate(4, Some(2), |a, b| {
            if a.path_id == b.path_id {
                a.seq.abs_diff(b.seq) < 2
            } else {
                let (x, y) = if a.path_id == 1 { (a, b) } else { (b, a) };
                !(y.seq == 1 && x.seq % 2 == 0)
            }
        })
        .unwrap();
        let s = schedule_pair_unequal(&p, 2, 2, 2, 1).unwrap();
        assert!(s.reordered);
        assert_eq!(s.period, 5);
        assert!(audit(&p, &s).unwrap().is_empty());
        assert!(is_pipelined(&s));
    }
}
