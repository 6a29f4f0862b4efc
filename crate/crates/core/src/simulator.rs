//! Beat-by-beat execution of a schedule with saturated sources.
//!
//! Every relay sender holds at most one block. In each beat, an activated
//! source always injects a fresh block and an activated relay forwards the
//! block it holds, provided the next hop can take it: the next hop is the
//! destination, its buffer is empty, or it forwards its own block in the same
//! beat. A sender that cannot forward keeps its block (a stall). All
//! decisions are made on the state at the start of the beat.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{bit, Mask};
use crate::model::{NodeRef, PathPair};
use crate::rational::Rational;
use crate::scheduler::{predicted_path_throughput, predicted_throughput, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: u64,
    /// Beat (1-based) in which the source sent it.
    pub injected: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delivery {
    pub path_id: u8,
    pub block: u64,
    pub injected: u64,
    pub arrived: u64,
}

impl Delivery {
    /// Beats from injection to arrival, counting both ends.
    pub fn delay(&self) -> u64 {
        self.arrived - self.injected + 1
    }
}

/// One block moving one hop. `to == n_senders + 1` is the destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub path_id: u8,
    pub block: u64,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeatTrace {
    pub beat: u64,
    pub active: Vec<NodeRef>,
    pub moves: Vec<Move>,
    pub violation: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub path_id: u8,
    pub delivered: u64,
    pub throughput: Rational,
    pub predicted: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub period: usize,
    pub warmup_periods: usize,
    pub measured_periods: usize,
    /// First measured beat (1-based) and number of measured beats.
    pub window_start: u64,
    pub window_beats: u64,
    pub paths: Vec<PathStats>,
    pub delivered: u64,
    pub throughput: Rational,
    pub predicted: Option<Rational>,
    pub interference_violations: u64,
    pub stalls: u64,
    pub injected: u64,
    pub in_flight: u64,
    /// Delays of blocks delivered inside the window, in arrival order.
    pub delays: Vec<u64>,
    pub conservation_ok: bool,
    pub fifo_ok: bool,
}

impl SimReport {
    /// No interference, conserved blocks and in-order delivery.
    pub fn is_clean(&self) -> bool {
        self.interference_violations == 0 && self.conservation_ok && self.fifo_ok
    }
}

struct Lane {
    path_id: u8,
    offset: usize,
    n: usize,
    /// `buf[j]` is sender `j`'s buffer; index 0 and the source are unused.
    buf: Vec<Option<Block>>,
    next_id: u64,
    last_delivered: Option<u64>,
}

struct Engine<'a> {
    pair: &'a PathPair,
    lanes: Vec<Lane>,
    beat: u64,
    violations: u64,
    stalls: u64,
    injected: u64,
    delivered: Vec<Delivery>,
    conservation_ok: bool,
    fifo_ok: bool,
}

impl<'a> Engine<'a> {
    fn new(pair: &'a PathPair) -> Self {
        let lanes = pair
            .paths()
            .map(|p| Lane {
                path_id: p.id,
                offset: if p.id == 1 { 0 } else { pair.path1().n_senders },
                n: p.n_senders,
                buf: vec![None; p.n_senders + 1],
                next_id: 0,
                last_delivered: None,
            })
            .collect();
        Engine {
            pair,
            lanes,
            beat: 0,
            violations: 0,
            stalls: 0,
            injected: 0,
            delivered: Vec::new(),
            conservation_ok: true,
            fifo_ok: true,
        }
    }

    fn in_flight(&self) -> u64 {
        self.lanes
            .iter()
            .map(|l| l.buf.iter().filter(|b| b.is_some()).count() as u64)
            .sum()
    }

    fn step(&mut self, active: Mask, trace: Option<&mut Vec<BeatTrace>>) {
        self.beat += 1;
        let t = self.beat;
        let violation = !self.pair.mask_is_concurrent(active);
        if violation {
            self.violations += 1;
        }
        let mut moves = Vec::new();
        for lane in &mut self.lanes {
            let on = |j: usize| active & bit(lane.offset + j - 1) != 0;
            let mut sends = vec![false; lane.n + 2];
            for j in (1..=lane.n).rev() {
                if !on(j) || (j > 1 && lane.buf[j].is_none()) {
                    continue;
                }
                if j == lane.n || lane.buf[j + 1].is_none() || sends[j + 1] {
                    sends[j] = true;
                } else {
                    self.stalls += 1;
                }
            }
            for j in (1..=lane.n).rev().filter(|&j| sends[j]) {
                let block = if j == 1 {
                    lane.next_id += 1;
                    self.injected += 1;
                    Block {
                        id: lane.next_id,
                        injected: t,
                    }
                } else {
                    lane.buf[j].take().expect("sender holds a block")
                };
                moves.push(Move {
                    path_id: lane.path_id,
                    block: block.id,
                    from: j,
                    to: j + 1,
                });
                if j == lane.n {
                    if lane.last_delivered.is_some_and(|prev| block.id <= prev) {
                        self.fifo_ok = false;
                    }
                    lane.last_delivered = Some(block.id);
                    self.delivered.push(Delivery {
                        path_id: lane.path_id,
                        block: block.id,
                        injected: block.injected,
                        arrived: t,
                    });
                } else {
                    lane.buf[j + 1] = Some(block);
                }
            }
        }
        if self.injected != self.delivered.len() as u64 + self.in_flight() {
            self.conservation_ok = false;
        }
        if let Some(trace) = trace {
            trace.push(BeatTrace {
                beat: t,
                active: self.pair.nodes_of(active),
                moves,
                violation,
            });
        }
    }
}

fn schedule_masks(pair: &PathPair, schedule: &Schedule) -> Result<Vec<Mask>> {
    if schedule.period == 0 || schedule.beats.len() != schedule.period {
        return domain("schedule period does not match its beat list");
    }
    for plan in &schedule.paths {
        let n = pair.path(plan.path_id)?.n_senders;
        if n != plan.n_senders || plan.spacing > n {
            return domain(format!("schedule does not fit path {}", plan.path_id));
        }
    }
    Ok(schedule.beat_masks(pair))
}

/// Default warmup: enough whole periods for the first block to cross the
/// longest path, plus one.
pub fn default_warmup(schedule: &Schedule) -> usize {
    match schedule.paths.as_slice() {
        [only] => only.n_senders.div_ceil(schedule.period) + 1,
        plans => plans.iter().map(|p| p.n_senders).max().unwrap_or(0) + 1,
    }
}

/// Runs `warmup_periods` unmeasured periods, then `n_periods` measured ones.
pub fn run(pair: &PathPair, schedule: &Schedule, n_periods: usize, warmup_periods: usize) -> Result<SimReport> {
    Ok(run_traced(pair, schedule, n_periods, warmup_periods, false)?.0)
}

pub fn run_traced(
    pair: &PathPair,
    schedule: &Schedule,
    n_periods: usize,
    warmup_periods: usize,
    keep_trace: bool,
) -> Result<(SimReport, Vec<BeatTrace>)> {
    let masks = schedule_masks(pair, schedule)?;
    let mut report = execute(pair, &masks, n_periods, warmup_periods, keep_trace)?;
    report.0.predicted = Some(predicted_throughput(schedule));
    for p in &mut report.0.paths {
        p.predicted = predicted_path_throughput(schedule, p.path_id);
    }
    Ok(report)
}

/// Runs an arbitrary cyclic activation sequence (each entry is the set of
/// senders active in that beat).
pub fn run_activations(
    pair: &PathPair,
    cycle: &[Vec<NodeRef>],
    n_periods: usize,
    warmup_periods: usize,
) -> Result<SimReport> {
    if cycle.is_empty() {
        return domain("activation cycle must contain at least one beat");
    }
    let masks = cycle.iter().map(|b| pair.mask_of(b)).collect::<Result<Vec<_>>>()?;
    Ok(execute(pair, &masks, n_periods, warmup_periods, false)?.0)
}

fn execute(
    pair: &PathPair,
    masks: &[Mask],
    n_periods: usize,
    warmup_periods: usize,
    keep_trace: bool,
) -> Result<(SimReport, Vec<BeatTrace>)> {
    if n_periods == 0 {
        return domain("at least one measured period is required");
    }
    let period = masks.len();
    let mut engine = Engine::new(pair);
    let mut trace = Vec::new();
    for _ in 0..warmup_periods + n_periods {
        for &m in masks {
            engine.step(m, keep_trace.then_some(&mut trace));
        }
    }
    let window_start = (warmup_periods * period) as u64 + 1;
    let window_beats = (n_periods * period) as u64;
    let in_window: Vec<&Delivery> = engine.delivered.iter().filter(|d| d.arrived >= window_start).collect();
    let paths: Vec<PathStats> = pair
        .paths()
        .map(|p| {
            let delivered = in_window.iter().filter(|d| d.path_id == p.id).count() as u64;
            PathStats {
                path_id: p.id,
                delivered,
                throughput: Rational::new(delivered, window_beats),
                predicted: None,
            }
        })
        .collect();
    let delivered = in_window.len() as u64;
    let report = SimReport {
        period,
        warmup_periods,
        measured_periods: n_periods,
        window_start,
        window_beats,
        paths,
        delivered,
        throughput: Rational::new(delivered, window_beats),
        predicted: None,
        interference_violations: engine.violations,
        stalls: engine.stalls,
        injected: engine.injected,
        in_flight: engine.in_flight(),
        delays: in_window.iter().map(|d| d.delay()).collect(),
        conservation_ok: engine.conservation_ok,
        fifo_ok: engine.fifo_ok,
    };
    Ok((report, trace))
}

/// Delivery records of the first `block_count` blocks of every scheduled
/// path, ordered by path then block.
pub fn measure_delay(pair: &PathPair, schedule: &Schedule, block_count: usize) -> Result<Vec<Delivery>> {
    if block_count == 0 {
        return domain("block_count must be at least 1");
    }
    let masks = schedule_masks(pair, schedule)?;
    let longest = schedule.paths.iter().map(|p| p.n_senders).max().unwrap_or(1);
    let limit = ((block_count + longest + 1) * schedule.period * 4) as u64;
    let mut engine = Engine::new(pair);
    let enough = |e: &Engine| {
        schedule
            .paths
            .iter()
            .all(|p| e.delivered.iter().filter(|d| d.path_id == p.path_id).count() >= block_count)
    };
    let mut k = 0;
    while !enough(&engine) {
        if engine.beat >= limit {
            return Err(Error::Internal(format!(
                "fewer than {block_count} blocks delivered within {limit} beats"
            )));
        }
        engine.step(masks[k % masks.len()], None);
        k += 1;
    }
    let mut out: Vec<Delivery> = schedule
        .paths
        .iter()
        .flat_map(|p| {
            engine
                .delivered
                .iter()
                .filter(move |d| d.path_id == p.path_id)
                .take(block_count)
                .copied()
        })
        .collect();
    out.sort_by_key(|d| (d.path_id, d.block));
    Ok(out)
}

/// Space-time diagram: one row per beat, one column per sender (paths
/// separated by `|`). A cell shows the last digit of the block the sender
/// transmitted in that beat, `:` for an active sender that did not transmit,
/// and `.` otherwise. Interference-violating beats are marked with `!`.
pub fn space_time_diagram(pair: &PathPair, trace: &[BeatTrace]) -> String {
    let mut out = String::new();
    for bt in trace {
        let _ = write!(out, "{:>6} ", bt.beat);
        for (pi, p) in pair.paths().enumerate() {
            if pi > 0 {
                out.push('|');
            }
            for seq in 1..=p.n_senders {
                let node = NodeRef::new(p.id, seq);
                let cell = match bt.moves.iter().find(|m| m.path_id == p.id && m.from == seq) {
                    Some(m) => char::from_digit((m.block % 10) as u32, 10).unwrap(),
                    None if bt.active.contains(&node) => ':',
                    None => '.',
                };
                out.push(cell);
            }
        }
        if bt.violation {
            out.push_str(" !");
        }
        out.push('\n');
    }
    out
}
