use netwave::verify::geometric_pairs;
use netwave::{
    default_warmup, interference_intensity, intrinsic_period, measure_delay, run, run_activations, run_traced,
    schedule_pair_equal, schedule_pair_unequal, schedule_primary, space_time_diagram, InterferenceRelation, NodeRef,
    PathPair, Rational,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn chain(n: usize, width: usize) -> PathPair {
    PathPair::single(n, InterferenceRelation::window(n, width).unwrap()).unwrap()
}

#[test]
fn window_chain_delivers_one_block_per_three_beats() {
    let pair = chain(6, 3);
    let s = schedule_primary(&pair, 1).unwrap();
    let rep = run(&pair, &s, 10, 2).unwrap();
    assert_eq!((rep.delivered, rep.window_beats), (10, 30));
    assert_eq!(rep.throughput, Rational::new(1, 3));
    assert_eq!(rep.interference_violations, 0);
    assert!(rep.is_clean());
}

#[test]
fn interference_free_path_fills_every_beat() {
    let pair = PathPair::single(4, InterferenceRelation::empty(4).unwrap()).unwrap();
    let s = schedule_primary(&pair, 1).unwrap();
    assert_eq!(run(&pair, &s, 8, 4).unwrap().throughput, Rational::from_integer(1));
    let delays: Vec<u64> = measure_delay(&pair, &s, 6).unwrap().iter().map(|d| d.delay()).collect();
    assert_eq!(delays, [4; 6]);
}

#[test]
fn first_block_delay_equals_hop_count() {
    let pair = chain(6, 3);
    let s = schedule_primary(&pair, 1).unwrap();
    assert_eq!(measure_delay(&pair, &s, 1).unwrap()[0].delay(), 6);
    let one = chain(1, 3);
    assert_eq!(measure_delay(&one, &schedule_primary(&one, 1).unwrap(), 1).unwrap()[0].delay(), 1);
    assert!(measure_delay(&pair, &s, 0).is_err());
}

#[test]
fn serial_pair_shares_the_channel() {
    let pair = PathPair::pair(3, 2, InterferenceRelation::from_fn(5, |_, _| true).unwrap()).unwrap();
    let s = schedule_pair_equal(&pair, 3, 2, 1).unwrap();
    let rep = run(&pair, &s, 6, default_warmup(&s)).unwrap();
    assert_eq!(rep.throughput, Rational::new(2, 5));
    assert_eq!(rep.paths[0].throughput + rep.paths[1].throughput, rep.throughput);
}

#[test]
fn corpus_pairs_measure_what_they_predict() {
    for inst in geometric_pairs(31, 60) {
        let pair = &inst.pair;
        let (t1, t2) = (intrinsic_period(pair, 1).unwrap(), intrinsic_period(pair, 2).unwrap());
        let mut schedules = vec![schedule_pair_equal(pair, t1, t2, 2).unwrap()];
        schedules.push(schedule_pair_unequal(pair, t1, t2, 1, 2).unwrap());
        for s in schedules.into_iter().filter(|s| s.pipelined) {
            let rep = run(pair, &s, 5, default_warmup(&s)).unwrap();
            assert!(rep.is_clean());
            assert_eq!(Some(rep.throughput), rep.predicted);
            let sum: Rational = rep.paths.iter().map(|p| p.throughput).sum();
            assert_eq!(sum, rep.throughput);
        }
    }
}

#[test]
fn unpipelinable_arrangement_measures_below_prediction() {
    // Two 2-hop-spaced and 3-hop-spaced paths whose tiled matrix pairs
    // every phase; no beat order keeps every relay hop alternating.
    let m = netwave::BinaryMatrix::from_rows(&[vec![1, 1, 0], vec![1, 0, 1]]).unwrap();
    let pair = PathPair::from_predicate(4, Some(6), |a, b| {
        if a.path_id == b.path_id {
            return a.seq.abs_diff(b.seq) < if a.path_id == 1 { 2 } else { 3 };
        }
        let (x, y) = if a.path_id == 1 { (a, b) } else { (b, a) };
        !m.get((x.seq - 1) % 2 + 1, (y.seq - 1) % 3 + 1)
    })
    .unwrap();
    let s = schedule_pair_unequal(&pair, 2, 3, 3, 2).unwrap();
    assert_eq!(s.support_number, 6);
    assert!(!s.pipelined);
    let rep = run(&pair, &s, 6, default_warmup(&s)).unwrap();
    assert_eq!(rep.interference_violations, 0);
    assert_eq!(rep.predicted, Some(Rational::new(5, 6)));
    assert!(rep.throughput < Rational::new(5, 6));
}

#[test]
fn trace_and_diagram() {
    let pair = chain(4, 2);
    let s = schedule_primary(&pair, 1).unwrap();
    let (_, trace) = run_traced(&pair, &s, 2, 1, true).unwrap();
    assert_eq!(trace.len(), 3 * s.period);
    assert!(trace.iter().all(|t| !t.violation));
    let diagram = space_time_diagram(&pair, &trace);
    assert_eq!(diagram.lines().count(), trace.len());
    assert!(diagram.lines().all(|l| l.len() == 7 + pair.total_senders()));
}

#[test]
fn interfering_beats_are_counted() {
    let pair = chain(3, 2);
    let cycle = vec![vec![NodeRef::new(1, 1), NodeRef::new(1, 2)], vec![NodeRef::new(1, 3)]];
    let rep = run_activations(&pair, &cycle, 3, 0).unwrap();
    assert_eq!(rep.interference_violations, 3);
    assert!(!rep.is_clean());
}

/// A random cycle of interference-free beats over one path.
fn adversarial_cycle(pair: &PathPair, r: &mut ChaCha8Rng) -> Vec<Vec<NodeRef>> {
    let len = r.gen_range(1..=8);
    (0..len)
        .map(|_| {
            let mut beat: Vec<NodeRef> = Vec::new();
            for n in pair.all_nodes() {
                if r.gen_bool(0.5) && beat.iter().all(|&m| pair.concurrent(m, n).unwrap()) {
                    beat.push(n);
                }
            }
            if beat.is_empty() {
                beat.push(NodeRef::new(1, r.gen_range(1..=pair.path1().n_senders)));
            }
            beat
        })
        .collect()
}

proptest! {
    #[test]
    fn no_cycle_beats_the_clique_bound(n in 1usize..=10, width in 1usize..=5, seed in any::<u64>()) {
        let pair = chain(n, width);
        let i = interference_intensity(&pair, &pair.all_nodes()).unwrap().0 as u64;
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let cycle = adversarial_cycle(&pair, &mut r);
        let periods = 60;
        let rep = run_activations(&pair, &cycle, periods, 2).unwrap();
        prop_assert_eq!(rep.interference_violations, 0);
        prop_assert!(rep.conservation_ok && rep.fifo_ok);
        // Every block crosses each clique member in a beat of its own; at
        // most one block per relay was already past them at window start.
        prop_assert!(rep.delivered * i <= rep.window_beats + i * n as u64);
    }

    #[test]
    fn blocks_are_conserved_on_pairs(seed in 0u64..400, l1 in 1usize..=3, l2 in 1usize..=3) {
        let inst = geometric_pairs(seed, 1).remove(0);
        let pair = &inst.pair;
        let (t1, t2) = (intrinsic_period(pair, 1).unwrap(), intrinsic_period(pair, 2).unwrap());
        let s = schedule_pair_unequal(pair, t1, t2, l1, l2).unwrap();
        let rep = run(pair, &s, 4, 0).unwrap();
        prop_assert!(rep.conservation_ok && rep.fifo_ok);
        prop_assert_eq!(rep.interference_violations, 0);
        prop_assert_eq!(rep.injected, rep.in_flight + rep.delivered);
    }
}
