//! Shared fixtures for the criterion benches.

use netwave::verify::geometric_pairs;
use netwave::{intrinsic_period, BinaryMatrix, InterferenceRelation, PathPair};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A chain of `n` senders where each interferes with the next `width - 1`.
pub fn chain(n: usize, width: usize) -> PathPair {
    PathPair::single(n, InterferenceRelation::window(n, width).expect("valid window")).expect("valid chain")
}

/// The largest pair (by sender count) among the first 50 seeded geometric
/// pairs, with its intrinsic spacings.
pub fn busy_pair() -> (PathPair, usize, usize) {
    let pair = geometric_pairs(7, 50)
        .into_iter()
        .map(|i| i.pair)
        .max_by_key(|p| p.total_senders())
        .expect("nonempty corpus");
    let t1 = intrinsic_period(&pair, 1).expect("path 1 exists");
    let t2 = intrinsic_period(&pair, 2).expect("path 2 exists");
    (pair, t1, t2)
}

pub fn random_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> BinaryMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BinaryMatrix::random(rows, cols, density, &mut rng).expect("nonempty shape")
}
