//! Deterministic batched shot sampling.
//!
//! Shots are split into fixed-size batches; batch `b` draws from
//! `RngStream::new(seed, base_stream + b)` and results merge by count
//! addition in batch order. The merged result depends only on
//! `(seed, base_stream, shots)`, never on worker count or scheduling, so
//! parallel runs reproduce sequential ones bit for bit.

use rayon::prelude::*;

use crate::rng::RngStream;

/// Shots per batch. Small enough that realistic shot counts split into
/// several batches and actually exercise the parallel path.
pub const BATCH_SIZE: u64 = 16_384;

/// Count how many of `shots` Bernoulli draws with success probability
/// `p_one` come out 1. Returns (count_zero, count_one).
pub fn bernoulli_counts(p_one: f64, shots: u64, seed: u64, base_stream: u64) -> (u64, u64) {
    let ones: u64 = batches(shots)
        .into_par_iter()
        .map(|(batch, len)| {
            let mut rng = RngStream::new(seed, base_stream + batch);
            (0..len).filter(|_| rng.next_f64() < p_one).count() as u64
        })
        .sum();
    (shots - ones, ones)
}

/// Categorical counts over `weights` (need not be normalized upward of
/// rounding; they are treated as a cumulative partition of [0,1)).
pub fn categorical_counts(weights: &[f64], shots: u64, seed: u64, base_stream: u64) -> Vec<u64> {
    let k = weights.len();
    let cumulative: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w.max(0.0);
            Some(*acc)
        })
        .collect();
    let per_batch: Vec<Vec<u64>> = batches(shots)
        .into_par_iter()
        .map(|(batch, len)| {
            let mut rng = RngStream::new(seed, base_stream + batch);
            let mut counts = vec![0u64; k];
            for _ in 0..len {
                let u = rng.next_f64();
                let idx = cumulative.iter().position(|&c| u < c).unwrap_or(k - 1);
                counts[idx] += 1;
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; k];
    for counts in per_batch {
        for (t, c) in total.iter_mut().zip(counts) {
            *t += c;
        }
    }
    total
}

/// Number of streams a run with this many shots consumes, so callers can
/// lay out non-overlapping base streams.
pub fn stream_span(shots: u64) -> u64 {
    shots.div_ceil(BATCH_SIZE).max(1)
}

fn batches(shots: u64) -> Vec<(u64, u64)> {
    if shots == 0 {
        return Vec::new();
    }
    let full = shots / BATCH_SIZE;
    let rem = shots % BATCH_SIZE;
    let mut out: Vec<(u64, u64)> = (0..full).map(|b| (b, BATCH_SIZE)).collect();
    if rem > 0 {
        out.push((full, rem));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_sum_to_shots() {
        let (zeros, ones) = bernoulli_counts(0.5, 100_000, 1, 0);
        assert_eq!(zeros + ones, 100_000);
        let counts = categorical_counts(&[0.25, 0.25, 0.25, 0.25], 99_999, 1, 0);
        assert_eq!(counts.iter().sum::<u64>(), 99_999);
    }

    #[test]
    fn repeat_runs_are_identical() {
        let a = bernoulli_counts(0.3, 50_000, 9, 4);
        let b = bernoulli_counts(0.3, 50_000, 9, 4);
        assert_eq!(a, b);
        let c = categorical_counts(&[0.1, 0.2, 0.3, 0.4], 50_000, 9, 4);
        let d = categorical_counts(&[0.1, 0.2, 0.3, 0.4], 50_000, 9, 4);
        assert_eq!(c, d);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let baseline = bernoulli_counts(0.5, 200_000, 7, 0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let single = pool.install(|| bernoulli_counts(0.5, 200_000, 7, 0));
        assert_eq!(baseline, single);
    }

    #[test]
    fn degenerate_probabilities_are_exact() {
        let (zeros, ones) = bernoulli_counts(0.0, 10_000, 3, 0);
        assert_eq!((zeros, ones), (10_000, 0));
        let (zeros, ones) = bernoulli_counts(1.0, 10_000, 3, 0);
        assert_eq!((zeros, ones), (0, 10_000));
    }

    #[test]
    fn empirical_frequency_tracks_probability() {
        let n = 100_000u64;
        let p = 0.36;
        let (_, ones) = bernoulli_counts(p, n, 21, 0);
        let freq = ones as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((freq - p).abs() < 4.0 * sigma, "freq = {freq}");
    }
}
