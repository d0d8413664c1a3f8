//! Counter-based randomness.
//!
//! Every random quantity is a pure function of a seed and an index, so results
//! do not depend on thread count or scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a seed with an ordered list of keys.
pub fn mix(seed: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(seed), |h, &k| splitmix64(h ^ splitmix64(k)))
}

/// Uniform value in `[0, n)` determined by `(seed, keys)`, exact via rejection.
pub fn uniform_below(seed: u64, keys: &[u64], n: u128) -> u128 {
    assert!(n > 0, "uniform_below needs a positive range");
    if n == 1 {
        return 0;
    }
    let base = mix(seed, keys);
    let zone = u128::MAX - (u128::MAX % n);
    let mut counter = 0u64;
    loop {
        let hi = splitmix64(base ^ splitmix64(2 * counter)) as u128;
        let lo = splitmix64(base ^ splitmix64(2 * counter + 1)) as u128;
        let r = (hi << 64) | lo;
        if r < zone {
            return r % n;
        }
        counter += 1;
    }
}

/// The independent generator attached to sample `index` of a run seeded by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Evaluates `f` on samples `0..n`, each with its own stream, in parallel.
/// The output order is the sample order.
pub fn par_samples<T, F>(n: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            f(i, &mut rng)
        })
        .collect()
}

/// Sample mean and standard error of the mean, summed in index order.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
