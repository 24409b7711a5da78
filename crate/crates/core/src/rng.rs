//! Seeded randomness shared by every stochastic operation.
//!
//! All sampling goes through [`ChaCha8Rng`], whose output stream is fixed
//! across platforms, so a seed fully determines a run.

use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for a named sub-stream (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Splits `0..len` into two sorted index sets; the first holds
/// `floor(fraction * len)` indices chosen by a seeded uniform shuffle.
pub fn split_indices(len: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let take = libm::floor(fraction * len as f64) as usize;
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut first = order[..take].to_vec();
    let mut second = order[take..].to_vec();
    first.sort_unstable();
    second.sort_unstable();
    (first, second)
}

/// Picks `amount` of `items` uniformly without replacement, preserving their
/// original order. Returns all items when `amount >= items.len()`.
pub fn sample_without_replacement<R: rand::Rng + ?Sized>(rng: &mut R, items: &[usize], amount: usize) -> Vec<usize> {
    if amount >= items.len() {
        return items.to_vec();
    }
    let mut picked: Vec<usize> = index::sample(rng, items.len(), amount).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| items[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_a_partition() {
        let (a, b) = split_indices(11, 0.5, 3);
        assert_eq!(a.len(), 5);
        assert_eq!(b.len(), 6);
        let mut all: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..11).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_deterministic() {
        assert_eq!(split_indices(100, 0.3, 9), split_indices(100, 0.3, 9));
        assert_ne!(split_indices(100, 0.3, 9), split_indices(100, 0.3, 10));
    }

    #[test]
    fn sampling_keeps_order_and_size() {
        let items: Vec<usize> = (0..50).map(|i| i * 2).collect();
        let picked = sample_without_replacement(&mut rng_from_seed(1), &items, 10);
        assert_eq!(picked.len(), 10);
        assert!(picked.windows(2).all(|w| w[0] < w[1]));
        assert!(picked.iter().all(|v| v % 2 == 0));
        assert_eq!(sample_without_replacement(&mut rng_from_seed(1), &items, 80), items);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(7, 1), derive_seed(7, 2));
        assert_eq!(derive_seed(7, 1), derive_seed(7, 1));
    }
}
