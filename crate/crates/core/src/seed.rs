//! Seed derivation. Seeds depend on a task's position (child index, attempt
//! index), never on scheduling order, so every strategy sees the same seeds.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child of `parent`.
pub fn split_seed(parent: u64, index: usize) -> u64 {
    mix64(parent ^ GOLDEN.wrapping_mul(index as u64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_get_distinct_seeds() {
        let mut seen: Vec<u64> = (0..1000).map(|i| split_seed(42, i)).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 1000);
        assert_ne!(split_seed(1, 0), split_seed(2, 0));
        assert_eq!(split_seed(7, 3), split_seed(7, 3));
    }
}
