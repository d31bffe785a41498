//! Seeded random timed words.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Rational;
use crate::word::{Event, TimedWord};

/// Gaps are drawn uniformly from `{min, min + 1, …, max}` in units of `1/resolution`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSpec {
    pub alphabet: Vec<String>,
    pub length: usize,
    pub min_gap: u64,
    pub max_gap: u64,
    pub resolution: u64,
    pub seed: u64,
}

impl WordSpec {
    pub fn new(alphabet: Vec<String>, length: usize, seed: u64) -> Self {
        WordSpec { alphabet, length, min_gap: 1, max_gap: 20, resolution: 10, seed }
    }
}

pub fn generate_word(spec: &WordSpec) -> TimedWord {
    assert!(!spec.alphabet.is_empty() || spec.length == 0, "empty alphabet");
    assert!(spec.min_gap >= 1 && spec.min_gap <= spec.max_gap && spec.resolution >= 1, "invalid gap range");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut ticks: u64 = 0;
    let events = (0..spec.length)
        .map(|_| {
            ticks += rng.gen_range(spec.min_gap..=spec.max_gap);
            let action = spec.alphabet[rng.gen_range(0..spec.alphabet.len())].clone();
            Event::new(action, Rational::new(BigInt::from(ticks), BigInt::from(spec.resolution)))
        })
        .collect();
    TimedWord::new(events).expect("generated timestamps increase")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gears() -> Vec<String> {
        ["g1", "g2", "g3", "g4"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = WordSpec::new(gears(), 100, 7);
        let a = generate_word(&spec);
        assert_eq!(a.len(), 100);
        assert_eq!(a, generate_word(&spec));
        assert_ne!(a, generate_word(&WordSpec { seed: 8, ..spec }));
    }

    #[test]
    fn empty_length() {
        assert!(generate_word(&WordSpec::new(gears(), 0, 1)).is_empty());
        assert!(generate_word(&WordSpec::new(Vec::new(), 0, 1)).is_empty());
    }
}
