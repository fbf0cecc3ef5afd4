use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ALPHANUMERIC: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

/// Characters that keep a mutated value a syntactically valid URL input.
fn is_preserved(c: char) -> bool {
    matches!(c, '#' | '?' | '&' | '=' | '/')
}

/// Produce the mutant source value for the sink-check stage.
///
/// Only alphanumeric characters change, each to a different alphanumeric, so
/// length and URL syntax are preserved. `ceil(fraction * len)` positions are
/// rewritten (at least one), spread evenly across the eligible characters so
/// that any contiguous span the program might extract contains a change; the
/// replacement characters are drawn from a stream seeded by `(value, seed)`.
pub fn mutate_value(value: &str, fraction: f64, seed: u64) -> String {
    let chars: Vec<char> = value.chars().collect();
    let eligible: Vec<usize> = chars
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_ascii_alphanumeric() && !is_preserved(**c))
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return value.to_string();
    }

    let want = ((fraction * chars.len() as f64).ceil() as usize).max(1);
    let count = want.min(eligible.len());
    let mut positions = Vec::with_capacity(count);
    for i in 0..count {
        let idx = ((i as f64 + 0.5) * eligible.len() as f64 / count as f64) as usize;
        positions.push(eligible[idx.min(eligible.len() - 1)]);
    }
    positions.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fingerprint(value));
    let mut out = chars;
    for pos in positions {
        let old = out[pos];
        loop {
            let replacement = ALPHANUMERIC[rng.gen_range(0..ALPHANUMERIC.len())] as char;
            if replacement != old {
                out[pos] = replacement;
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// Stable 64-bit FNV-1a over the value, mixed into the RNG seed so distinct
/// source values mutate independently under one configured seed.
fn fingerprint(s: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in s.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x1000_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_length_preserving() {
        let a = mutate_value("#payload", 0.25, 1);
        let b = mutate_value("#payload", 0.25, 1);
        assert_eq!(a, b);
        assert_eq!(a.chars().count(), 8);
        assert_ne!(a, "#payload");
    }

    #[test]
    fn url_syntax_chars_survive() {
        let m = mutate_value("?theme=payload1", 0.25, 7);
        assert_eq!(m.chars().next(), Some('?'));
        assert!(m.contains('='));
        assert_eq!(m.chars().count(), 15);
    }

    #[test]
    fn different_seeds_may_differ_but_stay_valid() {
        let m1 = mutate_value("#payload", 0.25, 1);
        let m2 = mutate_value("#payload", 0.25, 2);
        assert_eq!(m1.chars().next(), Some('#'));
        assert_eq!(m2.chars().next(), Some('#'));
    }

    #[test]
    fn mutation_touches_interior_spans() {
        // The extracted middle of the value must change for every seed, so
        // the sink check observes a difference for genuine flows.
        for seed in 0..50 {
            let m = mutate_value("#payload", 0.25, seed);
            assert_ne!(&m[3..7], "yloa", "seed {seed} left the middle intact");
        }
    }

    #[test]
    fn all_preserved_input_is_unchanged() {
        assert_eq!(mutate_value("#?&=/", 0.5, 3), "#?&=/");
    }
}
