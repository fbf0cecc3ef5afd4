//! Longest-common-subsequence primitives shared by the edit-distance stage
//! and the crawler's DOM structure diff.

/// Length of the longest common subsequence of two slices.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    // Rolling one-row DP; inputs are length-capped by callers.
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for item_a in a {
        for (j, item_b) in b.iter().enumerate() {
            cur[j + 1] = if item_a == item_b {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Insertion and deletion counts for transforming `a` into `b`:
/// `d_d = len(a) - |LCS|` characters deleted, `d_i = len(b) - |LCS|`
/// characters inserted. Counts are in characters, not bytes.
pub fn lcs_counts(a: &str, b: &str) -> (usize, usize) {
    let ca: Vec<char> = a.chars().collect();
    let cb: Vec<char> = b.chars().collect();
    let common = lcs_len(&ca, &cb);
    (cb.len() - common, ca.len() - common)
}

/// Normalized structure difference between two sequences:
/// `1 - |LCS| / max(len)`. Zero for equal sequences, one for disjoint.
pub fn structure_diff<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    1.0 - (lcs_len(a, b) as f64 / longest as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive oracle: the longest subsequence of `a` that is also a
    /// subsequence of `b`, found by enumerating subsequences of `a`.
    pub(crate) fn oracle_lcs_len(a: &[u8], b: &[u8]) -> usize {
        let mut best = 0usize;
        for mask in 0u32..(1u32 << a.len()) {
            let candidate: Vec<u8> = (0..a.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| a[i])
                .collect();
            if candidate.len() > best && is_subsequence(&candidate, b) {
                best = candidate.len();
            }
        }
        best
    }

    fn is_subsequence(needle: &[u8], hay: &[u8]) -> bool {
        let mut it = hay.iter();
        needle.iter().all(|n| it.any(|h| h == n))
    }

    #[test]
    fn paper_worked_example_counts() {
        // Source "#payload" to sink "yloa123": LCS is "yloa".
        assert_eq!(lcs_counts("#payload", "yloa123"), (3, 4));
    }

    #[test]
    fn disjoint_strings() {
        // LCS is empty, so everything is deleted and inserted.
        assert_eq!(lcs_counts("#payload", "23"), (2, 8));
    }

    #[test]
    fn identity() {
        assert_eq!(lcs_counts("same", "same"), (0, 0));
    }

    #[test]
    fn empty_sides() {
        assert_eq!(lcs_counts("", "abc"), (3, 0));
        assert_eq!(lcs_counts("abc", ""), (0, 3));
    }

    #[test]
    fn char_counts_not_bytes() {
        assert_eq!(lcs_counts("é", "éa"), (1, 0));
    }

    #[test]
    fn matches_oracle_on_short_binary_strings() {
        // Quick spot check; the acceptance suite runs the full 3-letter
        // alphabet sweep.
        let strings = all_strings(b"ab", 5);
        for a in &strings {
            for b in &strings {
                let expect = oracle_lcs_len(a, b);
                let ca: Vec<char> = a.iter().map(|&c| c as char).collect();
                let cb: Vec<char> = b.iter().map(|&c| c as char).collect();
                assert_eq!(lcs_len(&ca, &cb), expect);
            }
        }
    }

    fn all_strings(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &frontier {
                for &c in alphabet {
                    let mut t = s.clone();
                    t.push(c);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn structure_diff_bounds() {
        let a = ["div", "p", "span"];
        let b = ["div", "p", "span"];
        assert_eq!(structure_diff(&a, &b), 0.0);
        let c = ["ul", "li", "li"];
        assert!(structure_diff(&a, &c) > 0.5);
    }
}
