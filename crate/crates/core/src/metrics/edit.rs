//! Levenshtein distance.

/// Edit distance between two sequences: fewest single-element insertions,
/// deletions and substitutions turning `a` into `b`.
pub fn levenshtein_slices<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.len() < b.len() {
        return levenshtein_slices(b, a);
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let subst = diag + usize::from(ca != cb);
            diag = row[j + 1];
            row[j + 1] = subst.min(row[j] + 1).min(diag + 1);
        }
    }
    row[b.len()]
}

/// Edit distance over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    if a.is_ascii() && b.is_ascii() {
        return levenshtein_slices(a.as_bytes(), b.as_bytes());
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_slices(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain recursive definition, exponential; only for short inputs.
    fn naive(a: &[u8], b: &[u8]) -> usize {
        match (a.split_first(), b.split_first()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((ha, ta)), Some((hb, tb))) => {
                let sub = naive(ta, tb) + usize::from(ha != hb);
                sub.min(naive(ta, b) + 1).min(naive(a, tb) + 1)
            }
        }
    }

    #[test]
    fn examples() {
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("0bcde9", "0bcde9"), 0);
        assert_eq!(naive(b"kitten", b"sitting"), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("flaw", "lawn"), 2);
        assert_eq!(levenshtein("héllo", "hello"), 1);
    }

    fn short() -> impl Strategy<Value = String> {
        "[a-d]{0,6}"
    }

    proptest! {
        #[test]
        fn agrees_with_naive(a in short(), b in short()) {
            prop_assert_eq!(levenshtein(&a, &b), naive(a.as_bytes(), b.as_bytes()));
        }

        #[test]
        fn metric_axioms(a in short(), b in short(), c in short()) {
            let ab = levenshtein(&a, &b);
            prop_assert_eq!(ab, levenshtein(&b, &a));
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(levenshtein(&a, &c) <= ab + levenshtein(&b, &c));
            prop_assert!(ab >= a.len().abs_diff(b.len()));
            prop_assert!(ab <= a.len().max(b.len()));
        }
    }
}
