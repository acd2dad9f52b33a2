use std::collections::HashMap;

use metasheet_core::edit_distance;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Top-down recursion over the three edit operations, memoized on the
/// remaining suffix lengths.
fn oracle(a: &[char], b: &[char]) -> usize {
    fn go(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        if let Some(&d) = memo.get(&(a.len(), b.len())) {
            return d;
        }
        let substitute = go(&a[1..], &b[1..], memo) + usize::from(a[0] != b[0]);
        let delete = go(&a[1..], b, memo) + 1;
        let insert = go(a, &b[1..], memo) + 1;
        let d = substitute.min(delete).min(insert);
        memo.insert((a.len(), b.len()), d);
        d
    }
    go(a, b, &mut HashMap::new())
}

fn random_word(rng: &mut StdRng, alphabet: &[char]) -> String {
    let len = rng.random_range(0..=8);
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

#[test]
fn matches_oracle_on_1000_random_pairs() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let alphabet: Vec<char> = "abcdAB é".chars().collect();
    for _ in 0..1000 {
        let a = random_word(&mut rng, &alphabet);
        let b = random_word(&mut rng, &alphabet);
        let (ca, cb): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
        assert_eq!(edit_distance(&a, &b), oracle(&ca, &cb), "{a:?} vs {b:?}");
    }
}

#[test]
fn oracle_agrees_on_known_values() {
    let d = |a: &str, b: &str| oracle(&a.chars().collect::<Vec<_>>(), &b.chars().collect::<Vec<_>>());
    assert_eq!(d("days", "day"), 1);
    assert_eq!(d("", "Day"), 3);
    assert_eq!(d("kitten", "sitting"), 3);
}

proptest! {
    #[test]
    fn metric_properties(a in "[a-d]{0,8}", b in "[a-d]{0,8}", c in "[a-d]{0,8}") {
        let ab = edit_distance(&a, &b);
        prop_assert_eq!(ab, edit_distance(&b, &a));
        prop_assert_eq!(ab == 0, a == b);
        prop_assert!(edit_distance(&a, &c) <= ab + edit_distance(&b, &c));
        prop_assert!(ab <= a.len().max(b.len()));
        prop_assert!(ab >= a.len().abs_diff(b.len()));
    }
}
