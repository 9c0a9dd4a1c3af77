mod common;

use std::sync::Arc;

use common::*;
use fintop::hom::hom_poset;
use fintop::{find_isomorphism, Poset};
use proptest::prelude::*;

fn poset_from(seed: u64, max: usize) -> Poset {
    let mut r = rng(seed);
    let n = rand::Rng::random_range(&mut r, 1..=max);
    let d = rand::Rng::random_range(&mut r, 0.1..0.8);
    random_poset(&mut r, n, d)
}

/// All assignments `X -> Y` that preserve the order, by exhaustive filter.
fn brute_force_hom(x: &Poset, y: &Poset) -> Vec<Vec<usize>> {
    let (n, m) = (x.len(), y.len());
    let total = m.pow(n as u32);
    (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let v = k % m;
                    k /= m;
                    v
                })
                .collect::<Vec<_>>()
        })
        .filter(|f| (0..n).all(|i| (0..n).all(|j| !x.leq(i, j) || y.leq(f[i], f[j]))))
        .collect()
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn order_is_a_partial_order_and_covers_regenerate_it(seed in any::<u64>()) {
        let p = poset_from(seed, 9);
        let n = p.len();
        for i in 0..n {
            prop_assert!(p.leq(i, i));
            for j in 0..n {
                prop_assert!(!(i != j && p.leq(i, j) && p.leq(j, i)));
                for k in 0..n {
                    prop_assert!(!(p.leq(i, j) && p.leq(j, k)) || p.leq(i, k));
                }
            }
        }
        let again = Poset::from_generators(p.names().to_vec(), p.covers()).unwrap();
        prop_assert_eq!(&again, &p);
        for &(a, b) in p.covers() {
            prop_assert!(p.lt(a, b));
            prop_assert!(!(0..n).any(|c| p.lt(a, c) && p.lt(c, b)));
        }
    }

    #[test]
    fn opposite_swaps_down_and_up_sets(seed in any::<u64>()) {
        let p = poset_from(seed, 9);
        let q = p.opposite();
        for x in 0..p.len() {
            for y in 0..p.len() {
                prop_assert_eq!(p.down_set(x).contains(y), q.down_set(y).contains(x));
                prop_assert_eq!(p.up_set(x).contains(y), q.down_set(x).contains(y));
            }
        }
        let back = q.opposite();
        prop_assert_eq!(back.names().len(), p.len());
    }

    #[test]
    fn product_projections_are_monotone_and_jointly_injective(a in any::<u64>(), b in any::<u64>()) {
        let p = Arc::new(poset_from(a, 4));
        let q = Arc::new(poset_from(b, 4));
        let (prod, first, second) = p.product(&q);
        prop_assert_eq!(prod.len(), p.len() * q.len());
        let mut seen = std::collections::HashSet::new();
        for i in 0..prod.len() {
            prop_assert!(seen.insert((first.apply(i), second.apply(i))));
            for j in 0..prod.len() {
                let both = p.leq(first.apply(i), first.apply(j)) && q.leq(second.apply(i), second.apply(j));
                prop_assert_eq!(prod.leq(i, j), both);
            }
        }
    }

    #[test]
    fn isomorphism_search_matches_a_permutation_scan(a in any::<u64>(), b in any::<u64>(), relabel in any::<bool>()) {
        let p = poset_from(a, 6);
        let q = if relabel {
            relabelled(&mut rng(b), &p)
        } else {
            let mut r = rng(b);
            let d = rand::Rng::random_range(&mut r, 0.1..0.8);
            random_poset(&mut r, p.len(), d)
        };
        let found = find_isomorphism(&p, &q);
        let scan = permutations(p.len()).into_iter().any(|f| oracle_is_isomorphism(&p, &q, &f));
        prop_assert_eq!(found.is_some(), scan);
        if let Some(f) = found {
            prop_assert!(oracle_is_isomorphism(&p, &q, &f));
        }
        if relabel {
            prop_assert!(scan);
        }
    }

    #[test]
    fn hom_poset_matches_brute_force(a in any::<u64>(), b in any::<u64>()) {
        let x = Arc::new(poset_from(a, 5));
        let y = Arc::new(poset_from(b, 5));
        prop_assume!((y.len() as f64).powi(x.len() as i32) <= 1e4);
        let hom = hom_poset(&x, &y, 10_000).unwrap();
        let mut got: Vec<Vec<usize>> = hom.all_values().to_vec();
        got.sort();
        let mut want = brute_force_hom(&x, &y);
        want.sort();
        prop_assert_eq!(got, want);
    }
}

/// Frozen counts from the brute-force oracles above.
#[test]
fn frozen_counts() {
    let labelled: Vec<usize> = (1..=4).map(|n| Poset::all_labelled(n).len()).collect();
    assert_eq!(labelled, vec![1, 3, 19, 219]);
    let shapes: Vec<usize> = (1..=4)
        .map(|n| {
            let mut reps: Vec<Poset> = vec![];
            for p in Poset::all_labelled(n) {
                if !reps
                    .iter()
                    .any(|r| (permutations(n)).iter().any(|f| oracle_is_isomorphism(r, &p, f)))
                {
                    reps.push(p);
                }
            }
            reps.len()
        })
        .collect();
    assert_eq!(shapes, vec![1, 2, 5, 16]);
    let chain = Poset::chain(3);
    assert_eq!(brute_force_hom(&chain, &chain).len(), 10);
    let crown = fintop::gallery::b5();
    assert_eq!(brute_force_hom(&crown, &crown).len(), 36);
}
