mod common;

use std::sync::Arc;

use common::*;
use fintop::grothendieck::{alpha_functor, beta_functor, reconstruct_over_base, Construction};
use fintop::iso::find_isomorphism_over_base;
use fintop::slice::fiber;
use fintop::stong::{dbp_retract_trace, ubp_retract_trace};
use fintop::{
    cartesian_lift, classify_grothendieck, cocartesian_lift, find_isomorphism, grothendieck_construction,
    homotopy_equivalent, is_fiber_bundle, is_grothendieck_fibration, is_grothendieck_opfibration, map_core, Error,
    MonotoneMap, Poset, PosetFunctor,
};
use proptest::prelude::*;
use rand::Rng;

fn image_set(m: &MonotoneMap) -> fintop::ElemSet {
    m.image()
}

/// `(v, y) <= (b, x)` in `∫D` straight from the definition.
fn construction_matches_definition(d: &PosetFunctor, c: &Construction) -> bool {
    let base = d.base();
    let t = c.total();
    (0..t.len()).all(|i| {
        (0..t.len()).all(|j| {
            let ((v, y), (b, x)) = (c.points[i], c.points[j]);
            let expected = base.leq(v, b) && d.fiber(b).leq(d.transition(v, b).unwrap().apply(y), x);
            t.leq(i, j) == expected
        })
    })
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn lifts_agree_with_a_brute_force_scan(seed in any::<u64>()) {
        let p = random_slice(&mut rng(seed), 5, 10);
        let mut fib = true;
        let mut opfib = true;
        for e in 0..p.total().len() {
            for b in 0..p.base().len() {
                if p.base().leq(b, p.apply(e)) {
                    let got = cartesian_lift(&p, e, b).unwrap().ok();
                    prop_assert_eq!(got, oracle_cartesian(&p, e, b));
                    fib &= got.is_some();
                } else {
                    prop_assert!(matches!(cartesian_lift(&p, e, b), Err(Error::PreconditionViolated(_))));
                }
                if p.base().leq(p.apply(e), b) {
                    let got = cocartesian_lift(&p, e, b).unwrap().ok();
                    prop_assert_eq!(got, oracle_cocartesian(&p, e, b));
                    opfib &= got.is_some();
                }
            }
        }
        prop_assert_eq!(is_grothendieck_fibration(&p), fib);
        prop_assert_eq!(is_grothendieck_opfibration(&p), opfib);
        let report = classify_grothendieck(&p);
        prop_assert_eq!(report.is_fibration, fib);
        prop_assert_eq!(report.fibration_witness.is_none(), fib);
        prop_assert_eq!(report.alpha.is_some(), fib);
        prop_assert_eq!(report.beta.is_some(), opfib);
    }

    #[test]
    fn constructions_follow_the_defining_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let base = Arc::new(random_poset(&mut r, n, 0.5));
        let d = random_functor(&mut r, &base, 3);
        let c = grothendieck_construction(&d).unwrap();
        prop_assert!(construction_matches_definition(&d, &c));
        prop_assert!(is_grothendieck_opfibration(&c.projection));
        let beta = beta_functor(&c.projection).unwrap();
        let again = grothendieck_construction(&beta).unwrap();
        prop_assert!(find_isomorphism_over_base(again.projection.map(), c.projection.map()).unwrap().is_some());
    }

    #[test]
    fn transports_satisfy_the_adjunction_identities(seed in any::<u64>()) {
        let (_, p) = random_bifibration(&mut rng(seed), 5, 4);
        let alpha = alpha_functor(&p).unwrap();
        let beta = beta_functor(&p).unwrap();
        let base = p.base();
        for b in 0..base.len() {
            for b2 in base.up_set(b).ones() {
                let a = alpha.transition(b, b2).unwrap();
                let t = beta.transition(b, b2).unwrap();
                let ab = a.after(t).unwrap();
                let ba = t.after(a).unwrap();
                prop_assert!(ab.above_identity());
                prop_assert!(ba.below_identity());
                prop_assert_eq!(&t.after(&ab).unwrap(), t);
                prop_assert_eq!(&a.after(&ba).unwrap(), a);
                // αβ(fiber b) is a ubp-retract, βα(fiber b') a dbp-retract, and they agree.
                let low = alpha.fiber(b);
                let high = alpha.fiber(b2);
                let up_keep = image_set(&ab);
                let down_keep = image_set(&ba);
                prop_assert!(ubp_retract_trace(low, &up_keep).is_some());
                prop_assert!(dbp_retract_trace(high, &down_keep).is_some());
                let (u, _) = low.sub_poset(&up_keep);
                let (v, _) = high.sub_poset(&down_keep);
                prop_assert!(find_isomorphism(&u, &v).is_some());
                for b3 in base.up_set(b2).ones() {
                    prop_assert_eq!(&beta.transition(b2, b3).unwrap().after(t).unwrap(), beta.transition(b, b3).unwrap());
                    prop_assert_eq!(&a.after(alpha.transition(b2, b3).unwrap()).unwrap(), alpha.transition(b, b3).unwrap());
                }
            }
        }
    }

    #[test]
    fn fibers_of_bifibrations_over_connected_bases_are_homotopy_equivalent(seed in any::<u64>()) {
        let (_, p) = random_bifibration(&mut rng(seed), 5, 4);
        prop_assume!(p.base().is_connected());
        let f0 = fiber(&p, 0).unwrap();
        for b in 1..p.base().len() {
            let fb = fiber(&p, b).unwrap();
            prop_assert!(homotopy_equivalent(&f0, &fb).unwrap().is_some());
        }
    }

    #[test]
    fn opfibrations_are_reconstructed_from_their_transport(seed in any::<u64>()) {
        let p = random_slice(&mut rng(seed), 4, 8);
        match reconstruct_over_base(&p) {
            Ok(iso) => {
                prop_assert!(is_grothendieck_opfibration(&p));
                let c = &iso.construction;
                for (k, &e) in iso.to_total.iter().enumerate() {
                    prop_assert_eq!(p.apply(e), c.points[k].0);
                }
            }
            Err(Error::NotGrothendieckOpfibration(_)) => prop_assert!(!is_grothendieck_opfibration(&p)),
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }

    #[test]
    fn bifibrations_with_minimal_fibers_are_bundles(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = minimal_fiber(&mut r);
        let p = random_bundle(&mut r, f);
        prop_assert!(is_fiber_bundle(&p, 1 << 20).unwrap().is_bundle());
    }

    #[test]
    fn cores_of_bundles_are_bundles_over_the_core_fiber(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=5);
        let f = random_poset(&mut r, n, 0.5);
        let fiber_core = fintop::core(&Arc::new(f.clone())).unwrap();
        let p = random_bundle(&mut r, f);
        let (core, _) = map_core(&p);
        prop_assert!(is_fiber_bundle(&core, 1 << 20).unwrap().is_bundle());
        for b in 0..core.base().len() {
            prop_assert!(find_isomorphism(&fiber(&core, b).unwrap(), fiber_core.result()).is_some());
        }
    }
}

#[test]
fn gallery_lifts_agree_with_the_scan() {
    for (id, p) in gallery_maps() {
        for e in 0..p.total().len() {
            for b in 0..p.base().len() {
                if p.base().leq(b, p.apply(e)) {
                    assert_eq!(
                        cartesian_lift(&p, e, b).unwrap().ok(),
                        oracle_cartesian(&p, e, b),
                        "{id}"
                    );
                }
                if p.base().leq(p.apply(e), b) {
                    assert_eq!(
                        cocartesian_lift(&p, e, b).unwrap().ok(),
                        oracle_cocartesian(&p, e, b),
                        "{id}"
                    );
                }
            }
        }
    }
}

/// Frozen: how many `(e, b)` pairs lack a lift in each gallery map.
#[test]
fn frozen_lift_failure_counts() {
    let counts: Vec<(&str, usize, usize)> = gallery_maps()
        .iter()
        .map(|(id, p)| {
            let mut cart = 0;
            let mut cocart = 0;
            for e in 0..p.total().len() {
                for b in 0..p.base().len() {
                    if p.base().leq(b, p.apply(e)) && oracle_cartesian(p, e, b).is_none() {
                        cart += 1;
                    }
                    if p.base().leq(p.apply(e), b) && oracle_cocartesian(p, e, b).is_none() {
                        cocart += 1;
                    }
                }
            }
            (*id, cart, cocart)
        })
        .collect();
    assert_eq!(
        counts,
        vec![
            ("p1", 0, 1),
            ("p1op", 1, 0),
            ("p2", 0, 2),
            ("p3", 0, 0),
            ("p3_restricted", 0, 0),
            ("pi_sierpinski", 0, 0),
            ("p5_minimal_bifib", 0, 0),
        ]
    );
}

#[test]
fn discrete_fibers_over_a_chain() {
    let base = Arc::new(Poset::chain(2));
    let d = PosetFunctor::constant(base.clone(), Arc::new(Poset::antichain(2)));
    let c = grothendieck_construction(&d).unwrap();
    let (prod, first, _) = base.product(&Arc::new(Poset::antichain(2)));
    assert_eq!(c.total().len(), prod.len());
    assert!(find_isomorphism_over_base(c.projection.map(), &first)
        .unwrap()
        .is_some());
}
