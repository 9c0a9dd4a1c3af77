//! Random instance generators and brute-force oracles shared by the
//! integration suites. The oracles only use `Poset::leq` and raw index
//! arithmetic, never the analyses they are compared against.
#![allow(dead_code)]

use std::sync::Arc;

use fintop::iso::automorphisms;
use fintop::{
    grothendieck_construction, hom_poset, is_bifibration, MonotoneMap, Poset, PosetFunctor, SliceMap, Variance,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed_f1b0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed from `FINTOP_SEED` when set.
pub fn seed_from_env() -> u64 {
    std::env::var("FINTOP_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Random order on `x0..x{n-1}` generated by edges `i -> j`, `i < j`.
pub fn random_poset(rng: &mut impl Rng, n: usize, density: f64) -> Poset {
    let names = (0..n).map(|i| format!("x{i}")).collect();
    let mut pairs = vec![];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    Poset::from_generators(names, &pairs).expect("forward edges are acyclic")
}

pub fn random_connected_poset(rng: &mut impl Rng, max: usize) -> Poset {
    loop {
        let n = rng.random_range(1..=max);
        let p = random_poset(rng, n, 0.5);
        if p.is_connected() {
            return p;
        }
    }
}

/// A random poset with a bottom element `m` added below everything.
pub fn random_base_with_minimum(rng: &mut impl Rng, n: usize) -> Poset {
    let rest = random_poset(rng, n - 1, 0.4);
    let mut names = vec!["m".to_string()];
    names.extend(rest.names().iter().cloned());
    Poset::from_relation(names, |i, j| i == 0 || (i > 0 && j > 0 && rest.leq(i - 1, j - 1))).expect("cone is a poset")
}

/// A random monotone map onto points of `base`: total points are sorted by the
/// rank of their image and only get edges compatible with the base order.
pub fn random_map_over(rng: &mut impl Rng, base: &Arc<Poset>, n: usize, density: f64) -> MonotoneMap {
    let order = base.linear_extension();
    let mut rank = vec![0; base.len()];
    for (r, &b) in order.iter().enumerate() {
        rank[b] = r;
    }
    let mut labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..base.len())).collect();
    labels.sort_by_key(|&b| rank[b]);
    let names = (0..n).map(|i| format!("e{i}")).collect();
    let mut pairs = vec![];
    for i in 0..n {
        for j in i + 1..n {
            if base.leq(labels[i], labels[j]) && rng.random_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    let total = Arc::new(Poset::from_generators(names, &pairs).expect("forward edges are acyclic"));
    MonotoneMap::new(total, base.clone(), labels).expect("edges respect the base order")
}

pub fn random_slice(rng: &mut impl Rng, max_base: usize, max_total: usize) -> SliceMap {
    let bn = rng.random_range(1..=max_base);
    let base = Arc::new(random_poset(rng, bn, 0.5));
    let n = rng.random_range(1..=max_total);
    let density = rng.random_range(0.2..0.7);
    SliceMap::new(random_map_over(rng, &base, n, density)).expect("nonempty")
}

fn compose(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner.iter().map(|&x| outer[x]).collect()
}

/// A random covariant functor: transitions out of the lower covers of each
/// point are drawn at random and kept when they induce consistent composites;
/// otherwise every transition into that point is a common constant.
pub fn random_functor(rng: &mut impl Rng, base: &Arc<Poset>, max_fiber: usize) -> PosetFunctor {
    random_functor_from(rng, base, max_fiber, false)
}

/// Whether every `{y : f(y) <= x}` has a largest element.
pub fn has_right_adjoint(x: &Poset, y: &Poset, f: &[usize]) -> bool {
    (0..y.len()).all(|t| {
        let set: Vec<usize> = (0..x.len()).filter(|&s| y.leq(f[s], t)).collect();
        set.iter().any(|&m| set.iter().all(|&s| x.leq(s, m)))
    })
}

/// As [`random_functor`]; with `adjoints` the cover transitions are drawn
/// from maps with right adjoints whenever there are any.
pub fn random_functor_from(rng: &mut impl Rng, base: &Arc<Poset>, max_fiber: usize, adjoints: bool) -> PosetFunctor {
    let n = base.len();
    let fibers: Vec<Arc<Poset>> = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=max_fiber);
            let density = rng.random_range(0.2..0.8);
            Arc::new(random_poset(rng, k, density))
        })
        .collect();
    // into[b][u] = values of D(u <= b) for u < b
    let mut into: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
    for b in base.linear_extension() {
        let lower: Vec<usize> = base
            .covers()
            .iter()
            .filter(|&&(_, hi)| hi == b)
            .map(|&(lo, _)| lo)
            .collect();
        let below: Vec<usize> = base.strict_down_set(b).ones().collect();
        let mut chosen = None;
        for _ in 0..30 {
            let cover_maps: Vec<Vec<usize>> = lower
                .iter()
                .map(|&v| {
                    let hom = hom_poset(&fibers[v], &fibers[b], 1 << 16).expect("small fibers");
                    let mut pool: Vec<&Vec<usize>> = hom.all_values().iter().collect();
                    if adjoints {
                        let good: Vec<&Vec<usize>> = pool
                            .iter()
                            .copied()
                            .filter(|f| has_right_adjoint(&fibers[v], &fibers[b], f))
                            .collect();
                        if !good.is_empty() {
                            pool = good;
                        }
                    }
                    pool.choose(rng).expect("hom is nonempty").to_vec()
                })
                .collect();
            let mut derived = vec![None; n];
            let mut ok = true;
            'outer: for &u in &below {
                for (k, &v) in lower.iter().enumerate() {
                    if !base.leq(u, v) {
                        continue;
                    }
                    let candidate = if u == v {
                        cover_maps[k].clone()
                    } else {
                        compose(&cover_maps[k], into[v][u].as_ref().expect("earlier in the extension"))
                    };
                    match &derived[u] {
                        None => derived[u] = Some(candidate),
                        Some(existing) if *existing == candidate => {}
                        Some(_) => {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
            }
            if ok {
                chosen = Some(derived);
                break;
            }
        }
        let derived = chosen.unwrap_or_else(|| {
            let c = rng.random_range(0..fibers[b].len());
            (0..n)
                .map(|u| base.lt(u, b).then(|| vec![c; fibers[u].len()]))
                .collect()
        });
        into[b] = derived;
    }
    let mut transitions = vec![];
    for (b, row) in into.iter().enumerate() {
        for (u, values) in row.iter().enumerate() {
            if let Some(values) = values {
                let m = MonotoneMap::new(fibers[u].clone(), fibers[b].clone(), values.clone()).expect("monotone");
                transitions.push(((u, b), m));
            }
        }
    }
    PosetFunctor::new(base.clone(), Variance::Covariant, fibers, transitions).expect("functorial by construction")
}

/// `∫D` for random `D`, retried until it is a bifibration. Discrete bases
/// are mostly redrawn since they make every transport trivial.
pub fn random_bifibration(rng: &mut impl Rng, max_base: usize, max_fiber: usize) -> (PosetFunctor, SliceMap) {
    loop {
        let bn = rng.random_range(1..=max_base);
        let base = Arc::new(random_poset(rng, bn, 0.5));
        if base.covers().is_empty() && rng.random_bool(0.8) {
            continue;
        }
        let adjoints = rng.random_bool(0.8);
        let d = random_functor_from(rng, &base, max_fiber, adjoints);
        let c = grothendieck_construction(&d).expect("valid functor");
        if is_bifibration(&c.projection) {
            return (d, c.projection);
        }
    }
}

/// Adds a point just above `w` in the fiber of `w` and below a random set of
/// points above `w`: a down beat point of the map with witness `w`.
pub fn insert_map_dbp(rng: &mut impl Rng, p: &MonotoneMap, tag: usize) -> MonotoneMap {
    let e = p.dom();
    let n = e.len();
    let w = rng.random_range(0..n);
    let above: Vec<usize> = e.strict_up_set(w).ones().filter(|_| rng.random_bool(0.5)).collect();
    let mut names = e.names().to_vec();
    names.push(format!("+{tag}"));
    let leq = |i: usize, j: usize| match (i == n, j == n) {
        (false, false) => e.leq(i, j),
        (true, true) => true,
        (false, true) => e.leq(i, w),
        (true, false) => above.iter().any(|&s| e.leq(s, j)),
    };
    let total = Arc::new(Poset::from_relation(names, leq).expect("insertion keeps a partial order"));
    let mut values = p.values().to_vec();
    values.push(p.apply(w));
    MonotoneMap::new(total, p.cod().clone(), values).expect("insertion is monotone")
}

/// A product projection over a base with minimum, then 0-3 map-dbp insertions.
pub fn random_hurewicz_fibration(rng: &mut impl Rng) -> SliceMap {
    let bn = rng.random_range(1..=4);
    let base = Arc::new(random_base_with_minimum(rng, bn));
    let fn_ = rng.random_range(1..=3);
    let fiber = Arc::new(random_poset(rng, fn_, 0.5));
    let (_, mut p, _) = base.product(&fiber);
    for tag in 0..rng.random_range(0..=3) {
        p = insert_map_dbp(rng, &p, tag);
    }
    SliceMap::new(p).expect("nonempty")
}

pub fn minimal_fiber(rng: &mut impl Rng) -> Poset {
    match rng.random_range(0..4) {
        0 => fintop::gallery::b5(),
        1 => Poset::antichain(rng.random_range(1..=3)),
        2 => fintop::gallery::e5(),
        _ => {
            let n = rng.random_range(1..=6);
            let x = Arc::new(random_poset(rng, n, 0.4));
            (*fintop::core(&x).expect("nonempty").result().clone()).clone()
        }
    }
}

/// `∫D` for `D(b <= b') = φ_{b'} ∘ φ_b^{-1}` with random automorphisms `φ_b`.
pub fn random_bundle(rng: &mut impl Rng, fiber: Poset) -> SliceMap {
    let base = Arc::new(random_connected_poset(rng, 4));
    let fiber = Arc::new(fiber);
    let autos = automorphisms(&fiber, 200);
    let phi: Vec<&Vec<usize>> = (0..base.len())
        .map(|_| autos.choose(rng).expect("identity exists"))
        .collect();
    let mut transitions = vec![];
    for lo in 0..base.len() {
        for hi in base.strict_up_set(lo).ones() {
            let mut inv = vec![0; fiber.len()];
            for (x, &y) in phi[lo].iter().enumerate() {
                inv[y] = x;
            }
            let values = compose(phi[hi], &inv);
            transitions.push((
                (lo, hi),
                MonotoneMap::new(fiber.clone(), fiber.clone(), values).expect("automorphism"),
            ));
        }
    }
    let d = PosetFunctor::new(base.clone(), Variance::Covariant, vec![fiber; base.len()], transitions)
        .expect("automorphism transitions compose");
    grothendieck_construction(&d).expect("valid functor").projection
}

/// Cartesian lift by brute force: the largest point of
/// `{x <= e : p(x) <= b}`, which must lie over `b`.
pub fn oracle_cartesian(p: &SliceMap, e: usize, b: usize) -> Option<usize> {
    let t = p.total();
    let base = p.base();
    let set: Vec<usize> = (0..t.len())
        .filter(|&x| t.leq(x, e) && base.leq(p.apply(x), b))
        .collect();
    let top = set.iter().copied().find(|&m| set.iter().all(|&x| t.leq(x, m)))?;
    (p.apply(top) == b).then_some(top)
}

pub fn oracle_cocartesian(p: &SliceMap, e: usize, b: usize) -> Option<usize> {
    let t = p.total();
    let base = p.base();
    let set: Vec<usize> = (0..t.len())
        .filter(|&x| t.leq(e, x) && base.leq(b, p.apply(x)))
        .collect();
    let bottom = set.iter().copied().find(|&m| set.iter().all(|&x| t.leq(m, x)))?;
    (p.apply(bottom) == b).then_some(bottom)
}

/// Whether `x` is a down beat point of the sub-poset `alive`.
fn oracle_is_dbp(poset: &Poset, alive: &[bool], x: usize) -> bool {
    let below: Vec<usize> = (0..poset.len())
        .filter(|&y| alive[y] && y != x && poset.leq(y, x))
        .collect();
    below.iter().any(|&m| below.iter().all(|&y| poset.leq(y, m)))
}

/// Whether `keep` is reached from `poset` by removing down beat points one at a
/// time (greedy removal is enough for dbp-retracts).
pub fn oracle_is_dbp_retract(poset: &Poset, keep: &[bool]) -> bool {
    let mut alive = vec![true; poset.len()];
    loop {
        let next = (0..poset.len()).find(|&x| alive[x] && !keep[x] && oracle_is_dbp(poset, &alive, x));
        match next {
            Some(x) => alive[x] = false,
            None => return alive == keep,
        }
    }
}

/// Every order-preserving `f: X -> X` with `f <= Id`.
pub fn oracle_maps_below_identity(x: &Poset) -> Vec<Vec<usize>> {
    fn go(x: &Poset, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == x.len() {
            out.push(cur.clone());
            return;
        }
        for v in (0..x.len()).filter(|&v| x.leq(v, k)) {
            let ok = (0..k).all(|i| (!x.leq(i, k) || x.leq(cur[i], v)) && (!x.leq(k, i) || x.leq(v, cur[i])));
            if ok {
                cur.push(v);
                go(x, k + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = vec![];
    go(x, 0, &mut vec![], &mut out);
    out
}

/// All order-preserving endomaps, or `None` past `limit`.
pub fn oracle_endomaps(x: &Poset, limit: usize) -> Option<Vec<Vec<usize>>> {
    fn go(x: &Poset, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) -> bool {
        if k == x.len() {
            out.push(cur.clone());
            return out.len() <= limit;
        }
        for v in 0..x.len() {
            let ok = (0..k).all(|i| (!x.leq(i, k) || x.leq(cur[i], v)) && (!x.leq(k, i) || x.leq(v, cur[i])));
            if ok {
                cur.push(v);
                if !go(x, k + 1, cur, out, limit) {
                    return false;
                }
                cur.pop();
            }
        }
        true
    }
    let mut out = vec![];
    go(x, 0, &mut vec![], &mut out, limit).then_some(out)
}

/// The pointwise minimum of a family of maps, if it is one of them.
pub fn oracle_minimum(x: &Poset, maps: &[Vec<usize>]) -> Option<Vec<usize>> {
    maps.iter()
        .find(|m| maps.iter().all(|g| (0..x.len()).all(|i| x.leq(m[i], g[i]))))
        .cloned()
}

pub fn shuffled_rank(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(rng);
    rank
}

pub fn gallery_maps() -> Vec<(&'static str, SliceMap)> {
    fintop::gallery::entries()
        .into_iter()
        .filter_map(|e| match e.item {
            fintop::gallery::GalleryItem::Map(m) => Some((e.id, m)),
            _ => None,
        })
        .collect()
}

/// Proptest settings pinned to the suite seed.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(seed_from_env()),
        failure_persistence: None,
        ..Default::default()
    }
}

/// Every bijection `0..n -> 0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = vec![];
    go(n, &mut vec![], &mut vec![false; n], &mut out);
    out
}

/// Whether `f` is an order isomorphism `p -> q`.
pub fn oracle_is_isomorphism(p: &Poset, q: &Poset, f: &[usize]) -> bool {
    let n = p.len();
    if q.len() != n || f.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &y in f {
        if y >= n || std::mem::replace(&mut seen[y], true) {
            return false;
        }
    }
    (0..n).all(|i| (0..n).all(|j| p.leq(i, j) == q.leq(f[i], f[j])))
}

/// The same order with its points listed in a random order.
pub fn relabelled(rng: &mut impl Rng, p: &Poset) -> Poset {
    let perm = shuffled_rank(rng, p.len());
    let mut names = vec![String::new(); p.len()];
    for (i, &k) in perm.iter().enumerate() {
        names[k] = p.name(i).to_string();
    }
    let mut inverse = vec![0; p.len()];
    for (i, &k) in perm.iter().enumerate() {
        inverse[k] = i;
    }
    Poset::from_relation(names, |a, b| p.leq(inverse[a], inverse[b])).expect("relabelling keeps the order")
}
