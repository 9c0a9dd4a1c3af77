//! The finite space `Y^X` of continuous maps with the pointwise order.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;
use crate::poset::{ElemSet, Poset};

pub const DEFAULT_GUARD: usize = 100_000;

#[derive(Debug, Clone)]
pub struct HomPoset {
    source: Arc<Poset>,
    target: Arc<Poset>,
    maps: Vec<Vec<usize>>,
}

impl HomPoset {
    pub fn source(&self) -> &Arc<Poset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Poset> {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn values(&self, i: usize) -> &[usize] {
        &self.maps[i]
    }

    pub fn all_values(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> MonotoneMap {
        MonotoneMap::new_unchecked(self.source.clone(), self.target.clone(), self.maps[i].clone())
    }

    /// Pointwise order between the `i`-th and `j`-th map.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.maps[i]
            .iter()
            .zip(&self.maps[j])
            .all(|(&a, &b)| self.target.leq(a, b))
    }

    pub fn position(&self, values: &[usize]) -> Option<usize> {
        self.maps.iter().position(|m| m == values)
    }

    /// Connected components of the comparability graph.
    ///
    /// If `f <= g` the two are joined by a chain of maps each differing from
    /// the previous one at a single point (change a maximal point of
    /// disagreement first), so one-point comparable moves generate the same
    /// components as full pairwise comparison.
    pub fn comparability_components(&self) -> Vec<Vec<usize>> {
        let lookup: HashMap<&[usize], usize> = self.maps.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
        let mut parent: Vec<usize> = (0..self.maps.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut scratch = Vec::new();
        for (i, m) in self.maps.iter().enumerate() {
            for x in 0..m.len() {
                for v in self.target.down_set(m[x]).ones() {
                    if v == m[x] {
                        continue;
                    }
                    scratch.clear();
                    scratch.extend_from_slice(m);
                    scratch[x] = v;
                    if let Some(&j) = lookup.get(scratch.as_slice()) {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for i in 0..self.maps.len() {
            let root = find(&mut parent, i);
            let k = *slot.entry(root).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[k].push(i);
        }
        groups
    }
}

/// All monotone maps `X -> Y`, failing with `GuardExceeded` past `guard` maps.
pub fn hom_poset(x: &Arc<Poset>, y: &Arc<Poset>, guard: usize) -> Result<HomPoset> {
    let allowed = vec![y.full_set(); x.len()];
    enumerate(x, y, &allowed, guard)
}

/// Maps `f: dom(p) -> dom(q)` with `q ∘ f = p`.
pub fn hom_over_base(p: &MonotoneMap, q: &MonotoneMap, guard: usize) -> Result<HomPoset> {
    if **p.cod() != **q.cod() {
        return Err(Error::CodomainMismatch);
    }
    let allowed: Vec<ElemSet> = (0..p.dom().len())
        .map(|e| q.preimage(&single(q.cod(), p.apply(e))))
        .collect();
    enumerate(p.dom(), q.dom(), &allowed, guard)
}

/// Monotone maps whose value at each `x` lies in `allowed[x]`.
pub fn enumerate(x: &Arc<Poset>, y: &Arc<Poset>, allowed: &[ElemSet], guard: usize) -> Result<HomPoset> {
    let bound: u128 = allowed
        .iter()
        .map(|a| a.count_ones(..) as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX);
    let order = x.linear_extension();
    let mut maps = Vec::new();
    let mut current = vec![usize::MAX; x.len()];
    let mut ctx = Enum {
        x,
        y,
        allowed,
        order: &order,
        maps: &mut maps,
        guard,
        bound,
    };
    ctx.extend(0, &mut current)?;
    Ok(HomPoset {
        source: x.clone(),
        target: y.clone(),
        maps,
    })
}

struct Enum<'a> {
    x: &'a Poset,
    y: &'a Poset,
    allowed: &'a [ElemSet],
    order: &'a [usize],
    maps: &'a mut Vec<Vec<usize>>,
    guard: usize,
    bound: u128,
}

impl Enum<'_> {
    fn extend(&mut self, depth: usize, current: &mut Vec<usize>) -> Result<()> {
        if depth == self.order.len() {
            if self.maps.len() >= self.guard {
                let bound = if self.bound == u128::MAX {
                    "more than 2^128".to_string()
                } else {
                    self.bound.to_string()
                };
                return Err(Error::GuardExceeded {
                    bound,
                    guard: self.guard,
                });
            }
            self.maps.push(current.clone());
            return Ok(());
        }
        let e = self.order[depth];
        // Everything below `e` is already assigned; lower covers suffice.
        let mut candidates = self.allowed[e].clone();
        for &(lo, hi) in self.x.covers() {
            if hi == e {
                candidates.intersect_with(self.y.up_set(current[lo]));
            }
        }
        for v in candidates.ones() {
            current[e] = v;
            self.extend(depth + 1, current)?;
        }
        current[e] = usize::MAX;
        Ok(())
    }
}

/// Some monotone map with values in `allowed`, found by backtracking with
/// constraint propagation along covers. Stops at the first solution.
pub fn find_monotone(x: &Poset, y: &Poset, allowed: &[ElemSet]) -> Option<Vec<usize>> {
    let mut domains = allowed.to_vec();
    if !propagate(x, y, &mut domains) {
        return None;
    }
    let order = x.linear_extension();
    search(x, y, &order, 0, domains)
}

fn search(x: &Poset, y: &Poset, order: &[usize], depth: usize, domains: Vec<ElemSet>) -> Option<Vec<usize>> {
    let Some(&v) = order[depth..].iter().find(|&&v| domains[v].count_ones(..) > 1) else {
        return Some(
            domains
                .iter()
                .map(|d| d.ones().next().expect("nonempty domain"))
                .collect(),
        );
    };
    for value in domains[v].ones() {
        let mut next = domains.clone();
        next[v].clear();
        next[v].insert(value);
        if propagate(x, y, &mut next) {
            if let Some(found) = search(x, y, order, depth, next) {
                return Some(found);
            }
        }
    }
    None
}

/// Arc consistency on the cover relation; false if some domain empties.
fn propagate(x: &Poset, y: &Poset, domains: &mut [ElemSet]) -> bool {
    loop {
        let mut changed = false;
        for &(lo, hi) in x.covers() {
            let keep_lo: Vec<usize> = domains[lo]
                .ones()
                .filter(|&v| domains[hi].ones().any(|w| y.leq(v, w)))
                .collect();
            let keep_hi: Vec<usize> = domains[hi]
                .ones()
                .filter(|&w| domains[lo].ones().any(|v| y.leq(v, w)))
                .collect();
            for (slot, keep) in [(lo, keep_lo), (hi, keep_hi)] {
                if keep.len() != domains[slot].count_ones(..) {
                    changed = true;
                    domains[slot].clear();
                    for v in keep {
                        domains[slot].insert(v);
                    }
                }
            }
        }
        if domains.iter().any(|d| d.count_ones(..) == 0) {
            return false;
        }
        if !changed {
            return true;
        }
    }
}

fn single(p: &Poset, x: usize) -> ElemSet {
    let mut s = p.empty_set();
    s.insert(x);
    s
}
