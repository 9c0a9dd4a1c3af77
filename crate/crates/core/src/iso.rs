//! Order-isomorphism search, plain and over a common base.
//!
//! Elements are first coloured by order invariants (label, strict down/up set
//! sizes, level, depth, cover counts) and the colouring is refined by the
//! colours of lower and upper covers until stable. Backtracking then assigns
//! elements of the source in a fixed order, trying targets of equal colour in
//! index order, so results are deterministic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;
use crate::poset::Poset;

/// Default node budget: effectively unbounded for the instance sizes the
/// engine targets.
pub const UNBOUNDED: u64 = u64::MAX;

/// Finds an order isomorphism `P -> Q` as a vector of target indices.
pub fn find_isomorphism(p: &Poset, q: &Poset) -> Option<Vec<usize>> {
    find_isomorphism_budgeted(p, q, UNBOUNDED).expect("unbounded search")
}

pub fn find_isomorphism_budgeted(p: &Poset, q: &Poset, budget: u64) -> Result<Option<Vec<usize>>> {
    let lp = vec![0; p.len()];
    let lq = vec![0; q.len()];
    let mut found = None;
    Search::new(p, q, &lp, &lq, budget).run(&mut |m| {
        found = Some(m.to_vec());
        false
    })?;
    Ok(found)
}

/// Finds `φ: dom(p) -> dom(q)`, an order isomorphism with `q ∘ φ = p`.
pub fn find_isomorphism_over_base(p: &MonotoneMap, q: &MonotoneMap) -> Result<Option<Vec<usize>>> {
    find_isomorphism_over_base_budgeted(p, q, UNBOUNDED)
}

pub fn find_isomorphism_over_base_budgeted(
    p: &MonotoneMap,
    q: &MonotoneMap,
    budget: u64,
) -> Result<Option<Vec<usize>>> {
    if **p.cod() != **q.cod() {
        return Err(Error::CodomainMismatch);
    }
    let mut found = None;
    Search::new(p.dom(), q.dom(), p.values(), q.values(), budget).run(&mut |m| {
        found = Some(m.to_vec());
        false
    })?;
    Ok(found)
}

/// All automorphisms of `p`, up to `limit` of them, identity first when present.
pub fn automorphisms(p: &Poset, limit: usize) -> Vec<Vec<usize>> {
    let labels = vec![0; p.len()];
    let mut out = Vec::new();
    Search::new(p, p, &labels, &labels, UNBOUNDED)
        .run(&mut |m| {
            out.push(m.to_vec());
            out.len() < limit
        })
        .expect("unbounded search");
    out.sort();
    out
}

struct Search<'a> {
    p: &'a Poset,
    q: &'a Poset,
    color_p: Vec<usize>,
    color_q: Vec<usize>,
    budget: u64,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(p: &'a Poset, q: &'a Poset, label_p: &[usize], label_q: &[usize], budget: u64) -> Self {
        let (color_p, color_q) = refine(p, q, label_p, label_q);
        Search {
            p,
            q,
            color_p,
            color_q,
            budget,
            nodes: 0,
        }
    }

    /// Calls `visit` on each isomorphism until it returns false.
    fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<()> {
        let n = self.p.len();
        if n != self.q.len() {
            return Ok(());
        }
        let mut hist_p = self.color_p.clone();
        let mut hist_q = self.color_q.clone();
        hist_p.sort_unstable();
        hist_q.sort_unstable();
        if hist_p != hist_q {
            return Ok(());
        }
        let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in &self.color_p {
            *class_size.entry(c).or_default() += 1;
        }
        let levels = self.p.levels();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| (class_size[&self.color_p[x]], levels[x], x));

        let mut assign = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend(&order, 0, &mut assign, &mut used, visit)?;
        Ok(())
    }

    fn extend(
        &mut self,
        order: &[usize],
        depth: usize,
        assign: &mut [usize],
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<bool> {
        if depth == order.len() {
            return Ok(visit(assign));
        }
        let x = order[depth];
        for y in 0..self.q.len() {
            if used[y] || self.color_q[y] != self.color_p[x] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExhausted(self.budget));
            }
            let consistent = order[..depth].iter().all(|&x2| {
                let y2 = assign[x2];
                self.p.leq(x, x2) == self.q.leq(y, y2) && self.p.leq(x2, x) == self.q.leq(y2, y)
            });
            if !consistent {
                continue;
            }
            assign[x] = y;
            used[y] = true;
            let keep_going = self.extend(order, depth + 1, assign, used, visit)?;
            used[y] = false;
            assign[x] = usize::MAX;
            if !keep_going {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Colour refinement over both posets with a shared colour dictionary, so
/// equal colours mean equal invariants across the two sides.
fn refine(p: &Poset, q: &Poset, label_p: &[usize], label_q: &[usize]) -> (Vec<usize>, Vec<usize>) {
    fn base(poset: &Poset, labels: &[usize]) -> Vec<Vec<usize>> {
        let levels = poset.levels();
        let depths = poset.depths();
        let mut lower = vec![0; poset.len()];
        let mut upper = vec![0; poset.len()];
        for &(a, b) in poset.covers() {
            upper[a] += 1;
            lower[b] += 1;
        }
        (0..poset.len())
            .map(|x| {
                vec![
                    labels[x],
                    poset.down_set(x).count_ones(..),
                    poset.up_set(x).count_ones(..),
                    levels[x],
                    depths[x],
                    lower[x],
                    upper[x],
                ]
            })
            .collect()
    }
    fn compress(dict: &mut BTreeMap<Vec<usize>, usize>, sigs: Vec<Vec<usize>>) -> Vec<usize> {
        sigs.into_iter()
            .map(|s| {
                let next = dict.len();
                *dict.entry(s).or_insert(next)
            })
            .collect()
    }
    fn round(poset: &Poset, colors: &[usize]) -> Vec<Vec<usize>> {
        let mut lower: Vec<Vec<usize>> = vec![vec![]; poset.len()];
        let mut upper: Vec<Vec<usize>> = vec![vec![]; poset.len()];
        for &(a, b) in poset.covers() {
            upper[a].push(colors[b]);
            lower[b].push(colors[a]);
        }
        (0..poset.len())
            .map(|x| {
                lower[x].sort_unstable();
                upper[x].sort_unstable();
                let mut sig = vec![colors[x], lower[x].len()];
                sig.extend(&lower[x]);
                sig.push(usize::MAX);
                sig.extend(&upper[x]);
                sig
            })
            .collect()
    }

    let mut dict = BTreeMap::new();
    let mut cp = compress(&mut dict, base(p, label_p));
    let mut cq = compress(&mut dict, base(q, label_q));
    loop {
        let classes = dict.len();
        let mut next = BTreeMap::new();
        let np = compress(&mut next, round(p, &cp));
        let nq = compress(&mut next, round(q, &cq));
        // Refinement only splits classes; stop once the partition is stable.
        let stable = next.len() == classes;
        cp = np;
        cq = nq;
        dict = next;
        if stable {
            return (cp, cq);
        }
    }
}
