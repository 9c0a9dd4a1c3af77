//! Finite T0-spaces as explicit partial orders.
//!
//! A finite T0 Alexandroff space and a finite poset are the same object: the
//! minimal open set of `x` is the down-set `U_x`, the closure of `x` is the
//! up-set `F_x`. Both are stored as bitset rows so that every condition the
//! engine evaluates reduces to set intersections.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;

/// A set of element indices of some poset.
pub type ElemSet = FixedBitSet;

/// Which way an order-theoretic query looks: towards smaller or larger elements.
///
/// `Up` answers every query as if asked in the opposite poset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Down,
    Up,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
        }
    }
}

#[derive(Clone)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    down: Vec<ElemSet>,
    up: Vec<ElemSet>,
    covers: Vec<(usize, usize)>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.down == other.down
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.names[a], self.names[b]))
            .collect();
        f.debug_struct("Poset")
            .field("elements", &self.names)
            .field("covers", &covers)
            .finish()
    }
}

fn check_names(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    Ok(index)
}

impl Poset {
    /// Builds a poset from element names and generating pairs `lower < upper`.
    ///
    /// The order is the reflexive-transitive closure of the pairs; pairs need
    /// not be covers. Fails if the closure is not antisymmetric.
    pub fn new<S: AsRef<str>>(names: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let index = check_names(&names)?;
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        for (lo, hi) in pairs {
            let lo = lookup(&index, lo.as_ref())?;
            let hi = lookup(&index, hi.as_ref())?;
            idx_pairs.push((lo, hi));
        }
        Self::from_generators(names, &idx_pairs)
    }

    /// Same as [`Poset::new`] with generating pairs given by index.
    pub fn from_generators(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let index = check_names(&names)?;
        let n = names.len();
        let mut down: Vec<ElemSet> = (0..n)
            .map(|i| {
                let mut s = ElemSet::with_capacity(n);
                s.insert(i);
                s
            })
            .collect();
        for &(lo, hi) in pairs {
            if lo >= n || hi >= n {
                return Err(Error::UnknownElement(format!("#{}", lo.max(hi))));
            }
            down[hi].insert(lo);
        }
        // Warshall on bitset rows: if k <= j then everything below k is below j.
        for k in 0..n {
            let row_k = down[k].clone();
            for row in down.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for x in 0..n {
            for y in down[x].ones() {
                if y != x && down[y].contains(x) {
                    return Err(Error::CycleDetected(names[y].clone(), names[x].clone()));
                }
            }
        }
        Ok(Self::from_closed_down_sets(names, index, down))
    }

    /// Builds a poset from an order predicate, validating the partial order axioms.
    pub fn from_relation(names: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let index = check_names(&names)?;
        let n = names.len();
        let mut down = vec![ElemSet::with_capacity(n); n];
        for (y, row) in down.iter_mut().enumerate() {
            for x in 0..n {
                if leq(x, y) {
                    row.insert(x);
                }
            }
        }
        for x in 0..n {
            if !down[x].contains(x) {
                return Err(Error::PreconditionViolated(format!(
                    "relation is not reflexive at `{}`",
                    names[x]
                )));
            }
            for y in down[x].ones() {
                if y != x && down[y].contains(x) {
                    return Err(Error::CycleDetected(names[y].clone(), names[x].clone()));
                }
                if !down[y].is_subset(&down[x]) {
                    return Err(Error::PreconditionViolated(format!(
                        "relation is not transitive through `{}` <= `{}`",
                        names[y], names[x]
                    )));
                }
            }
        }
        Ok(Self::from_closed_down_sets(names, index, down))
    }

    fn from_closed_down_sets(names: Vec<String>, index: HashMap<String, usize>, down: Vec<ElemSet>) -> Self {
        let n = names.len();
        let mut up = vec![ElemSet::with_capacity(n); n];
        for (y, row) in down.iter().enumerate() {
            for x in row.ones() {
                up[x].insert(y);
            }
        }
        // x is covered by y iff x < y and nothing strictly between them.
        let mut covers = Vec::new();
        for (x, above) in up.iter().enumerate() {
            for y in above.ones() {
                if y == x {
                    continue;
                }
                let between = above.ones().any(|z| z != x && z != y && down[y].contains(z));
                if !between {
                    covers.push((x, y));
                }
            }
        }
        Poset {
            names,
            index,
            down,
            up,
            covers,
        }
    }

    pub fn singleton(name: &str) -> Self {
        Poset::new::<&str>(&[name], &[]).expect("singleton is a poset")
    }

    pub fn empty() -> Self {
        Poset::new::<&str>(&[], &[]).expect("empty poset")
    }

    /// The chain `0 < 1 < ... < n-1` with elements named by their position.
    pub fn chain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_generators(names, &pairs).expect("chain is a poset")
    }

    pub fn antichain(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::from_generators(names, &[]).expect("antichain is a poset")
    }

    /// The Sierpinski space `{0 < 1}`.
    pub fn sierpinski() -> Self {
        Self::chain(2)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        lookup(&self.index, name)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.down[y].contains(x)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `U_x`, the minimal open neighbourhood of `x`.
    pub fn down_set(&self, x: usize) -> &ElemSet {
        &self.down[x]
    }

    /// `F_x`, the closure of `x`.
    pub fn up_set(&self, x: usize) -> &ElemSet {
        &self.up[x]
    }

    /// `Û_x = U_x - {x}`.
    pub fn strict_down_set(&self, x: usize) -> ElemSet {
        let mut s = self.down[x].clone();
        s.set(x, false);
        s
    }

    /// `F̂_x = F_x - {x}`.
    pub fn strict_up_set(&self, x: usize) -> ElemSet {
        let mut s = self.up[x].clone();
        s.set(x, false);
        s
    }

    /// `U_x` for `Direction::Down`, `F_x` for `Direction::Up`.
    pub fn cone(&self, x: usize, dir: Direction) -> &ElemSet {
        match dir {
            Direction::Down => &self.down[x],
            Direction::Up => &self.up[x],
        }
    }

    pub fn strict_cone(&self, x: usize, dir: Direction) -> ElemSet {
        match dir {
            Direction::Down => self.strict_down_set(x),
            Direction::Up => self.strict_up_set(x),
        }
    }

    /// Name-based variants of the set queries.
    pub fn down_set_of(&self, name: &str) -> Result<Vec<&str>> {
        let x = self.index_of(name)?;
        Ok(self.names_of(&self.down[x]))
    }

    pub fn up_set_of(&self, name: &str) -> Result<Vec<&str>> {
        let x = self.index_of(name)?;
        Ok(self.names_of(&self.up[x]))
    }

    pub fn names_of(&self, set: &ElemSet) -> Vec<&str> {
        set.ones().map(|i| self.names[i].as_str()).collect()
    }

    pub fn set_of(&self, names: &[&str]) -> Result<ElemSet> {
        let mut s = ElemSet::with_capacity(self.len());
        for n in names {
            s.insert(self.index_of(n)?);
        }
        Ok(s)
    }

    pub fn full_set(&self) -> ElemSet {
        let mut s = ElemSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    pub fn empty_set(&self) -> ElemSet {
        ElemSet::with_capacity(self.len())
    }

    /// Covering pairs `(lower, upper)` in lexicographic index order.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// The maximum of `set` in the induced order, if there is one.
    pub fn maximum_of(&self, set: &ElemSet) -> Option<usize> {
        set.ones().find(|&m| set.is_subset(&self.down[m]))
    }

    pub fn minimum_of(&self, set: &ElemSet) -> Option<usize> {
        set.ones().find(|&m| set.is_subset(&self.up[m]))
    }

    /// Maximum (`Down`) or minimum (`Up`) of `set`, i.e. the top of `set`
    /// as seen looking in direction `dir`.
    pub fn extreme_of(&self, set: &ElemSet, dir: Direction) -> Option<usize> {
        match dir {
            Direction::Down => self.maximum_of(set),
            Direction::Up => self.minimum_of(set),
        }
    }

    pub fn maximum(&self) -> Option<usize> {
        self.maximum_of(&self.full_set())
    }

    pub fn minimum(&self) -> Option<usize> {
        self.minimum_of(&self.full_set())
    }

    pub fn is_minimal(&self, x: usize) -> bool {
        self.down[x].count_ones(..) == 1
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.up[x].count_ones(..) == 1
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_minimal(x)).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_maximal(x)).collect()
    }

    /// A linear extension: every element appears after everything below it.
    /// Ties are broken by index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| (self.down[x].count_ones(..), x));
        order
    }

    /// Length of the longest chain ending at each element.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0usize; self.len()];
        for x in self.linear_extension() {
            level[x] = self.strict_down_set(x).ones().map(|y| level[y] + 1).max().unwrap_or(0);
        }
        level
    }

    /// Length of the longest chain starting at each element.
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.len()];
        for x in self.linear_extension().into_iter().rev() {
            depth[x] = self.strict_up_set(x).ones().map(|y| depth[y] + 1).max().unwrap_or(0);
        }
        depth
    }

    /// `h(P)`: the number of edges in a longest chain. The empty poset has height 0.
    pub fn height(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Opposite poset with elements renamed `op:x` (and `op:op:x` folded back to `x`).
    pub fn opposite(&self) -> Poset {
        let names = self.names.iter().map(|n| opposite_name(n)).collect();
        self.reversed_with_names(names)
    }

    /// Opposite poset keeping element names.
    pub fn reversed(&self) -> Poset {
        self.reversed_with_names(self.names.clone())
    }

    fn reversed_with_names(&self, names: Vec<String>) -> Poset {
        let index = check_names(&names).expect("renaming preserves distinctness");
        Self::from_closed_down_sets(names, index, self.up.clone())
    }

    /// Induced order on `keep`, together with the inclusion map.
    pub fn sub_poset(self: &Arc<Self>, keep: &ElemSet) -> (Arc<Poset>, MonotoneMap) {
        let kept: Vec<usize> = keep.ones().filter(|&x| x < self.len()).collect();
        let sub = Arc::new(self.restrict_to(&kept));
        let inclusion = MonotoneMap::new_unchecked(sub.clone(), self.clone(), kept);
        (sub, inclusion)
    }

    /// Induced sub-poset on the listed elements, in the listed order.
    pub fn restrict_to(&self, elems: &[usize]) -> Poset {
        let names: Vec<String> = elems.iter().map(|&x| self.names[x].clone()).collect();
        let index = check_names(&names).expect("sub-poset of distinct names");
        let k = elems.len();
        let down = elems
            .iter()
            .map(|&y| {
                let mut row = ElemSet::with_capacity(k);
                for (i, &x) in elems.iter().enumerate() {
                    if self.leq(x, y) {
                        row.insert(i);
                    }
                }
                row
            })
            .collect();
        Self::from_closed_down_sets(names, index, down)
    }

    /// Product order; element `(p,q)` has index `p * |Q| + q`.
    pub fn product(self: &Arc<Self>, other: &Arc<Poset>) -> (Arc<Poset>, MonotoneMap, MonotoneMap) {
        let m = other.len();
        let mut names = Vec::with_capacity(self.len() * m);
        for a in &self.names {
            for b in &other.names {
                names.push(pair_name(a, b));
            }
        }
        let prod = Poset::from_relation(names, |x, y| self.leq(x / m, y / m) && other.leq(x % m, y % m))
            .expect("product of posets is a poset");
        let prod = Arc::new(prod);
        let first = (0..prod.len()).map(|x| x / m).collect();
        let second = (0..prod.len()).map(|x| x % m).collect();
        let pi1 = MonotoneMap::new_unchecked(prod.clone(), self.clone(), first);
        let pi2 = MonotoneMap::new_unchecked(prod.clone(), other.clone(), second);
        (prod, pi1, pi2)
    }

    /// Connected components of the comparability graph, each sorted, ordered
    /// by smallest element.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            comp[start] = id;
            let mut members = vec![];
            while let Some(x) = stack.pop() {
                members.push(x);
                for y in self.down[x].ones().chain(self.up[x].ones()) {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Every labelled partial order on `n` points named `0..n`. Exponential;
    /// intended for `n <= 4`.
    pub fn all_labelled(n: usize) -> Vec<Poset> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << pairs.len()) {
            let rel = |x: usize, y: usize| {
                x == y
                    || pairs
                        .iter()
                        .position(|&p| p == (x, y))
                        .is_some_and(|k| mask >> k & 1 == 1)
            };
            if let Ok(p) = Poset::from_relation(names.clone(), rel) {
                out.push(p);
            }
        }
        out
    }
}

fn lookup(index: &HashMap<String, usize>, name: &str) -> Result<usize> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| Error::UnknownElement(name.to_string()))
}

pub(crate) fn opposite_name(name: &str) -> String {
    match name.strip_prefix("op:") {
        Some(rest) => rest.to_string(),
        None => format!("op:{name}"),
    }
}

pub(crate) fn pair_name(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Poset {
        Poset::new(&["(a,0)", "(b,0)", "(a,1)"], &[("(a,0)", "(b,0)"), ("(a,0)", "(a,1)")]).unwrap()
    }

    #[test]
    fn sierpinski_and_singleton() {
        let s = Poset::new(&["0", "1"], &[("0", "1")]).unwrap();
        assert!(s.leq(0, 1) && !s.leq(1, 0));
        assert_eq!(s.covers(), &[(0, 1)]);
        let one = Poset::singleton("x");
        assert_eq!(one.len(), 1);
        assert!(one.leq(0, 0));
        assert_eq!(one.height(), 0);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Poset::new(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, Error::CycleDetected(..)));
    }

    #[test]
    fn duplicate_and_unknown_names() {
        assert_eq!(
            Poset::new::<&str>(&["a", "a"], &[]).unwrap_err(),
            Error::DuplicateName("a".into())
        );
        assert_eq!(
            Poset::new(&["a"], &[("a", "z")]).unwrap_err(),
            Error::UnknownElement("z".into())
        );
    }

    #[test]
    fn down_set_of_e1() {
        let e = e1();
        assert_eq!(e.down_set_of("(b,0)").unwrap(), vec!["(a,0)", "(b,0)"]);
        for x in e.minimal_elements() {
            assert_eq!(e.strict_down_set(x).count_ones(..), 0);
        }
        assert!(matches!(e.down_set_of("zz"), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn opposite_is_an_involution() {
        let s = Poset::sierpinski();
        let sop = s.opposite();
        assert_eq!(sop.names(), &["op:0", "op:1"]);
        assert!(sop.leq(1, 0));
        assert_eq!(sop.opposite(), s);
        assert_eq!(s.reversed().reversed(), s);
    }

    #[test]
    fn product_of_chains() {
        let s = Arc::new(Poset::sierpinski());
        let (ss, pi1, pi2) = s.product(&s);
        assert_eq!(ss.len(), 4);
        assert_eq!(ss.name(ss.minimum().unwrap()), "(0,0)");
        assert_eq!(ss.name(ss.maximum().unwrap()), "(1,1)");
        assert_eq!(pi1.values(), &[0, 0, 1, 1]);
        assert_eq!(pi2.values(), &[0, 1, 0, 1]);
    }

    #[test]
    fn sub_poset_of_e1() {
        let e = Arc::new(e1());
        let keep = e.set_of(&["(a,0)", "(b,0)"]).unwrap();
        let (sub, inc) = e.sub_poset(&keep);
        assert_eq!(sub.names(), &["(a,0)", "(b,0)"]);
        assert_eq!(sub.covers(), &[(0, 1)]);
        assert_eq!(inc.values(), &[0, 1]);
        let (all, _) = e.sub_poset(&e.full_set());
        assert_eq!(*all, *e);
    }

    #[test]
    fn components_and_height() {
        assert_eq!(Poset::antichain(2).components().len(), 2);
        assert_eq!(Poset::empty().components().len(), 0);
        assert_eq!(Poset::chain(4).height(), 3);
        assert!(e1().is_connected());
    }

    #[test]
    fn labelled_poset_counts() {
        // OEIS A001035: 1, 1, 3, 19, 219
        let counts: Vec<usize> = (0..=4).map(|n| Poset::all_labelled(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 19, 219]);
    }
}
