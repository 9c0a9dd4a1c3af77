//! Stong's homotopy theory of finite spaces: beat points, cores, bp-retracts,
//! the stabilised iterate `f^∞`, and homotopy classes of maps via fences.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hom::{hom_poset, HomPoset};
use crate::iso::find_isomorphism;
use crate::map::MonotoneMap;
use crate::poset::{ElemSet, Poset};
use crate::reduce::{self, beat_points_in, Kinds};

pub use crate::reduce::{BeatKind, ReductionTrace, Removal, RemovalOrder};

/// Down and up beat points with their witnesses `max Û_e` / `min F̂_e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeatPointReport {
    /// `(element, max Û_e)`, ordered by element.
    pub down: Vec<(usize, usize)>,
    /// `(element, min F̂_e)`, ordered by element.
    pub up: Vec<(usize, usize)>,
}

impl BeatPointReport {
    pub(crate) fn from_removals(removals: &[Removal]) -> Self {
        let mut down = vec![];
        let mut up = vec![];
        for r in removals {
            match r.kind {
                BeatKind::Down => down.push((r.element, r.witness)),
                BeatKind::Up => up.push((r.element, r.witness)),
            }
        }
        BeatPointReport { down, up }
    }

    pub fn down_elements(&self) -> Vec<usize> {
        self.down.iter().map(|&(e, _)| e).collect()
    }

    pub fn up_elements(&self) -> Vec<usize> {
        self.up.iter().map(|&(e, _)| e).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.down.is_empty() && self.up.is_empty()
    }

    pub fn is_down(&self, e: usize) -> bool {
        self.down.iter().any(|&(x, _)| x == e)
    }

    pub fn is_up(&self, e: usize) -> bool {
        self.up.iter().any(|&(x, _)| x == e)
    }
}

pub fn beat_points(x: &Poset) -> BeatPointReport {
    BeatPointReport::from_removals(&beat_points_in(x, &x.full_set(), None, Kinds::BOTH))
}

/// A minimal space has no beat points.
pub fn is_minimal_space(x: &Poset) -> bool {
    beat_points(x).is_empty()
}

fn nonempty(x: &Poset) -> Result<()> {
    if x.is_empty() {
        Err(Error::EmptyPoset)
    } else {
        Ok(())
    }
}

/// A core of `x`, removing the lowest-indexed beat point each step.
pub fn core(x: &Arc<Poset>) -> Result<ReductionTrace> {
    core_with_order(x, &RemovalOrder::LowestIndex)
}

pub fn core_with_order(x: &Arc<Poset>, order: &RemovalOrder) -> Result<ReductionTrace> {
    nonempty(x)?;
    Ok(reduce::reduce(x, None, Kinds::BOTH, order))
}

/// Contractible iff the core is a single point.
pub fn is_contractible(x: &Arc<Poset>) -> Result<bool> {
    Ok(core(x)?.result().len() == 1)
}

/// Two cores and an isomorphism between them.
#[derive(Debug, Clone)]
pub struct CoreIsomorphism {
    pub core_x: ReductionTrace,
    pub core_y: ReductionTrace,
    /// Indices into `core_y.result()` for each element of `core_x.result()`.
    pub iso: Vec<usize>,
}

/// Finite T0-spaces are homotopy equivalent iff their cores are isomorphic.
pub fn homotopy_equivalent(x: &Arc<Poset>, y: &Arc<Poset>) -> Result<Option<CoreIsomorphism>> {
    let core_x = core(x)?;
    let core_y = core(y)?;
    Ok(find_isomorphism(core_x.result(), core_y.result()).map(|iso| CoreIsomorphism { core_x, core_y, iso }))
}

/// `f^∞ = f^N` for the first `N` with `f^N = f^{N+1}`; requires `f <= Id`.
pub fn f_infinity(f: &MonotoneMap) -> Result<MonotoneMap> {
    if !f.is_endomap() {
        return Err(Error::NotEndomap);
    }
    let x = f.dom();
    if let Some(bad) = (0..x.len()).find(|&e| !x.leq(f.apply(e), e)) {
        return Err(Error::NotDescending(x.name(bad).to_string()));
    }
    let mut current = f.clone();
    loop {
        let next = f.after(&current)?;
        if next == current {
            return Ok(current);
        }
        current = next;
    }
}

/// The smallest dbp-retract and its idempotent `f <= Id` with `f(X) = A`.
pub fn smallest_dbp_retract(x: &Arc<Poset>) -> Result<(ReductionTrace, MonotoneMap)> {
    smallest_dbp_retract_with_order(x, &RemovalOrder::LowestIndex)
}

pub fn smallest_dbp_retract_with_order(x: &Arc<Poset>, order: &RemovalOrder) -> Result<(ReductionTrace, MonotoneMap)> {
    nonempty(x)?;
    let trace = reduce::reduce(x, None, Kinds::DOWN, order);
    let f = trace.idempotent();
    Ok((trace, f))
}

/// The smallest ubp-retract and its idempotent `f >= Id`.
pub fn smallest_ubp_retract(x: &Arc<Poset>) -> Result<(ReductionTrace, MonotoneMap)> {
    smallest_ubp_retract_with_order(x, &RemovalOrder::LowestIndex)
}

pub fn smallest_ubp_retract_with_order(x: &Arc<Poset>, order: &RemovalOrder) -> Result<(ReductionTrace, MonotoneMap)> {
    nonempty(x)?;
    let trace = reduce::reduce(x, None, Kinds::UP, order);
    let f = trace.idempotent();
    Ok((trace, f))
}

/// A removal sequence from `x` down to `keep` using only down beat points, if
/// `keep` is a dbp-retract of `x`.
pub fn dbp_retract_trace(x: &Arc<Poset>, keep: &ElemSet) -> Option<ReductionTrace> {
    reduce::reach(x, None, BeatKind::Down, keep)
}

pub fn ubp_retract_trace(x: &Arc<Poset>, keep: &ElemSet) -> Option<ReductionTrace> {
    reduce::reach(x, None, BeatKind::Up, keep)
}

/// Re-executes a recorded removal sequence, checking legality of every step.
pub fn replay_removals(x: &Arc<Poset>, steps: &[(usize, BeatKind)]) -> Option<ReductionTrace> {
    reduce::replay(x, None, steps)
}

/// Every dbp-retract of `x` (as element subsets, sorted). Exponential in the
/// worst case; meant for small posets.
pub fn all_dbp_retracts(x: &Arc<Poset>) -> Vec<ElemSet> {
    all_retracts(x, BeatKind::Down)
}

pub fn all_ubp_retracts(x: &Arc<Poset>) -> Vec<ElemSet> {
    all_retracts(x, BeatKind::Up)
}

fn all_retracts(x: &Arc<Poset>, kind: BeatKind) -> Vec<ElemSet> {
    let kinds = match kind {
        BeatKind::Down => Kinds::DOWN,
        BeatKind::Up => Kinds::UP,
    };
    let key = |s: &ElemSet| s.ones().collect::<Vec<_>>();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut stack = vec![x.full_set()];
    seen.insert(key(&stack[0]));
    let mut out = vec![];
    while let Some(alive) = stack.pop() {
        for r in beat_points_in(x, &alive, None, kinds) {
            let mut next = alive.clone();
            next.set(r.element, false);
            if seen.insert(key(&next)) {
                stack.push(next);
            }
        }
        out.push(alive);
    }
    out.sort_by_key(|s| key(s));
    out
}

/// Homotopy classes of maps `X -> Y`: components of the comparability graph
/// of the hom-poset (fence criterion).
#[derive(Debug, Clone)]
pub struct HomotopyClasses {
    pub hom: HomPoset,
    /// Indices into `hom`, one vector per class.
    pub classes: Vec<Vec<usize>>,
}

impl HomotopyClasses {
    pub fn class_of(&self, map_index: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&map_index))
            .expect("every map lies in a class")
    }
}

pub fn homotopy_classes(x: &Arc<Poset>, y: &Arc<Poset>, guard: usize) -> Result<HomotopyClasses> {
    let hom = hom_poset(x, y, guard)?;
    let classes = hom.comparability_components();
    Ok(HomotopyClasses { hom, classes })
}
