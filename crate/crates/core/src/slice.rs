//! Maps regarded as objects over their codomain: beat points of a map,
//! bp-retracts and cores over the base, fibers and fiber-homotopy classes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hom::enumerate;
use crate::map::MonotoneMap;
use crate::poset::{ElemSet, Poset};
use crate::reduce::{self, beat_points_in, BeatKind, Kinds, ReductionTrace, RemovalOrder};
use crate::stong::BeatPointReport;

/// A map `p: E -> B` with its fibers cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceMap {
    map: MonotoneMap,
    fibers: Vec<ElemSet>,
    image: ElemSet,
}

impl SliceMap {
    /// Rejects an empty total space.
    pub fn new(map: MonotoneMap) -> Result<Self> {
        if map.dom().is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(Self::build(map))
    }

    pub(crate) fn build(map: MonotoneMap) -> Self {
        let mut fibers = vec![map.dom().empty_set(); map.cod().len()];
        for (e, &b) in map.values().iter().enumerate() {
            fibers[b].insert(e);
        }
        let image = map.image();
        SliceMap { map, fibers, image }
    }

    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    pub fn total(&self) -> &Arc<Poset> {
        self.map.dom()
    }

    pub fn base(&self) -> &Arc<Poset> {
        self.map.cod()
    }

    pub fn apply(&self, e: usize) -> usize {
        self.map.apply(e)
    }

    pub fn values(&self) -> &[usize] {
        self.map.values()
    }

    /// `p^{-1}(b)` as a subset of `E`.
    pub fn fiber_set(&self, b: usize) -> &ElemSet {
        &self.fibers[b]
    }

    /// `p^{-1}(set)`.
    pub fn preimage(&self, set: &ElemSet) -> ElemSet {
        self.map.preimage(set)
    }

    pub fn image(&self) -> &ElemSet {
        &self.image
    }

    pub fn is_empty(&self) -> bool {
        self.total().is_empty()
    }

    pub fn is_surjective(&self) -> bool {
        self.image.count_ones(..) == self.base().len()
    }

    /// `p^op`, with `op:`-prefixed names.
    pub fn opposite(&self) -> SliceMap {
        Self::build(self.map.opposite())
    }

    /// `p` between the reversed orders, names kept.
    pub(crate) fn reversed(&self) -> SliceMap {
        Self::build(self.map.reversed())
    }

    /// Restriction to a subset of `E` (order and base unchanged).
    pub fn restrict_total(&self, keep: &ElemSet) -> SliceMap {
        let (_, inclusion) = self.total().sub_poset(keep);
        Self::build(self.map.after(&inclusion).expect("inclusion lands in E"))
    }

    /// Restriction `p^{-1}(W) -> W` over any subset `W` of the base.
    pub fn restrict_over(&self, over: &ElemSet) -> SliceMap {
        let keep = self.preimage(over);
        let (sub_e, _) = self.total().sub_poset(&keep);
        let (sub_b, _) = self.base().sub_poset(over);
        let mut local = vec![usize::MAX; self.base().len()];
        for (i, b) in over.ones().enumerate() {
            local[b] = i;
        }
        let values = keep.ones().map(|e| local[self.apply(e)]).collect();
        Self::build(MonotoneMap::new_unchecked(sub_e, sub_b, values))
    }
}

/// Beat points of the map: beat points of `E` whose witness shares the fiber.
pub type MapBeatPointReport = BeatPointReport;

pub fn map_beat_points(p: &SliceMap) -> MapBeatPointReport {
    let total = p.total();
    BeatPointReport::from_removals(&beat_points_in(total, &total.full_set(), Some(p.values()), Kinds::BOTH))
}

pub fn is_minimal_map(p: &SliceMap) -> bool {
    map_beat_points(p).is_empty()
}

/// The reduced map `p ∘ i` on the surviving subspace.
pub fn reduced_map(p: &SliceMap, trace: &ReductionTrace) -> SliceMap {
    SliceMap::build(p.map().after(trace.inclusion()).expect("inclusion lands in E"))
}

/// The smallest dbp-retract of `p`, reached by removing down beat points of
/// the map until none remain. The result does not depend on the order.
pub fn smallest_dbp_retract_of_map(p: &SliceMap) -> (SliceMap, ReductionTrace) {
    smallest_dbp_retract_of_map_with_order(p, &RemovalOrder::LowestIndex)
}

pub fn smallest_dbp_retract_of_map_with_order(p: &SliceMap, order: &RemovalOrder) -> (SliceMap, ReductionTrace) {
    run(p, Kinds::DOWN, order)
}

pub fn smallest_ubp_retract_of_map(p: &SliceMap) -> (SliceMap, ReductionTrace) {
    smallest_ubp_retract_of_map_with_order(p, &RemovalOrder::LowestIndex)
}

pub fn smallest_ubp_retract_of_map_with_order(p: &SliceMap, order: &RemovalOrder) -> (SliceMap, ReductionTrace) {
    run(p, Kinds::UP, order)
}

/// A core of `p`: down beat points first, then up, lowest index first.
pub fn map_core(p: &SliceMap) -> (SliceMap, ReductionTrace) {
    map_core_with_order(p, &RemovalOrder::DownFirst)
}

pub fn map_core_with_order(p: &SliceMap, order: &RemovalOrder) -> (SliceMap, ReductionTrace) {
    run(p, Kinds::BOTH, order)
}

fn run(p: &SliceMap, kinds: Kinds, order: &RemovalOrder) -> (SliceMap, ReductionTrace) {
    let trace = reduce::reduce(p.total(), Some(p.values()), kinds, order);
    (reduced_map(p, &trace), trace)
}

/// A removal sequence of down beat points of the map ending at `keep`, if
/// `keep` is a dbp-retract of `p`.
pub fn map_dbp_retract_trace(p: &SliceMap, keep: &ElemSet) -> Option<ReductionTrace> {
    reduce::reach(p.total(), Some(p.values()), BeatKind::Down, keep)
}

pub fn map_ubp_retract_trace(p: &SliceMap, keep: &ElemSet) -> Option<ReductionTrace> {
    reduce::reach(p.total(), Some(p.values()), BeatKind::Up, keep)
}

/// Re-executes removals, checking each is a beat point of the map at its turn.
pub fn replay_map_removals(p: &SliceMap, steps: &[(usize, BeatKind)]) -> Option<ReductionTrace> {
    reduce::replay(p.total(), Some(p.values()), steps)
}

/// Checks that `r: E -> E` is a retraction onto `keep` with `r <= Id` and
/// `p ∘ r = p`. Such an `r` exists exactly when `keep` is a dbp-retract of `p`.
pub fn certifies_dbp_retract(p: &SliceMap, keep: &ElemSet, r: &MonotoneMap) -> bool {
    **r.dom() == **p.total()
        && r.is_endomap()
        && r.below_identity()
        && r.image() == *keep
        && keep.ones().all(|a| r.apply(a) == a)
        && (0..p.total().len()).all(|e| p.apply(r.apply(e)) == p.apply(e))
}

/// The fiber `p^{-1}(b)` as a subspace of `E`.
pub fn fiber(p: &SliceMap, b: usize) -> Result<Arc<Poset>> {
    if b >= p.base().len() {
        return Err(Error::UnknownElement(format!("#{b}")));
    }
    Ok(p.total().sub_poset(p.fiber_set(b)).0)
}

pub fn fiber_named(p: &SliceMap, b: &str) -> Result<Arc<Poset>> {
    fiber(p, p.base().index_of(b)?)
}

/// Whether `f, g: E -> E'` over `B` (`q ∘ f = q ∘ g = p`) with `f|A = g|A`
/// are joined by a fence of maps over `B` fixing `A`.
pub fn are_fiber_homotopic(
    f: &MonotoneMap,
    g: &MonotoneMap,
    p: &SliceMap,
    q: &SliceMap,
    rel: &ElemSet,
    guard: usize,
) -> Result<bool> {
    for h in [f, g] {
        if **h.dom() != **p.total() || **h.cod() != **q.total() {
            return Err(Error::DomainMismatch);
        }
        if let Some(e) = (0..p.total().len()).find(|&e| q.apply(h.apply(e)) != p.apply(e)) {
            return Err(Error::NotOverBase(p.total().name(e).to_string()));
        }
    }
    if let Some(a) = rel.ones().find(|&a| f.apply(a) != g.apply(a)) {
        return Err(Error::PreconditionViolated(format!(
            "maps differ on the fixed point {}",
            p.total().name(a)
        )));
    }
    if f == g {
        return Ok(true);
    }
    let allowed: Vec<ElemSet> = (0..p.total().len())
        .map(|e| {
            if rel.contains(e) {
                let mut s = q.total().empty_set();
                s.insert(f.apply(e));
                s
            } else {
                q.fiber_set(p.apply(e)).clone()
            }
        })
        .collect();
    let hom = enumerate(p.total(), q.total(), &allowed, guard)?;
    let (i, j) = (
        hom.position(f.values()).expect("f is enumerated"),
        hom.position(g.values()).expect("g is enumerated"),
    );
    Ok(hom
        .comparability_components()
        .iter()
        .any(|c| c.contains(&i) && c.contains(&j)))
}

/// `p^{-1}(C) -> C` for a connected component `C` of `B`. The result may be
/// empty when `p` misses `C`.
pub fn restrict_over_component(p: &SliceMap, component: &ElemSet) -> Result<SliceMap> {
    let is_component = p
        .base()
        .components()
        .iter()
        .any(|c| c.len() == component.count_ones(..) && c.iter().all(|&b| component.contains(b)));
    if !is_component {
        return Err(Error::NotAComponent);
    }
    if component.count_ones(..) == p.base().len() {
        return Ok(p.clone());
    }
    Ok(p.restrict_over(component))
}
