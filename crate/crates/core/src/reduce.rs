//! Successive beat-point removal, shared by the absolute theory (cores,
//! dbp/ubp-retracts of a space) and the theory over a base (beat points of a
//! map must keep their witness in the same fiber).

use std::sync::Arc;

use crate::map::MonotoneMap;
use crate::poset::{Direction, ElemSet, Poset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BeatKind {
    Down,
    Up,
}

impl BeatKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BeatKind::Down => "down",
            BeatKind::Up => "up",
        }
    }

    pub(crate) fn direction(self) -> Direction {
        match self {
            BeatKind::Down => Direction::Down,
            BeatKind::Up => Direction::Up,
        }
    }
}

/// Which beat point to remove next when several are available.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum RemovalOrder {
    /// Lowest element index; down before up at equal index.
    #[default]
    LowestIndex,
    /// Any down beat point before any up beat point; lowest index within a kind.
    DownFirst,
    /// Lowest rank first (`rank[e]`), down before up at equal rank.
    Ranked(Vec<usize>),
}

/// Which kinds of beat points may be removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Kinds {
    pub down: bool,
    pub up: bool,
}

impl Kinds {
    pub const DOWN: Kinds = Kinds { down: true, up: false };
    pub const UP: Kinds = Kinds { down: false, up: true };
    pub const BOTH: Kinds = Kinds { down: true, up: true };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Removal {
    pub element: usize,
    pub kind: BeatKind,
    /// `max Û_e` (down) or `min F̂_e` (up) at the time of removal.
    pub witness: usize,
}

/// The record of a beat-point reduction `X = X_0 ⊇ X_1 ⊇ ... ⊇ X_n`.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    original: Arc<Poset>,
    removed: Vec<Removal>,
    kept: ElemSet,
    result: Arc<Poset>,
    retraction: MonotoneMap,
    inclusion: MonotoneMap,
}

impl ReductionTrace {
    pub fn original(&self) -> &Arc<Poset> {
        &self.original
    }

    /// Removals in order; indices refer to the original poset.
    pub fn removed(&self) -> &[Removal] {
        &self.removed
    }

    /// Surviving elements as a subset of the original poset.
    pub fn kept(&self) -> &ElemSet {
        &self.kept
    }

    pub fn result(&self) -> &Arc<Poset> {
        &self.result
    }

    /// Composite retraction from the original poset onto the result.
    pub fn retraction(&self) -> &MonotoneMap {
        &self.retraction
    }

    pub fn inclusion(&self) -> &MonotoneMap {
        &self.inclusion
    }

    /// `i ∘ r`, the idempotent endomap of the original poset with image the result.
    pub fn idempotent(&self) -> MonotoneMap {
        self.inclusion
            .after(&self.retraction)
            .expect("retraction lands in the result")
    }

    pub fn removed_names(&self) -> Vec<(&str, BeatKind)> {
        self.removed
            .iter()
            .map(|r| (self.original.name(r.element), r.kind))
            .collect()
    }
}

/// Witness making `e` a beat point of `kind` inside `alive`, if any. With a
/// `base`, the witness must lie in the fiber of `e`.
pub(crate) fn beat_witness(
    poset: &Poset,
    alive: &ElemSet,
    base: Option<&[usize]>,
    e: usize,
    kind: BeatKind,
) -> Option<usize> {
    let dir = kind.direction();
    let mut hat = poset.cone(e, dir).clone();
    hat.intersect_with(alive);
    hat.set(e, false);
    let w = poset.extreme_of(&hat, dir)?;
    match base {
        Some(values) if values[w] != values[e] => None,
        _ => Some(w),
    }
}

pub(crate) fn beat_points_in(poset: &Poset, alive: &ElemSet, base: Option<&[usize]>, kinds: Kinds) -> Vec<Removal> {
    let mut out = Vec::new();
    for e in alive.ones() {
        for kind in [BeatKind::Down, BeatKind::Up] {
            let allowed = match kind {
                BeatKind::Down => kinds.down,
                BeatKind::Up => kinds.up,
            };
            if !allowed {
                continue;
            }
            if let Some(witness) = beat_witness(poset, alive, base, e, kind) {
                out.push(Removal {
                    element: e,
                    kind,
                    witness,
                });
            }
        }
    }
    out
}

fn pick(candidates: &[Removal], order: &RemovalOrder) -> Removal {
    let chosen = match order {
        RemovalOrder::LowestIndex => candidates.iter().min_by_key(|r| (r.element, r.kind)),
        RemovalOrder::DownFirst => candidates.iter().min_by_key(|r| (r.kind, r.element)),
        RemovalOrder::Ranked(rank) => candidates.iter().min_by_key(|r| (rank[r.element], r.kind, r.element)),
    };
    *chosen.expect("nonempty candidate list")
}

/// Removes beat points of the allowed kinds until none remain.
pub(crate) fn reduce(poset: &Arc<Poset>, base: Option<&[usize]>, kinds: Kinds, order: &RemovalOrder) -> ReductionTrace {
    if let RemovalOrder::Ranked(rank) = order {
        assert_eq!(rank.len(), poset.len(), "rank must cover every element");
    }
    let mut alive = poset.full_set();
    let mut target: Vec<usize> = (0..poset.len()).collect();
    let mut removed = Vec::new();
    loop {
        let candidates = beat_points_in(poset, &alive, base, kinds);
        if candidates.is_empty() {
            break;
        }
        let r = pick(&candidates, order);
        alive.set(r.element, false);
        for t in target.iter_mut() {
            if *t == r.element {
                *t = r.witness;
            }
        }
        removed.push(r);
    }
    finish(poset, removed, alive, target)
}

fn finish(poset: &Arc<Poset>, removed: Vec<Removal>, kept: ElemSet, target: Vec<usize>) -> ReductionTrace {
    let (result, inclusion) = poset.sub_poset(&kept);
    let mut local = vec![usize::MAX; poset.len()];
    for (i, x) in kept.ones().enumerate() {
        local[x] = i;
    }
    let values = target.iter().map(|&t| local[t]).collect();
    let retraction = MonotoneMap::new_unchecked(poset.clone(), result.clone(), values);
    ReductionTrace {
        original: poset.clone(),
        removed,
        kept,
        result,
        retraction,
        inclusion,
    }
}

/// Replays a given removal sequence, checking each step is a legal beat point
/// of the stated kind. Returns `None` at the first illegal step.
pub(crate) fn replay(
    poset: &Arc<Poset>,
    base: Option<&[usize]>,
    steps: &[(usize, BeatKind)],
) -> Option<ReductionTrace> {
    let mut alive = poset.full_set();
    let mut target: Vec<usize> = (0..poset.len()).collect();
    let mut removed = Vec::new();
    for &(e, kind) in steps {
        if !alive.contains(e) {
            return None;
        }
        let witness = beat_witness(poset, &alive, base, e, kind)?;
        alive.set(e, false);
        for t in target.iter_mut() {
            if *t == e {
                *t = witness;
            }
        }
        removed.push(Removal {
            element: e,
            kind,
            witness,
        });
    }
    Some(finish(poset, removed, alive, target))
}

/// Greedy test that `keep` is reachable by removing beat points of `kind`
/// outside `keep`. Greedy choice is safe: if `A` is a bp-retract of `Y` then
/// it is one of every intermediate `X` with `A ⊆ X ⊆ Y` reached by such removals.
pub(crate) fn reach(
    poset: &Arc<Poset>,
    base: Option<&[usize]>,
    kind: BeatKind,
    keep: &ElemSet,
) -> Option<ReductionTrace> {
    let mut alive = poset.full_set();
    let mut target: Vec<usize> = (0..poset.len()).collect();
    let mut removed = Vec::new();
    loop {
        if alive == *keep {
            return Some(finish(poset, removed, alive, target));
        }
        let next = alive
            .ones()
            .filter(|&e| !keep.contains(e))
            .find_map(|e| beat_witness(poset, &alive, base, e, kind).map(|w| (e, w)))?;
        let (e, witness) = next;
        alive.set(e, false);
        for t in target.iter_mut() {
            if *t == e {
                *t = witness;
            }
        }
        removed.push(Removal {
            element: e,
            kind,
            witness,
        });
    }
}
