//! Grothendieck (op)fibrations between posets, their transport functors, the
//! Grothendieck construction and local triviality.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::iso::find_isomorphism_over_base_budgeted;
use crate::map::MonotoneMap;
use crate::poset::{pair_name, Direction, ElemSet, Poset};
use crate::slice::{fiber, SliceMap};

/// Why a cartesian or cocartesian lift does not exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftFailure {
    NoMaximum,
    /// The maximum exists but lies over another base point.
    MaximumOutsideFiber(usize),
    NoMinimum,
    MinimumOutsideFiber(usize),
}

impl LiftFailure {
    pub fn as_str(&self) -> &'static str {
        match self {
            LiftFailure::NoMaximum => "no_maximum",
            LiftFailure::MaximumOutsideFiber(_) => "maximum_outside_fiber",
            LiftFailure::NoMinimum => "no_minimum",
            LiftFailure::MinimumOutsideFiber(_) => "minimum_outside_fiber",
        }
    }
}

/// The lifted point, or the reason there is none.
pub type Lift = std::result::Result<usize, LiftFailure>;

/// A pair `(e, b)` without a (co)cartesian lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftWitness {
    pub element: usize,
    pub target: usize,
    pub reason: LiftFailure,
}

impl LiftWitness {
    pub fn describe(&self, p: &SliceMap) -> String {
        let e = p.total().name(self.element);
        let b = p.base().name(self.target);
        match self.reason {
            LiftFailure::NoMaximum => format!("cartesian lift missing at ({e}, {b}): no maximum"),
            LiftFailure::MaximumOutsideFiber(m) => format!(
                "cartesian lift missing at ({e}, {b}): maximum {} lies outside the fiber",
                p.total().name(m)
            ),
            LiftFailure::NoMinimum => format!("cocartesian lift missing at ({e}, {b}): no minimum"),
            LiftFailure::MinimumOutsideFiber(m) => format!(
                "cocartesian lift missing at ({e}, {b}): minimum {} lies outside the fiber",
                p.total().name(m)
            ),
        }
    }
}

/// `U_e ∩ p^{-1}(U_b)` (`Down`) or `F_e ∩ p^{-1}(F_b)` (`Up`).
fn lift_set(p: &SliceMap, e: usize, b: usize, dir: Direction) -> ElemSet {
    let mut set = p.preimage(p.base().cone(b, dir));
    set.intersect_with(p.total().cone(e, dir));
    set
}

fn lift(p: &SliceMap, e: usize, b: usize, dir: Direction) -> Result<Lift> {
    let pe = p.apply(e);
    if !p.base().cone(pe, dir).contains(b) {
        let rel = if dir == Direction::Down { "<=" } else { ">=" };
        return Err(Error::PreconditionViolated(format!(
            "{} {rel} {} does not hold",
            p.base().name(b),
            p.base().name(pe)
        )));
    }
    let set = lift_set(p, e, b, dir);
    let (none, outside): (LiftFailure, fn(usize) -> LiftFailure) = match dir {
        Direction::Down => (LiftFailure::NoMaximum, LiftFailure::MaximumOutsideFiber),
        Direction::Up => (LiftFailure::NoMinimum, LiftFailure::MinimumOutsideFiber),
    };
    Ok(match p.total().extreme_of(&set, dir) {
        None => Err(none),
        Some(m) if p.apply(m) != b => Err(outside(m)),
        Some(m) => Ok(m),
    })
}

/// The cartesian lift of `b <= p(e)` at `e`: `max(U_e ∩ p^{-1}(U_b))` when it
/// exists and lies over `b`.
pub fn cartesian_lift(p: &SliceMap, e: usize, b: usize) -> Result<Lift> {
    lift(p, e, b, Direction::Down)
}

/// The cocartesian lift of `p(e) <= b` at `e`: `min(F_e ∩ p^{-1}(F_b))`.
pub fn cocartesian_lift(p: &SliceMap, e: usize, b: usize) -> Result<Lift> {
    lift(p, e, b, Direction::Up)
}

/// All failing `(e, b)` pairs in index order.
fn failures(p: &SliceMap, dir: Direction, stop_at_first: bool) -> Vec<LiftWitness> {
    let mut out = vec![];
    for e in 0..p.total().len() {
        for b in p.base().cone(p.apply(e), dir).ones() {
            if let Err(reason) = lift(p, e, b, dir).expect("b is related to p(e)") {
                out.push(LiftWitness {
                    element: e,
                    target: b,
                    reason,
                });
                if stop_at_first {
                    return out;
                }
            }
        }
    }
    out
}

/// The first pair without a cartesian lift, if any.
pub fn fibration_failure(p: &SliceMap) -> Option<LiftWitness> {
    failures(p, Direction::Down, true).pop()
}

pub fn opfibration_failure(p: &SliceMap) -> Option<LiftWitness> {
    failures(p, Direction::Up, true).pop()
}

pub fn is_grothendieck_fibration(p: &SliceMap) -> bool {
    fibration_failure(p).is_none()
}

pub fn is_grothendieck_opfibration(p: &SliceMap) -> bool {
    opfibration_failure(p).is_none()
}

pub fn is_bifibration(p: &SliceMap) -> bool {
    is_grothendieck_fibration(p) && is_grothendieck_opfibration(p)
}

#[derive(Debug, Clone)]
pub struct GrothendieckReport {
    pub is_fibration: bool,
    pub is_opfibration: bool,
    pub fibration_witness: Option<LiftWitness>,
    pub opfibration_witness: Option<LiftWitness>,
    /// Every failing pair, in index order.
    pub fibration_failures: Vec<LiftWitness>,
    pub opfibration_failures: Vec<LiftWitness>,
    pub alpha: Option<PosetFunctor>,
    pub beta: Option<PosetFunctor>,
}

impl GrothendieckReport {
    pub fn is_bifibration(&self) -> bool {
        self.is_fibration && self.is_opfibration
    }
}

pub fn classify_grothendieck(p: &SliceMap) -> GrothendieckReport {
    let fibration_failures = failures(p, Direction::Down, false);
    let opfibration_failures = failures(p, Direction::Up, false);
    let is_fibration = fibration_failures.is_empty();
    let is_opfibration = opfibration_failures.is_empty();
    let alpha = is_fibration.then(|| transport(p, Variance::Contravariant).expect("closed cleavage is functorial"));
    let beta = is_opfibration.then(|| transport(p, Variance::Covariant).expect("closed cleavage is functorial"));
    GrothendieckReport {
        is_fibration,
        is_opfibration,
        fibration_witness: fibration_failures.first().copied(),
        opfibration_witness: opfibration_failures.first().copied(),
        fibration_failures,
        opfibration_failures,
        alpha,
        beta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn as_str(self) -> &'static str {
        match self {
            Variance::Covariant => "covariant",
            Variance::Contravariant => "contravariant",
        }
    }
}

/// A functor from a poset to posets and monotone maps.
///
/// Transitions are keyed by related pairs `(b, b')` with `b <= b'`. A
/// covariant functor maps `D(b) -> D(b')`, a contravariant one `D(b') -> D(b)`.
#[derive(Clone, PartialEq)]
pub struct PosetFunctor {
    base: Arc<Poset>,
    variance: Variance,
    fibers: Vec<Arc<Poset>>,
    transitions: BTreeMap<(usize, usize), MonotoneMap>,
}

impl fmt::Debug for PosetFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PosetFunctor")
            .field("base", &self.base)
            .field("variance", &self.variance)
            .field("fibers", &self.fibers)
            .finish_non_exhaustive()
    }
}

impl PosetFunctor {
    /// Validates shapes, identities and functoriality. Every strictly related
    /// pair needs a transition; identity transitions may be omitted.
    pub fn new(
        base: Arc<Poset>,
        variance: Variance,
        fibers: Vec<Arc<Poset>>,
        given: Vec<((usize, usize), MonotoneMap)>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::FunctorialityViolated(msg));
        if fibers.len() != base.len() {
            return Err(Error::ArityMismatch {
                expected: base.len(),
                got: fibers.len(),
            });
        }
        let name = |b: usize| base.name(b).to_string();
        let mut transitions = BTreeMap::new();
        for ((lo, hi), t) in given {
            if !base.leq(lo, hi) {
                return bad(format!("{} <= {} is not a relation of the base", name(lo), name(hi)));
            }
            let (src, dst) = match variance {
                Variance::Covariant => (lo, hi),
                Variance::Contravariant => (hi, lo),
            };
            if **t.dom() != *fibers[src] || **t.cod() != *fibers[dst] {
                return bad(format!("transition {}<={} has the wrong fibers", name(lo), name(hi)));
            }
            if lo == hi && !t.is_identity() {
                return bad(format!("transition {0}<={0} is not the identity", name(lo)));
            }
            if transitions.insert((lo, hi), t).is_some() {
                return bad(format!("transition {}<={} given twice", name(lo), name(hi)));
            }
        }
        for (b, f) in fibers.iter().enumerate() {
            transitions
                .entry((b, b))
                .or_insert_with(|| MonotoneMap::identity(f.clone()));
        }
        for lo in 0..base.len() {
            for hi in base.up_set(lo).ones() {
                if !transitions.contains_key(&(lo, hi)) {
                    return bad(format!("missing transition {}<={}", name(lo), name(hi)));
                }
            }
        }
        let functor = PosetFunctor {
            base,
            variance,
            fibers,
            transitions,
        };
        functor.check_composition()?;
        Ok(functor)
    }

    fn check_composition(&self) -> Result<()> {
        for x in 0..self.base.len() {
            for y in self.base.up_set(x).ones() {
                for z in self.base.up_set(y).ones() {
                    let (xy, yz, xz) = (
                        &self.transitions[&(x, y)],
                        &self.transitions[&(y, z)],
                        &self.transitions[&(x, z)],
                    );
                    let composite = match self.variance {
                        Variance::Covariant => yz.after(xy),
                        Variance::Contravariant => xy.after(yz),
                    }
                    .expect("shapes checked");
                    if composite != *xz {
                        let n = |b: usize| self.base.name(b);
                        return Err(Error::FunctorialityViolated(format!(
                            "transitions along {} <= {} <= {} do not compose",
                            n(x),
                            n(y),
                            n(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The functor with the same value `fiber` at every point and identity transitions.
    pub fn constant(base: Arc<Poset>, fiber: Arc<Poset>) -> Self {
        let fibers = vec![fiber.clone(); base.len()];
        let id = MonotoneMap::identity(fiber);
        let transitions = (0..base.len())
            .flat_map(|b| (0..base.len()).map(move |c| (b, c)))
            .filter(|&(b, c)| base.lt(b, c))
            .map(|pair| (pair, id.clone()))
            .collect();
        Self::new(base, Variance::Covariant, fibers, transitions).expect("constant functor")
    }

    pub fn base(&self) -> &Arc<Poset> {
        &self.base
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn fiber(&self, b: usize) -> &Arc<Poset> {
        &self.fibers[b]
    }

    pub fn fibers(&self) -> &[Arc<Poset>] {
        &self.fibers
    }

    /// The transition for `b <= b'`, if they are related.
    pub fn transition(&self, b: usize, b2: usize) -> Option<&MonotoneMap> {
        self.transitions.get(&(b, b2))
    }

    /// All transitions keyed by related pairs, identities included.
    pub fn transitions(&self) -> impl Iterator<Item = ((usize, usize), &MonotoneMap)> {
        self.transitions.iter().map(|(&k, v)| (k, v))
    }

    /// The same data read over the reversed base and reversed fibers, which
    /// flips the variance.
    fn reversed(&self) -> PosetFunctor {
        let base = Arc::new(self.base.reversed());
        let fibers: Vec<Arc<Poset>> = self.fibers.iter().map(|f| Arc::new(f.reversed())).collect();
        let transitions = self
            .transitions
            .iter()
            .map(|(&(lo, hi), t)| {
                let (src, dst) = match self.variance {
                    Variance::Covariant => (lo, hi),
                    Variance::Contravariant => (hi, lo),
                };
                let m = MonotoneMap::new_unchecked(fibers[src].clone(), fibers[dst].clone(), t.values().to_vec());
                ((hi, lo), m)
            })
            .collect();
        PosetFunctor {
            base,
            variance: match self.variance {
                Variance::Covariant => Variance::Contravariant,
                Variance::Contravariant => Variance::Covariant,
            },
            fibers,
            transitions,
        }
    }
}

/// Fiber-local index of each point of `E`.
fn local_indices(p: &SliceMap) -> Vec<usize> {
    let mut local = vec![0; p.total().len()];
    for b in 0..p.base().len() {
        for (i, e) in p.fiber_set(b).ones().enumerate() {
            local[e] = i;
        }
    }
    local
}

/// α (contravariant, `max(U_e ∩ p^{-1}(b))`) or β (covariant, `min(F_e ∩ p^{-1}(b'))`).
fn transport(p: &SliceMap, variance: Variance) -> Result<PosetFunctor> {
    let base = p.base().clone();
    let fibers: Vec<Arc<Poset>> = (0..base.len()).map(|b| fiber(p, b)).collect::<Result<_>>()?;
    let local = local_indices(p);
    let mut given = vec![];
    for lo in 0..base.len() {
        for hi in base.strict_up_set(lo).ones() {
            let (src, dst, dir) = match variance {
                Variance::Covariant => (lo, hi, Direction::Up),
                Variance::Contravariant => (hi, lo, Direction::Down),
            };
            let mut values = vec![];
            for e in p.fiber_set(src).ones() {
                let target = p.total().extreme_of(&lift_set(p, e, dst, dir), dir);
                match target {
                    Some(m) if p.apply(m) == dst => values.push(local[m]),
                    _ => {
                        let w = lift(p, e, dst, dir)?.expect_err("lift is missing");
                        let witness = LiftWitness {
                            element: e,
                            target: dst,
                            reason: w,
                        }
                        .describe(p);
                        return Err(match variance {
                            Variance::Covariant => Error::NotGrothendieckOpfibration(witness),
                            Variance::Contravariant => Error::NotGrothendieckFibration(witness),
                        });
                    }
                }
            }
            let t = MonotoneMap::new(fibers[src].clone(), fibers[dst].clone(), values)?;
            given.push(((lo, hi), t));
        }
    }
    PosetFunctor::new(base, variance, fibers, given)
}

/// The contravariant transport `α(b' >= b)(e) = max(U_e ∩ p^{-1}(b))`.
pub fn alpha_functor(p: &SliceMap) -> Result<PosetFunctor> {
    if let Some(w) = fibration_failure(p) {
        return Err(Error::NotGrothendieckFibration(w.describe(p)));
    }
    transport(p, Variance::Contravariant)
}

/// The covariant transport `β(b <= b')(e) = min(F_e ∩ p^{-1}(b'))`.
pub fn beta_functor(p: &SliceMap) -> Result<PosetFunctor> {
    if let Some(w) = opfibration_failure(p) {
        return Err(Error::NotGrothendieckOpfibration(w.describe(p)));
    }
    transport(p, Variance::Covariant)
}

/// `∫D` with its projection onto the base. Point `k` of the total space is
/// `points[k] = (b, x)` with `x` an index into `D(b)`.
#[derive(Debug, Clone)]
pub struct Construction {
    pub projection: SliceMap,
    pub points: Vec<(usize, usize)>,
}

impl Construction {
    pub fn total(&self) -> &Arc<Poset> {
        self.projection.total()
    }
}

/// The Grothendieck construction of a poset-valued functor.
///
/// The minimal open set of `(b, x)` is the basic open
/// `J(b, U_x) = ⋃_{v ∈ U_b} {v} × D(v <= b)^{-1}(U_x)`, so
/// `(v, y) <= (b, x)` exactly when `v <= b` and `D(v <= b)(y) <= x`.
/// A contravariant functor is handled over the reversed base, which gives
/// `(v, y) <= (b, x)` iff `v <= b` and `y <= D(v <= b)(x)`.
///
/// ```
/// use std::sync::Arc;
/// use fintop::{grothendieck_construction, MonotoneMap, Poset, PosetFunctor, Variance};
///
/// let s = Arc::new(Poset::sierpinski());
/// let point = Arc::new(Poset::singleton("*"));
/// let chain = Arc::new(Poset::new(&["x", "y"], &[("x", "y")]).unwrap());
/// let t = MonotoneMap::from_names(point.clone(), chain.clone(), &[("*", "x")]).unwrap();
/// let d = PosetFunctor::new(s, Variance::Covariant, vec![point, chain], vec![((0, 1), t)]).unwrap();
///
/// let total = grothendieck_construction(&d).unwrap().total().clone();
/// let at = |n: &str| total.index_of(n).unwrap();
/// assert_eq!(total.names(), &["(0,*)", "(1,x)", "(1,y)"]);
/// // J(1, U_x) = {0} × D(0<=1)^{-1}(U_x) ∪ {1} × U_x = {(0,*), (1,x)}.
/// assert!(total.lt(at("(0,*)"), at("(1,x)")));
/// assert!(total.lt(at("(1,x)"), at("(1,y)")));
/// assert_eq!(total.down_set(at("(1,x)")).count_ones(..), 2);
/// ```
pub fn grothendieck_construction(d: &PosetFunctor) -> Result<Construction> {
    // Re-validate: a functor may have been assembled from untrusted parts.
    let d = PosetFunctor::new(
        d.base.clone(),
        d.variance,
        d.fibers.clone(),
        d.transitions.iter().map(|(&k, t)| (k, t.clone())).collect(),
    )?;
    match d.variance {
        Variance::Covariant => Ok(covariant_construction(&d)),
        Variance::Contravariant => {
            let flipped = covariant_construction(&d.reversed());
            let projection =
                SliceMap::new(flipped.projection.map().reversed()).unwrap_or_else(|_| flipped.projection.reversed());
            Ok(Construction {
                projection,
                points: flipped.points,
            })
        }
    }
}

fn covariant_construction(d: &PosetFunctor) -> Construction {
    let base = &d.base;
    let mut points = vec![];
    let mut names = vec![];
    for b in 0..base.len() {
        for x in 0..d.fibers[b].len() {
            points.push((b, x));
            names.push(pair_name(base.name(b), d.fibers[b].name(x)));
        }
    }
    let total = Poset::from_relation(names, |i, j| {
        let ((v, y), (b, x)) = (points[i], points[j]);
        base.leq(v, b) && d.fibers[b].leq(d.transitions[&(v, b)].apply(y), x)
    })
    .expect("the construction is a partial order");
    let values = points.iter().map(|&(b, _)| b).collect();
    let map = MonotoneMap::new_unchecked(Arc::new(total), base.clone(), values);
    Construction {
        projection: SliceMap::build(map),
        points,
    }
}

/// `∫β(p) ≅ p` over the base via `(b, e) ↦ e`.
#[derive(Debug, Clone)]
pub struct IsoOverBase {
    pub construction: Construction,
    /// Point of `E` for each point of `∫β(p)`.
    pub to_total: Vec<usize>,
}

pub fn reconstruct_over_base(p: &SliceMap) -> Result<IsoOverBase> {
    let beta = beta_functor(p)?;
    let construction = grothendieck_construction(&beta)?;
    let fibers: Vec<Vec<usize>> = (0..p.base().len()).map(|b| p.fiber_set(b).ones().collect()).collect();
    let to_total: Vec<usize> = construction.points.iter().map(|&(b, x)| fibers[b][x]).collect();
    let total = construction.total();
    for i in 0..total.len() {
        for j in 0..total.len() {
            if total.leq(i, j) != p.total().leq(to_total[i], to_total[j]) {
                return Err(Error::ReconstructionMismatch(format!(
                    "{} and {}",
                    total.name(i),
                    total.name(j)
                )));
            }
        }
    }
    Ok(IsoOverBase { construction, to_total })
}

/// Every transition is an order isomorphism.
pub fn is_morphism_inverting(d: &PosetFunctor) -> bool {
    d.transitions.values().all(MonotoneMap::is_isomorphism)
}

/// A trivialization `p^{-1}(U_b) ≅ U_b × p^{-1}(b)` over `U_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTrivialization {
    pub base_point: usize,
    /// Index in `U_b × p^{-1}(b)` for each point of `p^{-1}(U_b)`, both in
    /// increasing index order of `E` and `B`.
    pub iso: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleReport {
    Bundle(Vec<LocalTrivialization>),
    /// No trivialization over `U_b` for this `b`.
    NotBundle {
        at: usize,
    },
    /// The isomorphism search at `b` ran out of budget.
    Undecided {
        at: usize,
        budget: u64,
    },
}

impl BundleReport {
    pub fn is_bundle(&self) -> bool {
        matches!(self, BundleReport::Bundle(_))
    }
}

/// Local triviality over each minimal open `U_b`; every open neighbourhood
/// of `b` contains `U_b`, so these are the only ones that need checking.
pub fn is_fiber_bundle(p: &SliceMap, budget: u64) -> Result<BundleReport> {
    let mut out = vec![];
    for b in 0..p.base().len() {
        let over = p.base().down_set(b).clone();
        let local = p.restrict_over(&over);
        let (ub, _) = p.base().sub_poset(&over);
        let f = fiber(p, b)?;
        let (_, proj, _) = ub.product(&f);
        match find_isomorphism_over_base_budgeted(local.map(), &proj, budget) {
            Ok(Some(iso)) => out.push(LocalTrivialization { base_point: b, iso }),
            Ok(None) => return Ok(BundleReport::NotBundle { at: b }),
            Err(Error::BudgetExhausted(budget)) => return Ok(BundleReport::Undecided { at: b, budget }),
            Err(e) => return Err(e),
        }
    }
    Ok(BundleReport::Bundle(out))
}

/// Given `f: X -> E` and `g <= p ∘ f`, the map `h(x) = max(U_{f(x)} ∩ p^{-1}(g(x)))`
/// with `h <= f` and `p ∘ h = g`.
pub fn lower_lift(p: &SliceMap, f: &MonotoneMap, g: &MonotoneMap) -> Result<MonotoneMap> {
    if let Some(w) = fibration_failure(p) {
        return Err(Error::NotGrothendieckFibration(w.describe(p)));
    }
    if **f.cod() != **p.total() || **g.cod() != **p.base() || **f.dom() != **g.dom() {
        return Err(Error::DomainMismatch);
    }
    let pf = p.map().after(f)?;
    if !g.pointwise_leq(&pf) {
        return Err(Error::PreconditionViolated("g <= p∘f does not hold".into()));
    }
    let values = (0..f.dom().len())
        .map(|x| cartesian_lift(p, f.apply(x), g.apply(x)).map(|l| l.expect("p is a Grothendieck fibration")))
        .collect::<Result<Vec<_>>>()?;
    MonotoneMap::new(f.dom().clone(), p.total().clone(), values)
}
