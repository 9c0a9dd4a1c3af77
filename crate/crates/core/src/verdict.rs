//! Deciding whether a map of finite spaces is a Hurewicz fibration.
//!
//! Each connected component of the base is analysed on its own. The map is
//! reduced to its smallest dbp-retract, which must be a Grothendieck
//! bifibration; that is also sufficient when the component has a minimum or
//! is a height-1 cone with a maximum. Anything else without a certificate is
//! reported as unknown.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::document::poset_to_json;
use crate::error::{Error, Result};
use crate::grothendieck::{fibration_failure, is_bifibration, opfibration_failure, LiftWitness};
use crate::hom::{enumerate, find_monotone, DEFAULT_GUARD};
use crate::iso::{find_isomorphism, find_isomorphism_over_base};
use crate::map::MonotoneMap;
use crate::poset::{Direction, ElemSet, Poset};
use crate::reduce::{ReductionTrace, RemovalOrder};
use crate::slice::{
    map_beat_points, restrict_over_component, smallest_dbp_retract_of_map, smallest_dbp_retract_of_map_with_order,
    SliceMap,
};
use crate::stong::{beat_points, dbp_retract_trace, is_contractible, smallest_dbp_retract};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Fibration,
    NotFibration,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Fibration => "fibration",
            Status::NotFibration => "not_fibration",
            Status::Unknown => "unknown",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Fibration => 0,
            Status::NotFibration => 1,
            Status::Unknown => 2,
        }
    }
}

/// A checkable property that every Hurewicz fibration has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Surjective,
    OpenMap,
    DownFiberNonempty,
    DownFiberContractible,
    UpReachability,
    ReducedBifibration,
    MinimalEImpliesMinimalB,
    EdInsidePreimageBd,
    BeatPointDichotomy,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Surjective => "surjective",
            Condition::OpenMap => "open_map",
            Condition::DownFiberNonempty => "down_fiber_nonempty",
            Condition::DownFiberContractible => "down_fiber_contractible",
            Condition::UpReachability => "up_reachability",
            Condition::ReducedBifibration => "reduced_bifibration",
            Condition::MinimalEImpliesMinimalB => "minimalE_implies_minimalB",
            Condition::EdInsidePreimageBd => "Ed_inside_preimage_Bd",
            Condition::BeatPointDichotomy => "beat_point_dichotomy",
        }
    }
}

/// The battery run by [`necessary_conditions`], in report order.
pub const NECESSARY: [Condition; 8] = [
    Condition::OpenMap,
    Condition::DownFiberNonempty,
    Condition::DownFiberContractible,
    Condition::UpReachability,
    Condition::ReducedBifibration,
    Condition::MinimalEImpliesMinimalB,
    Condition::EdInsidePreimageBd,
    Condition::BeatPointDichotomy,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub condition: Condition,
    /// Names of the offending points, total space first.
    pub elements: Vec<String>,
    pub detail: String,
}

impl Witness {
    fn new(condition: Condition, elements: Vec<&str>, detail: impl Into<String>) -> Self {
        Witness {
            condition,
            elements: elements.into_iter().map(str::to_string).collect(),
            detail: detail.into(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "condition": self.condition.as_str(),
            "elements": self.elements,
            "detail": self.detail,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessaryEntry {
    pub condition: Condition,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessaryReport {
    pub entries: Vec<NecessaryEntry>,
}

impl NecessaryReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, condition: Condition) -> Option<&NecessaryEntry> {
        self.entries.iter().find(|e| e.condition == condition)
    }

    pub fn first_failure(&self) -> Option<&Witness> {
        self.entries.iter().find_map(|e| e.witness.as_ref())
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        for e in &self.entries {
            out.insert(
                e.condition.as_str().to_string(),
                json!({"passed": e.passed, "witness": e.witness.as_ref().map(Witness::to_json)}),
            );
        }
        Value::Object(out)
    }
}

/// First `(e, b)` with `b` in `U_{p(e)}` (`Down`) or `F_{p(e)}` (`Up`) and
/// `p(U_e)` (resp. `p(F_e)`) missing `b`.
fn image_cone_failure(p: &SliceMap, dir: Direction) -> Option<(usize, usize)> {
    for e in 0..p.total().len() {
        let cone = p.total().cone(e, dir);
        for b in p.base().cone(p.apply(e), dir).ones() {
            if p.fiber_set(b).is_disjoint(cone) {
                return Some((e, b));
            }
        }
    }
    None
}

/// `p(U_e) = U_{p(e)}` for all `e`; otherwise the first `(e, b)` with `b` missing.
pub fn open_map_failure(p: &SliceMap) -> Option<(usize, usize)> {
    image_cone_failure(p, Direction::Down)
}

/// `p(F_e) = F_{p(e)}` for all `e`; otherwise the first `(e, b)` with `b` missing.
pub fn closed_map_failure(p: &SliceMap) -> Option<(usize, usize)> {
    image_cone_failure(p, Direction::Up)
}

pub fn is_open_map(p: &SliceMap) -> bool {
    open_map_failure(p).is_none()
}

pub fn is_closed_map(p: &SliceMap) -> bool {
    closed_map_failure(p).is_none()
}

fn names(p: &SliceMap, e: usize, b: usize) -> Vec<&str> {
    vec![p.total().name(e), p.base().name(b)]
}

fn lift_witness(p: &SliceMap, w: &LiftWitness) -> Witness {
    Witness::new(
        Condition::ReducedBifibration,
        names(p, w.element, w.target),
        w.describe(p),
    )
}

fn check_open(p: &SliceMap) -> Option<Witness> {
    open_map_failure(p).map(|(e, b)| {
        Witness::new(
            Condition::OpenMap,
            names(p, e, b),
            format!(
                "p(U_{}) misses {} of U_{}",
                p.total().name(e),
                p.base().name(b),
                p.base().name(p.apply(e))
            ),
        )
    })
}

fn check_down_fiber_nonempty(p: &SliceMap) -> Option<Witness> {
    open_map_failure(p).map(|(e, b)| {
        Witness::new(
            Condition::DownFiberNonempty,
            names(p, e, b),
            format!(
                "U_{} does not meet the fiber of {}",
                p.total().name(e),
                p.base().name(b)
            ),
        )
    })
}

fn check_down_fiber_contractible(p: &SliceMap) -> Option<Witness> {
    let total = p.total();
    for e in 0..total.len() {
        for b in p.base().down_set(p.apply(e)).ones() {
            let mut set = total.down_set(e).clone();
            set.intersect_with(p.fiber_set(b));
            let (sub, _) = total.sub_poset(&set);
            let contractible = !sub.is_empty() && is_contractible(&sub).expect("nonempty");
            if !contractible {
                let what = if sub.is_empty() { "empty" } else { "not contractible" };
                return Some(Witness::new(
                    Condition::DownFiberContractible,
                    names(p, e, b),
                    format!("U_{} ∩ p^-1({}) is {what}", total.name(e), p.base().name(b)),
                ));
            }
        }
    }
    None
}

fn check_up_reachability(p: &SliceMap) -> Option<Witness> {
    let total = p.total();
    for e in 0..total.len() {
        let own = p.apply(e);
        for b in p.base().up_set(own).ones() {
            let mut below = total.down_set(e).clone();
            below.intersect_with(p.fiber_set(own));
            let reachable = below.ones().any(|e2| !total.up_set(e2).is_disjoint(p.fiber_set(b)));
            if !reachable {
                return Some(Witness::new(
                    Condition::UpReachability,
                    names(p, e, b),
                    format!(
                        "no point of the fiber below {} has a point of the fiber of {} above it",
                        total.name(e),
                        p.base().name(b)
                    ),
                ));
            }
        }
    }
    None
}

fn check_reduced_bifibration(p: &SliceMap) -> Option<Witness> {
    let (p0, _) = smallest_dbp_retract_of_map(p);
    fibration_failure(&p0)
        .or_else(|| opfibration_failure(&p0))
        .map(|w| lift_witness(&p0, &w))
}

fn check_minimal_spaces(p: &SliceMap) -> Option<Witness> {
    if !p.base().is_connected() {
        return None;
    }
    let e_points = beat_points(p.total());
    let b_points = beat_points(p.base());
    if e_points.is_empty() {
        if let Some(&(b, _)) = b_points.down.first().or(b_points.up.first()) {
            return Some(Witness::new(
                Condition::MinimalEImpliesMinimalB,
                vec![p.base().name(b)],
                format!("E is minimal but {} is a beat point of B", p.base().name(b)),
            ));
        }
    }
    if e_points.down.is_empty() {
        if let Some(&(b, _)) = b_points.down.first() {
            return Some(Witness::new(
                Condition::MinimalEImpliesMinimalB,
                vec![p.base().name(b)],
                format!("E has no down beat points but {} is one of B", p.base().name(b)),
            ));
        }
    }
    None
}

fn check_ed_inside(p: &SliceMap) -> Option<Witness> {
    if !p.base().is_connected() {
        return None;
    }
    let (ed, _) = smallest_dbp_retract(p.total()).expect("nonempty total space");
    let (bd, _) = smallest_dbp_retract(p.base()).expect("nonempty base");
    let over = p.preimage(bd.kept());
    if let Some(e) = ed.kept().ones().find(|&e| !over.contains(e)) {
        return Some(Witness::new(
            Condition::EdInsidePreimageBd,
            names(p, e, p.apply(e)),
            format!(
                "{} survives in E_d but {} is removed from B_d",
                p.total().name(e),
                p.base().name(p.apply(e))
            ),
        ));
    }
    let (sub, inclusion) = p.total().sub_poset(&over);
    let mut keep = sub.empty_set();
    for (i, &e) in inclusion.values().iter().enumerate() {
        if ed.kept().contains(e) {
            keep.insert(i);
        }
    }
    if dbp_retract_trace(&sub, &keep).is_none() {
        return Some(Witness::new(
            Condition::EdInsidePreimageBd,
            vec![],
            "E_d is not a dbp-retract of p^-1(B_d)",
        ));
    }
    None
}

fn check_dichotomy(p: &SliceMap) -> Option<Witness> {
    let e_points = beat_points(p.total());
    let b_points = beat_points(p.base());
    let m_points = map_beat_points(p);
    for &(e, _) in &e_points.down {
        if !b_points.is_down(p.apply(e)) && !m_points.is_down(e) {
            return Some(Witness::new(
                Condition::BeatPointDichotomy,
                names(p, e, p.apply(e)),
                format!(
                    "{} is a down beat point of E, but neither a down beat point of p nor over one of B",
                    p.total().name(e)
                ),
            ));
        }
    }
    if m_points.down.is_empty() {
        for &(e, _) in &e_points.up {
            if !b_points.is_up(p.apply(e)) && !m_points.is_up(e) {
                return Some(Witness::new(
                    Condition::BeatPointDichotomy,
                    names(p, e, p.apply(e)),
                    format!(
                        "{} is an up beat point of E, but neither an up beat point of p nor over one of B",
                        p.total().name(e)
                    ),
                ));
            }
        }
    }
    None
}

/// Runs every necessary condition. Conditions whose hypotheses need a
/// connected base pass vacuously over a disconnected one.
pub fn necessary_conditions(p: &SliceMap) -> Result<NecessaryReport> {
    if p.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let entries = NECESSARY
        .iter()
        .map(|&condition| {
            let witness = match condition {
                Condition::OpenMap => check_open(p),
                Condition::DownFiberNonempty => check_down_fiber_nonempty(p),
                Condition::DownFiberContractible => check_down_fiber_contractible(p),
                Condition::UpReachability => check_up_reachability(p),
                Condition::ReducedBifibration => check_reduced_bifibration(p),
                Condition::MinimalEImpliesMinimalB => check_minimal_spaces(p),
                Condition::EdInsidePreimageBd => check_ed_inside(p),
                Condition::BeatPointDichotomy => check_dichotomy(p),
                Condition::Surjective => unreachable!("not part of the battery"),
            };
            NecessaryEntry {
                condition,
                passed: witness.is_none(),
                witness,
            }
        })
        .collect();
    Ok(NecessaryReport { entries })
}

/// Maps exhibiting `p` as a retract of the projection `π_X: X × Y -> X`:
/// `r ∘ i = Id_E`, `s ∘ j = Id_B`, `π_X ∘ i = j ∘ p`, `p ∘ r = s ∘ π_X`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetractCertificate {
    pub x: Arc<Poset>,
    pub y: Arc<Poset>,
    pub i: MonotoneMap,
    pub r: MonotoneMap,
    pub j: MonotoneMap,
    pub s: MonotoneMap,
}

impl RetractCertificate {
    pub fn to_json(&self) -> Value {
        let assignment = |m: &MonotoneMap| {
            let mut out = Map::new();
            for (x, &v) in m.values().iter().enumerate() {
                out.insert(m.dom().name(x).to_string(), Value::String(m.cod().name(v).to_string()));
            }
            Value::Object(out)
        };
        json!({
            "x": poset_to_json(&self.x),
            "y": poset_to_json(&self.y),
            "i": assignment(&self.i),
            "r": assignment(&self.r),
            "j": assignment(&self.j),
            "s": assignment(&self.s),
        })
    }
}

/// Checks the four retract identities; the error names the first one violated.
pub fn check_retract_certificate(p: &SliceMap, cert: &RetractCertificate) -> std::result::Result<(), String> {
    let (prod, pi_x, _) = cert.x.product(&cert.y);
    let shapes = [
        (&cert.i, p.total(), &prod, "i: E -> X×Y"),
        (&cert.r, &prod, p.total(), "r: X×Y -> E"),
        (&cert.j, p.base(), &cert.x, "j: B -> X"),
        (&cert.s, &cert.x, p.base(), "s: X -> B"),
    ];
    for (m, dom, cod, label) in shapes {
        if **m.dom() != **dom || **m.cod() != **cod {
            return Err(format!("{label} has the wrong domain or codomain"));
        }
    }
    let ri = cert.r.after(&cert.i).map_err(|e| e.to_string())?;
    if !ri.is_identity() {
        return Err("r∘i = Id_E fails".into());
    }
    let sj = cert.s.after(&cert.j).map_err(|e| e.to_string())?;
    if !sj.is_identity() {
        return Err("s∘j = Id_B fails".into());
    }
    let left = pi_x.after(&cert.i).map_err(|e| e.to_string())?;
    let right = cert.j.after(p.map()).map_err(|e| e.to_string())?;
    if left.values() != right.values() {
        return Err("π_X∘i = j∘p fails".into());
    }
    let left = p.map().after(&cert.r).map_err(|e| e.to_string())?;
    let right = cert.s.after(&pi_x).map_err(|e| e.to_string())?;
    if left.values() != right.values() {
        return Err("p∘r = s∘π_X fails".into());
    }
    Ok(())
}

pub fn verify_retract_certificate(p: &SliceMap, cert: &RetractCertificate) -> bool {
    check_retract_certificate(p, cert).is_ok()
}

/// For a bifibration over a height-1 base with maximum `b0`, exhibits `p` as a
/// retract of `π_B: B × E -> B` with `X = B`, `Y = E`, `j = s = Id_B`,
/// `i(e) = (p(e), e)` and `r(b, e) = ρ(r'(e, b))`, where
/// `r'(e, b) = e` if `p(e) = b` and `min(F_e ∩ p^{-1}(b0))` otherwise, and
/// `ρ(e, b) = max(U_e ∩ p^{-1}(b))`.
pub fn projection_retract_height1(p: &SliceMap) -> Result<RetractCertificate> {
    let bad = |m: &str| Err(Error::PreconditionViolated(m.to_string()));
    if p.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if !is_bifibration(p) {
        return bad("not a Grothendieck bifibration");
    }
    let Some(top) = p.base().maximum() else {
        return bad("the base has no maximum");
    };
    if p.base().height() > 1 {
        return bad("the base has height greater than 1");
    }
    let (total, base) = (p.total(), p.base());
    let n = total.len();
    let (prod, _, _) = base.product(total);
    let extreme = |e: usize, b: usize, dir: Direction| {
        let mut set = total.cone(e, dir).clone();
        set.intersect_with(p.fiber_set(b));
        total.extreme_of(&set, dir).expect("bifibration lifts exist")
    };
    let mut lifted = vec![0; prod.len()];
    let mut values = vec![0; prod.len()];
    for k in 0..prod.len() {
        let (b, e) = (k / n, k % n);
        let up = if p.apply(e) == b {
            e
        } else {
            extreme(e, top, Direction::Up)
        };
        lifted[k] = up;
        values[k] = extreme(up, b, Direction::Down);
    }
    // r'(e, b) >= (e, b) and ρ(e', b) <= e' on its domain.
    for k in 0..prod.len() {
        if !total.leq(k % n, lifted[k]) || !total.leq(values[k], lifted[k]) {
            return Err(Error::PreconditionViolated(format!(
                "intermediate inequality fails at {}",
                prod.name(k)
            )));
        }
    }
    let r = MonotoneMap::new(prod.clone(), total.clone(), values)
        .map_err(|e| Error::PreconditionViolated(format!("retraction is not monotone: {e}")))?;
    let i_values = (0..n).map(|e| p.apply(e) * n + e).collect();
    let i = MonotoneMap::new(total.clone(), prod, i_values)?;
    let cert = RetractCertificate {
        x: base.clone(),
        y: total.clone(),
        i,
        r,
        j: MonotoneMap::identity(base.clone()),
        s: MonotoneMap::identity(base.clone()),
    };
    check_retract_certificate(p, &cert).map_err(Error::PreconditionViolated)?;
    Ok(cert)
}

/// An isomorphism over the base between `p` and `B × F -> B`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivialIso {
    /// The base point whose fiber is `F`.
    pub fiber_over: usize,
    pub projection: MonotoneMap,
    /// Index in `B × F` for each point of `E`.
    pub iso: Vec<usize>,
}

pub fn is_trivial_over_base(p: &SliceMap) -> Option<TrivialIso> {
    let b = 0;
    if p.base().is_empty() {
        return None;
    }
    let f = crate::slice::fiber(p, b).expect("b is in the base");
    let (_, projection, _) = p.base().product(&f);
    let iso = find_isomorphism_over_base(p.map(), &projection).expect("same base")?;
    Some(TrivialIso {
        fiber_over: b,
        projection,
        iso,
    })
}

/// Outcome of the bounded search for retract certificates.
#[derive(Debug, Clone)]
pub struct RetractSearch {
    pub found: Option<RetractCertificate>,
    /// Pairs `(Y, y: E -> Y)` for which a retraction was sought.
    pub candidates: usize,
}

/// Looks for `p` as a retract of a projection `X × Y -> X` with `|Y| <= max_y`.
///
/// `j(B)` is a retract of `X` isomorphic to `B`, and restricting to
/// `j(B) × Y` keeps every identity, so `X = B` and `j = s = Id` lose nothing.
/// Then `i(e) = (p(e), y(e))` for a monotone `y` injective on fibers, and `r`
/// must send `(b, t)` into the fiber of `b` and `i(e)` back to `e`.
pub fn search_retract_certificate(p: &SliceMap, max_y: usize, guard: usize) -> Result<RetractSearch> {
    let (total, base) = (p.total(), p.base());
    let mut candidates = 0;
    for size in 1..=max_y {
        let mut shapes: Vec<Poset> = vec![];
        for y in Poset::all_labelled(size) {
            if !shapes.iter().any(|s| find_isomorphism(s, &y).is_some()) {
                shapes.push(y);
            }
        }
        for y in shapes {
            let y = Arc::new(y);
            let (prod, _, _) = base.product(&y);
            let maps = enumerate(total, &y, &vec![y.full_set(); total.len()], guard)?;
            for values in maps.all_values() {
                let i_values: Vec<usize> = (0..total.len()).map(|e| p.apply(e) * y.len() + values[e]).collect();
                let mut owner = vec![usize::MAX; prod.len()];
                if i_values
                    .iter()
                    .enumerate()
                    .any(|(e, &k)| std::mem::replace(&mut owner[k], e) != usize::MAX)
                {
                    continue;
                }
                candidates += 1;
                let allowed: Vec<ElemSet> = (0..prod.len())
                    .map(|k| match owner[k] {
                        usize::MAX => p.fiber_set(k / y.len()).clone(),
                        e => {
                            let mut s = total.empty_set();
                            s.insert(e);
                            s
                        }
                    })
                    .collect();
                if let Some(r) = find_monotone(&prod, total, &allowed) {
                    let cert = RetractCertificate {
                        x: base.clone(),
                        y: y.clone(),
                        i: MonotoneMap::new(total.clone(), prod.clone(), i_values)?,
                        r: MonotoneMap::new(prod.clone(), total.clone(), r)?,
                        j: MonotoneMap::identity(base.clone()),
                        s: MonotoneMap::identity(base.clone()),
                    };
                    debug_assert!(verify_retract_certificate(p, &cert));
                    return Ok(RetractSearch {
                        found: Some(cert),
                        candidates,
                    });
                }
            }
        }
    }
    Ok(RetractSearch {
        found: None,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// The component has this minimum and the reduced map is a bifibration.
    MinimumBaseBifibration {
        minimum: usize,
    },
    Height1MaxRetract(RetractCertificate),
    TrivialOverBase(TrivialIso),
    ExplicitRetract(RetractCertificate),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::MinimumBaseBifibration { .. } => "minimum_base_bifibration",
            Certificate::Height1MaxRetract(_) => "height1_max_retract",
            Certificate::TrivialOverBase(_) => "trivial_over_base",
            Certificate::ExplicitRetract(_) => "explicit_retract",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Certificate::MinimumBaseBifibration { .. } => "minimum-base bifibration",
            Certificate::Height1MaxRetract(_) => "height-1 retract of a projection",
            Certificate::TrivialOverBase(_) => "trivial over the base",
            Certificate::ExplicitRetract(_) => "explicit retract of a projection",
        }
    }
}

/// Analysis of one connected component of the base.
#[derive(Debug, Clone)]
pub struct ComponentVerdict {
    /// Indices into the original base.
    pub base_component: Vec<usize>,
    pub status: Status,
    /// Indices in the certificate refer to `reduced` (or its base).
    pub certificate: Option<Certificate>,
    pub witness: Option<Witness>,
    pub necessary: NecessaryReport,
    pub restricted: SliceMap,
    pub reduced: SliceMap,
    pub reduction: ReductionTrace,
}

impl ComponentVerdict {
    fn to_json(&self, base: &Poset) -> Value {
        let certificate = self.certificate.as_ref().map(|c| {
            let mut out = Map::new();
            out.insert("kind".into(), json!(c.kind()));
            let reduced = &self.reduced;
            match c {
                Certificate::MinimumBaseBifibration { minimum } => {
                    out.insert("minimum".into(), json!(reduced.base().name(*minimum)));
                    let removed: Vec<&str> = self.reduction.removed_names().into_iter().map(|(n, _)| n).collect();
                    out.insert("removed".into(), json!(removed));
                }
                Certificate::Height1MaxRetract(r) | Certificate::ExplicitRetract(r) => {
                    out.insert("retract".into(), r.to_json());
                }
                Certificate::TrivialOverBase(t) => {
                    out.insert("fiber_over".into(), json!(reduced.base().name(t.fiber_over)));
                    let mut iso = Map::new();
                    for (e, &k) in t.iso.iter().enumerate() {
                        iso.insert(reduced.total().name(e).to_string(), json!(t.projection.dom().name(k)));
                    }
                    out.insert("iso".into(), Value::Object(iso));
                }
            }
            Value::Object(out)
        });
        let component: Vec<&str> = self.base_component.iter().map(|&b| base.name(b)).collect();
        json!({
            "base_component": component,
            "status": self.status.as_str(),
            "certificate": certificate,
            "witness": self.witness.as_ref().map(Witness::to_json),
            "necessary": self.necessary.to_json(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub components: Vec<ComponentVerdict>,
    /// Components of the base with empty preimage; they impose nothing.
    pub uncovered: Vec<Vec<usize>>,
    base: Arc<Poset>,
}

impl Verdict {
    /// The first certificate, when every analysed component has one.
    pub fn certificate(&self) -> Option<&Certificate> {
        if self.status != Status::Fibration {
            return None;
        }
        self.components.iter().find_map(|c| c.certificate.as_ref())
    }

    /// The witness of the first failing component.
    pub fn witness(&self) -> Option<&Witness> {
        self.components.iter().find_map(|c| c.witness.as_ref())
    }

    pub fn to_json(&self) -> Value {
        let uncovered: Vec<Vec<&str>> = self
            .uncovered
            .iter()
            .map(|c| c.iter().map(|&b| self.base.name(b)).collect())
            .collect();
        json!({
            "status": self.status.as_str(),
            "components": self.components.iter().map(|c| c.to_json(&self.base)).collect::<Vec<_>>(),
            "uncovered_components": uncovered,
        })
    }
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    pub order: RemovalOrder,
    /// Largest `|Y|` tried when searching retract certificates for otherwise
    /// undecided components; 0 disables the search.
    pub retract_search: usize,
    pub guard: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            order: RemovalOrder::LowestIndex,
            retract_search: 0,
            guard: DEFAULT_GUARD,
        }
    }
}

pub fn decide_hurewicz(p: &SliceMap) -> Result<Verdict> {
    decide_hurewicz_with(p, &DecideOptions::default())
}

pub fn decide_hurewicz_with(p: &SliceMap, options: &DecideOptions) -> Result<Verdict> {
    if p.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let mut components = vec![];
    let mut uncovered = vec![];
    for comp in p.base().components() {
        let mut set = p.base().empty_set();
        for &b in &comp {
            set.insert(b);
        }
        if p.image().is_disjoint(&set) {
            uncovered.push(comp);
            continue;
        }
        let restricted = restrict_over_component(p, &set)?;
        let local = match &options.order {
            RemovalOrder::Ranked(rank) if restricted.total().len() != rank.len() => DecideOptions {
                order: RemovalOrder::Ranked(p.preimage(&set).ones().map(|e| rank[e]).collect()),
                ..options.clone()
            },
            _ => options.clone(),
        };
        components.push(decide_component(restricted, comp, &local)?);
    }
    let status = if components.iter().any(|c| c.status == Status::NotFibration) {
        Status::NotFibration
    } else if components.iter().any(|c| c.status == Status::Unknown) {
        Status::Unknown
    } else {
        Status::Fibration
    };
    Ok(Verdict {
        status,
        components,
        uncovered,
        base: p.base().clone(),
    })
}

fn decide_component(restricted: SliceMap, comp: Vec<usize>, options: &DecideOptions) -> Result<ComponentVerdict> {
    let necessary = necessary_conditions(&restricted)?;
    let (reduced, reduction) = smallest_dbp_retract_of_map_with_order(&restricted, &options.order);
    let mut out = ComponentVerdict {
        base_component: comp,
        status: Status::NotFibration,
        certificate: None,
        witness: None,
        necessary,
        restricted,
        reduced,
        reduction,
    };
    let p = &out.restricted;
    if let Some(b) = (0..p.base().len()).find(|&b| !p.image().contains(b)) {
        out.witness = Some(Witness::new(
            Condition::Surjective,
            vec![p.base().name(b)],
            format!(
                "nonempty fibration over connected base is surjective, but {} has an empty fiber",
                p.base().name(b)
            ),
        ));
        return Ok(out);
    }
    if let Some(w) = check_open(p) {
        out.witness = Some(w);
        return Ok(out);
    }
    let p0 = &out.reduced;
    if let Some(w) = fibration_failure(p0).or_else(|| opfibration_failure(p0)) {
        out.witness = Some(lift_witness(p0, &w));
        return Ok(out);
    }
    let base = p0.base();
    out.status = Status::Fibration;
    if let Some(minimum) = base.minimum() {
        out.certificate = Some(Certificate::MinimumBaseBifibration { minimum });
    } else if let Some(cert) = (base.maximum().is_some() && base.height() <= 1)
        .then(|| projection_retract_height1(p0).ok())
        .flatten()
    {
        out.certificate = Some(Certificate::Height1MaxRetract(cert));
    } else if let Some(t) = is_trivial_over_base(p0) {
        out.certificate = Some(Certificate::TrivialOverBase(t));
    } else if let Some(cert) = (options.retract_search > 0)
        .then(|| search_retract_certificate(p0, options.retract_search, options.guard))
        .transpose()?
        .and_then(|s| s.found)
    {
        out.certificate = Some(Certificate::ExplicitRetract(cert));
    } else if let Some(w) = out.necessary.first_failure() {
        out.status = Status::NotFibration;
        out.witness = Some(w.clone());
    } else {
        out.status = Status::Unknown;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn slice(m: MonotoneMap) -> SliceMap {
        SliceMap::new(m).unwrap()
    }

    #[test]
    fn open_and_closed_examples() {
        let p1 = slice(gallery::p1());
        assert!(is_open_map(&p1));
        let (e, b) = closed_map_failure(&p1).unwrap();
        assert_eq!((p1.total().name(e), p1.base().name(b)), ("(a,1)", "b"));
        let id = slice(MonotoneMap::identity(Arc::new(gallery::b3())));
        assert!(is_open_map(&id) && is_closed_map(&id));
        let op = slice(gallery::p1_op());
        let (e, b) = open_map_failure(&op).unwrap();
        assert_eq!((op.total().name(e), op.base().name(b)), ("(a,1)", "b"));
        assert!(is_closed_map(&op));
    }

    #[test]
    fn necessary_conditions_examples() {
        let p2 = slice(gallery::p2());
        let r = necessary_conditions(&p2).unwrap();
        let w = r.entry(Condition::UpReachability).unwrap().witness.clone().unwrap();
        assert_eq!(w.elements, vec!["(a,2)", "b"]);
        assert!(necessary_conditions(&slice(gallery::p3())).unwrap().all_passed());
        assert!(necessary_conditions(&slice(gallery::p1())).unwrap().all_passed());
    }

    #[test]
    fn verdicts_of_gallery_maps() {
        let v = decide_hurewicz(&slice(gallery::p1())).unwrap();
        assert_eq!(v.status, Status::Fibration);
        assert!(matches!(
            v.certificate(),
            Some(Certificate::MinimumBaseBifibration { .. })
        ));

        let v = decide_hurewicz(&slice(gallery::p1_op())).unwrap();
        assert_eq!(v.status, Status::NotFibration);
        assert_eq!(v.witness().unwrap().condition, Condition::OpenMap);

        let v = decide_hurewicz(&slice(gallery::p2())).unwrap();
        assert_eq!(v.status, Status::NotFibration);
        let w = v.witness().unwrap();
        assert_eq!(w.condition, Condition::ReducedBifibration);
        assert_eq!(w.elements, vec!["(a,2)", "b"]);
        assert!(w.detail.starts_with("cocartesian lift missing at ((a,2), b)"));

        let v = decide_hurewicz(&slice(gallery::p3())).unwrap();
        assert_eq!(v.status, Status::Unknown);
        assert!(v.components[0].necessary.all_passed());
    }

    #[test]
    fn height1_certificates() {
        // Λ-shaped base times a two-point chain.
        let lambda = Arc::new(Poset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap());
        let f = Arc::new(Poset::chain(2));
        let (_, proj, _) = lambda.product(&f);
        let p = slice(proj);
        let cert = projection_retract_height1(&p).unwrap();
        assert!(verify_retract_certificate(&p, &cert));
        let v = decide_hurewicz(&p).unwrap();
        assert!(matches!(v.certificate(), Some(Certificate::Height1MaxRetract(_))));

        let pt = Arc::new(Poset::singleton("*"));
        let e1 = Arc::new(gallery::e1());
        let q = slice(MonotoneMap::constant(e1, pt, 0));
        let cert = projection_retract_height1(&q).unwrap();
        assert!(cert.r.values().iter().enumerate().all(|(k, &e)| e == k));

        let r = slice(gallery::p3_restricted());
        assert!(matches!(
            projection_retract_height1(&r),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn identity_certificate_for_a_projection() {
        let s = Arc::new(Poset::sierpinski());
        let f = Arc::new(Poset::antichain(2));
        let (prod, pi1, _) = s.product(&f);
        let p = slice(pi1);
        let cert = RetractCertificate {
            x: s.clone(),
            y: f,
            i: MonotoneMap::identity(prod.clone()),
            r: MonotoneMap::identity(prod),
            j: MonotoneMap::identity(s.clone()),
            s: MonotoneMap::identity(s),
        };
        assert_eq!(check_retract_certificate(&p, &cert), Ok(()));
        let mut broken = cert.clone();
        broken.r = MonotoneMap::constant(broken.r.dom().clone(), broken.r.cod().clone(), 0);
        assert_eq!(check_retract_certificate(&p, &broken), Err("r∘i = Id_E fails".into()));
    }

    #[test]
    fn trivial_over_base_examples() {
        let pi = slice(gallery::pi_sierpinski());
        assert!(is_trivial_over_base(&pi).is_some());
        assert!(is_trivial_over_base(&slice(gallery::p5())).is_none());
        let (p0, _) = smallest_dbp_retract_of_map(&slice(gallery::p1()));
        assert!(is_trivial_over_base(&p0).is_some());
    }

    #[test]
    fn surjectivity_is_required_per_component() {
        // E = {x} over the chain 0 < 1: misses 1.
        let pt = Arc::new(Poset::singleton("x"));
        let c = Arc::new(Poset::chain(2));
        let p = slice(MonotoneMap::constant(pt, c, 0));
        let v = decide_hurewicz(&p).unwrap();
        assert_eq!(v.status, Status::NotFibration);
        assert_eq!(v.witness().unwrap().condition, Condition::Surjective);

        // Over a disconnected base, an untouched component is skipped.
        let pt = Arc::new(Poset::singleton("x"));
        let two = Arc::new(Poset::antichain(2));
        let q = slice(MonotoneMap::constant(pt, two, 0));
        let v = decide_hurewicz(&q).unwrap();
        assert_eq!(v.status, Status::Fibration);
        assert_eq!(v.uncovered, vec![vec![1]]);
    }

    #[test]
    fn ranked_orders_are_translated_per_component() {
        let e = Arc::new(Poset::new(&["x", "y", "u", "v"], &[("x", "y"), ("u", "v")]).unwrap());
        let b = Arc::new(Poset::antichain(2));
        let p = slice(MonotoneMap::from_names(e, b, &[("x", "0"), ("y", "0"), ("u", "1"), ("v", "1")]).unwrap());
        let options = DecideOptions {
            order: RemovalOrder::Ranked(vec![3, 2, 1, 0]),
            ..DecideOptions::default()
        };
        let v = decide_hurewicz_with(&p, &options).unwrap();
        assert_eq!(v.status, Status::Fibration);
        assert_eq!(v.components.len(), 2);
    }
}
