//! Built-in example spaces and maps with their recorded expectations.
//!
//! Total spaces list their points bottom-up (by level, then by name), so the
//! deterministic "first failure" reported by the analyses is stable.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::map::MonotoneMap;
use crate::poset::Poset;
use crate::slice::SliceMap;
use crate::verdict::Status;

fn poset(names: &[&str], covers: &[(&str, &str)]) -> Poset {
    Poset::new(names, covers).expect("gallery poset is valid")
}

/// Projection onto the letter of points named `(x,i)`.
fn by_letter(total: Poset, base: Poset) -> MonotoneMap {
    let total = Arc::new(total);
    let base = Arc::new(base);
    let pairs: Vec<(String, String)> = total
        .names()
        .iter()
        .map(|n| {
            let letter = n.trim_start_matches('(').split(',').next().unwrap_or_default();
            (n.clone(), letter.to_string())
        })
        .collect();
    MonotoneMap::from_names(total, base, &pairs).expect("gallery map is valid")
}

pub fn sierpinski() -> Poset {
    Poset::sierpinski()
}

/// `a < b`, the base of the first two examples.
pub fn b1() -> Poset {
    poset(&["a", "b"], &[("a", "b")])
}

pub fn b2() -> Poset {
    b1()
}

pub fn e1() -> Poset {
    poset(&["(a,0)", "(a,1)", "(b,0)"], &[("(a,0)", "(b,0)"), ("(a,0)", "(a,1)")])
}

pub fn e2() -> Poset {
    poset(
        &["(a,0)", "(a,2)", "(a,1)", "(b,0)"],
        &[("(a,0)", "(b,0)"), ("(a,0)", "(a,1)"), ("(a,2)", "(a,1)")],
    )
}

pub fn b3() -> Poset {
    poset(
        &["a", "b", "c", "d", "e"],
        &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "e"), ("d", "e")],
    )
}

/// `B3` without its maximum: the four-point crown.
pub fn b3_restricted() -> Poset {
    poset(&["a", "b", "c", "d"], &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
}

const E3_COVERS: [(&str, &str); 12] = [
    ("(a,0)", "(a,2)"),
    ("(a,0)", "(c,0)"),
    ("(a,1)", "(a,2)"),
    ("(a,1)", "(d,0)"),
    ("(a,2)", "(c,1)"),
    ("(a,2)", "(d,1)"),
    ("(b,0)", "(c,0)"),
    ("(b,0)", "(d,0)"),
    ("(c,0)", "(c,1)"),
    ("(d,0)", "(d,1)"),
    ("(c,1)", "(e,0)"),
    ("(d,1)", "(e,0)"),
];

pub fn e3() -> Poset {
    poset(
        &[
            "(a,0)", "(a,1)", "(b,0)", "(a,2)", "(c,0)", "(d,0)", "(c,1)", "(d,1)", "(e,0)",
        ],
        &E3_COVERS,
    )
}

fn e3_restricted() -> Poset {
    let covers: Vec<(&str, &str)> = E3_COVERS.iter().copied().filter(|&(_, hi)| hi != "(e,0)").collect();
    poset(
        &["(a,0)", "(a,1)", "(b,0)", "(a,2)", "(c,0)", "(d,0)", "(c,1)", "(d,1)"],
        &covers,
    )
}

/// `a < b`, `c < b`, `c < d`: the fiber of the projection onto `S`.
pub fn b4() -> Poset {
    poset(&["a", "b", "c", "d"], &[("a", "b"), ("c", "b"), ("c", "d")])
}

/// `a, b < c, d`.
pub fn b5() -> Poset {
    b3_restricted()
}

pub fn e5() -> Poset {
    poset(
        &[
            "(a,0)", "(a,1)", "(b,0)", "(b,1)", "(a,2)", "(b,2)", "(c,0)", "(d,0)", "(c,1)", "(c,2)", "(d,1)", "(d,2)",
        ],
        &[
            ("(a,0)", "(a,2)"),
            ("(a,0)", "(c,0)"),
            ("(a,1)", "(a,2)"),
            ("(a,1)", "(d,0)"),
            ("(b,0)", "(b,2)"),
            ("(b,0)", "(c,0)"),
            ("(b,1)", "(b,2)"),
            ("(b,1)", "(d,0)"),
            ("(c,0)", "(c,1)"),
            ("(c,0)", "(c,2)"),
            ("(d,0)", "(d,1)"),
            ("(d,0)", "(d,2)"),
            ("(a,2)", "(c,1)"),
            ("(a,2)", "(d,1)"),
            ("(b,2)", "(c,2)"),
            ("(b,2)", "(d,2)"),
        ],
    )
}

pub fn p1() -> MonotoneMap {
    by_letter(e1(), b1())
}

/// The opposite of `p1`, written with the plain point names.
pub fn p1_op() -> MonotoneMap {
    by_letter(
        poset(&["(a,1)", "(b,0)", "(a,0)"], &[("(b,0)", "(a,0)"), ("(a,1)", "(a,0)")]),
        poset(&["b", "a"], &[("b", "a")]),
    )
}

pub fn p2() -> MonotoneMap {
    by_letter(e2(), b2())
}

pub fn p3() -> MonotoneMap {
    by_letter(e3(), b3())
}

/// `p3` over the strict down-set of the top of `B3`.
pub fn p3_restricted() -> MonotoneMap {
    by_letter(e3_restricted(), b3_restricted())
}

/// The projection `B4 × S -> S`.
pub fn pi_sierpinski() -> MonotoneMap {
    let b4 = Arc::new(b4());
    let s = Arc::new(sierpinski());
    let (_, _, second) = b4.product(&s);
    second
}

pub fn p5() -> MonotoneMap {
    by_letter(e5(), b5())
}

/// Recorded outcomes, re-derived by the regression tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Poset {
        height: usize,
        connected: bool,
        minimal: bool,
        contractible: bool,
    },
    Map {
        hurewicz: Status,
        fibration: bool,
        opfibration: bool,
        open: bool,
        closed: bool,
        minimal_map: bool,
    },
}

impl Expected {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Expected::Poset {
                height,
                connected,
                minimal,
                contractible,
            } => serde_json::json!({
                "height": height,
                "connected": connected,
                "minimal": minimal,
                "contractible": contractible,
            }),
            Expected::Map {
                hurewicz,
                fibration,
                opfibration,
                open,
                closed,
                minimal_map,
            } => serde_json::json!({
                "hurewicz": hurewicz.as_str(),
                "grothendieck_fibration": fibration,
                "grothendieck_opfibration": opfibration,
                "open": open,
                "closed": closed,
                "minimal_map": minimal_map,
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub enum GalleryItem {
    Poset(Arc<Poset>),
    Map(SliceMap),
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub item: GalleryItem,
    pub expected: Expected,
}

fn space(
    id: &'static str,
    description: &'static str,
    p: Poset,
    h: usize,
    minimal: bool,
    contractible: bool,
) -> GalleryEntry {
    GalleryEntry {
        id,
        description,
        item: GalleryItem::Poset(Arc::new(p)),
        expected: Expected::Poset {
            height: h,
            connected: true,
            minimal,
            contractible,
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn arrow(
    id: &'static str,
    description: &'static str,
    p: MonotoneMap,
    hurewicz: Status,
    fibration: bool,
    opfibration: bool,
    open: bool,
    closed: bool,
    minimal_map: bool,
) -> GalleryEntry {
    GalleryEntry {
        id,
        description,
        item: GalleryItem::Map(SliceMap::new(p).expect("gallery maps are nonempty")),
        expected: Expected::Map {
            hurewicz,
            fibration,
            opfibration,
            open,
            closed,
            minimal_map,
        },
    }
}

pub fn entries() -> Vec<GalleryEntry> {
    use Status::*;
    vec![
        arrow(
            "p1",
            "fibration over a < b that is not an opfibration; its reduction is a homeomorphism",
            p1(),
            Fibration,
            true,
            false,
            true,
            false,
            false,
        ),
        arrow(
            "p1op",
            "opposite of p1: not open, hence not a fibration",
            p1_op(),
            NotFibration,
            false,
            true,
            false,
            true,
            false,
        ),
        arrow(
            "p2",
            "Serre but not Hurewicz: no cocartesian lift of (a,2) over a <= b",
            p2(),
            NotFibration,
            true,
            false,
            true,
            false,
            false,
        ),
        arrow(
            "p3",
            "bifibration over a height-2 base with maximum; Hurewicz status undecided",
            p3(),
            Unknown,
            true,
            true,
            true,
            true,
            false,
        ),
        arrow(
            "p3_restricted",
            "p3 over the crown a, b < c, d (no maximum)",
            p3_restricted(),
            Unknown,
            true,
            true,
            true,
            true,
            false,
        ),
        arrow(
            "pi_sierpinski",
            "projection B4 x S -> S: a product fibration",
            pi_sierpinski(),
            Fibration,
            true,
            true,
            true,
            true,
            false,
        ),
        arrow(
            "p5_minimal_bifib",
            "minimal bifibration with contractible, pairwise non-homeomorphic fibers; not a fiber bundle",
            p5(),
            Unknown,
            true,
            true,
            true,
            true,
            true,
        ),
        space("S", "Sierpinski space 0 < 1", sierpinski(), 1, false, true),
        space("B1", "base of p1: a < b", b1(), 1, false, true),
        space("B2", "base of p2: a < b", b2(), 1, false, true),
        space("B3", "base of p3: a, b < c, d < e", b3(), 2, false, true),
        space("B4", "fiber of pi_sierpinski: a < b > c < d", b4(), 1, false, true),
        space("B5", "base of p5: the crown a, b < c, d", b5(), 1, true, false),
        space("E1", "total space of p1", e1(), 1, false, true),
        space("E2", "total space of p2", e2(), 1, false, true),
        space("E3", "total space of p3", e3(), 3, false, true),
        space("E5", "total space of p5", e5(), 2, true, false),
    ]
}

pub fn ids() -> Vec<&'static str> {
    entries().into_iter().map(|e| e.id).collect()
}

pub fn lookup(id: &str) -> Result<GalleryEntry> {
    entries()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownGalleryId(id.to_string()))
}
