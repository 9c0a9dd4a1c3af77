//! Text and JSON renderings of each command.

use std::fmt::Write;

use anyhow::{bail, Result};
use fintop::document::{
    bundle_to_json, functor_to_json, map_to_text, poset_to_json, poset_to_text, slice_to_json, trace_to_json,
};
use fintop::gallery::{self, Expected, GalleryEntry, GalleryItem};
use fintop::slice::map_core_with_order;
use fintop::stong::core_with_order;
use fintop::verdict::{closed_map_failure, open_map_failure};
use fintop::{
    beat_points, classify_grothendieck, decide_hurewicz_with, grothendieck_construction, is_fiber_bundle,
    is_minimal_space, necessary_conditions, BundleReport, DecideOptions, Document, MonotoneMap, Poset, PosetFunctor,
    ReductionTrace, SliceMap, Status,
};
use serde_json::{json, Value};

use crate::Settings;

pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn set(p: &Poset, items: impl IntoIterator<Item = usize>) -> String {
    let names: Vec<&str> = items.into_iter().map(|i| p.name(i)).collect();
    format!("{{{}}}", names.join(", "))
}

fn summary(p: &Poset) -> String {
    let mut s = format!("{}, height {}", plural(p.len(), "element"), p.height());
    if p.is_empty() {
        return s;
    }
    let k = p.components().len();
    if k == 1 {
        s.push_str(", connected");
    } else {
        write!(s, ", {k} components").unwrap();
    }
    s.push_str(if is_minimal_space(p) {
        ", minimal"
    } else {
        ", not minimal"
    });
    s
}

fn poset_info(p: &std::sync::Arc<Poset>) -> (String, Value) {
    let mut text = summary(p) + "\n";
    writeln!(text, "elements: {}", p.names().join(", ")).unwrap();
    let covers: Vec<String> = p
        .covers()
        .iter()
        .map(|&(a, b)| format!("{}<{}", p.name(a), p.name(b)))
        .collect();
    writeln!(text, "covers: {}", covers.join(", ")).unwrap();
    let components: Vec<String> = p.components().into_iter().map(|c| set(p, c)).collect();
    writeln!(text, "components: {}", components.join(" ")).unwrap();
    let beats = beat_points(p);
    let show = |v: &[(usize, usize)]| -> String {
        if v.is_empty() {
            return "none".into();
        }
        let items: Vec<String> = v
            .iter()
            .map(|&(e, w)| format!("{} (via {})", p.name(e), p.name(w)))
            .collect();
        items.join(", ")
    };
    writeln!(text, "down beat points: {}", show(&beats.down)).unwrap();
    writeln!(text, "up beat points: {}", show(&beats.up)).unwrap();
    let pairs = |v: &[(usize, usize)]| -> Vec<[&str; 2]> { v.iter().map(|&(e, w)| [p.name(e), p.name(w)]).collect() };
    let components: Vec<Vec<&str>> = p
        .components()
        .into_iter()
        .map(|c| c.into_iter().map(|i| p.name(i)).collect())
        .collect();
    let mut json = poset_to_json(p);
    json["kind"] = json!("poset");
    json["height"] = json!(p.height());
    json["components"] = json!(components);
    json["minimal"] = json!(!p.is_empty() && is_minimal_space(p));
    json["beat_points"] = json!({"down": pairs(&beats.down), "up": pairs(&beats.up)});
    (text, json)
}

fn map_info(m: &MonotoneMap) -> (String, Value) {
    let (e, b) = (m.dom(), m.cod());
    let hit: Vec<bool> = (0..b.len()).map(|y| m.values().contains(&y)).collect();
    let surjective = hit.iter().all(|&h| h);
    let mut text = format!(
        "map: {} -> {}, {}\n",
        plural(e.len(), "element"),
        plural(b.len(), "element"),
        if surjective { "surjective" } else { "not surjective" }
    );
    let mut fibers = serde_json::Map::new();
    for y in 0..b.len() {
        let fiber: Vec<&str> = (0..e.len()).filter(|&x| m.apply(x) == y).map(|x| e.name(x)).collect();
        writeln!(text, "fiber over {}: {}", b.name(y), set_names(&fiber)).unwrap();
        fibers.insert(b.name(y).to_string(), json!(fiber));
    }
    writeln!(text, "total space: {}", summary(e)).unwrap();
    writeln!(text, "base: {}", summary(b)).unwrap();
    let json = json!({
        "kind": "map",
        "domain": summary(e),
        "codomain": summary(b),
        "surjective": surjective,
        "fibers": fibers,
    });
    (text, json)
}

fn set_names(names: &[&str]) -> String {
    format!("{{{}}}", names.join(", "))
}

fn functor_info(d: &PosetFunctor) -> (String, Value) {
    let base = d.base();
    let mut text = format!(
        "{} functor over a base with {}\n",
        d.variance().as_str(),
        plural(base.len(), "element")
    );
    let mut fibers = serde_json::Map::new();
    for b in 0..base.len() {
        let f = d.fiber(b);
        writeln!(text, "value at {}: {}", base.name(b), summary(f)).unwrap();
        fibers.insert(base.name(b).to_string(), json!(summary(f)));
    }
    let json = json!({"kind": "functor", "variance": d.variance().as_str(), "values": fibers});
    (text, json)
}

pub fn info(doc: &Document) -> Report {
    let (text, json) = match doc {
        Document::Poset(p) => poset_info(p),
        Document::Map(m) => map_info(m),
        Document::Functor(d) => functor_info(d),
    };
    Report { text, json, code: 0 }
}

fn trace_text(t: &ReductionTrace, text: &mut String) {
    let p = t.original();
    for r in t.removed() {
        writeln!(
            text,
            "removed {} ({} beat point, via {})",
            p.name(r.element),
            r.kind.as_str(),
            p.name(r.witness)
        )
        .unwrap();
    }
}

pub fn core(doc: &Document, s: &Settings) -> Result<Report> {
    let x = match doc {
        Document::Poset(p) => p.clone(),
        Document::Map(m) => m.dom().clone(),
        Document::Functor(_) => bail!("expected a poset or map document, found a functor"),
    };
    let t = core_with_order(&x, &s.order(x.len()))?;
    let k = t.result().len();
    let mut text = format!(
        "core: {}{}\n",
        plural(k, "element"),
        if k == 1 { " (contractible)" } else { "" }
    );
    writeln!(text, "points: {}", t.result().names().join(", ")).unwrap();
    if s.verbose {
        trace_text(&t, &mut text);
    }
    let mut json = trace_to_json(&t);
    json["contractible"] = json!(k == 1);
    Ok(Report { text, json, code: 0 })
}

pub fn map_core(p: &SliceMap, s: &Settings) -> Report {
    let (q, t) = map_core_with_order(p, &s.order(p.total().len()));
    let mut text = format!(
        "map core: {} over {}{}\n",
        plural(q.total().len(), "element"),
        plural(q.base().len(), "element"),
        if t.removed().is_empty() {
            " (already minimal)"
        } else {
            ""
        }
    );
    writeln!(text, "points: {}", q.total().names().join(", ")).unwrap();
    if s.verbose {
        trace_text(&t, &mut text);
    }
    let json = json!({"trace": trace_to_json(&t), "map": slice_to_json(&q)});
    Report { text, json, code: 0 }
}

pub fn open(p: &SliceMap, closed: bool) -> Report {
    let (word, failure, rel, side) = if closed {
        ("closed", closed_map_failure(p), ">=", "above")
    } else {
        ("open", open_map_failure(p), "<=", "below")
    };
    let (e, b) = (p.total(), p.base());
    let text = match failure {
        None => format!("{word}\n"),
        Some((x, y)) => format!(
            "not {word} (witness: {} {rel} p({}) has no preimage {side} {})\n",
            b.name(y),
            e.name(x),
            e.name(x)
        ),
    };
    let witness = failure.map(|(x, y)| json!({"element": e.name(x), "base_point": b.name(y)}));
    Report {
        text,
        json: json!({word: failure.is_none(), "witness": witness}),
        code: u8::from(failure.is_some()),
    }
}

pub fn groth(p: &SliceMap, s: &Settings) -> Report {
    let r = classify_grothendieck(p);
    let mut text = match (r.is_fibration, r.is_opfibration) {
        (true, true) => "bifibration\n".to_string(),
        (true, false) => "fibration, not an opfibration\n".to_string(),
        (false, true) => "opfibration, not a fibration\n".to_string(),
        (false, false) => "neither a fibration nor an opfibration\n".to_string(),
    };
    let (fib, opfib): (Vec<String>, Vec<String>) = (
        r.fibration_failures.iter().map(|w| w.describe(p)).collect(),
        r.opfibration_failures.iter().map(|w| w.describe(p)).collect(),
    );
    for list in [&fib, &opfib] {
        let shown = if s.verbose { list.len() } else { list.len().min(1) };
        for w in &list[..shown] {
            writeln!(text, "{w}").unwrap();
        }
    }
    let json = json!({
        "fibration": r.is_fibration,
        "opfibration": r.is_opfibration,
        "bifibration": r.is_bifibration(),
        "fibration_failures": fib,
        "opfibration_failures": opfib,
        "alpha": r.alpha.as_ref().map(functor_to_json),
        "beta": r.beta.as_ref().map(functor_to_json),
    });
    Report {
        text,
        json,
        code: u8::from(!r.is_bifibration()),
    }
}

pub fn bundle(p: &SliceMap, s: &Settings) -> Result<Report> {
    let b = p.base();
    Ok(match is_fiber_bundle(p, s.budget)? {
        BundleReport::Bundle(local) => {
            let mut text = "fiber bundle\n".to_string();
            if s.verbose {
                for t in &local {
                    writeln!(text, "trivial over the open star of {}", b.name(t.base_point)).unwrap();
                }
            }
            Report {
                text,
                json: json!({"bundle": true}),
                code: 0,
            }
        }
        BundleReport::NotBundle { at } => Report {
            text: format!(
                "not a fiber bundle (no trivialization over the open star of {})\n",
                b.name(at)
            ),
            json: json!({"bundle": false, "at": b.name(at)}),
            code: 1,
        },
        BundleReport::Undecided { at, budget } => Report {
            text: format!(
                "undecided: isomorphism search over {} exceeded {budget} nodes\n",
                b.name(at)
            ),
            json: json!({"bundle": null, "at": b.name(at), "budget": budget}),
            code: 2,
        },
    })
}

pub fn hurewicz(p: &SliceMap, s: &Settings, retract_search: usize) -> Result<Report> {
    let options = DecideOptions {
        order: s.order(p.total().len()),
        retract_search,
        guard: s.guard,
    };
    let v = decide_hurewicz_with(p, &options)?;
    let mut text = match v.status {
        Status::Fibration => match v.certificate() {
            Some(c) => format!("fibration (certificate: {})\n", c.describe()),
            None => "fibration (no component meets the image)\n".to_string(),
        },
        Status::NotFibration => format!(
            "not a fibration (witness: {})\n",
            v.witness().map(|w| w.detail.as_str()).unwrap_or("none")
        ),
        Status::Unknown => "unknown\n".to_string(),
    };
    if s.verbose {
        let base = p.base();
        for c in &v.components {
            writeln!(
                text,
                "component {}: {}",
                set(base, c.base_component.iter().copied()),
                c.status.as_str()
            )
            .unwrap();
            if let Some(cert) = &c.certificate {
                writeln!(text, "  certificate: {}", cert.describe()).unwrap();
            }
            if let Some(w) = &c.witness {
                writeln!(text, "  witness [{}]: {}", w.condition.as_str(), w.detail).unwrap();
            }
            let removed: Vec<&str> = c.reduction.removed_names().into_iter().map(|(n, _)| n).collect();
            writeln!(text, "  reduction removes: {}", set_names(&removed)).unwrap();
            for e in &c.necessary.entries {
                let mark = if e.passed { "pass" } else { "FAIL" };
                writeln!(text, "  {mark} {}", e.condition.as_str()).unwrap();
            }
        }
        for c in &v.uncovered {
            writeln!(text, "component {}: not in the image", set(base, c.iter().copied())).unwrap();
        }
    }
    Ok(Report {
        text,
        json: v.to_json(),
        code: v.status.exit_code() as u8,
    })
}

pub fn necessary(p: &SliceMap) -> Result<Report> {
    let r = necessary_conditions(p)?;
    let mut text = String::new();
    for e in &r.entries {
        match &e.witness {
            None => writeln!(text, "pass {}", e.condition.as_str()).unwrap(),
            Some(w) => writeln!(text, "FAIL {}: {}", e.condition.as_str(), w.detail).unwrap(),
        }
    }
    Ok(Report {
        text,
        json: r.to_json(),
        code: u8::from(!r.all_passed()),
    })
}

pub fn construct(d: &PosetFunctor) -> Result<Report> {
    let c = grothendieck_construction(d)?;
    let m = c.projection.map();
    Ok(Report {
        text: map_to_text("projection", "total", "base", m),
        json: bundle_to_json(m, "total", "base", None),
        code: 0,
    })
}

fn kind(entry: &GalleryEntry) -> &'static str {
    match entry.item {
        GalleryItem::Poset(_) => "poset",
        GalleryItem::Map(_) => "map",
    }
}

pub fn gallery_list() -> Report {
    let entries = gallery::entries();
    let width = entries.iter().map(|e| e.id.len()).max().unwrap_or(0);
    let mut text = String::new();
    let mut json = vec![];
    for e in &entries {
        writeln!(text, "{:width$}  {:5}  {}", e.id, kind(e), e.description).unwrap();
        json.push(json!({
            "id": e.id,
            "kind": kind(e),
            "description": e.description,
            "expected": e.expected.to_json(),
        }));
    }
    Report {
        text,
        json: Value::Array(json),
        code: 0,
    }
}

/// Names for the two spaces of a gallery map.
fn space_names(id: &str) -> (&'static str, &'static str) {
    match id {
        "p1" => ("E1", "B1"),
        "p1op" => ("E1op", "B1op"),
        "p2" => ("E2", "B2"),
        "p3" => ("E3", "B3"),
        "p3_restricted" => ("E3r", "B3r"),
        "pi_sierpinski" => ("B4xS", "S"),
        "p5_minimal_bifib" => ("E5", "B5"),
        _ => ("E", "B"),
    }
}

fn expected_comment(e: &Expected) -> String {
    let fields = e.to_json();
    let parts: Vec<String> = fields
        .as_object()
        .expect("expected outcomes are objects")
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    parts.join(" ").replace('"', "")
}

pub fn gallery_emit(entry: &GalleryEntry) -> Result<Report> {
    let header = format!(
        "# {}: {}\n# expected: {}\n",
        entry.id,
        entry.description,
        expected_comment(&entry.expected)
    );
    let (body, json) = match &entry.item {
        GalleryItem::Poset(p) => {
            let mut json = poset_to_json(p);
            json["expected"] = entry.expected.to_json();
            (poset_to_text(entry.id, p), json)
        }
        GalleryItem::Map(m) => {
            let (total, base) = space_names(entry.id);
            (
                map_to_text(entry.id, total, base, m.map()),
                bundle_to_json(m.map(), total, base, Some(entry.expected.to_json())),
            )
        }
    };
    Ok(Report {
        text: header + &body,
        json,
        code: 0,
    })
}
