//! Reading and writing posets, maps and functors as JSON, plus a small text
//! format for hand-written fixtures:
//!
//! ```text
//! # comments run to the end of the line
//! poset E { points: (a,0), (a,1), (b,0); covers: (a,0)<(b,0), (a,0)<(a,1); }
//! poset B { points: a, b; covers: a<b; }
//! map p : E -> B { (a,0) -> a, (a,1) -> a, (b,0) -> b }
//! ```
//!
//! Cover lists accept chains such as `a<b<c`.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::grothendieck::{PosetFunctor, Variance};
use crate::map::MonotoneMap;
use crate::poset::Poset;
use crate::reduce::ReductionTrace;
use crate::slice::SliceMap;

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Poset(Arc<Poset>),
    Map(MonotoneMap),
    Functor(PosetFunctor),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Poset(_) => "poset",
            Document::Map(_) => "map",
            Document::Functor(_) => "functor",
        }
    }
}

fn general(message: impl Into<String>) -> Error {
    Error::Parse {
        line: None,
        field: None,
        message: message.into(),
    }
}

fn parse_err(field: &str, message: impl Into<String>) -> Error {
    Error::parse(field, message)
}

pub fn poset_to_json(p: &Poset) -> Value {
    let covers: Vec<[&str; 2]> = p.covers().iter().map(|&(a, b)| [p.name(a), p.name(b)]).collect();
    json!({"elements": p.names(), "covers": covers})
}

fn string_list<'a>(v: &'a Value, field: &str) -> Result<Vec<&'a str>> {
    v.as_array()
        .ok_or_else(|| parse_err(field, "expected an array"))?
        .iter()
        .map(|x| x.as_str().ok_or_else(|| parse_err(field, "expected a string")))
        .collect()
}

pub fn poset_from_json(v: &Value) -> Result<Poset> {
    let obj = v.as_object().ok_or_else(|| parse_err("poset", "expected an object"))?;
    let elements = string_list(
        obj.get("elements").ok_or_else(|| parse_err("elements", "missing"))?,
        "elements",
    )?;
    let mut covers = vec![];
    if let Some(c) = obj.get("covers") {
        for pair in c.as_array().ok_or_else(|| parse_err("covers", "expected an array"))? {
            let pair = string_list(pair, "covers")?;
            if pair.len() != 2 {
                return Err(parse_err("covers", "each cover is a [lower, upper] pair"));
            }
            covers.push((pair[0], pair[1]));
        }
    }
    Poset::new(&elements, &covers)
}

fn assignment_to_json(m: &MonotoneMap) -> Value {
    let mut out = Map::new();
    for (x, &y) in m.values().iter().enumerate() {
        out.insert(m.dom().name(x).to_string(), Value::String(m.cod().name(y).to_string()));
    }
    Value::Object(out)
}

fn assignment_from_json(v: &Value, dom: Arc<Poset>, cod: Arc<Poset>, field: &str) -> Result<MonotoneMap> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err(field, "expected an object of name pairs"))?;
    let mut pairs = vec![];
    for (k, val) in obj {
        let val = val
            .as_str()
            .ok_or_else(|| parse_err(field, format!("value of {k} is not a string")))?;
        pairs.push((k.as_str(), val));
    }
    MonotoneMap::from_names(dom, cod, &pairs)
}

pub fn map_to_json(m: &MonotoneMap) -> Value {
    json!({
        "domain": poset_to_json(m.dom()),
        "codomain": poset_to_json(m.cod()),
        "values": assignment_to_json(m),
    })
}

/// A map document with the derived fibers, which are informative only.
pub fn slice_to_json(p: &SliceMap) -> Value {
    let mut v = map_to_json(p.map());
    let mut fibers = Map::new();
    for b in 0..p.base().len() {
        fibers.insert(p.base().name(b).to_string(), json!(p.total().names_of(p.fiber_set(b))));
    }
    v["fibers"] = Value::Object(fibers);
    v
}

fn poset_or_ref(v: &Value, named: &HashMap<String, Arc<Poset>>, field: &str) -> Result<Arc<Poset>> {
    match v {
        Value::String(name) => named
            .get(name)
            .cloned()
            .ok_or_else(|| parse_err(field, format!("unknown poset {name}"))),
        _ => Ok(Arc::new(poset_from_json(v).map_err(|e| within(e, field))?)),
    }
}

fn within(e: Error, field: &str) -> Error {
    match e {
        Error::Parse {
            line,
            field: inner,
            message,
        } => Error::Parse {
            line,
            field: Some(match inner {
                Some(f) => format!("{field}.{f}"),
                None => field.to_string(),
            }),
            message,
        },
        other => other,
    }
}

pub fn map_from_json(v: &Value, named: &HashMap<String, Arc<Poset>>) -> Result<MonotoneMap> {
    let obj = v.as_object().ok_or_else(|| parse_err("map", "expected an object"))?;
    let get = |k: &str| obj.get(k).ok_or_else(|| parse_err(k, "missing"));
    let dom = poset_or_ref(get("domain")?, named, "domain")?;
    let cod = poset_or_ref(get("codomain")?, named, "codomain")?;
    assignment_from_json(get("values")?, dom, cod, "values")
}

fn pair_key(base: &Poset, lo: usize, hi: usize) -> String {
    format!("{}<={}", base.name(lo), base.name(hi))
}

pub fn functor_to_json(d: &PosetFunctor) -> Value {
    let base = d.base();
    let mut fibers = Map::new();
    for b in 0..base.len() {
        fibers.insert(base.name(b).to_string(), poset_to_json(d.fiber(b)));
    }
    let mut transitions = Map::new();
    for ((lo, hi), t) in d.transitions() {
        if lo != hi {
            transitions.insert(pair_key(base, lo, hi), assignment_to_json(t));
        }
    }
    json!({
        "base": poset_to_json(base),
        "variance": d.variance().as_str(),
        "fibers": fibers,
        "transitions": transitions,
    })
}

pub fn functor_from_json(v: &Value) -> Result<PosetFunctor> {
    let obj = v
        .as_object()
        .ok_or_else(|| parse_err("functor", "expected an object"))?;
    let get = |k: &str| obj.get(k).ok_or_else(|| parse_err(k, "missing"));
    let base = Arc::new(poset_from_json(get("base")?).map_err(|e| within(e, "base"))?);
    let variance = match get("variance")?.as_str() {
        Some("covariant") => Variance::Covariant,
        Some("contravariant") => Variance::Contravariant,
        _ => return Err(parse_err("variance", "expected \"covariant\" or \"contravariant\"")),
    };
    let fiber_docs = get("fibers")?
        .as_object()
        .ok_or_else(|| parse_err("fibers", "expected an object"))?;
    let mut fibers = Vec::with_capacity(base.len());
    for b in base.names() {
        let doc = fiber_docs
            .get(b)
            .ok_or_else(|| parse_err("fibers", format!("missing fiber over {b}")))?;
        fibers.push(Arc::new(
            poset_from_json(doc).map_err(|e| within(e, &format!("fibers.{b}")))?,
        ));
    }
    if let Some(extra) = fiber_docs.keys().find(|k| !base.contains_name(k)) {
        return Err(parse_err("fibers", format!("{extra} is not a base point")));
    }
    let mut given = vec![];
    if let Some(t) = obj.get("transitions") {
        let t = t
            .as_object()
            .ok_or_else(|| parse_err("transitions", "expected an object"))?;
        for (key, assignment) in t {
            let (lo, hi) = key
                .split_once("<=")
                .ok_or_else(|| parse_err("transitions", format!("key {key} is not of the form b<=b'")))?;
            let (lo, hi) = (base.index_of(lo.trim())?, base.index_of(hi.trim())?);
            let (src, dst) = match variance {
                Variance::Covariant => (lo, hi),
                Variance::Contravariant => (hi, lo),
            };
            let field = format!("transitions.{key}");
            let m = assignment_from_json(assignment, fibers[src].clone(), fibers[dst].clone(), &field)?;
            given.push(((lo, hi), m));
        }
    }
    PosetFunctor::new(base, variance, fibers, given)
}

pub fn trace_to_json(t: &ReductionTrace) -> Value {
    let original = t.original();
    let removed: Vec<Value> = t
        .removed()
        .iter()
        .map(|r| json!([original.name(r.element), r.kind.as_str(), original.name(r.witness)]))
        .collect();
    json!({
        "removed": removed,
        "result": poset_to_json(t.result()),
        "retraction": assignment_to_json(t.retraction()),
    })
}

/// A map document whose posets are listed separately and referenced by name.
pub fn bundle_to_json(p: &MonotoneMap, total: &str, base: &str, expected: Option<Value>) -> Value {
    let mut posets = Map::new();
    posets.insert(total.to_string(), poset_to_json(p.dom()));
    posets.insert(base.to_string(), poset_to_json(p.cod()));
    let mut out = json!({
        "posets": posets,
        "map": {"domain": total, "codomain": base, "values": assignment_to_json(p)},
    });
    if let Some(e) = expected {
        out["expected"] = e;
    }
    out
}

pub fn document_to_json(doc: &Document) -> Value {
    match doc {
        Document::Poset(p) => poset_to_json(p),
        Document::Map(m) => map_to_json(m),
        Document::Functor(d) => functor_to_json(d),
    }
}

/// Parses JSON (any document kind) or the text format.
pub fn parse_document(text: &str) -> Result<Document> {
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: Some(e.line()),
            field: None,
            message: e.to_string(),
        })?;
        document_from_json(&v)
    } else {
        parse_text(text)
    }
}

pub fn document_from_json(v: &Value) -> Result<Document> {
    let obj = v.as_object().ok_or_else(|| general("expected a JSON object"))?;
    if obj.contains_key("variance") {
        return Ok(Document::Functor(functor_from_json(v)?));
    }
    if obj.contains_key("elements") {
        return Ok(Document::Poset(Arc::new(poset_from_json(v)?)));
    }
    if let Some(m) = obj.get("map") {
        let mut named = HashMap::new();
        if let Some(posets) = obj.get("posets") {
            let posets = posets
                .as_object()
                .ok_or_else(|| parse_err("posets", "expected an object"))?;
            for (name, doc) in posets {
                let p = poset_from_json(doc).map_err(|e| within(e, &format!("posets.{name}")))?;
                named.insert(name.clone(), Arc::new(p));
            }
        }
        return Ok(Document::Map(map_from_json(m, &named).map_err(|e| within(e, "map"))?));
    }
    if obj.contains_key("values") {
        return Ok(Document::Map(map_from_json(v, &HashMap::new())?));
    }
    Err(general("unrecognised document: expected a poset, map or functor"))
}

struct Text<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Text<'a> {
    fn line_at(&self, pos: usize) -> usize {
        self.src[..pos].matches('\n').count() + 1
    }

    fn err(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: Some(self.line_at(pos)),
            field: None,
            message: message.into(),
        }
    }

    fn skip_space(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_space();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-' || c == '\''))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err(self.pos, "expected a name"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        self.skip_space();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.err(self.pos, format!("expected '{token}'")))
        }
    }

    /// The text up to the closing brace, with its start offset.
    fn block(&mut self) -> Result<(usize, &'a str)> {
        self.expect("{")?;
        let start = self.pos;
        let len = self.src[start..]
            .find('}')
            .ok_or_else(|| self.err(start, "unclosed '{'"))?;
        self.pos = start + len + 1;
        Ok((start, &self.src[start..start + len]))
    }
}

/// Splits on `sep` outside parentheses, keeping each piece's offset.
fn split_top(s: &str, offset: usize, sep: char) -> Vec<(usize, &str)> {
    let mut out = vec![];
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ if c == sep && depth == 0 => {
                out.push((offset + start, &s[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((offset + start, &s[start..]));
    out
}

fn strip_comments(s: &str) -> String {
    s.lines()
        .map(|l| match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn parse_text(src: &str) -> Result<Document> {
    let cleaned = strip_comments(src);
    let mut t = Text { src: &cleaned, pos: 0 };
    let mut posets: Vec<(String, Arc<Poset>)> = vec![];
    let mut maps: Vec<MonotoneMap> = vec![];
    loop {
        t.skip_space();
        if t.pos >= t.src.len() {
            break;
        }
        let at = t.pos;
        match t.ident()? {
            "poset" => {
                let name = t.ident()?.to_string();
                if posets.iter().any(|(n, _)| *n == name) {
                    return Err(t.err(at, format!("poset {name} declared twice")));
                }
                let (start, body) = t.block()?;
                let p = parse_poset_body(&t, start, body)?;
                posets.push((name, Arc::new(p)));
            }
            "map" => {
                t.ident()?;
                t.expect(":")?;
                let dom_at = t.pos;
                let dom = t.ident()?;
                t.expect("->")?;
                let cod = t.ident()?;
                let find = |n: &str| posets.iter().find(|(m, _)| m == n).map(|(_, p)| p.clone());
                let dom = find(dom).ok_or_else(|| t.err(dom_at, format!("unknown poset {dom}")))?;
                let cod = find(cod).ok_or_else(|| t.err(dom_at, format!("unknown poset {cod}")))?;
                let (start, body) = t.block()?;
                let mut pairs = vec![];
                for (off, entry) in split_top(body, start, ',')
                    .into_iter()
                    .flat_map(|(o, s)| split_top(s, o, ';'))
                {
                    if entry.trim().is_empty() {
                        continue;
                    }
                    let (x, y) = entry
                        .split_once("->")
                        .ok_or_else(|| t.err(off, format!("expected 'x -> y', found '{}'", entry.trim())))?;
                    pairs.push((x.trim().to_string(), y.trim().to_string()));
                }
                let m = MonotoneMap::from_names(dom, cod, &pairs).map_err(|e| at_line(e, t.line_at(start)))?;
                maps.push(m);
            }
            other => return Err(t.err(at, format!("expected 'poset' or 'map', found '{other}'"))),
        }
    }
    match (maps.len(), posets.len()) {
        (1, _) => Ok(Document::Map(maps.pop().expect("one map"))),
        (0, 1) => Ok(Document::Poset(posets.pop().expect("one poset").1)),
        (0, 0) => Err(general("empty document")),
        _ => Err(general("a text document holds one map or one poset")),
    }
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::Parse {
            line: Some(line),
            field: None,
            message: other.to_string(),
        },
    }
}

fn parse_poset_body(t: &Text, start: usize, body: &str) -> Result<Poset> {
    let mut points: Vec<String> = vec![];
    let mut covers: Vec<(String, String)> = vec![];
    for (off, section) in split_top(body, start, ';') {
        if section.trim().is_empty() {
            continue;
        }
        let (key, list) = section
            .split_once(':')
            .ok_or_else(|| t.err(off, "expected 'points:' or 'covers:'"))?;
        let list_off = off + key.len() + 1;
        match key.trim() {
            "points" => {
                for (_, p) in split_top(list, list_off, ',') {
                    if !p.trim().is_empty() {
                        points.push(p.trim().to_string());
                    }
                }
            }
            "covers" => {
                for (o, chain) in split_top(list, list_off, ',') {
                    if chain.trim().is_empty() {
                        continue;
                    }
                    let items: Vec<&str> = split_top(chain, o, '<').into_iter().map(|(_, s)| s.trim()).collect();
                    if items.len() < 2 || items.iter().any(|s| s.is_empty()) {
                        return Err(t.err(o, format!("expected 'a<b', found '{}'", chain.trim())));
                    }
                    for w in items.windows(2) {
                        covers.push((w[0].to_string(), w[1].to_string()));
                    }
                }
            }
            other => return Err(t.err(off, format!("unknown section '{other}'"))),
        }
    }
    Poset::new(&points, &covers).map_err(|e| at_line(e, t.line_at(start)))
}

/// The text form of a poset.
pub fn poset_to_text(name: &str, p: &Poset) -> String {
    let covers: Vec<String> = p
        .covers()
        .iter()
        .map(|&(a, b)| format!("{}<{}", p.name(a), p.name(b)))
        .collect();
    format!(
        "poset {name} {{ points: {}; covers: {}; }}\n",
        p.names().join(", "),
        covers.join(", ")
    )
}

pub fn map_to_text(name: &str, total: &str, base: &str, m: &MonotoneMap) -> String {
    let entries: Vec<String> = m
        .values()
        .iter()
        .enumerate()
        .map(|(x, &y)| format!("{} -> {}", m.dom().name(x), m.cod().name(y)))
        .collect();
    format!(
        "{}{}map {name} : {total} -> {base} {{ {} }}\n",
        poset_to_text(total, m.dom()),
        poset_to_text(base, m.cod()),
        entries.join(", ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn poset_round_trip() {
        let e3 = gallery::e3();
        let v = poset_to_json(&e3);
        assert_eq!(poset_from_json(&v).unwrap(), e3);
        let text = poset_to_text("E", &e3);
        match parse_text(&text).unwrap() {
            Document::Poset(p) => assert_eq!(*p, e3),
            other => panic!("unexpected {}", other.kind()),
        }
    }

    #[test]
    fn map_round_trip() {
        let p3 = gallery::p3();
        let doc = Document::Map(p3.clone());
        assert_eq!(parse_document(&document_to_json(&doc).to_string()).unwrap(), doc);
        let bundle = bundle_to_json(&p3, "E3", "B3", Some(json!({"hurewicz": "unknown"})));
        assert_eq!(parse_document(&bundle.to_string()).unwrap(), doc);
        let text = map_to_text("p", "E", "B", &p3);
        assert_eq!(parse_document(&text).unwrap(), doc);
    }

    #[test]
    fn functor_round_trip() {
        let p = SliceMap::new(gallery::p3()).unwrap();
        for d in [
            crate::grothendieck::beta_functor(&p).unwrap(),
            crate::grothendieck::alpha_functor(&p).unwrap(),
        ] {
            let v = functor_to_json(&d);
            assert_eq!(functor_from_json(&v).unwrap(), d);
        }
    }

    #[test]
    fn text_with_chains_and_comments() {
        let src = "# a chain\nposet C {\n  points: x, y, z;\n  covers: x<y<z;\n}\n";
        let Document::Poset(p) = parse_text(src).unwrap() else {
            panic!("expected a poset")
        };
        assert!(p.lt(0, 2));
        assert_eq!(p.covers().len(), 2);
    }

    #[test]
    fn errors_carry_locations() {
        let err = parse_document("{\"elements\": [\"a\"], \n \"covers\": [[\"a\"]]}").unwrap_err();
        assert!(matches!(err, Error::Parse { field: Some(ref f), .. } if f == "covers"));
        let err = parse_document("{ not json").unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(1), .. }));
        let err = parse_text("poset A { points: a, b;\n covers: a<c; }").unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(1), .. }));
        let err = parse_text("poset A { points: a;\n}\nfoo").unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(3), .. }));
    }

    #[test]
    fn functor_documents_need_every_transition() {
        let v = json!({
            "base": {"elements": ["0", "1"], "covers": [["0", "1"]]},
            "variance": "covariant",
            "fibers": {"0": {"elements": ["*"]}, "1": {"elements": ["x", "y"], "covers": [["x", "y"]]}},
            "transitions": {}
        });
        assert!(matches!(functor_from_json(&v), Err(Error::FunctorialityViolated(_))));
    }
}
