//! Line-oriented text format for presentations, MS-graphs and framings.
//!
//! ```text
//! # comment
//! [graph]
//! vertex A
//! edge a = A -- A orient=fixed kind=corner
//!
//! [surface L1]
//! genus 0
//! boundary a
//! boundary b^-1
//!
//! [handle T1]
//! kind=round index=1 height=0
//! in = L1
//! out = L3
//!
//! [pairs]
//! lower x y | z
//!
//! [chosen]
//! T1 = a
//!
//! [tau]
//! case1 T0 T2 alpha=1 beta=-1
//! case2 T0 meridian=(3, 0)
//! omega T0 = (1, 3)
//! case2L vertex T0 role=source
//! case2L edge L1 = T0 -> T1 mu=0
//! case3 T0 cycle x y alpha=1
//! ```
//!
//! `case2` also accepts a trailing `omega=(k, l)` on the same line.
//! Diagnostics carry 1-based line and column numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::framed::{FrameValue, Framing, MsEdge, MsGraph, Role};
use crate::model::{
    validate_presentation, EdgeKind, FlowPresentation, HandleKind, HandleRecord, HandleRegions, Orientation,
    ValidationReport,
};
use crate::tau::{Case1Record, Case3Record, TorusRecord};
use crate::words::{CyclicWord, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: {message}")]
    Semantic { line: usize, column: usize, message: String },
    #[error("missing [{0}]")]
    Missing(&'static str),
    #[error("presentation is invalid:\n{0}")]
    Invalid(ValidationReport),
}

impl FormatError {
    /// `(line, column)` for located errors.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            FormatError::Syntax { line, column, .. } | FormatError::Semantic { line, column, .. } => {
                Some((*line, *column))
            }
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Clone, Debug)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

const PUNCT: &[char] = &['=', '(', ')', ',', '|', '[', ']'];

fn lex(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    let col_of = |byte: usize| line[..byte].chars().count() + 1;
    while let Some(&(i, c)) = chars.peek() {
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if PUNCT.contains(&c) {
            chars.next();
            out.push(Tok { text: &line[i..i + c.len_utf8()], col: col_of(i) });
            continue;
        }
        let start = i;
        let mut end = i;
        while let Some(&(j, d)) = chars.peek() {
            if d.is_whitespace() || d == '#' || PUNCT.contains(&d) {
                break;
            }
            end = j + d.len_utf8();
            chars.next();
        }
        out.push(Tok { text: &line[start..end], col: col_of(start) });
    }
    out
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '+'))
}

/// Token stream of one line with located errors.
struct Line<'a> {
    no: usize,
    toks: Vec<Tok<'a>>,
    pos: usize,
    end_col: usize,
}

impl<'a> Line<'a> {
    fn new(no: usize, text: &'a str) -> Self {
        let end_col = text.split('#').next().unwrap_or("").trim_end().chars().count() + 1;
        Line { no, toks: lex(text), pos: 0, end_col }
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, FormatError> {
        Err(FormatError::Syntax { line: self.no, column: self.col(), message: message.into() })
    }

    fn syntax_at<T>(&self, col: usize, message: impl Into<String>) -> Result<T, FormatError> {
        Err(FormatError::Syntax { line: self.no, column: col, message: message.into() })
    }

    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(|t| t.text)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn next(&mut self, what: &str) -> Result<Tok<'a>, FormatError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.syntax(format!("expected {what}, found end of line")),
        }
    }

    fn expect(&mut self, text: &str) -> Result<(), FormatError> {
        let col = self.col();
        let t = self.next(&format!("`{text}`"))?;
        if t.text != text {
            return self.syntax_at(col, format!("expected `{text}`, found `{}`", t.text));
        }
        Ok(())
    }

    fn ident(&mut self, what: &str) -> Result<Tok<'a>, FormatError> {
        let t = self.next(what)?;
        if !is_ident(t.text) {
            return self.syntax_at(t.col, format!("`{}` is not a valid {what}", t.text));
        }
        Ok(t)
    }

    fn int(&mut self, what: &str) -> Result<i64, FormatError> {
        let t = self.next(what)?;
        t.text.parse().or_else(|_| self.syntax_at(t.col, format!("expected integer {what}, found `{}`", t.text)))
    }

    fn finish(&self) -> Result<(), FormatError> {
        if !self.at_end() {
            return self.syntax(format!("unexpected `{}`", self.toks[self.pos].text));
        }
        Ok(())
    }

    /// `( int , int )`
    fn int_pair(&mut self, what: &str) -> Result<(i64, i64), FormatError> {
        self.expect("(")?;
        let a = self.int(what)?;
        self.expect(",")?;
        let b = self.int(what)?;
        self.expect(")")?;
        Ok((a, b))
    }

    /// `key = ` followed by whatever the caller reads.
    fn key(&mut self, key: &str) -> Result<(), FormatError> {
        self.expect(key)?;
        self.expect("=")
    }

    /// Letters up to the end of the line or a `|`.
    fn letters(&mut self) -> Result<Vec<(Letter, usize)>, FormatError> {
        let mut out = Vec::new();
        while let Some(text) = self.peek() {
            if text == "|" {
                break;
            }
            let t = self.next("letter")?;
            let (label, neg) = match t.text.strip_suffix("^-1") {
                Some(l) => (l, true),
                None => (t.text, false),
            };
            if !is_ident(label) {
                return self.syntax_at(t.col, format!("malformed letter `{}`", t.text));
            }
            let letter = if neg { Letter::neg(label) } else { Letter::pos(label) };
            out.push((letter, t.col));
        }
        if out.is_empty() {
            return self.syntax("expected at least one letter");
        }
        Ok(out)
    }

    /// Identifiers separated by whitespace or commas, at least one.
    fn id_list(&mut self, what: &str) -> Result<Vec<Tok<'a>>, FormatError> {
        let mut out = Vec::new();
        while !self.at_end() {
            if self.peek() == Some(",") && !out.is_empty() {
                self.pos += 1;
                continue;
            }
            out.push(self.ident(what)?);
        }
        if out.is_empty() {
            return self.syntax(format!("expected at least one {what}"));
        }
        Ok(out)
    }
}

/// A letter or id reference checked once the whole document is read.
struct Ref {
    line: usize,
    col: usize,
    label: String,
}

fn semantic<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Semantic { line, column, message: message.into() })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Graph,
    Surface,
    Handle,
    Pairs,
    Chosen,
    Tau,
}

#[derive(Default)]
struct Builder {
    p: FlowPresentation,
    letters: Vec<Ref>,
    region_refs: Vec<Ref>,
    handle_refs: Vec<Ref>,
    vertex_refs: Vec<Ref>,
    ring_vertices: Vec<(String, Role)>,
    ring_edges: Vec<(MsEdge, FrameValue, usize, usize)>,
    omega_lines: Vec<(Ref, (i64, i64))>,
    /// Surfaces and handles awaiting their mandatory lines.
    genus_seen: BTreeSet<String>,
    handle_attrs: BTreeMap<String, (HandleKind, u8, Option<u32>)>,
    flat: BTreeMap<String, BTreeSet<String>>,
    incoming: BTreeMap<String, BTreeSet<String>>,
    outgoing: BTreeMap<String, BTreeSet<String>>,
    header_lines: BTreeMap<String, usize>,
}

impl Builder {
    fn word(&mut self, line: usize, letters: Vec<(Letter, usize)>) -> CyclicWord {
        for (l, col) in &letters {
            self.letters.push(Ref { line, col: *col, label: l.label.clone() });
        }
        CyclicWord::new(letters.into_iter().map(|(l, _)| l).collect()).expect("non-empty by construction")
    }
}

/// Parses a presentation and validates it.
pub fn parse_flow(text: &str) -> Result<FlowPresentation, FormatError> {
    let p = parse_flow_unvalidated(text)?;
    let report = validate_presentation(&p);
    if !report.is_empty() {
        return Err(FormatError::Invalid(report));
    }
    Ok(p)
}

/// Parses a presentation, checking syntax and references but not the
/// structural invariants.
pub fn parse_flow_unvalidated(text: &str) -> Result<FlowPresentation, FormatError> {
    let mut b = Builder::default();
    let mut section = Section::None;
    let mut current = String::new();
    let mut graph_seen = false;
    let mut singletons: BTreeSet<&'static str> = BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let mut ln = Line::new(i + 1, raw);
        if ln.at_end() {
            continue;
        }
        if ln.peek() == Some("[") {
            ln.pos += 1;
            let name = ln.next("section name")?;
            let col = name.col;
            let (next, needs_id) = match name.text {
                "graph" => (Section::Graph, false),
                "surface" => (Section::Surface, true),
                "handle" => (Section::Handle, true),
                "pairs" => (Section::Pairs, false),
                "chosen" => (Section::Chosen, false),
                "tau" => (Section::Tau, false),
                other => return ln.syntax_at(col, format!("unknown section `{other}`")),
            };
            if needs_id {
                let id = ln.ident(&format!("{} id", name.text))?;
                current = id.text.to_string();
                let clash = match next {
                    Section::Surface => b.p.surfaces.contains_key(&current),
                    _ => b.p.handles.contains_key(&current) || b.handle_attrs.contains_key(&current),
                };
                if clash {
                    return semantic(ln.no, id.col, format!("duplicate {} id `{current}`", name.text));
                }
                b.header_lines.insert(format!("{}:{current}", name.text), ln.no);
                if next == Section::Surface {
                    b.p.surfaces.insert(
                        current.clone(),
                        crate::model::SurfaceRegion { id: current.clone(), genus_signed: 0, words: Vec::new() },
                    );
                }
            } else {
                let key: &'static str = match next {
                    Section::Graph => "graph",
                    Section::Pairs => "pairs",
                    Section::Chosen => "chosen",
                    _ => "tau",
                };
                if !singletons.insert(key) {
                    return semantic(ln.no, col, format!("duplicate [{key}] section"));
                }
                graph_seen |= next == Section::Graph;
            }
            ln.expect("]")?;
            ln.finish()?;
            section = next;
            continue;
        }
        match section {
            Section::None => return ln.syntax("content before the first section header"),
            Section::Graph => graph_line(&mut b, &mut ln)?,
            Section::Surface => surface_line(&mut b, &mut ln, &current)?,
            Section::Handle => handle_line(&mut b, &mut ln, &current)?,
            Section::Pairs => pairs_line(&mut b, &mut ln)?,
            Section::Chosen => chosen_line(&mut b, &mut ln)?,
            Section::Tau => tau_line(&mut b, &mut ln)?,
        }
    }
    if !graph_seen {
        return Err(FormatError::Missing("graph"));
    }
    if b.p.surfaces.is_empty() {
        return Err(FormatError::Missing("surface"));
    }
    resolve(b)
}

fn graph_line(b: &mut Builder, ln: &mut Line) -> Result<(), FormatError> {
    let head = ln.next("`vertex` or `edge`")?;
    match head.text {
        "vertex" => {
            let id = ln.ident("vertex id")?;
            ln.finish()?;
            if !b.p.vertices.insert(id.text.to_string()) {
                return semantic(ln.no, id.col, format!("duplicate vertex `{}`", id.text));
            }
        }
        "edge" => {
            let label = ln.ident("edge label")?;
            ln.expect("=")?;
            let tail = ln.ident("vertex id")?;
            ln.expect("--")?;
            let head = ln.ident("vertex id")?;
            ln.key("orient")?;
            let o = ln.next("orientation")?;
            let orientation = match o.text {
                "fixed" => Orientation::Fixed,
                "free" => Orientation::Free,
                other => return ln.syntax_at(o.col, format!("orientation must be fixed or free, found `{other}`")),
            };
            ln.key("kind")?;
            let k = ln.next("edge kind")?;
            let Some(kind) = EdgeKind::from_name(k.text) else {
                return ln.syntax_at(k.col, format!("unknown edge kind `{}`", k.text));
            };
            ln.finish()?;
            if b.p.edges.contains_key(label.text) {
                return semantic(ln.no, label.col, format!("duplicate edge `{}`", label.text));
            }
            for v in [&tail, &head] {
                b.vertex_refs.push(Ref { line: ln.no, col: v.col, label: v.text.to_string() });
            }
            b.p.add_edge(label.text, tail.text, head.text, orientation, kind);
        }
        other => return ln.syntax_at(head.col, format!("expected `vertex` or `edge`, found `{other}`")),
    }
    Ok(())
}

fn surface_line(b: &mut Builder, ln: &mut Line, id: &str) -> Result<(), FormatError> {
    let head = ln.next("`genus` or `boundary`")?;
    match head.text {
        "genus" => {
            let g = ln.int("genus")?;
            ln.finish()?;
            if !b.genus_seen.insert(id.to_string()) {
                return semantic(ln.no, head.col, format!("genus of `{id}` given twice"));
            }
            b.p.surfaces.get_mut(id).expect("declared").genus_signed = g;
        }
        "boundary" => {
            let letters = ln.letters()?;
            ln.finish()?;
            let w = b.word(ln.no, letters);
            b.p.surfaces.get_mut(id).expect("declared").words.push(w);
        }
        other => return ln.syntax_at(head.col, format!("expected `genus` or `boundary`, found `{other}`")),
    }
    Ok(())
}

fn handle_line(b: &mut Builder, ln: &mut Line, id: &str) -> Result<(), FormatError> {
    let first = ln.toks[0].clone();
    let is_list = matches!(first.text, "regions" | "in" | "out") && ln.toks.get(1).map(|t| t.text) == Some("=");
    if is_list {
        ln.pos = 2;
        let ids = ln.id_list("region id")?;
        let target = match first.text {
            "regions" => &mut b.flat,
            "in" => &mut b.incoming,
            _ => &mut b.outgoing,
        };
        if target.contains_key(id) {
            return semantic(ln.no, first.col, format!("`{}` given twice for handle `{id}`", first.text));
        }
        let set = target.entry(id.to_string()).or_default();
        for t in ids {
            b.region_refs.push(Ref { line: ln.no, col: t.col, label: t.text.to_string() });
            set.insert(t.text.to_string());
        }
        return Ok(());
    }
    let (mut kind, mut index, mut height) = (None, None, None);
    while !ln.at_end() {
        let key = ln.next("attribute")?;
        ln.expect("=")?;
        match key.text {
            "kind" if kind.is_none() => {
                let v = ln.next("handle kind")?;
                kind = Some(match v.text {
                    "simple" => HandleKind::Simple,
                    "round" => HandleKind::Round,
                    other => return ln.syntax_at(v.col, format!("handle kind must be simple or round, found `{other}`")),
                });
            }
            "index" if index.is_none() => {
                let col = ln.col();
                let v = ln.int("index")?;
                index = Some(u8::try_from(v).or_else(|_| ln.syntax_at(col, format!("index {v} out of range")))?);
            }
            "height" if height.is_none() => {
                let col = ln.col();
                let v = ln.int("height")?;
                height = Some(u32::try_from(v).or_else(|_| ln.syntax_at(col, format!("height {v} must be non-negative")))?);
            }
            other => return ln.syntax_at(key.col, format!("unexpected attribute `{other}`")),
        }
    }
    let (Some(kind), Some(index)) = (kind, index) else {
        return ln.syntax_at(first.col, "handle attributes need kind= and index=");
    };
    if b.handle_attrs.insert(id.to_string(), (kind, index, height)).is_some() {
        return semantic(ln.no, first.col, format!("attributes of handle `{id}` given twice"));
    }
    Ok(())
}

fn pairs_line(b: &mut Builder, ln: &mut Line) -> Result<(), FormatError> {
    let side = ln.next("`lower` or `upper`")?;
    if !matches!(side.text, "lower" | "upper") {
        return ln.syntax_at(side.col, format!("expected `lower` or `upper`, found `{}`", side.text));
    }
    let a = ln.letters()?;
    ln.expect("|")?;
    let c = ln.letters()?;
    ln.finish()?;
    let pair = (b.word(ln.no, a), b.word(ln.no, c));
    if side.text == "lower" {
        b.p.lower_pairs.push(pair);
    } else {
        b.p.upper_pairs.push(pair);
    }
    Ok(())
}

fn chosen_line(b: &mut Builder, ln: &mut Line) -> Result<(), FormatError> {
    let h = ln.ident("handle id")?;
    ln.expect("=")?;
    let letters = ln.letters()?;
    ln.finish()?;
    if b.p.chosen_cycles.contains_key(h.text) {
        return semantic(ln.no, h.col, format!("handle `{}` already has a chosen cycle", h.text));
    }
    b.handle_refs.push(Ref { line: ln.no, col: h.col, label: h.text.to_string() });
    let w = b.word(ln.no, letters);
    b.p.chosen_cycles.insert(h.text.to_string(), w);
    Ok(())
}

fn frame_value(ln: &mut Line) -> Result<FrameValue, FormatError> {
    let t = ln.next("framing value")?;
    if t.text == "inf" {
        return Ok(FrameValue::Infinite);
    }
    t.text
        .parse()
        .map(FrameValue::Finite)
        .or_else(|_| ln.syntax_at(t.col, format!("expected integer or `inf`, found `{}`", t.text)))
}

fn role(ln: &mut Line) -> Result<Role, FormatError> {
    let t = ln.next("role")?;
    Role::from_name(t.text).map_or_else(|| ln.syntax_at(t.col, format!("unknown role `{}`", t.text)), Ok)
}

fn tau_line(b: &mut Builder, ln: &mut Line) -> Result<(), FormatError> {
    let head = ln.next("tau record")?;
    let no = ln.no;
    match head.text {
        "case1" => {
            let h0 = ln.ident("handle id")?;
            let h2 = ln.ident("handle id")?;
            ln.key("alpha")?;
            let alpha = ln.int("alpha")?;
            ln.key("beta")?;
            let beta = ln.int("beta")?;
            ln.finish()?;
            for h in [&h0, &h2] {
                b.handle_refs.push(Ref { line: no, col: h.col, label: h.text.to_string() });
            }
            b.p.tau.case1.push(Case1Record { handle0: h0.text.into(), handle2: h2.text.into(), alpha, beta });
        }
        "case2" => {
            let h = ln.ident("handle id")?;
            ln.key("meridian")?;
            let meridian = ln.int_pair("meridian number")?;
            let omega = if ln.at_end() {
                None
            } else {
                ln.key("omega")?;
                Some(ln.int_pair("omega number")?)
            };
            ln.finish()?;
            if b.p.tau.case2.tori.contains_key(h.text) {
                return semantic(no, h.col, format!("duplicate case2 record for `{}`", h.text));
            }
            b.handle_refs.push(Ref { line: no, col: h.col, label: h.text.to_string() });
            b.p.tau.case2.tori.insert(h.text.into(), TorusRecord { meridian, omega });
        }
        "omega" => {
            let h = ln.ident("handle id")?;
            ln.expect("=")?;
            let pair = ln.int_pair("omega number")?;
            ln.finish()?;
            b.omega_lines.push((Ref { line: no, col: h.col, label: h.text.to_string() }, pair));
        }
        "case2L" => {
            let what = ln.next("`vertex` or `edge`")?;
            match what.text {
                "vertex" => {
                    let v = ln.ident("handle id")?;
                    ln.key("role")?;
                    let r = role(ln)?;
                    ln.finish()?;
                    if b.ring_vertices.iter().any(|(x, _)| x == v.text) {
                        return semantic(no, v.col, format!("duplicate ring graph vertex `{}`", v.text));
                    }
                    b.handle_refs.push(Ref { line: no, col: v.col, label: v.text.to_string() });
                    b.ring_vertices.push((v.text.into(), r));
                }
                "edge" => {
                    let id = ln.ident("region id")?;
                    ln.expect("=")?;
                    let t = ln.ident("handle id")?;
                    ln.expect("->")?;
                    let h = ln.ident("handle id")?;
                    ln.key("mu")?;
                    let mu = frame_value(ln)?;
                    ln.finish()?;
                    if b.ring_edges.iter().any(|(e, ..)| e.id == id.text) {
                        return semantic(no, id.col, format!("duplicate ring graph edge `{}`", id.text));
                    }
                    b.region_refs.push(Ref { line: no, col: id.col, label: id.text.to_string() });
                    b.ring_edges.push((MsEdge::new(id.text, t.text, h.text), mu, no, id.col));
                }
                other => return ln.syntax_at(what.col, format!("expected `vertex` or `edge`, found `{other}`")),
            }
        }
        "case3" => {
            let h = ln.ident("handle id")?;
            ln.expect("cycle")?;
            // Letters run until the `alpha = n` tail.
            let split = ln.toks.len().saturating_sub(3);
            if split <= ln.pos || ln.toks[split].text != "alpha" {
                return ln.syntax_at(ln.end_col, "case3 record must end with `alpha=<int>`");
            }
            let tail = ln.toks.split_off(split);
            let letters = ln.letters()?;
            ln.toks.extend(tail);
            ln.key("alpha")?;
            let alpha = ln.int("alpha")?;
            ln.finish()?;
            b.handle_refs.push(Ref { line: no, col: h.col, label: h.text.to_string() });
            let cycle = b.word(no, letters);
            b.p.tau.case3.entry(h.text.into()).or_default().push(Case3Record { cycle, alpha });
        }
        other => return ln.syntax_at(head.col, format!("unknown tau record `{other}`")),
    }
    Ok(())
}

fn resolve(mut b: Builder) -> Result<FlowPresentation, FormatError> {
    for (id, line) in &b.header_lines {
        let Some(rest) = id.strip_prefix("surface:") else { continue };
        if !b.genus_seen.contains(rest) {
            return semantic(*line, 1, format!("surface `{rest}` has no genus line"));
        }
    }
    let handle_ids: BTreeSet<String> = b.handle_attrs.keys().cloned().collect();
    for (id, line) in &b.header_lines {
        if let Some(h) = id.strip_prefix("handle:") {
            if !handle_ids.contains(h) {
                return semantic(*line, 1, format!("handle `{h}` has no kind/index line"));
            }
        }
    }
    for (id, (kind, index, height)) in std::mem::take(&mut b.handle_attrs) {
        let line = b.header_lines[&format!("handle:{id}")];
        let flat = b.flat.remove(&id);
        let (inc, out) = (b.incoming.remove(&id), b.outgoing.remove(&id));
        let regions = match (flat, inc, out) {
            (Some(s), None, None) => HandleRegions::Flat(s),
            (None, Some(i), Some(o)) => HandleRegions::Sides { incoming: i, outgoing: o },
            (None, None, None) => HandleRegions::Flat(BTreeSet::new()),
            _ => return semantic(line, 1, format!("handle `{id}` needs either `regions =` or both `in =` and `out =`")),
        };
        b.p.add_handle(HandleRecord { id, kind, index, height, regions });
    }

    for r in &b.letters {
        if !b.p.edges.contains_key(&r.label) {
            return semantic(r.line, r.col, format!("unknown edge `{}` in word", r.label));
        }
    }
    for r in &b.vertex_refs {
        if !b.p.vertices.contains(&r.label) {
            return semantic(r.line, r.col, format!("unknown vertex `{}`", r.label));
        }
    }
    for r in &b.region_refs {
        if !b.p.surfaces.contains_key(&r.label) {
            return semantic(r.line, r.col, format!("unknown region `{}`", r.label));
        }
    }
    for r in b.handle_refs.iter().chain(b.omega_lines.iter().map(|(r, _)| r)) {
        if !b.p.handles.contains_key(&r.label) {
            return semantic(r.line, r.col, format!("unknown handle `{}`", r.label));
        }
    }
    for (r, pair) in &b.omega_lines {
        match b.p.tau.case2.tori.get_mut(&r.label) {
            Some(t) if t.omega.is_none() => t.omega = Some(*pair),
            Some(_) => return semantic(r.line, r.col, format!("omega of `{}` given twice", r.label)),
            None => return semantic(r.line, r.col, format!("omega for `{}` needs a case2 record", r.label)),
        }
    }
    for (e, _, line, col) in &b.ring_edges {
        for v in [&e.tail, &e.head] {
            if !b.ring_vertices.iter().any(|(x, _)| x == v) {
                return semantic(*line, *col, format!("ring graph edge `{}` uses undeclared vertex `{v}`", e.id));
            }
        }
    }
    let edges: Vec<MsEdge> = b.ring_edges.iter().map(|(e, ..)| e.clone()).collect();
    let ring = MsGraph::new(b.ring_vertices.clone(), edges).map_err(|err| {
        let (line, col) = b.ring_edges.last().map_or((1, 1), |(_, _, l, c)| (*l, *c));
        FormatError::Semantic { line, column: col, message: format!("ring graph: {err}") }
    })?;
    b.p.tau.case2.framing = Framing(b.ring_edges.iter().map(|(_, v, ..)| *v).collect());
    b.p.tau.case2.ring_graph = ring;
    Ok(b.p)
}

// ---------------------------------------------------------------------------
// Serialization

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn orient_name(o: Orientation) -> &'static str {
    match o {
        Orientation::Fixed => "fixed",
        Orientation::Free => "free",
    }
}

/// Deterministic text for `p`; maps are written in label order, lists in
/// stored order.
pub fn serialize(p: &FlowPresentation) -> String {
    let mut s = String::new();
    s.push_str("[graph]\n");
    for v in &p.vertices {
        let _ = writeln!(s, "vertex {v}");
    }
    for e in p.edges.values() {
        let _ = writeln!(
            s,
            "edge {} = {} -- {} orient={} kind={}",
            e.label,
            e.tail,
            e.head,
            orient_name(e.orientation),
            e.kind.name()
        );
    }
    for r in p.surfaces.values() {
        let _ = writeln!(s, "\n[surface {}]\ngenus {}", r.id, r.genus_signed);
        for w in &r.words {
            let _ = writeln!(s, "boundary {w}");
        }
    }
    for h in p.handles.values() {
        let _ = write!(s, "\n[handle {}]\nkind={} index={}", h.id, h.kind.name(), h.index);
        if let Some(height) = h.height {
            let _ = write!(s, " height={height}");
        }
        s.push('\n');
        match &h.regions {
            HandleRegions::Flat(set) if set.is_empty() => {}
            HandleRegions::Flat(set) => {
                let _ = writeln!(s, "regions = {}", join(set));
            }
            HandleRegions::Sides { incoming, outgoing } => {
                let _ = writeln!(s, "in = {}\nout = {}", join(incoming), join(outgoing));
            }
        }
    }
    if !p.lower_pairs.is_empty() || !p.upper_pairs.is_empty() {
        s.push_str("\n[pairs]\n");
        for (side, pairs) in [("lower", &p.lower_pairs), ("upper", &p.upper_pairs)] {
            for (a, b) in pairs {
                let _ = writeln!(s, "{side} {a} | {b}");
            }
        }
    }
    if !p.chosen_cycles.is_empty() {
        s.push_str("\n[chosen]\n");
        for (h, w) in &p.chosen_cycles {
            let _ = writeln!(s, "{h} = {w}");
        }
    }
    let tau = &p.tau;
    if !tau.is_empty() {
        s.push_str("\n[tau]\n");
        for r in &tau.case1 {
            let _ = writeln!(s, "case1 {} {} alpha={} beta={}", r.handle0, r.handle2, r.alpha, r.beta);
        }
        for (h, t) in &tau.case2.tori {
            let _ = writeln!(s, "case2 {h} meridian=({}, {})", t.meridian.0, t.meridian.1);
            if let Some((k, l)) = t.omega {
                let _ = writeln!(s, "omega {h} = ({k}, {l})");
            }
        }
        let ring = &tau.case2.ring_graph;
        for (v, r) in ring.vertices() {
            let _ = writeln!(s, "case2L vertex {v} role={}", r.name());
        }
        for (e, mu) in ring.edges().iter().zip(tau.case2.framing.values()) {
            let _ = writeln!(s, "case2L edge {} = {} -> {} mu={mu}", e.id, e.tail, e.head);
        }
        for (h, records) in &tau.case3 {
            for r in records {
                let _ = writeln!(s, "case3 {h} cycle {} alpha={}", r.cycle, r.alpha);
            }
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Stand-alone MS-graphs and framings

/// `vertex <id> role=<source|sink|saddle>` and `edge <id> = <tail> -> <head>`.
pub fn parse_ms_graph(text: &str) -> Result<MsGraph, FormatError> {
    let mut vertices: Vec<(String, Role)> = Vec::new();
    let mut edges = Vec::new();
    let mut lines = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let mut ln = Line::new(i + 1, raw);
        if ln.at_end() {
            continue;
        }
        let head = ln.next("`vertex` or `edge`")?;
        match head.text {
            "vertex" => {
                let v = ln.ident("vertex id")?;
                ln.key("role")?;
                let r = role(&mut ln)?;
                ln.finish()?;
                if vertices.iter().any(|(x, _)| x == v.text) {
                    return semantic(ln.no, v.col, format!("duplicate vertex `{}`", v.text));
                }
                vertices.push((v.text.into(), r));
            }
            "edge" => {
                let id = ln.ident("edge id")?;
                ln.expect("=")?;
                let t = ln.ident("vertex id")?;
                ln.expect("->")?;
                let h = ln.ident("vertex id")?;
                ln.finish()?;
                lines.insert(id.text.to_string(), (ln.no, id.col));
                edges.push(MsEdge::new(id.text, t.text, h.text));
            }
            other => return ln.syntax_at(head.col, format!("expected `vertex` or `edge`, found `{other}`")),
        }
    }
    // Re-run construction edge by edge to locate the first offending line.
    let mut prefix = Vec::new();
    for e in edges {
        let (line, column) = lines[&e.id];
        prefix.push(e);
        if let Err(err) = MsGraph::new(vertices.clone(), prefix.clone()) {
            return Err(FormatError::Semantic { line, column, message: err.to_string() });
        }
    }
    MsGraph::new(vertices, prefix).map_err(|e| FormatError::Semantic { line: 1, column: 1, message: e.to_string() })
}

/// `<edge id> = <int|inf>` for every edge of `g`.
pub fn parse_framing(text: &str, g: &MsGraph) -> Result<Framing, FormatError> {
    let mut values: Vec<(String, FrameValue)> = Vec::new();
    let mut last = (1, 1);
    for (i, raw) in text.lines().enumerate() {
        let mut ln = Line::new(i + 1, raw);
        if ln.at_end() {
            continue;
        }
        let id = ln.ident("edge id")?;
        ln.expect("=")?;
        let v = frame_value(&mut ln)?;
        ln.finish()?;
        if g.edge_index(id.text).is_none() {
            return semantic(ln.no, id.col, format!("unknown edge `{}`", id.text));
        }
        if values.iter().any(|(x, _)| x == id.text) {
            return semantic(ln.no, id.col, format!("edge `{}` framed twice", id.text));
        }
        values.push((id.text.into(), v));
        last = (ln.no, id.col);
    }
    g.framing_from(values).map_err(|e| FormatError::Semantic { line: last.0, column: last.1, message: e.to_string() })
}

pub fn serialize_ms_graph(g: &MsGraph) -> String {
    let mut s = String::new();
    for (v, r) in g.vertices() {
        let _ = writeln!(s, "vertex {v} role={}", r.name());
    }
    for e in g.edges() {
        let _ = writeln!(s, "edge {} = {} -> {}", e.id, e.tail, e.head);
    }
    s
}

pub fn serialize_framing(g: &MsGraph, f: &Framing) -> String {
    let mut s = String::new();
    for (e, v) in g.edges().iter().zip(f.values()) {
        let _ = writeln!(s, "{} = {v}", e.id);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_round_trips() {
        for key in catalog::list_keys() {
            let p = catalog::emit(&key).unwrap();
            let text = serialize(&p);
            assert_eq!(parse_flow(&text).unwrap(), p, "{key}\n{text}");
            assert_eq!(serialize(&p), text);
        }
    }

    #[test]
    fn omega_line_present() {
        let text = serialize(&catalog::twisted_orbit_flow(0).unwrap());
        assert!(text.lines().any(|l| l == "omega 0-handle = (1, 1)"), "{text}");
    }

    #[test]
    fn combined_case2_line_accepted() {
        let p = catalog::twisted_orbit_flow(1).unwrap();
        let text = serialize(&p).replace("case2 0-handle meridian=(3, 0)\nomega 0-handle = (1, 3)", "case2 0-handle meridian=(3, 0) omega=(1, 3)");
        assert_eq!(parse_flow(&text).unwrap(), p);
    }

    #[test]
    fn missing_graph() {
        let err = parse_flow("[surface A]\ngenus 0\n").unwrap_err();
        assert_eq!(err.to_string(), "missing [graph]");
    }

    #[test]
    fn unknown_letter_named() {
        let text = serialize(&catalog::trivial_orbit_flow(1, 1).unwrap()).replace("boundary d^-1", "boundary q^-1");
        let err = parse_flow(&text).unwrap_err();
        assert!(matches!(err, FormatError::Semantic { .. }), "{err}");
        assert!(err.to_string().contains("`q`"), "{err}");
    }

    #[test]
    fn syntax_error_located() {
        let err = parse_flow("[graph]\nvertex A\nedge a = A -> A orient=fixed kind=corner\n").unwrap_err();
        assert_eq!(err.location(), Some((3, 12)), "{err}");
    }

    #[test]
    fn duplicate_vertex_rejected() {
        let err = parse_flow("[graph]\nvertex A\nvertex A\n").unwrap_err();
        assert!(matches!(err, FormatError::Semantic { line: 3, .. }), "{err}");
    }

    #[test]
    fn ms_graph_files() {
        let g = parse_ms_graph("vertex s role=source\nvertex x role=saddle\nvertex t role=sink\nedge e1 = s -> x\nedge e2 = x -> t\n").unwrap();
        let f = parse_framing("e2 = inf\ne1 = 4\n", &g).unwrap();
        assert_eq!(f, Framing(vec![FrameValue::Finite(4), FrameValue::Infinite]));
        assert_eq!(parse_ms_graph(&serialize_ms_graph(&g)).unwrap(), g);
        assert_eq!(parse_framing(&serialize_framing(&g, &f), &g).unwrap(), f);
        let err = parse_ms_graph("vertex s role=sink\nvertex t role=sink\nedge e = s -> t\n").unwrap_err();
        assert_eq!(err.location(), Some((3, 6)));
    }
}
