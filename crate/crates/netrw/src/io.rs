//! Plain-text documents: `.nets` (nets), `.rns` (renetting systems),
//! `.nbh` (block homomorphisms), `.td` (transducers) and `.prob` (problems).
//!
//! A net block is a brace-delimited list of statements:
//!
//! ```text
//! node <id> <symbol> in=<k> out=<m>
//! frontier <id> <letter> in|out
//! edge <id>.out<i> -> <id>.in<j>
//! free <id>.in<i> = <letter>
//! root <id>
//! ```
//!
//! `in=`/`out=` take a count or a comma list of port indices. A `.nets`
//! document holds the same statements without braces, nets separated by
//! `---`. `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::morphism::{classify_nbh, Nbh, NetSubstitution};
use crate::net::{canonical_order, canonicalize, Dir, Edge, Jungle, Label, Net, NetError, Port, RankedSymbol, Slot, VertexId};
use crate::rewrite::{ConditionSet, RewriteError, Rns, RulePreform};
use crate::solver::{Problem, Recognizer};
use crate::transducer::{AttachKey, Operator, Transducer};

pub const NETS_HEADER: &str = "netrw-nets v1";
pub const RNS_HEADER: &str = "netrw-rns v1";
pub const NBH_HEADER: &str = "netrw-nbh v1";
pub const TD_HEADER: &str = "netrw-td v1";
pub const PROB_HEADER: &str = "netrw-prob v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid net: {0}")]
    Validation(#[from] NetError),
    #[error("invalid rule: {0}")]
    Rule(#[from] RewriteError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Tok {
    text: String,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start: Option<usize> = None;
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let push = |s: usize, e: usize, out: &mut Vec<Tok>| {
            let col = line[..s].chars().count() + 1;
            out.push(Tok { text: line[s..e].to_string(), line: ln + 1, col });
        };
        for &(i, c) in &chars {
            if c.is_whitespace() || c == '{' || c == '}' {
                if let Some(s) = start.take() {
                    push(s, i, &mut out);
                }
                if c == '{' || c == '}' {
                    push(i, i + 1, &mut out);
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            push(s, line.len(), &mut out);
        }
        out.push(Tok { text: "\n".into(), line: ln + 1, col: line.chars().count() + 1 });
    }
    out
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser { toks: tokenize(text), pos: 0 }
    }

    fn skip_newlines(&mut self) {
        while self.toks.get(self.pos).is_some_and(|t| t.text == "\n") {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<&Tok> {
        self.skip_newlines();
        self.toks.get(self.pos)
    }

    fn peek_text(&mut self) -> Option<String> {
        self.peek().map(|t| t.text.clone())
    }

    fn err_at(&self, t: Option<&Tok>, msg: impl Into<String>) -> IoError {
        let (line, col) = t.map(|t| (t.line, t.col)).unwrap_or_else(|| self.toks.last().map(|t| (t.line, t.col)).unwrap_or((1, 1)));
        IoError::Parse { line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Result<Tok, IoError> {
        self.skip_newlines();
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| self.err_at(None, "unexpected end of document"))?;
        self.pos += 1;
        Ok(t)
    }

    /// Next token on the current line, if any.
    fn next_inline(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos)?;
        if t.text == "\n" {
            return None;
        }
        self.pos += 1;
        Some(t.clone())
    }

    fn expect(&mut self, s: &str) -> Result<Tok, IoError> {
        let t = self.next()?;
        if t.text != s {
            return Err(self.err_at(Some(&t), format!("expected `{s}`, found `{}`", t.text)));
        }
        Ok(t)
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn header(&mut self, h: &str) -> Result<(), IoError> {
        let mut parts = h.split(' ');
        for p in parts.by_ref() {
            self.expect(p)?;
        }
        Ok(())
    }
}

fn parse_port(p: &Parser, t: &Tok) -> Result<Port, IoError> {
    let bad = || p.err_at(Some(t), format!("malformed port reference `{}`", t.text));
    let (v, rest) = t.text.split_once('.').ok_or_else(bad)?;
    let v: VertexId = v.parse().map_err(|_| bad())?;
    let (dir, idx) = if let Some(i) = rest.strip_prefix("out") {
        (Dir::Out, i)
    } else if let Some(i) = rest.strip_prefix("in") {
        (Dir::In, i)
    } else {
        return Err(bad());
    };
    let idx: u32 = idx.parse().map_err(|_| bad())?;
    if idx == 0 {
        return Err(bad());
    }
    Ok(Port::new(v, dir, idx))
}

fn parse_arity(p: &Parser, t: &Tok, key: &str) -> Result<Vec<u32>, IoError> {
    let bad = || p.err_at(Some(t), format!("expected `{key}=<count>` or `{key}=<i,j,..>`, found `{}`", t.text));
    let v = t.text.strip_prefix(key).and_then(|r| r.strip_prefix('=')).ok_or_else(bad)?;
    if v.contains(',') {
        v.split(',').map(|x| x.parse::<u32>().map_err(|_| bad())).collect()
    } else {
        let k: u32 = v.parse().map_err(|_| bad())?;
        Ok((1..=k).collect())
    }
}

#[derive(Default)]
struct NetAcc {
    labels: BTreeMap<VertexId, Label>,
    edges: Vec<Edge>,
    free: Vec<(Port, String)>,
    root: Option<VertexId>,
    empty: bool,
}

/// Parses one statement into `acc`. Returns false if the keyword is not a
/// net statement.
fn net_statement(p: &mut Parser, acc: &mut NetAcc) -> Result<bool, IoError> {
    let Some(kw) = p.peek().cloned() else { return Ok(false) };
    let line_end = |p: &mut Parser| -> Result<(), IoError> {
        if let Some(t) = p.next_inline() {
            if t.text != "}" {
                return Err(p.err_at(Some(&t), format!("unexpected `{}`", t.text)));
            }
            p.pos -= 1;
        }
        Ok(())
    };
    match kw.text.as_str() {
        "node" => {
            p.next()?;
            let id = p.next()?;
            let v: VertexId = id.text.parse().map_err(|_| p.err_at(Some(&id), format!("bad vertex id `{}`", id.text)))?;
            let name = p.next()?;
            let ins = p.next()?;
            let outs = p.next()?;
            let ins = parse_arity(p, &ins, "in")?;
            let outs = parse_arity(p, &outs, "out")?;
            if acc.labels.insert(v, Label::Symbol(RankedSymbol::new(name.text, &ins, &outs))).is_some() {
                return Err(p.err_at(Some(&id), format!("vertex {v} declared twice")));
            }
            line_end(p)?;
        }
        "frontier" => {
            p.next()?;
            let id = p.next()?;
            let v: VertexId = id.text.parse().map_err(|_| p.err_at(Some(&id), format!("bad vertex id `{}`", id.text)))?;
            let letter = p.next()?.text;
            let d = p.next()?;
            let dir = match d.text.as_str() {
                "in" => Dir::In,
                "out" => Dir::Out,
                _ => return Err(p.err_at(Some(&d), "expected `in` or `out`")),
            };
            if acc.labels.insert(v, Label::Frontier { letter, dir }).is_some() {
                return Err(p.err_at(Some(&id), format!("vertex {v} declared twice")));
            }
            line_end(p)?;
        }
        "edge" => {
            p.next()?;
            let a = p.next()?;
            let a = parse_port(p, &a)?;
            p.expect("->")?;
            let b = p.next()?;
            let bp = parse_port(p, &b)?;
            if a.dir != Dir::Out || bp.dir != Dir::In {
                return Err(p.err_at(Some(&b), "edges run from an out-port to an in-port"));
            }
            acc.edges.push(Edge::new(a.vertex, a.index, bp.vertex, bp.index));
            line_end(p)?;
        }
        "free" => {
            p.next()?;
            let a = p.next()?;
            let a = parse_port(p, &a)?;
            p.expect("=")?;
            let l = p.next()?;
            acc.free.push((a, l.text));
            line_end(p)?;
        }
        "root" => {
            p.next()?;
            let id = p.next()?;
            acc.root = Some(id.text.parse().map_err(|_| p.err_at(Some(&id), "bad root id"))?);
            line_end(p)?;
        }
        "empty" => {
            p.next()?;
            acc.empty = true;
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn finish(acc: NetAcc) -> Result<Net, IoError> {
    Ok(Net::build(acc.labels, acc.edges, acc.free, acc.root)?)
}

fn net_block(p: &mut Parser) -> Result<Net, IoError> {
    p.expect("{")?;
    let mut acc = NetAcc::default();
    while net_statement(p, &mut acc)? {}
    let t = p.next()?;
    if t.text != "}" {
        return Err(p.err_at(Some(&t), format!("unknown statement `{}`", t.text)));
    }
    finish(acc)
}

/// Parses a document holding one net.
pub fn parse_net(text: &str) -> Result<Net, IoError> {
    let nets = parse_nets(text)?;
    match nets.len() {
        1 => Ok(nets.into_iter().next().expect("one net")),
        n => Err(IoError::Parse { line: 1, col: 1, msg: format!("expected one net, found {n}") }),
    }
}

/// Parses a `.nets` document, keeping document order.
pub fn parse_nets(text: &str) -> Result<Vec<Net>, IoError> {
    let mut p = Parser::new(text);
    p.header(NETS_HEADER)?;
    let mut out = Vec::new();
    let mut acc = NetAcc::default();
    let mut any = false;
    loop {
        if p.at_end() {
            break;
        }
        if p.peek_text().as_deref() == Some("---") {
            p.next()?;
            out.push(finish(std::mem::take(&mut acc))?);
            any = false;
            continue;
        }
        if !net_statement(&mut p, &mut acc)? {
            let t = p.next()?;
            return Err(p.err_at(Some(&t), format!("unknown statement `{}`", t.text)));
        }
        any = true;
    }
    if any || acc.empty || !out.is_empty() {
        out.push(finish(acc)?);
    }
    Ok(out)
}

pub fn parse_jungle(text: &str) -> Result<Jungle, IoError> {
    Ok(parse_nets(text)?.into_iter().collect())
}

fn arity(key: &str, ports: &[u32]) -> String {
    let contiguous = ports.iter().enumerate().all(|(i, p)| *p == i as u32 + 1);
    if contiguous {
        format!("{key}={}", ports.len())
    } else {
        format!("{key}={}", ports.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
    }
}

fn write_statements(n: &Net, indent: &str, out: &mut String) {
    if n.is_empty() {
        let _ = writeln!(out, "{indent}empty");
        return;
    }
    for (v, l) in n.labels() {
        match l {
            Label::Symbol(s) => {
                let _ = writeln!(out, "{indent}node {v} {} {} {}", s.name, arity("in", &s.ins), arity("out", &s.outs));
            }
            Label::Frontier { letter, dir } => {
                let d = if *dir == Dir::In { "in" } else { "out" };
                let _ = writeln!(out, "{indent}frontier {v} {letter} {d}");
            }
        }
    }
    let mut edges = n.edges();
    edges.sort();
    for e in edges {
        let _ = writeln!(out, "{indent}edge {}.out{} -> {}.in{}", e.src, e.out, e.tgt, e.inp);
    }
    for (p, s) in n.slots() {
        if let Slot::Free(l) = s {
            let d = if p.dir == Dir::In { "in" } else { "out" };
            let _ = writeln!(out, "{indent}free {}.{d}{} = {l}", p.vertex, p.index);
        }
    }
    if let Some(r) = n.root() {
        let _ = writeln!(out, "{indent}root {r}");
    }
}

/// Statements of `n` as given, letters and ids unchanged.
pub fn net_statements(n: &Net) -> String {
    let mut s = String::new();
    write_statements(n, "", &mut s);
    s
}

/// Canonical document: vertices in canonical order, free letters renamed
/// `x1, x2, ...` in port order.
pub fn serialize_net(n: &Net) -> String {
    serialize_nets(std::iter::once(n))
}

pub fn serialize_nets<'a>(nets: impl IntoIterator<Item = &'a Net>) -> String {
    let mut out = format!("{NETS_HEADER}\n");
    for (i, n) in nets.into_iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        let c = canonicalize(n, "x");
        debug_assert_eq!(canonical_order(&c).len(), c.len());
        write_statements(&c, "", &mut out);
    }
    out
}

pub fn serialize_jungle(j: &Jungle) -> String {
    serialize_nets(j.iter())
}

fn block_text(n: &Net, indent: &str) -> String {
    let mut s = String::from("{\n");
    write_statements(n, &format!("{indent}  "), &mut s);
    s.push_str(indent);
    s.push('}');
    s
}

fn comma_list(p: &mut Parser) -> Vec<String> {
    let mut items = Vec::new();
    while let Some(t) = p.next_inline() {
        items.extend(t.text.split(',').filter(|s| !s.is_empty()).map(String::from));
    }
    items
}

fn rule_body(p: &mut Parser, sides: (&str, &str)) -> Result<(Net, Net, Vec<NetSubstitution>, BTreeSet<String>), IoError> {
    p.expect("{")?;
    let (mut left, mut right) = (None, None);
    let mut rsub = NetSubstitution::new();
    let mut lsub = BTreeSet::new();
    loop {
        let t = p.next()?;
        match t.text.as_str() {
            "}" => break,
            s if s == format!("{}:", sides.0) => left = Some(net_block(p)?),
            s if s == format!("{}:", sides.1) => right = Some(net_block(p)?),
            "rsub" | "lsub" => {
                let x = p.next()?.text;
                p.expect("=")?;
                let frag = net_block(p)?;
                if t.text == "rsub" {
                    rsub = rsub.with(x, frag);
                } else {
                    lsub.insert(x);
                }
            }
            other => return Err(p.err_at(Some(&t), format!("unexpected `{other}` in rule body"))),
        }
    }
    let missing = |s: &str| p.err_at(None, format!("rule body lacks `{s}:`"));
    let left = left.ok_or_else(|| missing(sides.0))?;
    let right = right.ok_or_else(|| missing(sides.1))?;
    let subs = if rsub.map.is_empty() { Vec::new() } else { vec![rsub] };
    Ok((left, right, subs, lsub))
}

fn rns_items(p: &mut Parser, stop_at_brace: bool) -> Result<Rns, IoError> {
    let mut rules = Vec::new();
    let mut cond = ConditionSet::default();
    loop {
        let Some(t) = p.peek().cloned() else { break };
        match t.text.as_str() {
            "}" if stop_at_brace => break,
            "rule" => {
                p.next()?;
                let name = p.next()?.text;
                let (left, right, subs, lsub) = rule_body(p, ("left", "right"))?;
                let mut r = RulePreform::new(name, left, right, subs)?;
                r.left_sub_domain = lsub;
                rules.push(r);
            }
            "order:" => {
                p.next()?;
                cond.application_order = Some(comma_list(p));
            }
            "instance-sensitive:" => {
                p.next()?;
                let v = p.next()?;
                cond.instance_sensitive = match v.text.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(p.err_at(Some(&v), "expected `true` or `false`")),
                };
            }
            "cut-environment:" => {
                p.next()?;
                cond.cut_environment = comma_list(p).into_iter().collect();
            }
            _ => return Err(p.err_at(Some(&t), format!("unexpected `{}`", t.text))),
        }
    }
    Ok(Rns::new(rules)?.with_conditions(cond))
}

pub fn parse_rns(text: &str) -> Result<Rns, IoError> {
    let mut p = Parser::new(text);
    p.header(RNS_HEADER)?;
    rns_items(&mut p, false)
}

fn rns_body(r: &Rns, indent: &str) -> String {
    let mut s = String::new();
    for rule in &r.rules {
        let _ = writeln!(s, "{indent}rule {} {{", rule.name);
        let _ = writeln!(s, "{indent}  left: {}", block_text(&rule.left, &format!("{indent}  ")));
        let _ = writeln!(s, "{indent}  right: {}", block_text(&rule.right, &format!("{indent}  ")));
        for x in &rule.left_sub_domain {
            let _ = writeln!(s, "{indent}  lsub {x} = {{\n{indent}  }}");
        }
        for g in rule.right_subs.iter().take(1) {
            for (x, frag) in &g.map {
                let _ = writeln!(s, "{indent}  rsub {x} = {}", block_text(frag, &format!("{indent}  ")));
            }
        }
        let _ = writeln!(s, "{indent}}}");
    }
    if let Some(o) = &r.conditions.application_order {
        let _ = writeln!(s, "{indent}order: {}", o.join(","));
    }
    if r.conditions.instance_sensitive {
        let _ = writeln!(s, "{indent}instance-sensitive: true");
    }
    if !r.conditions.cut_environment.is_empty() {
        let _ = writeln!(s, "{indent}cut-environment: {}", r.conditions.cut_environment.iter().cloned().collect::<Vec<_>>().join(","));
    }
    s
}

/// Rules with letters kept; only the first right substitution of a rule
/// is written.
pub fn serialize_rns(r: &Rns) -> String {
    format!("{RNS_HEADER}\n{}", rns_body(r, ""))
}

/// `block <name> { member: .. image: .. }` entries and `frontier x = ..`.
pub fn parse_nbh(text: &str) -> Result<Nbh, IoError> {
    let mut p = Parser::new(text);
    p.header(NBH_HEADER)?;
    let mut h = Nbh::identity();
    let wrap = |e: crate::morphism::MorphismError| IoError::Parse { line: 0, col: 0, msg: e.to_string() };
    while let Some(t) = p.peek().cloned() {
        match t.text.as_str() {
            "block" => {
                p.next()?;
                let _name = p.next()?;
                let (member, image, _, _) = rule_body(&mut p, ("member", "image"))?;
                h.add(member, image).map_err(wrap)?;
            }
            "frontier" => {
                p.next()?;
                let x = p.next()?.text;
                p.expect("=")?;
                let frag = net_block(&mut p)?;
                h.frontier_map.insert(x, frag);
            }
            _ => return Err(p.err_at(Some(&t), format!("unexpected `{}`", t.text))),
        }
    }
    let flags = classify_nbh(&h, &Jungle::new()).map_err(wrap)?;
    Ok(h.with_flags(flags))
}

pub fn serialize_nbh(h: &Nbh) -> String {
    let mut s = format!("{NBH_HEADER}\n");
    for (i, (m, img)) in h.entries().into_iter().enumerate() {
        let _ = writeln!(s, "block b{i} {{\n  member: {}\n  image: {}\n}}", block_text(m, "  "), block_text(img, "  "));
    }
    for (x, frag) in &h.frontier_map {
        let _ = writeln!(s, "frontier {x} = {}", block_text(frag, ""));
    }
    s
}

fn operator(p: &mut Parser) -> Result<Operator, IoError> {
    let t = p.next()?;
    match t.text.as_str() {
        "id" => Ok(Operator::Identity),
        "step" | "nf" => {
            p.expect("{")?;
            let r = rns_items(p, true)?;
            p.expect("}")?;
            Ok(if t.text == "step" { Operator::Step(r) } else { Operator::NormalForm(r) })
        }
        "seq" => {
            p.expect("{")?;
            let mut ops = Vec::new();
            while p.peek_text().as_deref() != Some("}") {
                ops.push(operator(p)?);
            }
            p.expect("}")?;
            Ok(Operator::Sequence(ops))
        }
        other => Err(p.err_at(Some(&t), format!("unknown operator `{other}`"))),
    }
}

fn write_operator(op: &Operator, indent: &str, out: &mut String) {
    match op {
        Operator::Identity => out.push_str("id"),
        Operator::Step(r) | Operator::NormalForm(r) => {
            let kw = if matches!(op, Operator::Step(_)) { "step" } else { "nf" };
            let _ = write!(out, "{kw} {{\n{}{indent}}}", rns_body(r, &format!("{indent}  ")));
        }
        Operator::Sequence(ops) => {
            out.push_str("seq {");
            for o in ops {
                let _ = write!(out, "\n{indent}  ");
                write_operator(o, &format!("{indent}  "), out);
            }
            let _ = write!(out, "\n{indent}}}");
        }
    }
}

/// `carrier { .. }` then `attach <symbol> <i> <j> <op>` lines, where an op
/// is `id`, `step { rules }`, `nf { rules }` or `seq { op .. }`.
pub fn parse_td(text: &str) -> Result<Transducer, IoError> {
    let mut p = Parser::new(text);
    p.header(TD_HEADER)?;
    p.expect("carrier")?;
    let carrier = net_block(&mut p)?;
    let mut attach: BTreeMap<AttachKey, Vec<Operator>> = BTreeMap::new();
    while let Some(t) = p.peek().cloned() {
        if t.text != "attach" {
            return Err(p.err_at(Some(&t), format!("unexpected `{}`", t.text)));
        }
        p.next()?;
        let sym = p.next()?.text;
        let mut num = || -> Result<u32, IoError> {
            let t = p.next()?;
            t.text.parse().map_err(|_| p.err_at(Some(&t), "expected a port index"))
        };
        let (i, j) = (num()?, num()?);
        let op = operator(&mut p)?;
        attach.entry(AttachKey::new(sym, i, j)).or_default().push(op);
    }
    Ok(Transducer::new(carrier, attach))
}

pub fn serialize_td(td: &Transducer) -> String {
    let mut s = format!("{TD_HEADER}\ncarrier {}\n", block_text(&td.carrier, ""));
    for (k, ops) in &td.attach {
        for op in ops {
            let _ = write!(s, "attach {} {} {} ", k.symbol, k.input, k.output);
            write_operator(op, "", &mut s);
            s.push('\n');
        }
    }
    s
}

/// `subject { net }` (repeatable), one of `accept all`, `accept exactly
/// { net } ..`, `accept contains { net }`, and optionally `depth <d>`.
pub fn parse_problem(text: &str) -> Result<Problem, IoError> {
    let mut p = Parser::new(text);
    p.header(PROB_HEADER)?;
    let mut subject = Jungle::new();
    let mut recognizer = None;
    let mut depth = None;
    while let Ok(t) = p.next() {
        match t.text.as_str() {
            "subject" => {
                subject.insert(net_block(&mut p)?);
            }
            "accept" => {
                let k = p.next()?;
                recognizer = Some(match k.text.as_str() {
                    "all" => Recognizer::accept_all(),
                    "contains" => Recognizer::contains(&net_block(&mut p)?),
                    "exactly" => {
                        let mut j = Jungle::new();
                        while p.peek_text().as_deref() == Some("{") {
                            j.insert(net_block(&mut p)?);
                        }
                        Recognizer::exactly(&j)
                    }
                    _ => return Err(p.err_at(Some(&k), "expected `all`, `contains` or `exactly`")),
                });
            }
            "depth" => {
                let d = p.next()?;
                depth = Some(d.text.parse().map_err(|_| p.err_at(Some(&d), "expected a depth"))?);
            }
            other => return Err(p.err_at(Some(&t), format!("unexpected `{other}`"))),
        }
    }
    let recognizer = recognizer.ok_or_else(|| p.err_at(None, "problem lacks an `accept` line"))?;
    let mut prob = Problem::new(subject, recognizer);
    if let Some(d) = depth {
        prob = prob.with_depth(d);
    }
    Ok(prob)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{canonical_form, is_isomorphic};
    use crate::oracle::{enumerate_nets, EnumerationSpec};

    #[test]
    fn single_vertex_document() {
        let n = parse_net("netrw-nets v1\nnode 1 a in=2 out=1\nfree 1.in1 = x\nfree 1.in2 = y\nfree 1.out1 = z\n").unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n.dangling().len(), 3);
    }

    #[test]
    fn self_loop() {
        let n = parse_net("netrw-nets v1\n# loop\nnode 1 a in=1 out=1\nedge 1.out1 -> 1.in1\n").unwrap();
        assert_eq!(n.edges().len(), 1);
    }

    #[test]
    fn malformed_port_has_location() {
        let e = parse_net("netrw-nets v1\nnode 1 a in=1 out=1\nedge 1.ou1 -> 1.in1\n").unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 3, col: 6, .. }), "{e}");
        assert!(matches!(parse_net("netrw-nets v1\nnode 1 a in=1 out=1\n"), Err(IoError::Validation(_))));
    }

    #[test]
    fn round_trip_enumeration() {
        let spec = EnumerationSpec::new(vec![RankedSymbol::simple("a", 1, 1), RankedSymbol::simple("b", 1, 2)]).vertices(2);
        for n in &enumerate_nets(&spec).unwrap() {
            let doc = serialize_net(n);
            let back = parse_net(&doc).unwrap();
            assert_eq!(canonical_form(&back), canonical_form(n));
            assert!(is_isomorphic(&back, n));
            assert_eq!(serialize_net(&back), doc);
        }
    }

    #[test]
    fn rules_td_and_problem() {
        let text = "netrw-rns v1\nrule ab {\n  left: { node 0 a in=1 out=1\n free 0.in1 = i\n free 0.out1 = o }\n  right: {\n node 0 b in=1 out=1\n free 0.in1 = i\n free 0.out1 = o\n }\n}\norder: ab\n";
        let r = parse_rns(text).unwrap();
        assert_eq!(r.rules.len(), 1);
        assert_eq!(parse_rns(&serialize_rns(&r)).unwrap(), r);
        let td = Transducer::single("p", vec![Operator::Step(r.clone()), Operator::Sequence(vec![Operator::Identity, Operator::NormalForm(r)])]);
        assert_eq!(parse_td(&serialize_td(&td)).unwrap(), td);
        let prob = parse_problem("netrw-prob v1\nsubject { node 0 a in=1 out=1\nedge 0.out1 -> 0.in1 }\naccept contains { node 0 b in=1 out=1\nedge 0.out1 -> 0.in1 }\ndepth 2\n").unwrap();
        assert_eq!(prob.limits.max_depth, 2);
        assert_eq!(prob.subject.len(), 1);
    }
}
