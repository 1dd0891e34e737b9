//! Command-line front end: the presentation file format, job configuration,
//! report rendering, and the built-in check and self-test suites.
//!
//! A presentation file is line oriented, with `#` starting a comment:
//!
//! ```text
//! category N^d d=2
//! field Q
//! generator g0 at (0,0)
//! relation: 1 * [morph to=(1,1)] g0
//! ```
//!
//! Morphisms out of a generator are written `[morph to=(..) inj=(..) col=(..)]`
//! with 1-based injection values. `inj` is nested per coordinate for `FI^d`
//! and `OI^d`, absent for `N^d`; `col` lists the colors of the points outside
//! the image in increasing order and is used by `FI_d` and `OI_d` only.

use std::collections::HashMap;
use std::fmt::Write as _;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::category::*;
use crate::exactla::*;
use crate::homology::*;
use crate::inductive::*;
use crate::modrep::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUSED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Int(i64),
    List(Vec<Value>),
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line, col: self.offset + self.pos + 1, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn word(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || b"_^".contains(&self.s[self.pos])) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a word");
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let save = self.pos;
        match self.word() {
            Ok(w) if w == kw => Ok(()),
            _ => {
                self.pos = save;
                self.skip_ws();
                self.err(format!("expected '{}'", kw))
            }
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && self.s[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        match text.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected an integer")
            }
        }
    }

    fn value(&mut self) -> Result<Value, ParseError> {
        if self.eat(b'(') {
            let mut items = Vec::new();
            if self.eat(b')') {
                return Ok(Value::List(items));
            }
            loop {
                items.push(self.value()?);
                if self.eat(b')') {
                    return Ok(Value::List(items));
                }
                self.expect(b',')?;
            }
        }
        Ok(Value::Int(self.int()?))
    }

    fn tuple(&mut self) -> Result<Vec<i64>, ParseError> {
        match self.value()? {
            Value::List(items) => items
                .into_iter()
                .map(|v| match v {
                    Value::Int(i) => Ok(i),
                    Value::List(_) => self.err("expected a flat tuple"),
                })
                .collect(),
            Value::Int(_) => self.err("expected a tuple"),
        }
    }

    /// `a`, `a/b`, `(a)`, `(a/b)`.
    fn coefficient(&mut self) -> Result<(i64, i64), ParseError> {
        let paren = self.eat(b'(');
        let n = self.int()?;
        let d = if self.eat(b'/') { self.int()? } else { 1 };
        if d == 0 {
            return self.err("zero denominator");
        }
        if paren {
            self.expect(b')')?;
        }
        Ok((n, d))
    }
}

fn to_usizes(c: &Cursor, v: &[i64], what: &str) -> Result<Vec<usize>, ParseError> {
    v.iter()
        .map(|&x| if x < 0 { c.err(format!("negative entry in {}", what)) } else { Ok(x as usize) })
        .collect()
}

pub fn parse_category(name: &str, d: Option<usize>) -> Result<CategorySpec, String> {
    let family = match name {
        "FI" => Family::FI,
        "OI" => Family::OI,
        "FI_d" => Family::FId,
        "OI_d" => Family::OId,
        "FI^d" => Family::FIpowd,
        "OI^d" => Family::OIpowd,
        "N^d" => Family::Nd,
        _ => return Err(format!("unknown category '{}'", name)),
    };
    let d = match (family, d) {
        (Family::FI | Family::OI, None) => 1,
        (_, Some(d)) => d,
        (_, None) => return Err(format!("category {} needs d=", name)),
    };
    CategorySpec::new(family, d).map_err(|e| e.to_string())
}

/// `Q`, `F5`, `F 5` or `F_5`.
pub fn parse_field(s: &str) -> Result<FieldSpec, String> {
    let t = s.trim();
    if t == "Q" {
        return Ok(FieldSpec::Rationals);
    }
    let rest = t.strip_prefix('F').ok_or_else(|| format!("unknown field '{}'", s))?;
    let p: u64 = rest.trim().trim_start_matches('_').parse().map_err(|_| format!("unknown field '{}'", s))?;
    if !is_prime(p) || p >= 1 << 32 {
        return Err(format!("{} is not a supported prime", p));
    }
    Ok(FieldSpec::Prime(p))
}

fn morphism_from_fields(
    c: &Cursor,
    spec: &CategorySpec,
    source: &ObjectId,
    fields: &HashMap<String, Value>,
) -> Result<Morphism, ParseError> {
    let flat = |v: &Value, what: &str| -> Result<Vec<i64>, ParseError> {
        match v {
            Value::List(items) => items
                .iter()
                .map(|x| match x {
                    Value::Int(i) => Ok(*i),
                    _ => c.err(format!("{} must be a flat tuple", what)),
                })
                .collect(),
            _ => c.err(format!("{} must be a tuple", what)),
        }
    };
    let to = fields.get("to").ok_or_else(|| ParseError { line: c.line, col: c.offset + c.pos + 1, msg: "morphism needs to=".into() })?;
    let target = ObjectId(to_usizes(c, &flat(to, "to")?, "to")?);
    if target.0.len() != spec.coords() {
        return c.err(format!("target {} has the wrong shape for {}", target, spec));
    }
    let mut inj: Vec<Vec<u8>> = Vec::new();
    if spec.family() != Family::Nd {
        let v = fields.get("inj").ok_or_else(|| ParseError { line: c.line, col: c.offset + c.pos + 1, msg: "morphism needs inj=".into() })?;
        let per_coord: Vec<Vec<i64>> = if spec.coords() == 1 {
            vec![flat(v, "inj")?]
        } else {
            match v {
                Value::List(items) => items.iter().map(|it| flat(it, "inj")).collect::<Result<_, _>>()?,
                _ => return c.err("inj must be a tuple of tuples"),
            }
        };
        for a in per_coord {
            inj.push(
                a.iter()
                    .map(|&x| if (1..=255).contains(&x) { Ok((x - 1) as u8) } else { c.err("injection values are 1-based") })
                    .collect::<Result<_, _>>()?,
            );
        }
    } else if fields.contains_key("inj") {
        return c.err("N^d morphisms take no inj=");
    }
    let mut col = Vec::new();
    if spec.colored() {
        let colors = match fields.get("col") {
            Some(v) => flat(v, "col")?,
            None => Vec::new(),
        };
        let n = target.0[0];
        let image: Vec<bool> = {
            let mut im = vec![false; n];
            for &p in inj.first().map(|v| v.as_slice()).unwrap_or(&[]) {
                if (p as usize) < n {
                    im[p as usize] = true;
                }
            }
            im
        };
        let mut it = colors.iter();
        for z in 0..n {
            if image[z] {
                col.push(0);
            } else {
                match it.next() {
                    Some(&cc) if cc >= 1 && cc <= spec.d() as i64 => col.push(cc as u8),
                    Some(_) => return c.err(format!("colors lie in 1..={}", spec.d())),
                    None => return c.err("too few colors for the complement of the image"),
                }
            }
        }
        if it.next().is_some() {
            return c.err("too many colors for the complement of the image");
        }
    } else if fields.contains_key("col") {
        return c.err(format!("{} morphisms take no col=", spec));
    }
    let m = Morphism { source: source.clone(), target, inj, col };
    if let Err(e) = validate(spec, &m) {
        return c.err(format!("morphism not in the hom-set: {}", e));
    }
    Ok(m)
}

fn parse_morph(
    c: &mut Cursor,
    spec: &CategorySpec,
    source: &ObjectId,
) -> Result<Morphism, ParseError> {
    c.expect(b'[')?;
    c.keyword("morph")?;
    let mut fields = HashMap::new();
    while !c.eat(b']') {
        if c.at_end() {
            return c.err("unterminated morphism");
        }
        let key = c.word()?;
        if !["to", "inj", "col"].contains(&key.as_str()) {
            return c.err(format!("unknown morphism field '{}'", key));
        }
        c.expect(b'=')?;
        let v = c.value()?;
        if fields.insert(key.clone(), v).is_some() {
            return c.err(format!("repeated field '{}'", key));
        }
    }
    morphism_from_fields(c, spec, source, &fields)
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut spec: Option<CategorySpec> = None;
    let mut field: Option<FieldSpec> = None;
    let mut generators: Vec<ObjectId> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut relations = Vec::new();
    let mut relation_lines = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut c = Cursor { s: content.as_bytes(), pos: 0, line: line_no, offset: 0 };
        if c.at_end() {
            continue;
        }
        let kw = c.word()?;
        match kw.as_str() {
            "category" => {
                if spec.is_some() {
                    return c.err("category given twice");
                }
                let name = c.word()?;
                let mut d = None;
                if !c.at_end() {
                    c.keyword("d")?;
                    c.expect(b'=')?;
                    let v = c.int()?;
                    if v < 1 {
                        return c.err("d must be positive");
                    }
                    d = Some(v as usize);
                }
                spec = Some(parse_category(&name, d).or_else(|m| c.err(m))?);
            }
            "field" => {
                if field.is_some() {
                    return c.err("field given twice");
                }
                let rest = String::from_utf8_lossy(&content.as_bytes()[c.pos..]).into_owned();
                c.pos = content.len();
                field = Some(parse_field(&rest).or_else(|m| c.err(m))?);
            }
            "generator" => {
                let Some(sp) = spec else { return c.err("generator before category") };
                let label = c.word()?;
                if labels.contains(&label) {
                    return c.err(format!("generator '{}' declared twice", label));
                }
                c.keyword("at")?;
                let t = c.tuple()?;
                let obj = ObjectId(to_usizes(&c, &t, "object")?);
                if obj.0.len() != sp.coords() {
                    return c.err(format!("object {} has the wrong shape for {}", obj, sp));
                }
                generators.push(obj);
                labels.push(label);
            }
            "relation" => {
                let Some(sp) = spec else { return c.err("relation before category") };
                c.expect(b':')?;
                let mut terms = Vec::new();
                let save = c.pos;
                let zero = matches!(c.int(), Ok(0)) && c.at_end();
                if !zero {
                    c.pos = save;
                    loop {
                        let coeff = c.coefficient()?;
                        c.expect(b'*')?;
                        let morph_pos = c.pos;
                        // the morphism source is the generator named after it
                        let mut look = Cursor { s: c.s, pos: c.pos, line: c.line, offset: 0 };
                        let mut depth = 0;
                        while look.pos < look.s.len() {
                            match look.s[look.pos] {
                                b'[' => depth += 1,
                                b']' => {
                                    depth -= 1;
                                    if depth == 0 {
                                        look.pos += 1;
                                        break;
                                    }
                                }
                                _ => {}
                            }
                            look.pos += 1;
                        }
                        let label = look.word()?;
                        let gen = labels
                            .iter()
                            .position(|l| *l == label)
                            .ok_or_else(|| ParseError { line: line_no, col: look.pos + 1 - label.len(), msg: format!("unknown generator '{}'", label) })?;
                        c.pos = morph_pos;
                        let morphism = parse_morph(&mut c, &sp, &generators[gen])?;
                        let after = c.word()?;
                        debug_assert_eq!(after, label);
                        terms.push(Term { gen, morphism, coeff });
                        if c.at_end() {
                            break;
                        }
                        c.expect(b'+')?;
                    }
                }
                relations.push(Relation { terms });
                relation_lines.push(line_no);
            }
            other => return c.err(format!("unknown directive '{}'", other)),
        }
        if !c.at_end() {
            return c.err("unexpected trailing input");
        }
    }
    let spec = spec.ok_or(ParseError { line: 1, col: 1, msg: "missing category line".into() })?;
    let field = field.unwrap_or(FieldSpec::Rationals);
    let p = Presentation { spec, field, generators, labels, relations };
    for r in 0..p.relations.len() {
        if let Err(e) = p.relation_target(r) {
            let msg = match e {
                ModError::Relation(_, m) => m,
                other => other.to_string(),
            };
            return Err(ParseError { line: relation_lines[r], col: 1, msg });
        }
    }
    Ok(p)
}

fn tuple_str(v: impl IntoIterator<Item = impl std::fmt::Display>) -> String {
    format!("({})", v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn morph_str(spec: &CategorySpec, m: &Morphism) -> String {
    let mut s = format!("[morph to={}", tuple_str(&m.target.0));
    if spec.family() != Family::Nd {
        let per: Vec<String> = m.inj.iter().map(|a| tuple_str(a.iter().map(|v| v + 1))).collect();
        if spec.coords() == 1 {
            write!(s, " inj={}", per[0]).unwrap();
        } else {
            write!(s, " inj=({})", per.join(",")).unwrap();
        }
    }
    if spec.colored() {
        write!(s, " col={}", tuple_str(m.coloring())).unwrap();
    }
    s.push(']');
    s
}

fn category_line(spec: &CategorySpec) -> String {
    match spec.family() {
        Family::FI | Family::OI => spec.name(),
        _ => spec.name(),
    }
}

pub fn serialize_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    writeln!(out, "category {}", category_line(&p.spec)).unwrap();
    match p.field {
        FieldSpec::Rationals => writeln!(out, "field Q").unwrap(),
        FieldSpec::Prime(q) => writeln!(out, "field F {}", q).unwrap(),
    }
    for (g, l) in p.generators.iter().zip(&p.labels) {
        writeln!(out, "generator {} at {}", l, tuple_str(&g.0)).unwrap();
    }
    for r in &p.relations {
        if r.terms.is_empty() {
            writeln!(out, "relation: 0").unwrap();
            continue;
        }
        let terms: Vec<String> = r
            .terms
            .iter()
            .map(|t| {
                let c = if t.coeff.1 == 1 { format!("({})", t.coeff.0) } else { format!("({}/{})", t.coeff.0, t.coeff.1) };
                format!("{} * {} {}", c, morph_str(&p.spec, &t.morphism), p.labels[t.gen])
            })
            .collect();
        writeln!(out, "relation: {}", terms.join(" + ")).unwrap();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Dimensions, H_0, gd, H_i, hd_i and regularity.
    Invariants,
    /// The descendant tree.
    Tree,
    /// The linear relative projective resolution of a truncation.
    Resolve,
    /// Run the invariant suites on the input module.
    Check,
    /// Golden values and decomposition identities.
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Kv,
}

#[derive(Parser, Debug, Clone)]
#[command(name = "catmod", version, about = "Exact homology of modules over combinatorial categories")]
pub struct JobConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Presentation file (not needed for selftest).
    pub input: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub window: usize,
    /// Q or Fp for a prime p, e.g. F5. Overrides the file's field line.
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub imax: usize,
    /// Truncation rank for resolve; defaults to the certified regularity.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Lines for both renderings.
#[derive(Default)]
pub struct Report {
    text: Vec<String>,
    kv: Vec<(String, String)>,
}

impl Report {
    fn both(&mut self, key: &str, label: &str, value: impl std::fmt::Display) {
        let v = value.to_string();
        self.text.push(format!("{}: {}", label, v));
        self.kv.push((key.to_string(), v));
    }
    fn text(&mut self, line: impl Into<String>) {
        self.text.push(line.into());
    }
    fn kv(&mut self, key: impl Into<String>, value: impl std::fmt::Display) {
        self.kv.push((key.into(), value.to_string()));
    }
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Text => {
                for l in &self.text {
                    out.push_str(l);
                    out.push('\n');
                }
            }
            Format::Kv => {
                for (k, v) in &self.kv {
                    writeln!(out, "{}={}", k, v).unwrap();
                }
            }
        }
        out
    }
}

fn dims_str(objects: &[ObjectId], dims: &[usize]) -> String {
    let parts: Vec<String> =
        objects.iter().zip(dims).filter(|(_, &d)| d > 0).map(|(o, d)| format!("{}:{}", o, d)).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

fn obj_key(o: &ObjectId) -> String {
    tuple_str(&o.0)
}

/// Threads available to the check suite.
pub fn thread_cap() -> usize {
    let default = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("CATMOD_THREADS") {
        Ok(s) => s.trim().parse::<usize>().ok().filter(|&n| n > 0).unwrap_or(default).min(default.max(1)),
        Err(_) => default,
    }
}

/// Reads the input, runs the job and returns the exit code with the report
/// (or an error message).
pub fn run(job: &JobConfig) -> (i32, String) {
    if job.command == Command::Selftest {
        return selftest(job.format);
    }
    let Some(path) = &job.input else {
        return (EXIT_PARSE, "error: an input file is required\n".into());
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return (EXIT_PARSE, format!("error: cannot read {}: {}\n", path.display(), e)),
    };
    let mut p = match parse_presentation(&text) {
        Ok(p) => p,
        Err(e) => return (EXIT_PARSE, format!("{}: {}\n", path.display(), e)),
    };
    if let Some(f) = &job.field {
        match parse_field(f) {
            Ok(fs) => p.field = fs,
            Err(e) => return (EXIT_PARSE, format!("error: {}\n", e)),
        }
    }
    match p.field {
        FieldSpec::Rationals => run_with(job, &p, &Rationals),
        FieldSpec::Prime(q) => run_with(job, &p, &PrimeField::new(q).expect("validated prime")),
    }
}

pub fn run_with<K: Field>(job: &JobConfig, p: &Presentation, k: &K) -> (i32, String) {
    let v = match realize(p, job.window, k) {
        Ok(v) => v,
        Err(e) => return (EXIT_PARSE, format!("error: {}\n", e)),
    };
    let mut rep = Report::default();
    rep.both("category", "category", p.spec);
    rep.both("field", "field", k.spec());
    rep.both("window", "window", job.window);
    let code = match job.command {
        Command::Invariants => invariants(&v, job.imax, &mut rep),
        Command::Tree => tree(&v, job.budget, &mut rep),
        Command::Resolve => resolve(&v, job.n, job.imax, &mut rep),
        Command::Check => {
            let results = check_suite(&v, job.imax);
            let mut ok = true;
            for (name, r) in &results {
                match r {
                    Ok(()) => {
                        rep.text(format!("PASS {}", name));
                        rep.kv(format!("check.{}", name), "pass");
                    }
                    Err(msg) => {
                        ok = false;
                        rep.text(format!("FAIL {}: {}", name, msg));
                        rep.kv(format!("check.{}", name), format!("fail {}", msg));
                    }
                }
            }
            if ok {
                EXIT_OK
            } else {
                EXIT_REFUSED
            }
        }
        Command::Selftest => unreachable!(),
    };
    (code, rep.render(job.format))
}

fn invariants<K: Field>(v: &TruncatedModule<K>, i_max: usize, rep: &mut Report) -> i32 {
    let r = match homology_groups(v, i_max) {
        Ok(r) => r,
        Err(e) => {
            rep.both("error", "error", e);
            return EXIT_REFUSED;
        }
    };
    rep.text(format!("dims: {}", dims_str(v.objects(), v.dims())));
    for (o, d) in v.objects().iter().zip(v.dims()) {
        rep.kv(format!("dim.{}", obj_key(o)), d);
    }
    let g = gd(v);
    rep.both("gd", "gd", g.value);
    rep.both("gd.window_limited", "gd window-limited", g.window_limited);
    for i in 0..=i_max {
        rep.text(format!("H_{}: {}", i, dims_str(&r.objects, &r.h[i])));
        for (o, d) in r.support(i) {
            rep.kv(format!("h{}.{}", i, obj_key(&o)), d);
        }
        rep.both(&format!("hd.{}", i), &format!("hd_{}", i), r.hd[i]);
    }
    let reg = r.regularity;
    rep.both("reg", "reg", reg.lower);
    rep.both("reg.certified", "reg certified", reg.certified());
    rep.both("reg.upper", "reg upper bound", reg.upper.map_or("none".to_string(), |u| u.to_string()));
    rep.both("reg.certificate", "reg certificate", reg.certificate.map_or("none".to_string(), |c| c.to_string()));
    let deg = degree(v);
    rep.both("deg", "deg", deg.value);
    rep.both("deg.window_limited", "deg window-limited", deg.window_limited);
    EXIT_OK
}

fn tree<K: Field>(v: &TruncatedModule<K>, budget: usize, rep: &mut Report) -> i32 {
    let t = match build_tree(v, budget) {
        Ok(t) => t,
        Err(e) => {
            rep.both("error", "error", e);
            return EXIT_REFUSED;
        }
    };
    rep.both("nodes", "nodes", t.nodes.len());
    rep.both("complete", "complete", t.complete());
    fn walk<K: Field>(t: &DescendantTree<K>, i: usize, rep: &mut Report) {
        let n = &t.nodes[i];
        let indent = "  ".repeat(t.depth(i));
        let nil = n.nil.map_or("-".to_string(), |s| s.to_string());
        let chain: Vec<String> = n.chain.iter().map(|s| s.to_string()).collect();
        let flag = if n.window_exhausted { " (window exhausted)" } else { "" };
        rep.text(format!(
            "{}node {} window {} nil {} chain {}{}",
            indent,
            i,
            n.module.window(),
            nil,
            if chain.is_empty() { "-".into() } else { chain.join(" < ") },
            flag
        ));
        rep.text(format!("{}  dims: {}", indent, dims_str(n.module.objects(), n.module.dims())));
        rep.kv(format!("node.{}.parent", i), n.parent.map_or("-".to_string(), |p| p.to_string()));
        rep.kv(format!("node.{}.window", i), n.module.window());
        rep.kv(format!("node.{}.nil", i), nil);
        rep.kv(format!("node.{}.exhausted", i), n.window_exhausted);
        rep.kv(format!("node.{}.dims", i), dims_str(n.module.objects(), n.module.dims()));
        for &c in &n.children {
            walk(t, c, rep);
        }
    }
    walk(&t, 0, rep);
    EXIT_OK
}

fn resolve<K: Field>(v: &TruncatedModule<K>, n: Option<usize>, i_max: usize, rep: &mut Report) -> i32 {
    let n = match n {
        Some(n) => n,
        None => match regularity(v, i_max) {
            Ok(r) if r.certified() => r.lower.max(0) as usize,
            Ok(r) => {
                rep.both("error", "error", format!("refused: regularity is not certified (at least {}); pass --n", r.lower));
                return EXIT_REFUSED;
            }
            Err(e) => {
                rep.both("error", "error", e);
                return EXIT_REFUSED;
            }
        },
    };
    let res = match linear_relative_resolution(v, n, i_max) {
        Ok(r) => r,
        Err(e) => {
            rep.both("error", "error", e);
            return EXIT_REFUSED;
        }
    };
    rep.both("n", "n", n);
    rep.both("stages", "stages", res.stages.len());
    rep.both("complete", "complete", res.complete);
    rep.both("window_exhausted", "window exhausted", res.window_exhausted);
    for (i, s) in res.stages.iter().enumerate() {
        let parts: Vec<String> = s.parts.iter().map(|p| format!("{}^{}", p.object(), p.rep.dim)).collect();
        rep.text(format!("F^{}: generated at rank {} by {}", i, s.rank, parts.join(" + ")));
        rep.text(format!("  H_0(F^{}): {}", i, dims_str(v.objects(), &s.h0)));
        rep.kv(format!("stage.{}.rank", i), s.rank);
        rep.kv(format!("stage.{}.h0", i), dims_str(v.objects(), &s.h0));
        rep.kv(format!("stage.{}.linear", i), s.generated_at_rank);
    }
    EXIT_OK
}

type Check<'a> = (&'static str, Box<dyn Fn() -> Result<(), String> + Sync + 'a>);

fn gd_exact<K: Field>(v: &TruncatedModule<K>, below: usize) -> bool {
    v.bounds().generators.is_some_and(|g| g < below)
}

/// Module-level invariant checks: functoriality, `hd_0 = gd`, the inductive
/// axiom, generating-degree bounds for `D_S`, the kernel lattice, the jump
/// property of maximal nil subsets, the homological characterization of
/// relative projectives, and `reg ≤ deg` for finitely supported modules.
pub fn check_suite<K: Field>(v: &TruncatedModule<K>, i_max: usize) -> Vec<(&'static str, Result<(), String>)> {
    let n = v.window();
    let ind = if n > 0 { Inductive::new(v).ok() } else { None };
    let ind = &ind;
    let d = v.spec().d();
    let checks: Vec<Check> = vec![
        ("functoriality", Box::new(move || v.check_functoriality(n.min(3), 4))),
        (
            "hd0-equals-gd",
            Box::new(move || {
                let r = homology_groups(v, 0).map_err(|e| e.to_string())?;
                if r.hd[0] == gd(v).value { Ok(()) } else { Err(format!("hd_0 = {}, gd = {}", r.hd[0], gd(v).value)) }
            }),
        ),
        (
            "theta-natural",
            Box::new(move || match ind {
                Some(ind) if !ind.theta.is_natural(&ind.vd, &ind.fv) => Err("θ is not natural".into()),
                _ => Ok(()),
            }),
        ),
        (
            "inductive-axiom",
            Box::new(move || {
                let Some(ind) = ind else { return Ok(()) };
                if v.is_zero() || !gd_exact(v, n) {
                    return Ok(());
                }
                let dv = ind.ks_ds(Subset::full(d)).map_err(|e| e.to_string())?.d;
                let (a, b) = (gd(&dv).value, gd(v).value);
                if a == b - 1 { Ok(()) } else { Err(format!("gd(DV) = {}, gd(V) = {}", a, b)) }
            }),
        ),
        (
            "gd-bounds",
            Box::new(move || {
                let Some(ind) = ind else { return Ok(()) };
                if !gd_exact(v, n) {
                    return Ok(());
                }
                let g = gd(v).value;
                for s in Subset::all(d) {
                    let ds = gd(&ind.ks_ds(s).map_err(|e| e.to_string())?.d).value;
                    if !(ds <= g && g <= ds + 1) {
                        return Err(format!("S = {}: gd(D_S V) = {}, gd(V) = {}", s, ds, g));
                    }
                }
                Ok(())
            }),
        ),
        (
            "kernel-lattice",
            Box::new(move || {
                let Some(ind) = ind else { return Ok(()) };
                let ks: Vec<Vec<Subspace<K>>> = Subset::all(d).iter().map(|&s| ind.kernel_in_full(s)).collect();
                for s in Subset::all(d) {
                    for t in Subset::all(d) {
                        let (a, b, c) = (&ks[s.0 as usize], &ks[t.0 as usize], &ks[s.intersect(t).0 as usize]);
                        for xi in 0..a.len() {
                            if s.is_subset(t) && !b[xi].contains_subspace(&a[xi]) {
                                return Err(format!("K_{} not inside K_{}", s, t));
                            }
                            let meet = a[xi].intersect(&b[xi]);
                            if meet.dim() != c[xi].dim() || !meet.contains_subspace(&c[xi]) {
                                return Err(format!("K_{} ∩ K_{} differs from K_{}", s, t, s.intersect(t)));
                            }
                        }
                    }
                }
                Ok(())
            }),
        ),
        (
            "jump",
            Box::new(move || {
                let Some(ind) = ind else { return Ok(()) };
                let s = ind.maximal_nil_subset();
                let all = Subset::all(d);
                let dims = |t: Subset| -> Vec<usize> { ind.kernel_in_full(t).iter().map(|x| x.dim()).collect() };
                for &t in all.iter().filter(|t| s.is_subset(**t)) {
                    for &t2 in all.iter().filter(|t2| t.is_subset(**t2) && **t2 != t) {
                        if dims(t) == dims(t2) {
                            return Err(format!("K_{} = K_{} above the maximal nil subset {}", t, t2, s));
                        }
                    }
                }
                Ok(())
            }),
        ),
        (
            "relative-projective",
            Box::new(move || {
                let rp = is_relative_projective(v).map_err(|e| e.to_string())?;
                let r = homology_groups(v, i_max.max(1)).map_err(|e| e.to_string())?;
                let higher_vanish = r.hd[1..].iter().all(|&h| h < 0);
                if rp.is_relative_projective() != higher_vanish {
                    return Err(format!(
                        "witness {} but higher homology {}",
                        rp.is_relative_projective(),
                        if higher_vanish { "vanishes" } else { "does not vanish" }
                    ));
                }
                Ok(())
            }),
        ),
        (
            "reg-below-degree",
            Box::new(move || {
                let r = homology_groups(v, i_max).map_err(|e| e.to_string())?;
                if r.regularity.certificate == Some(Certificate::FiniteSupport) || !degree(v).window_limited {
                    let deg = degree(v).value;
                    if !degree(v).window_limited && r.regularity.lower > deg {
                        return Err(format!("reg ≥ {} above deg {}", r.regularity.lower, deg));
                    }
                }
                Ok(())
            }),
        ),
    ];
    run_parallel(&checks)
}

fn run_parallel(checks: &[Check]) -> Vec<(&'static str, Result<(), String>)> {
    let threads = thread_cap().max(1);
    let mut results: Vec<Option<Result<(), String>>> = vec![None; checks.len()];
    for (chunk_idx, chunk) in checks.chunks(threads).enumerate() {
        let out: Vec<Result<(), String>> = std::thread::scope(|sc| {
            let handles: Vec<_> = chunk.iter().map(|(_, f)| sc.spawn(move || f())).collect();
            handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err("check panicked".into()))).collect()
        });
        for (j, r) in out.into_iter().enumerate() {
            results[chunk_idx * threads + j] = Some(r);
        }
    }
    checks.iter().zip(results).map(|((name, _), r)| (*name, r.unwrap())).collect()
}

/// The module `k[X, Y]/(XY)` over `N^2`, one generator at the origin.
pub fn axes_presentation() -> Presentation {
    parse_presentation(AXES_FILE).expect("built-in presentation parses")
}

pub const AXES_FILE: &str = include_str!("../data/axes.pres");

/// `dim (ΣM(x))_y` predicted by the decomposition of the shifted free module.
pub fn predicted_shift_dim(spec: &CategorySpec, x: &ObjectId, y: &ObjectId) -> u128 {
    let d = spec.d() as u128;
    let h = |a: &ObjectId| hom_count(spec, a, y);
    let lower = |i: usize| {
        let mut o = x.clone();
        o.0[i] -= 1;
        o
    };
    match spec.family() {
        Family::FI | Family::FId => {
            let n = x.0[0];
            d * h(x) + if n >= 1 { n as u128 * h(&lower(0)) } else { 0 }
        }
        Family::OI | Family::OId => d * h(x) + if x.0[0] >= 1 { h(&lower(0)) } else { 0 },
        Family::FIpowd => d * h(x) + (0..x.0.len()).filter(|&i| x.0[i] >= 1).map(|i| x.0[i] as u128 * h(&lower(i))).sum::<u128>(),
        Family::OIpowd => d * h(x) + (0..x.0.len()).filter(|&i| x.0[i] >= 1).map(|i| h(&lower(i))).sum::<u128>(),
        Family::Nd => (0..x.0.len()).map(|i| if x.0[i] >= 1 { h(&lower(i)) } else { h(x) }).sum(),
    }
}

/// Compares `FM(x)` with the decomposition formula at every object.
pub fn check_shift_decomposition(spec: CategorySpec, x: &ObjectId, window: usize) -> Result<(), String> {
    let m = realize_free(&FreeModule::on(std::slice::from_ref(x)), spec, &Rationals, window).map_err(|e| e.to_string())?;
    let f = inductive_f(&m).map_err(|e| e.to_string())?;
    for (y, &dim) in f.objects().iter().zip(f.dims()) {
        let want = predicted_shift_dim(&spec, x, y);
        if dim as u128 != want {
            return Err(format!("{}: F M({}) at {} has dimension {}, expected {}", spec, x, y, dim, want));
        }
    }
    Ok(())
}

fn selftest(format: Format) -> (i32, String) {
    let mut rep = Report::default();
    let mut ok = true;
    let mut record = |rep: &mut Report, name: &str, r: Result<(), String>| {
        match &r {
            Ok(()) => {
                rep.text(format!("PASS {}", name));
                rep.kv(format!("selftest.{}", name), "pass");
            }
            Err(m) => {
                ok = false;
                rep.text(format!("FAIL {}: {}", name, m));
                rep.kv(format!("selftest.{}", name), format!("fail {}", m));
            }
        }
    };
    let golden = axes_golden(6);
    for (name, r) in golden {
        record(&mut rep, name, r);
    }
    let mut specs = vec![CategorySpec::fi(), CategorySpec::oi()];
    for d in 1..=3 {
        for f in [Family::FId, Family::OId, Family::FIpowd, Family::OIpowd, Family::Nd] {
            specs.push(CategorySpec::new(f, d).unwrap());
        }
    }
    for spec in specs {
        let r = objects_up_to(&spec, 2).iter().try_for_each(|x| check_shift_decomposition(spec, x, 4));
        record(&mut rep, &format!("decomposition.{}", spec.name().replace(" d=", "-")), r);
    }
    let code = if ok { EXIT_OK } else { EXIT_REFUSED };
    (code, rep.render(format))
}

fn expect_dims<K: Field>(v: &TruncatedModule<K>, f: impl Fn(usize, usize) -> usize, what: &str) -> Result<(), String> {
    for (o, &d) in v.objects().iter().zip(v.dims()) {
        let want = f(o.0[0], o.0[1]);
        if d != want {
            return Err(format!("{} has dimension {} at {}, expected {}", what, d, o, want));
        }
    }
    Ok(())
}

/// Golden values for `k[X, Y]/(XY)`: the module, `KV`, `ΣV`, `DV`, the
/// quotient chain, the tree, and the homology.
pub fn axes_golden(window: usize) -> Vec<(&'static str, Result<(), String>)> {
    let mut out: Vec<(&'static str, Result<(), String>)> = Vec::new();
    let v = match realize(&axes_presentation(), window, &Rationals) {
        Ok(v) => v,
        Err(e) => return vec![("axes.realize", Err(e.to_string()))],
    };
    let axes = |a: usize, b: usize| usize::from(a == 0 || b == 0);
    out.push(("axes.dims", expect_dims(&v, axes, "V")));
    let ind = match Inductive::new(&v) {
        Ok(i) => i,
        Err(e) => return vec![("axes.inductive", Err(e.to_string()))],
    };
    let full = ind.ks_ds(Subset::full(2));
    out.push((
        "axes.kernel",
        full.as_ref().map_err(|e| e.to_string()).and_then(|kd| {
            expect_dims(&kd.k, |a, b| usize::from(a == 0 && b >= 1) + usize::from(b == 0 && a >= 1), "KV")
        }),
    ));
    out.push((
        "axes.shift",
        (|| {
            let s1 = shift(0, &v).map_err(|e| e.to_string())?;
            let s2 = shift(1, &v).map_err(|e| e.to_string())?;
            expect_dims(&s1, |_, b| usize::from(b == 0), "Σ_1 V")?;
            expect_dims(&s2, |a, _| usize::from(a == 0), "Σ_2 V")?;
            expect_dims(&ind.fv, |a, b| usize::from(b == 0) + usize::from(a == 0), "ΣV")
        })(),
    ));
    out.push((
        "axes.cokernel",
        full.as_ref().map_err(|e| e.to_string()).and_then(|kd| {
            if kd.d.is_zero() { Ok(()) } else { Err("DV is nonzero".into()) }
        }),
    ));
    out.push((
        "axes.chain",
        (|| {
            if ind.maximal_nil_subset() != Subset::empty() {
                return Err(format!("maximal nil subset {}", ind.maximal_nil_subset()));
            }
            let c = ind.filtration_chain(Subset::empty()).map_err(|e| e.to_string())?;
            let want = vec![Subset::empty(), Subset::from_elems(&[0]), Subset::full(2)];
            if c.subsets != want {
                return Err("unexpected chain of subsets".into());
            }
            expect_dims(&c.d_modules[0], |a, b| usize::from(b == 0) + usize::from(a == 0), "D_{S_0} V")?;
            expect_dims(&c.d_modules[1], |a, _| usize::from(a == 0), "D_{S_1} V")?;
            if !c.d_modules[2].is_zero() {
                return Err("DV is nonzero".into());
            }
            let k1 = kernel_of(&c.d_modules[0], &c.maps[0]).0;
            expect_dims(&k1, |_, b| usize::from(b == 0), "first kernel")?;
            expect_dims(&c.kernels[0], |_, b| usize::from(b == 0), "first child")?;
            expect_dims(&c.kernels[1], |a, _| usize::from(a == 0), "second child")
        })(),
    ));
    out.push((
        "axes.tree",
        (|| {
            let t = build_tree(&v, 16).map_err(|e| e.to_string())?;
            if t.nodes.len() != 3 || t.nodes[0].children != vec![1, 2] {
                return Err(format!("tree has {} nodes", t.nodes.len()));
            }
            expect_dims(&t.nodes[1].module, |_, b| usize::from(b == 0), "first child")?;
            expect_dims(&t.nodes[2].module, |a, _| usize::from(a == 0), "second child")?;
            let nils = (t.nodes[1].nil, t.nodes[2].nil);
            if nils != (Some(Subset::from_elems(&[0])), Some(Subset::from_elems(&[1]))) {
                return Err("children have unexpected maximal nil subsets".into());
            }
            if !t.nodes[1].children.is_empty() || !t.nodes[2].children.is_empty() {
                return Err("children are not leaves".into());
            }
            Ok(())
        })(),
    ));
    out.push((
        "axes.homology",
        (|| {
            let r = homology_groups(&v, 3).map_err(|e| e.to_string())?;
            let o = |a, b| ObjectId(vec![a, b]);
            if r.support(0) != vec![(o(0, 0), 1)] || r.support(1) != vec![(o(1, 1), 1)] {
                return Err("unexpected H_0 or H_1".into());
            }
            if r.hd[2] != -1 || r.hd[3] != -1 {
                return Err("higher homology is nonzero".into());
            }
            if r.regularity.lower != 1 || !r.regularity.certified() {
                return Err(format!("reg {:?}", r.regularity));
            }
            Ok(())
        })(),
    ));
    out
}
