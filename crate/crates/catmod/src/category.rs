//! Objects, morphisms and composition for the seven supported category
//! families, together with the self-embeddings, the structure maps of the
//! inductive functor, and a small generating set of morphisms.
//!
//! Injections are stored 0-based: `inj[c][k]` is the image of `k` in
//! coordinate `c`. Colorings are stored over the whole target: `col[z]` is the
//! color (1..=d) of a point outside the image and 0 for image points.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("cannot compose: target {0} of the first map is not the source {1} of the second")]
    Composition(String, String),
    #[error("coordinate {0} out of range for {1}")]
    Coordinate(usize, String),
    #[error("invalid category: {0}")]
    Spec(String),
    #[error("invalid morphism: {0}")]
    Morphism(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Nd,
    FI,
    OI,
    FId,
    OId,
    FIpowd,
    OIpowd,
}

impl Family {
    pub const ALL: [Family; 7] =
        [Family::Nd, Family::FI, Family::OI, Family::FId, Family::OId, Family::FIpowd, Family::OIpowd];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CategorySpec {
    family: Family,
    d: usize,
}

impl CategorySpec {
    pub fn new(family: Family, d: usize) -> Result<Self, CategoryError> {
        if d == 0 {
            return Err(CategoryError::Spec("d must be positive".into()));
        }
        if matches!(family, Family::FI | Family::OI) && d != 1 {
            return Err(CategoryError::Spec(format!("{:?} has d = 1", family)));
        }
        if d > 8 {
            return Err(CategoryError::Spec("d above 8 is not supported".into()));
        }
        Ok(CategorySpec { family, d })
    }

    pub fn fi() -> Self {
        CategorySpec { family: Family::FI, d: 1 }
    }

    pub fn oi() -> Self {
        CategorySpec { family: Family::OI, d: 1 }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn multiplicity(&self) -> usize {
        self.d
    }

    /// Length of an object's rank tuple.
    pub fn coords(&self) -> usize {
        match self.family {
            Family::Nd | Family::FIpowd | Family::OIpowd => self.d,
            _ => 1,
        }
    }

    pub fn ordered(&self) -> bool {
        matches!(self.family, Family::OI | Family::OId | Family::OIpowd)
    }

    pub fn colored(&self) -> bool {
        matches!(self.family, Family::FId | Family::OId)
    }

    /// Families whose inductive functor is a single shift.
    pub fn single_shift(&self) -> bool {
        matches!(self.family, Family::FI | Family::OI | Family::FId | Family::OId)
    }

    /// Number of self-embeddings, one per coordinate.
    pub fn shift_count(&self) -> usize {
        if self.single_shift() {
            1
        } else {
            self.d
        }
    }

    pub fn name(&self) -> String {
        match self.family {
            Family::Nd => format!("N^d d={}", self.d),
            Family::FI => "FI".into(),
            Family::OI => "OI".into(),
            Family::FId => format!("FI_d d={}", self.d),
            Family::OId => format!("OI_d d={}", self.d),
            Family::FIpowd => format!("FI^d d={}", self.d),
            Family::OIpowd => format!("OI^d d={}", self.d),
        }
    }

    pub fn object(&self, ranks: &[usize]) -> Result<ObjectId, CategoryError> {
        if ranks.len() != self.coords() {
            return Err(CategoryError::Morphism(format!(
                "object {:?} needs {} coordinates",
                ranks,
                self.coords()
            )));
        }
        Ok(ObjectId(ranks.to_vec()))
    }
}

impl fmt::Display for CategorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// An object, given by its rank tuple. Ordered by rank, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ObjectId(pub Vec<usize>);

impl ObjectId {
    pub fn rank(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn leq(&self, other: &ObjectId) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn bumped(&self, i: usize) -> ObjectId {
        let mut v = self.0.clone();
        v[i] += 1;
        ObjectId(v)
    }
}

impl Ord for ObjectId {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rank(), &self.0).cmp(&(other.rank(), &other.0))
    }
}

impl PartialOrd for ObjectId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "[{}]", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    pub source: ObjectId,
    pub target: ObjectId,
    /// One injection per coordinate; empty for `Nd`.
    pub inj: Vec<Vec<u8>>,
    /// Full-length coloring of the target for `FId`/`OId`; empty otherwise.
    pub col: Vec<u8>,
}

impl Morphism {
    /// Colors of the points outside the image, in increasing order of point.
    pub fn coloring(&self) -> Vec<u8> {
        self.col.iter().copied().filter(|&c| c != 0).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.inj.iter().all(|a| a.iter().enumerate().all(|(k, &v)| v as usize == k))
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inj.is_empty() {
            return write!(f, "{}->{}", self.source, self.target);
        }
        let maps: Vec<String> = self
            .inj
            .iter()
            .map(|a| a.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}->{} inj=({})", self.source, self.target, maps.join(";"))?;
        if !self.col.is_empty() {
            let cs: Vec<String> = self.coloring().iter().map(|c| c.to_string()).collect();
            write!(f, " col=({})", cs.join(","))?;
        }
        Ok(())
    }
}

fn compositions(total: usize, parts: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if parts == 1 {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in 0..=total {
        cur.push(first);
        compositions(total - first, parts - 1, out, cur);
        cur.pop();
    }
}

pub fn objects_of_rank(spec: &CategorySpec, r: usize) -> Vec<ObjectId> {
    let mut out = Vec::new();
    compositions(r, spec.coords(), &mut out, &mut Vec::new());
    out.into_iter().map(ObjectId).collect()
}

/// All objects of rank at most `n`, sorted by rank and then lexicographically.
pub fn objects_up_to(spec: &CategorySpec, n: usize) -> Vec<ObjectId> {
    (0..=n).flat_map(|r| objects_of_rank(spec, r)).collect()
}

/// Injections `[m] -> [n]` in lexicographic order; increasing ones only if
/// `ordered`.
pub fn injections(m: usize, n: usize, ordered: bool) -> Vec<Vec<u8>> {
    fn rec(m: usize, n: usize, ordered: bool, cur: &mut Vec<u8>, used: &mut Vec<bool>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        let start = if ordered { cur.last().map_or(0, |&v| v as usize + 1) } else { 0 };
        for v in start..n {
            if used[v] {
                continue;
            }
            used[v] = true;
            cur.push(v as u8);
            rec(m, n, ordered, cur, used, out);
            cur.pop();
            used[v] = false;
        }
    }
    let mut out = Vec::new();
    if m <= n {
        rec(m, n, ordered, &mut Vec::new(), &mut vec![false; n], &mut out);
    }
    out
}

fn colorings_of(inj: &[u8], n: usize, d: usize) -> Vec<Vec<u8>> {
    let mut in_image = vec![false; n];
    for &v in inj {
        in_image[v as usize] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&z| !in_image[z]).collect();
    let mut out = Vec::new();
    let mut cur = vec![0u8; n];
    fn rec(free: &[usize], i: usize, d: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == free.len() {
            out.push(cur.clone());
            return;
        }
        for c in 1..=d {
            cur[free[i]] = c as u8;
            rec(free, i + 1, d, cur, out);
        }
    }
    rec(&free, 0, d, &mut cur, &mut out);
    out
}

/// The hom-set `C(x, y)` in canonical (lexicographic) order.
pub fn hom(spec: &CategorySpec, x: &ObjectId, y: &ObjectId) -> Vec<Morphism> {
    if !x.leq(y) {
        return Vec::new();
    }
    let mk = |inj: Vec<Vec<u8>>, col: Vec<u8>| Morphism { source: x.clone(), target: y.clone(), inj, col };
    match spec.family {
        Family::Nd => vec![mk(Vec::new(), Vec::new())],
        Family::FI | Family::OI => {
            injections(x.0[0], y.0[0], spec.ordered()).into_iter().map(|a| mk(vec![a], Vec::new())).collect()
        }
        Family::FId | Family::OId => {
            let mut out = Vec::new();
            for a in injections(x.0[0], y.0[0], spec.ordered()) {
                for c in colorings_of(&a, y.0[0], spec.d) {
                    out.push(mk(vec![a.clone()], c));
                }
            }
            out
        }
        Family::FIpowd | Family::OIpowd => {
            let per: Vec<Vec<Vec<u8>>> =
                (0..spec.d).map(|c| injections(x.0[c], y.0[c], spec.ordered())).collect();
            let mut out = Vec::new();
            let mut cur: Vec<Vec<u8>> = Vec::new();
            fn rec(per: &[Vec<Vec<u8>>], cur: &mut Vec<Vec<u8>>, out: &mut Vec<Vec<Vec<u8>>>) {
                if cur.len() == per.len() {
                    out.push(cur.clone());
                    return;
                }
                for a in &per[cur.len()] {
                    cur.push(a.clone());
                    rec(per, cur, out);
                    cur.pop();
                }
            }
            let mut tuples = Vec::new();
            rec(&per, &mut cur, &mut tuples);
            for t in tuples {
                out.push(mk(t, Vec::new()));
            }
            out
        }
    }
}

fn falling(n: usize, m: usize) -> u128 {
    (0..m).map(|i| (n - i) as u128).product()
}

fn binom(n: usize, m: usize) -> u128 {
    falling(n, m) / falling(m, m)
}

/// `|C(x, y)|` by closed formula.
pub fn hom_count(spec: &CategorySpec, x: &ObjectId, y: &ObjectId) -> u128 {
    if !x.leq(y) {
        return 0;
    }
    let d = spec.d as u128;
    match spec.family {
        Family::Nd => 1,
        Family::FI => falling(y.0[0], x.0[0]),
        Family::OI => binom(y.0[0], x.0[0]),
        Family::FId => falling(y.0[0], x.0[0]) * d.pow((y.0[0] - x.0[0]) as u32),
        Family::OId => binom(y.0[0], x.0[0]) * d.pow((y.0[0] - x.0[0]) as u32),
        Family::FIpowd => (0..spec.d).map(|c| falling(y.0[c], x.0[c])).product(),
        Family::OIpowd => (0..spec.d).map(|c| binom(y.0[c], x.0[c])).product(),
    }
}

/// `|C(x, x)|`.
pub fn aut_order(spec: &CategorySpec, x: &ObjectId) -> u128 {
    hom_count(spec, x, x)
}

pub fn identity(spec: &CategorySpec, x: &ObjectId) -> Morphism {
    let inj = match spec.family {
        Family::Nd => Vec::new(),
        _ => x.0.iter().map(|&n| (0..n as u8).collect()).collect(),
    };
    let col = if spec.colored() { vec![0; x.0[0]] } else { Vec::new() };
    Morphism { source: x.clone(), target: x.clone(), inj, col }
}

pub fn validate(spec: &CategorySpec, m: &Morphism) -> Result<(), CategoryError> {
    let bad = |s: String| Err(CategoryError::Morphism(s));
    if m.source.0.len() != spec.coords() || m.target.0.len() != spec.coords() {
        return bad(format!("{} has the wrong number of coordinates", m));
    }
    if !m.source.leq(&m.target) {
        return bad(format!("{} does not go upward", m));
    }
    if spec.family == Family::Nd {
        if !m.inj.is_empty() || !m.col.is_empty() {
            return bad("N^d morphisms carry no data".into());
        }
        return Ok(());
    }
    if m.inj.len() != spec.coords() {
        return bad(format!("{} needs {} injections", m, spec.coords()));
    }
    for (c, a) in m.inj.iter().enumerate() {
        let (s, t) = (m.source.0[c], m.target.0[c]);
        if a.len() != s {
            return bad(format!("injection {:?} should have length {}", a, s));
        }
        let mut seen = vec![false; t];
        for &v in a {
            if v as usize >= t || seen[v as usize] {
                return bad(format!("{:?} is not an injection into [{}]", a, t));
            }
            seen[v as usize] = true;
        }
        if spec.ordered() && a.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("{:?} is not order-preserving", a));
        }
    }
    if spec.colored() {
        let t = m.target.0[0];
        if m.col.len() != t {
            return bad("coloring must cover the target".into());
        }
        let mut in_image = vec![false; t];
        for &v in &m.inj[0] {
            in_image[v as usize] = true;
        }
        for z in 0..t {
            let c = m.col[z] as usize;
            if in_image[z] != (c == 0) || c > spec.d {
                return bad(format!("coloring {:?} does not match the complement of the image", m.col));
            }
        }
    } else if !m.col.is_empty() {
        return bad("only FI_d and OI_d morphisms carry colorings".into());
    }
    Ok(())
}

/// `g ∘ f`. Colorings follow: the composite colors `z = g(y)` by `f`'s color
/// of `y`, and every other point by `g`'s color.
pub fn compose(spec: &CategorySpec, g: &Morphism, f: &Morphism) -> Result<Morphism, CategoryError> {
    if f.target != g.source {
        return Err(CategoryError::Composition(f.target.to_string(), g.source.to_string()));
    }
    let inj: Vec<Vec<u8>> = g
        .inj
        .iter()
        .zip(&f.inj)
        .map(|(gc, fc)| fc.iter().map(|&k| gc[k as usize]).collect())
        .collect();
    let col = if spec.colored() {
        let mut z = g.col.clone();
        for (y, &gy) in g.inj[0].iter().enumerate() {
            z[gy as usize] = f.col[y];
        }
        z
    } else {
        Vec::new()
    };
    Ok(Morphism { source: f.source.clone(), target: g.target.clone(), inj, col })
}

fn check_coord(spec: &CategorySpec, i: usize) -> Result<(), CategoryError> {
    if i >= spec.shift_count() {
        Err(CategoryError::Coordinate(i, spec.name()))
    } else {
        Ok(())
    }
}

/// The object `ι_i(x)`.
pub fn self_embed_object(spec: &CategorySpec, i: usize, x: &ObjectId) -> Result<ObjectId, CategoryError> {
    check_coord(spec, i)?;
    Ok(x.bumped(i))
}

/// `ι_i(m)`: prepend a fixed point in coordinate `i` (shift coordinate `i`
/// for `Nd`).
pub fn self_embed(spec: &CategorySpec, i: usize, m: &Morphism) -> Result<Morphism, CategoryError> {
    check_coord(spec, i)?;
    let mut inj = m.inj.clone();
    if spec.family != Family::Nd {
        let a = &m.inj[i];
        inj[i] = std::iter::once(0).chain(a.iter().map(|v| v + 1)).collect();
    }
    let col = if spec.colored() { std::iter::once(0).chain(m.col.iter().copied()).collect() } else { Vec::new() };
    Ok(Morphism { source: m.source.bumped(i), target: m.target.bumped(i), inj, col })
}

/// The structure maps `x -> ι(x)` realizing θ: for `FId`/`OId` the pairs
/// (shift, color ℓ on the new point), one per color; for the other families
/// one map per coordinate whose image misses the new first point.
pub fn theta_morphisms(spec: &CategorySpec, x: &ObjectId) -> Vec<Morphism> {
    let shift = |n: usize| -> Vec<u8> { (1..=n as u8).collect() };
    match spec.family {
        Family::Nd => (0..spec.d)
            .map(|i| Morphism { source: x.clone(), target: x.bumped(i), inj: Vec::new(), col: Vec::new() })
            .collect(),
        Family::FI | Family::OI => {
            vec![Morphism { source: x.clone(), target: x.bumped(0), inj: vec![shift(x.0[0])], col: Vec::new() }]
        }
        Family::FId | Family::OId => (1..=spec.d)
            .map(|l| {
                let mut col = vec![0u8; x.0[0] + 1];
                col[0] = l as u8;
                Morphism { source: x.clone(), target: x.bumped(0), inj: vec![shift(x.0[0])], col }
            })
            .collect(),
        Family::FIpowd | Family::OIpowd => (0..spec.d)
            .map(|i| {
                let inj = (0..spec.d).map(|c| if c == i { shift(x.0[c]) } else { (0..x.0[c] as u8).collect() }).collect();
                Morphism { source: x.clone(), target: x.bumped(i), inj, col: Vec::new() }
            })
            .collect(),
    }
}

/// A generating morphism out of an object: a rank-raising cover or an
/// automorphism (adjacent transposition).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    Cover(usize),
    Aut(usize),
}

pub fn cover_count(spec: &CategorySpec, x: &ObjectId) -> usize {
    match spec.family {
        Family::Nd | Family::FIpowd => spec.d,
        Family::FI => 1,
        Family::FId => spec.d,
        Family::OI => x.0[0] + 1,
        Family::OId => (x.0[0] + 1) * spec.d,
        Family::OIpowd => x.0.iter().map(|n| n + 1).sum(),
    }
}

pub fn aut_count(spec: &CategorySpec, x: &ObjectId) -> usize {
    match spec.family {
        Family::FI | Family::FId | Family::FIpowd => x.0.iter().map(|&n| n.saturating_sub(1)).sum(),
        _ => 0,
    }
}

/// All generators out of `x`: covers first, then automorphisms.
pub fn generators_from(spec: &CategorySpec, x: &ObjectId, with_covers: bool) -> Vec<Gen> {
    let mut out = Vec::new();
    if with_covers {
        out.extend((0..cover_count(spec, x)).map(Gen::Cover));
    }
    out.extend((0..aut_count(spec, x)).map(Gen::Aut));
    out
}

fn coface(n: usize, j: usize) -> Vec<u8> {
    (0..n).map(|k| if k < j { k as u8 } else { k as u8 + 1 }).collect()
}

fn transposition(n: usize, k: usize) -> Vec<u8> {
    let mut a: Vec<u8> = (0..n as u8).collect();
    a.swap(k, k + 1);
    a
}

/// Splits a flat index over coordinates with sizes `sizes`.
fn split_index(sizes: impl Iterator<Item = usize>, mut idx: usize) -> (usize, usize) {
    for (c, s) in sizes.enumerate() {
        if idx < s {
            return (c, idx);
        }
        idx -= s;
    }
    panic!("generator index out of range")
}

pub fn generator(spec: &CategorySpec, x: &ObjectId, g: Gen) -> Morphism {
    let idm = identity(spec, x);
    match g {
        Gen::Cover(c) => {
            assert!(c < cover_count(spec, x), "cover index out of range");
            match spec.family {
                Family::Nd => Morphism { source: x.clone(), target: x.bumped(c), inj: Vec::new(), col: Vec::new() },
                Family::FI | Family::FId => {
                    let n = x.0[0];
                    let col = if spec.colored() {
                        let mut col = vec![0u8; n + 1];
                        col[n] = c as u8 + 1;
                        col
                    } else {
                        Vec::new()
                    };
                    Morphism { source: x.clone(), target: x.bumped(0), inj: vec![(0..n as u8).collect()], col }
                }
                Family::OI => {
                    Morphism { source: x.clone(), target: x.bumped(0), inj: vec![coface(x.0[0], c)], col: Vec::new() }
                }
                Family::OId => {
                    let (j, l) = (c / spec.d, c % spec.d);
                    let mut col = vec![0u8; x.0[0] + 1];
                    col[j] = l as u8 + 1;
                    Morphism { source: x.clone(), target: x.bumped(0), inj: vec![coface(x.0[0], j)], col }
                }
                Family::FIpowd => {
                    let mut inj = idm.inj;
                    inj[c] = (0..x.0[c] as u8).collect();
                    Morphism { source: x.clone(), target: x.bumped(c), inj, col: Vec::new() }
                }
                Family::OIpowd => {
                    let (i, j) = split_index(x.0.iter().map(|n| n + 1), c);
                    let mut inj = idm.inj;
                    inj[i] = coface(x.0[i], j);
                    Morphism { source: x.clone(), target: x.bumped(i), inj, col: Vec::new() }
                }
            }
        }
        Gen::Aut(a) => {
            assert!(a < aut_count(spec, x), "automorphism index out of range");
            let (i, k) = split_index(x.0.iter().map(|n| n.saturating_sub(1)), a);
            let mut inj = idm.inj;
            inj[i] = transposition(x.0[i], k);
            Morphism { source: x.clone(), target: x.clone(), inj, col: idm.col }
        }
    }
}

/// Target of a generator without building it.
pub fn generator_target(spec: &CategorySpec, x: &ObjectId, g: Gen) -> ObjectId {
    match g {
        Gen::Aut(_) => x.clone(),
        Gen::Cover(c) => match spec.family {
            Family::Nd | Family::FIpowd => x.bumped(c),
            Family::OIpowd => x.bumped(split_index(x.0.iter().map(|n| n + 1), c).0),
            _ => x.bumped(0),
        },
    }
}

/// All `(source, cover index)` whose cover lands in `y`.
pub fn covers_into(spec: &CategorySpec, y: &ObjectId) -> Vec<(ObjectId, usize)> {
    let r = y.rank();
    if r == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for x in objects_of_rank(spec, r - 1) {
        if !x.leq(y) {
            continue;
        }
        for c in 0..cover_count(spec, &x) {
            if &generator_target(spec, &x, Gen::Cover(c)) == y {
                out.push((x.clone(), c));
            }
        }
    }
    out
}

enum Step {
    /// From size `n`: coface at position `j` (append when `j == n`) with a color.
    Insert { j: usize, color: usize },
    /// Swap `k` and `k+1`.
    Swap(usize),
}

/// Word for a single-coordinate map `a: [m] -> [n]` with full coloring `col`.
fn single_word(ordered: bool, a: &[u8], col: &[u8], n: usize) -> Vec<Step> {
    let m = a.len();
    let mut in_image = vec![false; n];
    for &v in a {
        in_image[v as usize] = true;
    }
    let comp: Vec<usize> = (0..n).filter(|&z| !in_image[z]).collect();
    let color = |z: usize| if col.is_empty() { 0 } else { col[z] as usize };
    let mut out = Vec::new();
    if ordered {
        for &c in &comp {
            out.push(Step::Insert { j: c, color: color(c) });
        }
        return out;
    }
    let mut sigma: Vec<usize> = a.iter().map(|&v| v as usize).collect();
    sigma.extend(comp.iter().copied());
    for t in 0..n - m {
        out.push(Step::Insert { j: m + t, color: color(comp[t]) });
    }
    // sigma ∘ s_{i1} ∘ ... ∘ s_{ir} = id, so sigma = s_{ir} ∘ ... ∘ s_{i1}.
    let mut arr = sigma;
    loop {
        let mut swapped = false;
        for i in 0..n.saturating_sub(1) {
            if arr[i] > arr[i + 1] {
                arr.swap(i, i + 1);
                out.push(Step::Swap(i));
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    out
}

/// Writes `m` as a word in generators: `m = g_r ∘ ... ∘ g_1` where the
/// returned list is `[(source of g_1, g_1), ..., (source of g_r, g_r)]`.
pub fn factor(spec: &CategorySpec, m: &Morphism) -> Vec<(ObjectId, Gen)> {
    let mut out = Vec::new();
    let mut cur = m.source.clone();
    if spec.family == Family::Nd {
        for i in 0..spec.d {
            for _ in m.source.0[i]..m.target.0[i] {
                out.push((cur.clone(), Gen::Cover(i)));
                cur = cur.bumped(i);
            }
        }
        return out;
    }
    for c in 0..spec.coords() {
        let col: &[u8] = if spec.colored() { &m.col } else { &[] };
        for step in single_word(spec.ordered(), &m.inj[c], col, m.target.0[c]) {
            let g = match step {
                Step::Insert { j, color } => match spec.family {
                    Family::FI => Gen::Cover(0),
                    Family::FId => Gen::Cover(color - 1),
                    Family::OI => Gen::Cover(j),
                    Family::OId => Gen::Cover(j * spec.d + color - 1),
                    Family::FIpowd => Gen::Cover(c),
                    Family::OIpowd => Gen::Cover(cur.0[..c].iter().map(|n| n + 1).sum::<usize>() + j),
                    Family::Nd => unreachable!(),
                },
                Step::Swap(k) => Gen::Aut(cur.0[..c].iter().map(|n| n.saturating_sub(1)).sum::<usize>() + k),
            };
            let next = generator_target(spec, &cur, g);
            out.push((cur, g));
            cur = next;
        }
    }
    out
}

/// Canonical right coset representative: `m = rep ∘ h` with `h` an
/// automorphism of the source and `rep` least in its orbit.
pub fn coset_rep(spec: &CategorySpec, m: &Morphism) -> (Morphism, Morphism) {
    let mut rep = m.clone();
    let mut h = identity(spec, &m.source);
    if matches!(spec.family, Family::FI | Family::FId | Family::FIpowd) {
        for (c, a) in m.inj.iter().enumerate() {
            let mut sorted = a.clone();
            sorted.sort_unstable();
            h.inj[c] = a.iter().map(|v| sorted.binary_search(v).unwrap() as u8).collect();
            rep.inj[c] = sorted;
        }
    }
    (rep, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fid(d: usize) -> CategorySpec {
        CategorySpec::new(Family::FId, d).unwrap()
    }

    #[test]
    fn object_enumeration() {
        let nd = CategorySpec::new(Family::Nd, 2).unwrap();
        let objs: Vec<Vec<usize>> = objects_up_to(&nd, 1).into_iter().map(|o| o.0).collect();
        assert_eq!(objs, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(objects_up_to(&CategorySpec::fi(), 3).len(), 4);
        let fp = CategorySpec::new(Family::FIpowd, 2).unwrap();
        let objs: Vec<Vec<usize>> = objects_up_to(&fp, 2).into_iter().map(|o| o.0).collect();
        assert_eq!(objs, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn hom_examples() {
        let fi = CategorySpec::fi();
        assert_eq!(hom(&fi, &ObjectId(vec![2]), &ObjectId(vec![3])).len(), 6);
        assert_eq!(hom(&fid(2), &ObjectId(vec![1]), &ObjectId(vec![2])).len(), 4);
        let nd = CategorySpec::new(Family::Nd, 2).unwrap();
        assert!(hom(&nd, &ObjectId(vec![1, 0]), &ObjectId(vec![0, 1])).is_empty());
    }

    #[test]
    fn fid_composition_rule() {
        let spec = fid(2);
        // g = (incl_{1->2}, ε(2)=1), f = (incl_{0->1}, δ(1)=2)
        let g = Morphism { source: ObjectId(vec![1]), target: ObjectId(vec![2]), inj: vec![vec![0]], col: vec![0, 1] };
        let f = Morphism { source: ObjectId(vec![0]), target: ObjectId(vec![1]), inj: vec![vec![]], col: vec![2] };
        let h = compose(&spec, &g, &f).unwrap();
        assert_eq!(h.inj, vec![Vec::<u8>::new()]);
        assert_eq!(h.col, vec![2, 1]);
        assert!(compose(&spec, &f, &g).is_err());
    }

    #[test]
    fn fi_inclusions_compose() {
        let fi = CategorySpec::fi();
        let i23 = generator(&fi, &ObjectId(vec![2]), Gen::Cover(0));
        let i12 = generator(&fi, &ObjectId(vec![1]), Gen::Cover(0));
        let h = compose(&fi, &i23, &i12).unwrap();
        assert_eq!(h.inj, vec![vec![0]]);
        assert_eq!(h.target, ObjectId(vec![3]));
    }

    #[test]
    fn theta_examples() {
        let t = theta_morphisms(&fid(2), &ObjectId(vec![1]));
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|m| m.target == ObjectId(vec![2])));
        assert_eq!(t[0].coloring(), vec![1]);
        assert_eq!(t[1].coloring(), vec![2]);
        let nd = CategorySpec::new(Family::Nd, 2).unwrap();
        let t = theta_morphisms(&nd, &ObjectId(vec![1, 1]));
        assert_eq!(t[0].target, ObjectId(vec![2, 1]));
        assert_eq!(t[1].target, ObjectId(vec![1, 2]));
        let t = theta_morphisms(&CategorySpec::fi(), &ObjectId(vec![0]));
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].target, ObjectId(vec![1]));
    }

    #[test]
    fn self_embed_examples() {
        let spec = fid(2);
        let f = Morphism { source: ObjectId(vec![1]), target: ObjectId(vec![2]), inj: vec![vec![0]], col: vec![0, 1] };
        let e = self_embed(&spec, 0, &f).unwrap();
        assert_eq!(e.inj, vec![vec![0, 1]]);
        assert_eq!(e.col, vec![0, 0, 1]);
        assert!(self_embed(&spec, 1, &f).is_err());
        let nd = CategorySpec::new(Family::Nd, 2).unwrap();
        let a = hom(&nd, &ObjectId(vec![0, 0]), &ObjectId(vec![1, 0])).pop().unwrap();
        let b = self_embed(&nd, 0, &a).unwrap();
        assert_eq!((b.source.0.clone(), b.target.0.clone()), (vec![1, 0], vec![2, 0]));
        let fi = CategorySpec::fi();
        let id3 = identity(&fi, &ObjectId(vec![3]));
        assert_eq!(self_embed(&fi, 0, &id3).unwrap(), identity(&fi, &ObjectId(vec![4])));
    }

    #[test]
    fn coset_rep_splits() {
        let spec = fid(2);
        for m in hom(&spec, &ObjectId(vec![2]), &ObjectId(vec![3])) {
            let (rep, h) = coset_rep(&spec, &m);
            assert_eq!(compose(&spec, &rep, &h).unwrap(), m);
            assert!(rep.inj[0].windows(2).all(|w| w[0] < w[1]));
        }
    }
}
