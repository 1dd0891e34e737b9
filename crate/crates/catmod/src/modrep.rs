//! Truncated modules: a finite-dimensional space on every object of rank at
//! most the window, and the action of every morphism between them.
//!
//! Actions are recorded on the generating morphisms of the category (covers
//! and adjacent transpositions, see [`crate::category::factor`]); the action of
//! an arbitrary morphism is the product along its factorization.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::category::*;
use crate::exactla::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModError {
    #[error("generator at {0} lies above the window {1}")]
    GeneratorRank(String, usize),
    #[error("relation {0}: {1}")]
    Relation(usize, String),
    #[error("modules do not share category, field and window")]
    Mismatch,
    #[error("invalid group representation: {0}")]
    Representation(String),
    #[error("{0}")]
    Invalid(String),
}

/// Objects and generating morphisms of a category up to a rank window.
#[derive(Debug)]
pub struct Frame {
    pub spec: CategorySpec,
    pub window: usize,
    pub objects: Vec<ObjectId>,
    index: HashMap<ObjectId, usize>,
    /// Generators out of each object; covers only below the window.
    pub gens: Vec<Vec<Gen>>,
    /// Target object index of each generator.
    pub gen_targets: Vec<Vec<usize>>,
    /// `(source index, generator position)` of every cover landing in each object.
    pub covers_into: Vec<Vec<(usize, usize)>>,
}

impl Frame {
    pub fn new(spec: CategorySpec, window: usize) -> Arc<Frame> {
        let objects = objects_up_to(&spec, window);
        let index: HashMap<ObjectId, usize> = objects.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        let gens: Vec<Vec<Gen>> = objects.iter().map(|x| generators_from(&spec, x, x.rank() < window)).collect();
        let gen_targets = objects
            .iter()
            .zip(&gens)
            .map(|(x, gs)| gs.iter().map(|&g| index[&generator_target(&spec, x, g)]).collect())
            .collect();
        let mut frame = Frame { spec, window, objects, index, gens, gen_targets, covers_into: Vec::new() };
        frame.covers_into = frame
            .objects
            .iter()
            .map(|y| {
                covers_into(&spec, y).into_iter().map(|(x, c)| {
                    let xi = frame.index[&x];
                    (xi, frame.gen_pos(xi, Gen::Cover(c)))
                })
                .collect()
            })
            .collect();
        Arc::new(frame)
    }

    pub fn index_of(&self, x: &ObjectId) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn gen_pos(&self, xi: usize, g: Gen) -> usize {
        match g {
            Gen::Cover(c) => {
                assert!(self.objects[xi].rank() < self.window, "no covers out of the top rank");
                c
            }
            Gen::Aut(a) => {
                let covers = if self.objects[xi].rank() < self.window { cover_count(&self.spec, &self.objects[xi]) } else { 0 };
                covers + a
            }
        }
    }

    /// Position of every aut generator of object `xi` in its generator list.
    pub fn aut_positions(&self, xi: usize) -> Vec<usize> {
        (0..aut_count(&self.spec, &self.objects[xi])).map(|a| self.gen_pos(xi, Gen::Aut(a))).collect()
    }
}

/// Global information known about a module beyond its window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bounds {
    /// All generators lie in rank at most this.
    pub generators: Option<usize>,
    /// The module of relations among those generators is generated in rank at most this.
    pub relations: Option<usize>,
}

#[derive(Clone)]
pub struct TruncatedModule<K: Field> {
    frame: Arc<Frame>,
    field: K,
    dims: Vec<usize>,
    /// `actions[x][p]` is the action of the `p`-th generator out of `x`.
    actions: Vec<Vec<SparseMatrix<K>>>,
    bounds: Bounds,
}

impl<K: Field> std::fmt::Debug for TruncatedModule<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruncatedModule({} over {}, window {}, dims {:?})", self.spec(), self.field.spec(), self.window(), self.dims)
    }
}

/// A natural transformation between two modules on the same frame, stored
/// as its components; source and target are passed alongside.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMap<K: Field> {
    pub components: Vec<Matrix<K>>,
}

/// An element of a module: an object and a coordinate vector.
pub type Element<K> = (ObjectId, Vec<<K as Field>::E>);

impl<K: Field> TruncatedModule<K> {
    pub fn from_parts(frame: Arc<Frame>, field: K, dims: Vec<usize>, actions: Vec<Vec<SparseMatrix<K>>>) -> Self {
        debug_assert_eq!(dims.len(), frame.objects.len());
        TruncatedModule { frame, field, dims, actions, bounds: Bounds::default() }
    }

    pub fn zero(spec: CategorySpec, field: &K, window: usize) -> Self {
        Self::zero_on(Frame::new(spec, window), field)
    }

    pub fn zero_on(frame: Arc<Frame>, field: &K) -> Self {
        let actions = frame.gens.iter().map(|gs| gs.iter().map(|_| SparseMatrix::zeros(field, 0, 0)).collect()).collect();
        let dims = vec![0; frame.objects.len()];
        TruncatedModule { frame, field: field.clone(), dims, actions, bounds: Bounds::default() }
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }
    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }
    pub fn spec(&self) -> &CategorySpec {
        &self.frame.spec
    }
    pub fn field(&self) -> &K {
        &self.field
    }
    pub fn window(&self) -> usize {
        self.frame.window
    }
    pub fn objects(&self) -> &[ObjectId] {
        &self.frame.objects
    }
    pub fn index_of(&self, x: &ObjectId) -> Option<usize> {
        self.frame.index_of(x)
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn dim_at(&self, xi: usize) -> usize {
        self.dims[xi]
    }
    /// Dimension at `x`, zero outside the window.
    pub fn dim(&self, x: &ObjectId) -> usize {
        self.index_of(x).map_or(0, |i| self.dims[i])
    }
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }
    pub fn same_frame(&self, other: &Self) -> bool {
        self.spec() == other.spec() && self.window() == other.window() && self.field.spec() == other.field.spec()
    }

    pub fn gen_action(&self, xi: usize, g: Gen) -> &SparseMatrix<K> {
        &self.actions[xi][self.frame.gen_pos(xi, g)]
    }
    pub fn action_at(&self, xi: usize, pos: usize) -> &SparseMatrix<K> {
        &self.actions[xi][pos]
    }

    /// Applies a word from [`factor`] to a vector.
    pub fn apply_word(&self, word: &[(ObjectId, Gen)], v: Vec<K::E>) -> Vec<K::E> {
        let mut v = v;
        for (x, g) in word {
            let xi = self.index_of(x).expect("word leaves the window");
            v = self.gen_action(xi, *g).apply(&v);
        }
        v
    }

    pub fn act_vec(&self, m: &Morphism, v: &[K::E]) -> Vec<K::E> {
        self.apply_word(&factor(self.spec(), m), v.to_vec())
    }

    /// Applies `m` to every row of `rows`.
    pub fn act_rows(&self, m: &Morphism, rows: &Matrix<K>) -> Matrix<K> {
        let mut r = rows.clone();
        for (x, g) in factor(self.spec(), m) {
            let xi = self.index_of(&x).expect("word leaves the window");
            r = self.gen_action(xi, g).apply_rows(&r);
        }
        r
    }

    /// The action matrix of `m` (rows index the target basis).
    pub fn act(&self, m: &Morphism) -> Matrix<K> {
        let n = self.dim(&m.source);
        self.act_rows(m, &Matrix::identity(&self.field, n)).transpose()
    }

    pub fn act_sparse(&self, m: &Morphism) -> SparseMatrix<K> {
        let mut acc = SparseMatrix::identity(&self.field, self.dim(&m.source));
        for (x, g) in factor(self.spec(), m) {
            let xi = self.index_of(&x).expect("word leaves the window");
            acc = self.gen_action(xi, g).compose(&acc);
        }
        acc
    }

    /// Checks `act(g∘f) = act(g) act(f)` on composable pairs up to `max_rank`,
    /// taking at most `per_set` maps from each hom-set.
    pub fn check_functoriality(&self, max_rank: usize, per_set: usize) -> Result<(), String> {
        let spec = *self.spec();
        let objs: Vec<ObjectId> = self.objects().iter().filter(|o| o.rank() <= max_rank).cloned().collect();
        let pick = |v: Vec<Morphism>| -> Vec<Morphism> {
            if v.len() <= per_set {
                v
            } else {
                let step = v.len() / per_set;
                v.into_iter().step_by(step.max(1)).take(per_set).collect()
            }
        };
        for x in &objs {
            if !self.act(&identity(&spec, x)).eq(&Matrix::identity(&self.field, self.dim(x))) {
                return Err(format!("identity at {} acts nontrivially", x));
            }
            for y in objs.iter().filter(|y| x.leq(y)) {
                let fs = pick(hom(&spec, x, y));
                for z in objs.iter().filter(|z| y.leq(z)) {
                    let gs = pick(hom(&spec, y, z));
                    for f in &fs {
                        let af = self.act(f);
                        for g in &gs {
                            let gf = compose(&spec, g, f).map_err(|e| e.to_string())?;
                            if self.act(&gf) != self.act(g).mul(&af) {
                                return Err(format!("action of {} after {} is not functorial", g, f));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The representation of the automorphism group of `x` on `V_x`.
    pub fn endo_rep(&self, x: &ObjectId) -> GroupRep<K> {
        let xi = self.index_of(x).expect("object outside the window");
        let generators =
            (0..aut_count(self.spec(), x)).map(|a| self.gen_action(xi, Gen::Aut(a)).to_dense()).collect();
        GroupRep { spec: *self.spec(), field: self.field.clone(), object: x.clone(), dim: self.dims[xi], generators }
    }

    /// The span of the images of all covers landing in `yi`, closed under
    /// automorphisms: the part of `V_y` coming from lower ranks.
    pub fn lower_space(&self, yi: usize) -> Subspace<K> {
        let n = self.dims[yi];
        let mut ech = Echelon::new(&self.field, n);
        'covers: for &(si, pos) in &self.frame.covers_into[yi] {
            let a = &self.actions[si][pos];
            for j in 0..a.cols() {
                if ech.is_full() {
                    break 'covers;
                }
                let mut v = vec![self.field.zero(); n];
                for (i, x) in a.column(j) {
                    v[*i as usize] = x.clone();
                }
                ech.insert(v);
            }
        }
        self.close_echelon(yi, ech)
    }

    /// Smallest automorphism-stable subspace containing `sub`.
    pub fn close_under_auts(&self, xi: usize, sub: Subspace<K>) -> Subspace<K> {
        self.close_echelon(xi, Echelon::from_subspace(&sub))
    }

    fn close_echelon(&self, xi: usize, mut ech: Echelon<K>) -> Subspace<K> {
        let auts = self.frame.aut_positions(xi);
        if !auts.is_empty() {
            // images of a spanning set under the generators suffice
            let mut queue: Vec<Vec<K::E>> = ech.clone().into_rows();
            while let Some(w) = queue.pop() {
                if ech.is_full() {
                    break;
                }
                for &p in &auts {
                    if let Some(row) = ech.insert(self.actions[xi][p].apply(&w)) {
                        queue.push(row.to_vec());
                    }
                }
            }
        }
        ech.into_subspace()
    }

    /// Checks that `subs` is closed under every generator.
    pub fn is_submodule(&self, subs: &[Subspace<K>]) -> bool {
        for (xi, gs) in self.frame.gens.iter().enumerate() {
            for p in 0..gs.len() {
                let yi = self.frame.gen_targets[xi][p];
                let img = self.actions[xi][p].apply_rows(subs[xi].basis());
                if !(0..img.rows()).all(|r| subs[yi].contains(img.row(r))) {
                    return false;
                }
            }
        }
        true
    }
}

impl<K: Field> ModuleMap<K> {
    pub fn zero(source: &TruncatedModule<K>, target: &TruncatedModule<K>) -> Self {
        let components = source
            .dims
            .iter()
            .zip(&target.dims)
            .map(|(&s, &t)| Matrix::zeros(source.field(), t, s))
            .collect();
        ModuleMap { components }
    }

    pub fn identity(v: &TruncatedModule<K>) -> Self {
        ModuleMap { components: v.dims.iter().map(|&d| Matrix::identity(v.field(), d)).collect() }
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &Self) -> Self {
        ModuleMap { components: self.components.iter().zip(&inner.components).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn is_natural(&self, source: &TruncatedModule<K>, target: &TruncatedModule<K>) -> bool {
        if !source.same_frame(target) || self.components.len() != source.dims.len() {
            return false;
        }
        for (xi, c) in self.components.iter().enumerate() {
            if c.rows() != target.dims[xi] || c.cols() != source.dims[xi] {
                return false;
            }
        }
        let frame = source.frame();
        for (xi, gs) in frame.gens.iter().enumerate() {
            for p in 0..gs.len() {
                let yi = frame.gen_targets[xi][p];
                let lhs = target.actions[xi][p].to_dense().mul(&self.components[xi]);
                let rhs = self.components[yi].mul(&source.actions[xi][p].to_dense());
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.rank()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }
}

/// Builds the submodule with the given (stable) subspaces, and its inclusion.
pub fn submodule_from_subspaces<K: Field>(
    v: &TruncatedModule<K>,
    subs: &[Subspace<K>],
) -> (TruncatedModule<K>, ModuleMap<K>) {
    let frame = v.frame.clone();
    let k = v.field.clone();
    let dims: Vec<usize> = subs.iter().map(|s| s.dim()).collect();
    let mut actions = Vec::with_capacity(dims.len());
    for (xi, gs) in frame.gens.iter().enumerate() {
        let mut acts = Vec::with_capacity(gs.len());
        for p in 0..gs.len() {
            let yi = frame.gen_targets[xi][p];
            let a = &v.actions[xi][p];
            let cols: Vec<Vec<(u32, K::E)>> = (0..subs[xi].dim())
                .map(|r| {
                    let img = a.apply(subs[xi].basis().row(r));
                    subs[yi]
                        .coords_unchecked(&img)
                        .into_iter()
                        .enumerate()
                        .filter(|(_, x)| !k.is_zero(x))
                        .map(|(i, x)| (i as u32, x))
                        .collect()
                })
                .collect();
            acts.push(SparseMatrix::from_columns(&k, dims[yi], cols));
        }
        actions.push(acts);
    }
    let inclusion = ModuleMap { components: subs.iter().map(|s| s.basis().transpose()).collect() };
    (TruncatedModule::from_parts(frame, k, dims, actions), inclusion)
}

/// Subspaces of the submodule generated by `elements`.
pub fn generated_subspaces<K: Field>(v: &TruncatedModule<K>, elements: &[Element<K>]) -> Vec<Subspace<K>> {
    let mut by_obj: Vec<Vec<Vec<K::E>>> = vec![Vec::new(); v.dims.len()];
    for (x, e) in elements {
        let xi = v.index_of(x).expect("element outside the window");
        assert_eq!(e.len(), v.dims[xi], "element has the wrong length");
        by_obj[xi].push(e.clone());
    }
    let mut subs: Vec<Subspace<K>> = Vec::with_capacity(v.dims.len());
    for yi in 0..v.dims.len() {
        let mut rows = std::mem::take(&mut by_obj[yi]);
        for &(si, pos) in &v.frame.covers_into[yi] {
            let img = v.actions[si][pos].apply_rows(subs[si].basis());
            rows.extend(img.row_vecs());
        }
        let sub = Subspace::from_vectors(&v.field, v.dims[yi], rows);
        subs.push(v.close_under_auts(yi, sub));
    }
    subs
}

pub fn submodule_generated<K: Field>(
    v: &TruncatedModule<K>,
    elements: &[Element<K>],
) -> (TruncatedModule<K>, ModuleMap<K>) {
    submodule_from_subspaces(v, &generated_subspaces(v, elements))
}

/// `V / W` for a submodule given by its subspaces, and the projection.
pub fn quotient_module<K: Field>(
    v: &TruncatedModule<K>,
    subs: &[Subspace<K>],
) -> (TruncatedModule<K>, ModuleMap<K>) {
    let frame = v.frame.clone();
    let k = v.field.clone();
    let quots: Vec<Quotient<K>> = subs.iter().map(|s| s.quotient()).collect();
    let dims: Vec<usize> = quots.iter().map(|q| q.dim).collect();
    let mut actions = Vec::with_capacity(dims.len());
    for (xi, gs) in frame.gens.iter().enumerate() {
        let mut acts = Vec::with_capacity(gs.len());
        for p in 0..gs.len() {
            let yi = frame.gen_targets[xi][p];
            let a = &v.actions[xi][p];
            let cols: Vec<Vec<(u32, K::E)>> = quots[xi]
                .complement
                .iter()
                .map(|&c| {
                    let mut img = vec![k.zero(); v.dims[yi]];
                    for (i, x) in a.column(c) {
                        img[*i as usize] = x.clone();
                    }
                    let red = subs[yi].reduce(&img);
                    quots[yi]
                        .complement
                        .iter()
                        .enumerate()
                        .filter(|(_, &cc)| !k.is_zero(&red[cc]))
                        .map(|(t, &cc)| (t as u32, red[cc].clone()))
                        .collect()
                })
                .collect();
            acts.push(SparseMatrix::from_columns(&k, dims[yi], cols));
        }
        actions.push(acts);
    }
    let projection = ModuleMap { components: quots.into_iter().map(|q| q.projection).collect() };
    (TruncatedModule::from_parts(frame, k, dims, actions), projection)
}

/// `V / ⟨elements⟩`, keeping track of presentation bounds.
pub fn quotient_by_elements<K: Field>(
    v: &TruncatedModule<K>,
    elements: &[Element<K>],
) -> (TruncatedModule<K>, ModuleMap<K>) {
    let subs = generated_subspaces(v, elements);
    let (q, p) = quotient_module(v, &subs);
    let top = elements.iter().map(|(x, _)| x.rank()).max();
    let relations = match (v.bounds.relations, top) {
        (Some(r), Some(t)) => Some(r.max(t)),
        (r, None) => r,
        (None, Some(_)) => None,
    };
    let bounds = Bounds { generators: v.bounds.generators, relations };
    (q.with_bounds(bounds), p)
}

pub fn kernel_of<K: Field>(
    source: &TruncatedModule<K>,
    f: &ModuleMap<K>,
) -> (TruncatedModule<K>, ModuleMap<K>) {
    let subs: Vec<Subspace<K>> = f.components.iter().map(|c| c.kernel()).collect();
    submodule_from_subspaces(source, &subs)
}

pub fn image_of<K: Field>(
    f: &ModuleMap<K>,
    target: &TruncatedModule<K>,
) -> (TruncatedModule<K>, ModuleMap<K>) {
    let subs: Vec<Subspace<K>> = f.components.iter().map(|c| c.image()).collect();
    submodule_from_subspaces(target, &subs)
}

pub fn cokernel_of<K: Field>(
    f: &ModuleMap<K>,
    target: &TruncatedModule<K>,
) -> (TruncatedModule<K>, ModuleMap<K>) {
    let subs: Vec<Subspace<K>> = f.components.iter().map(|c| c.image()).collect();
    quotient_module(target, &subs)
}

fn stack_sparse<K: Field>(k: &K, parts: &[&SparseMatrix<K>]) -> SparseMatrix<K> {
    let rows: usize = parts.iter().map(|p| p.rows()).sum();
    let mut cols = Vec::new();
    let mut off = 0u32;
    for p in parts {
        for j in 0..p.cols() {
            cols.push(p.column(j).iter().map(|(i, x)| (i + off, x.clone())).collect());
        }
        off += p.rows() as u32;
    }
    SparseMatrix::from_columns(k, rows, cols)
}

pub fn direct_sum_many<K: Field>(parts: &[&TruncatedModule<K>]) -> Result<TruncatedModule<K>, ModError> {
    let first = parts.first().ok_or_else(|| ModError::Invalid("empty direct sum".into()))?;
    if parts.iter().any(|p| !p.same_frame(first)) {
        return Err(ModError::Mismatch);
    }
    let frame = first.frame.clone();
    let k = first.field.clone();
    let dims: Vec<usize> = (0..first.dims.len()).map(|i| parts.iter().map(|p| p.dims[i]).sum()).collect();
    let actions = frame
        .gens
        .iter()
        .enumerate()
        .map(|(xi, gs)| {
            (0..gs.len()).map(|p| stack_sparse(&k, &parts.iter().map(|m| &m.actions[xi][p]).collect::<Vec<_>>())).collect()
        })
        .collect();
    Ok(TruncatedModule::from_parts(frame, k, dims, actions))
}

pub fn direct_sum<K: Field>(a: &TruncatedModule<K>, b: &TruncatedModule<K>) -> Result<TruncatedModule<K>, ModError> {
    direct_sum_many(&[a, b])
}

/// Block-diagonal sum of maps between direct sums.
pub fn direct_sum_maps<K: Field>(maps: &[&ModuleMap<K>]) -> ModuleMap<K> {
    let n = maps[0].components.len();
    let components = (0..n)
        .map(|i| {
            let mut acc = maps[0].components[i].clone();
            for m in &maps[1..] {
                acc = acc.block_diag(&m.components[i]);
            }
            acc
        })
        .collect();
    ModuleMap { components }
}

/// Basis bookkeeping for a free module: the basis of `M(x_g)_y` is the
/// hom-set `C(x_g, y)` in canonical order.
pub struct FreeBasis {
    objects: Vec<ObjectId>,
    /// For each distinct generator object: hom lists per window object.
    homs: Vec<Vec<Vec<Morphism>>>,
    lookup: Vec<HashMap<Morphism, usize>>,
    /// Distinct-object slot of each generator.
    slot: Vec<usize>,
    /// `offsets[y][g]`: first basis index of generator `g` at object `y`.
    offsets: Vec<Vec<usize>>,
}

impl FreeBasis {
    fn new(frame: &Frame, gens: &[ObjectId]) -> Self {
        let spec = frame.spec;
        let mut objects: Vec<ObjectId> = Vec::new();
        let mut slot = Vec::new();
        for g in gens {
            match objects.iter().position(|o| o == g) {
                Some(i) => slot.push(i),
                None => {
                    objects.push(g.clone());
                    slot.push(objects.len() - 1);
                }
            }
        }
        let homs: Vec<Vec<Vec<Morphism>>> =
            objects.iter().map(|x| frame.objects.iter().map(|y| hom(&spec, x, y)).collect()).collect();
        let lookup = homs
            .iter()
            .map(|per| per.iter().flat_map(|l| l.iter().enumerate().map(|(i, m)| (m.clone(), i))).collect())
            .collect();
        let offsets = (0..frame.objects.len())
            .map(|yi| {
                let mut acc = 0;
                slot.iter()
                    .map(|&s| {
                        let o = acc;
                        acc += homs[s][yi].len();
                        o
                    })
                    .collect()
            })
            .collect();
        FreeBasis { objects, homs, lookup, slot, offsets }
    }

    pub fn index(&self, gen: usize, yi: usize, m: &Morphism) -> Option<usize> {
        self.lookup[self.slot[gen]].get(m).map(|i| self.offsets[yi][gen] + i)
    }

    pub fn basis_at(&self, yi: usize) -> Vec<(usize, &Morphism)> {
        let mut out = Vec::new();
        for (g, &s) in self.slot.iter().enumerate() {
            for m in &self.homs[s][yi] {
                out.push((g, m));
            }
        }
        out
    }

    pub fn generator_object(&self, gen: usize) -> &ObjectId {
        &self.objects[self.slot[gen]]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeModule {
    pub generators: Vec<(ObjectId, String)>,
}

impl FreeModule {
    pub fn on(objects: &[ObjectId]) -> Self {
        FreeModule { generators: objects.iter().enumerate().map(|(i, o)| (o.clone(), format!("g{}", i))).collect() }
    }
}

pub fn realize_free_on<K: Field>(
    frame: &Arc<Frame>,
    field: &K,
    gens: &[ObjectId],
) -> Result<(TruncatedModule<K>, FreeBasis), ModError> {
    for g in gens {
        if g.rank() > frame.window || frame.index_of(g).is_none() {
            return Err(ModError::GeneratorRank(g.to_string(), frame.window));
        }
    }
    let spec = frame.spec;
    let fb = FreeBasis::new(frame, gens);
    let dims: Vec<usize> =
        (0..frame.objects.len()).map(|yi| fb.slot.iter().map(|&s| fb.homs[s][yi].len()).sum()).collect();
    let mut actions = Vec::with_capacity(dims.len());
    for (xi, gs) in frame.gens.iter().enumerate() {
        let x = &frame.objects[xi];
        let mut acts = Vec::with_capacity(gs.len());
        for (p, &g) in gs.iter().enumerate() {
            let yi = frame.gen_targets[xi][p];
            let gm = generator(&spec, x, g);
            let mut cols = Vec::with_capacity(dims[xi]);
            for (gen, &s) in fb.slot.iter().enumerate() {
                for f in &fb.homs[s][xi] {
                    let h = compose(&spec, &gm, f).expect("generator composes");
                    let i = fb.index(gen, yi, &h).expect("composite lies in the hom-set");
                    cols.push(vec![(i as u32, field.one())]);
                }
            }
            acts.push(SparseMatrix::from_columns(field, dims[yi], cols));
        }
        actions.push(acts);
    }
    let top = gens.iter().map(|g| g.rank()).max();
    let m = TruncatedModule::from_parts(frame.clone(), field.clone(), dims, actions)
        .with_bounds(Bounds { generators: top, relations: top.map(|_| 0) });
    Ok((m, fb))
}

/// The free module on the listed generators, truncated to the window.
pub fn realize_free<K: Field>(
    fm: &FreeModule,
    spec: CategorySpec,
    field: &K,
    window: usize,
) -> Result<TruncatedModule<K>, ModError> {
    let gens: Vec<ObjectId> = fm.generators.iter().map(|(o, _)| o.clone()).collect();
    Ok(realize_free_on(&Frame::new(spec, window), field, &gens)?.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub gen: usize,
    pub morphism: Morphism,
    /// Rational coefficient `(numerator, denominator)`.
    pub coeff: (i64, i64),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub spec: CategorySpec,
    pub field: FieldSpec,
    pub generators: Vec<ObjectId>,
    pub labels: Vec<String>,
    pub relations: Vec<Relation>,
}

impl Presentation {
    pub fn new(spec: CategorySpec, field: FieldSpec, generators: Vec<ObjectId>) -> Self {
        let labels = (0..generators.len()).map(|i| format!("g{}", i)).collect();
        Presentation { spec, field, generators, labels, relations: Vec::new() }
    }

    /// The common target of a relation's terms.
    pub fn relation_target(&self, r: usize) -> Result<Option<ObjectId>, ModError> {
        let rel = &self.relations[r];
        let mut target: Option<&ObjectId> = None;
        for t in &rel.terms {
            if t.gen >= self.generators.len() {
                return Err(ModError::Relation(r, format!("unknown generator g{}", t.gen)));
            }
            if t.morphism.source != self.generators[t.gen] {
                return Err(ModError::Relation(
                    r,
                    format!("morphism {} does not start at generator {}", t.morphism, self.generators[t.gen]),
                ));
            }
            validate(&self.spec, &t.morphism).map_err(|e| ModError::Relation(r, e.to_string()))?;
            if t.coeff.1 == 0 {
                return Err(ModError::Relation(r, "zero denominator".into()));
            }
            match target {
                None => target = Some(&t.morphism.target),
                Some(o) if o != &t.morphism.target => {
                    return Err(ModError::Relation(r, format!("mixed targets {} and {}", o, t.morphism.target)))
                }
                _ => {}
            }
        }
        Ok(target.cloned())
    }

    pub fn validate(&self) -> Result<(), ModError> {
        for g in &self.generators {
            if g.0.len() != self.spec.coords() {
                return Err(ModError::Invalid(format!("generator {} has the wrong shape", g)));
            }
        }
        for r in 0..self.relations.len() {
            self.relation_target(r)?;
        }
        Ok(())
    }

    pub fn max_relation_rank(&self) -> Option<usize> {
        (0..self.relations.len()).filter_map(|r| self.relation_target(r).ok().flatten()).map(|o| o.rank()).max()
    }
}

/// The module presented by `p`: the free module on its generators modulo the
/// submodule generated by the relations.
pub fn realize<K: Field>(p: &Presentation, window: usize, field: &K) -> Result<TruncatedModule<K>, ModError> {
    if p.field != field.spec() {
        return Err(ModError::Invalid(format!("presentation is over {}, not {}", p.field, field.spec())));
    }
    p.validate()?;
    let frame = Frame::new(p.spec, window);
    let (free, fb) = realize_free_on(&frame, field, &p.generators)?;
    let mut elements: Vec<Element<K>> = Vec::new();
    for r in 0..p.relations.len() {
        let Some(t) = p.relation_target(r)? else { continue };
        let ti = frame.index_of(&t).ok_or_else(|| ModError::Relation(r, format!("target {} lies above the window", t)))?;
        let mut v = vec![field.zero(); free.dims[ti]];
        for term in &p.relations[r].terms {
            let c = field
                .from_ratio(term.coeff.0, term.coeff.1)
                .ok_or_else(|| ModError::Relation(r, "denominator vanishes in the field".into()))?;
            let i = fb.index(term.gen, ti, &term.morphism).expect("validated morphism");
            v[i] = field.add(&v[i], &c);
        }
        elements.push((t, v));
    }
    let (q, _) = quotient_module(&free, &generated_subspaces(&free, &elements));
    let bounds = Bounds {
        generators: Some(p.generators.iter().map(|g| g.rank()).max().unwrap_or(0)),
        relations: Some(p.max_relation_rank().unwrap_or(0)),
    };
    Ok(q.with_bounds(bounds))
}

/// The free module on `gens` (with images `gens[i].1` in `v`) and the map to `v`.
pub fn free_cover_map<K: Field>(
    v: &TruncatedModule<K>,
    gens: &[Element<K>],
) -> Result<(TruncatedModule<K>, FreeBasis, ModuleMap<K>), ModError> {
    let objs: Vec<ObjectId> = gens.iter().map(|(o, _)| o.clone()).collect();
    let (p, fb) = realize_free_on(v.frame(), v.field(), &objs)?;
    let k = v.field();
    let components = (0..v.dims.len())
        .map(|yi| {
            let cols: Vec<Vec<K::E>> =
                fb.basis_at(yi).into_iter().map(|(g, m)| v.act_vec(m, &gens[g].1)).collect();
            Matrix::from_rows(k, v.dims[yi], cols).transpose()
        })
        .collect();
    Ok((p, fb, ModuleMap { components }))
}

/// H_0: at each object, `V_x` modulo everything coming from lower ranks.
#[derive(Clone, Debug)]
pub struct H0<K: Field> {
    pub dims: Vec<usize>,
    pub lower: Vec<Subspace<K>>,
    /// Projections `V_x -> H_0(V)_x`.
    pub projections: Vec<Matrix<K>>,
}

pub fn h0<K: Field>(v: &TruncatedModule<K>) -> H0<K> {
    let lower: Vec<Subspace<K>> = (0..v.dims.len()).map(|i| v.lower_space(i)).collect();
    let quots: Vec<Quotient<K>> = lower.iter().map(|s| s.quotient()).collect();
    H0 { dims: quots.iter().map(|q| q.dim).collect(), lower, projections: quots.into_iter().map(|q| q.projection).collect() }
}

/// A degree-type invariant: its value and whether the window may hide more.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowValue {
    pub value: i64,
    pub window_limited: bool,
}

fn top_rank(objs: &[ObjectId], dims: &[usize]) -> i64 {
    objs.iter().zip(dims).filter(|(_, &d)| d > 0).map(|(o, _)| o.rank() as i64).max().unwrap_or(-1)
}

pub fn gd<K: Field>(v: &TruncatedModule<K>) -> WindowValue {
    let h = h0(v);
    let value = top_rank(v.objects(), &h.dims);
    let exact = v.bounds.generators.is_some_and(|g| g <= v.window());
    WindowValue { value, window_limited: value == v.window() as i64 && !exact }
}

/// `deg V`: top rank with a nonzero value, `-1` for the zero module.
pub fn degree<K: Field>(v: &TruncatedModule<K>) -> WindowValue {
    let value = top_rank(v.objects(), &v.dims);
    WindowValue { value, window_limited: value == v.window() as i64 }
}

/// `τ_n V`, the submodule of values in rank at least `n`, and its inclusion.
pub fn truncate<K: Field>(v: &TruncatedModule<K>, n: usize) -> (TruncatedModule<K>, ModuleMap<K>) {
    let subs: Vec<Subspace<K>> = v
        .objects()
        .iter()
        .zip(&v.dims)
        .map(|(o, &d)| if o.rank() >= n { Subspace::full(v.field(), d) } else { Subspace::zero(v.field(), d) })
        .collect();
    let (t, inc) = submodule_from_subspaces(v, &subs);
    let bounds = Bounds { generators: v.bounds.generators.map(|g| g.max(n)), relations: None };
    (t.with_bounds(bounds), inc)
}

/// `V / τ_n V`: the values in rank below `n`.
pub fn below<K: Field>(v: &TruncatedModule<K>, n: usize) -> (TruncatedModule<K>, ModuleMap<K>) {
    let subs: Vec<Subspace<K>> = v
        .objects()
        .iter()
        .zip(&v.dims)
        .map(|(o, &d)| if o.rank() >= n { Subspace::full(v.field(), d) } else { Subspace::zero(v.field(), d) })
        .collect();
    let (q, p) = quotient_module(v, &subs);
    // τ_n V is generated in ranks up to max(n, gd V), which bounds the new relations
    let g = v.bounds.generators;
    let bounds = Bounds { generators: g, relations: v.bounds.relations.zip(g).map(|(r, g)| r.max(g).max(n)) };
    (q.with_bounds(bounds), p)
}

/// Restricts a module to a smaller window.
pub fn restrict_window<K: Field>(v: &TruncatedModule<K>, window: usize) -> TruncatedModule<K> {
    assert!(window <= v.window());
    let frame = Frame::new(*v.spec(), window);
    let dims: Vec<usize> = frame.objects.iter().map(|o| v.dim(o)).collect();
    let actions = frame
        .objects
        .iter()
        .zip(&frame.gens)
        .map(|(x, gs)| {
            let xi = v.index_of(x).unwrap();
            gs.iter().map(|&g| v.gen_action(xi, g).clone()).collect()
        })
        .collect();
    TruncatedModule::from_parts(frame, v.field().clone(), dims, actions).with_bounds(v.bounds)
}

/// A representation of the automorphism group `C(x, x)`, given by the
/// matrices of its generating transpositions.
#[derive(Clone, Debug)]
pub struct GroupRep<K: Field> {
    pub spec: CategorySpec,
    pub field: K,
    pub object: ObjectId,
    pub dim: usize,
    pub generators: Vec<Matrix<K>>,
}

impl<K: Field> GroupRep<K> {
    pub fn trivial(spec: CategorySpec, field: &K, x: &ObjectId, dim: usize) -> Self {
        let generators = (0..aut_count(&spec, x)).map(|_| Matrix::identity(field, dim)).collect();
        GroupRep { spec, field: field.clone(), object: x.clone(), dim, generators }
    }

    /// Each transposition acts by `-1`.
    pub fn sign(spec: CategorySpec, field: &K, x: &ObjectId) -> Self {
        let generators =
            (0..aut_count(&spec, x)).map(|_| Matrix::identity(field, 1).scale(&field.from_i64(-1))).collect();
        GroupRep { spec, field: field.clone(), object: x.clone(), dim: 1, generators }
    }

    /// The group algebra acting on itself from the left.
    pub fn regular(spec: CategorySpec, field: &K, x: &ObjectId) -> Self {
        let elems = hom(&spec, x, x);
        let idx: HashMap<&Morphism, usize> = elems.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let n = elems.len();
        let generators = (0..aut_count(&spec, x))
            .map(|a| {
                let s = generator(&spec, x, Gen::Aut(a));
                let mut m = Matrix::zeros(field, n, n);
                for (j, h) in elems.iter().enumerate() {
                    let i = idx[&compose(&spec, &s, h).unwrap()];
                    m.set(i, j, field.one());
                }
                m
            })
            .collect();
        GroupRep { spec, field: field.clone(), object: x.clone(), dim: n, generators }
    }


    /// Checks the Coxeter relations of the product of symmetric groups.
    pub fn validate(&self) -> Result<(), ModError> {
        let expected = aut_count(&self.spec, &self.object);
        if self.generators.len() != expected {
            return Err(ModError::Representation(format!(
                "{} generator matrices given, {} expected",
                self.generators.len(),
                expected
            )));
        }
        if self.generators.iter().any(|g| g.rows() != self.dim || g.cols() != self.dim) {
            return Err(ModError::Representation("generator matrices have the wrong size".into()));
        }
        let k = &self.field;
        let id = Matrix::identity(k, self.dim);
        let pow = |m: &Matrix<K>, e: usize| (1..e).fold(m.clone(), |acc, _| acc.mul(m));
        // generator index -> (coordinate, position)
        let mut place = Vec::new();
        for (c, &n) in self.object.0.iter().enumerate() {
            for kpos in 0..n.saturating_sub(1) {
                place.push((c, kpos));
            }
        }
        for (i, gi) in self.generators.iter().enumerate() {
            if pow(gi, 2) != id {
                return Err(ModError::Representation(format!("generator {} does not square to 1", i)));
            }
            for (j, gj) in self.generators.iter().enumerate().skip(i + 1) {
                let adjacent = place[i].0 == place[j].0 && place[j].1 == place[i].1 + 1;
                let order = if adjacent { 3 } else { 2 };
                if pow(&gi.mul(gj), order) != id {
                    return Err(ModError::Representation(format!(
                        "generators {} and {} violate a braid relation",
                        i, j
                    )));
                }
            }
        }
        Ok(())
    }

    /// The matrix of an automorphism `h` of the object.
    pub fn act(&self, h: &Morphism) -> Matrix<K> {
        let mut m: Option<Matrix<K>> = None;
        for (_, g) in factor(&self.spec, h) {
            let Gen::Aut(a) = g else { panic!("not an automorphism") };
            m = Some(match m {
                None => self.generators[a].clone(),
                Some(acc) => self.generators[a].mul(&acc),
            });
        }
        m.unwrap_or_else(|| Matrix::identity(&self.field, self.dim))
    }
}

/// Canonical coset representatives of `C(x, y)` modulo `C(x, x)`, in order.
pub fn coset_reps(spec: &CategorySpec, x: &ObjectId, y: &ObjectId) -> Vec<Morphism> {
    hom(spec, x, y).into_iter().filter(|m| &coset_rep(spec, m).0 == m).collect()
}

/// `M(x) ⊗_{kC(x,x)} T`, with basis `rep ⊗ t` over coset representatives.
pub fn induced_module<K: Field>(
    spec: CategorySpec,
    field: &K,
    window: usize,
    t: &GroupRep<K>,
) -> Result<TruncatedModule<K>, ModError> {
    induced_on(&Frame::new(spec, window), field, t)
}

pub fn induced_on<K: Field>(frame: &Arc<Frame>, field: &K, t: &GroupRep<K>) -> Result<TruncatedModule<K>, ModError> {
    let spec = frame.spec;
    if t.spec != spec {
        return Err(ModError::Mismatch);
    }
    t.validate()?;
    induced_on_trusted(frame, field, t)
}

/// [`induced_on`] for a representation known to satisfy the group relations,
/// such as one read off a module.
pub fn induced_on_trusted<K: Field>(
    frame: &Arc<Frame>,
    field: &K,
    t: &GroupRep<K>,
) -> Result<TruncatedModule<K>, ModError> {
    let spec = frame.spec;
    let x = &t.object;
    if frame.index_of(x).is_none() {
        return Err(ModError::GeneratorRank(x.to_string(), frame.window));
    }
    let reps: Vec<Vec<Morphism>> = frame.objects.iter().map(|y| coset_reps(&spec, x, y)).collect();
    let lookup: Vec<HashMap<&Morphism, usize>> =
        reps.iter().map(|r| r.iter().enumerate().map(|(i, m)| (m, i)).collect()).collect();
    let dt = t.dim;
    let dims: Vec<usize> = reps.iter().map(|r| r.len() * dt).collect();
    let mut cache: HashMap<Vec<Vec<u8>>, Matrix<K>> = HashMap::new();
    let mut actions = Vec::with_capacity(dims.len());
    for (xi, gs) in frame.gens.iter().enumerate() {
        let y = &frame.objects[xi];
        let mut acts = Vec::with_capacity(gs.len());
        for (p, &g) in gs.iter().enumerate() {
            let zi = frame.gen_targets[xi][p];
            let gm = generator(&spec, y, g);
            let mut cols = Vec::with_capacity(dims[xi]);
            for r in &reps[xi] {
                let (r2, h) = coset_rep(&spec, &compose(&spec, &gm, r).unwrap());
                let j = lookup[zi][&r2];
                let th = cache.entry(h.inj.clone()).or_insert_with(|| t.act(&h));
                for kk in 0..dt {
                    cols.push(
                        (0..dt)
                            .filter(|&l| !field.is_zero(th.get(l, kk)))
                            .map(|l| ((j * dt + l) as u32, th.get(l, kk).clone()))
                            .collect(),
                    );
                }
            }
            acts.push(SparseMatrix::from_columns(field, dims[zi], cols));
        }
        actions.push(acts);
    }
    let bounds = Bounds { generators: Some(x.rank()), relations: None };
    Ok(TruncatedModule::from_parts(frame.clone(), field.clone(), dims, actions).with_bounds(bounds))
}

/// The map `M(x) ⊗ T -> V` sending `rep ⊗ t_k` to `V(rep)` applied to the
/// `k`-th column of `section` (an equivariant map `T -> V_x`).
pub fn induced_map_to<K: Field>(v: &TruncatedModule<K>, x: &ObjectId, section: &Matrix<K>) -> ModuleMap<K> {
    let spec = *v.spec();
    let dt = section.cols();
    let cols_t = section.transpose();
    let components = v
        .objects()
        .iter()
        .enumerate()
        .map(|(yi, y)| {
            let reps = coset_reps(&spec, x, y);
            let mut m = Matrix::zeros(v.field(), v.dims[yi], reps.len() * dt);
            for (ri, r) in reps.iter().enumerate() {
                let img = v.act_rows(r, &cols_t);
                for kk in 0..dt {
                    for (i, e) in img.row(kk).iter().enumerate() {
                        m.set(i, ri * dt + kk, e.clone());
                    }
                }
            }
            m
        })
        .collect();
    ModuleMap { components }
}

/// A presentation of `v`: generators lifting a basis of H_0, relations
/// lifting a basis of H_0 of the kernel of the resulting free cover.
pub fn present<K: Field>(v: &TruncatedModule<K>) -> Result<Presentation, ModError> {
    let k = v.field();
    let h = h0(v);
    let mut gens: Vec<Element<K>> = Vec::new();
    for (xi, x) in v.objects().iter().enumerate() {
        let q = h.lower[xi].quotient();
        for &c in &q.complement {
            let mut e = vec![k.zero(); v.dims[xi]];
            e[c] = k.one();
            gens.push((x.clone(), e));
        }
    }
    let (p, fb, map) = free_cover_map(v, &gens)?;
    let (z, inc) = kernel_of(&p, &map);
    let hz = h0(&z);
    let mut pres = Presentation::new(*v.spec(), k.spec(), gens.iter().map(|(o, _)| o.clone()).collect());
    for yi in 0..v.dims.len() {
        let q = hz.lower[yi].quotient();
        let basis = fb.basis_at(yi);
        for &c in &q.complement {
            let mut e = vec![k.zero(); z.dims[yi]];
            e[c] = k.one();
            let vec_p = inc.components[yi].mul_vec(&e);
            let mut rel = Relation::default();
            for (i, val) in vec_p.iter().enumerate() {
                if k.is_zero(val) {
                    continue;
                }
                let coeff = k
                    .to_ratio(val)
                    .ok_or_else(|| ModError::Invalid("relation coefficient does not fit in i64".into()))?;
                let (g, m) = basis[i];
                rel.terms.push(Term { gen: g, morphism: m.clone(), coeff });
            }
            pres.relations.push(rel);
        }
    }
    Ok(pres)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fi_obj(n: usize) -> ObjectId {
        ObjectId(vec![n])
    }

    #[test]
    fn free_fi_module_dimensions() {
        let m = realize_free(&FreeModule::on(&[fi_obj(1)]), CategorySpec::fi(), &Rationals, 3).unwrap();
        assert_eq!(m.dims(), &[0, 1, 2, 3]);
        m.check_functoriality(3, 6).unwrap();
    }

    #[test]
    fn free_fid_module_dimensions() {
        let spec = CategorySpec::new(Family::FId, 2).unwrap();
        let m = realize_free(&FreeModule::on(&[fi_obj(0)]), spec, &Rationals, 4).unwrap();
        assert_eq!(m.dims(), &[1, 2, 4, 8, 16]);
    }

    #[test]
    fn free_nd_module_is_one_dimensional_everywhere() {
        let spec = CategorySpec::new(Family::Nd, 2).unwrap();
        let m = realize_free(&FreeModule::on(&[ObjectId(vec![0, 0])]), spec, &Rationals, 3).unwrap();
        assert!(m.dims().iter().all(|&d| d == 1));
    }

    #[test]
    fn relation_equal_to_generator_kills_module() {
        let spec = CategorySpec::fi();
        let mut p = Presentation::new(spec, FieldSpec::Rationals, vec![fi_obj(1)]);
        p.relations.push(Relation {
            terms: vec![Term { gen: 0, morphism: identity(&spec, &fi_obj(1)), coeff: (1, 1) }],
        });
        assert!(realize(&p, 3, &Rationals).unwrap().is_zero());
        p.relations[0].terms[0].gen = 3;
        assert!(matches!(realize(&p, 3, &Rationals), Err(ModError::Relation(0, _))));
    }

    #[test]
    fn h0_and_gd_of_free_module() {
        let m = realize_free(&FreeModule::on(&[fi_obj(1)]), CategorySpec::fi(), &Rationals, 4).unwrap();
        assert_eq!(h0(&m).dims, vec![0, 1, 0, 0, 0]);
        assert_eq!(gd(&m).value, 1);
        let z = TruncatedModule::zero(CategorySpec::fi(), &Rationals, 3);
        assert_eq!(gd(&z).value, -1);
        assert_eq!(degree(&z).value, -1);
    }

    #[test]
    fn induced_from_trivial_group_is_free() {
        let spec = CategorySpec::fi();
        let t = GroupRep::trivial(spec, &Rationals, &fi_obj(1), 1);
        let ind = induced_module(spec, &Rationals, 4, &t).unwrap();
        assert_eq!(ind.dims(), &[0, 1, 2, 3, 4]);
        let reg = GroupRep::regular(spec, &Rationals, &fi_obj(2));
        let ind = induced_module(spec, &Rationals, 4, &reg).unwrap();
        let free = realize_free(&FreeModule::on(&[fi_obj(2)]), spec, &Rationals, 4).unwrap();
        assert_eq!(ind.dims(), free.dims());
        ind.check_functoriality(4, 4).unwrap();
        let h = h0(&ind);
        assert_eq!(h.dims, vec![0, 0, 2, 0, 0]);
    }

    #[test]
    fn bad_representation_is_rejected() {
        let spec = CategorySpec::fi();
        let mut t = GroupRep::trivial(spec, &Rationals, &fi_obj(3), 1);
        t.generators[0] = Matrix::identity(&Rationals, 1).scale(&Rationals.from_i64(2));
        assert!(induced_module(spec, &Rationals, 4, &t).is_err());
    }
}
