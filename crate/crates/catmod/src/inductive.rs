//! Shift functors, the inductive functor `F` with its natural map
//! `θ: V^{⊕d} -> FV`, the kernels `K_S` and cokernels `D_S`, nil subsets, and
//! the descendant tree.
//!
//! Every application of `F` consumes one rank of window: a module on window
//! `N` yields `FV`, `K_S V` and `D_S V` on window `N - 1`.

use std::fmt;

use thiserror::Error;

use crate::category::*;
use crate::exactla::*;
use crate::modrep::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InductiveError {
    #[error("window exhausted")]
    WindowExhausted,
    #[error("shift coordinate {0} out of range")]
    Coordinate(usize),
    #[error("{0} is not a nil subset")]
    NotNil(Subset),
    #[error("descendant tree exceeded the node budget {0}")]
    Budget(usize),
    #[error(transparent)]
    Module(#[from] ModError),
}

/// A subset of `[d]`, stored 0-based as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u32);

impl Subset {
    pub fn empty() -> Self {
        Subset(0)
    }
    pub fn full(d: usize) -> Self {
        Subset((1u32 << d) - 1)
    }
    pub fn from_elems(elems: &[usize]) -> Self {
        Subset(elems.iter().fold(0, |acc, &i| acc | (1 << i)))
    }
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }
    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | 1 << i)
    }
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    pub fn elems(self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }
    pub fn is_subset(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }
    pub fn intersect(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }
    /// All subsets of `[d]`.
    pub fn all(d: usize) -> Vec<Subset> {
        (0..1u32 << d).map(Subset).collect()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elems().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `Σ_i V = V ∘ ι_i`, valid on window `N - 1`.
pub fn shift<K: Field>(i: usize, v: &TruncatedModule<K>) -> Result<TruncatedModule<K>, InductiveError> {
    let spec = *v.spec();
    if v.window() == 0 {
        return Err(InductiveError::WindowExhausted);
    }
    if i >= spec.shift_count() {
        return Err(InductiveError::Coordinate(i));
    }
    let frame = Frame::new(spec, v.window() - 1);
    let dims = frame.objects.iter().map(|x| v.dim(&self_embed_object(&spec, i, x).unwrap())).collect();
    let actions = frame
        .objects
        .iter()
        .zip(&frame.gens)
        .map(|(x, gs)| {
            gs.iter().map(|&g| v.act_sparse(&self_embed(&spec, i, &generator(&spec, x, g)).unwrap())).collect()
        })
        .collect();
    Ok(TruncatedModule::from_parts(frame, v.field().clone(), dims, actions).with_bounds(v.bounds()))
}

/// `FV`: `Σ` for single-shift families, `Σ_1 ⊕ … ⊕ Σ_d` otherwise.
pub fn inductive_f<K: Field>(v: &TruncatedModule<K>) -> Result<TruncatedModule<K>, InductiveError> {
    let spec = v.spec();
    if spec.single_shift() {
        return shift(0, v);
    }
    let parts = (0..spec.shift_count()).map(|i| shift(i, v)).collect::<Result<Vec<_>, _>>()?;
    Ok(direct_sum_many(&parts.iter().collect::<Vec<_>>())?.with_bounds(v.bounds()))
}

/// `V`, `FV` and `θ: V^{⊕d} -> FV`, all on window `N - 1`.
pub struct Inductive<K: Field> {
    pub v: TruncatedModule<K>,
    pub vd: TruncatedModule<K>,
    pub fv: TruncatedModule<K>,
    pub theta: ModuleMap<K>,
    pub d: usize,
}

/// The pieces of `0 -> K_S V -> V^S -> FV -> D_S V -> 0`.
pub struct KsDs<K: Field> {
    pub vs: TruncatedModule<K>,
    pub theta_s: ModuleMap<K>,
    pub k: TruncatedModule<K>,
    pub k_inclusion: ModuleMap<K>,
    pub d: TruncatedModule<K>,
    pub d_projection: ModuleMap<K>,
}

pub struct FiltrationChain<K: Field> {
    /// `S = S_0 ⊂ S_1 ⊂ … ⊂ [d]`.
    pub subsets: Vec<Subset>,
    pub d_modules: Vec<TruncatedModule<K>>,
    /// `D_{S_i} V -> D_{S_{i+1}} V`.
    pub maps: Vec<ModuleMap<K>>,
    /// `V / (K_{S_{i+1}} V / K_{S_i} V)`, the kernel of `maps[i]`.
    pub kernels: Vec<TruncatedModule<K>>,
    /// Quotient maps `V -> kernels[i]`.
    pub kernel_maps: Vec<ModuleMap<K>>,
    pub window: usize,
}

impl<K: Field> Inductive<K> {
    pub fn new(v: &TruncatedModule<K>) -> Result<Self, InductiveError> {
        if v.window() == 0 {
            return Err(InductiveError::WindowExhausted);
        }
        let spec = *v.spec();
        let d = spec.d();
        let fv = inductive_f(v)?;
        let vr = restrict_window(v, v.window() - 1);
        let vd = direct_sum_many(&vec![&vr; d])?;
        let k = v.field();
        let components = vr
            .objects()
            .iter()
            .enumerate()
            .map(|(xi, x)| {
                let n = vr.dim_at(xi);
                let mut m = Matrix::zeros(k, fv.dim_at(xi), d * n);
                let thetas = theta_morphisms(&spec, x);
                let mut row_off = 0;
                for (l, t) in thetas.iter().enumerate() {
                    let a = v.act(t);
                    for r in 0..a.rows() {
                        for c in 0..n {
                            m.set(row_off + r, l * n + c, a.get(r, c).clone());
                        }
                    }
                    if !spec.single_shift() {
                        row_off += a.rows();
                    }
                }
                m
            })
            .collect();
        Ok(Inductive { v: vr, vd, fv, theta: ModuleMap { components }, d })
    }

    pub fn window(&self) -> usize {
        self.v.window()
    }

    fn s_columns(&self, xi: usize, s: Subset) -> Vec<usize> {
        let n = self.v.dim_at(xi);
        s.elems().into_iter().flat_map(|l| l * n..(l + 1) * n).collect()
    }

    /// `θ` restricted to the summands indexed by `S`.
    pub fn theta_s(&self, s: Subset) -> ModuleMap<K> {
        let components =
            self.theta.components.iter().enumerate().map(|(xi, c)| c.select_cols(&self.s_columns(xi, s))).collect();
        ModuleMap { components }
    }

    /// `K_S V` as subspaces of `V^{⊕d}`.
    pub fn kernel_in_full(&self, s: Subset) -> Vec<Subspace<K>> {
        let k = self.v.field();
        self.theta
            .components
            .iter()
            .enumerate()
            .map(|(xi, c)| {
                let cols = self.s_columns(xi, s);
                let ker = c.select_cols(&cols).kernel();
                let full = self.vd.dim_at(xi);
                let rows = (0..ker.dim())
                    .map(|r| {
                        let mut e = vec![k.zero(); full];
                        for (t, &cidx) in cols.iter().enumerate() {
                            e[cidx] = ker.basis().get(r, t).clone();
                        }
                        e
                    })
                    .collect();
                Subspace::from_vectors(k, full, rows)
            })
            .collect()
    }

    pub fn is_nil(&self, s: Subset) -> bool {
        let s_cols = |xi| self.s_columns(xi, s);
        self.theta.components.iter().enumerate().all(|(xi, c)| {
            let cols = s_cols(xi);
            c.select_cols(&cols).rank() == cols.len()
        })
    }

    /// Greedy ascending growth from the empty set.
    pub fn maximal_nil_subset(&self) -> Subset {
        let mut s = Subset::empty();
        for i in 0..self.d {
            if self.is_nil(s.with(i)) {
                s = s.with(i);
            }
        }
        s
    }

    pub fn ks_ds(&self, s: Subset) -> Result<KsDs<K>, InductiveError> {
        let parts = vec![&self.v; s.len()];
        let vs = if parts.is_empty() { TruncatedModule::zero_on(self.v.frame().clone(), self.v.field()) } else { direct_sum_many(&parts)? };
        let theta_s = self.theta_s(s);
        let (k, k_inclusion) = kernel_of(&vs, &theta_s);
        let (d, d_projection) = cokernel_of(&theta_s, &self.fv);
        Ok(KsDs { vs, theta_s, k, k_inclusion, d, d_projection })
    }

    fn image_subspaces(&self, s: Subset) -> Vec<Subspace<K>> {
        self.theta_s(s).components.iter().map(|c| c.image()).collect()
    }

    /// The chain of quotients `D_S V -> D_{S_1} V -> … -> DV`, inserting the
    /// elements of `[d] \ S` in ascending order.
    pub fn filtration_chain(&self, s: Subset) -> Result<FiltrationChain<K>, InductiveError> {
        if !self.is_nil(s) {
            return Err(InductiveError::NotNil(s));
        }
        let mut subsets = vec![s];
        for i in 0..self.d {
            if !s.contains(i) {
                let last = *subsets.last().unwrap();
                subsets.push(last.with(i));
            }
        }
        let images: Vec<Vec<Subspace<K>>> = subsets.iter().map(|&t| self.image_subspaces(t)).collect();
        let mut d_modules = Vec::new();
        let mut projections = Vec::new();
        for im in &images {
            let (q, p) = quotient_module(&self.fv, im);
            d_modules.push(q);
            projections.push(p);
        }
        let mut maps = Vec::new();
        let mut kernels = Vec::new();
        let mut kernel_maps = Vec::new();
        for i in 0..subsets.len() - 1 {
            let components = images[i]
                .iter()
                .enumerate()
                .map(|(xi, im)| projections[i + 1].components[xi].select_cols(&im.quotient().complement))
                .collect();
            maps.push(ModuleMap { components });
            let new = (subsets[i + 1].0 & !subsets[i].0).trailing_zeros() as usize;
            let kfull = self.kernel_in_full(subsets[i + 1]);
            let proj: Vec<Subspace<K>> = kfull
                .iter()
                .enumerate()
                .map(|(xi, sub)| {
                    let n = self.v.dim_at(xi);
                    let cols: Vec<usize> = (new * n..(new + 1) * n).collect();
                    Subspace::from_rows(&sub.basis().select_cols(&cols))
                })
                .collect();
            let (q, p) = quotient_module(&self.v, &proj);
            kernels.push(q);
            kernel_maps.push(p);
        }
        Ok(FiltrationChain { subsets, d_modules, maps, kernels, kernel_maps, window: self.window() })
    }
}

/// `θ: V^{⊕d} -> FV` together with its source and target.
pub fn theta<K: Field>(
    v: &TruncatedModule<K>,
) -> Result<(TruncatedModule<K>, TruncatedModule<K>, ModuleMap<K>), InductiveError> {
    let ind = Inductive::new(v)?;
    Ok((ind.vd, ind.fv, ind.theta))
}

pub fn ks_ds<K: Field>(v: &TruncatedModule<K>, s: Subset) -> Result<KsDs<K>, InductiveError> {
    Inductive::new(v)?.ks_ds(s)
}

pub fn is_nil<K: Field>(v: &TruncatedModule<K>, s: Subset) -> Result<bool, InductiveError> {
    Ok(Inductive::new(v)?.is_nil(s))
}

pub fn maximal_nil_subset<K: Field>(v: &TruncatedModule<K>) -> Result<Subset, InductiveError> {
    Ok(Inductive::new(v)?.maximal_nil_subset())
}

pub fn filtration_chain<K: Field>(v: &TruncatedModule<K>, s: Subset) -> Result<FiltrationChain<K>, InductiveError> {
    Inductive::new(v)?.filtration_chain(s)
}

pub struct TreeNode<K: Field> {
    pub module: TruncatedModule<K>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Maximal nil subset and chain used to produce the children.
    pub nil: Option<Subset>,
    pub chain: Vec<Subset>,
    /// The node is nonzero but its window is used up, so its children are unknown.
    pub window_exhausted: bool,
}

pub struct DescendantTree<K: Field> {
    pub nodes: Vec<TreeNode<K>>,
}

impl<K: Field> DescendantTree<K> {
    pub fn complete(&self) -> bool {
        self.nodes.iter().all(|n| !n.window_exhausted)
    }

    pub fn depth(&self, mut i: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[i].parent {
            d += 1;
            i = p;
        }
        d
    }
}

pub fn build_tree<K: Field>(v: &TruncatedModule<K>, budget: usize) -> Result<DescendantTree<K>, InductiveError> {
    let mut nodes = vec![TreeNode {
        module: v.clone(),
        parent: None,
        children: Vec::new(),
        nil: None,
        chain: Vec::new(),
        window_exhausted: false,
    }];
    let mut next = 0;
    while next < nodes.len() {
        let m = nodes[next].module.clone();
        if m.is_zero() {
            nodes[next].nil = Some(Subset::full(m.spec().d()));
            next += 1;
            continue;
        }
        if m.window() == 0 {
            nodes[next].window_exhausted = true;
            next += 1;
            continue;
        }
        let ind = Inductive::new(&m)?;
        let s = ind.maximal_nil_subset();
        let chain = ind.filtration_chain(s)?;
        nodes[next].nil = Some(s);
        nodes[next].chain = chain.subsets.clone();
        for child in chain.kernels {
            if child.is_zero() {
                continue;
            }
            if nodes.len() >= budget {
                return Err(InductiveError::Budget(budget));
            }
            let id = nodes.len();
            nodes.push(TreeNode {
                module: child,
                parent: Some(next),
                children: Vec::new(),
                nil: None,
                chain: Vec::new(),
                window_exhausted: false,
            });
            nodes[next].children.push(id);
        }
        next += 1;
    }
    Ok(DescendantTree { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_basics() {
        let s = Subset::from_elems(&[0, 2]);
        assert_eq!(s.to_string(), "{1,3}");
        assert!(s.is_subset(Subset::full(3)));
        assert_eq!(Subset::all(2).len(), 4);
        assert_eq!(Subset::empty().to_string(), "{}");
    }

    #[test]
    fn shift_of_free_fi_module() {
        let spec = CategorySpec::fi();
        let m = realize_free(&FreeModule::on(&[ObjectId(vec![1])]), spec, &Rationals, 5).unwrap();
        let s = shift(0, &m).unwrap();
        assert_eq!(s.window(), 4);
        for n in 0..=4 {
            assert_eq!(s.dim(&ObjectId(vec![n])), n + 1);
        }
        s.check_functoriality(3, 4).unwrap();
    }

    #[test]
    fn free_modules_are_nil_everywhere() {
        let spec = CategorySpec::new(Family::FId, 2).unwrap();
        let m = realize_free(&FreeModule::on(&[ObjectId(vec![1])]), spec, &Rationals, 4).unwrap();
        let ind = Inductive::new(&m).unwrap();
        assert_eq!(ind.maximal_nil_subset(), Subset::full(2));
        assert!(ind.theta.is_natural(&ind.vd, &ind.fv));
        let tree = build_tree(&m, 10).unwrap();
        assert_eq!(tree.nodes.len(), 1);
    }

    #[test]
    fn zero_module_window_errors() {
        let z = TruncatedModule::zero(CategorySpec::fi(), &Rationals, 0);
        assert_eq!(shift(0, &z).unwrap_err(), InductiveError::WindowExhausted);
        let z = TruncatedModule::zero(CategorySpec::fi(), &Rationals, 2);
        assert_eq!(shift(1, &z).unwrap_err(), InductiveError::Coordinate(1));
        assert!(shift(0, &z).unwrap().is_zero());
    }
}
