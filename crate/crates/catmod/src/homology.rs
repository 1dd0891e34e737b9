//! Resolutions and homology: `H_i(V) = Tor_i(kC/m, V)`, homological degrees,
//! regularity, relative projective modules, and linear relative projective
//! resolutions of truncations.
//!
//! Resolutions here are built from induced modules `M(x) ⊗_{kC(x,x)} T`
//! rather than free modules. Induced modules have no higher homology, so
//! applying `H_0` to such a resolution still computes Tor, and the covers are
//! smaller by the order of `C(x, x)`. Free covers remain available through
//! [`CoverKind::Free`].

use std::fmt;

use thiserror::Error;

use crate::category::*;
use crate::exactla::*;
pub use crate::modrep::{degree, truncate};
use crate::modrep::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("refused: {0}")]
    Refused(String),
    #[error("internal check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Module(#[from] ModError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverKind {
    /// One free generator per basis element of `H_0`.
    Free,
    /// One induced module per object, on the automorphism-closure of the
    /// lifted `H_0` basis.
    Induced,
}

/// One summand `M(x) ⊗ T` of a cover with its equivariant map `T -> Z_x`.
#[derive(Clone, Debug)]
pub struct CoverPart<K: Field> {
    pub rep: GroupRep<K>,
    pub section: Matrix<K>,
}

impl<K: Field> CoverPart<K> {
    pub fn object(&self) -> &ObjectId {
        &self.rep.object
    }
}

pub struct ResolutionStep<K: Field> {
    pub parts: Vec<CoverPart<K>>,
    pub cover: TruncatedModule<K>,
    /// `cover -> Z^i`, surjective at every window object.
    pub map: ModuleMap<K>,
    /// `Z^{i+1}` and its inclusion into the cover.
    pub kernel: TruncatedModule<K>,
    pub kernel_inclusion: ModuleMap<K>,
    /// Coordinates of `H_0(cover)_x` inside `cover_x`.
    pub layers: Vec<Vec<usize>>,
}

pub struct Resolution<K: Field> {
    pub input: TruncatedModule<K>,
    pub steps: Vec<ResolutionStep<K>>,
}

impl<K: Field> Resolution<K> {
    /// `Z^i`, with `Z^0 = V`.
    pub fn syzygy(&self, i: usize) -> &TruncatedModule<K> {
        if i == 0 {
            &self.input
        } else {
            &self.steps[i - 1].kernel
        }
    }

    /// Smallest `k` with `Z^k = 0` inside the window, if reached.
    pub fn terminated_at(&self) -> Option<usize> {
        (0..=self.steps.len()).find(|&i| self.syzygy(i).is_zero())
    }
}

fn restrict_rep<K: Field>(z: &TruncatedModule<K>, xi: usize, basis: &Subspace<K>) -> GroupRep<K> {
    let spec = *z.spec();
    let x = &z.objects()[xi];
    let generators = (0..aut_count(&spec, x))
        .map(|a| {
            let img = z.gen_action(xi, Gen::Aut(a)).apply_rows(basis.basis());
            let cols: Vec<Vec<K::E>> = img.row_vecs().iter().map(|r| basis.coords_unchecked(r)).collect();
            Matrix::from_rows(z.field(), basis.dim(), cols).transpose()
        })
        .collect();
    GroupRep { spec, field: z.field().clone(), object: x.clone(), dim: basis.dim(), generators }
}

/// Cover parts for `z`, generated at the support of `H_0(z)`.
pub fn cover_parts<K: Field>(z: &TruncatedModule<K>, kind: CoverKind) -> Vec<CoverPart<K>> {
    let k = z.field();
    let spec = *z.spec();
    let h = h0(z);
    let mut parts = Vec::new();
    for (xi, x) in z.objects().iter().enumerate() {
        if h.dims[xi] == 0 {
            continue;
        }
        let n = z.dim_at(xi);
        let lifts: Vec<Vec<K::E>> = h.lower[xi]
            .quotient()
            .complement
            .iter()
            .map(|&c| {
                let mut e = vec![k.zero(); n];
                e[c] = k.one();
                e
            })
            .collect();
        match kind {
            CoverKind::Induced => {
                let t = z.close_under_auts(xi, Subspace::from_vectors(k, n, lifts));
                let rep = restrict_rep(z, xi, &t);
                parts.push(CoverPart { rep, section: t.basis().transpose() });
            }
            CoverKind::Free => {
                let group = hom(&spec, x, x);
                for c in lifts {
                    let cols: Vec<Vec<K::E>> = group.iter().map(|g| z.act_vec(g, &c)).collect();
                    let section = Matrix::from_rows(k, n, cols).transpose();
                    parts.push(CoverPart { rep: GroupRep::regular(spec, k, x), section });
                }
            }
        }
    }
    parts
}

/// The direct sum of the induced modules of `parts` and its map to `z`.
pub fn assemble_cover<K: Field>(
    z: &TruncatedModule<K>,
    parts: &[CoverPart<K>],
) -> Result<(TruncatedModule<K>, ModuleMap<K>, Vec<Vec<usize>>), ModError> {
    let frame = z.frame();
    let k = z.field();
    if parts.is_empty() {
        let zero = TruncatedModule::zero_on(frame.clone(), k);
        let map = ModuleMap::zero(&zero, z);
        let layers = vec![Vec::new(); z.dims().len()];
        return Ok((zero, map, layers));
    }
    let modules = parts.iter().map(|p| induced_on_trusted(frame, k, &p.rep)).collect::<Result<Vec<_>, _>>()?;
    let cover = direct_sum_many(&modules.iter().collect::<Vec<_>>())?;
    let maps: Vec<ModuleMap<K>> = parts.iter().map(|p| induced_map_to(z, p.object(), &p.section)).collect();
    let components = (0..z.dims().len())
        .map(|xi| Matrix::hstack_many(k, z.dim_at(xi), &maps.iter().map(|m| &m.components[xi]).collect::<Vec<_>>()))
        .collect();
    let mut layers = vec![Vec::new(); z.dims().len()];
    for (xi, x) in z.objects().iter().enumerate() {
        let mut off = 0;
        for (p, m) in parts.iter().zip(&modules) {
            if p.object() == x {
                layers[xi].extend(off..off + p.rep.dim);
            }
            off += m.dim_at(xi);
        }
    }
    let bounds = Bounds { generators: parts.iter().map(|p| p.object().rank()).max(), relations: None };
    Ok((cover.with_bounds(bounds), ModuleMap { components }, layers))
}

pub fn resolution_step<K: Field>(z: &TruncatedModule<K>, kind: CoverKind) -> Result<ResolutionStep<K>, ModError> {
    let parts = cover_parts(z, kind);
    let (cover, map, layers) = assemble_cover(z, &parts)?;
    let (kernel, kernel_inclusion) = kernel_of(&cover, &map);
    Ok(ResolutionStep { parts, cover, map, kernel, kernel_inclusion, layers })
}

/// Covers `V`, then each kernel in turn, `length + 1` times (stopping early
/// once a kernel vanishes), so that `Z^{length+1}` is known.
pub fn adaptable_resolution<K: Field>(
    v: &TruncatedModule<K>,
    length: usize,
    kind: CoverKind,
) -> Result<Resolution<K>, ModError> {
    let mut res = Resolution { input: v.clone(), steps: Vec::new() };
    for i in 0..=length {
        let z = res.syzygy(i);
        if z.is_zero() {
            break;
        }
        let step = resolution_step(z, kind)?;
        res.steps.push(step);
    }
    Ok(res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Syzygies vanish before `i_max` and every `hd_i` lies below the window.
    Terminated,
    /// The module is known to vanish from some window rank on, so `reg ≤ deg`.
    FiniteSupport,
    /// `H_1 = 0` with known presentation bounds, so `reg = gd`.
    RelativeProjective,
    /// FI only: `reg ≤ gd + hd_1 - 1` with known presentation bounds.
    ChurchEllenberg,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Certificate::Terminated => "terminated",
            Certificate::FiniteSupport => "finite-support",
            Certificate::RelativeProjective => "relative-projective",
            Certificate::ChurchEllenberg => "church-ellenberg",
        };
        f.write_str(s)
    }
}

/// `reg` is at least `lower`; `upper` is a proven bound when present.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub lower: i64,
    pub upper: Option<i64>,
    pub certificate: Option<Certificate>,
}

impl Regularity {
    pub fn certified(&self) -> bool {
        self.upper == Some(self.lower)
    }
    pub fn value(&self) -> i64 {
        self.lower
    }
}

#[derive(Clone, Debug)]
pub struct HomologyReport {
    pub objects: Vec<ObjectId>,
    /// `h[i][x]` is `dim H_i(V)_x`.
    pub h: Vec<Vec<usize>>,
    /// `hd_i`, `-1` when `H_i` vanishes in the window.
    pub hd: Vec<i64>,
    pub window: usize,
    pub i_max: usize,
    pub terminated_at: Option<usize>,
    pub regularity: Regularity,
    pub gd: WindowValue,
    pub degree: WindowValue,
}

impl HomologyReport {
    pub fn dim(&self, i: usize, x: &ObjectId) -> usize {
        self.objects.iter().position(|o| o == x).map_or(0, |xi| self.h[i][xi])
    }

    /// Objects where `H_i` is nonzero, with dimensions.
    pub fn support(&self, i: usize) -> Vec<(ObjectId, usize)> {
        self.objects.iter().zip(&self.h[i]).filter(|(_, &d)| d > 0).map(|(o, &d)| (o.clone(), d)).collect()
    }
}

fn layer_rank<K: Field>(inclusion: &Matrix<K>, layer: &[usize]) -> usize {
    if layer.is_empty() || inclusion.cols() == 0 {
        0
    } else {
        inclusion.select_rows(layer).rank()
    }
}

/// Objectwise `H_i` for `i ≤ i_max` from a resolution of length `i_max`.
pub fn homology_from_resolution<K: Field>(res: &Resolution<K>, i_max: usize) -> Vec<Vec<usize>> {
    let n_obj = res.input.dims().len();
    // rank of H_0(d_i) at each object, i = 1..=i_max+1
    let boundary = |i: usize, xi: usize| -> usize {
        if i == 0 || i > res.steps.len() {
            return 0;
        }
        let prev = &res.steps[i - 1];
        layer_rank(&prev.kernel_inclusion.components[xi], &prev.layers[xi])
    };
    (0..=i_max)
        .map(|i| {
            (0..n_obj)
                .map(|xi| {
                    let chains = res.steps.get(i).map_or(0, |s| s.layers[xi].len());
                    chains - boundary(i, xi) - boundary(i + 1, xi)
                })
                .collect()
        })
        .collect()
}

fn top(objects: &[ObjectId], dims: &[usize]) -> i64 {
    objects.iter().zip(dims).filter(|(_, &d)| d > 0).map(|(o, _)| o.rank() as i64).max().unwrap_or(-1)
}

pub fn homology_groups<K: Field>(v: &TruncatedModule<K>, i_max: usize) -> Result<HomologyReport, HomologyError> {
    homology_with(v, i_max, CoverKind::Induced)
}

pub fn homology_with<K: Field>(
    v: &TruncatedModule<K>,
    i_max: usize,
    kind: CoverKind,
) -> Result<HomologyReport, HomologyError> {
    let res = adaptable_resolution(v, i_max, kind)?;
    let h = homology_from_resolution(&res, i_max);
    let objects = v.objects().to_vec();
    let hd: Vec<i64> = h.iter().map(|hi| top(&objects, hi)).collect();
    let terminated_at = res.terminated_at();
    let gd_v = WindowValue { value: hd[0], window_limited: gd(v).window_limited };
    let deg_v = degree(v);
    let regularity = certify(v, &objects, &hd, i_max, terminated_at);
    Ok(HomologyReport { objects, h, hd, window: v.window(), i_max, terminated_at, regularity, gd: gd_v, degree: deg_v })
}

fn certify<K: Field>(
    v: &TruncatedModule<K>,
    objects: &[ObjectId],
    hd: &[i64],
    i_max: usize,
    terminated_at: Option<usize>,
) -> Regularity {
    let n = v.window();
    let lower = hd.iter().enumerate().filter(|(_, &h)| h >= 0).map(|(i, &h)| h - i as i64).max().unwrap_or(-1);
    let gens_known = v.bounds().generators.is_some_and(|g| g <= n);
    let rels_known = gens_known && v.bounds().relations.is_some_and(|r| r <= n);
    let mut candidates: Vec<(i64, Certificate)> = Vec::new();

    if terminated_at.is_some_and(|k| k <= i_max) && hd.iter().all(|&h| h < n as i64) {
        candidates.push((lower, Certificate::Terminated));
    }
    if let Some(g) = v.bounds().generators {
        let vanishing_rank = (g + 1..=n).find(|&m| objects.iter().zip(v.dims()).all(|(o, &d)| o.rank() != m || d == 0));
        if vanishing_rank.is_some() {
            candidates.push((degree(v).value, Certificate::FiniteSupport));
        }
    }
    if rels_known && i_max >= 1 {
        if hd[1] < 0 {
            candidates.push((hd[0], Certificate::RelativeProjective));
        } else if v.spec().family() == Family::FI {
            candidates.push((hd[0].max(hd[0] + hd[1] - 1), Certificate::ChurchEllenberg));
        }
    }
    let best = candidates.into_iter().min_by_key(|(u, _)| *u);
    Regularity { lower, upper: best.map(|b| b.0), certificate: best.map(|b| b.1) }
}

pub fn regularity<K: Field>(v: &TruncatedModule<K>, i_max: usize) -> Result<Regularity, HomologyError> {
    Ok(homology_groups(v, i_max)?.regularity)
}

/// Result of the relative projectivity test.
#[derive(Clone, Debug)]
pub struct RelativeProjectivity<K: Field> {
    /// `H_1` vanishes on the window.
    pub h1_vanishes: bool,
    /// Filtration factors `M(x) ⊗ T`, peeled off from the top.
    pub witness: Option<Vec<GroupRep<K>>>,
}

impl<K: Field> RelativeProjectivity<K> {
    pub fn is_relative_projective(&self) -> bool {
        self.h1_vanishes && self.witness.is_some()
    }
}

/// Peels off induced modules at maximal objects of the `H_0` support.
pub fn relative_projective_witness<K: Field>(v: &TruncatedModule<K>) -> Option<Vec<GroupRep<K>>> {
    let mut factors = Vec::new();
    let mut cur = v.clone();
    while !cur.is_zero() {
        let h = h0(&cur);
        let support: Vec<usize> = (0..h.dims.len()).filter(|&i| h.dims[i] > 0).collect();
        let &xi = support.iter().max_by_key(|&&i| cur.objects()[i].rank())?;
        let x = cur.objects()[xi].clone();
        let k = cur.field().clone();
        let elements: Vec<Element<K>> = support
            .iter()
            .filter(|&&i| i != xi)
            .flat_map(|&i| {
                let n = cur.dim_at(i);
                let o = cur.objects()[i].clone();
                let kk = k.clone();
                (0..n).map(move |c| {
                    let mut e = vec![kk.zero(); n];
                    e[c] = kk.one();
                    (o.clone(), e)
                })
            })
            .collect();
        let subs = generated_subspaces(&cur, &elements);
        let (quot, _) = quotient_module(&cur, &subs);
        let qi = quot.index_of(&x)?;
        let rep = quot.endo_rep(&x);
        let ind = induced_on(quot.frame(), &k, &rep).ok()?;
        let section = Matrix::identity(&k, quot.dim_at(qi));
        let map = induced_map_to(&quot, &x, &section);
        let iso = map.components.iter().zip(ind.dims()).zip(quot.dims()).all(|((c, &a), &b)| a == b && c.rank() == b);
        if !iso {
            return None;
        }
        factors.push(rep);
        cur = submodule_from_subspaces(&cur, &subs).0;
    }
    Some(factors)
}

pub fn is_relative_projective<K: Field>(v: &TruncatedModule<K>) -> Result<RelativeProjectivity<K>, HomologyError> {
    let report = homology_groups(v, 1)?;
    let h1_vanishes = report.hd[1] < 0;
    let witness = if h1_vanishes { relative_projective_witness(v) } else { None };
    Ok(RelativeProjectivity { h1_vanishes, witness })
}

pub struct LinearStage<K: Field> {
    /// `F^i` is generated at this rank.
    pub rank: usize,
    pub parts: Vec<CoverPart<K>>,
    pub module: TruncatedModule<K>,
    /// `F^i -> K^i`.
    pub map: ModuleMap<K>,
    /// `H_0(F^i)` by object.
    pub h0: Vec<usize>,
    /// `K^i` is generated exactly at `rank`.
    pub generated_at_rank: bool,
}

pub struct LinearResolution<K: Field> {
    pub n: usize,
    pub stages: Vec<LinearStage<K>>,
    /// The last kernel vanishes on the window.
    pub complete: bool,
    pub window_exhausted: bool,
}

/// The resolution of `τ_n V` by induced modules whose `i`-th term is
/// generated in rank `n + i`. Refused unless `n` is at least a proven upper
/// bound for `reg V`.
pub fn linear_relative_resolution<K: Field>(
    v: &TruncatedModule<K>,
    n: usize,
    i_max: usize,
) -> Result<LinearResolution<K>, HomologyError> {
    let reg = regularity(v, i_max)?;
    match reg.upper {
        Some(u) if n as i64 >= u => {}
        Some(u) => return Err(HomologyError::Refused(format!("n = {} is below the regularity bound {}", n, u))),
        None => {
            return Err(HomologyError::Refused(format!(
                "regularity is not certified (at least {}); no upper bound is known",
                reg.lower
            )))
        }
    }
    linear_resolution_unchecked(v, n, i_max)
}

/// The construction behind [`linear_relative_resolution`] without the
/// regularity precondition. Builds the stages `F^0, ..., F^{i_max}`.
pub fn linear_resolution_unchecked<K: Field>(
    v: &TruncatedModule<K>,
    n: usize,
    i_max: usize,
) -> Result<LinearResolution<K>, HomologyError> {
    let (mut kmod, _) = truncate(v, n.min(v.window() + 1));
    let mut stages = Vec::new();
    let mut complete = kmod.is_zero();
    let mut window_exhausted = false;
    let mut i = 0;
    while !complete && i <= i_max {
        let r = n + i;
        if r > v.window() {
            window_exhausted = true;
            break;
        }
        let k = kmod.field().clone();
        let mut parts = Vec::new();
        for (xi, x) in kmod.objects().iter().enumerate() {
            if x.rank() == r && kmod.dim_at(xi) > 0 {
                parts.push(CoverPart { rep: kmod.endo_rep(x), section: Matrix::identity(&k, kmod.dim_at(xi)) });
            }
        }
        let (module, map, layers) = assemble_cover(&kmod, &parts)?;
        let (next, _) = kernel_of(&module, &map);
        let surjective = (0..kmod.dims().len()).all(|xi| module.dim_at(xi) - next.dim_at(xi) == kmod.dim_at(xi));
        let g = gd(&kmod).value;
        let generated_at_rank = surjective && g == r as i64;
        let h0 = layers.iter().map(|l| l.len()).collect();
        stages.push(LinearStage { rank: r, parts, module, map, h0, generated_at_rank });
        if !surjective {
            return Err(HomologyError::Check(format!("stage {} is not generated in rank {}", i, r)));
        }
        kmod = next;
        complete = kmod.is_zero();
        i += 1;
    }
    Ok(LinearResolution { n, stages, complete, window_exhausted })
}
