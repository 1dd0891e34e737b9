//! Helpers shared by the integration tests: random presentations and a
//! brute-force Tor oracle that never touches the library's resolutions.
#![allow(dead_code)]

use std::collections::HashMap;

use catmod::category::*;
use catmod::exactla::*;
use catmod::modrep::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn d_families() -> Vec<Family> {
    vec![Family::FId, Family::OId, Family::FIpowd, Family::OIpowd, Family::Nd]
}

/// One spec per family, `d = 2` where the family takes a parameter.
pub fn sweep_specs() -> Vec<CategorySpec> {
    let mut v = vec![CategorySpec::fi(), CategorySpec::oi()];
    for f in d_families() {
        v.push(CategorySpec::new(f, 2).unwrap());
    }
    v
}

/// Random presentation: generators at ranks ≤ `max_rank`, relations landing
/// at ranks ≤ `max_rank`, small integer coefficients.
pub fn random_presentation<R: Rng>(
    spec: CategorySpec,
    field: FieldSpec,
    rng: &mut R,
    max_rank: usize,
    max_gens: usize,
    max_rels: usize,
) -> Presentation {
    let objs = objects_up_to(&spec, max_rank);
    let ngens = rng.gen_range(1..=max_gens);
    let gens: Vec<ObjectId> = (0..ngens)
        .map(|_| {
            // favour low ranks so that relations have room
            let r = rng.gen_range(0..=max_rank).min(rng.gen_range(0..=max_rank));
            objects_of_rank(&spec, r).choose(rng).unwrap().clone()
        })
        .collect();
    let mut p = Presentation::new(spec, field, gens.clone());
    let nrels = rng.gen_range(0..=max_rels);
    for _ in 0..nrels {
        let targets: Vec<&ObjectId> = objs.iter().filter(|y| gens.iter().any(|g| g.leq(y))).collect();
        let y = (*targets.choose(rng).unwrap()).clone();
        let mut terms = Vec::new();
        for (g, x) in gens.iter().enumerate() {
            let hs = hom(&spec, x, &y);
            if hs.is_empty() || (terms.len() > 0 && rng.gen_bool(0.4)) {
                continue;
            }
            for _ in 0..rng.gen_range(1..=2) {
                let mut c = rng.gen_range(-2i64..=2);
                if c == 0 {
                    c = 1;
                }
                terms.push(Term { gen: g, morphism: hs.choose(rng).unwrap().clone(), coeff: (c, 1) });
            }
        }
        if !terms.is_empty() {
            p.relations.push(Relation { terms });
        }
    }
    p
}

/// An explicit free module `⊕ M(x_g)` with basis `(g, h: x_g → y)` at `y`.
struct Free {
    gens: Vec<ObjectId>,
    basis: Vec<Vec<(usize, Morphism)>>,
    index: Vec<HashMap<(usize, Morphism), usize>>,
}

impl Free {
    fn new(spec: &CategorySpec, objects: &[ObjectId], gens: Vec<ObjectId>) -> Self {
        let mut basis = Vec::new();
        let mut index = Vec::new();
        for y in objects {
            let mut b = Vec::new();
            for (g, x) in gens.iter().enumerate() {
                for h in hom(spec, x, y) {
                    b.push((g, h));
                }
            }
            index.push(b.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect());
            basis.push(b);
        }
        Free { gens, basis, index }
    }
}

/// The ambient of a syzygy: the input module or an explicit free module.
enum Ambient<'a, K: Field> {
    Input(&'a TruncatedModule<K>),
    Free(Free),
}

impl<K: Field> Ambient<'_, K> {
    fn dim(&self, yi: usize) -> usize {
        match self {
            Ambient::Input(v) => v.dim_at(yi),
            Ambient::Free(p) => p.basis[yi].len(),
        }
    }

    fn act(&self, spec: &CategorySpec, k: &K, objects: &[ObjectId], f: &Morphism, w: &[K::E]) -> Vec<K::E> {
        match self {
            Ambient::Input(v) => v.act_vec(f, w),
            Ambient::Free(p) => {
                let yi = objects.iter().position(|o| *o == f.source).unwrap();
                let zi = objects.iter().position(|o| *o == f.target).unwrap();
                let mut out = vec![k.zero(); p.basis[zi].len()];
                for (j, c) in w.iter().enumerate() {
                    if k.is_zero(c) {
                        continue;
                    }
                    let (g, h) = &p.basis[yi][j];
                    let fh = compose(spec, f, h).unwrap();
                    let t = p.index[zi][&(*g, fh)];
                    out[t] = k.add(&out[t], c);
                }
                out
            }
        }
    }
}

fn random_combination<K: Field, R: Rng>(k: &K, basis: &Matrix<K>, rng: &mut R) -> Vec<K::E> {
    let mut out = vec![k.zero(); basis.cols()];
    for r in 0..basis.rows() {
        let c = k.random(rng);
        for (j, e) in basis.row(r).iter().enumerate() {
            out[j] = k.add(&out[j], &k.mul(&c, e));
        }
    }
    out
}

/// Row echelon form grown one vector at a time.
struct Echelon<E> {
    rows: Vec<(usize, Vec<E>)>,
}

impl<E: Clone> Echelon<E> {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` to the span; false if it was already there.
    fn insert<K: Field<E = E>>(&mut self, k: &K, mut v: Vec<E>) -> bool {
        for (p, row) in &self.rows {
            if !k.is_zero(&v[*p]) {
                let c = k.neg(&v[*p]);
                for (a, b) in v.iter_mut().zip(row) {
                    *a = k.add(a, &k.mul(&c, b));
                }
            }
        }
        let Some(p) = v.iter().position(|e| !k.is_zero(e)) else { return false };
        let inv = k.inv(&v[p]);
        for a in v.iter_mut() {
            *a = k.mul(a, &inv);
        }
        self.rows.push((p, v));
        true
    }
}

/// `dim Tor_i(V)_x` for `i ≤ i_max` at every window object, computed from an
/// explicit free resolution. Generators at each object are random elements
/// added until they, their automorphism images and the image of the lower
/// objects span the syzygy there.
pub fn tor_oracle<K: Field, R: Rng>(v: &TruncatedModule<K>, i_max: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let spec = *v.spec();
    let k = v.field().clone();
    let objects: Vec<ObjectId> = v.objects().to_vec();
    let n_obj = objects.len();
    let mut ambient = Ambient::Input(v);
    let mut z: Vec<Subspace<K>> = (0..n_obj).map(|i| Subspace::full(&k, v.dim_at(i))).collect();
    // layer[i][x]: number of free basis elements of P^i sitting at x itself
    let mut layer: Vec<Vec<usize>> = Vec::new();
    // r[i][x]: rank of Z^i_x projected to the layer coordinates of P^{i-1}
    let mut r: Vec<Vec<usize>> = vec![vec![0; n_obj]];
    for _ in 0..=i_max {
        let mut gens = Vec::new();
        let mut images: Vec<Vec<K::E>> = Vec::new();
        for (xi, x) in objects.iter().enumerate() {
            let target = z[xi].dim();
            let mut span = Echelon::new();
            'lower: for (yi, y) in objects.iter().enumerate() {
                // every rank-raising map factors through the rank just below
                if y.rank() + 1 != x.rank() || !y.leq(x) {
                    continue;
                }
                for f in hom(&spec, y, x) {
                    for b in z[yi].basis().row_vecs() {
                        if span.rank() == target {
                            break 'lower;
                        }
                        span.insert(&k, ambient.act(&spec, &k, &objects, &f, &b));
                    }
                }
            }
            while span.rank() < target {
                let w = random_combination(&k, z[xi].basis(), rng);
                if span.insert(&k, w.clone()) {
                    for sigma in hom(&spec, x, x) {
                        span.insert(&k, ambient.act(&spec, &k, &objects, &sigma, &w));
                    }
                    gens.push(x.clone());
                    images.push(w);
                }
            }
        }
        let p = Free::new(&spec, &objects, gens);
        let mut kernels = Vec::new();
        let mut lay = vec![0; n_obj];
        let mut rank_next = vec![0; n_obj];
        for (yi, y) in objects.iter().enumerate() {
            let cols: Vec<Vec<K::E>> =
                p.basis[yi].iter().map(|(g, h)| ambient.act(&spec, &k, &objects, h, &images[*g])).collect();
            let layer_idx: Vec<usize> =
                p.basis[yi].iter().enumerate().filter(|(_, (g, _))| p.gens[*g] == *y).map(|(j, _)| j).collect();
            lay[yi] = layer_idx.len();
            let m = Matrix::from_rows(&k, cols.len(), (0..ambient.dim(yi)).map(|row| cols.iter().map(|c| c[row].clone()).collect()).collect());
            let ker = m.kernel();
            if !layer_idx.is_empty() {
                rank_next[yi] = ker.basis().select_cols(&layer_idx).rank();
            }
            kernels.push(ker);
        }
        layer.push(lay);
        r.push(rank_next);
        ambient = Ambient::Free(p);
        z = kernels;
    }
    (0..=i_max).map(|i| (0..n_obj).map(|x| layer[i][x] - r[i][x] - r[i + 1][x]).collect()).collect()
}
