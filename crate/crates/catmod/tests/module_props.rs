mod common;

use catmod::category::*;
use catmod::exactla::*;
use catmod::inductive::Inductive;
use catmod::modrep::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const WINDOW: usize = 4;

fn sample(family: usize, seed: u64, field: FieldSpec) -> Presentation {
    let spec = common::sweep_specs()[family];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::random_presentation(spec, field, &mut rng, 2, 2, 2)
}

fn exactness<K: Field>(source: &TruncatedModule<K>, f: &ModuleMap<K>, target: &TruncatedModule<K>) -> Result<(), TestCaseError> {
    prop_assert!(f.is_natural(source, target));
    let (ker, inc) = kernel_of(source, f);
    let (img, _) = image_of(f, target);
    let (cok, proj) = cokernel_of(f, target);
    prop_assert!(inc.is_natural(&ker, source));
    prop_assert!(proj.is_natural(target, &cok));
    prop_assert!(f.compose(&inc).is_zero());
    prop_assert!(proj.compose(f).is_zero());
    for xi in 0..source.dims().len() {
        prop_assert_eq!(ker.dim_at(xi) + img.dim_at(xi), source.dim_at(xi));
        prop_assert_eq!(img.dim_at(xi) + cok.dim_at(xi), target.dim_at(xi));
    }
    Ok(())
}

/// `realize(present(v))` is isomorphic to `v`: the generators `present` picks
/// give a surjection from the free module that kills every relation, and the
/// dimensions agree.
fn round_trip<K: Field>(v: &TruncatedModule<K>) -> Result<(), TestCaseError> {
    let k = v.field();
    let p = present(v).unwrap();
    let w = realize(&p, v.window(), k).unwrap();
    prop_assert_eq!(w.dims(), v.dims());
    let h = h0(v);
    let mut gens: Vec<Element<K>> = Vec::new();
    for (xi, x) in v.objects().iter().enumerate() {
        for &c in &h.lower[xi].quotient().complement {
            let mut e = vec![k.zero(); v.dim_at(xi)];
            e[c] = k.one();
            gens.push((x.clone(), e));
        }
    }
    prop_assert_eq!(&gens.iter().map(|(o, _)| o.clone()).collect::<Vec<_>>(), &p.generators);
    let (_, fb, map) = free_cover_map(v, &gens).unwrap();
    for (xi, c) in map.components.iter().enumerate() {
        prop_assert_eq!(c.rank(), v.dim_at(xi));
    }
    for r in 0..p.relations.len() {
        let Some(y) = p.relation_target(r).unwrap() else { continue };
        let yi = v.index_of(&y).unwrap();
        let mut e = vec![k.zero(); map.components[yi].cols()];
        for t in &p.relations[r].terms {
            let i = fb.index(t.gen, yi, &t.morphism).unwrap();
            let c = k.from_ratio(t.coeff.0, t.coeff.1).unwrap();
            e[i] = k.add(&e[i], &c);
        }
        prop_assert!(map.components[yi].mul_vec(&e).iter().all(|x| k.is_zero(x)));
    }
    Ok(())
}

fn checks<K: Field>(p: &Presentation, k: &K) -> Result<(), TestCaseError> {
    let v = realize(p, WINDOW, k).unwrap();
    prop_assert!(v.check_functoriality(WINDOW, 3).is_ok());
    let top = p.generators.iter().map(|g| g.rank() as i64).max().unwrap();
    prop_assert!(gd(&v).value <= top);
    round_trip(&v)?;
    let ind = Inductive::new(&v).unwrap();
    exactness(&ind.vd, &ind.theta, &ind.fv)?;
    let (q, proj) = below(&v, 2);
    exactness(&v, &proj, &q)?;
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn realized_modules_are_functorial_and_exact(family in 0usize..7, seed in any::<u64>()) {
        checks(&sample(family, seed, FieldSpec::Rationals), &Rationals)?;
        let f3 = PrimeField::new(3).unwrap();
        checks(&sample(family, seed, FieldSpec::Prime(3)), &f3)?;
    }

    #[test]
    fn induced_modules_have_h0_concentrated_at_their_object(family in 0usize..7, rank in 0usize..3, which in 0usize..3) {
        let spec = common::sweep_specs()[family];
        let k = Rationals;
        for x in objects_of_rank(&spec, rank) {
            let t = match which {
                0 => GroupRep::trivial(spec, &k, &x, 2),
                1 => GroupRep::sign(spec, &k, &x),
                _ => GroupRep::regular(spec, &k, &x),
            };
            let m = induced_module(spec, &k, WINDOW, &t).unwrap();
            prop_assert!(m.check_functoriality(WINDOW, 3).is_ok());
            let h = h0(&m);
            for (o, &d) in m.objects().iter().zip(&h.dims) {
                prop_assert_eq!(d, if *o == x { t.dim } else { 0 });
            }
        }
    }

    #[test]
    fn direct_sums_add_dimensions(a in 0usize..7, seed in any::<u64>()) {
        let k = Rationals;
        let v = realize(&sample(a, seed, FieldSpec::Rationals), WINDOW, &k).unwrap();
        let w = realize(&sample(a, seed ^ 0xabcd, FieldSpec::Rationals), WINDOW, &k).unwrap();
        let s = direct_sum(&v, &w).unwrap();
        prop_assert!(s.check_functoriality(WINDOW, 2).is_ok());
        for xi in 0..s.dims().len() {
            prop_assert_eq!(s.dim_at(xi), v.dim_at(xi) + w.dim_at(xi));
        }
        prop_assert_eq!(gd(&s).value, gd(&v).value.max(gd(&w).value));
    }
}
