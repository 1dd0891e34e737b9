use catmod::category::*;
use proptest::prelude::*;

fn all_specs() -> Vec<CategorySpec> {
    let mut v = vec![CategorySpec::fi(), CategorySpec::oi()];
    for d in 1..=3 {
        for f in [Family::Nd, Family::FId, Family::OId, Family::FIpowd, Family::OIpowd] {
            v.push(CategorySpec::new(f, d).unwrap());
        }
    }
    v
}

/// Counts hom-sets by running over every function between the underlying
/// sets and every coloring of the whole target, keeping the valid ones.
fn brute_hom_count(spec: &CategorySpec, x: &ObjectId, y: &ObjectId) -> u128 {
    if spec.family() == Family::Nd {
        return x.0.iter().zip(&y.0).all(|(a, b)| a <= b) as u128;
    }
    let ok_map = |m: usize, n: usize, code: usize| -> bool {
        let mut f = Vec::new();
        let mut c = code;
        for _ in 0..m {
            f.push(c % n.max(1));
            c /= n.max(1);
        }
        if m > 0 && n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        for &v in &f {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        !spec.ordered() || f.windows(2).all(|w| w[0] < w[1])
    };
    let count_coord = |m: usize, n: usize| -> u128 {
        let total = n.max(1).pow(m as u32);
        (0..total).filter(|&code| ok_map(m, n, code)).count() as u128
    };
    if spec.colored() {
        let (m, n) = (x.0[0], y.0[0]);
        let maps = count_coord(m, n);
        // colorings of the complement of one fixed image {0..m}: arrays over
        // the target whose zero set is exactly that image
        let base = spec.d() + 1;
        let col = (0..base.pow(n as u32))
            .filter(|&code| {
                let mut c = code;
                (0..n).all(|z| {
                    let v = c % base;
                    c /= base;
                    (v == 0) == (z < m)
                })
            })
            .count() as u128;
        maps * col
    } else {
        x.0.iter().zip(&y.0).map(|(&m, &n)| count_coord(m, n)).product()
    }
}

#[test]
fn hom_counts_match_closed_forms_and_brute_force() {
    for spec in all_specs() {
        let objs = objects_up_to(&spec, 5);
        for x in &objs {
            for y in &objs {
                let listed = hom(&spec, x, y);
                let closed = hom_count(&spec, x, y);
                assert_eq!(listed.len() as u128, closed, "{} {} -> {}", spec, x, y);
                if y.rank() <= 4 {
                    assert_eq!(brute_hom_count(&spec, x, y), closed, "{} {} -> {}", spec, x, y);
                }
                let mut sorted = listed.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted, listed, "hom-set not sorted or has duplicates");
                for m in &listed {
                    validate(&spec, m).unwrap();
                }
            }
        }
    }
}

#[test]
fn same_rank_objects_have_no_maps_between_them() {
    for spec in all_specs() {
        for r in 0..=4 {
            let objs = objects_of_rank(&spec, r);
            for x in &objs {
                for y in &objs {
                    if x != y {
                        assert!(hom(&spec, x, y).is_empty());
                    }
                }
            }
        }
        for x in objects_up_to(&spec, 4) {
            for y in objects_up_to(&spec, 4) {
                if !hom(&spec, &x, &y).is_empty() {
                    assert!(x.rank() <= y.rank());
                }
            }
        }
    }
}

#[test]
fn associativity_and_identities() {
    for spec in all_specs() {
        let objs = objects_up_to(&spec, 4);
        for x in &objs {
            for y in objs.iter().filter(|y| x.leq(y)) {
                let fs = hom(&spec, x, y);
                for f in &fs {
                    assert_eq!(&compose(&spec, &identity(&spec, y), f).unwrap(), f);
                    assert_eq!(&compose(&spec, f, &identity(&spec, x)).unwrap(), f);
                }
                for z in objs.iter().filter(|z| y.leq(z)) {
                    let gs = hom(&spec, y, z);
                    for w in objs.iter().filter(|w| z.leq(w) && w.rank() <= 4) {
                        let hs = hom(&spec, z, w);
                        for f in fs.iter().take(3) {
                            for g in gs.iter().take(3) {
                                for h in hs.iter().take(3) {
                                    let a = compose(&spec, h, &compose(&spec, g, f).unwrap()).unwrap();
                                    let b = compose(&spec, &compose(&spec, h, g).unwrap(), f).unwrap();
                                    assert_eq!(a, b);
                                    validate(&spec, &a).unwrap();
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn self_embedding_is_functorial() {
    for spec in all_specs() {
        let objs = objects_up_to(&spec, 3);
        for i in 0..spec.shift_count() {
            for x in &objs {
                assert_eq!(
                    self_embed(&spec, i, &identity(&spec, x)).unwrap(),
                    identity(&spec, &self_embed_object(&spec, i, x).unwrap())
                );
                for y in objs.iter().filter(|y| x.leq(y)) {
                    for z in objs.iter().filter(|z| y.leq(z)) {
                        for f in hom(&spec, x, y) {
                            for g in hom(&spec, y, z) {
                                let lhs = self_embed(&spec, i, &compose(&spec, &g, &f).unwrap()).unwrap();
                                let rhs = compose(
                                    &spec,
                                    &self_embed(&spec, i, &g).unwrap(),
                                    &self_embed(&spec, i, &f).unwrap(),
                                )
                                .unwrap();
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
        assert!(self_embed(&spec, spec.shift_count(), &identity(&spec, &objs[0])).is_err());
    }
}

#[test]
fn theta_is_natural() {
    for spec in all_specs() {
        let objs = objects_up_to(&spec, 3);
        for x in &objs {
            for y in objs.iter().filter(|y| x.leq(y)) {
                let tx = theta_morphisms(&spec, x);
                let ty = theta_morphisms(&spec, y);
                assert_eq!(tx.len(), spec.d());
                for f in hom(&spec, x, y) {
                    for l in 0..spec.d() {
                        let i = if spec.single_shift() { 0 } else { l };
                        let lhs = compose(&spec, &self_embed(&spec, i, &f).unwrap(), &tx[l]).unwrap();
                        let rhs = compose(&spec, &ty[l], &f).unwrap();
                        assert_eq!(lhs, rhs, "{} f={} l={}", spec, f, l);
                    }
                }
            }
        }
    }
}

fn compose_word(spec: &CategorySpec, word: &[(ObjectId, Gen)], start: &ObjectId) -> Morphism {
    let mut acc = identity(spec, start);
    for (src, g) in word {
        let m = generator(spec, src, *g);
        assert_eq!(&m.source, src);
        acc = compose(spec, &m, &acc).unwrap();
    }
    acc
}

#[test]
fn every_morphism_factors_through_generators() {
    for spec in all_specs() {
        let objs = objects_up_to(&spec, 4);
        for x in &objs {
            for y in objs.iter().filter(|y| x.leq(y)) {
                for m in hom(&spec, x, y) {
                    let word = factor(&spec, &m);
                    assert_eq!(compose_word(&spec, &word, x), m, "{} {}", spec, m);
                }
            }
        }
    }
}

#[test]
fn covers_into_lists_all_covers() {
    for spec in all_specs() {
        for y in objects_up_to(&spec, 4) {
            let listed = covers_into(&spec, &y);
            for (x, c) in &listed {
                assert_eq!(generator(&spec, x, Gen::Cover(*c)).target, y);
            }
            let expected: usize = objects_of_rank(&spec, y.rank().saturating_sub(1))
                .iter()
                .filter(|_| y.rank() > 0)
                .map(|x| (0..cover_count(&spec, x)).filter(|&c| generator_target(&spec, x, Gen::Cover(c)) == y).count())
                .sum();
            assert_eq!(listed.len(), expected);
        }
    }
}

proptest! {
    #[test]
    fn random_triples_associate(seed in 0u64..5000, fam in 0usize..7, d in 1usize..=3) {
        let family = Family::ALL[fam];
        let d = if matches!(family, Family::FI | Family::OI) { 1 } else { d };
        let spec = CategorySpec::new(family, d).unwrap();
        let objs = objects_up_to(&spec, 5);
        let pick = |s: u64| objs[(s as usize) % objs.len()].clone();
        let mut chain = vec![pick(seed), pick(seed / 7), pick(seed / 49)];
        chain.sort();
        prop_assume!(chain[0].leq(&chain[1]) && chain[1].leq(&chain[2]));
        let f = hom(&spec, &chain[0], &chain[1]);
        let g = hom(&spec, &chain[1], &chain[2]);
        let f = &f[(seed as usize) % f.len()];
        let g = &g[(seed as usize / 3) % g.len()];
        let gf = compose(&spec, g, f).unwrap();
        prop_assert!(validate(&spec, &gf).is_ok());
        let word = factor(&spec, &gf);
        prop_assert_eq!(compose_word(&spec, &word, &chain[0]), gf);
    }
}
