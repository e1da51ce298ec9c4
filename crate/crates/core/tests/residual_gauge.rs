use std::collections::BTreeMap;

use latmap::classify::degree_three_residual;
use latmap::consistency::{equations, first_stage, second_stage_residual};
use latmap::exactpoly::rational::frac;
use latmap::exactpoly::monomials_of_degree;
use latmap::gauge::{conjugate, kernel_element, GaugeTransformation, Increment, KernelParameters};
use latmap::lattice::{component_keys, enumerate_faces};
use latmap::maps::expand_darboux;
use latmap::{Face, MapFamily, Polynomial, Rational, Var};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    frac(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let r = small_rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

fn random_part(rng: &mut ChaCha8Rng, face: Face, dir: u8, degree: u32) -> Polynomial {
    let mut vars: Vec<Var> = face.roles(dir).iter().map(Face::var).collect();
    vars.sort();
    let mut p = Polynomial::zero();
    for m in monomials_of_degree(&vars, degree) {
        if rng.gen_bool(0.4) {
            p.add_term(m, small_rational(rng));
        }
    }
    p
}

fn random_family(rng: &mut ChaCha8Rng, order: u32) -> MapFamily {
    let mut fam = MapFamily::identity(4, order);
    for (f, d) in component_keys(4) {
        for m in 2..=order {
            fam.set_part(f, d, m, random_part(rng, f, d, m)).unwrap();
        }
    }
    fam
}

#[test]
fn swapping_directions_negates_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let fam = random_family(&mut rng, 3);
        let report = second_stage_residual(&fam, 4);
        let images = first_stage(&fam);
        for (face, k, l) in equations(4) {
            let shift = |a: u8, b: u8| {
                let assign: BTreeMap<Var, Polynomial> = face
                    .roles(a)
                    .iter()
                    .map(|f| (f.var(), images[&b].images[f].clone()))
                    .collect();
                images[&a].images[&face].subst(&assign, 4).unwrap()
            };
            let swapped = shift(l, k) - shift(k, l);
            let entry = report.entry(face, k, l).unwrap();
            for d in 2..=4 {
                assert_eq!(swapped.homogeneous_part(d), -entry.slice(d));
            }
        }
    }
}

#[test]
fn residual_is_permutation_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let fam = random_family(&mut rng, 3);
        let mut perm = vec![1u8, 2, 3, 4];
        perm.shuffle(&mut rng);
        let sigma = |a: u8| perm[a as usize - 1];
        let rename = |p: &Polynomial| {
            p.rename(|v| {
                let f = Face::from_var(v).unwrap();
                Face::new(sigma(f.i()), sigma(f.j())).var()
            })
        };
        let before = second_stage_residual(&fam, 4);
        let after = second_stage_residual(&fam.permuted(&perm), 4);
        for e in &before.entries {
            let (k, l) = (sigma(e.k), sigma(e.l));
            let face = Face::new(sigma(e.face.i()), sigma(e.face.j()));
            let image = after.entry(face, k.min(l), k.max(l)).unwrap();
            for d in 2..=4 {
                let want = rename(&e.slice(d));
                let got = image.slice(d);
                assert_eq!(if k < l { got } else { -got }, want);
            }
        }
    }
}

#[test]
fn residual_slice_sees_only_lower_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let fam = random_family(&mut rng, 4);
        let full = second_stage_residual(&fam, 4);
        for d in 3..=4 {
            let cut = second_stage_residual(&fam.with_order(d - 1).with_order(4), 4);
            for (a, b) in full.entries.iter().zip(&cut.entries) {
                assert_eq!(a.slice(d), b.slice(d));
            }
        }
    }
}

#[test]
fn degree_three_slice_matches_quadratic_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let fam = random_family(&mut rng, 2);
        let a2: Increment = fam.keys().into_iter().map(|(f, d)| ((f, d), fam.part(f, d, 2))).collect();
        let report = second_stage_residual(&fam, 3);
        for e in &report.entries {
            assert_eq!(e.slice(3), degree_three_residual(&a2, e.face, e.k, e.l));
        }
    }
}

fn random_b(rng: &mut ChaCha8Rng) -> BTreeMap<Face, Rational> {
    enumerate_faces(4).into_iter().map(|f| (f, small_rational(rng))).collect()
}

/// x_ik x_jk(−m b_ij x_ij^{m−1} + b_ik x_ik^{m−1} + b_jk x_jk^{m−1}), written
/// out per component.
fn shift_formula(b: &BTreeMap<Face, Rational>, face: Face, dir: u8, m: u32) -> Polynomial {
    let [fij, fik, fjk] = face.roles(dir);
    let x = |f: Face| Polynomial::var(f.var());
    let pow = |f: Face| (0..m - 1).fold(Polynomial::one(), |acc, _| acc * x(f));
    let c = |r: &Rational| Polynomial::constant(r.clone());
    let mm = Rational::from_integer((m as i64).into());
    x(fik) * x(fjk) * (c(&(-mm * &b[&fij])) * pow(fij) + c(&b[&fik]) * pow(fik) + c(&b[&fjk]) * pow(fjk))
}

#[test]
fn point_shift_matches_closed_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 2..=4u32 {
        let fam = expand_darboux(m + 2);
        for _ in 0..20 {
            let b = random_b(&mut rng);
            let out = conjugate(&fam, &GaugeTransformation::point_shift(&b, m)).unwrap();
            for (f, d) in fam.keys() {
                for s in 2..=m {
                    assert_eq!(out.part(f, d, s), fam.part(f, d, s));
                }
                let shift = out.part(f, d, m + 1) - fam.part(f, d, m + 1);
                assert_eq!(shift, shift_formula(&b, f, d, m));
                let ker = kernel_element(&KernelParameters { b: b.clone() }, m);
                assert_eq!(shift, -ker[&(f, d)].clone());
            }
        }
    }
}

fn random_gauge(rng: &mut ChaCha8Rng, order: u32) -> GaugeTransformation {
    let mut g = GaugeTransformation::identity();
    for f in enumerate_faces(4) {
        if rng.gen_bool(0.5) {
            g = g.with_scaling(f, nonzero_rational(rng));
        }
        for m in 2..order {
            if rng.gen_bool(0.3) {
                g = g.with_point_term(f, m, small_rational(rng));
            }
        }
    }
    g
}

#[test]
fn conjugation_is_a_group_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let order = 5;
    let fam = expand_darboux(order);
    for _ in 0..10 {
        let g1 = random_gauge(&mut rng, order);
        let g2 = random_gauge(&mut rng, order);
        let step = conjugate(&conjugate(&fam, &g1).unwrap(), &g2).unwrap();
        let once = conjugate(&fam, &g1.then(&g2, order)).unwrap();
        assert_eq!(step, once);
        let back = conjugate(&step, &g1.then(&g2, order).inverse(order).unwrap()).unwrap();
        assert_eq!(back, fam);
    }
}

#[test]
fn conjugation_preserves_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let order = 5;
    for _ in 0..5 {
        let g = random_gauge(&mut rng, order);
        let good = conjugate(&expand_darboux(order), &g).unwrap();
        assert!(second_stage_residual(&good, order).is_zero());
        let bad = random_family(&mut rng, 3).with_order(order);
        let before = second_stage_residual(&bad, order).is_zero();
        let after = second_stage_residual(&conjugate(&bad, &g).unwrap(), order).is_zero();
        assert_eq!(before, after);
    }
}
