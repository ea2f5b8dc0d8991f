mod common;

use std::sync::Arc;

use celeste_core::library::*;
use celeste_core::{
    integrate, newton_resolve, relative_canonical, stringy_chern, zeta_global, zeta_local, Atom,
    Cone, ConstructibleSet, Germ, ResolutionTower, Scalar, SystemDivisor, Q,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GERMS: &[&[[i64; 2]]] = &[
    &[[3, 0], [0, 2]],
    &[[5, 0], [0, 2]],
    &[[4, 0], [0, 3]],
    &[[2, 0], [0, 2]],
    &[[4, 0], [0, 2]],
    &[[1, 0]],
    &[[1, 1]],
    &[[2, 1]],
    &[[0, 4], [1, 2], [2, 1], [4, 0]],
    &[[0, 5], [2, 2], [6, 0]],
    &[[1, 3], [4, 0]],
    &[[7, 0], [0, 3]],
];

fn origin() -> Cone {
    Cone::new(vec![0, 1])
}

fn germ_tower(exps: &[[i64; 2]]) -> ResolutionTower {
    let t = newton_resolve(&ResolutionTower::new(quadrant()), &polygon(exps)).unwrap();
    if t.height() == 0 {
        t.extend(&lv(&[1, 1])).unwrap()
    } else {
        t
    }
}

#[test]
fn local_zeta_matches_the_resolution_graph() {
    for (k, exps) in GERMS.iter().enumerate() {
        let t = germ_tower(exps);
        let g = Germ::new(&format!("g{k}"), exps.iter().copied()).unwrap();
        let z = zeta_local(&t, &g, &origin()).unwrap();
        let oracle = plane_germ_zeta_oracle(t.top().rays(), exps);
        assert_eq!(z.value, oracle, "germ {exps:?}");
    }
}

#[test]
fn local_zeta_is_independent_of_extra_blow_ups() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (k, exps) in GERMS.iter().enumerate() {
        let g = Germ::new(&format!("g{k}"), exps.iter().copied()).unwrap();
        let t = germ_tower(exps);
        let reference = zeta_local(&t, &g, &origin()).unwrap();
        let mut bigger = t.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let fan = bigger.top().clone();
            let c = &fan.max_cones()[rng.gen_range(0..fan.max_cones().len())];
            bigger = bigger
                .extend(&(fan.ray(c.rays()[0]) + fan.ray(c.rays()[1])))
                .unwrap();
        }
        let z = zeta_local(&bigger, &g, &origin()).unwrap();
        assert_eq!(z.value, reference.value, "germ {exps:?}");
        assert_eq!(z.value, plane_germ_zeta_oracle(bigger.top().rays(), exps));
    }
}

#[test]
fn local_poles_are_candidate_poles() {
    for (k, exps) in GERMS.iter().enumerate() {
        let t = germ_tower(exps);
        let g = Germ::new(&format!("g{k}"), exps.iter().copied()).unwrap();
        let z = zeta_local(&t, &g, &origin()).unwrap();
        let k = relative_canonical(&t, 0, t.height()).unwrap();
        let mut candidates = vec![-Q::from_integer(1.into())];
        for v in t.top().rays() {
            let a = k.get(v).cloned().unwrap_or_default();
            let (n, _) = celeste_core::newton_data(&g.polygon, v).unwrap();
            if n > 0 {
                candidates.push(-(a + Q::from_integer(1.into())) / Q::from_integer(n.into()));
            }
        }
        for (p, _) in &z.poles {
            assert!(
                candidates.contains(p),
                "germ {exps:?}: pole {p} not a candidate"
            );
        }
    }
}

#[test]
fn global_zeta_matches_strata_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, fan) in smooth_complete_corpus() {
        for _ in 0..3 {
            let t = ResolutionTower::new(fan.clone());
            let mut d = SystemDivisor::zero();
            let mut coeffs = Vec::new();
            for v in fan.rays() {
                let c = match rng.gen_range(0..3) {
                    0 => Scalar::zero(),
                    1 => Scalar::m(),
                    _ => affine(rng.gen_range(1..3), rng.gen_range(0..3)),
                };
                coeffs.push(c.clone());
                d = d.with(Atom::Boundary(v.clone()), c).unwrap();
            }
            let z = zeta_global(&t, &d).unwrap();
            assert_eq!(z.value, toric_zeta_oracle(&fan, &coeffs), "{name}");
            let zero = Q::from_integer(0.into());
            if coeffs.iter().all(|c| c.eval(&zero).unwrap() == zero) {
                let chi = Q::from_integer((fan.max_cones().len() as i64).into());
                assert_eq!(z.value.eval(&zero).unwrap(), chi, "{name}");
            }
        }
    }
}

#[test]
fn global_zeta_of_a_fiber() {
    let t = ResolutionTower::new(p1_x_p1());
    let d = SystemDivisor::zero()
        .with(Atom::Boundary(lv(&[0, 1])), Scalar::m())
        .unwrap();
    assert_eq!(zeta_global(&t, &d).unwrap().value, scalar("(2m+4)/(m+1)"));
}

#[test]
fn integrals_agree_across_nested_towers() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..12 {
        let base = if rng.gen_bool(0.5) {
            projective_plane()
        } else {
            blown_up_plane()
        };
        let steps = rng.gen_range(0..=2);
        let small = random_smooth_tower(&mut rng, base, steps);
        let mut big = small.clone();
        for _ in 0..rng.gen_range(1..=2) {
            let fan = big.top().clone();
            let cones: Vec<&Cone> = fan.cones().iter().filter(|c| c.dim() == 2).collect();
            let c = cones[rng.gen_range(0..cones.len())];
            big = big
                .extend(&(fan.ray(c.rays()[0]) + fan.ray(c.rays()[1])))
                .unwrap();
        }
        let mut d = SystemDivisor::zero();
        for v in small.base().rays() {
            d = d
                .with(
                    Atom::Boundary(v.clone()),
                    Scalar::from_int(rng.gen_range(0..3)),
                )
                .unwrap();
        }
        let s = ConstructibleSet::ambient();
        let a = integrate(&small, &d, &s).unwrap();
        let b = integrate(&big, &d, &s).unwrap();
        for k in 0..=small.height() {
            let (x, y) = (a.manifestation(k).unwrap(), b.manifestation(k).unwrap());
            assert!(
                x.equals(y).unwrap(),
                "level {k} of {:?}",
                big.subdivision_rays()
            );
        }
    }
}

#[test]
fn stringy_class_is_tower_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let crepant = ResolutionTower::new(weighted_112())
        .extend(&lv(&[0, -1]))
        .unwrap();
    let reference = stringy_chern(&crepant).unwrap();
    let resolved = integrate(
        &crepant,
        &SystemDivisor::zero(),
        &ConstructibleSet::ambient(),
    )
    .unwrap();
    for _ in 0..8 {
        let mut t = crepant.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let fan = t.top().clone();
            let c = &fan.max_cones()[rng.gen_range(0..fan.max_cones().len())];
            t = t
                .extend(&(fan.ray(c.rays()[0]) + fan.ray(c.rays()[1])))
                .unwrap();
        }
        let s = stringy_chern(&t).unwrap();
        assert_eq!(s.class, reference.class);
        assert_eq!(s.euler_number().unwrap(), Scalar::from_int(4));
        let c = integrate(&t, &SystemDivisor::zero(), &ConstructibleSet::ambient()).unwrap();
        assert!(c
            .manifestation(1)
            .unwrap()
            .equals(resolved.manifestation(1).unwrap())
            .unwrap());
    }
}

#[test]
fn stringy_euler_number_of_a_singular_surface() {
    // P(1,1,2) resolved without the crepant ray first: (1,-1) then (0,-1)
    let t = ResolutionTower::with_subdivisions(weighted_112(), &[lv(&[1, -1]), lv(&[0, -1])]);
    let t = t.unwrap();
    assert!(t.top().is_smooth());
    let s = stringy_chern(&t).unwrap();
    assert_eq!(s.euler_number().unwrap(), Scalar::from_int(4));
    let base = Arc::clone(t.base());
    assert!(s.class.model() == &base || *s.class.model().as_ref() == *base);
}
