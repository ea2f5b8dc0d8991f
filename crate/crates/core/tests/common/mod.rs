//! Independent oracles shared by the integration suites. They use only the
//! raw combinatorics of fans (rays, maximal cones) and never call the
//! celestial evaluator.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::str::FromStr;

use celeste_core::{Cone, Fan, LatticeVector, NewtonPolygon, ResolutionTower, Scalar, Q};
use num_integer::Integer;
use rand::Rng;

pub fn lv(c: &[i64]) -> LatticeVector {
    LatticeVector::new(c.to_vec())
}

pub fn scalar(text: &str) -> Scalar {
    Scalar::from_str(text).unwrap()
}

pub fn int(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// `N·m + ν`.
pub fn affine(n: i64, nu: i64) -> Scalar {
    &Scalar::m().scale(&int(n)) + &Scalar::from_int(nu)
}

/// χ(V(τ)) for a complete star: the number of maximal cones containing τ.
fn orbit_closure_chi(fan: &Fan, tau: &[usize]) -> i64 {
    fan.max_cones()
        .iter()
        .filter(|m| tau.iter().all(|r| m.contains_ray(*r)))
        .count() as i64
}

fn is_cone(fan: &Fan, rays: &[usize]) -> bool {
    fan.max_cones()
        .iter()
        .any(|m| rays.iter().all(|r| m.contains_ray(*r)))
}

/// χ(V(τ) ∖ ∪_{j ∈ A∖τ} V(j)) by inclusion–exclusion over the atoms `A`.
pub fn open_stratum_chi(fan: &Fan, atoms: &[usize], tau: &[usize]) -> i64 {
    let others: Vec<usize> = atoms.iter().copied().filter(|a| !tau.contains(a)).collect();
    let mut total = 0;
    for mask in 0u32..(1 << others.len()) {
        let mut rays: Vec<usize> = tau.to_vec();
        for (i, &o) in others.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rays.push(o);
            }
        }
        if !is_cone(fan, &rays) {
            continue;
        }
        let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        total += sign * orbit_closure_chi(fan, &rays);
    }
    total
}

/// All subsets of `atoms` forming cones (including the empty set).
pub fn cone_subsets(fan: &Fan, atoms: &[usize]) -> Vec<Vec<usize>> {
    (0u32..(1 << atoms.len()))
        .map(|mask| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &a)| a)
                .collect::<Vec<_>>()
        })
        .filter(|s| is_cone(fan, s))
        .collect()
}

/// Degree of `∫ D` over a smooth complete toric variety with invariant
/// `D = Σ m_ρ D_ρ`: Σ over strata χ(E_I°)/Π(1+m_i).
pub fn toric_zeta_oracle(fan: &Fan, coeffs: &[Scalar]) -> Scalar {
    let atoms: Vec<usize> = (0..coeffs.len())
        .filter(|&r| !coeffs[r].is_zero())
        .collect();
    cone_subsets(fan, &atoms)
        .into_iter()
        .map(|tau| {
            let chi = open_stratum_chi(fan, &atoms, &tau);
            let mut w = Scalar::from_int(chi);
            for &r in &tau {
                w = &w / &(&coeffs[r] + &Scalar::one());
            }
            w
        })
        .sum()
}

fn pair(v: &[i64], e: &[i64; 2]) -> i64 {
    v[0] * e[0] + v[1] * e[1]
}

fn order_and_face(exps: &[[i64; 2]], v: &[i64]) -> (i64, i64) {
    let n = exps.iter().map(|e| pair(v, e)).min().unwrap();
    let mut face: Vec<[i64; 2]> = exps.iter().copied().filter(|e| pair(v, e) == n).collect();
    face.sort_unstable();
    let (a, b) = (face[0], face[face.len() - 1]);
    (n, (b[0] - a[0]).abs().gcd(&(b[1] - a[1]).abs()))
}

/// Topological zeta function of a Newton-nondegenerate germ from the
/// resolution graph of a toric tower over the plane: the curves over the
/// origin form a chain ordered by slope, ν is the sum of coordinates, and the
/// strict transform crosses each exceptional curve in face-length points.
pub fn plane_germ_zeta_oracle(rays: &[LatticeVector], exps: &[[i64; 2]]) -> Scalar {
    let mut chain: Vec<Vec<i64>> = rays.iter().map(|r| r.coords().to_vec()).collect();
    // from (0,1) to (1,0): decreasing slope y/x
    chain.sort_by(|a, b| (b[1] * a[0]).cmp(&(a[1] * b[0])));
    let exceptional: Vec<bool> = chain.iter().map(|v| v[0] > 0 && v[1] > 0).collect();
    let info: Vec<(i64, i64)> = chain.iter().map(|v| order_and_face(exps, v)).collect();
    let factor: Vec<Scalar> = (0..chain.len())
        .map(|i| {
            let nu = if exceptional[i] {
                chain[i][0] + chain[i][1]
            } else {
                1
            };
            affine(info[i].0, nu)
        })
        .collect();
    let component = |i: usize| exceptional[i] || info[i].0 > 0;
    let curve = affine(1, 1);
    let mut z = Scalar::zero();
    for i in (0..chain.len()).filter(|&i| exceptional[i]) {
        let len = info[i].1;
        let neighbours = [i.checked_sub(1), Some(i + 1)]
            .into_iter()
            .flatten()
            .filter(|&j| j < chain.len() && component(j))
            .count() as i64;
        z = &z + &(&Scalar::from_int(2 - neighbours - len) / &factor[i]);
        z = &z + &(&Scalar::from_int(len) / &(&factor[i] * &curve));
    }
    for i in 0..chain.len().saturating_sub(1) {
        let j = i + 1;
        if component(i) && component(j) && (exceptional[i] || exceptional[j]) {
            z = &z + &(&Scalar::one() / &(&factor[i] * &factor[j]));
        }
    }
    z
}

/// Random smooth tower: each step blows up the orbit of a random cone of
/// dimension at least two.
pub fn random_smooth_tower<R: Rng>(rng: &mut R, base: Fan, steps: usize) -> ResolutionTower {
    let mut t = ResolutionTower::new(base);
    for _ in 0..steps {
        let fan = t.top().clone();
        let cones: Vec<&Cone> = fan.cones().iter().filter(|c| c.dim() >= 2).collect();
        let c = cones[rng.gen_range(0..cones.len())];
        let mut v = vec![0; fan.rank()];
        for &r in c.rays() {
            for (x, y) in v.iter_mut().zip(fan.ray(r).coords()) {
                *x += y;
            }
        }
        t = t.extend(&LatticeVector::new(v)).unwrap();
    }
    t
}

/// Distinct rays of a tower's top fan, as a set of coordinate vectors.
pub fn ray_set(t: &ResolutionTower) -> BTreeSet<Vec<i64>> {
    t.top().rays().iter().map(|r| r.coords().to_vec()).collect()
}

pub fn polygon(exps: &[[i64; 2]]) -> NewtonPolygon {
    NewtonPolygon::new(exps.iter().copied()).unwrap()
}
