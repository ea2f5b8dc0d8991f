//! Rational Chow rings of smooth toric models.
//!
//! A class is a finite combination of orbit-closure classes `[V(σ)]` with
//! [`Scalar`] coefficients. Products are reduced to squarefree cone classes
//! using the linear relations `Σ_ρ ⟨m, u_ρ⟩ D_ρ = 0`; equality is decided by
//! the Poincaré pairing on complete models.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fan::{Cone, Fan, StarSubdivision};
use crate::linalg;
use crate::scalar::{Scalar, Q};

type Reduction = Arc<Vec<(Cone, Q)>>;
type Dual = Arc<Vec<Q>>;

/// Per-fan memo tables for the ring structure.
#[derive(Default)]
pub(crate) struct RingCache {
    reductions: Mutex<HashMap<Vec<usize>, Reduction>>,
    duals: Mutex<HashMap<(Cone, usize), Dual>>,
    basis: OnceLock<Vec<GradedBasis>>,
}

/// A basis of one graded piece, with the complementary cones and the
/// inverse pairing matrix used to read off coordinates.
struct GradedBasis {
    basis: Vec<Cone>,
    dual: Vec<Cone>,
    inverse: Vec<Vec<Q>>,
}

/// The dual vector `m` with `⟨m,u_ρ⟩ = 1`, `⟨m,u_τ⟩ = 0` on the other rays
/// of `support`, and zero on a fixed complement of standard basis vectors.
fn dual_vector(fan: &Fan, support: &Cone, rho: usize) -> Arc<Vec<Q>> {
    let key = (support.clone(), rho);
    if let Some(m) = fan.ring.duals.lock().unwrap().get(&key) {
        return Arc::clone(m);
    }
    let n = fan.rank();
    let mut rows: Vec<Vec<Q>> = support.rays().iter().map(|&r| fan.ray(r).to_q()).collect();
    let mut rhs: Vec<Q> = support
        .rays()
        .iter()
        .map(|&r| if r == rho { Q::one() } else { Q::zero() })
        .collect();
    for k in 0..n {
        if rows.len() == n {
            break;
        }
        let e: Vec<Q> = (0..n)
            .map(|j| if j == k { Q::one() } else { Q::zero() })
            .collect();
        rows.push(e);
        if linalg::rank(&rows) == rows.len() {
            rhs.push(Q::zero());
        } else {
            rows.pop();
        }
    }
    let m = Arc::new(linalg::solve(&rows, &rhs).expect("simplicial cone has independent rays"));
    fan.ring.duals.lock().unwrap().insert(key, Arc::clone(&m));
    m
}

/// Squarefree normal form of the monomial `Π x_{mono[i]}` (a sorted
/// multiset of ray indices) on a smooth fan.
fn reduce_monomial(fan: &Fan, mono: &[usize]) -> Reduction {
    if mono.len() > fan.rank() {
        return Arc::new(Vec::new());
    }
    if let Some(r) = fan.ring.reductions.lock().unwrap().get(mono) {
        return Arc::clone(r);
    }
    let support = Cone::new(mono.to_vec());
    let result: Vec<(Cone, Q)> = if !fan.has_cone(&support) {
        Vec::new()
    } else if support.dim() == mono.len() {
        vec![(support, Q::one())]
    } else {
        let rho = mono
            .windows(2)
            .find(|w| w[0] == w[1])
            .map(|w| w[0])
            .expect("monomial has a repeated ray");
        let m = dual_vector(fan, &support, rho);
        let pos = mono.iter().position(|&r| r == rho).unwrap();
        let mut rest = mono.to_vec();
        rest.remove(pos);
        let mut acc: BTreeMap<Cone, Q> = BTreeMap::new();
        for r in 0..fan.rays().len() {
            if support.contains_ray(r) {
                continue;
            }
            let c = fan.ray(r).pair(&m);
            if c.is_zero() {
                continue;
            }
            let mut next = rest.clone();
            let at = next.partition_point(|&x| x < r);
            next.insert(at, r);
            for (cone, coeff) in reduce_monomial(fan, &next).iter() {
                let e = acc.entry(cone.clone()).or_insert_with(Q::zero);
                *e -= &c * coeff;
            }
        }
        acc.into_iter().filter(|(_, q)| !q.is_zero()).collect()
    };
    let result = Arc::new(result);
    fan.ring
        .reductions
        .lock()
        .unwrap()
        .insert(mono.to_vec(), Arc::clone(&result));
    result
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v = Vec::with_capacity(a.len() + b.len());
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    v.sort_unstable();
    v
}

/// Degree of `[V(σ)]·[V(τ)]` for cones of complementary dimension.
fn pairing(fan: &Fan, a: &Cone, b: &Cone) -> Q {
    reduce_monomial(fan, &merge_sorted(a.rays(), b.rays()))
        .iter()
        .fold(Q::zero(), |acc, (_, q)| acc + q)
}

fn same_model(a: &Arc<Fan>, b: &Arc<Fan>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A mixed-degree rational cycle class on a toric model.
#[derive(Clone, Debug, PartialEq)]
pub struct ChowClass {
    model: Arc<Fan>,
    terms: BTreeMap<Cone, Scalar>,
}

impl ChowClass {
    pub fn zero(model: &Arc<Fan>) -> Self {
        ChowClass {
            model: Arc::clone(model),
            terms: BTreeMap::new(),
        }
    }

    /// The fundamental class `[X]`.
    pub fn fundamental(model: &Arc<Fan>) -> Self {
        Self::zero(model).with_term(Cone::empty(), Scalar::one())
    }

    /// `[V(cone)]`.
    pub fn cycle(model: &Arc<Fan>, cone: &Cone) -> Result<Self> {
        if !model.has_cone(cone) {
            return Err(Error::UnknownCone(cone.to_string()));
        }
        Ok(Self::zero(model).with_term(cone.clone(), Scalar::one()))
    }

    pub fn from_terms(
        model: &Arc<Fan>,
        terms: impl IntoIterator<Item = (Cone, Scalar)>,
    ) -> Result<Self> {
        let mut out = Self::zero(model);
        for (c, s) in terms {
            if !model.has_cone(&c) {
                return Err(Error::UnknownCone(c.to_string()));
            }
            out.add_term(c, &s);
        }
        Ok(out)
    }

    fn with_term(mut self, c: Cone, s: Scalar) -> Self {
        self.add_term(c, &s);
        self
    }

    fn add_term(&mut self, c: Cone, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.get_mut(&c) {
            Some(e) => {
                *e = &*e + s;
                if e.is_zero() {
                    self.terms.remove(&c);
                }
            }
            None => {
                self.terms.insert(c, s.clone());
            }
        }
    }

    pub fn model(&self) -> &Arc<Fan> {
        &self.model
    }

    pub fn terms(&self) -> &BTreeMap<Cone, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, c: &Cone) -> Scalar {
        self.terms.get(c).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The codimension-`k` part.
    pub fn graded_part(&self, k: usize) -> ChowClass {
        ChowClass {
            model: Arc::clone(&self.model),
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| c.dim() == k)
                .map(|(c, s)| (c.clone(), s.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> ChowClass {
        let mut out = Self::zero(&self.model);
        for (c, x) in &self.terms {
            out.add_term(c.clone(), &(x * s));
        }
        out
    }

    pub fn add(&self, other: &ChowClass) -> Result<ChowClass> {
        if !same_model(&self.model, &other.model) {
            return Err(Error::ModelMismatch);
        }
        let mut out = self.clone();
        for (c, s) in &other.terms {
            out.add_term(c.clone(), s);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ChowClass) -> Result<ChowClass> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    /// Product in the Chow ring, in squarefree cone-class normal form.
    pub fn multiply(&self, other: &ChowClass) -> Result<ChowClass> {
        if !same_model(&self.model, &other.model) {
            return Err(Error::ModelMismatch);
        }
        if !self.model.is_smooth() {
            return Err(Error::NotSmooth("model".into()));
        }
        let fan = &*self.model;
        let pairs: Vec<(&Cone, &Scalar, &Cone, &Scalar)> = self
            .terms
            .iter()
            .flat_map(|(a, s)| other.terms.iter().map(move |(b, t)| (a, s, b, t)))
            .filter(|(a, _, b, _)| a.dim() + b.dim() <= fan.rank())
            .collect();
        let contributions: Vec<Vec<(Cone, Scalar)>> = pairs
            .par_iter()
            .map(|(a, s, b, t)| {
                let st = *s * *t;
                reduce_monomial(fan, &merge_sorted(a.rays(), b.rays()))
                    .iter()
                    .map(|(c, q)| (c.clone(), st.scale(q)))
                    .collect()
            })
            .collect();
        let mut out = Self::zero(&self.model);
        for (c, s) in contributions.into_iter().flatten() {
            out.add_term(c, &s);
        }
        Ok(out)
    }

    /// Sum of the point-class coefficients.
    pub fn degree(&self) -> Result<Scalar> {
        let n = self.model.rank();
        let points: Vec<&Scalar> = self
            .terms
            .iter()
            .filter(|(c, _)| c.dim() == n)
            .map(|(_, s)| s)
            .collect();
        if !self.model.is_complete() && !points.is_empty() {
            return Err(Error::NonProperDegree);
        }
        Ok(points.into_iter().sum())
    }

    /// Equality in the rational Chow group, via the Poincaré pairing.
    pub fn equals(&self, other: &ChowClass) -> Result<bool> {
        self.sub(other)?.is_numerically_zero()
    }

    fn is_numerically_zero(&self) -> Result<bool> {
        let fan = &*self.model;
        if !fan.is_complete() {
            return Err(Error::NotComplete("model".into()));
        }
        if !fan.is_smooth() {
            return Err(Error::NotSmooth("model".into()));
        }
        let n = fan.rank();
        for k in 0..=n {
            let part: Vec<(&Cone, &Scalar)> =
                self.terms.iter().filter(|(c, _)| c.dim() == k).collect();
            if part.is_empty() {
                continue;
            }
            for tau in fan.cones_of_dim(n - k) {
                let total: Scalar = part
                    .iter()
                    .map(|(c, s)| s.scale(&pairing(fan, c, tau)))
                    .sum();
                if !total.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Rewrites the class in a fixed basis of cone classes per codimension
    /// (the lexicographically first independent cones). Two classes are equal
    /// iff their canonical forms coincide term by term.
    pub fn canonical(&self) -> Result<ChowClass> {
        let fan = &*self.model;
        if !fan.is_complete() {
            return Err(Error::NotComplete("model".into()));
        }
        if !fan.is_smooth() {
            return Err(Error::NotSmooth("model".into()));
        }
        let bases = fan.ring.basis.get_or_init(|| graded_bases(fan));
        let mut out = Self::zero(&self.model);
        for (k, gb) in bases.iter().enumerate() {
            let part: Vec<(&Cone, &Scalar)> =
                self.terms.iter().filter(|(c, _)| c.dim() == k).collect();
            if part.is_empty() {
                continue;
            }
            let p: Vec<Scalar> = gb
                .dual
                .iter()
                .map(|d| part.iter().map(|(c, s)| s.scale(&pairing(fan, c, d))).sum())
                .collect();
            for (i, b) in gb.basis.iter().enumerate() {
                let x: Scalar = p
                    .iter()
                    .enumerate()
                    .map(|(j, pj)| pj.scale(&gb.inverse[j][i]))
                    .sum();
                out.add_term(b.clone(), &x);
            }
        }
        Ok(out)
    }
}

fn graded_bases(fan: &Fan) -> Vec<GradedBasis> {
    let n = fan.rank();
    (0..=n)
        .map(|k| {
            let cones: Vec<&Cone> = fan.cones_of_dim(k).collect();
            let comps: Vec<&Cone> = fan.cones_of_dim(n - k).collect();
            let mut basis: Vec<Cone> = Vec::new();
            let mut rows: Vec<Vec<Q>> = Vec::new();
            for c in &cones {
                let row: Vec<Q> = comps.iter().map(|d| pairing(fan, c, d)).collect();
                rows.push(row);
                if linalg::rank(&rows) == rows.len() {
                    basis.push((*c).clone());
                } else {
                    rows.pop();
                }
            }
            let mut dual: Vec<Cone> = Vec::new();
            let mut cols: Vec<Vec<Q>> = Vec::new();
            for (j, d) in comps.iter().enumerate() {
                if dual.len() == basis.len() {
                    break;
                }
                cols.push(rows.iter().map(|r| r[j].clone()).collect());
                if linalg::rank(&cols) == cols.len() {
                    dual.push((*d).clone());
                } else {
                    cols.pop();
                }
            }
            // G[i][j] = deg(b_i · d_j)
            let g: Vec<Vec<Q>> = (0..basis.len())
                .map(|i| (0..dual.len()).map(|j| cols[j][i].clone()).collect())
                .collect();
            let inverse = linalg::inverse(&g).expect("pairing is perfect over Q");
            GradedBasis {
                basis,
                dual,
                inverse,
            }
        })
        .collect()
}

impl fmt::Display for ChowClass {
    /// One line per term: `codim k: coeff * [V(r0,r2)]`, sorted by
    /// codimension then cone.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut cones: Vec<&Cone> = self.terms.keys().collect();
        cones.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        for (i, c) in cones.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let rays: Vec<String> = c.rays().iter().map(|r| format!("r{r}")).collect();
            write!(
                f,
                "codim {}: {} * [V({})]",
                c.dim(),
                self.terms[*c],
                rays.join(",")
            )?;
        }
        Ok(())
    }
}

/// `[V(cone)]` on `model`.
pub fn cycle_class(model: &Arc<Fan>, cone: &Cone) -> Result<ChowClass> {
    ChowClass::cycle(model, cone)
}

pub fn multiply(a: &ChowClass, b: &ChowClass) -> Result<ChowClass> {
    a.multiply(b)
}

pub fn degree(a: &ChowClass) -> Result<Scalar> {
    a.degree()
}

pub fn equal(a: &ChowClass, b: &ChowClass) -> Result<bool> {
    a.equals(b)
}

/// `Π_ρ (1 + D_ρ)` over the given rays, capped with `[X]`.
fn ray_product(model: &Arc<Fan>, rays: impl Iterator<Item = usize>) -> Result<ChowClass> {
    let mut acc = ChowClass::fundamental(model);
    for r in rays {
        let d = ChowClass::cycle(model, &Cone::new(vec![r]))?;
        acc = acc.add(&acc.multiply(&d)?)?;
    }
    Ok(acc)
}

/// `c(TX) ∩ [X] = Π_ρ (1 + D_ρ)` on a smooth complete model.
pub fn total_chern(model: &Arc<Fan>) -> Result<ChowClass> {
    if !model.is_smooth() {
        return Err(Error::NotSmooth("model".into()));
    }
    if !model.is_complete() {
        return Err(Error::NotComplete("model".into()));
    }
    ray_product(model, 0..model.rays().len())
}

/// Log tangent class `c(TX) · Π_j (1 + E_j)^{-1}` for boundary divisors
/// `E_j` (ray indices), the inverses expanded as terminating series.
pub fn log_chern(model: &Arc<Fan>, atoms: &[usize]) -> Result<ChowClass> {
    if !model.is_smooth() {
        return Err(Error::NotSmooth("model".into()));
    }
    let mut seen = atoms.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NotSNC("repeated component".into()));
    }
    if let Some(&bad) = seen.iter().find(|&&r| r >= model.rays().len()) {
        return Err(Error::NotSNC(format!("no ray with index {bad}")));
    }
    let mut acc = ray_product(model, 0..model.rays().len())?;
    for &r in atoms {
        let minus_e = ChowClass::cycle(model, &Cone::new(vec![r]))?.scale(&Scalar::from_int(-1));
        let mut inverse = ChowClass::fundamental(model);
        let mut power = ChowClass::fundamental(model);
        for _ in 0..model.rank() {
            power = power.multiply(&minus_e)?;
            inverse = inverse.add(&power)?;
        }
        acc = acc.multiply(&inverse)?;
    }
    Ok(acc)
}

/// Proper push-forward along a star subdivision.
pub fn pushforward(sub: &StarSubdivision, a: &ChowClass) -> Result<ChowClass> {
    if !same_model(&a.model, &sub.after) {
        return Err(Error::ModelMismatch);
    }
    let mut out = ChowClass::zero(&sub.before);
    for (c, s) in &a.terms {
        let image = sub.image_cone(c);
        if image.dim() == c.dim() {
            out.add_term(image, s);
        }
    }
    Ok(out)
}

/// A torus-invariant divisor `Σ a_ρ D_ρ`, coefficients indexed by ray.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantDivisor {
    pub model: Arc<Fan>,
    pub coeffs: Vec<Scalar>,
}

impl InvariantDivisor {
    pub fn zero(model: &Arc<Fan>) -> Self {
        InvariantDivisor {
            model: Arc::clone(model),
            coeffs: vec![Scalar::zero(); model.rays().len()],
        }
    }

    pub fn coefficient(&self, ray: usize) -> &Scalar {
        &self.coeffs[ray]
    }

    pub fn class(&self) -> ChowClass {
        let mut out = ChowClass::zero(&self.model);
        for (r, a) in self.coeffs.iter().enumerate() {
            out.add_term(Cone::new(vec![r]), a);
        }
        out
    }
}

/// Pull-back of an invariant divisor: old rays keep their coefficients and
/// the new ray gets `Σ c_ρ a_ρ` over the subdivided cone.
pub fn pullback_divisor(sub: &StarSubdivision, d: &InvariantDivisor) -> Result<InvariantDivisor> {
    if !same_model(&d.model, &sub.before) {
        return Err(Error::ModelMismatch);
    }
    let coeffs = (0..sub.after.rays().len())
        .map(|r| match sub.old_index(r) {
            Some(o) => d.coeffs[o].clone(),
            None => sub
                .target_cone
                .rays()
                .iter()
                .zip(&sub.coords)
                .map(|(&t, c)| d.coeffs[t].scale(c))
                .sum(),
        })
        .collect();
    Ok(InvariantDivisor {
        model: Arc::clone(&sub.after),
        coeffs,
    })
}
