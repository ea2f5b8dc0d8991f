//! Quantities derived from celestial integrals: zeta functions, stringy
//! Chern classes, Chern–Schwartz–MacPherson classes of invariant strata and
//! Chern numbers.

use std::fmt;
use std::sync::Arc;

use crate::celestial::{evaluate_manifestation, integrate, local_value};
use crate::chow::{total_chern, ChowClass};
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan, LatticeVector};
use crate::models::{resolve, Atom, ConstructibleSet, Germ, ResolutionTower, SystemDivisor};
use crate::scalar::{Scalar, Q};

/// A rational function in `m` with its poles.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaFunction {
    pub value: Scalar,
    /// Roots of the denominator with multiplicities, in increasing order.
    pub poles: Vec<(Q, usize)>,
}

impl ZetaFunction {
    pub fn new(value: Scalar) -> Self {
        let (mut poles, _) = value.poles();
        poles.sort_by(|a, b| a.0.cmp(&b.0));
        ZetaFunction { value, poles }
    }
}

impl fmt::Display for ZetaFunction {
    /// `Z(m) = <value>; poles: [-1 (mult 1), -5/6 (mult 1)]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poles: Vec<String> = self
            .poles
            .iter()
            .map(|(p, k)| format!("{p} (mult {k})"))
            .collect();
        write!(f, "Z(m) = {}; poles: [{}]", self.value, poles.join(", "))
    }
}

/// Degree of the identity manifestation of `∫ D` over the whole system; `D`
/// carries its own `m`.
pub fn zeta_global(tower: &ResolutionTower, d: &SystemDivisor) -> Result<ZetaFunction> {
    let base = tower.base();
    if !base.is_smooth() {
        return Err(Error::NotSmooth("base".into()));
    }
    if !base.is_complete() {
        return Err(Error::NotComplete("base".into()));
    }
    let c = integrate(tower, d, &ConstructibleSet::ambient())?;
    Ok(ZetaFunction::new(c.identity().degree()?))
}

/// Local value of `m·div(f)` at the fixed point `p` of the base.
pub fn zeta_local(tower: &ResolutionTower, germ: &Germ, p: &Cone) -> Result<ZetaFunction> {
    let d = SystemDivisor::zero().with(Atom::Hypersurface(germ.clone()), Scalar::m())?;
    let v = local_value(tower, &d, &ConstructibleSet::ambient(), p)?;
    Ok(ZetaFunction::new(v))
}

/// The identity manifestation of `∫ 0` over a (possibly singular) base,
/// as a cone-class combination on the base.
#[derive(Clone, Debug)]
pub struct StringyClass {
    pub class: ChowClass,
}

impl StringyClass {
    /// The stringy Euler number.
    pub fn euler_number(&self) -> Result<Scalar> {
        self.class.degree()
    }
}

/// Stringy Chern class: evaluates with `m_j` the discrepancies of the tower
/// rays over the base, and pushes down to the base.
pub fn stringy_chern(tower: &ResolutionTower) -> Result<StringyClass> {
    let c = integrate(tower, &SystemDivisor::zero(), &ConstructibleSet::ambient())?;
    Ok(StringyClass {
        class: c.identity().clone(),
    })
}

/// The set whose CSM class is requested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CsmSet {
    Whole,
    /// Union of the orbit closures `V(σ)` of these cones.
    Strata(Vec<Cone>),
}

fn cone_sum(fan: &Fan, c: &Cone) -> LatticeVector {
    let n = fan.rank();
    let mut v = vec![0i64; n];
    for &r in c.rays() {
        for (x, y) in v.iter_mut().zip(fan.ray(r).coords()) {
            *x += y;
        }
    }
    LatticeVector::new(v)
}

/// Whether ray `w` of level `level` lies over `V(σ)` for some base stratum.
fn over_strata(tower: &ResolutionTower, level: usize, w: usize, strata: &[Cone]) -> Result<bool> {
    let m = tower.min_cone(level, w, 0)?;
    Ok(strata.iter().any(|s| s.is_face_of(&m)))
}

/// Blows up until the preimage of the union of strata is a union of
/// invariant divisors; returns the tower and those divisors.
fn divisorial_preimage(model: &Arc<Fan>, strata: &[Cone]) -> Result<(ResolutionTower, Vec<usize>)> {
    let mut tower = ResolutionTower::from_arc(Arc::clone(model));
    for _ in 0..64 {
        let level = tower.height();
        let fan = Arc::clone(tower.top());
        let mut qualifying = vec![false; fan.rays().len()];
        for (r, q) in qualifying.iter_mut().enumerate() {
            *q = over_strata(&tower, level, r, strata)?;
        }
        let mut bad = None;
        for c in fan.cones().iter().filter(|c| c.dim() > 0) {
            let image = strata_image(&tower, level, c)?;
            if strata.iter().any(|s| s.is_face_of(&image))
                && !c.rays().iter().any(|&r| qualifying[r])
            {
                bad = Some(c.clone());
                break;
            }
        }
        match bad {
            None => {
                let rays = (0..fan.rays().len()).filter(|&r| qualifying[r]).collect();
                return Ok((tower, rays));
            }
            Some(c) => tower = tower.extend(&cone_sum(&fan, &c))?,
        }
    }
    Err(Error::NotSNC(
        "strata do not become divisorial after 64 blow-ups".into(),
    ))
}

/// Smallest base cone containing the cone `c` of level `level`.
fn strata_image(tower: &ResolutionTower, level: usize, c: &Cone) -> Result<Cone> {
    let mut rays = Vec::new();
    for &r in c.rays() {
        rays.extend_from_slice(tower.min_cone(level, r, 0)?.rays());
    }
    Ok(Cone::new(rays))
}

/// CSM class of the whole model or of a union of invariant strata.
pub fn csm_class(model: &Arc<Fan>, s: &CsmSet) -> Result<ChowClass> {
    if !model.is_smooth() {
        return Err(Error::NotSmooth("model".into()));
    }
    if !model.is_complete() {
        return Err(Error::NotComplete("model".into()));
    }
    let strata = match s {
        CsmSet::Whole => {
            let t = ResolutionTower::from_arc(Arc::clone(model));
            return Ok(
                integrate(&t, &SystemDivisor::zero(), &ConstructibleSet::ambient())?
                    .identity()
                    .clone(),
            );
        }
        CsmSet::Strata(cs) => cs,
    };
    if strata.is_empty() {
        return Err(Error::InvalidInput("no strata given".into()));
    }
    for c in strata {
        if !model.has_cone(c) || c.dim() == 0 {
            return Err(Error::UnknownCone(model.describe_cone(c)));
        }
    }
    // V(σ) ⊆ V(τ) iff τ ⊆ σ: keep the largest strata only
    let minimal: Vec<Cone> = strata
        .iter()
        .filter(|s| !strata.iter().any(|t| t != *s && t.is_face_of(s)))
        .cloned()
        .collect();
    let (tower, rays) = divisorial_preimage(model, &minimal)?;
    let top = tower.top();
    let set = ConstructibleSet::of(
        rays.iter()
            .map(|&r| Atom::Boundary(top.ray(r).clone()))
            .collect(),
    )?;
    let rd = resolve(&tower, &SystemDivisor::zero(), &set)?;
    let manifestation = evaluate_manifestation(&rd)?;
    tower.push_class(&manifestation, tower.height(), 0)
}

/// The numbers `c₁^i · c_{n−i}` for `i = 0, …, n−1` (the last one is `c₁^n`).
pub fn chern_numbers(model: &Arc<Fan>) -> Result<Vec<Scalar>> {
    let c = total_chern(model)?;
    let n = model.rank();
    let c1 = c.graded_part(1);
    let mut power = ChowClass::fundamental(model);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(power.multiply(&c.graded_part(n - i))?.degree()?);
        power = power.multiply(&c1)?;
    }
    Ok(out)
}
