//! Celestial integrals on towers: manifestations at every level, local
//! values at fixed points of the base, and the change-of-variables and
//! additivity checks.

use std::fmt;

use rayon::prelude::*;

use crate::chow::{log_chern, ChowClass};
use crate::error::{Error, Result};
use crate::fan::Cone;
use crate::models::{
    fiber_rays, raw_data, resolve, resolve_at, Component, ConstructibleSet, ResolutionTower,
    ResolvedData, SystemDivisor,
};
use crate::scalar::{Scalar, Q};

/// The manifestations of one integral on every level of a tower.
#[derive(Clone, Debug)]
pub struct CelestialClass {
    tower: ResolutionTower,
    manifestations: Vec<ChowClass>,
}

impl CelestialClass {
    pub fn tower(&self) -> &ResolutionTower {
        &self.tower
    }

    pub fn manifestations(&self) -> &[ChowClass] {
        &self.manifestations
    }

    pub fn manifestation(&self, level: usize) -> Result<&ChowClass> {
        self.manifestations
            .get(level)
            .ok_or_else(|| Error::InvalidInput(format!("tower has no level {level}")))
    }

    /// The manifestation on the base.
    pub fn identity(&self) -> &ChowClass {
        &self.manifestations[0]
    }

    /// Whether each manifestation is the push-forward of the one above it.
    pub fn verify_compatibility(&self) -> Result<bool> {
        for k in 0..self.tower.height() {
            let pushed = self
                .tower
                .push_class(&self.manifestations[k + 1], k + 1, k)?;
            if !classes_agree(&pushed, &self.manifestations[k])? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Equality in the Chow group where it is decidable, term-wise equality of
/// cone-class combinations otherwise.
pub(crate) fn classes_agree(a: &ChowClass, b: &ChowClass) -> Result<bool> {
    let fan = a.model();
    if fan.is_smooth() && fan.is_complete() {
        a.equals(b)
    } else {
        Ok(a.sub(b)?.is_zero())
    }
}

fn weight(rd: &ResolvedData, comps: impl IntoIterator<Item = Component>) -> Result<Scalar> {
    let mut w = Scalar::one();
    for c in comps {
        let d = &rd.coefficient(c) + &Scalar::one();
        let inv = d.inv().ok_or_else(|| Error::NonConvergent {
            atom: rd.describe(c),
            value: "-1".into(),
        })?;
        w = &w * &inv;
    }
    Ok(w)
}

/// One stratum of the sum: the components meeting there, its Euler
/// characteristic (for local values) and its weight `Π 1/(1+m_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumTerm {
    pub components: Vec<String>,
    pub euler: Option<i64>,
    pub weight: Scalar,
}

impl fmt::Display for StratumTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.components.join(", "))?;
        if let Some(e) = self.euler {
            write!(f, " chi={e}")?;
        }
        write!(f, " weight={}", self.weight)
    }
}

/// Cones `τ` with rays in `J` that meet `J_S` (all of them, including the
/// zero cone, for the ambient set), with their weights.
fn manifestation_cones(rd: &ResolvedData) -> Result<Vec<(Cone, Scalar)>> {
    let fan = rd.fan();
    let ambient = rd.is_ambient();
    let candidates: Vec<&Cone> = fan
        .cones()
        .iter()
        .filter(|c| c.rays().iter().all(|&r| rd.ray_in_j(r)))
        .filter(|c| ambient || c.rays().iter().any(|&r| rd.ray_in_set[r]))
        .collect();
    candidates
        .par_iter()
        .map(|c| {
            Ok((
                (*c).clone(),
                weight(rd, c.rays().iter().map(|&r| Component::Ray(r)))?,
            ))
        })
        .collect()
}

/// The class `c(Ω(log E)^∨) ∩ Σ_{I∩J_S≠∅} [E_I]/Π_{i∈I}(1+m_i)` on the
/// level of `rd`.
pub fn evaluate_manifestation(rd: &ResolvedData) -> Result<ChowClass> {
    if let Some(s) = &rd.strict {
        return Err(Error::NonToricAtom(format!("germ:{}", s.germ.name)));
    }
    let fan = rd.fan();
    if !fan.is_complete() {
        return Err(Error::NotComplete(format!("level {}", rd.level)));
    }
    let log = log_chern(fan, &rd.j_rays())?;
    let sum = ChowClass::from_terms(fan, manifestation_cones(rd)?)?;
    log.multiply(&sum)
}

/// The strata of the manifestation sum, for reporting.
pub fn manifestation_terms(rd: &ResolvedData) -> Result<Vec<StratumTerm>> {
    Ok(manifestation_cones(rd)?
        .into_iter()
        .map(|(c, w)| StratumTerm {
            components: c
                .rays()
                .iter()
                .map(|&r| rd.describe(Component::Ray(r)))
                .collect(),
            euler: None,
            weight: w,
        })
        .collect())
}

/// Manifestations of `∫_S 1_O(D)` on every level: evaluated on the top
/// level and pushed down.
pub fn integrate(
    tower: &ResolutionTower,
    d: &SystemDivisor,
    s: &ConstructibleSet,
) -> Result<CelestialClass> {
    let rd = resolve(tower, d, s)?;
    let top = evaluate_manifestation(&rd)?;
    let mut manifestations = vec![top];
    for k in (0..tower.height()).rev() {
        let next = tower.push_class(manifestations.last().unwrap(), k + 1, k)?;
        manifestations.push(next);
    }
    manifestations.reverse();
    let class = CelestialClass {
        tower: tower.clone(),
        manifestations,
    };
    debug_assert!(class.verify_compatibility().unwrap_or(true));
    Ok(class)
}

/// The strata of the local sum over the fixed point `p` of the base.
pub fn local_terms(rd: &ResolvedData, p: &Cone) -> Result<Vec<StratumTerm>> {
    let fan = rd.fan();
    let fiber = fiber_rays(&rd.tower, rd.level, p)?;
    let over_p: Vec<usize> = fiber
        .into_iter()
        .filter(|&r| rd.is_ambient() || rd.ray_in_set[r])
        .collect();
    if over_p.is_empty() {
        return Err(Error::EmptyFiber(rd.tower.base().describe_cone(p)));
    }
    let in_j = |r: usize| rd.ray_in_j(r) || over_p.contains(&r);
    let full: Vec<&Cone> = fan
        .max_cones()
        .iter()
        .filter(|m| m.dim() == fan.rank())
        .collect();
    let mut out = Vec::new();
    for tau in fan.cones() {
        if tau.dim() == 0
            || !tau.rays().iter().all(|&r| in_j(r))
            || !tau.rays().iter().any(|r| over_p.contains(r))
        {
            continue;
        }
        let mut chi = full
            .iter()
            .filter(|m| tau.is_face_of(m))
            .filter(|m| m.rays().iter().filter(|&&r| in_j(r)).eq(tau.rays().iter()))
            .count() as i64;
        if tau.dim() == 1 {
            chi -= rd.face_length(tau.rays()[0]);
        }
        if chi == 0 {
            continue;
        }
        let comps = tau.rays().iter().map(|&r| Component::Ray(r));
        out.push(StratumTerm {
            components: comps.clone().map(|c| rd.describe(c)).collect(),
            euler: Some(chi),
            weight: weight(rd, comps)?,
        });
    }
    if rd.strict.is_some() {
        for &v in &over_p {
            let l = rd.face_length(v);
            if l == 0 {
                continue;
            }
            let comps = [Component::Ray(v), Component::Strict];
            out.push(StratumTerm {
                components: comps.iter().map(|&c| rd.describe(c)).collect(),
                euler: Some(l),
                weight: weight(rd, comps)?,
            });
        }
    }
    Ok(out)
}

/// `Σ χ(E_I° ∩ π^{-1}(p)) / Π(1+m_i)` over the strata of `rd` lying over `p`.
pub fn local_value_of(rd: &ResolvedData, p: &Cone) -> Result<Scalar> {
    Ok(local_terms(rd, p)?
        .into_iter()
        .map(|t| {
            t.weight
                .scale(&Q::from_integer(t.euler.unwrap_or(0).into()))
        })
        .sum())
}

/// The value at the fixed point `p` of the base of the constructible
/// function attached to `(D, S)`.
pub fn local_value(
    tower: &ResolutionTower,
    d: &SystemDivisor,
    s: &ConstructibleSet,
    p: &Cone,
) -> Result<Scalar> {
    local_value_of(&resolve(tower, d, s)?, p)
}

/// One checked equality.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

/// A list of checked equalities.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, label: String, lhs: String, rhs: String, pass: bool) {
        self.checks.push(Check {
            label,
            lhs,
            rhs,
            pass,
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.checks.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "check: {}", c.label)?;
            writeln!(f, "  lhs: {}", c.lhs)?;
            writeln!(f, "  rhs: {}", c.rhs)?;
            write!(f, "  {}", if c.pass { "PASS" } else { "FAIL" })?;
        }
        Ok(())
    }
}

/// A class on one line, terms joined by `+`.
pub fn inline_class(c: &ChowClass) -> String {
    let shown = if c.model().is_smooth() && c.model().is_complete() {
        c.canonical().unwrap_or_else(|_| c.clone())
    } else {
        c.clone()
    };
    shown.to_string().replace('\n', " + ")
}

fn toric_cov(
    tower: &ResolutionTower,
    d: &SystemDivisor,
    s: &ConstructibleSet,
    i: usize,
    j: usize,
) -> Result<Option<Report>> {
    let (li, lj) = (tower.level(i)?, tower.level(j)?);
    if !(li.is_smooth() && li.is_complete() && lj.is_smooth() && lj.is_complete()) {
        return Ok(None);
    }
    let direct = match resolve_at(tower, i, d, s) {
        Ok(rd) if rd.strict.is_none() => rd,
        Ok(_) | Err(Error::NotResolved(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let lifted = direct.transport(j)?;
    lifted.check_convergence()?;
    let mut report = Report::default();

    let target = resolve_at(tower, j, d, s)?;
    let fan = lifted.fan();
    let show = |c: &[Scalar]| -> String {
        let parts: Vec<String> = fan
            .rays()
            .iter()
            .zip(c)
            .map(|(v, m)| format!("{v}: {m}"))
            .collect();
        parts.join(", ")
    };
    report.push(
        format!("coefficients at level {j}: D + K vs transported from level {i}"),
        show(&target.ray_coeffs),
        show(&lifted.ray_coeffs),
        target.ray_coeffs == lifted.ray_coeffs,
    );

    let lhs = evaluate_manifestation(&direct)?;
    let top = evaluate_manifestation(&lifted)?;
    let rhs = tower.push_class(&top, j, i)?;
    report.push(
        format!("manifestation at level {i}: direct vs pushed from level {j}"),
        inline_class(&lhs),
        inline_class(&rhs),
        lhs.equals(&rhs)?,
    );
    Ok(Some(report))
}

fn local_cov(
    tower: &ResolutionTower,
    d: &SystemDivisor,
    s: &ConstructibleSet,
    i: usize,
    j: usize,
) -> Result<Report> {
    let mut direct = None;
    for k in i..=j {
        match resolve_at(tower, k, d, s) {
            Ok(rd) => {
                direct = Some(rd);
                break;
            }
            Err(Error::NotResolved(_)) | Err(Error::NotSmooth(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let direct = direct.ok_or_else(|| {
        Error::NotResolved(format!("data is not resolved on any level from {i} to {j}"))
    })?;
    let lifted = raw_data(tower, i, d, s)?.transport(j)?;
    lifted.check_convergence()?;
    let mut report = Report::default();
    let base = tower.base();
    for p in base.max_cones().iter().filter(|p| p.dim() == base.rank()) {
        let a = match local_value_of(&direct, p) {
            Ok(v) => v,
            Err(Error::EmptyFiber(_)) => continue,
            Err(e) => return Err(e),
        };
        let b = local_value_of(&lifted, p)?;
        report.push(
            format!(
                "local value at {}: level {} vs transported from level {i} to {j}",
                base.describe_cone(p),
                direct.level
            ),
            a.to_string(),
            b.to_string(),
            a == b,
        );
    }
    if report.checks.is_empty() {
        return Err(Error::EmptyFiber("every fixed point of the base".into()));
    }
    Ok(report)
}

/// Compares the level-`i` integral computed on level `i` with the push-forward
/// of the level-`j` integral of `D + K_{i→j}`. Where the level-`i`
/// manifestation is not available as a Chow class (germs, non-complete
/// models, unresolved levels), the comparison is made on local values at the
/// fixed points of the base.
pub fn check_change_of_variables(
    tower: &ResolutionTower,
    d: &SystemDivisor,
    s: &ConstructibleSet,
    i: usize,
    j: usize,
) -> Result<Report> {
    tower.level(j)?;
    if i > j {
        return Err(Error::InvalidInput(format!(
            "levels must satisfy i <= j, got {i} > {j}"
        )));
    }
    if let Some(r) = toric_cov(tower, d, s, i, j)? {
        return Ok(r);
    }
    local_cov(tower, d, s, i, j)
}

/// Checks `∫_{S₁∪S₂} = ∫_{S₁} + ∫_{S₂}` on every level for disjoint sets.
pub fn additivity_check(
    tower: &ResolutionTower,
    d: &SystemDivisor,
    s1: &ConstructibleSet,
    s2: &ConstructibleSet,
) -> Result<Report> {
    if s1.is_ambient() || s2.is_ambient() {
        return Err(Error::NotDisjoint(
            "the ambient set meets everything".into(),
        ));
    }
    let a = resolve(tower, d, s1)?;
    let b = resolve(tower, d, s2)?;
    let fan = tower.top();
    let rays_a: Vec<usize> = (0..fan.rays().len()).filter(|&r| a.ray_in_set[r]).collect();
    let rays_b: Vec<usize> = (0..fan.rays().len()).filter(|&r| b.ray_in_set[r]).collect();
    if let Some(r) = rays_a.iter().find(|r| rays_b.contains(r)) {
        return Err(Error::NotDisjoint(format!(
            "both contain ray:{}",
            fan.ray(*r)
        )));
    }
    if let Some(c) = fan.cones().iter().find(|c| {
        c.rays().iter().any(|r| rays_a.contains(r)) && c.rays().iter().any(|r| rays_b.contains(r))
    }) {
        return Err(Error::NotDisjoint(format!(
            "they meet along the orbit of {}",
            fan.describe_cone(c)
        )));
    }
    if a.in_set(Component::Strict) || b.in_set(Component::Strict) {
        return Err(Error::NotDisjoint(
            "hypersurface atoms are not supported here".into(),
        ));
    }
    let both = integrate(tower, d, &s1.union(s2))?;
    let one = integrate(tower, d, s1)?;
    let two = integrate(tower, d, s2)?;
    let mut report = Report::default();
    for k in 0..=tower.height() {
        let lhs = both.manifestation(k)?;
        let rhs = one.manifestation(k)?.add(two.manifestation(k)?)?;
        report.push(
            format!("level {k}: union vs sum of parts"),
            inline_class(lhs),
            inline_class(&rhs),
            classes_agree(lhs, &rhs)?,
        );
    }
    Ok(report)
}
