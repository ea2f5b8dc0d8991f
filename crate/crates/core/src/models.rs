//! Resolution towers, atoms of the modification system, Newton polygons of
//! plane-curve germs, and the normal-crossing data `(J, J_S, m_j)` read off a
//! resolved level.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::chow::{pullback_divisor, ChowClass, InvariantDivisor};
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan, LatticeVector, StarSubdivision};
use crate::scalar::{Scalar, Q};

/// A finite chain of star subdivisions over a base fan. Level 0 is the base.
#[derive(Clone, Debug)]
pub struct ResolutionTower {
    levels: Vec<Arc<Fan>>,
    steps: Vec<StarSubdivision>,
}

impl ResolutionTower {
    pub fn new(base: Fan) -> Self {
        Self::from_arc(Arc::new(base))
    }

    pub fn from_arc(base: Arc<Fan>) -> Self {
        ResolutionTower {
            levels: vec![base],
            steps: Vec::new(),
        }
    }

    /// The tower obtained by applying `rays` in order.
    pub fn with_subdivisions(base: Fan, rays: &[LatticeVector]) -> Result<Self> {
        rays.iter().try_fold(Self::new(base), |t, v| t.extend(v))
    }

    /// Appends the star subdivision of the top fan at `v`.
    pub fn extend(&self, v: &LatticeVector) -> Result<Self> {
        let sub = self.top().star_subdivide(v)?;
        let mut out = self.clone();
        out.levels.push(Arc::clone(&sub.after));
        out.steps.push(sub);
        Ok(out)
    }

    pub fn base(&self) -> &Arc<Fan> {
        &self.levels[0]
    }

    pub fn top(&self) -> &Arc<Fan> {
        self.levels.last().unwrap()
    }

    /// Index of the top level (the number of subdivisions).
    pub fn height(&self) -> usize {
        self.steps.len()
    }

    pub fn level(&self, i: usize) -> Result<&Arc<Fan>> {
        self.levels
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("tower has no level {i}")))
    }

    pub fn levels(&self) -> &[Arc<Fan>] {
        &self.levels
    }

    pub fn steps(&self) -> &[StarSubdivision] {
        &self.steps
    }

    pub fn subdivision_rays(&self) -> Vec<LatticeVector> {
        self.steps.iter().map(|s| s.new_ray.clone()).collect()
    }

    /// The tower cut off at level `i`.
    pub fn truncate(&self, i: usize) -> Result<Self> {
        self.level(i)?;
        Ok(ResolutionTower {
            levels: self.levels[..=i].to_vec(),
            steps: self.steps[..i].to_vec(),
        })
    }

    /// First level whose fan has `v` as a ray.
    pub fn creation_level(&self, v: &LatticeVector) -> Option<usize> {
        self.levels.iter().position(|f| f.ray_index(v).is_some())
    }

    /// Minimal cone of level `to` containing ray `r` of level `from`.
    pub fn min_cone(&self, from: usize, r: usize, to: usize) -> Result<Cone> {
        let v = self.level(from)?.ray(r).clone();
        Ok(self.level(to)?.barycentric_coords(&v)?.0)
    }

    /// Pulls an invariant divisor on level `from` back to level `to ≥ from`.
    pub fn pull_divisor(
        &self,
        d: &InvariantDivisor,
        from: usize,
        to: usize,
    ) -> Result<InvariantDivisor> {
        self.level(to)?;
        if from > to {
            return Err(Error::InvalidInput(format!(
                "cannot pull back from level {from} to level {to}"
            )));
        }
        self.steps[from..to]
            .iter()
            .try_fold(d.clone(), |acc, s| pullback_divisor(s, &acc))
    }

    /// Pushes a class on level `from` down to level `to ≤ from`.
    pub fn push_class(&self, c: &ChowClass, from: usize, to: usize) -> Result<ChowClass> {
        self.level(from)?;
        if to > from {
            return Err(Error::InvalidInput(format!(
                "cannot push forward from level {from} to level {to}"
            )));
        }
        self.steps[to..from]
            .iter()
            .rev()
            .try_fold(c.clone(), |acc, s| crate::chow::pushforward(s, &acc))
    }
}

/// Free-function form of [`ResolutionTower::extend`].
pub fn extend_tower(tower: &ResolutionTower, v: &LatticeVector) -> Result<ResolutionTower> {
    tower.extend(v)
}

/// Discrepancies over level `i` of the rays created after level `i` and
/// present at level `j`.
pub fn relative_canonical(
    tower: &ResolutionTower,
    i: usize,
    j: usize,
) -> Result<BTreeMap<LatticeVector, Q>> {
    let (lower, upper) = (tower.level(i)?, tower.level(j)?);
    let mut out = BTreeMap::new();
    if i >= j {
        return Ok(out);
    }
    for v in upper.rays() {
        if lower.ray_index(v).is_some() {
            continue;
        }
        let (_, coords) = lower.barycentric_coords(v)?;
        let a = coords.iter().fold(Q::zero(), |s, c| s + c) - Q::one();
        out.insert(v.clone(), a);
    }
    Ok(out)
}

/// `K_{i→j}` as an invariant divisor on level `j`.
pub fn relative_canonical_divisor(
    tower: &ResolutionTower,
    i: usize,
    j: usize,
) -> Result<InvariantDivisor> {
    let fan = tower.level(j)?;
    let mut d = InvariantDivisor::zero(fan);
    for (v, a) in relative_canonical(tower, i, j)? {
        d.coeffs[fan.ray_index(&v).unwrap()] = Scalar::from_rational(a);
    }
    Ok(d)
}

/// Exponent support of a plane-curve germ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    exponents: Vec<[i64; 2]>,
}

impl NewtonPolygon {
    pub fn new(exponents: impl IntoIterator<Item = [i64; 2]>) -> Result<Self> {
        let mut exponents: Vec<[i64; 2]> = exponents.into_iter().collect();
        if exponents.is_empty() {
            return Err(Error::InvalidInput(
                "Newton polygon needs an exponent".into(),
            ));
        }
        if let Some(e) = exponents.iter().find(|e| e[0] < 0 || e[1] < 0) {
            return Err(Error::InvalidInput(format!(
                "exponent ({},{}) is not in the positive quadrant",
                e[0], e[1]
            )));
        }
        exponents.sort_unstable();
        exponents.dedup();
        Ok(NewtonPolygon { exponents })
    }

    pub fn exponents(&self) -> &[[i64; 2]] {
        &self.exponents
    }

    /// Vertices of the compact boundary, from the steepest end (smallest
    /// first coordinate) to the flattest.
    pub fn vertices(&self) -> Vec<[i64; 2]> {
        let start = *self.exponents.iter().min_by_key(|e| (e[0], e[1])).unwrap();
        let end = *self.exponents.iter().min_by_key(|e| (e[1], e[0])).unwrap();
        let mut verts = vec![start];
        let mut cur = start;
        while cur != end {
            let next = self
                .exponents
                .iter()
                .filter(|e| e[0] > cur[0] && e[1] < cur[1])
                .min_by(|p, q| {
                    let (pdx, pdy) = (p[0] - cur[0], p[1] - cur[1]);
                    let (qdx, qdy) = (q[0] - cur[0], q[1] - cur[1]);
                    (pdy * qdx).cmp(&(qdy * pdx)).then(q[0].cmp(&p[0]))
                })
                .copied()
                .expect("end vertex lies below and to the right");
            verts.push(next);
            cur = next;
        }
        verts
    }

    pub fn compact_edges(&self) -> Vec<([i64; 2], [i64; 2])> {
        self.vertices().windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Primitive inner normals of the compact edges.
    pub fn normals(&self) -> Vec<LatticeVector> {
        self.compact_edges()
            .iter()
            .map(|(a, b)| {
                let (dx, dy) = (b[0] - a[0], a[1] - b[1]);
                let g = dx.gcd(&dy);
                LatticeVector::new(vec![dy / g, dx / g])
            })
            .collect()
    }

    pub fn has_compact_edge(&self) -> bool {
        self.vertices().len() > 1
    }
}

/// `(N, face_length)`: the order of the germ along `E_v` and the lattice
/// length of the face of the polygon where `⟨v,·⟩` is minimal.
pub fn newton_data(p: &NewtonPolygon, v: &LatticeVector) -> Result<(i64, i64)> {
    let c = v.coords();
    if c.len() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            got: c.len(),
        });
    }
    if c[0] < 0 || c[1] < 0 || v.is_zero() {
        return Err(Error::InvalidInput(format!(
            "{v} is not in the positive quadrant"
        )));
    }
    let pair = |e: &[i64; 2]| c[0] * e[0] + c[1] * e[1];
    let n = p.exponents.iter().map(pair).min().unwrap();
    let face: Vec<&[i64; 2]> = p.exponents.iter().filter(|e| pair(e) == n).collect();
    let (first, last) = (face[0], face[face.len() - 1]);
    let length = (last[0] - first[0]).abs().gcd(&(last[1] - first[1]).abs());
    Ok((n, length))
}

/// Extends `tower` until every compact-edge normal of `p` is a ray, each
/// step inserting the sum of the two rays of the cone containing the normal.
pub fn newton_resolve(tower: &ResolutionTower, p: &NewtonPolygon) -> Result<ResolutionTower> {
    let mut t = tower.clone();
    for n in p.normals() {
        while t.top().ray_index(&n).is_none() {
            let fan = Arc::clone(t.top());
            let (cone, _) = fan.barycentric_coords(&n)?;
            if cone.dim() != 2 || !fan.is_smooth_cone(&cone)? {
                return Err(Error::NotResolved(format!(
                    "normal {n} does not lie in a smooth two-dimensional cone"
                )));
            }
            let v = fan.ray(cone.rays()[0]) + fan.ray(cone.rays()[1]);
            t = t.extend(&v)?;
        }
    }
    Ok(t)
}

/// A named plane-curve germ given by its Newton polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Germ {
    pub name: String,
    pub polygon: NewtonPolygon,
    pub nondegenerate: bool,
}

impl Germ {
    pub fn new(name: &str, exponents: impl IntoIterator<Item = [i64; 2]>) -> Result<Self> {
        Ok(Germ {
            name: name.to_string(),
            polygon: NewtonPolygon::new(exponents)?,
            nondegenerate: true,
        })
    }
}

/// A divisorial piece of the modification system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    /// The invariant divisor of a ray, at the first level where it exists.
    Boundary(LatticeVector),
    /// The zero locus of a germ on the affine plane.
    Hypersurface(Germ),
    /// The whole system.
    Ambient,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Boundary(v) => write!(f, "ray:{v}"),
            Atom::Hypersurface(g) => write!(f, "germ:{}", g.name),
            Atom::Ambient => f.write_str("ambient"),
        }
    }
}

/// A finite combination of atoms with scalar coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SystemDivisor {
    terms: Vec<(Atom, Scalar)>,
}

impl SystemDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn with(mut self, atom: Atom, coeff: Scalar) -> Result<Self> {
        if atom == Atom::Ambient {
            return Err(Error::InvalidInput(
                "the ambient atom cannot appear in a divisor".into(),
            ));
        }
        self.terms.push((atom, coeff));
        Ok(self)
    }

    pub fn terms(&self) -> &[(Atom, Scalar)] {
        &self.terms
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        SystemDivisor {
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c * s)).collect(),
        }
    }
}

/// A closed union of atoms; `{Ambient}` is the whole system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructibleSet {
    atoms: Vec<Atom>,
}

impl ConstructibleSet {
    pub fn ambient() -> Self {
        ConstructibleSet {
            atoms: vec![Atom::Ambient],
        }
    }

    pub fn of(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("constructible set is empty".into()));
        }
        Ok(ConstructibleSet { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_ambient(&self) -> bool {
        self.atoms.contains(&Atom::Ambient)
    }

    pub fn union(&self, other: &ConstructibleSet) -> ConstructibleSet {
        let mut atoms = self.atoms.clone();
        atoms.extend(
            other
                .atoms
                .iter()
                .filter(|a| !self.atoms.contains(a))
                .cloned(),
        );
        ConstructibleSet { atoms }
    }
}

impl fmt::Display for ConstructibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A prime component of the resolved configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    /// Invariant divisor of a ray (index in the level fan).
    Ray(usize),
    /// Strict transform of the germ.
    Strict,
}

#[derive(Clone, Debug)]
pub struct StrictTransform {
    pub germ: Germ,
    pub coeff: Scalar,
    pub in_set: bool,
}

/// The data `(J, J_S, m_j)` on one level of a tower.
#[derive(Clone, Debug)]
pub struct ResolvedData {
    pub tower: ResolutionTower,
    pub level: usize,
    pub set: ConstructibleSet,
    /// `m` for every ray of the level fan.
    pub ray_coeffs: Vec<Scalar>,
    /// Membership of every ray in the pulled-back set.
    pub ray_in_set: Vec<bool>,
    pub strict: Option<StrictTransform>,
}

impl ResolvedData {
    pub fn fan(&self) -> &Arc<Fan> {
        &self.tower.levels[self.level]
    }

    pub fn is_ambient(&self) -> bool {
        self.set.is_ambient()
    }

    pub fn ray_in_j(&self, r: usize) -> bool {
        self.ray_in_set[r] || !self.ray_coeffs[r].is_zero()
    }

    /// Ray indices in `J`.
    pub fn j_rays(&self) -> Vec<usize> {
        (0..self.ray_coeffs.len())
            .filter(|&r| self.ray_in_j(r))
            .collect()
    }

    /// `J`: rays in increasing index order, then the strict transform.
    pub fn components(&self) -> Vec<Component> {
        let mut out: Vec<Component> = self.j_rays().into_iter().map(Component::Ray).collect();
        if self.strict.is_some() {
            out.push(Component::Strict);
        }
        out
    }

    pub fn coefficient(&self, c: Component) -> Scalar {
        match c {
            Component::Ray(r) => self.ray_coeffs[r].clone(),
            Component::Strict => self
                .strict
                .as_ref()
                .map(|s| s.coeff.clone())
                .unwrap_or_default(),
        }
    }

    pub fn in_set(&self, c: Component) -> bool {
        match c {
            Component::Ray(r) => self.ray_in_set[r],
            Component::Strict => self.strict.as_ref().is_some_and(|s| s.in_set),
        }
    }

    pub fn describe(&self, c: Component) -> String {
        match c {
            Component::Ray(r) => format!("ray:{}", self.fan().ray(r)),
            Component::Strict => format!(
                "strict:{}",
                self.strict.as_ref().map_or("?", |s| s.germ.name.as_str())
            ),
        }
    }

    /// Number of points in which the strict transform meets `E_r`.
    pub fn face_length(&self, r: usize) -> i64 {
        match &self.strict {
            Some(s) => newton_data(&s.germ.polygon, self.fan().ray(r))
                .map(|(_, l)| l)
                .unwrap_or(0),
            None => 0,
        }
    }

    /// Rejects `m_j = −1`, and numeric `m_j ≤ −1`.
    pub fn check_convergence(&self) -> Result<()> {
        let minus_one = Scalar::from_int(-1);
        for c in self.components() {
            let m = self.coefficient(c);
            let bad = m == minus_one || m.as_rational().is_some_and(|q| q <= -Q::one());
            if bad {
                return Err(Error::NonConvergent {
                    atom: self.describe(c),
                    value: m.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Carries the coefficients up to level `to` by the normal-crossing rule
    /// `1 + m_v = Σ c_ρ (1 + m_ρ)` on each new ray. The germ's share is not
    /// transported but re-read from its Newton polygon, since its total
    /// transform is not a pull-back from unresolved levels.
    pub fn transport(&self, to: usize) -> Result<ResolvedData> {
        if to < self.level {
            return Err(Error::InvalidInput(format!(
                "cannot transport from level {} to level {to}",
                self.level
            )));
        }
        let germ_part = |fan: &Fan, sign: i64| -> Result<Vec<Scalar>> {
            fan.rays()
                .iter()
                .map(|w| match &self.strict {
                    Some(s) => {
                        let (n, _) = newton_data(&s.germ.polygon, w)?;
                        Ok(s.coeff.scale(&Q::from_integer((sign * n).into())))
                    }
                    None => Ok(Scalar::zero()),
                })
                .collect()
        };
        let mut coeffs: Vec<Scalar> = self
            .ray_coeffs
            .iter()
            .zip(germ_part(self.fan(), -1)?)
            .map(|(a, b)| a + &b)
            .collect();
        for s in &self.tower.steps()[self.level..to] {
            coeffs = (0..s.after.rays().len())
                .map(|r| match s.old_index(r) {
                    Some(o) => coeffs[o].clone(),
                    None => {
                        let nu: Scalar = s
                            .target_cone
                            .rays()
                            .iter()
                            .zip(&s.coords)
                            .map(|(&t, c)| (&coeffs[t] + &Scalar::one()).scale(c))
                            .sum();
                        &nu - &Scalar::one()
                    }
                })
                .collect();
        }
        let coeffs = coeffs
            .iter()
            .zip(germ_part(self.tower.level(to)?, 1)?)
            .map(|(a, b)| a + &b)
            .collect();
        let (ray_in_set, strict_in_set) = set_membership(&self.tower, to, &self.set)?;
        Ok(ResolvedData {
            tower: self.tower.clone(),
            level: to,
            set: self.set.clone(),
            ray_coeffs: coeffs,
            ray_in_set,
            strict: self.strict.clone().map(|mut s| {
                s.in_set = strict_in_set;
                s
            }),
        })
    }
}

fn the_germ<'a>(d: &'a SystemDivisor, s: &'a ConstructibleSet) -> Result<Option<&'a Germ>> {
    let mut found: Option<&Germ> = None;
    let atoms = d.terms.iter().map(|(a, _)| a).chain(s.atoms.iter());
    for a in atoms {
        if let Atom::Hypersurface(g) = a {
            match found {
                Some(h) if h != g => {
                    return Err(Error::InvalidInput(
                        "at most one hypersurface germ is supported".into(),
                    ))
                }
                _ => found = Some(g),
            }
        }
    }
    Ok(found)
}

fn check_germ_base(tower: &ResolutionTower, g: &Germ) -> Result<()> {
    let base = tower.base();
    let quadrant = base.rank() == 2
        && base.max_cones().len() == 1
        && base.rays()
            == [
                LatticeVector::new(vec![0, 1]),
                LatticeVector::new(vec![1, 0]),
            ];
    if !quadrant {
        return Err(Error::InvalidInput(format!(
            "germ {} needs the affine plane (the cone spanned by (1,0),(0,1)) as base",
            g.name
        )));
    }
    Ok(())
}

/// Level at which a boundary atom lives; it must exist at or below `level`.
fn atom_level(tower: &ResolutionTower, v: &LatticeVector, level: usize) -> Result<usize> {
    let l = tower
        .creation_level(v)
        .ok_or_else(|| Error::UnknownAtom(format!("ray:{v}")))?;
    if l > level {
        return Err(Error::NotResolved(format!(
            "ray:{v} is not a divisor at level {level}"
        )));
    }
    Ok(l)
}

/// Total preimage of the set on level `level`: membership per ray and of
/// the strict transform.
fn set_membership(
    tower: &ResolutionTower,
    level: usize,
    set: &ConstructibleSet,
) -> Result<(Vec<bool>, bool)> {
    let fan = tower.level(level)?;
    let mut member = vec![false; fan.rays().len()];
    let mut strict = false;
    if set.is_ambient() {
        return Ok((member, strict));
    }
    for a in &set.atoms {
        match a {
            Atom::Boundary(u) => {
                let l = atom_level(tower, u, level)?;
                let at_l = tower.level(l)?;
                let ui = at_l.ray_index(u).unwrap();
                for (w, m) in fan.rays().iter().zip(member.iter_mut()) {
                    let (cone, _) = at_l.barycentric_coords(w)?;
                    if cone.contains_ray(ui) {
                        *m = true;
                    }
                }
            }
            Atom::Hypersurface(g) => {
                check_germ_base(tower, g)?;
                strict = g.polygon.has_compact_edge();
                for (w, m) in fan.rays().iter().zip(member.iter_mut()) {
                    if newton_data(&g.polygon, w)?.0 > 0 {
                        *m = true;
                    }
                }
            }
            Atom::Ambient => {}
        }
    }
    Ok((member, strict))
}

/// Assembles `m_j = D + K_{0→level}` and the set membership on `level`
/// without checking resolution or convergence.
fn assemble(
    tower: &ResolutionTower,
    level: usize,
    d: &SystemDivisor,
    set: &ConstructibleSet,
) -> Result<ResolvedData> {
    let fan = tower.level(level)?;
    let germ = the_germ(d, set)?;
    if let Some(g) = germ {
        check_germ_base(tower, g)?;
    }
    let mut coeffs = relative_canonical_divisor(tower, 0, level)?.coeffs;
    let mut strict_coeff = Scalar::zero();
    for (a, c) in &d.terms {
        match a {
            Atom::Boundary(u) => {
                let l = atom_level(tower, u, level)?;
                let at_l = tower.level(l)?;
                let mut div = InvariantDivisor::zero(at_l);
                div.coeffs[at_l.ray_index(u).unwrap()] = c.clone();
                let pulled = tower.pull_divisor(&div, l, level)?;
                for (x, y) in coeffs.iter_mut().zip(&pulled.coeffs) {
                    *x = &*x + y;
                }
            }
            Atom::Hypersurface(g) => {
                for (x, w) in coeffs.iter_mut().zip(fan.rays()) {
                    let (n, _) = newton_data(&g.polygon, w)?;
                    *x = &*x + &c.scale(&Q::from_integer(n.into()));
                }
                strict_coeff = &strict_coeff + c;
            }
            Atom::Ambient => unreachable!("rejected by SystemDivisor::with"),
        }
    }
    let (ray_in_set, strict_in_set) = set_membership(tower, level, set)?;
    let strict = germ
        .filter(|g| g.polygon.has_compact_edge())
        .map(|g| StrictTransform {
            germ: g.clone(),
            coeff: strict_coeff,
            in_set: strict_in_set,
        });
    Ok(ResolvedData {
        tower: tower.clone(),
        level,
        set: set.clone(),
        ray_coeffs: coeffs,
        ray_in_set,
        strict,
    })
}

/// Checks that the germ (if any) is resolved on the level of `rd`.
fn check_newton_resolved(rd: &ResolvedData) -> Result<()> {
    let Some(s) = &rd.strict else { return Ok(()) };
    if !s.germ.nondegenerate {
        return Err(Error::NotResolved(format!(
            "germ {} is not flagged Newton-nondegenerate",
            s.germ.name
        )));
    }
    for v in s.germ.polygon.normals() {
        if rd.fan().ray_index(&v).is_none() {
            return Err(Error::NotResolved(format!(
                "edge normal {v} of germ {} is not a ray at level {}",
                s.germ.name, rd.level
            )));
        }
    }
    Ok(())
}

/// Normal-crossing data of `(D, S)` on the top level of the tower.
pub fn resolve(
    tower: &ResolutionTower,
    d: &SystemDivisor,
    s: &ConstructibleSet,
) -> Result<ResolvedData> {
    resolve_at(tower, tower.height(), d, s)
}

/// Normal-crossing data of `(D, S)` on a given level, with
/// `m_j = D + K_{0→level}`.
pub fn resolve_at(
    tower: &ResolutionTower,
    level: usize,
    d: &SystemDivisor,
    s: &ConstructibleSet,
) -> Result<ResolvedData> {
    let fan = tower.level(level)?;
    if !fan.is_smooth() {
        return Err(Error::NotSmooth(format!("level {level}")));
    }
    let rd = assemble(tower, level, d, s)?;
    check_newton_resolved(&rd)?;
    rd.check_convergence()?;
    Ok(rd)
}

/// Like [`resolve_at`] but skipping the resolution and convergence checks;
/// used to seed [`ResolvedData::transport`] from unresolved levels.
pub fn raw_data(
    tower: &ResolutionTower,
    level: usize,
    d: &SystemDivisor,
    s: &ConstructibleSet,
) -> Result<ResolvedData> {
    assemble(tower, level, d, s)
}

/// Top-level rays lying over the interior of the base cone `p`.
pub(crate) fn fiber_rays(tower: &ResolutionTower, level: usize, p: &Cone) -> Result<Vec<usize>> {
    let base = tower.base();
    if !base.has_cone(p) || p.dim() != base.rank() {
        return Err(Error::UnknownCone(format!(
            "{} is not a full-dimensional cone of the base",
            base.describe_cone(p)
        )));
    }
    let fan = tower.level(level)?;
    let mut out = Vec::new();
    for (r, w) in fan.rays().iter().enumerate() {
        if &base.barycentric_coords(w)?.0 == p {
            out.push(r);
        }
    }
    Ok(out)
}

/// `S ∩ p`: the exceptional atoms of the top level lying over the fixed
/// point `p` of the base and belonging to the preimage of `S`.
pub fn restrict_to_point(
    tower: &ResolutionTower,
    s: &ConstructibleSet,
    p: &Cone,
) -> Result<ConstructibleSet> {
    let top = tower.height();
    let (member, _) = set_membership(tower, top, s)?;
    let fan = tower.top();
    let atoms: Vec<Atom> = fiber_rays(tower, top, p)?
        .into_iter()
        .filter(|&r| s.is_ambient() || member[r])
        .map(|r| Atom::Boundary(fan.ray(r).clone()))
        .collect();
    if atoms.is_empty() {
        return Err(Error::EmptyFiber(tower.base().describe_cone(p)));
    }
    ConstructibleSet::of(atoms)
}
