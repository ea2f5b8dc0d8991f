//! Lattice and fan combinatorics: simplicial fans of rank at most three,
//! smoothness and completeness, star subdivisions (toric blow-ups),
//! barycentric coordinates and orbit Euler characteristics.

pub mod library;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::chow::RingCache;
use crate::error::{Error, Result};
use crate::linalg::{self, to_q};
use crate::scalar::Q;

/// Largest supported lattice rank.
pub const MAX_RANK: usize = 3;

/// An integer vector of the ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    /// `v / gcd(|v_i|)`; fails on the zero vector.
    pub fn primitive(coords: &[i64]) -> Result<Self> {
        let g = coords.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        if g == 0 {
            return Err(Error::ZeroVector);
        }
        Ok(LatticeVector(coords.iter().map(|x| x / g).collect()))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn is_primitive(&self) -> bool {
        self.0.iter().fold(0i64, |acc, &x| acc.gcd(&x)) == 1
    }

    pub fn to_q(&self) -> Vec<Q> {
        to_q(&self.0)
    }

    /// Pairing with a rational dual vector.
    pub fn pair(&self, m: &[Q]) -> Q {
        self.0.iter().zip(m).fold(Q::zero(), |acc, (&x, y)| {
            acc + y * Q::from_integer(x.into())
        })
    }

    pub fn dot(&self, other: &[i64]) -> i64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Primitive representative of a nonzero integer vector.
pub fn primitive_vector(v: &[i64]) -> Result<LatticeVector> {
    LatticeVector::primitive(v)
}

/// A cone, as the sorted set of indices of its rays in the parent fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone(rays)
    }

    pub fn empty() -> Self {
        Cone(Vec::new())
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    /// Whether `self` is a face of `other`.
    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|r| other.contains_ray(*r))
    }

    pub fn union(&self, other: &Cone) -> Cone {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Cone::new(v)
    }

    pub fn without(&self, r: usize) -> Cone {
        Cone(self.0.iter().copied().filter(|&x| x != r).collect())
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "r{r}")?;
        }
        f.write_str("}")
    }
}

/// Cones ordered by dimension first, then lexicographically.
fn graded_cmp(a: &Cone, b: &Cone) -> Ordering {
    a.dim().cmp(&b.dim()).then_with(|| a.cmp(b))
}

/// Unvalidated fan description, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FanData {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    /// Declared completeness, checked against the cones when present.
    pub complete: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnsupportedRank(usize),
    WrongRayLength {
        ray: usize,
        len: usize,
    },
    ZeroRay(usize),
    NonPrimitiveRay(usize),
    DuplicateRay(usize, usize),
    BadRayIndex {
        cone: usize,
        index: usize,
    },
    EmptyCone(usize),
    NonSimplicial(usize),
    UnusedRay(usize),
    /// Relative interiors of two distinct cones meet, so their intersection
    /// is not a common face.
    Overlap {
        a: Vec<usize>,
        b: Vec<usize>,
    },
    CompletenessMismatch {
        declared: bool,
        actual: bool,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnsupportedRank(n) => write!(f, "unsupported rank {n} (expected 1..=3)"),
            Violation::WrongRayLength { ray, len } => {
                write!(f, "ray {ray} has {len} coordinates")
            }
            Violation::ZeroRay(r) => write!(f, "ray {r} is zero"),
            Violation::NonPrimitiveRay(r) => write!(f, "non-primitive ray {r}"),
            Violation::DuplicateRay(a, b) => write!(f, "rays {a} and {b} coincide"),
            Violation::BadRayIndex { cone, index } => {
                write!(f, "cone {cone} references missing ray {index}")
            }
            Violation::EmptyCone(c) => write!(f, "cone {c} has no rays"),
            Violation::NonSimplicial(c) => write!(f, "cone {c} is not simplicial"),
            Violation::UnusedRay(r) => write!(f, "ray {r} lies in no cone"),
            Violation::Overlap { a, b } => {
                write!(
                    f,
                    "cones {a:?} and {b:?} overlap in their relative interiors"
                )
            }
            Violation::CompletenessMismatch { declared, actual } => write!(
                f,
                "declared complete = {declared}, but the cones give complete = {actual}"
            ),
        }
    }
}

/// Outcome of [`validate_fan`]; empty iff the fan is well formed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks a raw fan description. Cone indices refer to `data.rays`.
pub fn validate_fan(data: &FanData) -> ValidationReport {
    let mut violations = Vec::new();
    let n = data.rank;
    if n == 0 || n > MAX_RANK {
        violations.push(Violation::UnsupportedRank(n));
        return ValidationReport { violations };
    }
    let mut rays_ok = true;
    for (i, r) in data.rays.iter().enumerate() {
        if r.len() != n {
            violations.push(Violation::WrongRayLength {
                ray: i,
                len: r.len(),
            });
            rays_ok = false;
        } else if r.iter().all(|&x| x == 0) {
            violations.push(Violation::ZeroRay(i));
            rays_ok = false;
        } else if !LatticeVector::new(r.clone()).is_primitive() {
            violations.push(Violation::NonPrimitiveRay(i));
        }
    }
    for i in 0..data.rays.len() {
        for j in i + 1..data.rays.len() {
            if data.rays[i] == data.rays[j] {
                violations.push(Violation::DuplicateRay(i, j));
            }
        }
    }
    let mut cones_ok = true;
    let mut used = vec![false; data.rays.len()];
    for (ci, c) in data.cones.iter().enumerate() {
        if c.is_empty() {
            violations.push(Violation::EmptyCone(ci));
            cones_ok = false;
            continue;
        }
        let mut bad = false;
        for &idx in c {
            if idx >= data.rays.len() {
                violations.push(Violation::BadRayIndex {
                    cone: ci,
                    index: idx,
                });
                bad = true;
            } else {
                used[idx] = true;
            }
        }
        if bad || !rays_ok {
            cones_ok = false;
            continue;
        }
        let mut sorted = c.clone();
        sorted.sort_unstable();
        sorted.dedup();
        let vecs: Vec<Vec<Q>> = sorted.iter().map(|&i| to_q(&data.rays[i])).collect();
        if sorted.len() != c.len() || linalg::rank(&vecs) != vecs.len() {
            violations.push(Violation::NonSimplicial(ci));
            cones_ok = false;
        }
    }
    for (i, u) in used.iter().enumerate() {
        if !u {
            violations.push(Violation::UnusedRay(i));
        }
    }
    if !(cones_ok && rays_ok) {
        return ValidationReport { violations };
    }

    let rays: Vec<Vec<Q>> = data.rays.iter().map(|r| to_q(r)).collect();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for c in &data.cones {
        let mut sorted = c.clone();
        sorted.sort_unstable();
        for k in 1..=sorted.len() {
            for sub in linalg::subsets(sorted.len(), k) {
                faces.push(sub.iter().map(|&i| sorted[i]).collect());
            }
        }
    }
    faces.sort();
    faces.dedup();
    for i in 0..faces.len() {
        for j in i + 1..faces.len() {
            let (a, b) = (&faces[i], &faces[j]);
            if relints_meet(&rays, a, b) {
                violations.push(Violation::Overlap {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    if let Some(declared) = data.complete {
        if violations.is_empty() {
            let maxes: Vec<Vec<usize>> = maximal_sets(&data.cones);
            let actual = facets_paired(n, &maxes, &[]);
            if actual != declared {
                violations.push(Violation::CompletenessMismatch { declared, actual });
            }
        }
    }
    ValidationReport { violations }
}

/// Whether the relative interiors of two simplicial cones intersect.
fn relints_meet(rays: &[Vec<Q>], a: &[usize], b: &[usize]) -> bool {
    if a.is_empty() || b.is_empty() {
        return a.is_empty() && b.is_empty();
    }
    let sub_a = a.iter().all(|r| b.contains(r));
    let sub_b = b.iter().all(|r| a.contains(r));
    if sub_a || sub_b {
        return sub_a && sub_b;
    }
    // kernel of [u_a | -u_b]; need a kernel vector with all entries > 0
    let n = rays[a[0]].len();
    let cols: Vec<Vec<Q>> = a
        .iter()
        .map(|&i| rays[i].clone())
        .chain(b.iter().map(|&i| rays[i].iter().map(|x| -x).collect()))
        .collect();
    let matrix: Vec<Vec<Q>> = (0..n)
        .map(|row| cols.iter().map(|c| c[row].clone()).collect())
        .collect();
    let kernel = nullspace(&matrix);
    if kernel.is_empty() {
        return false;
    }
    let coordinate_rows: Vec<Vec<Q>> = (0..cols.len())
        .map(|i| kernel.iter().map(|k| k[i].clone()).collect())
        .collect();
    linalg::strict_system_feasible(&coordinate_rows)
}

fn nullspace(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = m.to_vec();
    // reduce to RREF
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..r.len()).find(|&i| !r[i][c].is_zero()) else {
            continue;
        };
        r.swap(row, p);
        let inv = r[row][c].recip();
        for x in r[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..r.len() {
            if i != row && !r[i][c].is_zero() {
                let f = r[i][c].clone();
                for j in 0..cols {
                    let d = &f * &r[row][j];
                    r[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        row += 1;
        if row == r.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[i][f].clone();
            }
            v
        })
        .collect()
}

fn maximal_sets(cones: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let sorted: Vec<Vec<usize>> = cones
        .iter()
        .map(|c| {
            let mut s = c.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let mut out: Vec<Vec<usize>> = sorted
        .iter()
        .filter(|c| {
            !sorted
                .iter()
                .any(|d| d.len() > c.len() && c.iter().all(|r| d.contains(r)))
        })
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Facet-pairing test restricted to the star of `base`: every maximal cone
/// containing `base` is full-dimensional and each of its facets containing
/// `base` lies in exactly two maximal cones.
fn facets_paired(rank: usize, maxes: &[Vec<usize>], base: &[usize]) -> bool {
    let star: Vec<&Vec<usize>> = maxes
        .iter()
        .filter(|c| base.iter().all(|r| c.contains(r)))
        .collect();
    if star.is_empty() {
        return false;
    }
    for c in &star {
        if c.len() != rank {
            return false;
        }
        for drop in c.iter() {
            if base.contains(drop) {
                continue;
            }
            let facet: Vec<usize> = c.iter().copied().filter(|r| r != drop).collect();
            let count = star
                .iter()
                .filter(|d| facet.iter().all(|r| d.contains(r)))
                .count();
            if count != 2 {
                return false;
            }
        }
    }
    true
}

/// A validated simplicial fan with lexicographically sorted rays and cones.
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Cone>,
    /// All cones, including the zero cone, ordered by dimension then
    /// lexicographically.
    cones: Vec<Cone>,
    smooth: bool,
    complete: bool,
    pub(crate) ring: RingCache,
}

impl Clone for Fan {
    fn clone(&self) -> Self {
        Fan {
            rank: self.rank,
            rays: self.rays.clone(),
            max_cones: self.max_cones.clone(),
            cones: self.cones.clone(),
            smooth: self.smooth,
            complete: self.complete,
            ring: RingCache::default(),
        }
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("rank", &self.rank)
            .field("rays", &self.rays)
            .field("max_cones", &self.max_cones)
            .field("smooth", &self.smooth)
            .field("complete", &self.complete)
            .finish()
    }
}

impl Fan {
    /// Validates `data` and builds the fan, re-indexing rays in sorted order.
    pub fn from_data(data: &FanData) -> Result<Fan> {
        let report = validate_fan(data);
        if !report.is_valid() {
            return Err(Error::InvalidFan(report));
        }
        let rays: Vec<LatticeVector> = data.rays.iter().cloned().map(LatticeVector).collect();
        Ok(Self::assemble(data.rank, rays, &data.cones))
    }

    pub fn new(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Fan> {
        Self::from_data(&FanData {
            rank,
            rays: rays.iter().map(|r| r.to_vec()).collect(),
            cones: cones.iter().map(|c| c.to_vec()).collect(),
            complete: None,
        })
    }

    /// Builds a fan from already-valid data.
    fn assemble(rank: usize, rays: Vec<LatticeVector>, cones: &[Vec<usize>]) -> Fan {
        let mut order: Vec<usize> = (0..rays.len()).collect();
        order.sort_by(|&a, &b| rays[a].cmp(&rays[b]));
        let mut new_index = vec![0; rays.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let sorted_rays: Vec<LatticeVector> = order.iter().map(|&i| rays[i].clone()).collect();
        let remapped: Vec<Vec<usize>> = cones
            .iter()
            .map(|c| c.iter().map(|&i| new_index[i]).collect())
            .collect();
        let max_sets = maximal_sets(&remapped);
        let max_cones: Vec<Cone> = max_sets.iter().cloned().map(Cone::new).collect();
        let mut all: Vec<Cone> = Vec::new();
        for c in &max_cones {
            for k in 0..=c.dim() {
                for sub in linalg::subsets(c.dim(), k) {
                    all.push(Cone::new(sub.iter().map(|&i| c.0[i]).collect()));
                }
            }
        }
        all.sort_by(graded_cmp);
        all.dedup();
        let complete = facets_paired(rank, &max_sets, &[]);
        let mut fan = Fan {
            rank,
            rays: sorted_rays,
            max_cones,
            cones: all,
            smooth: false,
            complete,
            ring: RingCache::default(),
        };
        fan.smooth = fan.max_cones.iter().all(|c| fan.cone_is_unimodular(c));
        fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn ray_index(&self, v: &LatticeVector) -> Option<usize> {
        self.rays.binary_search(v).ok()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    /// All cones including the zero cone, by dimension then lexicographic.
    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cones_of_dim(&self, k: usize) -> impl Iterator<Item = &Cone> {
        self.cones.iter().filter(move |c| c.dim() == k)
    }

    pub fn has_cone(&self, c: &Cone) -> bool {
        self.cones.binary_search_by(|x| graded_cmp(x, c)).is_ok()
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn to_data(&self) -> FanData {
        FanData {
            rank: self.rank,
            rays: self.rays.iter().map(|r| r.0.clone()).collect(),
            cones: self.max_cones.iter().map(|c| c.0.clone()).collect(),
            complete: Some(self.complete),
        }
    }

    /// The rays of a cone as vectors, e.g. `{(1,0),(0,1)}`.
    pub fn describe_cone(&self, c: &Cone) -> String {
        let parts: Vec<String> = c.rays().iter().map(|&r| self.rays[r].to_string()).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn cone_from_rays(&self, rays: &[LatticeVector]) -> Result<Cone> {
        let idx: Option<Vec<usize>> = rays.iter().map(|r| self.ray_index(r)).collect();
        let c = idx
            .map(Cone::new)
            .ok_or_else(|| Error::UnknownCone(format!("{rays:?}")))?;
        if self.has_cone(&c) {
            Ok(c)
        } else {
            Err(Error::UnknownCone(self.describe_cone(&c)))
        }
    }

    fn cone_is_unimodular(&self, c: &Cone) -> bool {
        let rows: Vec<Vec<i64>> = c.rays().iter().map(|&r| self.rays[r].0.clone()).collect();
        linalg::maximal_minor_gcd(&rows).is_one()
    }

    /// Whether the cone's rays extend to a basis of the lattice.
    pub fn is_smooth_cone(&self, c: &Cone) -> Result<bool> {
        if !self.has_cone(c) {
            return Err(Error::UnknownCone(c.to_string()));
        }
        Ok(self.cone_is_unimodular(c))
    }

    /// Lattice multiplicity of a cone: the gcd of its maximal minors.
    pub fn multiplicity(&self, c: &Cone) -> num_bigint::BigInt {
        let rows: Vec<Vec<i64>> = c.rays().iter().map(|&r| self.rays[r].0.clone()).collect();
        linalg::maximal_minor_gcd(&rows).abs()
    }

    fn check_rank(&self, v: &LatticeVector) -> Result<()> {
        if v.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: v.rank(),
            });
        }
        Ok(())
    }

    /// The minimal cone containing `v` and the unique positive coefficients
    /// expressing `v` in its rays.
    pub fn barycentric_coords(&self, v: &LatticeVector) -> Result<(Cone, Vec<Q>)> {
        self.check_rank(v)?;
        if v.is_zero() {
            return Ok((Cone::empty(), Vec::new()));
        }
        let target = v.to_q();
        for c in &self.max_cones {
            let basis: Vec<Vec<Q>> = c.rays().iter().map(|&r| self.rays[r].to_q()).collect();
            let Some(coords) = linalg::coords_in_span(&basis, &target) else {
                continue;
            };
            if coords.iter().any(Signed::is_negative) {
                continue;
            }
            let (face, pos): (Vec<usize>, Vec<Q>) = c
                .rays()
                .iter()
                .zip(coords)
                .filter(|(_, x)| x.is_positive())
                .map(|(&r, x)| (r, x))
                .unzip();
            return Ok((Cone(face), pos));
        }
        Err(Error::OutsideSupport(v.to_string()))
    }

    /// Whether the orbit closure `V(c)` is complete.
    pub fn star_is_complete(&self, c: &Cone) -> bool {
        let maxes: Vec<Vec<usize>> = self.max_cones.iter().map(|m| m.0.clone()).collect();
        facets_paired(self.rank, &maxes, c.rays())
    }

    /// Euler characteristic of the orbit closure `V(c)`: the number of
    /// maximal cones containing `c`.
    pub fn orbit_euler(&self, c: &Cone) -> Result<i64> {
        if !self.has_cone(c) {
            return Err(Error::UnknownCone(c.to_string()));
        }
        if !self.star_is_complete(c) {
            return Err(Error::NotComplete(self.describe_cone(c)));
        }
        Ok(self.max_cones.iter().filter(|m| c.is_face_of(m)).count() as i64)
    }

    /// Star subdivision at `v`, the toric blow-up along the orbit closure of
    /// the minimal cone containing `v`.
    pub fn star_subdivide(self: &Arc<Self>, v: &LatticeVector) -> Result<StarSubdivision> {
        self.check_rank(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        if !v.is_primitive() {
            return Err(Error::InvalidInput(format!("{v} is not primitive")));
        }
        if self.ray_index(v).is_some() {
            return Err(Error::RayExists(v.to_string()));
        }
        let (target, coords) = self.barycentric_coords(v)?;

        let mut rays = self.rays.clone();
        rays.push(v.clone());
        let new = rays.len() - 1;
        let mut cones: Vec<Vec<usize>> = Vec::new();
        for c in &self.max_cones {
            if target.is_face_of(c) {
                for &r in target.rays() {
                    let mut nc = c.without(r).0;
                    nc.push(new);
                    cones.push(nc);
                }
            } else {
                cones.push(c.0.clone());
            }
        }
        let after = Arc::new(Fan::assemble(self.rank, rays, &cones));
        Ok(StarSubdivision {
            new_ray: v.clone(),
            target_cone: target,
            coords,
            before: Arc::clone(self),
            after,
        })
    }
}

/// Free-function form of [`Fan::star_subdivide`].
pub fn star_subdivide(fan: &Arc<Fan>, v: &LatticeVector) -> Result<(Arc<Fan>, StarSubdivision)> {
    let sub = fan.star_subdivide(v)?;
    Ok((Arc::clone(&sub.after), sub))
}

/// Free-function form of [`Fan::barycentric_coords`].
pub fn barycentric_coords(fan: &Fan, v: &LatticeVector) -> Result<(Cone, Vec<Q>)> {
    fan.barycentric_coords(v)
}

/// One star subdivision step: the inserted ray, the cone it subdivides and
/// the models before and after.
#[derive(Clone, Debug)]
pub struct StarSubdivision {
    pub new_ray: LatticeVector,
    /// Minimal cone of the old fan containing the new ray (old indices).
    pub target_cone: Cone,
    /// Positive coefficients of the new ray over the target cone's rays.
    pub coords: Vec<Q>,
    pub before: Arc<Fan>,
    pub after: Arc<Fan>,
}

impl StarSubdivision {
    /// `(Σ c_ρ) − 1`, the coefficient of the new divisor in the relative
    /// canonical divisor.
    pub fn discrepancy(&self) -> Q {
        self.coords.iter().fold(Q::zero(), |a, c| a + c) - Q::one()
    }

    /// Index of the new ray in the subdivided fan.
    pub fn new_ray_index(&self) -> usize {
        self.after
            .ray_index(&self.new_ray)
            .expect("new ray present")
    }

    /// Old-fan index of a ray of the new fan, `None` for the new ray.
    pub fn old_index(&self, new_index: usize) -> Option<usize> {
        self.before.ray_index(self.after.ray(new_index))
    }

    /// Smallest old cone containing a cone of the new fan.
    pub fn image_cone(&self, c: &Cone) -> Cone {
        let mut rays = Vec::new();
        for &r in c.rays() {
            match self.old_index(r) {
                Some(o) => rays.push(o),
                None => rays.extend_from_slice(self.target_cone.rays()),
            }
        }
        Cone::new(rays)
    }
}

#[cfg(test)]
mod tests {
    use super::library::*;
    use super::*;
    use crate::scalar::{q, q_frac};

    fn lv(c: &[i64]) -> LatticeVector {
        LatticeVector::new(c.to_vec())
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive_vector(&[2, 4]).unwrap(), lv(&[1, 2]));
        assert_eq!(primitive_vector(&[1, 0]).unwrap(), lv(&[1, 0]));
        assert_eq!(primitive_vector(&[-3, -6, 9]).unwrap(), lv(&[-1, -2, 3]));
        assert!(matches!(primitive_vector(&[0, 0]), Err(Error::ZeroVector)));
        let p = primitive_vector(&[-3, -6, 9]).unwrap();
        assert_eq!(primitive_vector(p.coords()).unwrap(), p);
    }

    #[test]
    fn validate_examples() {
        let p2 = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            cones: vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            complete: Some(true),
        };
        assert!(validate_fan(&p2).is_valid());
        let fan = Fan::from_data(&p2).unwrap();
        assert!(fan.is_smooth() && fan.is_complete());

        let quadrant = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![0, 1]],
            cones: vec![vec![0, 1]],
            complete: Some(false),
        };
        assert!(validate_fan(&quadrant).is_valid());
        let fan = Fan::from_data(&quadrant).unwrap();
        assert!(fan.is_smooth() && !fan.is_complete());

        let bad = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![4, 2]],
            cones: vec![vec![0, 1]],
            complete: None,
        };
        let report = validate_fan(&bad);
        assert_eq!(report.violations, vec![Violation::NonPrimitiveRay(1)]);
    }

    #[test]
    fn validation_catches_overlaps_and_mismatches() {
        let overlap = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            cones: vec![vec![0, 1], vec![0, 2]],
            complete: None,
        };
        assert!(matches!(
            validate_fan(&overlap).violations[..],
            [Violation::Overlap { .. }, ..]
        ));
        let wrong = FanData {
            complete: Some(true),
            ..quadrant_data()
        };
        assert!(matches!(
            validate_fan(&wrong).violations[..],
            [Violation::CompletenessMismatch {
                declared: true,
                actual: false
            }]
        ));
        let flat = FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![-1, 0]],
            cones: vec![vec![0, 1]],
            complete: None,
        };
        assert_eq!(
            validate_fan(&flat).violations,
            vec![Violation::NonSimplicial(0)]
        );
        let non_simplicial = FanData {
            rank: 3,
            rays: vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]],
            cones: vec![vec![0, 1, 2, 3]],
            complete: None,
        };
        assert_eq!(
            validate_fan(&non_simplicial).violations,
            vec![Violation::NonSimplicial(0)]
        );
    }

    fn quadrant_data() -> FanData {
        FanData {
            rank: 2,
            rays: vec![vec![1, 0], vec![0, 1]],
            cones: vec![vec![0, 1]],
            complete: None,
        }
    }

    #[test]
    fn smooth_cones() {
        let p2 = projective_plane();
        let c = p2.cone_from_rays(&[lv(&[1, 0]), lv(&[0, 1])]).unwrap();
        assert!(p2.is_smooth_cone(&c).unwrap());
        let w = weighted_112();
        let c = w.cone_from_rays(&[lv(&[1, 0]), lv(&[-1, -2])]).unwrap();
        assert!(!w.is_smooth_cone(&c).unwrap());
        assert_eq!(w.multiplicity(&c), 2.into());
        for r in 0..w.rays().len() {
            assert!(w.is_smooth_cone(&Cone::new(vec![r])).unwrap());
        }
        assert!(matches!(
            p2.is_smooth_cone(&Cone::new(vec![0, 1, 2])),
            Err(Error::UnknownCone(_))
        ));
    }

    #[test]
    fn star_subdivision_examples() {
        let quad = Arc::new(quadrant());
        let (after, sub) = star_subdivide(&quad, &lv(&[1, 1])).unwrap();
        assert_eq!(sub.coords, vec![q(1), q(1)]);
        assert_eq!(sub.discrepancy(), q(1));
        let expected: Vec<Cone> = vec![
            after.cone_from_rays(&[lv(&[0, 1]), lv(&[1, 1])]).unwrap(),
            after.cone_from_rays(&[lv(&[1, 0]), lv(&[1, 1])]).unwrap(),
        ];
        assert_eq!(after.max_cones(), &expected[..]);

        let w = Arc::new(weighted_112());
        let (after, sub) = star_subdivide(&w, &lv(&[0, -1])).unwrap();
        assert_eq!(after.max_cones().len(), 4);
        assert_eq!(sub.coords, vec![q_frac(1, 2), q_frac(1, 2)]);
        assert_eq!(
            w.describe_cone(&sub.target_cone),
            "{(-1,-2),(1,0)}".to_string()
        );
        assert_eq!(sub.discrepancy(), q(0));
        assert!(after.is_smooth());

        let p2 = Arc::new(projective_plane());
        let (after, sub) = star_subdivide(&p2, &lv(&[1, 1])).unwrap();
        assert_eq!(after.max_cones().len(), 4);
        assert_eq!(sub.discrepancy(), q(1));
        assert!(matches!(
            p2.star_subdivide(&lv(&[1, 0])),
            Err(Error::RayExists(_))
        ));
        assert!(matches!(
            quad.star_subdivide(&lv(&[-1, 1])),
            Err(Error::OutsideSupport(_))
        ));
    }

    #[test]
    fn barycentric_examples() {
        let quad = quadrant();
        let (c, coords) = quad.barycentric_coords(&lv(&[2, 3])).unwrap();
        assert_eq!(c, Cone::new(vec![0, 1]));
        // rays sorted: (0,1) then (1,0)
        assert_eq!(coords, vec![q(3), q(2)]);
        let w = weighted_112();
        let (c, coords) = w.barycentric_coords(&lv(&[0, -1])).unwrap();
        assert_eq!(w.describe_cone(&c), "{(-1,-2),(1,0)}");
        assert_eq!(coords, vec![q_frac(1, 2), q_frac(1, 2)]);
        let (c, coords) = w.barycentric_coords(&lv(&[0, 1])).unwrap();
        assert_eq!(w.describe_cone(&c), "{(0,1)}");
        assert_eq!(coords, vec![q(1)]);
    }

    #[test]
    fn orbit_euler_examples() {
        let p2 = projective_plane();
        assert_eq!(p2.orbit_euler(&Cone::empty()).unwrap(), 3);
        let cusp = Fan::new(
            2,
            &[&[1, 0], &[1, 1], &[2, 3], &[1, 2], &[0, 1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 4]],
        )
        .unwrap();
        let e23 = cusp.cone_from_rays(&[lv(&[2, 3])]).unwrap();
        assert_eq!(cusp.orbit_euler(&e23).unwrap(), 2);
        for m in p2.max_cones() {
            assert_eq!(p2.orbit_euler(m).unwrap(), 1);
        }
        let axis = cusp.cone_from_rays(&[lv(&[1, 0])]).unwrap();
        assert!(matches!(
            cusp.orbit_euler(&axis),
            Err(Error::NotComplete(_))
        ));
        assert!(matches!(
            cusp.orbit_euler(&Cone::empty()),
            Err(Error::NotComplete(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn vector_in(rank: usize) -> impl Strategy<Value = Vec<i64>> {
            prop::collection::vec(-3i64..=3, rank)
        }

        proptest! {
            #[test]
            fn subdivision_preserves_validity(v in vector_in(2), w in vector_in(3)) {
                for (fan, v) in [(projective_plane(), v), (projective_space(3), w)] {
                    let Ok(p) = primitive_vector(&v) else { continue };
                    let fan = Arc::new(fan);
                    let Ok(sub) = fan.star_subdivide(&p) else { continue };
                    let after = &sub.after;
                    prop_assert!(validate_fan(&after.to_data()).is_valid());
                    prop_assert!(after.is_complete());
                    // k maximal cones around a d-dimensional target gain k(d-1)
                    let d = sub.target_cone.dim();
                    let k = fan.max_cones().iter().filter(|c| sub.target_cone.is_face_of(c)).count();
                    prop_assert_eq!(after.max_cones().len(), fan.max_cones().len() + k * (d - 1));
                    prop_assert_eq!(after.orbit_euler(&Cone::empty()).unwrap() as usize, after.max_cones().len());
                }
            }

            #[test]
            fn barycentric_reconstructs(v in vector_in(3)) {
                prop_assume!(v.iter().any(|&x| x != 0));
                let fan = projective_space(3);
                let lv = LatticeVector::new(v.clone());
                let (cone, coords) = fan.barycentric_coords(&lv).unwrap();
                let mut acc = vec![Q::zero(); 3];
                for (&r, c) in cone.rays().iter().zip(&coords) {
                    prop_assert!(c.is_positive());
                    for (a, x) in acc.iter_mut().zip(fan.ray(r).to_q()) {
                        *a += c * x;
                    }
                }
                prop_assert_eq!(acc, lv.to_q());
            }

            #[test]
            fn sum_subdivision_stays_smooth(pick in 0usize..64) {
                let fan = Arc::new(projective_space(3));
                let cones: Vec<Cone> = fan.cones().iter().filter(|c| c.dim() >= 2).cloned().collect();
                let c = &cones[pick % cones.len()];
                let v = c.rays().iter().map(|&r| fan.ray(r).clone()).reduce(|a, b| &a + &b).unwrap();
                let sub = fan.star_subdivide(&v).unwrap();
                prop_assert!(sub.after.is_smooth());
            }
        }
    }
}
