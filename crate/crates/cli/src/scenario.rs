//! Scenario files: one TOML document per run.
//!
//! ```toml
//! name = "cusp"
//! command = "zeta-local"
//! auto_resolve = true
//! point = [0, 1]
//!
//! [base_fan]
//! rank = 2
//! rays = [[1, 0], [0, 1]]
//! cones = [[0, 1]]
//!
//! [germs]
//! cusp = [[3, 0], [0, 2]]
//!
//! [[divisor]]
//! atom = "germ:cusp"
//! coeff = "m"
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use celeste_core::{
    newton_resolve, Atom, Cone, ConstructibleSet, CsmSet, Fan, FanData, Germ, LatticeVector,
    ResolutionTower, Scalar, SystemDivisor,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Integrate,
    CovCheck,
    ZetaGlobal,
    ZetaLocal,
    Stringy,
    Csm,
    ChernNumbers,
    AdditivityCheck,
    LocalValue,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Integrate => "integrate",
            Command::CovCheck => "cov-check",
            Command::ZetaGlobal => "zeta-global",
            Command::ZetaLocal => "zeta-local",
            Command::Stringy => "stringy",
            Command::Csm => "csm",
            Command::ChernNumbers => "chern-numbers",
            Command::AdditivityCheck => "additivity-check",
            Command::LocalValue => "local-value",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSpec {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
}

impl From<&Fan> for FanSpec {
    fn from(fan: &Fan) -> Self {
        let data = fan.to_data();
        FanSpec {
            rank: data.rank,
            rays: data.rays,
            cones: data.cones,
            complete: data.complete,
        }
    }
}

impl FanSpec {
    pub fn build(&self) -> CliResult<Fan> {
        let data = FanData {
            rank: self.rank,
            rays: self.rays.clone(),
            cones: self.cones.clone(),
            complete: self.complete,
        };
        Fan::from_data(&data).map_err(|e| CliError::invalid(format!("base_fan: {e}")))
    }
}

/// `"ambient"` or a list of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Keyword(String),
    Atoms(Vec<String>),
}

impl Default for SetSpec {
    fn default() -> Self {
        SetSpec::Keyword("ambient".into())
    }
}

fn is_ambient_default(s: &SetSpec) -> bool {
    *s == SetSpec::default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Integer(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorTerm {
    pub atom: String,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subdivisions: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub auto_resolve: bool,
    #[serde(default, skip_serializing_if = "is_ambient_default")]
    pub set: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_set: Option<SetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<[usize; 2]>,
    pub base_fan: FanSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub germs: BTreeMap<String, Vec<[i64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divisor: Vec<DivisorTerm>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl Scenario {
    pub fn parse(text: &str) -> CliResult<Scenario> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map_or((1, 1), |span| line_column(text, span.start));
            CliError::Parse {
                line,
                column,
                message: e.message().trim().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenarios always serialize")
    }
}

/// Vectors written as `(a,b)` groups, e.g. `(1,0),(0,1)`.
fn parse_vectors(text: &str) -> Option<Vec<LatticeVector>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.strip_prefix('(')?;
        let close = rest.find(')')?;
        let coords: Option<Vec<i64>> = rest[..close]
            .split(',')
            .map(|x| x.trim().parse().ok())
            .collect();
        out.push(LatticeVector::new(coords?));
        rest = rest[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return None;
            }
        }
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomSpec {
    Ray(LatticeVector),
    Germ(String),
    Stratum(Vec<LatticeVector>),
}

impl FromStr for AtomSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<AtomSpec> {
        let bad = || CliError::invalid(format!("malformed atom `{s}`"));
        let (kind, body) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "ray" => {
                let vs = parse_vectors(body).ok_or_else(bad)?;
                match <[LatticeVector; 1]>::try_from(vs) {
                    Ok([v]) => Ok(AtomSpec::Ray(v)),
                    Err(_) => Err(bad()),
                }
            }
            "germ" if !body.trim().is_empty() => Ok(AtomSpec::Germ(body.trim().to_string())),
            "stratum" => Ok(AtomSpec::Stratum(parse_vectors(body).ok_or_else(bad)?)),
            _ => Err(bad()),
        }
    }
}

fn parse_coeff(c: &Coeff) -> CliResult<Scalar> {
    match c {
        Coeff::Integer(n) => Ok(Scalar::from_int(*n)),
        Coeff::Text(t) => {
            Scalar::from_str(t).map_err(|e| CliError::invalid(format!("coefficient `{t}`: {e}")))
        }
    }
}

/// A validated scenario: tower, divisor and the referenced objects.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub tower: ResolutionTower,
    pub germs: BTreeMap<String, Germ>,
    pub divisor: SystemDivisor,
}

impl Prepared {
    pub fn new(scenario: Scenario) -> CliResult<Prepared> {
        let base = scenario.base_fan.build()?;
        let rank = base.rank();
        let mut germs = BTreeMap::new();
        for (name, exps) in &scenario.germs {
            if rank != 2 {
                return Err(CliError::invalid(format!(
                    "germ `{name}` needs a rank 2 base fan"
                )));
            }
            let g = Germ::new(name, exps.iter().copied())
                .map_err(|e| CliError::invalid(format!("germ `{name}`: {e}")))?;
            germs.insert(name.clone(), g);
        }
        let mut tower = ResolutionTower::new(base);
        for v in &scenario.subdivisions {
            if v.len() != rank {
                return Err(CliError::invalid(format!(
                    "subdivision ray {v:?} does not have rank {rank}"
                )));
            }
            tower = tower.extend(&LatticeVector::new(v.clone()))?;
        }
        let mut divisor = SystemDivisor::zero();
        let mut used_germs = Vec::new();
        for term in &scenario.divisor {
            let atom = match term.atom.parse::<AtomSpec>()? {
                AtomSpec::Ray(v) => Atom::Boundary(v),
                AtomSpec::Germ(name) => {
                    let g = germs
                        .get(&name)
                        .ok_or_else(|| CliError::invalid(format!("unknown germ `{name}`")))?;
                    used_germs.push(g.clone());
                    Atom::Hypersurface(g.clone())
                }
                AtomSpec::Stratum(_) => {
                    return Err(CliError::invalid(format!(
                        "divisor atom `{}` must be a ray or a germ",
                        term.atom
                    )))
                }
            };
            divisor = divisor.with(atom, parse_coeff(&term.coeff)?)?;
        }
        if scenario.auto_resolve {
            let targets: Vec<&Germ> = if used_germs.is_empty() {
                germs.values().collect()
            } else {
                used_germs.iter().collect()
            };
            for g in targets {
                tower = newton_resolve(&tower, &g.polygon)?;
            }
        }
        let prepared = Prepared {
            scenario,
            tower,
            germs,
            divisor,
        };
        prepared.check_rays()?;
        Ok(prepared)
    }

    fn check_rays(&self) -> CliResult<()> {
        for term in &self.scenario.divisor {
            if let AtomSpec::Ray(v) = term.atom.parse::<AtomSpec>()? {
                self.known_ray(&v)?;
            }
        }
        Ok(())
    }

    fn known_ray(&self, v: &LatticeVector) -> CliResult<()> {
        if self.tower.creation_level(v).is_some() {
            Ok(())
        } else {
            Err(CliError::invalid(format!(
                "ray {v} is not a ray of any level of the tower"
            )))
        }
    }

    fn build_set(&self, spec: &SetSpec) -> CliResult<ConstructibleSet> {
        let atoms = match spec {
            SetSpec::Keyword(k) if k == "ambient" => return Ok(ConstructibleSet::ambient()),
            SetSpec::Keyword(k) => {
                return Err(CliError::invalid(format!(
                    "set must be \"ambient\" or a list of atoms, not `{k}`"
                )))
            }
            SetSpec::Atoms(a) => a,
        };
        let mut out = Vec::new();
        for a in atoms {
            out.push(match a.parse::<AtomSpec>()? {
                AtomSpec::Ray(v) => {
                    self.known_ray(&v)?;
                    Atom::Boundary(v)
                }
                AtomSpec::Germ(name) => Atom::Hypersurface(
                    self.germs
                        .get(&name)
                        .ok_or_else(|| CliError::invalid(format!("unknown germ `{name}`")))?
                        .clone(),
                ),
                AtomSpec::Stratum(_) => {
                    return Err(CliError::invalid(format!(
                        "stratum atoms are only allowed for csm, found `{a}`"
                    )))
                }
            });
        }
        ConstructibleSet::of(out).map_err(|e| CliError::invalid(format!("set: {e}")))
    }

    pub fn set(&self) -> CliResult<ConstructibleSet> {
        self.build_set(&self.scenario.set)
    }

    pub fn other_set(&self) -> CliResult<ConstructibleSet> {
        let spec = self
            .scenario
            .other_set
            .as_ref()
            .ok_or_else(|| CliError::invalid("additivity-check needs `other_set`"))?;
        self.build_set(spec)
    }

    /// The set for `csm`, read as invariant strata of the base.
    pub fn csm_set(&self) -> CliResult<CsmSet> {
        let base = self.tower.base();
        let atoms = match &self.scenario.set {
            SetSpec::Keyword(k) if k == "ambient" => return Ok(CsmSet::Whole),
            SetSpec::Keyword(k) => {
                return Err(CliError::invalid(format!(
                    "set must be \"ambient\" or a list of atoms, not `{k}`"
                )))
            }
            SetSpec::Atoms(a) => a,
        };
        let mut cones = Vec::new();
        for a in atoms {
            let rays = match a.parse::<AtomSpec>()? {
                AtomSpec::Ray(v) => vec![v],
                AtomSpec::Stratum(vs) => vs,
                AtomSpec::Germ(_) => {
                    return Err(CliError::invalid(format!(
                        "csm takes invariant strata, found `{a}`"
                    )))
                }
            };
            let cone = base
                .cone_from_rays(&rays)
                .map_err(|_| CliError::invalid(format!("`{a}` is not a cone of the base fan")))?;
            cones.push(cone);
        }
        Ok(CsmSet::Strata(cones))
    }

    /// The fixed point named by `point`: indices into `base_fan.rays` as
    /// written in the file.
    pub fn point(&self) -> CliResult<Cone> {
        let base = self.tower.base();
        let declared = &self.scenario.base_fan.rays;
        let cone = match &self.scenario.point {
            Some(p) => {
                let mut rays = Vec::new();
                for &i in p {
                    let v = declared.get(i).ok_or_else(|| {
                        CliError::invalid(format!("point: no ray with index {i}"))
                    })?;
                    rays.push(base.ray_index(&LatticeVector::new(v.clone())).unwrap());
                }
                Cone::new(rays)
            }
            None if base.max_cones().len() == 1 => base.max_cones()[0].clone(),
            None => return Err(CliError::invalid("this command needs `point`")),
        };
        if !base.max_cones().contains(&cone) {
            return Err(CliError::invalid(format!(
                "point {} is not a maximal cone of the base fan",
                base.describe_cone(&cone)
            )));
        }
        Ok(cone)
    }

    /// The germ for `zeta-local`: the one in the divisor, else the only
    /// declared one.
    pub fn germ(&self) -> CliResult<Germ> {
        let mut in_divisor = self
            .divisor
            .terms()
            .iter()
            .filter_map(|(a, _)| match a {
                Atom::Hypersurface(g) => Some(g.clone()),
                _ => None,
            })
            .collect::<Vec<_>>();
        if in_divisor.len() == 1 {
            return Ok(in_divisor.remove(0));
        }
        if in_divisor.is_empty() && self.germs.len() == 1 {
            return Ok(self.germs.values().next().unwrap().clone());
        }
        Err(CliError::invalid("zeta-local needs exactly one germ"))
    }

    pub fn levels(&self) -> CliResult<(usize, usize)> {
        let h = self.tower.height();
        let (i, j) = match self.scenario.levels {
            Some([i, j]) => (i, j),
            None => (0, h),
        };
        if i > j || j > h {
            return Err(CliError::invalid(format!(
                "levels [{i}, {j}] must satisfy i <= j <= {h}"
            )));
        }
        Ok((i, j))
    }

    pub fn base(&self) -> &Arc<Fan> {
        self.tower.base()
    }
}
