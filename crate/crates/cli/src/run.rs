use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use celeste_core::celestial::{inline_class, local_terms, manifestation_terms, Check};
use celeste_core::{
    additivity_check, check_change_of_variables, chern_numbers, csm_class, integrate, local_value,
    newton_data, relative_canonical, resolve, stringy_chern, total_chern, zeta_global, zeta_local,
    Atom, ChowClass, Cone, ConstructibleSet, CsmSet, Fan, LatticeVector, Report, ResolutionTower,
    Scalar, SystemDivisor, Q,
};

use crate::error::{CliError, CliResult};
use crate::scenario::{Command, Prepared, Scenario};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub verbose: bool,
    pub check: bool,
}

/// Text printed by one run and the process exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub status: i32,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

pub fn run_scenario(command: Command, path: &Path, opts: Options) -> Outcome {
    match std::fs::read_to_string(path) {
        Ok(text) => run_text(command, &text, opts),
        Err(source) => failure(
            String::new(),
            &CliError::Io {
                path: path.display().to_string(),
                source,
            },
        ),
    }
}

pub fn run_text(command: Command, text: &str, opts: Options) -> Outcome {
    let mut out = String::new();
    match execute(command, text, opts, &mut out) {
        Ok(true) => Outcome {
            report: out,
            status: EXIT_OK,
        },
        Ok(false) => Outcome {
            report: out,
            status: EXIT_FAIL,
        },
        Err(e) => failure(out, &e),
    }
}

fn failure(mut out: String, e: &CliError) -> Outcome {
    let _ = writeln!(out, "error: {} ({e})", e.name());
    Outcome {
        report: out,
        status: EXIT_ERROR,
    }
}

fn execute(command: Command, text: &str, opts: Options, out: &mut String) -> CliResult<bool> {
    let scenario = Scenario::parse(text)?;
    if scenario.command != command {
        return Err(CliError::invalid(format!(
            "scenario declares command `{}` but `{}` was requested",
            scenario.command.as_str(),
            command.as_str()
        )));
    }
    let p = Prepared::new(scenario)?;
    writeln!(out, "scenario: {}", p.scenario.name).unwrap();
    writeln!(out, "command: {}", command.as_str()).unwrap();
    write_tower(out, &p.tower);
    let mut ok = match command {
        Command::Integrate => cmd_integrate(&p, opts, out)?,
        Command::CovCheck => cmd_cov(&p, out)?,
        Command::ZetaGlobal => cmd_zeta_global(&p, out)?,
        Command::ZetaLocal => cmd_zeta_local(&p, opts, out)?,
        Command::Stringy => cmd_stringy(&p, out)?,
        Command::Csm => cmd_csm(&p, out)?,
        Command::ChernNumbers => cmd_chern_numbers(&p, out)?,
        Command::AdditivityCheck => cmd_additivity(&p, out)?,
        Command::LocalValue => cmd_local_value(&p, opts, out)?,
    };
    if opts.check {
        let report = recheck(command, &p)?;
        writeln!(out, "verification:").unwrap();
        writeln!(out, "{report}").unwrap();
        ok &= report.passed();
    }
    writeln!(out, "status: {}", if ok { "PASS" } else { "FAIL" }).unwrap();
    Ok(ok)
}

fn legend(fan: &Fan) -> String {
    fan.rays()
        .iter()
        .enumerate()
        .map(|(i, v)| format!("r{i} = {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_tower(out: &mut String, t: &ResolutionTower) {
    let subs: Vec<String> = t.subdivision_rays().iter().map(|v| v.to_string()).collect();
    writeln!(out, "tower levels: {}", t.height() + 1).unwrap();
    if !subs.is_empty() {
        writeln!(out, "subdivisions: {}", subs.join(" ")).unwrap();
    }
    writeln!(out, "base rays: {}", legend(t.base())).unwrap();
}

/// Normal form where the Chow ring is known, cone classes otherwise.
fn write_class(out: &mut String, title: &str, c: &ChowClass) -> CliResult<()> {
    let model = c.model();
    let shown = if model.is_smooth() && model.is_complete() {
        c.canonical()?
    } else {
        c.clone()
    };
    writeln!(out, "{title}:").unwrap();
    writeln!(out, "{shown}").unwrap();
    Ok(())
}

fn write_degree(out: &mut String, c: &ChowClass) -> CliResult<()> {
    if c.model().is_complete() {
        writeln!(out, "degree: {}", c.degree()?).unwrap();
    }
    Ok(())
}

fn cmd_integrate(p: &Prepared, opts: Options, out: &mut String) -> CliResult<bool> {
    let set = p.set()?;
    let class = integrate(&p.tower, &p.divisor, &set)?;
    write_class(out, "identity manifestation", class.identity())?;
    write_degree(out, class.identity())?;
    if opts.verbose {
        let rd = resolve(&p.tower, &p.divisor, &set)?;
        writeln!(out, "strata at level {}:", p.tower.height()).unwrap();
        for t in manifestation_terms(&rd)? {
            writeln!(out, "  {t}").unwrap();
        }
        for (k, m) in class.manifestations().iter().enumerate().skip(1) {
            writeln!(out, "level {k} rays: {}", legend(m.model())).unwrap();
            writeln!(out, "level {k}: {}", inline_class(m)).unwrap();
        }
    }
    Ok(true)
}

fn cmd_cov(p: &Prepared, out: &mut String) -> CliResult<bool> {
    let (i, j) = p.levels()?;
    let report = check_change_of_variables(&p.tower, &p.divisor, &p.set()?, i, j)?;
    writeln!(out, "levels: {i} -> {j}").unwrap();
    writeln!(out, "{report}").unwrap();
    Ok(report.passed())
}

fn cmd_zeta_global(p: &Prepared, out: &mut String) -> CliResult<bool> {
    writeln!(out, "{}", zeta_global(&p.tower, &p.divisor)?).unwrap();
    Ok(true)
}

fn cmd_zeta_local(p: &Prepared, opts: Options, out: &mut String) -> CliResult<bool> {
    let germ = p.germ()?;
    let point = p.point()?;
    let z = zeta_local(&p.tower, &germ, &point)?;
    writeln!(out, "germ: {}", germ.name).unwrap();
    writeln!(out, "point: {}", p.base().describe_cone(&point)).unwrap();
    writeln!(out, "{z}").unwrap();
    if opts.verbose {
        let d = SystemDivisor::zero().with(Atom::Hypersurface(germ), Scalar::m())?;
        let rd = resolve(&p.tower, &d, &ConstructibleSet::ambient())?;
        writeln!(out, "strata over the point:").unwrap();
        for t in local_terms(&rd, &point)? {
            writeln!(out, "  {t}").unwrap();
        }
    }
    Ok(true)
}

fn cmd_stringy(p: &Prepared, out: &mut String) -> CliResult<bool> {
    let s = stringy_chern(&p.tower)?;
    write_class(out, "stringy chern class", &s.class)?;
    writeln!(out, "stringy euler number: {}", s.euler_number()?).unwrap();
    Ok(true)
}

fn cmd_csm(p: &Prepared, out: &mut String) -> CliResult<bool> {
    let c = csm_class(p.base(), &p.csm_set()?)?;
    write_class(out, "csm class", &c)?;
    writeln!(out, "euler characteristic: {}", c.degree()?).unwrap();
    Ok(true)
}

fn cmd_chern_numbers(p: &Prepared, out: &mut String) -> CliResult<bool> {
    let n = p.base().rank();
    for (i, v) in chern_numbers(p.base())?.iter().enumerate() {
        writeln!(out, "c1^{i} c{}: {v}", n - i).unwrap();
    }
    Ok(true)
}

fn cmd_additivity(p: &Prepared, out: &mut String) -> CliResult<bool> {
    let report = additivity_check(&p.tower, &p.divisor, &p.set()?, &p.other_set()?)?;
    writeln!(out, "{report}").unwrap();
    Ok(report.passed())
}

fn cmd_local_value(p: &Prepared, opts: Options, out: &mut String) -> CliResult<bool> {
    let set = p.set()?;
    let point = p.point()?;
    let v = local_value(&p.tower, &p.divisor, &set, &point)?;
    writeln!(out, "point: {}", p.base().describe_cone(&point)).unwrap();
    writeln!(out, "local value: {v}").unwrap();
    if opts.verbose {
        let rd = resolve(&p.tower, &p.divisor, &set)?;
        writeln!(out, "strata over the point:").unwrap();
        for t in local_terms(&rd, &point)? {
            writeln!(out, "  {t}").unwrap();
        }
    }
    Ok(true)
}

fn push(report: &mut Report, label: &str, lhs: String, rhs: String, pass: bool) {
    report.checks.push(Check {
        label: label.into(),
        lhs,
        rhs,
        pass,
    });
}

fn push_eq(report: &mut Report, label: &str, lhs: &Scalar, rhs: &Scalar) {
    push(report, label, lhs.to_string(), rhs.to_string(), lhs == rhs);
}

/// The tower with one more blow-up, of a maximal cone lying over `point`.
fn refined(tower: &ResolutionTower, point: &Cone) -> CliResult<ResolutionTower> {
    let level = tower.height();
    let top = tower.top();
    for c in top.max_cones() {
        let mut over = true;
        for &r in c.rays() {
            over &= tower.min_cone(level, r, 0)?.is_face_of(point);
        }
        if over {
            let mut v = vec![0i64; top.rank()];
            for &r in c.rays() {
                for (x, y) in v.iter_mut().zip(top.ray(r).coords()) {
                    *x += y;
                }
            }
            return Ok(tower.extend(&LatticeVector::new(v))?);
        }
    }
    Err(CliError::invalid(format!(
        "no maximal cone lies over {}",
        tower.base().describe_cone(point)
    )))
}

/// Sum of the local values at the base fixed points, each computed on a
/// tower refined over that point.
fn local_sum(p: &Prepared, d: &SystemDivisor) -> CliResult<Scalar> {
    let mut total = Scalar::zero();
    for c in p.base().max_cones() {
        let t = refined(&p.tower, c)?;
        total = &total + &local_value(&t, d, &ConstructibleSet::ambient(), c)?;
    }
    Ok(total)
}

fn recheck(command: Command, p: &Prepared) -> CliResult<Report> {
    let mut report = Report::default();
    let h = p.tower.height();
    match command {
        Command::Integrate => {
            let class = integrate(&p.tower, &p.divisor, &p.set()?)?;
            let compatible = class.verify_compatibility()?;
            push(
                &mut report,
                "manifestations push forward level by level",
                format!("{} levels", h + 1),
                "compatible".into(),
                compatible,
            );
            if h > 0 {
                let cov = check_change_of_variables(&p.tower, &p.divisor, &p.set()?, 0, h)?;
                report.checks.extend(cov.checks);
            }
        }
        Command::CovCheck => {
            let (i, _) = p.levels()?;
            let point = p.base().max_cones()[0].clone();
            let finer = refined(&p.tower, &point)?;
            let top = finer.height();
            let cov = check_change_of_variables(&finer, &p.divisor, &p.set()?, i, top)?;
            for mut c in cov.checks {
                c.label = format!("after a further blow-up, {}", c.label);
                report.checks.push(c);
            }
        }
        Command::ZetaGlobal => {
            let z = zeta_global(&p.tower, &p.divisor)?;
            push_eq(
                &mut report,
                "sum of local values over the fixed points",
                &z.value,
                &local_sum(p, &p.divisor)?,
            );
        }
        Command::ZetaLocal => {
            let germ = p.germ()?;
            let point = p.point()?;
            let z = zeta_local(&p.tower, &germ, &point)?;
            let finer = refined(&p.tower, &point)?;
            push_eq(
                &mut report,
                "independent of a further blow-up",
                &z.value,
                &zeta_local(&finer, &germ, &point)?.value,
            );
            let k = relative_canonical(&p.tower, 0, h)?;
            let mut candidates = vec![-Q::from_integer(1.into())];
            for v in p.tower.top().rays() {
                let a = k.get(v).cloned().unwrap_or_default();
                let (n, _) = newton_data(&germ.polygon, v)?;
                if n > 0 {
                    candidates.push(-(a + Q::from_integer(1.into())) / Q::from_integer(n.into()));
                }
            }
            let stray: Vec<String> = z
                .poles
                .iter()
                .filter(|(q, _)| !candidates.contains(q))
                .map(|(q, _)| q.to_string())
                .collect();
            push(
                &mut report,
                "poles are candidate poles -(a+1)/N",
                format!("[{}]", stray.join(", ")),
                "[]".into(),
                stray.is_empty(),
            );
        }
        Command::LocalValue => {
            let point = p.point()?;
            let set = p.set()?;
            let v = local_value(&p.tower, &p.divisor, &set, &point)?;
            let finer = refined(&p.tower, &point)?;
            push_eq(
                &mut report,
                "independent of a further blow-up",
                &v,
                &local_value(&finer, &p.divisor, &set, &point)?,
            );
        }
        Command::Stringy => {
            let s = stringy_chern(&p.tower)?;
            push_eq(
                &mut report,
                "euler number is the sum of local values",
                &s.euler_number()?,
                &local_sum(p, &SystemDivisor::zero())?,
            );
        }
        Command::Csm => {
            let base = p.base();
            let c = csm_class(base, &p.csm_set()?)?;
            match p.csm_set()? {
                CsmSet::Whole => {
                    let total = total_chern(base)?;
                    push(
                        &mut report,
                        "equals the total chern class",
                        inline_class(&c),
                        inline_class(&total),
                        c.equals(&total)?,
                    );
                }
                CsmSet::Strata(cones) => {
                    let fixed = base
                        .max_cones()
                        .iter()
                        .filter(|m| cones.iter().any(|s| s.is_face_of(m)))
                        .count() as i64;
                    push_eq(
                        &mut report,
                        "degree counts the fixed points in the strata",
                        &c.degree()?,
                        &Scalar::from_int(fixed),
                    );
                }
            }
        }
        Command::ChernNumbers => {
            let base: &Arc<Fan> = p.base();
            let numbers = chern_numbers(base)?;
            let n = base.rank();
            push_eq(
                &mut report,
                "top chern number counts the fixed points",
                &numbers[0],
                &Scalar::from_int(base.max_cones().len() as i64),
            );
            let todd = match n {
                1 => Some(numbers[0].scale(&Q::new(1.into(), 2.into()))),
                2 => Some((&numbers[0] + &numbers[1]).scale(&Q::new(1.into(), 12.into()))),
                3 => Some(numbers[1].scale(&Q::new(1.into(), 24.into()))),
                _ => None,
            };
            if let Some(t) = todd {
                push_eq(&mut report, "todd genus", &t, &Scalar::one());
            }
        }
        Command::AdditivityCheck => {
            let swapped = additivity_check(&p.tower, &p.divisor, &p.other_set()?, &p.set()?)?;
            push(
                &mut report,
                "symmetric in the two sets",
                format!("{} checks", swapped.checks.len()),
                "all pass".into(),
                swapped.passed(),
            );
        }
    }
    Ok(report)
}
