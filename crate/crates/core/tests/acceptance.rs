//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Runs as a plain binary so the lines are always shown.

mod common;

use std::process::ExitCode;
use std::sync::Arc;

use celeste_core::celestial::CelestialClass;
use celeste_core::library::*;
use celeste_core::{
    additivity_check, check_change_of_variables, chern_numbers, csm_class, integrate, log_chern,
    stringy_chern, total_chern, zeta_global, zeta_local, Atom, ChowClass, Cone, ConstructibleSet,
    CsmSet, Error, Fan, Germ, ResolutionTower, Scalar, SystemDivisor, Q,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: Error) -> String {
    format!("{}: {err}", err.name())
}

fn ambient() -> ConstructibleSet {
    ConstructibleSet::ambient()
}

fn boundary_set(rays: &[&[i64]]) -> ConstructibleSet {
    ConstructibleSet::of(rays.iter().map(|r| Atom::Boundary(lv(r))).collect()).unwrap()
}

fn all_cones_class(fan: &Arc<Fan>) -> ChowClass {
    ChowClass::from_terms(fan, fan.cones().iter().map(|c| (c.clone(), Scalar::one()))).unwrap()
}

fn cusp_tower() -> ResolutionTower {
    ResolutionTower::with_subdivisions(quadrant(), &[lv(&[1, 1]), lv(&[1, 2]), lv(&[2, 3])])
        .unwrap()
}

fn cusp_divisor() -> SystemDivisor {
    let g = Germ::new("cusp", [[3, 0], [0, 2]]).unwrap();
    SystemDivisor::zero()
        .with(Atom::Hypersurface(g), Scalar::m())
        .unwrap()
}

fn normalization_classes() -> Result<Vec<(String, CelestialClass)>, String> {
    let mut out = Vec::new();
    for (name, fan) in [
        ("P2", projective_plane()),
        ("P1xP1", p1_x_p1()),
        ("P3", projective_space(3)),
    ] {
        let t = ResolutionTower::new(fan);
        let c = integrate(&t, &SystemDivisor::zero(), &ambient()).map_err(e)?;
        out.push((name.to_string(), c));
    }
    Ok(out)
}

fn criterion_1() -> Outcome {
    let classes = normalization_classes()?;
    for ((name, c), expected) in classes.iter().zip([3, 4, 4]) {
        let d = c.identity().degree().map_err(e)?;
        ensure(
            d == Scalar::from_int(expected),
            format!("{name}: degree {d}, expected {expected}"),
        )?;
        let chi = c.tower().base().max_cones().len() as i64;
        ensure(
            d == Scalar::from_int(chi),
            format!("{name}: degree {d} vs {chi} fixed points"),
        )?;
    }
    let p2 = Arc::clone(classes[0].1.tower().base());
    let h = ChowClass::cycle(&p2, &Cone::new(vec![0])).unwrap();
    let pt = ChowClass::cycle(&p2, &Cone::new(vec![0, 1])).unwrap();
    let expected = ChowClass::fundamental(&p2)
        .add(&h.scale(&Scalar::from_int(3)))
        .and_then(|x| x.add(&pt.scale(&Scalar::from_int(3))))
        .map_err(e)?;
    ensure(
        classes[0].1.identity().equals(&expected).map_err(e)?,
        "P2 class is not [P2] + 3H + 3pt",
    )?;
    Ok("degrees 3, 4, 4; P2 class [P2] + 3H + 3pt".into())
}

fn criterion_2() -> Outcome {
    let corpus = smooth_complete_corpus();
    for (name, fan) in &corpus {
        let fan = Arc::new(fan.clone());
        let all: Vec<usize> = (0..fan.rays().len()).collect();
        let log = log_chern(&fan, &all).map_err(e)?;
        ensure(
            log.equals(&ChowClass::fundamental(&fan)).map_err(e)?,
            format!("{name}: log class {log}"),
        )?;
    }
    Ok(format!("{} fans", corpus.len()))
}

struct RandomCase {
    tower: ResolutionTower,
    divisor: SystemDivisor,
    set: ConstructibleSet,
    i: usize,
    j: usize,
}

fn random_cases(count: usize, seed: u64) -> Vec<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let base = if rng.gen_bool(0.5) {
            projective_plane()
        } else {
            projective_space(3)
        };
        let steps = rng.gen_range(1..=4);
        let tower = random_smooth_tower(&mut rng, base, steps);
        let mut divisor = SystemDivisor::zero();
        for v in tower.base().rays() {
            let num = rng.gen_range(0..=4i64);
            let den = rng.gen_range(1..=3i64);
            let c = Scalar::from_rational(Q::new(num.into(), den.into()));
            divisor = divisor.with(Atom::Boundary(v.clone()), c).unwrap();
        }
        let set = if rng.gen_bool(0.5) {
            ambient()
        } else {
            let rays = tower.base().rays();
            let pick = rays[rng.gen_range(0..rays.len())].clone();
            ConstructibleSet::of(vec![Atom::Boundary(pick)]).unwrap()
        };
        let j = rng.gen_range(1..=steps);
        let i = rng.gen_range(0..j);
        out.push(RandomCase {
            tower,
            divisor,
            set,
            i,
            j,
        });
    }
    out
}

fn criterion_3() -> Outcome {
    let bl = ResolutionTower::new(projective_plane())
        .extend(&lv(&[1, 1]))
        .unwrap();
    let r = check_change_of_variables(&bl, &SystemDivisor::zero(), &ambient(), 0, 1).map_err(e)?;
    ensure(r.passed(), format!("P2 / Bl P2:\n{r}"))?;
    let r =
        check_change_of_variables(&cusp_tower(), &cusp_divisor(), &ambient(), 1, 3).map_err(e)?;
    ensure(r.passed(), format!("cusp levels 1 vs 3:\n{r}"))?;
    let mut passed = 0;
    let mut rejected = 0;
    for case in random_cases(24, 7) {
        match check_change_of_variables(&case.tower, &case.divisor, &case.set, case.i, case.j) {
            Ok(r) => {
                ensure(
                    r.passed(),
                    format!("random tower {:?}:\n{r}", case.tower.subdivision_rays()),
                )?;
                passed += 1;
            }
            Err(Error::NonConvergent { .. }) => rejected += 1,
            Err(err) => return Err(e(err)),
        }
    }
    ensure(passed >= 20, format!("only {passed} random cases ran"))?;
    Ok(format!(
        "P2/Bl P2, cusp 1 vs 3, {passed} random towers ({rejected} rejected)"
    ))
}

fn criterion_4() -> Outcome {
    let mut classes: Vec<CelestialClass> = normalization_classes()?
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    let bl = ResolutionTower::new(projective_plane())
        .extend(&lv(&[1, 1]))
        .unwrap();
    classes.push(integrate(&bl, &SystemDivisor::zero(), &ambient()).map_err(e)?);
    for case in random_cases(24, 7) {
        match integrate(&case.tower, &case.divisor, &case.set) {
            Ok(c) => classes.push(c),
            Err(Error::NonConvergent { .. }) => {}
            Err(err) => return Err(e(err)),
        }
    }
    for c in &classes {
        ensure(
            c.verify_compatibility().map_err(e)?,
            format!("tower {:?} is not compatible", c.tower().subdivision_rays()),
        )?;
    }
    Ok(format!("{} celestial classes", classes.len()))
}

fn criterion_5() -> Outcome {
    let origin = Cone::new(vec![0, 1]);
    let g = Germ::new("cusp", [[3, 0], [0, 2]]).unwrap();
    let t = cusp_tower();
    let z = zeta_local(&t, &g, &origin).map_err(e)?;
    let expected = scalar("(4m+5)/((m+1)(6m+5))");
    ensure(z.value == expected, format!("cusp: {z}"))?;
    let oracle = plane_germ_zeta_oracle(t.top().rays(), &[[3, 0], [0, 2]]);
    ensure(z.value == oracle, format!("cusp: oracle gives {oracle}"))?;
    let poles: Vec<Q> = z.poles.iter().map(|p| p.0.clone()).collect();
    ensure(
        poles == vec![Q::from_integer((-1).into()), Q::new((-5).into(), 6.into())],
        format!("cusp poles {poles:?}"),
    )?;
    let one = ResolutionTower::new(quadrant())
        .extend(&lv(&[1, 1]))
        .unwrap();
    let x = Germ::new("x", [[1, 0]]).unwrap();
    let z = zeta_local(&one, &x, &origin).map_err(e)?;
    ensure(z.value == scalar("1/(m+1)"), format!("smooth germ: {z}"))?;
    Ok("cusp (4m+5)/((m+1)(6m+5)), poles -1, -5/6; smooth germ 1/(m+1)".into())
}

fn criterion_6() -> Outcome {
    let t = ResolutionTower::new(projective_plane());
    let line = SystemDivisor::zero()
        .with(Atom::Boundary(lv(&[1, 0])), Scalar::m())
        .unwrap();
    let z = zeta_global(&t, &line).map_err(e)?;
    ensure(z.value == scalar("(m+3)/(m+1)"), format!("line: {z}"))?;
    let mut coeffs = vec![Scalar::zero(); 3];
    coeffs[t.base().ray_index(&lv(&[1, 0])).unwrap()] = Scalar::m();
    ensure(
        z.value == toric_zeta_oracle(t.base(), &coeffs),
        "line: strata oracle disagrees",
    )?;
    let z = zeta_global(&t, &SystemDivisor::zero()).map_err(e)?;
    ensure(z.value == Scalar::from_int(3), format!("D = 0: {z}"))?;
    Ok("line (m+3)/(m+1); D = 0 gives 3".into())
}

fn criterion_7() -> Outcome {
    let crepant = ResolutionTower::new(weighted_112())
        .extend(&lv(&[0, -1]))
        .unwrap();
    let further = crepant.extend(&lv(&[1, -1])).unwrap();
    let a = stringy_chern(&crepant).map_err(e)?;
    let b = stringy_chern(&further).map_err(e)?;
    for (label, s) in [("crepant", &a), ("crepant + blow-up", &b)] {
        let chi = s.euler_number().map_err(e)?;
        ensure(
            chi == Scalar::from_int(4),
            format!("{label}: stringy Euler number {chi}"),
        )?;
    }
    // compare on the common smooth level
    let top_a = integrate(&crepant, &SystemDivisor::zero(), &ambient()).map_err(e)?;
    let top_b = integrate(&further, &SystemDivisor::zero(), &ambient()).map_err(e)?;
    ensure(
        top_a
            .manifestation(1)
            .map_err(e)?
            .equals(top_b.manifestation(1).map_err(e)?)
            .map_err(e)?,
        "the two towers disagree on the crepant resolution",
    )?;
    ensure(
        a.class == b.class,
        "the two stringy classes differ on the base",
    )?;
    for fan in [projective_plane(), p1_x_p1(), projective_space(3)] {
        let base = Arc::new(fan);
        let mut t = ResolutionTower::from_arc(Arc::clone(&base));
        let c = &base.max_cones()[0];
        let v = c.rays().iter().fold(vec![0; base.rank()], |acc, &r| {
            acc.iter()
                .zip(base.ray(r).coords())
                .map(|(x, y)| x + y)
                .collect()
        });
        t = t.extend(&celeste_core::LatticeVector::new(v)).unwrap();
        let s = stringy_chern(&t).map_err(e)?;
        ensure(
            s.class.equals(&total_chern(&base).map_err(e)?).map_err(e)?,
            "smooth base: stringy class differs from c(TX)",
        )?;
    }
    Ok("P(1,1,2) stringy Euler number 4 via two towers; smooth bases give c(TX)".into())
}

fn criterion_8() -> Outcome {
    let p2 = Arc::new(projective_plane());
    let whole = csm_class(&p2, &CsmSet::Whole).map_err(e)?;
    ensure(p2.cones().len() == 7, "P2 has 7 cones")?;
    ensure(
        whole.equals(&all_cones_class(&p2)).map_err(e)?,
        "csm(P2) != sum of cones",
    )?;
    ensure(
        whole.equals(&total_chern(&p2).map_err(e)?).map_err(e)?,
        "csm(P2) != c(TP2)",
    )?;
    let lines = csm_class(
        &p2,
        &CsmSet::Strata(vec![Cone::new(vec![0]), Cone::new(vec![1])]),
    )
    .map_err(e)?;
    let h = ChowClass::cycle(&p2, &Cone::new(vec![0])).unwrap();
    let pt = ChowClass::cycle(&p2, &Cone::new(vec![0, 1])).unwrap();
    let expected = h
        .scale(&Scalar::from_int(2))
        .add(&pt.scale(&Scalar::from_int(3)))
        .map_err(e)?;
    ensure(
        lines.equals(&expected).map_err(e)?,
        format!("L1 u L2: {lines}"),
    )?;
    ensure(
        lines.degree().map_err(e)? == Scalar::from_int(3),
        "L1 u L2 degree",
    )?;
    let corpus = smooth_complete_corpus();
    for (name, fan) in &corpus {
        let fan = Arc::new(fan.clone());
        let c = csm_class(&fan, &CsmSet::Whole).map_err(e)?;
        ensure(
            c.equals(&all_cones_class(&fan)).map_err(e)?,
            format!("{name}: toric CSM identity fails"),
        )?;
    }
    Ok(format!(
        "P2, L1 u L2, toric identity on {} fans",
        corpus.len()
    ))
}

fn criterion_9() -> Outcome {
    let ints = |v: &[i64]| v.iter().map(|&x| Scalar::from_int(x)).collect::<Vec<_>>();
    for (name, fan, expected) in [
        ("P2", projective_plane(), ints(&[3, 9])),
        ("Bl P2", blown_up_plane(), ints(&[4, 8])),
        ("P1xP1", p1_x_p1(), ints(&[4, 8])),
    ] {
        let got = chern_numbers(&Arc::new(fan)).map_err(e)?;
        ensure(got == expected, format!("{name}: {got:?}"))?;
    }
    Ok("(3,9), (4,8), (4,8)".into())
}

fn criterion_10() -> Outcome {
    let bl = ResolutionTower::new(projective_plane())
        .extend(&lv(&[1, 1]))
        .unwrap();
    let d = SystemDivisor::zero()
        .with(Atom::Boundary(lv(&[1, 1])), Scalar::from_int(-2))
        .unwrap();
    match integrate(&bl, &d, &ambient()) {
        Err(Error::NonConvergent { atom, value }) => {
            ensure(value == "-1", format!("m_j reported as {value}"))?;
            Ok(format!("NonConvergent on {atom} with m_j = {value}"))
        }
        Err(err) => Err(format!("wrong error {}", e(err))),
        Ok(_) => Err("a value was returned".into()),
    }
}

fn criterion_11() -> Outcome {
    let t = ResolutionTower::new(p1_x_p1());
    let s1 = boundary_set(&[&[1, 0]]);
    let s2 = boundary_set(&[&[-1, 0]]);
    let r = additivity_check(&t, &SystemDivisor::zero(), &s1, &s2).map_err(e)?;
    ensure(r.passed(), format!("{r}"))?;
    let both = integrate(&t, &SystemDivisor::zero(), &s1.union(&s2)).map_err(e)?;
    let d = both.identity().degree().map_err(e)?;
    ensure(d == Scalar::from_int(4), format!("degree {d}"))?;
    Ok("two fibers of P1xP1, degree 4".into())
}

fn criterion_12() -> Outcome {
    let mut instances = 0;
    for (name, fan) in smooth_complete_corpus() {
        let fan = Arc::new(fan);
        let rays: Vec<usize> = (0..fan.rays().len()).collect();
        let subsets: Vec<Vec<usize>> = (0u32..(1 << rays.len()))
            .map(|mask| {
                rays.iter()
                    .copied()
                    .filter(|r| mask >> r & 1 == 1)
                    .collect()
            })
            .collect();
        for atoms in subsets.iter().step_by(if rays.len() > 5 { 5 } else { 1 }) {
            let log = log_chern(&fan, atoms).map_err(e)?;
            for tau in cone_subsets(&fan, atoms) {
                let class = ChowClass::cycle(&fan, &Cone::new(tau.clone())).unwrap();
                let lhs = log.multiply(&class).map_err(e)?.degree().map_err(e)?;
                let rhs = open_stratum_chi(&fan, atoms, &tau);
                ensure(
                    lhs == Scalar::from_int(rhs),
                    format!("{name}, atoms {atoms:?}, stratum {tau:?}: {lhs} vs {rhs}"),
                )?;
                instances += 1;
            }
        }
    }
    ensure(instances >= 100, format!("only {instances} instances"))?;
    Ok(format!("{instances} instances"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("normalization", criterion_1),
        ("log-triviality", criterion_2),
        ("change of variables", criterion_3),
        ("inverse-limit compatibility", criterion_4),
        ("local zeta of germs", criterion_5),
        ("global zeta", criterion_6),
        ("stringy invariants", criterion_7),
        ("CSM classes", criterion_8),
        ("Chern numbers", criterion_9),
        ("convergence guard", criterion_10),
        ("additivity", criterion_11),
        ("Euler-characteristic bridge", criterion_12),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL\n{msg}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
