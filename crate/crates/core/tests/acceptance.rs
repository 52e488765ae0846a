//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::Instant;

use difforge::autocorr::{eberlein_study, eberlein_symbolic, quadratic_form_check, EberleinConfig};
use difforge::classify::{
    measure_verdict, periodicity_test, solution_class_survey, tv_growth, ClassifyConfig, Label,
    Periodicity, SurveyOptions, TvEvidence,
};
use difforge::fit::polyfit;
use difforge::fourier::fourier_comb;
use difforge::lfamily::{build, gamma_hat, l_membership, l_set, nu_bound, tv_profile, Named};
use difforge::phase::{
    construct, equivalent, random_aperiodic_phase, witness_probe, Equivalence, PhaseForm,
};
use difforge::rational::{q, qi};
use difforge::testfn::standard_probes;
use difforge::{
    Execution, LatticeComb, PointWeighting, SpectralMeasure, TemperedObject, TestFunction,
    TrigPolynomial, Window, Q,
};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn z() -> PointWeighting {
    PointWeighting::lattice(Q::one(), Q::zero())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn poisson_reconstruction() -> Check {
    let obj = e2s(construct(
        &e2s(SpectralMeasure::new(z()))?,
        &PhaseForm::ConstantOne,
    ))?;
    let mut worst = 0.0f64;
    for f in standard_probes() {
        let direct = e2s(z().pair_direct(&f, 1e-14))?.value;
        let real = e2s(obj.realization.pair(&f, 1e-14))?.value;
        worst = worst.max((direct - real).norm() / direct.norm().max(1e-300));
    }
    ensure(worst < 1e-8, || format!("max relative error {worst:e}"))?;
    Ok(format!("20 probes, max relative error {worst:.2e}"))
}

fn translation_character() -> Check {
    let obj = e2s(construct(
        &e2s(SpectralMeasure::new(z()))?,
        &PhaseForm::translation(q(3, 10)),
    ))?;
    let shifted = PointWeighting::lattice(Q::one(), q(3, 10));
    let mut worst = 0.0f64;
    for f in standard_probes().into_iter().take(10) {
        let want = e2s(shifted.pair_direct(&f, 1e-14))?.value;
        let got = e2s(obj.realization.pair(&f, 1e-14))?.value;
        worst = worst.max((want - got).norm());
    }
    ensure(worst < 1e-8, || format!("max error {worst:e}"))?;
    Ok(format!("10 probes, max error {worst:.2e}"))
}

fn three_periodic(alpha: Complex64) -> LatticeComb {
    let d = TrigPolynomial::from_terms([
        (qi(0), c(1.0 / 3.0)),
        (qi(1), alpha / 3.0),
        (qi(2), alpha.conj() / 3.0),
    ]);
    LatticeComb::new(q(1, 3), qi(0), d).expect("valid comb")
}

fn homometry_three_periodic() -> Check {
    let w = three_periodic(Complex64::new(0.0, 1.0));
    let sym = e2s(eberlein_symbolic(&w, &w))?;
    // (1/3)(χ_0 + χ_1 + χ_2) on Z/3
    let expected = LatticeComb::new(
        q(1, 3),
        qi(0),
        TrigPolynomial::from_terms([
            (qi(0), c(1.0 / 3.0)),
            (qi(1), c(1.0 / 3.0)),
            (qi(2), c(1.0 / 3.0)),
        ]),
    )
    .map_err(|e| e.to_string())?;
    let win = Window::symmetric(6);
    let a = e2s(PointWeighting::from_comb(sym.clone()).enumerate(&win))?;
    let b = e2s(PointWeighting::from_comb(expected).enumerate(&win))?;
    ensure(
        a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|(x, y)| x.0 == y.0 && (x.1 - y.1).norm() < 1e-14),
        || "symbolic autocorrelation differs from the closed form".into(),
    )?;
    let weighting = PointWeighting::from_comb(w);
    let probes: Vec<TestFunction> = standard_probes().into_iter().take(5).collect();
    let study = e2s(eberlein_study(
        &weighting,
        &weighting,
        &[200.0],
        &probes,
        1e-13,
        &EberleinConfig::default(),
    ))?;
    let mut worst_rel = 0.0f64;
    for r in &study.rows {
        let exact = Complex64::new(r.symbolic_re.unwrap_or(0.0), r.symbolic_im.unwrap_or(0.0));
        worst_rel = worst_rel.max(r.residual.unwrap_or(f64::INFINITY) / exact.norm());
    }
    ensure(worst_rel < 0.02, || {
        format!("numeric Eberlein relative error {worst_rel}")
    })?;
    let gamma = TemperedObject::direct(PointWeighting::from_comb(sym));
    let spec = e2s(SpectralMeasure::new(z()))?;
    let mut worst_q = 0.0f64;
    for f in &probes {
        for g in &probes {
            worst_q = worst_q.max(e2s(quadratic_form_check(&gamma, &spec, f, g, 1e-12))?.residual);
        }
    }
    ensure(worst_q < 1e-6, || {
        format!("quadratic-form residual {worst_q:e}")
    })?;
    Ok(format!(
        "symbolic exact, numeric R=200 rel {worst_rel:.2e}, quadratic form {worst_q:.2e}"
    ))
}

fn eberlein_identity() -> Check {
    let third = PointWeighting::lattice(q(1, 3), Q::zero());
    let sym = e2s(eberlein_symbolic(
        &LatticeComb::uniform(q(1, 3), Q::zero()).unwrap(),
        &LatticeComb::uniform(Q::one(), Q::zero()).unwrap(),
    ))?;
    let win = Window::symmetric(10);
    ensure(
        e2s(PointWeighting::from_comb(sym).enumerate(&win))? == e2s(third.enumerate(&win))?,
        || "symbolic result is not δ_{Z/3}".into(),
    )?;
    let probes = vec![e2s(TestFunction::gaussian(0.1, 0.8))?];
    let study = e2s(eberlein_study(
        &third,
        &z(),
        &[50.0, 100.0, 200.0],
        &probes,
        1e-13,
        &EberleinConfig::default(),
    ))?;
    let res: Vec<f64> = study
        .rows
        .iter()
        .map(|r| r.residual.unwrap_or(f64::INFINITY))
        .collect();
    ensure(res[1] < res[0] && res[2] < res[1], || {
        format!("residuals not decreasing: {res:?}")
    })?;
    let cfit = study.fitted_constant().unwrap_or(f64::INFINITY);
    let within = study
        .rows
        .iter()
        .all(|r| r.residual.unwrap_or(f64::INFINITY) <= cfit / r.radius + 1e-15);
    ensure(within && cfit.is_finite(), || "residuals exceed C/R".into())?;
    Ok(format!(
        "residuals {:.2e}, {:.2e}, {:.2e}; fitted C = {cfit:.4}",
        res[0], res[1], res[2]
    ))
}

fn l_enumeration() -> Check {
    let got: Vec<i128> = e2s(l_set().enumerate(&Window::new(qi(0), qi(10)).unwrap()))?
        .into_iter()
        .map(|(x, _)| x.to_integer())
        .collect();
    ensure(got == vec![0, 2, 3, 4, 5, 6, 8, 10], || {
        format!("L ∩ [0,10] = {got:?}")
    })?;
    let oracle: Vec<i128> = (0..=10).filter(|&k| l_membership(k).member).collect();
    ensure(got == oracle, || "membership oracle disagrees".into())?;
    let sym = e2s(l_set().is_symmetric_on(&Window::symmetric(256)))?;
    ensure(sym.holds, || "L is not symmetric on [-256, 256]".into())?;
    match e2s(periodicity_test(&l_set(), 256, 32, 0))? {
        Periodicity::Aperiodic { excluded, .. } if excluded == (1..=32).collect::<Vec<_>>() => {}
        other => return Err(format!("periodicity test gave {other:?}")),
    }
    Ok("L ∩ [0,10] exact, symmetric on [-256,256], periods 1..=32 excluded".into())
}

fn hat_delta_l_identity() -> Check {
    let gamma = TemperedObject::transform_of(l_set());
    let spec = e2s(SpectralMeasure::new(l_set()))?;
    let probes = standard_probes();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let (f, g) = (&probes[i], &probes[(i * 7 + 3) % probes.len()]);
        worst = worst.max(e2s(quadratic_form_check(&gamma, &spec, f, g, 1e-12))?.residual);
    }
    ensure(worst < 1e-6, || format!("residual {worst:e}"))?;
    Ok(format!("10 probe pairs, max residual {worst:.2e}"))
}

fn eps_family_numbers() -> Check {
    let g = gamma_hat(1.0, None);
    let layers = &g.towers[0];
    let (w1, w2) = (layers.layer_weight(1), layers.layer_weight(2));
    ensure(
        (w1 - 0.36).abs() < 1e-15 && (w2 - 0.0784).abs() < 1e-15,
        || format!("layer weights {w1}, {w2}"),
    )?;
    let bound = e2s(nu_bound(1.0))?;
    ensure((bound - 2.618).abs() < 5e-4, || {
        format!("nu_bound(1) = {bound}")
    })?;
    let nu = e2s(build(Named::Nu, Some(1.0), None))?.object.direct;
    let w = Window::new(Q::zero(), q(1, 4)).unwrap();
    let profile = e2s(tv_profile(&nu, 12, &w))?;
    let incs: Vec<f64> = profile.windows(2).map(|p| p[1] - p[0]).collect();
    ensure(incs.windows(2).all(|d| d[1] <= d[0] + 1e-12), || {
        format!("increments not shrinking: {incs:?}")
    })?;
    let growth = e2s(tv_growth(
        &nu,
        1..=12,
        &w,
        ClassifyConfig::default().threshold(),
    ))?;
    let TvEvidence::Bounded { limit } = growth.evidence else {
        return Err(format!("no bounded evidence: {:?}", growth.evidence));
    };
    ensure(limit <= bound, || {
        format!("TV limit {limit} exceeds {bound}")
    })?;
    Ok(format!(
        "weights 0.36, 0.0784; nu_bound {bound:.4}; TV(12) = {:.4}, limit ≤ {limit:.4}",
        profile[11]
    ))
}

fn weak_star_trends() -> Check {
    let eps = [1.0, 0.3, 0.1, 0.03];
    let tol = 1e-12;
    let probes = standard_probes();
    let omega0 = e2s(build(Named::Omega0, None, None))?.object;
    let delta_z = TemperedObject::direct(z());
    let mut notes = Vec::new();
    for (label, name, limit) in [
        ("gamma_hat", Named::GammaHat, &delta_z),
        ("omega", Named::Omega, &omega0),
        ("sigma", Named::Sigma, &delta_z),
    ] {
        let members: Vec<TemperedObject> = eps
            .iter()
            .map(|&e| build(name, Some(e), None).map(|b| b.object))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let mut tested = 0;
        for (pi, f) in probes.iter().enumerate() {
            let base = e2s(limit.pair(f, tol))?.value;
            let d: Vec<f64> = members
                .iter()
                .map(|m| m.pair(f, tol).map(|p| (p.value - base).norm()))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            if d[0] < 1e-9 {
                continue;
            }
            tested += 1;
            ensure(d.windows(2).all(|p| p[1] < p[0]), || {
                format!("{label}, probe {pi}: not decreasing {d:?}")
            })?;
            let fit = e2s(polyfit(&eps, &d, 2))?;
            let (lim, se) = (fit.intercept(), fit.std_errors[0]);
            ensure(lim.abs() <= 3.0 * se + 1e-9, || {
                format!("{label}, probe {pi}: limit {lim:e} ± {se:e} for {d:?}")
            })?;
        }
        ensure(tested > 0, || {
            format!("{label}: every probe is below the noise floor")
        })?;
        notes.push(format!("{label}: {tested} probes"));
    }
    Ok(notes.join(", "))
}

fn tv_dichotomy() -> Check {
    let cfg = ClassifyConfig::default();
    let unit = Window::new(Q::zero(), Q::one()).unwrap();
    let series = difforge::lfamily::hat_delta_l_series(8);
    let growth = e2s(tv_growth(&series, 1..=8, &unit, cfg.threshold()))?;
    // brute-force per-layer Riemann sums of |cos|
    let oracle: f64 = (1..=8)
        .map(|n| {
            let s = 4f64.powi(n);
            (0..=(2.0 * s) as i64)
                .map(|j| {
                    (std::f64::consts::PI * (s - 1.0) * j as f64 / s)
                        .cos()
                        .abs()
                        / s
                })
                .filter(|v| *v > 1e-12)
                .sum::<f64>()
        })
        .sum::<f64>()
        / 8.0;
    ensure((growth.slope - oracle).abs() < 0.1 * oracle, || {
        format!("slope {} vs oracle {oracle}", growth.slope)
    })?;
    ensure(matches!(growth.evidence, TvEvidence::Linear { .. }), || {
        "δ̂_L growth not flagged linear".into()
    })?;
    let nu = e2s(build(Named::Nu, Some(1.0), None))?.object.direct;
    let quarter = Window::new(Q::zero(), q(1, 4)).unwrap();
    let g = e2s(tv_growth(&nu, 1..=12, &quarter, cfg.threshold()))?;
    ensure(matches!(g.evidence, TvEvidence::Bounded { .. }), || {
        "ν_1 growth not bounded".into()
    })?;

    let z_spec = e2s(SpectralMeasure::new(z()))?;
    let finite = e2s(SpectralMeasure::new(PointWeighting::from_atoms([
        (qi(0), c(1.0)),
        (qi(1), c(0.5)),
        (qi(-1), c(0.5)),
    ])))?;
    let cases: Vec<(&str, TemperedObject, Label)> = vec![
        (
            "omega_0",
            e2s(build(Named::Omega0, None, None))?.object,
            Label::NonMeasure,
        ),
        (
            "sigma_1",
            e2s(build(Named::Sigma, Some(1.0), None))?.object,
            Label::NonMeasure,
        ),
        (
            "omega^1",
            e2s(build(Named::Omega, Some(1.0), None))?.object,
            Label::Measure,
        ),
        (
            "rho_1",
            e2s(build(Named::Rho, Some(1.0), None))?.object,
            Label::Measure,
        ),
        (
            "g_a",
            e2s(construct(&finite, &PhaseForm::translation(q(1, 8))))?.realization,
            Label::Measure,
        ),
        (
            "delta_Z+0.3",
            e2s(construct(&z_spec, &PhaseForm::translation(q(3, 10))))?.realization,
            Label::Measure,
        ),
    ];
    let mut seen = Vec::new();
    for (name, obj, want) in cases {
        let v = e2s(measure_verdict(&obj, &cfg))?;
        ensure(v.label == want, || {
            format!("{name}: {:?} ({:?})", v.label, v.certificate)
        })?;
        if want == Label::Measure {
            ensure(v.tv_bound.is_some_and(f64::is_finite), || {
                format!("{name}: measure without a TV bound")
            })?;
        }
        seen.push(format!(
            "{name}={}/{}",
            v.label.as_str(),
            v.certificate.kind()
        ));
    }
    Ok(format!(
        "slope {:.4} vs oracle {oracle:.4}; {}",
        growth.slope,
        seen.join(", ")
    ))
}

fn finite_catalog() -> Vec<(String, PhaseForm)> {
    let i = Complex64::new(0.0, 1.0);
    let even = PointWeighting::lattice(qi(2), Q::zero());
    vec![
        ("a1=0".into(), PhaseForm::ConstantOne),
        ("a1=1/8".into(), PhaseForm::translation(q(1, 8))),
        ("a1=1/4".into(), PhaseForm::translation(q(1, 4))),
        (
            "residue3".into(),
            PhaseForm::residue(vec![Complex64::one(), i, -i]),
        ),
        ("sign2Z".into(), PhaseForm::set_sign(even.clone())),
        (
            "sign2Z*a1=1/8".into(),
            PhaseForm::Product {
                factors: vec![PhaseForm::set_sign(even), PhaseForm::translation(q(1, 8))],
            },
        ),
    ]
}

fn finite_support_theorem() -> Check {
    let tol = 1e-6;
    let probes = standard_probes();
    let opts = SurveyOptions {
        probes: probes.clone(),
        tol,
        exec: Execution::Parallel,
        classify: ClassifyConfig::default(),
    };
    let catalog = finite_catalog();
    let mut finite_rows = 0;
    let mut worst_density = 0.0f64;
    for atoms in [
        vec![(qi(0), c(1.0))],
        vec![(qi(0), c(1.0)), (qi(1), c(0.5)), (qi(-1), c(0.5))],
    ] {
        let spec = e2s(SpectralMeasure::new(PointWeighting::from_atoms(
            atoms.clone(),
        )))?;
        let rows = e2s(solution_class_survey(&spec, &catalog, &opts))?;
        for r in &rows {
            ensure(r.verdict == Label::Measure && r.pass, || {
                format!(
                    "finite support row {}: {:?}, pass={}",
                    r.phase_id, r.verdict, r.pass
                )
            })?;
        }
        finite_rows += rows.len();
        // g_a(t) = |b_0| + 2 Σ_j |b_j| cos(2π(a_j - x_j t)) with b_j = a(x_j) γ̂(x_j)^{1/2}
        for (_, a) in &catalog {
            let obj = e2s(construct(&spec, a))?;
            for j in 0..=64 {
                let t = j as f64 / 64.0;
                let mut g = 0.0;
                for (x, w) in &atoms {
                    let xf = difforge::rational::to_f64(x);
                    if *x < Q::zero() {
                        continue;
                    }
                    let b = e2s(a.eval(x))? * w.re.sqrt();
                    let aj = b.arg() / (2.0 * std::f64::consts::PI);
                    g += if x.is_zero() {
                        b.norm()
                    } else {
                        2.0 * b.norm() * (2.0 * std::f64::consts::PI * (aj - xf * t)).cos()
                    };
                }
                worst_density = worst_density.max((obj.realization.ac.density_at(t) - c(g)).norm());
            }
        }
    }
    ensure(worst_density < 1e-10, || {
        format!("density error {worst_density:e}")
    })?;

    let z_spec = e2s(SpectralMeasure::new(z()))?;
    let seeds = [11u64, 12, 13, 14, 15, 16];
    let randoms: Vec<PhaseForm> = seeds
        .iter()
        .map(|&s| random_aperiodic_phase(s, 64))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut catalog = vec![
        ("1".to_string(), PhaseForm::ConstantOne),
        (
            "residue3".into(),
            PhaseForm::residue(vec![
                Complex64::one(),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
            ]),
        ),
        ("sign_L".into(), PhaseForm::set_sign(l_set())),
    ];
    catalog.extend(
        seeds
            .iter()
            .zip(&randoms)
            .map(|(s, a)| (format!("random{s}"), a.clone())),
    );
    let rows = e2s(solution_class_survey(&z_spec, &catalog, &opts))?;
    let labels: Vec<Label> = rows.iter().map(|r| r.verdict).collect();
    ensure(
        labels[..3] == [Label::Measure, Label::Measure, Label::NonMeasure],
        || format!("labels {labels:?}"),
    )?;
    let certified = rows[3..]
        .iter()
        .filter(|r| r.verdict == Label::NonMeasure && r.certificate.kind() == "aperiodic_window")
        .count();
    ensure(certified >= 6, || {
        format!("only {certified} certified random non-measures")
    })?;
    let worst = rows
        .iter()
        .map(|r| r.diffraction_residual)
        .fold(0.0, f64::max);
    ensure(rows.iter().all(|r| r.pass) && worst < 1e-6, || {
        format!("diffraction residual {worst:e}")
    })?;

    let window = Window::symmetric(64);
    let mut min_sep = f64::INFINITY;
    for i in 0..randoms.len() {
        for j in i + 1..randoms.len() {
            let e = e2s(equivalent(&randoms[i], &randoms[j], &z(), &window, 1e-9))?;
            ensure(matches!(e, Equivalence::Inequivalent { .. }), || {
                format!("seeds {} and {} equivalent: {e:?}", seeds[i], seeds[j])
            })?;
            let k = (1..=64)
                .map(Q::from_integer)
                .find(|k| (randoms[i].eval(k).unwrap() - randoms[j].eval(k).unwrap()).norm() > 0.5)
                .ok_or("no differing frequency")?;
            let f = witness_probe(&k);
            let oi = e2s(construct(&z_spec, &randoms[i]))?.realization;
            let oj = e2s(construct(&z_spec, &randoms[j]))?.realization;
            let sep = (e2s(oi.pair(&f, 1e-12))?.value - e2s(oj.pair(&f, 1e-12))?.value).norm();
            min_sep = min_sep.min(sep);
        }
    }
    ensure(min_sep > 10.0 * tol, || {
        format!("pairing separation {min_sep:e}")
    })?;
    Ok(format!(
        "{finite_rows} finite-support rows all measure, density error {worst_density:.1e}; {certified} random non-measures, max residual {worst:.1e}, min separation {min_sep:.3}"
    ))
}

fn random_comb(rng: &mut ChaCha8Rng) -> LatticeComb {
    let spacing = q(rng.random_range(1..=4), rng.random_range(1..=4));
    let offset = q(rng.random_range(-8..=8), 8);
    let terms = rng.random_range(1..=3);
    let density = TrigPolynomial::from_terms((0..terms).map(|_| {
        let freq = q(rng.random_range(-6..=6), rng.random_range(1..=4));
        (
            freq,
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )
    }));
    LatticeComb::new(spacing, offset, density).expect("positive spacing")
}

fn transform_round_trips() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let win = Window::symmetric(20);
    let probes = standard_probes();
    let mut worst_w = 0.0f64;
    let mut worst_p = 0.0f64;
    for trial in 0..50 {
        let comb = random_comb(&mut rng);
        let mut twice = PointWeighting::empty();
        for d in fourier_comb(&comb).combs {
            twice.extend(fourier_comb(&d));
        }
        let a = e2s(twice.enumerate(&win))?;
        let b = e2s(PointWeighting::from_comb(comb.clone())
            .reflect()
            .enumerate(&win))?;
        ensure(
            a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.0 == y.0),
            || format!("comb {trial}: positions differ"),
        )?;
        worst_w = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x.1 - y.1).norm())
            .fold(worst_w, f64::max);
        let f = &probes[trial % probes.len()];
        let lhs = e2s(fourier_comb(&comb).pair_direct(f, 1e-13))?.value;
        let rhs = e2s(PointWeighting::from_comb(comb).pair_direct(&f.fourier(), 1e-13))?.value;
        worst_p = worst_p.max((lhs - rhs).norm());
    }
    ensure(worst_w < 1e-12, || format!("weight error {worst_w:e}"))?;
    ensure(worst_p < 1e-8, || format!("pairing error {worst_p:e}"))?;
    Ok(format!(
        "50 combs, weight error {worst_w:.1e}, pairing error {worst_p:.1e}"
    ))
}

fn main() {
    let checks: [(&str, fn() -> Check); 11] = [
        ("Poisson reconstruction", poisson_reconstruction),
        ("translation character", translation_character),
        ("3-periodic homometry", homometry_three_periodic),
        ("Eberlein identity", eberlein_identity),
        ("L enumeration", l_enumeration),
        ("hat delta_L diffraction identity", hat_delta_l_identity),
        ("eps-family numbers", eps_family_numbers),
        ("weak-* trends", weak_star_trends),
        ("TV dichotomy", tv_dichotomy),
        ("finite-support theorem", finite_support_theorem),
        ("transform round-trips", transform_round_trips),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
