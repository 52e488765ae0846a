//! Phase forms on supporting sets and the construction of every object with
//! a prescribed pure point diffraction.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autocorr::quadratic_form_check;
use crate::classify::{periodicity_test, Periodicity};
use crate::comb::{
    supporting_set, LatticeComb, Pairing, PointWeighting, SpectralMeasure, TrigPolynomial, Window,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier::{fourier_finite, TemperedObject};
use crate::lfamily::{eps_ratio, l_membership, l_set};
use crate::rational::{self, serde_q, Q};
use crate::testfn::{GaussianAtom, TestFunction};

/// An elementary phase form `a` on a supporting set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseForm {
    ConstantOne,
    /// `a(k) = values[k mod m]` on integers.
    Residue {
        m: u32,
        values: Vec<Complex64>,
    },
    /// `a = 1` on `Λ`, `-1` off it.
    SetSign {
        set: PointWeighting,
    },
    /// `a(k) = e^{2πi k t0}`.
    TranslationCharacter {
        #[serde(with = "serde_q")]
        t0: Q,
    },
    Product {
        factors: Vec<PhaseForm>,
    },
}

impl PhaseForm {
    pub fn residue(values: Vec<Complex64>) -> Self {
        PhaseForm::Residue {
            m: values.len() as u32,
            values,
        }
    }

    pub fn set_sign(set: PointWeighting) -> Self {
        PhaseForm::SetSign { set }
    }

    pub fn translation(t0: Q) -> Self {
        PhaseForm::TranslationCharacter { t0 }
    }

    /// `a(k)`.
    pub fn eval(&self, k: &Q) -> Result<Complex64> {
        match self {
            PhaseForm::ConstantOne => Ok(Complex64::one()),
            PhaseForm::Residue { m, values } => {
                if !k.is_integer() {
                    return Err(Error::InvalidPhase(format!(
                        "residue phase at non-integer {}",
                        rational::format(k)
                    )));
                }
                let r = k.to_integer().rem_euclid(*m as i128) as usize;
                values
                    .get(r)
                    .copied()
                    .ok_or_else(|| Error::InvalidPhase(format!("missing value for residue {r}")))
            }
            PhaseForm::SetSign { set } => {
                let w = set.weight_at(k)?;
                if (w - Complex64::one()).norm() < 1e-9 {
                    Ok(Complex64::one())
                } else if w.norm() < 1e-9 {
                    Ok(-Complex64::one())
                } else {
                    Err(Error::InvalidPhase(format!(
                        "set weight {w} at {} is not an indicator",
                        rational::format(k)
                    )))
                }
            }
            PhaseForm::TranslationCharacter { t0 } => Ok(rational::cis(&(k * t0))),
            PhaseForm::Product { factors } => factors
                .iter()
                .try_fold(Complex64::one(), |acc, f| Ok(acc * f.eval(k)?)),
        }
    }

    /// Structural argument for the conjugacy and unit-modulus axioms, if any.
    fn structural(&self) -> Option<String> {
        match self {
            PhaseForm::ConstantOne => Some("constant phase".into()),
            PhaseForm::TranslationCharacter { .. } => Some("character of R restricted to S".into()),
            PhaseForm::Residue { m, values } => {
                let m = *m as usize;
                let ok = values.len() == m
                    && (values[0] - Complex64::one()).norm() < 1e-12
                    && values.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12)
                    && (1..m).all(|r| (values[m - r] - values[r].conj()).norm() < 1e-12);
                ok.then(|| format!("residue pattern mod {m} with conjugate-symmetric unit values"))
            }
            PhaseForm::SetSign { .. } => None,
            PhaseForm::Product { factors } => {
                let parts: Option<Vec<String>> = factors.iter().map(|f| f.structural()).collect();
                parts.map(|p| format!("product of: {}", p.join("; ")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCertificate {
    pub valid: bool,
    pub window: Window,
    pub structural: Option<String>,
    pub violation: Option<(Q, String)>,
}

/// Checks `a(0) = 1`, `|a| = 1` and `a(-k) = conj(a(k))` on `S ∩ window`.
pub fn validate(a: &PhaseForm, s: &PointWeighting, window: &Window) -> Result<PhaseCertificate> {
    let sym = Window {
        lo: -window.radius(),
        hi: window.radius(),
    };
    let fail = |k: Q, why: String| PhaseCertificate {
        valid: false,
        window: sym.clone(),
        structural: None,
        violation: Some((k, why)),
    };
    if let PhaseForm::Residue { m, values } = a {
        if *m == 0 || values.len() != *m as usize {
            return Ok(fail(
                Q::zero(),
                format!("residue phase needs {m} values, got {}", values.len()),
            ));
        }
    }
    let mut points: Vec<Q> = s.enumerate(&sym)?.into_iter().map(|(k, _)| k).collect();
    // report a bad a(0) before anything else
    points.sort_by_key(|k| (!k.is_zero(), k.abs(), *k));
    for k in points {
        let v = match a.eval(&k) {
            Ok(v) => v,
            Err(e) => return Ok(fail(k, e.to_string())),
        };
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Ok(fail(k, format!("|a(k)| = {}", v.norm())));
        }
        if k.is_zero() && (v - Complex64::one()).norm() > 1e-12 {
            return Ok(fail(k, format!("a(0) = {v}")));
        }
        let w = a.eval(&-k)?;
        if (w - v.conj()).norm() > 1e-12 {
            return Ok(fail(
                k,
                format!("a(-k) = {w} but conj(a(k)) = {}", v.conj()),
            ));
        }
    }
    Ok(PhaseCertificate {
        valid: true,
        window: sym,
        structural: a.structural(),
        violation: None,
    })
}

/// `k ↦ a(k) γ̂(k)^{1/2}` together with its spectrum and realization.
#[derive(Clone, Debug)]
pub struct ConstructedObject {
    pub spectrum: SpectralMeasure,
    pub phase: PhaseForm,
    /// The phase-weighted square root `μ_a`.
    pub amplitude: PointWeighting,
    /// Pairs as `μ_a(f̂)`.
    pub realization: TemperedObject,
    /// Largest `|μ_a(k) - a(k) γ̂(k)^{1/2}|` on the certification window.
    pub amplitude_check: f64,
}

/// Principal square root, component by component; the components must not
/// overlap, which is certified on the spectrum's window.
pub fn sqrt_spectrum(m: &SpectralMeasure) -> Result<PointWeighting> {
    let w = &m.weighting;
    let mut out = PointWeighting::empty();
    for a in &w.finite_atoms {
        out.finite_atoms.push(crate::comb::Atom {
            pos: a.pos,
            weight: Complex64::new(a.weight.re.max(0.0).sqrt(), 0.0),
        });
    }
    for c in &w.combs {
        let pieces = match c.density.as_constant() {
            Some(v) => vec![(
                LatticeComb {
                    density: TrigPolynomial::one(),
                    ..c.clone()
                },
                v,
            )],
            None => c.constant_pieces()?,
        };
        for (piece, v) in pieces {
            if v.re > 0.0 {
                out.combs.push(LatticeComb {
                    density: TrigPolynomial::constant(Complex64::new(v.re.sqrt(), 0.0)),
                    ..piece
                });
            }
        }
    }
    for t in &w.towers {
        let c = t
            .density
            .as_constant()
            .filter(|c| c.re > 0.0 && c.im.abs() < 1e-14)
            .ok_or_else(|| Error::Spectrum("tower density must be a positive constant".into()))?;
        let mut root = t.clone();
        root.weight = t.weight.sqrt_abs();
        root.density = TrigPolynomial::constant(Complex64::new(c.re.sqrt(), 0.0));
        out.towers.push(root);
    }
    let squared = out.enumerate(&m.window)?;
    let target = w.enumerate(&m.window)?;
    let same = squared.len() == target.len()
        && squared
            .iter()
            .zip(&target)
            .all(|(a, b)| a.0 == b.0 && (a.1 * a.1 - b.1).norm() <= 1e-10 * b.1.norm().max(1e-300));
    if !same {
        return Err(Error::Spectrum(format!(
            "overlapping spectral components: the componentwise square root does not square back on {}",
            m.window
        )));
    }
    Ok(out)
}

/// `μ · 1_Λ` where `Λ` is given by a (signed) decomposition of its indicator.
pub fn restrict(mu: &PointWeighting, lambda: &PointWeighting) -> Result<PointWeighting> {
    let mut out = PointWeighting::empty();
    for a in &mu.finite_atoms {
        let v = lambda.weight_at(&a.pos)?;
        out.finite_atoms.push(crate::comb::Atom {
            pos: a.pos,
            weight: a.weight * v,
        });
    }
    let infinite = PointWeighting {
        finite_atoms: Vec::new(),
        ..mu.clone()
    };
    for b in &lambda.finite_atoms {
        let v = infinite.weight_at(&b.pos)?;
        if v.norm() > 0.0 {
            out.finite_atoms.push(crate::comb::Atom {
                pos: b.pos,
                weight: v * b.weight,
            });
        }
    }
    for c in &mu.combs {
        for d in &lambda.combs {
            if let Some(x) = c.intersect(d) {
                out.combs.push(x);
            }
        }
        for t in &lambda.towers {
            out.extend(t.product_with_comb(c)?);
        }
    }
    for t in &mu.towers {
        for d in &lambda.combs {
            out.extend(t.product_with_comb(d)?);
        }
        for u in &lambda.towers {
            if let Some(p) = t.product(u)? {
                out.towers.push(p);
            }
        }
    }
    Ok(out.prune())
}

/// Residue pattern as a trigonometric polynomial with frequencies `j/m`.
fn residue_polynomial(values: &[Complex64]) -> TrigPolynomial {
    let m = values.len() as i128;
    TrigPolynomial::from_terms((0..m).map(|j| {
        let c: Complex64 = values
            .iter()
            .enumerate()
            .map(|(r, v)| v * rational::cis(&Q::new(-j * r as i128, m)))
            .sum();
        (Q::new(j, m), c / m as f64)
    }))
}

/// `μ ↦ a·μ`.
pub fn apply_phase(mu: &PointWeighting, a: &PhaseForm) -> Result<PointWeighting> {
    match a {
        PhaseForm::ConstantOne => Ok(mu.clone()),
        PhaseForm::Residue { values, .. } => {
            if mu.position_denominator() != Some(1) {
                return Err(Error::InvalidPhase(
                    "residue phases need an integer supporting set".into(),
                ));
            }
            Ok(mu.modulate(&residue_polynomial(values)))
        }
        PhaseForm::SetSign { set } => {
            let inside = restrict(mu, set)?;
            Ok(PointWeighting::scale_add(
                Complex64::new(2.0, 0.0),
                &inside,
                -Complex64::one(),
                mu,
            ))
        }
        PhaseForm::TranslationCharacter { t0 } => Ok(mu.modulate(&TrigPolynomial::character(*t0))),
        PhaseForm::Product { factors } => factors
            .iter()
            .try_fold(mu.clone(), |acc, f| apply_phase(&acc, f)),
    }
}

/// Builds `N_a(f)(0) = Σ_k f̂(k) a(k) γ̂(k)^{1/2}` as a tempered object.
pub fn construct(gamma_hat: &SpectralMeasure, a: &PhaseForm) -> Result<ConstructedObject> {
    let s = supporting_set(gamma_hat)?;
    let cert = validate(a, &s, &gamma_hat.window)?;
    if !cert.valid {
        let (k, why) = cert.violation.unwrap_or((Q::zero(), String::new()));
        return Err(Error::InvalidPhase(format!(
            "at k = {}: {why}",
            rational::format(&k)
        )));
    }
    let root = sqrt_spectrum(gamma_hat)?;
    let amplitude = apply_phase(&root, a)?;
    let realization = if amplitude.is_finite() {
        let atoms: Vec<(Q, Complex64)> = amplitude
            .finite_atoms
            .iter()
            .map(|x| (x.pos, x.weight))
            .collect();
        TemperedObject::absolutely_continuous(fourier_finite(&atoms))
    } else {
        TemperedObject::transform_of(amplitude.clone())
    };
    let mut check = 0.0f64;
    let target = gamma_hat.weighting.enumerate(&gamma_hat.window)?;
    let got: std::collections::BTreeMap<Q, Complex64> = amplitude
        .enumerate(&gamma_hat.window)?
        .into_iter()
        .collect();
    for (k, g) in &target {
        let want = a.eval(k)? * g.re.sqrt();
        check = check.max((got.get(k).copied().unwrap_or_default() - want).norm());
    }
    Ok(ConstructedObject {
        spectrum: gamma_hat.clone(),
        phase: a.clone(),
        amplitude,
        realization,
        amplitude_check: check,
    })
}

/// The realization translated: pairs as `Σ_k f̂(k) a(k) γ̂(k)^{1/2} χ_k(t)`.
pub fn translate_realization(obj: &ConstructedObject, t: &Q) -> TemperedObject {
    obj.realization.translate(t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Equivalence {
    Equivalent { t0: f64 },
    Inequivalent { witness: String, tried: Vec<f64> },
    Undecided { reason: String },
}

/// Decides whether `a1 · conj(a2)` is a character `e^{2πi k t0}` on `S ∩ window`.
pub fn equivalent(
    a1: &PhaseForm,
    a2: &PhaseForm,
    s: &PointWeighting,
    window: &Window,
    tol: f64,
) -> Result<Equivalence> {
    let sym = Window {
        lo: -window.radius(),
        hi: window.radius(),
    };
    let points: Vec<Q> = s.enumerate(&sym)?.into_iter().map(|(k, _)| k).collect();
    let ratio = |k: &Q| -> Result<Complex64> { Ok(a1.eval(k)? * a2.eval(k)?.conj()) };
    let Some(k1) = points.iter().filter(|k| **k > Q::zero()).min().copied() else {
        return Ok(if s.is_finite() {
            Equivalence::Equivalent { t0: 0.0 }
        } else {
            Equivalence::Undecided {
                reason: format!("no positive frequency of S in {sym}"),
            }
        });
    };
    if !k1.is_integer() && !(Q::one() / k1).is_integer() {
        return Ok(Equivalence::Undecided {
            reason: format!(
                "smallest frequency {} does not generate",
                rational::format(&k1)
            ),
        });
    }
    // the ratio at k1 fixes t0 up to multiples of 1/k1
    let base = ratio(&k1)?.arg() / (2.0 * std::f64::consts::PI);
    let k1f = rational::to_f64(&k1);
    let branches = if k1.is_integer() {
        k1.to_integer().max(1)
    } else {
        1
    };
    let mut tried = Vec::new();
    let mut witness = None;
    for j in 0..branches {
        let t0 = ((base + j as f64) / k1f).rem_euclid(1.0 / k1f.min(1.0));
        tried.push(t0);
        let mut bad = None;
        for k in &points {
            let expect =
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rational::to_f64(k) * t0);
            if (ratio(k)? - expect).norm() > tol {
                bad = Some(*k);
                break;
            }
        }
        match bad {
            None => return Ok(Equivalence::Equivalent { t0 }),
            Some(k) => witness = witness.or(Some(k)),
        }
    }
    Ok(Equivalence::Inequivalent {
        witness: rational::format(&witness.unwrap_or(k1)),
        tried,
    })
}

/// A probe whose transform is a bump at `k`: its pairing with a realization
/// reads off `a(k) γ̂(k)^{1/2}` up to Gaussian leakage.
pub fn witness_probe(k: &Q) -> TestFunction {
    let width = 2.5;
    TestFunction::new(vec![GaussianAtom {
        center: 0.0,
        width,
        modulation: rational::to_f64(k),
        amplitude: Complex64::new(1.0 / width, 0.0),
    }])
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffractionReport {
    pub pass: bool,
    pub tol: f64,
    /// `max |⟨N(f), N(g)⟩ - Σ_k f̂(k) conj(ĝ(k)) γ̂(k)|` from the realization.
    pub realization_residual: Option<f64>,
    /// `max |γ(f ∗ g̃) - Σ_k f̂(k) conj(ĝ(k)) γ̂(k)|`.
    pub spectral_residual: f64,
    pub period: Option<i128>,
    pub samples: Option<usize>,
    pub pairs: usize,
    pub notes: Vec<String>,
}

impl DiffractionReport {
    pub fn residual(&self) -> f64 {
        self.realization_residual
            .unwrap_or(0.0)
            .max(self.spectral_residual)
    }
}

/// Largest sample count for the time average over one period.
const MAX_SAMPLES: usize = 1 << 14;

/// Checks the diffraction identity for every probe pair `f, g`.
///
/// The realization side averages `N(f)(t) conj(N(g)(t))` over one period of
/// the frequency lattice; with `M > 2PK` equispaced samples the average is
/// exact for frequencies up to `K`, beyond which the probes are negligible.
pub fn verify_diffraction(
    obj: &ConstructedObject,
    probes: &[TestFunction],
    tol: f64,
    exec: Execution,
) -> Result<DiffractionReport> {
    verify_realization(&obj.realization, &obj.spectrum, probes, tol, exec)
}

/// As [`verify_diffraction`], for any tempered object against a spectrum.
pub fn verify_realization(
    realization: &TemperedObject,
    spectrum: &SpectralMeasure,
    probes: &[TestFunction],
    tol: f64,
    exec: Execution,
) -> Result<DiffractionReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let ptol = tol * 1e-3;
    let pairs: Vec<(usize, usize)> = (0..probes.len())
        .flat_map(|i| (i..probes.len()).map(move |j| (i, j)))
        .collect();
    let spec = &spectrum.weighting;
    let rhs: Vec<Pairing> = exec
        .map(&pairs, |&(i, j)| {
            spec.pair_direct(
                &probes[i].fourier().multiply(&probes[j].fourier().conj()),
                ptol,
            )
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let gamma = TemperedObject::transform_of(spec.clone());
    let spectral: Vec<f64> = exec
        .map(&pairs, |&(i, j)| {
            quadratic_form_check(&gamma, spectrum, &probes[i], &probes[j], ptol).map(|q| q.residual)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let spectral_residual = spectral.into_iter().fold(0.0, f64::max);
    let mut notes = Vec::new();
    let period = spec.position_denominator();
    let reach = probes
        .iter()
        .flat_map(|f| f.fourier().atoms)
        .map(|a| a.center.abs() + a.width * (46.0f64 / std::f64::consts::PI).sqrt())
        .fold(0.0, f64::max);
    let samples = period.and_then(|p| {
        let need = (2.0 * p as f64 * reach).ceil() as usize + 1;
        let m = need.next_power_of_two();
        (m <= MAX_SAMPLES).then_some(m)
    });
    let realization_residual = match (period, samples) {
        (Some(p), Some(m)) => {
            let grid: Vec<(usize, usize)> = (0..probes.len())
                .flat_map(|i| (0..m).map(move |j| (i, j)))
                .collect();
            let values: Vec<Complex64> = exec
                .map(&grid, |&(i, j)| {
                    let t = Q::new(j as i128 * p, m as i128);
                    realization
                        .translate(&t)
                        .pair(&probes[i], ptol)
                        .map(|x| x.value)
                })
                .into_iter()
                .collect::<Result<_>>()?;
            let series = |i: usize| &values[i * m..(i + 1) * m];
            let worst = pairs
                .iter()
                .zip(&rhs)
                .map(|(&(i, j), r)| {
                    let mean: Complex64 = series(i)
                        .iter()
                        .zip(series(j))
                        .map(|(a, b)| a * b.conj())
                        .sum::<Complex64>()
                        / m as f64;
                    (mean - r.value).norm()
                })
                .fold(0.0, f64::max);
            Some(worst)
        }
        _ => {
            notes.push("no finite period on the frequency side; spectral identity only".into());
            None
        }
    };
    let mut report = DiffractionReport {
        pass: false,
        tol,
        realization_residual,
        spectral_residual,
        period,
        samples,
        pairs: pairs.len(),
        notes,
    };
    report.pass = report.residual() < tol;
    Ok(report)
}

/// `Λ_ε = 2Z ∪ ⋃ {L_n : 2(4/(4+ε))^n > 1}`; `set_sign(Λ_ε)` turns `γ̂_ε` into `ω^ε`.
pub fn lambda_eps(eps: f64) -> PointWeighting {
    let r = eps_ratio(eps);
    let mut w = PointWeighting::lattice(Q::from_integer(2), Q::zero());
    let mut n = 1u32;
    while 2.0 * r.powi(n as i32) > 1.0 && n < 60 {
        let s = 4i128.pow(n);
        for off in [s - 1, 1 - s] {
            w.combs.push(
                LatticeComb::uniform(Q::from_integer(2 * s), Q::from_integer(off))
                    .expect("positive spacing"),
            );
        }
        n += 1;
    }
    w
}

/// Seeded symmetric `Λ ∋ 0` that agrees with a random pattern on `[-W, W]` and
/// with `L` outside, redrawn until no period `≤ W/4` fits on the window.
pub fn random_aperiodic_set(seed: u64, window: u32) -> Result<PointWeighting> {
    if window < 8 {
        return Err(Error::InvalidParameter(format!(
            "window {window} too small for an aperiodicity check"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 64;
    for _ in 0..ATTEMPTS {
        let mut set = l_set();
        for k in 1..=window as i128 {
            let inside = rng.random_bool(0.5);
            let in_l = l_membership(k).member;
            let delta = match (inside, in_l) {
                (true, false) => 1.0,
                (false, true) => -1.0,
                _ => continue,
            };
            for x in [k, -k] {
                set.finite_atoms.push(crate::comb::Atom {
                    pos: Q::from_integer(x),
                    weight: Complex64::new(delta, 0.0),
                });
            }
        }
        let m = window as i64;
        if let Periodicity::Aperiodic { .. } = periodicity_test(&set, m, m / 4, 0)? {
            return Ok(set);
        }
    }
    Err(Error::GenerationFailure(ATTEMPTS))
}

pub fn random_aperiodic_phase(seed: u64, window: u32) -> Result<PhaseForm> {
    Ok(PhaseForm::set_sign(random_aperiodic_set(seed, window)?))
}
