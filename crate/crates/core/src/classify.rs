//! Window-scale verdicts on whether a tempered object is a measure.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::comb::SpectralMeasure;
use crate::comb::{PointWeighting, Window};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fit::{polyfit, PolyFit};
use crate::fourier::TemperedObject;
use crate::lfamily::{tv_profile, LayerWeight, TowerFamily, TowerSide};
use crate::phase::{construct, verify_diffraction, PhaseForm};
use crate::rational::{self, Q};
use crate::testfn::TestFunction;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Periodicity {
    /// Smallest period with the residues that carry weight.
    Periodic { period: i64, residues: Vec<i64> },
    /// No period up to the bound fits on `[-window, window]`.
    Aperiodic { window: i64, excluded: Vec<i64> },
}

fn same(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

/// Smallest `p ≤ max_p` such that the weights on `[-M+P, M-P]`, minus the
/// core `|k| < core`, are constant on every residue class mod `p`.
fn pattern_period(
    values: &BTreeMap<i128, Complex64>,
    m: i64,
    max_p: i64,
    core: i64,
) -> Periodicity {
    let (lo, hi) = ((-m + max_p) as i128, (m - max_p) as i128);
    let allowed: Vec<i128> = (lo..=hi).filter(|k| k.abs() >= core as i128).collect();
    let at = |k: i128| values.get(&k).copied().unwrap_or_default();
    for p in 1..=max_p as i128 {
        let mut class: Vec<Option<Complex64>> = vec![None; p as usize];
        let ok = allowed.iter().all(|&k| {
            let slot = &mut class[k.rem_euclid(p) as usize];
            match slot {
                Some(v) => same(*v, at(k)),
                None => {
                    *slot = Some(at(k));
                    true
                }
            }
        });
        if ok {
            let residues = (0..p)
                .filter(|&r| class[r as usize].is_some_and(|v| v.norm() > 1e-9))
                .map(|r| r as i64)
                .collect();
            return Periodicity::Periodic {
                period: p as i64,
                residues,
            };
        }
    }
    Periodicity::Aperiodic {
        window: m,
        excluded: (1..=max_p).collect(),
    }
}

/// Periodicity of an integer-supported weighting on `[-m, m]` up to period `p`,
/// ignoring `|k| < core`.
pub fn periodicity_test(set: &PointWeighting, m: i64, p: i64, core: i64) -> Result<Periodicity> {
    if p < 1 || m < 4 * p {
        return Err(Error::WindowTooSmall { m, p });
    }
    let window = Window::symmetric(m as i128);
    let mut values = BTreeMap::new();
    for (k, v) in set.enumerate(&window)? {
        if !k.is_integer() {
            return Err(Error::InvalidParameter(format!(
                "point {} is not an integer",
                rational::format(&k)
            )));
        }
        values.insert(k.to_integer(), v);
    }
    Ok(pattern_period(&values, m, p, core))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Measure,
    NonMeasure,
    Undecided,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Measure => "measure",
            Label::NonMeasure => "non_measure",
            Label::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictCertificate {
    FiniteSupport,
    Periodic {
        period: String,
        residues: Vec<String>,
    },
    AperiodicWindow {
        window: i64,
        periods_excluded: Vec<i64>,
    },
    TvLinear {
        slope: f64,
        fit: PolyFit,
    },
    TvBounded {
        limit: f64,
        fit: Option<PolyFit>,
    },
    None,
}

impl VerdictCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            VerdictCertificate::FiniteSupport => "finite_support",
            VerdictCertificate::Periodic { .. } => "periodic",
            VerdictCertificate::AperiodicWindow { .. } => "aperiodic_window",
            VerdictCertificate::TvLinear { .. } => "tv_linear",
            VerdictCertificate::TvBounded { .. } => "tv_bounded",
            VerdictCertificate::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub label: Label,
    pub certificate: VerdictCertificate,
    /// Total variation bound on the test window, for measures.
    pub tv_bound: Option<f64>,
    pub test_window: String,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    /// Largest period tried by the periodicity test.
    pub max_period: i64,
    /// Half-width of the periodicity window, in lattice steps.
    pub window: i64,
    /// Slope above which TV growth counts as linear; `None` uses half the
    /// per-layer slope of `δ̂_L` on a unit window.
    pub slope_threshold: Option<f64>,
    pub tv_window: Window,
    pub tv_layers: u32,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            max_period: 32,
            window: 256,
            slope_threshold: None,
            tv_window: Window {
                lo: Q::zero(),
                hi: Q::one(),
            },
            tv_layers: 8,
        }
    }
}

/// Per-layer TV slope of the cosine tower on a window of length `len`:
/// each layer has `2s·len` atoms of mean modulus `2/π`, over `s`.
pub fn cosine_tv_slope(len: f64) -> f64 {
    4.0 * len / std::f64::consts::PI
}

impl ClassifyConfig {
    pub fn threshold(&self) -> f64 {
        self.slope_threshold.unwrap_or_else(|| {
            0.5 * cosine_tv_slope(rational::to_f64(&(self.tv_window.hi - self.tv_window.lo)))
        })
    }
}

/// Total variation of a locally finite weighting on the window, if bounded.
/// Infinite cosine towers are summed in closed form when their weights decay.
pub fn tv_bound(w: &PointWeighting, window: &Window) -> Result<Option<f64>> {
    let len = rational::to_f64(&(window.hi - window.lo));
    let mut total: f64 = w
        .finite_atoms
        .iter()
        .filter(|a| window.contains(&a.pos))
        .map(|a| a.weight.norm())
        .sum();
    let mut raw = Vec::new();
    for c in &w.combs {
        c.enumerate_into(window, &mut raw)?;
    }
    for t in &w.towers {
        if t.side == TowerSide::Direct || t.n_max.is_some() {
            t.enumerate_into(window, &mut raw)?;
            continue;
        }
        if !t.weight.decays() {
            return Ok(None);
        }
        let d = t.density.sup_bound();
        let mut sum = 0.0;
        for n in t.n_min..=t.n_min + 400 {
            let s = t.s_f64(n);
            sum += t.layer_weight(n).abs() * d * (2.0 * s * len + 1.0) / s;
        }
        total += sum;
    }
    total += raw.iter().map(|(_, v)| v.norm()).sum::<f64>();
    Ok(Some(total))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TvEvidence {
    Linear { slope: f64 },
    Bounded { limit: f64 },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TvGrowth {
    pub layers: Vec<u32>,
    pub values: Vec<f64>,
    pub fit: PolyFit,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    pub evidence: TvEvidence,
}

/// Least-squares line through `N ↦ tv_truncation(obj, N, window)`.
pub fn tv_growth(
    obj: &PointWeighting,
    layers: std::ops::RangeInclusive<u32>,
    window: &Window,
    threshold: f64,
) -> Result<TvGrowth> {
    let ns: Vec<u32> = layers.collect();
    if ns.len() < 2 {
        return Err(Error::InvalidParameter(
            "tv growth needs at least two layer counts".into(),
        ));
    }
    let profile = tv_profile(obj, *ns.iter().max().unwrap_or(&1), window)?;
    let values: Vec<f64> = ns
        .iter()
        .map(|&n| {
            if n == 0 {
                Err(Error::InvalidParameter(
                    "layer count must be at least 1".into(),
                ))
            } else {
                Ok(profile[n as usize - 1])
            }
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let fit = polyfit(&xs, &values, 1)?;
    let residuals = xs
        .iter()
        .zip(&values)
        .map(|(&x, &y)| y - fit.eval(x))
        .collect();
    let last = *ns.last().unwrap_or(&1);
    let evidence = if fit.slope() > threshold {
        TvEvidence::Linear { slope: fit.slope() }
    } else {
        match tail_beyond(obj, last, window) {
            Some(tail) => TvEvidence::Bounded {
                limit: values.last().copied().unwrap_or(0.0) + tail,
            },
            None => TvEvidence::Inconclusive,
        }
    };
    Ok(TvGrowth {
        slope: fit.slope(),
        intercept: fit.intercept(),
        layers: ns,
        values,
        fit,
        residuals,
        evidence,
    })
}

/// Bound on the TV that tower layers past the first `n` add on the window.
fn tail_beyond(obj: &PointWeighting, n: u32, window: &Window) -> Option<f64> {
    let len = rational::to_f64(&(window.hi - window.lo));
    let mut total = 0.0;
    for t in &obj.towers {
        let first = t.n_min + n;
        if t.n_max.is_some_and(|m| m < first) {
            continue;
        }
        if t.n_max.is_none() && !t.weight.decays() {
            return None;
        }
        let d = t.density.sup_bound();
        for k in first..=t.last_layer().min(first + 400) {
            let s = t.s_f64(k);
            let count = match t.side {
                // one progression pair per layer meets a bounded window at most
                // `len/(2s) + 1` times each
                TowerSide::Direct => 2.0 * (len / (2.0 * s) + 1.0),
                TowerSide::Dual => (2.0 * s * len + 1.0) / s,
            };
            total += t.layer_weight(k).abs() * d * count;
        }
    }
    Some(total)
}

/// The non-decaying remainder of a dual part, with every tower weight
/// replaced by its limit; `None` if some limit does not exist.
fn limit_pattern(dual: &PointWeighting) -> Option<PointWeighting> {
    let mut out = PointWeighting::empty();
    for t in &dual.towers {
        let lim = t.weight.limit()?;
        if lim != 0.0 {
            out.towers.push(TowerFamily {
                weight: LayerWeight::constant(lim),
                eps: None,
                ..t.clone()
            });
        }
    }
    Some(out)
}

/// Decides measure-ness on the window scale:
/// finite support, then periodic or convergent direct structure, then the
/// periodicity of whatever dual part has no closed-form transform, then TV
/// growth.
pub fn measure_verdict(obj: &TemperedObject, cfg: &ClassifyConfig) -> Result<Verdict> {
    let norm = obj.normalized();
    let win = cfg.tv_window.clone();
    let ac_tv = norm.ac.density.sup_bound() * rational::to_f64(&(win.hi - win.lo));
    let mut notes = Vec::new();
    let verdict = |label, certificate, tv_bound, notes| Verdict {
        label,
        certificate,
        tv_bound,
        test_window: win.to_string(),
        notes,
    };

    if !obj.has_dual() && obj.direct.is_finite() {
        let tv = tv_bound(&obj.direct, &win)?.map(|t| t + ac_tv);
        return Ok(verdict(
            Label::Measure,
            VerdictCertificate::FiniteSupport,
            tv,
            notes,
        ));
    }

    let mut dual_certificate = None;
    let mut extra_tv = 0.0;
    if !norm.dual.is_empty() {
        let Some(pattern) = limit_pattern(&norm.dual) else {
            notes.push("dual tower weights have no limit".into());
            return Ok(verdict(
                Label::Undecided,
                VerdictCertificate::None,
                None,
                notes,
            ));
        };
        let q = pattern.position_denominator().unwrap_or(1);
        let m = cfg.window;
        let w = Window::new(Q::new(-m as i128, q), Q::new(m as i128, q))?;
        let mut values = BTreeMap::new();
        for (k, v) in pattern.enumerate(&w)? {
            values.insert((k * Q::from_integer(q)).to_integer(), v);
        }
        // finite corrections near the origin transform to densities, so the core is ignored
        match pattern_period(&values, m, cfg.max_period, cfg.max_period) {
            Periodicity::Aperiodic { window, excluded } => {
                notes.push(format!(
                    "dual part is uniformly discrete with finitely many weight values and no period up to {} on the window",
                    cfg.max_period
                ));
                if pattern
                    .towers
                    .iter()
                    .all(|t| t.side == TowerSide::Direct && t.scale.is_one() && t.offset.is_zero())
                {
                    notes.push("aperiodicity comes from the L tower".into());
                } else {
                    notes.push("aperiodicity is certified on the window only".into());
                }
                let cert = VerdictCertificate::AperiodicWindow {
                    window,
                    periods_excluded: excluded,
                };
                return Ok(verdict(Label::NonMeasure, cert, None, notes));
            }
            Periodicity::Periodic { period, residues } => {
                let step = Q::new(1, q);
                let sup = pattern
                    .towers
                    .iter()
                    .filter_map(|t| t.sup_weight())
                    .fold(0.0, f64::max);
                let len = rational::to_f64(&(win.hi - win.lo));
                // periodic comb plus finite corrections in the core plus the decaying remainder
                let comb_tv = (len * period as f64 / rational::to_f64(&step) + 1.0)
                    * residues.len() as f64
                    * sup
                    / period as f64;
                let core_tv = len * (4 * cfg.max_period + 2) as f64 * sup;
                let mut rest = 0.0;
                for t in &norm.dual.towers {
                    let lim = t.weight.limit().unwrap_or(0.0);
                    let d = t.density.sup_bound();
                    for n in t.n_min..=t.n_min + 400 {
                        rest += (t.layer_weight(n) - lim).abs() * d * (2.0 * len + 1.0);
                    }
                }
                extra_tv = comb_tv + core_tv + rest;
                notes.push(format!("non-decaying dual towers agree with a {period}-periodic pattern off a finite core"));
                dual_certificate = Some(VerdictCertificate::Periodic {
                    period: rational::format(&(step * Q::from_integer(period as i128))),
                    residues: residues
                        .iter()
                        .map(|r| rational::format(&(step * Q::from_integer(*r as i128))))
                        .collect(),
                });
            }
        }
    }

    let direct = &norm.direct;
    match tv_bound(direct, &win)? {
        Some(tv) => {
            let tv = tv + ac_tv + extra_tv;
            let cert = if let Some(c) = dual_certificate {
                c
            } else if direct
                .towers
                .iter()
                .any(|t| t.side == TowerSide::Dual && t.n_max.is_none())
            {
                let growth = tv_growth(direct, 1..=cfg.tv_layers.max(2), &win, cfg.threshold())?;
                VerdictCertificate::TvBounded {
                    limit: tv,
                    fit: Some(growth.fit),
                }
            } else {
                let single = (direct.combs.len() == 1 && direct.towers.is_empty())
                    .then(|| direct.combs[0].clone());
                match single.map_or_else(|| direct.periodic_comb(), Ok) {
                    Ok(c) if direct.finite_atoms.is_empty() => VerdictCertificate::Periodic {
                        period: rational::format(&c.spacing),
                        residues: vec![rational::format(&c.reduced_offset())],
                    },
                    _ => VerdictCertificate::TvBounded {
                        limit: tv,
                        fit: None,
                    },
                }
            };
            Ok(verdict(Label::Measure, cert, Some(tv), notes))
        }
        None => {
            let growth = tv_growth(direct, 1..=cfg.tv_layers.max(2), &win, cfg.threshold())?;
            match growth.evidence {
                TvEvidence::Linear { slope } => {
                    notes.push(format!("TV on {win} grows by {slope:.4} per layer"));
                    Ok(verdict(
                        Label::NonMeasure,
                        VerdictCertificate::TvLinear {
                            slope,
                            fit: growth.fit,
                        },
                        None,
                        notes,
                    ))
                }
                _ => {
                    notes.push(format!(
                        "TV slope {:.4} below threshold {:.4}",
                        growth.slope,
                        cfg.threshold()
                    ));
                    Ok(verdict(
                        Label::Undecided,
                        VerdictCertificate::None,
                        None,
                        notes,
                    ))
                }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SurveyRow {
    pub phase_id: String,
    pub diffraction_residual: f64,
    pub pass: bool,
    pub verdict: Label,
    pub certificate: VerdictCertificate,
    pub notes: String,
}

#[derive(Clone, Debug)]
pub struct SurveyOptions {
    pub probes: Vec<TestFunction>,
    pub tol: f64,
    pub exec: Execution,
    pub classify: ClassifyConfig,
}

/// Constructs, verifies and classifies one object per catalog entry. For a
/// finite supporting set the global sign flip is added as an extra row.
pub fn solution_class_survey(
    gamma_hat: &SpectralMeasure,
    catalog: &[(String, PhaseForm)],
    opts: &SurveyOptions,
) -> Result<Vec<SurveyRow>> {
    let mut rows = Vec::new();
    let mut objects = Vec::new();
    for (id, a) in catalog {
        objects.push((id.clone(), construct(gamma_hat, a)?));
    }
    if gamma_hat.is_finite() {
        if let Some((id, obj)) = objects.first().cloned() {
            let mut neg = obj;
            neg.amplitude = neg.amplitude.scale(-Complex64::one());
            neg.realization = neg.realization.scale(-Complex64::one());
            objects.push((format!("-{id}"), neg));
        }
    }
    for (id, obj) in objects {
        let report = verify_diffraction(&obj, &opts.probes, opts.tol, opts.exec)?;
        let v = measure_verdict(&obj.realization, &opts.classify)?;
        let mut notes = v.notes.clone();
        notes.extend(report.notes.iter().cloned());
        rows.push(SurveyRow {
            phase_id: id,
            diffraction_residual: report.residual(),
            pass: report.pass,
            verdict: v.label,
            certificate: v.certificate,
            notes: notes.join("; "),
        });
    }
    Ok(rows)
}

/// Catalog used when none is given: the constant phase, translation
/// characters, a residue phase on integer supports and, for infinite integer
/// supports, `set_sign(L)` plus `randoms` seeded aperiodic signs.
pub fn default_catalog(
    gamma_hat: &SpectralMeasure,
    seed: u64,
    randoms: usize,
    window: u32,
) -> Result<Vec<(String, PhaseForm)>> {
    let mut out = vec![("1".to_string(), PhaseForm::ConstantOne)];
    let integer = gamma_hat.weighting.position_denominator() == Some(1);
    if gamma_hat.is_finite() {
        for t in [Q::new(1, 8), Q::new(1, 4)] {
            out.push((
                format!("translation_{}", rational::format(&t)),
                PhaseForm::translation(t),
            ));
        }
    }
    if integer {
        let i = Complex64::new(0.0, 1.0);
        out.push((
            "residue_3".into(),
            PhaseForm::residue(vec![Complex64::one(), i, -i]),
        ));
    }
    if integer && !gamma_hat.is_finite() {
        out.push((
            "sign_L".into(),
            PhaseForm::set_sign(crate::lfamily::l_set()),
        ));
        for s in seed..seed + randoms as u64 {
            out.push((
                format!("random_{s}"),
                crate::phase::random_aperiodic_phase(s, window)?,
            ));
        }
    }
    Ok(out)
}
