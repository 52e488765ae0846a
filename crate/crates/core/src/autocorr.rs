//! Eberlein (volume-averaged) convolution: closed forms for commensurate
//! combs, windowed estimates for anything enumerable, and the quadratic form
//! linking an autocorrelation to its diffraction.

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::comb::{LatticeComb, Pairing, PointWeighting, SpectralMeasure, TrigPolynomial, Window};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fit::{polyfit, PolyFit};
use crate::fourier::TemperedObject;
use crate::rational::{self, Q};
use crate::testfn::TestFunction;

/// Default cap on the number of atom pairs a windowed estimate may visit.
pub const DEFAULT_PAIR_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug)]
pub struct EberleinConfig {
    pub pair_budget: u64,
    pub exec: Execution,
}

impl Default for EberleinConfig {
    fn default() -> Self {
        Self {
            pair_budget: DEFAULT_PAIR_BUDGET,
            exec: Execution::default(),
        }
    }
}

/// `(1/2R) Σ_{x,y ∈ [-R,R]} w1(x) conj(w2(y)) f(x - y)`.
///
/// Only pairs with `x - y` inside the numerical support of `f` are visited;
/// both atom lists are sorted so each `x` finds its partners by bisection.
pub fn eberlein_numeric(
    w1: &PointWeighting,
    w2: &PointWeighting,
    radius: f64,
    f: &TestFunction,
    cfg: &EberleinConfig,
) -> Result<Complex64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let win = Window::from_f64(-radius, radius)?;
    let xs: Vec<(f64, Complex64)> = w1
        .enumerate(&win)?
        .iter()
        .map(|(x, v)| (rational::to_f64(x), *v))
        .collect();
    let ys: Vec<(f64, Complex64)> = w2
        .enumerate(&win)?
        .iter()
        .map(|(y, v)| (rational::to_f64(y), v.conj()))
        .collect();
    let (clo, chi) = f.center_range();
    let reach = f.support_radius(1e-18);
    let range = |x: f64| {
        let lo = ys.partition_point(|(y, _)| *y < x - chi - reach);
        let hi = ys.partition_point(|(y, _)| *y <= x - clo + reach);
        (lo, hi)
    };
    let pairs: u64 = xs
        .iter()
        .map(|(x, _)| {
            let (lo, hi) = range(*x);
            (hi - lo) as u64
        })
        .sum();
    if pairs > cfg.pair_budget {
        return Err(Error::WindowTooLarge {
            needed: pairs,
            budget: cfg.pair_budget,
        });
    }
    let total = cfg.exec.sum(&xs, |(x, wx)| {
        let (lo, hi) = range(*x);
        ys[lo..hi]
            .iter()
            .map(|(y, wy)| wx * wy * f.evaluate(x - y))
            .sum::<Complex64>()
    });
    Ok(total / (2.0 * radius))
}

/// Closed-form `c1 ⊛ c2` on `gZ + (o1 - o2)`, `g = gcd(a1, a2)`.
///
/// With `ℓ = lcm(a1, a2)` and `p1 = a1/g`, `p2 = a2/g`, a density pair
/// `(s, t)` survives iff `(s - t)ℓ ∈ Z`, contributing
/// `(1/ℓ) d1_s conj(d2_t) e^{2πi u o1} e^{2πi (u a1 p1⁻¹/g)(z - o1 + o2)} χ_t(z)`
/// with `u = s - t` and `p1⁻¹` taken mod `p2`.
pub fn eberlein_symbolic(c1: &LatticeComb, c2: &LatticeComb) -> Result<LatticeComb> {
    let g = rational::gcd(&c1.spacing, &c2.spacing);
    let p1 = (c1.spacing / g).to_integer();
    let p2 = (c2.spacing / g).to_integer();
    let ell = g * Q::from_integer(p1) * Q::from_integer(p2);
    if p1.checked_mul(p2).is_none_or(|v| v > 1_000_000_000) {
        return Err(Error::Incommensurate(
            rational::format(&c1.spacing),
            rational::format(&c2.spacing),
        ));
    }
    let inv = if p2 == 1 {
        0
    } else {
        p1.extended_gcd(&p2).x.mod_floor(&p2)
    };
    let base = c1.offset - c2.offset;
    let mut terms = Vec::new();
    for a in &c1.density.terms {
        for b in &c2.density.terms {
            let u = a.freq - b.freq;
            if !(u * ell).is_integer() {
                continue;
            }
            let fz = u * c1.spacing * Q::from_integer(inv) / g;
            let coeff = a.coeff * b.coeff.conj() / rational::to_f64(&ell)
                * rational::cis(&(u * c1.offset))
                * rational::cis(&-(fz * base));
            terms.push((fz + b.freq, coeff));
        }
    }
    let density = TrigPolynomial::from_terms(terms).reduced_mod(&g.recip());
    Ok(LatticeComb {
        spacing: g,
        offset: base - g * (base / g).floor(),
        density,
    })
}

/// Symbolic `w1 ⊛ w2` after merging each side into one periodic comb.
pub fn eberlein_symbolic_weighting(
    w1: &PointWeighting,
    w2: &PointWeighting,
) -> Result<PointWeighting> {
    Ok(PointWeighting::from_comb(eberlein_symbolic(
        &w1.periodic_comb()?,
        &w2.periodic_comb()?,
    )?))
}

#[derive(Clone, Debug, Serialize)]
pub struct EberleinRow {
    pub radius: f64,
    pub probe: usize,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub symbolic_re: Option<f64>,
    pub symbolic_im: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct EberleinResult {
    pub symbolic: Option<PointWeighting>,
    pub rows: Vec<EberleinRow>,
}

impl EberleinResult {
    /// `max_rows R·residual`, the constant in `residual ≤ C/R`.
    pub fn fitted_constant(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.residual.map(|e| e * r.radius))
            .reduce(f64::max)
    }
}

/// Windowed estimates at each radius and probe, compared against the closed
/// form whenever both sides are periodic.
pub fn eberlein_study(
    w1: &PointWeighting,
    w2: &PointWeighting,
    radii: &[f64],
    probes: &[TestFunction],
    tol: f64,
    cfg: &EberleinConfig,
) -> Result<EberleinResult> {
    let symbolic = eberlein_symbolic_weighting(w1, w2).ok();
    let exact: Vec<Option<Complex64>> = match &symbolic {
        Some(s) => probes
            .iter()
            .map(|f| s.pair_direct(f, tol).map(|p| Some(p.value)))
            .collect::<Result<_>>()?,
        None => vec![None; probes.len()],
    };
    let jobs: Vec<(f64, usize)> = radii
        .iter()
        .flat_map(|&r| (0..probes.len()).map(move |i| (r, i)))
        .collect();
    // parallelism lives in the outer loop here
    let inner = EberleinConfig {
        exec: Execution::Sequential,
        ..*cfg
    };
    let rows = cfg
        .exec
        .map(&jobs, |&(radius, i)| {
            let est = eberlein_numeric(w1, w2, radius, &probes[i], &inner)?;
            Ok(EberleinRow {
                radius,
                probe: i,
                estimate_re: est.re,
                estimate_im: est.im,
                symbolic_re: exact[i].map(|v| v.re),
                symbolic_im: exact[i].map(|v| v.im),
                residual: exact[i].map(|v| (v - est).norm()),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(EberleinResult { symbolic, rows })
}

/// Fourier–Bohr amplitudes of a periodic comb and the resulting
/// autocorrelation pair.
#[derive(Clone, Debug)]
pub struct Amplitudes {
    /// `(class offset s_C, |A|²)`; `γ̂` carries `|A|²` on `Z/a + s_C`.
    pub classes: Vec<(Q, f64)>,
    pub gamma: LatticeComb,
    pub gamma_hat: PointWeighting,
}

impl Amplitudes {
    pub fn spectral(&self) -> Result<SpectralMeasure> {
        SpectralMeasure::new(self.gamma_hat.clone())
    }
}

/// For `w = d·δ_{aZ+o}` with `d = Σ c_j χ_{s_j}`: frequencies are grouped by
/// class mod `1/a`, `|A_C|² = |Σ_{j∈C} c_j e^{2πi s_j o}|²/a²`,
/// `γ̂ = Σ_C |A_C|² δ_{Z/a + s_C}` and `γ = a Σ_C |A_C|² χ_{s_C} δ_{aZ}`.
pub fn autocorr_via_amplitudes(w: &LatticeComb) -> Result<Amplitudes> {
    let period = w.spacing.recip();
    let mut classes: Vec<(Q, Complex64)> = Vec::new();
    for t in &w.density.terms {
        let rep = t.freq - period * (t.freq / period).floor();
        let a = t.coeff * rational::cis(&(t.freq * w.offset));
        match classes.iter_mut().find(|(r, _)| *r == rep) {
            Some((_, acc)) => *acc += a,
            None => classes.push((rep, a)),
        }
    }
    classes.sort_by_key(|a| a.0);
    let a = rational::to_f64(&w.spacing);
    let total: f64 = classes.iter().map(|(_, v)| v.norm_sqr()).sum();
    let kept: Vec<(Q, f64)> = classes
        .into_iter()
        .map(|(r, v)| (r, v.norm_sqr() / (a * a)))
        .filter(|(_, m)| *m * a * a > 1e-28 * total)
        .collect();
    let gamma_hat = PointWeighting {
        combs: kept
            .iter()
            .map(|(r, m)| LatticeComb {
                spacing: period,
                offset: *r,
                density: TrigPolynomial::constant(Complex64::new(*m, 0.0)),
            })
            .collect(),
        ..PointWeighting::default()
    };
    let gamma = LatticeComb {
        spacing: w.spacing,
        offset: Q::zero(),
        density: TrigPolynomial::from_terms(
            kept.iter().map(|(r, m)| (*r, Complex64::new(a * m, 0.0))),
        ),
    };
    Ok(Amplitudes {
        classes: kept,
        gamma,
        gamma_hat,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct QuadraticForm {
    pub lhs: Pairing,
    pub rhs: Pairing,
    pub residual: f64,
}

/// `|γ(f ∗ g̃) - Σ_k f̂(k) conj(ĝ(k)) γ̂(k)|`.
pub fn quadratic_form_check(
    gamma: &TemperedObject,
    gamma_hat: &SpectralMeasure,
    f: &TestFunction,
    g: &TestFunction,
    tol: f64,
) -> Result<QuadraticForm> {
    let lhs = gamma.pair(&f.convolve_tilde(g), tol)?;
    let rhs = gamma_hat
        .weighting
        .pair_direct(&f.fourier().multiply(&g.fourier().conj()), tol)?;
    Ok(QuadraticForm {
        lhs,
        rhs,
        residual: (lhs.value - rhs.value).norm(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub param: f64,
    pub radius: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberSummary {
    pub param: f64,
    /// Intercept of the fit `value ≈ v∞ + c/R`.
    pub extrapolated: f64,
    pub inverse_radius_slope: f64,
    /// Largest `Σ|w|` over unit intervals inside the largest window.
    pub translation_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trend {
    pub degree: usize,
    pub fit: PolyFit,
    pub limit: f64,
    pub std_error: f64,
    pub candidate: Option<f64>,
    pub convergent: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub rows: Vec<ConjectureRow>,
    pub members: Vec<MemberSummary>,
    pub trend: Option<Trend>,
}

#[derive(Clone, Debug)]
pub struct ConjectureConfig {
    pub radii: Vec<f64>,
    /// Real part of the limit object's autocorrelation pairing, if known.
    pub candidate: Option<f64>,
    /// Accuracy floor added to the `3σ` acceptance band.
    pub abs_tol: f64,
    pub eberlein: EberleinConfig,
}

/// Autocorrelation pairings `μ_p ⊛ μ̃_p (f)` for each family member and radius,
/// extrapolated in `1/R`, then fitted against the family parameter.
pub fn conjecture_probe(
    family: &[(f64, PointWeighting)],
    f: &TestFunction,
    cfg: &ConjectureConfig,
) -> Result<ConjectureReport> {
    if cfg.radii.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one radius is needed".into(),
        ));
    }
    let jobs: Vec<(usize, f64)> = (0..family.len())
        .flat_map(|i| cfg.radii.iter().map(move |&r| (i, r)))
        .collect();
    let inner = EberleinConfig {
        exec: Execution::Sequential,
        ..cfg.eberlein
    };
    let values = cfg
        .eberlein
        .exec
        .map(&jobs, |&(i, r)| {
            eberlein_numeric(&family[i].1, &family[i].1, r, f, &inner)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ConjectureRow> = jobs
        .iter()
        .zip(&values)
        .map(|(&(i, r), v)| ConjectureRow {
            param: family[i].0,
            radius: r,
            re: v.re,
            im: v.im,
        })
        .collect();
    let rmax = cfg.radii.iter().cloned().fold(0.0, f64::max);
    let mut members = Vec::new();
    for (i, (param, w)) in family.iter().enumerate() {
        let pts: Vec<&ConjectureRow> = rows
            .iter()
            .zip(&jobs)
            .filter(|(_, j)| j.0 == i)
            .map(|(r, _)| r)
            .collect();
        let xs: Vec<f64> = pts.iter().map(|r| 1.0 / r.radius).collect();
        let ys: Vec<f64> = pts.iter().map(|r| r.re).collect();
        let (extrapolated, slope) = if xs.len() >= 2 {
            let fit = polyfit(&xs, &ys, 1)?;
            (fit.intercept(), fit.slope())
        } else {
            (ys[0], 0.0)
        };
        members.push(MemberSummary {
            param: *param,
            extrapolated,
            inverse_radius_slope: slope,
            translation_bound: translation_bound(w, rmax)?,
        });
    }
    let trend = if members.len() >= 3 {
        let degree = if members.len() >= 4 { 2 } else { 1 };
        let xs: Vec<f64> = members.iter().map(|m| m.param).collect();
        let ys: Vec<f64> = members.iter().map(|m| m.extrapolated).collect();
        let fit = polyfit(&xs, &ys, degree)?;
        let (limit, se) = (fit.intercept(), fit.std_errors[0]);
        Some(Trend {
            degree,
            limit,
            std_error: se,
            candidate: cfg.candidate,
            convergent: cfg
                .candidate
                .map(|c| (limit - c).abs() <= 3.0 * se + cfg.abs_tol),
            fit,
        })
    } else {
        None
    };
    Ok(ConjectureReport {
        rows,
        members,
        trend,
    })
}

/// `max_k Σ_{x ∈ [k, k+1)} |w(x)|` over integer `k` with `[k, k+1) ⊂ [-R, R]`.
pub fn translation_bound(w: &PointWeighting, radius: f64) -> Result<f64> {
    let r = radius.floor() as i128;
    let atoms = w.enumerate(&Window::symmetric(r))?;
    let mut best = 0.0f64;
    let mut k = -r;
    let mut idx = 0;
    while k < r {
        let hi = Q::from_integer(k + 1);
        let mut sum = 0.0;
        while idx < atoms.len() && atoms[idx].0 < hi {
            sum += atoms[idx].1.norm();
            idx += 1;
        }
        best = best.max(sum);
        k += 1;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use std::f64::consts::PI;

    fn cfg() -> EberleinConfig {
        EberleinConfig::default()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn integer_lattice_pair_counts() {
        let z = PointWeighting::lattice(qi(1), qi(0));
        let f = TestFunction::unit();
        let est = eberlein_numeric(&z, &z, 100.0, &f, &cfg()).unwrap();
        // oracle: pairs at distance m number 201 - |m| inside [-100, 100]
        let oracle: f64 = (-200i32..=200)
            .map(|m| (201 - m.abs()) as f64 / 200.0 * (-PI * (m * m) as f64).exp())
            .sum();
        assert!((est.re - oracle).abs() < 1e-13);
        let theta: f64 = (-30i32..=30).map(|m| (-PI * (m * m) as f64).exp()).sum();
        assert!((est.re - theta).abs() < 2.0 / 100.0);
    }

    #[test]
    fn lattice_constants_from_pair_counting() {
        // δ_{aZ} ⊛ δ_{bZ} = (g/(ab)) δ_{gZ}, pinned by brute-force counting at R = 1000
        let f = TestFunction::gaussian(0.0, 0.8).unwrap();
        for (a, b) in [(qi(1), qi(1)), (q(1, 3), qi(1)), (q(1, 2), q(1, 2))] {
            let wa = PointWeighting::lattice(a, qi(0));
            let wb = PointWeighting::lattice(b, qi(0));
            let sym = eberlein_symbolic(&wa.combs[0], &wb.combs[0]).unwrap();
            let g = rational::gcd(&a, &b);
            assert_eq!(sym.spacing, g);
            let expected = rational::to_f64(&(g / (a * b)));
            assert!((sym.density.as_constant().unwrap().re - expected).abs() < 1e-15);
            let est = eberlein_numeric(&wa, &wb, 1000.0, &f, &cfg()).unwrap();
            let exact = PointWeighting::from_comb(sym)
                .pair_direct(&f, 1e-13)
                .unwrap()
                .value;
            assert!((est - exact).norm() / exact.norm() < 5e-3);
        }
        let third = PointWeighting::lattice(q(1, 3), qi(0));
        let z = PointWeighting::lattice(qi(1), qi(0));
        let sym = eberlein_symbolic(&third.combs[0], &z.combs[0]).unwrap();
        assert_eq!(PointWeighting::from_comb(sym), third);
    }

    fn three_periodic(alpha: Complex64) -> LatticeComb {
        let d = TrigPolynomial::from_terms([
            (qi(0), c(1.0 / 3.0)),
            (qi(1), alpha / 3.0),
            (qi(2), alpha.conj() / 3.0),
        ]);
        LatticeComb::new(q(1, 3), qi(0), d).unwrap()
    }

    #[test]
    fn three_periodic_autocorrelation() {
        let alpha = Complex64::new(0.6, 0.3);
        let w = three_periodic(alpha);
        let sym = eberlein_symbolic(&w, &w).unwrap();
        let expected = TrigPolynomial::from_terms([
            (qi(0), c(1.0 / 3.0)),
            (qi(1), c(alpha.norm_sqr() / 3.0)),
            (qi(2), c(alpha.norm_sqr() / 3.0)),
        ]);
        assert_eq!(sym.spacing, q(1, 3));
        for x in [qi(0), q(1, 3), q(2, 3)] {
            assert!((sym.density.evaluate(&x) - expected.evaluate(&x)).norm() < 1e-15);
        }
        let amp = autocorr_via_amplitudes(&w).unwrap();
        let win = Window::symmetric(5);
        let a = PointWeighting::from_comb(amp.gamma.clone())
            .enumerate(&win)
            .unwrap();
        let b = PointWeighting::from_comb(sym).enumerate(&win).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.0, y.0);
            assert!((x.1 - y.1).norm() < 1e-14);
        }
        // |α| = 1 makes the comb homometric with δ_Z
        let unit = autocorr_via_amplitudes(&three_periodic(Complex64::new(0.0, 1.0))).unwrap();
        let spec = unit.gamma_hat.enumerate(&win).unwrap();
        assert_eq!(spec.len(), 11);
        assert!(spec
            .iter()
            .all(|(x, v)| x.is_integer() && (v.re - 1.0).abs() < 1e-14));
    }

    #[test]
    fn translates_share_autocorrelation() {
        let w = PointWeighting::from_comb(three_periodic(Complex64::new(0.2, -0.9)));
        let t = w.translate(&qi(1));
        let f = TestFunction::gaussian(0.1, 0.7).unwrap();
        let a = eberlein_symbolic_weighting(&w, &w)
            .unwrap()
            .pair_direct(&f, 1e-13)
            .unwrap()
            .value;
        let b = eberlein_symbolic_weighting(&t, &t)
            .unwrap()
            .pair_direct(&f, 1e-13)
            .unwrap()
            .value;
        assert!((a - b).norm() < 1e-12);
        let na = eberlein_numeric(&w, &w, 150.0, &f, &cfg()).unwrap();
        let nb = eberlein_numeric(&t, &t, 150.0, &f, &cfg()).unwrap();
        assert!((na - a).norm() < 0.02 && (nb - a).norm() < 0.02);
    }

    #[test]
    fn even_lattice_amplitudes() {
        let two = LatticeComb::uniform(qi(2), qi(0)).unwrap();
        let amp = autocorr_via_amplitudes(&two).unwrap();
        let win = Window::symmetric(4);
        let expected = PointWeighting::lattice(q(1, 2), qi(0)).scale(c(0.25));
        assert_eq!(
            amp.gamma_hat.enumerate(&win).unwrap(),
            expected.enumerate(&win).unwrap()
        );
        let gamma = PointWeighting::from_comb(amp.gamma);
        assert_eq!(
            gamma.enumerate(&win).unwrap(),
            PointWeighting::lattice(qi(2), qi(0))
                .scale(c(0.5))
                .enumerate(&win)
                .unwrap()
        );
        let w = PointWeighting::from_comb(two);
        let f = TestFunction::unit();
        let est = eberlein_numeric(&w, &w, 200.0, &f, &cfg()).unwrap();
        let exact = gamma.pair_direct(&f, 1e-13).unwrap().value;
        assert!((est - exact).norm() / exact.norm() < 0.02);
    }

    #[test]
    fn residual_decays_with_radius() {
        let w = PointWeighting::from_comb(three_periodic(Complex64::new(0.5, 0.5)));
        let probes = vec![TestFunction::gaussian(0.0, 1.0).unwrap()];
        let study = eberlein_study(&w, &w, &[50.0, 100.0, 200.0], &probes, 1e-12, &cfg()).unwrap();
        assert!(study.symbolic.is_some());
        let res: Vec<f64> = study.rows.iter().map(|r| r.residual.unwrap()).collect();
        assert!(res[2] < res[1] && res[1] < res[0], "{res:?}");
        assert!(study.fitted_constant().unwrap() < 5.0);
    }

    #[test]
    fn budget_is_enforced() {
        let z = PointWeighting::lattice(q(1, 100), qi(0));
        let small = EberleinConfig {
            pair_budget: 1000,
            ..cfg()
        };
        assert!(matches!(
            eberlein_numeric(&z, &z, 50.0, &TestFunction::unit(), &small),
            Err(Error::WindowTooLarge { .. })
        ));
    }

    #[test]
    fn quadratic_form_for_integer_lattice() {
        let z = PointWeighting::lattice(qi(1), qi(0));
        let gamma = TemperedObject::direct(z.clone());
        let spec = SpectralMeasure::new(z).unwrap();
        let probes = crate::testfn::standard_probes();
        for f in probes.iter().take(6) {
            for g in probes.iter().skip(10).take(3) {
                let qf = quadratic_form_check(&gamma, &spec, f, g, 1e-12).unwrap();
                assert!(qf.residual < 1e-10, "{}", qf.residual);
            }
            let diag = quadratic_form_check(&gamma, &spec, f, f, 1e-12).unwrap();
            assert!(diag.rhs.value.re >= 0.0 && diag.rhs.value.im.abs() < 1e-12);
        }
    }

    #[test]
    fn translation_bound_of_lattices() {
        assert_eq!(
            translation_bound(&PointWeighting::lattice(q(1, 3), qi(0)), 5.0).unwrap(),
            3.0
        );
    }

    #[test]
    fn constant_family_report() {
        let z = PointWeighting::lattice(qi(1), qi(0));
        let family: Vec<(f64, PointWeighting)> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&p| (p, z.clone()))
            .collect();
        let f = TestFunction::unit();
        let theta: f64 = (-30i32..=30).map(|m| (-PI * (m * m) as f64).exp()).sum();
        let cfg = ConjectureConfig {
            radii: vec![25.0, 50.0, 100.0],
            candidate: Some(theta),
            abs_tol: 1e-3,
            eberlein: cfg(),
        };
        let report = conjecture_probe(&family, &f, &cfg).unwrap();
        assert_eq!(report.rows.len(), 12);
        let first = report.members[0].extrapolated;
        assert!(report
            .members
            .iter()
            .all(|m| (m.extrapolated - first).abs() < 1e-12));
        assert_eq!(report.trend.unwrap().convergent, Some(true));
    }
}
