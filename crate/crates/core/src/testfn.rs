//! Gaussian test functions with closed-form Fourier transforms.
//!
//! Convention: `f̂(k) = ∫ f(x) e^{-2πikx} dx`, so `e^{-πx²}` is self-dual and
//! Poisson summation reads `δ̂_Z = δ_Z` with constant one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `amplitude · e^{-π((x-center)/width)²} · e^{2πi·modulation·x}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianAtom {
    pub center: f64,
    pub width: f64,
    pub modulation: f64,
    #[serde(with = "complex_pair")]
    pub amplitude: Complex64,
}

impl GaussianAtom {
    pub fn new(center: f64, width: f64, modulation: f64, amplitude: Complex64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian width must be positive, got {width}"
            )));
        }
        Ok(Self {
            center,
            width,
            modulation,
            amplitude,
        })
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        let u = (x - self.center) / self.width;
        self.amplitude
            * (-PI * u * u).exp()
            * Complex64::from_polar(1.0, 2.0 * PI * self.modulation * x)
    }

    /// Bound on `|self(x)|` for `|x - center| ≥ r`.
    pub fn envelope(&self, r: f64) -> f64 {
        let u = r / self.width;
        self.amplitude.norm() * (-PI * u * u).exp()
    }

    pub fn fourier(&self) -> GaussianAtom {
        let phase = Complex64::from_polar(1.0, 2.0 * PI * self.modulation * self.center);
        GaussianAtom {
            center: self.modulation,
            width: 1.0 / self.width,
            modulation: -self.center,
            amplitude: self.amplitude * self.width * phase,
        }
    }
}

/// A finite linear combination of Gaussian atoms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestFunction {
    pub atoms: Vec<GaussianAtom>,
}

impl TestFunction {
    pub fn new(atoms: Vec<GaussianAtom>) -> Self {
        Self { atoms }
    }

    /// `e^{-π((x-center)/width)²}`.
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        Ok(Self::new(vec![GaussianAtom::new(
            center,
            width,
            0.0,
            Complex64::new(1.0, 0.0),
        )?]))
    }

    pub fn unit() -> Self {
        Self::gaussian(0.0, 1.0).expect("unit width is positive")
    }

    /// Real probe `e^{-π((x-c)/w)²}·cos(2π m x)`.
    pub fn cosine_gaussian(center: f64, width: f64, modulation: f64) -> Result<Self> {
        let half = Complex64::new(0.5, 0.0);
        Ok(Self::new(vec![
            GaussianAtom::new(center, width, modulation, half)?,
            GaussianAtom::new(center, width, -modulation, half)?,
        ]))
    }

    pub fn evaluate(&self, x: f64) -> Complex64 {
        self.atoms.iter().map(|a| a.evaluate(x)).sum()
    }

    pub fn fourier(&self) -> TestFunction {
        Self::new(self.atoms.iter().map(GaussianAtom::fourier).collect())
    }

    /// `f̌ = (f̂)(-·)`.
    pub fn inverse_fourier(&self) -> TestFunction {
        self.fourier().reflect()
    }

    /// `x ↦ f(-x)`.
    pub fn reflect(&self) -> TestFunction {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom {
                    center: -a.center,
                    modulation: -a.modulation,
                    ..*a
                })
                .collect(),
        )
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> TestFunction {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom {
                    modulation: -a.modulation,
                    amplitude: a.amplitude.conj(),
                    ..*a
                })
                .collect(),
        )
    }

    /// `f̃(x) = conj(f(-x))`.
    pub fn tilde(&self) -> TestFunction {
        self.conj().reflect()
    }

    /// `x ↦ f(x - t)`.
    pub fn translate(&self, t: f64) -> TestFunction {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom {
                    center: a.center + t,
                    amplitude: a.amplitude
                        * Complex64::from_polar(1.0, -2.0 * PI * a.modulation * t),
                    ..*a
                })
                .collect(),
        )
    }

    /// `x ↦ e^{2πisx} f(x)`.
    pub fn modulate(&self, s: f64) -> TestFunction {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom {
                    modulation: a.modulation + s,
                    ..*a
                })
                .collect(),
        )
    }

    pub fn scale(&self, c: Complex64) -> TestFunction {
        Self::new(
            self.atoms
                .iter()
                .map(|a| GaussianAtom {
                    amplitude: a.amplitude * c,
                    ..*a
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &TestFunction) -> TestFunction {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Self::new(atoms)
    }

    /// Pointwise product; Gaussians are closed under multiplication.
    pub fn multiply(&self, other: &TestFunction) -> TestFunction {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                let (ia, ib) = (a.width.powi(-2), b.width.powi(-2));
                let prec = ia + ib;
                let center = (a.center * ia + b.center * ib) / prec;
                let d = a.center - b.center;
                let damp = (-PI * d * d / (a.width.powi(2) + b.width.powi(2))).exp();
                atoms.push(GaussianAtom {
                    center,
                    width: prec.sqrt().recip(),
                    modulation: a.modulation + b.modulation,
                    amplitude: a.amplitude * b.amplitude * damp,
                });
            }
        }
        Self::new(atoms)
    }

    /// `f ∗ g̃`, computed as the inverse transform of `f̂ · conj(ĝ)`.
    pub fn convolve_tilde(&self, g: &TestFunction) -> TestFunction {
        self.fourier()
            .multiply(&g.fourier().conj())
            .inverse_fourier()
    }

    /// `∫ f dx = f̂(0)`.
    pub fn integral(&self) -> Complex64 {
        self.fourier().evaluate(0.0)
    }

    /// `∫ |f|² dx`, closed form.
    pub fn l2_norm_sq(&self) -> f64 {
        self.multiply(&self.conj()).integral().re
    }

    /// Merges atoms with identical parameters and drops zero amplitudes.
    pub fn canonical(&self) -> TestFunction {
        let mut atoms: Vec<GaussianAtom> = Vec::new();
        for a in &self.atoms {
            match atoms.iter_mut().find(|b| {
                b.center == a.center && b.width == a.width && b.modulation == a.modulation
            }) {
                Some(b) => b.amplitude += a.amplitude,
                None => atoms.push(*a),
            }
        }
        atoms.retain(|a| a.amplitude.norm() > 0.0);
        atoms.sort_by(|a, b| {
            (a.center, a.width, a.modulation)
                .partial_cmp(&(b.center, b.width, b.modulation))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Self::new(atoms)
    }

    /// True iff the atom list is closed under pointwise conjugation.
    pub fn is_real(&self) -> bool {
        let a = self.canonical();
        let b = self.conj().canonical();
        a.atoms.len() == b.atoms.len()
            && a.atoms.iter().zip(&b.atoms).all(|(x, y)| {
                x.center == y.center
                    && x.width == y.width
                    && x.modulation == y.modulation
                    && (x.amplitude - y.amplitude).norm() <= 1e-14 * (1.0 + x.amplitude.norm())
            })
    }

    /// Radius `r` such that every atom is below `eps · |amplitude|` beyond
    /// distance `r` from its center.
    pub fn support_radius(&self, eps: f64) -> f64 {
        let t = (-eps.ln() / PI).max(0.0).sqrt();
        self.atoms.iter().map(|a| a.width * t).fold(0.0, f64::max)
    }

    pub fn center_range(&self) -> (f64, f64) {
        let lo = self
            .atoms
            .iter()
            .map(|a| a.center)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .atoms
            .iter()
            .map(|a| a.center)
            .fold(f64::NEG_INFINITY, f64::max);
        if lo > hi {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// Bound on `Σ_{x ∈ spacing·Z + any offset, x ∉ [lo, hi]} |f(x)|` where
    /// `[lo, hi]` contains every atom center.
    pub fn lattice_tail(&self, spacing: f64, lo: f64, hi: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| {
                let left = a.center - lo;
                let right = hi - a.center;
                side_tail(a, left, spacing) + side_tail(a, right, spacing)
            })
            .sum()
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.atoms.iter().map(|a| a.amplitude.norm()).sum()
    }
}

/// `Σ_{j ≥ 0} |a| e^{-π((r + j h)/w)²}` bounded by a geometric series.
fn side_tail(a: &GaussianAtom, r: f64, h: f64) -> f64 {
    let r = r.max(0.0);
    let first = a.envelope(r);
    let ratio = (-2.0 * PI * r * h / (a.width * a.width)).exp();
    if ratio >= 1.0 - 1e-12 {
        // r ~ 0: fall back to the crude count bound
        return a.amplitude.norm() * (1.0 + a.width / h);
    }
    first / (1.0 - ratio)
}

/// The default probe corpus: twenty real and complex Gaussian combinations.
pub fn standard_probes() -> Vec<TestFunction> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let g = |center: f64, width: f64, m: f64, amp: Complex64| {
        GaussianAtom::new(center, width, m, amp).expect("positive width")
    };
    vec![
        TestFunction::new(vec![g(0.0, 1.0, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![g(0.0, 0.6, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![g(0.0, 1.7, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![g(0.25, 1.0, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![g(-0.4, 0.8, 0.0, c(0.7, 0.0))]),
        TestFunction::new(vec![g(3.0, 1.2, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![g(-4.5, 2.0, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![g(0.0, 2.5, 0.0, c(0.5, 0.0))]),
        TestFunction::cosine_gaussian(0.0, 0.9, 3.0).expect("positive width"),
        TestFunction::cosine_gaussian(0.1, 0.7, 4.5).expect("positive width"),
        TestFunction::cosine_gaussian(-0.3, 1.1, 5.0).expect("positive width"),
        TestFunction::new(vec![g(0.0, 0.45, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![g(1.0, 1.0, 0.3, c(1.0, 0.0))]),
        TestFunction::new(vec![g(0.0, 1.0, 3.0, c(0.0, 1.0))]),
        TestFunction::new(vec![g(2.0, 0.9, -1.0, c(0.6, -0.8))]),
        TestFunction::new(vec![
            g(0.0, 1.0, 0.0, c(1.0, 0.0)),
            g(1.5, 0.5, 0.0, c(-0.5, 0.0)),
        ]),
        TestFunction::new(vec![
            g(-1.0, 1.3, 0.0, c(1.0, 0.0)),
            g(1.0, 1.3, 0.0, c(1.0, 0.0)),
        ]),
        TestFunction::new(vec![
            g(0.5, 0.55, 2.0, c(1.0, 0.5)),
            g(0.5, 0.55, -2.0, c(1.0, -0.5)),
        ]),
        TestFunction::new(vec![g(5.0, 1.5, 0.0, c(1.0, 0.0))]),
        TestFunction::new(vec![
            g(0.0, 3.0, 0.0, c(0.4, 0.0)),
            g(3.0, 0.8, 0.0, c(0.6, 0.0)),
        ]),
    ]
}

/// Loads a probe corpus (JSON array of test functions).
pub fn load_probes(json: &str) -> Result<Vec<TestFunction>> {
    let probes: Vec<TestFunction> = serde_json::from_str(json)?;
    for p in &probes {
        for a in &p.atoms {
            GaussianAtom::new(a.center, a.width, a.modulation, a.amplitude)?;
        }
    }
    Ok(probes)
}

pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}
