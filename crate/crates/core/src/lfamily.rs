//! The aperiodic set `L`, its layers `L_n = 2·4^n Z ± (4^n - 1)`, and tower
//! families of weighted layers.

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::comb::{check_count, LatticeComb, PointWeighting, TrigPolynomial, Window, NOISE};
use crate::error::{Error, Result};
use crate::fourier::TemperedObject;
use crate::rational::{self, serde_q, Q};
use crate::testfn::TestFunction;

/// Hard cap on layer indices considered by any loop.
const LAYER_CAP: u32 = 60;

/// `Direct` towers put weight on the progressions `2sZ ± (s - 1)`; `Dual`
/// towers carry their transforms `cos(2π(s - 1)x)/s · δ_{Z/(2s)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerSide {
    Direct,
    Dual,
}

/// `(a·r^n + b)^power`, or `|a·r^n + b|^power` when `abs` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFactor {
    pub a: f64,
    pub r: f64,
    pub b: f64,
    pub power: f64,
    #[serde(default)]
    pub abs: bool,
}

impl WeightFactor {
    fn base(&self, n: u32) -> f64 {
        self.a * self.r.powi(n as i32) + self.b
    }

    fn eval(&self, n: u32) -> f64 {
        self.apply(self.base(n))
    }

    fn apply(&self, x: f64) -> f64 {
        let x = if self.abs { x.abs() } else { x };
        if self.power.fract() == 0.0 {
            x.powi(self.power as i32)
        } else {
            x.powf(self.power)
        }
    }

    fn limit(&self) -> Option<f64> {
        if self.r.abs() < 1.0 {
            Some(self.apply(self.b))
        } else if self.r == 1.0 {
            Some(self.apply(self.a + self.b))
        } else if self.a == 0.0 {
            Some(self.apply(self.b))
        } else {
            None
        }
    }
}

/// Layer weight `coeff · Π factors(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerWeight {
    pub coeff: f64,
    #[serde(default)]
    pub factors: Vec<WeightFactor>,
}

impl LayerWeight {
    pub fn constant(c: f64) -> Self {
        Self {
            coeff: c,
            factors: Vec::new(),
        }
    }

    /// `r^n`.
    pub fn geometric(r: f64) -> Self {
        Self {
            coeff: 1.0,
            factors: vec![WeightFactor {
                a: 1.0,
                r,
                b: 0.0,
                power: 1.0,
                abs: false,
            }],
        }
    }

    /// `(4/(4+ε))^n`, or `1` without ε.
    pub fn from_eps(eps: Option<f64>) -> Self {
        match eps {
            Some(e) => Self::geometric(eps_ratio(e)),
            None => Self::constant(1.0),
        }
    }

    pub fn eval(&self, n: u32) -> f64 {
        self.factors
            .iter()
            .fold(self.coeff, |acc, f| acc * f.eval(n))
    }

    /// `lim_{n→∞}`, if it exists.
    pub fn limit(&self) -> Option<f64> {
        self.factors
            .iter()
            .try_fold(self.coeff, |acc, f| Some(acc * f.limit()?))
    }

    pub fn decays(&self) -> bool {
        self.limit() == Some(0.0)
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self {
            coeff: self.coeff * other.coeff,
            factors,
        }
    }

    /// `n ↦ w(n + d)`.
    pub fn shift(&self, d: i32) -> Self {
        Self {
            coeff: self.coeff,
            factors: self
                .factors
                .iter()
                .map(|f| WeightFactor {
                    a: f.a * f.r.powi(d),
                    ..*f
                })
                .collect(),
        }
    }

    /// `n ↦ |w(n)|^{1/2}`.
    pub fn sqrt_abs(&self) -> Self {
        Self {
            coeff: self.coeff.abs().sqrt(),
            factors: self
                .factors
                .iter()
                .map(|f| WeightFactor {
                    power: f.power / 2.0,
                    abs: true,
                    ..*f
                })
                .collect(),
        }
    }

    /// `n ↦ |w(n)|`.
    pub fn abs(&self) -> Self {
        Self {
            coeff: self.coeff.abs(),
            factors: self
                .factors
                .iter()
                .map(|f| WeightFactor { abs: true, ..*f })
                .collect(),
        }
    }
}

/// `4/(4+ε)`.
pub fn eps_ratio(eps: f64) -> f64 {
    4.0 / (4.0 + eps)
}

/// A family of layers indexed by `n ∈ [n_min, n_max]` with `s_n = scale·4^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TowerDescriptor", into = "TowerDescriptor")]
pub struct TowerFamily {
    pub side: TowerSide,
    pub eps: Option<f64>,
    pub n_min: u32,
    pub n_max: Option<u32>,
    pub scale: Q,
    pub weight: LayerWeight,
    pub density: TrigPolynomial,
    pub offset: Q,
    pub exclude: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TowerDescriptor {
    kind: String,
    side: TowerSide,
    #[serde(default)]
    eps: Option<f64>,
    #[serde(default)]
    n_min: Option<u32>,
    #[serde(default)]
    n_max: Option<u32>,
    #[serde(default, with = "opt_q", skip_serializing_if = "Option::is_none")]
    scale: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<LayerWeight>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    density: Option<TrigPolynomial>,
    #[serde(default, with = "opt_q", skip_serializing_if = "Option::is_none")]
    offset: Option<Q>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    exclude: Vec<u32>,
}

impl TryFrom<TowerDescriptor> for TowerFamily {
    type Error = Error;

    fn try_from(d: TowerDescriptor) -> Result<Self> {
        if d.kind != "L-tower" {
            return Err(Error::Parse(format!("unknown tower kind {:?}", d.kind)));
        }
        if let Some(e) = d.eps {
            if !(e > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tower eps must be positive, got {e}"
                )));
            }
        }
        let scale = d.scale.unwrap_or_else(Q::one);
        if scale <= Q::zero() {
            return Err(Error::InvalidParameter(
                "tower scale must be positive".into(),
            ));
        }
        Ok(Self {
            side: d.side,
            eps: d.eps,
            n_min: d.n_min.unwrap_or(1),
            n_max: d.n_max,
            scale,
            weight: d.weight.unwrap_or_else(|| LayerWeight::from_eps(d.eps)),
            density: d.density.unwrap_or_else(TrigPolynomial::one),
            offset: d.offset.unwrap_or_else(Q::zero),
            exclude: d.exclude,
        })
    }
}

impl From<TowerFamily> for TowerDescriptor {
    fn from(t: TowerFamily) -> Self {
        let default_weight = LayerWeight::from_eps(t.eps);
        Self {
            kind: "L-tower".into(),
            side: t.side,
            eps: t.eps,
            n_min: Some(t.n_min),
            n_max: t.n_max,
            scale: (!t.scale.is_one()).then_some(t.scale),
            weight: (t.weight != default_weight).then_some(t.weight),
            density: (t.density != TrigPolynomial::one()).then_some(t.density),
            offset: (!t.offset.is_zero()).then_some(t.offset),
            exclude: t.exclude,
        }
    }
}

mod opt_q {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(v) => serde_q::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Q>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "serde_q")] Q);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// Sign report for one layer of a tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerSign {
    Vanishing(u32),
    Negative(u32),
}

impl TowerFamily {
    /// `Σ_{n ≥ 1} w(n) δ_{L_n}` with `w(n) = (4/(4+ε))^n` (or `1`).
    pub fn progressions(eps: Option<f64>, n_max: Option<u32>) -> Self {
        Self {
            side: TowerSide::Direct,
            eps,
            n_min: 1,
            n_max,
            scale: Q::one(),
            weight: LayerWeight::from_eps(eps),
            density: TrigPolynomial::one(),
            offset: Q::zero(),
            exclude: Vec::new(),
        }
    }

    /// `Σ_{n ≥ 1} w(n) cos(2π(4^n - 1)x)/4^n · δ_{Z/(2·4^n)}`.
    pub fn cosine(eps: Option<f64>, n_max: Option<u32>) -> Self {
        Self {
            side: TowerSide::Dual,
            ..Self::progressions(eps, n_max)
        }
    }

    pub fn with_weight(mut self, weight: LayerWeight) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_scale(mut self, scale: Q) -> Self {
        self.scale = scale;
        self
    }

    pub fn s(&self, n: u32) -> Q {
        self.scale * Q::from_integer(4i128.pow(n))
    }

    pub(crate) fn s_f64(&self, n: u32) -> f64 {
        rational::to_f64(&self.scale) * 4f64.powi(n as i32)
    }

    pub(crate) fn last_layer(&self) -> u32 {
        self.n_max.unwrap_or(u32::MAX).min(LAYER_CAP)
    }

    /// Weight of layer `n`; excluded layers weigh zero.
    pub fn layer_weight(&self, n: u32) -> f64 {
        if n < self.n_min || self.n_max.is_some_and(|m| n > m) || self.exclude.contains(&n) {
            0.0
        } else {
            self.weight.eval(n)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.density.terms.is_empty()
            || self.n_max.is_some_and(|m| m < self.n_min)
            || self.weight.coeff == 0.0
    }

    pub fn enumerate_into(&self, w: &Window, out: &mut Vec<(Q, Complex64)>) -> Result<()> {
        match self.side {
            TowerSide::Direct => {
                let reach = w.radius() + self.offset.abs();
                for n in self.n_min..=self.last_layer() {
                    let s = self.s(n);
                    if (s - Q::one()).abs() > reach && s > Q::one() {
                        break;
                    }
                    let lw = self.layer_weight(n);
                    if lw == 0.0 {
                        continue;
                    }
                    for r in [s - Q::one(), Q::one() - s] {
                        let c = LatticeComb {
                            spacing: s * Q::from_integer(2),
                            offset: r + self.offset,
                            density: self.density.scale(Complex64::new(lw, 0.0)),
                        };
                        c.enumerate_into(w, out)?;
                    }
                }
                Ok(())
            }
            TowerSide::Dual => {
                let Some(n_max) = self.n_max else {
                    return Err(Error::NonConvergence(
                        "a cosine tower with infinitely many layers has no finite enumeration"
                            .into(),
                    ));
                };
                for n in self.n_min..=n_max {
                    let lw = self.layer_weight(n);
                    if lw == 0.0 {
                        continue;
                    }
                    let s = self.s(n);
                    let spacing = (s * Q::from_integer(2)).recip();
                    let first = ((w.lo - self.offset) / spacing).ceil().to_integer();
                    let last = ((w.hi - self.offset) / spacing).floor().to_integer();
                    if last < first {
                        continue;
                    }
                    check_count((last - first + 1) as u64)?;
                    let freq = s - Q::one();
                    let sf = rational::to_f64(&s);
                    for j in first..=last {
                        let x = self.offset + spacing * Q::from_integer(j);
                        let cos = rational::cis(&(freq * (x - self.offset))).re;
                        if cos.abs() > NOISE {
                            out.push((x, self.density.evaluate(&x) * (lw * cos / sf)));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// `Σ |weight|` over the atoms of layer `n` in the window, as enumerated.
    pub fn layer_tv(&self, n: u32, w: &Window) -> Result<f64> {
        let lw = self.layer_weight(n);
        if lw == 0.0 {
            return Ok(0.0);
        }
        if self.side == TowerSide::Direct {
            let mut raw = Vec::new();
            Self {
                n_min: n,
                n_max: Some(n),
                exclude: Vec::new(),
                ..self.clone()
            }
            .enumerate_into(w, &mut raw)?;
            return Ok(raw.iter().map(|(_, v)| v.norm()).sum());
        }
        let s = self.s(n);
        if !s.is_integer() {
            let mut raw = Vec::new();
            Self {
                n_min: n,
                n_max: Some(n),
                exclude: Vec::new(),
                ..self.clone()
            }
            .enumerate_into(w, &mut raw)?;
            return Ok(raw.iter().map(|(_, v)| v.norm()).sum());
        }
        let si = s.to_integer();
        let spacing = Q::new(1, 2 * si);
        let first = ((w.lo - self.offset) / spacing).ceil().to_integer();
        let last = ((w.hi - self.offset) / spacing).floor().to_integer();
        let (o, sf) = (rational::to_f64(&self.offset), si as f64);
        let mut total = 0.0;
        for j in first..=last {
            // cos(2π(s-1)j/(2s)) with the angle reduced exactly
            let m = ((si - 1) * j).rem_euclid(2 * si);
            let cos = (std::f64::consts::PI * m as f64 / sf).cos();
            if cos.abs() > NOISE {
                let x = o + j as f64 / (2.0 * sf);
                total += (self.density.evaluate_f64(x) * (lw * cos / sf)).norm();
            }
        }
        Ok(total)
    }

    /// `h` such that layer `n` paired with `f` equals `δ_{P_n}(ĥ)` (dual side)
    /// or `δ_{P_n}(h)` (direct side), with `P_n = 2sZ ± (s-1)`.
    fn reduced_probe(&self, f: &TestFunction) -> TestFunction {
        let shifted = f.translate(-rational::to_f64(&self.offset));
        let mut h = TestFunction::new(Vec::new());
        for t in &self.density.terms {
            let phase = rational::cis(&(t.freq * self.offset));
            h = h.add(
                &shifted
                    .modulate(rational::to_f64(&t.freq))
                    .scale(t.coeff * phase),
            );
        }
        match self.side {
            TowerSide::Direct => h,
            TowerSide::Dual => h.fourier(),
        }
    }

    /// `|layer_n(f)| ≤ |w(n)| · Σ_{|k| ≥ s-1} |h(k)|` for each `n`.
    pub fn layer_bounds(&self, f: &TestFunction, upto: u32) -> Vec<(u32, f64)> {
        let h = self.reduced_probe(f);
        (self.n_min..=upto.min(self.last_layer()))
            .map(|n| {
                let s = self.s_f64(n);
                let tail = h.lattice_tail(1.0, -(s - 1.0) + 0.5, s - 1.0 - 0.5);
                (n, self.layer_weight(n).abs() * tail)
            })
            .collect()
    }

    /// Bound on the layers beyond `n` paired with `f`.
    pub fn tail_after(&self, f: &TestFunction, n: u32) -> f64 {
        if self.n_max.is_some_and(|m| m <= n) {
            return 0.0;
        }
        let h = self.reduced_probe(f);
        let mut total = 0.0;
        for k in (n + 1).max(self.n_min)..=self.last_layer() {
            let s = self.s_f64(k);
            let b =
                self.layer_weight(k).abs() * h.lattice_tail(1.0, -(s - 1.0) + 0.5, s - 1.0 - 0.5);
            total += b;
            if b == 0.0 && s > 1e3 {
                break;
            }
        }
        total
    }

    /// Layer count for direct evaluation against `f` and the bound on what is
    /// dropped. Direct-side towers are locally finite and never truncated.
    pub fn direct_truncation(&self, f: &TestFunction, tol: f64) -> Result<(Option<u32>, f64)> {
        if self.side == TowerSide::Direct {
            return Ok((self.n_max, 0.0));
        }
        if self.n_max.is_none() && !self.weight.decays() {
            return Err(Error::NonConvergence(
                "cosine tower with non-decaying layer weights: evaluate it on the dual side".into(),
            ));
        }
        let mut n = self.n_min.saturating_sub(1);
        loop {
            let tail = self.tail_after(f, n);
            if tail <= tol || self.n_max.is_some_and(|m| n >= m) {
                return Ok((Some(n.min(self.n_max.unwrap_or(u32::MAX))), tail));
            }
            n += 1;
            if n > LAYER_CAP {
                return Err(Error::NonConvergence(
                    "layer tail bound does not reach the tolerance".into(),
                ));
            }
        }
    }

    /// Bound on the tower's atoms outside `[lo, hi]` paired with `|f|`.
    pub fn window_tail(&self, f: &TestFunction, lo: f64, hi: f64) -> Result<f64> {
        let d = self.density.sup_bound();
        let o = rational::to_f64(&self.offset);
        let mut total = 0.0;
        for n in self.n_min..=self.last_layer() {
            let lw = self.layer_weight(n).abs();
            let s = self.s_f64(n);
            let part = match self.side {
                TowerSide::Direct => 2.0 * lw * d * f.lattice_tail(2.0 * s, lo, hi),
                TowerSide::Dual => {
                    if self.n_max.is_none() {
                        return Err(Error::NonConvergence("untruncated cosine tower".into()));
                    }
                    lw * d / s * f.lattice_tail(0.5 / s, lo, hi)
                }
            };
            total += part;
            if self.side == TowerSide::Direct
                && s - 1.0 > 2.0 * (lo.abs() + hi.abs() + o.abs()) + 1e3
            {
                break;
            }
        }
        Ok(total)
    }

    pub fn translate(&self, t: &Q) -> Self {
        Self {
            offset: self.offset + t,
            density: self.density.shift(t),
            ..self.clone()
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            density: self.density.scale(a),
            ..self.clone()
        }
    }

    pub fn modulate(&self, p: &TrigPolynomial) -> Self {
        Self {
            density: self.density.multiply(p),
            ..self.clone()
        }
    }

    /// Position negation; every layer is symmetric about the offset.
    pub fn reflect(&self) -> Self {
        Self {
            offset: -self.offset,
            density: self.density.reflect(),
            ..self.clone()
        }
    }

    pub fn position_denominator(&self) -> Option<i128> {
        match self.side {
            TowerSide::Direct => Some(self.scale.denom().lcm(self.offset.denom())),
            TowerSide::Dual => {
                let s = self.s(self.n_max?);
                Some((s.numer() * 2).lcm(self.offset.denom()))
            }
        }
    }

    /// Scans layer weights (times a constant density) for zeros and sign
    /// changes. Dual towers are signed by construction and not scanned.
    pub fn layer_sign_scan(&self) -> Result<Vec<LayerSign>> {
        if self.side == TowerSide::Dual {
            return Ok(Vec::new());
        }
        let Some(c) = self.density.as_constant() else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let scale = self.weight.coeff.abs().max(1e-300);
        for n in self.n_min..=self.last_layer() {
            if self.exclude.contains(&n) {
                continue;
            }
            let v = c * self.weight.eval(n);
            if v.norm() <= 1e-15 * scale * c.norm().max(1.0) {
                out.push(LayerSign::Vanishing(n));
            } else if v.re < 0.0 || v.im.abs() > 1e-12 * v.norm() {
                out.push(LayerSign::Negative(n));
                break;
            }
        }
        Ok(out)
    }

    /// Unit-weight tower on the layers with nonzero weight.
    pub fn support(&self) -> Result<Self> {
        if self.side == TowerSide::Dual {
            return Err(Error::Unsupported("support of a cosine tower".into()));
        }
        let mut exclude = self.exclude.clone();
        for s in self.layer_sign_scan()? {
            if let LayerSign::Vanishing(n) = s {
                exclude.push(n);
            }
        }
        exclude.sort_unstable();
        exclude.dedup();
        Ok(Self {
            eps: None,
            weight: LayerWeight::constant(1.0),
            density: TrigPolynomial::one(),
            exclude,
            ..self.clone()
        })
    }

    /// Transform of the tower, layer by layer.
    pub fn fourier(&self) -> Result<Self> {
        if !self.offset.is_zero() || self.density.as_constant().is_none() {
            return Err(Error::Unsupported(
                "transform of a translated or modulated tower has no closed form here".into(),
            ));
        }
        let side = match self.side {
            TowerSide::Direct => TowerSide::Dual,
            TowerSide::Dual => TowerSide::Direct,
        };
        Ok(Self {
            side,
            ..self.clone()
        })
    }

    /// `log2(scale)` when the scale is a power of two.
    fn dyadic_exponent(&self) -> Option<i32> {
        let s = self.scale;
        if !s.denom().is_one() || s.numer().count_ones() != 1 {
            return None;
        }
        Some(s.numer().trailing_zeros() as i32)
    }

    /// Pointwise product of two direct towers with zero offsets and
    /// power-of-two scales; `None` when the supports are disjoint.
    pub fn product(&self, other: &Self) -> Result<Option<Self>> {
        let unsupported = || Error::Unsupported("tower product outside the dyadic case".into());
        if self.side != TowerSide::Direct || other.side != TowerSide::Direct {
            return Err(unsupported());
        }
        if !self.offset.is_zero() || !other.offset.is_zero() {
            return Err(unsupported());
        }
        let (e1, e2) = (
            self.dyadic_exponent().ok_or_else(unsupported)?,
            other.dyadic_exponent().ok_or_else(unsupported)?,
        );
        // layers are characterized by the 2-adic valuation e + 2n ≥ 2 of k ± 1
        if e1 + 2 * (self.n_min as i32) < 2 || e2 + 2 * (other.n_min as i32) < 2 {
            return Err(unsupported());
        }
        if (e1 - e2).rem_euclid(2) != 0 {
            return Ok(None);
        }
        let d = (e1 - e2) / 2;
        let to_self = |m: u32| m as i64 - d as i64;
        let n_min = (self.n_min as i64).max(to_self(other.n_min)).max(0) as u32;
        let n_max = match (self.n_max, other.n_max.map(&to_self)) {
            (Some(a), Some(b)) => Some((a as i64).min(b)),
            (Some(a), None) => Some(a as i64),
            (None, Some(b)) => Some(b),
            (None, None) => None,
        };
        if n_max.is_some_and(|m| m < n_min as i64) {
            return Ok(None);
        }
        let mut exclude: Vec<u32> = self.exclude.clone();
        exclude.extend(
            other
                .exclude
                .iter()
                .filter_map(|&m| u32::try_from(to_self(m)).ok()),
        );
        exclude.sort_unstable();
        exclude.dedup();
        Ok(Some(Self {
            side: TowerSide::Direct,
            eps: None,
            n_min,
            n_max: n_max.map(|m| m as u32),
            scale: self.scale,
            weight: self.weight.multiply(&other.weight.shift(d)),
            density: self.density.multiply(&other.density),
            offset: Q::zero(),
            exclude,
        }))
    }

    /// Pointwise product with a lattice comb.
    pub fn product_with_comb(&self, comb: &LatticeComb) -> Result<PointWeighting> {
        if self.side != TowerSide::Direct {
            return Err(Error::Unsupported("restriction of a cosine tower".into()));
        }
        let local = comb.translate(&-self.offset);
        if local.covers_integers() && self.position_denominator() == Some(1) {
            return Ok(PointWeighting::from_tower(self.modulate(&comb.density)));
        }
        if !rational::is_integer(&local.spacing) || !rational::is_integer(&local.offset) {
            return Err(Error::Unsupported(
                "restriction of a tower to a fractional comb".into(),
            ));
        }
        let d = local.spacing.to_integer();
        // layers with d | s collapse to the residues ∓1 mod d
        let mut out = PointWeighting::empty();
        let mut n = self.n_min;
        while n <= self.last_layer() {
            let s = self.s(n);
            if rational::is_integer(&s) && s.to_integer() % d == 0 {
                break;
            }
            for layer in self.layer_combs(n) {
                if let Some(c) = layer.intersect(comb) {
                    out.combs.push(c);
                }
            }
            n += 1;
        }
        if n > self.last_layer() {
            return Ok(out);
        }
        let o = local.offset.to_integer().mod_floor(&d);
        let plus = (-1i128).mod_floor(&d) == o;
        let minus = 1i128.mod_floor(&d) == o;
        if plus != minus {
            return Err(Error::Unsupported(
                "restriction keeps one sign of each layer".into(),
            ));
        }
        if plus {
            out.towers.push(Self {
                n_min: n,
                ..self.modulate(&comb.density)
            });
        }
        Ok(out)
    }

    /// The two progressions of layer `n` as weighted combs.
    pub fn layer_combs(&self, n: u32) -> Vec<LatticeComb> {
        let lw = self.layer_weight(n);
        if lw == 0.0 || self.side != TowerSide::Direct {
            return Vec::new();
        }
        let s = self.s(n);
        [s - Q::one(), Q::one() - s]
            .into_iter()
            .map(|r| LatticeComb {
                spacing: s * Q::from_integer(2),
                offset: r + self.offset,
                density: self.density.scale(Complex64::new(lw, 0.0)),
            })
            .collect()
    }

    /// Every layer as lattice combs; needs finitely many layers.
    pub fn to_combs(&self) -> Result<Vec<LatticeComb>> {
        let Some(n_max) = self.n_max else {
            return Err(Error::Aperiodic("tower with infinitely many layers".into()));
        };
        let mut out = Vec::new();
        for n in self.n_min..=n_max {
            match self.side {
                TowerSide::Direct => out.extend(self.layer_combs(n)),
                TowerSide::Dual => {
                    let lw = self.layer_weight(n);
                    if lw == 0.0 {
                        continue;
                    }
                    let s = self.s(n);
                    let k = s - Q::one();
                    let half = Complex64::new(lw / (2.0 * rational::to_f64(&s)), 0.0);
                    let cos = TrigPolynomial::from_terms([
                        (k, half * rational::cis(&-(k * self.offset))),
                        (-k, half * rational::cis(&(k * self.offset))),
                    ]);
                    out.push(LatticeComb {
                        spacing: (s * Q::from_integer(2)).recip(),
                        offset: self.offset,
                        density: self.density.multiply(&cos),
                    });
                }
            }
        }
        Ok(out)
    }

    /// `sup_n |w(n)| · sup |density|`, if finite.
    pub fn sup_weight(&self) -> Option<f64> {
        let lim = self.weight.limit()?.abs();
        let scan = (self.n_min..=self.last_layer().min(self.n_min + 400))
            .map(|n| self.layer_weight(n).abs())
            .fold(0.0, f64::max);
        Some(scan.max(lim) * self.density.sup_bound())
    }
}

/// Which part of `L` an integer belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LComponent {
    Even,
    /// `2·4^n Z + sign·(4^n - 1)`.
    Layer {
        n: u32,
        sign: i8,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub component: Option<LComponent>,
}

/// Exact membership in `L`.
pub fn l_membership(x: i128) -> Membership {
    if x % 2 == 0 {
        return Membership {
            member: true,
            component: Some(LComponent::Even),
        };
    }
    if x == 1 || x == -1 {
        return Membership {
            member: false,
            component: None,
        };
    }
    let (vm, vp) = ((x - 1).trailing_zeros(), (x + 1).trailing_zeros());
    let v = vm.max(vp);
    if v % 2 == 1 {
        return Membership {
            member: false,
            component: None,
        };
    }
    let sign = if vp == v { 1 } else { -1 };
    Membership {
        member: true,
        component: Some(LComponent::Layer { n: v / 2, sign }),
    }
}

/// `δ_L = δ_{2Z} + Σ_n δ_{L_n}`.
pub fn l_set() -> PointWeighting {
    let mut w = PointWeighting::lattice(Q::from_integer(2), Q::zero());
    w.towers.push(TowerFamily::progressions(None, None));
    w
}

/// `δ_{Z∖L} = δ_{-1} + δ_1 + Σ_n δ_{2·4^n·2Z ± (2·4^n - 1)}`.
pub fn l_complement() -> PointWeighting {
    let mut w = PointWeighting::from_atoms([
        (Q::from_integer(-1), Complex64::new(1.0, 0.0)),
        (Q::from_integer(1), Complex64::new(1.0, 0.0)),
    ]);
    w.towers
        .push(TowerFamily::progressions(None, None).with_scale(Q::from_integer(2)));
    w
}

/// A point of `F = {m/2^ℓ : ℓ = 0, or ℓ ≥ 1 and m odd}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPoint {
    pub x: Q,
    pub ell: u32,
    /// Smallest layer index `n ≥ 1` with `x ∈ Z/(2·4^n)`.
    pub layers_from: u32,
    /// `cos(2π(4^n - 1)x) = 0` on every layer through `x`.
    pub cosine_vanishes: bool,
}

/// `F ∩ window` for `ℓ ≤ ell_max`, sorted by position.
pub fn f_parametrization(w: &Window, ell_max: u32) -> Result<Vec<FPoint>> {
    let mut out = Vec::new();
    for ell in 0..=ell_max {
        let den = Q::from_integer(1i128 << ell);
        let lo = (w.lo * den).ceil().to_integer();
        let hi = (w.hi * den).floor().to_integer();
        if hi >= lo {
            check_count((hi - lo + 1) as u64)?;
        }
        for m in lo..=hi {
            if ell > 0 && m % 2 == 0 {
                continue;
            }
            let x = Q::new(m, 1i128 << ell);
            let layers_from = ell.saturating_sub(1).div_ceil(2).max(1);
            // 4^n - 1 ≡ -1 mod 2^ℓ on every layer through x, so one layer decides
            let phase = rational::frac(&(x * Q::from_integer(4i128.pow(layers_from) - 1)));
            let cosine_vanishes = phase == Q::new(1, 4) || phase == Q::new(3, 4);
            out.push(FPoint {
                x,
                ell,
                layers_from,
                cosine_vanishes,
            });
        }
    }
    out.sort_by_key(|a| a.x);
    Ok(out)
}

/// `1/(3+ε) + ((4+ε)/(3+ε)) · (1/(4+ε)) · √(4+ε)/(√(4+ε) - 2)`.
pub fn nu_bound(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let root = (4.0 + eps).sqrt();
    Ok(1.0 / (3.0 + eps) + (4.0 + eps) / (3.0 + eps) / (4.0 + eps) * root / (root - 2.0))
}

/// `Σ_components Σ_atoms |weight|` on the window with towers cut to `n`
/// layers; no cancellation between components.
pub fn tv_truncation(obj: &PointWeighting, n: u32, w: &Window) -> Result<f64> {
    Ok(*tv_profile(obj, n, w)?.last().unwrap_or(&0.0))
}

/// `tv_truncation(obj, N, w)` for `N = 1..=n`, computed in one pass.
pub fn tv_profile(obj: &PointWeighting, n: u32, w: &Window) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "layer count must be at least 1".into(),
        ));
    }
    let mut base: f64 = obj
        .finite_atoms
        .iter()
        .filter(|a| w.contains(&a.pos))
        .map(|a| a.weight.norm())
        .sum();
    let mut raw = Vec::new();
    for c in &obj.combs {
        c.enumerate_into(w, &mut raw)?;
    }
    base += raw.iter().map(|(_, v)| v.norm()).sum::<f64>();
    let mut out = Vec::with_capacity(n as usize);
    let mut acc = base;
    for i in 0..n {
        for t in &obj.towers {
            let layer = t.n_min + i;
            if t.n_max.is_none_or(|m| layer <= m) {
                acc += t.layer_tv(layer, w)?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Objects of the ε-family and their limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Named {
    DeltaL,
    HatDeltaL,
    Nu,
    Rho,
    Omega,
    Sigma,
    GammaHat,
    Omega0,
}

impl Named {
    pub const ALL: [Named; 8] = [
        Named::DeltaL,
        Named::HatDeltaL,
        Named::Nu,
        Named::Rho,
        Named::Omega,
        Named::Sigma,
        Named::GammaHat,
        Named::Omega0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Named::DeltaL => "delta_L",
            Named::HatDeltaL => "hat_delta_L",
            Named::Nu => "nu",
            Named::Rho => "rho",
            Named::Omega => "omega",
            Named::Sigma => "sigma",
            Named::GammaHat => "gamma_hat",
            Named::Omega0 => "omega_0",
        }
    }

    pub fn needs_eps(self) -> bool {
        matches!(
            self,
            Named::Nu | Named::Rho | Named::Omega | Named::Sigma | Named::GammaHat
        )
    }
}

impl std::str::FromStr for Named {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Named::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown object name {s:?}")))
    }
}

/// A built object with its tower truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct Built {
    pub name: Named,
    pub eps: Option<f64>,
    pub truncation: Option<u32>,
    pub object: TemperedObject,
}

impl Built {
    /// Bound on what the truncation drops when paired with `f`.
    pub fn truncation_bound(&self, f: &TestFunction) -> f64 {
        let Some(n) = self.truncation else { return 0.0 };
        let fh = f.fourier();
        let side = |w: &PointWeighting, g: &TestFunction| -> f64 {
            w.towers
                .iter()
                .map(|t| {
                    TowerFamily {
                        n_max: None,
                        ..t.clone()
                    }
                    .tail_after(g, n)
                })
                .sum()
        };
        side(&self.object.direct, f) + side(&self.object.dual, &fh)
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `(1/2)δ_{Z/2} + Σ_n cos(2π(4^n - 1)x)/4^n δ_{Z/(2·4^n)}` cut at `n` layers.
pub fn hat_delta_l_series(n: u32) -> PointWeighting {
    let mut w = PointWeighting::lattice(Q::new(1, 2), Q::zero()).scale(Complex64::new(0.5, 0.0));
    w.towers.push(TowerFamily::cosine(None, Some(n)));
    w
}

/// `γ̂_ε = δ_{2Z} + Σ_n (2r^n - 1)² δ_{L_n} + δ_{Z∖L}` with `r = 4/(4+ε)`.
pub fn gamma_hat(eps: f64, truncation: Option<u32>) -> PointWeighting {
    let r = eps_ratio(eps);
    let weight = LayerWeight {
        coeff: 1.0,
        factors: vec![WeightFactor {
            a: 2.0,
            r,
            b: -1.0,
            power: 2.0,
            abs: false,
        }],
    };
    let mut w = PointWeighting::lattice(Q::from_integer(2), Q::zero());
    let mut layers = TowerFamily::progressions(Some(eps), truncation).with_weight(weight);
    if eps == 0.0 {
        layers.eps = None;
    }
    w.towers.push(layers);
    let complement = l_complement();
    w.finite_atoms.extend(complement.finite_atoms);
    w.towers
        .extend(complement.towers.into_iter().map(|t| TowerFamily {
            n_max: truncation,
            ..t
        }));
    w
}

/// Builds a named object; `truncation` caps every tower at that many layers.
pub fn build(name: Named, eps: Option<f64>, truncation: Option<u32>) -> Result<Built> {
    if truncation == Some(0) {
        return Err(Error::InvalidParameter(
            "truncation order must be at least 1".into(),
        ));
    }
    let eps = if name.needs_eps() {
        let e =
            eps.ok_or_else(|| Error::InvalidParameter(format!("{} needs eps", name.as_str())))?;
        let ok = if name == Named::GammaHat {
            e >= 0.0
        } else {
            e > 0.0
        };
        if !ok || !e.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "{} is a measure only for eps > 0, got {e}",
                name.as_str()
            )));
        }
        Some(e)
    } else {
        None
    };
    let cut = |mut w: PointWeighting| {
        for t in &mut w.towers {
            t.n_max = truncation;
        }
        w
    };
    let nu = || PointWeighting::from_tower(TowerFamily::cosine(eps, truncation));
    let rho = || {
        let mut w =
            PointWeighting::lattice(Q::new(1, 2), Q::zero()).scale(Complex64::new(0.5, 0.0));
        w.extend(nu());
        w
    };
    let z = || PointWeighting::lattice(Q::one(), Q::zero());
    // ω^ε = 2ρ_ε - δ_Z
    let omega = || PointWeighting::scale_add(Complex64::new(2.0, 0.0), &rho(), -one(), &z());
    let object = match name {
        Named::DeltaL => TemperedObject::direct(cut(l_set())),
        Named::HatDeltaL => TemperedObject::transform_of(cut(l_set())),
        Named::Nu => TemperedObject::direct(nu()),
        Named::Rho => TemperedObject::direct(rho()),
        Named::Omega => TemperedObject::direct(omega()),
        Named::Sigma => {
            // σ_ε = ω^ε + 2δ_Z - 2δ̂_L
            let direct = PointWeighting::scale_add(one(), &omega(), Complex64::new(2.0, 0.0), &z());
            TemperedObject {
                direct,
                dual: cut(l_set()).scale(Complex64::new(-2.0, 0.0)),
                ..Default::default()
            }
        }
        Named::GammaHat => TemperedObject::direct(gamma_hat(eps.unwrap_or(0.0), truncation)),
        Named::Omega0 => TemperedObject {
            direct: z().scale(-one()),
            dual: cut(l_set()).scale(Complex64::new(2.0, 0.0)),
            ..Default::default()
        },
    };
    Ok(Built {
        name,
        eps,
        truncation,
        object,
    })
}

/// `max(v2(k-1), v2(k+1))` for odd `k ∉ {±1}`.
pub fn dyadic_level(k: i128) -> Option<u32> {
    (k % 2 != 0 && k.abs() != 1).then(|| (k - 1).trailing_zeros().max((k + 1).trailing_zeros()))
}
