//! Weighted point sets on the line: lattice combs with trigonometric
//! densities, finite atoms, and tower families.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfamily::TowerFamily;
use crate::rational::{self, serde_q, Q};
use crate::testfn::{complex_pair, TestFunction};

/// Relative cancellation below which an aggregated weight counts as zero.
const CANCELLATION: f64 = 1e-12;
/// Relative size below which a trigonometric density value is rounding noise.
pub(crate) const NOISE: f64 = 1e-14;
/// Largest atom count a single enumeration may produce.
pub const ENUMERATION_LIMIT: u64 = 50_000_000;

/// Closed window `[lo, hi]` with exact endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: Q,
    pub hi: Q,
}

impl Window {
    pub fn new(lo: Q, hi: Q) -> Result<Self> {
        if lo > hi {
            return Err(Error::WindowReversed {
                lo: rational::to_f64(&lo),
                hi: rational::to_f64(&hi),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn from_f64(lo: f64, hi: f64) -> Result<Self> {
        Self::new(rational::from_f64(lo)?, rational::from_f64(hi)?)
    }

    pub fn symmetric(radius: i128) -> Self {
        Self {
            lo: rational::qi(-radius),
            hi: rational::qi(radius),
        }
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn radius(&self) -> Q {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn reflect(&self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational::format(&self.lo),
            rational::format(&self.hi)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    #[serde(with = "serde_q")]
    pub freq: Q,
    #[serde(with = "complex_pair")]
    pub coeff: Complex64,
}

/// `Σ_j c_j e^{2πi s_j x}` with rational frequencies.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPolynomial {
    pub terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    pub fn constant(c: Complex64) -> Self {
        Self {
            terms: vec![TrigTerm {
                freq: Q::zero(),
                coeff: c,
            }],
        }
        .normalized()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn character(freq: Q) -> Self {
        Self {
            terms: vec![TrigTerm {
                freq,
                coeff: Complex64::new(1.0, 0.0),
            }],
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Q, Complex64)>) -> Self {
        Self {
            terms: terms
                .into_iter()
                .map(|(freq, coeff)| TrigTerm { freq, coeff })
                .collect(),
        }
        .normalized()
    }

    /// Merges equal frequencies, drops zero coefficients, sorts by frequency.
    pub fn normalized(mut self) -> Self {
        let mut map: BTreeMap<Q, Complex64> = BTreeMap::new();
        for t in self.terms.drain(..) {
            *map.entry(t.freq).or_default() += t.coeff;
        }
        Self {
            terms: map
                .into_iter()
                .filter(|(_, c)| c.norm() > 0.0)
                .map(|(freq, coeff)| TrigTerm { freq, coeff })
                .collect(),
        }
    }

    pub fn evaluate(&self, x: &Q) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * rational::cis(&(t.freq * x)))
            .sum()
    }

    pub fn evaluate_f64(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                t.coeff
                    * Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * rational::to_f64(&t.freq) * x,
                    )
            })
            .sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| TrigTerm {
                    freq: t.freq,
                    coeff: t.coeff * c,
                })
                .collect(),
        }
        .normalized()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        }
        .normalized()
    }

    pub fn multiply(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(TrigTerm {
                    freq: a.freq + b.freq,
                    coeff: a.coeff * b.coeff,
                });
            }
        }
        Self { terms }.normalized()
    }

    /// `x ↦ p(x - t)`.
    pub fn shift(&self, t: &Q) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|term| TrigTerm {
                    freq: term.freq,
                    coeff: term.coeff * rational::cis(&-(term.freq * t)),
                })
                .collect(),
        }
    }

    /// `x ↦ conj(p(x))`.
    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| (-t.freq, t.coeff.conj())))
    }

    /// `x ↦ p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| (-t.freq, t.coeff)))
    }

    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.as_slice() {
            [] => Some(Complex64::new(0.0, 0.0)),
            [t] if t.freq.is_zero() => Some(t.coeff),
            _ => None,
        }
    }

    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Real iff the coefficient at `-s` is the conjugate of the one at `s`.
    pub fn is_real(&self) -> bool {
        let c = self.conj();
        self.terms.len() == c.terms.len()
            && self.terms.iter().zip(&c.terms).all(|(a, b)| {
                a.freq == b.freq && (a.coeff - b.coeff).norm() <= 1e-14 * (1.0 + a.coeff.norm())
            })
    }

    /// Folds frequencies into `[0, period)`; equal on the lattice `Z/period`.
    pub fn reduced_mod(&self, period: &Q) -> Self {
        Self::from_terms(self.terms.iter().map(|t| {
            let f = t.freq - period * (t.freq / period).floor();
            (f, t.coeff)
        }))
    }

    /// Period (in lattice steps) of `j ↦ p(spacing·j + offset)`.
    pub fn lattice_period(&self, spacing: &Q) -> i128 {
        self.terms.iter().fold(1i128, |acc, t| {
            acc.lcm(rational::frac(&(t.freq * spacing)).denom())
        })
    }
}

/// `density(x) · δ_{spacing·Z + offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeComb {
    #[serde(with = "serde_q")]
    pub spacing: Q,
    #[serde(with = "serde_q")]
    pub offset: Q,
    pub density: TrigPolynomial,
}

impl LatticeComb {
    pub fn new(spacing: Q, offset: Q, density: TrigPolynomial) -> Result<Self> {
        if spacing <= Q::zero() {
            return Err(Error::InvalidParameter(format!(
                "comb spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self {
            spacing,
            offset,
            density,
        })
    }

    /// Unit-weight comb `δ_{spacing·Z + offset}`.
    pub fn uniform(spacing: Q, offset: Q) -> Result<Self> {
        Self::new(spacing, offset, TrigPolynomial::one())
    }

    pub fn enumerate_into(&self, w: &Window, out: &mut Vec<(Q, Complex64)>) -> Result<()> {
        let first = ((w.lo - self.offset) / self.spacing).ceil().to_integer();
        let last = ((w.hi - self.offset) / self.spacing)
            .floor()
            .to_integer();
        if last < first {
            return Ok(());
        }
        check_count((last - first + 1) as u64)?;
        // constant densities are common; skip the phase evaluation for them
        let constant = self.density.as_constant();
        let floor = NOISE * self.density.sup_bound();
        for j in first..=last {
            let x = self.offset + self.spacing * Q::from_integer(j);
            match constant {
                Some(v) => out.push((x, v)),
                None => {
                    let v = self.density.evaluate(&x);
                    if v.norm() > floor {
                        out.push((x, v));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &Q) -> bool {
        ((x - self.offset) / self.spacing).is_integer()
    }

    pub fn translate(&self, t: &Q) -> Self {
        Self {
            spacing: self.spacing,
            offset: self.offset + t,
            density: self.density.shift(t),
        }
    }

    /// Canonical offset in `[0, spacing)`.
    pub fn reduced_offset(&self) -> Q {
        self.offset - self.spacing * (self.offset / self.spacing).floor()
    }

    /// Splits the comb into sub-combs on which the density is constant.
    pub fn constant_pieces(&self) -> Result<Vec<(LatticeComb, Complex64)>> {
        let period = self.density.lattice_period(&self.spacing);
        if period > 100_000 {
            return Err(Error::Unsupported(format!(
                "density period {period} too long to split"
            )));
        }
        let big = self.spacing * Q::from_integer(period);
        Ok((0..period)
            .map(|r| {
                let off = self.offset + self.spacing * Q::from_integer(r);
                let val = self.density.evaluate(&off);
                (
                    LatticeComb {
                        spacing: big,
                        offset: off,
                        density: TrigPolynomial::one(),
                    },
                    val,
                )
            })
            .collect())
    }

    /// Pointwise product `self · other` (support is the intersection).
    pub fn intersect(&self, other: &LatticeComb) -> Option<LatticeComb> {
        let den = self
            .spacing
            .denom()
            .lcm(other.spacing.denom())
            .lcm(self.offset.denom())
            .lcm(other.offset.denom());
        let to_int = |x: &Q| (x * Q::from_integer(den)).to_integer();
        let (a, o1, b, o2) = (
            to_int(&self.spacing),
            to_int(&self.offset),
            to_int(&other.spacing),
            to_int(&other.offset),
        );
        let eg = a.extended_gcd(&b);
        let g = eg.gcd;
        if (o2 - o1).mod_floor(&g) != 0 {
            return None;
        }
        let l = a / g * b;
        // x = o1 + a·t with a·t ≡ o2 - o1 (mod b)
        let t = ((o2 - o1) / g).mod_floor(&(b / g)) * eg.x.mod_floor(&(b / g));
        let x0 = (o1 + a * (t.mod_floor(&(b / g)))).mod_floor(&l);
        Some(LatticeComb {
            spacing: Q::new(l, den),
            offset: Q::new(x0, den),
            density: self.density.multiply(&other.density),
        })
    }

    /// The same comb written on the finer lattice `fine·Z` (with `fine | spacing`
    /// and `fine | offset`), using the indicator `(1/k) Σ_{j<k} χ_{j/a}(x - o)`.
    pub fn refine(&self, fine: &Q) -> Result<LatticeComb> {
        let k = self.spacing / fine;
        if !k.is_integer() || !(self.offset / fine).is_integer() {
            return Err(Error::Incommensurate(
                rational::format(&self.spacing),
                rational::format(fine),
            ));
        }
        let k = k.to_integer();
        if k > 1_000_000 {
            return Err(Error::Unsupported(format!("refinement by {k} is too fine")));
        }
        let indicator = TrigPolynomial::from_terms((0..k).map(|j| {
            let freq = Q::from_integer(j) / self.spacing;
            (freq, rational::cis(&-(freq * self.offset)) / k as f64)
        }));
        Ok(LatticeComb {
            spacing: *fine,
            offset: Q::zero(),
            density: self.density.multiply(&indicator),
        })
    }

    /// True when every point of `Z` lies on the comb.
    pub fn covers_integers(&self) -> bool {
        (Q::one() / self.spacing).is_integer() && (self.offset / self.spacing).is_integer()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "serde_q")]
    pub pos: Q,
    #[serde(rename = "w", with = "complex_pair")]
    pub weight: Complex64,
}

/// A symbolic weighted point set: finite atoms, lattice combs and tower
/// families. Components may overlap; weights aggregate on enumeration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointWeighting {
    #[serde(default)]
    pub finite_atoms: Vec<Atom>,
    #[serde(default)]
    pub combs: Vec<LatticeComb>,
    #[serde(default)]
    pub towers: Vec<TowerFamily>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pairing {
    pub value: Complex64,
    pub error_bound: f64,
}

impl Pairing {
    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            error_bound: 0.0,
        }
    }
}

impl std::ops::Add for Pairing {
    type Output = Pairing;
    fn add(self, o: Pairing) -> Pairing {
        Pairing {
            value: self.value + o.value,
            error_bound: self.error_bound + o.error_bound,
        }
    }
}

/// Window-certified structural property.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub window: Window,
    pub holds: bool,
    pub counterexample: Option<Q>,
    pub structural: Option<String>,
}

impl PointWeighting {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_comb(c: LatticeComb) -> Self {
        Self {
            combs: vec![c],
            ..Self::default()
        }
    }

    pub fn from_tower(t: TowerFamily) -> Self {
        Self {
            towers: vec![t],
            ..Self::default()
        }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = (Q, Complex64)>) -> Self {
        Self {
            finite_atoms: atoms
                .into_iter()
                .map(|(pos, weight)| Atom { pos, weight })
                .collect(),
            ..Self::default()
        }
    }

    /// `δ_{spacing·Z + offset}`.
    pub fn lattice(spacing: Q, offset: Q) -> Self {
        Self::from_comb(
            LatticeComb::uniform(spacing, offset).expect("caller passes positive spacing"),
        )
    }

    pub fn dirac(pos: Q) -> Self {
        Self::from_atoms([(pos, Complex64::new(1.0, 0.0))])
    }

    pub fn is_empty(&self) -> bool {
        self.finite_atoms.is_empty() && self.combs.is_empty() && self.towers.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.combs.is_empty() && self.towers.is_empty()
    }

    /// Sorted, aggregated atoms in the window with exact positions.
    pub fn enumerate(&self, w: &Window) -> Result<Vec<(Q, Complex64)>> {
        let mut raw = Vec::new();
        for a in &self.finite_atoms {
            if w.contains(&a.pos) {
                raw.push((a.pos, a.weight));
            }
        }
        for c in &self.combs {
            c.enumerate_into(w, &mut raw)?;
        }
        for t in &self.towers {
            t.enumerate_into(w, &mut raw)?;
        }
        Ok(aggregate(raw))
    }

    /// Aggregated weight at one position.
    pub fn weight_at(&self, x: &Q) -> Result<Complex64> {
        let w = Window { lo: *x, hi: *x };
        Ok(self
            .enumerate(&w)?
            .first()
            .map(|(_, v)| *v)
            .unwrap_or_default())
    }

    /// `Σ_x weight(x) f(x)` over exactly the atoms in the window.
    pub fn pair_on_window(&self, f: &TestFunction, w: &Window) -> Result<Complex64> {
        Ok(self
            .enumerate(w)?
            .iter()
            .map(|(x, v)| v * f.evaluate(rational::to_f64(x)))
            .sum())
    }

    /// Pairing `Σ_x weight(x) f(x)` with a certified truncation bound `≤ tol`.
    pub fn pair_direct(&self, f: &TestFunction, tol: f64) -> Result<Pairing> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if self.is_empty() || f.atoms.is_empty() {
            return Ok(Pairing::exact(Complex64::new(0.0, 0.0)));
        }
        let parts = (self.combs.len() + self.towers.len()).max(1) as f64;
        // cosine towers are truncated where their Poisson tail drops below budget
        let mut truncated = self.clone();
        let mut trunc_bound = 0.0;
        for t in &mut truncated.towers {
            let (n_eff, bound) = t.direct_truncation(f, tol / (4.0 * parts))?;
            t.n_max = n_eff;
            trunc_bound += bound;
        }
        if truncated
            .towers
            .iter()
            .any(|t| t.n_max.is_some_and(|n| n < t.n_min))
        {
            truncated
                .towers
                .retain(|t| t.n_max.is_none_or(|n| n >= t.n_min));
        }
        let (clo, chi) = f.center_range();
        let budget = tol / 2.0 - trunc_bound;
        if budget <= 0.0 {
            return Err(Error::NonConvergence(
                "tower truncation consumed the tolerance".into(),
            ));
        }
        let width = f.atoms.iter().map(|a| a.width).fold(0.0, f64::max);
        let mut r = width;
        let mut tail = truncated.window_tail(f, clo - r, chi + r)?;
        let mut steps = 0;
        while tail > budget {
            r += 0.5 * width;
            tail = truncated.window_tail(f, clo - r, chi + r)?;
            steps += 1;
            if steps > 400 || !tail.is_finite() {
                return Err(Error::NonConvergence(format!(
                    "no finite tail bound against the probe (tail {tail:e})"
                )));
            }
        }
        let mut lo = rational::from_f64(((clo - r) * 1e6).floor() / 1e6)?;
        let mut hi = rational::from_f64(((chi + r) * 1e6).ceil() / 1e6)?;
        for a in &truncated.finite_atoms {
            lo = lo.min(a.pos);
            hi = hi.max(a.pos);
        }
        let value = truncated.pair_on_window(f, &Window::new(lo, hi)?)?;
        Ok(Pairing {
            value,
            error_bound: tail + trunc_bound,
        })
    }

    /// Bound on the contribution of atoms outside `[lo, hi]`.
    fn window_tail(&self, f: &TestFunction, lo: f64, hi: f64) -> Result<f64> {
        let mut tail = 0.0;
        for c in &self.combs {
            tail += c.density.sup_bound() * f.lattice_tail(rational::to_f64(&c.spacing), lo, hi);
        }
        for t in &self.towers {
            tail += t.window_tail(f, lo, hi)?;
        }
        Ok(tail)
    }

    pub fn translate(&self, t: &Q) -> Self {
        Self {
            finite_atoms: self
                .finite_atoms
                .iter()
                .map(|a| Atom {
                    pos: a.pos + t,
                    weight: a.weight,
                })
                .collect(),
            combs: self.combs.iter().map(|c| c.translate(t)).collect(),
            towers: self.towers.iter().map(|tw| tw.translate(t)).collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            finite_atoms: self
                .finite_atoms
                .iter()
                .map(|x| Atom {
                    pos: x.pos,
                    weight: x.weight * a,
                })
                .collect(),
            combs: self
                .combs
                .iter()
                .map(|c| LatticeComb {
                    density: c.density.scale(a),
                    ..c.clone()
                })
                .collect(),
            towers: self.towers.iter().map(|t| t.scale(a)).collect(),
        }
    }

    /// Multiplies every weight by the trigonometric polynomial `p(x)`.
    pub fn modulate(&self, p: &TrigPolynomial) -> Self {
        Self {
            finite_atoms: self
                .finite_atoms
                .iter()
                .map(|x| Atom {
                    pos: x.pos,
                    weight: x.weight * p.evaluate(&x.pos),
                })
                .collect(),
            combs: self
                .combs
                .iter()
                .map(|c| LatticeComb {
                    density: c.density.multiply(p),
                    ..c.clone()
                })
                .collect(),
            towers: self.towers.iter().map(|t| t.modulate(p)).collect(),
        }
    }

    /// `a·w1 + b·w2`.
    pub fn scale_add(a: Complex64, w1: &Self, b: Complex64, w2: &Self) -> Self {
        let mut out = w1.scale(a);
        out.extend(w2.scale(b));
        out.prune()
    }

    pub fn extend(&mut self, other: Self) {
        self.finite_atoms.extend(other.finite_atoms);
        self.combs.extend(other.combs);
        self.towers.extend(other.towers);
    }

    /// Drops components whose weights vanish identically.
    pub fn prune(mut self) -> Self {
        self.finite_atoms.retain(|a| a.weight.norm() > 0.0);
        self.combs.retain(|c| !c.density.terms.is_empty());
        self.towers.retain(|t| !t.is_zero());
        self
    }

    /// Position negation `x ↦ -x` (weights travel with their atoms).
    pub fn reflect(&self) -> Self {
        Self {
            finite_atoms: self
                .finite_atoms
                .iter()
                .map(|a| Atom {
                    pos: -a.pos,
                    weight: a.weight,
                })
                .collect(),
            combs: self
                .combs
                .iter()
                .map(|c| LatticeComb {
                    spacing: c.spacing,
                    offset: -c.offset,
                    density: c.density.reflect(),
                })
                .collect(),
            towers: self.towers.iter().map(TowerFamily::reflect).collect(),
        }
    }

    /// `weight(-x) = conj(weight(x))` on the window.
    pub fn is_real_on(&self, w: &Window) -> Result<Certificate> {
        self.check_mirror(w, |a, b| (a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()))
    }

    /// `weight(-x) = weight(x)` on the window.
    pub fn is_symmetric_on(&self, w: &Window) -> Result<Certificate> {
        self.check_mirror(w, |a, b| (a - b).norm() <= 1e-12 * (1.0 + a.norm()))
    }

    fn check_mirror(
        &self,
        w: &Window,
        same: impl Fn(Complex64, Complex64) -> bool,
    ) -> Result<Certificate> {
        let sym = Window {
            lo: -w.radius(),
            hi: w.radius(),
        };
        let atoms = self.enumerate(&sym)?;
        let map: BTreeMap<Q, Complex64> = atoms.iter().cloned().collect();
        let zero = Complex64::new(0.0, 0.0);
        let bad = atoms
            .iter()
            .find(|(x, v)| !same(*v, *map.get(&-*x).unwrap_or(&zero)))
            .map(|(x, _)| *x);
        Ok(Certificate {
            window: sym,
            holds: bad.is_none(),
            counterexample: bad,
            structural: None,
        })
    }

    /// All aggregated weights real and nonnegative on the window.
    pub fn is_positive_on(&self, w: &Window) -> Result<Certificate> {
        let bad = self
            .enumerate(w)?
            .into_iter()
            .find(|(_, v)| v.re < 0.0 || v.im.abs() > 1e-12 * (1.0 + v.re.abs()))
            .map(|(x, _)| x);
        let structural = if self.finite_atoms.is_empty()
            && self.towers.is_empty()
            && self.combs.iter().all(|c| {
                c.density
                    .as_constant()
                    .is_some_and(|v| v.re > 0.0 && v.im == 0.0)
            }) {
            Some("lattice combs with constant positive density".to_string())
        } else {
            None
        };
        Ok(Certificate {
            window: w.clone(),
            holds: bad.is_none(),
            counterexample: bad,
            structural,
        })
    }

    /// Least common denominator of every position, when bounded.
    pub fn position_denominator(&self) -> Option<i128> {
        let mut d = 1i128;
        for a in &self.finite_atoms {
            d = d.lcm(a.pos.denom());
        }
        for c in &self.combs {
            d = d.lcm(c.spacing.denom()).lcm(c.offset.denom());
        }
        for t in &self.towers {
            d = d.lcm(&t.position_denominator()?);
        }
        Some(d)
    }

    /// Rewrites a finite sum of combs and finitely-layered towers as one comb
    /// on a common lattice.
    pub fn periodic_comb(&self) -> Result<LatticeComb> {
        if !self.finite_atoms.is_empty() {
            return Err(Error::Aperiodic("finite atoms are not periodic".into()));
        }
        let mut combs = self.combs.clone();
        for t in &self.towers {
            combs.extend(t.to_combs()?);
        }
        let Some(first) = combs.first() else {
            return Err(Error::InvalidParameter(
                "empty weighting has no period".into(),
            ));
        };
        let mut fine = first.spacing;
        for c in &combs {
            fine = rational::gcd(&fine, &c.spacing);
            if !c.offset.is_zero() {
                fine = rational::gcd(&fine, &c.offset);
            }
        }
        let mut density = TrigPolynomial::default();
        for c in &combs {
            density = density.add(&c.refine(&fine)?.density);
        }
        Ok(LatticeComb {
            spacing: fine,
            offset: Q::zero(),
            density: density.reduced_mod(&fine.recip()),
        })
    }

    /// Translation-bound style constant: sup of `|weights|` summed per unit
    /// interval, estimated on the window.
    pub fn sup_weight_on(&self, w: &Window) -> Result<f64> {
        Ok(self
            .enumerate(w)?
            .iter()
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn check_count(n: u64) -> Result<()> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::WindowTooLarge {
            needed: n,
            budget: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn aggregate(mut raw: Vec<(Q, Complex64)>) -> Vec<(Q, Complex64)> {
    raw.sort_by_key(|a| a.0);
    let mut out: Vec<(Q, Complex64, f64)> = Vec::with_capacity(raw.len());
    for (x, v) in raw {
        match out.last_mut() {
            Some(last) if last.0 == x => {
                last.1 += v;
                last.2 = last.2.max(v.norm());
            }
            _ => out.push((x, v, v.norm())),
        }
    }
    out.into_iter()
        .filter(|(_, v, m)| v.norm() > CANCELLATION * m)
        .map(|(x, v, _)| (x, v))
        .collect()
}

/// Absolutely continuous measure `density · λ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbsContMeasure {
    pub density: TrigPolynomial,
}

impl AbsContMeasure {
    pub fn new(density: TrigPolynomial) -> Self {
        Self { density }
    }

    pub fn lebesgue() -> Self {
        Self::new(TrigPolynomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.density.terms.is_empty()
    }

    /// `∫ density · f = Σ_j c_j f̂(-s_j)`.
    pub fn pair(&self, f: &TestFunction) -> Complex64 {
        let fh = f.fourier();
        self.density
            .terms
            .iter()
            .map(|t| t.coeff * fh.evaluate(-rational::to_f64(&t.freq)))
            .sum()
    }

    pub fn density_at(&self, x: f64) -> Complex64 {
        self.density.evaluate_f64(x)
    }
}

/// A positive, centrally symmetric pure point measure certified on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    pub weighting: PointWeighting,
    pub window: Window,
    pub notes: Vec<String>,
}

/// Window used when certifying spectral measures unless told otherwise.
pub const DEFAULT_CERTIFICATION_RADIUS: i128 = 64;

impl SpectralMeasure {
    pub fn new(weighting: PointWeighting) -> Result<Self> {
        Self::certify(weighting, Window::symmetric(DEFAULT_CERTIFICATION_RADIUS))
    }

    /// Checks positivity and central symmetry on the window and per tower
    /// layer; layers whose weight vanishes are excluded with a note.
    pub fn certify(mut weighting: PointWeighting, window: Window) -> Result<Self> {
        let mut notes = Vec::new();
        for (i, t) in weighting.towers.iter_mut().enumerate() {
            for n in t.layer_sign_scan()? {
                match n {
                    crate::lfamily::LayerSign::Vanishing(n) => {
                        notes.push(format!(
                            "tower {i}: layer n={n} has zero weight and is absent from the support"
                        ));
                        if !t.exclude.contains(&n) {
                            t.exclude.push(n);
                        }
                    }
                    crate::lfamily::LayerSign::Negative(n) => {
                        return Err(Error::Spectrum(format!(
                            "tower {i}: layer n={n} has negative weight"
                        )));
                    }
                }
            }
        }
        let pos = weighting.is_positive_on(&window)?;
        if !pos.holds {
            return Err(Error::Spectrum(format!(
                "weight at {} is not positive (window {})",
                pos.counterexample
                    .map(|x| rational::format(&x))
                    .unwrap_or_default(),
                window
            )));
        }
        let sym = weighting.is_symmetric_on(&window)?;
        if !sym.holds {
            return Err(Error::Spectrum(format!(
                "not centrally symmetric at {} (window {})",
                sym.counterexample
                    .map(|x| rational::format(&x))
                    .unwrap_or_default(),
                window
            )));
        }
        Ok(Self {
            weighting,
            window,
            notes,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.weighting.is_finite()
    }
}

/// `S = {k : γ̂(k) > 0}` as a unit-weight point set; lattice and tower
/// structure is preserved.
pub fn supporting_set(m: &SpectralMeasure) -> Result<PointWeighting> {
    let w = &m.weighting;
    let mut out = PointWeighting::empty();
    for a in &w.finite_atoms {
        if a.weight.re > 0.0 {
            out.finite_atoms.push(Atom {
                pos: a.pos,
                weight: Complex64::new(1.0, 0.0),
            });
        }
    }
    for c in &w.combs {
        if let Some(v) = c.density.as_constant() {
            if v.re > 0.0 {
                out.combs.push(LatticeComb {
                    density: TrigPolynomial::one(),
                    ..c.clone()
                });
            }
            continue;
        }
        for (piece, v) in c.constant_pieces()? {
            if v.re > 1e-14 {
                out.combs.push(piece);
            }
        }
    }
    for t in &w.towers {
        out.towers.push(t.support()?);
    }
    let check = out.enumerate(&m.window)?;
    if let Some((x, v)) = check
        .iter()
        .find(|(_, v)| (v - Complex64::new(1.0, 0.0)).norm() > 1e-12)
    {
        return Err(Error::Unsupported(format!(
            "overlapping spectral components: support multiplicity {} at {}",
            v.re,
            rational::format(x)
        )));
    }
    Ok(out)
}
