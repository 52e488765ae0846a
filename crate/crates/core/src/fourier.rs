//! Poisson-summation transforms of combs and finite atom sets, and tempered
//! objects that carry part of their mass on the transform side.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::comb::{AbsContMeasure, LatticeComb, Pairing, PointWeighting, TrigPolynomial};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rational::{self, Q};
use crate::testfn::TestFunction;

/// Transform of `d(x)·δ_{aZ+o}` with `d = Σ c_j χ_{s_j}`: one comb per term,
/// `(c_j/a) e^{2πi s_j o} χ̄_o · δ_{Z/a + s_j}`.
pub fn fourier_comb(c: &LatticeComb) -> PointWeighting {
    let inv = c.spacing.recip();
    let combs = c
        .density
        .terms
        .iter()
        .map(|t| {
            let coeff = t.coeff * rational::cis(&(t.freq * c.offset)) * rational::to_f64(&inv);
            LatticeComb {
                spacing: inv,
                offset: t.freq,
                density: TrigPolynomial::from_terms([(-c.offset, coeff)]),
            }
        })
        .collect();
    PointWeighting {
        combs,
        ..PointWeighting::default()
    }
}

/// `Σ_j w_j δ_{x_j}` ↦ the density `Σ_j w_j χ̄_{x_j}`.
pub fn fourier_finite(atoms: &[(Q, Complex64)]) -> AbsContMeasure {
    AbsContMeasure::new(TrigPolynomial::from_terms(
        atoms.iter().map(|(x, w)| (-*x, *w)),
    ))
}

/// Inverse of [`fourier_finite`] on the transform side: `Σ c_j χ_{s_j} λ`
/// transforms to `Σ c_j δ_{s_j}`.
pub fn fourier_ac(m: &AbsContMeasure) -> PointWeighting {
    PointWeighting::from_atoms(m.density.terms.iter().map(|t| (t.freq, t.coeff)))
}

/// `direct + ac·λ + (dual)^`, where the last summand is only ever evaluated
/// through `dual(f̂)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TemperedObject {
    #[serde(default)]
    pub direct: PointWeighting,
    #[serde(default)]
    pub ac: AbsContMeasure,
    #[serde(default)]
    pub dual: PointWeighting,
}

impl TemperedObject {
    pub fn direct(w: PointWeighting) -> Self {
        Self {
            direct: w,
            ..Self::default()
        }
    }

    pub fn transform_of(w: PointWeighting) -> Self {
        Self {
            dual: w,
            ..Self::default()
        }
    }

    pub fn absolutely_continuous(m: AbsContMeasure) -> Self {
        Self {
            ac: m,
            ..Self::default()
        }
    }

    pub fn has_dual(&self) -> bool {
        !self.dual.is_empty()
    }

    pub fn pair(&self, f: &TestFunction, tol: f64) -> Result<Pairing> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let share = tol / 2.0;
        let mut out = Pairing::exact(self.ac.pair(f));
        if !self.direct.is_empty() {
            out = out + self.direct.pair_direct(f, share)?;
        }
        if !self.dual.is_empty() {
            out = out + self.dual.pair_direct(&f.fourier(), share)?;
        }
        Ok(out)
    }

    pub fn pair_many(
        &self,
        probes: &[TestFunction],
        tol: f64,
        exec: Execution,
    ) -> Result<Vec<Pairing>> {
        exec.map(probes, |f| self.pair(f, tol))
            .into_iter()
            .collect()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            direct: self.direct.scale(a),
            ac: AbsContMeasure::new(self.ac.density.scale(a)),
            dual: self.dual.scale(a),
        }
    }

    pub fn scale_add(a: Complex64, x: &Self, b: Complex64, y: &Self) -> Self {
        Self {
            direct: PointWeighting::scale_add(a, &x.direct, b, &y.direct),
            ac: AbsContMeasure::new(x.ac.density.scale(a).add(&y.ac.density.scale(b))),
            dual: PointWeighting::scale_add(a, &x.dual, b, &y.dual),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::scale_add(one, self, one, other)
    }

    /// `T_t`: `f ↦ obj(f(· + t))`; the dual part picks up the character `χ_t`.
    pub fn translate(&self, t: &Q) -> Self {
        Self {
            direct: self.direct.translate(t),
            ac: AbsContMeasure::new(self.ac.density.shift(t)),
            dual: self.dual.modulate(&TrigPolynomial::character(*t)),
        }
    }

    /// Distributional transform: `(D + aλ + P̂)^ = P(-·) + â + D̂`.
    pub fn fourier(&self) -> Self {
        let mut direct = self.dual.reflect();
        direct.extend(fourier_ac(&self.ac));
        Self {
            direct: direct.prune(),
            ac: AbsContMeasure::default(),
            dual: self.direct.clone(),
        }
    }

    /// Moves whatever has a closed-form transform from the dual side to the
    /// direct side; towers move only when their cosine side decays.
    pub fn normalized(&self) -> Self {
        let mut out = Self {
            direct: self.direct.clone(),
            ac: self.ac.clone(),
            dual: PointWeighting::empty(),
        };
        let finite: Vec<(Q, Complex64)> = self
            .dual
            .finite_atoms
            .iter()
            .map(|a| (a.pos, a.weight))
            .collect();
        if !finite.is_empty() {
            out.ac = AbsContMeasure::new(out.ac.density.add(&fourier_finite(&finite).density));
        }
        for c in &self.dual.combs {
            out.direct.extend(fourier_comb(c));
        }
        for t in &self.dual.towers {
            match t.fourier() {
                Ok(ft) if t.weight.decays() || t.n_max.is_some() => out.direct.towers.push(ft),
                _ => out.dual.towers.push(t.clone()),
            }
        }
        out
    }

    /// Pairing with every real probe is real within `tol`.
    pub fn is_real_on(&self, probes: &[TestFunction], tol: f64) -> Result<bool> {
        for f in probes.iter().filter(|f| f.is_real()) {
            if self.pair(f, tol)?.value.im.abs() > 2.0 * tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero(&self) -> bool {
        self.direct.is_empty() && self.ac.is_zero() && self.dual.is_empty()
    }
}

/// Transform of a point weighting as a tempered object: combs and towers map
/// to combs and towers, finite atoms to a trigonometric density.
pub fn fourier_weighting(w: &PointWeighting) -> Result<TemperedObject> {
    let mut direct = PointWeighting::empty();
    for c in &w.combs {
        direct.extend(fourier_comb(c));
    }
    for t in &w.towers {
        direct.towers.push(t.fourier()?);
    }
    let atoms: Vec<(Q, Complex64)> = w.finite_atoms.iter().map(|a| (a.pos, a.weight)).collect();
    Ok(TemperedObject {
        direct,
        ac: fourier_finite(&atoms),
        dual: PointWeighting::empty(),
    })
}
