//! Ordinary least squares for low-degree polynomial trends.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyFit {
    /// Coefficients of `1, x, x², …`.
    pub coeffs: Vec<f64>,
    /// Standard errors of the coefficients.
    pub std_errors: Vec<f64>,
    pub residual_rms: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn intercept(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn slope(&self) -> f64 {
        self.coeffs.get(1).copied().unwrap_or(0.0)
    }
}

/// Fits `y ≈ Σ_{i ≤ degree} c_i x^i`.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    let m = degree + 1;
    if xs.len() != ys.len() || xs.len() < m {
        return Err(Error::InvalidParameter(format!(
            "need at least {m} points for a degree-{degree} fit"
        )));
    }
    let mut ata = vec![vec![0.0; m]; m];
    let mut aty = vec![0.0; m];
    for (&x, &y) in xs.iter().zip(ys) {
        let row: Vec<f64> = (0..m).map(|i| x.powi(i as i32)).collect();
        for i in 0..m {
            aty[i] += row[i] * y;
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let inv =
        invert(&ata).ok_or_else(|| Error::InvalidParameter("degenerate fit design".into()))?;
    let coeffs: Vec<f64> = (0..m)
        .map(|i| (0..m).map(|j| inv[i][j] * aty[j]).sum())
        .collect();
    let fit = PolyFit {
        coeffs,
        std_errors: Vec::new(),
        residual_rms: 0.0,
    };
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - fit.eval(x)).powi(2))
        .sum();
    let dof = xs.len() - m;
    let sigma2 = if dof > 0 { sse / dof as f64 } else { 0.0 };
    Ok(PolyFit {
        std_errors: (0..m)
            .map(|i| (sigma2 * inv[i][i]).max(0.0).sqrt())
            .collect(),
        residual_rms: (sse / xs.len() as f64).sqrt(),
        ..fit
    })
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        m[col].iter_mut().for_each(|v| *v /= p);
        for i in 0..n {
            if i != col {
                let factor = m[i][col];
                let pivot_row = m[col].clone();
                m[i].iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(v, w)| *v -= factor * w);
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomials() {
        let xs = [0.0, 0.5, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 2.0 * x + 0.25 * x * x).collect();
        let fit = polyfit(&xs, &ys, 2).unwrap();
        for (c, e) in fit.coeffs.iter().zip([1.5, -2.0, 0.25]) {
            assert!((c - e).abs() < 1e-12);
        }
        assert!(fit.residual_rms < 1e-12);
        assert!(polyfit(&xs[..2], &ys[..2], 2).is_err());
    }

    #[test]
    fn standard_error_of_noisy_line() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| 3.0 + x + if i % 2 == 0 { 0.1 } else { -0.1 })
            .collect();
        let fit = polyfit(&xs, &ys, 1).unwrap();
        assert!((fit.slope() - 1.0).abs() < 0.01);
        assert!(fit.std_errors[0] > 0.0 && fit.std_errors[0] < 0.1);
    }
}
