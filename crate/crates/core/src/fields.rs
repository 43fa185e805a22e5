//! Closed-form axisymmetric fields on the sphere.
//!
//! Everything here is a function of the polar angle only, expressed in the
//! normalized coordinate u = theta / scale so the same coefficients describe
//! the same shape on any scaled profile. The family
//!     (sum_k s_k sin^k u) * (sum_j c_j cos^j u)
//! covers the extrinsic-data components used throughout (beta = b sin^2,
//! azimuthal X profiles, random potentials) and differentiates analytically.

use crate::dual::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    /// Coefficient of sin^k(u), k = index (power 0 allowed).
    pub sin_coeffs: Vec<f64>,
    /// Multiplier polynomial in cos(u); empty means 1.
    pub cos_coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly { sin_coeffs: Vec::new(), cos_coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly { sin_coeffs: vec![c], cos_coeffs: Vec::new() }
    }

    /// b * sin^k(u)
    pub fn sin_power(k: usize, b: f64) -> Self {
        let mut s = vec![0.0; k + 1];
        s[k] = b;
        TrigPoly { sin_coeffs: s, cos_coeffs: Vec::new() }
    }

    pub fn new(sin_coeffs: Vec<f64>, cos_coeffs: Vec<f64>) -> Self {
        TrigPoly { sin_coeffs, cos_coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.sin_coeffs.iter().all(|&c| c == 0.0)
            || (self.sin_coeffs.is_empty() && self.cos_coeffs.is_empty())
    }

    fn sin_part(&self, s: f64) -> f64 {
        self.sin_coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    fn cos_part(&self, c: f64) -> f64 {
        if self.cos_coeffs.is_empty() {
            1.0
        } else {
            self.cos_coeffs.iter().rev().fold(0.0, |acc, &ck| acc * c + ck)
        }
    }

    /// Value at the normalized angle u.
    pub fn eval_u(&self, u: f64) -> f64 {
        if self.sin_coeffs.is_empty() {
            return 0.0;
        }
        self.sin_part(u.sin()) * self.cos_part(u.cos())
    }

    /// d/du at the normalized angle u.
    pub fn deriv_u(&self, u: f64) -> f64 {
        if self.sin_coeffs.is_empty() {
            return 0.0;
        }
        let (s, c) = (u.sin(), u.cos());
        let sp = self.sin_part(s);
        let cp = self.cos_part(c);
        let dsp: f64 = self
            .sin_coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &ck)| ck * k as f64 * s.powi(k as i32 - 1))
            .sum();
        let dcp: f64 = if self.cos_coeffs.is_empty() {
            0.0
        } else {
            self.cos_coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &cj)| cj * j as f64 * c.powi(j as i32 - 1))
                .sum()
        };
        dsp * c * cp + sp * dcp * (-s)
    }
}

/// alpha(t) as a plain polynomial, evaluated generically so the graph kernels
/// can differentiate through the height dependence.
pub fn poly_eval<T: Real>(coeffs: &[f64], t: T) -> T {
    let mut acc = T::constant(0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * t + T::constant(c);
    }
    acc
}

pub fn poly_deriv_coeffs(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}
