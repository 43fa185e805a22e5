//! Quadrature grids on the polar interval (0, L), poles excluded.
//!
//! The midpoint rule matches the finite-difference grid used by the operator
//! assembly and has nominal order 2. Gauss-Legendre (optionally split into
//! panels) is offered for integrals that must hit tight absolute tolerances.

use crate::error::{usage, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadRule {
    Midpoint,
    GaussLegendre { panels: usize },
}

impl QuadRule {
    pub fn gauss() -> Self {
        QuadRule::GaussLegendre { panels: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    length: f64,
    rule: QuadRule,
}

impl ThetaGrid {
    /// Midpoint-offset uniform grid: theta_j = (j - 1/2) L / n, weight L / n.
    pub fn midpoint(n: usize, length: f64) -> Self {
        assert!(n >= 1 && length > 0.0);
        let h = length / n as f64;
        let nodes = (1..=n).map(|j| (j as f64 - 0.5) * h).collect();
        ThetaGrid {
            nodes,
            weights: vec![h; n],
            length,
            rule: QuadRule::Midpoint,
        }
    }

    /// Gauss-Legendre nodes on (0, L), optionally composite over equal panels.
    pub fn gauss(n: usize, length: f64) -> Self {
        Self::with_rule(n, length, QuadRule::gauss()).expect("single panel is always valid")
    }

    pub fn with_rule(n: usize, length: f64, rule: QuadRule) -> Result<Self> {
        assert!(n >= 1 && length > 0.0);
        match rule {
            QuadRule::Midpoint => Ok(Self::midpoint(n, length)),
            QuadRule::GaussLegendre { panels } => {
                if panels == 0 || n % panels != 0 {
                    return Err(usage(format!(
                        "node count {n} not divisible into {panels} Gauss panels"
                    )));
                }
                let per = n / panels;
                let (x, w) = gauss_legendre(per);
                let mut nodes = Vec::with_capacity(n);
                let mut weights = Vec::with_capacity(n);
                let hp = length / panels as f64;
                for p in 0..panels {
                    let a = p as f64 * hp;
                    for i in 0..per {
                        nodes.push(a + 0.5 * hp * (x[i] + 1.0));
                        weights.push(0.5 * hp * w[i]);
                    }
                }
                Ok(ThetaGrid {
                    nodes,
                    weights,
                    length,
                    rule,
                })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn rule(&self) -> QuadRule {
        self.rule
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Uniform spacing, defined for the midpoint rule only.
    pub fn spacing(&self) -> Option<f64> {
        match self.rule {
            QuadRule::Midpoint => Some(self.length / self.n() as f64),
            _ => None,
        }
    }

    /// Order of the refinement-error decay; None for the spectral single panel.
    pub fn nominal_order(&self) -> Option<f64> {
        match self.rule {
            QuadRule::Midpoint => Some(2.0),
            QuadRule::GaussLegendre { panels } if panels > 1 => {
                Some(2.0 * (self.n() / panels) as f64)
            }
            QuadRule::GaussLegendre { .. } => None,
        }
    }

    /// integral of f d(theta) from node samples.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.n());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&t| f(t)).collect()
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for k in 0..m {
        // Tricomi-style initial guess for the k-th positive-side root.
        let mut xi = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_pd(n, xi);
            dp = d;
            let dx = p / d;
            xi -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_pd(n, xi);
                dp = d2;
                xi -= p2 / d2;
                break;
            }
        }
        let wk = 2.0 / ((1.0 - xi * xi) * dp * dp);
        x[k] = -xi;
        w[k] = wk;
        x[n - 1 - k] = xi;
        w[n - 1 - k] = wk;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
        let (_, d) = legendre_pd(n, 0.0);
        w[n / 2] = 2.0 / (d * d);
    }
    (x, w)
}

fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
