//! Surface geometry of a rotationally symmetric sphere: curvature, area,
//! the Gauss-Bonnet defect as a discretization probe, and axisymmetric
//! graph surfaces t = f(theta) sampled on a grid.

use crate::error::{domain, numerical, usage, Result};
use crate::grid::ThetaGrid;
use crate::profile::MetricProfile;
use crate::util::fd_weights;

/// kappa(theta_j) = -rho''(theta_j) / rho(theta_j).
pub fn gaussian_curvature(m: &MetricProfile, grid: &ThetaGrid) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.n());
    for (j, &t) in grid.nodes().iter().enumerate() {
        let k = -m.rho_d2(t) / m.rho(t);
        if !k.is_finite() {
            return Err(numerical(format!(
                "curvature not finite at node {j} (theta = {t:.6}); \
                 for tabulated profiles try an analytic preset or a finer table"
            )));
        }
        out.push(k);
    }
    Ok(out)
}

/// Surface area 2 pi * integral of rho d(theta).
pub fn area(m: &MetricProfile, grid: &ThetaGrid) -> f64 {
    let rho = grid.sample(|t| m.rho(t));
    2.0 * std::f64::consts::PI * grid.integrate(&rho)
}

/// integral of kappa dA - 4 pi; the magnitude bounds discretization quality.
pub fn gauss_bonnet_defect(m: &MetricProfile, grid: &ThetaGrid) -> Result<f64> {
    let kappa = gaussian_curvature(m, grid)?;
    let integrand: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&kappa)
        .map(|(&t, &k)| k * m.rho(t))
        .collect();
    Ok(2.0 * std::f64::consts::PI * grid.integrate(&integrand) - 4.0 * std::f64::consts::PI)
}

/// Integral of a per-node quantity against the surface measure
/// 2 pi * density(theta) d(theta).
pub fn surface_integral(grid: &ThetaGrid, density: &[f64], values: &[f64]) -> f64 {
    assert_eq!(density.len(), grid.n());
    assert_eq!(values.len(), grid.n());
    let prod: Vec<f64> = density.iter().zip(values).map(|(d, v)| d * v).collect();
    2.0 * std::f64::consts::PI * grid.integrate(&prod)
}

/// Axisymmetric height function over a base profile, sampled at the grid
/// nodes with both pole values stored explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSurface {
    pub base: MetricProfile,
    pub values: Vec<f64>,
    pub north: f64,
    pub south: f64,
}

impl GraphSurface {
    pub fn from_fn(base: &MetricProfile, grid: &ThetaGrid, f: impl Fn(f64) -> f64) -> Self {
        GraphSurface {
            base: base.clone(),
            values: grid.sample(&f),
            north: f(0.0),
            south: f(base.domain_len()),
        }
    }

    pub fn constant(base: &MetricProfile, grid: &ThetaGrid, c: f64) -> Self {
        GraphSurface {
            base: base.clone(),
            values: vec![c; grid.n()],
            north: c,
            south: c,
        }
    }

    /// f(theta) = sum_k coeffs[k-1] * cos(k * theta / scale).
    pub fn from_cos_coeffs(base: &MetricProfile, grid: &ThetaGrid, coeffs: &[f64]) -> Self {
        let s = base.scale();
        Self::from_fn(base, grid, |t| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c * ((i as f64 + 1.0) * t / s).cos())
                .sum()
        })
    }

    pub fn from_samples(base: &MetricProfile, values: Vec<f64>, north: f64, south: f64) -> Self {
        GraphSurface { base: base.clone(), values, north, south }
    }

    fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
            && self.values.first().map_or(true, |&v| v == self.north && v == self.south)
    }

    /// Centered first derivative on the midpoint grid; pole ghosts use even
    /// reflection, which encodes f'(0) = f'(L) = 0 for axisymmetric graphs.
    /// Constant graphs differentiate to zero on any grid.
    pub fn d1(&self, grid: &ThetaGrid) -> Result<Vec<f64>> {
        match grid.spacing() {
            Some(h) => Ok(stencil_d1(&self.values, h)),
            None if self.is_constant() => Ok(vec![0.0; self.values.len()]),
            None => Err(usage("derivatives of non-constant graphs need the midpoint grid")),
        }
    }

    pub fn d2(&self, grid: &ThetaGrid) -> Result<Vec<f64>> {
        match grid.spacing() {
            Some(h) => Ok(stencil_d2(&self.values, h)),
            None if self.is_constant() => Ok(vec![0.0; self.values.len()]),
            None => Err(usage("derivatives of non-constant graphs need the midpoint grid")),
        }
    }

    /// Invariant check: finite samples and vanishing pole derivative, the
    /// latter estimated from a one-sided stencil that includes the stored
    /// pole value.
    pub fn validate(&self, grid: &ThetaGrid, pole_tol: f64) -> Result<()> {
        if !self.values.iter().all(|v| v.is_finite())
            || !self.north.is_finite()
            || !self.south.is_finite()
        {
            return Err(domain("graph height contains non-finite samples"));
        }
        let h = match grid.spacing() {
            Some(h) => h,
            None => return Ok(()), // pole-slope estimate defined on the uniform grid only
        };
        let n = grid.n();
        if n < 4 {
            return Ok(());
        }
        let pts = [0.0, 0.5 * h, 1.5 * h, 2.5 * h, 3.5 * h];
        let w = fd_weights(&pts, 1)?;
        let dn = w[0] * self.north
            + w[1] * self.values[0]
            + w[2] * self.values[1]
            + w[3] * self.values[2]
            + w[4] * self.values[3];
        let ds = -(w[0] * self.south
            + w[1] * self.values[n - 1]
            + w[2] * self.values[n - 2]
            + w[3] * self.values[n - 3]
            + w[4] * self.values[n - 4]);
        let scale = 1.0f64.max(self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        if dn.abs() > pole_tol * scale || ds.abs() > pole_tol * scale {
            return Err(domain(format!(
                "graph is not axisymmetrically regular: f'(0) ~ {dn:.3e}, f'(L) ~ {ds:.3e}"
            )));
        }
        Ok(())
    }
}

/// sqrt(1 + f'^2) * rho per node: the area density of the graph divided by 2 pi.
pub fn graph_area_element(s: &GraphSurface, grid: &ThetaGrid) -> Result<Vec<f64>> {
    let fp = s.d1(grid)?;
    Ok(grid
        .nodes()
        .iter()
        .zip(&fp)
        .map(|(&t, &d)| (1.0 + d * d).sqrt() * s.base.rho(t))
        .collect())
}

pub(crate) fn stencil_d1(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let at = |i: isize| -> f64 {
        // even reflection across both poles
        if i < 0 {
            f[(-1 - i) as usize]
        } else if i as usize >= n {
            f[2 * n - 1 - i as usize]
        } else {
            f[i as usize]
        }
    };
    (0..n as isize)
        .map(|j| (at(j + 1) - at(j - 1)) / (2.0 * h))
        .collect()
}

pub(crate) fn stencil_d2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let at = |i: isize| -> f64 {
        if i < 0 {
            f[(-1 - i) as usize]
        } else if i as usize >= n {
            f[2 * n - 1 - i as usize]
        } else {
            f[i as usize]
        }
    };
    (0..n as isize)
        .map(|j| (at(j + 1) - 2.0 * at(j) + at(j - 1)) / (h * h))
        .collect()
}
