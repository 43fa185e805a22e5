//! Closed forms and quadrature for the extremal rotating horizon family in
//! which the event and cosmological horizons coalesce.
//!
//! With scale factor ell (Lambda = 3 / ell^2) and rotation parameter a, the
//! coalesced horizon radius solves 3 x^2 - (ell^2 - a^2) x + a^2 ell^2 = 0,
//! which requires eps = a / ell to stay below the root of
//! eps^4 - 14 eps^2 + 1 = 0, i.e. a_max = (2 - sqrt 3) ell. All outputs are
//! reported in powers of ell.

use crate::error::{domain, numerical, Result};
use crate::grid::ThetaGrid;
use crate::output::json_num;
use crate::util::line_fit;
use std::f64::consts::PI;

pub const DEFAULT_QUAD_N: usize = 512;

/// Largest admissible rotation parameter (2 - sqrt 3) ell.
pub fn a_max(ell: f64) -> f64 {
    (2.0 - 3.0f64.sqrt()) * ell
}

#[derive(Debug, Clone, Copy)]
pub struct NariaiParams {
    pub ell: f64,
    pub a: f64,
    pub eps: f64,
    pub lambda: f64,
    pub rc2: f64,
}

impl NariaiParams {
    pub fn new(a: f64, ell: f64) -> Result<Self> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(domain(format!("scale factor must be positive, got {ell}")));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(domain(format!("rotation parameter must be nonnegative, got {a}")));
        }
        let amax = a_max(ell);
        if a >= amax {
            return Err(domain(format!(
                "rotation parameter a = {a} at or beyond a_max = {amax:.9} \
                 (= (2 - sqrt 3) ell, where the discriminant (1 - eps^2)^2 - 12 eps^2 vanishes)"
            )));
        }
        let eps = a / ell;
        let p = NariaiParams { ell, a, eps, lambda: 3.0 / (ell * ell), rc2: rc2_value(a, ell) };
        debug_assert!(p.quadratic_residual() <= 1e-12 * ell.powi(4));
        Ok(p)
    }

    /// |3 rc2^2 - (ell^2 - a^2) rc2 + a^2 ell^2|, the defining quadratic.
    pub fn quadratic_residual(&self) -> f64 {
        (3.0 * self.rc2 * self.rc2 - (self.ell * self.ell - self.a * self.a) * self.rc2
            + self.a * self.a * self.ell * self.ell)
            .abs()
    }
}

fn rc2_value(a: f64, ell: f64) -> f64 {
    let e2 = (a / ell) * (a / ell);
    let disc = (1.0 - e2) * (1.0 - e2) - 12.0 * e2;
    ell * ell * (1.0 - e2 + disc.sqrt()) / 6.0
}

/// Coalesced horizon radius squared.
pub fn rc_squared(p: &NariaiParams) -> f64 {
    p.rc2
}

/// Horizon area A = 4 pi (rc^2 + a^2) / (1 + Lambda a^2 / 3).
pub fn area_sigma(p: &NariaiParams) -> f64 {
    4.0 * PI * (p.rc2 + p.a * p.a) / (1.0 + p.lambda * p.a * p.a / 3.0)
}

/// Rotation average omega by Gauss-Legendre quadrature, computed along two
/// algebraically independent routes that must agree to 1e-10 relative:
///
/// * the reduced form (a^2 / 2 rc^4) * integral of
///   (1 + eps^2 cos^2)(1 + (a^2/rc^2) cos^2)^{-3} sin^3, and
/// * the definitional route (1/|Sigma|) integral of |X^eta|^2 dA with
///   dA = (|Sigma| / 4 pi) sin d(theta) d(phi) and the explicit integrand
///   a^2 sin^2 (rc^2 + Lambda a^2 rc^2 cos^2 / 3) / (rc^2 + a^2 cos^2)^3.
pub fn omega_nariai(p: &NariaiParams, quad_n: usize) -> Result<f64> {
    if quad_n < 32 {
        return Err(domain(format!("quad_n must be at least 32, got {quad_n}")));
    }
    let grid = ThetaGrid::gauss(quad_n, PI);
    let a2_rc2 = p.a * p.a / p.rc2;
    let e2 = p.eps * p.eps;
    let reduced = grid.sample(|t| {
        let c2 = t.cos() * t.cos();
        (1.0 + e2 * c2) / (1.0 + a2_rc2 * c2).powi(3) * t.sin().powi(3)
    });
    let omega_reduced = p.a * p.a / (2.0 * p.rc2 * p.rc2) * grid.integrate(&reduced);

    let x_eta2 = |t: f64| {
        let c2 = t.cos() * t.cos();
        p.a * p.a * t.sin() * t.sin() * (p.rc2 + p.lambda * p.a * p.a * p.rc2 * c2 / 3.0)
            / (p.rc2 + p.a * p.a * c2).powi(3)
    };
    let definitional = grid.sample(|t| x_eta2(t) * t.sin());
    // (1/4pi) * 2pi * integral over theta
    let omega_def = 0.5 * grid.integrate(&definitional);

    let scale = omega_reduced.abs().max(1e-300);
    if p.a > 0.0 && (omega_reduced - omega_def).abs() > 1e-10 * scale {
        return Err(numerical(format!(
            "omega routes disagree: reduced {omega_reduced:.15e} vs definitional {omega_def:.15e}"
        )));
    }
    Ok(omega_reduced)
}

#[derive(Debug, Clone, Copy)]
pub struct NariaiReport {
    pub a: f64,
    pub ell: f64,
    pub eps: f64,
    pub rc2: f64,
    pub area: f64,
    pub omega: f64,
    pub bound: f64,
    pub gap: f64,
}

/// Full single-point report with a refinement guard on the quadrature.
pub fn report(p: &NariaiParams, quad_n: usize) -> Result<NariaiReport> {
    let omega = omega_nariai(p, quad_n)?;
    let omega_fine = omega_nariai(p, 2 * quad_n)?;
    if (omega - omega_fine).abs() > 1e-12 * omega.abs().max(1.0) {
        return Err(numerical(format!(
            "omega quadrature not converged at n = {quad_n}: {omega:.15e} vs {omega_fine:.15e}"
        )));
    }
    let area = area_sigma(p);
    let bound = 4.0 * PI / (p.lambda + omega);
    Ok(NariaiReport {
        a: p.a,
        ell: p.ell,
        eps: p.eps,
        rc2: p.rc2,
        area,
        omega,
        bound,
        gap: bound - area,
    })
}

impl NariaiReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": json_num(self.a),
            "ell": json_num(self.ell),
            "eps": json_num(self.eps),
            "rc2": json_num(self.rc2),
            "area": json_num(self.area),
            "omega": json_num(self.omega),
            "bound": json_num(self.bound),
            "gap": json_num(self.gap),
        })
    }

    pub fn csv_header() -> &'static str {
        "a_over_ell,rc2,area,omega,bound,gap"
    }

    pub fn csv_row(&self) -> String {
        use crate::output::fmt_sig;
        format!(
            "{},{},{},{},{},{}",
            fmt_sig(self.a / self.ell),
            fmt_sig(self.rc2),
            fmt_sig(self.area),
            fmt_sig(self.omega),
            fmt_sig(self.bound),
            fmt_sig(self.gap)
        )
    }
}

/// Exact and second-order-truncated values around eps = 0.
#[derive(Debug, Clone, Copy)]
pub struct EpsExpansion {
    pub eps: f64,
    pub rc2_exact: f64,
    pub rc2_truncated: f64,
    pub a2_over_rc2_exact: f64,
    pub a2_over_rc2_truncated: f64,
    pub omega_exact: f64,
    pub omega_truncated: f64,
    pub area_exact: f64,
    pub bound_exact: f64,
    /// Both the area and the bound truncate to 4 pi rc^2 (1 + 2 eps^2).
    pub shared_truncation: f64,
    /// (3 rc2/ell^2 - 1 + 4 eps^2) / eps^4; its magnitude approaches 12
    /// (the sign of the quartic term is negative).
    pub rc2_eps4_coefficient: f64,
    /// true when eps is inside the quadratic-truncation validity window.
    pub in_window: bool,
}

pub fn eps_expansion(p: &NariaiParams, quad_n: usize) -> Result<EpsExpansion> {
    let e2 = p.eps * p.eps;
    let l2 = p.ell * p.ell;
    let rc2_truncated = l2 / 3.0 * (1.0 - 4.0 * e2);
    let omega_exact = omega_nariai(p, quad_n)?;
    let omega_truncated = 2.0 / 3.0 * p.a * p.a / (p.rc2 * p.rc2) * (1.0 - 1.6 * e2);
    let area_exact = area_sigma(p);
    let bound_exact = 4.0 * PI / (p.lambda + omega_exact);
    let shared_truncation = 4.0 * PI * p.rc2 * (1.0 + 2.0 * e2);
    let rc2_eps4_coefficient = if p.eps > 0.0 {
        (3.0 * p.rc2 / l2 - 1.0 + 4.0 * e2) / (e2 * e2)
    } else {
        0.0
    };
    Ok(EpsExpansion {
        eps: p.eps,
        rc2_exact: p.rc2,
        rc2_truncated,
        a2_over_rc2_exact: p.a * p.a / p.rc2,
        a2_over_rc2_truncated: 3.0 * e2,
        omega_exact,
        omega_truncated,
        area_exact,
        bound_exact,
        shared_truncation,
        rc2_eps4_coefficient,
        in_window: p.eps <= 0.15,
    })
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<NariaiReport>,
    pub gap_over_eps4: Vec<f64>,
}

/// Evaluates the report over a list of rotation parameters.
pub fn sweep(a_values: &[f64], ell: f64, quad_n: usize) -> Result<SweepTable> {
    let mut rows = Vec::with_capacity(a_values.len());
    let mut gap_over_eps4 = Vec::with_capacity(a_values.len());
    for &a in a_values {
        let p = NariaiParams::new(a, ell)?;
        let r = report(&p, quad_n)?;
        if a > 0.0 && r.gap <= 0.0 {
            return Err(numerical(format!(
                "area bound not strict at a = {a}: gap = {:.3e}",
                r.gap
            )));
        }
        gap_over_eps4.push(if p.eps > 0.0 { r.gap / p.eps.powi(4) } else { 0.0 });
        rows.push(r);
    }
    Ok(SweepTable { rows, gap_over_eps4 })
}

/// Fitted log-log slope of (bound - area) against eps over a sweep.
pub fn gap_order(ell: f64, eps_values: &[f64], quad_n: usize) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &e in eps_values {
        let p = NariaiParams::new(e * ell, ell)?;
        let r = report(&p, quad_n)?;
        xs.push(e.ln());
        ys.push(r.gap.ln());
    }
    Ok(line_fit(&xs, &ys).0)
}
