//! Rotationally symmetric metric profiles on the sphere.
//!
//! A profile is the function rho in g = d(theta)^2 + rho(theta)^2 d(phi)^2 on
//! the interval [0, L]. Smoothness across the poles requires rho(0) = rho(L) = 0,
//! rho'(0) = 1, rho'(L) = -1 and vanishing even-order pole derivatives; closed
//! form presets are built as scale * sin(u) * P(cos u) with u = theta/scale and
//! P(+-1) = 1, which satisfies all of that by construction. A sphere of radius
//! r is the "round" profile with scale r, living on [0, r*pi].

use crate::error::{domain, usage, Error, Result};
use crate::util::fd_weights;
use std::f64::consts::PI;

pub const DEFAULT_POLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// rho = scale * sin(theta / scale) * P(cos(theta/scale)),
    /// P(x) = 1 + (1 - x^2) q(x). Empty q is the round sphere.
    SinPoly { q: Vec<f64> },
    /// Cubic spline through tabulated (theta, rho) points with pinned poles.
    Table { spline: CubicSpline },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricProfile {
    kind: Kind,
    scale: f64,
}

impl MetricProfile {
    /// Unit round sphere, rho = sin(theta).
    pub fn round() -> Self {
        MetricProfile {
            kind: Kind::SinPoly { q: Vec::new() },
            scale: 1.0,
        }
    }

    /// Round sphere of radius r (curvature 1/r^2), domain [0, r*pi].
    pub fn round_r(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("round_r needs r > 0, got {r}")));
        }
        Ok(MetricProfile {
            kind: Kind::SinPoly { q: Vec::new() },
            scale: r,
        })
    }

    /// Polynomial-in-cos preset: rho = r sin(u) (1 + (1-x^2) q(x)), x = cos u.
    pub fn poly(r: f64, q: &[f64]) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("poly preset needs r > 0, got {r}")));
        }
        let p = MetricProfile {
            kind: Kind::SinPoly { q: q.to_vec() },
            scale: r,
        };
        p.check_positive()?;
        Ok(p)
    }

    /// Registry of string-keyed presets: "round", "round_r", "poly".
    pub fn from_preset(id: &str, r: Option<f64>, coeffs: Option<&[f64]>) -> Result<Self> {
        match id {
            "round" => Ok(Self::round()),
            "round_r" => Self::round_r(r.ok_or_else(|| usage("preset round_r needs r"))?),
            "poly" => Self::poly(
                r.unwrap_or(1.0),
                coeffs.ok_or_else(|| usage("preset poly needs coeffs"))?,
            ),
            other => Err(usage(format!(
                "unknown metric preset '{other}' (known: round, round_r, poly)"
            ))),
        }
    }

    /// Tabulated profile from strictly increasing (theta, rho) pairs.
    /// The table must pin both poles: first row (0, 0), last row (L, 0).
    pub fn from_table(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 4 {
            return Err(usage("tabulated profile needs at least 4 rows"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(usage(format!(
                    "tabulated theta must be strictly increasing, got {} after {}",
                    w[1].0, w[0].0
                )));
            }
        }
        let rho_max = points.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
        let pin = 1e-12 * rho_max.max(1.0);
        let first = points[0];
        let last = points[points.len() - 1];
        if first.0.abs() > 1e-14 || first.1.abs() > pin {
            return Err(usage("tabulated profile must start with the pole row (0, 0)"));
        }
        if last.1.abs() > pin {
            return Err(usage("tabulated profile must end with a pole row (L, 0)"));
        }
        let mut pts = points.to_vec();
        pts[0].1 = 0.0;
        let m = pts.len();
        pts[m - 1].1 = 0.0;
        let spline = CubicSpline::natural(&pts)?;
        let length = last.0;
        Ok(MetricProfile {
            kind: Kind::Table { spline },
            scale: length / PI,
        })
    }

    /// Parses the two-column text format: one "theta rho" pair per line,
    /// whitespace or comma separated, '#' comments allowed.
    pub fn from_table_str(text: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
            let parse = |s: Option<&str>| -> Result<f64> {
                s.ok_or_else(|| usage(format!("line {}: expected two columns", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| usage(format!("line {}: {e}", lineno + 1)))
            };
            let t = parse(it.next())?;
            let r = parse(it.next())?;
            if it.next().is_some() {
                return Err(usage(format!("line {}: expected exactly two columns", lineno + 1)));
            }
            pts.push((t, r));
        }
        Self::from_table(&pts)
    }

    /// Domain length L; the poles sit at 0 and L.
    pub fn domain_len(&self) -> f64 {
        match &self.kind {
            Kind::SinPoly { .. } => self.scale * PI,
            Kind::Table { spline } => spline.last_knot(),
        }
    }

    /// Overall length scale (L / pi).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.kind, Kind::Table { .. })
    }

    pub fn rho(&self, theta: f64) -> f64 {
        match &self.kind {
            Kind::SinPoly { q } => {
                let u = theta / self.scale;
                self.scale * u.sin() * eval_p(q, u.cos())
            }
            Kind::Table { spline } => spline.eval(theta),
        }
    }

    pub fn rho_d1(&self, theta: f64) -> f64 {
        match &self.kind {
            Kind::SinPoly { q } => {
                let u = theta / self.scale;
                let (s, c) = (u.sin(), u.cos());
                let (p, dp, _) = eval_p_d2(q, c);
                c * p - s * s * dp
            }
            Kind::Table { spline } => spline.deriv(theta),
        }
    }

    pub fn rho_d2(&self, theta: f64) -> f64 {
        match &self.kind {
            Kind::SinPoly { q } => {
                let u = theta / self.scale;
                let (s, c) = (u.sin(), u.cos());
                let (p, dp, d2p) = eval_p_d2(q, c);
                (-s * p - 3.0 * s * c * dp + s * s * s * d2p) / self.scale
            }
            Kind::Table { spline } => spline.deriv2(theta),
        }
    }

    fn check_positive(&self) -> Result<()> {
        let n = 4096;
        let len = self.domain_len();
        for j in 1..n {
            let t = len * j as f64 / n as f64;
            let r = self.rho(t);
            if !(r > 0.0) {
                return Err(domain(format!(
                    "profile not positive on the open interval: rho({t:.6}) = {r:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Numerical pole-regularity report: first derivatives at both poles and
    /// extrapolated even-order derivatives (order 4 for closed forms only).
    pub fn pole_report(&self) -> Result<PoleReport> {
        let len = self.domain_len();
        let h = 0.03 * self.scale;
        let extrap_to_zero = |g: &dyn Fn(f64) -> f64, at_north: bool| -> Result<f64> {
            let pts: Vec<f64> = (1..=6).map(|k| k as f64 * h).collect();
            let w = fd_weights(&pts, 0)?;
            let mut s = 0.0;
            for (k, wk) in w.iter().enumerate() {
                let t = if at_north { pts[k] } else { len - pts[k] };
                s += wk * g(t);
            }
            Ok(s)
        };
        let d1 = |t: f64| self.rho_d1(t);
        let d2 = |t: f64| self.rho_d2(t);
        let d1_north = extrap_to_zero(&d1, true)?;
        let d1_south = extrap_to_zero(&d1, false)?;
        let d2_north = extrap_to_zero(&d2, true)?;
        let d2_south = extrap_to_zero(&d2, false)?;
        let (d4_north, d4_south) = if self.is_tabulated() {
            (None, None)
        } else {
            // rho'''' as the second difference of the analytic rho''.
            let dd = 1e-3 * self.scale;
            let d4 = |t: f64| (self.rho_d2(t + dd) - 2.0 * self.rho_d2(t) + self.rho_d2(t - dd)) / (dd * dd);
            (
                Some(extrap_to_zero(&d4, true)?),
                Some(extrap_to_zero(&d4, false)?),
            )
        };
        Ok(PoleReport {
            d1_north,
            d1_south,
            d2_north,
            d2_south,
            d4_north,
            d4_south,
        })
    }

    /// Full invariant check: positivity plus pole regularity within pole_tol.
    pub fn validate(&self, pole_tol: f64) -> Result<PoleReport> {
        self.check_positive()?;
        let rep = self.pole_report()?;
        let scaled = pole_tol * self.scale.max(1.0);
        let mut bad = Vec::new();
        if (rep.d1_north - 1.0).abs() > scaled {
            bad.push(format!("rho'(0) = {:.3e} (want 1)", rep.d1_north));
        }
        if (rep.d1_south + 1.0).abs() > scaled {
            bad.push(format!("rho'(L) = {:.3e} (want -1)", rep.d1_south));
        }
        if rep.d2_north.abs() > scaled || rep.d2_south.abs() > scaled {
            bad.push(format!(
                "rho'' at poles = {:.3e}, {:.3e} (want 0)",
                rep.d2_north, rep.d2_south
            ));
        }
        if let (Some(a), Some(b)) = (rep.d4_north, rep.d4_south) {
            // Fourth-derivative estimates carry a larger FD floor.
            let t4 = (100.0 * pole_tol) * self.scale.max(1.0);
            if a.abs() > t4 || b.abs() > t4 {
                bad.push(format!("rho'''' at poles = {a:.3e}, {b:.3e} (want 0)"));
            }
        }
        if bad.is_empty() {
            Ok(rep)
        } else {
            Err(Error::Domain(format!(
                "profile fails pole regularity: {}",
                bad.join("; ")
            )))
        }
    }
}

#[derive(Debug, Clone)]
pub struct PoleReport {
    pub d1_north: f64,
    pub d1_south: f64,
    pub d2_north: f64,
    pub d2_south: f64,
    pub d4_north: Option<f64>,
    pub d4_south: Option<f64>,
}

fn eval_p(q: &[f64], x: f64) -> f64 {
    let qv = horner(q, x);
    1.0 + (1.0 - x * x) * qv
}

/// P, P', P'' for P(x) = 1 + (1 - x^2) q(x).
fn eval_p_d2(q: &[f64], x: f64) -> (f64, f64, f64) {
    let (qv, dq, d2q) = horner_d2(q, x);
    let w = 1.0 - x * x;
    let p = 1.0 + w * qv;
    let dp = -2.0 * x * qv + w * dq;
    let d2p = -2.0 * qv - 4.0 * x * dq + w * d2q;
    (p, dp, d2p)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

fn horner_d2(c: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut d, mut d2) = (0.0, 0.0, 0.0);
    for &ck in c.iter().rev() {
        d2 = d2 * x + 2.0 * d;
        d = d * x + p;
        p = p * x + ck;
    }
    (p, d, d2)
}

/// Natural cubic spline; second derivative vanishes at both ends, which is
/// the correct pole behavior for a regular profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at knots
}

impl CubicSpline {
    pub fn natural(points: &[(f64, f64)]) -> Result<Self> {
        let n = points.len();
        let x: Vec<f64> = points.iter().map(|p| p.0).collect();
        let y: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second-derivative system.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            for i in 1..k {
                let h0 = x[i + 1] - x[i];
                let w = h0 / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(CubicSpline { x, y, m })
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.clamp(1, self.x.len() - 1) - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn deriv2(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }

    pub fn last_knot(&self) -> f64 {
        *self.x.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_profile_passes_validation() {
        let p = MetricProfile::round();
        let rep = p.validate(DEFAULT_POLE_TOL).unwrap();
        assert!((rep.d1_north - 1.0).abs() < 1e-9);
        assert!((rep.d1_south + 1.0).abs() < 1e-9);
        assert!(rep.d2_north.abs() < 1e-9);
        assert!(rep.d4_north.unwrap().abs() < 1e-6);
    }

    #[test]
    fn scaled_round_keeps_unit_pole_slope() {
        let p = MetricProfile::round_r(2.5).unwrap();
        let rep = p.validate(DEFAULT_POLE_TOL).unwrap();
        assert!((rep.d1_north - 1.0).abs() < 1e-9);
        assert!((p.domain_len() - 2.5 * PI).abs() < 1e-15);
        // rho(L/2) = r at the equator
        assert!((p.rho(1.25 * PI) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn poly_preset_is_regular_by_construction() {
        let p = MetricProfile::poly(1.0, &[0.2, -0.1, 0.05]).unwrap();
        p.validate(DEFAULT_POLE_TOL).unwrap();
    }

    #[test]
    fn poly_derivatives_match_finite_differences() {
        let p = MetricProfile::poly(1.3, &[0.15, 0.1]).unwrap();
        let h = 1e-5;
        for &t in &[0.3, 1.1, 2.0, 3.5] {
            let fd1 = (p.rho(t + h) - p.rho(t - h)) / (2.0 * h);
            let fd2 = (p.rho(t + h) - 2.0 * p.rho(t) + p.rho(t - h)) / (h * h);
            assert!((fd1 - p.rho_d1(t)).abs() < 1e-8);
            assert!((fd2 - p.rho_d2(t)).abs() < 1e-5);
        }
    }

    #[test]
    fn registry_resolves_ids() {
        assert!(MetricProfile::from_preset("round", None, None).is_ok());
        assert!(MetricProfile::from_preset("round_r", Some(2.0), None).is_ok());
        assert!(MetricProfile::from_preset("poly", None, Some(&[0.1])).is_ok());
        assert!(MetricProfile::from_preset("nope", None, None).is_err());
    }

    #[test]
    fn table_loader_round_trips_a_sampled_sphere() {
        let n = 400;
        let mut text = String::new();
        for j in 0..=n {
            let t = PI * j as f64 / n as f64;
            let r = if j == 0 || j == n { 0.0 } else { t.sin() };
            text.push_str(&format!("{t:.16} {r:.16}\n"));
        }
        let p = MetricProfile::from_table_str(&text).unwrap();
        for &t in &[0.4, 1.0, 1.57, 2.5] {
            assert!((p.rho(t) - t.sin()).abs() < 1e-8, "rho mismatch at {t}");
        }
        p.validate(1e-4).unwrap();
    }

    #[test]
    fn table_loader_rejects_bad_input() {
        assert!(MetricProfile::from_table_str("0 0\n1 0.8\n0.5 0.4\n3.14159 0").is_err());
        assert!(MetricProfile::from_table_str("0 0.3\n1 0.8\n2 0.9\n3.14159 0").is_err());
        assert!(MetricProfile::from_table_str("0 0\n1 0.8\n2 0.9\n3.14159 0.2").is_err());
    }

    #[test]
    fn irregular_profile_is_caught() {
        // rho = sin + 0.05 sin^2 has rho''(0) != 0; build it as a table.
        let n = 600;
        let mut pts = Vec::new();
        for j in 0..=n {
            let t = PI * j as f64 / n as f64;
            let r = if j == 0 || j == n { 0.0 } else { t.sin() + 0.05 * t.sin().powi(2) };
            pts.push((t, r));
        }
        let p = MetricProfile::from_table(&pts).unwrap();
        assert!(p.validate(DEFAULT_POLE_TOL).is_err());
    }
}
