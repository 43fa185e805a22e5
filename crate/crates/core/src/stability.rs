//! The stability operator of an axisymmetric MOTS, discretized per azimuthal
//! Fourier mode on the midpoint grid.
//!
//! For u(theta) e^{i m phi} the operator
//!     L u = -Lap u + 2 <X, grad u> + (Q - |X|^2 + div X) u
//! reduces to
//!     -[u'' + (rho'/rho) u' - (m^2/rho^2) u]
//!     + 2 [X_theta u' + i m X_phi u] + (Q - |X|^2 + div X) u.
//!
//! On a rotationally symmetric surface the meridional component is always a
//! gradient, X_theta = w', and the substitution u = e^w v turns the whole
//! meridional advection block into a similarity:
//!     L_m = e^w (-Lap_m + Q - |X^eta|^2) e^{-w} + 2 i m X_phi,
//! with |X^eta|^2 = rho^2 X_phi^2. The discretization mirrors that identity
//! exactly: a flux-form Laplacian (rho at cell boundaries) plus the potential
//! diagonal, conjugated by diag(e^{w_j}). As a consequence the discrete
//! operator inherits the spectral statements verbatim, not merely to
//! truncation order: the directly assembled formal adjoint (X -> -X) shares
//! the spectrum to rounding, the duality pairing against the discrete
//! surface measure is an algebraic identity, min Re of every mode-m block
//! dominates the m = 0 principal eigenvalue, the symmetrized companion
//! -Lap + Q can only raise it, and the principal eigenvector is one-signed
//! by Perron-Frobenius. rho vanishing at the boundary cells b_0 = 0 and
//! b_n = L closes the system at the poles without ghost values (the even and
//! odd reflection ghosts both enter multiplied by rho(pole) = 0), and the
//! m^2/rho^2 diagonal enforces decay of the m >= 1 modes there.

use crate::eigen;
use crate::error::{domain, numerical, usage, Result};
use crate::fields::TrigPoly;
use crate::geometry::{surface_integral, GraphSurface};
use crate::grid::ThetaGrid;
use crate::initial_data::{theta_plus_of_samples, InitialData, ProductData};
use crate::output::{fmt_sig, json_num};
use crate::profile::MetricProfile;
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use std::io::Write;

/// Potential Q = kappa_coeff * kappa(theta) + constant + field(theta).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kappa_coeff: f64,
    pub constant: f64,
    pub field: TrigPoly,
}

impl PotentialSpec {
    pub fn constant(c: f64) -> Self {
        PotentialSpec { kappa_coeff: 0.0, constant: c, field: TrigPoly::zero() }
    }

    pub fn kappa_minus(c: f64) -> Self {
        PotentialSpec { kappa_coeff: 1.0, constant: -c, field: TrigPoly::zero() }
    }
}

/// Sampled operator coefficients on the grid.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub q: Vec<f64>,
    pub x_theta: Vec<f64>,
    pub x_phi: Vec<f64>,
    pub x_norm2: Vec<f64>,
    pub x_eta_norm2: Vec<f64>,
    /// Meridional potential w(theta_j) = integral of X_theta from 0.
    pub w: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StabilityProblem {
    pub metric: MetricProfile,
    pub grid: ThetaGrid,
    pub coeffs: Coefficients,
    pub m_max: usize,
}

impl StabilityProblem {
    /// Builds the problem from closed-form axisymmetric coefficient fields.
    /// The meridional potential w = integral of X_theta is evaluated by
    /// per-cell Gauss quadrature, essentially exactly for these fields.
    pub fn from_specs(
        metric: MetricProfile,
        grid: ThetaGrid,
        q: PotentialSpec,
        x_theta: TrigPoly,
        x_phi: TrigPoly,
        m_max: usize,
    ) -> Result<Self> {
        if grid.spacing().is_none() {
            return Err(usage("stability assembly needs the midpoint grid"));
        }
        let scale = metric.scale();
        let n = grid.n();
        let mut c = Coefficients {
            q: Vec::with_capacity(n),
            x_theta: Vec::with_capacity(n),
            x_phi: Vec::with_capacity(n),
            x_norm2: Vec::with_capacity(n),
            x_eta_norm2: Vec::with_capacity(n),
            w: Vec::with_capacity(n),
        };
        let (gx, gw) = crate::grid::gauss_legendre(16);
        let mut prev_theta = 0.0;
        let mut w_acc = 0.0;
        for &th in grid.nodes() {
            let u = th / scale;
            let rho = metric.rho(th);
            let kappa = -metric.rho_d2(th) / metric.rho(th);
            let xt = x_theta.eval_u(u);
            let xp = x_phi.eval_u(u);
            let qv = q.kappa_coeff * kappa + q.constant + q.field.eval_u(u);
            if !qv.is_finite() {
                return Err(domain(format!("potential not finite at theta = {th:.6}")));
            }
            let eta2 = rho * rho * xp * xp;
            c.q.push(qv);
            c.x_theta.push(xt);
            c.x_phi.push(xp);
            c.x_norm2.push(xt * xt + eta2);
            c.x_eta_norm2.push(eta2);
            let half = 0.5 * (th - prev_theta);
            let mid = 0.5 * (th + prev_theta);
            let seg: f64 = gx
                .iter()
                .zip(&gw)
                .map(|(&x, &wq)| wq * x_theta.eval_u((mid + half * x) / scale))
                .sum::<f64>()
                * half;
            w_acc += seg;
            prev_theta = th;
            c.w.push(w_acc);
        }
        Ok(StabilityProblem { metric, grid, coeffs: c, m_max })
    }

    /// Operator induced on the t = const slice of product data: X_theta = 0,
    /// X_phi = beta / rho^2 and Q = (beta/rho)^2 (the potential of the slice,
    /// where kappa - (mu + J(nu)) - |chi|^2/2 collapses to beta^2/rho^2).
    pub fn from_product_slice(d: &ProductData, grid: ThetaGrid, m_max: usize) -> Result<Self> {
        if grid.spacing().is_none() {
            return Err(usage("stability assembly needs the midpoint grid"));
        }
        let metric = d.metric.clone();
        let n = grid.n();
        let mut c = Coefficients {
            q: Vec::with_capacity(n),
            x_theta: vec![0.0; n],
            x_phi: Vec::with_capacity(n),
            x_norm2: Vec::with_capacity(n),
            x_eta_norm2: Vec::with_capacity(n),
            w: vec![0.0; n],
        };
        for &th in grid.nodes() {
            let rho = metric.rho(th);
            let beta = d.beta_at(th);
            let w = (beta / rho).powi(2);
            c.q.push(w);
            c.x_phi.push(beta / (rho * rho));
            c.x_norm2.push(w);
            c.x_eta_norm2.push(w);
        }
        Ok(StabilityProblem { metric, grid, coeffs: c, m_max })
    }

    /// Round sphere of curvature c with vanishing extrinsic data and the
    /// saturated potential Q = kappa - c.
    pub fn rigid_round(c: f64, n: usize, m_max: usize) -> Result<Self> {
        if !(c > 0.0) {
            return Err(domain(format!("curvature must be positive, got {c}")));
        }
        let metric = MetricProfile::round_r(1.0 / c.sqrt())?;
        let grid = ThetaGrid::midpoint(n, metric.domain_len());
        StabilityProblem::from_specs(
            metric,
            grid,
            PotentialSpec::kappa_minus(c),
            TrigPoly::zero(),
            TrigPoly::zero(),
            m_max,
        )
    }

    fn rho_at_nodes(&self) -> Vec<f64> {
        self.grid.sample(|t| self.metric.rho(t))
    }

    /// Surface measure weights 2 pi w_j rho_j (the discrete L^2(dA) weight).
    pub fn measure(&self) -> Vec<f64> {
        self.grid
            .weights()
            .iter()
            .zip(self.rho_at_nodes())
            .map(|(&w, r)| 2.0 * std::f64::consts::PI * w * r)
            .collect()
    }
}

pub enum ModeMatrix {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

/// Dense discretization of mode m; real for m = 0, complex otherwise.
pub fn assemble_mode(p: &StabilityProblem, m: usize) -> Result<ModeMatrix> {
    if m > p.m_max {
        return Err(usage(format!("mode {m} exceeds m_max = {}", p.m_max)));
    }
    if m == 0 {
        Ok(ModeMatrix::Real(assemble_real(p, Part::Full { adjoint: false })))
    } else {
        Ok(ModeMatrix::Complex(assemble_complex(p, m, false)))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Part {
    /// -Lap + 2<X, grad .> + (Q - |X|^2 + div X)
    Full { adjoint: bool },
    /// Symmetrized companion -Lap + Q
    Symmetrized,
}

/// Flux-form -Lap plus the given diagonal, conjugated by diag(e^{sign * w}).
/// sign = 0 yields the symmetric core itself.
fn assemble_core(p: &StabilityProblem, diag: &[f64], w_sign: f64) -> Array2<f64> {
    let n = p.grid.n();
    let h = p.grid.spacing().expect("midpoint grid enforced at construction");
    let rho = p.rho_at_nodes();
    let rb: Vec<f64> =
        (0..=n).map(|j| if j == 0 || j == n { 0.0 } else { p.metric.rho(j as f64 * h) }).collect();
    let mut a = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        a[[j, j]] = (rb[j] + rb[j + 1]) / (h * h * rho[j]) + diag[j];
        if j + 1 < n {
            let conj = (w_sign * (p.coeffs.w[j] - p.coeffs.w[j + 1])).exp();
            a[[j, j + 1]] = -rb[j + 1] / (h * h * rho[j]) * conj;
        }
        if j > 0 {
            let conj = (w_sign * (p.coeffs.w[j] - p.coeffs.w[j - 1])).exp();
            a[[j, j - 1]] = -rb[j] / (h * h * rho[j]) * conj;
        }
    }
    a
}

fn assemble_real(p: &StabilityProblem, part: Part) -> Array2<f64> {
    match part {
        Part::Full { adjoint } => {
            let diag: Vec<f64> = p
                .coeffs
                .q
                .iter()
                .zip(&p.coeffs.x_eta_norm2)
                .map(|(&q, &e)| q - e)
                .collect();
            assemble_core(p, &diag, if adjoint { -1.0 } else { 1.0 })
        }
        Part::Symmetrized => assemble_core(p, &p.coeffs.q, 0.0),
    }
}

fn assemble_complex(p: &StabilityProblem, m: usize, adjoint: bool) -> Array2<Complex64> {
    let real = assemble_real(p, Part::Full { adjoint });
    let n = p.grid.n();
    let rho = p.rho_at_nodes();
    let mut a = real.mapv(|v| Complex64::new(v, 0.0));
    let s = if adjoint { -1.0 } else { 1.0 };
    let mf = m as f64;
    for j in 0..n {
        a[[j, j]] += Complex64::new(mf * mf / (rho[j] * rho[j]), s * 2.0 * mf * p.coeffs.x_phi[j]);
    }
    a
}

pub fn spectral_tol(lambda: f64) -> f64 {
    1e-7 * lambda.abs().max(1.0)
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Principal eigenfunction, positive, normalized to max = 1.
    pub u: Vec<f64>,
    /// Minimal real part of the mode-m spectrum, index m = 0..=m_max.
    pub per_mode_min_re: Vec<f64>,
    pub lambda1_adjoint: f64,
    pub lambda1_symmetrized: f64,
    pub near_degenerate: bool,
    pub n: usize,
}

impl EigenResult {
    /// Smallest margin min_re(mode m) - lambda1 over m >= 1.
    pub fn mode_ordering_margin(&self) -> f64 {
        self.per_mode_min_re
            .iter()
            .skip(1)
            .map(|r| r - self.lambda1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda1": json_num(self.lambda1),
            "lambda1_adjoint": json_num(self.lambda1_adjoint),
            "lambda1_symmetrized": json_num(self.lambda1_symmetrized),
            "per_mode_min_re": self.per_mode_min_re.iter().map(|&v| json_num(v)).collect::<Vec<_>>(),
            "near_degenerate": self.near_degenerate,
            "n": self.n,
            "spectral_tol": json_num(spectral_tol(self.lambda1)),
        })
    }

    pub fn eigenfunction_csv(&self, grid: &ThetaGrid, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "theta,u")?;
        for (t, u) in grid.nodes().iter().zip(&self.u) {
            writeln!(w, "{},{}", fmt_sig(*t), fmt_sig(*u))?;
        }
        Ok(())
    }
}

fn min_re(vals: &[Complex64]) -> f64 {
    vals.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
}

fn sign_changes(v: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &x in v {
        if x != 0.0 {
            if last != 0.0 && x.signum() != last.signum() {
                count += 1;
            }
            last = x;
        }
    }
    count
}

/// Solves the dense spectrum of every mode block, extracts the principal
/// eigenpair from m = 0 and cross-solves the adjoint and symmetrized
/// companions.
pub fn principal_eigenpair(p: &StabilityProblem) -> Result<EigenResult> {
    let a0 = assemble_real(p, Part::Full { adjoint: false });
    let (vals, vecs) = eigen::eig_real_with_vectors(a0.view())?;
    let lam_min = min_re(&vals);
    let tol = spectral_tol(lam_min);
    let mut candidates: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].re <= lam_min + tol).collect();
    let near_degenerate = candidates.len() > 1;
    if near_degenerate {
        // minimal-real-part tie: prefer the sign-definite eigenvector
        candidates.sort_by_key(|&k| {
            let col: Vec<f64> = (0..p.grid.n()).map(|i| vecs[[i, k]].re).collect();
            sign_changes(&col)
        });
    }
    let k = candidates[0];
    let lambda1 = vals[k].re;
    if vals[k].im.abs() > tol {
        return Err(numerical(format!(
            "principal eigenvalue has imaginary part {:.3e} at n = {}; refine the grid",
            vals[k].im,
            p.grid.n()
        )));
    }
    let mut u: Vec<f64> = (0..p.grid.n()).map(|i| vecs[[i, k]].re).collect();
    let (imax, &umax) = u
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
        .expect("nonempty");
    let _ = imax;
    for x in u.iter_mut() {
        *x /= umax;
    }
    if let Some((bad, &val)) = u.iter().enumerate().find(|(_, &v)| v <= 0.0) {
        return Err(numerical(format!(
            "principal eigenfunction changes sign at node {bad} (theta = {:.6}, u = {val:.3e}); \
             the resolution n = {} is too coarse or the coefficients violate axisymmetric regularity",
            p.grid.nodes()[bad],
            p.grid.n()
        )));
    }

    let a_adj = assemble_real(p, Part::Full { adjoint: true });
    let lambda1_adjoint = min_re(&eigen::eig_real(a_adj.view())?);
    let a_sym = assemble_real(p, Part::Symmetrized);
    let lambda1_symmetrized = min_re(&eigen::eig_real(a_sym.view())?);

    let mut per_mode = Vec::with_capacity(p.m_max + 1);
    per_mode.push(lambda1);
    for m in 1..=p.m_max {
        let am = assemble_complex(p, m, false);
        per_mode.push(min_re(&eigen::eig_complex(am.view())?));
    }
    Ok(EigenResult {
        lambda1,
        u,
        per_mode_min_re: per_mode,
        lambda1_adjoint,
        lambda1_symmetrized,
        near_degenerate,
        n: p.grid.n(),
    })
}

#[derive(Debug, Clone)]
pub struct InequalityRow {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub lambda1: f64,
    pub rows: Vec<InequalityRow>,
    pub all_hold: bool,
    pub tol: f64,
}

/// Checks integral |X^eta|^2 f^2 dA <= integral (|grad f|^2 + Q f^2) dA for
/// axisymmetric trial functions on a stable problem.
pub fn stability_inequality_check(
    p: &StabilityProblem,
    trials: &[TrigPoly],
) -> Result<InequalityReport> {
    let eig = principal_eigenpair(p)?;
    if eig.lambda1 < -spectral_tol(eig.lambda1) {
        return Err(domain(format!(
            "stability inequality requires lambda1 >= 0; problem has lambda1 = {:.6e}",
            eig.lambda1
        )));
    }
    let scale = p.metric.scale();
    let rho = p.rho_at_nodes();
    let x_eta2: Vec<f64> = p
        .coeffs
        .x_phi
        .iter()
        .zip(&rho)
        .map(|(&xp, &r)| r * r * xp * xp)
        .collect();
    let ones: Vec<f64> = vec![1.0; p.grid.n()];
    let mut rows = Vec::with_capacity(trials.len());
    let mut all_hold = true;
    let mut tol_out: f64 = 0.0;
    for f in trials {
        let fv = p.grid.sample(|t| f.eval_u(t / scale));
        let fp = p.grid.sample(|t| f.deriv_u(t / scale) / scale);
        let lhs_field: Vec<f64> = fv.iter().zip(&x_eta2).map(|(&v, &x)| x * v * v).collect();
        let rhs_field: Vec<f64> = fv
            .iter()
            .zip(&fp)
            .zip(&p.coeffs.q)
            .map(|((&v, &d), &q)| d * d + q * v * v)
            .collect();
        let lhs = surface_integral(&p.grid, &rho, &lhs_field);
        let rhs = surface_integral(&p.grid, &rho, &rhs_field);
        let _ = &ones;
        let tol = 1e-8 * rhs.abs().max(1.0);
        tol_out = tol_out.max(tol);
        let margin = rhs - lhs;
        if margin < -tol {
            all_hold = false;
        }
        rows.push(InequalityRow { lhs, rhs, margin });
    }
    Ok(InequalityReport { lambda1: eig.lambda1, rows, all_hold, tol: tol_out })
}

#[derive(Debug, Clone)]
pub struct FirstVariationReport {
    /// max-norm relative deviation per finite-difference step.
    pub step_errors: Vec<(f64, f64)>,
    /// after two Richardson levels.
    pub extrapolated_rel_err: f64,
    pub monotone: bool,
}

/// Compares the finite-difference variation of theta^+ under normal graph
/// perturbations against L phi + (tau theta^+ - theta^+^2 / 2) phi on a
/// constant-height slice, where vertical and normal variations coincide.
pub fn first_variation_check(
    d: &ProductData,
    s: &GraphSurface,
    phi: &TrigPoly,
    h: f64,
) -> Result<FirstVariationReport> {
    let grid_n = s.values.len();
    let spread = s
        .values
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    if spread.1 - spread.0 > 1e-13 {
        return Err(usage(
            "first-variation check is defined on constant-height slices, where the vertical \
             graph perturbation is exactly the normal variation",
        ));
    }
    if !(h > 0.0) {
        return Err(usage("step h must be positive"));
    }
    let c = s.values[0];
    let grid = ThetaGrid::midpoint(grid_n, d.metric.domain_len());
    let data = InitialData::Product(d.clone());
    let scale = d.metric.scale();
    let phi_v = grid.sample(|t| phi.eval_u(t / scale));

    // reference: assembled slice operator applied to phi, plus the zeroth
    // order term (zero here since product slices have theta^+ = 0)
    let p = StabilityProblem::from_product_slice(d, grid.clone(), 0)?;
    let a = assemble_real(&p, Part::Full { adjoint: false });
    let n = grid.n();
    let mut reference = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            reference[i] += a[[i, j]] * phi_v[j];
        }
    }
    let theta0 = theta_plus_of_samples(&data, &vec![c; n], &grid)?;
    let tau = d.alpha_at(c);
    for i in 0..n {
        reference[i] += (tau * theta0[i] - 0.5 * theta0[i] * theta0[i]) * phi_v[i];
    }
    // floor the relative error at the rounding scale of the assembled
    // operator, which cancels row sums only to ~eps/h^2
    let phi_norm = phi_v.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ref_norm = reference
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-6 * phi_norm.max(1.0));

    let fd_at = |step: f64| -> Result<Vec<f64>> {
        let fp: Vec<f64> = phi_v.iter().map(|&v| c + step * v).collect();
        let fm: Vec<f64> = phi_v.iter().map(|&v| c - step * v).collect();
        let tp = theta_plus_of_samples(&data, &fp, &grid)?;
        let tm = theta_plus_of_samples(&data, &fm, &grid)?;
        Ok(tp.iter().zip(&tm).map(|(&a, &b)| (a - b) / (2.0 * step)).collect())
    };
    let f1 = fd_at(h)?;
    let f2 = fd_at(h / 2.0)?;
    let f3 = fd_at(h / 4.0)?;
    let err = |f: &[f64]| -> f64 {
        f.iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / ref_norm
    };
    let (e1, e2, e3) = (err(&f1), err(&f2), err(&f3));
    // two Richardson levels of the centered difference (order 2)
    let r1: Vec<f64> = f2.iter().zip(&f1).map(|(&a, &b)| (4.0 * a - b) / 3.0).collect();
    let r2: Vec<f64> = f3.iter().zip(&f2).map(|(&a, &b)| (4.0 * a - b) / 3.0).collect();
    let rr: Vec<f64> = r2.iter().zip(&r1).map(|(&a, &b)| (16.0 * a - b) / 15.0).collect();
    Ok(FirstVariationReport {
        step_errors: vec![(h, e1), (h / 2.0, e2), (h / 4.0, e3)],
        extrapolated_rel_err: err(&rr),
        monotone: e1 >= e2 - 1e-15 && e2 >= e3 - 1e-15,
    })
}

/// Random axisymmetric problem for the mode-ordering and adjoint batteries:
/// a perturbed metric profile, bounded-away-from-zero vector amplitudes and a
/// smooth potential.
pub fn random_problem(rng: &mut impl Rng, n: usize, m_max: usize) -> Result<StabilityProblem> {
    let q_coeffs: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.15..0.15)).collect();
    let metric = MetricProfile::poly(1.0, &q_coeffs)?;
    let grid = ThetaGrid::midpoint(n, metric.domain_len());
    let amp = |rng: &mut dyn rand::RngCore| -> f64 {
        let mag: f64 = 0.2 + 0.4 * rand::Rng::gen_range(rng, 0.0..1.0f64);
        if rand::Rng::gen_bool(rng, 0.5) {
            mag
        } else {
            -mag
        }
    };
    let x_theta = if rng.gen_bool(0.2) {
        TrigPoly::zero()
    } else {
        TrigPoly::new(vec![0.0, 1.0], vec![amp(rng), amp(rng)])
    };
    let x_phi = if rng.gen_bool(0.2) {
        TrigPoly::zero()
    } else {
        TrigPoly::new(vec![1.0], vec![amp(rng), amp(rng)])
    };
    let q = PotentialSpec {
        kappa_coeff: 0.0,
        constant: rng.gen_range(-1.0..1.0),
        field: TrigPoly::new(vec![0.0, 0.0, 1.0], vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]),
    };
    StabilityProblem::from_specs(metric, grid, q, x_theta, x_phi, m_max)
}

#[derive(Debug, Clone)]
pub struct BatteryRow {
    pub lambda1: f64,
    pub mode_ordering_margin: f64,
    pub adjoint_gap: f64,
    pub symmetrized_gap: f64,
}

#[derive(Debug, Clone)]
pub struct BatteryReport {
    pub rows: Vec<BatteryRow>,
    pub ordering_violations: usize,
    pub adjoint_violations: usize,
    pub symmetrized_violations: usize,
}

/// Runs `problems` randomized principal-eigenvalue solves and tallies the
/// discrete mode-ordering, adjoint and symmetrization properties.
pub fn mode_ordering_battery(problems: usize, n: usize, m_max: usize, seed: u64) -> Result<BatteryReport> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(problems);
    let mut ordering_violations = 0;
    let mut adjoint_violations = 0;
    let mut symmetrized_violations = 0;
    for _ in 0..problems {
        let p = random_problem(&mut rng, n, m_max)?;
        let r = principal_eigenpair(&p)?;
        let tol = spectral_tol(r.lambda1);
        let margin = r.mode_ordering_margin();
        if margin < -tol {
            ordering_violations += 1;
        }
        let agap = (r.lambda1 - r.lambda1_adjoint).abs();
        if agap > tol {
            adjoint_violations += 1;
        }
        let sgap = r.lambda1_symmetrized - r.lambda1;
        if sgap < -tol {
            symmetrized_violations += 1;
        }
        rows.push(BatteryRow {
            lambda1: r.lambda1,
            mode_ordering_margin: margin,
            adjoint_gap: agap,
            symmetrized_gap: sgap,
        });
    }
    Ok(BatteryReport { rows, ordering_violations, adjoint_violations, symmetrized_violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::surface_quantities;
    use std::f64::consts::PI;

    fn round_laplacian(n: usize, m_max: usize) -> StabilityProblem {
        StabilityProblem::from_specs(
            MetricProfile::round(),
            ThetaGrid::midpoint(n, PI),
            PotentialSpec::constant(0.0),
            TrigPoly::zero(),
            TrigPoly::zero(),
            m_max,
        )
        .unwrap()
    }

    fn sorted_re(vals: &[Complex64]) -> Vec<f64> {
        let mut v: Vec<f64> = vals.iter().map(|z| z.re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn round_sphere_mode_zero_spectrum() {
        let p = round_laplacian(256, 1);
        let a = match assemble_mode(&p, 0).unwrap() {
            ModeMatrix::Real(a) => a,
            _ => unreachable!(),
        };
        let vals = crate::eigen::eig_real(a.view()).unwrap();
        let re = sorted_re(&vals);
        assert!(re[0].abs() < 1e-4, "lowest {}", re[0]);
        assert!((re[1] - 2.0).abs() < 2e-3);
        assert!((re[2] - 6.0).abs() < 1e-2);
        assert!((re[3] - 12.0).abs() < 5e-2);
    }

    #[test]
    fn round_sphere_mode_one_lowest_is_two() {
        let p = round_laplacian(256, 2);
        let a = match assemble_mode(&p, 1).unwrap() {
            ModeMatrix::Complex(a) => a,
            _ => unreachable!(),
        };
        let vals = crate::eigen::eig_complex(a.view()).unwrap();
        let low = min_re(&vals);
        assert!((low - 2.0).abs() < 1e-3, "m=1 lowest {low}");
        assert!(assemble_mode(&p, 3).is_err());
    }

    #[test]
    fn constant_potential_shifts_the_spectrum_exactly() {
        let p0 = round_laplacian(64, 0);
        let p1 = StabilityProblem::from_specs(
            MetricProfile::round(),
            ThetaGrid::midpoint(64, PI),
            PotentialSpec::constant(2.5),
            TrigPoly::zero(),
            TrigPoly::zero(),
            0,
        )
        .unwrap();
        let a0 = assemble_real(&p0, Part::Full { adjoint: false });
        let a1 = assemble_real(&p1, Part::Full { adjoint: false });
        for i in 0..64 {
            for j in 0..64 {
                let want = a0[[i, j]] + if i == j { 2.5 } else { 0.0 };
                assert!((a1[[i, j]] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn constants_are_exact_eigenfunctions_of_the_round_laplacian() {
        let p = round_laplacian(128, 0);
        let a = assemble_real(&p, Part::Full { adjoint: false });
        for i in 0..128 {
            let row_sum: f64 = (0..128).map(|j| a[[i, j]]).sum();
            assert!(row_sum.abs() < 1e-10, "row {i} sum {row_sum}");
        }
        let r = principal_eigenpair(&p).unwrap();
        assert!(r.lambda1.abs() < 1e-10);
        for &u in &r.u {
            assert!((u - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_q_gives_lambda1_q_and_unit_eigenfunction() {
        let q = 0.7;
        let p = StabilityProblem::from_specs(
            MetricProfile::round(),
            ThetaGrid::midpoint(128, PI),
            PotentialSpec::constant(q),
            TrigPoly::zero(),
            TrigPoly::zero(),
            2,
        )
        .unwrap();
        let r = principal_eigenpair(&p).unwrap();
        assert!((r.lambda1 - q).abs() < 1e-9);
        assert!(r.u.iter().all(|&u| (u - 1.0).abs() < 1e-7));
        assert!((r.lambda1 - r.lambda1_adjoint).abs() < 1e-10);
        assert!((r.lambda1_symmetrized - r.lambda1).abs() < 1e-10);
    }

    #[test]
    fn rigid_round_configuration_has_zero_principal_eigenvalue() {
        let p = StabilityProblem::rigid_round(1.0, 256, 4).unwrap();
        assert!(p.coeffs.q.iter().all(|&q| q.abs() < 1e-12));
        let r = principal_eigenpair(&p).unwrap();
        assert!(r.lambda1.abs() < 1e-6, "lambda1 {}", r.lambda1);
        assert!(r.mode_ordering_margin() > 1.0);
    }

    #[test]
    fn azimuthal_x_matches_symmetric_reduction_exactly() {
        // X purely azimuthal: the m = 0 block is -Lap + (Q - |X^eta|^2)
        let xp = TrigPoly::new(vec![1.0], vec![0.8, -0.2]);
        let p = StabilityProblem::from_specs(
            MetricProfile::round(),
            ThetaGrid::midpoint(192, PI),
            PotentialSpec::constant(0.0),
            TrigPoly::zero(),
            xp,
            0,
        )
        .unwrap();
        let full = assemble_real(&p, Part::Full { adjoint: false });
        let mut sym = assemble_real(&p, Part::Symmetrized);
        for j in 0..p.grid.n() {
            sym[[j, j]] -= p.coeffs.x_norm2[j];
        }
        let l1 = min_re(&crate::eigen::eig_real(full.view()).unwrap());
        let l2 = min_re(&crate::eigen::eig_real(sym.view()).unwrap());
        assert!((l1 - l2).abs() < 1e-12);
        for i in 0..p.grid.n() {
            for j in 0..p.grid.n() {
                assert!((full[[i, j]] - sym[[i, j]]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn assembly_is_consistent_with_the_printed_operator() {
        // apply the assembled m = 0 block to a smooth even function and
        // compare with -u'' - (rho'/rho) u' + 2 X_theta u' + (Q - |X|^2 + div X) u
        let x_theta = TrigPoly::new(vec![0.0, 1.0], vec![0.5, 0.3]);
        let x_phi = TrigPoly::new(vec![1.0], vec![0.4, 0.1]);
        let qspec = PotentialSpec {
            kappa_coeff: 0.0,
            constant: 0.3,
            field: TrigPoly::new(vec![0.0, 0.0, 1.0], vec![0.7]),
        };
        let err_at = |n: usize| -> f64 {
            let p = StabilityProblem::from_specs(
                MetricProfile::round(),
                ThetaGrid::midpoint(n, PI),
                qspec.clone(),
                x_theta.clone(),
                x_phi.clone(),
                0,
            )
            .unwrap();
            let a = assemble_real(&p, Part::Full { adjoint: false });
            let u: Vec<f64> = p.grid.sample(|t| (2.0 * t).cos() + 0.3);
            let mut worst = 0.0f64;
            for (j, &th) in p.grid.nodes().iter().enumerate() {
                if !(n / 4..3 * n / 4).contains(&j) {
                    continue;
                }
                let mut au = 0.0;
                for i in 0..n {
                    au += a[[j, i]] * u[i];
                }
                let up = -2.0 * (2.0 * th).sin();
                let upp = -4.0 * (2.0 * th).cos();
                let uv = (2.0 * th).cos() + 0.3;
                let cot = th.cos() / th.sin();
                let xt = x_theta.eval_u(th);
                let div_x = x_theta.deriv_u(th) + cot * xt;
                let lu = -upp - cot * up
                    + 2.0 * xt * up
                    + (p.coeffs.q[j] - p.coeffs.x_norm2[j] + div_x) * uv;
                worst = worst.max((au - lu).abs());
            }
            worst
        };
        let (e1, e2) = (err_at(128), err_at(256));
        assert!(e2 < 1e-2, "consistency error {e2}");
        let ratio = e1 / e2;
        assert!((2.5..6.0).contains(&ratio), "refinement ratio {ratio}");
    }

    #[test]
    fn adjoint_is_the_measure_weighted_transpose() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = random_problem(&mut rng, 96, 2).unwrap();
        let a = assemble_real(&p, Part::Full { adjoint: false });
        let astar = assemble_real(&p, Part::Full { adjoint: true });
        let w = p.measure();
        // W A* = A^T W exactly, entry by entry
        for i in 0..p.grid.n() {
            for j in 0..p.grid.n() {
                let lhs = w[i] * astar[[i, j]];
                let rhs = a[[j, i]] * w[j];
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                    "({i},{j}): {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn duality_pairing_holds_to_rounding() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = random_problem(&mut rng, 128, 0).unwrap();
        let a = assemble_real(&p, Part::Full { adjoint: false });
        let astar = assemble_real(&p, Part::Full { adjoint: true });
        let w = p.measure();
        let scale = p.metric.scale();
        let phi = p.grid.sample(|t| (t / scale).cos() + 0.3);
        let psi = p.grid.sample(|t| (2.0 * t / scale).cos() - 0.1 * (t / scale).sin());
        let n = p.grid.n();
        let mut pair1 = 0.0;
        let mut pair2 = 0.0;
        for i in 0..n {
            let mut lphi = 0.0;
            let mut lstar_psi = 0.0;
            for j in 0..n {
                lphi += a[[i, j]] * phi[j];
                lstar_psi += astar[[i, j]] * psi[j];
            }
            pair1 += w[i] * psi[i] * lphi;
            pair2 += w[i] * phi[i] * lstar_psi;
        }
        let norm: f64 = phi.iter().map(|v| v * v).sum::<f64>().sqrt()
            * psi.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((pair1 - pair2).abs() <= 1e-12 * norm.max(1.0) * 100.0);
    }

    #[test]
    fn mini_battery_has_no_violations() {
        let rep = mode_ordering_battery(5, 128, 4, 42).unwrap();
        assert_eq!(rep.ordering_violations, 0);
        assert_eq!(rep.adjoint_violations, 0);
        assert_eq!(rep.symmetrized_violations, 0);
        for row in &rep.rows {
            assert!(row.adjoint_gap <= spectral_tol(row.lambda1));
        }
    }

    #[test]
    fn lambda1_converges_at_second_order() {
        let lam_at = |n: usize| -> f64 {
            let p = StabilityProblem::from_specs(
                MetricProfile::poly(1.0, &[0.1]).unwrap(),
                ThetaGrid::midpoint(n, PI),
                PotentialSpec::kappa_minus(0.0),
                TrigPoly::new(vec![0.0, 1.0], vec![0.4]),
                TrigPoly::new(vec![1.0], vec![0.5]),
                0,
            )
            .unwrap();
            principal_eigenpair(&p).unwrap().lambda1
        };
        let (l1, l2, l3) = (lam_at(64), lam_at(128), lam_at(256));
        let order = ((l1 - l2) / (l2 - l3)).abs().log2();
        assert!((order - 2.0).abs() <= 0.3, "order {order}");
    }

    #[test]
    fn inequality_equality_case_and_random_trials() {
        // rigid slice: Q = |X^eta|^2 pointwise, so f = 1 is an exact equality
        let d = ProductData::new(
            MetricProfile::round(),
            vec![0.0],
            TrigPoly::sin_power(2, 0.8),
        )
        .unwrap();
        let p = StabilityProblem::from_product_slice(&d, ThetaGrid::midpoint(256, PI), 2).unwrap();
        let trials = vec![
            TrigPoly::constant(1.0),
            TrigPoly::new(vec![1.0], vec![0.0, 1.0]),
            TrigPoly::new(vec![1.0], vec![0.5, 0.0, -1.0]),
        ];
        let rep = stability_inequality_check(&p, &trials).unwrap();
        assert!(rep.all_hold);
        assert!(rep.rows[0].margin.abs() <= 1e-10 * rep.rows[0].rhs.abs().max(1.0));

        // trivially stable: X = 0, Q = 0 gives 0 <= |grad f|^2
        let p0 = round_laplacian(128, 0);
        let rep0 = stability_inequality_check(&p0, &trials).unwrap();
        assert!(rep0.all_hold);
        assert!(rep0.rows[1].rhs > 0.0);

        // unstable problems are rejected with the eigenvalue in the message
        let punst = StabilityProblem::from_specs(
            MetricProfile::round(),
            ThetaGrid::midpoint(64, PI),
            PotentialSpec::constant(-3.0),
            TrigPoly::zero(),
            TrigPoly::zero(),
            0,
        )
        .unwrap();
        let err = stability_inequality_check(&punst, &trials).unwrap_err();
        assert!(format!("{err}").contains("lambda1"));
    }

    #[test]
    fn first_variation_matches_operator_on_slices() {
        // product data with rotation, phi = cos(theta)
        let d = ProductData::new(
            MetricProfile::round(),
            vec![0.3, 0.2],
            TrigPoly::sin_power(2, 0.9),
        )
        .unwrap();
        let grid = ThetaGrid::midpoint(256, PI);
        let s = GraphSurface::constant(&d.metric, &grid, 0.0);
        let phi = TrigPoly::new(vec![1.0], vec![0.0, 1.0]);
        let rep = first_variation_check(&d, &s, &phi, 1e-3).unwrap();
        assert!(
            rep.extrapolated_rel_err <= 1e-4,
            "extrapolated rel err {}",
            rep.extrapolated_rel_err
        );

        // K = 0, phi = 1: both sides vanish to rounding
        let d0 = ProductData::vacuum_slice(MetricProfile::round());
        let s0 = GraphSurface::constant(&d0.metric, &grid, 0.0);
        let rep0 = first_variation_check(&d0, &s0, &TrigPoly::constant(1.0), 1e-3).unwrap();
        assert!(rep0.extrapolated_rel_err <= 1e-5);

        // non-constant base surfaces are rejected
        let sbad = GraphSurface::from_fn(&d.metric, &grid, |t| 0.1 * t.cos());
        assert!(first_variation_check(&d, &sbad, &phi, 1e-3).is_err());
    }

    #[test]
    fn slice_operator_coefficients_cancel_to_the_laplacian() {
        // on product slices Q = |X|^2 and X_theta = 0, so L = -Lap exactly
        let d = ProductData::new(
            MetricProfile::poly(1.0, &[0.2]).unwrap(),
            vec![1.0],
            TrigPoly::sin_power(3, 0.7),
        )
        .unwrap();
        let grid = ThetaGrid::midpoint(64, PI);
        let p = StabilityProblem::from_product_slice(&d, grid.clone(), 0).unwrap();
        let a = assemble_real(&p, Part::Full { adjoint: false });
        let mut lap = assemble_real(&p, Part::Symmetrized);
        for j in 0..grid.n() {
            lap[[j, j]] -= p.coeffs.q[j];
        }
        for i in 0..grid.n() {
            for j in 0..grid.n() {
                assert!((a[[i, j]] - lap[[i, j]]).abs() < 1e-12);
            }
        }
        // consistency with the induced quantities route
        let s = GraphSurface::constant(&d.metric, &grid, 0.0);
        let q = surface_quantities(&InitialData::Product(d.clone()), &s, &grid).unwrap();
        for (j, &t) in grid.nodes().iter().enumerate() {
            assert!((q.x_eta_norm2[j] - p.coeffs.x_norm2[j]).abs() < 1e-13, "node {j} at {t}");
        }
    }
}
