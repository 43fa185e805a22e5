//! Small dense helpers used by several modules: a pivoted Gaussian solve for
//! tiny systems, finite-difference weights on arbitrary points, and a
//! least-squares line fit for refinement-order studies.

use crate::error::{numerical, Result};

/// Solves `a * x = b` in place for a small dense row-major system.
/// `a` has shape n x n flattened; `b` has length n and receives the solution.
pub fn solve_small(a: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    for col in 0..n {
        let mut piv = col;
        let mut max = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > max {
                max = v;
                piv = row;
            }
        }
        if max == 0.0 || !max.is_finite() {
            return Err(numerical(format!("singular {n}x{n} system at column {col}")));
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let m = a[row * n + col] / d;
            if m == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= m * a[col * n + k];
            }
            b[row] -= m * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col * n + k] * b[k];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(())
}

/// Weights `w` such that `sum_i w_i f(x_i)` approximates the `order`-th
/// derivative of `f` at 0, exact on polynomials of degree < points.len().
///
/// Solved from the moment conditions `sum_i w_i x_i^k = k! delta_{k,order}`.
pub fn fd_weights(points: &[f64], order: usize) -> Result<Vec<f64>> {
    let n = points.len();
    assert!(order < n);
    // Scale by the largest node for conditioning.
    let scale = points.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    let mut kfact = 1.0;
    for k in 0..n {
        if k > 0 {
            kfact *= k as f64;
        }
        for (i, &x) in points.iter().enumerate() {
            a[k * n + i] = (x / scale).powi(k as i32);
        }
        b[k] = if k == order { kfact } else { 0.0 };
    }
    solve_small(&mut a, &mut b, n)?;
    let s = scale.powi(order as i32);
    for w in b.iter_mut() {
        *w /= s;
    }
    Ok(b)
}

/// Least-squares fit y = slope*x + intercept.
pub fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![5.0, 10.0];
        solve_small(&mut a, &mut b, 2).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-14);
        assert!((b[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn fd_weights_differentiate_polynomials() {
        let pts = [0.0, 0.5, 1.5, 2.5, 3.5];
        let w = fd_weights(&pts, 1).unwrap();
        // d/dx (x^3) at 0 is 0; d/dx (x) is 1
        let d_lin: f64 = pts.iter().zip(&w).map(|(x, w)| w * x).sum();
        let d_cub: f64 = pts.iter().zip(&w).map(|(x, w)| w * x * x * x).sum();
        assert!((d_lin - 1.0).abs() < 1e-12);
        assert!(d_cub.abs() < 1e-11);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.1, 4.1, 6.1, 8.1];
        let (s, c) = line_fit(&x, &y);
        assert!((s - 2.0).abs() < 1e-12);
        assert!((c - 0.1).abs() < 1e-12);
    }
}
