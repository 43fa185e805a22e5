//! Dense linear algebra on top of the system LAPACK.
//!
//! Bindings are hand-rolled for the four routines the toolkit needs: full
//! nonsymmetric spectra (dgeev/zgeev), a dense solve (dgesv) and singular
//! values (dgesvd). Matrices are converted to column-major at the boundary.

use crate::error::{numerical, Result};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use std::os::raw::c_char;

#[link(name = "lapack")]
extern "C" {
    fn dgeev_(
        jobvl: *const c_char,
        jobvr: *const c_char,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        wr: *mut f64,
        wi: *mut f64,
        vl: *mut f64,
        ldvl: *const i32,
        vr: *mut f64,
        ldvr: *const i32,
        work: *mut f64,
        lwork: *const i32,
        info: *mut i32,
    );
    fn zgeev_(
        jobvl: *const c_char,
        jobvr: *const c_char,
        n: *const i32,
        a: *mut Complex64,
        lda: *const i32,
        w: *mut Complex64,
        vl: *mut Complex64,
        ldvl: *const i32,
        vr: *mut Complex64,
        ldvr: *const i32,
        work: *mut Complex64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );
    fn dgesv_(
        n: *const i32,
        nrhs: *const i32,
        a: *mut f64,
        lda: *const i32,
        ipiv: *mut i32,
        b: *mut f64,
        ldb: *const i32,
        info: *mut i32,
    );
    fn dgesvd_(
        jobu: *const c_char,
        jobvt: *const c_char,
        m: *const i32,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        s: *mut f64,
        u: *mut f64,
        ldu: *const i32,
        vt: *mut f64,
        ldvt: *const i32,
        work: *mut f64,
        lwork: *const i32,
        info: *mut i32,
    );
}

fn to_col_major(a: ArrayView2<f64>) -> (Vec<f64>, i32) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix expected");
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            out[i + j * n] = a[[i, j]];
        }
    }
    (out, n as i32)
}

fn to_col_major_c(a: ArrayView2<Complex64>) -> (Vec<Complex64>, i32) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix expected");
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for i in 0..n {
            out[i + j * n] = a[[i, j]];
        }
    }
    (out, n as i32)
}

/// Full spectrum of a real dense matrix.
pub fn eig_real(a: ArrayView2<f64>) -> Result<Vec<Complex64>> {
    Ok(eig_real_inner(a, false)?.0)
}

/// Full spectrum plus right eigenvectors (columns).
pub fn eig_real_with_vectors(a: ArrayView2<f64>) -> Result<(Vec<Complex64>, Array2<Complex64>)> {
    let (vals, vecs) = eig_real_inner(a, true)?;
    Ok((vals, vecs.expect("vectors requested")))
}

fn eig_real_inner(
    a: ArrayView2<f64>,
    vectors: bool,
) -> Result<(Vec<Complex64>, Option<Array2<Complex64>>)> {
    let (mut acm, n) = to_col_major(a);
    let nu = n as usize;
    let mut wr = vec![0.0; nu];
    let mut wi = vec![0.0; nu];
    let mut vr = vec![0.0; if vectors { nu * nu } else { 1 }];
    let jobvr = if vectors { b'V' } else { b'N' } as c_char;
    let jobvl = b'N' as c_char;
    let mut info = 0i32;
    // workspace query
    let mut wkopt = 0.0f64;
    let lquery = -1i32;
    unsafe {
        dgeev_(
            &jobvl, &jobvr, &n, acm.as_mut_ptr(), &n, wr.as_mut_ptr(), wi.as_mut_ptr(),
            std::ptr::null_mut(), &1, vr.as_mut_ptr(), &n, &mut wkopt, &lquery, &mut info,
        );
    }
    if info != 0 {
        return Err(numerical(format!("dgeev workspace query failed (info = {info})")));
    }
    let lwork = wkopt as i32;
    let mut work = vec![0.0; lwork as usize];
    unsafe {
        dgeev_(
            &jobvl, &jobvr, &n, acm.as_mut_ptr(), &n, wr.as_mut_ptr(), wi.as_mut_ptr(),
            std::ptr::null_mut(), &1, vr.as_mut_ptr(), &n, work.as_mut_ptr(), &lwork, &mut info,
        );
    }
    if info != 0 {
        return Err(numerical(format!("dgeev failed to converge (info = {info})")));
    }
    let vals: Vec<Complex64> = wr.iter().zip(&wi).map(|(&r, &i)| Complex64::new(r, i)).collect();
    let vecs = if vectors {
        let mut v = Array2::<Complex64>::zeros((nu, nu));
        let mut j = 0;
        while j < nu {
            if wi[j] != 0.0 && j + 1 < nu {
                // conjugate pair packed as (re, im) columns
                for i in 0..nu {
                    let re = vr[i + j * nu];
                    let im = vr[i + (j + 1) * nu];
                    v[[i, j]] = Complex64::new(re, im);
                    v[[i, j + 1]] = Complex64::new(re, -im);
                }
                j += 2;
            } else {
                for i in 0..nu {
                    v[[i, j]] = Complex64::new(vr[i + j * nu], 0.0);
                }
                j += 1;
            }
        }
        Some(v)
    } else {
        None
    };
    Ok((vals, vecs))
}

/// Full spectrum of a complex dense matrix.
pub fn eig_complex(a: ArrayView2<Complex64>) -> Result<Vec<Complex64>> {
    let (mut acm, n) = to_col_major_c(a);
    let nu = n as usize;
    let mut w = vec![Complex64::new(0.0, 0.0); nu];
    let jobn = b'N' as c_char;
    let mut rwork = vec![0.0; 2 * nu];
    let mut info = 0i32;
    let mut wkopt = Complex64::new(0.0, 0.0);
    let lquery = -1i32;
    unsafe {
        zgeev_(
            &jobn, &jobn, &n, acm.as_mut_ptr(), &n, w.as_mut_ptr(),
            std::ptr::null_mut(), &1, std::ptr::null_mut(), &1,
            &mut wkopt, &lquery, rwork.as_mut_ptr(), &mut info,
        );
    }
    if info != 0 {
        return Err(numerical(format!("zgeev workspace query failed (info = {info})")));
    }
    let lwork = wkopt.re as i32;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zgeev_(
            &jobn, &jobn, &n, acm.as_mut_ptr(), &n, w.as_mut_ptr(),
            std::ptr::null_mut(), &1, std::ptr::null_mut(), &1,
            work.as_mut_ptr(), &lwork, rwork.as_mut_ptr(), &mut info,
        );
    }
    if info != 0 {
        return Err(numerical(format!("zgeev failed to converge (info = {info})")));
    }
    Ok(w)
}

/// Solves a x = b for a single right-hand side.
pub fn solve_dense(a: ArrayView2<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let (mut acm, n) = to_col_major(a);
    assert_eq!(b.len(), n as usize);
    let mut x = b.to_vec();
    let mut ipiv = vec![0i32; n as usize];
    let nrhs = 1i32;
    let mut info = 0i32;
    unsafe {
        dgesv_(
            &n, &nrhs, acm.as_mut_ptr(), &n, ipiv.as_mut_ptr(), x.as_mut_ptr(), &n, &mut info,
        );
    }
    if info != 0 {
        return Err(numerical(format!(
            "dense solve failed: matrix singular at pivot {info}"
        )));
    }
    Ok(x)
}

/// Smallest singular value; used to diagnose near-singular bordered systems.
pub fn smallest_singular_value(a: ArrayView2<f64>) -> Result<f64> {
    let (mut acm, n) = to_col_major(a);
    let nu = n as usize;
    let mut s = vec![0.0; nu];
    let jobn = b'N' as c_char;
    let mut info = 0i32;
    let lwork = (5 * nu.max(8)) as i32;
    let mut work = vec![0.0; lwork as usize];
    unsafe {
        dgesvd_(
            &jobn, &jobn, &n, &n, acm.as_mut_ptr(), &n, s.as_mut_ptr(),
            std::ptr::null_mut(), &1, std::ptr::null_mut(), &1,
            work.as_mut_ptr(), &lwork, &mut info,
        );
    }
    if info != 0 {
        return Err(numerical(format!("dgesvd failed (info = {info})")));
    }
    Ok(*s.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn real_spectrum_of_cyclic_matrix() {
        let a = array![[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        let mut vals = eig_real(a.view()).unwrap();
        vals.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((vals[2].re - 1.0).abs() < 1e-12);
        assert!((vals[0].re + 0.5).abs() < 1e-12);
        assert!((vals[0].im.abs() - 0.75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eigenvectors_satisfy_the_eigen_equation() {
        let a = array![[2.0, 1.0, 0.5], [0.3, 1.0, 0.0], [0.1, -0.2, 3.0]];
        let (vals, vecs) = eig_real_with_vectors(a.view()).unwrap();
        for (k, lam) in vals.iter().enumerate() {
            for i in 0..3 {
                let mut av = Complex64::new(0.0, 0.0);
                for j in 0..3 {
                    av += Complex64::new(a[[i, j]], 0.0) * vecs[[j, k]];
                }
                let r = (av - lam * vecs[[i, k]]).norm();
                assert!(r < 1e-12, "residual {r}");
            }
        }
    }

    #[test]
    fn complex_spectrum_of_hermitian_matrix_is_real() {
        let a = array![
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
            [Complex64::new(0.0, -1.0), Complex64::new(1.0, 0.0)]
        ];
        let vals = eig_complex(a.view()).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let mut res: Vec<f64> = vals.iter().map(|v| v.re).collect();
        res.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((res[0] - (1.0 - phi)).abs() < 1e-12);
        assert!((res[1] - phi).abs() < 1e-12);
        assert!(vals.iter().all(|v| v.im.abs() < 1e-12));
    }

    #[test]
    fn solve_and_svd() {
        let a = array![[4.0, 1.0], [2.0, 3.0]];
        let x = solve_dense(a.view(), &[1.0, 5.0]).unwrap();
        assert!((x[0] + 0.2).abs() < 1e-13);
        assert!((x[1] - 1.8).abs() < 1e-13);
        let s = smallest_singular_value(a.view()).unwrap();
        // singular values of [[4,1],[2,3]]: sqrt of eigenvalues of A^T A
        assert!(s > 0.0 && s < 4.0);
        let sing = array![[1.0, 2.0], [2.0, 4.0]];
        assert!(smallest_singular_value(sing.view()).unwrap() < 1e-14);
    }
}
