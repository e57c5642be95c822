//! Central finite-difference oracles.
//!
//! These are deliberately simple second-order stencils. They exist to
//! cross-check closed-form derivatives, not to be fast. Functions return
//! `None` to signal "outside the domain", which turns into a
//! [`FdError::StencilOutOfDomain`] naming the offending coordinate.

use crate::error::FdError;
use nalgebra::{DMatrix, DVector};

/// Default step size used by the verification suites.
pub const DEFAULT_STEP: f64 = 1e-5;

fn probe<F>(f: &F, x: &DVector<f64>, coordinate: usize) -> Result<f64, FdError>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    f(x).ok_or(FdError::StencilOutOfDomain { coordinate })
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient<F>(f: &F, x: &DVector<f64>, h: f64) -> Result<DVector<f64>, FdError>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    if !h.is_finite() || h <= 0.0 {
        return Err(FdError::InvalidStep { h });
    }
    let n = x.len();
    let mut g = DVector::zeros(n);
    let mut xp = x.clone();
    for i in 0..n {
        xp[i] = x[i] + h;
        let fp = probe(&f, &xp, i)?;
        xp[i] = x[i] - h;
        let fm = probe(&f, &xp, i)?;
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// Central-difference Hessian of a scalar function.
///
/// Uses the standard nine-point mixed stencil; accuracy is O(h^2) in exact
/// arithmetic but roundoff limits it to roughly `|f| * eps / h^2` in
/// practice, so with `h = 1e-5` expect absolute errors near 1e-5 on
/// entries of order one.
pub fn fd_hessian<F>(f: &F, x: &DVector<f64>, h: f64) -> Result<DMatrix<f64>, FdError>
where
    F: Fn(&DVector<f64>) -> Option<f64>,
{
    if !h.is_finite() || h <= 0.0 {
        return Err(FdError::InvalidStep { h });
    }
    let n = x.len();
    let f0 = probe(&f, x, 0)?;
    let mut hess = DMatrix::zeros(n, n);
    let mut xp = x.clone();
    for i in 0..n {
        xp[i] = x[i] + h;
        let fp = probe(&f, &xp, i)?;
        xp[i] = x[i] - h;
        let fm = probe(&f, &xp, i)?;
        xp[i] = x[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            xp[i] = x[i] + h;
            xp[j] = x[j] + h;
            let fpp = probe(&f, &xp, j)?;
            xp[j] = x[j] - h;
            let fpm = probe(&f, &xp, j)?;
            xp[i] = x[i] - h;
            xp[j] = x[j] + h;
            let fmp = probe(&f, &xp, j)?;
            xp[j] = x[j] - h;
            let fmm = probe(&f, &xp, j)?;
            xp[i] = x[i];
            xp[j] = x[j];
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Hessian obtained by central-differencing a closed-form gradient, then
/// symmetrizing. Far less roundoff-limited than [`fd_hessian`] (error is
/// `|g| * eps / h` instead of `|f| * eps / h^2`), so this is the right
/// oracle when the tolerance is tighter than ~1e-4.
pub fn fd_hessian_from_gradient<G>(
    grad: &G,
    x: &DVector<f64>,
    h: f64,
) -> Result<DMatrix<f64>, FdError>
where
    G: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    if !h.is_finite() || h <= 0.0 {
        return Err(FdError::InvalidStep { h });
    }
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut xp = x.clone();
    for j in 0..n {
        xp[j] = x[j] + h;
        let gp = grad(&xp).ok_or(FdError::StencilOutOfDomain { coordinate: j })?;
        xp[j] = x[j] - h;
        let gm = grad(&xp).ok_or(FdError::StencilOutOfDomain { coordinate: j })?;
        xp[j] = x[j];
        let col = (gp - gm) / (2.0 * h);
        jac.set_column(j, &col);
    }
    // d(g_i)/dx_j and d(g_j)/dx_i estimate the same mixed partial; average them.
    Ok(0.5 * (&jac + jac.transpose()))
}
