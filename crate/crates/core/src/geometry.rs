//! Points on the intersection of the unit sphere with the unit-sum plane.
//!
//! Solutions of `Σa_i = 1`, `Σa_i² = 1` in `ℝⁿ` are written `a = U b` with
//! `U` orthogonal, `u_n = (1,…,1)/√n` and `b_n = 1/√n`. The remaining
//! coordinates `(b₁,…,b_{n−1})` lie on a sphere of radius `√(1 − 1/n)` and
//! are generated with nested spherical coordinates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_dim, orthogonality_residual};

/// Columns with residual norm below this after projection are dependent.
const DEPENDENT_NORM: f64 = 1e-6;

/// Orthogonal `n×n` matrix whose last column is `(1,…,1)/√n`.
///
/// Modified Gram–Schmidt (two passes) over `e₁, e₂, …` in index order,
/// starting from the fixed last column; the first dependent candidate is
/// skipped. For `n = 2` the first column is `(1, −1)/√2`.
pub fn complete_basis(n: usize) -> Result<DMatrix<f64>> {
    check_dim(n)?;
    let mut accepted: Vec<DVector<f64>> = vec![DVector::from_element(n, 1.0 / (n as f64).sqrt())];
    for k in 0..n {
        if accepted.len() == n {
            break;
        }
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        for _ in 0..2 {
            for u in &accepted {
                let c = u.dot(&v);
                v.axpy(-c, u, 1.0);
            }
        }
        let norm = v.norm();
        if norm > DEPENDENT_NORM {
            accepted.push(v / norm);
        }
    }
    let mut u = DMatrix::zeros(n, n);
    for (j, col) in accepted[1..].iter().enumerate() {
        u.set_column(j, col);
    }
    u.set_column(n - 1, &accepted[0]);
    Ok(u)
}

/// Point of the `(n−2)`-sphere of the given radius in `ℝ^{n−1}`:
///
/// ```text
/// b₁ = ρ cos t₁
/// b₂ = ρ sin t₁ cos t₂
/// ⋮
/// b_{n−1} = ρ sin t₁ ⋯ sin t_{n−2}
/// ```
///
/// For `n = 2` there are no angles and the point is `(ρ)`.
pub fn sphere_point(n: usize, angles: &[f64], radius: f64) -> Result<Vec<f64>> {
    check_dim(n)?;
    if angles.len() != n - 2 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} needs {} angles, got {}",
            n - 2,
            angles.len()
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let mut out = Vec::with_capacity(n - 1);
    let mut r = radius;
    for &t in angles {
        out.push(r * t.cos());
        r *= t.sin();
    }
    out.push(r);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereParam {
    pub n: usize,
    pub angles: Vec<f64>,
    /// Negates `(b₁,…,b_{n−1})`. At `n = 2` this is the only freedom left.
    #[serde(default)]
    pub antipode: bool,
}

impl SphereParam {
    pub fn new(n: usize, angles: Vec<f64>) -> Self {
        Self {
            n,
            angles,
            antipode: false,
        }
    }

    pub fn radius_sq(&self) -> f64 {
        1.0 - 1.0 / self.n as f64
    }

    /// Full coefficient vector `b`, with `b_n = 1/√n`.
    pub fn coefficients(&self) -> Result<Vec<f64>> {
        let mut b = sphere_point(self.n, &self.angles, self.radius_sq().sqrt())?;
        if self.antipode {
            b.iter_mut().for_each(|x| *x = -*x);
        }
        b.push(1.0 / (self.n as f64).sqrt());
        Ok(b)
    }

    pub fn point(&self) -> Result<Vec<f64>> {
        let u = complete_basis(self.n)?;
        let b = DVector::from_vec(self.coefficients()?);
        Ok((u * b).iter().copied().collect())
    }
}

/// `a = U b` satisfying `Σa = 1` and `Σa² = 1`; entries may be negative.
pub fn simplex_sphere_point(n: usize, angles: &[f64]) -> Result<Vec<f64>> {
    SphereParam::new(n, angles.to_vec()).point()
}

/// `(|Σa − 1|, |Σa² − 1|)`.
pub fn constraint_residuals(a: &[f64]) -> (f64, f64) {
    let sum: f64 = a.iter().sum();
    let sq: f64 = a.iter().map(|x| x * x).sum();
    ((sum - 1.0).abs(), (sq - 1.0).abs())
}

pub fn basis_residual(n: usize) -> Result<f64> {
    Ok(orthogonality_residual(&complete_basis(n)?))
}
