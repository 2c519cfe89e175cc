//! Orthogonal quasi-bistochastic 3×3 dynamics.
//!
//! Every such matrix is either a rotation `S₊(φ) = q₀ I + q₁ Π + q₂ Π²`
//! (determinant +1, continuous, a one-parameter group) or a reflection
//! `S₋(φ) = S₊(φ) R` (determinant −1). The reflections cannot be reached
//! continuously from the identity and are tagged unphysical.

use std::f64::consts::{FRAC_PI_6, PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{PermutationMatrix, QuasiBistochasticMatrix, Tolerances};

/// Tolerance for matching an orthogonal matrix against the two families.
pub const FAMILY_FIT_TOL: f64 = 1e-8;

pub fn reduce_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `q_k(φ) = 1/3 (1 + 2 Re(ω^k e^{iφ}))`, written out per component.
pub fn q_coefficients(phi: f64) -> [f64; 3] {
    [
        1.0 / 3.0 + 2.0 / 3.0 * phi.cos(),
        1.0 / 3.0 - 2.0 / 3.0 * (FRAC_PI_6 + phi).sin(),
        1.0 / 3.0 - 2.0 / 3.0 * (FRAC_PI_6 - phi).sin(),
    ]
}

/// `dq_k/dφ`.
pub fn q_derivatives(phi: f64) -> [f64; 3] {
    [
        -2.0 / 3.0 * phi.sin(),
        -2.0 / 3.0 * (FRAC_PI_6 + phi).cos(),
        2.0 / 3.0 * (FRAC_PI_6 - phi).cos(),
    ]
}

/// Circulant pattern `[[a,c,b],[b,a,c],[c,b,a]]` for coefficients `(a,b,c)`.
pub(crate) fn circulant(q: [f64; 3]) -> DMatrix<f64> {
    let [q0, q1, q2] = q;
    DMatrix::from_row_slice(3, 3, &[q0, q2, q1, q1, q0, q2, q2, q1, q0])
}

/// Anti-circulant pattern `[[a,b,c],[b,c,a],[c,a,b]]`.
fn anti_circulant(q: [f64; 3]) -> DMatrix<f64> {
    let [q0, q1, q2] = q;
    DMatrix::from_row_slice(3, 3, &[q0, q1, q2, q1, q2, q0, q2, q0, q1])
}

pub fn make_splus(phi: f64) -> QuasiBistochasticMatrix {
    QuasiBistochasticMatrix::from_matrix_unchecked(circulant(q_coefficients(phi)))
}

pub fn make_sminus(phi: f64) -> QuasiBistochasticMatrix {
    QuasiBistochasticMatrix::from_matrix_unchecked(anti_circulant(q_coefficients(phi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    pub fn determinant_sign(self) -> i8 {
        match self {
            Chirality::Plus => 1,
            Chirality::Minus => -1,
        }
    }
}

/// A member of either d=3 family, identified by angle and chirality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationGenerator3 {
    phi: f64,
    chirality: Chirality,
}

impl RotationGenerator3 {
    pub fn new(phi: f64, chirality: Chirality) -> Self {
        Self {
            phi: reduce_angle(phi),
            chirality,
        }
    }

    pub fn plus(phi: f64) -> Self {
        Self::new(phi, Chirality::Plus)
    }

    pub fn minus(phi: f64) -> Self {
        Self::new(phi, Chirality::Minus)
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    /// Only the determinant +1 family is connected to the identity.
    pub fn is_physical(&self) -> bool {
        self.chirality == Chirality::Plus
    }

    pub fn coefficients(&self) -> [f64; 3] {
        q_coefficients(self.phi)
    }

    pub fn matrix(&self) -> QuasiBistochasticMatrix {
        match self.chirality {
            Chirality::Plus => make_splus(self.phi),
            Chirality::Minus => make_sminus(self.phi),
        }
    }
}

/// Closed-form product `a · b` (apply `b` first).
///
/// Uses `R S₊(φ) R = S₊(−φ)`, so the union of both families is closed:
/// `S₋(a)S₋(b) = S₊(a−b)`, `S₊(a)S₋(b) = S₋(a+b)`, `S₋(a)S₊(b) = S₋(a−b)`.
pub fn compose(a: RotationGenerator3, b: RotationGenerator3) -> RotationGenerator3 {
    use Chirality::*;
    match (a.chirality, b.chirality) {
        (Plus, Plus) => RotationGenerator3::plus(a.phi + b.phi),
        (Minus, Minus) => RotationGenerator3::plus(a.phi - b.phi),
        (Plus, Minus) => RotationGenerator3::minus(a.phi + b.phi),
        (Minus, Plus) => RotationGenerator3::minus(a.phi - b.phi),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Classification3 {
    Splus { phi: f64, residual: f64 },
    Sminus { phi: f64, residual: f64 },
    NotOrthogonal { orthogonality_residual: f64 },
}

impl Classification3 {
    pub fn generator(&self) -> Option<RotationGenerator3> {
        match *self {
            Classification3::Splus { phi, .. } => Some(RotationGenerator3::plus(phi)),
            Classification3::Sminus { phi, .. } => Some(RotationGenerator3::minus(phi)),
            Classification3::NotOrthogonal { .. } => None,
        }
    }
}

/// Angle whose `q(φ)` equals the given coefficient triple, assuming it lies
/// on the solution circle.
pub fn angle_from_coefficients(q: [f64; 3]) -> f64 {
    let cos_phi = (3.0 * q[0] - 1.0) / 2.0;
    let sin_phi = (q[2] - q[1]) * 3.0_f64.sqrt() / 2.0;
    reduce_angle(sin_phi.atan2(cos_phi))
}

/// Sorts an orthogonal quasi-bistochastic 3×3 matrix into its family and
/// recovers the angle.
///
/// An orthogonal matrix matching neither family is a [`Error::Structural`]
/// failure: the two families are claimed to be exhaustive.
pub fn classify_orthogonal_qbistoch3(s: &QuasiBistochasticMatrix) -> Result<Classification3> {
    classify_within(s, &Tolerances::DEFAULT)
}

pub fn classify_within(s: &QuasiBistochasticMatrix, tol: &Tolerances) -> Result<Classification3> {
    if s.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: s.dim(),
        });
    }
    let orth = s.orthogonality_residual();
    if orth > tol.orth {
        return Ok(Classification3::NotOrthogonal {
            orthogonality_residual: orth,
        });
    }
    // Both patterns carry (q₀, q₁, q₂) down the first column.
    let q = [s.get(0, 0), s.get(1, 0), s.get(2, 0)];
    let phi = angle_from_coefficients(q);
    let plus_residual = s.max_abs_diff(&make_splus(phi));
    let minus_residual = s.max_abs_diff(&make_sminus(phi));
    if plus_residual <= FAMILY_FIT_TOL && plus_residual <= minus_residual {
        Ok(Classification3::Splus {
            phi,
            residual: plus_residual,
        })
    } else if minus_residual <= FAMILY_FIT_TOL {
        Ok(Classification3::Sminus {
            phi,
            residual: minus_residual,
        })
    } else {
        Err(Error::Structural(format!(
            "orthogonal quasi-bistochastic matrix fits neither family \
             (S+ residual {plus_residual:e}, S- residual {minus_residual:e})"
        )))
    }
}

/// Signed expansion of a 3×3 quasi-bistochastic matrix over the six
/// permutations: `S = Σ q_k Π^k + Σ r_k Π^k R`.
///
/// The six permutation matrices span only five dimensions
/// (`I + Π + Π² = R + ΠR + Π²R`), so coefficients are defined up to the
/// shift `q_k += t, r_k −= t`. The canonical representative is the one of
/// minimum Euclidean norm, for which `Σ q_k = Σ r_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvNDecomposition3 {
    pub q: [f64; 3],
    pub r: [f64; 3],
    pub canonical: bool,
}

impl BvNDecomposition3 {
    pub fn coefficient_sum(&self) -> f64 {
        self.q.iter().chain(self.r.iter()).sum()
    }

    /// Moves along the gauge direction; the reconstructed matrix is unchanged.
    pub fn gauge_shift(&self, t: f64) -> Self {
        Self {
            q: self.q.map(|x| x + t),
            r: self.r.map(|x| x - t),
            canonical: t == 0.0 && self.canonical,
        }
    }

    /// Projects onto the minimum-norm representative.
    pub fn canonicalize(&self) -> Self {
        let t = (self.r.iter().sum::<f64>() - self.q.iter().sum::<f64>()) / 6.0;
        Self {
            canonical: true,
            ..self.gauge_shift(t)
        }
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        permutation_basis3()
            .iter()
            .zip(self.q.iter().chain(self.r.iter()))
            .fold(DMatrix::zeros(3, 3), |acc, (p, &c)| acc + p * c)
    }
}

/// `[I, Π, Π², R, ΠR, Π²R]`.
pub fn permutation_basis3() -> [DMatrix<f64>; 6] {
    let pi = PermutationMatrix::pi3();
    let r = PermutationMatrix::r3();
    let pk = |k: usize| pi.pow(k);
    let pkr = |k: usize| pi.pow(k).compose(&r).expect("d=3");
    [
        pk(0).to_matrix(),
        pk(1).to_matrix(),
        pk(2).to_matrix(),
        pkr(0).to_matrix(),
        pkr(1).to_matrix(),
        pkr(2).to_matrix(),
    ]
}

pub fn decompose_bvn(s: &QuasiBistochasticMatrix) -> Result<BvNDecomposition3> {
    if s.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: s.dim(),
        });
    }
    let basis = permutation_basis3();
    let design = DMatrix::from_fn(9, 6, |row, col| basis[col][(row / 3, row % 3)]);
    let target = DVector::from_fn(9, |row, _| s.get(row / 3, row % 3));
    let coeffs = design
        .svd(true, true)
        .solve(&target, 1e-12)
        .map_err(|e| Error::Structural(format!("least-squares solve failed: {e}")))?;
    Ok(BvNDecomposition3 {
        q: [coeffs[0], coeffs[1], coeffs[2]],
        r: [coeffs[3], coeffs[4], coeffs[5]],
        canonical: true,
    })
}

/// Result of scanning the 2×2 family `[[q, 1−q], [1−q, q]]` for orthogonal
/// members.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct D2NoGoReport {
    pub step: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub grid_points: usize,
    pub orthogonal_points: Vec<f64>,
    /// Smallest orthogonality residual at a grid point not in `{0, 1}`.
    pub min_residual_elsewhere: f64,
}

impl D2NoGoReport {
    pub fn only_permutations(&self) -> bool {
        self.orthogonal_points.len() == 2
            && self.orthogonal_points.iter().any(|&q| q.abs() <= 1e-6)
            && self
                .orthogonal_points
                .iter()
                .any(|&q| (q - 1.0).abs() <= 1e-6)
    }
}

pub fn d2_matrix(q: f64) -> QuasiBistochasticMatrix {
    QuasiBistochasticMatrix::from_matrix_unchecked(DMatrix::from_row_slice(
        2,
        2,
        &[q, 1.0 - q, 1.0 - q, q],
    ))
}

/// Sweeps `q ∈ [−1, 2]` on a grid of the given step.
pub fn d2_nogo_check(step: f64) -> Result<D2NoGoReport> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "grid step {step} not in (0, 0.5]"
        )));
    }
    let per_unit = (1.0 / step).round() as i64;
    let tol = Tolerances::DEFAULT;
    let mut orthogonal_points = Vec::new();
    let mut min_residual_elsewhere = f64::INFINITY;
    let mut grid_points = 0;
    for i in -per_unit..=2 * per_unit {
        let q = i as f64 / per_unit as f64;
        grid_points += 1;
        let residual = d2_matrix(q).orthogonality_residual();
        if residual <= tol.orth {
            orthogonal_points.push(q);
        } else if i != 0 && i != per_unit {
            min_residual_elsewhere = min_residual_elsewhere.min(residual);
        }
    }
    Ok(D2NoGoReport {
        step: 1.0 / per_unit as f64,
        q_min: -1.0,
        q_max: 2.0,
        grid_points,
        orthogonal_points,
        min_residual_elsewhere,
    })
}

/// The three angles at which `S₊` is a permutation.
pub fn permutation_angles() -> [f64; 3] {
    [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]
}
