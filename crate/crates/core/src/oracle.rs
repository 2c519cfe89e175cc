//! Reference qubit kinematics as real rotations of the Bloch vector, and the
//! frame lift that carries them onto the lattice.
//!
//! For a frame with `(d−1) × d` column matrix `B`, states are
//! `p = (1 + Bᵀb)/d` and `b = (d−1) B p`. Requiring `S p(b) = p(O b)` for all
//! `b` gives
//!
//! ```text
//! S = J/d + ((d−1)/d) Bᵀ O B
//! ```
//!
//! with `J` the all-ones matrix.

use nalgebra::{DMatrix, Quaternion, UnitQuaternion};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{orthogonality_residual, DenseJson, QuasiBistochasticMatrix, Tolerances};
use crate::states::Frame;

pub const ROTATION_TOL: f64 = 1e-12;

/// An orthogonal map of the Bloch plane (2×2) or Bloch space (3×3).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DenseJson", into = "DenseJson")]
pub struct OrthogonalMap {
    matrix: DMatrix<f64>,
}

impl OrthogonalMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if !(matrix.nrows() == 2 || matrix.nrows() == 3) {
            return Err(Error::UnsupportedDimension(matrix.nrows(), 2, 3));
        }
        let deviation = orthogonality_residual(&matrix);
        if deviation > ROTATION_TOL {
            return Err(Error::NotOrthogonal { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }
}

impl TryFrom<DenseJson> for OrthogonalMap {
    type Error = Error;

    fn try_from(j: DenseJson) -> Result<Self> {
        Self::new(j.to_matrix()?)
    }
}

impl From<OrthogonalMap> for DenseJson {
    fn from(o: OrthogonalMap) -> Self {
        DenseJson::from_matrix(&o.matrix)
    }
}

/// A proper rotation, `det = +1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrthogonalMap", into = "OrthogonalMap")]
pub struct BlochRotation(OrthogonalMap);

impl TryFrom<OrthogonalMap> for BlochRotation {
    type Error = Error;

    fn try_from(map: OrthogonalMap) -> Result<Self> {
        let det = map.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::WrongDeterminant {
                found: det,
                required: 1,
            });
        }
        Ok(Self(map))
    }
}

impl From<BlochRotation> for OrthogonalMap {
    fn from(r: BlochRotation) -> Self {
        r.0
    }
}

impl BlochRotation {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        OrthogonalMap::new(matrix)?.try_into()
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    /// Counter-clockwise rotation of the Bloch plane.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(OrthogonalMap {
            matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        })
    }

    /// Rotation of Bloch space by `angle` about `axis` (normalized here).
    pub fn about_axis(axis: [f64; 3], angle: f64) -> Result<Self> {
        let v = nalgebra::Vector3::from(axis);
        let unit = nalgebra::Unit::try_new(v, 1e-12)
            .ok_or_else(|| Error::InvalidParameter("zero rotation axis".into()))?;
        Ok(Self::from_quaternion(UnitQuaternion::from_axis_angle(
            &unit, angle,
        )))
    }

    /// Haar-uniform rotation of Bloch space, from a normalized Gaussian
    /// quaternion.
    pub fn random_so3<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut g = || rng.sample::<f64, _>(StandardNormal);
            let q = Quaternion::new(g(), g(), g(), g());
            if q.norm() > 1e-12 {
                return Self::from_quaternion(UnitQuaternion::from_quaternion(q));
            }
        }
    }

    fn from_quaternion(q: UnitQuaternion<f64>) -> Self {
        let m = q.to_rotation_matrix().into_inner();
        Self(OrthogonalMap {
            matrix: DMatrix::from_column_slice(3, 3, m.as_slice()),
        })
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        self.0.matrix()
    }

    pub fn as_map(&self) -> &OrthogonalMap {
        &self.0
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self(self.0.compose(&other.0)?))
    }
}

fn conjugate(o: &OrthogonalMap, frame: &Frame) -> Result<QuasiBistochasticMatrix> {
    if o.dim() != frame.bloch_dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.bloch_dim(),
            got: o.dim(),
        });
    }
    let d = frame.dim();
    let df = d as f64;
    let b = frame.matrix();
    let s =
        DMatrix::from_element(d, d, 1.0 / df) + b.transpose() * o.matrix() * &b * ((df - 1.0) / df);
    QuasiBistochasticMatrix::new_within(s, &Tolerances::DEFAULT)
}

/// `S = J/d + ((d−1)/d) Bᵀ O B`.
pub fn lift_to_lattice(o: &BlochRotation, frame: &Frame) -> Result<QuasiBistochasticMatrix> {
    conjugate(o.as_map(), frame)
}

/// Lift of an improper map. Reflections are not reachable continuously from
/// the identity, so the result is never a physical evolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnphysicalLift {
    pub matrix: QuasiBistochasticMatrix,
}

pub fn reflection_lift(o: &OrthogonalMap, frame: &Frame) -> Result<UnphysicalLift> {
    let det = o.determinant();
    if (det + 1.0).abs() > ROTATION_TOL {
        return Err(Error::WrongDeterminant {
            found: det,
            required: -1,
        });
    }
    Ok(UnphysicalLift {
        matrix: conjugate(o, frame)?,
    })
}
