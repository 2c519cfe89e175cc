//! Lattice states and quasi-bistochastic dynamics.
//!
//! States are column vectors and dynamics act on the left, `p' = S p`.
//! A state is a plain real vector; whether it is a proper probability
//! distribution is a property checked against [`Tolerances`], never stored.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 16;

/// Numerical tolerances shared by every validity predicate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Row, column and entry sums.
    pub sum: f64,
    /// Max-norm of `M Mᵀ − I`.
    pub orth: f64,
    /// Entries down to `-pos` still count as non-negative.
    pub pos: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        sum: 1e-12,
        orth: 1e-10,
        pos: 1e-12,
    };

    pub fn is_quasi_bistochastic(&self, m: &DMatrix<f64>) -> bool {
        m.is_square() && bistochastic_residual(m) <= self.sum
    }

    pub fn is_orthogonal(&self, m: &DMatrix<f64>) -> bool {
        m.is_square() && orthogonality_residual(m) <= self.orth
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d, MIN_DIM, MAX_DIM))
    }
}

/// Largest deviation of any row or column sum from one.
pub fn bistochastic_residual(m: &DMatrix<f64>) -> f64 {
    let rows = m.row_iter().map(|r| (r.sum() - 1.0).abs());
    let cols = m.column_iter().map(|c| (c.sum() - 1.0).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// `‖M Mᵀ − I‖_max`.
pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let gram = m * m.transpose();
    (gram - DMatrix::<f64>::identity(n, n)).amax()
}

pub fn is_quasi_bistochastic(m: &DMatrix<f64>) -> bool {
    Tolerances::DEFAULT.is_quasi_bistochastic(m)
}

pub fn is_orthogonal(m: &DMatrix<f64>) -> bool {
    Tolerances::DEFAULT.is_orthogonal(m)
}

/// Wire form shared by vectors and matrices: `{"d": int, "entries": [...]}`,
/// matrices in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseJson {
    pub d: usize,
    pub entries: Vec<f64>,
}

impl DenseJson {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let d = m.nrows();
        let entries = (0..d)
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)])
            .collect();
        DenseJson { d, entries }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.entries.len() != self.d * self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d * self.d,
                got: self.entries.len(),
            });
        }
        Ok(DMatrix::from_row_slice(self.d, self.d, &self.entries))
    }
}

/// A lattice state `p = [p₁, …, p_d]ᵀ`. Entries may be negative (quasi-state).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DenseJson", into = "DenseJson")]
pub struct ProbVector {
    entries: DVector<f64>,
}

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_dim(entries.len())?;
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite vector entry".into()));
        }
        Ok(Self {
            entries: DVector::from_vec(entries),
        })
    }

    pub fn from_dvector(v: DVector<f64>) -> Result<Self> {
        Self::new(v.iter().copied().collect())
    }

    pub fn uniform(d: usize) -> Result<Self> {
        Self::new(vec![1.0 / d as f64; d])
    }

    /// The deterministic state occupying vertex `i`.
    pub fn vertex(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::InvalidParameter(format!(
                "vertex {i} out of range for d={d}"
            )));
        }
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        self.entries.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.entries
    }

    pub fn sum(&self) -> f64 {
        self.entries.sum()
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.min()
    }

    pub fn is_normalized_within(&self, tol: &Tolerances) -> bool {
        (self.sum() - 1.0).abs() <= tol.sum
    }

    pub fn is_positive_within(&self, tol: &Tolerances) -> bool {
        self.min_entry() >= -tol.pos
    }

    pub fn is_normalized(&self) -> bool {
        self.is_normalized_within(&Tolerances::DEFAULT)
    }

    pub fn is_positive(&self) -> bool {
        self.is_positive_within(&Tolerances::DEFAULT)
    }
}

impl TryFrom<DenseJson> for ProbVector {
    type Error = Error;

    fn try_from(value: DenseJson) -> Result<Self> {
        if value.entries.len() != value.d {
            return Err(Error::DimensionMismatch {
                expected: value.d,
                got: value.entries.len(),
            });
        }
        Self::new(value.entries)
    }
}

impl From<ProbVector> for DenseJson {
    fn from(p: ProbVector) -> Self {
        DenseJson {
            d: p.dim(),
            entries: p.entries().to_vec(),
        }
    }
}

/// A square matrix whose rows and columns each sum to one. Entries may be
/// negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DenseJson", into = "DenseJson")]
pub struct QuasiBistochasticMatrix {
    m: DMatrix<f64>,
}

impl QuasiBistochasticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::new_within(m, &Tolerances::DEFAULT)
    }

    pub fn new_within(m: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        check_dim(m.nrows())?;
        let deviation = bistochastic_residual(&m);
        if deviation.is_nan() || deviation > tol.sum {
            return Err(Error::NotQuasiBistochastic { deviation });
        }
        Ok(Self { m })
    }

    pub fn from_row_slice(d: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(d, d, entries))
    }

    /// Skips validation. Callers guarantee unit row and column sums by
    /// construction (products, transposes, closed forms).
    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        debug_assert!(m.is_square());
        Self { m }
    }

    pub fn identity(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            m: DMatrix::identity(d, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.m[(row, col)]
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            m: &self.m * &other.m,
        })
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.m)
    }

    pub fn bistochastic_residual(&self) -> f64 {
        bistochastic_residual(&self.m)
    }

    pub fn is_orthogonal(&self) -> bool {
        is_orthogonal(&self.m)
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m).amax()
    }
}

impl TryFrom<DenseJson> for QuasiBistochasticMatrix {
    type Error = Error;

    fn try_from(value: DenseJson) -> Result<Self> {
        Self::new(value.to_matrix()?)
    }
}

impl From<QuasiBistochasticMatrix> for DenseJson {
    fn from(s: QuasiBistochasticMatrix) -> Self {
        DenseJson::from_matrix(&s.m)
    }
}

/// A permutation stored as an index map: basis vector `e_j` is sent to
/// `e_{perm[j]}`, so the matrix has its single 1 of column `j` in row
/// `perm[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermutationMatrix {
    perm: Vec<usize>,
}

impl PermutationMatrix {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let d = perm.len();
        check_dim(d)?;
        let mut seen = vec![false; d];
        for &i in &perm {
            if i >= d || seen[i] {
                return Err(Error::InvalidParameter(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { perm })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new((0..d).collect())
    }

    /// Hop to the next vertex with periodic boundary: `e_j → e_{j+1 mod d}`.
    pub fn cycle(d: usize) -> Result<Self> {
        Self::new((0..d).map(|j| (j + 1) % d).collect())
    }

    /// Transposition of vertices `a` and `b`.
    pub fn swap(d: usize, a: usize, b: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..d).collect();
        if a >= d || b >= d {
            return Err(Error::InvalidParameter(format!(
                "swap ({a},{b}) out of range for d={d}"
            )));
        }
        perm.swap(a, b);
        Self::new(perm)
    }

    /// The d=3 cycle Π. As a relabelling of the string `p₁p₂p₃` it reads
    /// `123 → 312`, and `Π e₁ = e₂`.
    pub fn pi3() -> Self {
        Self::cycle(3).expect("d=3 is supported")
    }

    /// The d=3 transposition R fixing the first vertex (`123 → 132`).
    pub fn r3() -> Self {
        Self::swap(3, 1, 2).expect("d=3 is supported")
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn image(&self, j: usize) -> usize {
        self.perm[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Self::new(other.perm.iter().map(|&j| self.perm[j]).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim()).expect("dimension already validated");
        for _ in 0..k {
            out = self.compose(&out).expect("same dimension");
        }
        out
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (j, &i) in self.perm.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        m
    }

    pub fn to_quasi_bistochastic(&self) -> QuasiBistochasticMatrix {
        QuasiBistochasticMatrix::from_matrix_unchecked(self.to_matrix())
    }
}

/// `S · p`.
pub fn apply(s: &QuasiBistochasticMatrix, p: &ProbVector) -> Result<ProbVector> {
    if s.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: p.dim(),
        });
    }
    Ok(ProbVector {
        entries: s.matrix() * p.as_dvector(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_fixes_vertex() {
        let s = QuasiBistochasticMatrix::identity(3).unwrap();
        let p = ProbVector::vertex(3, 0).unwrap();
        assert_eq!(apply(&s, &p).unwrap().entries(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn pi_moves_occupation_one_step() {
        let pi = PermutationMatrix::pi3().to_quasi_bistochastic();
        let mut p = ProbVector::vertex(3, 0).unwrap();
        p = apply(&pi, &p).unwrap();
        assert_eq!(p.entries(), &[0.0, 1.0, 0.0]);
        p = apply(&pi, &p).unwrap();
        assert_eq!(p.entries(), &[0.0, 0.0, 1.0]);
        p = apply(&pi, &p).unwrap();
        assert_eq!(p.entries(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn pi_relabels_string_123_to_312() {
        let pi = PermutationMatrix::pi3().to_quasi_bistochastic();
        let p = ProbVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(apply(&pi, &p).unwrap().entries(), &[3.0, 1.0, 2.0]);
        let r = PermutationMatrix::r3().to_quasi_bistochastic();
        assert_eq!(apply(&r, &p).unwrap().entries(), &[1.0, 3.0, 2.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = QuasiBistochasticMatrix::identity(3).unwrap();
        let p = ProbVector::uniform(4).unwrap();
        assert!(matches!(
            apply(&s, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bistochastic_predicate() {
        let third = DMatrix::from_element(3, 3, 1.0 / 3.0);
        assert!(is_quasi_bistochastic(&third));
        assert!(is_quasi_bistochastic(&PermutationMatrix::pi3().to_matrix()));
        let lopsided = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.4, 0.6]);
        assert!(!is_quasi_bistochastic(&lopsided));
        assert!(QuasiBistochasticMatrix::new(lopsided).is_err());
    }

    #[test]
    fn orthogonality_predicate() {
        assert!(is_orthogonal(&DMatrix::identity(5, 5)));
        for d in 2..=6 {
            assert!(is_orthogonal(
                &PermutationMatrix::cycle(d).unwrap().to_matrix()
            ));
        }
        assert!(!is_orthogonal(&DMatrix::from_element(3, 3, 1.0 / 3.0)));
    }

    #[test]
    fn permutation_validation() {
        assert!(PermutationMatrix::new(vec![0, 0, 1]).is_err());
        assert!(PermutationMatrix::new(vec![0, 3, 1]).is_err());
        assert!(PermutationMatrix::new(vec![0]).is_err());
        let pi = PermutationMatrix::pi3();
        assert_eq!(pi.pow(3), PermutationMatrix::identity(3).unwrap());
        let pm = pi.compose(&pi).unwrap().to_matrix();
        assert_eq!(pm, pi.to_matrix() * pi.to_matrix());
    }

    #[test]
    fn r_pi_inverse_relation() {
        // R Π^{-k} = Π^k R
        let pi = PermutationMatrix::pi3();
        let r = PermutationMatrix::r3();
        for k in 0..3 {
            let lhs = r.compose(&pi.pow((3 - k) % 3)).unwrap();
            let rhs = pi.pow(k).compose(&r).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn dimension_range_enforced() {
        assert!(ProbVector::uniform(1).is_err());
        assert!(ProbVector::uniform(17).is_err());
        assert!(ProbVector::uniform(16).is_ok());
    }

    #[test]
    fn json_shape() {
        let pi = PermutationMatrix::pi3().to_quasi_bistochastic();
        let s = serde_json::to_string(&pi).unwrap();
        assert_eq!(
            s,
            r#"{"d":3,"entries":[0.0,0.0,1.0,1.0,0.0,0.0,0.0,1.0,0.0]}"#
        );
        let back: QuasiBistochasticMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pi);
        let bad = r#"{"d":2,"entries":[0.5,0.5,0.4,0.6]}"#;
        assert!(serde_json::from_str::<QuasiBistochasticMatrix>(bad).is_err());
        let p = ProbVector::new(vec![0.1, 0.2, 0.7]).unwrap();
        let ps = serde_json::to_string(&p).unwrap();
        assert_eq!(ps, r#"{"d":3,"entries":[0.1,0.2,0.7]}"#);
        let wrong_len = r#"{"d":4,"entries":[0.1,0.2,0.7]}"#;
        assert!(serde_json::from_str::<ProbVector>(wrong_len).is_err());
    }
}
