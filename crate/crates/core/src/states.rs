//! State spaces on the d=3 and d=4 lattices.
//!
//! A frame is a set of `d` unit vectors in `d−1` dimensions summing to zero
//! (trine for d=3, tetrahedron for d=4). A Bloch point `b` with `|b| ≤ 1`
//! corresponds to the lattice state `p_k = (1 + f_k·b)/d`; the inverse is
//! `b = (d−1) Σ_k p_k f_k`, which follows from `Σ_k f_k f_kᵀ = d/(d−1) I`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dynamics3::{make_sminus, make_splus};
use crate::dynamics4::{composed, composed_partials};
use crate::error::{Error, Result};
use crate::lattice::{PermutationMatrix, ProbVector, Tolerances};

/// Tolerance for frame identities and the unit-ball bound.
pub const FRAME_TOL: f64 = 1e-12;
/// Width of the tolerance band used by [`domain_membership`].
pub const MEMBERSHIP_BAND: f64 = 1e-9;
/// Sign σ such that `S₊(φ)` acts on Bloch points as the planar rotation by
/// `σ φ`. Fixed by [`rotation_correspondence_check`]; see its tests.
pub const ROTATION_SIGN: i8 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Frame {
    vectors: Vec<DVector<f64>>,
}

impl Frame {
    /// Validates unit norms, zero sum and the overcompleteness identity.
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let d = vectors.len();
        if !(d == 3 || d == 4) {
            return Err(Error::UnsupportedDimension(d, 3, 4));
        }
        if let Some(bad) = vectors.iter().find(|v| v.len() != d - 1) {
            return Err(Error::DimensionMismatch {
                expected: d - 1,
                got: bad.len(),
            });
        }
        let frame = Frame {
            vectors: vectors.into_iter().map(DVector::from_vec).collect(),
        };
        let residuals = frame.identity_residuals();
        if residuals.unit_norm > FRAME_TOL
            || residuals.sum > FRAME_TOL
            || residuals.overcompleteness > FRAME_TOL
        {
            return Err(Error::InvalidParameter(format!(
                "frame violates its identities: {residuals:?}"
            )));
        }
        Ok(frame)
    }

    /// `â₀ = [0,1]`, `â₁ = [√3/2, −1/2]`, `â₂ = [−√3/2, −1/2]`.
    pub fn trine() -> Self {
        let h = 3.0_f64.sqrt() / 2.0;
        Frame {
            vectors: vec![
                DVector::from_vec(vec![0.0, 1.0]),
                DVector::from_vec(vec![h, -0.5]),
                DVector::from_vec(vec![-h, -0.5]),
            ],
        }
    }

    /// Regular tetrahedron with `b̂₀ = [0,0,1]`.
    pub fn tetrahedron() -> Self {
        let a = (8.0_f64 / 9.0).sqrt();
        let b = (2.0_f64 / 9.0).sqrt();
        let c = (2.0_f64 / 3.0).sqrt();
        let third = 1.0 / 3.0;
        Frame {
            vectors: vec![
                DVector::from_vec(vec![0.0, 0.0, 1.0]),
                DVector::from_vec(vec![a, 0.0, -third]),
                DVector::from_vec(vec![-b, c, -third]),
                DVector::from_vec(vec![-b, -c, -third]),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn bloch_dim(&self) -> usize {
        self.dim() - 1
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// The `(d−1) × d` matrix with the frame vectors as columns.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.vectors)
    }

    /// `d / (d−1)`.
    pub fn overcompleteness_constant(&self) -> f64 {
        let d = self.dim() as f64;
        d / (d - 1.0)
    }

    pub fn identity_residuals(&self) -> FrameResiduals {
        let n = self.bloch_dim();
        let unit_norm = self
            .vectors
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        let sum = self
            .vectors
            .iter()
            .fold(DVector::zeros(n), |acc, v| acc + v)
            .amax();
        let outer = self
            .vectors
            .iter()
            .fold(DMatrix::zeros(n, n), |acc, v| acc + v * v.transpose());
        let overcompleteness =
            (outer - DMatrix::identity(n, n) * self.overcompleteness_constant()).amax();
        FrameResiduals {
            unit_norm,
            sum,
            overcompleteness,
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for Frame {
    type Error = Error;

    fn try_from(value: Vec<Vec<f64>>) -> Result<Self> {
        Frame::new(value)
    }
}

impl From<Frame> for Vec<Vec<f64>> {
    fn from(f: Frame) -> Self {
        f.vectors
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameResiduals {
    pub unit_norm: f64,
    pub sum: f64,
    pub overcompleteness: f64,
}

pub fn default_frame(d: usize) -> Result<Frame> {
    match d {
        3 => Ok(Frame::trine()),
        4 => Ok(Frame::tetrahedron()),
        _ => Err(Error::UnsupportedDimension(d, 3, 4)),
    }
}

/// Bloch coordinates. For d=3 only `(x, y)` is used and `z` must be zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochPoint {
    pub const ORIGIN: BlochPoint = BlochPoint {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn planar(x: f64, y: f64) -> Self {
        Self { x, y, z: 0.0 }
    }

    /// `t [sin θ, cos θ]`.
    pub fn from_polar(t: f64, theta: f64) -> Self {
        Self::planar(t * theta.sin(), t * theta.cos())
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn in_unit_ball(&self) -> bool {
        self.norm() <= 1.0 + FRAME_TOL
    }

    pub fn is_extremal(&self) -> bool {
        (self.norm() - 1.0).abs() <= FRAME_TOL
    }

    pub fn to_vector(&self, dim: usize) -> DVector<f64> {
        let all = [self.x, self.y, self.z];
        DVector::from_column_slice(&all[..dim])
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        let get = |i: usize| v.get(i).copied().unwrap_or(0.0);
        Self::new(get(0), get(1), get(2))
    }

    pub fn distance(&self, other: &BlochPoint) -> f64 {
        BlochPoint::new(self.x - other.x, self.y - other.y, self.z - other.z).norm()
    }
}

/// Planar rotation `(x, y) ↦ (x cos α − y sin α, x sin α + y cos α)`.
pub fn rotate_planar(b: &BlochPoint, angle: f64) -> BlochPoint {
    let (s, c) = angle.sin_cos();
    BlochPoint::new(b.x * c - b.y * s, b.x * s + b.y * c, b.z)
}

/// `p_k = (1 + f_k·b)/d` without the unit-ball check; out-of-ball points
/// give quasi-states.
pub fn bloch_to_vector(b: &BlochPoint, frame: &Frame) -> Result<ProbVector> {
    if frame.dim() == 3 && b.z != 0.0 {
        return Err(Error::Domain(format!(
            "d=3 states have z = 0, got z = {}",
            b.z
        )));
    }
    let d = frame.dim() as f64;
    let bv = b.to_vector(frame.bloch_dim());
    ProbVector::new(
        frame
            .vectors()
            .iter()
            .map(|f| (1.0 + f.dot(&bv)) / d)
            .collect(),
    )
}

pub fn bloch_to_state(b: &BlochPoint, frame: &Frame) -> Result<ProbVector> {
    if !b.in_unit_ball() {
        return Err(Error::Domain(format!("|b| = {} exceeds 1", b.norm())));
    }
    bloch_to_vector(b, frame)
}

/// `b = (d−1) Σ_k p_k f_k`. Quasi-states land outside the unit ball; check
/// with [`BlochPoint::in_unit_ball`].
pub fn state_to_bloch(p: &ProbVector, frame: &Frame) -> Result<BlochPoint> {
    if p.dim() != frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            got: p.dim(),
        });
    }
    let scale = (frame.dim() - 1) as f64;
    let b = frame.matrix() * p.as_dvector() * scale;
    Ok(BlochPoint::from_vector(&b))
}

/// `|p|² = 1/d + |b|² / (d(d−1))`.
pub fn collision_norm_from_radius(d: usize, radius: f64) -> f64 {
    let d = d as f64;
    1.0 / d + radius * radius / (d * (d - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDomain {
    pub d: usize,
    pub norm_lo: f64,
    pub norm_hi: f64,
    /// Largest vertex-ray mixing weight λ in `λ e₀ + (1−λ) u`.
    pub lambda_max: f64,
}

impl StateDomain {
    pub fn for_dimension(d: usize) -> Result<Self> {
        match d {
            3 => Ok(StateDomain {
                d,
                norm_lo: 1.0 / 3.0,
                norm_hi: 0.5,
                lambda_max: 0.5,
            }),
            4 => Ok(StateDomain {
                d,
                norm_lo: 0.25,
                norm_hi: 1.0 / 3.0,
                lambda_max: 1.0 / 3.0,
            }),
            _ => Err(Error::UnsupportedDimension(d, 3, 4)),
        }
    }

    pub fn contains(&self, p: &ProbVector) -> bool {
        matches!(
            domain_membership(p, self.d),
            Ok(Membership::Interior | Membership::Extremal)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Interior,
    Extremal,
    OutsideSimplex,
    OutsideBall,
}

pub fn domain_membership(p: &ProbVector, d: usize) -> Result<Membership> {
    let domain = StateDomain::for_dimension(d)?;
    if p.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    if (p.sum() - 1.0).abs() > MEMBERSHIP_BAND || p.min_entry() < -MEMBERSHIP_BAND {
        return Ok(Membership::OutsideSimplex);
    }
    let norm = p.as_dvector().norm_squared();
    Ok(if norm > domain.norm_hi + MEMBERSHIP_BAND {
        Membership::OutsideBall
    } else if norm >= domain.norm_hi - MEMBERSHIP_BAND {
        Membership::Extremal
    } else {
        Membership::Interior
    })
}

/// Which dynamics the positivity requirement quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsSet {
    /// Both d=3 families, or all composed d=4 rotations.
    Continuous,
    /// Only the d! permutations.
    Permutations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSearchConfig {
    /// φ grid for d=3.
    pub phi_grid: usize,
    /// Per-angle grid for d=4 composed rotations (`n⁴` samples).
    pub angle_grid: usize,
    pub random_directions: usize,
    /// Best samples refined by local minimisation.
    pub refine_top: usize,
}

impl Default for DomainSearchConfig {
    fn default() -> Self {
        Self {
            phi_grid: 20_000,
            angle_grid: 8,
            random_directions: 1000,
            refine_top: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainBoundReport {
    pub d: usize,
    pub dynamics: DynamicsSet,
    /// Along the vertex ray `λ e₀ + (1−λ) u`.
    pub lambda_max: f64,
    /// `|r|²` at `lambda_max`.
    pub k: f64,
    pub directions_tested: usize,
    pub k_min_over_directions: f64,
    pub k_max_over_directions: f64,
}

/// Numerically locates the largest positivity-preserving mixing weight
/// along the vertex ray, plus the implied collision-norm bound along
/// random rays through the uniform state.
pub fn domain_bound_search<R: Rng + ?Sized>(
    d: usize,
    dynamics: DynamicsSet,
    config: &DomainSearchConfig,
    rng: &mut R,
) -> Result<DomainBoundReport> {
    if !(d == 3 || d == 4) {
        return Err(Error::UnsupportedDimension(d, 3, 4));
    }
    let searcher = MinImageSearch::new(d, dynamics, config)?;
    let uniform = DVector::from_element(d, 1.0 / d as f64);

    let mut vertex_dir = -uniform.clone();
    vertex_dir[0] += 1.0;
    let (lambda_max, k) = searcher.ray_bound(&uniform, &vertex_dir);

    let mut k_min = f64::INFINITY;
    let mut k_max = f64::NEG_INFINITY;
    for _ in 0..config.random_directions {
        let mut w = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mean = w.mean();
        w.add_scalar_mut(-mean);
        w /= w.norm();
        let (_, kd) = searcher.ray_bound(&uniform, &w);
        k_min = k_min.min(kd);
        k_max = k_max.max(kd);
    }
    Ok(DomainBoundReport {
        d,
        dynamics,
        lambda_max,
        k,
        directions_tested: config.random_directions,
        k_min_over_directions: k_min,
        k_max_over_directions: k_max,
    })
}

/// Minimises `min_i (S w)_i` over a dynamics set.
struct MinImageSearch {
    d: usize,
    dynamics: DynamicsSet,
    samples: Vec<Sample>,
    refine_top: usize,
    grid_spacing: f64,
}

#[derive(Clone, Copy)]
enum Sample {
    Plus(f64),
    Minus(f64),
    Composed([f64; 4]),
    Fixed(usize),
}

impl MinImageSearch {
    fn new(d: usize, dynamics: DynamicsSet, config: &DomainSearchConfig) -> Result<Self> {
        let mut samples = Vec::new();
        let grid_spacing;
        match (d, dynamics) {
            (_, DynamicsSet::Permutations) => {
                grid_spacing = 0.0;
                samples.extend((0..factorial(d)).map(Sample::Fixed));
            }
            (3, DynamicsSet::Continuous) => {
                let n = config.phi_grid.max(3);
                grid_spacing = TAU / n as f64;
                for i in 0..n {
                    let phi = i as f64 * grid_spacing;
                    samples.push(Sample::Plus(phi));
                    samples.push(Sample::Minus(phi));
                }
            }
            (_, DynamicsSet::Continuous) => {
                let n = config.angle_grid.max(2);
                grid_spacing = TAU / n as f64;
                let g = |i: usize| i as f64 * grid_spacing;
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            for e in 0..n {
                                samples.push(Sample::Composed([g(a), g(b), g(c), g(e)]));
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            d,
            dynamics,
            samples,
            refine_top: config.refine_top,
            grid_spacing,
        })
    }

    fn matrix(&self, s: Sample) -> DMatrix<f64> {
        match s {
            Sample::Plus(phi) => make_splus(phi).into_matrix(),
            Sample::Minus(phi) => make_sminus(phi).into_matrix(),
            Sample::Composed(a) => {
                let m = composed(&a);
                DMatrix::from_iterator(4, 4, m.iter().copied())
            }
            Sample::Fixed(index) => nth_permutation(self.d, index).to_matrix(),
        }
    }

    /// Returns `(value, row)` of the smallest entry of `S w`.
    fn image_min(&self, s: Sample, w: &DVector<f64>) -> (f64, usize) {
        let image = self.matrix(s) * w;
        let row = image.argmin().0;
        (image[row], row)
    }

    fn min_image(&self, w: &DVector<f64>) -> f64 {
        let mut scored: Vec<(f64, usize, Sample)> = self
            .samples
            .iter()
            .map(|&s| {
                let (v, row) = self.image_min(s, w);
                (v, row, s)
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let best = scored[0].0;
        if self.dynamics == DynamicsSet::Permutations {
            return best;
        }
        scored
            .iter()
            .take(self.refine_top.max(1))
            .map(|&(v, row, s)| v.min(self.refine(s, row, w)))
            .fold(best, f64::min)
    }

    fn refine(&self, start: Sample, row: usize, w: &DVector<f64>) -> f64 {
        match start {
            Sample::Plus(phi) => golden_min(
                |x| (make_splus(x).into_matrix() * w)[row],
                phi - self.grid_spacing,
                phi + self.grid_spacing,
            ),
            Sample::Minus(phi) => golden_min(
                |x| (make_sminus(x).into_matrix() * w)[row],
                phi - self.grid_spacing,
                phi + self.grid_spacing,
            ),
            Sample::Composed(angles) => descend_composed(angles, row, w),
            Sample::Fixed(_) => f64::INFINITY,
        }
    }

    /// Largest λ with `S(u + λw) ≥ −τ_pos` for every dynamics, capped so
    /// that the ray stays inside the simplex; returns `(λ, |u + λw|²)`.
    fn ray_bound(&self, uniform: &DVector<f64>, w: &DVector<f64>) -> (f64, f64) {
        let base = 1.0 / self.d as f64;
        let simplex_cap = w
            .iter()
            .filter(|&&x| x < 0.0)
            .map(|&x| base / -x)
            .fold(f64::INFINITY, f64::min);
        let m = self.min_image(w);
        let dynamics_cap = if m < 0.0 {
            (base + Tolerances::DEFAULT.pos) / -m
        } else {
            f64::INFINITY
        };
        let lambda = simplex_cap.min(dynamics_cap);
        (lambda, (uniform + w * lambda).norm_squared())
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut e = a + ratio * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..80 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + ratio * (b - a);
            fe = f(e);
        }
    }
    fc.min(fe)
}

/// Gradient descent with backtracking on `(R₁R₂R₃R₄ w)_row`.
fn descend_composed(start: [f64; 4], row: usize, w: &DVector<f64>) -> f64 {
    let w4 = nalgebra::Vector4::new(w[0], w[1], w[2], w[3]);
    let value = |a: &[f64; 4]| (composed(a) * w4)[row];
    let mut x = start;
    let mut fx = value(&x);
    let mut step = 1.0;
    for _ in 0..2000 {
        let partials = composed_partials(&x);
        let grad: [f64; 4] = std::array::from_fn(|k| (partials[k] * w4)[row]);
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2 < 1e-28 {
            break;
        }
        let mut accepted = false;
        while step > 1e-12 {
            let cand: [f64; 4] = std::array::from_fn(|k| x[k] - step * grad[k]);
            let fc = value(&cand);
            if fc <= fx - 0.25 * step * gnorm2 {
                x = cand;
                fx = fc;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    fx
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Lexicographic `index`-th permutation of `0..d`.
fn nth_permutation(d: usize, mut index: usize) -> PermutationMatrix {
    let mut pool: Vec<usize> = (0..d).collect();
    let mut perm = Vec::with_capacity(d);
    for k in (0..d).rev() {
        let f = factorial(k);
        perm.push(pool.remove(index / f));
        index %= f;
    }
    PermutationMatrix::new(perm).expect("valid by construction")
}

/// All `d!` permutation matrices.
pub fn all_permutations(d: usize) -> Vec<PermutationMatrix> {
    (0..factorial(d)).map(|i| nth_permutation(d, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationCorrespondenceReport {
    pub sigma: i8,
    pub points: usize,
    pub max_deviation: f64,
    /// Max deviation under the opposite sign, for contrast.
    pub max_deviation_other_sign: f64,
}

/// `‖S₊(φ) p(b) − p(Rot(σφ) b)‖_max` on the trine.
pub fn rotation_deviation(phi: f64, b: &BlochPoint, sigma: i8) -> Result<f64> {
    let frame = Frame::trine();
    let lhs = crate::lattice::apply(&make_splus(phi), &bloch_to_state(b, &frame)?)?;
    let rotated = rotate_planar(b, sigma as f64 * phi);
    let rhs = bloch_to_vector(&rotated, &frame)?;
    Ok((lhs.as_dvector() - rhs.as_dvector()).amax())
}

/// Determines σ from the single point `φ = 2π/3, b = (0, 1)` and confirms it
/// on the `(φ, θ, t)` grid.
pub fn rotation_correspondence_check(
    phi_steps: usize,
    theta_steps: usize,
    t_steps: usize,
    tolerance: f64,
) -> Result<RotationCorrespondenceReport> {
    let probe = BlochPoint::planar(0.0, 1.0);
    let plus = rotation_deviation(2.0 * PI / 3.0, &probe, 1)?;
    let minus = rotation_deviation(2.0 * PI / 3.0, &probe, -1)?;
    let sigma: i8 = if plus <= minus { 1 } else { -1 };

    let mut max_dev = 0.0_f64;
    let mut max_other = 0.0_f64;
    let mut points = 0;
    for i in 0..phi_steps {
        let phi = i as f64 * TAU / phi_steps as f64;
        for j in 0..theta_steps {
            let theta = j as f64 * TAU / theta_steps as f64;
            for k in 1..=t_steps {
                let t = k as f64 / t_steps as f64;
                let b = BlochPoint::from_polar(t, theta);
                max_dev = max_dev.max(rotation_deviation(phi, &b, sigma)?);
                max_other = max_other.max(rotation_deviation(phi, &b, -sigma)?);
                points += 1;
            }
        }
    }
    if max_dev > tolerance {
        return Err(Error::Structural(format!(
            "no consistent rotation sign: sigma={sigma} leaves deviation {max_dev:e}"
        )));
    }
    Ok(RotationCorrespondenceReport {
        sigma,
        points,
        max_deviation: max_dev,
        max_deviation_other_sign: max_other,
    })
}

/// Uniform point in the unit disc (d=3) or ball (d=4), as a lattice state.
pub fn sample_domain_state<R: Rng + ?Sized>(frame: &Frame, rng: &mut R) -> ProbVector {
    let b = sample_unit_ball(frame.bloch_dim(), rng);
    bloch_to_state(&b, frame).expect("sampled inside the unit ball")
}

pub fn sample_unit_ball<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> BlochPoint {
    let v = sample_unit_sphere(dim, rng);
    let radius = rng.random::<f64>().powf(1.0 / dim as f64);
    BlochPoint::from_vector(&(v * radius))
}

pub fn sample_unit_sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Uniform point of the probability simplex.
pub fn sample_simplex_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ProbVector> {
    let raw: Vec<f64> = (0..d).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    ProbVector::new(raw.into_iter().map(|x| x / total).collect())
}
