//! Verification suites and the machine-readable evidence report.
//!
//! Each suite draws from its own ChaCha8 stream (the global seed, stream
//! index = suite index), so suites can run concurrently and still produce
//! byte-identical reports.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics3::{
    angle_from_coefficients, classify_within, compose, d2_nogo_check, decompose_bvn, make_sminus,
    make_splus, permutation_angles, q_coefficients, Classification3, RotationGenerator3,
};
use crate::dynamics4::{factorize, make_composed, uniform_state_is_fixed, FactorizeConfig};
use crate::effects::{make_effect, probability, Outcome};
use crate::entropy::{renyi_entropy_with, LogBase, RenyiOrder};
use crate::error::Result;
use crate::geometry::{basis_residual, constraint_residuals, simplex_sphere_point, SphereParam};
use crate::lattice::{apply, PermutationMatrix, ProbVector, QuasiBistochasticMatrix, Tolerances};
use crate::oracle::{lift_to_lattice, reflection_lift, BlochRotation, OrthogonalMap};
use crate::states::{
    bloch_to_state, bloch_to_vector, domain_bound_search, rotation_deviation, sample_domain_state,
    sample_unit_ball, sample_unit_sphere, state_to_bloch, BlochPoint, DomainSearchConfig,
    DynamicsSet, Frame, ROTATION_SIGN,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    D2nogo,
    D3,
    D4,
    Geometry,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::D2nogo,
        Suite::D3,
        Suite::D4,
        Suite::Geometry,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::D2nogo => "d2nogo",
            Suite::D3 => "d3",
            Suite::D4 => "d4",
            Suite::Geometry => "geometry",
            Suite::Oracle => "oracle",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `measured ≤ tolerance`
    Le,
    /// `measured ≥ tolerance`
    Ge,
    /// `measured > tolerance`
    Gt,
    /// `|measured − target| ≤ tolerance`
    Within,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub claim_ref: String,
    pub description: String,
    pub measured: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Claim {
    fn new(
        id: &str,
        claim_ref: &str,
        description: &str,
        measured: f64,
        comparison: Comparison,
        tolerance: f64,
        target: Option<f64>,
    ) -> Self {
        let passed = match comparison {
            Comparison::Le => measured <= tolerance,
            Comparison::Ge => measured >= tolerance,
            Comparison::Gt => measured > tolerance,
            Comparison::Within => (measured - target.unwrap_or(0.0)).abs() <= tolerance,
        };
        Self {
            id: id.to_string(),
            claim_ref: claim_ref.to_string(),
            description: description.to_string(),
            measured,
            target,
            tolerance,
            comparison,
            passed,
        }
    }

    fn le(id: &str, claim_ref: &str, description: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(
            id,
            claim_ref,
            description,
            measured,
            Comparison::Le,
            tolerance,
            None,
        )
    }

    fn within(
        id: &str,
        claim_ref: &str,
        description: &str,
        measured: f64,
        target: f64,
        tolerance: f64,
    ) -> Self {
        Self::new(
            id,
            claim_ref,
            description,
            measured,
            Comparison::Within,
            tolerance,
            Some(target),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub passed: bool,
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn failed_claims(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.passed)
    }

    /// CSV with a fixed header; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("suite_seed,id,claim_ref,measured,target,tolerance,comparison,passed\n");
        for c in &self.claims {
            let target = c.target.map(|t| format!("{t:.16e}")).unwrap_or_default();
            let comparison = serde_json::to_value(c.comparison)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{:.16e},{},{:.16e},{},{}\n",
                self.seed, c.id, c.claim_ref, c.measured, target, c.tolerance, comparison, c.passed
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Sample count for φ grids and random pair sweeps.
    pub grid: usize,
    pub tolerances: Tolerances,
    pub log_base: LogBase,
    /// Sign σ assumed by the rotation-correspondence claims.
    pub rotation_sign: i8,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            grid: 10_000,
            tolerances: Tolerances::DEFAULT,
            log_base: LogBase::Natural,
            rotation_sign: ROTATION_SIGN,
        }
    }
}

/// Runs the suites concurrently and merges their claims in suite order.
pub fn run(suites: &[Suite], config: &VerifyConfig) -> Result<Report> {
    let mut ordered: Vec<Suite> = suites.to_vec();
    ordered.sort();
    ordered.dedup();
    let results: Vec<Result<Vec<Claim>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ordered
            .iter()
            .map(|&suite| scope.spawn(move || run_suite(suite, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    let mut claims = Vec::new();
    for r in results {
        claims.extend(r?);
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        passed: claims.iter().all(|c| c.passed),
        suites: ordered,
        claims,
    })
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<Vec<Claim>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(suite.stream());
    match suite {
        Suite::D2nogo => d2nogo_suite(config),
        Suite::D3 => d3_suite(config, &mut rng),
        Suite::D4 => d4_suite(config, &mut rng),
        Suite::Geometry => geometry_suite(&mut rng),
        Suite::Oracle => oracle_suite(config, &mut rng),
    }
}

fn d2nogo_suite(config: &VerifyConfig) -> Result<Vec<Claim>> {
    let report = d2_nogo_check(1.0 / config.grid.max(2) as f64)?;
    let stray = report
        .orthogonal_points
        .iter()
        .filter(|&&q| q.abs() > 1e-6 && (q - 1.0).abs() > 1e-6)
        .count();
    let missing = [0.0, 1.0]
        .iter()
        .filter(|&&t| {
            !report
                .orthogonal_points
                .iter()
                .any(|&q| (q - t).abs() <= 1e-6)
        })
        .count();
    Ok(vec![
        Claim::le(
            "d2nogo.only_permutations",
            "d2-nogo",
            "orthogonal members of [[q,1-q],[1-q,q]] on q in [-1,2] are exactly q=0 and q=1",
            (stray + missing) as f64,
            0.0,
        ),
        Claim::new(
            "d2nogo.residual_elsewhere",
            "d2-nogo",
            "smallest orthogonality residual away from q in {0,1} exceeds the orthogonality tolerance",
            report.min_residual_elsewhere,
            Comparison::Gt,
            config.tolerances.orth,
            None,
        ),
    ])
}

fn phi_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 * TAU / n as f64)
}

fn entropy_deviation(
    s: &QuasiBistochasticMatrix,
    p: &ProbVector,
    order: RenyiOrder,
    config: &VerifyConfig,
) -> Result<f64> {
    let image = apply(s, p)?;
    let before = renyi_entropy_with(p, order, config.log_base, &config.tolerances)?;
    let after = renyi_entropy_with(&image, order, config.log_base, &config.tolerances)?;
    Ok((after - before).abs())
}

fn measurement_deviation<R: Rng>(frame: &Frame, n: usize, rng: &mut R) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..n {
        let m_hat: Vec<f64> = sample_unit_sphere(frame.bloch_dim(), rng)
            .iter()
            .copied()
            .collect();
        let b = sample_unit_ball(frame.bloch_dim(), rng);
        let p = bloch_to_state(&b, frame)?;
        let sv = b.to_vector(frame.bloch_dim());
        let dot: f64 = m_hat.iter().zip(sv.iter()).map(|(a, c)| a * c).sum();
        for outcome in [Outcome::Plus, Outcome::Minus] {
            let e = make_effect(&m_hat, outcome, frame)?;
            let want = 0.5 * (1.0 + outcome.sign() * dot);
            worst = worst.max((probability(&e, &p)?.value - want).abs());
        }
    }
    Ok(worst)
}

fn frame_residual(frame: &Frame) -> f64 {
    let r = frame.identity_residuals();
    r.unit_norm.max(r.sum).max(r.overcompleteness)
}

fn d3_suite(config: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Claim>> {
    let n = config.grid.max(3);
    let tol = config.tolerances;
    let trine = Frame::trine();
    let mut claims = Vec::new();

    let (mut orth_p, mut sum_p, mut orth_m, mut sum_m, mut det_dev) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let (mut q_min, mut q_max, mut max_negative) = (f64::INFINITY, f64::NEG_INFINITY, 0usize);
    for phi in phi_grid(n) {
        let (sp, sm) = (make_splus(phi), make_sminus(phi));
        orth_p = orth_p.max(sp.orthogonality_residual());
        sum_p = sum_p.max(sp.bistochastic_residual());
        orth_m = orth_m.max(sm.orthogonality_residual());
        sum_m = sum_m.max(sm.bistochastic_residual());
        det_dev = det_dev
            .max((sp.determinant() - 1.0).abs())
            .max((sm.determinant() + 1.0).abs());
        let q = q_coefficients(phi);
        q_min = q.iter().copied().fold(q_min, f64::min);
        q_max = q.iter().copied().fold(q_max, f64::max);
        max_negative = max_negative.max(q.iter().filter(|&&x| x < 0.0).count());
    }
    claims.push(Claim::le(
        "d3.splus_orthogonality",
        "d3-orthogonal-family",
        "max |S+ S+^T - I| over the phi grid",
        orth_p,
        tol.orth,
    ));
    claims.push(Claim::le(
        "d3.splus_bistochastic",
        "d3-orthogonal-family",
        "max row/column sum deviation of S+ over the phi grid",
        sum_p,
        tol.sum,
    ));
    claims.push(Claim::le(
        "d3.sminus_orthogonality",
        "d3-orthogonal-family",
        "max |S- S-^T - I| over the phi grid",
        orth_m,
        tol.orth,
    ));
    claims.push(Claim::le(
        "d3.sminus_bistochastic",
        "d3-orthogonal-family",
        "max row/column sum deviation of S- over the phi grid",
        sum_m,
        tol.sum,
    ));
    claims.push(Claim::le(
        "d3.determinants",
        "d3-orthogonal-family",
        "max |det S+ - 1| and |det S- + 1|",
        det_dev,
        1e-10,
    ));
    claims.push(Claim::new(
        "d3.q_min",
        "q-range",
        "min q_k over the phi grid is at least -1/3",
        q_min,
        Comparison::Ge,
        -1.0 / 3.0 - 1e-12,
        None,
    ));
    claims.push(Claim::le(
        "d3.q_max",
        "q-range",
        "max q_k over the phi grid is at most 1",
        q_max,
        1.0 + 1e-12,
    ));
    claims.push(Claim::le(
        "d3.single_negativity",
        "q-range",
        "largest number of negative q_k at any phi",
        max_negative as f64,
        1.0,
    ));

    let mut worst = 0.0_f64;
    for _ in 0..n {
        let phi = rng.random::<f64>() * TAU;
        let s = if rng.random::<bool>() {
            make_splus(phi)
        } else {
            make_sminus(phi)
        };
        let p = sample_domain_state(&trine, rng);
        worst = worst.max(entropy_deviation(&s, &p, RenyiOrder::COLLISION, config)?);
    }
    claims.push(Claim::le(
        "d3.collision_conservation",
        "collision-entropy-conservation",
        "max |H2(Sp) - H2(p)| over random (S, p) pairs in the trine domain",
        worst,
        1e-9,
    ));
    let witness = ProbVector::new(vec![2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0])?;
    let shannon = entropy_deviation(&make_splus(1.0), &witness, RenyiOrder::SHANNON, config)?;
    claims.push(Claim::new(
        "d3.shannon_not_conserved",
        "collision-entropy-conservation",
        "|H1(Sp) - H1(p)| for S+(1) on (2/3, 1/6, 1/6)",
        shannon,
        Comparison::Gt,
        1e-3,
        None,
    ));

    let search = DomainSearchConfig {
        random_directions: 200,
        ..DomainSearchConfig::default()
    };
    let bound = domain_bound_search(3, DynamicsSet::Continuous, &search, rng)?;
    claims.push(Claim::within(
        "d3.lambda_max",
        "d3-domain-bound",
        "largest positivity-preserving weight along the vertex ray",
        bound.lambda_max,
        0.5,
        1e-6,
    ));
    claims.push(Claim::within(
        "d3.extremal_norm",
        "d3-domain-bound",
        "collision norm K of the extremal state on the vertex ray",
        bound.k,
        0.5,
        1e-6,
    ));
    let spread = (bound.k_min_over_directions - 0.5)
        .abs()
        .max((bound.k_max_over_directions - 0.5).abs());
    claims.push(Claim::le(
        "d3.extremal_norm_isotropic",
        "d3-domain-bound",
        "max |K - 1/2| over random rays through the uniform state",
        spread,
        1e-6,
    ));
    let perm = domain_bound_search(3, DynamicsSet::Permutations, &search, rng)?;
    claims.push(Claim::within(
        "d3.permutations_allow_simplex",
        "d3-domain-bound",
        "permutations alone preserve the whole simplex (lambda = 1)",
        perm.lambda_max,
        1.0,
        1e-12,
    ));

    claims.push(Claim::le(
        "d3.frame_identities",
        "frame-overcompleteness",
        "trine: unit norms, zero sum, sum of outer products = (3/2) I",
        frame_residual(&trine),
        1e-12,
    ));
    claims.push(Claim::le(
        "d3.measurement_consistency",
        "effects",
        "max |e(+-|m) p - (1 +- m.s)/2| over random (m, b)",
        measurement_deviation(&trine, n, rng)?,
        1e-12,
    ));

    let mut rot_dev = 0.0_f64;
    for phi in phi_grid(100) {
        for j in 0..24 {
            for k in 1..=5 {
                let b = BlochPoint::from_polar(k as f64 / 5.0, j as f64 * TAU / 24.0);
                rot_dev = rot_dev.max(rotation_deviation(phi, &b, config.rotation_sign)?);
            }
        }
    }
    claims.push(Claim::le(
        "d3.rotation_correspondence",
        "planar-rotation",
        "max |S+(phi) p(b) - p(Rot(sigma phi) b)| with the fixed sign sigma",
        rot_dev,
        1e-12,
    ));

    let mut class_dev = 0.0_f64;
    let mut misclassified = 0usize;
    for phi in phi_grid(n / 10 + 1) {
        for (s, plus) in [(make_splus(phi), true), (make_sminus(phi), false)] {
            match classify_within(&s, &tol) {
                Ok(c @ Classification3::Splus { .. }) if plus => {
                    class_dev =
                        class_dev.max(c.generator().expect("family").matrix().max_abs_diff(&s))
                }
                Ok(c @ Classification3::Sminus { .. }) if !plus => {
                    class_dev =
                        class_dev.max(c.generator().expect("family").matrix().max_abs_diff(&s))
                }
                _ => misclassified += 1,
            }
        }
    }
    claims.push(Claim::le(
        "d3.classify_round_trip",
        "d3-orthogonal-family",
        "max reconstruction error after classifying S+ and S- samples",
        class_dev,
        1e-10,
    ));
    claims.push(Claim::le(
        "d3.classify_family",
        "d3-orthogonal-family",
        "samples assigned to the wrong family",
        misclassified as f64,
        0.0,
    ));

    let mut bvn = 0.0_f64;
    let mut closure = 0.0_f64;
    for _ in 0..1000 {
        let (a, b) = (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
        let s = if rng.random::<bool>() {
            make_splus(a)
        } else {
            make_sminus(a)
        };
        let dec = decompose_bvn(&s)?;
        bvn = bvn.max((dec.reconstruct() - s.matrix()).amax());
        bvn = bvn.max((dec.gauge_shift(0.37).reconstruct() - s.matrix()).amax());
        bvn = bvn.max((dec.coefficient_sum() - 1.0).abs());
        let ga = if rng.random::<bool>() {
            RotationGenerator3::plus(a)
        } else {
            RotationGenerator3::minus(a)
        };
        let gb = if rng.random::<bool>() {
            RotationGenerator3::plus(b)
        } else {
            RotationGenerator3::minus(b)
        };
        let product = ga.matrix().mul(&gb.matrix())?;
        closure = closure.max(compose(ga, gb).matrix().max_abs_diff(&product));
    }
    claims.push(Claim::le(
        "d3.bvn_reconstruction",
        "bvn-decomposition",
        "signed permutation expansion reconstructs S, is gauge invariant and sums to 1",
        bvn,
        1e-12,
    ));
    claims.push(Claim::le(
        "d3.composition_closure",
        "d3-orthogonal-family",
        "closed-form composition matches the matrix product",
        closure,
        1e-12,
    ));

    let pi = PermutationMatrix::pi3();
    let perms = [PermutationMatrix::identity(3)?, pi.pow(2), pi.clone()];
    let perm_dev = permutation_angles()
        .iter()
        .zip(&perms)
        .map(|(&phi, p)| (make_splus(phi).matrix() - p.to_matrix()).amax())
        .fold(0.0, f64::max);
    claims.push(Claim::le(
        "d3.permutation_points",
        "d3-orthogonal-family",
        "S+ at 0, 2pi/3, 4pi/3 equals I, Pi^2, Pi",
        perm_dev,
        1e-15,
    ));
    Ok(claims)
}

fn random_angles<R: Rng>(rng: &mut R) -> [f64; 4] {
    std::array::from_fn(|_| rng.random::<f64>() * TAU)
}

fn d4_suite(config: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Claim>> {
    let n = config.grid.max(1);
    let tol = config.tolerances;
    let tetra = Frame::tetrahedron();
    let mut claims = Vec::new();

    let (mut orth, mut sums, mut det, mut fixed, mut worst) =
        (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..n {
        let s = make_composed(random_angles(rng));
        orth = orth.max(s.orthogonality_residual());
        sums = sums.max(s.bistochastic_residual());
        det = det.max((s.determinant() - 1.0).abs());
        fixed = fixed.max(uniform_state_is_fixed(&s));
        let p = sample_domain_state(&tetra, rng);
        worst = worst.max(entropy_deviation(&s, &p, RenyiOrder::COLLISION, config)?);
    }
    claims.push(Claim::le(
        "d4.composed_orthogonality",
        "d4-composed-rotations",
        "max |S S^T - I| over random composed rotations",
        orth,
        tol.orth,
    ));
    claims.push(Claim::le(
        "d4.composed_bistochastic",
        "d4-composed-rotations",
        "max row/column sum deviation over random composed rotations",
        sums,
        tol.sum,
    ));
    claims.push(Claim::le(
        "d4.composed_determinant",
        "d4-composed-rotations",
        "max |det S - 1| over random composed rotations",
        det,
        1e-10,
    ));
    claims.push(Claim::le(
        "d4.uniform_fixed",
        "d4-composed-rotations",
        "max |S u - u| for the uniform state",
        fixed,
        1e-12,
    ));
    claims.push(Claim::le(
        "d4.collision_conservation",
        "collision-entropy-conservation",
        "max |H2(Sp) - H2(p)| over random (S, p) pairs in the tetrahedron domain",
        worst,
        1e-9,
    ));

    let search = DomainSearchConfig {
        random_directions: 100,
        ..DomainSearchConfig::default()
    };
    let bound = domain_bound_search(4, DynamicsSet::Continuous, &search, rng)?;
    claims.push(Claim::within(
        "d4.lambda_max",
        "d4-domain-bound",
        "largest positivity-preserving weight along the vertex ray",
        bound.lambda_max,
        1.0 / 3.0,
        1e-6,
    ));
    claims.push(Claim::within(
        "d4.extremal_norm",
        "d4-domain-bound",
        "collision norm K of the extremal state on the vertex ray",
        bound.k,
        1.0 / 3.0,
        1e-6,
    ));
    let spread = (bound.k_min_over_directions - 1.0 / 3.0)
        .abs()
        .max((bound.k_max_over_directions - 1.0 / 3.0).abs());
    claims.push(Claim::le(
        "d4.extremal_norm_isotropic",
        "d4-domain-bound",
        "max |K - 1/3| over random rays through the uniform state",
        spread,
        1e-6,
    ));

    claims.push(Claim::le(
        "d4.frame_identities",
        "frame-overcompleteness",
        "tetrahedron: unit norms, zero sum, sum of outer products = (4/3) I",
        frame_residual(&tetra),
        1e-12,
    ));
    claims.push(Claim::le(
        "d4.measurement_consistency",
        "effects",
        "max |e(+-|m) p - (1 +- m.s)/2| over random (m, b)",
        measurement_deviation(&tetra, n, rng)?,
        1e-12,
    ));

    let cfg = FactorizeConfig::default();
    let mut residual = 0.0_f64;
    let mut failures = 0usize;
    for _ in 0..100 {
        let s = make_composed(random_angles(rng));
        let f = factorize(&s, &cfg)?;
        residual = residual.max(make_composed(f.angles()).max_abs_diff(&s));
        failures += usize::from(!f.is_converged());
    }
    claims.push(Claim::le(
        "d4.factorize_round_trip",
        "d4-composed-rotations",
        "max |R1R2R3R4(recovered) - S| for random composed S",
        residual,
        1e-8,
    ));
    claims.push(Claim::le(
        "d4.factorize_failures",
        "d4-composed-rotations",
        "composed rotations that failed to factorize",
        failures as f64,
        0.0,
    ));
    Ok(claims)
}

fn geometry_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    let mut constraint = 0.0_f64;
    let mut basis = 0.0_f64;
    for n in 2..=16 {
        basis = basis.max(basis_residual(n)?);
        for _ in 0..1000 {
            let angles: Vec<f64> = (0..n - 2)
                .map(|k| rng.random::<f64>() * if k + 3 == n { TAU } else { PI })
                .collect();
            let param = SphereParam {
                n,
                angles,
                antipode: rng.random::<bool>(),
            };
            let (s, q) = constraint_residuals(&param.point()?);
            constraint = constraint.max(s).max(q);
        }
    }
    claims.push(Claim::le(
        "geometry.constraints",
        "sphere-plane-intersection",
        "max |sum a - 1| and |sum a^2 - 1| for n = 2..16",
        constraint,
        1e-12,
    ));
    claims.push(Claim::le(
        "geometry.basis_orthogonality",
        "sphere-plane-intersection",
        "max |U^T U - I| of the completed basis for n = 2..16",
        basis,
        1e-13,
    ));

    let a = simplex_sphere_point(2, &[])?;
    let b = SphereParam {
        n: 2,
        angles: vec![],
        antipode: true,
    }
    .point()?;
    let n2 = (a[0] - 1.0)
        .abs()
        .max(a[1].abs())
        .max(b[0].abs())
        .max((b[1] - 1.0).abs());
    claims.push(Claim::le(
        "geometry.n2_vertices",
        "sphere-plane-intersection",
        "n = 2 solutions are (1,0) and (0,1)",
        n2,
        1e-12,
    ));

    let points: Vec<Vec<f64>> = phi_grid(10_000)
        .map(|t| simplex_sphere_point(3, &[t]))
        .collect::<Result<_>>()?;
    let mut family = 0.0_f64;
    for a in points.iter().step_by(10) {
        let dist = |phi: f64| {
            let mut q = q_coefficients(phi).to_vec();
            let mut s = a.clone();
            q.sort_by(f64::total_cmp);
            s.sort_by(f64::total_cmp);
            q.iter()
                .zip(&s)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        family = family.max(dist(angle_from_coefficients([a[0], a[1], a[2]])));
    }
    claims.push(Claim::le(
        "geometry.n3_q_family",
        "sphere-plane-intersection",
        "n = 3 solutions match q(phi) after sorting",
        family,
        1e-10,
    ));
    let mut gap = 0.0_f64;
    for phi in phi_grid(2000) {
        let q = q_coefficients(phi + PI / 2000.0);
        let nearest = points
            .iter()
            .map(|a| {
                a.iter()
                    .zip(q)
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        gap = gap.max(nearest);
    }
    claims.push(Claim::le(
        "geometry.n3_covering",
        "sphere-plane-intersection",
        "largest distance from the q circle to 10^4 generated points",
        gap,
        0.01,
    ));
    Ok(claims)
}

fn oracle_suite(config: &VerifyConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Claim>> {
    let tol = config.tolerances;
    let trine = Frame::trine();
    let tetra = Frame::tetrahedron();
    let mut claims = Vec::new();

    let planar = phi_grid(1000)
        .map(|phi| {
            lift_to_lattice(
                &BlochRotation::planar(config.rotation_sign as f64 * phi),
                &trine,
            )
            .map(|s| s.max_abs_diff(&make_splus(phi)))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    claims.push(Claim::le(
        "oracle.planar_lift_is_splus",
        "planar-rotation",
        "max |lift(Rot(sigma phi)) - S+(phi)|",
        planar,
        1e-12,
    ));

    let mut identity = 0.0_f64;
    for (frame, o) in [
        (&trine, BlochRotation::planar(rng.random::<f64>() * TAU)),
        (&tetra, BlochRotation::random_so3(rng)),
    ] {
        let s = lift_to_lattice(&o, frame)?;
        for _ in 0..1000 {
            let b = sample_unit_ball(frame.bloch_dim(), rng);
            let lhs = apply(&s, &bloch_to_state(&b, frame)?)?;
            let ob = BlochPoint::from_vector(&(o.matrix() * b.to_vector(frame.bloch_dim())));
            let rhs = bloch_to_vector(&ob, frame)?;
            identity = identity.max((lhs.as_dvector() - rhs.as_dvector()).amax());
        }
    }
    claims.push(Claim::le(
        "oracle.lift_identity",
        "frame-lift",
        "max |S p(b) - p(O b)| for the lifted rotation",
        identity,
        1e-12,
    ));

    let cfg = FactorizeConfig::default();
    let (mut orth, mut sums, mut residual, mut failures) = (0.0_f64, 0.0_f64, 0.0_f64, 0usize);
    let (mut homomorphism, mut norm, mut round_trip) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut previous: Option<(BlochRotation, QuasiBistochasticMatrix)> = None;
    for _ in 0..1000 {
        let o = BlochRotation::random_so3(rng);
        let s = lift_to_lattice(&o, &tetra)?;
        orth = orth.max(s.orthogonality_residual());
        sums = sums.max(s.bistochastic_residual());
        let f = factorize(&s, &cfg)?;
        residual = residual.max(f.residual());
        failures += usize::from(!f.is_converged());

        if let Some((o_prev, s_prev)) = &previous {
            let joint = lift_to_lattice(&o_prev.compose(&o)?, &tetra)?;
            homomorphism = homomorphism.max(joint.max_abs_diff(&s_prev.mul(&s)?));
        }
        let v = ProbVector::new((0..4).map(|_| rng.random::<f64>() * 2.0 - 0.5).collect())?;
        let moved = apply(&s, &v)?;
        norm = norm.max((moved.as_dvector().norm_squared() - v.as_dvector().norm_squared()).abs());
        let b = sample_unit_ball(3, rng);
        let back = state_to_bloch(&apply(&s, &bloch_to_state(&b, &tetra)?)?, &tetra)?;
        round_trip =
            round_trip.max(back.distance(&BlochPoint::from_vector(&(o.matrix() * b.to_vector(3)))));
        previous = Some((o, s));
    }
    claims.push(Claim::le(
        "oracle.so3_orthogonality",
        "frame-lift",
        "max |S S^T - I| over 1000 lifted SO(3) rotations",
        orth,
        tol.orth,
    ));
    claims.push(Claim::le(
        "oracle.so3_bistochastic",
        "frame-lift",
        "max row/column sum deviation over 1000 lifted SO(3) rotations",
        sums,
        tol.sum,
    ));
    claims.push(Claim::le(
        "oracle.so3_factorize",
        "d4-composed-rotations",
        "max factorization residual over 1000 lifted SO(3) rotations",
        residual,
        1e-8,
    ));
    claims.push(Claim::le(
        "oracle.so3_no_convergence",
        "d4-composed-rotations",
        "lifted rotations without a converged factorization",
        failures as f64,
        0.0,
    ));
    claims.push(Claim::le(
        "oracle.homomorphism",
        "frame-lift",
        "max |lift(O1 O2) - lift(O1) lift(O2)|",
        homomorphism,
        1e-12,
    ));
    claims.push(Claim::le(
        "oracle.norm_transport",
        "frame-lift",
        "max ||S v|^2 - |v|^2| for arbitrary vectors",
        norm,
        1e-12,
    ));
    claims.push(Claim::le(
        "oracle.round_trip",
        "frame-lift",
        "max |bloch(S p(b)) - O b|",
        round_trip,
        1e-12,
    ));

    let mirror = OrthogonalMap::new(nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[-1.0, 0.0, 0.0, 1.0],
    ))?;
    let lifted = reflection_lift(&mirror, &trine)?;
    let wrong_family = match classify_within(&lifted.matrix, &tol) {
        Ok(Classification3::Sminus { .. }) => 0.0,
        _ => 1.0,
    };
    claims.push(Claim::le(
        "oracle.mirror_is_sminus",
        "reflections",
        "a mirror of the Bloch plane lifts into the S- family",
        wrong_family,
        0.0,
    ));
    let not = OrthogonalMap::new(-nalgebra::DMatrix::<f64>::identity(3, 3))?;
    let not_lift = reflection_lift(&not, &tetra)?;
    let accepted = match factorize(&not_lift.matrix, &cfg) {
        Err(crate::error::Error::WrongDeterminant { .. }) => 0.0,
        _ => 1.0,
    };
    claims.push(Claim::le(
        "oracle.universal_not_excluded",
        "reflections",
        "the lifted universal-NOT is rejected by the continuous factorization",
        accepted,
        0.0,
    ));
    Ok(claims)
}
