//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout.

use std::f64::consts::TAU;
use std::process::Command;
use std::time::{Duration, Instant};

use entroqubit::dynamics3::{
    angle_from_coefficients, d2_nogo_check, make_sminus, make_splus, q_coefficients,
};
use entroqubit::dynamics4::{factorize, make_composed, FactorizeConfig};
use entroqubit::effects::{make_effect, probability, Outcome};
use entroqubit::entropy::{renyi_entropy, RenyiOrder};
use entroqubit::geometry::{constraint_residuals, simplex_sphere_point, SphereParam};
use entroqubit::lattice::{apply, ProbVector, QuasiBistochasticMatrix};
use entroqubit::oracle::{lift_to_lattice, BlochRotation};
use entroqubit::states::{
    bloch_to_state, domain_bound_search, rotation_correspondence_check, sample_domain_state,
    sample_unit_ball, sample_unit_sphere, DomainSearchConfig, DynamicsSet, Frame, ROTATION_SIGN,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn timed<F: FnOnce() -> Verdict>(limit: Duration, f: F) -> Verdict {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.passed &= elapsed < limit;
    out.detail.push_str(&format!(
        "; {:.2}s (limit {}s)",
        elapsed.as_secs_f64(),
        limit.as_secs()
    ));
    out
}

fn random_angles(rng: &mut ChaCha8Rng) -> [f64; 4] {
    std::array::from_fn(|_| rng.random::<f64>() * TAU)
}

fn entropy_change(s: &QuasiBistochasticMatrix, p: &ProbVector, order: RenyiOrder) -> f64 {
    let after = renyi_entropy(&apply(s, p).unwrap(), order).unwrap();
    (after - renyi_entropy(p, order).unwrap()).abs()
}

fn orthogonality_and_sums() -> Verdict {
    timed(Duration::from_secs(5), || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut orth, mut sums) = (0.0_f64, 0.0_f64);
        for i in 0..10_000 {
            let phi = i as f64 * TAU / 10_000.0;
            for s in [
                make_splus(phi),
                make_sminus(phi),
                make_composed(random_angles(&mut rng)),
            ] {
                orth = orth.max(s.orthogonality_residual());
                sums = sums.max(s.bistochastic_residual());
            }
        }
        check(
            orth <= 1e-10 && sums <= 1e-12,
            format!("max |SSᵀ−I| = {orth:.3e} (≤ 1e-10), max sum dev = {sums:.3e} (≤ 1e-12)"),
        )
    })
}

fn collision_conservation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (trine, tetra) = (Frame::trine(), Frame::tetrahedron());
    let mut worst = 0.0_f64;
    for i in 0..10_000 {
        let (s, p) = match i % 3 {
            0 => (
                make_splus(rng.random::<f64>() * TAU),
                sample_domain_state(&trine, &mut rng),
            ),
            1 => (
                make_sminus(rng.random::<f64>() * TAU),
                sample_domain_state(&trine, &mut rng),
            ),
            _ => (
                make_composed(random_angles(&mut rng)),
                sample_domain_state(&tetra, &mut rng),
            ),
        };
        worst = worst.max(entropy_change(&s, &p, RenyiOrder::COLLISION));
    }
    let p = ProbVector::new(vec![2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]).unwrap();
    let shannon = entropy_change(&make_splus(1.0), &p, RenyiOrder::SHANNON);
    check(
        worst <= 1e-9 && shannon > 1e-3,
        format!(
            "max |ΔH₂| = {worst:.3e} (≤ 1e-9); Shannon |ΔH₁| for S₊(1) = {shannon:.4} (> 1e-3)"
        ),
    )
}

fn q_range() -> Verdict {
    let (mut lo, mut hi, mut negatives) = (f64::INFINITY, f64::NEG_INFINITY, 0usize);
    for i in 0..10_000 {
        let q = q_coefficients(i as f64 * TAU / 10_000.0);
        lo = q.iter().copied().fold(lo, f64::min);
        hi = q.iter().copied().fold(hi, f64::max);
        negatives = negatives.max(q.iter().filter(|&&x| x < 0.0).count());
    }
    check(
        lo >= -1.0 / 3.0 - 1e-12 && hi <= 1.0 + 1e-12 && negatives <= 1,
        format!("min q = {lo:.15}, max q = {hi:.15}, most negatives at one φ = {negatives}"),
    )
}

fn d2_nogo() -> Verdict {
    let r = d2_nogo_check(1e-4).unwrap();
    check(
        r.only_permutations(),
        format!(
            "{} grid points, orthogonal at {:?}",
            r.grid_points, r.orthogonal_points
        ),
    )
}

fn domain_bounds() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = DomainSearchConfig {
        random_directions: 200,
        ..DomainSearchConfig::default()
    };
    let d3 = timed(Duration::from_secs(30), || {
        let r = domain_bound_search(3, DynamicsSet::Continuous, &cfg, &mut rng).unwrap();
        check(
            (r.lambda_max - 0.5).abs() <= 1e-6 && (r.k - 0.5).abs() <= 1e-6,
            format!("d=3 λ_max = {:.12}, K = {:.12}", r.lambda_max, r.k),
        )
    });
    let d4 = timed(Duration::from_secs(30), || {
        let r = domain_bound_search(4, DynamicsSet::Continuous, &cfg, &mut rng).unwrap();
        check(
            (r.k - 1.0 / 3.0).abs() <= 1e-6,
            format!("d=4 K = {:.12}", r.k),
        )
    });
    check(
        d3.passed && d4.passed,
        format!("{}; {}", d3.detail, d4.detail),
    )
}

fn frame_identities() -> Verdict {
    let worst = [Frame::trine(), Frame::tetrahedron()]
        .iter()
        .map(|f| {
            let r = f.identity_residuals();
            r.unit_norm.max(r.sum).max(r.overcompleteness)
        })
        .fold(0.0, f64::max);
    check(
        worst <= 1e-12,
        format!("max frame identity residual = {worst:.3e} (≤ 1e-12)"),
    )
}

fn measurement_consistency() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    for frame in [Frame::trine(), Frame::tetrahedron()] {
        let n = frame.bloch_dim();
        for _ in 0..10_000 {
            let m: Vec<f64> = sample_unit_sphere(n, &mut rng).iter().copied().collect();
            let b = sample_unit_ball(n, &mut rng);
            let p = bloch_to_state(&b, &frame).unwrap();
            let dot: f64 = m
                .iter()
                .zip(b.to_vector(n).iter())
                .map(|(x, y)| x * y)
                .sum();
            for outcome in [Outcome::Plus, Outcome::Minus] {
                let e = make_effect(&m, outcome, &frame).unwrap();
                let want = 0.5 * (1.0 + outcome.sign() * dot);
                worst = worst.max((probability(&e, &p).unwrap().value - want).abs());
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("max |e·p − ½(1 ± m̂·s)| = {worst:.3e} (≤ 1e-12)"),
    )
}

fn rotation_correspondence() -> Verdict {
    match rotation_correspondence_check(360, 36, 10, 1e-12) {
        Ok(r) => check(
            r.sigma == ROTATION_SIGN
                && r.max_deviation <= 1e-12
                && r.max_deviation_other_sign > 1e-3,
            format!(
                "σ = {:+}, {} points, max deviation = {:.3e}, opposite sign = {:.3e}",
                r.sigma, r.points, r.max_deviation, r.max_deviation_other_sign
            ),
        ),
        Err(e) => check(false, e.to_string()),
    }
}

fn oracle_factorization() -> Verdict {
    timed(Duration::from_secs(120), || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = FactorizeConfig::default();
        let tetra = Frame::tetrahedron();
        let (mut matrix_ok, mut residual, mut failures) = (true, 0.0_f64, 0usize);
        for _ in 0..1000 {
            let s = lift_to_lattice(&BlochRotation::random_so3(&mut rng), &tetra).unwrap();
            matrix_ok &= s.is_orthogonal()
                && s.bistochastic_residual() <= 1e-12
                && (s.determinant() - 1.0).abs() < 1e-10;
            let f = factorize(&s, &cfg).unwrap();
            residual = residual.max(f.residual());
            failures += usize::from(!f.is_converged());
        }
        check(
            matrix_ok && residual <= 1e-8 && failures == 0,
            format!("matrix checks {}, max residual = {residual:.3e} (≤ 1e-8), no-convergence = {failures}", if matrix_ok { "ok" } else { "FAILED" }),
        )
    })
}

fn sphere_plane() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0_f64;
    for n in 2..=16 {
        for _ in 0..1000 {
            let angles: Vec<f64> = (0..n - 2).map(|_| rng.random::<f64>() * TAU).collect();
            let param = SphereParam {
                n,
                angles,
                antipode: rng.random::<bool>(),
            };
            let (s, q) = constraint_residuals(&param.point().unwrap());
            worst = worst.max(s).max(q);
        }
    }
    let mut circle = 0.0_f64;
    for i in 0..10_000 {
        let a = simplex_sphere_point(3, &[i as f64 * TAU / 10_000.0]).unwrap();
        let mut q = q_coefficients(angle_from_coefficients([a[0], a[1], a[2]])).to_vec();
        let mut s = a.clone();
        q.sort_by(f64::total_cmp);
        s.sort_by(f64::total_cmp);
        circle = q
            .iter()
            .zip(&s)
            .map(|(x, y)| (x - y).abs())
            .fold(circle, f64::max);
    }
    check(
        worst <= 1e-12 && circle <= 1e-10,
        format!(
            "max constraint residual = {worst:.3e} (≤ 1e-12), n=3 vs q(φ) = {circle:.3e} (≤ 1e-10)"
        ),
    )
}

fn determinism() -> Verdict {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_entroqubit"))
            .args(["verify", "all", "--seed", "42"])
            .output()
            .expect("run entroqubit")
    };
    let (a, b) = (run(), run());
    check(
        a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty(),
        format!(
            "exit codes {:?}/{:?}, {} bytes, identical = {}",
            a.status.code(),
            b.status.code(),
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("orthogonality and bistochasticity", orthogonality_and_sums),
        ("collision-entropy conservation", collision_conservation),
        ("q range and single negativity", q_range),
        ("d=2 no-go", d2_nogo),
        ("domain bounds", domain_bounds),
        ("frame identities", frame_identities),
        ("measurement consistency", measurement_consistency),
        ("rotation correspondence", rotation_correspondence),
        ("oracle lift and factorization", oracle_factorization),
        ("sphere-plane parameterization", sphere_plane),
        ("report determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        failed += usize::from(!out.passed);
        println!(
            "{} criterion {:>2} {name}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail
        );
    }
    println!(
        "acceptance: {}/{} passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
