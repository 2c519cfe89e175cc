//! Renyi-α entropies and the entropy-conservation predicate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{apply, ProbVector, QuasiBistochasticMatrix, Tolerances};

/// Conservation tolerance on `|H_α(Sp) − H_α(p)|`.
pub const ENTROPY_TOL: f64 = 1e-9;

/// A Renyi order `α ≥ 0`; `α = 1` selects the Shannon limit.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub const SHANNON: RenyiOrder = RenyiOrder(1.0);
    pub const COLLISION: RenyiOrder = RenyiOrder(2.0);

    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha >= 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!(
                "Renyi order must be a finite α ≥ 0, got {alpha}"
            )))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    fn rescale(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }
}

/// `H_α(p)` in nats.
///
/// Entries in `(−τ_pos, 0)` are clamped to zero; anything more negative is a
/// domain error, as is a state that does not sum to one.
pub fn renyi_entropy(p: &ProbVector, order: RenyiOrder) -> Result<f64> {
    renyi_entropy_with(p, order, LogBase::Natural, &Tolerances::DEFAULT)
}

pub fn renyi_entropy_with(
    p: &ProbVector,
    order: RenyiOrder,
    base: LogBase,
    tol: &Tolerances,
) -> Result<f64> {
    if !p.is_positive_within(tol) {
        return Err(Error::Domain(format!(
            "entropy of a quasi-distribution (min entry {:e})",
            p.min_entry()
        )));
    }
    if !p.is_normalized_within(tol) {
        return Err(Error::Domain(format!("state sums to {}", p.sum())));
    }
    let probs = p.entries().iter().map(|&x| x.max(0.0));
    let alpha = order.alpha();
    let nats = if alpha == 0.0 {
        (probs.filter(|&x| x > 0.0).count() as f64).ln()
    } else if alpha == 1.0 {
        -probs.filter(|&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
    } else {
        let power_sum: f64 = probs.filter(|&x| x > 0.0).map(|x| x.powf(alpha)).sum();
        power_sum.ln() / (1.0 - alpha)
    };
    Ok(base.rescale(nats))
}

/// `|p|² = Σ p_i²`, defined for any real vector.
pub fn collision_norm(p: &ProbVector) -> f64 {
    p.as_dvector().norm_squared()
}

/// Collision entropy `H₂(p) = −log |p|²`.
pub fn collision_entropy(p: &ProbVector) -> Result<f64> {
    renyi_entropy(p, RenyiOrder::COLLISION)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConservationVerdict {
    Conserved,
    NotConserved,
    /// A sampled state was mapped out of the simplex; entropy comparison
    /// is meaningless there.
    DomainViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub verdict: ConservationVerdict,
    pub max_deviation: f64,
    pub samples: usize,
    /// Most negative entry of `S p` seen, when it fell below `−τ_pos`.
    pub worst_negative_entry: Option<f64>,
}

impl ConservationReport {
    pub fn passed(&self) -> bool {
        self.verdict == ConservationVerdict::Conserved
    }
}

/// Evaluates `max |H_α(S p) − H_α(p)|` over `n_samples` states drawn from
/// `sampler`.
pub fn conserves_renyi<F>(
    s: &QuasiBistochasticMatrix,
    order: RenyiOrder,
    mut sampler: F,
    n_samples: usize,
) -> Result<ConservationReport>
where
    F: FnMut() -> ProbVector,
{
    let tol = Tolerances::DEFAULT;
    let mut max_deviation = 0.0_f64;
    let mut worst_negative: Option<f64> = None;
    for _ in 0..n_samples {
        let p = sampler();
        let image = apply(s, &p)?;
        if !image.is_positive_within(&tol) {
            let m = image.min_entry();
            worst_negative = Some(worst_negative.map_or(m, |w| w.min(m)));
            continue;
        }
        let before = renyi_entropy(&p, order)?;
        let after = renyi_entropy(&image, order)?;
        max_deviation = max_deviation.max((after - before).abs());
    }
    let verdict = if worst_negative.is_some() {
        ConservationVerdict::DomainViolation
    } else if max_deviation <= ENTROPY_TOL {
        ConservationVerdict::Conserved
    } else {
        ConservationVerdict::NotConserved
    };
    Ok(ConservationReport {
        verdict,
        max_deviation,
        samples: n_samples,
        worst_negative_entry: worst_negative,
    })
}
