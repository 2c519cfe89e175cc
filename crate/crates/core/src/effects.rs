//! Two-outcome measurements on the lattice.
//!
//! Measuring along a unit direction `m̂` in Bloch space uses the effects
//! `e(±|m̂) = ½(1 ± v)` with `v_k = (d−1) m̂·f_k`, so that
//! `e(±|m̂)·p = ½(1 ± m̂·s)` for the Bloch point `s` of `p`.

use std::f64::consts::TAU;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ProbVector;
use crate::states::{default_frame, domain_membership, BlochPoint, Frame, Membership};

pub const UNIT_TOL: f64 = 1e-12;
pub const VALIDITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub d: usize,
    pub m_hat: Vec<f64>,
    pub outcome: Outcome,
    pub e: Vec<f64>,
}

pub fn make_effect(m_hat: &[f64], outcome: Outcome, frame: &Frame) -> Result<Effect> {
    if m_hat.len() != frame.bloch_dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.bloch_dim(),
            got: m_hat.len(),
        });
    }
    let m = DVector::from_column_slice(m_hat);
    if (m.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidParameter(format!(
            "measurement direction has norm {}",
            m.norm()
        )));
    }
    let scale = (frame.dim() - 1) as f64;
    let e = frame
        .vectors()
        .iter()
        .map(|f| 0.5 * (1.0 + outcome.sign() * scale * m.dot(f)))
        .collect();
    Ok(Effect {
        d: frame.dim(),
        m_hat: m_hat.to_vec(),
        outcome,
        e,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    pub value: f64,
    /// False when the state lies outside the state domain; the value is
    /// then not guaranteed to lie in `[0, 1]`.
    pub in_domain: bool,
}

/// `e · p`.
pub fn probability(effect: &Effect, p: &ProbVector) -> Result<Probability> {
    if p.dim() != effect.d {
        return Err(Error::DimensionMismatch {
            expected: effect.d,
            got: p.dim(),
        });
    }
    let value = effect.e.iter().zip(p.entries()).map(|(a, b)| a * b).sum();
    let in_domain = matches!(
        domain_membership(p, effect.d)?,
        Membership::Interior | Membership::Extremal
    );
    Ok(Probability { value, in_domain })
}

/// `½(1 ± m̂·s)` evaluated directly in Bloch space.
pub fn bloch_probability(m_hat: &[f64], outcome: Outcome, s: &BlochPoint) -> f64 {
    let sv = [s.x, s.y, s.z];
    let dot: f64 = m_hat.iter().zip(sv).map(|(a, b)| a * b).sum();
    0.5 * (1.0 + outcome.sign() * dot)
}

/// Exact `(min, max)` of `m·p` over the state domain of `frame`.
///
/// With `p = (1 + Bᵀb)/d` and `|b| ≤ 1`, `m·p = mean(m) + (Bm)·b / d`, so
/// the extrema are `mean(m) ∓ |Bm| / d`.
pub fn effect_extrema(m: &[f64], frame: &Frame) -> Result<(f64, f64)> {
    if m.len() != frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.dim(),
            got: m.len(),
        });
    }
    let d = frame.dim() as f64;
    let mv = DVector::from_column_slice(m);
    let mean = mv.sum() / d;
    let spread = (frame.matrix() * mv).norm() / d;
    Ok((mean - spread, mean + spread))
}

pub fn is_valid_effect_in(m: &[f64], frame: &Frame) -> Result<bool> {
    let (lo, hi) = effect_extrema(m, frame)?;
    Ok(lo >= -VALIDITY_TOL && hi <= 1.0 + VALIDITY_TOL)
}

/// Validity of `m` against the default trine or tetrahedron domain.
pub fn is_valid_effect(m: &[f64], d: usize) -> Result<bool> {
    is_valid_effect_in(m, &default_frame(d)?)
}

/// Scans measurement directions for a valid effect with a negative entry,
/// which no classical (simplex) effect can have.
pub fn negative_effect_witness(frame: &Frame, steps: usize) -> Result<Option<Effect>> {
    let directions: Vec<Vec<f64>> = match frame.bloch_dim() {
        2 => (0..steps)
            .map(|i| {
                let a = i as f64 * TAU / steps as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => (0..steps)
            .flat_map(|i| {
                let polar = (i as f64 + 0.5) * std::f64::consts::PI / steps as f64;
                (0..steps).map(move |j| {
                    let az = j as f64 * TAU / steps as f64;
                    vec![polar.sin() * az.cos(), polar.sin() * az.sin(), polar.cos()]
                })
            })
            .collect(),
    };
    for m_hat in directions {
        for outcome in [Outcome::Plus, Outcome::Minus] {
            let effect = make_effect(&m_hat, outcome, frame)?;
            if effect.e.iter().any(|&x| x < -1e-9) && is_valid_effect_in(&effect.e, frame)? {
                return Ok(Some(effect));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bloch_to_state, state_to_bloch};

    #[test]
    fn aligned_extremal_state_is_certain() {
        let trine = Frame::trine();
        let p = bloch_to_state(&BlochPoint::planar(0.0, 1.0), &trine).unwrap();
        let plus = make_effect(&[0.0, 1.0], Outcome::Plus, &trine).unwrap();
        let minus = make_effect(&[0.0, 1.0], Outcome::Minus, &trine).unwrap();
        assert!((probability(&plus, &p).unwrap().value - 1.0).abs() < 1e-15);
        assert!(probability(&minus, &p).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn uniform_state_is_a_coin() {
        for frame in [Frame::trine(), Frame::tetrahedron()] {
            let u = ProbVector::uniform(frame.dim()).unwrap();
            let m_hat: Vec<f64> = if frame.dim() == 3 {
                vec![0.6, 0.8]
            } else {
                vec![0.48, 0.6, 0.64]
            };
            for outcome in [Outcome::Plus, Outcome::Minus] {
                let e = make_effect(&m_hat, outcome, &frame).unwrap();
                assert!((probability(&e, &u).unwrap().value - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn orthogonal_direction_both_routes() {
        let trine = Frame::trine();
        let s = BlochPoint::planar(0.0, 1.0);
        let p = bloch_to_state(&s, &trine).unwrap();
        for outcome in [Outcome::Plus, Outcome::Minus] {
            let e = make_effect(&[1.0, 0.0], outcome, &trine).unwrap();
            let lattice = probability(&e, &p).unwrap().value;
            let bloch =
                bloch_probability(&[1.0, 0.0], outcome, &state_to_bloch(&p, &trine).unwrap());
            assert!((lattice - 0.5).abs() < 1e-15);
            assert!((bloch - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn completeness() {
        let tetra = Frame::tetrahedron();
        let m = [0.0, 0.6, -0.8];
        let plus = make_effect(&m, Outcome::Plus, &tetra).unwrap();
        let minus = make_effect(&m, Outcome::Minus, &tetra).unwrap();
        for k in 0..4 {
            assert_eq!(plus.e[k] + minus.e[k], 1.0);
        }
    }

    #[test]
    fn non_unit_direction_rejected() {
        assert!(make_effect(&[0.5, 0.5], Outcome::Plus, &Frame::trine()).is_err());
        assert!(make_effect(&[1.0, 0.0, 0.0], Outcome::Plus, &Frame::trine()).is_err());
    }

    #[test]
    fn outside_domain_is_flagged() {
        let trine = Frame::trine();
        let e = make_effect(&[0.0, 1.0], Outcome::Plus, &trine).unwrap();
        let vertex = ProbVector::vertex(3, 0).unwrap();
        let pr = probability(&e, &vertex).unwrap();
        assert!(!pr.in_domain);
        assert!(pr.value > 1.0);
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid_effect(&[1.0, 1.0, 1.0], 3).unwrap());
        assert!(is_valid_effect(&[1.0; 4], 4).unwrap());
        let e = make_effect(&[0.6, -0.8], Outcome::Minus, &Frame::trine()).unwrap();
        assert!(is_valid_effect(&e.e, 3).unwrap());
        assert!(!is_valid_effect(&[2.0, 0.0, 0.0], 3).unwrap());
        assert!(is_valid_effect(&[1.0, 0.0], 3).is_err());
    }

    #[test]
    fn closed_form_extrema_match_grid_search() {
        let trine = Frame::trine();
        let candidates: [[f64; 3]; 4] = [
            [2.0, 0.0, 0.0],
            [1.5, 0.0, 0.0],
            [-0.5, 1.0, 1.0],
            [0.3, -0.2, 0.9],
        ];
        for m in candidates {
            let (lo, hi) = effect_extrema(&m, &trine).unwrap();
            // 10⁵-point polar grid over the unit disc, boundary included
            let (mut glo, mut ghi) = (f64::INFINITY, f64::NEG_INFINITY);
            let (radial, angular) = (50, 2000);
            for i in 0..=radial {
                let t = i as f64 / radial as f64;
                for j in 0..angular {
                    let theta = j as f64 * TAU / angular as f64;
                    let p = bloch_to_state(&BlochPoint::from_polar(t, theta), &trine).unwrap();
                    let v: f64 = m.iter().zip(p.entries()).map(|(a, b)| a * b).sum();
                    glo = glo.min(v);
                    ghi = ghi.max(v);
                }
            }
            // the grid misses the optimum by at most ~(π/2000)²·|Bm|/2d
            assert!(lo <= glo + 1e-15 && glo - lo < 1e-6, "{m:?}: {lo} vs {glo}");
            assert!(hi >= ghi - 1e-15 && hi - ghi < 1e-6, "{m:?}: {hi} vs {ghi}");
        }
        // p₀ ranges over [0, 2/3], so 2p₀ reaches 4/3: invalid
        let (lo, hi) = effect_extrema(&[2.0, 0.0, 0.0], &trine).unwrap();
        assert!(lo.abs() < 1e-15 && (hi - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn negative_valid_effects_exist() {
        for frame in [Frame::trine(), Frame::tetrahedron()] {
            let w = negative_effect_witness(&frame, 36)
                .unwrap()
                .expect("witness");
            assert!(w.e.iter().any(|&x| x < 0.0));
            assert!(is_valid_effect_in(&w.e, &frame).unwrap());
        }
    }

    #[test]
    fn json_shape() {
        let e = make_effect(&[0.0, 1.0], Outcome::Plus, &Frame::trine()).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert!(
            s.starts_with(r#"{"d":3,"m_hat":[0.0,1.0],"outcome":"+","e":[1.5,"#),
            "{s}"
        );
        let back: Effect = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
