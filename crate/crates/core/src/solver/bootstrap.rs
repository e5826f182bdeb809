//! Explicit bootstrap constants of the lower-bound argument and the
//! threshold-crossing measurement T*(ε).

use crate::diag::Ledger;
use crate::error::{CoreError, Result};
use crate::threshold_factor;
use serde::Serialize;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BootstrapInputs {
    /// R₀¹: the X^{s,1} norm of the initial data
    pub r0_1: f64,
    /// R₀⁰: the ε→0 (plain Besov) norm of the initial data
    pub r0_0: f64,
    /// sup over ε and time of the coefficient norm 𝒲_s
    pub sup_w: f64,
    /// sup over ε and time of the forcing norm F_s
    pub sup_f: f64,
    /// the universal constant of the differential inequality (user-supplied
    /// or run-fitted; the theory does not give a numeric value)
    pub c: f64,
    /// the L^∞ embedding constant of B^{n/2}_{2,1}
    pub c1: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BootstrapConstants {
    pub inputs: BootstrapInputs,
    pub eps0_candidates: [f64; 4],
    pub eps0: f64,
    pub ctilde_candidates: [f64; 3],
    pub ctilde: f64,
    pub threshold_factor: f64,
}

impl BootstrapConstants {
    /// ε₀ = min{ε₀₁,…,ε₀₄}, C̃ = min of its three candidates. The h-supremum
    /// entering ε₀₁ is bounded by sup 𝒲_s (which contains ‖h‖_∞).
    pub fn compute(inputs: BootstrapInputs) -> Result<Self> {
        for (name, v) in [
            ("r0_1", inputs.r0_1),
            ("r0_0", inputs.r0_0),
            ("c", inputs.c),
            ("c1", inputs.c1),
        ] {
            if !(v > 0.0) {
                return Err(CoreError::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("sup_w", inputs.sup_w), ("sup_f", inputs.sup_f)] {
            if v < 0.0 {
                return Err(CoreError::Domain(format!("{name} must be nonnegative, got {v}")));
            }
        }
        let th = threshold_factor();
        let eps01 = 3.0 / (4.0 * inputs.c1 * th * inputs.r0_1 + 4.0 * inputs.sup_w);
        let eps02 = 1.0 / (2.0 * th * inputs.r0_1 + 2.0 * inputs.sup_w);
        let eps03 = if inputs.sup_f > 0.0 {
            (th * inputs.r0_0 + inputs.sup_w) / (2.0 * inputs.sup_f)
        } else {
            f64::INFINITY
        };
        let eps04 = eps02;
        let eps0_candidates = [eps01, eps02, eps03, eps04];
        let eps0 = eps0_candidates.iter().fold(f64::INFINITY, |m, &x| m.min(x));

        let ct1 = if inputs.sup_f > 0.0 {
            inputs.r0_0 / (3.0 * std::f64::consts::E * inputs.c * inputs.sup_f)
        } else {
            f64::INFINITY
        };
        let ct2 = 1.0 / (16.0 * inputs.c * th * inputs.r0_1);
        let ct3 = if inputs.sup_w > 0.0 {
            1.0 / (16.0 * inputs.c * inputs.sup_w)
        } else {
            f64::INFINITY
        };
        let ctilde_candidates = [ct1, ct2, ct3];
        let ctilde = ctilde_candidates.iter().fold(f64::INFINITY, |m, &x| m.min(x));

        Ok(Self { inputs, eps0_candidates, eps0, ctilde_candidates, ctilde, threshold_factor: th })
    }

    /// Predicted guaranteed horizon C̃/ε.
    pub fn predicted_horizon(&self, eps: f64) -> f64 {
        self.ctilde / eps
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TStarResult {
    pub threshold: f64,
    /// first time U_s exceeds the threshold (linear interpolation), if any
    pub crossing: Option<f64>,
    /// last recorded time
    pub horizon: f64,
    /// max U_s over the run divided by the threshold
    pub margin: f64,
}

/// Measure the first threshold crossing of U_s(ε,t) against
/// (1 + e√7)·R₀^ε, by linear interpolation between ledger samples.
pub fn t_star_measure(ledger: &Ledger, r0_eps: f64) -> Result<TStarResult> {
    if ledger.is_empty() {
        return Err(CoreError::EmptyLedger);
    }
    let threshold = threshold_factor() * r0_eps;
    let samples = &ledger.samples;
    let mut crossing = None;
    for i in 0..samples.len() {
        if samples[i].u_s > threshold {
            crossing = Some(if i == 0 {
                samples[0].t
            } else {
                let (t0, u0) = (samples[i - 1].t, samples[i - 1].u_s);
                let (t1, u1) = (samples[i].t, samples[i].u_s);
                t0 + (threshold - u0) * (t1 - t0) / (u1 - u0)
            });
            break;
        }
    }
    Ok(TStarResult {
        threshold,
        crossing,
        horizon: samples.last().unwrap().t,
        margin: ledger.max_u_s() / threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::LedgerSample;

    fn inputs_all_ones() -> BootstrapInputs {
        BootstrapInputs { r0_1: 1.0, r0_0: 1.0, sup_w: 1.0, sup_f: 1.0, c: 1.0, c1: 1.0 }
    }

    #[test]
    fn all_ones_values() {
        // hand-derived with e√7 = 7.191897711488571:
        //   ε₀₁ = 3/(4(1+e√7)+4)   = 0.08159359726801638
        //   ε₀₂ = ε₀₄ = 1/(2(1+e√7)+2) = 0.05439573151201092
        //   ε₀₃ = (1+e√7+1)/2      = 4.595948855744286
        //   C̃  = min{1/(3e), 1/(16(1+e√7)), 1/16} = 0.00762948979603933
        let bc = BootstrapConstants::compute(inputs_all_ones()).unwrap();
        assert!((bc.eps0_candidates[0] - 0.08159359726801638).abs() < 1e-15);
        assert!((bc.eps0_candidates[1] - 0.05439573151201092).abs() < 1e-15);
        assert!((bc.eps0_candidates[2] - 4.595948855744286).abs() < 1e-12);
        assert_eq!(bc.eps0_candidates[1], bc.eps0_candidates[3]);
        assert_eq!(bc.eps0, bc.eps0_candidates[1]);
        assert!((bc.ctilde - 0.00762948979603933).abs() < 1e-15);
        assert!((bc.predicted_horizon(0.01) - 0.762948979603933).abs() < 1e-12);
    }

    #[test]
    fn doubling_sup_f_scales_the_right_candidates() {
        let a = BootstrapConstants::compute(inputs_all_ones()).unwrap();
        let b = BootstrapConstants::compute(BootstrapInputs { sup_f: 2.0, ..inputs_all_ones() })
            .unwrap();
        assert!((b.eps0_candidates[2] - 0.5 * a.eps0_candidates[2]).abs() < 1e-14);
        assert!((b.ctilde_candidates[0] - 0.5 * a.ctilde_candidates[0]).abs() < 1e-14);
        assert_eq!(b.eps0_candidates[0], a.eps0_candidates[0]);
    }

    #[test]
    fn nonpositive_inputs_rejected() {
        let mut bad = inputs_all_ones();
        bad.r0_1 = 0.0;
        assert!(BootstrapConstants::compute(bad).is_err());
        let mut bad = inputs_all_ones();
        bad.c = -1.0;
        assert!(BootstrapConstants::compute(bad).is_err());
    }

    fn mini_ledger(points: &[(f64, f64)]) -> Ledger {
        let mut l = Ledger::default();
        for &(t, u) in points {
            l.push(LedgerSample {
                t,
                u_s: u,
                u_j: vec![],
                n_j: vec![],
                positivity_ok: true,
                max_eta: 0.0,
                dt_eta_inf: 0.0,
                dt_eta_pert: 0.0,
                u_inf: 0.0,
                blowup_integral: 0.0,
                buffer_leak: 0.0,
                interior_high_max: 0.0,
                f_s: 0.0,
                w_s: 0.0,
                e_norm_composed: None,
            });
        }
        l
    }

    #[test]
    fn interpolated_crossing_matches_hand_arithmetic() {
        // {t=0: 1, t=1: 10}, threshold (1+e√7)·1 → t* = (th−1)/9
        let ledger = mini_ledger(&[(0.0, 1.0), (1.0, 10.0)]);
        let r = t_star_measure(&ledger, 1.0).unwrap();
        let th = crate::threshold_factor();
        assert!((r.crossing.unwrap() - (th - 1.0) / 9.0).abs() < 1e-14);
        assert!((r.crossing.unwrap() - 0.7990997457209524).abs() < 1e-13);
    }

    #[test]
    fn no_crossing_reported_distinctly() {
        let ledger = mini_ledger(&[(0.0, 1.0), (5.0, 2.0), (10.0, 1.5)]);
        let r = t_star_measure(&ledger, 1.0).unwrap();
        assert!(r.crossing.is_none());
        assert_eq!(r.horizon, 10.0);
        assert!(r.margin < 1.0);
        assert!(t_star_measure(&Ledger::default(), 1.0).is_err());
    }
}
