//! Theorem audits over states and ledgers.

use crate::bore::BufferZone;
use crate::diag::ledger::Ledger;
use crate::error::{CoreError, Result};
use crate::field::{Field, State};
use crate::lp::{dyadic_block, DyadicPartition, EnergyWeights};
use crate::multiplier::MultiplierOp;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct ModifiedEnergy {
    pub n_j: Vec<f64>,
    /// 1/4 ≤ 1 + ε(η+h) ≤ 7/4 everywhere
    pub window_ok: bool,
}

/// The modified energies
/// N_j² = ∫ η_j² + εb|∇η_j|² + (1+ε(η+h))(|V_j|² + εd ∇V_j:∇V_j)
/// for all admissible j. A violated positivity window is reported, not
/// clipped.
pub fn modified_energies(
    state: &State,
    w: &EnergyWeights,
    h: Option<&Field>,
    part: &DyadicPartition,
) -> Result<ModifiedEnergy> {
    let grid = state.grid().clone();
    let n = grid.total_points();
    let mut weight = vec![1.0_f64; n];
    for i in 0..n {
        let mut v = state.eta.samples()[i];
        if let Some(h) = h {
            v += h.samples()[i];
        }
        weight[i] += w.eps * v;
    }
    let window_ok = weight.iter().all(|&x| (0.25..=1.75).contains(&x));

    let vol = grid.cell_volume();
    let spectral_factor = vol / n as f64;
    let mut out = Vec::new();
    for j in part.j_range() {
        let mask = part.block_weights(j).expect("in range");
        // unweighted η-part via Parseval
        let mut acc = 0.0;
        for (i, z) in state.eta.spectrum().iter().enumerate() {
            let m = mask[i];
            if m != 0.0 {
                let k2 = grid.k_norm_deriv(i).powi(2);
                acc += m * m * z.norm_sqr() * (1.0 + w.eps * w.b * k2);
            }
        }
        let mut nj2 = acc * spectral_factor;
        // weighted V-part in physical space
        for v in &state.vel {
            let vj = dyadic_block(v, j, part)?;
            for i in 0..n {
                nj2 += vol * weight[i] * vj.samples()[i].powi(2);
            }
            if w.eps * w.d != 0.0 {
                for axis in 0..grid.dim() {
                    let dvj = MultiplierOp::derivative(&grid, axis)?.apply(&vj)?;
                    for i in 0..n {
                        nj2 += vol * w.eps * w.d * weight[i] * dvj.samples()[i].powi(2);
                    }
                }
            }
        }
        out.push(nj2.max(0.0).sqrt());
    }
    Ok(ModifiedEnergy { n_j: out, window_ok })
}

/// Single-block N_j.
pub fn modified_energy(
    state: &State,
    j: i32,
    w: &EnergyWeights,
    h: Option<&Field>,
    part: &DyadicPartition,
) -> Result<(f64, bool)> {
    let me = modified_energies(state, w, h, part)?;
    let idx = (j - crate::lp::J_MIN) as usize;
    Ok((me.n_j.get(idx).copied().unwrap_or(0.0), me.window_ok))
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupStatus {
    /// first time at which the running integral doubled within 5% of
    /// elapsed time (incipient blow-up), if any
    pub flagged_at: Option<f64>,
    pub final_integral: f64,
}

/// Scan the trapezoidal accumulation of U(t) for superlinear growth.
pub fn blowup_monitor(ledger: &Ledger) -> Result<BlowupStatus> {
    if ledger.is_empty() {
        return Err(CoreError::EmptyLedger);
    }
    let samples = &ledger.samples;
    // the running integral interpolated at an arbitrary time
    let integral_at = |t: f64| -> Option<f64> {
        let i = samples.iter().rposition(|r| r.t <= t)?;
        if i + 1 >= samples.len() {
            return Some(samples[i].blowup_integral);
        }
        let (a, b) = (&samples[i], &samples[i + 1]);
        let frac = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
        Some(a.blowup_integral + frac * (b.blowup_integral - a.blowup_integral))
    };
    let mut flagged_at = None;
    for s in samples.iter() {
        let t = s.t;
        if t <= 0.0 || s.blowup_integral < 1e-12 {
            continue;
        }
        if let Some(base) = integral_at(0.95 * t) {
            if base > 1e-12 && s.blowup_integral >= 2.0 * base {
                flagged_at = Some(t);
                break;
            }
        }
    }
    Ok(BlowupStatus { flagged_at, final_integral: samples.last().unwrap().blowup_integral })
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub c_used: f64,
    pub fraction_ok: f64,
    pub n_checked: usize,
}

fn final1_rhs_unit(
    uj: f64,
    us: f64,
    fs: f64,
    ws: f64,
    eps: f64,
    beta: f64,
    cj_weight: f64,
) -> f64 {
    // the differential inequality's right-hand side with C = 1; cj_weight is
    // 2^{-js}c_j with c_j = 2^{js}U_j/U_s (unit ℓ^r norm bookkeeping)
    let mix = ws + beta * us;
    eps * uj * uj * (eps * beta * fs + ws + beta * us + eps * mix * mix)
        + eps * cj_weight * uj * (fs * (1.0 + eps * mix) + us * mix * (1.0 + eps * mix))
}

fn audit_terms_with_tol(ledger: &Ledger, w: &EnergyWeights, beta: f64, stride: f64) -> Vec<(f64, f64, f64)> {
    // (dN_j²/dt, RHS with C=1, tolerance) — the centered-difference error is
    // estimated per point from the third difference: err ≈ (h²/6)(N²)''' with
    // (N²)''' ≈ [f₊₂ − 2f₊₁ + 2f₋₁ − f₋₂]/(2h³), i.e. tol = |Δ³|/(12h),
    // the stride²-scaling the audit documents.
    let samples = &ledger.samples;
    let noise_floor = {
        let scale = samples.iter().flat_map(|s| s.n_j.iter()).fold(0.0_f64, |m, &x| m.max(x * x));
        1e-11 * scale / stride.max(1e-12)
    };
    let mut out = Vec::new();
    for i in 1..samples.len().saturating_sub(1) {
        let (prev, cur, next) = (&samples[i - 1], &samples[i], &samples[i + 1]);
        if cur.n_j.is_empty() || !cur.positivity_ok {
            continue;
        }
        let dt = next.t - prev.t;
        if dt <= 0.0 {
            continue;
        }
        // blocks at roundoff level carry no information, only noise ratios
        let uj_floor = 1e-9 * cur.u_j.iter().fold(0.0_f64, |m, &x| m.max(x));
        for (bi, _nj) in cur.n_j.iter().enumerate() {
            if bi >= prev.n_j.len() || bi >= next.n_j.len() || bi >= cur.u_j.len() {
                continue;
            }
            if cur.u_j[bi] <= uj_floor {
                continue;
            }
            let lhs = (next.n_j[bi].powi(2) - prev.n_j[bi].powi(2)) / dt;
            let tol = if i >= 2 && i + 2 < samples.len() {
                let f = |k: usize| samples[k].n_j.get(bi).map(|v| v * v).unwrap_or(0.0);
                let d3 = f(i + 2) - 2.0 * f(i + 1) + 2.0 * f(i - 1) - f(i - 2);
                (d3.abs() / (6.0 * dt)).max(noise_floor)
            } else {
                noise_floor.max(lhs.abs())
            };
            let uj = cur.u_j[bi];
            let cj_weight = if cur.u_s > 0.0 { uj / cur.u_s } else { 0.0 };
            let rhs = final1_rhs_unit(uj, cur.u_s, cur.f_s, cur.w_s, w.eps, beta, cj_weight);
            out.push((lhs, rhs, tol));
        }
    }
    out
}

/// Fit the constant of the differential inequality on a calibration run:
/// the smallest C with dN_j²/dt ≤ C·RHS₁ + tol at every interior sample.
pub fn fit_final1_constant(ledger: &Ledger, w: &EnergyWeights, beta: f64, stride: f64) -> f64 {
    audit_terms_with_tol(ledger, w, beta, stride)
        .iter()
        .filter(|(_, rhs, _)| *rhs > 1e-14)
        .map(|(lhs, rhs, tol)| ((lhs - tol) / rhs).max(0.0))
        .fold(0.0, f64::max)
}

/// Audit the inequality with a given constant; advisory (constants fitted).
pub fn inequality_audit(
    ledger: &Ledger,
    w: &EnergyWeights,
    beta: f64,
    c: f64,
    stride: f64,
) -> Result<AuditReport> {
    if ledger.is_empty() {
        return Err(CoreError::EmptyLedger);
    }
    let terms = audit_terms_with_tol(ledger, w, beta, stride);
    let n_checked = terms.len();
    let ok = terms.iter().filter(|(lhs, rhs, tol)| *lhs <= c * rhs + tol).count();
    Ok(AuditReport {
        c_used: c,
        fraction_ok: if n_checked == 0 { 1.0 } else { ok as f64 / n_checked as f64 },
        n_checked,
    })
}

/// Max |high-frequency part| over buffer nodes and over interior nodes.
pub fn buffer_leak(
    state: &State,
    zone: &BufferZone,
    part: &DyadicPartition,
) -> Result<(f64, f64)> {
    let grid = state.grid();
    let l = grid.lengths()[0];
    let mut high_fields = vec![high_part(&state.eta, part)?];
    for v in &state.vel {
        high_fields.push(high_part(v, part)?);
    }
    let (mut leak, mut interior) = (0.0_f64, 0.0_f64);
    for f in &high_fields {
        for (idx, &v) in f.samples().iter().enumerate() {
            let x = grid.node(idx)[0];
            if zone.contains(x, l) {
                leak = leak.max(v.abs());
            } else {
                interior = interior.max(v.abs());
            }
        }
    }
    Ok((leak, interior))
}

fn high_part(f: &Field, part: &DyadicPartition) -> Result<Field> {
    Ok(f.sub(&dyadic_block(f, -1, part)?))
}
