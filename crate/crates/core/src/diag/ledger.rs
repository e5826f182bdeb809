//! Time series of the tracked energies and monitors.
//!
//! The CSV schema is `t, U_s, max_eta, dt_eta_inf, blowup_integral,
//! buffer_leak`, floats at 17 significant digits; parsing it back and
//! re-serializing is byte-identical.

use crate::error::{CoreError, Result};
use std::io::{BufRead, Write};

#[derive(Clone, Debug)]
pub struct LedgerSample {
    pub t: f64,
    /// the stacked norm U_s(ε,t) of the tracked state
    pub u_s: f64,
    /// block energies U_j, index 0 is j = −1
    pub u_j: Vec<f64>,
    /// modified energies N_j (empty when not tracked)
    pub n_j: Vec<f64>,
    /// positivity window 1/4 ≤ 1+ε(η+h) ≤ 7/4 held at this sample
    pub positivity_ok: bool,
    pub max_eta: f64,
    pub dt_eta_inf: f64,
    /// ‖∂ₜη‖_∞ of the system actually integrated (the perturbation in
    /// pipelines), independent of hook overrides
    pub dt_eta_pert: f64,
    /// U(t) = ‖(η,∇η,V,∇V)‖_∞
    pub u_inf: f64,
    /// ∫₀ᵗ U(τ)dτ, trapezoidal
    pub blowup_integral: f64,
    pub buffer_leak: f64,
    /// max |high-frequency part| over interior (non-buffer) nodes
    pub interior_high_max: f64,
    /// ‖(f,g)(t)‖_{B^s_{2,r}}
    pub f_s: f64,
    /// 𝒲_s(t) of the coefficient set
    pub w_s: f64,
    pub e_norm_composed: Option<f64>,
}

impl LedgerSample {
    pub fn finite(&self) -> bool {
        self.t.is_finite()
            && self.u_s.is_finite()
            && self.max_eta.is_finite()
            && self.dt_eta_inf.is_finite()
            && self.blowup_integral.is_finite()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Ledger {
    pub samples: Vec<LedgerSample>,
}

pub const CSV_HEADER: &str = "t,U_s,max_eta,dt_eta_inf,blowup_integral,buffer_leak";

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

impl Ledger {
    pub fn push(&mut self, s: LedgerSample) {
        self.samples.push(s);
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&LedgerSample> {
        self.samples.last()
    }

    pub fn max_u_s(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.u_s))
    }

    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt(s.t),
                fmt(s.u_s),
                fmt(s.max_eta),
                fmt(s.dt_eta_inf),
                fmt(s.blowup_integral),
                fmt(s.buffer_leak)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("utf8")
    }

    /// Parse the declared CSV columns back (block data is not serialized).
    pub fn read_csv(r: &mut impl BufRead) -> Result<Ledger> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::Parse("empty ledger file".into()))?
            .map_err(CoreError::Io)?;
        if header.trim() != CSV_HEADER {
            return Err(CoreError::Parse(format!("unexpected ledger header: {header}")));
        }
        let mut ledger = Ledger::default();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(CoreError::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|e| CoreError::Parse(format!("line {}: {e}", lineno + 2)))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 6 {
                return Err(CoreError::Parse(format!(
                    "line {}: expected 6 columns, got {}",
                    lineno + 2,
                    vals.len()
                )));
            }
            ledger.push(LedgerSample {
                t: vals[0],
                u_s: vals[1],
                u_j: Vec::new(),
                n_j: Vec::new(),
                positivity_ok: true,
                max_eta: vals[2],
                dt_eta_inf: vals[3],
                dt_eta_pert: vals[3],
                u_inf: 0.0,
                blowup_integral: vals[4],
                buffer_leak: vals[5],
                interior_high_max: 0.0,
                f_s: 0.0,
                w_s: 0.0,
                e_norm_composed: None,
            });
        }
        Ok(ledger)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64, u: f64) -> LedgerSample {
        LedgerSample {
            t,
            u_s: u,
            u_j: vec![],
            n_j: vec![],
            positivity_ok: true,
            max_eta: 0.1 * u,
            dt_eta_inf: u / 3.0,
            dt_eta_pert: u / 3.0,
            u_inf: u,
            blowup_integral: t * u,
            buffer_leak: 1e-9,
            interior_high_max: 0.0,
            f_s: 0.0,
            w_s: 0.0,
            e_norm_composed: None,
        }
    }

    #[test]
    fn csv_round_trip_byte_identical() {
        let mut ledger = Ledger::default();
        for i in 0..20 {
            ledger.push(sample(i as f64 * 0.05, (i as f64 * 0.618).sin().abs() + 1e-17));
        }
        let text = ledger.to_csv_string();
        let back = Ledger::read_csv(&mut text.as_bytes()).unwrap();
        assert_eq!(text, back.to_csv_string());
    }

    #[test]
    fn rejects_malformed() {
        assert!(Ledger::read_csv(&mut "nope\n1,2".as_bytes()).is_err());
        let bad = format!("{CSV_HEADER}\n1.0,2.0\n");
        assert!(Ledger::read_csv(&mut bad.as_bytes()).is_err());
    }
}
