//! Runtime ledgers and theorem audits: the modified energy and its
//! equivalence bracket, the blow-up criterion integral, the differential
//! inequality audit, and the periodization buffer monitor.

mod ledger;
mod monitor;

pub use ledger::{Ledger, LedgerSample};
pub use monitor::{
    blowup_monitor, buffer_leak, fit_final1_constant, inequality_audit, modified_energies,
    modified_energy, AuditReport, BlowupStatus, ModifiedEnergy,
};
