//! Littlewood-Paley machinery: the dyadic partition of unity, nonhomogeneous
//! dyadic blocks, Besov norms, and the weighted block energies driving the
//! long-time experiments.

mod audit;
mod besov;
mod energy;
mod partition;

pub use audit::{bernstein_audit, commutator_residual, commutator_stack_report, BernsteinReport, CommutatorReport};
pub use besov::{
    besov_norm, besov_norm_pair, besov_norm_with_tail, besov_p2_multi, lr_stack, BesovSpec, Lp,
};
pub use energy::{
    block_energies, block_energy, e_norm, grad_sup_norm, m_norm, stack_blocks, stacked_norm,
    sup_norm_u, EnergyWeights,
};
pub use partition::{chi, dyadic_block, phi, smooth_step, DyadicPartition, J_MIN};
