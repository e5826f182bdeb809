//! Composition of 2D initial data over a 1D background:
//! η̄₀(x,y) = η₀(x) + φ(x,y), V̄₀ = (u₀(x), 0) + ψ(x,y).

use crate::error::{CoreError, Result};
use crate::field::{Field, State};
use crate::grid::GridSpec;

/// 2D data kept in decomposed form so the M-norm is computable.
#[derive(Clone, Debug)]
pub struct Composed2D {
    /// 1D background pair (η₀, u₀) on the x-axis grid
    pub background: State,
    /// 2D remainder (φ, ψ)
    pub perturbation: State,
}

impl Composed2D {
    /// The plain 2D state η̄ = η₀(x)+φ, V̄ = (u₀(x),0)+ψ.
    pub fn total(&self) -> Result<State> {
        let grid2 = self.perturbation.grid().clone();
        let eta_bg = extend_1d_to_2d(&self.background.eta, &grid2)?;
        let u_bg = extend_1d_to_2d(&self.background.vel[0], &grid2)?;
        State::new(
            eta_bg.add(&self.perturbation.eta),
            vec![u_bg.add(&self.perturbation.vel[0]), self.perturbation.vel[1].clone()],
        )
    }
}

/// Replicate a 1D field along the y-axis of a 2D grid (exactly y-independent).
pub fn extend_1d_to_2d(f: &Field, grid2: &GridSpec) -> Result<Field> {
    if f.grid().dim() != 1 || grid2.dim() != 2 {
        return Err(CoreError::Config("extend_1d_to_2d needs a 1D field and a 2D grid".into()));
    }
    check_x_axis(f.grid(), grid2)?;
    let (nx, ny) = (grid2.points()[0], grid2.points()[1]);
    let mut samples = vec![0.0; nx * ny];
    for ix in 0..nx {
        let v = f.samples()[ix];
        for iy in 0..ny {
            samples[ix * ny + iy] = v;
        }
    }
    Field::from_samples(grid2.clone(), samples)
}

fn check_x_axis(g1: &GridSpec, g2: &GridSpec) -> Result<()> {
    if (g1.lengths()[0] - g2.lengths()[0]).abs() > 1e-12 * g1.lengths()[0]
        || g1.points()[0] != g2.points()[0]
    {
        return Err(CoreError::GridMismatch(
            "1D grid does not match the x-axis of the 2D grid".into(),
        ));
    }
    Ok(())
}

/// Build the decomposed 2D data of the two-dimensional pipeline.
pub fn compose_2d(
    eta_1d: &Field,
    u_1d: &Field,
    phi: &Field,
    psi: &[Field; 2],
    grid2: &GridSpec,
) -> Result<Composed2D> {
    if grid2.dim() != 2 {
        return Err(CoreError::Config("compose_2d needs a 2D grid".into()));
    }
    check_x_axis(eta_1d.grid(), grid2)?;
    eta_1d.same_grid(u_1d)?;
    for f in [phi, &psi[0], &psi[1]] {
        if f.grid() != grid2 {
            return Err(CoreError::GridMismatch("perturbation fields must live on the 2D grid".into()));
        }
    }
    Ok(Composed2D {
        background: State::new(eta_1d.clone(), vec![u_1d.clone()])?,
        perturbation: State::new(phi.clone(), vec![psi[0].clone(), psi[1].clone()])?,
    })
}
