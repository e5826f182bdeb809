//! Shared setup for the criterion benchmarks.

use borewave::bore::{make_bore, BoreProfile};
use borewave::field::{Field, State};
use borewave::solver::{BackgroundCoeffs, CoeffSource, ModelParams, SolverConfig};
use borewave::GridSpec;

pub fn bore_setup(n: usize) -> (GridSpec, State, borewave::solver::Solver, BackgroundCoeffs) {
    let grid = GridSpec::new_1d(80.0, n).unwrap();
    let part = borewave::lp::DyadicPartition::new(&grid).unwrap();
    let eta0 = make_bore(&BoreProfile::tanh(-0.5, 0.5, 1.0, 0.0), &grid).unwrap();
    let u0 = make_bore(&BoreProfile::constant(0.0), &grid).unwrap();
    let split = borewave::bore::split_bore_state(&eta0, &u0, &part).unwrap();
    let bg = borewave::linwave::WaveBackground::new(&split.low).unwrap();
    let params = ModelParams::new(1.0 / 6.0, 1.0 / 6.0, 0.1, 1.0).unwrap();
    let config = SolverConfig::new(0.01, 1.0);
    let solver = borewave::solver::Solver::new(&grid, &params, &config).unwrap();
    let src = BackgroundCoeffs::new(bg, params.b, params.d);
    (grid, split.high, solver, src)
}

pub fn state_2d(n: [usize; 2]) -> (GridSpec, State) {
    let grid = GridSpec::new_2d([80.0, 20.0], n).unwrap();
    let eta = Field::from_fn(&grid, |x| 0.1 * (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp());
    let v = Field::from_fn(&grid, |x| 0.05 * (-(x[0] * x[0] + x[1] * x[1]) / 6.0).exp());
    let st = State::new(eta, vec![v.clone(), v]).unwrap();
    (grid, st)
}

pub fn coeffs_at(src: &mut BackgroundCoeffs, t: f64, grid: &GridSpec) -> borewave::solver::CoeffFields {
    src.eval(t, grid).unwrap()
}
