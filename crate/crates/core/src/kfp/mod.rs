//! A `d = 1` kinetic Fokker-Planck solver with rough coefficients, the exact
//! Kolmogorov kernel, and the empirical estimate checks run on its output.

mod divergence;
mod ensemble;
mod estimates;
mod gradient;
mod kernel;
mod poincare;
mod problem;
mod reference;
mod solver;

pub use divergence::{bogovskii_solve, demean, BogovskiiSolution, RectGrid};
pub use ensemble::{source_field, EnsembleSpec, Member};
pub use estimates::{
    energy_ratio, gain_ratios, mean_free_gain_exponent, solution_gain_exponent, EnergyRatio,
    GainRatios, Ratio,
};
pub use gradient::{velocity_derivative, velocity_gradient, velocity_gradient_norm};
pub use kernel::{evolved_moments, kernel_moments, kolmogorov_kernel};
pub use poincare::{poincare_check, transport_term, PoincareReport};
pub use problem::{
    Coefficient, CoefficientField, InitialDatum, ScalarFn, SolverProblem, TransportScheme,
    VBoundary,
};
pub use reference::{
    convergence_orders, kolmogorov_moments, kolmogorov_problem, manufactured_error,
    manufactured_exact, manufactured_problem, rough_conservation_problem, MomentComparison,
};
pub use solver::{phase_moments, solve, solve_tridiagonal, PhaseMoments, Solution};
