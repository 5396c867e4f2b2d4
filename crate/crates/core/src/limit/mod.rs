//! Scaling-limit processes: sample paths, excursions and marks, and the
//! limit objects of the single-edge rank-1 regime.

pub mod levy;
pub mod path;
pub mod quad;
pub mod tiny_giant;

pub use levy::{bm_parameters, simulate_bm_parabolic, simulate_levy_pair, simulate_tau23_process, simulate_thinned_levy, BmParameters, ThetaSequence};
pub use path::{excursions, limit_component_vector, poisson_marks, reflect, Excursion, ExcursionSet, LimitPath};
pub use tiny_giant::{a_alpha, lambda_c, lambda_uv, rho_fixed_point, tiny_giant_graph, zeta_a, zeta_limit, TinyGiantParams};
