//! Gradient ascent of `ΔS` over parameterized unitaries `exp(i Σ h_a G_a)`,
//! plus finite-difference checks of stationary points.

mod adam;
mod basis;
mod objective;
mod stationarity;

pub use adam::{adam_maximize, adam_maximize_with_basis, AdamConfig, GradientMode, OptRun};
pub use basis::{gell_mann, GeneratorBasis, SparseHermitian};
pub use objective::{
    build_unitary, delta_s_objective, numeric_gradient, objective_at_params, value_and_gradient, ParamVector,
};
pub use stationarity::{
    second_derivative_closed_form_d2, second_derivative_closed_form_d3, verify_local_max, verify_local_max_with,
    D2Family, D3Form, LocalMaxConfig, StationarityReport,
};
