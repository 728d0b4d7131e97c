//! Jets of metrics and vector fields on target manifolds, curvature from
//! metric Taylor coefficients, and the concrete round-sphere data.

mod curvature;
mod jets;
mod sphere;

pub use curvature::{curvature, proportionality_ratio, trace_second_derivatives, Curvature};
pub use jets::{
    commutator, lie_derivative_metric, lie_derivative_scalar, lie_derivative_tensor,
    lie_derivative_vector, Chart, MetricJet, TensorJet, TensorKind, VectorFieldJet,
};
pub use sphere::{rotation_fields, sigma_series, sphere_graph_metric, sphere_normal_metric, RotationFields};
