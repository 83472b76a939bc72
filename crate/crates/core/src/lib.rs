//! Explicit construction of 2D convolutional ReLU networks that approximate
//! functions with bounded mixed derivatives on the unit cube.
//!
//! The pipeline is fully constructive — every kernel entry, bias, and readout
//! coefficient is computed, not trained:
//!
//! 1. [`build_sq_net`] — a sawtooth-interpolation network for x^2, the only
//!    source of approximation error in the whole construction.
//! 2. [`build_product_net`] — pairwise multiplication trees along columns and
//!    rows reduce a d x d tensor to the product of its entries.
//! 3. [`build_selector`] — shift sequences that isolate a single spatial
//!    entry, used to route per-coordinate values through aligned channels.
//! 4. [`build_phi_net`] — per-entry hat functions at a given level/position.
//! 5. [`build_basis_net`] — phi composed with the product tree: one
//!    multivariate hierarchical basis function.
//! 6. [`build_approximator`] — one basis network per term of a hierarchical
//!    expansion plus a sparse linear readout.
//!
//! Networks use zero padding, square kernels with offsets in [-k, k], and bit
//! reproducible forward evaluation (fixed summation order). Structural zeros
//! are distinguished from free parameters so that network size means "free
//! parameters", not "array entries".

pub mod approximator;
pub mod basis;
pub mod error;
pub mod grid;
pub mod network;
pub mod product;
pub mod rng;
pub mod scalar;
pub mod shift;
pub mod tensor;

pub use approximator::{
    build_approximator, check_size_bound, eq5_rhs_log2, measure_error, select_n,
    size_bound_budgeted, size_bound_per_level, ErrorReport, KorobovApproximator, Selection,
    SizeReport, TermPolicy,
};
pub use basis::{
    basis_bound, build_basis_net, build_phi_net, phi_oracle, position_of, tensor_from_point,
    BasisNet,
};
pub use error::{Error, Result};
pub use grid::{
    basis_nd, basis_norm, coefficient_bound, enumerate_indices, hat_1d, hierarchize_separable,
    surplus_1d, tau_n, theta_count, LevelIndex, NormOrder, SparseExpansion,
};
pub use network::{ConvLayer, ConvNet, HypothesisFunction};
pub use product::{
    build_axis_reduction, build_half_reduction, build_product_net, product_bound,
    reduction_oracle, Axis, ProductNet,
};
pub use rng::UniformStream;
pub use scalar::{build_sq_net, prd_oracle, sq_oracle, SqNet};
pub use shift::{build_selector, masking_oracle, SelectorPlan, ShiftBlock};
pub use tensor::{relu, vectorize, BiasVector, ConvKernel, DataTensor, KernelBlock};
