//! Design and verification of spin-star quantum switches.
//!
//! A spin star is a hub spin coupled with uniform XY strength to `N` edge
//! spins. Tuning only the local potentials of the nodes, the free evolution of
//! the network can be made to move a single excitation perfectly from one edge
//! node to another. This crate solves for those potentials and checks the
//! resulting transfer with exact dynamics.
//!
//! - [`model`]: the star Hamiltonian in the full spin space, the
//!   single-excitation (arrowhead) subspace, and the reduced 4×4 space.
//! - [`designer`]: the inverse eigenvalue problem for the spectrum
//!   `{0, e, ±ηe}` and its feasibility analysis.
//! - [`dynamics`]: unitary evolution by eigendecomposition, fidelity traces,
//!   and design verification.
//! - [`switchboard`]: retargeting a design between edge nodes and global
//!   potential offsets.
//! - [`registry`]: name-based lookup of interchangeable strategies (cubic
//!   solvers, transfer models).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod designer;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod registry;
pub mod switchboard;

pub use designer::{
    back_solve, design, feasibility, g_polynomial, lambda_coefficients, min_feasible_even_eta,
    solve_e, DesignInput, DesignSolution, Designer, FeasibilityReport, GPolynomial, RootChoice,
};
pub use dynamics::{
    fidelity_trace, propagate, transition_amplitude, verify_design, verify_transfer,
    EvolutionCache, FidelityTrace, VerificationReport,
};
pub use error::{Error, Result};
pub use model::{
    build_arrowhead, build_full_spin_hamiltonian, build_reduced, exchange_operator,
    is_exchange_symmetric, lift_reduced_amplitude, reduced_matrix, ArrowheadMatrix,
    ComplexAmplitude, ReducedParams, StarSpec,
};
pub use registry::{Registry, Strategy};
pub use switchboard::{apply_offset, RoutingState};
