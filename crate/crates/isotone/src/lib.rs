//! Steady states of isotone electric systems.
//!
//! DC circuits feeding constant-power loads have steady states solving the
//! fixed-point equation `y = k - M(1/y)` with a nonnegative matrix `M`,
//! where `1/y` is the componentwise reciprocal. The defining map
//! `T(y) = k - M(1/y)` is isotone and concave for the componentwise order
//! and bounded above by `k`. This crate decides whether positive steady
//! states exist, computes the dominant one (the fixed point that dominates
//! all others componentwise), certifies its stability through the spectral
//! radius of `M diag(1/(y ∘ y))`, solves reducible systems blockwise
//! through the irreducible normal form, and explores basins of attraction
//! of the fixed-point iteration.
//!
//! # Quick start
//!
//! ```
//! use isotone::circuit::build_two_cpl;
//! use isotone::steady_state::{bounds, dominant_fixed_point, StabilityClass};
//!
//! // 24 V source, two constant-power loads over 0.04 Ω and 0.06 Ω lines.
//! let problem = build_two_cpl(24.0, 0.04, 0.06, 500.0, 450.0).unwrap();
//!
//! let b = bounds(&problem);
//! assert_eq!(b.delta().as_slice(), &[496.0, 396.0]);
//!
//! let (dominant, cert) = dominant_fixed_point(&problem, 1e-10, 10_000).unwrap();
//! assert!((dominant[0] - 22.2417).abs() < 1e-3);
//! assert!((dominant[1] - 20.9531).abs() < 1e-3);
//! assert_eq!(cert.classification, StabilityClass::AsymptoticallyStable);
//! ```
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example analyze_circuit      # bounds, verdict, dominant point, certificate
//! cargo run --example iteration_trace      # recorded Fit sequences, CSV output
//! cargo run --example enumerate_fixed_points  # all fixed points, comparability
//! cargo run --example spectral_relations   # rho relations between fixed points
//! cargo run --example reducible_cascade    # normal form + blockwise cascade solve
//! cargo run --example basin_grid           # basin-of-attraction classification
//! ```
//!
//! The same capabilities are exposed by the `isotone` binary
//! (`analyze`, `trace`, `basin`, `enumerate` subcommands); see the crate
//! README for the file format and flags.
//!
//! # Module map
//!
//! - [`order`]: componentwise partial order, Hadamard products, reciprocals.
//! - [`matrix`]: nonnegative matrices, irreducibility, normal form,
//!   spectral radius by Collatz-Wielandt-bracketed power iteration.
//! - [`iteration`]: the map T, recorded iteration sequences, monotonicity.
//! - [`steady_state`]: existence decision, dominant point, certificates,
//!   spectral relations, cascade solving, enumeration, basin probes.
//! - [`circuit`]: problem construction from circuit descriptions.
//! - [`cli`]: problem files, reports, CSV emitters behind the binary.

pub mod circuit;
pub mod cli;
pub mod error;
pub mod iteration;
pub mod matrix;
pub mod order;
pub mod steady_state;

pub use error::{Error, Result};
pub use iteration::{iterate, IterationTrace, Monotonicity, Problem, TraceStatus};
pub use matrix::{NonnegMatrix, NormalFormDecomposition, PermutationMatrix};
pub use order::{OrderedInterval, PositiveVector, Vector};
pub use steady_state::{
    basin_probe, bounds, decide_existence, dominant_fixed_point, enumerate_small, solve_1d,
    solve_reducible, spectral_relations, BasinClass, Bounds, ExistenceVerdict,
    StabilityCertificate, StabilityClass,
};
