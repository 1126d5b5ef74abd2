//! Symmetric Banach function space norms on `[0,1]`, the two-space
//! K-functional, and the Peetre interpolation norm, all evaluated exactly on
//! piecewise-constant functions.
//!
//! The crate is organized around a handful of small modules:
//!
//! - [`step`]: exact calculus of step functions (construction, lattice
//!   operations, decreasing rearrangement, equimeasurability);
//! - [`spaces`]: norm evaluators for `L_p`, `L_inf`, Orlicz (Luxemburg) and
//!   Lorentz spaces, their fundamental functions, and a randomized harness
//!   for the symmetry axioms;
//! - [`kfun`]: the K-functional by truncation search, projected subgradient,
//!   and an exhaustive small-grid oracle, each returning certified brackets;
//! - [`peetre`]: weight schemes, sequence-space norms, and the normalized
//!   Peetre norm with nested two-sided brackets;
//! - [`diagnostics`]: concentration moduli and inclusion diagnostics;
//! - [`experiments`]: head/tail cutting reports, subsequence selection, and
//!   block-ratio sampling, plus [`config`]/[`tables`] for the file formats
//!   the CLI speaks.
//!
//! Batch evaluations fan out over rayon when the `parallel` feature (default)
//! is enabled; disabling it leaves sequential fallbacks with identical
//! results.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod kfun;
pub mod peetre;
pub mod spaces;
pub mod step;
pub mod tables;

pub use error::{Error, Result};
pub use kfun::{
    k_exact_oracle, k_functional, k_functional_batch, k_functional_batch_seq, k_general,
    k_truncation, KMethod, KSettings, KValue,
};
pub use peetre::{
    head_index, peetre_norm, peetre_norm_unnormalized, tail_index, KEvaluation, PeetreSettings,
    PeetreSpec, SequenceSpaceSpec, UnnormalizedBracket, WeightScheme,
};
pub use spaces::{
    validate_norm_axioms, validate_space_axioms, Axiom, AxiomFailure, AxiomReport, LorentzWeight,
    OrliczFunction, SpaceSpec,
};
pub use step::{refine_common, MeasurableSet, StepFunction};
