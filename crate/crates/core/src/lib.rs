//! Finite-dimensional quantum processes as Choi matrices, with checks for
//! causality, non-signalling and second-order causality of supermaps.
//!
//! Modules, bottom to top:
//!
//! - [`tensor`]: dense complex matrices, Kronecker products, partial traces
//!   and subsystem permutations.
//! - [`process`]: processes `A → B` stored as Choi matrices, with cups, caps,
//!   swaps, discarding and both kinds of composition.
//! - [`predicates`]: causality, non-signalling, SOC and SOC₂ checks, each as a
//!   closed-form condition and (for the second-order ones) a basis oracle.
//! - [`supermap`]: two-slot supermaps, insertion with and without ancillas,
//!   fixed causal orders and the complete-SOC₂ harnesses.
//! - [`affine`]: pseudo-states and affine combinations of product channels.
//! - [`io`]: JSON formats for processes and supermaps.
//! - [`dsl`]: a small wiring language compiled to processes.
//! - [`cli`]: the `soclab` command-line front end.

pub mod affine;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod io;
pub mod predicates;
pub mod process;
pub mod supermap;
pub mod tensor;

pub use affine::{AffineCombination, PseudoState};
pub use error::{Error, Result};
pub use predicates::{CausalAffineBasis, CausalVerdict};
pub use process::{compose_par, compose_seq, EffectP, Process, StateP};
pub use supermap::{BipartiteSupermap, InsertionResult};
pub use tensor::{ComplexMatrix, SystemDims, Tolerance, C64};
