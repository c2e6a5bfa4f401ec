//! Exact computation of Smith groups and critical groups of Peisert and Paley
//! graphs.
//!
//! Two independent routes are provided for every group-structure result: a
//! closed form driven by base-p carry counting and Jacobi-sum valuations, and
//! brute-force Smith normal form over the integers (or over `Z/p^K`). The
//! Jacobi sums themselves are evaluated exactly in a Galois ring `GR(p^k, n)`
//! built from Teichmüller lifts.

pub mod arith;
pub mod cli;
pub mod compare;
pub mod critgrp;
pub mod digits;
pub mod error;
pub mod ffield;
pub mod gring;
pub mod graphs;
pub mod zlinalg;

pub use error::{Error, Result};
pub use ffield::{FieldTable, GraphKind};
