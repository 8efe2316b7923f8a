//! Exact calculator and enumerator for abelian Galois covers of products
//! of elliptic curves and abelian bases.
//!
//! The engine works entirely with formal building data: each cover factor
//! is a finite abelian group together with a map from its nontrivial
//! characters to line-bundle classes (an integer degree plus a torsion tag
//! in a declared finite torsion group). From that data it computes, with
//! no floating point anywhere:
//!
//! - character-wise pushforward decompositions of the canonical sheaf and
//!   of reflexive p-forms,
//! - cohomology by Künneth convolution, Hodge diamonds, χ(ω), Betti
//!   numbers, and the rational-cohomology-torus verdict,
//! - generic vanishing loci V^i as unions of torsion-translated coordinate
//!   subtori, the set S_f, and a general-type sufficiency proxy,
//! - Albanese-degree invariants and divisibility/structure verdicts,
//! - a gallery of named example constructions with pinned expected values,
//! - deterministic exhaustive search over subgroups and building data.

pub mod cohomology;
pub mod config;
pub mod cover;
pub mod error;
pub mod gallery;
pub mod group;
pub mod linalg;
pub mod loci;
pub mod report;
pub mod search;
pub mod verdicts;

pub use error::Error;
