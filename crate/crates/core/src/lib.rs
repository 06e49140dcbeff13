//! Desk-scale machinery for tree operads and configuration spaces with
//! summable labels: symmetric sequences and set-level operads with law
//! checkers, partial monoids and their bounded completions, edge-length
//! trees with associahedron face combinatorics, exact-rational
//! configuration points with collision structure, labelled configurations
//! with merge normalization, and an integer homology backend for verifying
//! the combinatorial invariants all of this predicts.
//!
//! Numeric code is generic over a [`scalar::Scalar`] (an ordered field via
//! `num-traits`); the aliases below pin the exact-rational instantiations
//! used by the library's own tests and the CLI.

pub mod config;
pub mod fm;
pub mod homology;
pub mod modules;
pub mod operad;
pub mod partial;
pub mod perm;
pub mod poset;
pub mod rng;
pub mod scalar;
pub mod sigma;
pub mod tree;
pub mod w;

/// Exact rational scalar used for all geometry by default.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer used for homology by default.
pub type Int = num_bigint::BigInt;

pub type Point = fm::Point<Rat>;
pub type Cloud = fm::Cloud<Rat>;
pub type FmTree = fm::FmTree<Rat>;
pub type FmPoint = fm::FmPoint<Rat>;
pub type GenuineConfig = fm::GenuineConfig<Rat>;
pub type LabelledConfig = config::LabelledConfig<Rat>;
pub type LabelledFmPoint = config::LabelledFmPoint<Rat>;
pub type ChainComplex = homology::ChainComplex<Int>;
pub type SmithNormalForm = homology::SmithNormalForm<Int>;

pub use perm::Perm;
pub use tree::Tree;
