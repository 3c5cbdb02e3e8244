//! Exact homological computations for partial difference equations and
//! zero-sum problems on finite abelian groups.

pub mod catalog;
pub mod cohom;
pub mod fgab;
pub mod funcspace;
pub mod gowers;
pub mod group;
pub mod int;
pub mod lattice;
pub mod matrix;
pub mod pdce;
pub mod qlinalg;

pub use int::Int;
pub use lattice::Lattice;
pub use matrix::IntMatrix;
