//! Exact graded intersection algebras for smooth projective varieties, with
//! dynamical degrees, Gromov-algebra spectral radii and intersection bounds
//! for self-maps.

pub mod algebra;
pub mod cli;
pub mod degrees;
pub mod endomorphism;
pub mod gromov;
pub mod linalg;
pub mod models;
pub mod poly;
pub mod rational;
pub mod spectral;
