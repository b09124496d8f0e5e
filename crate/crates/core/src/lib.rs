//! Class numbers, regulators and chamber invariants of totally real cubic
//! orders, enumerated by the characteristic polynomials of their units.

pub mod abel;
pub mod arith;
pub mod cache;
pub mod classgroup;
pub mod cubic;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod interval;
pub mod lattice;
pub mod minima;
pub mod order;
pub mod report;
pub mod roots;
pub mod theta;
pub mod units;
pub mod validate;

pub use cubic::CubicPoly;
pub use error::{Error, Result};
