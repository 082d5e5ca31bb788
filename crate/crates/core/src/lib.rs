//! Exact topological recursion on genus-zero spectral curves.

pub mod catalog;
pub mod coeff;
pub mod curve;
pub mod curve_file;
pub mod engine;
pub mod error;
pub mod extract;
pub mod form;
pub mod graphs;
pub mod kernel;
pub mod poly_z;
pub mod series;
pub mod suite;

pub use coeff::{Coeff, Poly, Rat};
pub use error::{Error, Result};
pub use form::{symmetry_check, MultiForm, Slot};
pub use series::LaurentSeries;
