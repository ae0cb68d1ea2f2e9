//! Computable layer of analytic-torsion gluing formulas: torsion of finite
//! metrized complexes, the scattering algebra on harmonic forms of a
//! cylinder cross-section, model-operator spectra and their zeta
//! determinants, and numerical checks of the adiabatic gluing asymptotics.

pub mod complex;
pub mod error;
pub mod exec;
pub mod family;
pub mod gluing;
pub mod linalg;
pub mod mayer_vietoris;
pub mod report;
pub mod sample;
pub mod scattering;
pub mod spectra;
pub mod suite;
pub mod zeta;

pub use error::{Error, Result};
pub use exec::Exec;
