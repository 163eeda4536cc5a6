//! Dirichlet L-functions, the zeros of `L` and `L'`, and the counting laws
//! they obey.

pub mod arith;
pub mod characters;
pub mod error;
pub mod evaluator;
pub mod quadrature;
pub mod store;
pub mod theorems;
pub mod zerofinder;

pub use characters::{character, enumerate_characters, primitive_characters, CharacterSummary, DirichletCharacter};
pub use error::{Error, Result};
pub use evaluator::{g1_jet, g1_value, l_jet, l_value, ComplexValue, EvalConfig, Target};
pub use store::{resume_scan, ReportFormat, ResumeOptions, ScanManifest, ZeroStore};
pub use theorems::{ResidualReport, Statistic};
pub use zerofinder::{FunctionTag, Rectangle, ScanConfig, Scanner, ZeroDatabase, ZeroRecord};

pub use num_complex::Complex64;
