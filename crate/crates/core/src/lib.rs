//! Exact cohomology, divisors and equivariant vector bundles on smooth complete
//! toric varieties, with splitting tests and positivity certificates built on top.

// matrix code indexes rows and columns together
#![allow(clippy::needless_range_loop)]

pub mod bundle;
pub mod catalog;
pub mod cohomology;
pub mod criteria;
pub mod divisor;
pub mod error;
pub mod intmat;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod polyhedron;
pub mod positivity;
pub mod report;
pub mod splitting;

pub use bundle::{Filtration, KlyachkoBundle, RestrictedBundle, Thickening};
pub use cohomology::CohomologyTable;
pub use criteria::{apply_rule, Assertion, CertificateTree, Check, RuleContext, ScanParams, Status};
pub use divisor::{BaseLocusReport, DivisorClass, Iitaka, PositivityFlags, TorusDivisor};
pub use error::{Error, Result};
pub use lattice::{Cone, Fan, FanMorphism, StarFan};
pub use linalg::{Subspace, Q};
pub use model::{catalog_model, load_model, parse_model, Model, ModelErrors};
pub use positivity::{CdAssertion, Codim, QAmpleCertificate, SSplitScan, VanishingReport};
pub use report::Report;
pub use splitting::{SplitVerdict, SummandList, ThickeningVerdict, Witness};
