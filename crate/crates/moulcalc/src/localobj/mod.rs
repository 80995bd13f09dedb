//! Local objects: truncated jets, differential operators, prepared vector fields and
//! diffeomorphisms, contraction against moulds, and normal forms with an independent
//! order-by-order oracle.

pub mod contract;
pub mod diffeo;
pub mod field;
pub mod jet;
pub mod normal;
pub mod op;
pub mod oracle;

pub use contract::{comould, contract, ComouldOrder};
pub use diffeo::{diffeo_linearize, PreparedDiffeo};
pub use field::{resonance_scan, PreparedField, RawTerm};
pub use jet::{Jet, JetOperator, Monomial};
pub use normal::{linearize, prenormal_tram, tram_iteration, Normalization};
pub use op::{DiffOp, VectorField};
pub use oracle::{diffeo_oracle, oracle_normalize, OracleMode};
