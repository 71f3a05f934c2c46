//! Computable theory of entire monogenic functions in the Clifford algebra `R_n`.
//!
//! * [`clifford`]: exact and floating-point arithmetic in `R_n`;
//! * [`multiindex`]: multi-index enumeration and the Cauchy constants `c(n, m)`;
//! * [`fueter`]: Fueter polynomials `V_m` and their derivative rule;
//! * [`series`]: truncated Taylor series `sum V_m a_m`, derivatives and CK-products;
//! * [`proximate`] and [`growth`]: proximate orders, `phi`, `G_q`, weighted norms,
//!   growth order and type estimators;
//! * [`operator`]: infinite-order differential operators `sum u_m (.)_L d^m` and their
//!   correspondence with homomorphisms;
//! * [`verify`]: quantitative checks with fitted constants and negative controls;
//! * [`io`]: the JSON/CSV interchange formats.

pub mod clifford;
mod error;
pub mod fixtures;
pub mod fueter;
pub mod growth;
pub mod io;
pub mod multiindex;
pub mod operator;
pub mod poly;
pub mod proximate;
pub mod sampling;
pub mod scalar;
pub mod series;
pub mod verify;

pub use clifford::{CliffordNumber, Paravector};
pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use operator::{HomTable, OperatorSymbol};
pub use proximate::ProximateOrder;
pub use scalar::{Mode, Rational, Scalar};
pub use series::MonogenicSeries;
