//! Total-derivative calculus on jet spaces over exact rationals:
//! differential polynomials, C-differential operators, horizontal forms,
//! Spencer δ-cohomology at jet points, formal exactness of operator
//! complexes, zero-curvature checks and p-form bookkeeping.

pub mod cli;
pub mod compat;
pub mod error;
pub mod expr;
pub mod forms;
pub mod jet;
pub mod linalg;
pub mod op;
pub mod parse;
pub mod pform;
pub mod problem;
pub mod spencer;
pub mod zcr;

pub use error::{Error, Result};
pub use expr::{CoordId, DiffPoly, MultiIndex, Rational, Vars};
pub use jet::{JetContext, JetPoint};
pub use op::{CDiffOp, ScalarOp};
