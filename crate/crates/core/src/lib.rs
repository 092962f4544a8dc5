//! Universal enveloping vertex algebras of non-linear Lie conformal
//! superalgebras: exact lambda-bracket calculus on the tensor algebra,
//! normal ordering to a PBW basis, axiom verification and ansatz solving.

pub mod algebra;
pub mod ansatz;
pub mod calculus;
pub mod formal;
pub mod frontend;
pub mod pbw;
pub mod scalar;
pub mod verify;

pub use algebra::{Degree, GeneratorDecl, Parity, Presentation, RGen, TMono, TPoly};
pub use calculus::{CalcError, Defect, Engine};
pub use formal::LPoly;
pub use frontend::{parse, parse_lpoly, parse_tpoly, render};
pub use scalar::{LinearSystem, ParamSpace, Scalar};
pub use verify::{run_all, Report};
