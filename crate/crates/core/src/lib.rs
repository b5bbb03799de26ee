//! Numerical laboratory for almost-commuting unitaries over surface groups.
//!
//! The library constructs tuples of unitary matrices that nearly satisfy the
//! genus-`g` surface group relation, and computes three independently defined
//! invariants of such a tuple:
//!
//! * the winding invariant `W`, a normalized trace of the principal logarithm
//!   of the product of commutators;
//! * the simplicial determinant sum `S`, a signed sum of path determinants
//!   over an explicit triangulation of the genus-`g` surface;
//! * for genus one, the Bott-type K-invariant `kappa`, the trace of a spectral
//!   projector of an explicit almost-idempotent built from the pair.
//!
//! The equality `W = S` (and `kappa = dim * W` at genus one) is the content
//! of the verification pipeline in [`ktheory`].

pub mod determinant;
pub mod ktheory;
pub mod groups;
pub mod matrix;
pub mod surface;

pub use groups::{FreeWord, SurfaceGroupData, UnitaryTuple};
pub use ktheory::{InvariantReport, VerifyOptions};
pub use matrix::TracialMatrix;
pub use surface::{EdgeLabeling, SurfaceComplex};
