//! Numerics for the monogamy trade-off between the internal entanglement of a
//! two-qubit pair, its entanglement of assistance, and its entanglement with
//! a third qubit.
//!
//! * [`qstate`]: dense states, partial trace and transpose, Haar sampling.
//! * [`measures`]: concurrence, concurrence of assistance, negativity and
//!   their convex-roof variants on two qubits.
//! * [`canonical`]: Acín canonical form and the quantities bounding
//!   `C + C_a` on it.
//! * [`convexroof`]: brute-force roof optimizer over ensemble decompositions.
//! * [`monogamy`]: trade-off residuals, the mixed-state bound, and the
//!   saturating family.

pub mod canonical;
pub mod convexroof;
pub mod error;
pub mod measures;
pub mod monogamy;
pub mod qstate;
pub mod tolerance;

pub use canonical::{AcinParams, Decomposition, ProofQuantities};
pub use convexroof::{Ensemble, RoofMode, RoofResult};
pub use error::{Error, Result};
pub use measures::{Measure, MeasureValue};
pub use monogamy::{CorollaryReport, FamilyParams, TheoremReport};
pub use qstate::{Bipartition, DensityMatrix, SchmidtSpectrum, StateVector};
