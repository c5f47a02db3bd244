//! Exact reduced dynamics of central spins coupled to an XY spin bath.
//!
//! The crate is organized bottom-up:
//!
//! * [`numkit`]: dense complex linear algebra (Hermitian eigensolver, propagators, partial trace).
//! * [`xychain`]: free-fermion description of the bath chain (momenta, dispersion, Bogoliubov angles).
//! * [`dicke`]: symmetric-sector states and collective operators of the central spins.
//! * [`reduced_state`]: closed-form reduced density matrix of the central spins.
//! * [`qfi`]: quantum Fisher information, optimal direction and entanglement depth.
//! * [`exact_oracles`]: dense brute-force ground truth, including the cavity-QED model.

pub mod dicke;
pub mod error;
pub mod exact_oracles;
pub mod numkit;
pub mod qfi;
pub mod reduced_state;
pub mod xychain;

pub use dicke::{CentralMapping, CentralParams, CoherentCoeffs, CollectiveOps};
pub use error::{Error, Result};
pub use exact_oracles::{Boundary, CavityParams, CavityVariant, SpinSpace};
pub use numkit::{ComplexMatrix, HermEigen, Propagator, C64};
pub use qfi::{EntanglementReport, GammaMatrix};
pub use reduced_state::DensityMatrix;
pub use xychain::{ChainParams, MomentumMode, ShiftedModeData};
