//! Three-photon entanglement from ortho-positronium decay.
//!
//! Builds the photon polarization states from the decay geometry, measures
//! their three-party entanglement (tangle, single-party purities), finds
//! the Stern-Gerlach settings that violate the Mermin inequality, and
//! estimates how many trials an experiment needs before a local-realist
//! concedes.

pub mod error;
pub mod invariants;
pub mod kinematics;
pub mod mermin;
pub mod optimize;
pub mod simulate;
pub mod states;
pub mod strength;
pub mod table;
pub mod tensor;

pub use error::{Error, Result};
pub use invariants::{invariant_fingerprint, tangle, tangle_scan, InvariantFingerprint, ScanGrid};
pub use kinematics::{geometry_from_angles, photon_energies, polarization_vector, DecayGeometry, Helicity};
pub use mermin::{mermin_extremize, mermin_value, triple_expectation, MerminResult, ObservableSettings};
pub use states::{delta_family_state, mercedes_state, ortho_state, para_state, SpinZ};
pub use strength::{best_lr_model, strength_table, EventModel, StrengthReport};
pub use tensor::{BlochVector, DensityMatrix, LocalOperator, PureState};
