//! Ergotropy, correlations and work extraction for small quantum systems.
//!
//! Units: hbar = k_B = 1, natural logarithms throughout.

pub mod correlations;
pub mod dissipation;
pub mod ergotropy;
pub mod error;
pub mod extraction;
pub mod io;
pub mod qmath;
pub mod states;
pub mod sweep;
pub mod verify;

pub use correlations::{CorrelationReport, DiscordResult, MeasuredSide};
pub use dissipation::{DissipationParams, SteadyStateParams};
pub use ergotropy::{ErgotropyReport, SpectralData};
pub use error::{Error, Result};
pub use extraction::{ExtractionProtocol, PowerBoundReport, Schedule};
pub use qmath::{ComplexMatrix, HermitianEigen, C64};
pub use states::{DensityMatrix, EffectiveTemperature, Hamiltonian, XState};
pub use sweep::{SweepConfig, SweepRow};
