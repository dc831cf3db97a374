//! Ground-projector lattices of local Hamiltonians: local operator spaces,
//! spectrahedra, a barrier SDP solver, coatom certificates, the classical
//! three-bit case and the rank-three family M(a,t).

pub mod classical;
pub mod error;
pub mod family;
pub mod herm;
pub mod local_space;
pub mod random;
pub mod sdp;
pub mod search;
pub mod spectra;

pub use error::{Error, Result};
pub use herm::{HermitianMatrix, Projector, C64};
pub use local_space::{Hypergraph, LocalSpaceBasis, Model};
pub use sdp::{minimize, SdpOptions, SdpSolution, SolveStatus};
pub use search::{coatom_certificate, sample_extreme_points, CoatomCertificate, Verdict};
pub use spectra::{LmiSpectrahedron, PointClass};
