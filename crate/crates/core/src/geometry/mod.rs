//! Coordinate changes, independent verification and file output for computed profiles.

pub mod coords;
pub mod export;
pub mod hausdorff;
pub mod mesh;
pub mod oracle;
pub mod residual;
pub mod verify;

pub use coords::{psi_map, to_polar, AngenentProfile, PolarProfile, PolarSample};
pub use export::{export_profile, write_profile_csv, ProfileMeta};
pub use hausdorff::hausdorff;
pub use mesh::{export_mesh_g1, revolve, Mesh};
pub use oracle::{angenent_oracle, OracleConfig, OracleResult, TAU_MATCHING_PSI};
pub use residual::geodesic_residual_reduced;
pub use verify::{compare_with_oracle, AngenentComparison, COMPARISON_SPACING};
