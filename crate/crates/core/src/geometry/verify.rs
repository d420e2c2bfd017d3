//! Side-by-side run of the reduced pipeline and the half-plane oracle for `g = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::coords::psi_map;
use crate::geometry::hausdorff::hausdorff;
use crate::geometry::oracle::{angenent_oracle, OracleConfig};
use crate::isoparam::FoliationParams;
use crate::shooting::{extract_closed_with_spacing, find_critical, SearchConfig};
use crate::tolerances::Tolerances;

/// Both profiles are sampled this finely before comparing them, so that chord
/// sag of the polylines stays well under the comparison bound.
pub const COMPARISON_SPACING: f64 = 2e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngenentComparison {
    pub xi_star: f64,
    pub r_star: f64,
    /// `|xi_star - (g/2) ln R*|`.
    pub xi_gap: f64,
    /// Between the `Psi` image of the closed profile and the oracle profile.
    pub hausdorff: f64,
    pub orthogonality_defect: f64,
    pub oracle_defect: f64,
}

pub fn compare_with_oracle(
    p: &FoliationParams,
    search: &SearchConfig,
    oracle: &OracleConfig,
    tol: &Tolerances,
) -> Result<AngenentComparison> {
    if p.g != 1 {
        return Err(Error::Precondition(format!(
            "oracle comparison needs g = 1, got g = {}",
            p.g
        )));
    }
    let crit = find_critical(p, search, tol)?;
    let profile = extract_closed_with_spacing(crit.xi_star, p, tol, COMPARISON_SPACING)?;
    let cfg = OracleConfig {
        spacing: oracle.spacing.min(COMPARISON_SPACING),
        ..*oracle
    };
    let reference = angenent_oracle(p, &cfg, tol)?;
    let image = psi_map(&profile);
    Ok(AngenentComparison {
        xi_star: crit.xi_star,
        r_star: reference.r_star,
        xi_gap: (crit.xi_star - 0.5 * p.g_f64() * reference.r_star.ln()).abs(),
        hausdorff: hausdorff(&image.points, &reference.profile.points),
        orthogonality_defect: crit.orthogonality_defect,
        oracle_defect: reference.orthogonality_defect,
    })
}
