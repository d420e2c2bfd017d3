use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::coords::{phi_from_theta, psi, r_from_xi};
use crate::shooting::ClosedProfile;

/// Profile metadata written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub g: u32,
    pub m1: u32,
    pub m2: u32,
    pub n: u32,
    pub m: f64,
    pub theta_star: f64,
    pub xi_sphere: f64,
    pub xi_star: f64,
    pub period: f64,
    pub closure_error: f64,
    pub orthogonality_defect: f64,
    pub geodesic_residual: f64,
    pub is_closed: bool,
    /// Run configuration (tolerances, search settings, ...).
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub config: serde_json::Value,
}

impl ProfileMeta {
    pub fn new(profile: &ClosedProfile, geodesic_residual: f64, config: serde_json::Value) -> Self {
        let p = &profile.params;
        Self {
            g: p.g,
            m1: p.m1,
            m2: p.m2,
            n: p.n,
            m: p.m,
            theta_star: p.theta_star,
            xi_sphere: p.xi_sphere,
            xi_star: profile.xi_star,
            period: profile.period,
            closure_error: profile.closure_error,
            orthogonality_defect: profile.orthogonality_defect(),
            geodesic_residual,
            is_closed: profile.is_closed,
            config,
        }
    }
}

/// Write `t,xi,theta,alpha,r,phi` rows, plus `x,r_tilde` when `g = 1`.
pub fn write_profile_csv<W: Write>(profile: &ClosedProfile, mut w: W) -> std::io::Result<()> {
    let p = &profile.params;
    let angenent = p.g == 1;
    if angenent {
        writeln!(w, "t,xi,theta,alpha,r,phi,x,r_tilde")?;
    } else {
        writeln!(w, "t,xi,theta,alpha,r,phi")?;
    }
    for &(t, s) in &profile.samples {
        write!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            t,
            s.xi,
            s.theta,
            s.alpha,
            r_from_xi(s.xi, p),
            phi_from_theta(s.theta, p)
        )?;
        if angenent {
            let (x, r) = psi(s.xi, s.theta, p);
            write!(w, ",{x:.16e},{r:.16e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Write the profile CSV and its JSON metadata.
pub fn export_profile(
    profile: &ClosedProfile,
    meta: &ProfileMeta,
    csv: &Path,
    json: &Path,
) -> Result<()> {
    let mut w = create(csv)?;
    write_profile_csv(profile, &mut w).map_err(|e| Error::io(csv, e))?;
    w.flush().map_err(|e| Error::io(csv, e))?;
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    std::fs::write(json, text).map_err(|e| Error::io(json, e))
}
