use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use shrinker::geometry::{
    compare_with_oracle, export_mesh_g1, export_profile, geodesic_residual_reduced, psi_map,
    to_polar, OracleConfig, ProfileMeta,
};
use shrinker::shooting::{
    check_simple, classify, extract_arcs, extract_closed, find_critical, sign_structure_violation,
    ClosedProfile,
};
use shrinker::Error;

use crate::config::RunConfig;
use crate::CliError;

/// Largest accepted closure error of a closed orbit.
pub const CLOSURE_LIMIT: f64 = 1e-6;
/// Largest accepted geodesic residual of an exported profile.
pub const RESIDUAL_LIMIT: f64 = 1e-5;
/// Largest accepted `|xi* - (g/2) ln R*|`.
pub const ORACLE_GAP_LIMIT: f64 = 1e-6;
/// Largest accepted Hausdorff distance to the oracle profile.
pub const HAUSDORFF_LIMIT: f64 = 1e-5;

/// Map a library error raised while searching or integrating.
fn search_error(e: Error) -> CliError {
    match e {
        Error::InvalidParams(_) => CliError::params(e.to_string()),
        Error::Io { .. } | Error::Serialize(_) => CliError::io(e.to_string()),
        _ => CliError::search(e.to_string()),
    }
}

fn output_error(e: Error) -> CliError {
    match e {
        Error::Io { .. } | Error::Serialize(_) => CliError::io(e.to_string()),
        _ => CliError::verify(e.to_string()),
    }
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))
}

/// Collects failed checks; the first one decides the error message.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            let msg = what();
            log::error!("check failed: {msg}");
            self.0.push(msg);
        }
    }

    fn finish(self) -> Result<(), CliError> {
        match self.0.into_iter().next() {
            None => Ok(()),
            Some(first) => Err(CliError::verify(first)),
        }
    }
}

/// Shortest round-trip text, in exponent form for very small or large magnitudes.
pub fn num(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e6) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn summary(profile: &ClosedProfile, residual: f64) -> String {
    format!(
        "xi_star={} period={} closure={} residual={}",
        num(profile.xi_star),
        num(profile.period),
        num(profile.closure_error),
        num(residual)
    )
}

fn write_profile(
    cfg: &RunConfig,
    profile: &ClosedProfile,
    residual: f64,
    stem: &str,
) -> Result<(PathBuf, PathBuf), CliError> {
    let csv = cfg.out.join(format!("{stem}.csv"));
    let json = cfg.out.join(if stem == "profile" {
        "meta.json".to_string()
    } else {
        format!("{stem}.json")
    });
    let meta = ProfileMeta::new(profile, residual, cfg.to_json());
    export_profile(profile, &meta, &csv, &json).map_err(output_error)?;
    Ok((csv, json))
}

pub fn run_find(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    let tol = &cfg.tolerances;
    prepare_out(&cfg.out)?;
    if !p.equal_multiplicities() {
        log::info!("m1 != m2: computing the two orthogonal arcs");
        return run_arcs(cfg);
    }
    let crit = find_critical(p, &cfg.search, tol).map_err(search_error)?;
    log::info!(
        "xi_star = {} after {} iterations, bracket width {:e}",
        crit.xi_star,
        crit.iterations,
        crit.bracket_width
    );
    let profile = extract_closed(crit.xi_star, p, tol).map_err(search_error)?;
    let residual = geodesic_residual_reduced(&to_polar(&profile)).map_err(output_error)?;
    let (csv, json) = write_profile(cfg, &profile, residual, "profile")?;
    log::info!("wrote {} and {}", csv.display(), json.display());
    println!("{}", summary(&profile, residual));

    let mut checks = Checks::default();
    checks.require(profile.orthogonality_defect() <= tol.orth, || {
        format!(
            "orthogonality defect {:e} exceeds {:e}",
            profile.orthogonality_defect(),
            tol.orth
        )
    });
    checks.require(profile.closure_error < CLOSURE_LIMIT, || {
        format!(
            "closure error {:e} exceeds {CLOSURE_LIMIT:e}",
            profile.closure_error
        )
    });
    checks.require(check_simple(&profile), || "profile is not simple".into());
    let violation = sign_structure_violation(&profile);
    checks.require(violation.is_none(), || {
        format!(
            "sign structure fails at t = {}",
            violation.unwrap_or_default()
        )
    });
    checks.require(residual < RESIDUAL_LIMIT, || {
        format!("geodesic residual {residual:e} exceeds {RESIDUAL_LIMIT:e}")
    });
    checks.finish()
}

fn run_arcs(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    let tol = &cfg.tolerances;
    let (upper, lower) = extract_arcs(p, &cfg.search, tol).map_err(search_error)?;
    let mut checks = Checks::default();
    for (name, arc, above) in [("arc_upper", &upper, true), ("arc_lower", &lower, false)] {
        let residual = geodesic_residual_reduced(&to_polar(arc)).map_err(output_error)?;
        let (csv, _) = write_profile(cfg, arc, residual, name)?;
        log::info!("wrote {}", csv.display());
        println!("arc={} {}", &name[4..], summary(arc, residual));
        for (end, d) in ["start", "end"].iter().zip(arc.end_defects) {
            checks.require(d <= tol.orth, || {
                format!(
                    "{name} {end} orthogonality defect {d:e} exceeds {:e}",
                    tol.orth
                )
            });
        }
        let n = arc.samples.len();
        let side_ok = arc.samples[1..n.saturating_sub(1)]
            .iter()
            .all(|(_, s)| (s.theta > p.theta_star) == above);
        checks.require(side_ok, || format!("{name} crosses theta*"));
        checks.require(check_simple(arc), || format!("{name} is not simple"));
        checks.require(residual < RESIDUAL_LIMIT, || {
            format!("{name} geodesic residual {residual:e} exceeds {RESIDUAL_LIMIT:e}")
        });
    }
    checks.finish()
}

pub fn run_classify(cfg: &RunConfig) -> Result<(), CliError> {
    let xi0 = cfg
        .xi0
        .ok_or_else(|| CliError::params("classify needs --xi0".into()))?;
    let c = classify(xi0, &cfg.params, cfg.t_max, &cfg.tolerances).map_err(search_error)?;
    let witness = c.witness_time.map_or_else(String::new, |t| t.to_string());
    println!("xi0={xi0} kind={} witness_time={witness}", c.kind);
    Ok(())
}

/// `count` points from `from` to `to` inclusive.
pub fn grid(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    to
                } else {
                    from + (to - from) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

pub fn run_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    let (lo, hi) = (p.xi_sphere, p.xi_sphere + cfg.search.ceiling);
    for (name, v) in [("sweep-from", cfg.sweep_from), ("sweep-to", cfg.sweep_to)] {
        if !(v >= lo && v <= hi) {
            return Err(CliError::params(format!(
                "{name} = {v} lies outside [xi_sphere, xi_sphere + {}] = [{lo}, {hi}]",
                cfg.search.ceiling
            )));
        }
    }
    prepare_out(&cfg.out)?;
    let xs = grid(cfg.sweep_from, cfg.sweep_to, cfg.sweep_count);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::search(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<String> = pool.install(|| {
        xs.par_iter()
            .map(|&xi0| match classify(xi0, p, cfg.t_max, &cfg.tolerances) {
                Ok(c) => {
                    let witness = c.witness_time.map_or_else(String::new, |t| t.to_string());
                    format!("{xi0},{},{witness}", c.kind)
                }
                Err(e) => {
                    log::warn!("xi0 = {xi0}: {e}");
                    format!("{xi0},fault,")
                }
            })
            .collect()
    });
    let path = cfg.out.join("sweep.csv");
    let mut text = String::from("xi0,kind,witness_time\n");
    for row in &rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(&path, text)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    let faults = rows.iter().filter(|r| r.contains(",fault,")).count();
    println!(
        "points={} faults={faults} report={}",
        rows.len(),
        path.display()
    );
    Ok(())
}

pub fn run_verify_angenent(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    if p.g != 1 {
        return Err(CliError::params(format!(
            "verify-angenent needs g = 1, got g = {}",
            p.g
        )));
    }
    prepare_out(&cfg.out)?;
    let c = compare_with_oracle(p, &cfg.search, &OracleConfig::default(), &cfg.tolerances)
        .map_err(search_error)?;
    let report = serde_json::json!({ "comparison": c, "config": cfg.to_json() });
    let path = cfg.out.join("verify.json");
    let mut text =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::io(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    println!(
        "n={} xi_star={} half_log_r_star={} gap={} hausdorff={}",
        p.n,
        num(c.xi_star),
        num(0.5 * c.r_star.ln()),
        num(c.xi_gap),
        num(c.hausdorff)
    );
    let mut checks = Checks::default();
    checks.require(c.xi_gap < ORACLE_GAP_LIMIT, || {
        format!("xi_star gap {:e} exceeds {ORACLE_GAP_LIMIT:e}", c.xi_gap)
    });
    checks.require(c.hausdorff < HAUSDORFF_LIMIT, || {
        format!(
            "Hausdorff distance {:e} exceeds {HAUSDORFF_LIMIT:e}",
            c.hausdorff
        )
    });
    checks.finish()
}

pub fn run_mesh(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    if p.g != 1 || p.n != 2 {
        return Err(CliError::params(format!(
            "mesh needs g = 1 and n = 2 (m1 = m2 = 1), got g = {} and n = {}",
            p.g, p.n
        )));
    }
    if cfg.segments < 3 {
        return Err(CliError::params(format!(
            "segments must be at least 3, got {}",
            cfg.segments
        )));
    }
    if cfg.profile_points < 3 {
        return Err(CliError::params(format!(
            "profile-points must be at least 3, got {}",
            cfg.profile_points
        )));
    }
    prepare_out(&cfg.out)?;
    let crit = find_critical(p, &cfg.search, &cfg.tolerances).map_err(search_error)?;
    let profile = extract_closed(crit.xi_star, p, &cfg.tolerances).map_err(search_error)?;
    let ring = psi_map(&profile).decimate(cfg.profile_points);
    let path = cfg.out.join("mesh.obj");
    let mesh = export_mesh_g1(&ring, cfg.segments, &path).map_err(output_error)?;
    let euler = mesh.euler_characteristic();
    println!(
        "vertices={} faces={} euler={euler} mesh={}",
        mesh.vertices.len(),
        mesh.faces.len(),
        path.display()
    );
    let mut checks = Checks::default();
    checks.require(mesh.is_watertight(), || "mesh is not watertight".into());
    checks.require(euler == 0, || {
        format!("Euler characteristic {euler}, expected 0")
    });
    checks.require(mesh.signed_volume() > 0.0, || {
        "mesh faces point inwards".into()
    });
    checks.finish()
}
