//! Torus mesh obtained by revolving a closed `(x, r_tilde)` profile about the x-axis.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::coords::AngenentProfile;
use crate::geometry::export::create;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counterclockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn euler_characteristic(&self) -> i64 {
        let edges = self.edge_counts().len() as i64;
        self.vertices.len() as i64 - edges + self.faces.len() as i64
    }

    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Every edge is shared by exactly two faces, traversed in opposite directions.
    pub fn is_watertight(&self) -> bool {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *directed.entry((f[k], f[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &c)| c == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// Positive for outward-oriented closed meshes.
    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                let cross = [
                    b[1] * c[2] - b[2] * c[1],
                    b[2] * c[0] - b[0] * c[2],
                    b[0] * c[1] - b[1] * c[0],
                ];
                (a[0] * cross[0] + a[1] * cross[1] + a[2] * cross[2]) / 6.0
            })
            .sum()
    }

    /// Wavefront OBJ text with `v` and 1-indexed `f` records.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        out
    }
}

fn signed_area(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        / 2.0
}

/// Revolve a closed profile of a `g = 1`, `n = 2` surface into a triangulated torus in R^3.
pub fn revolve(profile: &AngenentProfile, segments: usize) -> Result<Mesh> {
    let p = &profile.params;
    if p.g != 1 || p.n != 2 {
        return Err(Error::Precondition(format!(
            "mesh export needs g = 1 and n = 2, got g = {} and n = {}",
            p.g, p.n
        )));
    }
    if !profile.closed {
        return Err(Error::Precondition(
            "mesh export needs a closed profile".into(),
        ));
    }
    if segments < 3 {
        return Err(Error::Precondition(format!(
            "need at least 3 segments, got {segments}"
        )));
    }
    let mut ring: Vec<(f64, f64)> = profile.points.clone();
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: ring.len(),
        });
    }
    if signed_area(&ring) < 0.0 {
        ring.reverse();
    }
    let (ns, nr) = (ring.len(), segments);
    let mut vertices = Vec::with_capacity(ns * nr);
    for &(x, r) in &ring {
        for j in 0..nr {
            let a = 2.0 * PI * j as f64 / nr as f64;
            vertices.push([x, r * a.cos(), r * a.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % ns) * nr + (j % nr);
    let mut faces = Vec::with_capacity(2 * ns * nr);
    for i in 0..ns {
        for j in 0..nr {
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
        }
    }
    Ok(Mesh { vertices, faces })
}

/// Revolve the profile and write the mesh as OBJ.
pub fn export_mesh_g1(profile: &AngenentProfile, segments: usize, path: &Path) -> Result<Mesh> {
    let mesh = revolve(profile, segments)?;
    let mut w = create(path)?;
    w.write_all(mesh.to_obj().as_bytes())
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(path, e))?;
    Ok(mesh)
}
