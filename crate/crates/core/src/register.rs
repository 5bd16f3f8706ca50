//! Atom-array geometries and the unit-disk interaction graphs they induce.

use crate::error::{Error, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A register of trap sites. Positions are 3D coordinates in µm; 1D and 2D
/// layouts embed with zeroed trailing coordinates. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    positions: Vec<[f64; 3]>,
    labels: Option<Vec<String>>,
}

impl Register {
    pub fn new(positions: Vec<[f64; 3]>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidRegister("register needs at least one site".into()));
        }
        for (i, p) in positions.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidRegister(format!(
                    "site {i} has a non-finite coordinate"
                )));
            }
        }
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                if dist(&positions[i], &positions[j]) == 0.0 {
                    return Err(Error::InvalidRegister(format!(
                        "sites {i} and {j} share a position"
                    )));
                }
            }
        }
        Ok(Register {
            positions,
            labels: None,
        })
    }

    pub fn with_labels(positions: Vec<[f64; 3]>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != positions.len() {
            return Err(Error::InvalidRegister(
                "label count must match site count".into(),
            ));
        }
        let mut reg = Self::new(positions)?;
        reg.labels = Some(labels);
        Ok(reg)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one site
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> [f64; 3] {
        self.positions[i]
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i].as_str())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        dist(&self.positions[i], &self.positions[j])
    }

    /// JSON form: an array of `[x, y, z]` µm triples.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.positions).expect("positions serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: Vec<serde_json::Value> =
            serde_json::from_str(s).map_err(|e| Error::schema("register", e.to_string()))?;
        let mut positions = Vec::with_capacity(raw.len());
        for (i, item) in raw.iter().enumerate() {
            let coords: Vec<f64> = serde_json::from_value(item.clone())
                .map_err(|_| Error::schema("register", format!("site {i} is not a coordinate triple")))?;
            if coords.len() > 3 || coords.is_empty() {
                return Err(Error::schema(
                    "register",
                    format!("site {i} must have 1 to 3 coordinates"),
                ));
            }
            let mut p = [0.0; 3];
            p[..coords.len()].copy_from_slice(&coords);
            positions.push(p);
        }
        Self::new(positions)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Chain,
    Square,
    Triangular,
    Cubic,
}

impl LatticeKind {
    fn axes(self) -> usize {
        match self {
            LatticeKind::Chain => 1,
            LatticeKind::Square | LatticeKind::Triangular => 2,
            LatticeKind::Cubic => 3,
        }
    }
}

/// Build a standard lattice with deterministic row-major site ordering
/// (first axis slowest). `extents` gives the number of sites per axis.
pub fn build_lattice(kind: LatticeKind, extents: &[usize], spacing: f64) -> Result<Register> {
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::invalid_argument(format!(
            "lattice spacing must be positive, got {spacing}"
        )));
    }
    if extents.len() != kind.axes() {
        return Err(Error::invalid_argument(format!(
            "{:?} lattice expects {} extents, got {}",
            kind,
            kind.axes(),
            extents.len()
        )));
    }
    if extents.iter().any(|&e| e == 0) {
        return Err(Error::invalid_argument("lattice extents must be >= 1"));
    }
    let mut positions = Vec::new();
    match kind {
        LatticeKind::Chain => {
            for ix in 0..extents[0] {
                positions.push([ix as f64 * spacing, 0.0, 0.0]);
            }
        }
        LatticeKind::Square => {
            for ix in 0..extents[0] {
                for iy in 0..extents[1] {
                    positions.push([ix as f64 * spacing, iy as f64 * spacing, 0.0]);
                }
            }
        }
        LatticeKind::Triangular => {
            // alternate rows are offset by half a spacing; all nearest
            // neighbours sit exactly `spacing` apart
            let row_height = spacing * 3f64.sqrt() / 2.0;
            for iy in 0..extents[1] {
                let offset = if iy % 2 == 0 { 0.0 } else { spacing / 2.0 };
                for ix in 0..extents[0] {
                    positions.push([ix as f64 * spacing + offset, iy as f64 * row_height, 0.0]);
                }
            }
        }
        LatticeKind::Cubic => {
            for ix in 0..extents[0] {
                for iy in 0..extents[1] {
                    for iz in 0..extents[2] {
                        positions.push([
                            ix as f64 * spacing,
                            iy as f64 * spacing,
                            iz as f64 * spacing,
                        ]);
                    }
                }
            }
        }
    }
    Register::new(positions)
}

/// Distance below which the van der Waals shift c6/r^6 exceeds the drive
/// strength: r_b = (c6 / omega)^(1/6).
pub fn blockade_radius(omega: f64, c6: f64) -> Result<f64> {
    if !(omega > 0.0) || !(c6 > 0.0) {
        return Err(Error::invalid_argument(format!(
            "blockade_radius needs omega > 0 and c6 > 0, got omega={omega}, c6={c6}"
        )));
    }
    Ok((c6 / omega).powf(1.0 / 6.0))
}

/// Undirected graph with an edge wherever two register sites sit strictly
/// closer than `radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDiskGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
    radius: f64,
}

impl UnitDiskGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        i != j && self.edges.contains(&key)
    }

    /// One adjacency bitmask per vertex; vertex count must be ≤ 64.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.vertex_count <= 64);
        let mut masks = vec![0u64; self.vertex_count];
        for &(i, j) in &self.edges {
            masks[i] |= 1 << j;
            masks[j] |= 1 << i;
        }
        masks
    }
}

/// Build the unit-disk graph of a register: edge iff r_ij < radius
/// (strictly), vertex order matching register order.
pub fn unit_disk_graph(reg: &Register, radius: f64) -> Result<UnitDiskGraph> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid_argument(format!(
            "unit-disk radius must be positive, got {radius}"
        )));
    }
    let n = reg.len();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if reg.distance(i, j) < radius {
                edges.insert((i, j));
            }
        }
    }
    Ok(UnitDiskGraph {
        vertex_count: n,
        edges,
        radius,
    })
}

/// Pairwise coupling matrix with entries coeff / r_ij^power and zero
/// diagonal. `power` is 6 for van der Waals couplings and 3 for dipolar
/// exchange.
pub fn interaction_matrix(reg: &Register, coeff: f64, power: u32) -> Result<Array2<f64>> {
    if !coeff.is_finite() {
        return Err(Error::invalid_argument("interaction coefficient must be finite"));
    }
    if power != 3 && power != 6 {
        return Err(Error::invalid_argument(format!(
            "interaction power must be 3 or 6, got {power}"
        )));
    }
    let n = reg.len();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let r = reg.distance(i, j);
            if r == 0.0 {
                return Err(Error::InvalidRegister(format!(
                    "sites {i} and {j} coincide"
                )));
            }
            let v = coeff / r.powi(power as i32);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn chain_lattice_positions() {
        let reg = build_lattice(LatticeKind::Chain, &[3], 4.0).unwrap();
        assert_eq!(reg.positions(), &[[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [8.0, 0.0, 0.0]]);
    }

    #[test]
    fn square_lattice_distances() {
        let reg = build_lattice(LatticeKind::Square, &[2, 2], 5.0).unwrap();
        assert_eq!(reg.len(), 4);
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                let d = reg.distance(i, j);
                min = min.min(d);
                max = max.max(d);
            }
        }
        assert_abs_diff_eq!(min, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(max, 5.0 * 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn cubic_lattice_edge_count() {
        // 2x2x2 cube at unit spacing: the 12 cube edges at radius 1.1
        let reg = build_lattice(LatticeKind::Cubic, &[2, 2, 2], 1.0).unwrap();
        assert_eq!(reg.len(), 8);
        let g = unit_disk_graph(&reg, 1.1).unwrap();
        // oracle: enumerate pairs with distance < 1.1
        let mut expected = 0;
        for i in 0..8 {
            for j in i + 1..8 {
                if reg.distance(i, j) < 1.1 {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 12);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn triangular_lattice_nearest_neighbour_spacing() {
        let reg = build_lattice(LatticeKind::Triangular, &[3, 3], 2.0).unwrap();
        assert_eq!(reg.len(), 9);
        let mut min = f64::INFINITY;
        for i in 0..9 {
            for j in i + 1..9 {
                min = min.min(reg.distance(i, j));
            }
        }
        assert_abs_diff_eq!(min, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn lattice_rejects_bad_arguments() {
        assert!(build_lattice(LatticeKind::Chain, &[3], 0.0).is_err());
        assert!(build_lattice(LatticeKind::Chain, &[0], 1.0).is_err());
        assert!(build_lattice(LatticeKind::Square, &[2], 1.0).is_err());
    }

    #[test]
    fn blockade_radius_examples() {
        assert_abs_diff_eq!(blockade_radius(1.0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(blockade_radius(1.0, 64.0).unwrap(), 2.0, epsilon = 1e-12);
        // oracle: solve c6 / r^6 = omega by bisection
        let (omega, c6) = (6.25, 400.0);
        let (mut lo, mut hi) = (0.1f64, 100.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if c6 / mid.powi(6) > omega {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_abs_diff_eq!(blockade_radius(omega, c6).unwrap(), lo, epsilon = 1e-9);
        assert_abs_diff_eq!(blockade_radius(omega, c6).unwrap(), 2.0, epsilon = 1e-12);
        assert!(blockade_radius(0.0, 1.0).is_err());
        assert!(blockade_radius(1.0, -1.0).is_err());
    }

    #[test]
    fn unit_disk_edge_is_strict() {
        let reg = Register::new(vec![[0.0, 0.0, 0.0], [4.0, 0.0, 0.0]]).unwrap();
        assert_eq!(unit_disk_graph(&reg, 5.0).unwrap().edge_count(), 1);
        let reg = Register::new(vec![[0.0, 0.0, 0.0], [5.0, 0.0, 0.0]]).unwrap();
        assert_eq!(unit_disk_graph(&reg, 5.0).unwrap().edge_count(), 0);
    }

    #[test]
    fn unit_disk_on_3x3_square_radius_2_3() {
        let reg = build_lattice(LatticeKind::Square, &[3, 3], 1.0).unwrap();
        let g = unit_disk_graph(&reg, 2.3).unwrap();
        // oracle: pairwise distance enumeration
        let mut expected = BTreeSet::new();
        for i in 0..9 {
            for j in i + 1..9 {
                if reg.distance(i, j) < 2.3 {
                    expected.insert((i, j));
                }
            }
        }
        let got: BTreeSet<_> = g.edges().collect();
        assert_eq!(got, expected);
        // distance-2 and sqrt(5) pairs included, sqrt(8) diagonal excluded
        assert!(g.has_edge(0, 2)); // straight distance 2
        assert!(g.has_edge(0, 5)); // knight-like sqrt(5)
        assert!(!g.has_edge(0, 8)); // far corner sqrt(8)
    }

    #[test]
    fn interaction_matrix_values() {
        let reg = Register::new(vec![[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
        let m6 = interaction_matrix(&reg, 1.0, 6).unwrap();
        assert_abs_diff_eq!(m6[[0, 1]], 1.0 / 64.0, epsilon = 1e-15);
        let m3 = interaction_matrix(&reg, 1.0, 3).unwrap();
        assert_abs_diff_eq!(m3[[0, 1]], 1.0 / 8.0, epsilon = 1e-15);

        let chain = build_lattice(LatticeKind::Chain, &[3], 1.0).unwrap();
        let m = interaction_matrix(&chain, 1.0, 6).unwrap();
        assert_abs_diff_eq!(m[[0, 1]], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[[1, 2]], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[[0, 2]], 1.0 / 64.0, epsilon = 1e-15);
        assert!(interaction_matrix(&chain, 1.0, 4).is_err());
    }

    #[test]
    fn register_rejects_duplicates_and_nan() {
        assert!(Register::new(vec![]).is_err());
        assert!(Register::new(vec![[0.0; 3], [0.0; 3]]).is_err());
        assert!(Register::new(vec![[f64::NAN, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn register_json_roundtrip_and_rejection() {
        let reg = build_lattice(LatticeKind::Square, &[2, 2], 1.5).unwrap();
        let json = reg.to_json_string();
        let back = Register::from_json_str(&json).unwrap();
        assert_eq!(back, reg);
        assert!(Register::from_json_str("[[0,0,0],[0,0,0]]").is_err());
        assert!(Register::from_json_str("[[null,0,0]]").is_err());
        // 2D input embeds with zeroed z
        let two_d = Register::from_json_str("[[1.0, 2.0], [3.0, 4.0]]").unwrap();
        assert_eq!(two_d.position(0), [1.0, 2.0, 0.0]);
    }
}
