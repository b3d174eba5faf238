//! Uniform symmetric meshes and the stencil/quadrature helpers shared by the
//! solver and the diagnostics.

use crate::error::Error;

/// A symmetric uniform mesh on `[-L, L]` with an odd number of nodes, so that
/// `x = 0` is itself a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    h: f64,
    uniform: bool,
}

impl Mesh {
    /// Fewest nodes a wall profile is allowed to live on.
    pub const MIN_NODES: usize = 101;

    /// Build the mesh with `n` nodes on `[-half_length, half_length]`.
    ///
    /// Nodes are generated as `(i - mid) * h`, which makes the mesh exactly
    /// symmetric in floating point and places an exact zero at the center.
    pub fn uniform(half_length: f64, n: usize) -> Result<Self, Error> {
        if !half_length.is_finite() || half_length <= 0.0 {
            return Err(Error::InvalidMesh(format!(
                "half-length must be positive, got {half_length}"
            )));
        }
        if n < Self::MIN_NODES {
            return Err(Error::InvalidMesh(format!(
                "need at least {} nodes, got {n}",
                Self::MIN_NODES
            )));
        }
        if n % 2 == 0 {
            return Err(Error::InvalidMesh(format!(
                "node count must be odd so x = 0 is a node, got {n}"
            )));
        }
        let mid = (n - 1) / 2;
        let h = half_length / mid as f64;
        let nodes = (0..n).map(|i| (i as f64 - mid as f64) * h).collect();
        Ok(Self {
            nodes,
            h,
            uniform: true,
        })
    }

    /// Adopt externally supplied nodes (e.g. parsed from a file), checking the
    /// same shape requirements as [`Mesh::uniform`].
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, Error> {
        let n = nodes.len();
        if n < Self::MIN_NODES {
            return Err(Error::InvalidMesh(format!(
                "need at least {} nodes, got {n}",
                Self::MIN_NODES
            )));
        }
        if n % 2 == 0 {
            return Err(Error::InvalidMesh("node count must be odd".into()));
        }
        let mid = (n - 1) / 2;
        if nodes[mid] != 0.0 {
            return Err(Error::InvalidMesh(format!(
                "center node must be exactly 0, got {}",
                nodes[mid]
            )));
        }
        // Span-based spacing is immune to the cancellation noise of a single
        // end gap, so generated meshes round-trip bitwise.
        let h = (nodes[n - 1] - nodes[0]) / (n - 1) as f64;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidMesh("nodes must be strictly increasing".into()));
        }
        let mut uniform = true;
        for i in 1..n {
            let gap = nodes[i] - nodes[i - 1];
            if !(gap > 0.0) {
                return Err(Error::InvalidMesh(format!(
                    "nodes must be strictly increasing (violated after node {})",
                    i - 1
                )));
            }
            if (gap - h).abs() > 1e-12 * (1.0 + nodes[i].abs()) {
                uniform = false;
            }
            if (nodes[n - 1 - i] + nodes[i]).abs() > 1e-12 * (1.0 + nodes[i].abs()) {
                return Err(Error::InvalidMesh("mesh must be symmetric about 0".into()));
            }
        }
        if !uniform {
            return Err(Error::InvalidMesh("mesh must be uniform".into()));
        }
        Ok(Self { nodes, h, uniform })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn half_length(&self) -> f64 {
        *self.nodes.last().expect("meshes are non-empty")
    }

    pub fn center_index(&self) -> usize {
        (self.nodes.len() - 1) / 2
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }
}

/// Second-order first derivative of nodal values on a uniform mesh: central
/// differences inside, one-sided three-point stencils at the ends.
pub fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3, "derivative stencils need at least 3 nodes");
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    out
}

/// Composite Simpson quadrature of nodal values on a uniform mesh.
/// Requires an odd node count (an even number of intervals).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd node count >= 3");
    let mut sum = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    sum * h / 3.0
}

/// Cubic Lagrange interpolation of uniform nodal data at `x`.
///
/// Uses the centered four-point stencil where available and one-sided cubic
/// stencils near the ends; `x` outside the node range clamps to the end value.
pub fn interp_cubic(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    let n = nodes.len();
    assert!(n >= 4, "cubic interpolation needs at least 4 nodes");
    assert_eq!(n, values.len());
    if x <= nodes[0] {
        return values[0];
    }
    if x >= nodes[n - 1] {
        return values[n - 1];
    }
    let h = nodes[1] - nodes[0];
    let k = (((x - nodes[0]) / h).floor() as usize).min(n - 2);
    let start = k.saturating_sub(1).min(n - 4);
    let t = (x - nodes[start]) / h;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut basis = 1.0;
        for m in 0..4 {
            if m != j {
                basis *= (t - m as f64) / (j as f64 - m as f64);
            }
        }
        acc += values[start + j] * basis;
    }
    acc
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y.iter()) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}
