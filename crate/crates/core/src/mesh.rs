//! Conforming simplicial meshes of the interval/rectangle/prism specimen
//! domains, with boundary facets tagged by the experiment roles.
//!
//! Conventions: the vertical axis is the last coordinate; the specimen
//! occupies `[-L/2, L/2]^(d-1) x [0, H]`. `Bottom` is the base in contact
//! with the solution, `Top` the face exposed to air, `Lateral` the sealed
//! sides.

use std::collections::HashMap;

use crate::error::SimError;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    Bottom,
    Top,
    Lateral,
}

/// Simplicial mesh (segments / triangles / tetrahedra) with tagged boundary
/// facets. Immutable once built.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub dim: usize,
    /// Node coordinates, zero-padded to three components.
    pub nodes: Vec<[f64; 3]>,
    /// Element connectivity, flattened with stride `dim + 1`.
    pub elements: Vec<usize>,
    /// Boundary facet connectivity, flattened with stride `dim`
    /// (a facet of a segment is a single node).
    pub boundary_facets: Vec<usize>,
    pub facet_tags: Vec<BoundaryTag>,
    /// Length/area/volume per element, all positive.
    pub element_measures: Vec<f64>,
    /// Per boundary facet; a point facet has measure 1.
    pub facet_measures: Vec<f64>,
}

impl Mesh {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len() / (self.dim + 1)
    }

    pub fn num_facets(&self) -> usize {
        self.facet_tags.len()
    }

    pub fn element(&self, e: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.elements[e * k..(e + 1) * k]
    }

    pub fn facet(&self, f: usize) -> &[usize] {
        &self.boundary_facets[f * self.dim..(f + 1) * self.dim]
    }

    /// Total measure of the domain.
    pub fn volume(&self) -> f64 {
        self.element_measures.iter().sum()
    }

    /// Mask of nodes lying on facets with the given tag.
    pub fn boundary_node_mask(&self, tag: BoundaryTag) -> Vec<bool> {
        let mut mask = vec![false; self.num_nodes()];
        for f in 0..self.num_facets() {
            if self.facet_tags[f] == tag {
                for &node in self.facet(f) {
                    mask[node] = true;
                }
            }
        }
        mask
    }

    /// Sorted node indices on facets with the given tag.
    pub fn boundary_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        self.boundary_node_mask(tag)
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect()
    }
}

/// Per-element constant gradients of the barycentric basis functions.
#[derive(Debug, Clone)]
pub struct P1Basis {
    /// Stride `dim + 1` per element; each gradient zero-padded to 3D.
    pub gradients: Vec<[f64; 3]>,
}

impl P1Basis {
    pub fn element(&self, mesh: &Mesh, e: usize) -> &[[f64; 3]] {
        let k = mesh.dim + 1;
        &self.gradients[e * k..(e + 1) * k]
    }
}

/// Uniform mesh of `[0, H]` with `nx` segments.
pub fn build_interval(height: f64, nx: usize) -> Result<Mesh> {
    if nx < 1 || height <= 0.0 {
        return Err(SimError::Mesh(format!(
            "interval needs height > 0 and nx >= 1, got H={height}, nx={nx}"
        )));
    }
    let dx = height / nx as f64;
    let nodes: Vec<[f64; 3]> = (0..=nx).map(|j| [j as f64 * dx, 0.0, 0.0]).collect();
    let mut elements = Vec::with_capacity(2 * nx);
    let mut measures = Vec::with_capacity(nx);
    for e in 0..nx {
        elements.push(e);
        elements.push(e + 1);
        measures.push(nodes[e + 1][0] - nodes[e][0]);
    }
    Ok(Mesh {
        dim: 1,
        nodes,
        elements,
        boundary_facets: vec![0, nx],
        facet_tags: vec![BoundaryTag::Bottom, BoundaryTag::Top],
        element_measures: measures,
        facet_measures: vec![1.0, 1.0],
    })
}

fn integral_cells(len: f64, h: f64, what: &str) -> Result<usize> {
    if len <= 0.0 || h <= 0.0 {
        return Err(SimError::Mesh(format!(
            "{what}: extent and spacing must be positive ({len}, {h})"
        )));
    }
    let ratio = len / h;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(SimError::Mesh(format!(
            "{what}: spacing {h} does not divide extent {len}"
        )));
    }
    Ok(n as usize)
}

/// Structured triangulation of the strip `[-L/2, L/2] x [0, H]`.
///
/// Cell diagonals alternate with the column index so that every interior
/// vertical node line is a mirror plane of the triangulation. On such a
/// mesh, laterally uniform nodal data reproduce the 1D discrete problem
/// exactly (boundary-column rows are half the interior-column rows), which
/// a single uniform diagonal direction does not achieve.
pub fn build_strip(length: f64, height: f64, hx: f64, hz: f64) -> Result<Mesh> {
    build_strip_pattern(length, height, hx, hz, false)
}

/// `uniform_diagonals = true` splits every cell along the same diagonal;
/// kept for comparison runs and tests.
pub(crate) fn build_strip_pattern(
    length: f64,
    height: f64,
    hx: f64,
    hz: f64,
    uniform_diagonals: bool,
) -> Result<Mesh> {
    let nx = integral_cells(length, hx, "strip x")?;
    let nz = integral_cells(height, hz, "strip z")?;
    let cols = nx + 1;
    let mut nodes = Vec::with_capacity(cols * (nz + 1));
    for j in 0..=nz {
        for i in 0..=nx {
            nodes.push([-length / 2.0 + i as f64 * hx, j as f64 * hz, 0.0]);
        }
    }
    let idx = |i: usize, j: usize| j * cols + i;
    let mut elements = Vec::with_capacity(6 * nx * nz);
    for j in 0..nz {
        for i in 0..nx {
            let p00 = idx(i, j);
            let p10 = idx(i + 1, j);
            let p01 = idx(i, j + 1);
            let p11 = idx(i + 1, j + 1);
            if uniform_diagonals || i % 2 == 0 {
                // diagonal p00 -> p11
                elements.extend_from_slice(&[p00, p10, p11]);
                elements.extend_from_slice(&[p00, p11, p01]);
            } else {
                // mirrored: diagonal p10 -> p01
                elements.extend_from_slice(&[p00, p10, p01]);
                elements.extend_from_slice(&[p10, p11, p01]);
            }
        }
    }
    finish_mesh(2, nodes, elements, height)
}

/// Structured tetrahedralization of the prism `[-L/2, L/2]^2 x [0, H]`.
///
/// Each cube is split into six tetrahedra sharing the main diagonal
/// (Kuhn/Freudenthal subdivision), which is face-consistent across cubes
/// without alternation.
pub fn build_prism(length: f64, height: f64, h: f64) -> Result<Mesh> {
    let nx = integral_cells(length, h, "prism x")?;
    let nz = integral_cells(height, h, "prism z")?;
    let ny = nx;
    let cols = nx + 1;
    let rows = ny + 1;
    let mut nodes = Vec::with_capacity(cols * rows * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([
                    -length / 2.0 + i as f64 * h,
                    -length / 2.0 + j as f64 * h,
                    k as f64 * h,
                ]);
            }
        }
    }
    let idx = |i: usize, j: usize, k: usize| (k * rows + j) * cols + i;
    // Vertex chains 0 -> e_p0 -> e_p0+e_p1 -> (1,1,1) for the six axis
    // permutations; odd permutations get two vertices swapped to keep the
    // orientation positive.
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    let mut elements = Vec::with_capacity(24 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for (perm, even) in PERMS {
                    let mut off = [0usize; 3];
                    let mut corners = [[0usize; 3]; 4];
                    corners[0] = off;
                    off[perm[0]] += 1;
                    corners[1] = off;
                    off[perm[1]] += 1;
                    corners[2] = off;
                    corners[3] = [1, 1, 1];
                    if !even {
                        corners.swap(1, 2);
                    }
                    for c in corners {
                        elements.push(idx(i + c[0], j + c[1], k + c[2]));
                    }
                }
            }
        }
    }
    finish_mesh(3, nodes, elements, height)
}

/// Computes measures, extracts the boundary and tags it.
fn finish_mesh(dim: usize, nodes: Vec<[f64; 3]>, elements: Vec<usize>, height: f64) -> Result<Mesh> {
    let k = dim + 1;
    let num_elements = elements.len() / k;
    let mut measures = Vec::with_capacity(num_elements);
    for e in 0..num_elements {
        let verts = &elements[e * k..(e + 1) * k];
        let m = simplex_measure(dim, verts, &nodes);
        if m <= 0.0 {
            return Err(SimError::Mesh(format!(
                "element {e} has non-positive measure {m}"
            )));
        }
        measures.push(m);
    }

    // Facets appearing in exactly one element form the boundary. Two passes
    // keep the emitted facet order deterministic.
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for e in 0..num_elements {
        let verts = &elements[e * k..(e + 1) * k];
        for skip in 0..k {
            let mut key: Vec<usize> = verts
                .iter()
                .enumerate()
                .filter_map(|(i, &v)| (i != skip).then_some(v))
                .collect();
            key.sort_unstable();
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    if counts.values().any(|&c| c > 2) {
        return Err(SimError::Mesh("non-conforming mesh: facet shared by more than two elements".into()));
    }

    let ztol = 1e-9 * height.max(1.0);
    let mut boundary_facets = Vec::new();
    let mut facet_tags = Vec::new();
    let mut facet_measures = Vec::new();
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    for e in 0..num_elements {
        let verts = &elements[e * k..(e + 1) * k];
        for skip in 0..k {
            let facet: Vec<usize> = verts
                .iter()
                .enumerate()
                .filter_map(|(i, &v)| (i != skip).then_some(v))
                .collect();
            let mut key = facet.clone();
            key.sort_unstable();
            if counts[&key] != 1 || seen.contains_key(&key) {
                continue;
            }
            seen.insert(key, ());
            let zc = dim - 1;
            let tag = if facet.iter().all(|&n| nodes[n][zc].abs() <= ztol) {
                BoundaryTag::Bottom
            } else if facet.iter().all(|&n| (nodes[n][zc] - height).abs() <= ztol) {
                BoundaryTag::Top
            } else {
                BoundaryTag::Lateral
            };
            facet_measures.push(facet_measure(dim, &facet, &nodes));
            boundary_facets.extend_from_slice(&facet);
            facet_tags.push(tag);
        }
    }

    Ok(Mesh {
        dim,
        nodes,
        elements,
        boundary_facets,
        facet_tags,
        element_measures: measures,
        facet_measures,
    })
}

fn simplex_measure(dim: usize, verts: &[usize], nodes: &[[f64; 3]]) -> f64 {
    match dim {
        1 => nodes[verts[1]][0] - nodes[verts[0]][0],
        2 => {
            let a = nodes[verts[0]];
            let b = nodes[verts[1]];
            let c = nodes[verts[2]];
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        }
        3 => {
            let a = nodes[verts[0]];
            let mut m = [[0.0; 3]; 3];
            for (r, &v) in verts[1..].iter().enumerate() {
                for c in 0..3 {
                    m[r][c] = nodes[v][c] - a[c];
                }
            }
            det3(&m) / 6.0
        }
        _ => unreachable!("dim  must be 1..=3"),
    }
}

fn facet_measure(dim: usize, facet: &[usize], nodes: &[[f64; 3]]) -> f64 {
    match dim {
        1 => 1.0,
        2 => {
            let a = nodes[facet[0]];
            let b = nodes[facet[1]];
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
        }
        3 => {
            let a = nodes[facet[0]];
            let b = nodes[facet[1]];
            let c = nodes[facet[2]];
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let w = [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
            0.5 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt()
        }
        _ => unreachable!(),
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Per-element constant gradients of the P1 basis through the affine-map
/// inverse; the gradient of the first barycentric function is minus the sum
/// of the others.
pub fn p1_gradients(mesh: &Mesh) -> Result<P1Basis> {
    let d = mesh.dim;
    let k = d + 1;
    let mut gradients = Vec::with_capacity(mesh.num_elements() * k);
    for e in 0..mesh.num_elements() {
        let verts = mesh.element(e);
        let a = mesh.nodes[verts[0]];
        // Jacobian columns are the edge vectors from the first vertex.
        let mut jac = [[0.0; 3]; 3];
        for c in 0..d {
            for r in 0..d {
                jac[r][c] = mesh.nodes[verts[c + 1]][r] - a[r];
            }
        }
        let inv = invert(d, &jac).ok_or_else(|| {
            SimError::Mesh(format!("degenerate element {e}: singular affine map"))
        })?;
        // Rows of J^{-1} are the gradients of barycentric functions 1..d.
        let mut grad0 = [0.0; 3];
        let base = gradients.len();
        gradients.push([0.0; 3]); // placeholder for grad0
        for i in 0..d {
            let mut g = [0.0; 3];
            for c in 0..d {
                g[c] = inv[i][c];
                grad0[c] -= inv[i][c];
            }
            gradients.push(g);
        }
        gradients[base] = grad0;
    }
    Ok(P1Basis { gradients })
}

fn invert(d: usize, m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut inv = [[0.0; 3]; 3];
    match d {
        1 => {
            if m[0][0] == 0.0 {
                return None;
            }
            inv[0][0] = 1.0 / m[0][0];
        }
        2 => {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det == 0.0 {
                return None;
            }
            inv[0][0] = m[1][1] / det;
            inv[0][1] = -m[0][1] / det;
            inv[1][0] = -m[1][0] / det;
            inv[1][1] = m[0][0] / det;
        }
        3 => {
            let det = det3(m);
            if det == 0.0 {
                return None;
            }
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                    let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                    // adjugate transpose
                    inv[j][i] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
                }
            }
        }
        _ => unreachable!(),
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interval_basics() {
        let m = build_interval(1.0, 2).unwrap();
        assert_eq!(m.num_nodes(), 3);
        assert_eq!(m.nodes[1][0], 0.5);
        assert_eq!(m.nodes[2][0], 1.0);
        assert_eq!(m.boundary_nodes(BoundaryTag::Bottom), vec![0]);
        assert_eq!(m.boundary_nodes(BoundaryTag::Top), vec![2]);
        assert_relative_eq!(m.volume(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn interval_bar_spacing() {
        let m = build_interval(5.85, 39).unwrap();
        assert_relative_eq!(m.element_measures[0], 0.15, max_relative = 1e-12);
        assert_relative_eq!(m.volume(), 5.85, max_relative = 1e-12);
    }

    #[test]
    fn strip_counts_and_area() {
        let m = build_strip(0.15, 5.85, 0.075, 0.15).unwrap();
        assert_eq!(m.num_elements(), 156);
        assert_eq!(m.num_nodes(), 3 * 40);
        assert_relative_eq!(m.volume(), 0.15 * 5.85, max_relative = 1e-12);
        // Boundary length: two bases of width L, two sides of height H.
        let boundary: f64 = m.facet_measures.iter().sum();
        assert_relative_eq!(boundary, 2.0 * 0.15 + 2.0 * 5.85, max_relative = 1e-10);
        for f in 0..m.num_facets() {
            if m.facet_tags[f] == BoundaryTag::Lateral {
                for &n in m.facet(f) {
                    assert_relative_eq!(m.nodes[n][0].abs(), 0.075, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn strip_rejects_non_integral_spacing() {
        assert!(build_strip(0.15, 5.85, 0.07, 0.15).is_err());
    }

    #[test]
    fn prism_counts_volume_and_conformity() {
        let m = build_prism(0.3, 0.75, 0.075).unwrap();
        // Structured count (L/h + 1)^2 * (H/h + 1).
        assert_eq!(m.num_nodes(), 5 * 5 * 11);
        assert_eq!(m.num_elements(), 6 * 4 * 4 * 10);
        assert_relative_eq!(m.volume(), 0.3 * 0.3 * 0.75, max_relative = 1e-12);
        let boundary: f64 = m.facet_measures.iter().sum();
        assert_relative_eq!(
            boundary,
            2.0 * 0.3 * 0.3 + 4.0 * 0.3 * 0.75,
            max_relative = 1e-10
        );
        // Conformity: every interior facet shared by exactly two elements.
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for e in 0..m.num_elements() {
            let verts = m.element(e);
            for skip in 0..4 {
                let mut key: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &v)| (i != skip).then_some(v))
                    .collect();
                key.sort_unstable();
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        assert!(counts.values().all(|&c| c == 1 || c == 2));
        assert_eq!(
            counts.values().filter(|&&c| c == 1).count(),
            m.num_facets()
        );
    }

    #[test]
    fn prism_fine_node_count() {
        let m = build_prism(0.3, 0.75, 1.875e-2).unwrap();
        assert_eq!(m.num_nodes(), 17 * 17 * 41);
        assert_eq!(m.num_nodes(), 11_849);
    }

    #[test]
    fn tag_completeness() {
        let m = build_strip(0.2, 0.4, 0.1, 0.1).unwrap();
        let mut bottom = 0.0;
        let mut top = 0.0;
        let mut lateral = 0.0;
        for f in 0..m.num_facets() {
            match m.facet_tags[f] {
                BoundaryTag::Bottom => bottom += m.facet_measures[f],
                BoundaryTag::Top => top += m.facet_measures[f],
                BoundaryTag::Lateral => lateral += m.facet_measures[f],
            }
        }
        assert_relative_eq!(bottom, 0.2, max_relative = 1e-12);
        assert_relative_eq!(top, 0.2, max_relative = 1e-12);
        assert_relative_eq!(lateral, 0.8, max_relative = 1e-12);
    }

    #[test]
    fn gradients_on_reference_elements() {
        let seg = build_interval(1.0, 1).unwrap();
        let basis = p1_gradients(&seg).unwrap();
        assert_eq!(basis.element(&seg, 0)[0][0], -1.0);
        assert_eq!(basis.element(&seg, 0)[1][0], 1.0);

        // Reference triangle (0,0), (1,0), (0,1).
        let tri = Mesh {
            dim: 2,
            nodes: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            elements: vec![0, 1, 2],
            boundary_facets: vec![],
            facet_tags: vec![],
            element_measures: vec![0.5],
            facet_measures: vec![],
        };
        let basis = p1_gradients(&tri).unwrap();
        let g = basis.element(&tri, 0);
        assert_eq!(g[0][..2], [-1.0, -1.0]);
        assert_eq!(g[1][..2], [1.0, 0.0]);
        assert_eq!(g[2][..2], [0.0, 1.0]);
    }

    #[test]
    fn gradients_sum_to_zero_and_reproduce_linears() {
        let m = build_prism(0.2, 0.3, 0.1).unwrap();
        let basis = p1_gradients(&m).unwrap();
        let coeff = [0.7, -1.3, 2.1];
        let field: Vec<f64> = m
            .nodes
            .iter()
            .map(|x| 0.5 + coeff[0] * x[0] + coeff[1] * x[1] + coeff[2] * x[2])
            .collect();
        for e in 0..m.num_elements() {
            let g = basis.element(&m, e);
            let mut sum = [0.0; 3];
            let mut grad = [0.0; 3];
            for (local, &node) in m.element(e).iter().enumerate() {
                for c in 0..3 {
                    sum[c] += g[local][c];
                    grad[c] += field[node] * g[local][c];
                }
            }
            for c in 0..3 {
                assert!(sum[c].abs() <= 1e-12, "gradient sum {c} = {}", sum[c]);
                assert_relative_eq!(grad[c], coeff[c], max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kuhn_tets_have_equal_volume() {
        let m = build_prism(0.1, 0.1, 0.05).unwrap();
        let expected = 0.05f64.powi(3) / 6.0;
        for &v in &m.element_measures {
            assert_relative_eq!(v, expected, max_relative = 1e-12);
        }
    }
}
