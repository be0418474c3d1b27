//! The projective planes PG(2,q) for q in {2,3}, their incidence graphs,
//! polarities, and diagram automorphism groups.
//!
//! Points are normalized homogeneous triples over F_q (first nonzero
//! coordinate 1), ordered lexicographically; lines are the same triples
//! read as functionals. This fixed ordering is the canonical bijection to
//! {1, .., q^2+q+1} used everywhere else.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{PermGroup, Permutation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlaneError {
    #[error("unsupported plane order {0}")]
    UnsupportedOrder(u8),
    #[error("generator {0} is not a diagram automorphism")]
    NotAnAutomorphism(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectivePlane {
    pub q: u8,
    /// Normalized homogeneous point coordinates.
    pub points: Vec<[u8; 3]>,
    /// Normalized functional coordinates.
    pub lines: Vec<[u8; 3]>,
    /// incidence[p][l] = point p lies on line l.
    pub incidence: Vec<Vec<bool>>,
    #[serde(skip)]
    line_points: Vec<Vec<usize>>,
    #[serde(skip)]
    point_lines: Vec<Vec<usize>>,
    #[serde(skip)]
    line_through: Vec<Vec<usize>>,
}

impl ProjectivePlane {
    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn on_line(&self, p: usize, l: usize) -> bool {
        self.incidence[p][l]
    }

    pub fn points_of_line(&self, l: usize) -> &[usize] {
        &self.line_points[l]
    }

    pub fn lines_of_point(&self, p: usize) -> &[usize] {
        &self.point_lines[p]
    }

    /// The unique line through two distinct points.
    pub fn line_through(&self, p: usize, q: usize) -> usize {
        assert_ne!(p, q, "two distinct points are required");
        self.line_through[p][q]
    }

    /// The unique intersection point of two distinct lines.
    pub fn meet(&self, l: usize, m: usize) -> usize {
        assert_ne!(l, m);
        *self.line_points[l]
            .iter()
            .find(|p| self.incidence[**p][m])
            .expect("two distinct lines meet in a point")
    }
}

/// Canonical construction of PG(2,q) from F_q^3.
pub fn build_plane(q: u8) -> Result<ProjectivePlane, PlaneError> {
    if q != 2 && q != 3 {
        return Err(PlaneError::UnsupportedOrder(q));
    }
    let mut reps: Vec<[u8; 3]> = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let t = [a, b, c];
                if t == [0, 0, 0] {
                    continue;
                }
                if normalize(t, q) == t {
                    reps.push(t);
                }
            }
        }
    }
    reps.sort();
    let n = reps.len();
    debug_assert_eq!(n as u8, q * q + q + 1);

    let dot = |x: &[u8; 3], y: &[u8; 3]| -> u8 {
        ((x[0] as u16 * y[0] as u16 + x[1] as u16 * y[1] as u16 + x[2] as u16 * y[2] as u16)
            % q as u16) as u8
    };
    let incidence: Vec<Vec<bool>> = reps
        .iter()
        .map(|p| reps.iter().map(|l| dot(p, l) == 0).collect())
        .collect();
    let line_points: Vec<Vec<usize>> = (0..n)
        .map(|l| (0..n).filter(|&p| incidence[p][l]).collect())
        .collect();
    let point_lines: Vec<Vec<usize>> = (0..n)
        .map(|p| (0..n).filter(|&l| incidence[p][l]).collect())
        .collect();
    let mut line_through = vec![vec![usize::MAX; n]; n];
    for (l, pts) in line_points.iter().enumerate() {
        for &p in pts {
            for &r in pts {
                if p != r {
                    line_through[p][r] = l;
                }
            }
        }
    }
    Ok(ProjectivePlane {
        q,
        points: reps.clone(),
        lines: reps,
        incidence,
        line_points,
        point_lines,
        line_through,
    })
}

fn normalize(t: [u8; 3], q: u8) -> [u8; 3] {
    let first = t.iter().copied().find(|&x| x != 0).unwrap();
    // invert the leading coefficient mod q (q is 2 or 3)
    let inv = match (q, first) {
        (_, 1) => 1,
        (3, 2) => 2,
        _ => unreachable!("nonzero leading coefficient"),
    };
    [(t[0] * inv) % q, (t[1] * inv) % q, (t[2] * inv) % q]
}

/// An involutive, incidence-compatible bijection between points and lines.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polarity {
    pub point_to_line: Vec<usize>,
    pub line_to_point: Vec<usize>,
}

/// The orthogonality polarity of the identity form: a point maps to the
/// line with the same coordinates.
pub fn standard_polarity(plane: &ProjectivePlane) -> Polarity {
    let n = plane.size();
    let point_to_line: Vec<usize> = (0..n)
        .map(|p| {
            plane
                .lines
                .iter()
                .position(|l| *l == plane.points[p])
                .expect("point coordinates occur among the lines")
        })
        .collect();
    let mut line_to_point = vec![0usize; n];
    for (p, &l) in point_to_line.iter().enumerate() {
        line_to_point[l] = p;
    }
    let pol = Polarity {
        point_to_line,
        line_to_point,
    };
    debug_assert!(polarity_is_valid(plane, &pol));
    pol
}

fn polarity_is_valid(plane: &ProjectivePlane, pol: &Polarity) -> bool {
    let n = plane.size();
    (0..n).all(|p| pol.line_to_point[pol.point_to_line[p]] == p)
        && (0..n).all(|p| {
            (0..n).all(|l| {
                plane.on_line(p, l) == plane.on_line(pol.line_to_point[l], pol.point_to_line[p])
            })
        })
}

/// True iff no three of the given points are collinear.
pub fn general_position(plane: &ProjectivePlane, pts: &[usize]) -> bool {
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let l = plane.line_through(pts[i], pts[j]);
            for &r in &pts[j + 1..] {
                if plane.on_line(r, l) {
                    return false;
                }
            }
        }
    }
    true
}

/// A small node- and edge-labelled graph (at most 40 nodes). Node colours
/// are carried along for bipartite bookkeeping but are ignored by the
/// automorphism search, so projective dualities count as automorphisms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    /// Adjacency bitmasks.
    pub adj: Vec<u64>,
    /// 0 = no edge; equal labels = equal bond type.
    pub edge_labels: Vec<Vec<u32>>,
    /// Optional node colours (0 = point node, 1 = line node).
    pub colors: Vec<u8>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        assert!(n <= 40, "automorphism search is for small graphs");
        Graph {
            n,
            adj: vec![0; n],
            edge_labels: vec![vec![0; n]; n],
            colors: vec![0; n],
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: u32) {
        assert_ne!(u, v);
        assert_ne!(label, 0);
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        self.edge_labels[u][v] = label;
        self.edge_labels[v][u] = label;
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, u: usize) -> u32 {
        self.adj[u].count_ones()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// The bipartite point/line incidence graph; nodes 0..n are the points,
/// nodes n..2n the lines.
pub fn incidence_graph(plane: &ProjectivePlane) -> Graph {
    let n = plane.size();
    let mut g = Graph::new(2 * n);
    for l in 0..n {
        g.colors[n + l] = 1;
        for &p in plane.points_of_line(l) {
            g.add_edge(p, n + l, 1);
        }
    }
    g
}

/// Iterated neighbourhood refinement: nodes get invariant colours from
/// their degree and the multiset of (edge label, neighbour colour) pairs.
fn refine_colors(g: &Graph) -> Vec<u32> {
    let mut colors: Vec<u32> = (0..g.n).map(|u| g.degree(u)).collect();
    loop {
        let mut sigs: Vec<(u32, Vec<(u32, u32)>)> = Vec::with_capacity(g.n);
        for u in 0..g.n {
            let mut nb: Vec<(u32, u32)> = (0..g.n)
                .filter(|&v| g.has_edge(u, v))
                .map(|v| (g.edge_labels[u][v], colors[v]))
                .collect();
            nb.sort_unstable();
            sigs.push((colors[u], nb));
        }
        let mut sorted = sigs.clone();
        sorted.sort();
        sorted.dedup();
        let new: Vec<u32> = sigs
            .iter()
            .map(|s| sorted.binary_search(s).unwrap() as u32)
            .collect();
        if new == colors {
            return colors;
        }
        colors = new;
    }
}

/// All automorphisms of a small graph by backtracking with colour-blind
/// degree refinement, reduced to a generating set.
///
/// The full group order is available through [`PermGroup`].
pub fn graph_automorphism_group(g: &Graph) -> Vec<Permutation> {
    let all = all_automorphisms(g);
    let mut gens: Vec<Permutation> = Vec::new();
    let mut group = PermGroup::new(g.n, &[]);
    for a in &all {
        if !group.contains(a) {
            gens.push(a.clone());
            group.add_generator(a.clone());
        }
    }
    debug_assert_eq!(group.order(), all.len() as u128);
    gens
}

fn all_automorphisms(g: &Graph) -> Vec<Permutation> {
    let colors = refine_colors(g);
    let mut image = vec![usize::MAX; g.n];
    let mut used = vec![false; g.n];
    let mut found = Vec::new();
    backtrack(g, &colors, &mut image, &mut used, 0, &mut found);
    found.sort();
    found
}

fn backtrack(
    g: &Graph,
    colors: &[u32],
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    depth: usize,
    found: &mut Vec<Permutation>,
) {
    if depth == g.n {
        found.push(Permutation::from_images(image.clone()).expect("bijection by construction"));
        return;
    }
    // Most-constrained node next: prefer unmapped nodes with many mapped
    // neighbours, breaking ties by index. Mapping in a connected order
    // keeps the branching factor near 1.
    let u = (0..g.n)
        .filter(|&u| image[u] == usize::MAX)
        .max_by_key(|&u| {
            let mapped = (0..g.n)
                .filter(|&v| image[v] != usize::MAX && g.has_edge(u, v))
                .count();
            (mapped, std::cmp::Reverse(u))
        })
        .unwrap();
    'cand: for w in 0..g.n {
        if used[w] || colors[w] != colors[u] {
            continue;
        }
        for v in 0..g.n {
            if image[v] == usize::MAX {
                continue;
            }
            if g.edge_labels[u][v] != g.edge_labels[w][image[v]] {
                continue 'cand;
            }
        }
        image[u] = w;
        used[w] = true;
        backtrack(g, colors, image, used, depth + 1, found);
        image[u] = usize::MAX;
        used[w] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_counts_and_regularity() {
        for q in [2u8, 3] {
            let n = (q * q + q + 1) as usize;
            let plane = build_plane(q).unwrap();
            assert_eq!(plane.points.len(), n);
            assert_eq!(plane.lines.len(), n);
            for l in 0..n {
                assert_eq!(plane.points_of_line(l).len(), (q + 1) as usize);
            }
            for p in 0..n {
                assert_eq!(plane.lines_of_point(p).len(), (q + 1) as usize);
            }
            // any two distinct points lie on exactly one common line
            for p in 0..n {
                for r in (p + 1)..n {
                    let common = (0..n)
                        .filter(|&l| plane.on_line(p, l) && plane.on_line(r, l))
                        .count();
                    assert_eq!(common, 1);
                }
            }
        }
    }

    #[test]
    fn unsupported_order_is_an_error() {
        assert_eq!(
            build_plane(4).err(),
            Some(PlaneError::UnsupportedOrder(4))
        );
    }

    #[test]
    fn polarity_is_involutive_and_compatible() {
        for q in [2u8, 3] {
            let plane = build_plane(q).unwrap();
            let pol = standard_polarity(&plane);
            let n = plane.size();
            for p in 0..n {
                assert_eq!(pol.line_to_point[pol.point_to_line[p]], p);
            }
            for p in 0..n {
                for l in 0..n {
                    assert_eq!(
                        plane.on_line(p, l),
                        plane.on_line(pol.line_to_point[l], pol.point_to_line[p])
                    );
                }
            }
        }
    }

    #[test]
    fn polarity_is_a_colour_swapping_graph_automorphism() {
        let plane = build_plane(2).unwrap();
        let g = incidence_graph(&plane);
        let pol = standard_polarity(&plane);
        let n = plane.size();
        let mut img = vec![0usize; 2 * n];
        for p in 0..n {
            img[p] = n + pol.point_to_line[p];
            img[n + p] = pol.line_to_point[p];
        }
        let perm = Permutation::from_images(img).unwrap();
        for (u, v) in g.edges() {
            assert!(g.has_edge(perm.apply(u), perm.apply(v)));
        }
        assert_ne!(g.colors[0], g.colors[perm.apply(0)]);
    }

    #[test]
    fn general_position_counts() {
        let plane = build_plane(3).unwrap();
        // collinear triples fail
        let l0 = plane.points_of_line(0).to_vec();
        assert!(!general_position(&plane, &l0[..3]));
        // two points never fail
        assert!(general_position(&plane, &[0, 5]));
        // count quadruples in general position, cross-checked against an
        // independent F_3 determinant-rank oracle
        let n = plane.size();
        let mut count = 0usize;
        let mut oracle = 0usize;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        if general_position(&plane, &[a, b, c, d]) {
                            count += 1;
                        }
                        if all_triples_independent(&plane, &[a, b, c, d]) {
                            oracle += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(count, oracle);
        assert_eq!(count, 234);
    }

    /// F_3 determinant oracle: a triple is collinear iff its coordinate
    /// matrix is singular mod 3.
    fn all_triples_independent(plane: &ProjectivePlane, pts: &[usize]) -> bool {
        let det3 = |x: &[u8; 3], y: &[u8; 3], z: &[u8; 3]| -> u8 {
            let x = x.map(|v| v as i32);
            let y = y.map(|v| v as i32);
            let z = z.map(|v| v as i32);
            let d = x[0] * (y[1] * z[2] - y[2] * z[1]) - x[1] * (y[0] * z[2] - y[2] * z[0])
                + x[2] * (y[0] * z[1] - y[1] * z[0]);
            (d.rem_euclid(3)) as u8
        };
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                for k in (j + 1)..pts.len() {
                    if det3(
                        &plane.points[pts[i]],
                        &plane.points[pts[j]],
                        &plane.points[pts[k]],
                    ) == 0
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn fano_incidence_graph_automorphisms() {
        let plane = build_plane(2).unwrap();
        let g = incidence_graph(&plane);
        let gens = graph_automorphism_group(&g);
        let group = PermGroup::new(g.n, &gens);
        assert_eq!(group.order(), 336);

        // colour preserving subgroup has index 2 and order 168, and acts
        // transitively on each colour class
        let elements = group.elements();
        let preserving: Vec<_> = elements
            .iter()
            .filter(|e| (0..g.n).all(|u| g.colors[e.apply(u)] == g.colors[u]))
            .collect();
        assert_eq!(preserving.len(), 168);
        let mut point_orbit = std::collections::HashSet::new();
        for e in &preserving {
            point_orbit.insert(e.apply(0));
        }
        assert_eq!(point_orbit.len(), 7);
    }

    #[test]
    fn order_three_incidence_graph_automorphisms() {
        let plane = build_plane(3).unwrap();
        let g = incidence_graph(&plane);
        let gens = graph_automorphism_group(&g);
        let group = PermGroup::new(g.n, &gens);
        assert_eq!(group.order(), 11232);
        let elements = group.elements();
        assert_eq!(elements.len(), 11232);
        let preserving = elements
            .iter()
            .filter(|e| (0..g.n).all(|u| g.colors[e.apply(u)] == g.colors[u]))
            .count();
        assert_eq!(preserving, 5616);
        // vertex transitivity: the full group joins the colour classes
        let mut orbit = std::collections::HashSet::new();
        for e in &elements {
            orbit.insert(e.apply(0));
        }
        assert_eq!(orbit.len(), 26);
    }

    #[test]
    fn edge_labels_constrain_automorphisms() {
        // a triangle with one distinguished edge keeps only the swap that
        // fixes that edge
        let mut g = Graph::new(3);
        g.add_edge(0, 1, 1);
        g.add_edge(1, 2, 1);
        g.add_edge(0, 2, 2);
        let gens = graph_automorphism_group(&g);
        let group = PermGroup::new(3, &gens);
        assert_eq!(group.order(), 2);
    }
}
