//! The chambers P attached to the incidence diagrams of PG(2,2) and
//! PG(2,3), their complete vertex catalogs, the closed-form catalog
//! families, projective duality as an exact integer matrix, and the
//! n = 7 wall-value table.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxdiag::{classify, enum_max_elliptic, enum_max_parabolic, DiagramKind, GramDiagram};
use crate::lorentz::{inner, intmat, solve_primitive_kernel, LatticeVector, LorentzError};
use crate::projplane::{build_plane, general_position, Polarity, ProjectivePlane};

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("chamber dimension must be 7 or 13, got {0}")]
    UnsupportedDimension(usize),
    #[error("gram relation violated between walls {0} and {1}")]
    GramRelation(usize, usize),
    #[error("duality matrix does not satisfy A^t J A = q J")]
    DualityRelation,
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
    #[error(transparent)]
    Cox(#[from] crate::coxdiag::CoxError),
    #[error(transparent)]
    Plane(#[from] crate::projplane::PlaneError),
}

/// The chamber P in Z^(n,1) cut out by the 2(q^2+q+1) walls e_p (norm 1)
/// and e_l = e_0 - sum_{p in l} e_p (norm q).
#[derive(Clone, Debug)]
pub struct ChamberP {
    pub n: usize,
    pub plane: ProjectivePlane,
    /// Walls in node order: points first, then lines.
    pub walls: Vec<LatticeVector>,
    pub diagram: GramDiagram,
}

impl ChamberP {
    pub fn node_count(&self) -> usize {
        self.walls.len()
    }

    pub fn point_wall(&self, p: usize) -> &LatticeVector {
        &self.walls[p]
    }

    pub fn line_wall(&self, l: usize) -> &LatticeVector {
        &self.walls[self.plane.size() + l]
    }
}

pub fn build_chamber(n: usize) -> Result<ChamberP, PolytopeError> {
    let q = match n {
        7 => 2u8,
        13 => 3u8,
        _ => return Err(PolytopeError::UnsupportedDimension(n)),
    };
    let plane = build_plane(q)?;
    let sz = plane.size();
    let mut walls = Vec::with_capacity(2 * sz);
    for p in 0..sz {
        walls.push(LatticeVector::basis(n, p + 1));
    }
    for l in 0..sz {
        let mut coords = vec![BigInt::zero(); n + 1];
        coords[0] = BigInt::from(1);
        for &p in plane.points_of_line(l) {
            coords[p + 1] = BigInt::from(-1);
        }
        walls.push(LatticeVector::new(coords));
    }
    // verify the stated Gram relations
    for i in 0..2 * sz {
        for j in 0..2 * sz {
            let g = inner(&walls[i], &walls[j]);
            let expected: i64 = match (i < sz, j < sz) {
                (true, true) => i64::from(i == j),
                (false, false) => {
                    if i == j {
                        q as i64
                    } else {
                        0
                    }
                }
                (true, false) => -i64::from(plane.on_line(i, j - sz)),
                (false, true) => -i64::from(plane.on_line(j, i - sz)),
            };
            if g != BigInt::from(expected) {
                return Err(PolytopeError::GramRelation(i, j));
            }
        }
    }
    let diagram = GramDiagram::from_roots(n + 1, walls.clone())?;
    Ok(ChamberP {
        n,
        plane,
        walls,
        diagram,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexStatus {
    Actual,
    Ideal,
}

/// A vertex of the hyperbolic polytope: the node subset it is orthogonal
/// to, its primitive representative, and the subdiagram type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCertificate {
    pub subset: Vec<usize>,
    pub vertex: LatticeVector,
    pub status: VertexStatus,
    pub type_label: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VertexCatalog {
    pub certificates: Vec<VertexCertificate>,
    /// Candidate subsets that were discarded (kernel not a line or a wall
    /// inequality violated). Expected to stay empty.
    pub anomalies: Vec<String>,
}

impl VertexCatalog {
    pub fn actual(&self) -> impl Iterator<Item = &VertexCertificate> {
        self.certificates
            .iter()
            .filter(|c| c.status == VertexStatus::Actual)
    }

    pub fn ideal(&self) -> impl Iterator<Item = &VertexCertificate> {
        self.certificates
            .iter()
            .filter(|c| c.status == VertexStatus::Ideal)
    }

    pub fn count_by_type(&self, status: VertexStatus) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.certificates {
            if c.status == status {
                *out.entry(c.type_label.clone()).or_default() += 1;
            }
        }
        out
    }
}

/// The complete, de-duplicated vertex catalog: one certificate per maximal
/// elliptic subset (actual) and per maximal parabolic subset (ideal).
pub fn all_vertices(ch: &ChamberP, threads: usize) -> Result<VertexCatalog, PolytopeError> {
    let mut catalog = VertexCatalog::default();
    let elliptic = enum_max_elliptic(&ch.diagram, ch.n, threads)?;
    let parabolic = enum_max_parabolic(&ch.diagram, ch.n - 1);
    for (subsets, status) in [
        (elliptic, VertexStatus::Actual),
        (parabolic, VertexStatus::Ideal),
    ] {
        for subset in subsets {
            let rows: Vec<LatticeVector> =
                subset.iter().map(|&i| ch.walls[i].clone()).collect();
            let vertex = match solve_primitive_kernel(&rows, ch.n) {
                Ok(v) => v,
                Err(e) => {
                    catalog
                        .anomalies
                        .push(format!("subset {subset:?}: kernel solve failed: {e}"));
                    continue;
                }
            };
            if ch
                .walls
                .iter()
                .any(|w| inner(&vertex, w) > BigInt::zero())
            {
                catalog
                    .anomalies
                    .push(format!("subset {subset:?}: wall inequality violated"));
                continue;
            }
            let norm = vertex.norm();
            let norm_ok = match status {
                VertexStatus::Actual => norm < BigInt::zero(),
                VertexStatus::Ideal => norm.is_zero(),
            };
            if !norm_ok {
                catalog
                    .anomalies
                    .push(format!("subset {subset:?}: unexpected norm {norm}"));
                continue;
            }
            let type_label = classify(&ch.diagram, &subset).type_string();
            catalog.certificates.push(VertexCertificate {
                subset,
                vertex,
                status,
                type_label,
            });
        }
    }
    Ok(catalog)
}

/// A closed-form catalog family: every member rendered as a primitive
/// integer vector (the catalog's 1/sqrt(q) scalings are dropped).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogFamily {
    /// "typelabel/point" or "typelabel/line".
    pub family: String,
    pub status: VertexStatus,
    pub members: Vec<LatticeVector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: String,
    pub generated: usize,
    pub matched: usize,
    pub unmatched_formula: Vec<LatticeVector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchReport {
    pub families: Vec<FamilyReport>,
    /// Computed vertices not claimed by any family.
    pub unmatched_computed: Vec<LatticeVector>,
    /// Computed vertices claimed by more than one family.
    pub multiply_matched: Vec<LatticeVector>,
    pub fully_matched: bool,
}

pub struct MatchOutcome {
    pub report: MatchReport,
    /// family id per computed vertex vector
    pub family_of: HashMap<LatticeVector, String>,
}

fn vector(n: usize, coeffs: &[(usize, i64)]) -> LatticeVector {
    let mut coords = vec![BigInt::zero(); n + 1];
    for &(i, c) in coeffs {
        coords[i] += BigInt::from(c);
    }
    LatticeVector::new(coords)
}

/// The closed-form families for n = 7.
pub fn catalog_families_n7(plane: &ProjectivePlane) -> Vec<CatalogFamily> {
    let sz = plane.size();
    let all: Vec<usize> = (0..sz).collect();
    let mut families = Vec::new();

    // 7A1: e_0 and the primitive representative of the all-lines vertex
    families.push(CatalogFamily {
        family: "7A1/point".into(),
        status: VertexStatus::Actual,
        members: vec![vector(7, &[(0, 1)])],
    });
    let mut weyl = vec![(0usize, 3i64)];
    weyl.extend(all.iter().map(|&p| (p + 1, -1)));
    families.push(CatalogFamily {
        family: "7A1/line".into(),
        status: VertexStatus::Actual,
        members: vec![vector(7, &weyl)],
    });

    // A1+3A2, point side: 2e_0 - sum_{q not in l, q != p} e_q for p not on l
    let mut point_members = Vec::new();
    let mut line_members = Vec::new();
    for l in 0..sz {
        for p in 0..sz {
            if plane.on_line(p, l) {
                continue;
            }
            let mut c = vec![(0usize, 2i64)];
            for q in 0..sz {
                if q != p && !plane.on_line(q, l) {
                    c.push((q + 1, -1));
                }
            }
            point_members.push(vector(7, &c));
            // dual: 3e_0 - 2e_p - sum_{q in l} e_q
            let mut c = vec![(0usize, 3i64), (p + 1, -2)];
            for &q in plane.points_of_line(l) {
                c.push((q + 1, -1));
            }
            line_members.push(vector(7, &c));
        }
    }
    families.push(CatalogFamily {
        family: "A1+3A2/point".into(),
        status: VertexStatus::Actual,
        members: point_members,
    });
    families.push(CatalogFamily {
        family: "A1+3A2/line".into(),
        status: VertexStatus::Actual,
        members: line_members,
    });

    // ideal: e_0 - e_p and 2e_0 - sum_{p not on l} e_p
    families.push(CatalogFamily {
        family: "3A3/point".into(),
        status: VertexStatus::Ideal,
        members: (0..sz)
            .map(|p| vector(7, &[(0, 1), (p + 1, -1)]))
            .collect(),
    });
    families.push(CatalogFamily {
        family: "3A3/line".into(),
        status: VertexStatus::Ideal,
        members: (0..sz)
            .map(|l| {
                let mut c = vec![(0usize, 2i64)];
                for p in 0..sz {
                    if !plane.on_line(p, l) {
                        c.push((p + 1, -1));
                    }
                }
                vector(7, &c)
            })
            .collect(),
    });
    families
}

/// The closed-form families for n = 13.
///
/// The parameterizations are not injective for the quadruple-pair
/// families (three parameter choices give the same vector), so members
/// are de-duplicated; the match report compares distinct vectors.
pub fn catalog_families_n13(plane: &ProjectivePlane) -> Vec<CatalogFamily> {
    let sz = plane.size();
    let mut families: Vec<CatalogFamily> = Vec::new();
    let mut push = |family: &str, status: VertexStatus, members: Vec<LatticeVector>| {
        let mut dedup: Vec<LatticeVector> = members;
        dedup.sort();
        dedup.dedup();
        families.push(CatalogFamily {
            family: family.into(),
            status,
            members: dedup,
        });
    };

    // helpers on the plane
    let quad_general: Vec<[usize; 4]> = {
        let mut out = Vec::new();
        for a in 0..sz {
            for b in (a + 1)..sz {
                for c in (b + 1)..sz {
                    for d in (c + 1)..sz {
                        if general_position(plane, &[a, b, c, d]) {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        out
    };
    // quadruples of lines, no three concurrent
    let line_quads: Vec<[usize; 4]> = {
        let mut out = Vec::new();
        for a in 0..sz {
            for b in (a + 1)..sz {
                for c in (b + 1)..sz {
                    for d in (c + 1)..sz {
                        let quad = [a, b, c, d];
                        let mut ok = true;
                        'chk: for i in 0..4 {
                            for j in (i + 1)..4 {
                                for k in (j + 1)..4 {
                                    if plane.meet(quad[i], quad[j])
                                        == plane.meet(quad[i], quad[k])
                                    {
                                        ok = false;
                                        break 'chk;
                                    }
                                }
                            }
                        }
                        if ok {
                            out.push(quad);
                        }
                    }
                }
            }
        }
        out
    };
    // the line through p avoiding the triple (p on 4 lines, 3 used up)
    let spare_line = |p: usize, trio: &[usize]| -> usize {
        *plane
            .lines_of_point(p)
            .iter()
            .find(|&&m| trio.iter().all(|&t| !plane.on_line(t, m)))
            .expect("a fourth line exists")
    };
    // the fourth point of line k besides the three given
    let spare_point = |k: usize, used: &[usize]| -> usize {
        *plane
            .points_of_line(k)
            .iter()
            .find(|&&t| !used.contains(&t))
            .expect("a fourth point exists")
    };

    // 13A1
    push(
        "13A1/point",
        VertexStatus::Actual,
        vec![vector(13, &[(0, 1)])],
    );
    let mut weyl = vec![(0usize, 4i64)];
    weyl.extend((0..sz).map(|p| (p + 1, -1)));
    push("13A1/line", VertexStatus::Actual, vec![vector(13, &weyl)]);

    // 4A1+3A3: triples of points not on a line / lines not through a point
    let mut members = Vec::new();
    for a in 0..sz {
        for b in (a + 1)..sz {
            for c in (b + 1)..sz {
                if general_position(plane, &[a, b, c]) {
                    members.push(vector(
                        13,
                        &[(0, 2), (a + 1, -1), (b + 1, -1), (c + 1, -1)],
                    ));
                }
            }
        }
    }
    push("4A1+3A3/point", VertexStatus::Actual, members);
    let mut members = Vec::new();
    for a in 0..sz {
        for b in (a + 1)..sz {
            for c in (b + 1)..sz {
                if plane.meet(a, b) == plane.meet(a, c) {
                    continue; // concurrent
                }
                // coefficient 2 on points on none of the lines, 1 on
                // points on exactly one
                let mut coeffs = vec![(0usize, 5i64)];
                for t in 0..sz {
                    let cnt = [a, b, c]
                        .iter()
                        .filter(|&&l| plane.on_line(t, l))
                        .count();
                    match cnt {
                        0 => coeffs.push((t + 1, -2)),
                        1 => coeffs.push((t + 1, -1)),
                        _ => {}
                    }
                }
                members.push(vector(13, &coeffs));
            }
        }
    }
    push("4A1+3A3/line", VertexStatus::Actual, members);

    // A1+4A3: non-incident point/line pairs
    let mut point_members = Vec::new();
    let mut line_members = Vec::new();
    for l in 0..sz {
        for p in 0..sz {
            if plane.on_line(p, l) {
                continue;
            }
            let mut c = vec![(0usize, 3i64)];
            for t in 0..sz {
                if t != p && !plane.on_line(t, l) {
                    c.push((t + 1, -1));
                }
            }
            point_members.push(vector(13, &c));
            let mut c = vec![(0usize, 4i64), (p + 1, -3)];
            for &t in plane.points_of_line(l) {
                c.push((t + 1, -1));
            }
            line_members.push(vector(13, &c));
        }
    }
    push("A1+4A3/point", VertexStatus::Actual, point_members);
    push("A1+4A3/line", VertexStatus::Actual, line_members);

    // 2A1+A2+3A3: 3e_0 - 2e_p - sum_{r in l, r != q} e_r with p off l,
    // q on l; dual from (l, m, p) with p off l, p on m
    let mut point_members = Vec::new();
    let mut line_members = Vec::new();
    for l in 0..sz {
        for p in 0..sz {
            if plane.on_line(p, l) {
                continue;
            }
            for &q in plane.points_of_line(l) {
                let mut c = vec![(0usize, 3i64), (p + 1, -2)];
                for &r in plane.points_of_line(l) {
                    if r != q {
                        c.push((r + 1, -1));
                    }
                }
                point_members.push(vector(13, &c));
            }
            for &m in plane.lines_of_point(p) {
                // 7e_0 - 2 sum_{r off l, r != p} e_r - sum_{r on m, r != p} e_r
                let mut c = vec![(0usize, 7i64)];
                for r in 0..sz {
                    if r != p && !plane.on_line(r, l) {
                        c.push((r + 1, -2));
                    }
                }
                for &r in plane.points_of_line(m) {
                    if r != p {
                        c.push((r + 1, -1));
                    }
                }
                line_members.push(vector(13, &c));
            }
        }
    }
    push("2A1+A2+3A3/point", VertexStatus::Actual, point_members);
    push("2A1+A2+3A3/line", VertexStatus::Actual, line_members);

    // A1+3A4: 4e_0 - 2(e_q+e_r+e_s) - (e_u+e_v+e_w) over general-position
    // quadruples with distinguished p; u,v,w are the fourth points of the
    // lines through p avoiding the opposite diagonal line
    let mut members = Vec::new();
    for quad in &quad_general {
        for (pi, &p) in quad.iter().enumerate() {
            let others: Vec<usize> = quad
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pi)
                .map(|(_, &t)| t)
                .collect();
            let (q, r, s) = (others[0], others[1], others[2]);
            let mut c = vec![(0usize, 4i64)];
            for &t in &[q, r, s] {
                c.push((t + 1, -2));
            }
            for (a, b, opp) in [(p, q, (r, s)), (p, r, (q, s)), (p, s, (q, r))] {
                let lab = plane.line_through(a, b);
                let lopp = plane.line_through(opp.0, opp.1);
                let fourth = *plane
                    .points_of_line(lab)
                    .iter()
                    .find(|&&t| t != a && t != b && !plane.on_line(t, lopp))
                    .expect("fourth point off the opposite line");
                c.push((fourth + 1, -1));
            }
            members.push(vector(13, &c));
        }
    }
    push("A1+3A4/point", VertexStatus::Actual, members);

    // dual: 7e_0 - 4e_p - 3(e_q+e_r+e_s) - (e_x+e_y+e_z) from a line
    // quadruple (k; l, m, n): q,r,s the pairwise meets of l,m,n; x,y,z
    // the meets of k with n,m,l; p the fourth point of k
    let mut members = Vec::new();
    for quad in &line_quads {
        for (ki, &k) in quad.iter().enumerate() {
            let others: Vec<usize> = quad
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != ki)
                .map(|(_, &t)| t)
                .collect();
            let (l, m, nn) = (others[0], others[1], others[2]);
            let (q, r, s) = (plane.meet(l, m), plane.meet(l, nn), plane.meet(m, nn));
            let (x, y, z) = (plane.meet(k, nn), plane.meet(k, m), plane.meet(k, l));
            let p = spare_point(k, &[x, y, z]);
            let mut c = vec![(0usize, 7i64), (p + 1, -4)];
            for &t in &[q, r, s] {
                c.push((t + 1, -3));
            }
            for &t in &[x, y, z] {
                c.push((t + 1, -1));
            }
            members.push(vector(13, &c));
        }
    }
    push("A1+3A4/line", VertexStatus::Actual, members);

    // A2+A3+2A4: 5e_0 - 3e_p - 2(e_q+e_r+e_s) - (e_x+e_y), x on the line
    // through s,r and y on the line through s,q, both on the spare line
    // of p
    let mut members = Vec::new();
    for quad in &quad_general {
        for &p in quad {
            let trio: Vec<usize> = quad.iter().copied().filter(|&t| t != p).collect();
            for &s in &trio {
                let qr: Vec<usize> = trio.iter().copied().filter(|&t| t != s).collect();
                let (q, r) = (qr[0], qr[1]);
                let k = spare_line(p, &trio);
                let x = plane.meet(k, plane.line_through(r, s));
                let y = plane.meet(k, plane.line_through(q, s));
                let mut c = vec![(0usize, 5i64), (p + 1, -3)];
                for &t in &[q, r, s] {
                    c.push((t + 1, -2));
                }
                c.push((x + 1, -1));
                c.push((y + 1, -1));
                members.push(vector(13, &c));
            }
        }
    }
    push("A2+A3+2A4/point", VertexStatus::Actual, members);

    // dual: 9e_0 - 5e_p - 4(e_r+e_s) - 3e_q - 2(e_y+e_z) - e_h from
    // (k; {l,m}; n): h is the fourth point of n, on the line through p
    // and q
    let mut members = Vec::new();
    for quad in &line_quads {
        for &k in quad {
            let rest: Vec<usize> = quad.iter().copied().filter(|&t| t != k).collect();
            for &nn in &rest {
                let lm: Vec<usize> = rest.iter().copied().filter(|&t| t != nn).collect();
                let (l, m) = (lm[0], lm[1]);
                let (q, r, s) = (plane.meet(l, m), plane.meet(l, nn), plane.meet(m, nn));
                let (x, y, z) = (plane.meet(k, nn), plane.meet(k, m), plane.meet(k, l));
                let p = spare_point(k, &[x, y, z]);
                let h = plane.meet(plane.line_through(p, q), nn);
                let mut c = vec![(0usize, 9i64), (p + 1, -5)];
                c.push((r + 1, -4));
                c.push((s + 1, -4));
                c.push((q + 1, -3));
                c.push((y + 1, -2));
                c.push((z + 1, -2));
                c.push((h + 1, -1));
                members.push(vector(13, &c));
            }
        }
    }
    push("A2+A3+2A4/line", VertexStatus::Actual, members);

    // 3A3+A4: 3e_0 - 2e_p - (e_q+e_r+e_s+e_x), x the meet of the spare
    // line of p with the line through r,s (three parameter choices give
    // the same vector; deduplication is intentional)
    let mut members = Vec::new();
    for quad in &quad_general {
        for &p in quad {
            let trio: Vec<usize> = quad.iter().copied().filter(|&t| t != p).collect();
            for &q in &trio {
                let rs: Vec<usize> = trio.iter().copied().filter(|&t| t != q).collect();
                let k = spare_line(p, &trio);
                let x = plane.meet(k, plane.line_through(rs[0], rs[1]));
                let mut c = vec![(0usize, 3i64), (p + 1, -2)];
                for &t in &[q, rs[0], rs[1], x] {
                    c.push((t + 1, -1));
                }
                members.push(vector(13, &c));
            }
        }
    }
    push("3A3+A4/point", VertexStatus::Actual, members);

    // dual: 6e_0 - 3(e_q+e_r) - 2(e_s+e_u+e_v) - (e_w+e_h+e_i) from
    // (k; l; {m,n})
    let mut members = Vec::new();
    for quad in &line_quads {
        for &k in quad {
            let rest: Vec<usize> = quad.iter().copied().filter(|&t| t != k).collect();
            for &l in &rest {
                let mn: Vec<usize> = rest.iter().copied().filter(|&t| t != l).collect();
                let (m, nn) = (mn[0], mn[1]);
                let (q, r, s) = (plane.meet(l, m), plane.meet(l, nn), plane.meet(m, nn));
                let (x, y, z) = (plane.meet(k, nn), plane.meet(k, m), plane.meet(k, l));
                let p = spare_point(k, &[x, y, z]);
                let lpq = plane.line_through(p, q);
                let lpr = plane.line_through(p, r);
                let lps = plane.line_through(p, s);
                let u = *plane
                    .points_of_line(lpq)
                    .iter()
                    .find(|&&t| t != p && t != q && !plane.on_line(t, nn))
                    .expect("fourth point");
                let v = *plane
                    .points_of_line(lpr)
                    .iter()
                    .find(|&&t| t != p && t != r && !plane.on_line(t, m))
                    .expect("fourth point");
                let w = *plane
                    .points_of_line(lps)
                    .iter()
                    .find(|&&t| t != p && t != s && !plane.on_line(t, l))
                    .expect("fourth point");
                let h = plane.meet(lpq, nn);
                let i = plane.meet(lpr, m);
                let mut c = vec![(0usize, 6i64)];
                c.push((q + 1, -3));
                c.push((r + 1, -3));
                for &t in &[s, u, v] {
                    c.push((t + 1, -2));
                }
                for &t in &[w, h, i] {
                    c.push((t + 1, -1));
                }
                members.push(vector(13, &c));
            }
        }
    }
    push("3A3+A4/line", VertexStatus::Actual, members);

    // ideal 4D4: e_0 - e_p and 3e_0 - sum_{p off l} e_p
    push(
        "4D4/point",
        VertexStatus::Ideal,
        (0..sz)
            .map(|p| vector(13, &[(0, 1), (p + 1, -1)]))
            .collect(),
    );
    push(
        "4D4/line",
        VertexStatus::Ideal,
        (0..sz)
            .map(|l| {
                let mut c = vec![(0usize, 3i64)];
                for p in 0..sz {
                    if !plane.on_line(p, l) {
                        c.push((p + 1, -1));
                    }
                }
                vector(13, &c)
            })
            .collect(),
    );

    // ideal 3A5: 2e_0 - (e_p+e_q+e_r+e_s) over general-position quadruples
    push(
        "3A5/point",
        VertexStatus::Ideal,
        quad_general
            .iter()
            .map(|quad| {
                let mut c = vec![(0usize, 2i64)];
                for &t in quad {
                    c.push((t + 1, -1));
                }
                vector(13, &c)
            })
            .collect(),
    );
    // dual: 4e_0 - 2 sum(points on none) - sum(points on exactly one)
    push(
        "3A5/line",
        VertexStatus::Ideal,
        line_quads
            .iter()
            .map(|quad| {
                let mut c = vec![(0usize, 4i64)];
                for t in 0..sz {
                    let cnt = quad.iter().filter(|&&l| plane.on_line(t, l)).count();
                    match cnt {
                        0 => c.push((t + 1, -2)),
                        1 => c.push((t + 1, -1)),
                        _ => {}
                    }
                }
                vector(13, &c)
            })
            .collect(),
    );

    families
}

/// Match the closed-form catalog against the computed vertex set.
pub fn match_catalog(ch: &ChamberP, catalog: &VertexCatalog) -> MatchOutcome {
    let families = match ch.n {
        7 => catalog_families_n7(&ch.plane),
        13 => catalog_families_n13(&ch.plane),
        _ => unreachable!("chambers are built only for n = 7, 13"),
    };
    let computed: BTreeSet<&LatticeVector> =
        catalog.certificates.iter().map(|c| &c.vertex).collect();
    let mut family_of: HashMap<LatticeVector, String> = HashMap::new();
    let mut multiply_matched = Vec::new();
    let mut reports = Vec::new();
    for fam in &families {
        let mut matched = 0;
        let mut unmatched = Vec::new();
        for v in &fam.members {
            if computed.contains(v) {
                matched += 1;
                if let Some(_prev) = family_of.insert(v.clone(), fam.family.clone()) {
                    multiply_matched.push(v.clone());
                }
            } else {
                unmatched.push(v.clone());
            }
        }
        reports.push(FamilyReport {
            family: fam.family.clone(),
            generated: fam.members.len(),
            matched,
            unmatched_formula: unmatched,
        });
    }
    let unmatched_computed: Vec<LatticeVector> = catalog
        .certificates
        .iter()
        .filter(|c| !family_of.contains_key(&c.vertex))
        .map(|c| c.vertex.clone())
        .collect();
    let fully_matched = multiply_matched.is_empty()
        && unmatched_computed.is_empty()
        && reports.iter().all(|r| r.unmatched_formula.is_empty());
    MatchOutcome {
        report: MatchReport {
            families: reports,
            unmatched_computed,
            multiply_matched,
            fully_matched,
        },
        family_of,
    }
}

/// The integer matrix of the projective duality isometry (scaled by
/// sqrt(q)): e_0 goes to the primitive all-lines vertex and e_p to the
/// line wall of the polar line. Satisfies A^t J A = q J and A^2 = q I.
pub fn duality_matrix(
    ch: &ChamberP,
    pol: &Polarity,
) -> Result<intmat::IntMat, PolytopeError> {
    let n = ch.n;
    let sz = ch.plane.size();
    let q = i64::from(ch.plane.q);
    let mut cols: Vec<LatticeVector> = Vec::with_capacity(n + 1);
    let mut first = vec![(0usize, q + 1)];
    first.extend((0..sz).map(|p| (p + 1, -1)));
    cols.push(vector(n, &first));
    for p in 0..sz {
        cols.push(ch.line_wall(pol.point_to_line[p]).clone());
    }
    // columns to matrix
    let a: intmat::IntMat = (0..n + 1)
        .map(|i| (0..n + 1).map(|j| cols[j].coord(i).clone()).collect())
        .collect();
    let j = intmat::lorentz_form(n);
    let ata = intmat::mul(&intmat::mul(&intmat::transpose(&a), &j), &a);
    if ata != intmat::scale(&j, q) {
        return Err(PolytopeError::DualityRelation);
    }
    Ok(a)
}

/// The n = 7 value table: exact value sets of the four wall families of
/// the norm-one chamber on the dual actual vertices (primitive form of
/// sqrt(2) v_{l,p}), on the dual ideal vertices, and on the Weyl vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueTable {
    pub on_actual: Vec<Vec<i64>>,
    pub on_ideal: Vec<Vec<i64>>,
    pub on_weyl: Vec<i64>,
}

pub fn value_table_n7(
    ch: &ChamberP,
    wall_families: &[Vec<LatticeVector>; 4],
) -> ValueTable {
    assert_eq!(ch.n, 7);
    let plane = &ch.plane;
    let sz = plane.size();
    let mut actual_duals = Vec::new();
    for l in 0..sz {
        for p in 0..sz {
            if plane.on_line(p, l) {
                continue;
            }
            let mut c = vec![(0usize, 3i64), (p + 1, -2)];
            for &q in plane.points_of_line(l) {
                c.push((q + 1, -1));
            }
            actual_duals.push(vector(7, &c));
        }
    }
    let ideal_duals: Vec<LatticeVector> = (0..sz)
        .map(|l| {
            let mut c = vec![(0usize, 2i64)];
            for p in 0..sz {
                if !plane.on_line(p, l) {
                    c.push((p + 1, -1));
                }
            }
            vector(7, &c)
        })
        .collect();
    let mut weyl = vec![(0usize, 3i64)];
    weyl.extend((0..sz).map(|p| (p + 1, -1)));
    let weyl = vector(7, &weyl);

    let value_set = |walls: &[LatticeVector], verts: &[LatticeVector]| -> Vec<i64> {
        let mut set = BTreeSet::new();
        for w in walls {
            for v in verts {
                set.insert(i64::try_from(inner(v, w)).expect("small value"));
            }
        }
        set.into_iter().collect()
    };
    ValueTable {
        on_actual: wall_families
            .iter()
            .map(|f| value_set(f, &actual_duals))
            .collect(),
        on_ideal: wall_families
            .iter()
            .map(|f| value_set(f, &ideal_duals))
            .collect(),
        on_weyl: {
            let mut set = BTreeSet::new();
            for f in wall_families {
                for w in f {
                    set.insert(i64::try_from(inner(&weyl, w)).expect("small value"));
                }
            }
            set.into_iter().collect()
        },
    }
}

/// Expected value sets as printed in the reference tables.
pub fn expected_value_table() -> ValueTable {
    ValueTable {
        on_actual: vec![
            vec![-2, -1, 0],
            vec![-3, -2, -1, 0],
            vec![-4, -3, -2, -1],
            vec![-4, -3, -2],
        ],
        on_ideal: vec![
            vec![-1, 0],
            vec![-2, -1, 0],
            vec![-2, -1, 0],
            vec![-2, -1],
        ],
        on_weyl: vec![-1],
    }
}

/// Per-type counts of the distinct catalog members, used to cross-check
/// the enumeration census type by type.
pub fn catalog_counts_by_type(
    families: &[CatalogFamily],
    status: VertexStatus,
) -> BTreeMap<String, usize> {
    let mut out: BTreeMap<String, usize> = BTreeMap::new();
    for f in families {
        if f.status == status {
            let label = f
                .family
                .split('/')
                .next()
                .expect("family ids are label/side")
                .to_string();
            *out.entry(label).or_default() += f.members.len();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projplane::standard_polarity;

    #[test]
    fn chamber_gram_relations() {
        let ch = build_chamber(7).unwrap();
        assert_eq!(ch.walls.len(), 14);
        let mut values = BTreeSet::new();
        for i in 0..14 {
            for j in 0..14 {
                values.insert(i64::try_from(inner(&ch.walls[i], &ch.walls[j])).unwrap());
            }
        }
        assert_eq!(values, BTreeSet::from([-1, 0, 1, 2]));

        let ch = build_chamber(13).unwrap();
        assert_eq!(ch.walls.len(), 26);
        for l in 0..13 {
            assert_eq!(ch.line_wall(l).norm(), BigInt::from(3));
            assert_eq!(*ch.line_wall(l).coord(0), BigInt::from(1));
        }
        assert!(build_chamber(5).is_err());
    }

    #[test]
    fn fano_vertex_catalog() {
        let ch = build_chamber(7).unwrap();
        let catalog = all_vertices(&ch, 1).unwrap();
        assert!(catalog.anomalies.is_empty());
        assert_eq!(catalog.actual().count(), 58);
        assert_eq!(catalog.ideal().count(), 14);
        let by_type = catalog.count_by_type(VertexStatus::Actual);
        assert_eq!(by_type.get("7A1"), Some(&2));
        assert_eq!(by_type.get("A1+3A2"), Some(&56));

        // the all-lines subset gives the primitive Weyl vector
        let all_lines: Vec<usize> = (7..14).collect();
        let cert = catalog
            .certificates
            .iter()
            .find(|c| c.subset == all_lines)
            .unwrap();
        assert_eq!(
            cert.vertex,
            LatticeVector::from_i64(&[3, -1, -1, -1, -1, -1, -1, -1])
        );

        // every certificate satisfies all wall inequalities with the
        // right norm sign
        for c in &catalog.certificates {
            for w in &ch.walls {
                assert!(inner(&c.vertex, w) <= BigInt::zero());
            }
            match c.status {
                VertexStatus::Actual => assert!(c.vertex.norm() < BigInt::zero()),
                VertexStatus::Ideal => assert!(c.vertex.norm().is_zero()),
            }
        }
    }

    #[test]
    fn fano_catalog_matches_formulas() {
        let ch = build_chamber(7).unwrap();
        let catalog = all_vertices(&ch, 1).unwrap();
        let outcome = match_catalog(&ch, &catalog);
        assert!(outcome.report.fully_matched, "{:?}", outcome.report);
        let counts: BTreeMap<&str, usize> = outcome
            .report
            .families
            .iter()
            .map(|f| (f.family.as_str(), f.generated))
            .collect();
        assert_eq!(counts["7A1/point"], 1);
        assert_eq!(counts["7A1/line"], 1);
        assert_eq!(counts["A1+3A2/point"], 28);
        assert_eq!(counts["A1+3A2/line"], 28);
        assert_eq!(counts["3A3/point"], 7);
        assert_eq!(counts["3A3/line"], 7);
    }

    #[test]
    fn pg3_single_ideal_vertex_at_a_point() {
        // the sixteen-node subset supporting the cusp at a point p: the
        // four lines through p and their twelve other points
        let ch = build_chamber(13).unwrap();
        let p = 4usize;
        let mut subset: Vec<usize> = ch
            .plane
            .lines_of_point(p)
            .iter()
            .map(|&l| 13 + l)
            .collect();
        for &l in ch.plane.lines_of_point(p) {
            for &t in ch.plane.points_of_line(l) {
                if t != p {
                    subset.push(t);
                }
            }
        }
        subset.sort_unstable();
        assert_eq!(subset.len(), 16);
        let c = classify(&ch.diagram, &subset);
        assert_eq!(c.kind, DiagramKind::Parabolic);
        assert_eq!(c.rank, 12);
        assert_eq!(c.type_string(), "4D4");
        let rows: Vec<LatticeVector> = subset.iter().map(|&i| ch.walls[i].clone()).collect();
        let v = solve_primitive_kernel(&rows, 13).unwrap();
        let mut expected = vec![0i64; 14];
        expected[0] = 1;
        expected[p + 1] = -1;
        assert_eq!(v, LatticeVector::from_i64(&expected));
    }

    #[test]
    fn duality_matrix_identities() {
        for n in [7usize, 13] {
            let ch = build_chamber(n).unwrap();
            let pol = standard_polarity(&ch.plane);
            let a = duality_matrix(&ch, &pol).unwrap();
            let q = i64::from(ch.plane.q);
            // A^2 = q I
            let a2 = intmat::mul(&a, &a);
            assert_eq!(a2, intmat::scale(&intmat::identity(n + 1), q));
            // A e_0 = (q+1) e_0 - sum e_p
            let e0 = LatticeVector::basis(n, 0);
            let img = intmat::apply(&a, &e0);
            let mut expected = vec![-1i64; n + 1];
            expected[0] = q + 1;
            assert_eq!(img, LatticeVector::from_i64(&expected));
        }
    }

    #[test]
    fn duality_permutes_fano_vertices() {
        let ch = build_chamber(7).unwrap();
        let pol = standard_polarity(&ch.plane);
        let a = duality_matrix(&ch, &pol).unwrap();
        let catalog = all_vertices(&ch, 1).unwrap();
        let outcome = match_catalog(&ch, &catalog);
        for cert in &catalog.certificates {
            let img = intmat::apply(&a, &cert.vertex).primitivize();
            let fam = &outcome.family_of[&cert.vertex];
            let img_fam = outcome
                .family_of
                .get(&img)
                .expect("duality image is a vertex");
            // point and line sides swap
            let (label, side) = fam.split_once('/').unwrap();
            let (img_label, img_side) = img_fam.split_once('/').unwrap();
            assert_eq!(label, img_label);
            assert_ne!(side, img_side);
        }
    }

    #[test]
    fn value_table_for_fano() {
        let ch = build_chamber(7).unwrap();
        let walls = crate::chambers::gosset_walls_n7();
        let table = value_table_n7(&ch, &walls.families);
        assert_eq!(table, expected_value_table());
    }
}
