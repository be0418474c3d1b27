//! Gram-diagram classification and enumeration.
//!
//! Subdiagrams of a Gram diagram are classified by the exact signature of
//! their restricted Gram matrix: elliptic (positive definite), parabolic
//! (positive semidefinite, singular, with every connected component
//! singular), Lanner (connected, indefinite, all proper subdiagrams
//! elliptic), or other. On top of the classification sit the enumeration
//! of maximal-rank elliptic and parabolic subdiagrams, orbit censuses
//! under diagram automorphisms, and the Vinberg finite-volume criterion.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lorentz::{inner, signature, LatticeVector, SymMatrix};
use crate::perm::Permutation;
use crate::projplane::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoxError {
    #[error("gram matrix does not match the root inner products at ({0},{1})")]
    GramMismatch(usize, usize),
    #[error("diagonal entry {0} is not positive")]
    NonPositiveDiagonal(usize),
    #[error("generator {0} is not a diagram automorphism")]
    NotAnAutomorphism(usize),
    #[error("diagram does not satisfy the path-enumeration preconditions: {0}")]
    UnsupportedDiagram(String),
}

/// Node set with norms and exact pairwise inner products; the universal
/// object behind subdiagram classification and enumeration.
#[derive(Clone, Debug)]
pub struct GramDiagram {
    /// Ambient rank n+1 of the hyperbolic lattice Z^(n,1).
    pub dim: usize,
    pub gram: Vec<Vec<BigInt>>,
    pub roots: Option<Vec<LatticeVector>>,
}

impl GramDiagram {
    pub fn from_roots(dim: usize, roots: Vec<LatticeVector>) -> Result<Self, CoxError> {
        let n = roots.len();
        let mut gram = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = inner(&roots[i], &roots[j]);
            }
        }
        let d = GramDiagram {
            dim,
            gram,
            roots: Some(roots),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn from_gram(dim: usize, gram: Vec<Vec<BigInt>>) -> Result<Self, CoxError> {
        let d = GramDiagram {
            dim,
            gram,
            roots: None,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<(), CoxError> {
        for i in 0..self.len() {
            if self.gram[i][i] <= BigInt::zero() {
                return Err(CoxError::NonPositiveDiagonal(i));
            }
            for j in 0..i {
                if self.gram[i][j] != self.gram[j][i] {
                    return Err(CoxError::GramMismatch(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gram.is_empty()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && !self.gram[i][j].is_zero()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.adjacent(i, j)).collect()
    }

    /// The bond graph with edges labelled by the squared-cosine invariant
    /// g_ij^2 / (g_ii g_jj), which is what a diagram automorphism must
    /// preserve. Node colours record the norms but are ignored by the
    /// automorphism search, so dualities that swap norm classes count.
    pub fn bond_graph(&self) -> Graph {
        let n = self.len();
        let mut g = Graph::new(n);
        let mut label_ids: BTreeMap<(BigInt, BigInt), u32> = BTreeMap::new();
        // deterministic label assignment: collect, sort, then number
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacent(i, j) {
                    let num = &self.gram[i][j] * &self.gram[i][j];
                    let den = &self.gram[i][i] * &self.gram[j][j];
                    pairs.push(((num, den), (i, j)));
                }
            }
        }
        let mut keys: Vec<_> = pairs.iter().map(|(k, _)| k.clone()).collect();
        keys.sort();
        keys.dedup();
        for (id, k) in keys.into_iter().enumerate() {
            label_ids.insert(k, id as u32 + 1);
        }
        for ((k, (i, j)), _) in pairs.iter().map(|p| (p, ())) {
            g.add_edge(*i, *j, label_ids[k]);
        }
        g
    }

    fn restricted(&self, subset: &[usize]) -> SymMatrix {
        let rows: Vec<Vec<BigInt>> = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.gram[i][j].clone()).collect())
            .collect();
        SymMatrix::from_int_rows(&rows).expect("restriction of a symmetric matrix")
    }

    /// Connected components of the induced subdiagram, each sorted.
    pub fn components(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut unseen: Vec<usize> = subset.to_vec();
        unseen.sort_unstable();
        let in_subset: HashSet<usize> = unseen.iter().copied().collect();
        let mut comps = Vec::new();
        let mut visited: HashSet<usize> = HashSet::new();
        for &start in &unseen {
            if visited.contains(&start) {
                continue;
            }
            let mut comp = vec![start];
            visited.insert(start);
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for v in self.neighbors(u) {
                    if in_subset.contains(&v) && visited.insert(v) {
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagramKind {
    Elliptic,
    Parabolic,
    Lanner,
    /// Indefinite but not Lanner, or positive semidefinite with a mix of
    /// definite and singular components.
    Other,
}

/// Label of one connected component: `Path(k)` is the induced path on k
/// nodes (written A_k, the node-count convention), `Star4` the 4-node star
/// with one centre and three leaves (written D4).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComponentLabel {
    Path(usize),
    Star4,
    Other(usize),
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentLabel::Path(k) => write!(f, "A{k}"),
            ComponentLabel::Star4 => write!(f, "D4"),
            ComponentLabel::Other(k) => write!(f, "X{k}"),
        }
    }
}

/// A multiset of component labels, e.g. "4A1+3A3".
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypeLabel(pub Vec<ComponentLabel>);

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut runs: Vec<(ComponentLabel, usize)> = Vec::new();
        for &l in &self.0 {
            match runs.last_mut() {
                Some((prev, count)) if *prev == l => *count += 1,
                _ => runs.push((l, 1)),
            }
        }
        for (i, (l, count)) in runs.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if *count > 1 {
                write!(f, "{count}")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdiagramClass {
    pub kind: DiagramKind,
    pub rank: usize,
    pub label: TypeLabel,
}

impl SubdiagramClass {
    pub fn type_string(&self) -> String {
        self.label.to_string()
    }
}

fn component_label(d: &GramDiagram, comp: &[usize]) -> ComponentLabel {
    let k = comp.len();
    let degs: Vec<usize> = comp
        .iter()
        .map(|&u| comp.iter().filter(|&&v| d.adjacent(u, v)).count())
        .collect();
    let edge_count: usize = degs.iter().sum::<usize>() / 2;
    if edge_count == k - 1 && degs.iter().all(|&x| x <= 2) {
        return ComponentLabel::Path(k);
    }
    if k == 4 && edge_count == 3 && degs.iter().filter(|&&x| x == 3).count() == 1 {
        return ComponentLabel::Star4;
    }
    ComponentLabel::Other(k)
}

/// Classify a nonempty node subset by the exact signature of its
/// restricted Gram, computed componentwise (the signature of a block
/// diagonal matrix is the sum of the block signatures).
pub fn classify(d: &GramDiagram, subset: &[usize]) -> SubdiagramClass {
    assert!(!subset.is_empty(), "subset must be nonempty");
    let comps = d.components(subset);
    let mut pos = 0;
    let mut zero = 0;
    let mut neg = 0;
    let mut all_comps_singular = true;
    let mut labels = Vec::new();
    for comp in &comps {
        let (p, z, n) = signature(&d.restricted(comp));
        pos += p;
        zero += z;
        neg += n;
        if z == 0 {
            all_comps_singular = false;
        }
        labels.push(component_label(d, comp));
    }
    labels.sort();
    let kind = if neg > 0 {
        if comps.len() == 1 && is_minimal_non_elliptic(d, subset) {
            DiagramKind::Lanner
        } else {
            DiagramKind::Other
        }
    } else if zero == 0 {
        DiagramKind::Elliptic
    } else if all_comps_singular {
        DiagramKind::Parabolic
    } else {
        DiagramKind::Other
    };
    SubdiagramClass {
        kind,
        rank: pos,
        label: TypeLabel(labels),
    }
}

/// Every drop-one subdiagram elliptic; positive definiteness is
/// hereditary, so checking the maximal proper subsets suffices.
fn is_minimal_non_elliptic(d: &GramDiagram, subset: &[usize]) -> bool {
    if subset.len() == 1 {
        return true;
    }
    subset.iter().all(|&skip| {
        let rest: Vec<usize> = subset.iter().copied().filter(|&x| x != skip).collect();
        is_positive_definite(d, &rest)
    })
}

fn is_positive_definite(d: &GramDiagram, subset: &[usize]) -> bool {
    let (pos, _, _) = signature(&d.restricted(subset));
    pos == subset.len()
}

/// Facts derived (and verified) from the diagram that make the elliptic
/// enumeration a pure path-forest search:
///   - every induced path on <= max_path nodes is elliptic, every induced
///     path on max_path+1 nodes is not;
///   - every claw (a node with three pairwise non-adjacent neighbours) is
///     non-elliptic, so elliptic subsets have maximal degree 2;
///   - the bond graph has no cycle shorter than max_path+2, so elliptic
///     components cannot be cycles.
struct PathFacts {
    max_path: usize,
}

fn derive_path_facts(d: &GramDiagram) -> Result<PathFacts, CoxError> {
    let n = d.len();
    // all induced paths up to the first non-elliptic length
    let mut max_path = None;
    for len in 2..=n {
        let paths = induced_paths(d, len);
        if paths.is_empty() {
            max_path = Some(len - 1);
            break;
        }
        let all_elliptic = paths.iter().all(|p| is_positive_definite(d, p));
        let none_elliptic = paths.iter().all(|p| !is_positive_definite(d, p));
        if all_elliptic {
            continue;
        }
        if none_elliptic {
            max_path = Some(len - 1);
            break;
        }
        return Err(CoxError::UnsupportedDiagram(format!(
            "induced paths of {len} nodes are not uniformly elliptic or non-elliptic"
        )));
    }
    let max_path = max_path.unwrap_or(n);
    // claws are non-elliptic
    for u in 0..n {
        let nb = d.neighbors(u);
        for a in 0..nb.len() {
            for b in (a + 1)..nb.len() {
                for c in (b + 1)..nb.len() {
                    let (x, y, z) = (nb[a], nb[b], nb[c]);
                    if d.adjacent(x, y) || d.adjacent(x, z) || d.adjacent(y, z) {
                        continue;
                    }
                    if is_positive_definite(d, &[u, x, y, z]) {
                        return Err(CoxError::UnsupportedDiagram(
                            "an elliptic claw exists".into(),
                        ));
                    }
                }
            }
        }
    }
    // girth exceeds max_path + 1
    if let Some(g) = girth(d) {
        if g <= max_path + 1 {
            return Err(CoxError::UnsupportedDiagram(format!(
                "girth {g} does not exceed the elliptic path bound"
            )));
        }
    }
    Ok(PathFacts { max_path })
}

fn induced_paths(d: &GramDiagram, len: usize) -> Vec<Vec<usize>> {
    let n = d.len();
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(len);
    fn extend(
        d: &GramDiagram,
        path: &mut Vec<usize>,
        len: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if path.len() == len {
            out.push(path.clone());
            return;
        }
        let last = *path.last().unwrap();
        for v in d.neighbors(last) {
            if path.contains(&v) {
                continue;
            }
            // induced: v may touch only the current endpoint
            if path[..path.len() - 1].iter().any(|&u| d.adjacent(u, v)) {
                continue;
            }
            // canonical orientation: endpoints increasing
            if path.len() + 1 == len && v < path[0] {
                continue;
            }
            path.push(v);
            extend(d, path, len, out);
            path.pop();
        }
    }
    for start in 0..n {
        path.clear();
        path.push(start);
        if len == 1 {
            out.push(path.clone());
            continue;
        }
        extend(d, &mut path, len, &mut out);
    }
    out
}

fn girth(d: &GramDiagram) -> Option<usize> {
    // BFS from every node; standard small-graph girth
    let n = d.len();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in d.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    let cycle = dist[u] + dist[v] + 1;
                    if best.map_or(true, |b| cycle < b) {
                        best = Some(cycle);
                    }
                }
            }
        }
    }
    best
}

/// All node subsets whose classification is elliptic of the given rank
/// (elliptic rank equals node count, so these are `target_rank`-node
/// path forests). `threads` partitions the search by the first selected
/// node; results are merged in sorted order, so the output does not
/// depend on the thread count.
pub fn enum_max_elliptic(
    d: &GramDiagram,
    target_rank: usize,
    threads: usize,
) -> Result<Vec<Vec<usize>>, CoxError> {
    let facts = derive_path_facts(d)?;
    let n = d.len();
    let starts: Vec<usize> = (0..n).collect();
    let run = |&first: &usize| -> Vec<Vec<usize>> {
        let mut state = DfsState {
            d,
            max_path: facts.max_path,
            target: target_rank,
            selected: Vec::new(),
            comp: vec![usize::MAX; n],
            comp_size: vec![0; n],
            out: Vec::new(),
        };
        state.push_node(first);
        state.dfs(first + 1);
        state.out
    };
    let mut chunks: Vec<Vec<Vec<usize>>> = if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            starts.par_iter().map(run).collect()
        })
    } else {
        starts.iter().map(run).collect()
    };
    let mut all: Vec<Vec<usize>> = chunks.drain(..).flatten().collect();
    all.sort();
    // authoritative classification of every candidate
    all.retain(|s| {
        let c = classify(d, s);
        c.kind == DiagramKind::Elliptic && c.rank == target_rank
    });
    Ok(all)
}

struct DfsState<'a> {
    d: &'a GramDiagram,
    max_path: usize,
    target: usize,
    selected: Vec<usize>,
    /// component representative per selected node (path compression free,
    /// restored by snapshot on backtrack)
    comp: Vec<usize>,
    comp_size: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl<'a> DfsState<'a> {
    /// Try to add `v`; returns false (leaving state untouched) when path
    /// constraints would break.
    fn push_node(&mut self, v: usize) -> bool {
        let nbrs: Vec<usize> = self
            .d
            .neighbors(v)
            .into_iter()
            .filter(|&u| self.comp[u] != usize::MAX)
            .collect();
        if nbrs.len() > 2 {
            return false;
        }
        // selected neighbours must have degree <= 1 inside the selection
        for &u in &nbrs {
            let deg = self
                .d
                .neighbors(u)
                .into_iter()
                .filter(|&w| self.comp[w] != usize::MAX)
                .count();
            if deg >= 2 {
                return false;
            }
        }
        let mut roots: Vec<usize> = nbrs.iter().map(|&u| self.find(u)).collect();
        roots.sort_unstable();
        if roots.len() == 2 && roots[0] == roots[1] {
            return false; // cycle
        }
        roots.dedup();
        let total: usize = 1 + roots.iter().map(|&r| self.comp_size[r]).sum::<usize>();
        if total > self.max_path {
            return false;
        }
        self.comp[v] = v;
        self.comp_size[v] = 1;
        for &r in &roots {
            self.comp[r] = v;
        }
        self.comp_size[v] = total;
        self.selected.push(v);
        true
    }

    fn find(&self, mut x: usize) -> usize {
        while self.comp[x] != x {
            x = self.comp[x];
        }
        x
    }

    fn dfs(&mut self, next: usize) {
        if self.selected.len() == self.target {
            self.out.push(self.selected.clone());
            return;
        }
        let n = self.d.len();
        let missing = self.target - self.selected.len();
        if next + missing > n {
            return;
        }
        // exclude `next`
        if next + missing < n {
            self.dfs(next + 1);
        }
        // include `next`
        let snapshot_comp = self.comp.clone();
        let snapshot_size = self.comp_size.clone();
        if self.push_node(next) {
            self.dfs(next + 1);
            self.selected.pop();
        }
        self.comp = snapshot_comp;
        self.comp_size = snapshot_size;
    }
}

/// Connected parabolic subdiagrams and Lanner subdiagrams, found by
/// growing connected elliptic subsets one adjacent node at a time. A
/// connected parabolic diagram is minimally non-elliptic (all proper
/// subdiagrams elliptic), and so is a Lanner diagram by definition, so
/// every one of them arises this way.
fn connected_minimal_non_elliptic(d: &GramDiagram) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = d.len();
    let mut parabolic: HashSet<Vec<usize>> = HashSet::new();
    let mut lanner: HashSet<Vec<usize>> = HashSet::new();
    let mut seen_elliptic: HashSet<Vec<usize>> = HashSet::new();
    let mut seen_bad: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let s = vec![v];
        // diagonal entries are positive, so singletons are elliptic
        seen_elliptic.insert(s.clone());
        queue.push(s);
    }
    while let Some(s) = queue.pop() {
        let mut adjacent: Vec<usize> = (0..n)
            .filter(|&v| !s.contains(&v) && s.iter().any(|&u| d.adjacent(u, v)))
            .collect();
        adjacent.sort_unstable();
        for v in adjacent {
            let mut t = s.clone();
            t.push(v);
            t.sort_unstable();
            if seen_elliptic.contains(&t) || seen_bad.contains(&t) {
                continue;
            }
            let c = classify(d, &t);
            match c.kind {
                DiagramKind::Elliptic => {
                    seen_elliptic.insert(t.clone());
                    queue.push(t);
                }
                DiagramKind::Parabolic => {
                    parabolic.insert(t.clone());
                    seen_bad.insert(t);
                }
                DiagramKind::Lanner => {
                    lanner.insert(t.clone());
                    seen_bad.insert(t);
                }
                DiagramKind::Other => {
                    seen_bad.insert(t);
                }
            }
        }
    }
    let mut parabolic: Vec<Vec<usize>> = parabolic.into_iter().collect();
    parabolic.sort();
    let mut lanner: Vec<Vec<usize>> = lanner.into_iter().collect();
    lanner.sort();
    (parabolic, lanner)
}

/// All connected parabolic subdiagrams, sorted.
pub fn connected_parabolic(d: &GramDiagram) -> Vec<Vec<usize>> {
    connected_minimal_non_elliptic(d).0
}

/// All node subsets classifying as parabolic with the given rank: unions
/// of pairwise disconnected connected parabolic components.
pub fn enum_max_parabolic(d: &GramDiagram, target_rank: usize) -> Vec<Vec<usize>> {
    let comps = connected_parabolic(d);
    // rank of a connected parabolic component is its size minus one
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn compatible(d: &GramDiagram, a: &[usize], b: &[usize]) -> bool {
        a.iter()
            .all(|&u| b.iter().all(|&v| u != v && !d.adjacent(u, v)))
    }
    fn rec(
        d: &GramDiagram,
        comps: &[Vec<usize>],
        from: usize,
        rank_so_far: usize,
        target: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rank_so_far == target {
            let mut union: Vec<usize> = chosen
                .iter()
                .flat_map(|&i| comps[i].iter().copied())
                .collect();
            union.sort_unstable();
            out.push(union);
            return;
        }
        for i in from..comps.len() {
            let r = comps[i].len() - 1;
            if rank_so_far + r > target {
                continue;
            }
            if !chosen
                .iter()
                .all(|&j| compatible(d, &comps[j], &comps[i]))
            {
                continue;
            }
            chosen.push(i);
            rec(d, comps, i + 1, rank_so_far + r, target, chosen, out);
            chosen.pop();
        }
    }
    rec(d, &comps, 0, 0, target_rank, &mut chosen, &mut out);
    out.sort();
    out.dedup();
    // authoritative check
    out.retain(|s| {
        let c = classify(d, s);
        c.kind == DiagramKind::Parabolic && c.rank == target_rank
    });
    out
}

/// Certificate for the Vinberg finite-volume criterion: no Lanner
/// subdiagram, and every connected parabolic subdiagram extends to a
/// parabolic subdiagram of rank n-1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VinbergCertificate {
    pub ambient_n: usize,
    pub passed: bool,
    pub lanner_found: Vec<Vec<usize>>,
    pub connected_parabolic_count: usize,
    pub max_parabolic_count: usize,
    /// (connected parabolic, containing maximal parabolic) pairs.
    pub extensions: Vec<(Vec<usize>, Vec<usize>)>,
    pub unextendable: Vec<Vec<usize>>,
}

pub fn vinberg_finite_volume(d: &GramDiagram) -> VinbergCertificate {
    let n = d.dim - 1;
    let (parabolic, lanner) = connected_minimal_non_elliptic(d);
    let maximal = enum_max_parabolic(d, n - 1);
    let mut extensions = Vec::new();
    let mut unextendable = Vec::new();
    for c in &parabolic {
        let hit = maximal
            .iter()
            .find(|m| c.iter().all(|x| m.contains(x)));
        match hit {
            Some(m) => extensions.push((c.clone(), m.clone())),
            None => unextendable.push(c.clone()),
        }
    }
    VinbergCertificate {
        ambient_n: n,
        passed: lanner.is_empty() && unextendable.is_empty(),
        lanner_found: lanner,
        connected_parabolic_count: parabolic.len(),
        max_parabolic_count: maximal.len(),
        extensions,
        unextendable,
    }
}

/// One row of an orbit census report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CensusEntry {
    pub type_label: String,
    pub count: usize,
    pub orbit_count: usize,
    pub sample_subset: Vec<usize>,
}

/// Count subsets and orbits per type label under the action of diagram
/// automorphisms. Generators must preserve adjacency and the bond
/// invariant g_ij^2/(g_ii g_jj); norms may be permuted (dualities).
pub fn orbit_census(
    d: &GramDiagram,
    subsets: &[Vec<usize>],
    aut_gens: &[Permutation],
) -> Result<Vec<CensusEntry>, CoxError> {
    let n = d.len();
    for (gi, g) in aut_gens.iter().enumerate() {
        if g.degree() != n {
            return Err(CoxError::NotAnAutomorphism(gi));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (g.apply(i), g.apply(j));
                if d.adjacent(i, j) != d.adjacent(a, b) {
                    return Err(CoxError::NotAnAutomorphism(gi));
                }
                if d.adjacent(i, j) {
                    let lhs = (
                        &d.gram[i][j] * &d.gram[i][j] * &d.gram[a][a] * &d.gram[b][b],
                        (),
                    );
                    let rhs = (
                        &d.gram[a][b] * &d.gram[a][b] * &d.gram[i][i] * &d.gram[j][j],
                        (),
                    );
                    if lhs != rhs {
                        return Err(CoxError::NotAnAutomorphism(gi));
                    }
                }
            }
        }
    }

    let index: HashMap<Vec<usize>, usize> = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut s = s.clone();
            s.sort_unstable();
            (s, i)
        })
        .collect();
    let mut orbit_of = vec![usize::MAX; subsets.len()];
    let mut orbit_count_total = 0usize;
    for i in 0..subsets.len() {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let orbit_id = orbit_count_total;
        orbit_count_total += 1;
        orbit_of[i] = orbit_id;
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            for g in aut_gens {
                let mut img: Vec<usize> =
                    subsets[j].iter().map(|&x| g.apply(x)).collect();
                img.sort_unstable();
                if let Some(&k) = index.get(&img) {
                    if orbit_of[k] == usize::MAX {
                        orbit_of[k] = orbit_id;
                        stack.push(k);
                    }
                }
                // images falling outside the subset list are allowed; the
                // census only partitions the list that was handed in
            }
        }
    }

    let mut by_type: BTreeMap<String, (usize, HashSet<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, s) in subsets.iter().enumerate() {
        let label = classify(d, s).type_string();
        let entry = by_type
            .entry(label)
            .or_insert_with(|| (0, HashSet::new(), s.clone()));
        entry.0 += 1;
        entry.1.insert(orbit_of[i]);
    }
    Ok(by_type
        .into_iter()
        .map(|(type_label, (count, orbits, sample))| CensusEntry {
            type_label,
            count,
            orbit_count: orbits.len(),
            sample_subset: sample,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::PermGroup;
    use crate::projplane::{build_plane, graph_automorphism_group, incidence_graph};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The incidence diagram of PG(2,q) as a Gram diagram: point nodes of
    /// norm 1, line nodes of norm q, incident pairs at -1.
    fn incidence_diagram(q: u8) -> GramDiagram {
        let plane = build_plane(q).unwrap();
        let n = plane.size();
        let mut gram = vec![vec![BigInt::zero(); 2 * n]; 2 * n];
        for p in 0..n {
            gram[p][p] = BigInt::from(1);
        }
        for l in 0..n {
            gram[n + l][n + l] = BigInt::from(q);
            for &p in plane.points_of_line(l) {
                gram[p][n + l] = BigInt::from(-1);
                gram[n + l][p] = BigInt::from(-1);
            }
        }
        GramDiagram::from_gram((n + 1) as usize, gram).unwrap()
    }

    fn path_diagram(norms: &[i64]) -> GramDiagram {
        let k = norms.len();
        let mut gram = vec![vec![BigInt::zero(); k]; k];
        for i in 0..k {
            gram[i][i] = BigInt::from(norms[i]);
            if i + 1 < k {
                gram[i][i + 1] = BigInt::from(-1);
                gram[i + 1][i] = BigInt::from(-1);
            }
        }
        GramDiagram::from_gram(k, gram).unwrap()
    }

    #[test]
    fn classify_single_node_and_small_paths() {
        let d = path_diagram(&[1]);
        let c = classify(&d, &[0]);
        assert_eq!(c.kind, DiagramKind::Elliptic);
        assert_eq!(c.rank, 1);
        assert_eq!(c.type_string(), "A1");

        // 3-node path with norms (1,2,1): parabolic of rank 2
        let d = path_diagram(&[1, 2, 1]);
        let c = classify(&d, &[0, 1, 2]);
        assert_eq!(c.kind, DiagramKind::Parabolic);
        assert_eq!(c.rank, 2);
        assert_eq!(c.type_string(), "A3");
    }

    #[test]
    fn classify_four_node_star_is_parabolic() {
        // line centre of norm 3 with three point leaves of norm 1
        let mut gram = vec![vec![BigInt::zero(); 4]; 4];
        gram[0][0] = BigInt::from(3);
        for i in 1..4 {
            gram[i][i] = BigInt::from(1);
            gram[0][i] = BigInt::from(-1);
            gram[i][0] = BigInt::from(-1);
        }
        let d = GramDiagram::from_gram(4, gram).unwrap();
        let c = classify(&d, &[0, 1, 2, 3]);
        assert_eq!(c.kind, DiagramKind::Parabolic);
        assert_eq!(c.rank, 3);
        assert_eq!(c.type_string(), "D4");
    }

    #[test]
    fn classify_detects_lanner() {
        // (4,4,3) hyperbolic triangle: norms (1,2,2), pairwise products -1;
        // every pair is elliptic and the 3x3 determinant is -3
        let mut gram = vec![vec![BigInt::from(-1); 3]; 3];
        gram[0][0] = BigInt::from(1);
        gram[1][1] = BigInt::from(2);
        gram[2][2] = BigInt::from(2);
        let d = GramDiagram::from_gram(3, gram).unwrap();
        let c = classify(&d, &[0, 1, 2]);
        assert_eq!(c.kind, DiagramKind::Lanner);

        // the affine triangle with norms 2 and products -1 is parabolic
        let mut gram = vec![vec![BigInt::from(-1); 3]; 3];
        for i in 0..3 {
            gram[i][i] = BigInt::from(2);
        }
        let d = GramDiagram::from_gram(3, gram).unwrap();
        assert_eq!(classify(&d, &[0, 1, 2]).kind, DiagramKind::Parabolic);
    }

    #[test]
    fn classify_mixed_semidefinite_is_other() {
        // disjoint union of an elliptic node and a parabolic pair
        let mut gram = vec![vec![BigInt::zero(); 3]; 3];
        gram[0][0] = BigInt::from(1);
        gram[1][1] = BigInt::from(1);
        gram[2][2] = BigInt::from(1);
        gram[1][2] = BigInt::from(-1);
        gram[2][1] = BigInt::from(-1);
        let d = GramDiagram::from_gram(3, gram).unwrap();
        let c = classify(&d, &[0, 1, 2]);
        assert_eq!(c.kind, DiagramKind::Other);
    }

    #[test]
    fn elliptic_census_of_fano_incidence_diagram() {
        let d = incidence_diagram(2);
        let subsets = enum_max_elliptic(&d, 7, 1).unwrap();
        let mut census: BTreeMap<String, usize> = BTreeMap::new();
        for s in &subsets {
            *census.entry(classify(&d, s).type_string()).or_default() += 1;
        }
        let expected: BTreeMap<String, usize> =
            [("7A1".to_string(), 2), ("A1+3A2".to_string(), 56)]
                .into_iter()
                .collect();
        assert_eq!(census, expected);
    }

    /// Brute-force oracle: classify every one of the 2^14 subsets of the
    /// Fano incidence diagram and compare with the targeted enumerations.
    #[test]
    fn fano_enumerations_match_powerset_oracle() {
        let d = incidence_diagram(2);
        let n = d.len();
        let mut elliptic7 = Vec::new();
        let mut parabolic6 = Vec::new();
        for mask in 1u32..(1 << n) {
            let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let c = classify(&d, &subset);
            if c.kind == DiagramKind::Elliptic && c.rank == 7 {
                elliptic7.push(subset.clone());
            }
            if c.kind == DiagramKind::Parabolic && c.rank == 6 {
                parabolic6.push(subset);
            }
        }
        elliptic7.sort();
        parabolic6.sort();
        assert_eq!(enum_max_elliptic(&d, 7, 1).unwrap(), elliptic7);
        assert_eq!(enum_max_parabolic(&d, 6), parabolic6);
        assert_eq!(parabolic6.len(), 14);
        for s in &parabolic6 {
            assert_eq!(classify(&d, s).type_string(), "3A3");
        }
    }

    #[test]
    fn fano_vinberg_criterion_passes() {
        let d = incidence_diagram(2);
        let cert = vinberg_finite_volume(&d);
        assert!(cert.passed);
        assert!(cert.lanner_found.is_empty());
        // every connected parabolic is a 3-node path extending into 3A3
        for (c, m) in &cert.extensions {
            assert_eq!(c.len(), 3);
            assert_eq!(classify(&d, m).type_string(), "3A3");
        }
    }

    #[test]
    fn elliptic_subsets_are_downward_closed() {
        let d = incidence_diagram(2);
        let subsets = enum_max_elliptic(&d, 7, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s = &subsets[rng.gen_range(0..subsets.len())];
            let sub: Vec<usize> = s
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.6))
                .collect();
            if sub.is_empty() {
                continue;
            }
            assert_eq!(classify(&d, &sub).kind, DiagramKind::Elliptic);
        }
    }

    #[test]
    fn census_orbits_for_fano() {
        let d = incidence_diagram(2);
        let plane = build_plane(2).unwrap();
        let g = incidence_graph(&plane);
        let gens = graph_automorphism_group(&g);
        let subsets = enum_max_elliptic(&d, 7, 1).unwrap();
        let census = orbit_census(&d, &subsets, &gens).unwrap();
        // 7A1: the two colour classes, one orbit under the dualities
        let a1 = census.iter().find(|e| e.type_label == "7A1").unwrap();
        assert_eq!(a1.count, 2);
        assert_eq!(a1.orbit_count, 1);
        let flags = census.iter().find(|e| e.type_label == "A1+3A2").unwrap();
        assert_eq!(flags.count, 56);
        assert_eq!(flags.orbit_count, 1);

        // under the colour-preserving subgroup the two 7A1 subsets split
        let group = PermGroup::new(g.n, &gens);
        let preserving: Vec<Permutation> = group
            .elements()
            .into_iter()
            .filter(|e| (0..g.n).all(|u| g.colors[e.apply(u)] == g.colors[u]))
            .collect();
        let census2 = orbit_census(&d, &subsets, &preserving).unwrap();
        let a1 = census2.iter().find(|e| e.type_label == "7A1").unwrap();
        assert_eq!(a1.orbit_count, 2);
    }

    #[test]
    fn census_rejects_non_automorphism() {
        let d = incidence_diagram(2);
        // swapping a point with a non-incident line is not an automorphism
        let mut img: Vec<usize> = (0..14).collect();
        img.swap(0, 1);
        img.swap(2, 3);
        let bad = Permutation::from_images(img).unwrap();
        let subsets = vec![vec![0usize, 1]];
        let r = orbit_census(&d, &subsets, &[bad]);
        assert!(matches!(r, Err(CoxError::NotAnAutomorphism(0))));
    }

    #[test]
    fn empty_census() {
        let d = incidence_diagram(2);
        assert_eq!(orbit_census(&d, &[], &[]).unwrap(), Vec::new());
    }

    #[test]
    fn orbit_sizes_divide_group_order() {
        let plane = build_plane(2).unwrap();
        let g = incidence_graph(&plane);
        let gens = graph_automorphism_group(&g);
        let order = PermGroup::new(g.n, &gens).order();
        let d = incidence_diagram(2);
        let subsets = enum_max_parabolic(&d, 6);
        let census = orbit_census(&d, &subsets, &gens).unwrap();
        for e in &census {
            // single orbit per type here; orbit size = count / orbit_count
            assert_eq!(e.count % e.orbit_count, 0);
            let orbit_size = (e.count / e.orbit_count) as u128;
            assert_eq!(order % orbit_size, 0);
        }
    }
}

