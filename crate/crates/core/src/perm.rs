//! Permutations and a deterministic Schreier-Sims stabilizer chain.
//!
//! Group orders come out as the product of the fundamental orbit lengths;
//! membership is tested by sifting.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("image array is not a bijection")]
    NotBijective,
}

/// A permutation of {0, .., n-1}, stored by its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    img: Vec<u16>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            img: (0..n as u16).collect(),
        }
    }

    pub fn from_images(img: Vec<usize>) -> Result<Self, PermError> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &x in &img {
            if x >= n || seen[x] {
                return Err(PermError::NotBijective);
            }
            seen[x] = true;
        }
        Ok(Permutation {
            img: img.into_iter().map(|x| x as u16).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    pub fn apply(&self, p: usize) -> usize {
        self.img[p] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| i as u16 == x)
    }

    /// Matrix-style product: (self * rhs)(x) = self(rhs(x)).
    pub fn mul(&self, rhs: &Permutation) -> Permutation {
        assert_eq!(self.degree(), rhs.degree(), "degree mismatch");
        Permutation {
            img: rhs.img.iter().map(|&x| self.img[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut img = vec![0u16; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            img[x as usize] = i as u16;
        }
        Permutation { img }
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.img.iter().map(|&x| x as usize)
    }

    pub fn smallest_moved_point(&self) -> Option<usize> {
        self.img
            .iter()
            .enumerate()
            .find(|&(i, &x)| i as u16 != x)
            .map(|(i, _)| i)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.img)
    }
}

struct Level {
    base_point: usize,
    /// Indices into the strong generator list that fix all earlier base
    /// points, in insertion order.
    gen_idx: Vec<usize>,
    orbit: Vec<usize>,
    /// transversal[p] maps base_point to p.
    transversal: Vec<Option<Permutation>>,
    /// Schreier pairs (orbit position, local gen position) processed so
    /// far. Orbits and generator lists only ever append, so a rectangular
    /// watermark stays valid.
    done_orbit: usize,
    done_gens: usize,
}

impl Level {
    fn new(degree: usize, base_point: usize) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base_point] = Some(Permutation::identity(degree));
        Level {
            base_point,
            gen_idx: Vec::new(),
            orbit: vec![base_point],
            transversal,
            done_orbit: 0,
            done_gens: 0,
        }
    }

    /// Extend the orbit after new generators were appended: sweep existing
    /// points with the new generators and newly found points with all.
    fn extend_orbit(&mut self, strong: &[Permutation], first_new_gen: usize) {
        let mut frontier = 0;
        let old_len = self.orbit.len();
        while frontier < self.orbit.len() {
            let p = self.orbit[frontier];
            let gens = if frontier < old_len {
                &self.gen_idx[first_new_gen..]
            } else {
                &self.gen_idx[..]
            };
            for &gi in gens {
                let g = &strong[gi];
                let q = g.apply(p);
                if self.transversal[q].is_none() {
                    let t = g.mul(self.transversal[p].as_ref().unwrap());
                    self.transversal[q] = Some(t);
                    self.orbit.push(q);
                }
            }
            frontier += 1;
        }
    }
}

/// A permutation group given by generators, with a stabilizer chain built
/// eagerly. The base is chosen deterministically (smallest moved point of
/// the generator that forces a new level), so reports are reproducible.
pub struct PermGroup {
    degree: usize,
    gens: Vec<Permutation>,
    base: Vec<usize>,
    strong: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: &[Permutation]) -> Self {
        let mut g = PermGroup {
            degree,
            gens: Vec::new(),
            base: Vec::new(),
            strong: Vec::new(),
            levels: Vec::new(),
        };
        for gen in gens {
            g.add_generator(gen.clone());
        }
        g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        assert_eq!(p.degree(), self.degree, "degree mismatch");
        let (residue, _) = self.strip(p.clone(), 0);
        residue.is_identity()
    }

    /// Add a generator, updating the chain.
    pub fn add_generator(&mut self, p: Permutation) {
        assert_eq!(p.degree(), self.degree, "degree mismatch");
        self.gens.push(p.clone());
        if p.is_identity() || self.contains(&p) {
            return;
        }
        let level = self.register_strong(p);
        self.schreier_sims(level);
    }

    /// Sift p through levels `from..`; returns the residue and the level
    /// at which sifting stopped.
    fn strip(&self, mut p: Permutation, from: usize) -> (Permutation, usize) {
        for (i, l) in self.levels.iter().enumerate().skip(from) {
            let q = p.apply(l.base_point);
            match &l.transversal[q] {
                None => return (p, i),
                Some(t) => p = t.inverse().mul(&p),
            }
        }
        (p, self.levels.len())
    }

    /// Install a nonidentity element as a strong generator. Returns the
    /// deepest level that received it.
    fn register_strong(&mut self, h: Permutation) -> usize {
        if self.base.iter().all(|&b| h.apply(b) == b) {
            let b = h.smallest_moved_point().expect("not the identity");
            self.base.push(b);
            self.levels.push(Level::new(self.degree, b));
        }
        let idx = self.strong.len();
        self.strong.push(h);
        let mut deepest = 0;
        for i in 0..self.levels.len() {
            let fixes_prefix = self.base[..i]
                .iter()
                .all(|&b| self.strong[idx].apply(b) == b);
            if fixes_prefix {
                let first_new = self.levels[i].gen_idx.len();
                self.levels[i].gen_idx.push(idx);
                let strong = &self.strong;
                self.levels[i].extend_orbit(strong, first_new);
                deepest = i;
            } else {
                break;
            }
        }
        deepest
    }

    /// Bottom-up Schreier-Sims pass starting at `start`.
    fn schreier_sims(&mut self, start: usize) {
        let mut i = start as isize;
        'outer: while i >= 0 {
            let iu = i as usize;
            loop {
                let l = &self.levels[iu];
                let (orbit_len, gens_len) = (l.orbit.len(), l.gen_idx.len());
                let (done_o, done_g) = (l.done_orbit, l.done_gens);
                if done_o == orbit_len && done_g == gens_len {
                    break;
                }
                // Collect the unprocessed Schreier generators.
                let mut schreier = Vec::new();
                for (oi, &p) in l.orbit.iter().enumerate() {
                    for (gi, &sgi) in l.gen_idx.iter().enumerate() {
                        if oi < done_o && gi < done_g {
                            continue;
                        }
                        let g = &self.strong[sgi];
                        let t_p = l.transversal[p].as_ref().unwrap();
                        let q = g.apply(p);
                        let t_q = l.transversal[q].as_ref().unwrap();
                        let s = t_q.inverse().mul(&g.mul(t_p));
                        if !s.is_identity() {
                            schreier.push(s);
                        }
                    }
                }
                {
                    let l = &mut self.levels[iu];
                    l.done_orbit = orbit_len;
                    l.done_gens = gens_len;
                }
                for s in schreier {
                    let (residue, _) = self.strip(s, iu + 1);
                    if !residue.is_identity() {
                        let j = self.register_strong(residue);
                        // fix the deeper levels first, then climb back up
                        i = j as isize;
                        continue 'outer;
                    }
                }
            }
            i -= 1;
        }
    }

    /// Materialize every element by breadth-first closure of the
    /// generators. Intended for small groups (automorphism groups of the
    /// incidence diagrams); cross-checks the chain order.
    pub fn elements(&self) -> Vec<Permutation> {
        use std::collections::HashSet;
        let id = Permutation::identity(self.degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        seen.insert(id.clone());
        let mut queue = vec![id];
        let mut head = 0;
        while head < queue.len() {
            let p = queue[head].clone();
            head += 1;
            for g in &self.gens {
                let q = g.mul(&p);
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        queue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_generating_set_is_trivial() {
        let g = PermGroup::new(5, &[]);
        assert_eq!(g.order(), 1);
        assert!(g.contains(&Permutation::identity(5)));
    }

    #[test]
    fn two_adjacent_transpositions_generate_s3() {
        let a = Permutation::from_images(vec![1, 0, 2]).unwrap();
        let b = Permutation::from_images(vec![0, 2, 1]).unwrap();
        let g = PermGroup::new(3, &[a.clone(), b.clone()]);
        assert_eq!(g.order(), 6);
        assert!(g.contains(&a.mul(&b)));
        assert_eq!(g.elements().len(), 6);
    }

    #[test]
    fn adjacent_transpositions_generate_symmetric_groups() {
        for n in 4..=8usize {
            let gens: Vec<Permutation> = (0..n - 1)
                .map(|i| {
                    let mut img: Vec<usize> = (0..n).collect();
                    img.swap(i, i + 1);
                    Permutation::from_images(img).unwrap()
                })
                .collect();
            let g = PermGroup::new(n, &gens);
            let expected: u128 = (1..=n as u128).product();
            assert_eq!(g.order(), expected);
        }
    }

    #[test]
    fn cyclic_and_membership() {
        // <(0 1 2 3 4)> has order 5 and does not contain a transposition.
        let c = Permutation::from_images(vec![1, 2, 3, 4, 0]).unwrap();
        let g = PermGroup::new(5, &[c]);
        assert_eq!(g.order(), 5);
        let t = Permutation::from_images(vec![1, 0, 2, 3, 4]).unwrap();
        assert!(!g.contains(&t));
    }

    #[test]
    fn order_matches_element_count_for_random_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let n = rng.gen_range(4..8);
            let k = rng.gen_range(1..4);
            let gens: Vec<Permutation> = (0..k)
                .map(|_| {
                    let mut img: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        let j = rng.gen_range(0..=i);
                        img.swap(i, j);
                    }
                    Permutation::from_images(img).unwrap()
                })
                .collect();
            let g = PermGroup::new(n, &gens);
            assert_eq!(g.order(), g.elements().len() as u128);
        }
    }

    #[test]
    fn non_bijective_rejected() {
        assert_eq!(
            Permutation::from_images(vec![0, 0, 1]),
            Err(PermError::NotBijective)
        );
    }

    #[test]
    fn mul_is_matrix_style() {
        // (f*g)(x) = f(g(x))
        let f = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let g = Permutation::from_images(vec![0, 2, 1]).unwrap();
        let fg = f.mul(&g);
        for x in 0..3 {
            assert_eq!(fg.apply(x), f.apply(g.apply(x)));
        }
    }
}
