//! Exact arithmetic for the odd unimodular Lorentzian lattices Z^(n,1).
//!
//! A vector carries n+1 arbitrary-precision integer coordinates
//! (x_0, x_1, ..., x_n) and the bilinear form is
//! `-x_0 y_0 + x_1 y_1 + ... + x_n y_n`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LorentzError {
    #[error("reflection root has norm zero")]
    ZeroNormRoot,
    #[error("reflection does not preserve the integer lattice")]
    NonIntegralReflection,
    #[error("kernel has dimension {0}, expected 1")]
    KernelDimension(usize),
    #[error("matrix is not symmetric at ({0},{1})")]
    NotSymmetric(usize, usize),
}

/// A vector in Z^(n,1), stored as its n+1 coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    coords: Vec<BigInt>,
}

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        assert!(!coords.is_empty(), "a lattice vector needs coordinates");
        LatticeVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The n of the ambient Z^(n,1).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &BigInt {
        &self.coords[i]
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![BigInt::zero(); n + 1])
    }

    /// The basis vector e_i of Z^(n,1), 0 <= i <= n.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = vec![BigInt::zero(); n + 1];
        coords[i] = BigInt::one();
        Self::new(coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn norm(&self) -> BigInt {
        inner(self, self)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coords.iter().map(|x| x * c).collect())
    }

    /// gcd of all coordinates; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.coords
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// Divide out the content and orient: x_0 > 0, or the first nonzero
    /// coordinate positive when x_0 = 0.
    pub fn primitivize(&self) -> Self {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let mut coords: Vec<BigInt> = self.coords.iter().map(|c| c / &g).collect();
        if let Some(first) = coords.iter().find(|c| !c.is_zero()) {
            if first.is_negative() {
                for c in &mut coords {
                    *c = -&*c;
                }
            }
        }
        Self::new(coords)
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        LatticeVector::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        LatticeVector::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(self.coords.iter().map(|a| -a).collect())
    }
}

// Vectors serialize as plain JSON integer arrays. Coordinates in this
// toolkit are tiny, so i64 on the wire is safe; construction from BigInt
// guards against silent truncation anyway.
impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let ints: Vec<i64> = self
            .coords
            .iter()
            .map(|c| {
                i64::try_from(c.clone()).map_err(|_| {
                    serde::ser::Error::custom("lattice vector coordinate exceeds i64")
                })
            })
            .collect::<Result<_, S::Error>>()?;
        ints.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ints = Vec::<i64>::deserialize(deserializer)?;
        if ints.is_empty() {
            return Err(D::Error::custom("empty coordinate array"));
        }
        Ok(LatticeVector::from_i64(&ints))
    }
}

/// The Lorentzian inner product -x_0 y_0 + sum_{p>=1} x_p y_p.
///
/// Panics when the dimensions differ.
pub fn inner(x: &LatticeVector, y: &LatticeVector) -> BigInt {
    assert_eq!(x.dim(), y.dim(), "dimension mismatch");
    let mut acc = -(&x.coords[0] * &y.coords[0]);
    for (a, b) in x.coords[1..].iter().zip(&y.coords[1..]) {
        acc += a * b;
    }
    acc
}

/// The reflection s_alpha(x) = x - 2(x,alpha) alpha / (alpha,alpha).
///
/// Errors when alpha has norm zero or when the result would leave the
/// integer lattice.
pub fn reflect(alpha: &LatticeVector, x: &LatticeVector) -> Result<LatticeVector, LorentzError> {
    let norm = alpha.norm();
    if norm.is_zero() {
        return Err(LorentzError::ZeroNormRoot);
    }
    let twice = BigInt::from(2) * inner(x, alpha);
    let (q, r) = twice.div_rem(&norm);
    if !r.is_zero() {
        return Err(LorentzError::NonIntegralReflection);
    }
    Ok(x - &alpha.scale(&q))
}

/// Primitive integer spanning vector of the orthogonal complement of `rows`
/// under the Lorentzian form, oriented with x_0 > 0 (first nonzero
/// coordinate positive when x_0 = 0).
///
/// Errors unless the kernel has dimension exactly 1.
pub fn solve_primitive_kernel(
    rows: &[LatticeVector],
    n: usize,
) -> Result<LatticeVector, LorentzError> {
    let cols = n + 1;
    // inner(v, r) = 0  <=>  sum_j (J r)_j v_j = 0, with J = diag(-1, 1, .., 1)
    let mut mat: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.dim(), n, "dimension mismatch");
            let mut row: Vec<BigRational> = r
                .coords
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect();
            row[0] = -row[0].clone();
            row
        })
        .collect();

    // Row reduce to reduced echelon form.
    let mut pivot_cols = Vec::new();
    let mut row_i = 0;
    for col in 0..cols {
        let Some(piv) = (row_i..mat.len()).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row_i, piv);
        let d = mat[row_i][col].clone();
        for c in col..cols {
            mat[row_i][c] = &mat[row_i][c] / &d;
        }
        for r in 0..mat.len() {
            if r != row_i && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                for c in col..cols {
                    let delta = &f * &mat[row_i][c];
                    mat[r][c] = &mat[r][c] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        row_i += 1;
        if row_i == mat.len() {
            break;
        }
    }

    let nullity = cols - pivot_cols.len();
    if nullity != 1 {
        return Err(LorentzError::KernelDimension(nullity));
    }

    let free_col = (0..cols)
        .find(|c| !pivot_cols.contains(c))
        .expect("nullity is 1");
    let mut sol = vec![BigRational::zero(); cols];
    sol[free_col] = BigRational::one();
    for (r, &pc) in pivot_cols.iter().enumerate() {
        sol[pc] = -mat[r][free_col].clone();
    }

    // Clear denominators, reduce the content and orient.
    let lcm = sol
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = sol
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    Ok(LatticeVector::new(ints).primitivize())
}

/// A symmetric matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrix {
    entries: Vec<Vec<BigRational>>,
}

impl SymMatrix {
    pub fn new(entries: Vec<Vec<BigRational>>) -> Result<Self, LorentzError> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(LorentzError::NotSymmetric(i, j));
                }
            }
        }
        Ok(SymMatrix { entries })
    }

    pub fn from_int_rows(rows: &[Vec<BigInt>]) -> Result<Self, LorentzError> {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|c| BigRational::from_integer(c.clone()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }
}

/// Sylvester inertia (n_plus, n_zero, n_minus) by exact symmetric
/// congruence elimination.
///
/// Zero diagonal pivots are repaired by searching the remaining principal
/// block for a nonzero diagonal entry, and failing that by a unipotent
/// congruence that folds a nonzero off-diagonal entry onto the diagonal.
/// The matrix is never perturbed inexactly.
pub fn signature(m: &SymMatrix) -> (usize, usize, usize) {
    let n = m.size();
    let mut a = m.entries.clone();
    let (mut pos, mut neg) = (0usize, 0usize);
    let mut k = 0;
    while k < n {
        let diag = (k..n).find(|&i| !a[i][i].is_zero());
        let piv = match diag {
            Some(i) => i,
            None => {
                // All remaining diagonal entries vanish; look for an
                // off-diagonal hyperbolic pair.
                let mut pair = None;
                'search: for i in k..n {
                    for j in (i + 1)..n {
                        if !a[i][j].is_zero() {
                            pair = Some((i, j));
                            break 'search;
                        }
                    }
                }
                match pair {
                    None => break, // remaining block is zero
                    Some((i, j)) => {
                        // row_i += row_j and col_i += col_j: the diagonal at
                        // (i,i) becomes 2 a_ij != 0.
                        for c in 0..n {
                            let v = a[j][c].clone();
                            a[i][c] += v;
                        }
                        for r in 0..n {
                            let v = a[r][j].clone();
                            a[r][i] += v;
                        }
                        i
                    }
                }
            }
        };
        // Swap pivot into position k (rows and columns).
        if piv != k {
            a.swap(piv, k);
            for row in &mut a {
                row.swap(piv, k);
            }
        }
        let d = a[k][k].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for r in (k + 1)..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = &a[r][k] / &d;
            for c in k..n {
                let delta = &f * &a[k][c];
                a[r][c] = &a[r][c] - &delta;
            }
        }
        // Keep the working block symmetric.
        for r in (k + 1)..n {
            for c in (k + 1)..r {
                a[c][r] = a[r][c].clone();
            }
            a[r][k] = BigRational::zero();
            a[k][r] = BigRational::zero();
        }
        k += 1;
    }
    let zero = n - pos - neg;
    (pos, zero, neg)
}

/// Small helpers for exact integer matrices, used by the duality and
/// reflection-matrix checks.
pub mod intmat {
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    pub type IntMat = Vec<Vec<BigInt>>;

    pub fn identity(n: usize) -> IntMat {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect()
    }

    pub fn mul(a: &IntMat, b: &IntMat) -> IntMat {
        let n = a.len();
        let m = b[0].len();
        let k = b.len();
        assert_eq!(a[0].len(), k, "dimension mismatch");
        let mut out = vec![vec![BigInt::zero(); m]; n];
        for i in 0..n {
            for l in 0..k {
                if a[i][l].is_zero() {
                    continue;
                }
                for j in 0..m {
                    let delta = &a[i][l] * &b[l][j];
                    out[i][j] += delta;
                }
            }
        }
        out
    }

    pub fn transpose(a: &IntMat) -> IntMat {
        let n = a.len();
        let m = a[0].len();
        (0..m)
            .map(|j| (0..n).map(|i| a[i][j].clone()).collect())
            .collect()
    }

    pub fn scale(a: &IntMat, c: i64) -> IntMat {
        let c = BigInt::from(c);
        a.iter()
            .map(|row| row.iter().map(|x| x * &c).collect())
            .collect()
    }

    /// diag(-1, 1, ..., 1) of size n+1: the Lorentzian form matrix.
    pub fn lorentz_form(n: usize) -> IntMat {
        let mut j = identity(n + 1);
        j[0][0] = BigInt::from(-1);
        j
    }

    /// Apply a matrix (column-vector convention) to a lattice vector.
    pub fn apply(a: &IntMat, v: &super::LatticeVector) -> super::LatticeVector {
        let n = a.len();
        assert_eq!(v.coords().len(), a[0].len(), "dimension mismatch");
        let coords = (0..n)
            .map(|i| {
                a[i].iter()
                    .zip(v.coords())
                    .map(|(m, c)| m * c)
                    .sum::<BigInt>()
            })
            .collect();
        super::LatticeVector::new(coords)
    }
}
