//! Exact computational verification of two hyperbolic reflection chambers.
//!
//! The toolkit re-derives, by exact integer and rational arithmetic, the
//! geometry of the chambers attached to the incidence graphs of the
//! projective planes PG(2,2) and PG(2,3) inside the odd unimodular
//! Lorentzian lattices Z^(7,1) and Z^(13,1): finite covolume via the
//! Vinberg criterion, complete vertex catalogs, chamber inclusions, an odd
//! presentation of the Weyl group W(E7), and the structure of the rank-14
//! Hermitian Eisenstein lattice built on PG(2,3) together with its real
//! form.
//!
//! Everything is exact: no floating point is used anywhere in the
//! verification path.

pub mod allcock;
pub mod chambers;
pub mod coxdiag;
pub mod e7;
pub mod eisenstein;
pub mod lorentz;
pub mod perm;
pub mod polytope;
pub mod projplane;
pub mod suites;
