//! Vertex enumeration for the state polytope.
//!
//! The polytope is cut out by one inequality per extremal effect plus the
//! normalization constraint.  The primary route is an incremental double
//! description computation on the unnormalized cone with the combinatorial
//! adjacency test; a brute-force oracle solving every near-full subset of
//! facet rows cross-checks it on small systems.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::linalg::{solve, Matrix, RowSpan, SolveOutcome, Vector};
use crate::rational::Rational;
use crate::states::{is_pure_product, is_state, StateVector};
use crate::theory::SystemSpec;
use crate::{Error, Result};

/// Enumeration guards.  `max_affine_dim` bounds the polytope dimension the
/// double description run will accept.
#[derive(Clone, Debug)]
pub struct VertexEnumOptions {
    pub max_affine_dim: usize,
}

impl Default for VertexEnumOptions {
    fn default() -> Self {
        VertexEnumOptions { max_affine_dim: 16 }
    }
}

/// The oracle solves every `(dim−1)`-subset of facet rows; above this
/// affine dimension it refuses to run.
pub const ORACLE_MAX_AFFINE_DIM: usize = 8;

/// One vertex with its classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexEntry {
    pub state: StateVector,
    pub pure_product: bool,
}

/// All vertices of a state polytope, sorted by their value vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeVRep {
    vertices: Vec<VertexEntry>,
}

impl PolytopeVRep {
    /// Sorts, deduplicates, and classifies the given states.  Every input
    /// must be a valid state.
    pub fn from_states(sys: &SystemSpec, states: Vec<StateVector>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut vertices = Vec::new();
        for state in states {
            if !seen.insert(state.clone()) {
                continue;
            }
            let pure_product = is_pure_product(sys, &state)?;
            vertices.push(VertexEntry {
                state,
                pure_product,
            });
        }
        vertices.sort_by(|a, b| a.state.cmp(&b.state));
        Ok(PolytopeVRep { vertices })
    }

    pub fn vertices(&self) -> &[VertexEntry] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn pure_product_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.pure_product).count()
    }

    pub fn nonlocal_count(&self) -> usize {
        self.len() - self.pure_product_count()
    }

    /// Index of a state in the sorted vertex list, if it is a vertex.
    pub fn position(&self, state: &StateVector) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.state.cmp(state)).ok()
    }

    pub fn states(&self) -> impl Iterator<Item = &StateVector> {
        self.vertices.iter().map(|v| &v.state)
    }
}

/// Enumerates the vertices of the state polytope by double description.
pub fn enumerate_vertices(sys: &SystemSpec, opts: &VertexEnumOptions) -> Result<PolytopeVRep> {
    if sys.affine_dim() > opts.max_affine_dim {
        return Err(Error::DimensionGuard {
            dim: sys.affine_dim(),
            guard: opts.max_affine_dim,
        });
    }
    let d = sys.dim();
    let labels = sys.extremal_effect_labels();
    let rows: Vec<Vector> = labels
        .iter()
        .map(|l| sys.product_effect_coeffs(l))
        .collect::<Result<_>>()?;

    // Initial simplicial cone from the first independent subset of rows;
    // its rays are the columns of the inverse.
    let mut span = RowSpan::new(d);
    let mut initial: Vec<usize> = Vec::with_capacity(d);
    for (i, row) in rows.iter().enumerate() {
        if span.rank() == d {
            break;
        }
        if span.try_insert(row) {
            initial.push(i);
        }
    }
    assert_eq!(initial.len(), d, "facet rows span the effect space");
    let r0 = Matrix::from_rows(
        initial
            .iter()
            .map(|&i| rows[i].entries().to_vec())
            .collect(),
    );
    let r0_inv = r0.invert().expect("independent rows are invertible");

    let mut processed: Vec<usize> = initial.clone();
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| Ray::new(primitive(&r0_inv.column(j)), &rows, &processed))
        .collect();

    for idx in (0..rows.len()).filter(|i| !initial.contains(i)) {
        let vals: Vec<Rational> = rays.iter().map(|r| rows[idx].dot(&r.v)).collect();
        let negative: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        processed.push(idx);
        if negative.is_empty() {
            for (ray, val) in rays.iter_mut().zip(&vals) {
                if val.is_zero() {
                    ray.zero.insert(idx);
                }
            }
            continue;
        }
        let positive: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();

        let mut fresh: Vec<Ray> = Vec::new();
        let mut seen: BTreeSet<Vector> = rays
            .iter()
            .enumerate()
            .filter(|(i, _)| !negative.contains(i))
            .map(|(_, r)| r.v.clone())
            .collect();
        for &p in &positive {
            for &n in &negative {
                let common: BTreeSet<usize> =
                    rays[p].zero.intersection(&rays[n].zero).copied().collect();
                let adjacent = !rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != n && common.is_subset(&r.zero));
                if !adjacent {
                    continue;
                }
                let combo = rays[n].v.scale(&vals[p]).sub(&rays[p].v.scale(&vals[n]));
                let prim = primitive(&combo);
                debug_assert!(rows[idx].dot(&prim).is_zero());
                if seen.insert(prim.clone()) {
                    fresh.push(Ray::new(prim, &rows, &processed));
                }
            }
        }

        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (i, mut ray) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                ray.zero.insert(idx);
            }
            kept.push(ray);
        }
        kept.extend(fresh);
        rays = kept;
    }

    // Normalize each ray onto the normalization plane.  The unit readout of
    // a nonzero ray satisfying all facet inequalities is strictly positive.
    let unit_idx = sys.identity_index();
    let mut states = Vec::with_capacity(rays.len());
    for ray in rays {
        let unit = ray.v[unit_idx].clone();
        assert!(unit.is_positive(), "cone ray with nonpositive unit readout");
        let inv = Rational::one() / unit;
        states.push(StateVector::new(ray.v.scale(&inv)));
    }
    PolytopeVRep::from_states(sys, states)
}

/// Brute-force oracle: solves every `(dim−1)`-subset of facet rows together
/// with the normalization row and keeps the feasible solutions.
pub fn enumerate_vertices_oracle(sys: &SystemSpec) -> Result<PolytopeVRep> {
    if sys.affine_dim() > ORACLE_MAX_AFFINE_DIM {
        return Err(Error::DimensionGuard {
            dim: sys.affine_dim(),
            guard: ORACLE_MAX_AFFINE_DIM,
        });
    }
    let d = sys.dim();
    let labels = sys.extremal_effect_labels();
    let rows: Vec<Vector> = labels
        .iter()
        .map(|l| sys.product_effect_coeffs(l))
        .collect::<Result<_>>()?;
    let mut found: BTreeSet<StateVector> = BTreeSet::new();
    for subset in (0..rows.len()).combinations(d - 1) {
        let mut stacked: Vec<Vec<Rational>> =
            subset.iter().map(|&i| rows[i].entries().to_vec()).collect();
        stacked.push(sys.identity_coeffs().into_entries());
        let mut rhs = vec![Rational::zero(); d - 1];
        rhs.push(Rational::one());
        let a = Matrix::from_rows(stacked);
        let SolveOutcome::Unique(x) = solve(&a, &Vector::new(rhs)) else {
            continue;
        };
        if rows.iter().all(|row| !row.dot(&x).is_negative()) {
            found.insert(StateVector::new(x));
        }
    }
    PolytopeVRep::from_states(sys, found.into_iter().collect())
}

struct Ray {
    v: Vector,
    zero: BTreeSet<usize>,
}

impl Ray {
    fn new(v: Vector, rows: &[Vector], processed: &[usize]) -> Self {
        let zero = processed
            .iter()
            .copied()
            .filter(|&i| rows[i].dot(&v).is_zero())
            .collect();
        Ray { v, zero }
    }
}

/// Scales a rational vector to coprime integers, preserving orientation so
/// that positive multiples of the same ray collapse to one representative.
/// The zero vector stays zero.
fn primitive(v: &Vector) -> Vector {
    let mut l = BigInt::one();
    for x in v.iter() {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for n in &ints {
        g = g.gcd(n);
    }
    if g.is_zero() {
        return Vector::zeros(v.dim());
    }
    Vector::new(
        ints.into_iter()
            .map(|n| Rational::from_bigint(n / &g))
            .collect(),
    )
}

/// Checks every vertex of `rep` against the definition: a valid state whose
/// classification flag matches a fresh purity computation.
pub fn verify_vrep(sys: &SystemSpec, rep: &PolytopeVRep) -> Result<bool> {
    for entry in rep.vertices() {
        if !is_state(sys, &entry.state)? {
            return Ok(false);
        }
        if is_pure_product(sys, &entry.state)? != entry.pure_product {
            return Ok(false);
        }
    }
    for pair in rep.vertices().windows(2) {
        if pair[0].state >= pair[1].state {
            return Ok(false);
        }
    }
    Ok(true)
}
