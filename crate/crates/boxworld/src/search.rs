//! Exhaustive search for the reversible dynamics of a system.
//!
//! Every reversible allowed map acts on the extremal effects by a
//! permutation, so the search walks permutation assignments: images are
//! chosen for a spanning subset of effects, the unique linear extension is
//! solved for, and the images of the remaining effects are then forced.  A
//! candidate survives only if the extension realizes a total bijection,
//! fixes the unit, and passes the full reversibility check.
//!
//! Pruning uses necessary conditions only.  On systems whose sites are all
//! identical with one outcome count, reversible maps preserve the pairwise
//! overlap table, so mismatched overlaps prune a branch.  Elsewhere the
//! only condition applied is that an effect's image belongs to a
//! measurement string with the same number of outcomes: every reversible
//! map fixes the maximally mixed state, whose readout on an effect is the
//! reciprocal of that count.  Stronger block conditions are unsound there —
//! dynamics conditioned on a classical site, such as the hybrid CNOT's
//! relatives, can split one measurement string across several image
//! strings and change pairwise overlaps.  Pruning can also be switched off
//! entirely on small systems to audit the pruned search against a plain
//! exhaustive one.

use std::collections::BTreeMap;

use crate::linalg::{Matrix, Vector};
use crate::theory::SystemSpec;
use crate::transforms::{is_reversible_allowed, GroupProvenance, LinearMap, TransformGroup};
use crate::{Error, Result};

/// Search configuration.  `max_effects` bounds the number of extremal
/// effects the search will take on; disabling pruning tightens the bound
/// to [`UNPRUNED_MAX_EFFECTS`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_effects: usize,
    pub use_pruning: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_effects: 16,
            use_pruning: true,
        }
    }
}

/// Hard cap for runs with pruning disabled.
pub const UNPRUNED_MAX_EFFECTS: usize = 8;

/// Which branch-pruning criterion a search run used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PruningMode {
    /// Pairwise overlap preservation; sound when all sites are identical
    /// with a single outcome count.
    Gram,
    /// Image and preimage must belong to measurement strings with equal
    /// outcome counts — that count is read off the maximally mixed state,
    /// which every reversible map fixes.
    Blocks,
    /// No pruning; every branch is explored.
    Disabled,
}

/// Counters from one search run.
#[derive(Clone, Debug)]
pub struct SearchStats {
    pub nodes_explored: u64,
    pub pruned_branches: u64,
    pub candidates_verified: u64,
    pub pruning_mode: PruningMode,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub group: TransformGroup,
    pub stats: SearchStats,
}

/// A partial injective assignment of images on the ordered extremal-effect
/// list.
#[derive(Clone, Debug)]
pub struct PermutationAssignment {
    images: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl PermutationAssignment {
    pub fn new(n: usize) -> Self {
        PermutationAssignment {
            images: vec![None; n],
            used: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn image(&self, i: usize) -> Option<usize> {
        self.images[i]
    }

    pub fn is_used(&self, j: usize) -> bool {
        self.used[j]
    }

    /// Records `i ↦ j` unless `i` is already assigned or `j` already taken.
    pub fn assign(&mut self, i: usize, j: usize) -> bool {
        if self.images[i].is_some() || self.used[j] {
            return false;
        }
        self.images[i] = Some(j);
        self.used[j] = true;
        true
    }

    pub fn unassign(&mut self, i: usize) {
        if let Some(j) = self.images[i].take() {
            self.used[j] = false;
        }
    }
}

/// Finds every reversible allowed map of the system.
pub fn search_reversible_group(sys: &SystemSpec, opts: &SearchOptions) -> Result<SearchResult> {
    let n = sys.extremal_effect_count();
    let bound = if opts.use_pruning {
        opts.max_effects
    } else {
        opts.max_effects.min(UNPRUNED_MAX_EFFECTS)
    };
    if n > bound {
        return Err(Error::SearchBound { effects: n, bound });
    }

    let mode = if !opts.use_pruning {
        PruningMode::Disabled
    } else if homogeneous(sys) {
        PruningMode::Gram
    } else {
        PruningMode::Blocks
    };

    let labels = sys.extremal_effect_labels();
    let coeffs: Vec<Vector> = labels
        .iter()
        .map(|l| sys.product_effect_coeffs(l))
        .collect::<Result<_>>()?;
    let index: BTreeMap<Vector, usize> = coeffs
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let spanning = sys.spanning_effect_indices();
    let span_cols: Vec<Vector> = spanning.iter().map(|&i| coeffs[i].clone()).collect();
    let span_inv = Matrix::from_columns(&span_cols)
        .invert()
        .expect("spanning effect columns are invertible");

    let gram = match mode {
        PruningMode::Gram => {
            let mut g = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    g.set(i, j, sys.gram_product(&labels[i], &labels[j])?);
                }
            }
            Some(g)
        }
        _ => None,
    };
    let block_size: Vec<usize> = labels
        .iter()
        .map(|label| {
            label
                .locals()
                .iter()
                .zip(sys.sites())
                .map(|(local, site)| site.outcomes(local.measurement))
                .product()
        })
        .collect();

    let mut searcher = Searcher {
        sys,
        coeffs,
        index,
        spanning,
        span_inv,
        mode,
        gram,
        block_size,
        assignment: PermutationAssignment::new(n),
        survivors: Vec::new(),
        stats: SearchStats {
            nodes_explored: 0,
            pruned_branches: 0,
            candidates_verified: 0,
            pruning_mode: mode,
        },
    };
    searcher.descend(0)?;
    let Searcher {
        survivors, stats, ..
    } = searcher;
    Ok(SearchResult {
        group: TransformGroup::from_elements(survivors, Vec::new(), GroupProvenance::Searched),
        stats,
    })
}

fn homogeneous(sys: &SystemSpec) -> bool {
    let first = sys.site(0);
    first.uniform_outcome_count().is_some() && sys.sites().iter().all(|s| s == first)
}

struct Searcher<'a> {
    sys: &'a SystemSpec,
    coeffs: Vec<Vector>,
    index: BTreeMap<Vector, usize>,
    spanning: Vec<usize>,
    span_inv: Matrix,
    mode: PruningMode,
    gram: Option<Matrix>,
    block_size: Vec<usize>,
    assignment: PermutationAssignment,
    survivors: Vec<LinearMap>,
    stats: SearchStats,
}

impl Searcher<'_> {
    fn descend(&mut self, depth: usize) -> Result<()> {
        if depth == self.spanning.len() {
            return self.verify_candidate();
        }
        let i = self.spanning[depth];
        for j in 0..self.assignment.len() {
            if self.assignment.is_used(j) {
                continue;
            }
            if !self.compatible(i, j, depth) {
                self.stats.pruned_branches += 1;
                continue;
            }
            assert!(self.assignment.assign(i, j));
            self.stats.nodes_explored += 1;
            self.descend(depth + 1)?;
            self.assignment.unassign(i);
        }
        Ok(())
    }

    /// Necessary-condition filter for assigning image `j` to effect `i`,
    /// judged against the already-assigned spanning prefix.
    fn compatible(&self, i: usize, j: usize, depth: usize) -> bool {
        match self.mode {
            PruningMode::Disabled => true,
            PruningMode::Gram => {
                let g = self.gram.as_ref().expect("overlap table precomputed");
                if g.get(i, i) != g.get(j, j) {
                    return false;
                }
                self.prefix(depth).all(|(s, t)| g.get(i, s) == g.get(j, t))
            }
            PruningMode::Blocks => self.block_size[i] == self.block_size[j],
        }
    }

    fn prefix(&self, depth: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.spanning[..depth]
            .iter()
            .map(|&s| (s, self.assignment.image(s).expect("prefix is assigned")))
    }

    /// All spanning images are fixed: solve for the linear extension,
    /// force the remaining images, and keep the map if everything checks.
    fn verify_candidate(&mut self) -> Result<()> {
        self.stats.candidates_verified += 1;
        let to: Vec<Vector> = self
            .spanning
            .iter()
            .map(|&i| self.coeffs[self.assignment.image(i).unwrap()].clone())
            .collect();
        let adjoint = Matrix::from_columns(&to).mul_mat(&self.span_inv);
        let unit = self.sys.identity_coeffs();
        if adjoint.mul_vec(&unit) != unit {
            return Ok(());
        }
        let n = self.assignment.len();
        let mut used = vec![false; n];
        for i in &self.spanning {
            used[self.assignment.image(*i).unwrap()] = true;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.assignment.image(i).is_some() {
                continue;
            }
            let image = adjoint.mul_vec(c);
            let Some(&j) = self.index.get(&image) else {
                return Ok(());
            };
            if used[j] {
                return Ok(());
            }
            used[j] = true;
        }
        let map = LinearMap::from_adjoint(adjoint)?;
        if is_reversible_allowed(self.sys, &map)? {
            self.survivors.push(map);
        }
        Ok(())
    }
}
