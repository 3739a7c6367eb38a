//! Linear dynamics on state space.
//!
//! A transformation acts on states; its adjoint acts on effect coefficient
//! vectors through the pairing `⟨adjoint(A), s⟩ = ⟨A, T(s)⟩`.  A map is
//! allowed when it sends every state to a state, which in dual form means
//! the adjoint fixes the unit and keeps every extremal effect inside the
//! effect cone.  Reversible allowed maps therefore act on the extremal
//! effects by permutation, and the relabelling generators below realize the
//! permutations that exist on every system: site exchanges, measurement
//! relabellings, and outcome relabellings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::cone::is_in_cone;
use crate::linalg::{Matrix, Vector};
use crate::states::StateVector;
use crate::theory::{LocalEffectLabel, ProductEffectLabel, SiteSpec, SystemSpec};
use crate::{Error, Result};

/// An exact linear map on state vectors, with its adjoint on effect
/// coefficients kept alongside.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinearMap {
    matrix: Matrix,
    adjoint: Matrix,
}

impl LinearMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let adjoint = matrix.transpose();
        Ok(LinearMap { matrix, adjoint })
    }

    pub fn identity(dim: usize) -> Self {
        LinearMap {
            matrix: Matrix::identity(dim),
            adjoint: Matrix::identity(dim),
        }
    }

    /// Builds the map whose adjoint (effect-side action) is the given
    /// matrix.
    pub fn from_adjoint(adjoint: Matrix) -> Result<Self> {
        LinearMap::new(adjoint.transpose())
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> &Matrix {
        &self.adjoint
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(StateVector::new(self.matrix.mul_vec(state.values())))
    }

    /// Adjoint action on an effect coefficient vector.
    pub fn apply_effect(&self, effect: &Vector) -> Result<Vector> {
        if effect.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: effect.dim(),
            });
        }
        Ok(self.adjoint.mul_vec(effect))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        LinearMap::new(self.matrix.mul_mat(&other.matrix))
    }

    pub fn invert(&self) -> Result<LinearMap> {
        let inv = self.matrix.invert().map_err(|_| Error::NotInvertible)?;
        LinearMap::new(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

/// Outcome of the allowedness check, carrying the first witness of failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AllowedCheck {
    Allowed,
    /// The adjoint moved the unit effect; `image` is where it went.
    UnitMoved {
        image: Vector,
    },
    /// The adjoint pushed this extremal effect outside the effect cone.
    OutsideCone {
        label: ProductEffectLabel,
    },
}

impl AllowedCheck {
    pub fn is_allowed(&self) -> bool {
        matches!(self, AllowedCheck::Allowed)
    }
}

/// Checks that the map sends states to states: the adjoint must fix the
/// unit and keep every extremal effect inside the cone.
pub fn check_allowed(sys: &SystemSpec, map: &LinearMap) -> Result<AllowedCheck> {
    if map.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: map.dim(),
        });
    }
    let unit = sys.identity_coeffs();
    let unit_image = map.apply_effect(&unit)?;
    if unit_image != unit {
        return Ok(AllowedCheck::UnitMoved { image: unit_image });
    }
    for label in sys.extremal_effect_labels() {
        let image = map.apply_effect(&sys.product_effect_coeffs(&label)?)?;
        if !is_in_cone(sys, &image)? {
            return Ok(AllowedCheck::OutsideCone { label });
        }
    }
    Ok(AllowedCheck::Allowed)
}

pub fn is_allowed(sys: &SystemSpec, map: &LinearMap) -> Result<bool> {
    Ok(check_allowed(sys, map)?.is_allowed())
}

/// Checks that both the map and its inverse are allowed.  For any map that
/// passes, the adjoint must permute the extremal effect vectors exactly;
/// that consequence is asserted here rather than assumed.
pub fn is_reversible_allowed(sys: &SystemSpec, map: &LinearMap) -> Result<bool> {
    if map.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: map.dim(),
        });
    }
    let Ok(inverse) = map.invert() else {
        return Ok(false);
    };
    if !is_allowed(sys, map)? || !is_allowed(sys, &inverse)? {
        return Ok(false);
    }
    let perm = adjoint_effect_permutation(sys, map)?;
    assert!(
        perm.is_some(),
        "reversible allowed map whose adjoint does not permute the extremal effects"
    );
    Ok(true)
}

/// If the adjoint maps the extremal effect vectors bijectively onto
/// themselves, returns the permutation `p` with `adjoint(effect i) =
/// effect p[i]`; otherwise `None`.
pub fn adjoint_effect_permutation(sys: &SystemSpec, map: &LinearMap) -> Result<Option<Vec<usize>>> {
    if map.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: map.dim(),
        });
    }
    let labels = sys.extremal_effect_labels();
    let mut index: BTreeMap<Vector, usize> = BTreeMap::new();
    let mut coeffs = Vec::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        let c = sys.product_effect_coeffs(label)?;
        index.insert(c.clone(), i);
        coeffs.push(c);
    }
    let mut perm = Vec::with_capacity(labels.len());
    let mut used = vec![false; labels.len()];
    for c in &coeffs {
        let image = map.apply_effect(c)?;
        let Some(&j) = index.get(&image) else {
            return Ok(None);
        };
        if used[j] {
            return Ok(None);
        }
        used[j] = true;
        perm.push(j);
    }
    Ok(Some(perm))
}

/// Builds the linear map whose adjoint sends extremal effect `i` to
/// extremal effect `perm[i]`, if such a map exists and fixes the unit.
/// The result is not checked for allowedness.
pub fn linear_map_from_effect_permutation(
    sys: &SystemSpec,
    perm: &[usize],
) -> Result<Option<LinearMap>> {
    let n = sys.extremal_effect_count();
    check_permutation(perm, n, "extremal effect")?;
    let labels = sys.extremal_effect_labels();
    let coeffs: Vec<Vector> = labels
        .iter()
        .map(|l| sys.product_effect_coeffs(l))
        .collect::<Result<_>>()?;
    let spanning = sys.spanning_effect_indices();
    let from: Vec<Vector> = spanning.iter().map(|&i| coeffs[i].clone()).collect();
    let to: Vec<Vector> = spanning.iter().map(|&i| coeffs[perm[i]].clone()).collect();
    let adjoint = Matrix::from_columns(&to).mul_mat(
        &Matrix::from_columns(&from)
            .invert()
            .expect("spanning effect columns are invertible"),
    );
    for (i, c) in coeffs.iter().enumerate() {
        if adjoint.mul_vec(c) != coeffs[perm[i]] {
            return Ok(None);
        }
    }
    let unit = sys.identity_coeffs();
    if adjoint.mul_vec(&unit) != unit {
        return Ok(None);
    }
    Ok(Some(LinearMap::from_adjoint(adjoint)?))
}

/// Relocates site `i` to position `perm[i]`.  Sites may only move onto
/// positions with an identical site description.
pub fn generator_site_permutation(sys: &SystemSpec, perm: &[usize]) -> Result<LinearMap> {
    check_permutation(perm, sys.num_sites(), "site")?;
    for (i, &j) in perm.iter().enumerate() {
        if sys.site(i) != sys.site(j) {
            return Err(Error::BadPermutation {
                reason: format!("site {i} and site {j} have different measurement shapes"),
            });
        }
    }
    relabel_map(sys, |locals| {
        let mut moved = locals.to_vec();
        for (i, &j) in perm.iter().enumerate() {
            moved[j] = locals[i];
        }
        moved
    })
}

/// Renames measurement `m` at one site to `perm[m]`.  Only measurements
/// with equal outcome counts may trade places.
pub fn generator_relabel_measurements(
    sys: &SystemSpec,
    site: usize,
    perm: &[usize],
) -> Result<LinearMap> {
    check_site_index(sys, site)?;
    let spec = sys.site(site);
    check_permutation(perm, spec.measurements(), "measurement")?;
    for (m, &m2) in perm.iter().enumerate() {
        if spec.outcomes(m) != spec.outcomes(m2) {
            return Err(Error::BadPermutation {
                reason: format!(
                    "measurements {m} and {m2} at site {site} have different outcome counts"
                ),
            });
        }
    }
    relabel_map(sys, |locals| {
        let mut moved = locals.to_vec();
        moved[site] = LocalEffectLabel::new(perm[locals[site].measurement], locals[site].outcome);
        moved
    })
}

/// Renames outcome `k` of one measurement at one site to `perm[k]`.
pub fn generator_relabel_outcomes(
    sys: &SystemSpec,
    site: usize,
    measurement: usize,
    perm: &[usize],
) -> Result<LinearMap> {
    check_site_index(sys, site)?;
    let spec = sys.site(site);
    if measurement >= spec.measurements() {
        return Err(Error::InvalidSetting {
            site,
            setting: measurement,
            measurements: spec.measurements(),
        });
    }
    check_permutation(perm, spec.outcomes(measurement), "outcome")?;
    relabel_map(sys, |locals| {
        let mut moved = locals.to_vec();
        if locals[site].measurement == measurement {
            moved[site] = LocalEffectLabel::new(measurement, perm[locals[site].outcome]);
        }
        moved
    })
}

/// Adjacent-transposition generators for every relabelling the system
/// admits: site exchanges within classes of identical sites, measurement
/// exchanges within classes of equal outcome count, and outcome exchanges
/// for every measurement.
pub fn trivial_generators(sys: &SystemSpec) -> Result<Vec<LinearMap>> {
    let mut gens = Vec::new();
    let n = sys.num_sites();
    let mut site_classes: BTreeMap<&SiteSpec, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        site_classes.entry(sys.site(i)).or_default().push(i);
    }
    for class in site_classes.values() {
        for pair in class.windows(2) {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(pair[0], pair[1]);
            gens.push(generator_site_permutation(sys, &perm)?);
        }
    }
    for i in 0..n {
        let spec = sys.site(i);
        let mut meas_classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for m in 0..spec.measurements() {
            meas_classes.entry(spec.outcomes(m)).or_default().push(m);
        }
        for class in meas_classes.values() {
            for pair in class.windows(2) {
                let mut perm: Vec<usize> = (0..spec.measurements()).collect();
                perm.swap(pair[0], pair[1]);
                gens.push(generator_relabel_measurements(sys, i, &perm)?);
            }
        }
        for m in 0..spec.measurements() {
            for k in 0..spec.outcomes(m) - 1 {
                let mut perm: Vec<usize> = (0..spec.outcomes(m)).collect();
                perm.swap(k, k + 1);
                gens.push(generator_relabel_outcomes(sys, i, m, &perm)?);
            }
        }
    }
    Ok(gens)
}

/// Order of the group the relabelling generators produce, computed from
/// the counting formula rather than by closure.
pub fn trivial_group_order(sys: &SystemSpec) -> u128 {
    let mut order: u128 = 1;
    let mut site_classes: BTreeMap<&SiteSpec, u128> = BTreeMap::new();
    for site in sys.sites() {
        *site_classes.entry(site).or_insert(0) += 1;
    }
    for count in site_classes.values() {
        order *= factorial(*count);
    }
    for site in sys.sites() {
        let mut meas_classes: BTreeMap<usize, u128> = BTreeMap::new();
        for m in 0..site.measurements() {
            *meas_classes.entry(site.outcomes(m)).or_insert(0) += 1;
            order *= factorial(site.outcomes(m) as u128);
        }
        for count in meas_classes.values() {
            order *= factorial(*count);
        }
    }
    order
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

/// How a transformation group was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupProvenance {
    Generated,
    Searched,
}

/// A finite group of reversible allowed maps, stored sorted for exact
/// membership lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformGroup {
    elements: Vec<LinearMap>,
    generators: Vec<LinearMap>,
    provenance: GroupProvenance,
}

impl TransformGroup {
    pub(crate) fn from_elements(
        elements: Vec<LinearMap>,
        generators: Vec<LinearMap>,
        provenance: GroupProvenance,
    ) -> Self {
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        TransformGroup {
            elements,
            generators,
            provenance,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[LinearMap] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LinearMap> {
        self.elements.iter()
    }

    pub fn generators(&self) -> &[LinearMap] {
        &self.generators
    }

    pub fn provenance(&self) -> GroupProvenance {
        self.provenance
    }

    pub fn contains(&self, map: &LinearMap) -> bool {
        self.elements.binary_search(map).is_ok()
    }

    /// Equality of the element sets, ignoring provenance and generators.
    pub fn setwise_eq(&self, other: &TransformGroup) -> bool {
        self.elements == other.elements
    }
}

/// Closes the generators under composition by breadth-first products.
/// Every generator must be a reversible allowed map; the closure is then
/// finite, since each element is determined by a permutation of the
/// finitely many extremal effects.
pub fn generate_group(sys: &SystemSpec, generators: &[LinearMap]) -> Result<TransformGroup> {
    for (i, g) in generators.iter().enumerate() {
        if !is_reversible_allowed(sys, g)? {
            return Err(Error::NotAllowed {
                reason: format!("generator {i} is not a reversible allowed map"),
            });
        }
    }
    let mut multipliers: Vec<LinearMap> = generators.to_vec();
    for g in generators {
        let inv = g.invert()?;
        if !multipliers.contains(&inv) {
            multipliers.push(inv);
        }
    }
    let identity = LinearMap::identity(sys.dim());
    let mut elements: BTreeSet<LinearMap> = BTreeSet::new();
    elements.insert(identity.clone());
    let mut frontier = VecDeque::from([identity]);
    while let Some(e) = frontier.pop_front() {
        for m in &multipliers {
            let next = e.compose(m)?;
            if elements.insert(next.clone()) {
                frontier.push_back(next);
            }
        }
    }
    Ok(TransformGroup::from_elements(
        elements.into_iter().collect(),
        generators.to_vec(),
        GroupProvenance::Generated,
    ))
}

pub fn group_membership(map: &LinearMap, group: &TransformGroup) -> bool {
    group.contains(map)
}

/// Conditions a relabelling of the other sites on the outcome of a
/// classical site: branch `j` acts whenever the control reads `j`.  Each
/// branch must permute the extremal effects of the uncontrolled sites.
pub fn classically_controlled_map(
    sys: &SystemSpec,
    control: usize,
    branches: &[LinearMap],
) -> Result<LinearMap> {
    check_site_index(sys, control)?;
    let spec = sys.site(control);
    if !spec.is_classical() {
        return Err(Error::WrongSystem {
            expected: "a classical control site (one measurement)".into(),
            found: format!("site {control} with {} measurements", spec.measurements()),
        });
    }
    if sys.num_sites() < 2 {
        return Err(Error::WrongSystem {
            expected: "at least one site besides the control".into(),
            found: sys.describe(),
        });
    }
    let k = spec.outcomes(0);
    if branches.len() != k {
        return Err(Error::WrongSystem {
            expected: format!("{k} branch maps, one per control outcome"),
            found: format!("{} branch maps", branches.len()),
        });
    }
    let rest_sites: Vec<SiteSpec> = sys
        .sites()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != control)
        .map(|(_, s)| s.clone())
        .collect();
    let rest = SystemSpec::new(rest_sites)?;
    let mut branch_perms = Vec::with_capacity(k);
    for (j, branch) in branches.iter().enumerate() {
        let Some(p) = adjoint_effect_permutation(&rest, branch)? else {
            return Err(Error::NotAllowed {
                reason: format!(
                    "branch {j} does not permute the extremal effects of the uncontrolled sites"
                ),
            });
        };
        branch_perms.push(p);
    }
    let labels = sys.extremal_effect_labels();
    let rest_index: BTreeMap<ProductEffectLabel, usize> = rest
        .extremal_effect_labels()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let rest_labels = rest.extremal_effect_labels();
    let full_index: BTreeMap<ProductEffectLabel, usize> = labels
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let mut perm = Vec::with_capacity(labels.len());
    for label in &labels {
        let j = label.site(control).outcome;
        let rest_locals: Vec<LocalEffectLabel> = label
            .locals()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != control)
            .map(|(_, l)| *l)
            .collect();
        let rest_pos = rest_index[&ProductEffectLabel::new(rest_locals)];
        let image_rest = &rest_labels[branch_perms[j][rest_pos]];
        let mut image_locals = image_rest.locals().to_vec();
        image_locals.insert(control, label.site(control));
        perm.push(full_index[&ProductEffectLabel::new(image_locals)]);
    }
    let map = linear_map_from_effect_permutation(sys, &perm)?
        .expect("a conditioned relabelling extends to a linear map");
    Ok(map)
}

/// The conditioned relabelling on gbit ⊗ classical bit that flips every
/// gbit outcome exactly when the classical bit reads 1.
pub fn build_hybrid_cnot(sys: &SystemSpec) -> Result<LinearMap> {
    let expected = SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()])?;
    if *sys != expected {
        return Err(Error::WrongSystem {
            expected: expected.describe(),
            found: sys.describe(),
        });
    }
    let gbit = SystemSpec::gbits(1)?;
    let flip = generator_relabel_outcomes(&gbit, 0, 0, &[1, 0])?
        .compose(&generator_relabel_outcomes(&gbit, 0, 1, &[1, 0])?)?;
    classically_controlled_map(sys, 1, &[LinearMap::identity(gbit.dim()), flip])
}

fn check_permutation(perm: &[usize], n: usize, what: &str) -> Result<()> {
    if perm.len() != n {
        return Err(Error::BadPermutation {
            reason: format!("{what} permutation has length {}, expected {n}", perm.len()),
        });
    }
    let mut seen = vec![false; n];
    for &j in perm {
        if j >= n || seen[j] {
            return Err(Error::BadPermutation {
                reason: format!("{what} permutation is not a bijection on 0..{n}"),
            });
        }
        seen[j] = true;
    }
    Ok(())
}

fn check_site_index(sys: &SystemSpec, site: usize) -> Result<()> {
    if site >= sys.num_sites() {
        return Err(Error::BadPermutation {
            reason: format!(
                "site index {site} out of range for a {}-site system",
                sys.num_sites()
            ),
        });
    }
    Ok(())
}

/// Builds the map induced by a label rewrite, which must be a bijection on
/// the extremal labels.
fn relabel_map(
    sys: &SystemSpec,
    rewrite: impl Fn(&[LocalEffectLabel]) -> Vec<LocalEffectLabel>,
) -> Result<LinearMap> {
    let labels = sys.extremal_effect_labels();
    let index: BTreeMap<ProductEffectLabel, usize> = labels
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let perm: Vec<usize> = labels
        .iter()
        .map(|l| index[&ProductEffectLabel::new(rewrite(l.locals()))])
        .collect();
    Ok(linear_map_from_effect_permutation(sys, &perm)?
        .expect("a relabelling extends to a linear map"))
}
