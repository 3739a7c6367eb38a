//! Verification reports for the two structural claims about reversible
//! dynamics: that on a system of identical sites with one outcome count
//! every reversible map is a site permutation followed by local
//! relabellings, and that on any system reversible maps send pure product
//! vertices to pure product vertices.
//!
//! The first claim is checked by running the exhaustive search next to the
//! generated relabelling group and factoring every searched element.  On
//! systems outside the claim's scope — differing sites, outcome counts that
//! vary between measurements, single-measurement sites — a strictly larger
//! searched group is reported as the expected exception rather than as a
//! failure.

use std::fmt;

use serde::Serialize;

use crate::search::{search_reversible_group, SearchOptions};
use crate::theory::{SiteSpec, SystemSpec};
use crate::transforms::{
    adjoint_effect_permutation, build_hybrid_cnot, generate_group, group_membership,
    linear_map_from_effect_permutation, trivial_generators, LinearMap, TransformGroup,
};
use crate::vertices::{enumerate_vertices, VertexEnumOptions};
use crate::{Error, Result};

/// Outcome of one verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictStatus {
    Pass,
    ExceptionExpected,
    Fail,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Pass => "PASS",
            VerdictStatus::ExceptionExpected => "EXCEPTION-EXPECTED",
            VerdictStatus::Fail => "FAIL",
        })
    }
}

/// Witness that a map's adjoint acts on effect labels as a site
/// permutation combined with an independent relabelling at each site.
///
/// The adjoint sends the label `(l_0, …, l_{N-1})` to the label whose
/// component at site `site_permutation[i]` is `l_i` relabelled:
/// measurement `m` becomes `measurement_permutations[i][m]`, and outcome
/// `k` of measurement `m` becomes `outcome_permutations[i][m][k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub site_permutation: Vec<usize>,
    pub measurement_permutations: Vec<Vec<usize>>,
    pub outcome_permutations: Vec<Vec<Vec<usize>>>,
}

/// Factors a reversible allowed map into site permutation and local
/// relabellings, or reports that its label action genuinely mixes sites,
/// as conditioned dynamics do.
pub fn factor_reversible_map(sys: &SystemSpec, map: &LinearMap) -> Result<Option<Factorization>> {
    let Some(perm) = adjoint_effect_permutation(sys, map)? else {
        return Err(Error::NotAllowed {
            reason: "adjoint does not permute the extremal effects".into(),
        });
    };
    Ok(factor_label_action(sys, &perm))
}

/// Rebuilds the linear map whose adjoint realizes a factorization's label
/// action.
pub fn realize_factorization(sys: &SystemSpec, fact: &Factorization) -> Result<LinearMap> {
    let perm = factorization_label_permutation(sys, fact)?;
    linear_map_from_effect_permutation(sys, &perm)?.ok_or_else(|| Error::NotAllowed {
        reason: "factorized label action has no linear extension".into(),
    })
}

/// Report comparing the exhaustively searched reversible group with the
/// generated relabelling group, element factorizations included.
#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Report {
    pub system: String,
    pub in_scope: bool,
    pub generated_order: usize,
    pub searched_order: usize,
    pub setwise_equal: bool,
    pub contains_generated: bool,
    pub factored_elements: usize,
    pub unfactored_elements: usize,
    pub factorizations: Vec<Option<Factorization>>,
    pub status: VerdictStatus,
    pub notes: Vec<String>,
}

/// Searches the full reversible group, compares it setwise with the group
/// generated by site permutations and local relabellings, and factors
/// every searched element.
pub fn verify_theorem1(sys: &SystemSpec, opts: &SearchOptions) -> Result<Theorem1Report> {
    let searched = search_reversible_group(sys, opts)?.group;
    let generated = generate_group(sys, &trivial_generators(sys)?)?;
    let setwise_equal = searched.setwise_eq(&generated);
    let contains_generated = generated.iter().all(|t| searched.contains(t));
    let factorizations: Vec<Option<Factorization>> = searched
        .iter()
        .map(|t| factor_reversible_map(sys, t))
        .collect::<Result<_>>()?;
    let factored_elements = factorizations.iter().filter(|f| f.is_some()).count();
    let unfactored_elements = factorizations.len() - factored_elements;

    let mut notes = scope_notes(sys);
    let in_scope = notes.is_empty();
    let holds = setwise_equal && contains_generated && unfactored_elements == 0;
    let status = if holds {
        VerdictStatus::Pass
    } else if !in_scope && contains_generated {
        VerdictStatus::ExceptionExpected
    } else {
        VerdictStatus::Fail
    };
    if !in_scope && holds {
        notes.push("relabelling structure holds here even though it is not guaranteed".into());
    }
    if !setwise_equal && contains_generated {
        notes.push(format!(
            "searched group strictly contains the relabelling group ({} extra maps)",
            searched.order() - generated.order()
        ));
    }
    if !contains_generated {
        notes.push("searched group is missing relabelling maps".into());
    }
    if let Ok(cnot) = build_hybrid_cnot(sys) {
        if group_membership(&cnot, &searched) && !group_membership(&cnot, &generated) {
            notes.push("the searched extras include the classically controlled NOT".into());
        }
    }

    Ok(Theorem1Report {
        system: sys.describe(),
        in_scope,
        generated_order: generated.order(),
        searched_order: searched.order(),
        setwise_equal,
        contains_generated,
        factored_elements,
        unfactored_elements,
        factorizations,
        status,
        notes,
    })
}

/// Report that a group of reversible maps permutes the vertex set while
/// preserving the pure-product / non-local split.
#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Report {
    pub system: String,
    pub group_order: usize,
    pub vertex_count: usize,
    pub pure_product_count: usize,
    pub nonlocal_count: usize,
    pub pure_product_closed: bool,
    pub nonlocal_closed: bool,
    pub failures: Vec<String>,
    pub status: VerdictStatus,
}

/// Applies every group element to every polytope vertex and checks that
/// each image is again a vertex of the same kind.
pub fn verify_theorem2(sys: &SystemSpec, group: &TransformGroup) -> Result<Theorem2Report> {
    let vrep = enumerate_vertices(sys, &VertexEnumOptions::default())?;
    let mut pure_product_closed = true;
    let mut nonlocal_closed = true;
    let mut failures = Vec::new();
    for (ei, map) in group.iter().enumerate() {
        for (vi, vertex) in vrep.vertices().iter().enumerate() {
            let image = map.apply(&vertex.state)?;
            let kind = if vertex.pure_product {
                "pure product"
            } else {
                "non-local"
            };
            let closed = if vertex.pure_product {
                &mut pure_product_closed
            } else {
                &mut nonlocal_closed
            };
            match vrep.position(&image) {
                None => {
                    *closed = false;
                    failures.push(format!(
                        "element {ei} maps {kind} vertex {vi} off the vertex set"
                    ));
                }
                Some(j) if vrep.vertices()[j].pure_product != vertex.pure_product => {
                    *closed = false;
                    failures.push(format!(
                        "element {ei} maps {kind} vertex {vi} to vertex {j} of the other kind"
                    ));
                }
                Some(_) => {}
            }
        }
    }
    let status = if failures.is_empty() {
        VerdictStatus::Pass
    } else {
        VerdictStatus::Fail
    };
    Ok(Theorem2Report {
        system: sys.describe(),
        group_order: group.order(),
        vertex_count: vrep.len(),
        pure_product_count: vrep.pure_product_count(),
        nonlocal_count: vrep.nonlocal_count(),
        pure_product_closed,
        nonlocal_closed,
        failures,
        status,
    })
}

/// Reasons the relabelling-structure claim does not cover this system;
/// empty exactly when it does.
fn scope_notes(sys: &SystemSpec) -> Vec<String> {
    let mut notes = Vec::new();
    let first = sys.site(0);
    if sys.sites().iter().any(|s| s != first) {
        notes.push("sites differ, so the relabelling structure is not guaranteed".into());
    }
    if sys
        .sites()
        .iter()
        .any(|s| s.uniform_outcome_count().is_none())
    {
        notes.push(
            "outcome counts vary between measurements, so the relabelling structure is not guaranteed"
                .into(),
        );
    }
    if sys.sites().iter().any(|s| s.measurements() < 2) {
        notes.push(
            "single-measurement sites are classical, so the relabelling structure is not guaranteed"
                .into(),
        );
    }
    notes
}

fn local_radices(sys: &SystemSpec) -> Vec<usize> {
    sys.sites()
        .iter()
        .map(SiteSpec::local_effect_count)
        .collect()
}

/// Strides of the site-major label ordering: label index = Σ digitᵢ·strideᵢ.
fn label_strides(radices: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * radices[i + 1];
    }
    strides
}

fn label_digits(index: usize, radices: &[usize], strides: &[usize]) -> Vec<usize> {
    radices
        .iter()
        .zip(strides)
        .map(|(&r, &s)| (index / s) % r)
        .collect()
}

fn digits_to_index(digits: &[usize], strides: &[usize]) -> usize {
    digits.iter().zip(strides).map(|(&d, &s)| d * s).sum()
}

/// Position of the local effect `(measurement, outcome)` in a site's label
/// ordering.
fn local_position(site: &SiteSpec, measurement: usize, outcome: usize) -> usize {
    site.outcome_counts()[..measurement].iter().sum::<usize>() + outcome
}

/// Factors a label permutation into per-site data, verifying the proposed
/// factorization against every label before accepting it.
fn factor_label_action(sys: &SystemSpec, perm: &[usize]) -> Option<Factorization> {
    let n_sites = sys.num_sites();
    let radices = local_radices(sys);
    let strides = label_strides(&radices);
    let base_image = label_digits(perm[0], &radices, &strides);

    // Vary one site's label at a time; the image may move at one
    // coordinate only, and that coordinate is the site's destination.
    let mut site_permutation = vec![usize::MAX; n_sites];
    let mut local_actions: Vec<Vec<usize>> = Vec::with_capacity(n_sites);
    for i in 0..n_sites {
        let probes: Vec<Vec<usize>> = (0..radices[i])
            .map(|l| label_digits(perm[l * strides[i]], &radices, &strides))
            .collect();
        let mut dest: Option<usize> = None;
        for image in &probes {
            for j in 0..n_sites {
                if image[j] != base_image[j] && *dest.get_or_insert(j) != j {
                    return None;
                }
            }
        }
        let dest = dest?;
        if radices[dest] != radices[i] || site_permutation.contains(&dest) {
            return None;
        }
        let action: Vec<usize> = probes.iter().map(|image| image[dest]).collect();
        let mut seen = vec![false; radices[dest]];
        for &a in &action {
            if seen[a] {
                return None;
            }
            seen[a] = true;
        }
        site_permutation[i] = dest;
        local_actions.push(action);
    }

    for (index, &image_index) in perm.iter().enumerate() {
        let digits = label_digits(index, &radices, &strides);
        let mut image = vec![0; n_sites];
        for i in 0..n_sites {
            image[site_permutation[i]] = local_actions[i][digits[i]];
        }
        if image_index != digits_to_index(&image, &strides) {
            return None;
        }
    }

    // Each local action must respect measurements: a single image
    // measurement per source measurement, outcome counts matching, and a
    // bijection of outcomes within each measurement.
    let mut measurement_permutations = Vec::with_capacity(n_sites);
    let mut outcome_permutations = Vec::with_capacity(n_sites);
    for i in 0..n_sites {
        let src = sys.site(i);
        let dst = sys.site(site_permutation[i]);
        if src.measurements() != dst.measurements() {
            return None;
        }
        let src_labels = src.local_effect_labels();
        let dst_labels = dst.local_effect_labels();
        let mut rho: Vec<Option<usize>> = vec![None; src.measurements()];
        let mut tau: Vec<Vec<usize>> = src
            .outcome_counts()
            .iter()
            .map(|&k| vec![usize::MAX; k])
            .collect();
        for (l, &img) in local_actions[i].iter().enumerate() {
            let from = src_labels[l];
            let to = dst_labels[img];
            if *rho[from.measurement].get_or_insert(to.measurement) != to.measurement {
                return None;
            }
            tau[from.measurement][from.outcome] = to.outcome;
        }
        let rho: Vec<usize> = rho
            .into_iter()
            .map(|m| m.expect("every measurement appears among the local labels"))
            .collect();
        let mut seen = vec![false; rho.len()];
        for (m, &r) in rho.iter().enumerate() {
            if seen[r] || dst.outcomes(r) != src.outcomes(m) {
                return None;
            }
            seen[r] = true;
        }
        for row in &tau {
            let mut seen = vec![false; row.len()];
            for &k in row {
                if k >= row.len() || seen[k] {
                    return None;
                }
                seen[k] = true;
            }
        }
        measurement_permutations.push(rho);
        outcome_permutations.push(tau);
    }

    Some(Factorization {
        site_permutation,
        measurement_permutations,
        outcome_permutations,
    })
}

/// Expands a factorization back into the label permutation it describes.
fn factorization_label_permutation(sys: &SystemSpec, fact: &Factorization) -> Result<Vec<usize>> {
    let n_sites = sys.num_sites();
    let arity_ok = fact.site_permutation.len() == n_sites
        && fact.measurement_permutations.len() == n_sites
        && fact.outcome_permutations.len() == n_sites;
    if !arity_ok {
        return Err(Error::BadPermutation {
            reason: "factorization arity does not match the system".into(),
        });
    }
    let mut seen = vec![false; n_sites];
    for (i, &dest) in fact.site_permutation.iter().enumerate() {
        if dest >= n_sites || seen[dest] {
            return Err(Error::BadPermutation {
                reason: "site permutation is not a bijection".into(),
            });
        }
        seen[dest] = true;
        let src = sys.site(i);
        let dst = sys.site(dest);
        let rho = &fact.measurement_permutations[i];
        let tau = &fact.outcome_permutations[i];
        if rho.len() != src.measurements() || tau.len() != src.measurements() {
            return Err(Error::BadPermutation {
                reason: "per-site relabelling arity does not match the site".into(),
            });
        }
        let mut meas_seen = vec![false; dst.measurements()];
        for m in 0..src.measurements() {
            let r = rho[m];
            if r >= dst.measurements() || meas_seen[r] || dst.outcomes(r) != src.outcomes(m) {
                return Err(Error::BadPermutation {
                    reason: "measurement relabelling is not outcome-compatible".into(),
                });
            }
            meas_seen[r] = true;
            let row = &tau[m];
            if row.len() != src.outcomes(m) {
                return Err(Error::BadPermutation {
                    reason: "outcome relabelling arity does not match the measurement".into(),
                });
            }
            let mut out_seen = vec![false; row.len()];
            for &k in row {
                if k >= row.len() || out_seen[k] {
                    return Err(Error::BadPermutation {
                        reason: "outcome relabelling is not a bijection".into(),
                    });
                }
                out_seen[k] = true;
            }
        }
    }

    let radices = local_radices(sys);
    let strides = label_strides(&radices);
    let site_labels: Vec<_> = sys
        .sites()
        .iter()
        .map(SiteSpec::local_effect_labels)
        .collect();
    let count = sys.extremal_effect_count();
    let mut perm = Vec::with_capacity(count);
    for index in 0..count {
        let digits = label_digits(index, &radices, &strides);
        let mut image = vec![0; n_sites];
        for i in 0..n_sites {
            let from = site_labels[i][digits[i]];
            let dest = fact.site_permutation[i];
            let m = fact.measurement_permutations[i][from.measurement];
            let k = fact.outcome_permutations[i][from.measurement][from.outcome];
            image[dest] = local_position(sys.site(dest), m, k);
        }
        perm.push(digits_to_index(&image, &strides));
    }
    Ok(perm)
}
