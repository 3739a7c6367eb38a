//! States, probability tables, and the exact translations between them.
//!
//! A state is stored as its readouts on the canonical basis effects; a
//! probability table holds one rational per `(settings, outcomes)` pair.
//! Both directions of the translation are exact, and every validity check
//! reports a concrete witness when it fails.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::{solve, tensor, Matrix, SolveOutcome, Vector};
use crate::rational::Rational;
use crate::theory::{cartesian, ProductEffectLabel, SiteSpec, SystemSpec};
use crate::{Error, Result};

/// A state: readouts `⟨Bⱼ, s⟩` on the canonical basis effects.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateVector {
    values: Vector,
}

impl StateVector {
    pub fn new(values: Vector) -> Self {
        StateVector { values }
    }

    pub fn values(&self) -> &Vector {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    /// Convex combination `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &StateVector, lambda: &Rational) -> StateVector {
        let one_minus = Rational::one() - lambda;
        StateVector::new(
            self.values
                .scale(lambda)
                .add(&other.values.scale(&one_minus)),
        )
    }
}

/// Readout of an effect (given by basis coefficients) on a state.
pub fn evaluate(effect: &Vector, state: &StateVector) -> Result<Rational> {
    if effect.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: effect.dim(),
            found: state.dim(),
        });
    }
    Ok(effect.dot(state.values()))
}

/// Complete conditional probability table.  Construction checks completeness
/// and index ranges only, so that signalling or unnormalized tables can still
/// be represented and diagnosed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProbabilityTable {
    entries: BTreeMap<(Vec<usize>, Vec<usize>), Rational>,
}

/// First no-signalling violation found in a table, in deterministic scan
/// order: the marginal over `site`'s outcomes, in the context of the other
/// sites' outcomes, changes when `site`'s setting moves from
/// `settings[site]` to `alt_setting`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignallingWitness {
    pub site: usize,
    pub settings: Vec<usize>,
    pub alt_setting: usize,
    pub context_outcomes: Vec<usize>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl ProbabilityTable {
    pub fn new(
        sys: &SystemSpec,
        entries: impl IntoIterator<Item = (Vec<usize>, Vec<usize>, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (settings, outcomes, p) in entries {
            sys.check_outcomes(&settings, &outcomes)?;
            if map
                .insert((settings.clone(), outcomes.clone()), p)
                .is_some()
            {
                return Err(Error::DuplicateTableEntry { settings, outcomes });
            }
        }
        let expected = sys.table_entry_count();
        if map.len() != expected {
            for settings in sys.setting_strings() {
                for outcomes in sys.outcome_strings(&settings)? {
                    if !map.contains_key(&(settings.clone(), outcomes.clone())) {
                        return Err(Error::IncompleteTable {
                            expected,
                            found: map.len(),
                            missing_settings: settings,
                            missing_outcomes: outcomes,
                        });
                    }
                }
            }
        }
        Ok(ProbabilityTable { entries: map })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, settings: &[usize], outcomes: &[usize]) -> Option<&Rational> {
        self.entries.get(&(settings.to_vec(), outcomes.to_vec()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &Rational)> {
        self.entries.iter()
    }

    fn require(
        &self,
        sys: &SystemSpec,
        settings: &[usize],
        outcomes: &[usize],
    ) -> Result<&Rational> {
        self.get(settings, outcomes).ok_or(Error::IncompleteTable {
            expected: sys.table_entry_count(),
            found: self.entries.len(),
            missing_settings: settings.to_vec(),
            missing_outcomes: outcomes.to_vec(),
        })
    }

    /// First settings string whose outcome probabilities do not sum to one.
    pub fn normalization_violation(
        &self,
        sys: &SystemSpec,
    ) -> Result<Option<(Vec<usize>, Rational)>> {
        for settings in sys.setting_strings() {
            let mut total = Rational::zero();
            for outcomes in sys.outcome_strings(&settings)? {
                total += self.require(sys, &settings, &outcomes)?;
            }
            if !total.is_one() {
                return Ok(Some((settings, total)));
            }
        }
        Ok(None)
    }

    /// Scans for a no-signalling violation: sites in order, then settings
    /// strings, then alternative settings, then context outcomes.
    pub fn signalling_witness(&self, sys: &SystemSpec) -> Result<Option<SignallingWitness>> {
        for site in 0..sys.num_sites() {
            for settings in sys.setting_strings() {
                for alt in settings[site] + 1..sys.site(site).measurements() {
                    let mut alt_settings = settings.clone();
                    alt_settings[site] = alt;
                    let context_counts: Vec<usize> = (0..sys.num_sites())
                        .filter(|&j| j != site)
                        .map(|j| sys.site(j).outcomes(settings[j]))
                        .collect();
                    for context in cartesian(&context_counts) {
                        let lhs = self.marginal(sys, &settings, site, &context)?;
                        let rhs = self.marginal(sys, &alt_settings, site, &context)?;
                        if lhs != rhs {
                            return Ok(Some(SignallingWitness {
                                site,
                                settings,
                                alt_setting: alt,
                                context_outcomes: context,
                                lhs,
                                rhs,
                            }));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_nonsignalling(&self, sys: &SystemSpec) -> Result<bool> {
        Ok(self.signalling_witness(sys)?.is_none())
    }

    /// Sums out `site`'s outcome with the other sites' outcomes fixed.
    fn marginal(
        &self,
        sys: &SystemSpec,
        settings: &[usize],
        site: usize,
        context: &[usize],
    ) -> Result<Rational> {
        let mut total = Rational::zero();
        for k in 0..sys.site(site).outcomes(settings[site]) {
            let mut outcomes = Vec::with_capacity(sys.num_sites());
            outcomes.extend_from_slice(&context[..site]);
            outcomes.push(k);
            outcomes.extend_from_slice(&context[site..]);
            total += self.require(sys, settings, &outcomes)?;
        }
        Ok(total)
    }
}

/// Reconstructs the state whose readouts reproduce `table`.  The input must
/// be normalized and non-signalling; violations are reported with their
/// witnesses.
pub fn state_from_table(sys: &SystemSpec, table: &ProbabilityTable) -> Result<StateVector> {
    if let Some((settings, total)) = table.normalization_violation(sys)? {
        return Err(Error::NotNormalized {
            settings,
            total: total.to_string(),
        });
    }
    if let Some(w) = table.signalling_witness(sys)? {
        return Err(Error::Signalling {
            site: w.site,
            settings: w.settings,
            alt_setting: w.alt_setting,
            context_outcomes: w.context_outcomes,
            lhs: w.lhs.to_string(),
            rhs: w.rhs.to_string(),
        });
    }
    let labels = sys.extremal_effect_labels();
    let readout = |label: &ProductEffectLabel| -> Result<Rational> {
        let settings: Vec<usize> = label.locals().iter().map(|l| l.measurement).collect();
        let outcomes: Vec<usize> = label.locals().iter().map(|l| l.outcome).collect();
        Ok(table.require(sys, &settings, &outcomes)?.clone())
    };
    // Solve on a spanning subset, then confirm every remaining readout; for
    // a normalized non-signalling table the confirmation cannot fail.
    let spanning = sys.spanning_effect_indices();
    let rows: Vec<Vec<Rational>> = spanning
        .iter()
        .map(|&i| Ok(sys.product_effect_coeffs(&labels[i])?.into_entries()))
        .collect::<Result<_>>()?;
    let rhs: Vec<Rational> = spanning
        .iter()
        .map(|&i| readout(&labels[i]))
        .collect::<Result<_>>()?;
    let a = Matrix::from_rows(rows);
    let SolveOutcome::Unique(values) = solve(&a, &Vector::new(rhs)) else {
        unreachable!("spanning rows form an invertible system");
    };
    let state = StateVector::new(values);
    for label in &labels {
        let expect = readout(label)?;
        let got = evaluate(&sys.product_effect_coeffs(label)?, &state)?;
        assert_eq!(
            got, expect,
            "normalized non-signalling table produced an inconsistent readout at {label}"
        );
    }
    Ok(state)
}

/// Tabulates every `(settings, outcomes)` readout of a valid state.
pub fn table_from_state(sys: &SystemSpec, state: &StateVector) -> Result<ProbabilityTable> {
    if let Some(v) = state_violation(sys, state)? {
        return Err(v.into_error());
    }
    let mut entries = Vec::with_capacity(sys.table_entry_count());
    for settings in sys.setting_strings() {
        for outcomes in sys.outcome_strings(&settings)? {
            let label = sys.label_for(&settings, &outcomes)?;
            let p = evaluate(&sys.product_effect_coeffs(&label)?, state)?;
            entries.push((settings.clone(), outcomes, p));
        }
    }
    ProbabilityTable::new(sys, entries)
}

/// Why a vector fails to be a state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateViolation {
    /// An extremal effect reads negative (first in label order).
    Negative {
        label: ProductEffectLabel,
        value: Rational,
    },
    /// The unit effect does not read one.
    Unnormalized { value: Rational },
}

impl StateViolation {
    pub fn into_error(self) -> Error {
        match self {
            StateViolation::Negative { label, value } => Error::InvalidState {
                label: label.to_string(),
                value: value.to_string(),
            },
            StateViolation::Unnormalized { value } => Error::InvalidState {
                label: "unit".to_owned(),
                value: value.to_string(),
            },
        }
    }
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateViolation::Negative { label, value } => {
                write!(f, "effect {label} reads {value}")
            }
            StateViolation::Unnormalized { value } => {
                write!(f, "unit effect reads {value}")
            }
        }
    }
}

/// Scans extremal readouts in label order for a negative value, then checks
/// normalization.
pub fn state_violation(sys: &SystemSpec, state: &StateVector) -> Result<Option<StateViolation>> {
    if state.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: state.dim(),
        });
    }
    for label in sys.extremal_effect_labels() {
        let value = evaluate(&sys.product_effect_coeffs(&label)?, state)?;
        if value.is_negative() {
            return Ok(Some(StateViolation::Negative { label, value }));
        }
    }
    let unit = evaluate(&sys.identity_coeffs(), state)?;
    if !unit.is_one() {
        return Ok(Some(StateViolation::Unnormalized { value: unit }));
    }
    Ok(None)
}

pub fn is_state(sys: &SystemSpec, state: &StateVector) -> Result<bool> {
    Ok(state_violation(sys, state)?.is_none())
}

/// A valid state is a pure product state exactly when every extremal effect
/// reads 0 or 1.
pub fn is_pure_product(sys: &SystemSpec, state: &StateVector) -> Result<bool> {
    if let Some(v) = state_violation(sys, state)? {
        return Err(v.into_error());
    }
    for label in sys.extremal_effect_labels() {
        let value = evaluate(&sys.product_effect_coeffs(&label)?, state)?;
        if !value.is_zero() && !value.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Local state that answers measurement `m` with `assignment[m]`, surely.
pub fn local_pure_state(site: &SiteSpec, assignment: &[usize]) -> Result<Vector> {
    if assignment.len() != site.measurements() {
        return Err(Error::LabelArity {
            expected: site.measurements(),
            found: assignment.len(),
        });
    }
    for (m, &k) in assignment.iter().enumerate() {
        if k >= site.outcomes(m) {
            return Err(Error::InvalidOutcome {
                site: 0,
                setting: m,
                outcome: k,
            });
        }
    }
    let mut values = vec![Rational::zero(); site.local_dim()];
    for (m, &k) in assignment.iter().enumerate() {
        for j in 0..site.outcomes(m) - 1 {
            if j == k {
                values[site.slot(m, j)] = Rational::one();
            }
        }
    }
    values[site.identity_slot()] = Rational::one();
    Ok(Vector::new(values))
}

/// Tensor of per-site value vectors.
pub fn product_state(sys: &SystemSpec, locals: &[Vector]) -> Result<StateVector> {
    if locals.len() != sys.num_sites() {
        return Err(Error::LabelArity {
            expected: sys.num_sites(),
            found: locals.len(),
        });
    }
    for (site, local) in sys.sites().iter().zip(locals) {
        if local.dim() != site.local_dim() {
            return Err(Error::DimensionMismatch {
                expected: site.local_dim(),
                found: local.dim(),
            });
        }
    }
    let mut acc: Option<Vector> = None;
    for local in locals {
        acc = Some(match acc {
            None => local.clone(),
            Some(v) => tensor(&v, local),
        });
    }
    Ok(StateVector::new(acc.unwrap()))
}

/// The two-g-bit box with uniform marginals whose outcomes obey the parity
/// rule `a₁ ⊕ a₂ = m₁·m₂`.
pub fn pr_box_state(sys: &SystemSpec) -> Result<StateVector> {
    let two_gbits = SystemSpec::gbits(2).unwrap();
    if *sys != two_gbits {
        return Err(Error::WrongSystem {
            expected: two_gbits.describe(),
            found: sys.describe(),
        });
    }
    let mut entries = Vec::with_capacity(16);
    for settings in sys.setting_strings() {
        for outcomes in sys.outcome_strings(&settings)? {
            let tied = (outcomes[0] ^ outcomes[1]) == (settings[0] & settings[1]);
            let p = if tied {
                Rational::new(1, 2)
            } else {
                Rational::zero()
            };
            entries.push((settings.clone(), outcomes, p));
        }
    }
    state_from_table(sys, &ProbabilityTable::new(sys, entries)?)
}
