//! Bell functionals over table entries and the CHSH quantity on two
//! gbits.
//!
//! A functional assigns one rational coefficient to every (settings,
//! outcomes) entry of a system's table domain; its value on a state is the
//! coefficient-weighted sum of readouts.  Correlators use the ±1 sign
//! convention: outcome `a` contributes `(−1)^a`, so CHSH is
//! `E(0,0) + E(0,1) + E(1,0) − E(1,1)` over the two gbit measurements.

use std::collections::BTreeMap;

use crate::rational::Rational;
use crate::states::{evaluate, StateVector};
use crate::theory::SystemSpec;
use crate::vertices::PolytopeVRep;
use crate::{Error, Result};

/// A rational coefficient for every entry of the system's table domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellFunctional {
    coeffs: BTreeMap<(Vec<usize>, Vec<usize>), Rational>,
}

impl BellFunctional {
    pub fn new(
        sys: &SystemSpec,
        entries: impl IntoIterator<Item = (Vec<usize>, Vec<usize>, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (settings, outcomes, c) in entries {
            sys.check_outcomes(&settings, &outcomes)?;
            if map
                .insert((settings.clone(), outcomes.clone()), c)
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
        Ok(BellFunctional { coeffs: map })
    }

    /// The functional with every coefficient zero.
    pub fn zero(sys: &SystemSpec) -> Result<Self> {
        let mut entries = Vec::with_capacity(sys.table_entry_count());
        for settings in sys.setting_strings() {
            for outcomes in sys.outcome_strings(&settings)? {
                entries.push((settings.clone(), outcomes, Rational::zero()));
            }
        }
        BellFunctional::new(sys, entries)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, settings: &[usize], outcomes: &[usize]) -> Option<&Rational> {
        self.coeffs.get(&(settings.to_vec(), outcomes.to_vec()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &Rational)> {
        self.coeffs.iter()
    }

    /// Coefficient-weighted sum of the state's readouts.
    pub fn evaluate(&self, sys: &SystemSpec, state: &StateVector) -> Result<Rational> {
        let mut total = Rational::zero();
        for ((settings, outcomes), c) in &self.coeffs {
            let label = sys.label_for(settings, outcomes)?;
            let effect = sys.product_effect_coeffs(&label)?;
            total += c * evaluate(&effect, state)?;
        }
        Ok(total)
    }
}

/// ±1 correlator of the two sites' outcomes at one pair of settings.
pub fn correlator(
    sys: &SystemSpec,
    state: &StateVector,
    first: usize,
    second: usize,
) -> Result<Rational> {
    require_two_gbits(sys)?;
    let mut total = Rational::zero();
    for a in 0..2 {
        for b in 0..2 {
            let label = sys.label_for(&[first, second], &[a, b])?;
            let effect = sys.product_effect_coeffs(&label)?;
            let p = evaluate(&effect, state)?;
            if (a + b) % 2 == 0 {
                total += p;
            } else {
                total -= p;
            }
        }
    }
    Ok(total)
}

/// `E(0,0) + E(0,1) + E(1,0) − E(1,1)` on two gbits.
pub fn chsh_value(sys: &SystemSpec, state: &StateVector) -> Result<Rational> {
    let mut total = correlator(sys, state, 0, 0)?;
    total += correlator(sys, state, 0, 1)?;
    total += correlator(sys, state, 1, 0)?;
    total -= correlator(sys, state, 1, 1)?;
    Ok(total)
}

/// The CHSH functional: correlator coefficients, negated on the settings
/// pair `(1,1)`.
pub fn chsh_functional(sys: &SystemSpec) -> Result<BellFunctional> {
    chsh_variant(sys, [1, 1], false)
}

/// All eight CHSH functionals: the negated settings pair ranges over the
/// grid, the overall sign over ±1.
pub fn chsh_variants(sys: &SystemSpec) -> Result<Vec<BellFunctional>> {
    let mut out = Vec::with_capacity(8);
    for minus in [[0, 0], [0, 1], [1, 0], [1, 1]] {
        for negate in [false, true] {
            out.push(chsh_variant(sys, minus, negate)?);
        }
    }
    Ok(out)
}

fn chsh_variant(sys: &SystemSpec, minus: [usize; 2], negate: bool) -> Result<BellFunctional> {
    require_two_gbits(sys)?;
    let mut entries = Vec::with_capacity(16);
    for m1 in 0..2 {
        for m2 in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut c = if (a + b) % 2 == 0 {
                        Rational::one()
                    } else {
                        -Rational::one()
                    };
                    if [m1, m2] == minus {
                        c = -c;
                    }
                    if negate {
                        c = -c;
                    }
                    entries.push((vec![m1, m2], vec![a, b], c));
                }
            }
        }
    }
    BellFunctional::new(sys, entries)
}

/// Exact maximum of the functional over the vertex list and the first
/// vertex attaining it.
pub fn max_over_vertices(
    sys: &SystemSpec,
    functional: &BellFunctional,
    vrep: &PolytopeVRep,
) -> Result<(Rational, usize)> {
    let mut best: Option<(Rational, usize)> = None;
    for (i, vertex) in vrep.vertices().iter().enumerate() {
        let value = functional.evaluate(sys, &vertex.state)?;
        match &best {
            Some((top, _)) if value <= *top => {}
            _ => best = Some((value, i)),
        }
    }
    best.ok_or_else(|| Error::WrongSystem {
        expected: "at least one vertex".into(),
        found: "an empty vertex list".into(),
    })
}

fn require_two_gbits(sys: &SystemSpec) -> Result<()> {
    let expected = SystemSpec::gbits(2)?;
    if *sys != expected {
        return Err(Error::WrongSystem {
            expected: expected.describe(),
            found: sys.describe(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;
    use crate::states::{local_pure_state, pr_box_state, product_state};
    use crate::theory::SiteSpec;
    use crate::transforms::{generate_group, trivial_generators};
    use crate::vertices::{enumerate_vertices, VertexEnumOptions};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn two_gbits() -> SystemSpec {
        SystemSpec::gbits(2).unwrap()
    }

    fn deterministic(sys: &SystemSpec) -> StateVector {
        let local = local_pure_state(sys.site(0), &[0, 0]).unwrap();
        product_state(sys, &[local.clone(), local]).unwrap()
    }

    fn uniform(sys: &SystemSpec) -> StateVector {
        let local = Vector::new(vec![r(1, 2), r(1, 2), r(1, 1)]);
        product_state(sys, &[local.clone(), local]).unwrap()
    }

    #[test]
    fn pr_box_reaches_the_algebraic_maximum() {
        let sys = two_gbits();
        let pr = pr_box_state(&sys).unwrap();
        assert_eq!(correlator(&sys, &pr, 0, 0).unwrap(), r(1, 1));
        assert_eq!(correlator(&sys, &pr, 1, 1).unwrap(), r(-1, 1));
        assert_eq!(chsh_value(&sys, &pr).unwrap(), r(4, 1));
    }

    #[test]
    fn deterministic_product_scores_two() {
        let sys = two_gbits();
        let s = deterministic(&sys);
        assert_eq!(correlator(&sys, &s, 0, 0).unwrap(), r(1, 1));
        assert_eq!(chsh_value(&sys, &s).unwrap(), r(2, 1));
    }

    #[test]
    fn uniform_state_scores_zero() {
        let sys = two_gbits();
        let s = uniform(&sys);
        for (m1, m2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(correlator(&sys, &s, m1, m2).unwrap(), Rational::zero());
        }
        assert_eq!(chsh_value(&sys, &s).unwrap(), Rational::zero());
    }

    #[test]
    fn chsh_functional_agrees_with_direct_evaluation() {
        let sys = two_gbits();
        let f = chsh_functional(&sys).unwrap();
        assert_eq!(f.len(), 16);
        for state in [
            pr_box_state(&sys).unwrap(),
            deterministic(&sys),
            uniform(&sys),
        ] {
            assert_eq!(
                f.evaluate(&sys, &state).unwrap(),
                chsh_value(&sys, &state).unwrap()
            );
        }
    }

    #[test]
    fn every_vertex_respects_the_algebraic_bound() {
        let sys = two_gbits();
        let vrep = enumerate_vertices(&sys, &VertexEnumOptions::default()).unwrap();
        assert_eq!(vrep.len(), 24);
        for vertex in vrep.vertices() {
            let v = chsh_value(&sys, &vertex.state).unwrap();
            assert!(v <= r(4, 1) && v >= r(-4, 1));
            if vertex.pure_product {
                assert!(v <= r(2, 1) && v >= r(-2, 1));
            }
        }
    }

    #[test]
    fn maximum_splits_local_from_nonlocal() {
        let sys = two_gbits();
        let f = chsh_functional(&sys).unwrap();
        let vrep = enumerate_vertices(&sys, &VertexEnumOptions::default()).unwrap();
        let (max, arg) = max_over_vertices(&sys, &f, &vrep).unwrap();
        assert_eq!(max, r(4, 1));
        assert!(!vrep.vertices()[arg].pure_product);

        let local_only: Vec<StateVector> = vrep
            .vertices()
            .iter()
            .filter(|v| v.pure_product)
            .map(|v| v.state.clone())
            .collect();
        let locals = PolytopeVRep::from_states(&sys, local_only).unwrap();
        assert_eq!(locals.len(), 16);
        let (max, _) = max_over_vertices(&sys, &f, &locals).unwrap();
        assert_eq!(max, r(2, 1));
    }

    #[test]
    fn zero_functional_maximizes_at_the_first_vertex() {
        let sys = two_gbits();
        let f = BellFunctional::zero(&sys).unwrap();
        let vrep = enumerate_vertices(&sys, &VertexEnumOptions::default()).unwrap();
        assert_eq!(
            max_over_vertices(&sys, &f, &vrep).unwrap(),
            (Rational::zero(), 0)
        );
    }

    #[test]
    fn variant_multiset_is_group_invariant() {
        let sys = two_gbits();
        let variants = chsh_variants(&sys).unwrap();
        assert_eq!(variants.len(), 8);
        let group = generate_group(&sys, &trivial_generators(&sys).unwrap()).unwrap();

        let values = |state: &StateVector| -> Vec<Rational> {
            let mut v: Vec<Rational> = variants
                .iter()
                .map(|f| f.evaluate(&sys, state).unwrap())
                .collect();
            v.sort();
            v
        };

        let pr = pr_box_state(&sys).unwrap();
        let det = deterministic(&sys);
        let z = Rational::zero();
        assert_eq!(
            values(&pr),
            vec![
                r(-4, 1),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z.clone(),
                z,
                r(4, 1)
            ]
        );
        assert_eq!(
            values(&det),
            vec![
                r(-2, 1),
                r(-2, 1),
                r(-2, 1),
                r(-2, 1),
                r(2, 1),
                r(2, 1),
                r(2, 1),
                r(2, 1)
            ]
        );

        for state in [pr, det] {
            let reference = values(&state);
            for map in group.iter() {
                assert_eq!(values(&map.apply(&state).unwrap()), reference);
            }
        }
    }

    #[test]
    fn functional_domain_is_validated() {
        let sys = two_gbits();
        let one = || Rational::one();

        let short = vec![(vec![0, 0], vec![0, 0], one())];
        assert!(matches!(
            BellFunctional::new(&sys, short),
            Err(Error::IncompleteTable { .. })
        ));

        let mut doubled = Vec::new();
        for settings in sys.setting_strings() {
            for outcomes in sys.outcome_strings(&settings).unwrap() {
                doubled.push((settings.clone(), outcomes, one()));
            }
        }
        doubled.push((vec![0, 0], vec![0, 0], one()));
        assert!(matches!(
            BellFunctional::new(&sys, doubled),
            Err(Error::DuplicateTableEntry { .. })
        ));

        let bad = vec![(vec![0, 0], vec![0, 5], one())];
        assert!(matches!(
            BellFunctional::new(&sys, bad),
            Err(Error::InvalidOutcome { .. })
        ));
    }

    #[test]
    fn correlators_require_two_gbits() {
        let gbit = SystemSpec::gbits(1).unwrap();
        let local = local_pure_state(gbit.site(0), &[0, 0]).unwrap();
        let state = product_state(&gbit, &[local]).unwrap();
        assert!(matches!(
            chsh_value(&gbit, &state),
            Err(Error::WrongSystem { .. })
        ));

        let hybrid = SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap();
        assert!(matches!(
            chsh_functional(&hybrid),
            Err(Error::WrongSystem { .. })
        ));
    }
}
