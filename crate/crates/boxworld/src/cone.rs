//! Exact cone-membership tests with nonnegative-combination certificates.
//!
//! Membership in the cone generated by the extremal effects is decided by a
//! phase-1 simplex over the rationals.  Bland's rule keeps pivoting finite;
//! exact arithmetic makes both the verdict and the certificate authoritative.

use crate::linalg::Vector;
use crate::rational::Rational;
use crate::theory::{ProductEffectLabel, SystemSpec};
use crate::{Error, Result};

/// Result of a cone-membership test.  `Inside` carries the nonzero weights
/// of one nonnegative combination of extremal effects reproducing the
/// queried effect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeMembership {
    Inside {
        certificate: Vec<(ProductEffectLabel, Rational)>,
    },
    Outside,
}

impl ConeMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, ConeMembership::Inside { .. })
    }
}

/// Decides whether `effect` lies in the cone spanned by the extremal
/// effects of `sys`.
pub fn cone_member(sys: &SystemSpec, effect: &Vector) -> Result<ConeMembership> {
    if effect.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: effect.dim(),
        });
    }
    let labels = sys.extremal_effect_labels();
    let columns: Vec<Vector> = labels
        .iter()
        .map(|l| sys.product_effect_coeffs(l))
        .collect::<Result<_>>()?;
    match nonneg_combination(&columns, effect) {
        Some(lambda) => {
            let certificate = labels
                .into_iter()
                .zip(lambda)
                .filter(|(_, w)| !w.is_zero())
                .collect();
            Ok(ConeMembership::Inside { certificate })
        }
        None => Ok(ConeMembership::Outside),
    }
}

pub fn is_in_cone(sys: &SystemSpec, effect: &Vector) -> Result<bool> {
    Ok(cone_member(sys, effect)?.is_inside())
}

/// Re-checks a membership certificate from first principles: all weights
/// nonnegative and the weighted sum equal to `effect`.
pub fn verify_cone_certificate(
    sys: &SystemSpec,
    effect: &Vector,
    certificate: &[(ProductEffectLabel, Rational)],
) -> Result<bool> {
    if effect.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: effect.dim(),
        });
    }
    let mut total = Vector::zeros(sys.dim());
    for (label, weight) in certificate {
        if weight.is_negative() {
            return Ok(false);
        }
        total = total.add(&sys.product_effect_coeffs(label)?.scale(weight));
    }
    Ok(&total == effect)
}

/// Finds `λ ≥ 0` with `Σ λⱼ·columns[j] = target`, if any exists, by a
/// phase-1 simplex minimizing the sum of artificial variables.  Entering
/// and leaving choices follow Bland's rule, so the pivoting terminates.
pub(crate) fn nonneg_combination(columns: &[Vector], target: &Vector) -> Option<Vec<Rational>> {
    let d = target.dim();
    let n = columns.len();
    debug_assert!(columns.iter().all(|c| c.dim() == d));

    // Tableau rows scaled so the right-hand side starts nonnegative; the
    // artificial variable of row i occupies column n + i.
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(d);
    let mut rhs: Vec<Rational> = Vec::with_capacity(d);
    for i in 0..d {
        let flip = target[i].is_negative();
        let mut row: Vec<Rational> = (0..n)
            .map(|j| {
                if flip {
                    -&columns[j][i]
                } else {
                    columns[j][i].clone()
                }
            })
            .collect();
        for k in 0..d {
            row.push(if k == i {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
        t.push(row);
        rhs.push(if flip { -&target[i] } else { target[i].clone() });
    }
    let mut basis: Vec<usize> = (n..n + d).collect();
    // Reduced costs for the phase-1 objective.
    let mut obj: Vec<Rational> = (0..n + d)
        .map(|j| {
            if j < n {
                -(0..d).map(|i| t[i][j].clone()).sum::<Rational>()
            } else {
                Rational::zero()
            }
        })
        .collect();

    while let Some(enter) = (0..n + d).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..d {
            if t[i][enter].is_positive() {
                let ratio = &rhs[i] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let r = leave.expect("the phase-1 objective is bounded below");
        let inv = Rational::one() / t[r][enter].clone();
        for v in &mut t[r] {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        rhs[r] *= &inv;
        let pivot_row = t[r].clone();
        let pivot_rhs = rhs[r].clone();
        for i in 0..d {
            if i != r && !t[i][enter].is_zero() {
                let f = t[i][enter].clone();
                for (v, p) in t[i].iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
                rhs[i] -= &f * &pivot_rhs;
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        basis[r] = enter;
    }

    let feasible = basis.iter().zip(&rhs).all(|(&b, v)| b < n || v.is_zero());
    if !feasible {
        return None;
    }
    let mut lambda = vec![Rational::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            lambda[b] = rhs[i].clone();
        }
    }
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{LocalEffectLabel, SiteSpec};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn label(pairs: &[(usize, usize)]) -> ProductEffectLabel {
        ProductEffectLabel::new(
            pairs
                .iter()
                .map(|&(m, k)| LocalEffectLabel::new(m, k))
                .collect(),
        )
    }

    fn gbit_sys() -> SystemSpec {
        SystemSpec::gbits(1).unwrap()
    }

    fn coeffs(sys: &SystemSpec, pairs: &[(usize, usize)]) -> Vector {
        sys.product_effect_coeffs(&label(pairs)).unwrap()
    }

    #[test]
    fn extremal_effects_certify_themselves() {
        let sys = gbit_sys();
        let x = coeffs(&sys, &[(0, 0)]);
        let ConeMembership::Inside { certificate } = cone_member(&sys, &x).unwrap() else {
            panic!("extremal effect must lie in the cone");
        };
        assert_eq!(certificate, vec![(label(&[(0, 0)]), Rational::one())]);
        assert!(verify_cone_certificate(&sys, &x, &certificate).unwrap());
    }

    #[test]
    fn unit_effect_is_inside_with_a_verifiable_certificate() {
        for sys in [
            gbit_sys(),
            SystemSpec::gbits(2).unwrap(),
            SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap(),
            SystemSpec::single(SiteSpec::new(vec![2, 3]).unwrap()),
        ] {
            let unit = sys.identity_coeffs();
            let ConeMembership::Inside { certificate } = cone_member(&sys, &unit).unwrap() else {
                panic!("unit must lie in the cone for {}", sys.describe());
            };
            assert!(verify_cone_certificate(&sys, &unit, &certificate).unwrap());
        }
    }

    #[test]
    fn unit_minus_two_heads_is_outside() {
        // 1̄ − X₀(0) − X₁(0) evaluates to −1 on the state answering both
        // measurements with their first outcome, so it cannot be in the cone.
        let sys = gbit_sys();
        let b = sys
            .identity_coeffs()
            .sub(&coeffs(&sys, &[(0, 0)]))
            .sub(&coeffs(&sys, &[(1, 0)]));
        assert_eq!(cone_member(&sys, &b).unwrap(), ConeMembership::Outside);
    }

    #[test]
    fn negated_effects_are_outside() {
        let sys = gbit_sys();
        let neg = coeffs(&sys, &[(0, 0)]).scale(&Rational::from_int(-1));
        assert!(!is_in_cone(&sys, &neg).unwrap());
        let diff = coeffs(&sys, &[(0, 0)]).sub(&coeffs(&sys, &[(1, 0)]));
        assert!(!is_in_cone(&sys, &diff).unwrap());
    }

    #[test]
    fn zero_effect_is_inside_with_an_empty_certificate() {
        let sys = gbit_sys();
        let ConeMembership::Inside { certificate } = cone_member(&sys, &Vector::zeros(3)).unwrap()
        else {
            panic!("zero lies in every cone");
        };
        assert!(certificate.is_empty());
    }

    #[test]
    fn random_nonnegative_combinations_come_back_inside() {
        // Deterministic pseudo-random weights: a small linear congruence.
        let mut seed = 11u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 33) % 5
        };
        for sys in [
            gbit_sys(),
            SystemSpec::gbits(2).unwrap(),
            SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap(),
        ] {
            let labels = sys.extremal_effect_labels();
            for _ in 0..10 {
                let mut target = Vector::zeros(sys.dim());
                for l in &labels {
                    let w = Rational::new(next() as i64, 3);
                    target = target.add(&sys.product_effect_coeffs(l).unwrap().scale(&w));
                }
                let ConeMembership::Inside { certificate } = cone_member(&sys, &target).unwrap()
                else {
                    panic!("constructed combination must be inside");
                };
                assert!(verify_cone_certificate(&sys, &target, &certificate).unwrap());
            }
        }
    }

    #[test]
    fn certificate_verification_rejects_wrong_data() {
        let sys = gbit_sys();
        let x = coeffs(&sys, &[(0, 0)]);
        let wrong_weight = vec![(label(&[(0, 0)]), r(1, 2))];
        assert!(!verify_cone_certificate(&sys, &x, &wrong_weight).unwrap());
        let negative = vec![(label(&[(0, 0)]), r(-1, 1))];
        assert!(!verify_cone_certificate(&sys, &x.scale(&r(-1, 1)), &negative).unwrap());
        assert!(matches!(
            cone_member(&sys, &Vector::zeros(7)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
