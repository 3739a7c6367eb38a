//! Sites, systems, the canonical effect basis, extremal product effects, and
//! exact Gram data.
//!
//! A site offers a finite set of measurements, each with a finite number of
//! outcomes.  Its effect space has one basis slot per measurement for all but
//! the last outcome, plus a final slot for the unit effect, so a site with
//! outcome counts `K(0..M)` has local dimension `Σ (K(m) − 1) + 1`.  A system
//! is a tensor product of sites; flattened indices are site-major (the first
//! site is most significant).

use std::fmt;

use crate::linalg::{tensor, Matrix, RowSpan, Vector};
use crate::rational::Rational;
use crate::{Error, Result};

/// One site: outcome counts, one per measurement.  Every measurement has at
/// least two outcomes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SiteSpec {
    outcome_counts: Vec<usize>,
}

impl SiteSpec {
    pub fn new(outcome_counts: Vec<usize>) -> Result<Self> {
        if outcome_counts.is_empty() {
            return Err(Error::NoMeasurements);
        }
        for (m, &k) in outcome_counts.iter().enumerate() {
            if k < 2 {
                return Err(Error::TooFewOutcomes {
                    measurement: m,
                    outcomes: k,
                });
            }
        }
        Ok(SiteSpec { outcome_counts })
    }

    /// `measurements` measurements with `outcomes` outcomes each.
    pub fn uniform(measurements: usize, outcomes: usize) -> Result<Self> {
        SiteSpec::new(vec![outcomes; measurements])
    }

    /// Two binary measurements: the smallest genuinely non-classical site.
    pub fn gbit() -> Self {
        SiteSpec::uniform(2, 2).unwrap()
    }

    /// A single binary measurement.
    pub fn classical_bit() -> Self {
        SiteSpec::uniform(1, 2).unwrap()
    }

    pub fn measurements(&self) -> usize {
        self.outcome_counts.len()
    }

    pub fn outcomes(&self, measurement: usize) -> usize {
        self.outcome_counts[measurement]
    }

    pub fn outcome_counts(&self) -> &[usize] {
        &self.outcome_counts
    }

    /// A site with a single measurement carries no incompatibility.
    pub fn is_classical(&self) -> bool {
        self.outcome_counts.len() == 1
    }

    /// `Some(k)` when every measurement has exactly `k` outcomes.
    pub fn uniform_outcome_count(&self) -> Option<usize> {
        let k = self.outcome_counts[0];
        self.outcome_counts.iter().all(|&x| x == k).then_some(k)
    }

    pub fn local_dim(&self) -> usize {
        self.outcome_counts.iter().map(|k| k - 1).sum::<usize>() + 1
    }

    pub fn local_effect_count(&self) -> usize {
        self.outcome_counts.iter().sum()
    }

    /// Basis slot of outcome `k` of measurement `m`, defined for `k ≤ K(m)−2`.
    pub(crate) fn slot(&self, measurement: usize, outcome: usize) -> usize {
        debug_assert!(outcome + 1 < self.outcome_counts[measurement]);
        self.outcome_counts[..measurement]
            .iter()
            .map(|k| k - 1)
            .sum::<usize>()
            + outcome
    }

    pub fn identity_slot(&self) -> usize {
        self.local_dim() - 1
    }

    pub fn local_effect_labels(&self) -> Vec<LocalEffectLabel> {
        let mut labels = Vec::with_capacity(self.local_effect_count());
        for (m, &k) in self.outcome_counts.iter().enumerate() {
            for outcome in 0..k {
                labels.push(LocalEffectLabel {
                    measurement: m,
                    outcome,
                });
            }
        }
        labels
    }

    /// Coefficients of one measurement-outcome effect on the local basis.
    /// The last outcome of each measurement is the unit minus the others.
    pub fn local_effect_coeffs(&self, label: LocalEffectLabel) -> Result<Vector> {
        self.check_label(0, label)?;
        let mut entries = vec![Rational::zero(); self.local_dim()];
        let k = self.outcome_counts[label.measurement];
        if label.outcome + 1 < k {
            entries[self.slot(label.measurement, label.outcome)] = Rational::one();
        } else {
            entries[self.identity_slot()] = Rational::one();
            for o in 0..k - 1 {
                entries[self.slot(label.measurement, o)] = Rational::from_int(-1);
            }
        }
        Ok(Vector::new(entries))
    }

    pub fn local_identity_coeffs(&self) -> Vector {
        let mut entries = vec![Rational::zero(); self.local_dim()];
        entries[self.identity_slot()] = Rational::one();
        Vector::new(entries)
    }

    fn check_label(&self, site: usize, label: LocalEffectLabel) -> Result<()> {
        if label.measurement >= self.measurements()
            || label.outcome >= self.outcome_counts[label.measurement]
        {
            return Err(Error::InvalidLabel {
                site,
                measurement: label.measurement,
                outcome: label.outcome,
            });
        }
        Ok(())
    }

    /// Exact overlap of two local measurement-outcome effects in the
    /// maximally symmetric representation: with `M` measurements and
    /// outcome counts `K`,
    /// distinct measurements give `1/(K(m)K(m'))`, distinct outcomes of one
    /// measurement give `(1−M)/K(m)²`, and a label with itself gives
    /// `(1+M(K(m)−1))/K(m)²`.
    pub fn gram_local(&self, a: LocalEffectLabel, b: LocalEffectLabel) -> Result<Rational> {
        self.check_label(0, a)?;
        self.check_label(0, b)?;
        let m_count = self.measurements() as i64;
        let ka = self.outcome_counts[a.measurement] as i64;
        let kb = self.outcome_counts[b.measurement] as i64;
        Ok(if a.measurement != b.measurement {
            Rational::new(1, ka * kb)
        } else if a.outcome != b.outcome {
            Rational::new(1 - m_count, ka * ka)
        } else {
            Rational::new(1 + m_count * (ka - 1), ka * ka)
        })
    }

    /// Per-site Gram data over [`SiteSpec::local_effect_labels`].
    pub fn gram_table(&self) -> GramTable {
        let labels = self.local_effect_labels();
        let n = labels.len();
        let mut table = Matrix::zeros(n, n);
        for (i, &a) in labels.iter().enumerate() {
            for (j, &b) in labels.iter().enumerate() {
                table.set(i, j, self.gram_local(a, b).unwrap());
            }
        }
        GramTable { labels, table }
    }
}

/// One outcome of one measurement at a single site.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LocalEffectLabel {
    pub measurement: usize,
    pub outcome: usize,
}

impl LocalEffectLabel {
    pub fn new(measurement: usize, outcome: usize) -> Self {
        LocalEffectLabel {
            measurement,
            outcome,
        }
    }
}

impl fmt::Display for LocalEffectLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}o{}", self.measurement, self.outcome)
    }
}

/// A product of local measurement-outcome effects, one per site.  These are
/// the extremal effects of the system.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ProductEffectLabel {
    locals: Vec<LocalEffectLabel>,
}

impl ProductEffectLabel {
    pub fn new(locals: Vec<LocalEffectLabel>) -> Self {
        ProductEffectLabel { locals }
    }

    pub fn locals(&self) -> &[LocalEffectLabel] {
        &self.locals
    }

    pub fn site(&self, i: usize) -> LocalEffectLabel {
        self.locals[i]
    }

    pub fn num_sites(&self) -> usize {
        self.locals.len()
    }
}

impl fmt::Display for ProductEffectLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.locals.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Square table of local-effect overlaps for one site; the label list fixes
/// row and column order.
#[derive(Clone, Debug)]
pub struct GramTable {
    labels: Vec<LocalEffectLabel>,
    table: Matrix,
}

impl GramTable {
    pub fn labels(&self) -> &[LocalEffectLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &Matrix {
        &self.table
    }
}

/// A tensor product of sites.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SystemSpec {
    sites: Vec<SiteSpec>,
    dim: usize,
}

impl SystemSpec {
    pub fn new(sites: Vec<SiteSpec>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::NoSites);
        }
        let mut dim = 1usize;
        for site in &sites {
            dim = dim
                .checked_mul(site.local_dim())
                .ok_or(Error::DimensionOverflow)?;
        }
        // The extremal effect count must stay addressable as well.
        let mut effects = 1usize;
        for site in &sites {
            effects = effects
                .checked_mul(site.local_effect_count())
                .ok_or(Error::DimensionOverflow)?;
        }
        Ok(SystemSpec { sites, dim })
    }

    pub fn single(site: SiteSpec) -> Self {
        SystemSpec::new(vec![site]).unwrap()
    }

    /// `n` g-bit sites.
    pub fn gbits(n: usize) -> Result<Self> {
        SystemSpec::new(vec![SiteSpec::gbit(); n])
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn site(&self, i: usize) -> &SiteSpec {
        &self.sites[i]
    }

    pub fn sites(&self) -> &[SiteSpec] {
        &self.sites
    }

    /// Dimension of the effect space (and of state vectors).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the state polytope: states are normalized, so one
    /// coordinate is pinned.
    pub fn affine_dim(&self) -> usize {
        self.dim - 1
    }

    /// Flattened index of the all-sites unit effect.
    pub fn identity_index(&self) -> usize {
        self.dim - 1
    }

    pub fn identity_coeffs(&self) -> Vector {
        let mut entries = vec![Rational::zero(); self.dim];
        entries[self.identity_index()] = Rational::one();
        Vector::new(entries)
    }

    pub fn extremal_effect_count(&self) -> usize {
        self.sites
            .iter()
            .map(SiteSpec::local_effect_count)
            .product()
    }

    /// All extremal effects in lexicographic order: site-major, then
    /// measurement, then outcome.  The order agrees with `Ord` on the labels.
    pub fn extremal_effect_labels(&self) -> Vec<ProductEffectLabel> {
        let per_site: Vec<Vec<LocalEffectLabel>> = self
            .sites
            .iter()
            .map(SiteSpec::local_effect_labels)
            .collect();
        let mut out = Vec::with_capacity(self.extremal_effect_count());
        let mut current = Vec::with_capacity(self.sites.len());
        fn rec(
            per_site: &[Vec<LocalEffectLabel>],
            current: &mut Vec<LocalEffectLabel>,
            out: &mut Vec<ProductEffectLabel>,
        ) {
            if current.len() == per_site.len() {
                out.push(ProductEffectLabel::new(current.clone()));
                return;
            }
            for &l in &per_site[current.len()] {
                current.push(l);
                rec(per_site, current, out);
                current.pop();
            }
        }
        rec(&per_site, &mut current, &mut out);
        out
    }

    pub fn check_label(&self, label: &ProductEffectLabel) -> Result<()> {
        if label.num_sites() != self.num_sites() {
            return Err(Error::LabelArity {
                expected: self.num_sites(),
                found: label.num_sites(),
            });
        }
        for (i, site) in self.sites.iter().enumerate() {
            site.check_label(i, label.site(i))?;
        }
        Ok(())
    }

    /// Coefficients of an extremal effect on the product basis.
    pub fn product_effect_coeffs(&self, label: &ProductEffectLabel) -> Result<Vector> {
        self.check_label(label)?;
        let mut acc: Option<Vector> = None;
        for (site, &l) in self.sites.iter().zip(label.locals()) {
            let local = site.local_effect_coeffs(l)?;
            acc = Some(match acc {
                None => local,
                Some(v) => tensor(&v, &local),
            });
        }
        Ok(acc.unwrap())
    }

    /// Stacks the coefficient rows of every extremal effect, in label order.
    pub fn extremal_effect_matrix(&self) -> Matrix {
        let labels = self.extremal_effect_labels();
        let mut m = Matrix::zeros(labels.len(), self.dim);
        for (i, label) in labels.iter().enumerate() {
            let coeffs = self.product_effect_coeffs(label).unwrap();
            for j in 0..self.dim {
                m.set(i, j, coeffs[j].clone());
            }
        }
        m
    }

    /// Indices (into [`SystemSpec::extremal_effect_labels`]) of the first
    /// lexicographic subset of extremal effects spanning the effect space.
    pub fn spanning_effect_indices(&self) -> Vec<usize> {
        let labels = self.extremal_effect_labels();
        let mut span = RowSpan::new(self.dim);
        let mut picked = Vec::with_capacity(self.dim);
        for (i, label) in labels.iter().enumerate() {
            if span.rank() == self.dim {
                break;
            }
            let coeffs = self.product_effect_coeffs(label).unwrap();
            if span.try_insert(&coeffs) {
                picked.push(i);
            }
        }
        assert_eq!(picked.len(), self.dim, "extremal effects must span");
        picked
    }

    /// All measurement-settings strings in lexicographic order (site-major).
    pub fn setting_strings(&self) -> Vec<Vec<usize>> {
        cartesian(
            &self
                .sites
                .iter()
                .map(SiteSpec::measurements)
                .collect::<Vec<_>>(),
        )
    }

    /// All outcome strings for fixed settings, in lexicographic order.
    pub fn outcome_strings(&self, settings: &[usize]) -> Result<Vec<Vec<usize>>> {
        self.check_settings(settings)?;
        let counts: Vec<usize> = self
            .sites
            .iter()
            .zip(settings)
            .map(|(site, &m)| site.outcomes(m))
            .collect();
        Ok(cartesian(&counts))
    }

    pub fn check_settings(&self, settings: &[usize]) -> Result<()> {
        if settings.len() != self.num_sites() {
            return Err(Error::LabelArity {
                expected: self.num_sites(),
                found: settings.len(),
            });
        }
        for (i, (&m, site)) in settings.iter().zip(&self.sites).enumerate() {
            if m >= site.measurements() {
                return Err(Error::InvalidSetting {
                    site: i,
                    setting: m,
                    measurements: site.measurements(),
                });
            }
        }
        Ok(())
    }

    pub fn check_outcomes(&self, settings: &[usize], outcomes: &[usize]) -> Result<()> {
        self.check_settings(settings)?;
        if outcomes.len() != self.num_sites() {
            return Err(Error::LabelArity {
                expected: self.num_sites(),
                found: outcomes.len(),
            });
        }
        for (i, ((&m, &k), site)) in settings.iter().zip(outcomes).zip(&self.sites).enumerate() {
            if k >= site.outcomes(m) {
                return Err(Error::InvalidOutcome {
                    site: i,
                    setting: m,
                    outcome: k,
                });
            }
        }
        Ok(())
    }

    pub fn label_for(&self, settings: &[usize], outcomes: &[usize]) -> Result<ProductEffectLabel> {
        self.check_outcomes(settings, outcomes)?;
        Ok(ProductEffectLabel::new(
            settings
                .iter()
                .zip(outcomes)
                .map(|(&m, &k)| LocalEffectLabel::new(m, k))
                .collect(),
        ))
    }

    /// Number of `(settings, outcomes)` pairs in a complete probability table.
    pub fn table_entry_count(&self) -> usize {
        self.setting_strings()
            .iter()
            .map(|s| {
                s.iter()
                    .zip(&self.sites)
                    .map(|(&m, site)| site.outcomes(m))
                    .product::<usize>()
            })
            .sum()
    }

    /// Exact overlap of two extremal effects: the product of per-site
    /// overlaps.
    pub fn gram_product(&self, a: &ProductEffectLabel, b: &ProductEffectLabel) -> Result<Rational> {
        self.check_label(a)?;
        self.check_label(b)?;
        let mut acc = Rational::one();
        for (site, (&la, &lb)) in self.sites.iter().zip(a.locals().iter().zip(b.locals())) {
            acc *= site.gram_local(la, lb)?;
        }
        Ok(acc)
    }

    /// Short human-readable shape summary, e.g. `[[2,2],[2]]`.
    pub fn describe(&self) -> String {
        let mut s = String::from("[");
        for (i, site) in self.sites.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push('[');
            for (j, k) in site.outcome_counts.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&k.to_string());
            }
            s.push(']');
        }
        s.push(']');
        s
    }
}

/// Sites at which two extremal effects carry different local labels.
pub fn hamming(a: &ProductEffectLabel, b: &ProductEffectLabel) -> Result<usize> {
    if a.num_sites() != b.num_sites() {
        return Err(Error::LabelArity {
            expected: a.num_sites(),
            found: b.num_sites(),
        });
    }
    Ok(a.locals()
        .iter()
        .zip(b.locals())
        .filter(|(x, y)| x != y)
        .count())
}

/// Gram matrix of `n + 1` unit vectors pointing to the corners of a regular
/// simplex in `n` dimensions: ones on the diagonal, `−1/n` off it.
pub fn simplex_gram(n: usize) -> Matrix {
    assert!(n >= 1, "simplex needs at least one dimension");
    let mut g = Matrix::zeros(n + 1, n + 1);
    let off = Rational::new(-1, n as i64);
    for i in 0..=n {
        for j in 0..=n {
            g.set(i, j, if i == j { Rational::one() } else { off.clone() });
        }
    }
    g
}

pub(crate) fn cartesian(counts: &[usize]) -> Vec<Vec<usize>> {
    let total = counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut current = vec![0usize; counts.len()];
    loop {
        out.push(current.clone());
        let mut pos = counts.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < counts[pos] {
                break;
            }
            current[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ints(vals: &[i64]) -> Vector {
        Vector::new(vals.iter().map(|&n| Rational::from_int(n)).collect())
    }

    fn label(pairs: &[(usize, usize)]) -> ProductEffectLabel {
        ProductEffectLabel::new(
            pairs
                .iter()
                .map(|&(m, k)| LocalEffectLabel::new(m, k))
                .collect(),
        )
    }

    #[test]
    fn site_validation() {
        assert!(matches!(SiteSpec::new(vec![]), Err(Error::NoMeasurements)));
        assert!(matches!(
            SiteSpec::new(vec![2, 1]),
            Err(Error::TooFewOutcomes {
                measurement: 1,
                outcomes: 1
            })
        ));
        assert!(matches!(SystemSpec::new(vec![]), Err(Error::NoSites)));
    }

    #[test]
    fn dimensions() {
        assert_eq!(SiteSpec::gbit().local_dim(), 3);
        assert_eq!(SiteSpec::classical_bit().local_dim(), 2);
        assert_eq!(SiteSpec::new(vec![2, 3]).unwrap().local_dim(), 4);
        assert_eq!(SiteSpec::uniform(3, 2).unwrap().local_dim(), 4);

        let two_gbits = SystemSpec::gbits(2).unwrap();
        assert_eq!(two_gbits.dim(), 9);
        assert_eq!(two_gbits.affine_dim(), 8);
        assert_eq!(two_gbits.identity_index(), 8);
        assert_eq!(two_gbits.extremal_effect_count(), 16);

        let hybrid = SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap();
        assert_eq!(hybrid.dim(), 6);
        assert_eq!(hybrid.extremal_effect_count(), 8);

        assert_eq!(SystemSpec::gbits(1).unwrap().extremal_effect_count(), 4);
        assert_eq!(
            SystemSpec::single(SiteSpec::uniform(2, 3).unwrap()).extremal_effect_count(),
            6
        );
    }

    #[test]
    fn uniformity_flags() {
        assert_eq!(SiteSpec::gbit().uniform_outcome_count(), Some(2));
        assert_eq!(
            SiteSpec::new(vec![2, 3]).unwrap().uniform_outcome_count(),
            None
        );
        assert!(SiteSpec::classical_bit().is_classical());
        assert!(!SiteSpec::gbit().is_classical());
    }

    #[test]
    fn gbit_local_coefficients() {
        let g = SiteSpec::gbit();
        let c = |m, k| g.local_effect_coeffs(LocalEffectLabel::new(m, k)).unwrap();
        assert_eq!(c(0, 0), ints(&[1, 0, 0]));
        assert_eq!(c(0, 1), ints(&[-1, 0, 1]));
        assert_eq!(c(1, 0), ints(&[0, 1, 0]));
        assert_eq!(c(1, 1), ints(&[0, -1, 1]));
        assert_eq!(g.local_identity_coeffs(), ints(&[0, 0, 1]));
    }

    #[test]
    fn three_outcome_coefficients() {
        let site = SiteSpec::new(vec![3]).unwrap();
        let c = |m, k| {
            site.local_effect_coeffs(LocalEffectLabel::new(m, k))
                .unwrap()
        };
        assert_eq!(c(0, 0), ints(&[1, 0, 0]));
        assert_eq!(c(0, 1), ints(&[0, 1, 0]));
        assert_eq!(c(0, 2), ints(&[-1, -1, 1]));
    }

    #[test]
    fn product_coefficients() {
        let sys = SystemSpec::gbits(2).unwrap();
        let e00 = sys
            .product_effect_coeffs(&label(&[(0, 0), (0, 0)]))
            .unwrap();
        assert_eq!(e00, ints(&[1, 0, 0, 0, 0, 0, 0, 0, 0]));
        let mixed = sys
            .product_effect_coeffs(&label(&[(0, 1), (1, 0)]))
            .unwrap();
        assert_eq!(mixed, ints(&[0, -1, 0, 0, 0, 0, 0, 1, 0]));
        assert_eq!(sys.identity_coeffs(), ints(&[0, 0, 0, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn identity_is_the_tensor_of_local_identities() {
        for sys in [
            SystemSpec::gbits(2).unwrap(),
            SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap(),
            SystemSpec::new(vec![
                SiteSpec::new(vec![2, 3]).unwrap(),
                SiteSpec::uniform(3, 2).unwrap(),
            ])
            .unwrap(),
        ] {
            let mut acc: Option<Vector> = None;
            for site in sys.sites() {
                let local = site.local_identity_coeffs();
                acc = Some(match acc {
                    None => local,
                    Some(v) => tensor(&v, &local),
                });
            }
            assert_eq!(acc.unwrap(), sys.identity_coeffs());
        }
    }

    #[test]
    fn unit_decomposes_over_every_measurement_string() {
        for sys in [
            SystemSpec::gbits(1).unwrap(),
            SystemSpec::gbits(2).unwrap(),
            SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap(),
            SystemSpec::single(SiteSpec::new(vec![2, 3]).unwrap()),
            SystemSpec::new(vec![
                SiteSpec::new(vec![3, 2, 2]).unwrap(),
                SiteSpec::uniform(2, 3).unwrap(),
            ])
            .unwrap(),
        ] {
            for settings in sys.setting_strings() {
                let mut total = Vector::zeros(sys.dim());
                for outcomes in sys.outcome_strings(&settings).unwrap() {
                    let l = sys.label_for(&settings, &outcomes).unwrap();
                    total = total.add(&sys.product_effect_coeffs(&l).unwrap());
                }
                assert_eq!(total, sys.identity_coeffs(), "settings {settings:?}");
            }
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let sys = SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap();
        let labels = sys.extremal_effect_labels();
        assert_eq!(labels.len(), 8);
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(sorted, labels);
        assert_eq!(labels[0], label(&[(0, 0), (0, 0)]));
        assert_eq!(labels[1], label(&[(0, 0), (0, 1)]));
        assert_eq!(labels[7], label(&[(1, 1), (0, 1)]));
        assert_eq!(labels[0].to_string(), "m0o0*m0o0");
    }

    #[test]
    fn label_validation() {
        let sys = SystemSpec::gbits(2).unwrap();
        assert!(matches!(
            sys.check_label(&label(&[(0, 0)])),
            Err(Error::LabelArity {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            sys.check_label(&label(&[(0, 0), (2, 0)])),
            Err(Error::InvalidLabel {
                site: 1,
                measurement: 2,
                outcome: 0
            })
        ));
        assert!(matches!(
            sys.check_outcomes(&[0, 0], &[0, 2]),
            Err(Error::InvalidOutcome {
                site: 1,
                setting: 0,
                outcome: 2
            })
        ));
        assert!(matches!(
            sys.check_settings(&[0, 5]),
            Err(Error::InvalidSetting {
                site: 1,
                setting: 5,
                measurements: 2
            })
        ));
    }

    #[test]
    fn simplex_gram_shape() {
        let g1 = simplex_gram(1);
        assert_eq!(
            g1,
            Matrix::from_rows(vec![vec![r(1, 1), r(-1, 1)], vec![r(-1, 1), r(1, 1)],])
        );
        for n in 1..=4usize {
            let g = simplex_gram(n);
            assert_eq!(g.rank(), n);
            let mut trace = Rational::zero();
            for i in 0..=n {
                trace += g.get(i, i);
                let row_sum: Rational = g.row(i).iter().cloned().sum();
                assert!(row_sum.is_zero());
            }
            assert_eq!(trace, Rational::from_int(n as i64 + 1));
            // G = (n+1)/n · (I − J/(n+1)), which is positive semidefinite of
            // rank n: eigenvalue 0 on the all-ones vector, (n+1)/n elsewhere.
            let scale = r(n as i64 + 1, n as i64);
            for i in 0..=n {
                for j in 0..=n {
                    let id = if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    let expect = &scale * &(id - r(1, n as i64 + 1));
                    assert_eq!(g.get(i, j), &expect);
                }
            }
        }
    }

    #[test]
    fn gram_values_for_small_sites() {
        let cases = [
            // (measurements, outcomes, distinct-measurement, distinct-outcome, same-label)
            (2usize, 2usize, r(1, 4), r(-1, 4), r(3, 4)),
            (3, 2, r(1, 4), r(-1, 2), r(1, 1)),
            (2, 3, r(1, 9), r(-1, 9), r(5, 9)),
        ];
        for (m, k, cross, clash, same) in cases {
            let site = SiteSpec::uniform(m, k).unwrap();
            let g = |a: (usize, usize), b: (usize, usize)| {
                site.gram_local(
                    LocalEffectLabel::new(a.0, a.1),
                    LocalEffectLabel::new(b.0, b.1),
                )
                .unwrap()
            };
            assert_eq!(g((0, 0), (1, 0)), cross, "M={m} K={k}");
            assert_eq!(g((0, 0), (0, 1)), clash, "M={m} K={k}");
            assert_eq!(g((0, 0), (0, 0)), same, "M={m} K={k}");
        }
    }

    #[test]
    fn gram_outcome_sums_match_the_unit_overlap() {
        // Summing the overlaps of all outcomes of one measurement against a
        // fixed effect must give the unit overlap 1/K(m'), for every choice
        // of the summed measurement.
        for site in [
            SiteSpec::gbit(),
            SiteSpec::uniform(3, 2).unwrap(),
            SiteSpec::uniform(2, 3).unwrap(),
            SiteSpec::new(vec![2, 3]).unwrap(),
            SiteSpec::new(vec![3, 2, 4]).unwrap(),
        ] {
            for b in site.local_effect_labels() {
                let unit_overlap = r(1, site.outcomes(b.measurement) as i64);
                for m in 0..site.measurements() {
                    let total: Rational = (0..site.outcomes(m))
                        .map(|k| site.gram_local(LocalEffectLabel::new(m, k), b).unwrap())
                        .sum();
                    assert_eq!(total, unit_overlap, "site {site:?} m={m} b={b}");
                }
            }
        }
    }

    #[test]
    fn product_gram_follows_site_distance_on_gbit_systems() {
        for n in 1..=3usize {
            let sys = SystemSpec::gbits(n).unwrap();
            let labels = sys.extremal_effect_labels();
            for a in &labels {
                for b in &labels {
                    let d = hamming(a, b).unwrap();
                    let expect = Rational::from_int(4).pow(-(n as i32))
                        * Rational::from_int(3).pow((n - d) as i32);
                    let got = sys.gram_product(a, b).unwrap();
                    assert_eq!(got.abs(), expect, "N={n} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn product_gram_spot_values() {
        let sys = SystemSpec::gbits(2).unwrap();
        let same = label(&[(0, 0), (0, 0)]);
        assert_eq!(sys.gram_product(&same, &same).unwrap(), r(9, 16));
        let cross = label(&[(0, 0), (1, 0)]);
        assert_eq!(sys.gram_product(&same, &cross).unwrap(), r(3, 16));
        let clash = label(&[(0, 0), (0, 1)]);
        assert_eq!(sys.gram_product(&same, &clash).unwrap(), r(-3, 16));
        let far = label(&[(1, 0), (1, 0)]);
        assert_eq!(sys.gram_product(&same, &far).unwrap(), r(1, 16));
    }

    #[test]
    fn hamming_distances() {
        let a = label(&[(0, 0), (0, 0)]);
        let b = label(&[(0, 0), (1, 1)]);
        let c = label(&[(1, 0), (0, 1)]);
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        assert_eq!(hamming(&a, &b).unwrap(), 1);
        assert_eq!(hamming(&a, &c).unwrap(), 2);
        assert!(hamming(&a, &label(&[(0, 0)])).is_err());
    }

    #[test]
    fn extremal_effects_span_the_effect_space() {
        for sys in [
            SystemSpec::gbits(1).unwrap(),
            SystemSpec::gbits(2).unwrap(),
            SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap(),
            SystemSpec::single(SiteSpec::new(vec![2, 3]).unwrap()),
        ] {
            assert_eq!(sys.extremal_effect_matrix().rank(), sys.dim());
            let picked = sys.spanning_effect_indices();
            assert_eq!(picked.len(), sys.dim());
        }
    }

    #[test]
    fn spanning_subset_of_two_gbits() {
        let sys = SystemSpec::gbits(2).unwrap();
        assert_eq!(
            sys.spanning_effect_indices(),
            vec![0, 1, 2, 4, 5, 6, 8, 9, 10]
        );
    }

    #[test]
    fn table_domain_sizes() {
        assert_eq!(SystemSpec::gbits(1).unwrap().table_entry_count(), 4);
        assert_eq!(SystemSpec::gbits(2).unwrap().table_entry_count(), 16);
        let mixed = SystemSpec::single(SiteSpec::new(vec![2, 3]).unwrap());
        assert_eq!(mixed.table_entry_count(), 5);
        assert_eq!(mixed.setting_strings(), vec![vec![0], vec![1]]);
        assert_eq!(
            mixed.outcome_strings(&[1]).unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn describe_shapes() {
        let sys = SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap();
        assert_eq!(sys.describe(), "[[2,2],[2]]");
    }
}
