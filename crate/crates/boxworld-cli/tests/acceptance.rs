//! End-to-end acceptance run: ten numbered checks covering the library's
//! headline facts and the CLI's determinism, each printing one
//! `[PASS]`/`[FAIL]` line (visible with `--nocapture`, and in the captured
//! output of any failing check).

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::{Command, Output};

use boxworld::bell::chsh_value;
use boxworld::cone::{cone_member, verify_cone_certificate, ConeMembership};
use boxworld::linalg::Vector;
use boxworld::rational::Rational;
use boxworld::search::{search_reversible_group, SearchOptions};
use boxworld::states::{
    evaluate, local_pure_state, pr_box_state, product_state, state_from_table, table_from_state,
    StateVector,
};
use boxworld::theory::{hamming, LocalEffectLabel, SiteSpec, SystemSpec};
use boxworld::transforms::{
    build_hybrid_cnot, generate_group, group_membership, is_reversible_allowed, trivial_generators,
};
use boxworld::verify::{verify_theorem1, verify_theorem2, VerdictStatus};
use boxworld::vertices::{enumerate_vertices, enumerate_vertices_oracle, VertexEnumOptions};

fn criterion(index: usize, description: &str, run: impl FnOnce()) {
    let result = catch_unwind(AssertUnwindSafe(run));
    match &result {
        Ok(()) => println!("[PASS] {index}/10 {description}"),
        Err(_) => println!("[FAIL] {index}/10 {description}"),
    }
    if let Err(payload) = result {
        resume_unwind(payload);
    }
}

fn r(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// Deterministic pseudo-random draws: a small linear congruence.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

fn gbit() -> SystemSpec {
    SystemSpec::gbits(1).unwrap()
}

fn two_gbits() -> SystemSpec {
    SystemSpec::gbits(2).unwrap()
}

fn hybrid() -> SystemSpec {
    SystemSpec::new(vec![SiteSpec::gbit(), SiteSpec::classical_bit()]).unwrap()
}

#[test]
fn local_gram_tables_take_their_three_frozen_values() {
    criterion(
        1,
        "local Gram tables for (2,2), (3,2), (2,3) match their frozen entries",
        || {
            let cases = [
                (2, 2, r(3, 4), r(-1, 4), r(1, 4)),
                (3, 2, r(1, 1), r(-1, 2), r(1, 4)),
                (2, 3, r(5, 9), r(-1, 9), r(1, 9)),
            ];
            for (measurements, outcomes, diagonal, same_measurement, cross) in cases {
                let site = SiteSpec::uniform(measurements, outcomes).unwrap();
                for a in site.local_effect_labels() {
                    for b in site.local_effect_labels() {
                        let expected = if a == b {
                            &diagonal
                        } else if a.measurement == b.measurement {
                            &same_measurement
                        } else {
                            &cross
                        };
                        assert_eq!(
                            site.gram_local(a, b).unwrap(),
                            *expected,
                            "({measurements},{outcomes}) overlap of {a} and {b}"
                        );
                    }
                }
            }
        },
    );
}

#[test]
fn overlap_magnitudes_follow_the_hamming_formula() {
    criterion(
        2,
        "extremal overlap magnitudes equal 3^(N-d)/4^N on up to three gbits",
        || {
            for n in 1..=3usize {
                let sys = SystemSpec::gbits(n).unwrap();
                let labels = sys.extremal_effect_labels();
                for a in &labels {
                    for b in &labels {
                        let d = hamming(a, b).unwrap();
                        let expected = r(3i64.pow((n - d) as u32), 4i64.pow(n as u32));
                        let overlap = sys.gram_product(a, b).unwrap();
                        let magnitude = if overlap.is_negative() {
                            -overlap
                        } else {
                            overlap
                        };
                        assert_eq!(magnitude, expected, "{n} gbits, {a} vs {b}");
                    }
                }
            }
        },
    );
}

#[test]
fn outcome_effects_sum_to_the_unit_on_random_systems() {
    criterion(
        3,
        "outcome effects sum to the unit on 10 random heterogeneous systems",
        || {
            let mut rng = Lcg(17);
            let mut built = 0;
            while built < 10 {
                let num_sites = 1 + rng.below(3);
                let sites: Vec<SiteSpec> = (0..num_sites)
                    .map(|_| {
                        let measurements = 1 + rng.below(3);
                        SiteSpec::new((0..measurements).map(|_| 2 + rng.below(3)).collect())
                            .unwrap()
                    })
                    .collect();
                let all_counts: Vec<usize> = sites
                    .iter()
                    .flat_map(|site| site.outcome_counts().to_vec())
                    .collect();
                if all_counts.iter().all(|&k| k == all_counts[0]) {
                    continue;
                }
                let sys = SystemSpec::new(sites).unwrap();
                if sys.dim() > 64 {
                    continue;
                }
                built += 1;

                for (i, site) in sys.sites().iter().enumerate() {
                    for m in 0..site.measurements() {
                        let mut total = Vector::zeros(site.local_dim());
                        for k in 0..site.outcomes(m) {
                            total = total.add(
                                &site
                                    .local_effect_coeffs(LocalEffectLabel::new(m, k))
                                    .unwrap(),
                            );
                        }
                        assert_eq!(
                            total,
                            site.local_identity_coeffs(),
                            "site {i}, measurement {m} of {}",
                            sys.describe()
                        );
                    }
                }
                for settings in sys.setting_strings() {
                    let mut total = Vector::zeros(sys.dim());
                    for outcomes in sys.outcome_strings(&settings).unwrap() {
                        let label = sys.label_for(&settings, &outcomes).unwrap();
                        total = total.add(&sys.product_effect_coeffs(&label).unwrap());
                    }
                    assert_eq!(
                        total,
                        sys.identity_coeffs(),
                        "settings {settings:?} of {}",
                        sys.describe()
                    );
                }
            }
        },
    );
}

#[test]
fn vertex_enumeration_matches_counts_and_oracle() {
    criterion(
        4,
        "vertex counts 4 / 9 / 24 (16 pure-product) agree with the subset oracle",
        || {
            let cases = [
                (gbit(), 4, 4),
                (SystemSpec::single(SiteSpec::uniform(2, 3).unwrap()), 9, 9),
                (two_gbits(), 24, 16),
            ];
            for (sys, count, pure_product) in cases {
                let rep = enumerate_vertices(&sys, &VertexEnumOptions::default()).unwrap();
                assert_eq!(rep.len(), count, "{}", sys.describe());
                assert_eq!(rep.pure_product_count(), pure_product, "{}", sys.describe());
                assert_eq!(
                    rep.nonlocal_count(),
                    count - pure_product,
                    "{}",
                    sys.describe()
                );
                let oracle = enumerate_vertices_oracle(&sys).unwrap();
                assert_eq!(rep, oracle, "oracle disagreement on {}", sys.describe());
            }
        },
    );
}

#[test]
fn searched_groups_equal_relabelling_groups_and_factor() {
    criterion(
        5,
        "searched groups have orders 8 / 48 / 72 / 128, equal the relabelling groups, and factor",
        || {
            let cases = [
                (gbit(), 8),
                (SystemSpec::single(SiteSpec::uniform(3, 2).unwrap()), 48),
                (SystemSpec::single(SiteSpec::uniform(2, 3).unwrap()), 72),
                (two_gbits(), 128),
            ];
            for (sys, order) in cases {
                let report = verify_theorem1(&sys, &SearchOptions::default()).unwrap();
                assert_eq!(report.status, VerdictStatus::Pass, "{}", sys.describe());
                assert!(report.in_scope, "{}", sys.describe());
                assert_eq!(report.searched_order, order, "{}", sys.describe());
                assert_eq!(report.generated_order, order, "{}", sys.describe());
                assert!(report.setwise_equal, "{}", sys.describe());
                assert_eq!(report.factored_elements, order, "{}", sys.describe());
                assert_eq!(report.unfactored_elements, 0, "{}", sys.describe());
                assert!(report.factorizations.iter().all(Option::is_some));
            }
        },
    );
}

#[test]
fn the_two_gbit_group_preserves_vertex_classes() {
    criterion(
        6,
        "all 128 two-gbit maps fix the pure-product and non-local vertex classes",
        || {
            let sys = two_gbits();
            let group = search_reversible_group(&sys, &SearchOptions::default())
                .unwrap()
                .group;
            assert_eq!(group.order(), 128);
            let report = verify_theorem2(&sys, &group).unwrap();
            assert_eq!(report.status, VerdictStatus::Pass);
            assert_eq!(report.vertex_count, 24);
            assert_eq!(report.pure_product_count, 16);
            assert_eq!(report.nonlocal_count, 8);
            assert!(report.pure_product_closed);
            assert!(report.nonlocal_closed);
            assert!(report.failures.is_empty());
        },
    );
}

#[test]
fn hybrid_cnot_is_the_expected_exception() {
    criterion(7, "the hybrid CNOT is reversible, outside the order-16 relabelling group, and correlates a product input", || {
        let sys = hybrid();
        let cnot = build_hybrid_cnot(&sys).unwrap();
        assert!(is_reversible_allowed(&sys, &cnot).unwrap());

        let trivial = generate_group(&sys, &trivial_generators(&sys).unwrap()).unwrap();
        assert_eq!(trivial.order(), 16);
        assert!(!group_membership(&cnot, &trivial));

        let rep = enumerate_vertices(&sys, &VertexEnumOptions::default()).unwrap();
        for (i, vertex) in rep.vertices().iter().enumerate() {
            if vertex.pure_product {
                let image = cnot.apply(&vertex.state).unwrap();
                let position = rep
                    .position(&image)
                    .unwrap_or_else(|| panic!("image of vertex {i} left the vertex set"));
                assert!(rep.vertices()[position].pure_product, "vertex {i}");
            }
        }

        let input = product_state(
            &sys,
            &[
                local_pure_state(sys.site(0), &[0, 1]).unwrap(),
                Vector::new(vec![r(1, 2), Rational::one()]),
            ],
        )
        .unwrap();
        let output = cnot.apply(&input).unwrap();
        let joint = |k: usize, j: usize| {
            let label = sys.label_for(&[0, 0], &[k, j]).unwrap();
            evaluate(&sys.product_effect_coeffs(&label).unwrap(), &output).unwrap()
        };
        assert_eq!(
            (joint(0, 0), joint(0, 1), joint(1, 0), joint(1, 1)),
            (r(1, 2), r(0, 1), r(0, 1), r(1, 2))
        );
    });
}

#[test]
fn chsh_reaches_four_on_the_pr_box_and_two_on_products() {
    criterion(
        8,
        "CHSH is exactly 4 on the PR box, at most 2 on pure products, at most 4 overall",
        || {
            let sys = two_gbits();
            assert_eq!(
                chsh_value(&sys, &pr_box_state(&sys).unwrap()).unwrap(),
                r(4, 1)
            );
            let rep = enumerate_vertices(&sys, &VertexEnumOptions::default()).unwrap();
            let mut best_pure_product: Option<Rational> = None;
            for vertex in rep.vertices() {
                let value = chsh_value(&sys, &vertex.state).unwrap();
                let magnitude = if value.is_negative() {
                    -value.clone()
                } else {
                    value.clone()
                };
                assert!(magnitude <= r(4, 1));
                if vertex.pure_product {
                    let improves = best_pure_product.as_ref().is_none_or(|best| value > *best);
                    if improves {
                        best_pure_product = Some(value);
                    }
                }
            }
            assert_eq!(best_pure_product.unwrap(), r(2, 1));
        },
    );
}

fn random_product_state(sys: &SystemSpec, rng: &mut Lcg) -> StateVector {
    let locals: Vec<Vector> = sys
        .sites()
        .iter()
        .map(|site| {
            let assignment: Vec<usize> = (0..site.measurements())
                .map(|m| rng.below(site.outcomes(m)))
                .collect();
            local_pure_state(site, &assignment).unwrap()
        })
        .collect();
    product_state(sys, &locals).unwrap()
}

#[test]
fn tables_round_trip_and_cone_certificates_verify() {
    criterion(
        9,
        "100 table round trips are exact and cone verdicts carry checkable certificates",
        || {
            let systems = [
                gbit(),
                two_gbits(),
                hybrid(),
                SystemSpec::new(vec![
                    SiteSpec::uniform(2, 3).unwrap(),
                    SiteSpec::classical_bit(),
                ])
                .unwrap(),
            ];
            let mut rng = Lcg(23);
            for sys in &systems {
                let mixes_in_pr_box = *sys == two_gbits();
                for round in 0..25 {
                    let mut state = random_product_state(sys, &mut rng);
                    for _ in 0..2 + rng.below(3) {
                        let other = if mixes_in_pr_box && rng.below(2) == 0 {
                            pr_box_state(sys).unwrap()
                        } else {
                            random_product_state(sys, &mut rng)
                        };
                        let lambda = r(1 + rng.below(9) as i64, 10);
                        state = state.mix(&other, &lambda);
                    }
                    let table = table_from_state(sys, &state).unwrap();
                    let back = state_from_table(sys, &table).unwrap();
                    assert_eq!(back, state, "round {round} on {}", sys.describe());
                }

                let labels = sys.extremal_effect_labels();
                let mut targets = vec![sys.identity_coeffs()];
                for _ in 0..5 {
                    let mut target = Vector::zeros(sys.dim());
                    for label in &labels {
                        let weight = r(rng.below(4) as i64, 3);
                        target =
                            target.add(&sys.product_effect_coeffs(label).unwrap().scale(&weight));
                    }
                    targets.push(target);
                }
                for target in &targets {
                    let ConeMembership::Inside { certificate } = cone_member(sys, target).unwrap()
                    else {
                        panic!(
                            "constructed combination left the cone on {}",
                            sys.describe()
                        );
                    };
                    assert!(verify_cone_certificate(sys, target, &certificate).unwrap());
                }
            }

            let gbit = gbit();
            let outside = gbit
                .identity_coeffs()
                .sub(
                    &gbit
                        .product_effect_coeffs(&gbit.label_for(&[0], &[0]).unwrap())
                        .unwrap(),
                )
                .sub(
                    &gbit
                        .product_effect_coeffs(&gbit.label_for(&[1], &[0]).unwrap())
                        .unwrap(),
                );
            assert_eq!(
                cone_member(&gbit, &outside).unwrap(),
                ConeMembership::Outside
            );
        },
    );
}

fn example(name: &str) -> String {
    format!("{}/../../docs/examples/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxworld"))
        .args(args)
        .env_remove("BOXWORLD_THREADS")
        .output()
        .expect("the boxworld binary must run")
}

#[test]
fn cli_reports_are_byte_identical_across_runs() {
    criterion(
        10,
        "repeated CLI runs produce byte-identical reports",
        || {
            let two_gbits = example("two_gbits.json");
            let gbit = example("gbit.json");
            let hybrid = example("hybrid.json");
            let m2k3 = example("m2k3.json");
            let pr_state = example("pr_state.json");
            let pr_table = example("pr_table.json");
            let runs: [&[&str]; 8] = [
                &["spec", "-s", &two_gbits, "-o", "json"],
                &["vertices", "-s", &two_gbits, "-o", "csv"],
                &["vertices", "-s", &m2k3, "-o", "json", "--oracle"],
                &["group", "-s", &gbit, "--search", "-o", "json", "--oracle"],
                &["verify", "theorem1", "-s", &hybrid, "-o", "json"],
                &["verify", "theorem2", "-s", &two_gbits, "-o", "json"],
                &[
                    "chsh", "-s", &two_gbits, "-i", &pr_state, "-o", "json", "--oracle",
                ],
                &[
                    "check", "table", "-s", &two_gbits, "-i", &pr_table, "-o", "json",
                ],
            ];
            for args in runs {
                let first = run_cli(args);
                let second = run_cli(args);
                assert!(first.status.success(), "{args:?}: {:?}", first);
                assert_eq!(first.status, second.status, "{args:?}");
                assert_eq!(first.stdout, second.stdout, "{args:?}");
                assert_eq!(first.stderr, second.stderr, "{args:?}");
                assert!(!first.stdout.is_empty(), "{args:?}");
            }
        },
    );
}
