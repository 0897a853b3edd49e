//! Acceptance suite: one test per exit criterion, each printing a pass line
//! with its measurements. Tolerances and thresholds are pinned in the
//! assertions.

use std::time::{Duration, Instant};

use tubular::farey::tree_ball;
use tubular::growth::growth_certificate;
use tubular::quiver::SeedQuiver;
use tubular::templates::TubularType;
use tubular::verify::{
    case_chain_reports, chain_2222_report, farey_lemma_report, negative_control_reports,
    realization_report, walk_report, CheckReport,
};

fn assert_report(criterion: &str, report: &CheckReport) {
    assert!(
        report.passed,
        "{criterion}: {} failed: {}",
        report.name, report.detail
    );
    println!("{criterion}: pass — {}: {}", report.name, report.detail);
}

/// Ball sizes of the 3-regular tree: 3·(2^n − 1) for n = 1..12, with the
/// depth-12 enumeration under a second.
#[test]
fn criterion_1_tree_ball_counts() {
    for n in 1..=11u32 {
        assert_eq!(tree_ball(n).len() as u64, 3 * ((1 << n) - 1), "depth {n}");
    }
    let start = Instant::now();
    let ball = tree_ball(12);
    let elapsed = start.elapsed();
    assert_eq!(ball.len(), 3 * ((1 << 12) - 1));
    assert!(
        elapsed < Duration::from_secs(1),
        "depth 12 took {elapsed:?}, budget 1s"
    );
    println!("criterion 1: pass — 3(2^n−1) for n=1..12; depth 12 in {elapsed:?}");
}

/// Involutivity, the two-completions property, the doubling identities and
/// descent on every node of the depth-10 ball.
#[test]
fn criterion_2_farey_lemma_suite() {
    assert_report("criterion 2", &farey_lemma_report(10));
}

/// The worked (2,2,2,2) chain: three reference quivers, their slope data,
/// and the final slope set {0, 1, ∞}.
#[test]
fn criterion_3_golden_2222_chain() {
    assert_report("criterion 3", &chain_2222_report());
}

/// The realization sequences land on slope set {0, 1, ∞} with the
/// reference class tables and quivers.
#[test]
fn criterion_4_golden_realizations() {
    for kind in [TubularType::T333, TubularType::T442, TubularType::T632] {
        assert_report("criterion 4", &realization_report(kind));
    }
}

/// The three (3,3,3) case chains, replayed on concrete instances found by
/// walking the composite-mutation graph until each case condition holds.
#[test]
fn criterion_5_golden_case_chains() {
    for report in case_chain_reports() {
        assert_report("criterion 5", &report);
    }
}

/// 200-step random non-backtracking walks per weight type with slope
/// tracking, template re-matching, rank additivity and collapse-commutation
/// at every elementary step, and sampled elementary involutivity; under 60
/// seconds in total.
#[test]
fn criterion_6_proposition_property_suite() {
    let start = Instant::now();
    for kind in TubularType::ALL {
        assert_report("criterion 6", &walk_report(kind, 200));
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "walks took {elapsed:?}, budget 60s"
    );
    println!("criterion 6: pass — all four walks in {elapsed:?}");
}

/// Growth certificates at depth 8: 765 pairwise distinct slope sets per
/// weight type, each within k·8 elementary mutations, under 30 seconds per
/// type.
#[test]
fn criterion_7_growth_certificates() {
    for kind in TubularType::ALL {
        let start = Instant::now();
        let cert = growth_certificate(kind, 8).expect("certificate");
        let elapsed = start.elapsed();
        assert_eq!(cert.records.len(), 765, "{kind:?}");
        assert_eq!(cert.distinct(), 765, "{kind:?}");
        let budget = cert.budget_k as u64 * 8;
        assert!(
            cert.records
                .iter()
                .all(|r| r.mutations <= cert.budget_k as u64 * r.depth as u64),
            "{kind:?} budget violation"
        );
        assert!(
            elapsed < Duration::from_secs(30),
            "{kind:?} took {elapsed:?}, budget 30s"
        );
        println!(
            "criterion 7: pass — {:?}: 765 distinct configurations within {budget} mutations in {elapsed:?}",
            kind.weights()
        );
    }
}

/// The four seed mutation classes close under a 10^6-key cap; the sizes are
/// regression constants recorded from the first verified enumeration.
#[test]
fn criterion_8_mutation_finiteness() {
    let expected = [4usize, 49, 506, 5739];
    for (seed, want) in SeedQuiver::ALL.into_iter().zip(expected) {
        let class = seed
            .matrix()
            .mutation_class(1_000_000)
            .unwrap_or_else(|e| panic!("{}: {e}", seed.name()));
        assert_eq!(class.len(), want, "{}", seed.name());
        println!(
            "criterion 8: pass — {} closes at {} quivers",
            seed.name(),
            class.len()
        );
    }
}

/// Corrupting one rank breaks rank additivity; corrupting one relation
/// breaks the collapse-commutation sweep.
#[test]
fn criterion_9_negative_controls() {
    for report in negative_control_reports() {
        assert_report("criterion 9", &report);
    }
}
