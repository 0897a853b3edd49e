//! Named verification suites behind the CLI `verify` subcommand: golden
//! replays of the reference data — worked mutation chains, base
//! realizations, seed quivers — and the randomized invariant suite over
//! long walks.

use std::collections::VecDeque;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::farey::{completions, tree_ball, FareyTriple, Rat};
use crate::graded::GradedQuiver;
use crate::growth::{Branch, WalkState};
use crate::quiver::SeedQuiver;
use crate::templates::{
    composite_mutate, match_template, template, Family, RoleMap, TubularType,
};
use crate::tilting::{canonical_config, realize_base, HubnerClass, KClass, TiltingConfig};

/// Outcome of one named check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckReport {
    fn from_result(name: &str, result: Result<String, String>) -> Self {
        match result {
            Ok(detail) => CheckReport {
                name: name.to_string(),
                passed: true,
                detail,
            },
            Err(detail) => CheckReport {
                name: name.to_string(),
                passed: false,
                detail,
            },
        }
    }
}

/// The reference-data suite: seed quivers, the worked (2,2,2,2) chain, the
/// base realizations with their class tables and quivers, and the three
/// (3,3,3) case chains.
pub fn golden_suite() -> Vec<CheckReport> {
    let mut out = vec![seed_report(), chain_2222_report()];
    out.extend(TubularType::ALL.map(realization_report));
    out.extend(case_chain_reports());
    out
}

/// The randomized invariant suite: the Farey lemma checks on the depth-10
/// ball, instrumented 200-step walks per weight type, and the negative
/// controls.
pub fn property_suite() -> Vec<CheckReport> {
    let mut out = vec![farey_lemma_report(10)];
    out.extend(TubularType::ALL.map(|kind| walk_report(kind, 200)));
    out.extend(negative_control_reports());
    out
}

pub fn seed_report() -> CheckReport {
    CheckReport::from_result("seed_quivers", check_seed_quivers())
}

pub fn chain_2222_report() -> CheckReport {
    CheckReport::from_result("chain_2222", check_chain_2222())
}

pub fn realization_report(kind: TubularType) -> CheckReport {
    let name = format!("realization_{}", weights_tag(kind));
    CheckReport::from_result(&name, check_realization(kind))
}

pub fn case_chain_reports() -> Vec<CheckReport> {
    [ChainCase::A, ChainCase::B, ChainCase::C]
        .into_iter()
        .map(|case| {
            let name = format!("case_chain_333_{}", case.tag());
            CheckReport::from_result(&name, check_case_chain(case))
        })
        .collect()
}

pub fn farey_lemma_report(depth: u32) -> CheckReport {
    let name = format!("farey_lemmas_ball{depth}");
    CheckReport::from_result(&name, check_farey_lemmas(depth))
}

pub fn walk_report(kind: TubularType, steps: usize) -> CheckReport {
    let name = format!("walk_{steps}_{}", weights_tag(kind));
    CheckReport::from_result(&name, check_random_walk(kind, steps))
}

pub fn negative_control_reports() -> Vec<CheckReport> {
    vec![
        CheckReport::from_result("negative_rank_control", check_negative_rank_control()),
        CheckReport::from_result(
            "negative_relation_control",
            check_negative_relation_control(),
        ),
    ]
}

fn weights_tag(kind: TubularType) -> String {
    kind.weights()
        .iter()
        .map(|w| w.to_string())
        .collect::<String>()
}

fn check_seed_quivers() -> Result<String, String> {
    let sizes = [6usize, 8, 9, 10];
    for (seed, n) in SeedQuiver::ALL.into_iter().zip(sizes) {
        let m = seed.matrix();
        if m.n() != n {
            return Err(format!("{} has {} vertices, expected {n}", seed.name(), m.n()));
        }
        let doubles = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| m[(i, j)] == 2)
            .count();
        if doubles != 1 {
            return Err(format!("{} has {doubles} double arrows", seed.name()));
        }
    }
    Ok("4 seeds: sizes 6/8/9/10, one double arrow each".into())
}

/// The worked chain on (2,2,2,2): three mutations from the canonical
/// configuration, each intermediate compared against its reference quiver
/// and slope data.
fn check_chain_2222() -> Result<String, String> {
    let rat = |n: i64, d: i64| Rat::new(n, d).expect("test data");
    let quiver = |arrows: &[(usize, usize)], relations: &[(usize, usize)]| {
        GradedQuiver::from_edges(6, arrows, relations).expect("chain data")
    };
    let steps: [(usize, GradedQuiver, KClass, Vec<Rat>); 3] = [
        (
            1,
            quiver(
                &[(0, 2), (0, 3), (0, 4), (2, 5), (3, 5), (4, 5), (5, 1)],
                &[(0, 5), (0, 1)],
            ),
            KClass::new(1, 0),
            vec![
                rat(0, 1),
                rat(1, 1),
                rat(1, 1),
                rat(1, 1),
                rat(2, 1),
                rat(1, 0),
            ],
        ),
        (
            2,
            quiver(
                &[(0, 3), (0, 4), (3, 5), (4, 5), (5, 1), (5, 2)],
                &[(0, 1), (0, 2)],
            ),
            KClass::new(1, 0),
            vec![
                rat(0, 1),
                rat(1, 1),
                rat(1, 1),
                rat(2, 1),
                rat(1, 0),
                rat(1, 0),
            ],
        ),
        (
            5,
            quiver(
                &[
                    (0, 3),
                    (0, 4),
                    (3, 1),
                    (3, 2),
                    (4, 1),
                    (4, 2),
                    (5, 3),
                    (5, 4),
                ],
                &[(0, 1), (0, 2), (5, 1), (5, 2)],
            ),
            KClass::new(0, 1),
            vec![
                rat(0, 1),
                rat(0, 1),
                rat(1, 1),
                rat(1, 1),
                rat(1, 0),
                rat(1, 0),
            ],
        ),
    ];

    let mut c = canonical_config(&[2, 2, 2, 2]).map_err(|e| e.to_string())?;
    for (i, (vertex, expected_quiver, expected_class, expected_slopes)) in
        steps.iter().enumerate()
    {
        c = c.mutate(*vertex).map_err(|e| format!("step {i}: {e}"))?;
        if c.quiver() != expected_quiver {
            return Err(format!("step {i}: quiver differs from the reference"));
        }
        if c.class(*vertex) != expected_class {
            return Err(format!(
                "step {i}: class at {vertex} is {}, expected {}",
                c.class(*vertex),
                expected_class
            ));
        }
        let mut slopes = c.slope_multiset().map_err(|e| e.to_string())?;
        slopes.sort();
        let mut want = expected_slopes.clone();
        want.sort();
        if slopes != want {
            return Err(format!("step {i}: slope multiset differs"));
        }
        if !c.rank_additivity_holds() {
            return Err(format!("step {i}: rank additivity broken"));
        }
    }
    let final_slopes: Vec<Rat> = c.slope_set().map_err(|e| e.to_string())?.into_iter().collect();
    if final_slopes != vec![Rat::zero(), Rat::one(), Rat::infinity()] {
        return Err("final slope set is not {0, 1, ∞}".into());
    }
    Ok("3 steps, 3 reference quivers, slope sets and classes exact".into())
}

/// Expected class tables of the base realizations, as (deg, rk) pairs.
fn realization_table(kind: TubularType) -> Vec<KClass> {
    let k = |d: i64, r: i64| KClass::new(d, r);
    match kind {
        TubularType::T2222 => vec![k(0, 1), k(0, 1), k(1, 1), k(1, 1), k(1, 0), k(1, 0)],
        TubularType::T333 => vec![
            k(1, 1),
            k(1, 1),
            k(1, 1),
            k(0, 1),
            k(0, 2),
            k(1, 0),
            k(1, 0),
            k(1, 0),
        ],
        TubularType::T442 => vec![
            k(0, 1),
            k(0, 2),
            k(0, 1),
            k(1, 1),
            k(2, 2),
            k(1, 1),
            k(1, 0),
            k(2, 0),
            k(1, 0),
        ],
        // The four-member family sits at slope infinity, matching the class
        // patterns of the w roles in the template data.
        TubularType::T632 => vec![
            k(0, 1),
            k(0, 1),
            k(0, 2),
            k(1, 1),
            k(1, 1),
            k(2, 2),
            k(1, 0),
            k(1, 0),
            k(2, 0),
            k(2, 0),
        ],
    }
}

/// Which template quiver each base realization lands on.
fn realization_quiver_index(kind: TubularType) -> usize {
    match kind {
        TubularType::T2222 | TubularType::T442 | TubularType::T632 => 0,
        TubularType::T333 => 1,
    }
}

fn check_realization(kind: TubularType) -> Result<String, String> {
    let c = realize_base(kind.weights()).map_err(|e| e.to_string())?;
    let slopes: Vec<Rat> = c.slope_set().map_err(|e| e.to_string())?.into_iter().collect();
    if slopes != vec![Rat::zero(), Rat::one(), Rat::infinity()] {
        return Err("slope set is not {0, 1, ∞}".into());
    }
    if !c.rank_additivity_holds() {
        return Err("rank additivity broken".into());
    }
    let mut classes = c.classes().to_vec();
    classes.sort();
    let mut expected = realization_table(kind);
    expected.sort();
    if classes != expected {
        return Err(format!("class table differs: {classes:?} vs {expected:?}"));
    }
    let rm = match_template(&c)
        .map_err(|e| e.to_string())?
        .ok_or("realization does not match its template")?;
    let expected_quiver = realization_quiver_index(kind);
    if rm.quiver_index != expected_quiver {
        return Err(format!(
            "realization matched template quiver {} instead of {expected_quiver}",
            rm.quiver_index
        ));
    }
    Ok(format!(
        "slopes {{0,1,∞}}, class table exact, quiver index {expected_quiver}"
    ))
}

/// The three regimes of the v-direction composite on weights (3,3,3),
/// starting from a configuration with the third template quiver. The case
/// split is on the rank coordinates of the u and w families.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ChainCase {
    A,
    B,
    C,
}

impl ChainCase {
    fn tag(&self) -> &'static str {
        match self {
            ChainCase::A => "a",
            ChainCase::B => "b",
            ChainCase::C => "c",
        }
    }

    /// Case condition on the rank coordinates `b` (u family) and `f`
    /// (w family).
    fn holds(&self, b: &BigInt, f: &BigInt) -> bool {
        match self {
            ChainCase::A => f <= b,
            ChainCase::B => b < f && BigInt::from(2) * b >= *f,
            ChainCase::C => BigInt::from(2) * b < *f,
        }
    }
}

/// One elementary step of a reference chain: the mutated role, its
/// expected classification, the coefficients of its new class over the
/// primitive family classes (A, C, E), and the full quiver after the step.
struct ChainStep {
    role: &'static str,
    class: HubnerClass,
    new_class: (i64, i64, i64),
    arrows: &'static [(&'static str, &'static str)],
    relations: &'static [(&'static str, &'static str)],
}

const SRC: HubnerClass = HubnerClass::Source;
const SNK: HubnerClass = HubnerClass::Sink;

fn chain_steps(case: ChainCase) -> Vec<ChainStep> {
    let step = |role,
                class,
                new_class,
                arrows: &'static [(&'static str, &'static str)],
                relations: &'static [(&'static str, &'static str)]| ChainStep {
        role,
        class,
        new_class,
        arrows,
        relations,
    };
    match case {
        ChainCase::A => vec![
            step(
                "v2",
                SRC,
                (2, 0, -1),
                &[
                    ("w1", "u1"),
                    ("w2", "u2"),
                    ("w3", "u3"),
                    ("w1", "v1"),
                    ("w2", "v1"),
                    ("w3", "v1"),
                    ("u1", "v2"),
                    ("u2", "v2"),
                    ("u3", "v2"),
                    ("v1", "v2"),
                ],
                &[("w1", "v2"), ("w2", "v2"), ("w3", "v2")],
            ),
            step(
                "u1",
                SRC,
                (1, 0, -1),
                &[
                    ("w2", "v1"),
                    ("w3", "v1"),
                    ("w1", "v1"),
                    ("w2", "u2"),
                    ("w3", "u3"),
                    ("u2", "v2"),
                    ("u3", "v2"),
                    ("v1", "v2"),
                    ("v2", "u1"),
                ],
                &[("w2", "v2"), ("w3", "v2"), ("w1", "u1")],
            ),
            step(
                "w3",
                SRC,
                (2, 0, 0),
                &[
                    ("w2", "v1"),
                    ("w1", "v1"),
                    ("w2", "u2"),
                    ("u2", "v2"),
                    ("v2", "u1"),
                    ("v1", "w3"),
                    ("u3", "w3"),
                    ("w3", "v2"),
                ],
                &[("w2", "v2"), ("w1", "u1")],
            ),
            step(
                "u2",
                SRC,
                (1, 0, -1),
                &[
                    ("w2", "v1"),
                    ("w1", "v1"),
                    ("v2", "u1"),
                    ("v2", "u2"),
                    ("u3", "w3"),
                    ("v1", "w3"),
                    ("w3", "v2"),
                ],
                &[("w1", "u1"), ("w2", "u2")],
            ),
            step(
                "v1",
                SRC,
                (1, 0, -1),
                &[
                    ("w2", "w3"),
                    ("w1", "w3"),
                    ("v2", "u1"),
                    ("v2", "u2"),
                    ("u3", "w3"),
                    ("w3", "v1"),
                    ("w3", "v2"),
                ],
                &[("w2", "v1"), ("w1", "v1"), ("w2", "u2"), ("w1", "u1")],
            ),
            step(
                "v2",
                SNK,
                (0, 0, 1),
                &[
                    ("w2", "w3"),
                    ("w1", "w3"),
                    ("w3", "u1"),
                    ("w3", "u2"),
                    ("u3", "w3"),
                    ("w3", "v1"),
                    ("v2", "w3"),
                ],
                &[
                    ("w2", "v1"),
                    ("w1", "v1"),
                    ("w2", "u2"),
                    ("w1", "u1"),
                    ("v2", "u1"),
                    ("v2", "u2"),
                ],
            ),
            step(
                "u3",
                SRC,
                (1, 0, 0),
                &[
                    ("w2", "w3"),
                    ("w1", "w3"),
                    ("w3", "u1"),
                    ("w3", "u2"),
                    ("w3", "u3"),
                    ("w3", "v1"),
                    ("v2", "w3"),
                ],
                &[
                    ("w2", "v1"),
                    ("w1", "v1"),
                    ("w2", "u2"),
                    ("w1", "u1"),
                    ("v2", "u1"),
                    ("v2", "u2"),
                ],
            ),
        ],
        ChainCase::B => vec![
            step(
                "v2",
                SRC,
                (2, 0, -1),
                &[
                    ("w1", "u1"),
                    ("w2", "u2"),
                    ("w3", "u3"),
                    ("w1", "v1"),
                    ("w2", "v1"),
                    ("w3", "v1"),
                    ("u1", "v2"),
                    ("u2", "v2"),
                    ("u3", "v2"),
                    ("v1", "v2"),
                ],
                &[("w1", "v2"), ("w2", "v2"), ("w3", "v2")],
            ),
            step(
                "u1",
                SNK,
                (-1, 0, 1),
                &[
                    ("w2", "v1"),
                    ("w3", "v1"),
                    ("w1", "v1"),
                    ("u1", "w1"),
                    ("w2", "u2"),
                    ("w3", "u3"),
                    ("u2", "v2"),
                    ("u3", "v2"),
                    ("v1", "v2"),
                ],
                &[("w2", "v2"), ("w3", "v2"), ("u1", "v2")],
            ),
            step(
                "w3",
                SRC,
                (2, 0, 0),
                &[
                    ("w2", "v1"),
                    ("w1", "v1"),
                    ("u1", "w1"),
                    ("w2", "u2"),
                    ("u2", "v2"),
                    ("u3", "w3"),
                    ("v1", "w3"),
                    ("w3", "v2"),
                ],
                &[("w2", "v2"), ("u1", "v2")],
            ),
            step(
                "u2",
                SNK,
                (-1, 0, 1),
                &[
                    ("w1", "v1"),
                    ("u1", "w1"),
                    ("w2", "v1"),
                    ("u2", "w2"),
                    ("u3", "w3"),
                    ("v1", "w3"),
                    ("w3", "v2"),
                ],
                &[("u1", "v2"), ("u2", "v2")],
            ),
            step(
                "v1",
                SNK,
                (-1, 0, 1),
                &[
                    ("w1", "w3"),
                    ("u1", "w1"),
                    ("w2", "w3"),
                    ("u2", "w2"),
                    ("v1", "w1"),
                    ("v1", "w2"),
                    ("u3", "w3"),
                    ("w3", "v2"),
                ],
                &[("u1", "v2"), ("u2", "v2"), ("v1", "w3")],
            ),
            step(
                "v2",
                SNK,
                (0, 0, 1),
                &[
                    ("w1", "w3"),
                    ("u1", "w1"),
                    ("w2", "w3"),
                    ("u2", "w2"),
                    ("v1", "w1"),
                    ("v1", "w2"),
                    ("u3", "w3"),
                    ("v2", "w3"),
                    ("u1", "v2"),
                    ("u2", "v2"),
                ],
                &[("v1", "w3"), ("u1", "w3"), ("u2", "w3")],
            ),
            step(
                "u3",
                SRC,
                (1, 0, 0),
                &[
                    ("w1", "w3"),
                    ("u1", "w1"),
                    ("w2", "w3"),
                    ("u2", "w2"),
                    ("v1", "w1"),
                    ("v1", "w2"),
                    ("w3", "u3"),
                    ("v2", "w3"),
                    ("u1", "v2"),
                    ("u2", "v2"),
                ],
                &[("v1", "w3"), ("u1", "w3"), ("u2", "w3")],
            ),
        ],
        ChainCase::C => vec![
            step(
                "v2",
                SNK,
                (-2, 0, 1),
                &[
                    ("w2", "v1"),
                    ("w3", "v1"),
                    ("w1", "v1"),
                    ("v2", "w1"),
                    ("v2", "w2"),
                    ("v2", "w3"),
                    ("w1", "u1"),
                    ("w2", "u2"),
                    ("w3", "u3"),
                ],
                &[("v2", "u1"), ("v2", "u2"), ("v2", "u3"), ("v2", "v1")],
            ),
            step(
                "u1",
                SNK,
                (-1, 0, 1),
                &[
                    ("w2", "v1"),
                    ("w3", "v1"),
                    ("w1", "v1"),
                    ("v2", "w2"),
                    ("v2", "w3"),
                    ("w2", "u2"),
                    ("w3", "u3"),
                    ("u1", "w1"),
                    ("v2", "u1"),
                ],
                &[("v2", "u2"), ("v2", "u3"), ("v2", "v1")],
            ),
            step(
                "w3",
                SRC,
                (2, 0, 0),
                &[
                    ("w2", "v1"),
                    ("w1", "v1"),
                    ("v2", "w2"),
                    ("w2", "u2"),
                    ("u1", "w1"),
                    ("v2", "u1"),
                    ("v1", "w3"),
                    ("u3", "w3"),
                ],
                &[("v2", "u2"), ("v2", "w3")],
            ),
            step(
                "u2",
                SNK,
                (-1, 0, 1),
                &[
                    ("w2", "v1"),
                    ("w1", "v1"),
                    ("u1", "w1"),
                    ("v2", "u1"),
                    ("v1", "w3"),
                    ("u3", "w3"),
                    ("u2", "w2"),
                    ("v2", "u2"),
                ],
                &[("v2", "w3")],
            ),
            step(
                "v1",
                SNK,
                (-1, 0, 1),
                &[
                    ("u1", "w1"),
                    ("v2", "u1"),
                    ("u3", "w3"),
                    ("u2", "w2"),
                    ("v2", "u2"),
                    ("w2", "w3"),
                    ("w1", "w3"),
                    ("v1", "w1"),
                    ("v1", "w2"),
                ],
                &[("v2", "w3"), ("v1", "w3")],
            ),
            step(
                "v2",
                SRC,
                (0, 0, 1),
                &[
                    ("u3", "w3"),
                    ("u2", "w2"),
                    ("w2", "w3"),
                    ("w1", "w3"),
                    ("v1", "w1"),
                    ("v1", "w2"),
                    ("u1", "w1"),
                    ("u1", "v2"),
                    ("u2", "v2"),
                    ("v2", "w3"),
                ],
                &[("v1", "w3"), ("u1", "w3"), ("u2", "w3")],
            ),
            step(
                "u3",
                SRC,
                (1, 0, 0),
                &[
                    ("w3", "u3"),
                    ("u2", "w2"),
                    ("w2", "w3"),
                    ("w1", "w3"),
                    ("v1", "w1"),
                    ("v1", "w2"),
                    ("u1", "w1"),
                    ("u1", "v2"),
                    ("u2", "v2"),
                    ("v2", "w3"),
                ],
                &[("v1", "w3"), ("u1", "w3"), ("u2", "w3")],
            ),
        ],
    }
}

fn parse_role(tpl: &crate::templates::Template, name: &str) -> usize {
    let family: Family = name[..1].parse().expect("role family letter");
    let position: u8 = name[1..].parse().expect("role position");
    tpl.role_index(family, position)
}

/// Primitive class of a family in a matched configuration.
fn primitive_family_class(c: &TiltingConfig, rm: &RoleMap, family: Family) -> KClass {
    let tpl = template(rm.kind);
    let role = tpl.role_index(family, 1);
    let vertex = rm.vertex_of(role);
    c.class(vertex).primitive_part().1
}

/// Searches the composite-mutation graph for a configuration with the third
/// (3,3,3) template quiver satisfying the case condition, then replays the
/// reference chain step by step: quivers, classes and source/sink
/// classifications at every elementary mutation.
///
/// The search allows revisiting directions: the non-backtracking tree from
/// the base realization happens to contain a single configuration with this
/// quiver, but composite mutations are not involutive on configurations, so
/// repeated directions open up the rest of the family.
fn check_case_chain(case: ChainCase) -> Result<String, String> {
    let tpl = template(TubularType::T333);
    let q_w_index = 2;

    let base = realize_base(&[3, 3, 3]).map_err(|e| e.to_string())?;
    let base_rm = match_template(&base)
        .map_err(|e| e.to_string())?
        .ok_or("base realization does not match")?;
    let mut queue = VecDeque::new();
    queue.push_back((base, base_rm, 0u32));
    let mut visited = 0usize;
    let instance = loop {
        let Some((config, rm, depth)) = queue.pop_front() else {
            return Err(format!("no case {} instance within the search ball", case.tag()));
        };
        visited += 1;
        if visited > 500 {
            return Err(format!("no case {} instance within 500 nodes", case.tag()));
        }
        if rm.quiver_index == q_w_index {
            let a = primitive_family_class(&config, &rm, Family::U);
            let c = primitive_family_class(&config, &rm, Family::V);
            let e = primitive_family_class(&config, &rm, Family::W);
            let ordered = e.slope().unwrap() < c.slope().unwrap()
                && c.slope().unwrap() < a.slope().unwrap();
            if ordered && a.rk >= BigInt::from(1) && case.holds(&a.rk, &e.rk) {
                break (config, rm, depth, a, c, e);
            }
        }
        for family in Family::ALL {
            let (next, next_rm) =
                composite_mutate(&config, &rm, family).map_err(|e| e.to_string())?;
            queue.push_back((next, next_rm, depth + 1));
        }
    };
    let (start_config, rm, depth, pa, pc, pe) = instance;

    let combine = |(ca, cc, ce): (i64, i64, i64)| KClass {
        deg: ca * &pa.deg + cc * &pc.deg + ce * &pe.deg,
        rk: ca * &pa.rk + cc * &pc.rk + ce * &pe.rk,
    };

    // Expected classes per role, updated step by step.
    let mut expected: Vec<KClass> = tpl
        .roles
        .iter()
        .map(|r| {
            let base = match r.family {
                Family::U => &pa,
                Family::V => &pc,
                Family::W => &pe,
            };
            KClass {
                deg: r.mult * &base.deg,
                rk: r.mult * &base.rk,
            }
        })
        .collect();

    let mut cfg = start_config.clone();
    for (i, step) in chain_steps(case).iter().enumerate() {
        let role_idx = parse_role(tpl, step.role);
        let vertex = rm.vertex_of(role_idx);
        let class = cfg
            .hubner_class(vertex)
            .map_err(|e| format!("step {i}: {e}"))?;
        if class != step.class {
            return Err(format!(
                "step {i}: {} classifies as {class:?}, expected {:?}",
                step.role, step.class
            ));
        }
        cfg = cfg.mutate(vertex).map_err(|e| format!("step {i}: {e}"))?;

        expected[role_idx] = combine(step.new_class);
        for (r, want) in expected.iter().enumerate() {
            let got = cfg.class(rm.vertex_of(r));
            if got != want {
                return Err(format!(
                    "step {i}: class at {} is {got}, expected {want}",
                    tpl.roles[r]
                ));
            }
        }

        let reference = GradedQuiver::from_edges(
            8,
            &step
                .arrows
                .iter()
                .map(|(x, y)| (parse_role(tpl, x), parse_role(tpl, y)))
                .collect::<Vec<_>>(),
            &step
                .relations
                .iter()
                .map(|(x, y)| (parse_role(tpl, x), parse_role(tpl, y)))
                .collect::<Vec<_>>(),
        )
        .map_err(|e| e.to_string())?;
        if cfg.quiver().permuted(&rm.vertex_role) != reference {
            return Err(format!("step {i}: quiver differs from the reference"));
        }
    }

    // The full chain is the v-direction composite; cross-check the result.
    let (direct, _) =
        composite_mutate(&start_config, &rm, Family::V).map_err(|e| e.to_string())?;
    if direct != cfg {
        return Err("chain result differs from the composite mutation".into());
    }
    Ok(format!(
        "instance at depth {depth} with (b, f) = ({}, {}); 7 steps match the reference chain",
        pa.rk, pe.rk
    ))
}

fn check_farey_lemmas(depth: u32) -> Result<String, String> {
    let ball = tree_ball(depth);
    let expected = 3 * ((1u64 << depth) - 1);
    if ball.len() as u64 != expected {
        return Err(format!("ball size {} instead of {expected}", ball.len()));
    }
    let mut distinct: Vec<&FareyTriple> = ball.iter().map(|n| &n.triple).collect();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != ball.len() {
        return Err("duplicate triples in the tree ball".into());
    }
    for node in &ball {
        let t = &node.triple;
        for p in t.elems() {
            let (mutated, fresh) = t.exchange(p).map_err(|e| e.to_string())?;
            if mutated.mutate(&fresh).map_err(|e| e.to_string())? != *t {
                return Err(format!("mutation at {p} of {t} is not involutive"));
            }
        }
        let [p, q, r] = t.elems();
        for (x, y) in [(p, q), (p, r), (q, r)] {
            let (first, second) = completions(x, y).map_err(|e| e.to_string())?;
            if !(first.contains(x) && first.contains(y) && second.contains(x) && second.contains(y))
            {
                return Err(format!("completions of {x}, {y} lost an element"));
            }
            if first == second {
                return Err(format!("completions of {x}, {y} coincide"));
            }
            if &first != t && &second != t {
                return Err(format!("neither completion of {x}, {y} recovers {t}"));
            }
        }
        // The doubling identities.
        let sum_qr = q.farey_sum(r);
        let sum_qp = q.farey_sum(p);
        let diff_pr = p.farey_diff(r).map_err(|e| e.to_string())?;
        if Rat::double_diff(q, p).map_err(|e| e.to_string())? != sum_qr
            || Rat::double_diff(q, r).map_err(|e| e.to_string())? != sum_qp
            || Rat::double_diff(p, q).map_err(|e| e.to_string())? != diff_pr
            || Rat::double_diff(r, q).map_err(|e| e.to_string())? != diff_pr
        {
            return Err(format!("doubling identities fail on {t}"));
        }
        // Descent walks back to the parent.
        let down = t
            .descent_direction()
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("{t} has no descent direction"))?;
        if Some(&down) != node.parent_direction.as_ref() {
            return Err(format!("descent from {t} does not return to the parent"));
        }
    }
    Ok(format!(
        "{} nodes: involutivity, completions, doubling identities, descent",
        ball.len()
    ))
}

/// Collapse-commutation of one elementary mutation, including the rule
/// preconditions; any failure is reported as a broken commutation check.
fn commutation_step(c: &TiltingConfig, k: usize) -> Result<TiltingConfig, String> {
    let next = c
        .mutate(k)
        .map_err(|e| format!("mutation at {k} failed: {e}"))?;
    let direct = c
        .quiver()
        .collapse()
        .fz_mutate(k)
        .map_err(|e| e.to_string())?;
    if next.quiver().collapse() != direct {
        return Err(format!("collapse does not commute at vertex {k}"));
    }
    Ok(next)
}

/// Structural cross-checks of the classification on one configuration:
/// vertices without incoming edges classify as sources and without outgoing
/// edges as sinks, successors of sinks are sinks (equivalently predecessors
/// of sources are sources), and relations run from sources to sinks.
fn classification_consistency(c: &TiltingConfig) -> Result<(), String> {
    let n = c.n();
    let q = c.quiver();
    let mut classes = Vec::with_capacity(n);
    for i in 0..n {
        classes.push(c.hubner_class(i).map_err(|e| e.to_string())?);
    }
    for i in 0..n {
        let any_in = (0..n).any(|j| q.arrow(j, i) > 0 || q.relation(j, i) > 0);
        let any_out = (0..n).any(|j| q.arrow(i, j) > 0 || q.relation(i, j) > 0);
        if !any_in && classes[i] != HubnerClass::Source {
            return Err(format!("vertex {i} has no incoming edges but is a sink"));
        }
        if !any_out && classes[i] != HubnerClass::Sink {
            return Err(format!("vertex {i} has no outgoing edges but is a source"));
        }
        for j in 0..n {
            if q.arrow(i, j) > 0
                && classes[i] == HubnerClass::Sink
                && classes[j] != HubnerClass::Sink
            {
                return Err(format!("successor {j} of the sink {i} is not a sink"));
            }
            if q.relation(i, j) > 0
                && (classes[i] != HubnerClass::Source || classes[j] != HubnerClass::Sink)
            {
                return Err(format!(
                    "relation {i} ⇢ {j} does not run from a source to a sink"
                ));
            }
        }
    }
    Ok(())
}

/// A 200-step random non-backtracking walk with every per-step invariant
/// checked: collapse-commutation, rank additivity and the classification
/// cross-checks after each elementary mutation, template re-match and slope
/// tracking after each composite, and elementary involutivity at sampled
/// vertices.
fn check_random_walk(kind: TubularType, steps: usize) -> Result<String, String> {
    let seed = 0x7ab5 + kind.weights().iter().sum::<u32>() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = WalkState::start(kind).map_err(|e| e.to_string())?;
    let mut elementary = 0u64;
    let mut involutions = 0u64;
    for step_no in 0..steps {
        let open: Vec<Branch> = Branch::ALL
            .into_iter()
            .filter(|b| state.banned_position() != Some(*b as usize))
            .collect();
        let branch = *open.choose(&mut rng).expect("two branches stay open");

        // Re-run the composite elementary step by step with checks.
        let triple = state.triple();
        let direction = triple.elems()[branch as usize].clone();
        let family = state
            .roles
            .family_of_slope(&direction)
            .ok_or("triple element is not a family slope")?;
        let tpl = template(kind);
        let mut cfg = state.config.clone();
        for &role in &tpl.sequences[family.index()] {
            let k = state.roles.vertex_of(role);
            cfg = commutation_step(&cfg, k).map_err(|e| format!("step {step_no}: {e}"))?;
            if !cfg.rank_additivity_holds() {
                return Err(format!("step {step_no}: rank additivity broken at {k}"));
            }
            classification_consistency(&cfg).map_err(|e| format!("step {step_no}: {e}"))?;
            elementary += 1;
        }
        let expected = triple.mutate(&direction).map_err(|e| e.to_string())?;
        let rm = match_template(&cfg)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("step {step_no}: no template re-match"))?;
        let got = rm.triple().map_err(|e| e.to_string())?;
        if got != expected {
            return Err(format!(
                "step {step_no}: slope tracking failed, {got} instead of {expected}"
            ));
        }

        // The checked replay must agree with the packaged composite.
        let next = state.step(branch).map_err(|e| e.to_string())?;
        if next.config != cfg {
            return Err(format!("step {step_no}: replay disagrees with composite"));
        }

        // Elementary involutivity at sampled vertices.
        for _ in 0..10 {
            let v = rng.gen_range(0..cfg.n());
            let back = cfg
                .mutate(v)
                .and_then(|m| m.mutate(v))
                .map_err(|e| format!("step {step_no}: involution at {v}: {e}"))?;
            if back != cfg {
                return Err(format!("step {step_no}: double mutation at {v} moved"));
            }
            involutions += 1;
        }
        state = next;
    }
    Ok(format!(
        "{steps} composite steps, {elementary} elementary mutations checked, {involutions} involutions"
    ))
}

fn check_negative_rank_control() -> Result<String, String> {
    let c = realize_base(&[3, 3, 3]).map_err(|e| e.to_string())?;
    if !c.rank_additivity_holds() {
        return Err("additivity fails before corruption".into());
    }
    let mut classes = c.classes().to_vec();
    classes[3].rk += 1;
    let broken = TiltingConfig::new_unchecked(c.weights().to_vec(), c.quiver().clone(), classes);
    if broken.rank_additivity_holds() {
        return Err("corrupted rank went undetected".into());
    }
    Ok("one corrupted rank breaks rank additivity".into())
}

fn check_negative_relation_control() -> Result<String, String> {
    let c = realize_base(&[2, 2, 2, 2]).map_err(|e| e.to_string())?;
    let all_commute = |c: &TiltingConfig| -> Result<(), String> {
        for k in 0..c.n() {
            commutation_step(c, k)?;
        }
        Ok(())
    };
    all_commute(&c).map_err(|e| format!("clean configuration failed: {e}"))?;

    // Reverse one relation; the quiver stays statically valid, but the
    // commutation sweep must flag it.
    let mut relations: Vec<i64> = c.quiver().relation_rows().concat();
    let n = c.n();
    let (i, j) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| relations[i * n + j] > 0)
        .ok_or("no relation to corrupt")?;
    relations[i * n + j] -= 1;
    relations[j * n + i] += 1;
    let quiver = GradedQuiver::from_matrices_unchecked(
        n,
        c.quiver().arrow_rows().concat(),
        relations,
    );
    quiver
        .validate()
        .map_err(|e| format!("corruption should stay statically valid: {e}"))?;
    let broken =
        TiltingConfig::new_unchecked(c.weights().to_vec(), quiver, c.classes().to_vec());
    match all_commute(&broken) {
        Ok(()) => Err("corrupted relation went undetected".into()),
        Err(detail) => Ok(format!("one reversed relation detected: {detail}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_suite_is_green() {
        for report in golden_suite() {
            assert!(report.passed, "{}: {}", report.name, report.detail);
        }
    }

    #[test]
    fn property_walks_are_green_at_small_size() {
        // The full 200-step walks run in the acceptance suite; keep the
        // in-module check quick.
        for kind in TubularType::ALL {
            let r = check_random_walk(kind, 12);
            assert!(r.is_ok(), "{kind:?}: {}", r.unwrap_err());
        }
        assert!(check_negative_rank_control().is_ok());
        assert!(check_negative_relation_control().is_ok());
    }
}
