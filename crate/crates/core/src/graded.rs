//! Quivers with two edge species — arrows `i → j` and relations `i ⇢ j` —
//! the source/sink mutation rule acting on them, and the collapse map down
//! to ordinary exchange matrices.
//!
//! Both species are stored as nonnegative multiplicity matrices. Arrow
//! multiplicities stay at most 1 in the tubular families, but intermediate
//! states of the mutation rule can exceed 1 before cancellation, so counts
//! are kept general.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::quiver::{refine_colors, ExchangeMatrix};
use crate::{Error, Result};

/// Bound for the brute-force isomorphism search.
pub const ISO_VERTEX_BOUND: usize = 12;

/// The two edge species.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeKind {
    Arrow,
    Relation,
}

/// Which version of the mutation rule to apply at a vertex.
///
/// The sink rule is realized as the formal dual of the source rule:
/// reverse every edge, apply the source rule, reverse back.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MutationRule {
    Source,
    Sink,
}

impl MutationRule {
    fn name(&self) -> &'static str {
        match self {
            MutationRule::Source => "source",
            MutationRule::Sink => "sink",
        }
    }
}

/// A quiver with relations: `arrows[i][j]` arrows and `relations[i][j]`
/// relations from `i` to `j`.
///
/// Invariants: zero diagonals, no arrow 2-cycles, and no pair of vertices
/// carrying both an arrow and a relation in the same direction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GradedQuiver {
    n: usize,
    arrows: Vec<i64>,
    relations: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct GradedQuiverRepr {
    n: usize,
    arrows: Vec<Vec<i64>>,
    relations: Vec<Vec<i64>>,
}

impl GradedQuiver {
    pub fn new(arrows: Vec<Vec<i64>>, relations: Vec<Vec<i64>>) -> Result<Self> {
        let n = arrows.len();
        let q = Self {
            n,
            arrows: flatten(n, &arrows)?,
            relations: flatten(n, &relations)?,
        };
        q.validate()?;
        Ok(q)
    }

    /// Builds a quiver from unit-multiplicity edge lists; repeated pairs
    /// accumulate.
    pub fn from_edges(n: usize, arrows: &[(usize, usize)], relations: &[(usize, usize)]) -> Result<Self> {
        let mut q = Self {
            n,
            arrows: vec![0; n * n],
            relations: vec![0; n * n],
        };
        for &(i, j) in arrows {
            if i >= n || j >= n {
                return Err(Error::VertexOutOfRange { vertex: i.max(j), n });
            }
            q.arrows[i * n + j] += 1;
        }
        for &(i, j) in relations {
            if i >= n || j >= n {
                return Err(Error::VertexOutOfRange { vertex: i.max(j), n });
            }
            q.relations[i * n + j] += 1;
        }
        q.validate()?;
        Ok(q)
    }

    /// Test hook for negative controls: no invariant check.
    pub(crate) fn from_matrices_unchecked(n: usize, arrows: Vec<i64>, relations: Vec<i64>) -> Self {
        Self { n, arrows, relations }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |msg: String| Err(Error::InvalidGradedQuiver(msg));
        for i in 0..n {
            if self.arrows[i * n + i] != 0 || self.relations[i * n + i] != 0 {
                return bad(format!("loop at vertex {i}"));
            }
            for j in 0..n {
                if self.arrows[i * n + j] < 0 || self.relations[i * n + j] < 0 {
                    return bad(format!("negative multiplicity at ({i}, {j})"));
                }
                if i < j && self.arrows[i * n + j] > 0 && self.arrows[j * n + i] > 0 {
                    return bad(format!("arrow 2-cycle between {i} and {j}"));
                }
                if self.arrows[i * n + j] > 0 && self.relations[i * n + j] > 0 {
                    return bad(format!("uncancelled arrow/relation pair at ({i}, {j})"));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arrow(&self, i: usize, j: usize) -> i64 {
        self.arrows[i * self.n + j]
    }

    pub fn relation(&self, i: usize, j: usize) -> i64 {
        self.relations[i * self.n + j]
    }

    pub fn arrow_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.arrows[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn relation_rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.relations[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Total number of edges of one species.
    pub fn count(&self, kind: EdgeKind) -> i64 {
        match kind {
            EdgeKind::Arrow => self.arrows.iter().sum(),
            EdgeKind::Relation => self.relations.iter().sum(),
        }
    }

    pub fn reversed(&self) -> GradedQuiver {
        let n = self.n;
        let mut arrows = vec![0; n * n];
        let mut relations = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                arrows[j * n + i] = self.arrows[i * n + j];
                relations[j * n + i] = self.relations[i * n + j];
            }
        }
        Self { n, arrows, relations }
    }

    /// Renames vertex `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> GradedQuiver {
        let n = self.n;
        let mut arrows = vec![0; n * n];
        let mut relations = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                arrows[perm[i] * n + perm[j]] = self.arrows[i * n + j];
                relations[perm[i] * n + perm[j]] = self.relations[i * n + j];
            }
        }
        Self { n, arrows, relations }
    }

    /// Mutation of the quiver with relations at vertex `k`.
    ///
    /// The source rule, in one batch over the original counts:
    /// composable arrow pairs through `k` add arrows, arrows out of `k`
    /// compose with relations out of `k` into relations, arrows into `k`
    /// become relations, arrows out of `k` reverse, relations out of `k`
    /// become arrows, then parallel arrow/relation pairs cancel. The sink
    /// rule is the dual under edge reversal.
    ///
    /// An invariant violation in the result signals that the wrong rule was
    /// selected for `k`.
    pub fn hubner_mutate(&self, k: usize, rule: MutationRule) -> Result<GradedQuiver> {
        if k >= self.n {
            return Err(Error::VertexOutOfRange { vertex: k, n: self.n });
        }
        match rule {
            MutationRule::Source => self.source_mutate(k),
            MutationRule::Sink => self
                .reversed()
                .source_mutate(k)
                .map(|q| q.reversed())
                .map_err(|e| match e {
                    Error::RuleNotApplicable { vertex, reason, .. } => Error::RuleNotApplicable {
                        vertex,
                        rule: rule.name(),
                        reason,
                    },
                    other => other,
                }),
        }
    }

    fn source_mutate(&self, k: usize) -> Result<GradedQuiver> {
        let n = self.n;
        let fail = |reason: String| Error::RuleNotApplicable {
            vertex: k,
            rule: "source",
            reason,
        };
        for i in 0..n {
            if self.relation(i, k) > 0 {
                return Err(fail(format!("incoming relation from {i}")));
            }
        }
        let mut arrows = vec![0i64; n * n];
        let mut relations = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == k || j == k {
                    continue;
                }
                // (ii) and (iii), on top of the untouched part (viii).
                arrows[i * n + j] = self.arrow(i, j) + self.arrow(i, k) * self.arrow(k, j);
                relations[i * n + j] = self.relation(i, j) + self.arrow(k, i) * self.relation(k, j);
            }
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            arrows[i * n + k] = self.arrow(k, i); // (v)
            relations[i * n + k] = self.arrow(i, k); // (iv)
            arrows[k * n + i] = self.relation(k, i); // (vi)
        }
        // (vii): parallel pairs cancel; multiset subtraction is the unique
        // fixed point of cancelling one pair at a time.
        for idx in 0..n * n {
            let c = arrows[idx].min(relations[idx]);
            arrows[idx] -= c;
            relations[idx] -= c;
        }
        let out = Self { n, arrows, relations };
        out.validate().map_err(|e| fail(e.to_string()))?;
        Ok(out)
    }

    /// Collapse to an exchange matrix: each relation `i ⇢ j` counts as an
    /// arrow `j → i`, then arrows are skew-symmetrized.
    pub fn collapse(&self) -> ExchangeMatrix {
        let n = self.n;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.arrow(i, j) - self.arrow(j, i) + self.relation(j, i)
                            - self.relation(i, j)
                    })
                    .collect()
            })
            .collect();
        ExchangeMatrix::new(rows).expect("collapse is skew-symmetric by construction")
    }

    /// DOT rendering: solid edges for arrows, dashed for relations.
    pub fn to_dot(&self) -> String {
        self.to_dot_labeled(|i| i.to_string())
    }

    pub fn to_dot_labeled<F: Fn(usize) -> String>(&self, label: F) -> String {
        let mut out = String::from("digraph graded {\n");
        for i in 0..self.n {
            let _ = writeln!(out, "  v{i} [label=\"{}\"];", label(i));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                for _ in 0..self.arrow(i, j) {
                    let _ = writeln!(out, "  v{i} -> v{j};");
                }
                for _ in 0..self.relation(i, j) {
                    let _ = writeln!(out, "  v{i} -> v{j} [style=dashed];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn flatten(n: usize, rows: &[Vec<i64>]) -> Result<Vec<i64>> {
    let mut out = vec![0i64; n * n];
    if rows.len() != n {
        return Err(Error::Parse(format!(
            "expected {n} rows, got {}",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "row {i} has length {} in an {n}-vertex quiver",
                row.len()
            )));
        }
        out[i * n..(i + 1) * n].copy_from_slice(row);
    }
    Ok(out)
}

impl Serialize for GradedQuiver {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GradedQuiverRepr {
            n: self.n,
            arrows: self.arrow_rows(),
            relations: self.relation_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedQuiver {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GradedQuiverRepr::deserialize(d)?;
        GradedQuiver::new(repr.arrows, repr.relations).map_err(serde::de::Error::custom)
    }
}

/// A vertex bijection carrying both edge matrices of `g` onto `h`, if any.
pub fn graded_iso(g: &GradedQuiver, h: &GradedQuiver) -> Result<Option<Vec<usize>>> {
    let init = vec![0usize; g.n() + h.n()];
    Ok(graded_isos_colored(g, h, &init[..g.n()], &init[g.n()..], 1)?.pop())
}

/// All vertex bijections `g → h` (up to `limit`) that carry arrows to
/// arrows, relations to relations, and caller colors to caller colors.
///
/// The two color slices must draw from one shared value universe; they act
/// as an initial invariant for the joint refinement.
pub fn graded_isos_colored(
    g: &GradedQuiver,
    h: &GradedQuiver,
    g_colors: &[usize],
    h_colors: &[usize],
    limit: usize,
) -> Result<Vec<Vec<usize>>> {
    if g.n() > ISO_VERTEX_BOUND || h.n() > ISO_VERTEX_BOUND {
        return Err(Error::TooManyVertices(g.n().max(h.n()), ISO_VERTEX_BOUND));
    }
    if g.n() != h.n()
        || g.count(EdgeKind::Arrow) != h.count(EdgeKind::Arrow)
        || g.count(EdgeKind::Relation) != h.count(EdgeKind::Relation)
    {
        return Ok(Vec::new());
    }
    let n = g.n();
    // Joint refinement over the disjoint union keeps the color ids of the
    // two graphs comparable.
    let edge = |i: usize, j: usize| -> Vec<i64> {
        let side = |v: usize| if v < n { 0 } else { 1 };
        if side(i) != side(j) {
            return vec![i64::MIN];
        }
        if side(i) == 0 {
            vec![g.arrow(i, j), g.relation(i, j)]
        } else {
            vec![h.arrow(i - n, j - n), h.relation(i - n, j - n)]
        }
    };
    let mut init: Vec<i64> = Vec::with_capacity(2 * n);
    init.extend(g_colors.iter().map(|&c| c as i64));
    init.extend(h_colors.iter().map(|&c| c as i64));
    // Fold the caller colors in by refining with them as self-loop labels.
    let colors = refine_colors(2 * n, |i, j| {
        let mut e = edge(i, j);
        e.push(init[i]);
        e.push(init[j]);
        e
    });
    let (cg, ch) = colors.split_at(n);

    let mut out = Vec::new();
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    backtrack(g, h, cg, ch, 0, &mut mapping, &mut used, &mut out, limit);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    g: &GradedQuiver,
    h: &GradedQuiver,
    cg: &[usize],
    ch: &[usize],
    i: usize,
    mapping: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let n = g.n();
    if i == n {
        out.push(mapping.clone());
        return;
    }
    for j in 0..n {
        if used[j] || cg[i] != ch[j] {
            continue;
        }
        let ok = (0..i).all(|p| {
            let q = mapping[p];
            g.arrow(i, p) == h.arrow(j, q)
                && g.arrow(p, i) == h.arrow(q, j)
                && g.relation(i, p) == h.relation(j, q)
                && g.relation(p, i) == h.relation(q, j)
        });
        if ok {
            mapping[i] = j;
            used[j] = true;
            backtrack(g, h, cg, ch, i + 1, mapping, used, out, limit);
            mapping[i] = usize::MAX;
            used[j] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn linear_a3() -> GradedQuiver {
        GradedQuiver::from_edges(3, &[(0, 1), (1, 2)], &[]).unwrap()
    }

    #[test]
    fn source_mutation_at_a_plain_source_only_reverses() {
        let q = linear_a3().hubner_mutate(0, MutationRule::Source).unwrap();
        assert_eq!(q, GradedQuiver::from_edges(3, &[(1, 0), (1, 2)], &[]).unwrap());
    }

    #[test]
    fn source_mutation_composes_and_cancels() {
        // 0 -> 1 -> 2 with the relation 0 ⇢ 2: mutating at 1 creates the
        // composite arrow 0 -> 2, which cancels against the relation.
        let q = GradedQuiver::from_edges(3, &[(0, 1), (1, 2)], &[(0, 2)]).unwrap();
        let m = q.hubner_mutate(1, MutationRule::Source).unwrap();
        assert_eq!(m, GradedQuiver::from_edges(3, &[(2, 1)], &[(0, 1)]).unwrap());
    }

    #[test]
    fn source_rule_rejects_incoming_relations() {
        let q = GradedQuiver::from_edges(3, &[(0, 1), (1, 2)], &[(0, 2)]).unwrap();
        let err = q.hubner_mutate(2, MutationRule::Source).unwrap_err();
        assert!(matches!(err, Error::RuleNotApplicable { vertex: 2, .. }));
    }

    #[test]
    fn sink_rule_is_the_reversal_dual() {
        let q = GradedQuiver::from_edges(3, &[(0, 1), (1, 2)], &[(0, 2)]).unwrap();
        let sink = q.hubner_mutate(2, MutationRule::Sink).unwrap();
        let dual = q
            .reversed()
            .hubner_mutate(2, MutationRule::Source)
            .unwrap()
            .reversed();
        assert_eq!(sink, dual);
    }

    #[test]
    fn collapse_examples() {
        // Plain quiver: adjacency skew-symmetrization.
        assert_eq!(
            linear_a3().collapse(),
            ExchangeMatrix::from_arrows(3, &[(0, 1, 1), (1, 2, 1)]).unwrap()
        );
        // Arrows 0 -> 1 -> 2 with relation 0 ⇢ 2 collapse to an oriented
        // 3-cycle.
        let q = GradedQuiver::from_edges(3, &[(0, 1), (1, 2)], &[(0, 2)]).unwrap();
        assert_eq!(
            q.collapse(),
            ExchangeMatrix::from_arrows(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap()
        );
    }

    #[test]
    fn iso_finds_permutation_of_self() {
        let q = GradedQuiver::from_edges(4, &[(0, 1), (1, 2), (3, 1)], &[(0, 2)]).unwrap();
        let perm = vec![2, 0, 3, 1];
        let mut arrows = vec![vec![0; 4]; 4];
        let mut relations = vec![vec![0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                arrows[perm[i]][perm[j]] = q.arrow(i, j);
                relations[perm[i]][perm[j]] = q.relation(i, j);
            }
        }
        let h = GradedQuiver::new(arrows, relations).unwrap();
        let found = graded_iso(&q, &h).unwrap().expect("isomorphic");
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(q.arrow(i, j), h.arrow(found[i], found[j]));
                assert_eq!(q.relation(i, j), h.relation(found[i], found[j]));
            }
        }
    }

    #[test]
    fn iso_distinguishes_edge_species() {
        let a = GradedQuiver::from_edges(3, &[(0, 1), (1, 2)], &[(0, 2)]).unwrap();
        let b = GradedQuiver::from_edges(3, &[(0, 1), (1, 2), (0, 2)], &[]).unwrap();
        assert!(graded_iso(&a, &b).unwrap().is_none());
    }

    #[test]
    fn colored_iso_respects_colors() {
        let q = GradedQuiver::from_edges(2, &[(0, 1)], &[]).unwrap();
        let same = graded_isos_colored(&q, &q, &[0, 1], &[0, 1], 10).unwrap();
        assert_eq!(same.len(), 1);
        let clash = graded_isos_colored(&q, &q, &[0, 1], &[1, 0], 10).unwrap();
        assert!(clash.is_empty());
    }

    /// Sequentially cancels random parallel pairs until none remain.
    fn cancel_sequential(
        mut arrows: Vec<i64>,
        mut relations: Vec<i64>,
        rng: &mut impl rand::Rng,
    ) -> (Vec<i64>, Vec<i64>) {
        loop {
            let live: Vec<usize> = (0..arrows.len())
                .filter(|&i| arrows[i] > 0 && relations[i] > 0)
                .collect();
            let Some(&pick) = live.choose(rng) else {
                return (arrows, relations);
            };
            arrows[pick] -= 1;
            relations[pick] -= 1;
        }
    }

    #[test]
    fn cancellation_is_confluent() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let len = 16;
            let arrows: Vec<i64> = (0..len).map(|_| rand::Rng::gen_range(&mut rng, 0..5)).collect();
            let relations: Vec<i64> =
                (0..len).map(|_| rand::Rng::gen_range(&mut rng, 0..5)).collect();
            let batch: (Vec<i64>, Vec<i64>) = {
                let a: Vec<i64> = arrows
                    .iter()
                    .zip(&relations)
                    .map(|(&a, &r)| a - a.min(r))
                    .collect();
                let r: Vec<i64> = arrows
                    .iter()
                    .zip(&relations)
                    .map(|(&a, &r)| r - a.min(r))
                    .collect();
                (a, r)
            };
            let seq = cancel_sequential(arrows, relations, &mut rng);
            assert_eq!(batch, seq);
        }
    }

    /// Random valid graded quivers for property tests.
    fn arb_graded() -> impl Strategy<Value = GradedQuiver> {
        (2usize..6)
            .prop_flat_map(|n| {
                let cells = proptest::collection::vec(0i64..3, n * n);
                (Just(n), cells.clone(), cells)
            })
            .prop_map(|(n, mut arrows, mut relations)| {
                for i in 0..n {
                    arrows[i * n + i] = 0;
                    relations[i * n + i] = 0;
                    for j in 0..i {
                        // Drop one side of any arrow 2-cycle.
                        if arrows[i * n + j] > 0 && arrows[j * n + i] > 0 {
                            arrows[j * n + i] = 0;
                        }
                    }
                }
                for idx in 0..n * n {
                    let c = arrows[idx].min(relations[idx]);
                    arrows[idx] -= c;
                    relations[idx] -= c;
                }
                let rows = |m: &Vec<i64>| {
                    (0..n)
                        .map(|i| m[i * n..(i + 1) * n].to_vec())
                        .collect::<Vec<_>>()
                };
                GradedQuiver::new(rows(&arrows), rows(&relations)).expect("repaired to validity")
            })
    }

    proptest! {
        #[test]
        fn collapse_is_always_skew_symmetric(q in arb_graded()) {
            let b = q.collapse();
            for i in 0..b.n() {
                for j in 0..b.n() {
                    prop_assert_eq!(b[(i, j)], -b[(j, i)]);
                }
            }
        }

        #[test]
        fn mutation_commutes_with_collapse_where_applicable(q in arb_graded(), k in 0usize..6) {
            let k = k % q.n();
            for rule in [MutationRule::Source, MutationRule::Sink] {
                if let Ok(m) = q.hubner_mutate(k, rule) {
                    prop_assert_eq!(m.collapse(), q.collapse().fz_mutate(k).unwrap());
                }
            }
        }
    }
}
