//! Tilting configurations: a graded quiver together with a per-vertex
//! (degree, rank) class and a weight sequence. The class data decides which
//! mutation rule applies at a vertex — the quiver alone cannot, since two
//! configurations with isomorphic quivers may classify the same vertex
//! differently.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::farey::Rat;
use crate::graded::{GradedQuiver, MutationRule};
use crate::{Error, Result};

/// Degree and rank of a summand class in the Grothendieck group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KClass {
    pub deg: BigInt,
    pub rk: BigInt,
}

impl KClass {
    pub fn new(deg: impl Into<BigInt>, rk: impl Into<BigInt>) -> Self {
        Self {
            deg: deg.into(),
            rk: rk.into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.deg.is_zero() && self.rk.is_zero()
    }

    /// Positive classes have `rk > 0`, or `rk = 0` and `deg > 0`.
    pub fn is_positive(&self) -> bool {
        self.rk.is_positive() || (self.rk.is_zero() && self.deg.is_positive())
    }

    /// The slope `deg/rk` as an exact value in Q ∪ {∞}.
    pub fn slope(&self) -> Result<Rat> {
        Rat::new(self.deg.clone(), self.rk.clone())
    }

    fn add(&self, other: &KClass) -> KClass {
        KClass {
            deg: &self.deg + &other.deg,
            rk: &self.rk + &other.rk,
        }
    }

    fn sub(&self, other: &KClass) -> KClass {
        KClass {
            deg: &self.deg - &other.deg,
            rk: &self.rk - &other.rk,
        }
    }

    fn scaled(&self, m: i64) -> KClass {
        KClass {
            deg: &self.deg * m,
            rk: &self.rk * m,
        }
    }

    /// Splits into `mult · primitive` with `primitive` a coprime pair.
    pub fn primitive_part(&self) -> (BigInt, KClass) {
        let g = self.deg.gcd(&self.rk);
        if g.is_zero() {
            return (BigInt::from(1), self.clone());
        }
        (
            g.clone(),
            KClass {
                deg: &self.deg / &g,
                rk: &self.rk / &g,
            },
        )
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.deg, self.rk)
    }
}

impl fmt::Debug for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.deg, self.rk)
    }
}

mod big_json {
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::ser::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = x
            .to_string()
            .parse()
            .map_err(|e| S::Error::custom(format!("unrepresentable integer: {e}")))?;
        n.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        n.to_string()
            .parse()
            .map_err(|e| D::Error::custom(format!("expected an integer: {e}")))
    }
}

#[derive(Serialize, Deserialize)]
struct KClassRepr {
    #[serde(with = "big_json")]
    deg: BigInt,
    #[serde(with = "big_json")]
    rk: BigInt,
}

impl Serialize for KClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KClassRepr {
            deg: self.deg.clone(),
            rk: self.rk.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = KClassRepr::deserialize(d)?;
        Ok(KClass {
            deg: repr.deg,
            rk: repr.rk,
        })
    }
}

/// Source/sink classification of a summand.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HubnerClass {
    Source,
    Sink,
}

/// A tilting configuration: weights, quiver with relations, and one class
/// per vertex. Immutable; mutation returns a new configuration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TiltingConfig {
    weights: Vec<u32>,
    quiver: GradedQuiver,
    classes: Vec<KClass>,
}

#[derive(Serialize, Deserialize)]
struct TiltingConfigRepr {
    weights: Vec<u32>,
    #[serde(flatten)]
    quiver: GradedQuiver,
    classes: Vec<KClass>,
}

impl TiltingConfig {
    pub fn new(weights: Vec<u32>, quiver: GradedQuiver, classes: Vec<KClass>) -> Result<Self> {
        if classes.len() != quiver.n() {
            return Err(Error::Parse(format!(
                "{} classes for {} vertices",
                classes.len(),
                quiver.n()
            )));
        }
        let c = Self {
            weights,
            quiver,
            classes,
        };
        c.check_classes()?;
        Ok(c)
    }

    pub(crate) fn new_unchecked(
        weights: Vec<u32>,
        quiver: GradedQuiver,
        classes: Vec<KClass>,
    ) -> Self {
        Self {
            weights,
            quiver,
            classes,
        }
    }

    fn check_classes(&self) -> Result<()> {
        for (i, c) in self.classes.iter().enumerate() {
            if c.is_zero() {
                return Err(Error::DegenerateClass(i));
            }
            if !c.is_positive() {
                return Err(Error::NegativeRank {
                    vertex: i,
                    rank: c.rk.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.quiver.n()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn quiver(&self) -> &GradedQuiver {
        &self.quiver
    }

    pub fn classes(&self) -> &[KClass] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &KClass {
        &self.classes[i]
    }

    /// Class of the simple module at `i`: the vertex class minus incoming
    /// arrow classes plus incoming relation classes, componentwise.
    pub fn simple_class(&self, i: usize) -> KClass {
        let mut s = self.classes[i].clone();
        for j in 0..self.n() {
            s = s.sub(&self.classes[j].scaled(self.quiver.arrow(j, i)));
            s = s.add(&self.classes[j].scaled(self.quiver.relation(j, i)));
        }
        s
    }

    /// Source iff the simple class has `rk > 0`, or `rk = 0` and `deg > 0`.
    pub fn hubner_class(&self, i: usize) -> Result<HubnerClass> {
        let s = self.simple_class(i);
        if s.is_zero() {
            return Err(Error::DegenerateClass(i));
        }
        Ok(if s.is_positive() {
            HubnerClass::Source
        } else {
            HubnerClass::Sink
        })
    }

    /// Mutation at vertex `k`: the rule is selected by
    /// [`hubner_class`](Self::hubner_class), the quiver is rewritten by the
    /// graded rule, and the class at `k` is replaced using the arrows of the
    /// quiver before mutation (cokernel of the radical map out of `k` for a
    /// source, kernel of the map into `k` for a sink).
    pub fn mutate(&self, k: usize) -> Result<TiltingConfig> {
        if k >= self.n() {
            return Err(Error::VertexOutOfRange {
                vertex: k,
                n: self.n(),
            });
        }
        let class = self.hubner_class(k)?;
        let rule = match class {
            HubnerClass::Source => MutationRule::Source,
            HubnerClass::Sink => MutationRule::Sink,
        };
        let quiver = self.quiver.hubner_mutate(k, rule)?;
        let mut sum = KClass::new(0, 0);
        for h in 0..self.n() {
            let m = match class {
                HubnerClass::Source => self.quiver.arrow(k, h),
                HubnerClass::Sink => self.quiver.arrow(h, k),
            };
            sum = sum.add(&self.classes[h].scaled(m));
        }
        let mut classes = self.classes.clone();
        classes[k] = sum.sub(&self.classes[k]);
        let out = Self {
            weights: self.weights.clone(),
            quiver,
            classes,
        };
        out.check_classes()?;
        Ok(out)
    }

    /// Exact slope of the summand at `i`.
    pub fn slope(&self, i: usize) -> Result<Rat> {
        if self.classes[i].is_zero() {
            return Err(Error::DegenerateClass(i));
        }
        self.classes[i].slope()
    }

    /// Distinct slopes over all vertices.
    pub fn slope_set(&self) -> Result<BTreeSet<Rat>> {
        (0..self.n()).map(|i| self.slope(i)).collect()
    }

    /// Slopes with multiplicity, sorted.
    pub fn slope_multiset(&self) -> Result<Vec<Rat>> {
        let mut v: Vec<Rat> = (0..self.n()).map(|i| self.slope(i)).collect::<Result<_>>()?;
        v.sort();
        Ok(v)
    }

    /// Checks the additivity of the rank function over the quiver with
    /// relations: twice the rank at a vertex equals the rank sum over
    /// incident arrows minus the rank sum over incident relations.
    pub fn rank_additivity_holds(&self) -> bool {
        (0..self.n()).all(|i| {
            let mut sum = BigInt::zero();
            for j in 0..self.n() {
                sum += (self.quiver.arrow(j, i) + self.quiver.arrow(i, j)) * &self.classes[j].rk;
                sum -=
                    (self.quiver.relation(j, i) + self.quiver.relation(i, j)) * &self.classes[j].rk;
            }
            sum == 2 * &self.classes[i].rk
        })
    }

    /// DOT rendering with each vertex annotated by its `deg/rk`.
    pub fn to_dot(&self) -> String {
        self.quiver
            .to_dot_labeled(|i| format!("{}: {}", i, self.classes[i]))
    }
}

impl Serialize for TiltingConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TiltingConfigRepr {
            weights: self.weights.clone(),
            quiver: self.quiver.clone(),
            classes: self.classes.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TiltingConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TiltingConfigRepr::deserialize(d)?;
        TiltingConfig::new(repr.weights, repr.quiver, repr.classes)
            .map_err(serde::de::Error::custom)
    }
}

fn lcm_of(weights: &[u32]) -> u32 {
    weights.iter().fold(1u32, |acc, &w| acc.lcm(&w))
}

/// Checks a weight sequence for the canonical construction.
fn check_weights(weights: &[u32]) -> Result<()> {
    if weights.len() < 2 {
        return Err(Error::InvalidWeights(format!(
            "need at least two weights, got {weights:?}"
        )));
    }
    if let Some(&w) = weights.iter().find(|&&w| w < 2) {
        return Err(Error::InvalidWeights(format!(
            "weights must be at least 2, got {w} in {weights:?}"
        )));
    }
    Ok(())
}

/// The canonical configuration for a weight sequence: a star-shaped quiver
/// with one arm per weight running from the source (vertex 0) to the sink
/// (last vertex), `t − 2` relations from source to sink, all ranks 1, and
/// the degree climbing by `p/p_i` along arm `i`, where `p = lcm(weights)`.
///
/// Vertices are numbered source first, then the arms one after another in
/// weight order (each arm read from the source side), sink last. This is
/// the row-major reading of the usual star layout.
pub fn canonical_config(weights: &[u32]) -> Result<TiltingConfig> {
    check_weights(weights)?;
    let t = weights.len();
    let p = lcm_of(weights);
    let n = 2 + weights.iter().map(|&w| w as usize - 1).sum::<usize>();
    let sink = n - 1;

    let mut arrows = Vec::new();
    let mut classes = vec![KClass::new(0, 1)];
    let mut next = 1usize;
    for &w in weights {
        let step = p / w;
        let mut prev = 0usize;
        for j in 1..w {
            arrows.push((prev, next));
            classes.push(KClass::new(j * step, 1u32));
            prev = next;
            next += 1;
        }
        arrows.push((prev, sink));
    }
    classes.push(KClass::new(p, 1u32));

    let relations: Vec<(usize, usize)> = vec![(0, sink); t - 2];
    let quiver = GradedQuiver::from_edges(n, &arrows, &relations)?;
    TiltingConfig::new(weights.to_vec(), quiver, classes)
}

/// Mutation sequences producing, from the canonical configuration, a
/// configuration whose slope set is `{0, 1, ∞}`. Vertex labels are 1-based:
/// 1 the source, `n` the sink, arm vertices in between in vertex order.
fn base_sequence(weights: &[u32]) -> Result<&'static [usize]> {
    match weights {
        [2, 2, 2, 2] => Ok(&[2, 3, 6]),
        [3, 3, 3] => Ok(&[7, 5, 3, 8, 1]),
        [4, 4, 2] => Ok(&[3, 6, 9, 4, 7, 9, 7, 8, 1, 3]),
        [6, 3, 2] => Ok(&[5, 10, 8, 6, 10, 3, 4, 8, 9, 7, 2, 4, 6, 5]),
        _ => Err(Error::NotTubular(format!("{weights:?}"))),
    }
}

/// Runs the fixed mutation sequence that turns the canonical configuration
/// into the base realization of the Farey triple `{0, 1, ∞}`.
pub fn realize_base(weights: &[u32]) -> Result<TiltingConfig> {
    let seq = base_sequence(weights)?;
    let mut c = canonical_config(weights)?;
    for (step, &label) in seq.iter().enumerate() {
        let vertex = label - 1;
        c = c.mutate(vertex).map_err(|e| Error::RealizationFailed {
            step,
            vertex,
            reason: e.to_string(),
        })?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::graded_iso;

    fn k(deg: i64, rk: i64) -> KClass {
        KClass::new(deg, rk)
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d).unwrap()
    }

    #[test]
    fn canonical_2222_shape() {
        let c = canonical_config(&[2, 2, 2, 2]).unwrap();
        assert_eq!(c.n(), 6);
        assert_eq!(
            c.classes(),
            &[k(0, 1), k(1, 1), k(1, 1), k(1, 1), k(1, 1), k(2, 1)]
        );
        assert_eq!(c.quiver().relation(0, 5), 2);
        for i in 1..5 {
            assert_eq!(c.quiver().arrow(0, i), 1);
            assert_eq!(c.quiver().arrow(i, 5), 1);
        }
        assert!(c.rank_additivity_holds());
    }

    #[test]
    fn canonical_333_and_632_shapes() {
        let c = canonical_config(&[3, 3, 3]).unwrap();
        assert_eq!(c.n(), 8);
        let degs: Vec<i64> = (0..8).map(|i| i64::try_from(&c.class(i).deg).unwrap()).collect();
        assert_eq!(degs, vec![0, 1, 2, 1, 2, 1, 2, 3]);
        assert_eq!(c.quiver().relation(0, 7), 1);

        let c = canonical_config(&[6, 3, 2]).unwrap();
        assert_eq!(c.n(), 10);
        let degs: Vec<i64> = (0..10).map(|i| i64::try_from(&c.class(i).deg).unwrap()).collect();
        // Weight-6 arm climbs 1..5, weight-3 arm by 2s, weight-2 arm at 3.
        assert_eq!(degs, vec![0, 1, 2, 3, 4, 5, 2, 4, 3, 6]);
        assert!(c.rank_additivity_holds());
    }

    #[test]
    fn canonical_rejects_bad_weights() {
        assert!(canonical_config(&[2]).is_err());
        assert!(canonical_config(&[2, 1]).is_err());
    }

    #[test]
    fn simple_classes_on_the_canonical_star() {
        let c = canonical_config(&[2, 2, 2, 2]).unwrap();
        // The quiver source has no incoming edges, so its simple class is
        // its own class and it classifies as a source.
        assert_eq!(c.simple_class(0), k(0, 1));
        assert_eq!(c.hubner_class(0).unwrap(), HubnerClass::Source);
        // An arm vertex: class minus the incoming source class.
        assert_eq!(c.simple_class(1), k(1, 0));
        assert_eq!(c.hubner_class(1).unwrap(), HubnerClass::Source);
        // The sink receives four arrows and two relations.
        assert_eq!(c.simple_class(5), k(2 - 4, 1 - 4 + 2));
        assert_eq!(c.hubner_class(5).unwrap(), HubnerClass::Sink);
    }

    /// The worked mutation chain on weights (2,2,2,2): the three steps and
    /// the slope data they produce, checked state by state.
    #[test]
    fn golden_2222_chain() {
        let c0 = canonical_config(&[2, 2, 2, 2]).unwrap();
        assert_eq!(
            c0.slope_multiset().unwrap(),
            vec![rat(0, 1), rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1), rat(2, 1)]
        );

        let c1 = c0.mutate(1).unwrap();
        let q1 = GradedQuiver::from_edges(
            6,
            &[(0, 2), (0, 3), (0, 4), (2, 5), (3, 5), (4, 5), (5, 1)],
            &[(0, 5), (0, 1)],
        )
        .unwrap();
        assert_eq!(c1.quiver(), &q1);
        assert_eq!(c1.class(1), &k(1, 0));
        assert_eq!(c1.slope(1).unwrap(), Rat::infinity());

        let c2 = c1.mutate(2).unwrap();
        let q2 = GradedQuiver::from_edges(
            6,
            &[(0, 3), (0, 4), (3, 5), (4, 5), (5, 1), (5, 2)],
            &[(0, 1), (0, 2)],
        )
        .unwrap();
        assert_eq!(c2.quiver(), &q2);
        assert_eq!(c2.class(2), &k(1, 0));

        let c3 = c2.mutate(5).unwrap();
        let q3 = GradedQuiver::from_edges(
            6,
            &[(0, 3), (0, 4), (3, 1), (3, 2), (4, 1), (4, 2), (5, 3), (5, 4)],
            &[(0, 1), (0, 2), (5, 1), (5, 2)],
        )
        .unwrap();
        assert_eq!(c3.quiver(), &q3);
        assert_eq!(c3.class(5), &k(0, 1));
        let slopes = c3.slope_set().unwrap();
        assert_eq!(
            slopes.into_iter().collect::<Vec<_>>(),
            vec![rat(0, 1), rat(1, 1), Rat::infinity()]
        );
        assert!(c3.rank_additivity_holds());
    }

    #[test]
    fn elementary_mutation_is_involutive_on_the_2222_chain() {
        let mut c = canonical_config(&[2, 2, 2, 2]).unwrap();
        for kdx in [1usize, 2, 5] {
            for v in 0..c.n() {
                let twice = c.mutate(v).unwrap().mutate(v).unwrap();
                assert_eq!(&twice, &c, "double mutation at {v}");
            }
            c = c.mutate(kdx).unwrap();
        }
    }

    #[test]
    fn golden_333_realization() {
        let c = realize_base(&[3, 3, 3]).unwrap();
        // Slope table: three summands of slope 1, classes 0/1 and 0/2, and
        // three of slope 1/0.
        let mut classes = c.classes().to_vec();
        classes.sort();
        let mut expected = vec![
            k(1, 1),
            k(1, 1),
            k(1, 1),
            k(0, 1),
            k(0, 2),
            k(1, 0),
            k(1, 0),
            k(1, 0),
        ];
        expected.sort();
        assert_eq!(classes, expected);
        assert!(c.rank_additivity_holds());

        // Exact replay of the chain end state.
        let q = GradedQuiver::from_edges(
            8,
            &[
                (3, 2),
                (5, 2),
                (1, 4),
                (5, 4),
                (1, 6),
                (3, 6),
                (7, 1),
                (7, 3),
                (7, 5),
                (7, 0),
            ],
            &[(7, 2), (7, 4), (7, 6)],
        )
        .unwrap();
        assert_eq!(c.quiver(), &q);
    }

    #[test]
    fn realizations_hit_the_base_triple() {
        for weights in [&[2u32, 2, 2, 2][..], &[3, 3, 3], &[4, 4, 2], &[6, 3, 2]] {
            let c = realize_base(weights).unwrap();
            let slopes: Vec<Rat> = c.slope_set().unwrap().into_iter().collect();
            assert_eq!(
                slopes,
                vec![rat(0, 1), rat(1, 1), Rat::infinity()],
                "weights {weights:?}"
            );
            assert!(c.rank_additivity_holds(), "weights {weights:?}");
        }
    }

    #[test]
    fn golden_442_realization_table() {
        let c = realize_base(&[4, 4, 2]).unwrap();
        let mut classes = c.classes().to_vec();
        classes.sort();
        let mut expected = vec![
            k(0, 1),
            k(0, 2),
            k(0, 1),
            k(1, 1),
            k(2, 2),
            k(1, 1),
            k(1, 0),
            k(2, 0),
            k(1, 0),
        ];
        expected.sort();
        assert_eq!(classes, expected);
    }

    #[test]
    fn golden_632_realization_table() {
        let c = realize_base(&[6, 3, 2]).unwrap();
        let mut classes = c.classes().to_vec();
        classes.sort();
        // Slope families 0, 1 and infinity with the four-member family at
        // infinity, matching the w family of the realization quiver (four
        // vertices, two of them doubled).
        let mut expected = vec![
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
        ];
        expected.sort();
        assert_eq!(classes, expected);
    }

    #[test]
    fn corrupted_rank_breaks_additivity() {
        let c = realize_base(&[3, 3, 3]).unwrap();
        assert!(c.rank_additivity_holds());
        let mut classes = c.classes().to_vec();
        classes[3].rk += 1;
        let broken = TiltingConfig::new_unchecked(c.weights().to_vec(), c.quiver().clone(), classes);
        assert!(!broken.rank_additivity_holds());
    }

    #[test]
    fn mutation_reports_vertex_errors() {
        let c = canonical_config(&[3, 3, 3]).unwrap();
        assert!(matches!(
            c.mutate(99),
            Err(Error::VertexOutOfRange { vertex: 99, .. })
        ));
    }

    #[test]
    fn realization_quivers_are_iso_to_each_other_only_in_the_same_family() {
        let a = realize_base(&[3, 3, 3]).unwrap();
        let b = realize_base(&[4, 4, 2]).unwrap();
        assert!(graded_iso(a.quiver(), b.quiver()).unwrap().is_none());
    }

    #[test]
    fn config_json_round_trip() {
        let c = realize_base(&[6, 3, 2]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: TiltingConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn canonical_2222_collapses_to_the_first_seed() {
        // Both are 6-vertex seeds of the same type: equal canonical keys.
        let collapsed = canonical_config(&[2, 2, 2, 2]).unwrap().quiver().collapse();
        assert_eq!(
            collapsed.canonical_key().unwrap(),
            crate::quiver::SeedQuiver::D4_11.matrix().canonical_key().unwrap()
        );
    }
}
