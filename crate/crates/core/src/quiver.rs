//! Ordinary quivers as skew-symmetric exchange matrices: matrix mutation,
//! canonical forms up to simultaneous row/column permutation, and
//! mutation-class enumeration by breadth-first closure.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hard bound for the brute-force canonical form.
pub const CANONICAL_VERTEX_BOUND: usize = 12;

/// A skew-symmetric integer matrix encoding an ordinary quiver:
/// `b[i][j] > 0` means `b[i][j]` arrows from `i` to `j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExchangeMatrix {
    n: usize,
    b: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct ExchangeMatrixRepr {
    n: usize,
    b: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        let mut b = vec![0i64; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Parse(format!(
                    "row {i} has length {} in an {n}-vertex matrix",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                b[i * n + j] = x;
            }
        }
        let m = Self { n, b };
        m.check_skew()?;
        Ok(m)
    }

    /// Builds the matrix of a quiver from arrow multiplicities.
    pub fn from_arrows(n: usize, arrows: &[(usize, usize, i64)]) -> Result<Self> {
        let mut b = vec![0i64; n * n];
        for &(from, to, mult) in arrows {
            if from >= n || to >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: from.max(to),
                    n,
                });
            }
            b[from * n + to] += mult;
            b[to * n + from] -= mult;
        }
        let m = Self { n, b };
        m.check_skew()?;
        Ok(m)
    }

    fn check_skew(&self) -> Result<()> {
        for i in 0..self.n {
            for j in i..self.n {
                if self[(i, j)] != -self[(j, i)] {
                    return Err(Error::NotSkewSymmetric(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.b[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Fomin–Zelevinsky mutation at vertex `k`:
    /// entries through `k` flip sign, the rest gain `sgn(b_ik)·max(0, b_ik·b_kj)`.
    pub fn fz_mutate(&self, k: usize) -> Result<ExchangeMatrix> {
        if k >= self.n {
            return Err(Error::VertexOutOfRange { vertex: k, n: self.n });
        }
        let n = self.n;
        let mut b = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let old = self[(i, j)];
                b[i * n + j] = if i == k || j == k {
                    -old
                } else {
                    old + self[(i, k)].signum() * 0.max(self[(i, k)] * self[(k, j)])
                };
            }
        }
        Ok(Self { n, b })
    }

    /// Applies a vertex permutation: vertex `i` is renamed `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> ExchangeMatrix {
        let n = self.n;
        let mut b = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                b[perm[i] * n + perm[j]] = self[(i, j)];
            }
        }
        Self { n, b }
    }

    /// Canonical byte encoding up to simultaneous row/column permutation.
    ///
    /// Vertices are first split by iterated degree-signature refinement, then
    /// a branch-and-bound search minimizes the upper-triangle encoding over
    /// the refinement-respecting permutations.
    pub fn canonical_key(&self) -> Result<CanonicalKey> {
        if self.n > CANONICAL_VERTEX_BOUND {
            return Err(Error::TooManyVertices(self.n, CANONICAL_VERTEX_BOUND));
        }
        let colors = refine_colors(self.n, |i, j| vec![self[(i, j)]]);
        Ok(CanonicalKey(minimize_encoding(self, &colors)))
    }

    /// BFS closure under mutation modulo [`canonical_key`](Self::canonical_key).
    ///
    /// Returns the full set of canonical keys when the class closes below
    /// `cap`, and a [`Error::ClassOverflow`] signal otherwise (meaning: not
    /// established finite within budget).
    pub fn mutation_class(&self, cap: usize) -> Result<BTreeSet<CanonicalKey>> {
        assert!(cap > 0, "cap must be positive");
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(self.canonical_key()?);
        queue.push_back(self.clone());
        while let Some(m) = queue.pop_front() {
            for k in 0..m.n {
                let next = m.fz_mutate(k)?;
                if seen.insert(next.canonical_key()?) {
                    if seen.len() > cap {
                        return Err(Error::ClassOverflow(cap));
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(seen)
    }

    /// DOT rendering with `|b[i][j]|` parallel edges per pair.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph exchange {\n");
        for i in 0..self.n {
            let _ = writeln!(out, "  v{i} [label=\"{i}\"];");
        }
        for i in 0..self.n {
            for j in 0..self.n {
                for _ in 0..self[(i, j)].max(0) {
                    let _ = writeln!(out, "  v{i} -> v{j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

impl std::ops::Index<(usize, usize)> for ExchangeMatrix {
    type Output = i64;

    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.b[i * self.n + j]
    }
}

impl Serialize for ExchangeMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExchangeMatrixRepr {
            n: self.n,
            b: self.rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExchangeMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ExchangeMatrixRepr::deserialize(d)?;
        if repr.b.len() != repr.n {
            return Err(serde::de::Error::custom("matrix size does not match n"));
        }
        ExchangeMatrix::new(repr.b).map_err(serde::de::Error::custom)
    }
}

/// Canonical encoding of an exchange matrix; equal keys mean the matrices
/// differ by a vertex permutation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn bytes(&self) -> &[u8] {
        &self.0
    }
}

/// The four seed quivers of the elliptic root systems
/// D4(1,1), E6(1,1), E7(1,1) and E8(1,1).
///
/// Vertex numbering is row-major in the usual layout: top row left to
/// right first, then the middle row, then the bottom row. The double arrow
/// is a single matrix entry of ±2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SeedQuiver {
    D4_11,
    E6_11,
    E7_11,
    E8_11,
}

impl SeedQuiver {
    pub const ALL: [SeedQuiver; 4] = [
        SeedQuiver::D4_11,
        SeedQuiver::E6_11,
        SeedQuiver::E7_11,
        SeedQuiver::E8_11,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SeedQuiver::D4_11 => "D4_11",
            SeedQuiver::E6_11 => "E6_11",
            SeedQuiver::E7_11 => "E7_11",
            SeedQuiver::E8_11 => "E8_11",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse(format!("unknown seed quiver {name:?}")))
    }

    /// The exchange matrix of the named seed.
    pub fn matrix(&self) -> ExchangeMatrix {
        // Vertices row-major; "c1 => c2" below marks the double arrow.
        let arrows: (usize, &[(usize, usize, i64)]) = match self {
            // Top row 0 1 2, bottom row 3 4 5; centers 1 (top) and 4 (bottom).
            SeedQuiver::D4_11 => (
                6,
                &[
                    (1, 4, 2),
                    (0, 1, 1),
                    (2, 1, 1),
                    (3, 1, 1),
                    (5, 1, 1),
                    (4, 0, 1),
                    (4, 2, 1),
                    (4, 3, 1),
                    (4, 5, 1),
                ],
            ),
            // Top row 0 1 2, middle row 3 4, bottom row 5 6 7; centers 0 and 5.
            SeedQuiver::E6_11 => (
                8,
                &[
                    (0, 5, 2),
                    (1, 0, 1),
                    (2, 1, 1),
                    (5, 6, 1),
                    (6, 7, 1),
                    (3, 4, 1),
                    (5, 4, 1),
                    (5, 1, 1),
                    (4, 0, 1),
                    (6, 0, 1),
                ],
            ),
            // Top row 0..3, middle row 4, bottom row 5..8; centers 0 and 5.
            SeedQuiver::E7_11 => (
                9,
                &[
                    (0, 5, 2),
                    (1, 0, 1),
                    (2, 1, 1),
                    (3, 2, 1),
                    (5, 6, 1),
                    (6, 7, 1),
                    (7, 8, 1),
                    (5, 4, 1),
                    (4, 0, 1),
                    (5, 1, 1),
                    (6, 0, 1),
                ],
            ),
            // Top row 0..5, middle row 6, bottom row 7 8 9; centers 0 and 7.
            SeedQuiver::E8_11 => (
                10,
                &[
                    (0, 7, 2),
                    (1, 0, 1),
                    (2, 1, 1),
                    (3, 2, 1),
                    (4, 3, 1),
                    (5, 4, 1),
                    (7, 8, 1),
                    (8, 9, 1),
                    (7, 6, 1),
                    (6, 0, 1),
                    (7, 1, 1),
                    (8, 0, 1),
                ],
            ),
        };
        ExchangeMatrix::from_arrows(arrows.0, arrows.1).expect("seed data is well-formed")
    }
}

/// Iterated signature refinement: vertices get equal colors only if their
/// edge-label multisets towards each color class agree.
///
/// Color ids are ranks of sorted signatures and the stopping rule depends
/// only on the class-count sequence, both isomorphism-invariant, so two
/// isomorphic inputs receive matching color vectors.
pub(crate) fn refine_colors<F>(n: usize, edge: F) -> Vec<usize>
where
    F: Fn(usize, usize) -> Vec<i64>,
{
    let mut colors = vec![0usize; n.max(1)];
    let mut classes = 1usize;
    loop {
        type Sig = (Vec<(Vec<i64>, usize, Vec<i64>)>, usize);
        let sigs: Vec<Sig> = (0..n)
            .map(|i| {
                let mut sig: Vec<(Vec<i64>, usize, Vec<i64>)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (edge(i, j), colors[j], edge(j, i)))
                    .collect();
                sig.sort();
                (sig, colors[i])
            })
            .collect();
        let mut sorted: Vec<&Sig> = sigs.iter().collect();
        sorted.sort();
        sorted.dedup();
        colors = sigs
            .iter()
            .map(|s| sorted.binary_search(&s).expect("signature present"))
            .collect();
        if sorted.len() == classes || sorted.len() == n {
            return colors;
        }
        classes = sorted.len();
    }
}

/// Lexicographically minimal upper-triangle encoding over the permutations
/// that list color classes in order.
fn minimize_encoding(m: &ExchangeMatrix, colors: &[usize]) -> Vec<u8> {
    struct Search<'a> {
        m: &'a ExchangeMatrix,
        colors: &'a [usize],
        cell_of_slot: Vec<usize>,
        assigned: Vec<usize>,
        used: Vec<bool>,
        prefix: Vec<i64>,
        best: Option<Vec<i64>>,
    }

    impl Search<'_> {
        fn dfs(&mut self) {
            let n = self.m.n();
            let s = self.assigned.len();
            if s == n {
                if self.best.as_ref().is_none_or(|b| self.prefix < *b) {
                    self.best = Some(self.prefix.clone());
                }
                return;
            }
            for v in 0..n {
                if self.used[v] || self.colors[v] != self.cell_of_slot[s] {
                    continue;
                }
                let base = self.prefix.len();
                for t in 0..s {
                    self.prefix.push(self.m[(self.assigned[t], v)]);
                }
                // Prune only branches whose prefix already exceeds the best;
                // anything less-or-equal can still complete to a new minimum.
                let beaten = self
                    .best
                    .as_ref()
                    .is_some_and(|b| self.prefix[..] > b[..self.prefix.len()]);
                if !beaten {
                    self.assigned.push(v);
                    self.used[v] = true;
                    self.dfs();
                    self.assigned.pop();
                    self.used[v] = false;
                }
                self.prefix.truncate(base);
            }
        }
    }

    let n = m.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (colors[v], v));
    let mut search = Search {
        m,
        colors,
        cell_of_slot: order.iter().map(|&v| colors[v]).collect(),
        assigned: Vec::with_capacity(n),
        used: vec![false; n],
        prefix: Vec::with_capacity(n * (n - 1) / 2),
        best: None,
    };
    search.dfs();

    let enc = search.best.expect("at least one permutation exists");
    // Injective byte encoding biased for the tiny entries of mutation-finite
    // classes: one byte for |e| <= 119, an escape plus eight bytes otherwise.
    let mut bytes = Vec::with_capacity(enc.len() + 1);
    bytes.push(n as u8);
    for e in enc {
        if (-119..=119).contains(&e) {
            bytes.push((e + 120) as u8);
        } else {
            bytes.push(0xff);
            bytes.extend(e.to_be_bytes());
        }
    }
    bytes
}
