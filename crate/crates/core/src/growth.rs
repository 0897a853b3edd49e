//! Farey-tree walks over tilting configurations and the exponential-growth
//! certificate: the full depth-n ball of the 3-regular tree realized by
//! composite mutations, with per-node mutation budgets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::farey::FareyTriple;
use crate::templates::{composite_mutate, match_template, RoleMap, TubularType};
use crate::tilting::{realize_base, TiltingConfig};
use crate::{Error, Result};

/// A step address: the position of the mutated element in the ascending
/// order of the current triple (least, middle, greatest).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Branch {
    L,
    M,
    R,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::L, Branch::M, Branch::R];

    fn position(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::L => "L",
            Branch::M => "M",
            Branch::R => "R",
        })
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(Branch::L),
            "M" | "m" => Ok(Branch::M),
            "R" | "r" => Ok(Branch::R),
            _ => Err(Error::Parse(format!("expected L, M or R, got {s:?}"))),
        }
    }
}

/// One visited tree node: the realized triple, its depth, the cumulative
/// number of elementary mutations spent reaching it, and whether the
/// configuration re-matched its template there.
#[derive(Clone, Debug, Serialize)]
pub struct WalkRecord {
    pub triple: FareyTriple,
    pub depth: u32,
    pub mutations: u64,
    pub roles_ok: bool,
}

/// A walk state: a configuration sitting at a Farey tree node.
#[derive(Clone, Debug)]
pub struct WalkState {
    pub config: TiltingConfig,
    pub roles: RoleMap,
    pub depth: u32,
    pub mutations: u64,
    /// Position (in the sorted triple) whose mutation would backtrack.
    banned: Option<usize>,
}

impl WalkState {
    /// The base realization at the root triple `{0, 1, ∞}`.
    pub fn start(kind: TubularType) -> Result<Self> {
        let config = realize_base(kind.weights())?;
        let roles = match_template(&config)?.ok_or(Error::NoTemplateMatch)?;
        Ok(Self {
            config,
            roles,
            depth: 0,
            mutations: 0,
            banned: None,
        })
    }

    pub fn triple(&self) -> FareyTriple {
        self.roles.triple().expect("family slopes form a triple")
    }

    /// Position in the sorted triple whose mutation would backtrack.
    pub fn banned_position(&self) -> Option<usize> {
        self.banned
    }

    /// Expands one branch; rejects the backtracking direction.
    pub fn step(&self, branch: Branch) -> Result<WalkState> {
        let pos = branch.position();
        if self.banned == Some(pos) {
            return Err(Error::InvalidPath(format!(
                "step {branch} at depth {} undoes the previous step",
                self.depth
            )));
        }
        let triple = self.triple();
        let direction = &triple.elems()[pos];
        let family = self
            .roles
            .family_of_slope(direction)
            .expect("triple elements are the family slopes");
        let kind = self.roles.kind;
        let (config, roles) = composite_mutate(&self.config, &self.roles, family)?;
        let (new_triple, fresh) = triple.exchange(direction)?;
        let banned = new_triple.elems().iter().position(|e| *e == fresh);
        debug_assert_eq!(roles.triple().expect("matched"), new_triple);
        Ok(WalkState {
            config,
            roles,
            depth: self.depth + 1,
            mutations: self.mutations + crate::templates::sequence_length(kind, family),
            banned,
        })
    }

    pub fn record(&self) -> WalkRecord {
        WalkRecord {
            triple: self.triple(),
            depth: self.depth,
            mutations: self.mutations,
            roles_ok: true,
        }
    }
}

/// A list of realized tree nodes together with the budget data needed to
/// certify exponential growth.
#[derive(Clone, Debug, Serialize)]
pub struct WalkCertificate {
    pub weights: Vec<u32>,
    pub depth: u32,
    pub budget_k: u32,
    pub records: Vec<WalkRecord>,
}

#[derive(Serialize)]
struct CertificateSummary<'a> {
    weights: &'a [u32],
    depth: u32,
    k: u32,
    budget: u64,
    configurations: usize,
    distinct: usize,
    max_mutations: u64,
}

impl WalkCertificate {
    /// Number of distinct realized triples.
    pub fn distinct(&self) -> usize {
        self.records
            .iter()
            .map(|r| &r.triple)
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn max_mutations(&self) -> u64 {
        self.records.iter().map(|r| r.mutations).max().unwrap_or(0)
    }

    /// Checks the certificate clauses: the expected node count, pairwise
    /// distinct slope sets, role matches everywhere, and the per-node
    /// mutation budget `k · depth`.
    pub fn check(&self, expect_full_ball: bool) -> Result<()> {
        let fail = |msg: String| Err(Error::CertificateFailed(msg));
        if expect_full_ball {
            let expected = 3 * ((1u64 << self.depth) - 1);
            if self.records.len() as u64 != expected {
                return fail(format!(
                    "expected {expected} configurations at depth {}, got {}",
                    self.depth,
                    self.records.len()
                ));
            }
        }
        if self.distinct() != self.records.len() {
            return fail(format!(
                "{} records but only {} distinct slope sets",
                self.records.len(),
                self.distinct()
            ));
        }
        for r in &self.records {
            if !r.roles_ok {
                return fail(format!("role match failed at {}", r.triple));
            }
            if r.mutations > (self.budget_k as u64) * (r.depth as u64) {
                return fail(format!(
                    "{} needed {} elementary mutations, budget {}",
                    r.triple,
                    r.mutations,
                    (self.budget_k as u64) * (r.depth as u64)
                ));
            }
        }
        Ok(())
    }

    /// One JSON object per record, then a summary line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        let summary = CertificateSummary {
            weights: &self.weights,
            depth: self.depth,
            k: self.budget_k,
            budget: (self.budget_k as u64) * (self.depth as u64),
            configurations: self.records.len(),
            distinct: self.distinct(),
            max_mutations: self.max_mutations(),
        };
        out.push_str(&serde_json::to_string(&summary).expect("summary serializes"));
        out.push('\n');
        out
    }
}

/// Follows one path from the base realization, recording each node.
pub fn walk(kind: TubularType, path: &[Branch]) -> Result<WalkCertificate> {
    let mut state = WalkState::start(kind)?;
    let mut records = vec![state.record()];
    for branch in path {
        state = state.step(*branch)?;
        records.push(state.record());
    }
    Ok(WalkCertificate {
        weights: kind.weights().to_vec(),
        depth: path.len() as u32,
        budget_k: kind.budget_k(),
        records,
    })
}

/// Expands the full Farey ball to depth `n`: every non-backtracking path,
/// breadth first, children in L, M, R order. The result is checked before
/// it is returned.
pub fn growth_certificate(kind: TubularType, depth: u32) -> Result<WalkCertificate> {
    if depth == 0 {
        return Err(Error::CertificateFailed(
            "certificate depth must be at least 1".into(),
        ));
    }
    let mut records = Vec::new();
    let mut frontier = vec![WalkState::start(kind)?];
    for _ in 0..depth {
        let mut next = Vec::new();
        for state in &frontier {
            for branch in Branch::ALL {
                if state.banned == Some(branch.position()) {
                    continue;
                }
                let child = state.step(branch)?;
                records.push(child.record());
                next.push(child);
            }
        }
        frontier = next;
    }
    let cert = WalkCertificate {
        weights: kind.weights().to_vec(),
        depth,
        budget_k: kind.budget_k(),
        records,
    };
    cert.check(true)?;
    Ok(cert)
}
