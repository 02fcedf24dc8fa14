//! Exhaustive search for magic labelings over a finite abelian group.
//!
//! For each candidate magic constant `mu` (in lexicographic order) the search
//! labels every support vertex with `mu`, then alternates propagation and
//! branching:
//! - a vertex with one unlabeled neighbor forces that neighbor to
//!   `mu - (sum of the labeled ones)`, and a forced zero is a conflict;
//! - a vertex with no unlabeled neighbor must already have weight `mu`;
//! - the branching vertex is the unlabeled one whose neighborhood closest to
//!   being complete is smallest, ties to the lowest index.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{CayleyTable, GroupError, GroupSpec};
use crate::graphcore::{classify_vertices, degrees_same_parity, Graph};
use crate::labeling::{verify_magic, Labeling, MagicCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("{what} is limited to {limit}, got {actual}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Size bounds beyond which the solver refuses to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    pub max_vertices: usize,
    pub max_count_vertices: usize,
    pub max_count_order: usize,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits {
            max_vertices: 13,
            max_count_vertices: 10,
            max_count_order: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Witness,
    Exhausted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Branching decisions tried.
    pub nodes: u64,
    /// Branches and magic constants cut off by a conflict.
    pub prunes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub witness: Option<(Labeling, MagicCertificate)>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmpiricalVerdict {
    /// The first catalog group, in catalog order, with no magic labeling.
    RefutedBy(GroupSpec),
    SurvivesCatalog,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Solver {
    pub limits: SolverLimits,
}

const UNLABELED: u16 = u16::MAX;

struct Search<'a> {
    g: &'a Graph,
    t: &'a CayleyTable,
    mu: u16,
    label: Vec<u16>,
    partial: Vec<u16>,
    open: Vec<usize>,
    trail: Vec<usize>,
    queue: Vec<usize>,
    stats: SolveStats,
    count_all: bool,
    found: u64,
    first: Option<Vec<u16>>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, t: &'a CayleyTable, count_all: bool) -> Self {
        let n = g.n();
        Search {
            g,
            t,
            mu: 0,
            label: vec![UNLABELED; n],
            partial: vec![0; n],
            open: (0..n).map(|v| g.degree(v)).collect(),
            trail: Vec::with_capacity(n),
            queue: Vec::new(),
            stats: SolveStats::default(),
            count_all,
            found: 0,
            first: None,
        }
    }

    fn set(&mut self, u: usize, x: u16) {
        self.label[u] = x;
        self.trail.push(u);
        for &w in self.g.neighbors(u) {
            self.partial[w] = self.t.add(self.partial[w], x);
            self.open[w] -= 1;
            self.queue.push(w);
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let u = self.trail.pop().expect("above mark");
            let x = self.label[u];
            for &w in self.g.neighbors(u) {
                self.partial[w] = self.t.sub(self.partial[w], x);
                self.open[w] += 1;
            }
            self.label[u] = UNLABELED;
        }
    }

    /// Drains the queue; false on a conflict.
    fn propagate(&mut self) -> bool {
        while let Some(w) = self.queue.pop() {
            match self.open[w] {
                0 => {
                    if self.partial[w] != self.mu {
                        self.queue.clear();
                        return false;
                    }
                }
                1 => {
                    let need = self.t.sub(self.mu, self.partial[w]);
                    if need == 0 {
                        self.queue.clear();
                        return false;
                    }
                    let y = *self
                        .g
                        .neighbors(w)
                        .iter()
                        .find(|&&y| self.label[y] == UNLABELED)
                        .expect("one open neighbor");
                    self.set(y, need);
                }
                _ => {}
            }
        }
        true
    }

    fn branch_vertex(&self) -> Option<usize> {
        (0..self.g.n())
            .filter(|&u| self.label[u] == UNLABELED)
            .min_by_key(|&u| {
                let tightest = self
                    .g
                    .neighbors(u)
                    .iter()
                    .map(|&w| self.open[w])
                    .min()
                    .unwrap_or(usize::MAX);
                (tightest, u)
            })
    }

    /// True when the search should stop.
    fn search(&mut self) -> bool {
        let Some(u) = self.branch_vertex() else {
            self.found += 1;
            if self.first.is_none() {
                self.first = Some(self.label.clone());
            }
            return !self.count_all;
        };
        for x in 1..self.t.order() as u16 {
            self.stats.nodes += 1;
            let mark = self.trail.len();
            self.set(u, x);
            if self.propagate() {
                if self.search() {
                    return true;
                }
            } else {
                self.stats.prunes += 1;
            }
            self.undo_to(mark);
        }
        false
    }

    /// Runs every magic constant in order; stops at the first labeling
    /// unless counting.
    fn run(&mut self) {
        let supports = classify_vertices(self.g).supports;
        for mu in 0..self.t.order() as u16 {
            if mu == 0 && !supports.is_empty() {
                self.stats.prunes += 1;
                continue;
            }
            self.mu = mu;
            for &s in &supports {
                self.set(s, mu);
            }
            self.queue.extend(0..self.g.n());
            if self.propagate() {
                if self.search() {
                    return;
                }
            } else {
                self.stats.prunes += 1;
            }
            self.undo_to(0);
        }
    }
}

impl Solver {
    pub fn new(limits: SolverLimits) -> Self {
        Solver { limits }
    }

    fn check_size(&self, g: &Graph) -> Result<(), SolverError> {
        if g.n() > self.limits.max_vertices {
            return Err(SolverError::TooLarge {
                what: "magic labeling search (vertices)",
                limit: self.limits.max_vertices,
                actual: g.n(),
            });
        }
        Ok(())
    }

    /// Finds a magic labeling or proves there is none.
    pub fn exists_magic(&self, g: &Graph, group: &GroupSpec) -> Result<SolveOutcome, SolverError> {
        self.check_size(g)?;
        let start = Instant::now();
        let table = CayleyTable::new(group)?;
        let mut s = Search::new(g, &table, false);
        s.run();
        let mut stats = s.stats;
        stats.elapsed = start.elapsed();
        let witness = s.first.map(|labels| {
            let values = labels.iter().map(|&x| table.element(x)).collect();
            let l = Labeling::new(group.clone(), values).expect("search never assigns zero");
            let cert = verify_magic(g, &l)
                .expect("dimensions match")
                .expect("search only completes magic labelings");
            (l, cert)
        });
        Ok(SolveOutcome {
            status: if witness.is_some() {
                SolveStatus::Witness
            } else {
                SolveStatus::Exhausted
            },
            witness,
            stats,
        })
    }

    /// Number of magic labelings, summed over all magic constants.
    pub fn count_magic(&self, g: &Graph, group: &GroupSpec) -> Result<u64, SolverError> {
        if g.n() > self.limits.max_count_vertices {
            return Err(SolverError::TooLarge {
                what: "labeling count (vertices)",
                limit: self.limits.max_count_vertices,
                actual: g.n(),
            });
        }
        if group.order() > self.limits.max_count_order {
            return Err(SolverError::TooLarge {
                what: "labeling count (group order)",
                limit: self.limits.max_count_order,
                actual: group.order(),
            });
        }
        let table = CayleyTable::new(group)?;
        let mut s = Search::new(g, &table, true);
        s.run();
        Ok(s.found)
    }

    /// First group of `catalog` admitting no magic labeling.
    pub fn empirical_verdict(
        &self,
        g: &Graph,
        catalog: &[GroupSpec],
    ) -> Result<EmpiricalVerdict, SolverError> {
        let outcomes: Vec<Result<SolveStatus, SolverError>> = catalog
            .par_iter()
            .map(|a| self.exists_magic(g, a).map(|o| o.status))
            .collect();
        for (a, outcome) in catalog.iter().zip(outcomes) {
            if outcome? == SolveStatus::Exhausted {
                return Ok(EmpiricalVerdict::RefutedBy(a.clone()));
            }
        }
        Ok(EmpiricalVerdict::SurvivesCatalog)
    }
}

/// [`Solver::exists_magic`] with default limits.
pub fn exists_magic(g: &Graph, group: &GroupSpec) -> Result<SolveOutcome, SolverError> {
    Solver::default().exists_magic(g, group)
}

/// [`Solver::count_magic`] with default limits.
pub fn count_magic(g: &Graph, group: &GroupSpec) -> Result<u64, SolverError> {
    Solver::default().count_magic(g, group)
}

/// Over `Z2` every label is 1, so the weight of `v` is `deg(v) mod 2`.
pub fn z2_magic(g: &Graph) -> bool {
    degrees_same_parity(g)
}

/// [`Solver::empirical_verdict`] with default limits.
pub fn is_group_vertex_magic_empirical(
    g: &Graph,
    catalog: &[GroupSpec],
) -> Result<EmpiricalVerdict, SolverError> {
    Solver::default().empirical_verdict(g, catalog)
}
