//! Named graph families: an atlas of templates, a builder, exhaustive
//! enumeration of small connected graphs and a recognizer that maps a graph
//! back to its family and parameters.
//!
//! Every fixed-shape family is a template graph (`v1, v2, ...`), a list of
//! pendant slots (template vertices that receive `p_i` pendants), and for a few
//! families a hub vertex that receives depth-2 support children. Pendant-free
//! vertices carry no parameter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphcore::{
    canonical_code, classify_vertices, is_generalized_sun, CanonicalCode, Graph, GraphError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
    #[error("cannot parse instance '{0}': expected forms like M11(0,0) or H2(1,1,1;hub=[2,2])")]
    Parse(String),
    #[error("{family}: {constraint}")]
    Parameter { family: String, constraint: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Family identifiers in atlas order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    Cycle,
    GenSun,
    Fig1G1,
    G1,
    G2,
    G3,
    G4,
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    H8,
    H9,
    UX1,
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    M8,
    M9,
    M10,
    M11,
    M12,
    M13,
    M14,
    X1,
    X2,
    X3,
    X4,
    X5,
    X6,
    X7,
    X8,
    X9,
    X10,
    X11,
}

impl FamilyId {
    pub fn all() -> impl Iterator<Item = FamilyId> {
        ATLAS.iter().map(|e| e.id)
    }

    pub fn entry(self) -> &'static AtlasEntry {
        ATLAS
            .iter()
            .find(|e| e.id == self)
            .expect("every id has an atlas entry")
    }

    pub fn name(self) -> &'static str {
        self.entry().name
    }

    /// Unicyclic diameter-4 and bicyclic diameter-3 families.
    pub fn is_bicyclic(self) -> bool {
        self.entry().cycle_rank == 2
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    /// Full names (`B3-M11`, `UD4-H2`, `FIG1-G1`) or the short forms `M11`, `H2`,
    /// `G1`, `X3`, `C`, case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase();
        let short = |prefix: &str| format!("{prefix}{key}");
        ATLAS
            .iter()
            .find(|e| {
                e.name == key
                    || e.name == short("UD3-")
                    || e.name == short("UD4-")
                    || e.name == short("B3-")
            })
            .map(|e| e.id)
            .or(match key.as_str() {
                "C" | "CYCLE" => Some(FamilyId::Cycle),
                "SUN" | "GENSUN" => Some(FamilyId::GenSun),
                _ => None,
            })
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// How the vertex set of a family is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `C_k`, parameter `k >= 3`.
    Cycle,
    /// `C_k` with `p_i` pendants on the i-th cycle vertex, `k = #params`.
    Sun,
    /// Fixed template with pendant slots and an optional hub.
    Template,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    /// Template vertex, zero-based.
    pub vertex: usize,
    pub min: usize,
}

const fn s(vertex: usize) -> Slot {
    Slot { vertex, min: 0 }
}

const fn s1(vertex: usize) -> Slot {
    Slot { vertex, min: 1 }
}

/// One family of the atlas.
#[derive(Debug)]
pub struct AtlasEntry {
    pub id: FamilyId,
    pub name: &'static str,
    pub shape: Shape,
    pub template_n: usize,
    /// Zero-based template edges; vertex `i` is called `v{i+1}`.
    pub edges: &'static [(usize, usize)],
    pub slots: &'static [Slot],
    /// Template vertex receiving the depth-2 support children.
    pub hub: Option<usize>,
    pub cycle_rank: usize,
    /// Diameter every valid instance must have; `None` for cycles and suns.
    pub diameter: Option<usize>,
    /// False for shapes the characterization theorems do not name.
    pub covered: bool,
    /// Exact template neighborhoods, one-based, read off the weight equations
    /// used for the family's labeling argument. Checked by [`check_atlas`].
    pub neighborhoods: &'static [(usize, &'static [usize])],
    pub summary: &'static str,
}

impl AtlasEntry {
    pub fn param_count(&self) -> Option<usize> {
        match self.shape {
            Shape::Cycle => Some(1),
            Shape::Sun => None,
            Shape::Template => Some(self.slots.len()),
        }
    }

    pub fn has_hub(&self) -> bool {
        self.hub.is_some()
    }
}

const TRIANGLE: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 0)];
const C4: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3), (3, 0)];
const C5: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
const C6: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)];
const C7: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)];
const PAW: &[(usize, usize)] = &[(0, 1), (1, 2), (2, 3), (3, 1)];

macro_rules! entry {
    ($id:ident, $name:literal, $n:expr, $edges:expr, [$($slot:expr),*], $hub:expr,
     rank $rank:literal, diam $diam:expr, covered $cov:literal,
     [$(($v:literal, [$($w:literal),*])),*], $summary:literal) => {
        AtlasEntry {
            id: FamilyId::$id,
            name: $name,
            shape: Shape::Template,
            template_n: $n,
            edges: $edges,
            slots: &[$($slot),*],
            hub: $hub,
            cycle_rank: $rank,
            diameter: $diam,
            covered: $cov,
            neighborhoods: &[$(($v, &[$($w),*])),*],
            summary: $summary,
        }
    };
}

/// The atlas, in the order used for sorting records and reports.
pub static ATLAS: &[AtlasEntry] = &[
    AtlasEntry {
        id: FamilyId::Cycle,
        name: "CYCLE",
        shape: Shape::Cycle,
        template_n: 0,
        edges: &[],
        slots: &[],
        hub: None,
        cycle_rank: 1,
        diameter: None,
        covered: true,
        neighborhoods: &[],
        summary: "cycle C_k",
    },
    AtlasEntry {
        id: FamilyId::GenSun,
        name: "GENSUN",
        shape: Shape::Sun,
        template_n: 0,
        edges: &[],
        slots: &[],
        hub: None,
        cycle_rank: 1,
        diameter: None,
        covered: true,
        neighborhoods: &[],
        summary: "cycle C_k with p_i pendants on the i-th cycle vertex, some p_i > 0",
    },
    entry!(Fig1G1, "FIG1-G1", 3, TRIANGLE, [s1(0)], None, rank 1, diam Some(2), covered true,
        [], "triangle with p1 >= 1 pendants on v1"),
    entry!(G1, "UD3-G1", 3, TRIANGLE, [s(0), s(1), s(2)], None, rank 1, diam Some(3), covered true,
        [], "triangle with pendants on v1, v2, v3, at least two hosts"),
    entry!(G2, "UD3-G2", 4, PAW, [s1(0), s(1)], None, rank 1, diam Some(3), covered true,
        [(1, [2]), (2, [1, 3, 4]), (3, [2, 4])],
        "triangle v2 v3 v4 with support child v1 on v2"),
    entry!(G3, "UD3-G3", 4, C4, [s(0), s(1)], None, rank 1, diam Some(3), covered true,
        [], "C4 with pendants on adjacent v1, v2"),
    entry!(G4, "UD3-G4", 5, C5, [s(0), s(1)], None, rank 1, diam Some(3), covered true,
        [], "C5 with pendants on adjacent v1, v2"),
    entry!(H1, "UD4-H1", 4, PAW, [s(0), s(1)], Some(0), rank 1, diam Some(4), covered true,
        [(1, [2]), (2, [1, 3, 4]), (3, [2, 4])],
        "triangle v2 v3 v4, hub v1 on v2 carrying support children"),
    entry!(H2, "UD4-H2", 3, TRIANGLE, [s(0), s(1), s(2)], Some(0), rank 1, diam Some(4), covered true,
        [(1, [2, 3]), (2, [1, 3])],
        "triangle with hub v1 carrying support children"),
    entry!(H3, "UD4-H3", 4, C4, [s(0), s(1), s(2)], Some(1), rank 1, diam Some(4), covered true,
        [(1, [2, 4]), (2, [1, 3]), (4, [1, 3])],
        "C4 with hub v2 carrying support children"),
    entry!(H4, "UD4-H4", 4, C4, [s1(0), s1(1), s1(2), s1(3)], None, rank 1, diam Some(4), covered true,
        [], "C4 sun, every cycle vertex a support"),
    entry!(H5, "UD4-H5", 5, C5, [s(0), s(1), s(2)], Some(1), rank 1, diam Some(4), covered true,
        [(1, [2, 5]), (2, [1, 3]), (4, [3, 5])],
        "C5 with hub v2 carrying support children"),
    entry!(H6, "UD4-H6", 5, C5, [s(0), s(1), s(2), s(3), s(4)], None, rank 1, diam Some(4), covered true,
        [], "C5 sun with two supports at distance 2"),
    entry!(H7, "UD4-H7", 4, C4, [s1(0), s(1), s1(2)], None, rank 1, diam Some(4), covered true,
        [], "C4 sun with opposite supports v1, v3 and no pendant on v4"),
    entry!(H8, "UD4-H8", 6, C6, [s(0), s(1), s(2)], None, rank 1, diam Some(4), covered true,
        [], "C6 sun with pendants on consecutive v1, v2, v3"),
    entry!(H9, "UD4-H9", 7, C7, [s(0), s(1), s(2)], None, rank 1, diam Some(4), covered true,
        [], "C7 sun with pendants on consecutive v1, v2, v3"),
    entry!(UX1, "UD4-X1", 6, C6, [s1(0), s1(2), s1(4)], None, rank 1, diam Some(4), covered false,
        [], "C6 sun with pendants on alternate v1, v3, v5"),
    entry!(M1, "B3-M1", 5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)],
        [s(0), s(1), s(2)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 3, 4, 5]), (4, [1, 5])],
        "bowtie on center v1, pendants on the center and one triangle"),
    entry!(M2, "B3-M2", 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)],
        [s(0), s(1), s(2)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 3, 4]), (2, [1, 3]), (4, [1, 3])],
        "diamond with degree-3 v1, v3 and degree-2 v2, v4"),
    entry!(M3, "B3-M3", 5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 0)],
        [s(0), s(1), s(2)], None, rank 2, diam Some(3), covered true,
        [(3, [1, 2, 4]), (4, [3, 5]), (5, [1, 4])],
        "house with pendants on the roof triangle v1 v2 v3"),
    entry!(M4, "B3-M4", 6, &[(0, 1), (0, 4), (0, 5), (4, 5), (1, 2), (1, 3), (2, 3)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 5, 6]), (2, [1, 3, 4]), (3, [2, 4]), (5, [1, 6])],
        "two triangles joined by the bridge v1 v2"),
    entry!(M5, "B3-M5", 5, &[(0, 1), (1, 2), (2, 4), (4, 0), (2, 3), (3, 4)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 5]), (4, [3, 5]), (5, [1, 3, 4])],
        "house with pendants on the base v1 v2"),
    entry!(M6, "B3-M6", 6, &[(0, 1), (0, 3), (3, 2), (2, 1), (0, 4), (4, 5), (5, 1)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 4, 5]), (3, [2, 4])],
        "theta graph with paths of length 1, 3, 3 between v1 and v2"),
    entry!(M7, "B3-M7", 7, &[(0, 1), (0, 5), (5, 6), (6, 1), (0, 2), (2, 3), (3, 4), (4, 1)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 3, 6]), (7, [2, 6])],
        "theta graph with paths of length 1, 3, 4 between v1 and v2"),
    entry!(M8, "B3-M8", 5, &[(0, 2), (0, 3), (2, 3), (0, 1), (1, 4), (4, 2)],
        [s1(0), s1(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 3, 4]), (4, [1, 3]), (5, [2, 3])],
        "house with pendants on a roof corner v1 and the base vertex v2 below it"),
    entry!(M9, "B3-M9", 6, &[(0, 2), (0, 3), (2, 3), (0, 4), (0, 5), (4, 5), (0, 1)],
        [s(0), s1(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 3, 4, 5, 6]), (2, [1]), (3, [1, 4])],
        "bowtie on center v1 with support child v2"),
    entry!(M10, "B3-M10", 6, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 0)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 4, 5, 6]), (3, [2, 4]), (5, [1, 6])],
        "C4 and a triangle sharing v1, pendants on v1 and its C4 neighbor v2"),
    entry!(M11, "B3-M11", 7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (5, 6), (6, 0)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 5, 6, 7]), (3, [2, 4]), (4, [3, 5])],
        "C5 and a triangle sharing v1, pendants on v1 and its C5 neighbor v2"),
    entry!(M12, "B3-M12", 5, &[(0, 1), (1, 2), (1, 3), (1, 4), (2, 3), (3, 4)],
        [s1(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2]), (2, [1, 3, 4, 5]), (4, [2, 3, 5]), (5, [2, 4])],
        "diamond v2 v3 v4 v5 with support child v1 on the degree-3 vertex v2"),
    entry!(M13, "B3-M13", 6, &[(0, 1), (1, 2), (2, 3), (0, 4), (4, 3), (0, 5), (5, 3)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 5, 6]), (3, [2, 4]), (5, [1, 4])],
        "theta graph with paths of length 2, 2, 3 between v1 and v4, pendants on v1 and v2"),
    entry!(M14, "B3-M14", 6, &[(0, 1), (1, 3), (3, 4), (4, 5), (5, 0), (1, 2), (2, 3)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered true,
        [(1, [2, 6]), (2, [1, 3, 4]), (3, [2, 4]), (6, [1, 5])],
        "theta graph with paths of length 1, 2, 4 between v2 and v4"),
    entry!(X1, "B3-X1", 5, &[(0, 1), (1, 2), (0, 3), (3, 2), (0, 4), (4, 2)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered false,
        [], "K(2,3) with pendants on a branch vertex v1 and a middle vertex v2"),
    entry!(X2, "B3-X2", 6, &[(3, 0), (0, 1), (1, 2), (3, 4), (4, 2), (3, 5), (5, 2)],
        [s1(0), s1(1)], None, rank 2, diam Some(3), covered false,
        [], "theta(2,2,3) with pendants on both middle vertices v1, v2 of the long path"),
    entry!(X3, "B3-X3", 6, &[(0, 1), (1, 2), (0, 3), (3, 4), (4, 2), (0, 5), (5, 2)],
        [s(0), s1(1)], None, rank 2, diam Some(3), covered false,
        [], "theta(2,2,3) with pendants on a branch vertex v1 and a short-path middle v2"),
    entry!(X4, "B3-X4", 6, &[(0, 1), (0, 2), (2, 1), (0, 3), (3, 4), (4, 5), (5, 1)],
        [s1(0), s1(1)], None, rank 2, diam Some(3), covered false,
        [], "theta(1,2,4) with pendants on both branch vertices v1, v2"),
    entry!(X5, "B3-X5", 7, &[(1, 0), (0, 2), (1, 3), (3, 4), (4, 2), (1, 5), (5, 6), (6, 2)],
        [s(0), s(1)], None, rank 2, diam Some(3), covered false,
        [], "theta(2,3,3) with pendants on the short-path middle v1 and a branch vertex v2"),
    entry!(X6, "B3-X6", 7, &[(0, 1), (0, 2), (2, 1), (0, 3), (3, 4), (4, 5), (5, 6), (6, 1)],
        [], None, rank 2, diam Some(3), covered false,
        [], "bare theta(1,2,5)"),
    entry!(X7, "B3-X7", 7, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 5), (5, 6), (6, 1)],
        [], None, rank 2, diam Some(3), covered false,
        [], "bare theta(2,2,4)"),
    entry!(X8, "B3-X8", 8, &[(0, 2), (2, 1), (0, 3), (3, 4), (4, 1), (0, 5), (5, 6), (6, 7), (7, 1)],
        [], None, rank 2, diam Some(3), covered false,
        [], "bare theta(2,3,4)"),
    entry!(X9, "B3-X9", 8, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 5), (5, 6), (6, 7), (7, 1)],
        [], None, rank 2, diam Some(3), covered false,
        [], "bare theta(2,2,5)"),
    entry!(X10, "B3-X10", 8, &[(0, 2), (2, 3), (3, 1), (0, 4), (4, 5), (5, 1), (0, 6), (6, 7), (7, 1)],
        [], None, rank 2, diam Some(3), covered false,
        [], "bare theta(3,3,3)"),
    entry!(X11, "B3-X11", 9, &[(0, 2), (2, 3), (3, 1), (0, 4), (4, 5), (5, 1), (0, 6), (6, 7), (7, 8), (8, 1)],
        [], None, rank 2, diam Some(3), covered false,
        [], "bare theta(3,3,4)"),
];

/// A family plus its parameters: pendant counts per slot and, for hub
/// families, the pendant counts of the hub's support children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub family: FamilyId,
    pub params: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hub: Vec<usize>,
}

impl FamilyInstance {
    pub fn new(family: FamilyId, params: Vec<usize>) -> Self {
        FamilyInstance {
            family,
            params,
            hub: Vec::new(),
        }
    }

    pub fn with_hub(family: FamilyId, params: Vec<usize>, hub: Vec<usize>) -> Self {
        FamilyInstance {
            family,
            params,
            hub,
        }
    }

    pub fn entry(&self) -> &'static AtlasEntry {
        self.family.entry()
    }

    /// Vertex count of the built graph, without building it.
    pub fn vertex_count(&self) -> usize {
        let e = self.entry();
        match e.shape {
            Shape::Cycle => self.params.first().copied().unwrap_or(0),
            Shape::Sun => self.params.len() + self.params.iter().sum::<usize>(),
            Shape::Template => {
                e.template_n
                    + self.params.iter().sum::<usize>()
                    + self.hub.len()
                    + self.hub.iter().sum::<usize>()
            }
        }
    }

    fn violation(&self, constraint: String) -> FamilyError {
        FamilyError::Parameter {
            family: self.entry().name.to_string(),
            constraint,
        }
    }

    /// Checks everything except the diameter, which needs the built graph.
    fn check_shape(&self) -> Result<(), FamilyError> {
        let e = self.entry();
        if !e.has_hub() && !self.hub.is_empty() {
            return Err(self.violation("family takes no hub".into()));
        }
        match e.shape {
            Shape::Cycle => match self.params.as_slice() {
                [k] if *k >= 3 => Ok(()),
                [_] => Err(self.violation("cycle length k must be at least 3".into())),
                _ => Err(self.violation("expects exactly one parameter k".into())),
            },
            Shape::Sun => {
                if self.params.len() < 3 {
                    return Err(self.violation("needs a cycle of length at least 3".into()));
                }
                if self.params.iter().all(|&p| p == 0) {
                    return Err(self.violation("needs at least one pendant".into()));
                }
                Ok(())
            }
            Shape::Template => {
                if self.params.len() != e.slots.len() {
                    return Err(self.violation(format!(
                        "expects {} pendant parameters, got {}",
                        e.slots.len(),
                        self.params.len()
                    )));
                }
                for (i, (slot, &p)) in e.slots.iter().zip(&self.params).enumerate() {
                    if p < slot.min {
                        return Err(self.violation(format!(
                            "p{} >= {} required (pendants on v{})",
                            i + 1,
                            slot.min,
                            slot.vertex + 1
                        )));
                    }
                }
                if e.has_hub() {
                    if self.hub.is_empty() {
                        return Err(self.violation("hub needs at least one support child".into()));
                    }
                    if self.hub.contains(&0) {
                        return Err(
                            self.violation("every hub child needs at least one pendant".into())
                        );
                    }
                }
                Ok(())
            }
        }
    }

    /// The same instance with symmetric parameters in their recognized form.
    pub fn canonical(&self) -> Result<FamilyInstance, FamilyError> {
        let built = build(self)?;
        Ok(recognize(&built.graph).unwrap_or_else(|| self.clone()))
    }
}

impl fmt::Display for FamilyInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[usize]| {
            xs.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}({}", self.family, join(&self.params))?;
        if !self.hub.is_empty() {
            write!(f, ";hub=[{}]", join(&self.hub))?;
        }
        write!(f, ")")
    }
}

impl FromStr for FamilyInstance {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FamilyError::Parse(s.to_string());
        let text = s.trim();
        let (name, rest) = match text.find('(') {
            Some(i) => (&text[..i], &text[i..]),
            None => (text, "()"),
        };
        let family: FamilyId = name.parse()?;
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(err)?;
        let (params_text, hub_text) = match body.split_once(';') {
            Some((p, h)) => (p, Some(h)),
            None => (body, None),
        };
        let numbers = |t: &str| -> Result<Vec<usize>, FamilyError> {
            t.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<usize>().map_err(|_| err()))
                .collect()
        };
        let params = numbers(params_text)?;
        let hub = match hub_text {
            None => Vec::new(),
            Some(h) => {
                let h = h.trim();
                let list = h
                    .strip_prefix("hub")
                    .map(str::trim_start)
                    .and_then(|h| h.strip_prefix('='))
                    .map(str::trim)
                    .and_then(|h| h.strip_prefix('['))
                    .and_then(|h| h.strip_suffix(']'))
                    .ok_or_else(err)?;
                numbers(list)?
            }
        };
        Ok(FamilyInstance {
            family,
            params,
            hub,
        })
    }
}

/// A built instance with human-readable vertex roles.
#[derive(Debug, Clone)]
pub struct BuiltInstance {
    pub instance: FamilyInstance,
    pub graph: Graph,
    /// `v1, v2, ...` for template or cycle vertices, `v2.1` for the first
    /// pendant of `v2`, `h1` for hub children and `h1.1` for their pendants.
    pub roles: Vec<String>,
    /// Graph vertex of each hub child.
    pub hub_children: Vec<usize>,
}

impl BuiltInstance {
    pub fn vertex(&self, role: &str) -> Option<usize> {
        self.roles.iter().position(|r| r == role)
    }
}

pub fn build(instance: &FamilyInstance) -> Result<BuiltInstance, FamilyError> {
    instance.check_shape()?;
    let e = instance.entry();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut roles: Vec<String> = Vec::new();
    let mut hub_children = Vec::new();
    let add_pendants =
        |roles: &mut Vec<String>, edges: &mut Vec<(usize, usize)>, host: usize, k: usize| {
            let host_name = roles[host].clone();
            for j in 0..k {
                edges.push((host, roles.len()));
                roles.push(format!("{host_name}.{}", j + 1));
            }
        };
    match e.shape {
        Shape::Cycle | Shape::Sun => {
            let k = if e.shape == Shape::Cycle {
                instance.params[0]
            } else {
                instance.params.len()
            };
            roles.extend((1..=k).map(|i| format!("v{i}")));
            edges.extend((0..k).map(|i| (i, (i + 1) % k)));
            if e.shape == Shape::Sun {
                for (i, &p) in instance.params.iter().enumerate() {
                    add_pendants(&mut roles, &mut edges, i, p);
                }
            }
        }
        Shape::Template => {
            roles.extend((1..=e.template_n).map(|i| format!("v{i}")));
            edges.extend_from_slice(e.edges);
            for (slot, &p) in e.slots.iter().zip(&instance.params) {
                add_pendants(&mut roles, &mut edges, slot.vertex, p);
            }
            if let Some(hub) = e.hub {
                for (j, &c) in instance.hub.iter().enumerate() {
                    let child = roles.len();
                    edges.push((hub, child));
                    roles.push(format!("h{}", j + 1));
                    hub_children.push(child);
                    add_pendants(&mut roles, &mut edges, child, c);
                }
            }
        }
    }
    let graph = Graph::new(roles.len(), &edges)?;
    if let Some(d) = e.diameter {
        let actual = graph.diameter();
        if actual != d {
            return Err(
                instance.violation(format!("diameter is {actual} but the family requires {d}"))
            );
        }
    }
    Ok(BuiltInstance {
        instance: instance.clone(),
        graph,
        roles,
        hub_children,
    })
}

/// Verifies each recorded template neighborhood and the declared cycle rank
/// against the template itself. Returns one message per mismatch.
pub fn check_atlas() -> Vec<String> {
    let mut problems = Vec::new();
    for e in ATLAS.iter().filter(|e| e.shape == Shape::Template) {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); e.template_n];
        for &(u, v) in e.edges {
            adj[u].insert(v + 1);
            adj[v].insert(u + 1);
        }
        if e.edges.len() + 1 != e.template_n + e.cycle_rank {
            problems.push(format!("{}: template has the wrong cycle rank", e.name));
        }
        for &(v, expected) in e.neighborhoods {
            let want: BTreeSet<usize> = expected.iter().copied().collect();
            if adj[v - 1] != want {
                problems.push(format!(
                    "{}: N(v{v}) is {:?}, expected {:?}",
                    e.name,
                    adj[v - 1],
                    want
                ));
            }
        }
    }
    problems
}

/// Maps a graph to its atlas family with canonical parameters.
///
/// Cycles are reported as `CYCLE(n)`. Generalized suns that also fit a named
/// fixed-shape family are reported under that family; `GENSUN` itself is never
/// returned. When a graph admits several parameter readings (automorphic
/// placements), the lexicographically largest `(params, hub)` is returned, and
/// hub lists are sorted in decreasing order.
pub fn recognize(g: &Graph) -> Option<FamilyInstance> {
    recognize_all(g).into_iter().next()
}

/// Every family match, in atlas order. More than one entry means two atlas
/// families overlap, which the audit reports.
pub fn recognize_all(g: &Graph) -> Vec<FamilyInstance> {
    if g.cycle_rank() == 1 && (0..g.n()).all(|v| g.degree(v) == 2) {
        return vec![FamilyInstance::new(FamilyId::Cycle, vec![g.n()])];
    }
    let profile = classify_vertices(g);
    let skeleton: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) >= 2).collect();
    let diameter = g.diameter();
    let rank = g.cycle_rank();
    ATLAS
        .iter()
        .filter(|e| {
            e.shape == Shape::Template && e.cycle_rank == rank && e.diameter == Some(diameter)
        })
        .filter_map(|e| match_template(g, e, &skeleton, &profile.pendant_count))
        .collect()
}

fn match_template(
    g: &Graph,
    e: &AtlasEntry,
    skeleton: &[usize],
    pendant_count: &[usize],
) -> Option<FamilyInstance> {
    let m = if e.has_hub() {
        skeleton
            .len()
            .checked_sub(e.template_n)
            .filter(|&m| m >= 1)?
    } else if skeleton.len() == e.template_n {
        0
    } else {
        return None;
    };
    let tn = e.template_n + m;
    let mut tadj = vec![Vec::new(); tn];
    for &(u, v) in e.edges {
        tadj[u].push(v);
        tadj[v].push(u);
    }
    if let Some(hub) = e.hub {
        for c in e.template_n..tn {
            tadj[hub].push(c);
            tadj[c].push(hub);
        }
    }
    let in_skeleton: Vec<bool> = (0..g.n()).map(|v| g.degree(v) >= 2).collect();
    let sdeg: Vec<usize> = (0..g.n())
        .map(|v| g.neighbors(v).iter().filter(|&&w| in_skeleton[w]).count())
        .collect();
    // Template vertices in BFS order so each one after the first has an
    // already-placed neighbor to draw candidates from.
    let mut order = vec![0usize];
    let mut seen = vec![false; tn];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        for &w in &tadj[order[i]] {
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut best: Option<FamilyInstance> = None;
    let mut image = vec![usize::MAX; tn];
    let mut used = vec![false; g.n()];
    let mut found = |image: &[usize]| {
        let slot_vertices: BTreeSet<usize> = e.slots.iter().map(|s| s.vertex).collect();
        for t in 0..e.template_n {
            if !slot_vertices.contains(&t) && pendant_count[image[t]] > 0 {
                return;
            }
        }
        let params: Vec<usize> = e
            .slots
            .iter()
            .map(|s| pendant_count[image[s.vertex]])
            .collect();
        let mut hub: Vec<usize> = (e.template_n..tn)
            .map(|c| pendant_count[image[c]])
            .collect();
        hub.sort_unstable_by(|a, b| b.cmp(a));
        let candidate = FamilyInstance::with_hub(e.id, params, hub);
        if candidate.check_shape().is_err() {
            return;
        }
        if best
            .as_ref()
            .is_none_or(|b| (&candidate.params, &candidate.hub) > (&b.params, &b.hub))
        {
            best = Some(candidate);
        }
    };
    embed(
        g,
        &tadj,
        &order,
        0,
        e.template_n,
        &in_skeleton,
        &sdeg,
        &mut image,
        &mut used,
        &mut found,
    );
    best
}

#[allow(clippy::too_many_arguments)]
fn embed(
    g: &Graph,
    tadj: &[Vec<usize>],
    order: &[usize],
    depth: usize,
    first_child: usize,
    in_skeleton: &[bool],
    sdeg: &[usize],
    image: &mut [usize],
    used: &mut [bool],
    found: &mut dyn FnMut(&[usize]),
) {
    if depth == order.len() {
        found(image);
        return;
    }
    let t = order[depth];
    let anchor = tadj[t].iter().copied().find(|&w| image[w] != usize::MAX);
    let candidates: Vec<usize> = match anchor {
        Some(a) => g.neighbors(image[a]).to_vec(),
        None => (0..g.n()).collect(),
    };
    for x in candidates {
        if used[x] || !in_skeleton[x] || sdeg[x] != tadj[t].len() {
            continue;
        }
        // Hub children are interchangeable; keep their images increasing.
        if t > first_child && image[t - 1] != usize::MAX && image[t - 1] > x {
            continue;
        }
        let consistent = order[..depth]
            .iter()
            .all(|&s| tadj[t].contains(&s) == g.has_edge(x, image[s]));
        if !consistent {
            continue;
        }
        image[t] = x;
        used[x] = true;
        embed(
            g,
            tadj,
            order,
            depth + 1,
            first_child,
            in_skeleton,
            sdeg,
            image,
            used,
            found,
        );
        used[x] = false;
        image[t] = usize::MAX;
    }
}

/// Reads a generalized sun as `GENSUN(p1, ..., pk)` with the lexicographically
/// largest parameter vector over all rotations and reflections.
pub fn recognize_sun(g: &Graph) -> Option<FamilyInstance> {
    if !is_generalized_sun(g) {
        return None;
    }
    let cycle = crate::graphcore::sun_cycle(g)?;
    let profile = classify_vertices(g);
    let counts: Vec<usize> = cycle.iter().map(|&v| profile.pendant_count[v]).collect();
    let k = counts.len();
    let best = (0..k)
        .flat_map(|r| {
            let fwd: Vec<usize> = (0..k).map(|i| counts[(r + i) % k]).collect();
            let bwd: Vec<usize> = (0..k).map(|i| counts[(r + k - i) % k]).collect();
            [fwd, bwd]
        })
        .max()?;
    Some(FamilyInstance::new(FamilyId::GenSun, best))
}

/// Largest vertex count accepted by [`enumerate_connected`].
pub const MAX_ENUM_VERTICES: usize = 11;

/// All connected graphs on `n` vertices with the given cycle rank, one per
/// isomorphism class, optionally restricted to one diameter. Sorted by
/// canonical code.
///
/// Trees are grown by attaching leaves; extra edges are then added one at a
/// time. Adding an edge never increases the diameter, so intermediate graphs
/// whose diameter is already below the target are dropped.
pub fn enumerate_connected(
    n: usize,
    cycle_rank: usize,
    diameter: Option<usize>,
) -> Result<Vec<Graph>, FamilyError> {
    if n > MAX_ENUM_VERTICES {
        return Err(FamilyError::Graph(GraphError::TooLarge {
            what: "enumeration",
            limit: MAX_ENUM_VERTICES,
            n,
        }));
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    let max_edges = n * (n - 1) / 2;
    if n - 1 + cycle_rank > max_edges {
        return Ok(Vec::new());
    }
    let mut level: BTreeMap<CanonicalCode, Graph> = BTreeMap::new();
    let k2 = Graph::new(2, &[(0, 1)])?;
    level.insert(canonical_code(&k2)?, k2);
    for size in 3..=n {
        level = grow(level.values().collect(), |g| {
            (0..g.n())
                .map(|v| {
                    let mut edges = g.edges();
                    edges.push((v, size - 1));
                    Graph::new(size, &edges).expect("adding a leaf keeps the graph simple")
                })
                .collect()
        });
    }
    let keep = |g: &Graph| diameter.is_none_or(|d| g.diameter() >= d);
    level.retain(|_, g| keep(g));
    for _ in 0..cycle_rank {
        level = grow(level.values().collect(), |g| {
            let mut out = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if !g.has_edge(u, v) {
                        let mut edges = g.edges();
                        edges.push((u, v));
                        let h = Graph::new(n, &edges).expect("new edge keeps the graph simple");
                        if keep(&h) {
                            out.push(h);
                        }
                    }
                }
            }
            out
        });
    }
    Ok(level
        .into_values()
        .filter(|g| diameter.is_none_or(|d| g.diameter() == d))
        .collect())
}

fn grow(
    parents: Vec<&Graph>,
    children: impl Fn(&Graph) -> Vec<Graph> + Sync,
) -> BTreeMap<CanonicalCode, Graph> {
    parents
        .par_iter()
        .flat_map_iter(|g| children(g))
        .map(|h| (canonical_code(&h).expect("within canonical limit"), h))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(s: &str) -> FamilyInstance {
        s.parse().unwrap()
    }

    #[test]
    fn atlas_is_self_consistent() {
        assert_eq!(check_atlas(), Vec::<String>::new());
        let names: BTreeSet<&str> = ATLAS.iter().map(|e| e.name).collect();
        assert_eq!(names.len(), ATLAS.len());
    }

    #[test]
    fn instance_syntax_round_trips() {
        for text in [
            "B3-M11(0,0)",
            "UD4-H2(1,1,1;hub=[2,2])",
            "UD3-G1(1,1,1)",
            "CYCLE(5)",
        ] {
            assert_eq!(inst(text).to_string(), text);
        }
        assert_eq!(inst("M11(0,0)"), inst("B3-M11(0,0)"));
        assert_eq!(
            inst("h2(1,1,1; hub = [2,2])"),
            inst("UD4-H2(1,1,1;hub=[2,2])")
        );
        assert_eq!(inst("G1(1,1,1)").family, FamilyId::G1);
        assert_eq!(inst("B3-X6").params, Vec::<usize>::new());
        assert!(matches!(
            "Q7(1)".parse::<FamilyInstance>(),
            Err(FamilyError::UnknownFamily(_))
        ));
        assert!(matches!(
            "M11(0,x)".parse::<FamilyInstance>(),
            Err(FamilyError::Parse(_))
        ));
    }

    #[test]
    fn builds_with_expected_sizes() {
        let m11 = build(&inst("M11(0,0)")).unwrap();
        assert_eq!((m11.graph.n(), m11.graph.edge_count()), (7, 8));
        assert_eq!(m11.graph.diameter(), 3);
        let h2 = build(&inst("H2(1,1,1;hub=[2,2])")).unwrap();
        assert_eq!(h2.graph.n(), 3 + 3 + 2 + 4);
        assert_eq!(h2.graph.diameter(), 4);
        assert_eq!(h2.roles[h2.hub_children[0]], "h1");
        assert_eq!(h2.vertex("h2.2"), Some(11));
        assert_eq!(inst("H2(1,1,1;hub=[2,2])").vertex_count(), 12);
    }

    #[test]
    fn parameter_violations_name_the_constraint() {
        let err = build(&inst("G2(0,0)")).unwrap_err();
        assert_eq!(
            err,
            FamilyError::Parameter {
                family: "UD3-G2".into(),
                constraint: "p1 >= 1 required (pendants on v1)".into()
            }
        );
        assert!(matches!(
            build(&inst("M11(0)")),
            Err(FamilyError::Parameter { .. })
        ));
        assert!(matches!(
            build(&inst("H1(0,0)")),
            Err(FamilyError::Parameter { .. })
        ));
        assert!(matches!(
            build(&inst("H2(0,0,0;hub=[0])")),
            Err(FamilyError::Parameter { .. })
        ));
        assert!(matches!(
            build(&inst("M9(0,1;hub=[1])")),
            Err(FamilyError::Parameter { .. })
        ));
        let diam = build(&inst("G1(1,0,0)")).unwrap_err();
        assert!(diam.to_string().contains("diameter is 2"));
        assert!(matches!(
            build(&inst("CYCLE(2)")),
            Err(FamilyError::Parameter { .. })
        ));
        assert!(matches!(
            build(&inst("GENSUN(0,0,0)")),
            Err(FamilyError::Parameter { .. })
        ));
    }

    #[test]
    fn recognizes_built_instances() {
        for text in [
            "M11(0,0)",
            "M11(2,1)",
            "G2(1,0)",
            "H2(1,1,1;hub=[2,2])",
            "H3(0,0,0;hub=[1,1,1])",
            "M12(2,0)",
            "X5(1,1)",
            "UD4-X1(3,2,1)",
            "CYCLE(8)",
        ] {
            let i = inst(text);
            let g = build(&i).unwrap().graph;
            assert_eq!(recognize_all(&g), vec![i.clone()], "{text}");
        }
        let g = build(&inst("G1(1,2,3)")).unwrap().graph;
        assert_eq!(recognize(&g), Some(inst("G1(3,2,1)")));
    }

    #[test]
    fn sun_reading() {
        let g = build(&inst("GENSUN(0,1,0,2)")).unwrap().graph;
        assert_eq!(recognize_sun(&g), Some(inst("GENSUN(2,0,1,0)")));
        assert_eq!(recognize(&g), Some(inst("H7(2,0,1)")));
    }

    #[test]
    fn enumeration_counts_match_known_values() {
        // Non-isomorphic trees on 7 and 8 vertices.
        assert_eq!(enumerate_connected(7, 0, None).unwrap().len(), 11);
        assert_eq!(enumerate_connected(8, 0, None).unwrap().len(), 23);
        // Connected unicyclic graphs on 6 vertices.
        assert_eq!(enumerate_connected(6, 1, None).unwrap().len(), 13);
        // All connected graphs on 5 vertices, split by cycle rank.
        let total: usize = (0..=6)
            .map(|r| enumerate_connected(5, r, None).unwrap().len())
            .sum();
        assert_eq!(total, 21);
        assert!(enumerate_connected(12, 1, None).is_err());
    }
}
