//! Vertex labelings by nonzero group elements and their verification.

use std::fmt;

use thiserror::Error;

use crate::abelian::{GroupElement, GroupError, GroupSpec};
use crate::graphcore::{classify_vertices, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelingError {
    #[error("invalid labeling: vertex {0} has the zero label")]
    ZeroLabel(usize),
    #[error("labeling has {labels} labels but the graph has {vertices} vertices")]
    LengthMismatch { labels: usize, vertices: usize },
    #[error("labeling over {labeling} cannot be checked against {expected}")]
    GroupMismatch { labeling: String, expected: String },
    #[error("cannot parse labels: {0}")]
    Parse(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// An assignment of a nonzero element of `group` to each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    group: GroupSpec,
    values: Vec<GroupElement>,
}

impl Labeling {
    /// Fails on a zero label or on an element outside the group.
    pub fn new(group: GroupSpec, values: Vec<GroupElement>) -> Result<Self, LabelingError> {
        for (v, x) in values.iter().enumerate() {
            if !group.contains(x) {
                return Err(GroupError::Mismatch {
                    element: x.to_string(),
                    group: group.to_string(),
                }
                .into());
            }
            if x.is_zero() {
                return Err(LabelingError::ZeroLabel(v));
            }
        }
        Ok(Labeling { group, values })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn get(&self, v: usize) -> &GroupElement {
        &self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Relabels vertices: the new label of `perm[v]` is the old label of `v`.
    pub fn permuted(&self, perm: &[usize]) -> Labeling {
        let mut values = self.values.clone();
        for (v, &w) in perm.iter().enumerate() {
            values[w] = self.values[v].clone();
        }
        Labeling {
            group: self.group.clone(),
            values,
        }
    }

    /// Applies a map on group elements, which must send nonzero elements to
    /// nonzero elements (an automorphism, say).
    pub fn map_elements(
        &self,
        f: impl Fn(&GroupElement) -> GroupElement,
    ) -> Result<Labeling, LabelingError> {
        Labeling::new(self.group.clone(), self.values.iter().map(f).collect())
    }

    /// Parses `v0=1,v1=(1,0),...`, with every vertex given exactly once.
    pub fn parse(group: &GroupSpec, n: usize, text: &str) -> Result<Labeling, LabelingError> {
        let mut values: Vec<Option<GroupElement>> = vec![None; n];
        for item in split_top_level(text) {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item.split_once('=').ok_or_else(|| {
                LabelingError::Parse(format!("expected vN=ELEMENT, found '{item}'"))
            })?;
            let v: usize = key
                .trim()
                .trim_start_matches(['v', 'V'])
                .parse()
                .map_err(|_| LabelingError::Parse(format!("bad vertex name '{}'", key.trim())))?;
            if v >= n {
                return Err(LabelingError::Parse(format!(
                    "vertex v{v} out of range 0..{n}"
                )));
            }
            if values[v].is_some() {
                return Err(LabelingError::Parse(format!("vertex v{v} labeled twice")));
            }
            values[v] = Some(group.parse_element(value)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(v, x)| {
                x.ok_or_else(|| LabelingError::Parse(format!("vertex v{v} has no label")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Labeling::new(group.clone(), values)
    }
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, x) in self.values.iter().enumerate() {
            if v > 0 {
                write!(f, ",")?;
            }
            write!(f, "v{v}={x}")?;
        }
        Ok(())
    }
}

/// Evidence that a labeling is magic: the common weight `mu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagicCertificate {
    pub group: GroupSpec,
    pub mu: GroupElement,
}

fn check_dimensions(g: &Graph, l: &Labeling) -> Result<(), LabelingError> {
    if l.len() != g.n() {
        return Err(LabelingError::LengthMismatch {
            labels: l.len(),
            vertices: g.n(),
        });
    }
    Ok(())
}

/// Sum of the labels on the open neighborhood of `v`.
pub fn weight(g: &Graph, l: &Labeling, v: usize) -> Result<GroupElement, LabelingError> {
    check_dimensions(g, l)?;
    let mut acc = l.group.zero();
    for &w in g.neighbors(v) {
        acc = l.group.add(&acc, l.get(w))?;
    }
    Ok(acc)
}

/// `Some` with the common weight if every vertex has the same weight.
pub fn verify_magic(g: &Graph, l: &Labeling) -> Result<Option<MagicCertificate>, LabelingError> {
    check_dimensions(g, l)?;
    let mu = weight(g, l, 0)?;
    for v in 1..g.n() {
        if weight(g, l, v)? != mu {
            return Ok(None);
        }
    }
    Ok(Some(MagicCertificate {
        group: l.group.clone(),
        mu,
    }))
}

/// Checks a certificate against a labeling over the expected group.
pub fn verify_over(
    g: &Graph,
    group: &GroupSpec,
    l: &Labeling,
) -> Result<Option<MagicCertificate>, LabelingError> {
    if l.group() != group {
        return Err(LabelingError::GroupMismatch {
            labeling: l.group().to_string(),
            expected: group.to_string(),
        });
    }
    verify_magic(g, l)
}

/// Every support vertex carries the magic constant: the weight of a pendant
/// is the label of its support.
pub fn check_support_forcing(g: &Graph, cert: &MagicCertificate, l: &Labeling) -> bool {
    let profile = classify_vertices(g);
    l.len() == g.n() && profile.supports.iter().all(|&s| *l.get(s) == cert.mu)
}
