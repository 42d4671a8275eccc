//! Moment problems as JSON documents: a bigraph, a colored word, one matrix
//! algebra with a state per vertex, and the matrices of the word.
//!
//! ```json
//! {"bigraph": {"vertices": ["a","b"], "edges1": [["a","a"],["b","b"]], "edges2": []},
//!  "word": ["a","b","a"],
//!  "algebras": {"a": {"dim": 2, "state": {"type": "trace"}},
//!               "b": {"dim": 2, "state": {"type": "vector", "components": [[1,0],[0,0]]}}},
//!  "elements": [[[1,0],[0,0],[0,0],[1,0]], ...]}
//! ```
//!
//! `bigraph` may also be a path, resolved against the directory of the
//! problem file. Matrices are row-major lists of `[re, im]` pairs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bigraph::{Bigraph, BigraphJson};
use crate::cumulants::{joint_moment_counted, CumulantKind, MatrixFamily};
use crate::error::{Error, Result};
use crate::hilbert::{vacuum_moment, ProductSpace};
use crate::ncps::{AlgebraElement, AlgebraState, CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BigraphSource {
    Inline(BigraphJson),
    Path(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum StateJson {
    Vector { components: Vec<[f64; 2]> },
    Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub state: StateJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProblemJson {
    pub bigraph: BigraphSource,
    pub word: Vec<String>,
    pub algebras: BTreeMap<String, AlgebraJson>,
    pub elements: Vec<Vec<[f64; 2]>>,
}

/// A validated moment problem.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    pub graph: Bigraph,
    pub colors: Vec<usize>,
    pub family: MatrixFamily,
}

fn complex(pair: &[f64; 2]) -> C64 {
    C64::new(pair[0], pair[1])
}

/// Moments of one problem in every basis, with the Hilbert-space value when
/// all states are vector states.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub free: C64,
    pub boolean: C64,
    pub classical: C64,
    pub hilbert: Option<C64>,
    /// Largest pairwise relative discrepancy between the available values.
    pub max_gap: f64,
}

/// `|a - b| / max(1, |a|, |b|)`.
pub fn relative_gap(a: C64, b: C64) -> f64 {
    (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
}

impl MomentProblem {
    pub fn new(graph: Bigraph, colors: Vec<usize>, family: MatrixFamily) -> Result<MomentProblem> {
        if family.states.len() != graph.len() {
            return Err(Error::DimMismatch {
                expected: graph.len(),
                got: family.states.len(),
            });
        }
        if family.elements.len() != colors.len() {
            return Err(Error::DimMismatch {
                expected: colors.len(),
                got: family.elements.len(),
            });
        }
        for (index, (e, &c)) in family.elements.iter().zip(&colors).enumerate() {
            if e.vertex != c {
                return Err(Error::VertexMismatch {
                    index,
                    expected: graph.name(c).to_string(),
                    found: graph.name(e.vertex).to_string(),
                });
            }
        }
        Ok(MomentProblem { graph, colors, family })
    }

    /// Parses a problem; a bigraph given as a path is read relative to
    /// `base`.
    pub fn from_json_str(s: &str, base: Option<&Path>) -> Result<MomentProblem> {
        let j: MomentProblemJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        MomentProblem::from_json(&j, base)
    }

    pub fn from_json(j: &MomentProblemJson, base: Option<&Path>) -> Result<MomentProblem> {
        let graph = match &j.bigraph {
            BigraphSource::Inline(b) => Bigraph::from_json(b)?,
            BigraphSource::Path(p) => {
                let path = base.map(|b| b.join(p)).unwrap_or_else(|| p.into());
                let text =
                    std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                Bigraph::from_json_str(&text)?
            }
        };
        let colors = graph.coloring(&j.word)?;
        let mut states = Vec::with_capacity(graph.len());
        for name in graph.names() {
            let alg = j
                .algebras
                .get(name)
                .ok_or_else(|| Error::Parse(format!("no algebra given for vertex `{name}`")))?;
            states.push(match &alg.state {
                StateJson::Trace => AlgebraState::NormalizedTrace(alg.dim),
                StateJson::Vector { components } => {
                    if components.len() != alg.dim {
                        return Err(Error::DimMismatch {
                            expected: alg.dim,
                            got: components.len(),
                        });
                    }
                    AlgebraState::vector(CVector::from_iterator(alg.dim, components.iter().map(complex)))?
                }
            });
        }
        for key in j.algebras.keys() {
            graph.index_of(key)?;
        }
        if j.elements.len() != colors.len() {
            return Err(Error::DimMismatch {
                expected: colors.len(),
                got: j.elements.len(),
            });
        }
        let elements = j
            .elements
            .iter()
            .zip(&colors)
            .map(|(entries, &c)| {
                let d = states[c].dim();
                if entries.len() != d * d {
                    return Err(Error::DimMismatch {
                        expected: d * d,
                        got: entries.len(),
                    });
                }
                Ok(AlgebraElement {
                    vertex: c,
                    matrix: CMatrix::from_row_iterator(d, d, entries.iter().map(complex)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MomentProblem::new(graph, colors, MatrixFamily::new(states, elements)?)
    }

    pub fn to_json(&self) -> MomentProblemJson {
        let pair = |z: &C64| [z.re, z.im];
        let algebras = self
            .graph
            .names()
            .iter()
            .zip(&self.family.states)
            .map(|(name, st)| {
                let state = match st {
                    AlgebraState::NormalizedTrace(_) => StateJson::Trace,
                    AlgebraState::Vector(xi) => StateJson::Vector {
                        components: xi.iter().map(pair).collect(),
                    },
                };
                (name.clone(), AlgebraJson { dim: st.dim(), state })
            })
            .collect();
        let elements = self
            .family
            .elements
            .iter()
            .map(|e| {
                let m = &e.matrix;
                (0..m.nrows())
                    .flat_map(|i| (0..m.ncols()).map(move |j| pair(&m[(i, j)])))
                    .collect()
            })
            .collect();
        MomentProblemJson {
            bigraph: BigraphSource::Inline(self.graph.to_json()),
            word: self.colors.iter().map(|&c| self.graph.name(c).to_string()).collect(),
            algebras,
            elements,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("problem serialization cannot fail")
    }

    fn handles(&self) -> Vec<usize> {
        (0..self.colors.len()).collect()
    }

    /// The joint moment in one basis, with the number of partitions summed.
    pub fn moment(&self, basis: CumulantKind) -> Result<(C64, usize)> {
        joint_moment_counted(&self.graph, &self.colors, &self.handles(), &self.family, basis)
    }

    /// The vacuum expectation on the reduced product space.
    pub fn hilbert_moment(&self) -> Result<C64> {
        let space = ProductSpace::from_states(&self.graph, &self.family.states, self.colors.len())?;
        vacuum_moment(&space, &self.colors, &self.family.matrices())
    }

    /// Evaluates every basis and, for vector states, the Hilbert oracle.
    pub fn verify(&self) -> Result<VerifyReport> {
        let free = self.moment(CumulantKind::Free)?.0;
        let boolean = self.moment(CumulantKind::Boolean)?.0;
        let classical = self.moment(CumulantKind::Classical)?.0;
        let hilbert = match self.hilbert_moment() {
            Ok(z) => Some(z),
            Err(Error::NotVectorState(_)) => None,
            Err(e) => return Err(e),
        };
        let mut values = vec![free, boolean, classical];
        values.extend(hilbert);
        let mut max_gap: f64 = 0.0;
        for (i, &a) in values.iter().enumerate() {
            for &b in &values[i + 1..] {
                max_gap = max_gap.max(relative_gap(a, b));
            }
        }
        Ok(VerifyReport {
            free,
            boolean,
            classical,
            hilbert,
            max_gap,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::PairKind;

    #[test]
    fn round_trip_and_verify() {
        let g = Bigraph::uniform(2, PairKind::Monotone);
        let colors = vec![0, 1, 0];
        let fam = MatrixFamily::random(&colors, &[2, 3], 4).unwrap();
        let p = MomentProblem::new(g, colors, fam).unwrap();
        let text = p.to_json_string();
        let q = MomentProblem::from_json_str(&text, None).unwrap();
        assert_eq!(q.colors, p.colors);
        assert_eq!(q.family.matrices(), p.family.matrices());
        let report = q.verify().unwrap();
        assert!(report.hilbert.is_some());
        assert!(report.max_gap < 1e-9, "{report:?}");
    }

    #[test]
    fn trace_states_skip_hilbert() {
        let text = r#"{"bigraph": {"vertices": ["a"], "edges1": [["a","a"]]},
            "word": ["a","a"],
            "algebras": {"a": {"dim": 2, "state": {"type": "trace"}}},
            "elements": [[[1,0],[0,0],[0,0],[3,0]], [[2,0],[0,0],[0,0],[0,0]]]}"#;
        let p = MomentProblem::from_json_str(text, None).unwrap();
        let r = p.verify().unwrap();
        assert_eq!(r.hilbert, None);
        assert!((r.free - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn schema_errors() {
        let bad_diag = r#"{"bigraph": {"vertices": ["a"], "edges1": []}, "word": ["a"],
            "algebras": {"a": {"dim": 1, "state": {"type": "trace"}}}, "elements": [[[1,0]]]}"#;
        assert!(matches!(
            MomentProblem::from_json_str(bad_diag, None),
            Err(Error::DiagonalMissing(_))
        ));
        let wrong_size = r#"{"bigraph": {"vertices": ["a"], "edges1": [["a","a"]]}, "word": ["a"],
            "algebras": {"a": {"dim": 2, "state": {"type": "trace"}}}, "elements": [[[1,0]]]}"#;
        assert!(matches!(
            MomentProblem::from_json_str(wrong_size, None),
            Err(Error::DimMismatch { .. })
        ));
        assert!(matches!(MomentProblem::from_json_str("{", None), Err(Error::Parse(_))));
    }
}
