//! `ks-set.json`: vertices with integer components, edges and bases.
//!
//! ```json
//! {
//!   "bases": [[1, 2, 3, 4], ...],
//!   "basis_count": 9,
//!   "dimension": 4,
//!   "discrepancies": ["..."],
//!   "edge_count": 63,
//!   "edges": [[1, 2], ...],
//!   "vertices": [{"components": [1, 0, 0, 0], "id": 1}, ...]
//! }
//! ```
//!
//! On import only `vertices` is required. Missing `edges` are derived from the
//! components; missing `bases` are derived when components are present.

use serde::{Deserialize, Serialize};

use super::{find_bases, orthogonality_graph, Basis, KsVector, QUOTED_EXCLUSIVITY_RELATIONS};
use crate::error::{Error, Result};
use crate::graph::ExclusivityGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsSetDocument {
    pub vertices: Vec<VertexRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[u32; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub discrepancies: Vec<String>,
}

impl KsSetDocument {
    /// Export of a vector set together with its derived graph and bases.
    pub fn from_vectors(vectors: &[KsVector]) -> Result<Self> {
        let g = orthogonality_graph(vectors)?;
        let bases = find_bases(&g, vectors)?;
        let edges: Vec<[u32; 2]> = g.labelled_edges().into_iter().map(|(a, b)| [a, b]).collect();
        Ok(KsSetDocument {
            vertices: vectors
                .iter()
                .map(|v| VertexRecord {
                    id: v.id,
                    components: Some(v.components.clone()),
                })
                .collect(),
            edge_count: Some(edges.len()),
            edges: Some(edges),
            basis_count: Some(bases.len()),
            bases: Some(bases.into_iter().map(|b| b.members).collect()),
            dimension: vectors.first().map(|v| v.components.len()),
            discrepancies: Vec::new(),
        })
    }

    /// Flags the difference between the derived edge count and the count quoted in prose.
    pub fn with_quoted_edge_count_check(mut self) -> Self {
        if let Some(count) = self.edge_count {
            if count != QUOTED_EXCLUSIVITY_RELATIONS {
                self.discrepancies.push(format!(
                    "text quotes {QUOTED_EXCLUSIVITY_RELATIONS} exclusivity relations; \
                     the vectors yield {count} orthogonal pairs ({} directed)",
                    2 * count
                ));
            }
        }
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Vectors, when every vertex carries components.
    pub fn vectors(&self) -> Option<Vec<KsVector>> {
        self.vertices
            .iter()
            .map(|v| v.components.clone().map(|c| KsVector::new(v.id, c)))
            .collect()
    }

    pub fn graph(&self) -> Result<ExclusivityGraph> {
        match (&self.edges, self.vectors()) {
            (Some(edges), _) => {
                let mut g = ExclusivityGraph::new(self.vertices.iter().map(|v| v.id).collect())?;
                for [a, b] in edges {
                    g.add_edge_by_label(*a, *b)?;
                }
                Ok(g)
            }
            (None, Some(vectors)) => orthogonality_graph(&vectors),
            (None, None) => Err(Error::Graph(
                "document has neither edges nor vector components".into(),
            )),
        }
    }

    pub fn bases(&self) -> Result<Vec<Basis>> {
        match (&self.bases, self.vectors()) {
            (Some(b), _) => Ok(b.iter().cloned().map(Basis::new).collect()),
            (None, Some(vectors)) => find_bases(&self.graph()?, &vectors),
            (None, None) => Ok(Vec::new()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ksets::ks18_vectors;

    #[test]
    fn export_and_reimport() {
        let doc = KsSetDocument::from_vectors(&ks18_vectors())
            .unwrap()
            .with_quoted_edge_count_check();
        assert_eq!(doc.edge_count, Some(63));
        assert_eq!(doc.basis_count, Some(9));
        assert_eq!(doc.discrepancies.len(), 1);
        let text = serde_json::to_string(&doc).unwrap();
        let back = KsSetDocument::from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.graph().unwrap().edge_count(), 63);
        assert_eq!(back.bases().unwrap().len(), 9);
    }

    #[test]
    fn minimal_document_derives_structure() {
        let text = r#"{"vertices":[{"id":1,"components":[1,0]},{"id":2,"components":[0,1]}]}"#;
        let doc = KsSetDocument::from_json(text).unwrap();
        assert_eq!(doc.graph().unwrap().edge_count(), 1);
        assert_eq!(doc.bases().unwrap(), vec![Basis::new(vec![1, 2])]);
    }

    #[test]
    fn edges_without_components() {
        let text = r#"{"vertices":[{"id":1},{"id":2},{"id":3}],"edges":[[1,2]],"bases":[[1,2]]}"#;
        let doc = KsSetDocument::from_json(text).unwrap();
        assert_eq!(doc.graph().unwrap().edge_count(), 1);
        assert_eq!(doc.bases().unwrap().len(), 1);
        assert!(KsSetDocument::from_json("{").is_err());
    }
}
