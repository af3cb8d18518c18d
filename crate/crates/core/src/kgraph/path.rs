use serde::{Deserialize, Serialize};

use super::{Degree, EdgeIdx, VertexId};

/// A morphism of the k-graph in canonical (color-ascending) form.
///
/// `edges[0]` is the edge at the range end. Field order makes the derived
/// ordering compare degree first, then edge ids, then endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    pub(crate) degree: Degree,
    pub(crate) edges: Vec<EdgeIdx>,
    pub(crate) range: VertexId,
    pub(crate) source: VertexId,
}

impl Path {
    pub fn vertex(v: VertexId, k: usize) -> Self {
        Path {
            degree: Degree::zero(k),
            edges: Vec::new(),
            range: v,
            source: v,
        }
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn edges(&self) -> &[EdgeIdx] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True for degree-0 paths.
    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }
}
