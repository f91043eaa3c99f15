use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
}

/// A finite point space. The position of a label in `points` is its
/// canonical index, used for every ordering and tie-break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    points: Vec<String>,
    index: HashMap<String, usize>,
}

impl FiniteSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Arc<Self>, SpaceError> {
        let points: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(SpaceError::DuplicateLabel(p.clone()));
            }
        }
        Ok(Arc::new(FiniteSpace { points, index }))
    }

    /// The space `{0, 1, ..., n-1}` labelled by decimal indices.
    pub fn indexed(n: usize) -> Arc<Self> {
        Self::new((0..n).map(|i| i.to_string())).expect("decimal labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SpaceError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| SpaceError::UnknownLabel(label.to_string()))
    }
}

pub(crate) fn same_space(a: &Arc<FiniteSpace>, b: &Arc<FiniteSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}
